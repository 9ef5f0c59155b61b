#include "brentlab/dirichlet.hpp"

#include "brentlab/grid.hpp"
#include "brentlab/numeric.hpp"
#include "brentlab/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace brentlab {

namespace {

constexpr double ln2 = 0.69314718055994530942;
constexpr std::uint64_t max_v = std::uint64_t{1} << 24;

void check_s(double s) {
    if (!(s > 1.0))
        throw std::domain_error("dirichlet: requires s > 1");
}

void check_family(Ensemble family) {
    if (family != Ensemble::Odd && family != Ensemble::OddCoprime)
        throw std::invalid_argument(
            "dirichlet: only the odd and odd-coprime families have series");
}

void check_v_max(std::uint64_t v_max) {
    if (v_max < 3 || v_max > max_v)
        throw std::invalid_argument("dirichlet: v_max out of [3, 2^24]");
}

/// Monotone-tail condition: the summand bound must be decreasing beyond
/// v_max for the first-term-plus-integral tail estimate to hold.
void check_p(double s, unsigned p, std::uint64_t v_max) {
    if (p > 8)
        throw std::invalid_argument("dirichlet: cost power capped at 8");
    const double w = static_cast<double>(v_max) + 1.0;
    if (!((2.0 * s - 1.0) * ln2 * (1.0 + std::log2(w)) > static_cast<double>(p)))
        throw std::invalid_argument(
            "dirichlet: tail bound needs (2s-1) ln2 (1+log2(v_max+1)) > p");
}

double ipow(double x, unsigned p) {
    double r = 1.0;
    for (unsigned i = 0; i < p; ++i)
        r *= x;
    return r;
}

/// Per-v bound on the dropped terms: at most v/2 partners, each cost at
/// most C (2 log2 v + 2) because the tracked product shrinks below u v.
double tail_summand(double v, double s, unsigned p, double c_reg) {
    return 0.5 * ipow(c_reg * (2.0 * std::log2(v) + 2.0), p) *
           std::pow(v, 1.0 - 2.0 * s);
}

/// Bound on sum over odd v > v_max of tail_summand: first term plus half the
/// integral. Closed antiderivatives for p <= 1, padded dyadic-panel
/// quadrature above that.
double tail_bound(double s, unsigned p, std::uint64_t v_max, double c_reg) {
    const double w = static_cast<double>(v_max) + 1.0;
    const double m = 2.0 * s - 2.0;
    const double first = tail_summand(w, s, p, c_reg);
    if (p == 0)
        return first + 0.5 * std::pow(w, -m) / m;
    if (p == 1) {
        const double integral =
            c_reg * std::pow(w, -m) / m * (1.0 + std::log2(w) + 1.0 / (m * ln2));
        return first + 0.5 * integral;
    }
    Accumulator integral;
    double lo = w;
    for (;;) {
        const double hi = 2.0 * lo;
        const double piece =
            gl12(lo, hi, [&](double v) { return tail_summand(v, s, p, c_reg); });
        integral.add(piece);
        if (piece < 1e-18 * integral.value())
            break;
        lo = hi;
    }
    return first + 0.5 * integral.value() * (1.0 + 1e-6);
}

/// Totients up to n by a linear sieve.
std::vector<std::uint32_t> totients(std::uint64_t n) {
    std::vector<std::uint32_t> phi(n + 1, 0);
    std::vector<std::uint32_t> primes;
    phi[1] = 1;
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (phi[i] == 0) {
            phi[i] = static_cast<std::uint32_t>(i - 1);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            const std::uint64_t ip = i * p;
            if (ip > n)
                break;
            if (i % p == 0) {
                phi[ip] = phi[i] * p;
                break;
            }
            phi[ip] = phi[i] * (p - 1);
        }
    }
    return phi;
}

int builtin_index(const CostFunction& c) {
    if (&c == &CostFunction::subtractions())
        return 0;
    if (&c == &CostFunction::divisions())
        return 1;
    if (&c == &CostFunction::exchanges())
        return 2;
    return -1;
}

double builtin_cost(const StepCounts& sc, int idx) {
    switch (idx) {
    case 0: return static_cast<double>(sc.subtractions);
    case 1: return static_cast<double>(sc.divisions);
    default: return static_cast<double>(sc.exchanges);
    }
}

} // namespace

double em_zeta(double s) {
    if (!(s > 1.0))
        throw std::domain_error("em_zeta: requires s > 1");
    constexpr int cutoff = 50;
    constexpr double bernoulli[7] = {1.0 / 6.0,    -1.0 / 30.0, 1.0 / 42.0,
                                     -1.0 / 30.0,  5.0 / 66.0,  -691.0 / 2730.0,
                                     7.0 / 6.0};
    Accumulator acc;
    for (int n = 1; n <= cutoff; ++n)
        acc.add(std::pow(static_cast<double>(n), -s));
    const double nd = static_cast<double>(cutoff);
    acc.add(std::pow(nd, 1.0 - s) / (s - 1.0));
    acc.add(-0.5 * std::pow(nd, -s));

    double rising = s;              // s (s+1) ... (s + 2j - 2)
    double factorial = 2.0;         // (2j)!
    double power = std::pow(nd, -s - 1.0);
    for (int j = 1; j <= 7; ++j) {
        if (j > 1) {
            rising *= (s + 2.0 * j - 3.0) * (s + 2.0 * j - 2.0);
            factorial *= (2.0 * j - 1.0) * (2.0 * j);
            power /= nd * nd;
        }
        acc.add(bernoulli[j - 1] / factorial * rising * power);
    }
    return acc.value();
}

DirichletSum series_truncated(double s, unsigned p, Ensemble family,
                              const CostFunction& c, std::uint64_t v_max,
                              unsigned threads) {
    check_s(s);
    check_family(family);
    check_v_max(v_max);
    check_p(s, p, v_max);

    const double bound = tail_bound(s, p, v_max, c.regularity());

    if (p == 0) {
        Accumulator acc;
        if (family == Ensemble::Odd) {
            for (std::uint64_t v = 3; v <= v_max; v += 2)
                acc.add(0.5 * static_cast<double>(v - 1) *
                        std::pow(static_cast<double>(v), -2.0 * s));
        } else {
            const std::vector<std::uint32_t> phi = totients(v_max);
            for (std::uint64_t v = 3; v <= v_max; v += 2)
                acc.add(0.5 * static_cast<double>(phi[v]) *
                        std::pow(static_cast<double>(v), -2.0 * s));
        }
        return {acc.value(), bound};
    }

    const int idx = builtin_index(c);
    const bool coprime_only = family == Ensemble::OddCoprime;
    Accumulator total = band_reduce<Accumulator>(
        3, v_max, threads,
        [&](std::uint64_t lo, std::uint64_t hi) {
            Accumulator acc;
            for (std::uint64_t v = lo | 1; v <= hi; v += 2) {
                const double weight = std::pow(static_cast<double>(v), -2.0 * s);
                for (std::uint64_t u = 1; u < v; u += 2) {
                    double cost;
                    std::uint64_t gcd;
                    if (idx >= 0) {
                        const StepCounts sc = count_steps({u, v});
                        cost = builtin_cost(sc, idx);
                        gcd = sc.gcd;
                    } else {
                        cost = trace_cost({u, v}, c, &gcd);
                    }
                    if (coprime_only && gcd != 1)
                        continue;
                    acc.add(ipow(cost, p) * weight);
                }
            }
            return acc;
        },
        [](Accumulator& acc, const Accumulator& part) { acc.merge(part); });
    return {total.value(), bound};
}

double series_closed_odd(double s) {
    check_s(s);
    const double q = std::pow(4.0, -s);
    return (0.5 - q) * em_zeta(2.0 * s - 1.0) - 0.5 * (1.0 - q) * em_zeta(2.0 * s);
}

double series_closed_odd_coprime(double s) {
    check_s(s);
    const double q = std::pow(4.0, s);
    return (q - 2.0) / (q - 1.0) * em_zeta(2.0 * s - 1.0) /
               (2.0 * em_zeta(2.0 * s)) -
           0.5;
}

NumTheoryCheck verify_numthy(double s, Ensemble family, std::uint64_t v_max,
                             unsigned threads) {
    const DirichletSum sum = series_truncated(
        s, 0, family, CostFunction::subtractions(), v_max, threads);
    const double closed = family == Ensemble::Odd ? series_closed_odd(s)
                                                  : series_closed_odd_coprime(s);
    const double residual = closed - sum.value;
    const bool ok = residual >= -1e-10 && residual <= sum.tail_bound + 1e-10;
    return {s, sum.value, closed, residual, sum.tail_bound, ok};
}

ConvolutionCheck verify_convolution(double s, unsigned p, const CostFunction& c,
                                    std::uint64_t v_max, unsigned threads) {
    check_s(s);
    check_v_max(v_max);
    check_p(s, p, v_max);

    struct Sums {
        Accumulator coprime, all;
    };
    const int idx = builtin_index(c);
    const Sums sums = band_reduce<Sums>(
        3, v_max, threads,
        [&](std::uint64_t lo, std::uint64_t hi) {
            Sums part;
            for (std::uint64_t v = lo | 1; v <= hi; v += 2) {
                const double weight = std::pow(static_cast<double>(v), -2.0 * s);
                for (std::uint64_t u = 1; u < v; u += 2) {
                    double term = weight;
                    std::uint64_t gcd;
                    if (p == 0) {
                        gcd = binary_gcd(u, v);
                    } else if (idx >= 0) {
                        const StepCounts sc = count_steps({u, v});
                        gcd = sc.gcd;
                        term *= ipow(builtin_cost(sc, idx), p);
                    } else {
                        double cost = trace_cost({u, v}, c, &gcd);
                        term *= ipow(cost, p);
                    }
                    part.all.add(term);
                    if (gcd == 1)
                        part.coprime.add(term);
                }
            }
            return part;
        },
        [](Sums& acc, const Sums& part) {
            acc.coprime.merge(part.coprime);
            acc.all.merge(part.all);
        });

    const double factor = em_zeta(2.0 * s) * (1.0 - std::pow(4.0, -s));
    const double tail = tail_bound(s, p, v_max, c.regularity());
    const double allowance = tail * (1.0 + factor) + 1e-10;
    const double odd_side = sums.all.value();
    const double coprime_side = factor * sums.coprime.value();
    const bool ok = std::abs(odd_side - coprime_side) <= allowance;
    return {s, p, odd_side, coprime_side, allowance, ok};
}

} // namespace brentlab
