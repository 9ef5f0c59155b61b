#include "brentlab/ensembles.hpp"

#include "brentlab/numeric.hpp"
#include "brentlab/parallel.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <random>
#include <stdexcept>

namespace brentlab {

namespace {

void check_n(std::uint64_t n, const char* who) {
    if (n >= max_gcd_input)
        throw std::domain_error(std::string(who) + ": n must be below 2^62");
}

/// Number of i >= 0 with a * 2^i <= n.
std::uint64_t scaling_multiplicity(std::uint64_t a, std::uint64_t n) {
    std::uint64_t w = 0;
    for (std::uint64_t x = a; x <= n; x <<= 1) {
        ++w;
        if (x > (n >> 1))
            break;
    }
    return w;
}

/// Multiplicities of all odd a <= n, indexed by (a - 1) / 2.
std::vector<std::uint8_t> odd_multiplicities(std::uint64_t n) {
    std::vector<std::uint8_t> m(n ? (n + 1) / 2 : 0);
    for (std::uint64_t a = 1; a <= n; a += 2)
        m[(a - 1) / 2] = static_cast<std::uint8_t>(scaling_multiplicity(a, n));
    return m;
}

std::uint64_t floor_log2(std::uint64_t n) {
    std::uint64_t r = 0;
    while (n >>= 1)
        ++r;
    return r;
}

bool is_builtin_subtractions(const CostFunction& c) { return &c == &CostFunction::subtractions(); }
bool is_builtin_divisions(const CostFunction& c) { return &c == &CostFunction::divisions(); }
bool is_builtin_exchanges(const CostFunction& c) { return &c == &CostFunction::exchanges(); }

} // namespace

const char* ensemble_name(Ensemble e) {
    switch (e) {
    case Ensemble::OddCoprime: return "odd-coprime";
    case Ensemble::Odd: return "odd";
    case Ensemble::Coprime: return "coprime";
    case Ensemble::All: return "all";
    }
    throw std::invalid_argument("ensemble_name: unknown ensemble");
}

void for_each_pair(Ensemble e, std::uint64_t n,
                   const std::function<void(std::uint64_t, std::uint64_t)>& fn) {
    check_n(n, "for_each_pair");
    const bool odd_only = e == Ensemble::OddCoprime || e == Ensemble::Odd;
    const bool coprime = e == Ensemble::OddCoprime || e == Ensemble::Coprime;
    const std::uint64_t v0 = odd_only ? 3 : 2;
    const std::uint64_t stride = odd_only ? 2 : 1;
    for (std::uint64_t v = v0; v <= n; v += stride)
        for (std::uint64_t u = 1; u < v; u += stride)
            if (!coprime || binary_gcd(u, v) == 1)
                fn(u, v);
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> list_pairs(Ensemble e, std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for_each_pair(e, n, [&](std::uint64_t u, std::uint64_t v) { out.emplace_back(u, v); });
    return out;
}

CensusResult ensemble_census(Ensemble e, std::uint64_t n, unsigned threads) {
    check_n(n, "ensemble_census");
    std::uint64_t count = 0;
    if (n >= 2) {
        switch (e) {
        case Ensemble::All:
            count = n * (n - 1) / 2;
            break;
        case Ensemble::Odd:
            // odd u < v: (v - 1) / 2 choices per odd v
            for (std::uint64_t v = 3; v <= n; v += 2)
                count += (v - 1) / 2;
            break;
        case Ensemble::OddCoprime:
            count = band_reduce<std::uint64_t>(
                3, n, threads,
                [](std::uint64_t lo, std::uint64_t hi) {
                    std::uint64_t c = 0;
                    for (std::uint64_t v = lo | 1; v <= hi; v += 2)
                        for (std::uint64_t u = 1; u < v; u += 2) {
                            const std::uint64_t g = binary_gcd(u, v);
                            assert(g == std::gcd(u, v));
                            c += g == 1;
                        }
                    return c;
                },
                [](std::uint64_t& acc, std::uint64_t part) { acc += part; });
            break;
        case Ensemble::Coprime:
            count = band_reduce<std::uint64_t>(
                2, n, threads,
                [](std::uint64_t lo, std::uint64_t hi) {
                    std::uint64_t c = 0;
                    for (std::uint64_t v = lo; v <= hi; ++v)
                        for (std::uint64_t u = 1; u < v; ++u) {
                            const std::uint64_t g = binary_gcd(u, v);
                            assert(g == std::gcd(u, v));
                            c += g == 1;
                        }
                    return c;
                },
                [](std::uint64_t& acc, std::uint64_t part) { acc += part; });
            break;
        }
    }
    return {e, n, count, n ? double(count) / (double(n) * double(n)) : 0.0};
}

namespace {

struct SweepSums {
    std::uint64_t count[4] = {};
    std::uint64_t sum[4][3] = {};
    std::uint64_t sumsq[4][3] = {};
};

void merge_sums(SweepSums& acc, const SweepSums& part) {
    for (int i = 0; i < 4; ++i) {
        acc.count[i] += part.count[i];
        for (int j = 0; j < 3; ++j) {
            acc.sum[i][j] += part.sum[i][j];
            acc.sumsq[i][j] += part.sumsq[i][j];
        }
    }
}

} // namespace

SweepResult ensemble_sweep(std::uint64_t n, unsigned threads) {
    check_n(n, "ensemble_sweep");
    SweepResult out;
    out.n = n;
    static const char* const cost_names[3] = {"S", "T", "E"};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) {
            out.stats[i][j].ensemble = static_cast<Ensemble>(i + 1);
            out.stats[i][j].n = n;
            out.stats[i][j].cost_name = cost_names[j];
        }
    if (n < 3)
        return out;

    const auto mult = odd_multiplicities(n);
    const SweepSums total = band_reduce<SweepSums>(
        3, n, threads,
        [&](std::uint64_t lo, std::uint64_t hi) {
            SweepSums s;
            for (std::uint64_t b = lo | 1; b <= hi; b += 2) {
                const std::uint64_t wb = mult[(b - 1) / 2];
                for (std::uint64_t a = 1; a < b; a += 2) {
                    const StepCounts cs = count_steps({a, b});
                    const std::uint64_t c[3] = {cs.subtractions, cs.divisions, cs.exchanges};
                    const std::uint64_t wa = mult[(a - 1) / 2];
                    const std::uint64_t m4 = wa * wb;
                    const bool cop = cs.gcd == 1;
                    const std::uint64_t m3 = cop ? wa + wb - 1 : 0;
                    s.count[1] += 1;
                    s.count[0] += cop;
                    s.count[3] += m4;
                    s.count[2] += m3;
                    for (int j = 0; j < 3; ++j) {
                        const std::uint64_t cj = c[j], cj2 = cj * cj;
                        s.sum[1][j] += cj;
                        s.sumsq[1][j] += cj2;
                        if (cop) {
                            s.sum[0][j] += cj;
                            s.sumsq[0][j] += cj2;
                            s.sum[2][j] += m3 * cj;
                            s.sumsq[2][j] += m3 * cj2;
                        }
                        s.sum[3][j] += m4 * cj;
                        s.sumsq[3][j] += m4 * cj2;
                    }
                }
            }
            return s;
        },
        merge_sums);

    SweepSums grand = total;
    // pairs with equal odd parts cost zero and are missed by the odd-pair
    // enumeration: (2^i a, 2^j a) for the full family, (1, 2^j) for the
    // coprime one
    for (std::uint64_t a = 1; a <= n; a += 2) {
        const std::uint64_t w = mult[(a - 1) / 2];
        grand.count[3] += w * (w - 1) / 2;
    }
    grand.count[2] += floor_log2(n);

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) {
            out.stats[i][j].count = grand.count[i];
            out.stats[i][j].sum_cost = double(grand.sum[i][j]);
            out.stats[i][j].sum_cost_sq = double(grand.sumsq[i][j]);
        }
    return out;
}

EnsembleStats mean_cost(Ensemble e, std::uint64_t n, const CostFunction& c, unsigned threads) {
    check_n(n, "mean_cost");

    // the built-in costs funnel through the sweep counters
    int builtin = -1;
    if (is_builtin_subtractions(c))
        builtin = 0;
    else if (is_builtin_divisions(c))
        builtin = 1;
    else if (is_builtin_exchanges(c))
        builtin = 2;

    EnsembleStats out;
    out.ensemble = e;
    out.n = n;
    out.cost_name = c.name();
    if (n < 3) {
        if (e == Ensemble::All && n == 2)
            out.count = 1;
        if (e == Ensemble::Coprime && n == 2)
            out.count = 1;
        return out;
    }

    const auto mult = odd_multiplicities(n);

    struct Part {
        std::uint64_t count = 0;
        Accumulator sum, sumsq;
    };
    const Part total = band_reduce<Part>(
        3, n, threads,
        [&](std::uint64_t lo, std::uint64_t hi) {
            Part p;
            for (std::uint64_t b = lo | 1; b <= hi; b += 2) {
                const std::uint64_t wb = mult[(b - 1) / 2];
                for (std::uint64_t a = 1; a < b; a += 2) {
                    double cost;
                    std::uint64_t g;
                    if (builtin >= 0) {
                        const StepCounts cs = count_steps({a, b});
                        const std::uint64_t v[3] = {cs.subtractions, cs.divisions, cs.exchanges};
                        cost = double(v[builtin]);
                        g = cs.gcd;
                    } else {
                        cost = trace_cost({a, b}, c, &g);
                    }
                    std::uint64_t m = 0;
                    switch (e) {
                    case Ensemble::Odd: m = 1; break;
                    case Ensemble::OddCoprime: m = g == 1; break;
                    case Ensemble::All: m = mult[(a - 1) / 2] * wb; break;
                    case Ensemble::Coprime: m = g == 1 ? mult[(a - 1) / 2] + wb - 1 : 0; break;
                    }
                    if (m) {
                        p.count += m;
                        p.sum.add(double(m) * cost);
                        p.sumsq.add(double(m) * cost * cost);
                    }
                }
            }
            return p;
        },
        [](Part& acc, const Part& part) {
            acc.count += part.count;
            acc.sum.merge(part.sum);
            acc.sumsq.merge(part.sumsq);
        });

    out.count = total.count;
    out.sum_cost = total.sum.value();
    out.sum_cost_sq = total.sumsq.value();
    if (e == Ensemble::All)
        for (std::uint64_t a = 1; a <= n; a += 2) {
            const std::uint64_t w = mult[(a - 1) / 2];
            out.count += w * (w - 1) / 2;
        }
    if (e == Ensemble::Coprime)
        out.count += floor_log2(n);
    return out;
}

SlopeFit fit_line(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("fit_line: need at least three points");
    double mx = 0, my = 0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= double(points.size());
    my /= double(points.size());
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (!(sxx > 0))
        throw std::invalid_argument("fit_line: degenerate abscissae");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (const auto& [x, y] : points) {
        const double r = y - (fit.intercept + fit.slope * x);
        rss += r * r;
    }
    fit.rms_residual = std::sqrt(rss / double(points.size()));
    fit.points = points;
    return fit;
}

SlopeFit slope_fit(Ensemble e, const CostFunction& c,
                   const std::vector<std::uint64_t>& ladder, unsigned threads) {
    if (ladder.size() < 3)
        throw std::invalid_argument("slope_fit: ladder needs at least three sizes");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (ladder[i] < 4)
            throw std::invalid_argument("slope_fit: ladder entries must be >= 4");
        if (i && ladder[i] <= ladder[i - 1])
            throw std::invalid_argument("slope_fit: ladder must be strictly increasing");
    }
    std::vector<std::pair<double, double>> pts;
    pts.reserve(ladder.size());
    for (const std::uint64_t n : ladder) {
        const EnsembleStats s = mean_cost(e, n, c, threads);
        pts.emplace_back(std::log(double(n)), s.mean());
    }
    return fit_line(pts);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Uniform draw from [0, bound) without modulo bias.
std::uint64_t bounded_draw(std::mt19937_64& g, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = g();
        if (r >= threshold)
            return r % bound;
    }
}

} // namespace

SampleStats sample_mean_cost(Ensemble e, std::uint64_t n, const CostFunction& c,
                             std::uint64_t samples, std::uint64_t seed, unsigned threads) {
    check_n(n, "sample_mean_cost");
    if (n < 8)
        throw std::domain_error("sample_mean_cost: n must be >= 8");
    if (samples < 2)
        throw std::domain_error("sample_mean_cost: need at least two samples");

    struct Part {
        Accumulator sum, sumsq;
    };
    const Part total = band_reduce<Part>(
        0, samples - 1, threads,
        [&](std::uint64_t lo, std::uint64_t hi) {
            Part p;
            std::mt19937_64 rng(splitmix64(seed ^ splitmix64(lo)));
            for (std::uint64_t i = lo; i <= hi; ++i) {
                for (;;) {
                    std::uint64_t u = 1 + bounded_draw(rng, n);
                    std::uint64_t v = 1 + bounded_draw(rng, n);
                    if (u == v)
                        continue;
                    if (u > v)
                        std::swap(u, v);
                    if ((e == Ensemble::Odd || e == Ensemble::OddCoprime) && (!(u & 1) || !(v & 1)))
                        continue;
                    const ReducedPair r = reduce_to_odd(u, v);
                    std::uint64_t g;
                    double cost;
                    if (r.pair.u == r.pair.v) {
                        g = r.pair.u;
                        cost = 0.0;
                    } else {
                        cost = trace_cost(r.pair, c, &g);
                    }
                    const std::uint64_t gcd_uv = g << r.shared_exponent;
                    if ((e == Ensemble::OddCoprime || e == Ensemble::Coprime) && gcd_uv != 1)
                        continue;
                    p.sum.add(cost);
                    p.sumsq.add(cost * cost);
                    break;
                }
            }
            return p;
        },
        [](Part& acc, const Part& part) {
            acc.sum.merge(part.sum);
            acc.sumsq.merge(part.sumsq);
        });

    SampleStats out;
    out.seed = seed;
    out.stats.ensemble = e;
    out.stats.n = n;
    out.stats.count = samples;
    out.stats.sum_cost = total.sum.value();
    out.stats.sum_cost_sq = total.sumsq.value();
    out.stats.cost_name = c.name();
    const double m = out.stats.mean();
    const double var = std::max(0.0, out.stats.second_moment() - m * m);
    out.standard_error = std::sqrt(var / double(samples));
    return out;
}

} // namespace brentlab
