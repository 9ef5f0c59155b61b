#include "brentlab/constants.hpp"

#include "brentlab/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace brentlab {

namespace {

constexpr int k_terms = 60;
constexpr double pi = 3.14159265358979323846;
constexpr double ln2 = 0.69314718055994530942;

double branch_boundary(int k) { return 1.0 / (1.0 + std::ldexp(1.0, k)); }

/// xi-mass of the no-exchange region [0, b_k].
double mass_below(const SingularDensity& xi, int k) {
    return integrate_xi(xi, 0.0, branch_boundary(k));
}

} // namespace

LambdaS lambda_s_three_ways(const SingularDensity& xi) {
    // Route 1: expected log-shrink of the larger component, doubled. With
    // parameter k the pair {x, (1-x)/2^k} (relative to the current larger
    // component) keeps (1-x)/2^k as the larger one on [0, b_k] and x above.
    Accumulator larger;
    for (int k = 1; k <= k_terms; ++k) {
        const double b = branch_boundary(k);
        const double k_log = k * ln2;
        const double below = integrate_xi(
            xi, 0.0, b, [k_log](double x) { return std::log1p(-x) - k_log; });
        const double above =
            integrate_xi(xi, b, 1.0, [](double x) { return std::log(x); });
        larger.add(std::ldexp(below + above, 1 - k));
    }

    // Route 2: expected log-shrink of the component sum, doubled. The sum
    // contracts by 2^-k (1 + (2^k - 1) x) / (1 + x) regardless of the branch,
    // giving a single kernel that stays accurate through log1p.
    Accumulator sum_route;
    for (int k = 1; k <= k_terms; ++k) {
        const double k_log = k * ln2;
        const double scale = std::ldexp(1.0, k) - 1.0;
        const double full =
            integrate_xi(xi, 0.0, 1.0, [k_log, scale](double x) {
                return k_log + std::log1p(x) - std::log1p(scale * x);
            });
        sum_route.add(-std::ldexp(full, 1 - k));
    }

    // Route 3: expected log-shrink of the product. Both branches scale the
    // product by (1-x)/2^k, so the k-sum collapses to a single moment.
    const double via_log1m = integrate_xi_log1m(xi) - 2.0 * ln2;

    const double reference = -pi * pi * xi.xi_at_one() / 2.0;
    return {larger.value(), sum_route.value(), via_log1m, reference};
}

double lambda_omega(const SingularDensity& xi, const CostFunction& c) {
    Accumulator acc;
    for (int k = 1; k <= k_terms; ++k) {
        const double below = mass_below(xi, k);
        const double term = c(Branch::NoExchange, static_cast<unsigned>(k)) * below +
                            c(Branch::Exchange, static_cast<unsigned>(k)) * (1.0 - below);
        acc.add(std::ldexp(term, -k));
    }
    return acc.value();
}

double mu_of_cost(const SingularDensity& xi, const CostFunction& c) {
    return 4.0 * lambda_omega(xi, c) / (pi * pi * xi.xi_at_one());
}

double mu_from_lambda(double lambda_omega_value, double lambda_s_value) {
    return -2.0 * lambda_omega_value / lambda_s_value;
}

BetaConstants beta_constants(const DistributionGrid& F, const SingularDensity& xi) {
    // w_beta(x) = sum_{k>=2} (1 - 2^-k) / (1 + (2^k - 1) x) - 1 / (2 (1 + x)).
    // The tail beyond K is below 2^{1-K} / x; K grows with log2(1/x) so the
    // truncation stays under ~1e-14 absolutely everywhere on (0, 1].
    auto w_beta = [](double x) {
        int cutoff = 200;
        if (x > 0.0)
            cutoff = std::clamp(
                static_cast<int>(std::ceil(std::log2(1.0 / x))) + 48, 16, 200);
        Accumulator acc;
        acc.add(-0.5 / (1.0 + x));
        for (int k = 2; k <= cutoff; ++k) {
            const double p = std::ldexp(1.0, k);
            acc.add((1.0 - 1.0 / p) / (1.0 + (p - 1.0) * x));
        }
        return acc.value();
    };
    const double beta = ln2 + integrate_F(F, w_beta);
    const double beta_tilde = ln2 - 0.5 * integrate_xi_log1m(xi);
    const double beta_knuth = ln2 + 0.5 * integrate_one_minus_F(F);
    return {beta, beta_tilde, beta_knuth};
}

ExchangeConstant exchange_constant(const SingularDensity& xi) {
    const double mu_unit = 4.0 / (pi * pi * xi.xi_at_one());

    Accumulator branch;
    for (int k = 1; k <= k_terms; ++k)
        branch.add(std::ldexp(1.0 - mass_below(xi, k), -k));
    const double from_branch_sum = mu_unit * branch.value();

    const double above_half = integrate_xi(xi, 0.5, 1.0);
    const double above_third = integrate_xi(xi, 1.0 / 3.0, 1.0);
    const double from_interval_masses =
        mu_unit * (above_half + (2.0 / 3.0) * above_third);

    return {from_branch_sum, from_interval_masses, branch.value()};
}

double stationarity_residual(const SingularDensity& xi, StationaryTest f) {
    // For f = log the exchange-side composite log((1-x)/(2^k x)) is
    // log-singular at x = 1, which plain cells under-resolve; route its
    // log(1-x) part through the graded end-point quadrature instead.
    const double log1m_full =
        f == StationaryTest::LogX ? integrate_xi_log1m(xi) : 0.0;

    Accumulator lhs;
    for (int k = 1; k <= k_terms; ++k) {
        const double b = branch_boundary(k);
        const double k_log = k * ln2;
        double below = 0.0;
        double above = 0.0;
        switch (f) {
        case StationaryTest::One:
            below = integrate_xi(xi, 0.0, b);
            above = integrate_xi(xi, b, 1.0);
            break;
        case StationaryTest::TwoLogOnePlusX:
            below = integrate_xi(xi, 0.0, b, [k](double x) {
                return 2.0 * std::log1p(std::ldexp(x, k) / (1.0 - x));
            });
            above = integrate_xi(xi, b, 1.0, [k](double x) {
                return 2.0 * std::log1p((1.0 - x) / std::ldexp(x, k));
            });
            break;
        case StationaryTest::LogX:
            below = integrate_xi(xi, 0.0, b, [k_log](double x) {
                return k_log + std::log(x) - 2.0 * std::log1p(-x);
            });
            above = log1m_full + integrate_xi(xi, b, 1.0, [k_log](double x) {
                return -k_log - std::log(x);
            });
            break;
        }
        lhs.add(std::ldexp(below + above, -k));
    }

    double rhs = 0.0;
    switch (f) {
    case StationaryTest::One:
        rhs = integrate_xi(xi, 0.0, 1.0);
        break;
    case StationaryTest::TwoLogOnePlusX:
        rhs = integrate_xi(xi, 0.0, 1.0,
                           [](double x) { return 2.0 * std::log1p(x); });
        break;
    case StationaryTest::LogX:
        rhs = integrate_xi(xi, 0.0, 1.0, [](double x) { return std::log(x); });
        break;
    }
    return std::abs(lhs.value() - rhs);
}

ConstantsReport compute_constants(const SingularDensity& xi, const DistributionGrid& F) {
    ConstantsReport r;
    r.xi_at_one = xi.xi_at_one();
    r.alpha = xi.alpha();
    r.lambda_s = lambda_s_three_ways(xi);
    r.mu_subtractions = mu_of_cost(xi, CostFunction::subtractions());
    r.mu_divisions = mu_of_cost(xi, CostFunction::divisions());
    r.mu_exchanges = mu_of_cost(xi, CostFunction::exchanges());
    r.beta = beta_constants(F, xi);
    r.exchange = exchange_constant(xi);
    r.residual_one = stationarity_residual(xi, StationaryTest::One);
    r.residual_two_log = stationarity_residual(xi, StationaryTest::TwoLogOnePlusX);
    r.residual_log = stationarity_residual(xi, StationaryTest::LogX);
    return r;
}

} // namespace brentlab
