#pragma once

#include "brentlab/density.hpp"
#include "brentlab/gcd.hpp"

namespace brentlab {

/// The entropy-like constant that controls the asymptotic step count,
/// computed along three independent analytic routes plus its closed form
/// -pi^2 xi(1) / 2. All four agree at the level of the quadrature budget.
struct LambdaS {
    double via_branch_split; ///< per-branch split of the logarithmic shrink
    double via_kernel;       ///< single-kernel form with log1p-stable weights
    double via_log1m;        ///< reduction to the log(1-x) moment of xi
    double reference;        ///< -pi^2 xi(1) / 2
};
LambdaS lambda_s_three_ways(const SingularDensity& xi);

/// Mean cost of one step under the invariant density:
///   sum_k 2^-k [ c(2,k) F(b_k) + c(1,k) (1 - F(b_k)) ],  b_k = 1/(1+2^k),
/// where F(b_k) is the xi-mass below b_k (the no-exchange region for
/// parameter k). Truncated at K = 60 with tail below C (K+2) 2^-K.
double lambda_omega(const SingularDensity& xi, const CostFunction& c);

/// Growth constant of the mean total cost over n-bounded inputs:
/// mu(c) = 4 lambda_omega(c) / (pi^2 xi(1)).
double mu_of_cost(const SingularDensity& xi, const CostFunction& c);

/// Cross-route form mu = -2 lambda_omega / lambda_s for any of the lambda_s
/// values; equals mu_of_cost when lambda_s sits at its closed form.
double mu_from_lambda(double lambda_omega_value, double lambda_s_value);

/// Reciprocal-throughput constants of the subtraction count.
struct BetaConstants {
    double beta;       ///< ln 2 + integral of w_beta(x) F(x)
    double beta_tilde; ///< ln 2 - (1/2) integral of log(1-x) xi(x)
    double beta_knuth; ///< ln 2 + (1/2) integral of (1-F(x))/(1-x); ties F to
                       ///< xi through integration by parts
};
BetaConstants beta_constants(const DistributionGrid& F, const SingularDensity& xi);

/// Asymptotic mean exchange count per ln n, two analytic forms.
struct ExchangeConstant {
    double from_branch_sum;       ///< mu of the exchange-indicator cost
    double from_interval_masses;  ///< via xi-masses of [1/2,1] and [1/3,1]
    double factor_vs_subtractions; ///< ratio to mu(c == 1)
};
ExchangeConstant exchange_constant(const SingularDensity& xi);

/// Test functions for the invariance identity of the solved density.
enum class StationaryTest { One, TwoLogOnePlusX, LogX };

/// Residual of sum_k 2^-k [ integral over the no-exchange region of
/// f(2^k x/(1-x)) xi + integral over the exchange region of
/// f((1-x)/(2^k x)) xi ] minus the plain moment of f, which vanishes for the
/// exact invariant density.
double stationarity_residual(const SingularDensity& xi, StationaryTest f);

/// Everything above in one pass, for reporting.
struct ConstantsReport {
    double xi_at_one;
    double alpha;
    LambdaS lambda_s;
    double mu_subtractions;
    double mu_divisions;
    double mu_exchanges;
    BetaConstants beta;
    ExchangeConstant exchange;
    double residual_one;
    double residual_two_log;
    double residual_log;
};
ConstantsReport compute_constants(const SingularDensity& xi, const DistributionGrid& F);

} // namespace brentlab
