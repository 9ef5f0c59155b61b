#pragma once

#include "brentlab/grid.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace brentlab {

/// Thrown when an iterative solve fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A distribution function on (0, 1] represented by values on the grid
/// nodes with a shape-preserving interpolant. Below the first node it is
/// extended by the leading asymptotic shape c * x * (1 - ln x), matched
/// continuously at x_min; the fixed point of the recursion behaves exactly
/// this way near 0, and for other data the region carries mass of order
/// x_min, far below the quadrature targets.
class DistributionGrid {
public:
    DistributionGrid(GridSpec spec, std::vector<double> values);

    double operator()(double x) const; ///< domain (0, 1]
    const GridSpec& spec() const { return spec_; }
    const std::vector<double>& nodes() const { return pchip_.abscissae(); }
    const std::vector<double>& values() const { return pchip_.values(); }
    const MonotoneCubic& interpolant() const { return pchip_; }

private:
    GridSpec spec_;
    MonotoneCubic pchip_;
    double head_scale_;
};

/// The invariant density in split form xi(x) = alpha * (-log2 x) + chi(x)
/// with chi smooth: the explicit term carries the logarithmic singularity
/// at 0, so the spline only ever represents a bounded, slowly varying
/// remainder. Below x_min, chi is frozen at chi(x_min); the log term stays
/// exact there.
class SingularDensity {
public:
    SingularDensity(GridSpec spec, double alpha, std::vector<double> chi_values);

    double operator()(double x) const; ///< xi(x), domain (0, 1]
    double smooth_part(double x) const; ///< chi(x), domain (0, 1]
    double alpha() const { return alpha_; }
    double xi_at_one() const { return spline_.values().back(); }
    const GridSpec& spec() const { return spec_; }
    const std::vector<double>& nodes() const { return spline_.abscissae(); }
    const std::vector<double>& chi_values() const { return spline_.values(); }

private:
    GridSpec spec_;
    double alpha_;
    CubicSpline spline_;
};

// --- fixed-point iterations ------------------------------------------------

/// One step of the distribution-function recursion
///   (R F)(x) = 1 + sum_k 2^-k [ F(x/(x+2^k)) - F(1/(1+2^k x)) ]
/// evaluated at every grid node. (R F)(1) = 1 holds exactly because the two
/// arguments coincide at x = 1.
std::vector<double> iterate_F(const DistributionGrid& F);

/// One application of the transfer operator
///   (L f)(x) = sum_k [ (1+2^k x)^-2 f(1/(1+2^k x)) + (x+2^k)^-2 f(x/(x+2^k)) ]
/// to xi = alpha * (-log2 x) + chi, re-split against the updated coefficient
/// alpha' = chi(1) + alpha/3: the first branch deposits f(1) * (-log2 x) as
/// x -> 0, the second passes the incoming log term through with weight
/// sum_k 4^-k = 1/3.
struct TransferResult {
    double alpha;
    std::vector<double> chi;
};
TransferResult apply_transfer(const SingularDensity& xi);

struct SolveOptions {
    double tolerance = 1e-12;
    unsigned max_iterations = 500;
};

struct FSolution {
    DistributionGrid F;
    unsigned iterations;
    double final_delta;
    double theta_hat;          ///< contraction-rate estimate from the last deltas
    double derivative_at_one;  ///< one-sided slope of the interpolant at 1
};

/// Solves F = R F from the identity start. Throws ConvergenceError if the
/// tolerance is not reached within max_iterations.
FSolution solve_F(const GridSpec& spec = {}, const SolveOptions& opt = {});

struct XiSolution {
    SingularDensity xi;
    unsigned iterations;
    double final_delta;
    double theta_hat;
};

/// Solves xi = L xi from the uniform start, renormalizing to unit mass after
/// every application. Throws ConvergenceError on failure.
XiSolution solve_xi(const GridSpec& spec = {}, const SolveOptions& opt = {});

// --- quadrature against the solved functions -------------------------------

/// Total mass of xi on (0, 1].
double total_mass(const SingularDensity& xi);

/// Integral of smooth(x) * xi(x) over [lo, hi] in (0, 1]; pass an empty
/// function for the factor 1. The factor must be smooth on [lo, hi]; the
/// logarithmic end at 0 is handled by geometric panels and the exact log
/// term, so lo = 0 is allowed.
double integrate_xi(const SingularDensity& xi, double lo, double hi,
                    const std::function<double(double)>& smooth = {});

/// Integral of log(1-x) * xi(x) over (0, 1): graded dyadic panels toward the
/// endpoint plus the analytic closing term xi(1) * eps * (ln eps - 1).
double integrate_xi_log1m(const SingularDensity& xi);

/// Integral of w(x) * F(x) over (0, 1) for w smooth on the open interval and
/// at worst logarithmically singular at 0.
double integrate_F(const DistributionGrid& F, const std::function<double(double)>& w);

/// Integral of (1 - F(x))/(1 - x) over (0, 1): dyadic panels toward 1 stop
/// where cancellation in 1 - F would dominate, closed by the analytic stub
/// F'(1) * eps.
double integrate_one_minus_F(const DistributionGrid& F);

} // namespace brentlab
