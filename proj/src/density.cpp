#include "brentlab/density.hpp"

#include "brentlab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brentlab {

namespace {

constexpr int recursion_k_terms = 51; // remaining tail of the 2^-k sum < 1e-15
constexpr int transfer_k_terms = 64;
constexpr double inv_ln2 = 1.4426950408889634074; // integral of -log2(x) over (0,1]

std::vector<double> checked_distribution_values(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0) || !(v[i] <= 1.0))
            throw std::invalid_argument("DistributionGrid: values must lie in [0, 1]");
        if (i && v[i] < v[i - 1])
            throw std::invalid_argument("DistributionGrid: values must be nondecreasing");
    }
    return v;
}

void check_unit_range(double x, const char* who) {
    if (!(x > 0.0) || !(x <= 1.0))
        throw std::domain_error(std::string(who) + ": argument must lie in (0, 1]");
}

} // namespace

DistributionGrid::DistributionGrid(GridSpec spec, std::vector<double> values)
    : spec_(spec), pchip_(make_grid(spec), checked_distribution_values(values)) {
    const double x0 = pchip_.abscissae().front();
    head_scale_ = pchip_.values().front() / (x0 * (1.0 - std::log(x0)));
}

double DistributionGrid::operator()(double x) const {
    check_unit_range(x, "DistributionGrid");
    if (x < pchip_.abscissae().front())
        return head_scale_ * x * (1.0 - std::log(x));
    return pchip_(x);
}

SingularDensity::SingularDensity(GridSpec spec, double alpha, std::vector<double> chi_values)
    : spec_(spec), alpha_(alpha), spline_(make_grid(spec), std::move(chi_values)) {
    if (!std::isfinite(alpha_))
        throw std::invalid_argument("SingularDensity: alpha must be finite");
}

double SingularDensity::smooth_part(double x) const {
    check_unit_range(x, "SingularDensity");
    if (x < spline_.abscissae().front())
        return spline_.values().front();
    return spline_(x);
}

double SingularDensity::operator()(double x) const {
    return alpha_ * (-std::log2(x)) + smooth_part(x);
}

std::vector<double> iterate_F(const DistributionGrid& F) {
    const std::vector<double>& nodes = F.nodes();
    std::vector<double> out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double x = nodes[i];
        Accumulator acc;
        acc.add(1.0);
        for (int k = 1; k <= recursion_k_terms; ++k) {
            const double b = std::ldexp(1.0, k);
            const double fd = F(x / (x + b));
            const double fg = F(1.0 / (1.0 + b * x));
            acc.add(std::ldexp(fd - fg, -k));
        }
        out[i] = acc.value();
    }
    return out;
}

TransferResult apply_transfer(const SingularDensity& xi) {
    const std::vector<double>& nodes = xi.nodes();
    const double alpha_new = xi.xi_at_one() + xi.alpha() / 3.0;
    std::vector<double> chi(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double x = nodes[i];
        Accumulator acc;
        for (int k = 1; k <= transfer_k_terms; ++k) {
            const double b = std::ldexp(1.0, k);
            const double ag = 1.0 / (1.0 + b * x);
            acc.add(ag * ag * xi(ag));
            const double sd = x + b;
            acc.add(xi(x / sd) / (sd * sd));
        }
        chi[i] = acc.value() - alpha_new * (-std::log2(x));
    }
    return {alpha_new, std::move(chi)};
}

// --- quadrature internals ----------------------------------------------------

namespace {

/// Panels along the grid cells intersected with [lo, hi]; g smooth per cell.
template <class Fn>
double integrate_over_cells(const std::vector<double>& nd, double lo, double hi, Fn&& g) {
    Accumulator acc;
    auto it = std::upper_bound(nd.begin(), nd.end(), lo);
    std::size_t i = it == nd.begin() ? 0 : std::size_t(it - nd.begin()) - 1;
    for (; i + 1 < nd.size() && nd[i] < hi; ++i) {
        const double a = std::max(nd[i], lo);
        const double b = std::min(nd[i + 1], hi);
        if (b > a)
            acc.add(gl12(a, b, g));
    }
    return acc.value();
}

/// Geometric halving panels over [lo, hi] for integrands that are smooth on
/// dyadic scales but logarithmically singular at 0; lo = 0 is allowed, the
/// loop stops once the remaining contribution is immaterial.
template <class Fn>
double integrate_by_halving(double lo, double hi, Fn&& g) {
    Accumulator acc;
    double b = hi;
    while (b > lo) {
        const double a = std::max(lo, 0.5 * b);
        const double piece = gl12(a, b, g);
        acc.add(piece);
        if (a <= lo || std::abs(piece) < 1e-22 * (1.0 + std::abs(acc.value())))
            break;
        b = a;
    }
    return acc.value();
}

} // namespace

double total_mass(const SingularDensity& xi) {
    const std::vector<double>& nd = xi.nodes();
    Accumulator acc;
    acc.add(nd.front() * xi.chi_values().front()); // constant chi below x_min
    const auto g = [&xi](double t) { return xi.smooth_part(t); };
    acc.add(integrate_over_cells(nd, nd.front(), 1.0, g));
    return xi.alpha() * inv_ln2 + acc.value();
}

double integrate_xi(const SingularDensity& xi, double lo, double hi,
                    const std::function<double(double)>& smooth) {
    if (!(lo >= 0.0) || !(hi <= 1.0) || !(lo < hi))
        throw std::domain_error("integrate_xi: need 0 <= lo < hi <= 1");
    const auto g = [&](double t) { return smooth ? smooth(t) * xi(t) : xi(t); };
    const double x0 = xi.nodes().front();
    Accumulator acc;
    if (lo < x0)
        acc.add(integrate_by_halving(lo, std::min(hi, x0), g));
    if (hi > x0)
        acc.add(integrate_over_cells(xi.nodes(), std::max(lo, x0), hi, g));
    return acc.value();
}

double integrate_xi_log1m(const SingularDensity& xi) {
    const double w0 = 1.0 / 64;
    const double eps = 0x1p-40;
    const auto g = [&xi](double t) { return std::log1p(-t) * xi(t); };
    Accumulator acc;
    acc.add(integrate_xi(xi, 0.0, 1.0 - w0, [](double t) { return std::log1p(-t); }));
    for (double w = w0; w > eps; w *= 0.5)
        acc.add(gl12(1.0 - w, 1.0 - 0.5 * w, g));
    acc.add(xi.xi_at_one() * eps * (std::log(eps) - 1.0));
    return acc.value();
}

double integrate_F(const DistributionGrid& F, const std::function<double(double)>& w) {
    if (!w)
        throw std::invalid_argument("integrate_F: weight function required");
    const auto g = [&](double t) { return w(t) * F(t); };
    const double x0 = F.nodes().front();
    Accumulator acc;
    acc.add(integrate_by_halving(0.0, x0, g));
    acc.add(integrate_over_cells(F.nodes(), x0, 1.0, g));
    return acc.value();
}

double integrate_one_minus_F(const DistributionGrid& F) {
    const double w0 = 1.0 / 64;
    const double eps = 0x1p-20; // stop before cancellation in 1 - F dominates
    const auto g = [&F](double t) { return (1.0 - F(t)) / (1.0 - t); };
    const double x0 = F.nodes().front();
    Accumulator acc;
    acc.add(integrate_by_halving(0.0, x0, g));
    acc.add(integrate_over_cells(F.nodes(), x0, 1.0 - w0, g));
    for (double w = w0; w > eps; w *= 0.5)
        acc.add(gl12(1.0 - w, 1.0 - 0.5 * w, g));
    acc.add(F.interpolant().derivative(1.0) * eps);
    return acc.value();
}

// --- solvers -----------------------------------------------------------------

namespace {

void check_options(const SolveOptions& opt, const char* who) {
    if (!(opt.tolerance > 0.0) || !std::isfinite(opt.tolerance))
        throw std::domain_error(std::string(who) + ": tolerance must be positive");
    if (opt.max_iterations < 1)
        throw std::domain_error(std::string(who) + ": need at least one iteration");
}

double contraction_estimate(const std::vector<double>& deltas) {
    double sum_log = 0.0;
    int used = 0;
    for (std::size_t i = deltas.size(); i-- > 1 && used < 5;) {
        if (deltas[i] > 0.0 && deltas[i - 1] > 0.0) {
            sum_log += std::log(deltas[i] / deltas[i - 1]);
            ++used;
        }
    }
    return used ? std::exp(sum_log / used) : 0.0;
}

} // namespace

FSolution solve_F(const GridSpec& spec, const SolveOptions& opt) {
    check_options(opt, "solve_F");
    DistributionGrid cur(spec, make_grid(spec)); // identity start
    std::vector<double> deltas;
    for (unsigned iter = 1; iter <= opt.max_iterations; ++iter) {
        std::vector<double> next = iterate_F(cur);
        double run = 0.0;
        for (double& v : next) {
            v = std::clamp(v, 0.0, 1.0);
            v = std::max(run, v);
            run = v;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i)
            delta = std::max(delta, std::abs(next[i] - cur.values()[i]));
        deltas.push_back(delta);
        cur = DistributionGrid(spec, std::move(next));
        if (delta < opt.tolerance)
            return {cur, iter, delta, contraction_estimate(deltas),
                    cur.interpolant().derivative(1.0)};
    }
    throw ConvergenceError("solve_F: tolerance not reached within the iteration budget");
}

XiSolution solve_xi(const GridSpec& spec, const SolveOptions& opt) {
    check_options(opt, "solve_xi");
    const std::vector<double> nodes = make_grid(spec);
    SingularDensity cur(spec, 0.0, std::vector<double>(nodes.size(), 1.0));
    std::vector<double> deltas;
    for (unsigned iter = 1; iter <= opt.max_iterations; ++iter) {
        TransferResult t = apply_transfer(cur);
        SingularDensity raw(spec, t.alpha, std::move(t.chi));
        const double mass = total_mass(raw);
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw ConvergenceError("solve_xi: iterate lost positivity");
        std::vector<double> chi = raw.chi_values();
        for (double& v : chi)
            v /= mass;
        SingularDensity next(spec, raw.alpha() / mass, std::move(chi));
        double dmax = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            dmax = std::max(dmax, std::abs(next.chi_values()[i] - cur.chi_values()[i]));
        const double delta = std::abs(next.alpha() - cur.alpha()) + dmax;
        deltas.push_back(delta);
        cur = next;
        if (delta < opt.tolerance)
            return {cur, iter, delta, contraction_estimate(deltas)};
    }
    throw ConvergenceError("solve_xi: tolerance not reached within the iteration budget");
}

} // namespace brentlab
