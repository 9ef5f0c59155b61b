#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace brentlab {

/// Node layout on (0, 1]: `geometric` nodes from x_min up to 1/16 with a
/// constant ratio, then `uniform` further nodes up to 1. The geometric head
/// resolves the logarithmic behaviour of the densities near 0; the uniform
/// tail resolves the smooth part at ordinary scales.
struct GridSpec {
    std::size_t geometric = 2048;
    std::size_t uniform = 2048;
    double x_min = 0x1p-48;
};

/// Strictly increasing nodes; the first equals x_min, node geometric-1
/// equals 1/16 exactly, the last equals 1 exactly.
std::vector<double> make_grid(const GridSpec& spec);

/// Shape-preserving piecewise-cubic Hermite interpolant (Fritsch-Carlson
/// limited slopes): monotone data yield a monotone interpolant, third-order
/// accurate on smooth monotone data.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double t) const;
    double derivative(double t) const;

    const std::vector<double>& abscissae() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    std::size_t locate(double t) const;
    std::vector<double> x_, y_, d_;
};

/// C2 cubic spline with not-a-knot end conditions, fourth-order accurate on
/// smooth data.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double t) const;
    double derivative(double t) const;

    const std::vector<double>& abscissae() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    std::size_t locate(double t) const;
    std::vector<double> x_, y_, m_; ///< m_ holds the second derivatives
};

/// 12-point Gauss-Legendre rule: positive abscissae and weights on [-1, 1].
inline constexpr std::array<double, 6> gl12_nodes = {
    0.12523340851146891547, 0.36783149899818019375, 0.58731795428661744730,
    0.76990267419430468704, 0.90411725637047485668, 0.98156063424671925069,
};
inline constexpr std::array<double, 6> gl12_weights = {
    0.24914704581340278500, 0.23349253653835480876, 0.20316742672306592175,
    0.16007832854334622633, 0.10693932599531843096, 0.04717533638651182719,
};

/// Integral of f over [a, b] with the 12-point rule (exact through degree 23).
template <class F>
double gl12(double a, double b, F&& f) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int j = 0; j < 6; ++j)
        s += gl12_weights[std::size_t(j)] *
             (f(mid - half * gl12_nodes[std::size_t(j)]) +
              f(mid + half * gl12_nodes[std::size_t(j)]));
    return s * half;
}

} // namespace brentlab
