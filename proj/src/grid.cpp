#include "brentlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brentlab {

std::vector<double> make_grid(const GridSpec& spec) {
    if (spec.geometric < 16 || spec.uniform < 16)
        throw std::domain_error("make_grid: need at least 16 nodes per segment");
    if (!(spec.x_min > 0) || spec.x_min > 0x1p-40)
        throw std::domain_error("make_grid: x_min must lie in (0, 2^-40]");

    std::vector<double> x(spec.geometric + spec.uniform);
    const double lx0 = std::log(spec.x_min);
    const double step = (std::log(0.0625) - lx0) / double(spec.geometric - 1);
    for (std::size_t i = 0; i < spec.geometric; ++i)
        x[i] = std::exp(lx0 + double(i) * step);
    x[0] = spec.x_min;
    x[spec.geometric - 1] = 0.0625;
    const double h = 0.9375 / double(spec.uniform);
    for (std::size_t j = 1; j <= spec.uniform; ++j)
        x[spec.geometric - 1 + j] = 0.0625 + double(j) * h;
    x.back() = 1.0;

    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw std::runtime_error("make_grid: node sequence failed to increase");
    return x;
}

namespace {

void check_data(const std::vector<double>& x, const std::vector<double>& y, const char* who) {
    if (x.size() != y.size())
        throw std::invalid_argument(std::string(who) + ": size mismatch");
    if (x.size() < 4)
        throw std::invalid_argument(std::string(who) + ": need at least four nodes");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw std::invalid_argument(std::string(who) + ": data must be finite");
        if (i && !(x[i] > x[i - 1]))
            throw std::invalid_argument(std::string(who) +
                                        ": abscissae must be strictly increasing");
    }
}

std::size_t locate_in(const std::vector<double>& x, double t, const char* who) {
    if (!(t >= x.front()) || !(t <= x.back()))
        throw std::domain_error(std::string(who) + ": argument outside the data range");
    // index of the cell [x[i], x[i+1]] containing t
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = std::size_t(it - x.begin());
    if (i > 0)
        --i;
    if (i >= x.size() - 1)
        i = x.size() - 2;
    return i;
}

double sign(double v) { return v > 0 ? 1.0 : v < 0 ? -1.0 : 0.0; }

/// Three-point endpoint slope with the Fritsch-Carlson safeguards.
double edge_slope(double h0, double h1, double d0, double d1) {
    double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign(d) != sign(d0))
        d = 0.0;
    else if (sign(d0) != sign(d1) && std::abs(d) > 3 * std::abs(d0))
        d = 3 * d0;
    return d;
}

} // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    check_data(x_, y_, "MonotoneCubic");
    const std::size_t n = x_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (sign(delta[i - 1]) * sign(delta[i]) <= 0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2 * h[i] + h[i - 1];
            const double w2 = h[i] + 2 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t MonotoneCubic::locate(double t) const { return locate_in(x_, t, "MonotoneCubic"); }

double MonotoneCubic::operator()(double t) const {
    const std::size_t i = locate(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

double MonotoneCubic::derivative(double t) const {
    const std::size_t i = locate(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double s2 = s * s;
    const double g00 = (6 * s2 - 6 * s) / h;
    const double g10 = 3 * s2 - 4 * s + 1;
    const double g01 = (-6 * s2 + 6 * s) / h;
    const double g11 = 3 * s2 - 2 * s;
    return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    check_data(x_, y_, "CubicSpline");
    const std::size_t n = x_.size();
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        h[i] = x_[i + 1] - x_[i];

    // Solve for the interior second derivatives M_1..M_{n-2}; the not-a-knot
    // conditions express M_0 and M_{n-1} through their neighbours:
    //   M_0     = (1 + h0/h1) M_1 - (h0/h1) M_2
    //   M_{n-1} = (1 + h_{n-2}/h_{n-3}) M_{n-2} - (h_{n-2}/h_{n-3}) M_{n-3}
    const std::size_t m = n - 2;
    std::vector<double> lo(m, 0.0), di(m, 0.0), up(m, 0.0), rhs(m, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const std::size_t r = i - 1;
        lo[r] = h[i - 1];
        di[r] = 2 * (h[i - 1] + h[i]);
        up[r] = h[i];
        rhs[r] = 6 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    {
        const double q = h[0] / h[1];
        di[0] += h[0] * (1 + q);
        up[0] -= h[0] * q;
    }
    {
        const double q = h[n - 2] / h[n - 3];
        di[m - 1] += h[n - 2] * (1 + q);
        lo[m - 1] -= h[n - 2] * q;
    }
    for (std::size_t r = 1; r < m; ++r) {
        const double w = lo[r] / di[r - 1];
        di[r] -= w * up[r - 1];
        rhs[r] -= w * rhs[r - 1];
    }
    m_.assign(n, 0.0);
    m_[n - 2] = rhs[m - 1] / di[m - 1];
    for (std::size_t r = m - 1; r-- > 0;)
        m_[r + 1] = (rhs[r] - up[r] * m_[r + 2]) / di[r];
    m_[0] = (1 + h[0] / h[1]) * m_[1] - (h[0] / h[1]) * m_[2];
    m_[n - 1] = (1 + h[n - 2] / h[n - 3]) * m_[n - 2] - (h[n - 2] / h[n - 3]) * m_[n - 3];
}

std::size_t CubicSpline::locate(double t) const { return locate_in(x_, t, "CubicSpline"); }

double CubicSpline::operator()(double t) const {
    const std::size_t i = locate(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double t) const {
    const std::size_t i = locate(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((3 * b * b - 1) * m_[i + 1] - (3 * a * a - 1) * m_[i]) * h / 6.0;
}

} // namespace brentlab
