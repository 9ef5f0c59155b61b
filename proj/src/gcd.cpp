#include "brentlab/gcd.hpp"

#include "brentlab/numeric.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace brentlab {

namespace {

void check_input(std::uint64_t n, const char* who) {
    if (n == 0)
        throw std::domain_error(std::string(who) + ": inputs must be positive");
    if (n >= max_gcd_input)
        throw std::domain_error(std::string(who) + ": inputs must be below 2^62");
}

void check_odd_pair(OddPair p, const char* who) {
    if (p.u == 0 || p.v == 0 || (p.u & 1) == 0 || (p.v & 1) == 0)
        throw std::domain_error(std::string(who) + ": both entries must be odd and positive");
    if (p.u > p.v)
        throw std::domain_error(std::string(who) + ": requires u <= v");
}

} // namespace

std::pair<std::uint64_t, unsigned> strip_twos(std::uint64_t n) {
    if (n == 0)
        throw std::domain_error("strip_twos: n must be positive");
    const unsigned e = static_cast<unsigned>(std::countr_zero(n));
    return {n >> e, e};
}

ReducedPair reduce_to_odd(std::uint64_t u, std::uint64_t v) {
    check_input(u, "reduce_to_odd");
    check_input(v, "reduce_to_odd");
    const auto [a, ea] = strip_twos(u);
    const auto [b, eb] = strip_twos(v);
    const unsigned shared = ea < eb ? ea : eb;
    if (a > b)
        return {{b, a}, shared, true};
    return {{a, b}, shared, false};
}

std::pair<OddPair, StepRecord> binary_step(OddPair p) {
    check_odd_pair(p, "binary_step");
    if (p.u == p.v)
        throw std::domain_error("binary_step: no step from the diagonal");
    const std::uint64_t d = p.v - p.u;
    const unsigned k = static_cast<unsigned>(std::countr_zero(d));
    const std::uint64_t w = d >> k;
    if (w >= p.u)
        return {{p.u, w}, {Branch::NoExchange, k}};
    return {{w, p.u}, {Branch::Exchange, k}};
}

Trace binary_gcd_trace(std::uint64_t u, std::uint64_t v) {
    const ReducedPair r = reduce_to_odd(u, v);
    Trace t;
    OddPair p = r.pair;
    while (p.u != p.v) {
        auto [next, step] = binary_step(p);
        t.steps.push_back(step);
        p = next;
    }
    t.gcd = p.u << r.shared_exponent;
    return t;
}

std::uint64_t binary_gcd(std::uint64_t u, std::uint64_t v) {
    const ReducedPair r = reduce_to_odd(u, v);
    std::uint64_t a = r.pair.u, b = r.pair.v;
    while (a != b) {
        const std::uint64_t d = b - a;
        const unsigned k = static_cast<unsigned>(std::countr_zero(d));
        const std::uint64_t w = d >> k;
        if (w >= a) {
            b = w;
        } else {
            b = a;
            a = w;
        }
    }
    return a << r.shared_exponent;
}

StepCounts count_steps(OddPair p) {
    check_odd_pair(p, "count_steps");
    std::uint64_t s = 0, t = 0, e = 0;
    std::uint64_t a = p.u, b = p.v;
    while (a != b) {
        const std::uint64_t d = b - a;
        const unsigned k = static_cast<unsigned>(std::countr_zero(d));
        const std::uint64_t w = d >> k;
        ++s;
        t += k;
        if (w >= a) {
            b = w;
        } else {
            ++e;
            b = a;
            a = w;
        }
    }
    return {s, t, e, a};
}

std::string to_string(const Trace& t) {
    std::string out;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        if (i)
            out += ';';
        out += '(';
        out += std::to_string(static_cast<int>(t.steps[i].branch));
        out += ',';
        out += std::to_string(t.steps[i].k);
        out += ')';
    }
    return out;
}

CostFunction::CostFunction(std::string name, Fn fn, double regularity)
    : name_(std::move(name)), fn_(std::move(fn)), regularity_(regularity) {
    if (!fn_)
        throw std::invalid_argument("CostFunction: empty evaluator");
    if (!(regularity_ > 0) || !std::isfinite(regularity_))
        throw std::invalid_argument("CostFunction: regularity constant must be positive and finite");
}

double CostFunction::operator()(Branch b, unsigned k) const {
    if (k == 0)
        throw std::domain_error("CostFunction: k must be >= 1");
    const double v = fn_(b, k);
    if (!(v >= 0.0) || v > regularity_ * k * (1.0 + 1e-12))
        throw std::logic_error("CostFunction '" + name_ +
                               "': value at (i=" + std::to_string(static_cast<int>(b)) +
                               ", k=" + std::to_string(k) +
                               ") violates the regularity bound C*k");
    return v;
}

const CostFunction& CostFunction::subtractions() {
    static const CostFunction c("S", [](Branch, unsigned) { return 1.0; }, 1.0);
    return c;
}

const CostFunction& CostFunction::divisions() {
    static const CostFunction c("T", [](Branch, unsigned k) { return double(k); }, 1.0);
    return c;
}

const CostFunction& CostFunction::exchanges() {
    static const CostFunction c(
        "E", [](Branch b, unsigned) { return b == Branch::Exchange ? 1.0 : 0.0; }, 1.0);
    return c;
}

CostFunction CostFunction::from_table(const std::string& text, std::string name) {
    std::istringstream in(text);
    std::string line;
    double reg = 0.0;
    int extend = -1; // 0 = const, 1 = linear
    bool header_seen = false;
    std::vector<double> rows[2];

    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        if (line[first] == '#') {
            if (header_seen)
                continue; // later comment lines are ignored
            const auto cpos = line.find("C=");
            const auto epos = line.find("extend=");
            if (cpos == std::string::npos || epos == std::string::npos)
                throw std::invalid_argument("cost table: header must declare C= and extend=");
            reg = std::strtod(line.c_str() + cpos + 2, nullptr);
            std::string mode = line.substr(epos + 7);
            mode = mode.substr(0, mode.find_first_of(" \t\r"));
            if (mode == "const")
                extend = 0;
            else if (mode == "linear")
                extend = 1;
            else
                throw std::invalid_argument("cost table: extend must be 'const' or 'linear'");
            if (!(reg > 0) || !std::isfinite(reg))
                throw std::invalid_argument("cost table: C must be positive and finite");
            header_seen = true;
            continue;
        }
        if (!header_seen)
            throw std::invalid_argument("cost table: data before header line");
        std::istringstream row(line.substr(first));
        int branch = 0;
        unsigned long k = 0;
        double value = 0;
        if (!(row >> branch >> k >> value))
            throw std::invalid_argument("cost table: malformed row '" + line + "'");
        if (branch != 1 && branch != 2)
            throw std::invalid_argument("cost table: branch must be 1 or 2");
        if (k < 1)
            throw std::invalid_argument("cost table: k must be >= 1");
        auto& r = rows[branch - 1];
        if (k != r.size() + 1)
            throw std::invalid_argument("cost table: rows for each branch must cover k = 1.. contiguously");
        if (!(value >= 0) || !std::isfinite(value))
            throw std::invalid_argument("cost table: values must be finite and nonnegative");
        if (value > reg * double(k) * (1.0 + 1e-12))
            throw std::invalid_argument("cost table: value exceeds the declared bound C*k");
        r.push_back(value);
    }

    if (!header_seen)
        throw std::invalid_argument("cost table: missing header line");
    if (rows[0].empty() || rows[1].empty())
        throw std::invalid_argument("cost table: both branches need at least one row");
    bool any_nonzero = false;
    for (const auto& r : rows)
        for (double v : r)
            any_nonzero |= v != 0.0;
    if (!any_nonzero)
        throw std::invalid_argument("cost table: the cost must not be identically zero");

    auto eval = [rows0 = rows[0], rows1 = rows[1], extend](Branch b, unsigned k) -> double {
        const auto& r = b == Branch::Exchange ? rows0 : rows1;
        if (k <= r.size())
            return r[k - 1];
        const double last = r.back();
        if (extend == 0)
            return last;
        return last * double(k) / double(r.size());
    };
    return CostFunction(std::move(name), std::move(eval), reg);
}

double total_cost(const Trace& t, const CostFunction& c) {
    Accumulator acc;
    for (const auto& s : t.steps)
        acc.add(c(s.branch, s.k));
    return acc.value();
}

double trace_cost(OddPair p, const CostFunction& c, std::uint64_t* gcd_out) {
    check_odd_pair(p, "trace_cost");
    Accumulator acc;
    std::uint64_t a = p.u, b = p.v;
    while (a != b) {
        const std::uint64_t d = b - a;
        const unsigned k = static_cast<unsigned>(std::countr_zero(d));
        const std::uint64_t w = d >> k;
        if (w >= a) {
            acc.add(c(Branch::NoExchange, k));
            b = w;
        } else {
            acc.add(c(Branch::Exchange, k));
            b = a;
            a = w;
        }
    }
    if (gcd_out)
        *gcd_out = a;
    return acc.value();
}

} // namespace brentlab
