#include "brentlab/ensembles.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace brentlab {

namespace {

constexpr std::uint64_t theta_v_max_limit = 1'000'000;
constexpr unsigned theta_n_max_limit = 64;

/// A branch word composed into a single integer map. The two letters act on
/// column vectors as
///   D_k = [1 0; 1 2^k]   (undoes a no-exchange step with parameter k)
///   G_k = [0 1; 2^k 1]   (undoes an exchange step with parameter k)
/// and a word a1 a2 ... an denotes the product an * ... * a2 * a1. The pair
/// it reaches is M * (1, 1)^T read as (u, v) = (m00 + m01, m10 + m11). All
/// entries stay non-negative and bounded by v <= v_max, and |det M| = 2^(sum
/// of the k's) <= v_max, so 64-bit arithmetic is exact throughout.
struct WordNode {
    std::int64_t m00, m01, m10, m11;
    std::int64_t letter_det; ///< running product of the letter determinants
    double cost;

    std::uint64_t u() const { return std::uint64_t(m00 + m01); }
    std::uint64_t v() const { return std::uint64_t(m10 + m11); }
    std::int64_t det() const { return m00 * m11 - m01 * m10; }
};

void check_theta_args(unsigned n, std::uint64_t v_max, const char* who) {
    if (v_max < 1 || v_max > theta_v_max_limit)
        throw std::domain_error(std::string(who) + ": v_max must be in [1, 1e6]");
    if (n > theta_n_max_limit)
        throw std::domain_error(std::string(who) + ": step count capped at 64");
}

/// Children of a node under all admissible letters. The first letter of a
/// word must be D: a leading G would claim an exchange step out of a tied
/// pair, which the forward algorithm resolves as no-exchange.
void extend(const WordNode& w, std::uint64_t v_max, bool allow_exchange,
            const CostFunction& c, std::vector<WordNode>& out) {
    const std::uint64_t u = w.u(), v = w.v();
    // D_k: (u, v) -> (u, u + 2^k v)
    for (unsigned k = 1; k < 63 && ((v_max - u) >> k) >= v; ++k) {
        WordNode n;
        n.m00 = w.m00;
        n.m01 = w.m01;
        n.m10 = w.m00 + (w.m10 << k);
        n.m11 = w.m01 + (w.m11 << k);
        n.letter_det = w.letter_det * (std::int64_t(1) << k);
        n.cost = w.cost + c(Branch::NoExchange, k);
        out.push_back(n);
    }
    if (!allow_exchange)
        return;
    // G_k: (u, v) -> (v, v + 2^k u)
    for (unsigned k = 1; k < 63 && ((v_max - v) >> k) >= u; ++k) {
        WordNode n;
        n.m00 = w.m10;
        n.m01 = w.m11;
        n.m10 = w.m10 + (w.m00 << k);
        n.m11 = w.m11 + (w.m01 << k);
        n.letter_det = -w.letter_det * (std::int64_t(1) << k);
        n.cost = w.cost + c(Branch::Exchange, k);
        out.push_back(n);
    }
}

void sort_by_pair(std::vector<WordNode>& level) {
    std::sort(level.begin(), level.end(), [](const WordNode& a, const WordNode& b) {
        return a.v() != b.v() ? a.v() < b.v() : a.u() < b.u();
    });
}

std::vector<WordNode> root_level() {
    return {WordNode{1, 0, 0, 1, 1, 0.0}};
}

std::string pair_str(std::uint64_t u, std::uint64_t v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%llu, %llu)", static_cast<unsigned long long>(u),
                  static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

std::vector<ThetaEntry> theta_enumerate(unsigned n_steps, std::uint64_t v_max,
                                        const CostFunction& c) {
    check_theta_args(n_steps, v_max, "theta_enumerate");
    std::vector<WordNode> level = root_level();
    for (unsigned n = 0; n < n_steps; ++n) {
        std::vector<WordNode> next;
        for (const WordNode& w : level)
            extend(w, v_max, /*allow_exchange=*/n > 0, c, next);
        level = std::move(next);
    }
    sort_by_pair(level);
    std::vector<ThetaEntry> out;
    out.reserve(level.size());
    for (const WordNode& w : level)
        out.push_back({w.u(), w.v(), w.cost});
    return out;
}

ThetaReport verify_theta(unsigned n_max, std::uint64_t v_max, const CostFunction& c) {
    check_theta_args(n_max, v_max, "verify_theta");
    ThetaReport rep;
    rep.n_max = n_max;
    rep.v_max = v_max;
    rep.ok = true;

    auto complain = [&rep](std::string msg) {
        rep.ok = false;
        if (rep.mismatches.size() < 32)
            rep.mismatches.push_back(std::move(msg));
    };

    // trace side: bucket every coprime odd pair by its step count
    std::vector<std::vector<ThetaEntry>> traced(n_max + 1);
    if (v_max >= 1)
        traced[0].push_back({1, 1, 0.0});
    for (std::uint64_t v = 3; v <= v_max; v += 2)
        for (std::uint64_t u = 1; u < v; u += 2) {
            const Trace t = binary_gcd_trace(u, v);
            if (t.gcd != 1 || t.steps.size() > n_max)
                continue;
            traced[t.steps.size()].push_back({u, v, total_cost(t, c)});
        }

    // word side, level by level
    std::vector<WordNode> level = root_level();
    for (unsigned n = 0; n <= n_max; ++n) {
        for (const WordNode& w : level)
            if (w.det() != w.letter_det)
                complain("level " + std::to_string(n) + ": word at " +
                         pair_str(w.u(), w.v()) + " has matrix determinant " +
                         std::to_string(w.det()) + " but letter product " +
                         std::to_string(w.letter_det));
        sort_by_pair(level);

        ThetaLevel lv;
        lv.n = n;
        lv.word_pairs = level.size();
        lv.trace_pairs = traced[n].size();
        lv.match = lv.word_pairs == lv.trace_pairs;
        const std::size_t common = std::min(level.size(), traced[n].size());
        for (std::size_t i = 0; i < common; ++i) {
            const WordNode& w = level[i];
            const ThetaEntry& t = traced[n][i];
            if (w.u() != t.u || w.v() != t.v) {
                lv.match = false;
                complain("level " + std::to_string(n) + ": word pair " +
                         pair_str(w.u(), w.v()) + " vs trace pair " + pair_str(t.u, t.v));
                break;
            }
            const double tol = 1e-9 * std::max(1.0, std::abs(t.cost));
            if (std::abs(w.cost - t.cost) > tol) {
                lv.match = false;
                complain("level " + std::to_string(n) + ": cost mismatch at " +
                         pair_str(t.u, t.v) + ": word " + std::to_string(w.cost) +
                         " vs trace " + std::to_string(t.cost));
            }
        }
        if (lv.word_pairs != lv.trace_pairs)
            complain("level " + std::to_string(n) + ": " + std::to_string(lv.word_pairs) +
                     " word pairs vs " + std::to_string(lv.trace_pairs) + " trace pairs");
        if (!lv.match)
            rep.ok = false;
        rep.levels.push_back(lv);

        if (n < n_max) {
            std::vector<WordNode> next;
            for (const WordNode& w : level)
                extend(w, v_max, /*allow_exchange=*/n > 0, c, next);
            level = std::move(next);
        }
    }
    return rep;
}

} // namespace brentlab
