#pragma once

#include "brentlab/gcd.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace brentlab {

/// Pair families over 1 <= u < v <= n. The numeric values are the CLI codes.
enum class Ensemble : int {
    OddCoprime = 1, ///< u, v odd and coprime
    Odd = 2,        ///< u, v odd
    Coprime = 3,    ///< coprime, any parity
    All = 4,        ///< no filter
};

const char* ensemble_name(Ensemble e);

struct CensusResult {
    Ensemble ensemble;
    std::uint64_t n;
    std::uint64_t count;
    double ratio; ///< count / n^2
};

struct EnsembleStats {
    Ensemble ensemble{};
    std::uint64_t n = 0;
    std::uint64_t count = 0;
    double sum_cost = 0.0;
    double sum_cost_sq = 0.0;
    std::string cost_name;

    double mean() const { return count ? sum_cost / double(count) : 0.0; }
    double second_moment() const { return count ? sum_cost_sq / double(count) : 0.0; }
    double mean_over_log_n() const { return n > 1 ? mean() / std::log(double(n)) : 0.0; }
};

/// Visits the ensemble's pairs ordered by v, then u.
void for_each_pair(Ensemble e, std::uint64_t n,
                   const std::function<void(std::uint64_t, std::uint64_t)>& fn);

std::vector<std::pair<std::uint64_t, std::uint64_t>> list_pairs(Ensemble e, std::uint64_t n);

/// Exact pair count. Coprimality is decided by the binary gcd itself; the
/// parity-only families collapse the inner loop to a per-v count.
CensusResult ensemble_census(Ensemble e, std::uint64_t n, unsigned threads = 0);

/// Exact cost totals over the ensemble. Every pair's cost is the cost of its
/// odd-part pair, so the mixed-parity families are accumulated by weighting
/// each odd pair (a, b) with the number of pairs (2^i a, 2^j b) <= n it
/// represents; pairs with equal odd parts cost zero and only adjust counts.
EnsembleStats mean_cost(Ensemble e, std::uint64_t n, const CostFunction& c,
                        unsigned threads = 0);

/// Stats for all four ensembles and the three built-in costs (S, T, E) from
/// a single enumeration of odd pairs. Indexing: [ensemble value - 1][0..2].
struct SweepResult {
    std::uint64_t n = 0;
    std::array<std::array<EnsembleStats, 3>, 4> stats;
};
SweepResult ensemble_sweep(std::uint64_t n, unsigned threads = 0);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    std::vector<std::pair<double, double>> points; ///< (ln n, mean)
};

/// Ordinary least squares of y against x. Needs >= 3 distinct x values.
SlopeFit fit_line(const std::vector<std::pair<double, double>>& points);

/// Fits mean cost against ln n over the given ladder; the slope estimates
/// the asymptotic growth constant of the cost.
SlopeFit slope_fit(Ensemble e, const CostFunction& c,
                   const std::vector<std::uint64_t>& ladder, unsigned threads = 0);

struct SampleStats {
    EnsembleStats stats;
    double standard_error = 0.0;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate over the ensemble by rejection sampling of uniform
/// pairs; deterministic for a fixed (seed, samples) regardless of threads.
SampleStats sample_mean_cost(Ensemble e, std::uint64_t n, const CostFunction& c,
                             std::uint64_t samples, std::uint64_t seed,
                             unsigned threads = 0);

// --- branch-word enumeration ---------------------------------------------

/// A pair reached by an n-letter branch word applied to 1, with its cost.
struct ThetaEntry {
    std::uint64_t u, v;
    double cost;
};

/// All pairs of the n-step set with denominator <= v_max, sorted by (v, u).
/// Words grow the denominator strictly in both the letter index k and the
/// word length, so the enumeration prunes exactly at v_max.
std::vector<ThetaEntry> theta_enumerate(unsigned n_steps, std::uint64_t v_max,
                                        const CostFunction& c);

struct ThetaLevel {
    unsigned n;
    std::uint64_t word_pairs;
    std::uint64_t trace_pairs;
    bool match;
};

struct ThetaReport {
    unsigned n_max = 0;
    std::uint64_t v_max = 0;
    bool ok = false;
    std::vector<ThetaLevel> levels;
    std::vector<std::string> mismatches; ///< capped at 32 entries
};

/// Cross-checks the word enumeration against direct traces for every step
/// count n <= n_max, including cost equality and, for each word, the exact
/// integer identity between the composed map's matrix, its endpoint pair,
/// and the product of the letter determinants.
ThetaReport verify_theta(unsigned n_max, std::uint64_t v_max, const CostFunction& c);

} // namespace brentlab
