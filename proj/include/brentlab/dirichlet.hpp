#pragma once

#include "brentlab/ensembles.hpp"
#include "brentlab/gcd.hpp"

#include <cstdint>

namespace brentlab {

/// Riemann zeta on s > 1 by Euler-Maclaurin summation (50 explicit terms,
/// seven Bernoulli corrections); absolute error far below 1e-12 down to
/// s = 1.01. Throws std::domain_error for s <= 1.
double em_zeta(double s);

struct DirichletSum {
    double value;      ///< sum over pairs with v <= v_max
    double tail_bound; ///< rigorous bound on everything dropped
};

/// Truncated Dirichlet series sum cost(u,v)^p / v^(2s) over pairs of odd
/// u < v <= v_max, either all of them (Ensemble::Odd) or the coprime ones
/// (Ensemble::OddCoprime). p = 0 sums counting formulas per v (a totient
/// sieve for the coprime family); p >= 1 walks every pair's division trace.
/// Requires s > 1 and 3 <= v_max <= 2^24; p is capped at 8 and must satisfy
/// the monotone-tail condition (2s - 1) ln2 (1 + log2(v_max + 1)) > p that
/// makes the tail bound valid.
DirichletSum series_truncated(double s, unsigned p, Ensemble family,
                              const CostFunction& c, std::uint64_t v_max,
                              unsigned threads = 0);

/// Closed forms of the p = 0 series through zeta:
///   odd pairs:     (1/2 - 4^-s) zeta(2s-1) - (1 - 4^-s)/2 zeta(2s)
///   odd coprime:   (4^s - 2)/(4^s - 1) zeta(2s-1)/(2 zeta(2s)) - 1/2
double series_closed_odd(double s);
double series_closed_odd_coprime(double s);

/// Compares the truncated p = 0 series against its closed form: the
/// difference must be a genuine tail, nonnegative and below the bound.
struct NumTheoryCheck {
    double s;
    double truncated;
    double closed_form;
    double residual;   ///< closed_form - truncated
    double tail_bound;
    bool ok;
};
NumTheoryCheck verify_numthy(double s, Ensemble family, std::uint64_t v_max,
                             unsigned threads = 0);

/// Checks the gcd-convolution identity S_odd = zeta(2s) (1 - 4^-s) S_coprime
/// at cost power p, both sides truncated at v_max in one banded pass over the
/// pairs (the step costs are invariant under scaling both entries).
struct ConvolutionCheck {
    double s;
    unsigned p;
    double odd_side;
    double coprime_side; ///< already multiplied by zeta(2s) (1 - 4^-s)
    double allowance;    ///< combined truncation allowance for the difference
    bool ok;
};
ConvolutionCheck verify_convolution(double s, unsigned p, const CostFunction& c,
                                    std::uint64_t v_max, unsigned threads = 0);

} // namespace brentlab
