#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace brentlab {

/// Inputs to the gcd routines must stay below this bound so that every
/// intermediate difference and shift fits in 64 bits without checks in the
/// step loop.
inline constexpr std::uint64_t max_gcd_input = std::uint64_t{1} << 62;

/// Branch taken by one step of the binary algorithm. The numeric values are
/// part of the serialized trace format.
enum class Branch : int { Exchange = 1, NoExchange = 2 };

/// One step: the branch and the number k of halvings applied to v - u.
struct StepRecord {
    Branch branch;
    unsigned k;
    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// A pair of odd integers with u <= v.
struct OddPair {
    std::uint64_t u, v;
    friend bool operator==(const OddPair&, const OddPair&) = default;
};

struct ReducedPair {
    OddPair pair;
    unsigned shared_exponent; ///< common power of two removed from the input
    bool swapped;             ///< odd parts were out of order
};

struct Trace {
    std::vector<StepRecord> steps;
    std::uint64_t gcd = 0;

    std::uint64_t subtractions() const { return steps.size(); }
    std::uint64_t divisions() const {
        std::uint64_t t = 0;
        for (const auto& s : steps)
            t += s.k;
        return t;
    }
    std::uint64_t exchanges() const {
        std::uint64_t e = 0;
        for (const auto& s : steps)
            e += s.branch == Branch::Exchange;
        return e;
    }
};

/// Splits n >= 1 into (odd part, exponent of two).
std::pair<std::uint64_t, unsigned> strip_twos(std::uint64_t n);

/// Strips both inputs and orders the odd parts.
ReducedPair reduce_to_odd(std::uint64_t u, std::uint64_t v);

/// One step on an odd pair with u < v: remove the dyadic part of v - u and
/// exchange if the result drops below u. The tie w == u stays on the
/// no-exchange branch, which is also why a full run always ends with a
/// no-exchange step.
std::pair<OddPair, StepRecord> binary_step(OddPair p);

/// Full run on arbitrary positive inputs below max_gcd_input. The steps are
/// those of the reduced odd pair; gcd is the gcd of the original inputs.
/// Equal odd parts yield an empty trace.
Trace binary_gcd_trace(std::uint64_t u, std::uint64_t v);

/// Same recurrence without recording steps.
std::uint64_t binary_gcd(std::uint64_t u, std::uint64_t v);

/// Step counts of the three built-in costs plus the gcd of the pair,
/// gathered in one pass. Requires an odd pair with u <= v.
struct StepCounts {
    std::uint64_t subtractions, divisions, exchanges, gcd;
};
StepCounts count_steps(OddPair p);

/// Compact text form "(i,k);(i,k);..." with i the numeric branch value.
std::string to_string(const Trace& t);

/// Step cost c(branch, k). Carries the regularity constant C of the bound
/// c(i, k) <= C * k, which is validated lazily at every evaluation (a
/// closed-over function cannot be checked up front).
class CostFunction {
public:
    using Fn = std::function<double(Branch, unsigned)>;

    CostFunction(std::string name, Fn fn, double regularity);

    double operator()(Branch b, unsigned k) const;
    double regularity() const { return regularity_; }
    const std::string& name() const { return name_; }

    static const CostFunction& subtractions(); ///< c == 1
    static const CostFunction& divisions();    ///< c(i, k) = k
    static const CostFunction& exchanges();    ///< 1 on the exchange branch, else 0

    /// Parses the tabulated format:
    ///   # cost-table C=<regularity> extend=<const|linear>
    ///   <branch 1|2> <k> <value>
    /// Each branch needs contiguous rows k = 1..k_max; values beyond k_max
    /// follow the declared extension (constant, or proportional to k).
    static CostFunction from_table(const std::string& text, std::string name = "table");

private:
    std::string name_;
    Fn fn_;
    double regularity_;
};

double total_cost(const Trace& t, const CostFunction& c);

/// Accumulates c over the steps of the odd pair without materializing the
/// trace; optionally reports the gcd of the pair.
double trace_cost(OddPair p, const CostFunction& c, std::uint64_t* gcd_out = nullptr);

} // namespace brentlab
