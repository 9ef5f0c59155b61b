#pragma once

#include <string>
#include <vector>

namespace brentlab {

/// Result of one numbered acceptance criterion.
struct CriterionOutcome {
    int id;
    std::string title;
    bool pass;
    std::string detail; ///< measured values and the pinned tolerances
    double seconds;
};

/// Runs the nine acceptance criteria in order, sharing one solved density
/// and one solved distribution across them. Every tolerance is pinned here;
/// the run is deterministic for a fixed machine.
std::vector<CriterionOutcome> run_acceptance(unsigned threads = 0);

} // namespace brentlab
