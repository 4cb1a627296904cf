#ifndef STALLY_STABLE_VOTING_HPP
#define STALLY_STABLE_VOTING_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stally/core.hpp"

namespace stally {

// Thrown when the Smith set of the input exceeds the configured width cap.
// The subset recursion is exponential in the Smith set size, so very wide
// cycles are refused up front instead of running unboundedly.
class SmithCapError : public std::runtime_error {
public:
    SmithCapError(int smith_size, int cap)
        : std::runtime_error("Smith set has " + std::to_string(smith_size) +
                             " candidates, above the configured cap of " + std::to_string(cap)),
          smith_size(smith_size),
          cap(cap) {}
    int smith_size;
    int cap;
};

struct SvOptions {
    // Only list matches whose first element lies in the Smith set of the
    // (sub-)election. Winner-preserving; the naive full listing is kept for
    // cross-checks.
    bool restrict_to_smith = true;
    // Elect a Condorcet winner immediately when one exists.
    bool condorcet_short_circuit = true;
    // Cache sub-election winners keyed by surviving candidate subset.
    bool use_memo = true;
    int smith_cap = 12;

    static SvOptions naive() {
        SvOptions o;
        o.restrict_to_smith = false;
        o.condorcet_short_circuit = false;
        return o;
    }
};

struct Match {
    int first = 0;
    int second = 0;
    int margin = 0;
};

enum class SvVerdict { Qualified, Failed, Skipped };

struct SvTraceEntry {
    Match match;
    bool examined = false;
    std::vector<int> sub_winners;  // winners after removing match.second (examined only)
    SvVerdict verdict = SvVerdict::Skipped;
};

struct SvTrace {
    // Set when the election was decided by spotting a Condorcet winner; in
    // that case no matches are listed.
    std::optional<int> condorcet_winner;
    std::vector<SvTraceEntry> entries;  // descending margin
    std::vector<int> winners;
};

// Stable Voting winners: scan head-to-head matches by descending margin and
// elect every first element that wins the sub-election without its opponent,
// at the highest margin level where any match qualifies.
std::vector<int> sv_winners(const MarginGraph& mg, const SvOptions& opt = {});
std::vector<int> sv_winners_in(const MarginGraph& mg, CandidateSet active,
                               const SvOptions& opt = {});

// Full match list annotated with the sub-election outcome of every match
// examined before the decision point; later matches are marked skipped.
SvTrace sv_trace(const MarginGraph& mg, const SvOptions& opt = {});

// Recompute the winner set a trace encodes.
std::vector<int> winners_from_trace(const SvTrace& trace);

// Smith-restricted variant: eliminate everyone outside the Smith set, then
// run Stable Voting. Coincides with sv_winners on uniquely weighted graphs
// but can break ties differently elsewhere.
std::vector<int> svs_winners(const MarginGraph& mg, const SvOptions& opt = {});

// Variant that elects a sole weak Condorcet winner outright and, when there
// are several, only lists matches led by one of them. With no weak Condorcet
// winner at all it falls back to plain Stable Voting.
std::vector<int> sv_weak_condorcet_variant(const MarginGraph& mg, const SvOptions& opt = {});

// Closed-form answer for three-candidate elections, used as an independent
// check of the recursion:
//  - some candidate undefeated: the undefeated candidates whose best margin
//    is maximal among all margins led by an undefeated candidate win;
//  - otherwise each candidate has exactly one loss and the smallest loss wins.
std::vector<int> three_candidate_oracle(const MarginGraph& mg);

// Plain-text rendering of a trace as a numbered match list.
std::string render_trace_text(const MarginGraph& mg, const SvTrace& trace);

}  // namespace stally

#endif
