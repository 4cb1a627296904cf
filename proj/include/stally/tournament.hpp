#ifndef STALLY_TOURNAMENT_HPP
#define STALLY_TOURNAMENT_HPP

#include <optional>
#include <vector>

#include "stally/core.hpp"

namespace stally {

// Head-to-head analysis on margin graphs. The *_in variants work on a
// candidate subset of the full graph; the plain versions use all candidates.

std::optional<int> condorcet_winner_in(const MarginGraph& mg, CandidateSet active);
std::optional<int> condorcet_winner(const MarginGraph& mg);

std::vector<int> weak_condorcet_winners_in(const MarginGraph& mg, CandidateSet active);
std::vector<int> weak_condorcet_winners(const MarginGraph& mg);

std::optional<int> condorcet_loser_in(const MarginGraph& mg, CandidateSet active);
std::optional<int> condorcet_loser(const MarginGraph& mg);

// Smallest non-empty set whose members all beat (strictly positive margin)
// every candidate outside it. Ties never count as beating, so tied pairs are
// pulled inside the set.
CandidateSet smith_set_in(const MarginGraph& mg, CandidateSet active);
std::vector<int> smith_set(const MarginGraph& mg);

// No two distinct ordered matches share a margin value.
bool uniquely_weighted(const MarginGraph& mg);

}  // namespace stally

#endif
