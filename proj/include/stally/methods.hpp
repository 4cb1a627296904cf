#ifndef STALLY_METHODS_HPP
#define STALLY_METHODS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stally/core.hpp"
#include "stally/stable_voting.hpp"

namespace stally {

enum class MethodId {
    Plurality,
    PluralityRunoff,
    IrvPut,
    IrvEliminateAllTied,
    SmithIrv,
    Minimax,
    BeatPath,
    RankedPairs,
    StableVoting,
    Svs,
};

const std::vector<MethodId>& all_methods();
std::string method_name(MethodId id);
std::optional<MethodId> method_from_name(std::string_view name);
// True for methods that need ballots; the rest run off the margin graph.
bool method_needs_ballots(MethodId id);

class MethodNeedsBallotsError : public std::runtime_error {
public:
    explicit MethodNeedsBallotsError(MethodId id)
        : std::runtime_error(method_name(id) + " needs ballots, not just a margin graph") {}
};

// Thrown when a non-uniquely-weighted ranked-pairs input would need more
// tie-break orders than the configured cap.
class RankedPairsCapError : public std::runtime_error {
public:
    explicit RankedPairsCapError(long cap)
        : std::runtime_error("ranked pairs indeterminate under cap of " + std::to_string(cap) +
                             " tie-break orders") {}
};

std::vector<int> plurality(const Profile& profile);
std::vector<int> plurality_runoff(const Profile& profile);

// Parallel-universe instant runoff: a candidate wins if some resolution of
// elimination ties makes it the last one standing.
std::vector<int> irv_put(const Profile& profile);

// Variant that eliminates the whole minimal-first-place set each round,
// unless that would empty the field, in which case the survivors tie.
std::vector<int> irv_eliminate_all_tied(const Profile& profile);

// Instant runoff on the profile restricted to the Smith set.
std::vector<int> smith_irv(const Profile& profile);

std::vector<int> minimax(const MarginGraph& mg);
std::vector<int> beat_path(const MarginGraph& mg);

struct RankedPairsOptions {
    long max_orders = 10000;
};
std::vector<int> ranked_pairs(const MarginGraph& mg, const RankedPairsOptions& opt = {});

struct EvalOptions {
    SvOptions sv;
    RankedPairsOptions rp;
};

std::vector<int> evaluate_method(MethodId id, const Profile& profile,
                                 const EvalOptions& opt = {});
// Margin-only evaluators; throws MethodNeedsBallotsError for the rest.
std::vector<int> evaluate_method_on_graph(MethodId id, const MarginGraph& mg,
                                          const EvalOptions& opt = {});

}  // namespace stally

#endif
