#ifndef STALLY_SIMULATION_HPP
#define STALLY_SIMULATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "stally/core.hpp"
#include "stally/methods.hpp"

namespace stally {

enum class CultureModel { ImpartialCulture };

struct SamplerSpec {
    int num_candidates = 1;
    int num_voters = 1;
    std::uint64_t seed = 0;
    CultureModel model = CultureModel::ImpartialCulture;
};

// Profile number `index` of the stream defined by `spec`: every voter's
// ballot is an independent uniform draw from the n! linear orders. The draw
// is keyed by (seed, candidates, voters, index), so any subset of the stream
// can be regenerated in any order.
Profile sample_linear_profile(const SamplerSpec& spec, long index);

std::string candidate_letter_name(int id);

struct ExperimentRow {
    MethodId method{};
    int candidates = 0;
    int voters = 0;
    long samples = 0;
    long hits = 0;
    double rate = 0.0;
};

struct ExperimentResult {
    std::string experiment;
    std::uint64_t seed = 0;
    long samples_requested = 0;  // per parity (tie) or per grid point (monotonicity)
    bool exhaustive = false;
    std::vector<ExperimentRow> rows;
};

struct SimOptions {
    int threads = 0;  // 0 = hardware concurrency
    EvalOptions eval;
};

// Multi-winner-tie frequencies under impartial culture. Each grid point
// (candidates, voters) pools samples_per_parity profiles at `voters` with the
// same number at `voters + 1`, so each point sees one even and one odd
// electorate size. A hit is a winner set with two or more members.
ExperimentResult tie_rate_experiment(const std::vector<MethodId>& methods,
                                     const std::vector<int>& candidate_counts,
                                     const std::vector<int>& voter_counts,
                                     long samples_per_parity, std::uint64_t seed,
                                     const SimOptions& opt = {});

// Exact tie rates by enumerating every linear profile at each grid point.
// Only feasible for very small grids; throws std::invalid_argument when the
// enumeration would exceed a few million profiles.
ExperimentResult tie_rate_exhaustive(const std::vector<MethodId>& methods,
                                     const std::vector<int>& candidate_counts,
                                     const std::vector<int>& voter_counts,
                                     const SimOptions& opt = {});

struct BallotRef {
    int ballot = 0;
    int copy = 0;
};

// One copy of the referenced ballot with `candidate` swapped one position up
// (its displaced neighbour moves down). The ballot must be linear and the
// candidate must not already be on top.
Profile lift_one_position(const Profile& profile, BallotRef voter, int candidate);

// Frequency of profiles admitting a single-voter monotonicity violation:
// some winner that a one-position lift on one ballot turns into a loser.
ExperimentResult monotonicity_experiment(const std::vector<MethodId>& methods,
                                         int num_candidates,
                                         const std::vector<int>& voter_counts, long samples,
                                         std::uint64_t seed, const SimOptions& opt = {});

// True when lifting `candidate` on some single ballot of `profile` drops it
// from the winner set of `method`.
bool has_monotonicity_violation(const Profile& profile, MethodId method,
                                const EvalOptions& opt = {});

enum class CriterionStatus { Pass, Fail, NotApplicable };

struct CriterionVerdict {
    std::string criterion;
    CriterionStatus status = CriterionStatus::Pass;
    std::string details;
};

// Per-profile audit of the named voting criteria for one method.
std::vector<CriterionVerdict> check_criteria(const Profile& profile, MethodId method,
                                             const EvalOptions& opt = {});
// Margin-graph variant; ballot-dependent methods are rejected.
std::vector<CriterionVerdict> check_criteria_graph(const MarginGraph& mg, MethodId method,
                                                   const EvalOptions& opt = {});

std::string write_experiment_csv(const ExperimentResult& result);
std::string write_experiment_json(const ExperimentResult& result);

}  // namespace stally

#endif
