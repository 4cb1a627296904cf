#include "stally/simulation.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "stally/io.hpp"
#include "stally/stable_voting.hpp"
#include "stally/tournament.hpp"

namespace stally {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_key(const SamplerSpec& spec, long index) {
    std::uint64_t k = splitmix64(spec.seed);
    k = splitmix64(k ^ static_cast<std::uint64_t>(spec.num_candidates));
    k = splitmix64(k ^ static_cast<std::uint64_t>(spec.num_voters));
    k = splitmix64(k ^ static_cast<std::uint64_t>(index));
    return k;
}

int auto_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(sample_index, worker_index) over [0, count) on a small thread pool;
// fn must only touch per-index state plus the worker's own accumulator.
// Returns the number of workers used.
template <typename Fn>
int for_each_sample(long count, int threads, Fn&& fn) {
    const int t_use = static_cast<int>(std::min<long>(threads, std::max<long>(count, 1)));
    if (t_use <= 1) {
        for (long s = 0; s < count; ++s) fn(s, 0);
        return 1;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(t_use));
    for (int t = 0; t < t_use; ++t) {
        pool.emplace_back([&, t]() {
            for (long s = t; s < count; s += t_use) fn(s, t);
        });
    }
    for (auto& th : pool) th.join();
    return t_use;
}

std::vector<int> winners_for(MethodId method, const Profile& profile, const MarginGraph& mg,
                             const EvalOptions& opt) {
    if (method_needs_ballots(method)) return evaluate_method(method, profile, opt);
    return evaluate_method_on_graph(method, mg, opt);
}

}  // namespace

std::string candidate_letter_name(int id) {
    if (id < 26) return std::string(1, static_cast<char>('A' + id));
    return "X" + std::to_string(id + 1);
}

Profile sample_linear_profile(const SamplerSpec& spec, long index) {
    if (spec.num_candidates < 1 || spec.num_voters < 1)
        throw std::invalid_argument("sampler needs at least one candidate and one voter");
    std::mt19937_64 rng(stream_key(spec, index));

    const int n = spec.num_candidates;
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) names.push_back(candidate_letter_name(i));

    std::vector<Ballot> ballots;
    ballots.reserve(static_cast<size_t>(spec.num_voters));
    std::vector<int> order(static_cast<size_t>(n));
    for (int v = 0; v < spec.num_voters; ++v) {
        for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
        for (int i = n - 1; i > 0; --i) {
            std::uniform_int_distribution<int> pick(0, i);
            std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(pick(rng))]);
        }
        Ballot b;
        b.count = 1;
        for (int i = 0; i < n; ++i) b.tiers.push_back({order[static_cast<size_t>(i)]});
        ballots.push_back(std::move(b));
    }
    return Profile::make(std::move(names), std::move(ballots));
}

ExperimentResult tie_rate_experiment(const std::vector<MethodId>& methods,
                                     const std::vector<int>& candidate_counts,
                                     const std::vector<int>& voter_counts,
                                     long samples_per_parity, std::uint64_t seed,
                                     const SimOptions& opt) {
    if (samples_per_parity < 1) throw std::invalid_argument("need at least one sample per parity");
    ExperimentResult result;
    result.experiment = "tie_rate";
    result.seed = seed;
    result.samples_requested = samples_per_parity;

    const int threads = auto_threads(opt.threads);
    for (int n : candidate_counts) {
        for (int v : voter_counts) {
            std::vector<long> hits(methods.size(), 0);
            long samples = 0;
            for (int voters : {v, v + 1}) {
                SamplerSpec spec{n, voters, seed, CultureModel::ImpartialCulture};
                std::vector<std::vector<long>> per_thread(static_cast<size_t>(threads),
                                                          std::vector<long>(methods.size(), 0));
                for_each_sample(samples_per_parity, threads, [&](long s, int worker) {
                    const Profile profile = sample_linear_profile(spec, s);
                    const MarginGraph mg = margin_graph(profile);
                    for (size_t mi = 0; mi < methods.size(); ++mi) {
                        const auto w = winners_for(methods[mi], profile, mg, opt.eval);
                        if (w.size() >= 2) ++per_thread[static_cast<size_t>(worker)][mi];
                    }
                });
                for (const auto& local : per_thread)
                    for (size_t mi = 0; mi < methods.size(); ++mi) hits[mi] += local[mi];
                samples += samples_per_parity;
            }
            for (size_t mi = 0; mi < methods.size(); ++mi) {
                ExperimentRow row;
                row.method = methods[mi];
                row.candidates = n;
                row.voters = v;
                row.samples = samples;
                row.hits = hits[mi];
                row.rate = samples > 0 ? static_cast<double>(hits[mi]) / static_cast<double>(samples)
                                       : 0.0;
                result.rows.push_back(row);
            }
        }
    }
    return result;
}

namespace {

long checked_pow(long base, int exp, long limit) {
    long out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > limit / base) return -1;
        out *= base;
    }
    return out;
}

}  // namespace

ExperimentResult tie_rate_exhaustive(const std::vector<MethodId>& methods,
                                     const std::vector<int>& candidate_counts,
                                     const std::vector<int>& voter_counts,
                                     const SimOptions& opt) {
    constexpr long kMaxProfiles = 2'000'000;
    ExperimentResult result;
    result.experiment = "tie_rate";
    result.exhaustive = true;

    for (int n : candidate_counts) {
        // All n! linear orders once.
        std::vector<std::vector<int>> orders;
        std::vector<int> perm(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
        do {
            orders.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
        const long n_orders = static_cast<long>(orders.size());

        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) names.push_back(candidate_letter_name(i));

        for (int v : voter_counts) {
            const long total = checked_pow(n_orders, v, kMaxProfiles);
            if (total < 0)
                throw std::invalid_argument("exhaustive enumeration too large for " +
                                            std::to_string(n) + " candidates and " +
                                            std::to_string(v) + " voters");
            std::vector<long> hits(methods.size(), 0);

            const int threads = auto_threads(opt.threads);
            std::vector<std::vector<long>> per_thread(static_cast<size_t>(threads),
                                                      std::vector<long>(methods.size(), 0));
            for_each_sample(total, threads, [&](long code, int worker) {
                // Decode voter ballots from the profile number.
                std::vector<Ballot> ballots;
                ballots.reserve(static_cast<size_t>(v));
                long rest = code;
                for (int voter = 0; voter < v; ++voter) {
                    const auto& order = orders[static_cast<size_t>(rest % n_orders)];
                    rest /= n_orders;
                    Ballot b;
                    b.count = 1;
                    for (int i = 0; i < n; ++i) b.tiers.push_back({order[static_cast<size_t>(i)]});
                    ballots.push_back(std::move(b));
                }
                const Profile profile = Profile::make(names, std::move(ballots));
                const MarginGraph mg = margin_graph(profile);
                for (size_t mi = 0; mi < methods.size(); ++mi) {
                    const auto w = winners_for(methods[mi], profile, mg, opt.eval);
                    if (w.size() >= 2) ++per_thread[static_cast<size_t>(worker)][mi];
                }
            });
            for (const auto& local : per_thread)
                for (size_t mi = 0; mi < methods.size(); ++mi) hits[mi] += local[mi];

            for (size_t mi = 0; mi < methods.size(); ++mi) {
                ExperimentRow row;
                row.method = methods[mi];
                row.candidates = n;
                row.voters = v;
                row.samples = total;
                row.hits = hits[mi];
                row.rate = total > 0 ? static_cast<double>(hits[mi]) / static_cast<double>(total)
                                     : 0.0;
                result.rows.push_back(row);
            }
        }
    }
    return result;
}

Profile lift_one_position(const Profile& profile, BallotRef voter, int candidate) {
    const int n = profile.num_candidates();
    if (voter.ballot < 0 || voter.ballot >= static_cast<int>(profile.ballots.size()))
        throw std::invalid_argument("lift: ballot index out of range");
    const Ballot& src = profile.ballots[static_cast<size_t>(voter.ballot)];
    if (voter.copy < 0 || voter.copy >= src.count)
        throw std::invalid_argument("lift: ballot copy out of range");
    if (candidate < 0 || candidate >= n) throw std::invalid_argument("lift: unknown candidate");
    for (const auto& tier : src.tiers)
        if (tier.size() != 1)
            throw std::invalid_argument("lift: ballot is not a linear order");

    size_t pos = src.tiers.size();
    for (size_t t = 0; t < src.tiers.size(); ++t)
        if (src.tiers[t][0] == candidate) {
            pos = t;
            break;
        }
    if (pos == src.tiers.size()) throw std::logic_error("lift: candidate missing from ballot");
    if (pos == 0)
        throw std::invalid_argument("lift: candidate already ranked first on that ballot");

    Ballot lifted = src;
    lifted.count = 1;
    std::swap(lifted.tiers[pos - 1], lifted.tiers[pos]);

    Profile out = profile;
    if (src.count == 1) {
        out.ballots[static_cast<size_t>(voter.ballot)] = std::move(lifted);
    } else {
        out.ballots[static_cast<size_t>(voter.ballot)].count -= 1;
        out.ballots.push_back(std::move(lifted));
    }
    return out;
}

bool has_monotonicity_violation(const Profile& profile, MethodId method,
                                const EvalOptions& opt) {
    const MarginGraph mg = margin_graph(profile);
    const auto winners = winners_for(method, profile, mg, opt);
    for (int a : winners) {
        for (size_t bi = 0; bi < profile.ballots.size(); ++bi) {
            const Ballot& b = profile.ballots[bi];
            const auto& top = b.tiers.front();
            if (std::find(top.begin(), top.end(), a) != top.end()) continue;  // already on top
            // Copies of one ballot are interchangeable; lifting any one of
            // them yields the same profile.
            const Profile lifted = lift_one_position(profile, {static_cast<int>(bi), 0}, a);
            const auto after = winners_for(method, lifted, margin_graph(lifted), opt);
            if (!std::binary_search(after.begin(), after.end(), a)) return true;
        }
    }
    return false;
}

ExperimentResult monotonicity_experiment(const std::vector<MethodId>& methods,
                                         int num_candidates,
                                         const std::vector<int>& voter_counts, long samples,
                                         std::uint64_t seed, const SimOptions& opt) {
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    ExperimentResult result;
    result.experiment = "monotonicity";
    result.seed = seed;
    result.samples_requested = samples;

    const int threads = auto_threads(opt.threads);
    for (int v : voter_counts) {
        SamplerSpec spec{num_candidates, v, seed, CultureModel::ImpartialCulture};
        std::vector<std::vector<long>> per_thread(static_cast<size_t>(threads),
                                                  std::vector<long>(methods.size(), 0));
        for_each_sample(samples, threads, [&](long s, int worker) {
            const Profile profile = sample_linear_profile(spec, s);
            for (size_t mi = 0; mi < methods.size(); ++mi)
                if (has_monotonicity_violation(profile, methods[mi], opt.eval))
                    ++per_thread[static_cast<size_t>(worker)][mi];
        });
        for (size_t mi = 0; mi < methods.size(); ++mi) {
            long hits = 0;
            for (const auto& local : per_thread) hits += local[mi];
            ExperimentRow row;
            row.method = methods[mi];
            row.candidates = num_candidates;
            row.voters = v;
            row.samples = samples;
            row.hits = hits;
            row.rate = static_cast<double>(hits) / static_cast<double>(samples);
            result.rows.push_back(row);
        }
    }
    return result;
}

namespace {

std::vector<int> winners_without(MethodId method, const Profile* profile, const MarginGraph& mg,
                                 int removed, const EvalOptions& opt) {
    if (method_needs_ballots(method)) {
        const Profile sub = remove_candidate(*profile, removed);
        const auto w = evaluate_method(method, sub, opt);
        // Map the densely reindexed ids back to the parent election.
        std::vector<int> orig;
        for (int id = 0; id < static_cast<int>(mg.names.size()); ++id)
            if (id != removed) orig.push_back(id);
        return map_ids(w, orig);
    }
    const auto restriction = restrict_graph(mg, CandidateSet::full(mg.n()).without(removed));
    return map_ids(evaluate_method_on_graph(method, restriction.graph, opt),
                   restriction.orig_ids);
}

std::vector<CriterionVerdict> run_checks(const Profile* profile, const MarginGraph& mg,
                                         MethodId method, const EvalOptions& opt) {
    std::vector<CriterionVerdict> out;
    const int n = mg.n();

    std::vector<int> winners;
    if (method_needs_ballots(method)) {
        if (profile == nullptr) throw MethodNeedsBallotsError(method);
        winners = evaluate_method(method, *profile, opt);
    } else {
        winners = evaluate_method_on_graph(method, mg, opt);
    }
    const auto won = [&](int a) { return std::binary_search(winners.begin(), winners.end(), a); };

    auto name_list = [&](const std::vector<int>& ids) {
        std::string s = "{";
        for (size_t i = 0; i < ids.size(); ++i) {
            if (i > 0) s += ", ";
            s += mg.name_of(ids[static_cast<size_t>(i)]);
        }
        return s + "}";
    };

    // Condorcet criterion.
    {
        CriterionVerdict v{"condorcet", CriterionStatus::Pass, ""};
        if (const auto cw = condorcet_winner(mg)) {
            if (winners.size() == 1 && winners[0] == *cw) {
                v.details = "Condorcet winner " + mg.name_of(*cw) + " elected uniquely";
            } else {
                v.status = CriterionStatus::Fail;
                v.details = "Condorcet winner " + mg.name_of(*cw) + " but winners " +
                            name_list(winners);
            }
        } else {
            v.details = "no Condorcet winner; nothing to check";
        }
        out.push_back(std::move(v));
    }

    // Smith criterion.
    {
        CriterionVerdict v{"smith", CriterionStatus::Pass, ""};
        const auto smith = smith_set(mg);
        std::vector<int> outside;
        for (int w : winners)
            if (!std::binary_search(smith.begin(), smith.end(), w)) outside.push_back(w);
        if (outside.empty()) {
            v.details = "all winners inside the Smith set " + name_list(smith);
        } else {
            v.status = CriterionStatus::Fail;
            v.details = "winners " + name_list(outside) + " outside the Smith set " +
                        name_list(smith);
        }
        out.push_back(std::move(v));
    }

    // Condorcet loser criterion.
    {
        CriterionVerdict v{"condorcet-loser", CriterionStatus::Pass, ""};
        if (const auto cl = condorcet_loser(mg)) {
            if (won(*cl)) {
                v.status = CriterionStatus::Fail;
                v.details = "Condorcet loser " + mg.name_of(*cl) + " wins";
            } else {
                v.details = "Condorcet loser " + mg.name_of(*cl) + " does not win";
            }
        } else {
            v.details = "no Condorcet loser; nothing to check";
        }
        out.push_back(std::move(v));
    }

    // Stability for winners with tiebreaking: if anyone is stable, some
    // stable candidate must win. A is stable when it beats some B head to
    // head and wins once B is removed.
    {
        CriterionVerdict v{"stability-with-tiebreaking", CriterionStatus::Pass, ""};
        std::vector<int> stable;
        bool skipped_subelections = false;
        for (int a = 0; a < n && n >= 2; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b || mg.margin(a, b) <= 0) continue;
                std::vector<int> sub;
                try {
                    sub = winners_without(method, profile, mg, b, opt);
                } catch (const std::invalid_argument&) {
                    skipped_subelections = true;
                    continue;
                }
                if (std::binary_search(sub.begin(), sub.end(), a)) {
                    stable.push_back(a);
                    break;
                }
            }
        }
        if (stable.empty()) {
            if (skipped_subelections) {
                v.status = CriterionStatus::NotApplicable;
                v.details = "some sub-elections were not evaluable for this method";
            } else {
                v.details = "no stable candidate; nothing to check";
            }
        } else {
            bool ok = false;
            for (int a : stable)
                if (won(a)) ok = true;
            if (ok) {
                v.details = "stable candidates " + name_list(stable) + "; one of them wins";
            } else {
                v.status = CriterionStatus::Fail;
                v.details = "stable candidates " + name_list(stable) + " exist but winners are " +
                            name_list(winners);
            }
        }
        out.push_back(std::move(v));
    }

    // ISDA: removing a candidate outside the Smith set must not change the
    // winners. Only guaranteed on uniquely weighted inputs, so elsewhere it
    // is reported as not applicable (with the Smith-restriction diff shown).
    {
        CriterionVerdict v{"isda", CriterionStatus::Pass, ""};
        const auto smith = smith_set(mg);
        if (!uniquely_weighted(mg)) {
            v.status = CriterionStatus::NotApplicable;
            v.details = "not applicable (not uniquely weighted)";
            if (static_cast<int>(smith.size()) < n) {
                const auto restriction = restrict_graph(mg, CandidateSet::of(smith));
                try {
                    std::vector<int> restricted_winners;
                    if (method_needs_ballots(method)) {
                        restricted_winners = map_ids(
                            evaluate_method(method,
                                            restrict_profile(*profile, CandidateSet::of(smith)),
                                            opt),
                            smith);
                    } else {
                        restricted_winners =
                            map_ids(evaluate_method_on_graph(method, restriction.graph, opt),
                                    restriction.orig_ids);
                    }
                    if (restricted_winners != winners)
                        v.details += "; winners " + name_list(winners) +
                                     " but restricted to the Smith set they are " +
                                     name_list(restricted_winners);
                } catch (const std::invalid_argument&) {
                    // restricted profile not evaluable for this method
                }
            }
        } else if (static_cast<int>(smith.size()) == n) {
            v.details = "no candidate outside the Smith set; nothing to check";
        } else {
            std::vector<int> changed;
            for (int b = 0; b < n; ++b) {
                if (std::binary_search(smith.begin(), smith.end(), b)) continue;
                try {
                    if (winners_without(method, profile, mg, b, opt) != winners)
                        changed.push_back(b);
                } catch (const std::invalid_argument&) {
                    // skip unevaluable removals
                }
            }
            if (changed.empty()) {
                v.details = "removing Smith-dominated candidates leaves winners unchanged";
            } else {
                v.status = CriterionStatus::Fail;
                v.details = "removing " + name_list(changed) + " changes the winners";
            }
        }
        out.push_back(std::move(v));
    }

    return out;
}

}  // namespace

std::vector<CriterionVerdict> check_criteria(const Profile& profile, MethodId method,
                                             const EvalOptions& opt) {
    const MarginGraph mg = margin_graph(profile);
    return run_checks(&profile, mg, method, opt);
}

std::vector<CriterionVerdict> check_criteria_graph(const MarginGraph& mg, MethodId method,
                                                   const EvalOptions& opt) {
    return run_checks(nullptr, mg, method, opt);
}

std::string write_experiment_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "method,candidates,voters,samples,hits,rate\n";
    for (const auto& row : result.rows) {
        std::ostringstream rate;
        rate.setf(std::ios::fixed);
        rate.precision(8);
        rate << row.rate;
        out << method_name(row.method) << ',' << row.candidates << ',' << row.voters << ','
            << row.samples << ',' << row.hits << ',' << rate.str() << "\n";
    }
    return out.str();
}

std::string write_experiment_json(const ExperimentResult& result) {
    nlohmann::ordered_json doc;
    doc["format"] = "stable-tally/1";
    doc["type"] = "experiment";
    doc["experiment"] = result.experiment;
    doc["seed"] = result.seed;
    doc["samples_requested"] = result.samples_requested;
    doc["exhaustive"] = result.exhaustive;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : result.rows) {
        rows.push_back({{"method", method_name(row.method)},
                        {"candidates", row.candidates},
                        {"voters", row.voters},
                        {"samples", row.samples},
                        {"hits", row.hits},
                        {"rate", row.rate}});
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

}  // namespace stally
