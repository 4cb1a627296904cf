#include "stally/methods.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "stally/tournament.hpp"

namespace stally {

const std::vector<MethodId>& all_methods() {
    static const std::vector<MethodId> ids = {
        MethodId::Plurality,   MethodId::PluralityRunoff, MethodId::IrvPut,
        MethodId::IrvEliminateAllTied, MethodId::SmithIrv, MethodId::Minimax,
        MethodId::BeatPath,    MethodId::RankedPairs,     MethodId::StableVoting,
        MethodId::Svs,
    };
    return ids;
}

std::string method_name(MethodId id) {
    switch (id) {
        case MethodId::Plurality: return "plurality";
        case MethodId::PluralityRunoff: return "runoff";
        case MethodId::IrvPut: return "irv";
        case MethodId::IrvEliminateAllTied: return "irv-all-tied";
        case MethodId::SmithIrv: return "smith-irv";
        case MethodId::Minimax: return "minimax";
        case MethodId::BeatPath: return "beat-path";
        case MethodId::RankedPairs: return "ranked-pairs";
        case MethodId::StableVoting: return "sv";
        case MethodId::Svs: return "svs";
    }
    return "?";
}

std::optional<MethodId> method_from_name(std::string_view name) {
    for (MethodId id : all_methods())
        if (method_name(id) == name) return id;
    // A few aliases people will type anyway.
    if (name == "stable-voting") return MethodId::StableVoting;
    if (name == "plurality-runoff") return MethodId::PluralityRunoff;
    if (name == "beatpath" || name == "schulze") return MethodId::BeatPath;
    return std::nullopt;
}

bool method_needs_ballots(MethodId id) {
    switch (id) {
        case MethodId::Plurality:
        case MethodId::PluralityRunoff:
        case MethodId::IrvPut:
        case MethodId::IrvEliminateAllTied:
        case MethodId::SmithIrv:
            return true;
        default:
            return false;
    }
}

namespace {

// First-place votes per candidate among `active`. A ballot counts for the
// unique active candidate in its earliest tier containing any active one;
// if that tier holds two or more active candidates the ballot cannot be
// transferred further and is treated as exhausted.
std::vector<long> first_place_counts(const Profile& profile, CandidateSet active) {
    std::vector<long> counts(static_cast<size_t>(profile.num_candidates()), 0);
    for (const auto& ballot : profile.ballots) {
        for (const auto& tier : ballot.tiers) {
            int hit = -1;
            int actives_in_tier = 0;
            for (int id : tier) {
                if (active.contains(id)) {
                    ++actives_in_tier;
                    hit = id;
                    if (actives_in_tier > 1) break;
                }
            }
            if (actives_in_tier == 1) {
                counts[static_cast<size_t>(hit)] += ballot.count;
                break;
            }
            if (actives_in_tier > 1) break;  // exhausted at a tie
        }
    }
    return counts;
}

CandidateSet minimal_count_set(const std::vector<long>& counts, CandidateSet active) {
    long min_count = -1;
    for (int id : active.members()) {
        const long c = counts[static_cast<size_t>(id)];
        if (min_count < 0 || c < min_count) min_count = c;
    }
    CandidateSet out;
    for (int id : active.members())
        if (counts[static_cast<size_t>(id)] == min_count) out.add(id);
    return out;
}

void require_singleton_tops(const Profile& profile) {
    for (const auto& ballot : profile.ballots)
        if (ballot.tiers.empty() || ballot.tiers.front().size() != 1)
            throw std::invalid_argument("ballot with tied top tier");
}

class IrvPutEngine {
public:
    explicit IrvPutEngine(const Profile& profile) : profile_(profile) {}

    CandidateSet winners(CandidateSet active) {
        if (active.size() == 1) return active;
        auto it = memo_.find(active.key());
        if (it != memo_.end()) return CandidateSet(it->second);

        const auto counts = first_place_counts(profile_, active);
        CandidateSet result;
        for (int b : minimal_count_set(counts, active).members()) {
            const CandidateSet sub = winners(active.without(b));
            result = CandidateSet(result.bits() | sub.bits());
        }
        memo_.emplace(active.key(), result.bits());
        return result;
    }

private:
    const Profile& profile_;
    std::unordered_map<std::uint64_t, std::uint64_t> memo_;
};

void require_castable_votes(const Profile& profile, CandidateSet active) {
    if (active.size() < 2) return;
    const auto counts = first_place_counts(profile, active);
    long total = 0;
    for (long c : counts) total += c;
    if (total == 0) throw std::invalid_argument("all ballots exhausted");
}

}  // namespace

std::vector<int> plurality(const Profile& profile) {
    require_singleton_tops(profile);
    const auto counts = first_place_counts(profile, CandidateSet::full(profile.num_candidates()));
    const long best = *std::max_element(counts.begin(), counts.end());
    std::vector<int> out;
    for (int id = 0; id < profile.num_candidates(); ++id)
        if (counts[static_cast<size_t>(id)] == best) out.push_back(id);
    return out;
}

std::vector<int> plurality_runoff(const Profile& profile) {
    const int n = profile.num_candidates();
    if (n < 2) throw std::invalid_argument("runoff needs at least two candidates");
    require_singleton_tops(profile);
    const auto counts = first_place_counts(profile, CandidateSet::full(n));

    // Resolve ties for the two finalist slots in every possible way.
    const long top = *std::max_element(counts.begin(), counts.end());
    std::vector<int> top_group;
    for (int i = 0; i < n; ++i)
        if (counts[static_cast<size_t>(i)] == top) top_group.push_back(i);
    std::vector<std::pair<int, int>> finals;
    if (top_group.size() >= 2) {
        for (size_t i = 0; i < top_group.size(); ++i)
            for (size_t j = i + 1; j < top_group.size(); ++j)
                finals.emplace_back(top_group[i], top_group[j]);
    } else {
        long second = -1;
        for (int i = 0; i < n; ++i)
            if (i != top_group[0])
                second = std::max(second, counts[static_cast<size_t>(i)]);
        for (int i = 0; i < n; ++i)
            if (i != top_group[0] && counts[static_cast<size_t>(i)] == second)
                finals.emplace_back(top_group[0], i);
    }

    CandidateSet winners;
    for (auto [x, y] : finals) {
        const int m = margin(profile, x, y);
        if (m >= 0) winners.add(x);
        if (m <= 0) winners.add(y);
    }
    return winners.members();
}

std::vector<int> irv_put(const Profile& profile) {
    const CandidateSet active = CandidateSet::full(profile.num_candidates());
    require_castable_votes(profile, active);
    IrvPutEngine engine(profile);
    return engine.winners(active).members();
}

std::vector<int> irv_eliminate_all_tied(const Profile& profile) {
    CandidateSet active = CandidateSet::full(profile.num_candidates());
    while (active.size() > 1) {
        const auto counts = first_place_counts(profile, active);
        const CandidateSet lowest = minimal_count_set(counts, active);
        if (lowest.size() == active.size()) return active.members();
        for (int b : lowest.members()) active.remove(b);
    }
    return active.members();
}

std::vector<int> smith_irv(const Profile& profile) {
    const auto smith_ids = smith_set(margin_graph(profile));
    const Profile restricted = restrict_profile(profile, CandidateSet::of(smith_ids));
    return map_ids(irv_put(restricted), smith_ids);
}

std::vector<int> minimax(const MarginGraph& mg) {
    const int n = mg.n();
    std::vector<int> worst(static_cast<size_t>(n), 0);
    for (int a = 0; a < n; ++a) {
        int w = INT32_MIN;
        for (int b = 0; b < n; ++b)
            if (b != a) w = std::max(w, mg.margin(b, a));
        worst[static_cast<size_t>(a)] = (n == 1) ? 0 : w;
    }
    const int best = *std::min_element(worst.begin(), worst.end());
    std::vector<int> out;
    for (int a = 0; a < n; ++a)
        if (worst[static_cast<size_t>(a)] == best) out.push_back(a);
    return out;
}

std::vector<int> beat_path(const MarginGraph& mg) {
    const int n = mg.n();
    // Strongest-path strengths: a path is as strong as its weakest margin,
    // and the best path wins (Floyd-Warshall max-min relaxation).
    std::vector<int> s(mg.m);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            const int sik = s[static_cast<size_t>(i) * n + k];
            for (int j = 0; j < n; ++j) {
                if (j == i || j == k) continue;
                int& sij = s[static_cast<size_t>(i) * n + j];
                sij = std::max(sij, std::min(sik, s[static_cast<size_t>(k) * n + j]));
            }
        }
    std::vector<int> out;
    for (int a = 0; a < n; ++a) {
        bool ok = true;
        for (int b = 0; b < n; ++b)
            if (b != a && s[static_cast<size_t>(a) * n + b] < s[static_cast<size_t>(b) * n + a]) {
                ok = false;
                break;
            }
        if (ok) out.push_back(a);
    }
    return out;
}

namespace {

struct LockState {
    int n;
    std::vector<char> edge;  // n*n adjacency of locked pairs

    explicit LockState(int n) : n(n), edge(static_cast<size_t>(n) * n, 0) {}

    bool reachable(int from, int to) const {
        if (from == to) return true;
        std::vector<char> seen(static_cast<size_t>(n), 0);
        std::vector<int> stack = {from};
        seen[static_cast<size_t>(from)] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (!edge[static_cast<size_t>(u) * n + v] || seen[static_cast<size_t>(v)]) continue;
                if (v == to) return true;
                seen[static_cast<size_t>(v)] = 1;
                stack.push_back(v);
            }
        }
        return false;
    }
};

void lock_and_collect(const std::vector<Match>& order, int n, CandidateSet& winners) {
    LockState state(n);
    for (const auto& p : order)
        if (!state.reachable(p.second, p.first))
            state.edge[static_cast<size_t>(p.first) * n + p.second] = 1;
    for (int a = 0; a < n; ++a) {
        bool source = true;
        for (int b = 0; b < n; ++b)
            if (state.edge[static_cast<size_t>(b) * n + a]) {
                source = false;
                break;
            }
        if (source) winners.add(a);
    }
}

void enumerate_orders(std::vector<std::vector<Match>>& groups, size_t gi,
                      std::vector<Match>& order, int n, CandidateSet& winners) {
    if (gi == groups.size()) {
        lock_and_collect(order, n, winners);
        return;
    }
    auto& group = groups[gi];
    std::sort(group.begin(), group.end(), [](const Match& a, const Match& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    do {
        const size_t base = order.size();
        order.insert(order.end(), group.begin(), group.end());
        enumerate_orders(groups, gi + 1, order, n, winners);
        order.resize(base);
    } while (std::next_permutation(group.begin(), group.end(), [](const Match& a, const Match& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    }));
}

}  // namespace

std::vector<int> ranked_pairs(const MarginGraph& mg, const RankedPairsOptions& opt) {
    const int n = mg.n();
    std::vector<Match> positive;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (mg.margin(a, b) > 0) positive.push_back({a, b, mg.margin(a, b)});
    std::sort(positive.begin(), positive.end(),
              [](const Match& x, const Match& y) { return x.margin > y.margin; });

    std::vector<std::vector<Match>> groups;
    for (const auto& p : positive) {
        if (groups.empty() || groups.back().front().margin != p.margin) groups.emplace_back();
        groups.back().push_back(p);
    }

    long orders = 1;
    for (const auto& g : groups)
        for (long k = 2; k <= static_cast<long>(g.size()); ++k) {
            orders *= k;
            if (orders > opt.max_orders) throw RankedPairsCapError(opt.max_orders);
        }

    CandidateSet winners;
    std::vector<Match> order;
    order.reserve(positive.size());
    enumerate_orders(groups, 0, order, n, winners);
    return winners.members();
}

std::vector<int> evaluate_method(MethodId id, const Profile& profile, const EvalOptions& opt) {
    switch (id) {
        case MethodId::Plurality: return plurality(profile);
        case MethodId::PluralityRunoff: return plurality_runoff(profile);
        case MethodId::IrvPut: return irv_put(profile);
        case MethodId::IrvEliminateAllTied: return irv_eliminate_all_tied(profile);
        case MethodId::SmithIrv: return smith_irv(profile);
        default: return evaluate_method_on_graph(id, margin_graph(profile), opt);
    }
}

std::vector<int> evaluate_method_on_graph(MethodId id, const MarginGraph& mg,
                                          const EvalOptions& opt) {
    switch (id) {
        case MethodId::Minimax: return minimax(mg);
        case MethodId::BeatPath: return beat_path(mg);
        case MethodId::RankedPairs: return ranked_pairs(mg, opt.rp);
        case MethodId::StableVoting: return sv_winners(mg, opt.sv);
        case MethodId::Svs: return svs_winners(mg, opt.sv);
        default: throw MethodNeedsBallotsError(id);
    }
}

}  // namespace stally
