#include "stally/core.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace stally {

CandidateSet CandidateSet::full(int n) {
    if (n <= 0) return CandidateSet();
    if (n >= 64) return CandidateSet(~std::uint64_t{0});
    return CandidateSet((std::uint64_t{1} << n) - 1);
}

CandidateSet CandidateSet::of(std::initializer_list<int> ids) {
    CandidateSet s;
    for (int id : ids) s.add(id);
    return s;
}

CandidateSet CandidateSet::of(const std::vector<int>& ids) {
    CandidateSet s;
    for (int id : ids) s.add(id);
    return s;
}

std::vector<int> CandidateSet::members() const {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(size()));
    for (std::uint64_t rest = bits_; rest != 0; rest &= rest - 1)
        out.push_back(__builtin_ctzll(rest));
    return out;
}

Profile Profile::make(std::vector<std::string> names, std::vector<Ballot> raw_ballots) {
    const int n = static_cast<int>(names.size());
    if (n < 1) throw std::invalid_argument("profile needs at least one candidate");
    if (n > kMaxCandidates) throw std::invalid_argument("roster exceeds 64 candidates");
    {
        std::unordered_set<std::string> seen;
        for (const auto& nm : names) {
            if (nm.empty()) throw std::invalid_argument("empty candidate name");
            if (!seen.insert(nm).second)
                throw std::invalid_argument("duplicate candidate name: " + nm);
        }
    }

    Profile p;
    p.roster.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) p.roster.push_back({i, std::move(names[static_cast<size_t>(i)])});

    for (auto& b : raw_ballots) {
        if (b.count < 1) throw std::invalid_argument("ballot count must be >= 1");
        std::vector<bool> seen(static_cast<size_t>(n), false);
        int covered = 0;
        for (auto& tier : b.tiers) {
            if (tier.empty()) throw std::invalid_argument("empty tier in ballot");
            for (int id : tier) {
                if (id < 0 || id >= n)
                    throw std::invalid_argument("ballot references unknown candidate id " +
                                                std::to_string(id));
                if (seen[static_cast<size_t>(id)])
                    throw std::invalid_argument("candidate " + std::to_string(id) +
                                                " appears twice in one ballot");
                seen[static_cast<size_t>(id)] = true;
                ++covered;
            }
            std::sort(tier.begin(), tier.end());
        }
        if (covered < n) {
            // Unranked candidates are tied below all ranked ones.
            std::vector<int> bottom;
            bottom.reserve(static_cast<size_t>(n - covered));
            for (int id = 0; id < n; ++id)
                if (!seen[static_cast<size_t>(id)]) bottom.push_back(id);
            b.tiers.push_back(std::move(bottom));
        }
        p.ballots.push_back(std::move(b));
    }
    return p;
}

long Profile::total_voters() const {
    long total = 0;
    for (const auto& b : ballots) total += b.count;
    return total;
}

MarginGraph::MarginGraph(std::vector<std::string> candidate_names, std::vector<int> matrix)
    : names(std::move(candidate_names)), m(std::move(matrix)) {
    const size_t nn = names.size();
    if (nn < 1) throw std::invalid_argument("margin graph needs at least one candidate");
    if (nn > static_cast<size_t>(kMaxCandidates))
        throw std::invalid_argument("margin graph exceeds 64 candidates");
    if (m.size() != nn * nn) throw std::invalid_argument("margin matrix has wrong shape");
    for (size_t a = 0; a < nn; ++a) {
        if (m[a * nn + a] != 0)
            throw std::invalid_argument("nonzero diagonal margin for candidate " + names[a]);
        for (size_t b = a + 1; b < nn; ++b)
            if (m[a * nn + b] != -m[b * nn + a])
                throw std::invalid_argument("margins not antisymmetric for pair (" + names[a] +
                                            ", " + names[b] + ")");
    }
}

MarginGraph MarginGraph::zero(std::vector<std::string> candidate_names) {
    const size_t n = candidate_names.size();
    return MarginGraph(std::move(candidate_names), std::vector<int>(n * n, 0));
}

namespace {

// tier_index[c] = position of c's tier on this ballot.
void fill_tier_index(const Ballot& b, std::vector<int>& tier_index) {
    for (size_t t = 0; t < b.tiers.size(); ++t)
        for (int id : b.tiers[t]) tier_index[static_cast<size_t>(id)] = static_cast<int>(t);
}

}  // namespace

int margin(const Profile& profile, int a, int b) {
    const int n = profile.num_candidates();
    if (a < 0 || a >= n || b < 0 || b >= n)
        throw std::invalid_argument("margin: candidate id out of range");
    if (a == b) return 0;
    int net = 0;
    std::vector<int> tier_index(static_cast<size_t>(n), 0);
    for (const auto& ballot : profile.ballots) {
        fill_tier_index(ballot, tier_index);
        const int ta = tier_index[static_cast<size_t>(a)];
        const int tb = tier_index[static_cast<size_t>(b)];
        if (ta < tb)
            net += ballot.count;
        else if (tb < ta)
            net -= ballot.count;
    }
    return net;
}

MarginGraph margin_graph(const Profile& profile) {
    const int n = profile.num_candidates();
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(n));
    for (const auto& c : profile.roster) names.push_back(c.name);
    MarginGraph mg = MarginGraph::zero(std::move(names));

    std::vector<int> tier_index(static_cast<size_t>(n), 0);
    for (const auto& ballot : profile.ballots) {
        fill_tier_index(ballot, tier_index);
        for (int a = 0; a < n; ++a) {
            const int ta = tier_index[static_cast<size_t>(a)];
            for (int b = a + 1; b < n; ++b) {
                const int tb = tier_index[static_cast<size_t>(b)];
                if (ta < tb) {
                    mg.margin_ref(a, b) += ballot.count;
                    mg.margin_ref(b, a) -= ballot.count;
                } else if (tb < ta) {
                    mg.margin_ref(a, b) -= ballot.count;
                    mg.margin_ref(b, a) += ballot.count;
                }
            }
        }
    }
    return mg;
}

Profile restrict_profile(const Profile& profile, CandidateSet keep) {
    const int n = profile.num_candidates();
    if (keep.empty()) throw std::invalid_argument("restriction to empty candidate set");
    std::vector<int> new_id(static_cast<size_t>(n), -1);
    std::vector<std::string> names;
    for (int id : keep.members()) {
        if (id >= n) throw std::invalid_argument("restriction set references unknown candidate");
        new_id[static_cast<size_t>(id)] = static_cast<int>(names.size());
        names.push_back(profile.roster[static_cast<size_t>(id)].name);
    }

    std::vector<Ballot> ballots;
    ballots.reserve(profile.ballots.size());
    for (const auto& b : profile.ballots) {
        Ballot nb;
        nb.count = b.count;
        for (const auto& tier : b.tiers) {
            std::vector<int> kept;
            for (int id : tier)
                if (new_id[static_cast<size_t>(id)] >= 0)
                    kept.push_back(new_id[static_cast<size_t>(id)]);
            if (!kept.empty()) nb.tiers.push_back(std::move(kept));
        }
        // A voter who ranked no surviving candidate keeps an empty ballot
        // here; Profile::make turns that into a single all-tied tier.
        ballots.push_back(std::move(nb));
    }
    return Profile::make(std::move(names), std::move(ballots));
}

Profile remove_candidate(const Profile& profile, int b) {
    const int n = profile.num_candidates();
    if (b < 0 || b >= n) throw std::invalid_argument("remove_candidate: id out of range");
    if (n < 2) throw std::invalid_argument("cannot remove the last candidate");
    return restrict_profile(profile, CandidateSet::full(n).without(b));
}

GraphRestriction restrict_graph(const MarginGraph& mg, CandidateSet keep) {
    if (keep.empty()) throw std::invalid_argument("restriction to empty candidate set");
    GraphRestriction out;
    out.orig_ids = keep.members();
    const int k = static_cast<int>(out.orig_ids.size());
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(k));
    for (int id : out.orig_ids) {
        if (id >= mg.n())
            throw std::invalid_argument("restriction set references unknown candidate");
        names.push_back(mg.names[static_cast<size_t>(id)]);
    }
    std::vector<int> matrix(static_cast<size_t>(k) * k, 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            matrix[static_cast<size_t>(i) * k + j] = mg.margin(out.orig_ids[static_cast<size_t>(i)],
                                                               out.orig_ids[static_cast<size_t>(j)]);
    out.graph = MarginGraph(std::move(names), std::move(matrix));
    return out;
}

Profile realize_profile(const MarginGraph& mg) {
    const int n = mg.n();

    bool any_odd = false, any_even = false;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            (mg.margin(a, b) % 2 != 0 ? any_odd : any_even) = true;
        }
    if (any_odd && any_even)
        throw std::invalid_argument("realize_profile: margins of mixed parity are not realizable");

    std::vector<Ballot> ballots;
    // current[a][b] = margin contributed so far
    std::vector<int> current(static_cast<size_t>(n) * n, 0);

    if (any_odd) {
        // Seed with the identity-order ballot so every pair is off by an odd
        // amount, then correct residuals in steps of two.
        Ballot seed;
        for (int i = 0; i < n; ++i) seed.tiers.push_back({i});
        seed.count = 1;
        ballots.push_back(seed);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b) current[static_cast<size_t>(a) * n + b] = (a < b) ? 1 : -1;
    }

    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            const int residual = mg.margin(a, b) - current[static_cast<size_t>(a) * n + b];
            if (residual <= 0) continue;
            if (residual % 2 != 0)
                throw std::logic_error("realize_profile: internal parity mismatch");
            const int pairs = residual / 2;
            // Ballot pair {a > b > rest, reverse(rest) > a > b}: together they
            // shift m(a,b) by +2 and cancel on every other pair.
            std::vector<int> rest;
            for (int c = 0; c < n; ++c)
                if (c != a && c != b) rest.push_back(c);
            Ballot fwd, rev;
            fwd.count = pairs;
            rev.count = pairs;
            fwd.tiers.push_back({a});
            fwd.tiers.push_back({b});
            for (int c : rest) fwd.tiers.push_back({c});
            for (auto it = rest.rbegin(); it != rest.rend(); ++it) rev.tiers.push_back({*it});
            rev.tiers.push_back({a});
            rev.tiers.push_back({b});
            ballots.push_back(std::move(fwd));
            ballots.push_back(std::move(rev));
            current[static_cast<size_t>(a) * n + b] += residual;
            current[static_cast<size_t>(b) * n + a] -= residual;
        }
    }

    return Profile::make(mg.names, std::move(ballots));
}

std::vector<int> map_ids(const std::vector<int>& ids, const std::vector<int>& orig_ids) {
    std::vector<int> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(orig_ids.at(static_cast<size_t>(id)));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace stally
