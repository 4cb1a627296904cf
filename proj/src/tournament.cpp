#include "stally/tournament.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace stally {

namespace {

void require_active(const MarginGraph& mg, CandidateSet active) {
    if (active.empty()) throw std::invalid_argument("empty candidate set");
    if (mg.n() < 64 && (active.bits() >> mg.n()) != 0)
        throw std::invalid_argument("active set references unknown candidate");
}

}  // namespace

std::optional<int> condorcet_winner_in(const MarginGraph& mg, CandidateSet active) {
    require_active(mg, active);
    const auto ids = active.members();
    for (int a : ids) {
        bool beats_all = true;
        for (int b : ids) {
            if (a == b) continue;
            if (mg.margin(a, b) <= 0) {
                beats_all = false;
                break;
            }
        }
        if (beats_all) return a;
    }
    return std::nullopt;
}

std::optional<int> condorcet_winner(const MarginGraph& mg) {
    return condorcet_winner_in(mg, CandidateSet::full(mg.n()));
}

std::vector<int> weak_condorcet_winners_in(const MarginGraph& mg, CandidateSet active) {
    require_active(mg, active);
    const auto ids = active.members();
    std::vector<int> out;
    for (int a : ids) {
        bool no_loss = true;
        for (int b : ids) {
            if (a != b && mg.margin(a, b) < 0) {
                no_loss = false;
                break;
            }
        }
        if (no_loss) out.push_back(a);
    }
    return out;
}

std::vector<int> weak_condorcet_winners(const MarginGraph& mg) {
    return weak_condorcet_winners_in(mg, CandidateSet::full(mg.n()));
}

std::optional<int> condorcet_loser_in(const MarginGraph& mg, CandidateSet active) {
    require_active(mg, active);
    if (active.size() < 2) return std::nullopt;
    const auto ids = active.members();
    for (int a : ids) {
        bool loses_all = true;
        for (int b : ids) {
            if (a == b) continue;
            if (mg.margin(a, b) >= 0) {
                loses_all = false;
                break;
            }
        }
        if (loses_all) return a;
    }
    return std::nullopt;
}

std::optional<int> condorcet_loser(const MarginGraph& mg) {
    return condorcet_loser_in(mg, CandidateSet::full(mg.n()));
}

CandidateSet smith_set_in(const MarginGraph& mg, CandidateSet active) {
    require_active(mg, active);
    const auto ids = active.members();

    // Seed with the maximal-Copeland candidates, then close: anyone outside
    // who is not strictly beaten by some member gets pulled in.
    int best = INT32_MIN;
    std::vector<int> copeland(ids.size(), 0);
    for (size_t i = 0; i < ids.size(); ++i) {
        int score = 0;
        for (int b : ids) {
            if (b == ids[i]) continue;
            const int m = mg.margin(ids[i], b);
            if (m > 0) ++score;
            if (m < 0) --score;
        }
        copeland[i] = score;
        best = std::max(best, score);
    }
    CandidateSet smith;
    for (size_t i = 0; i < ids.size(); ++i)
        if (copeland[i] == best) smith.add(ids[i]);

    bool grew = true;
    while (grew) {
        grew = false;
        for (int y : ids) {
            if (smith.contains(y)) continue;
            for (int x : smith.members()) {
                if (mg.margin(x, y) <= 0) {
                    smith.add(y);
                    grew = true;
                    break;
                }
            }
        }
    }
    return smith;
}

std::vector<int> smith_set(const MarginGraph& mg) {
    return smith_set_in(mg, CandidateSet::full(mg.n())).members();
}

bool uniquely_weighted(const MarginGraph& mg) {
    const int n = mg.n();
    std::unordered_set<int> seen;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            if (!seen.insert(mg.margin(a, b)).second) return false;
        }
    return true;
}

}  // namespace stally
