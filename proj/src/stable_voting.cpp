#include "stally/stable_voting.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "stally/tournament.hpp"

namespace stally {

namespace {

class SvEngine {
public:
    SvEngine(const MarginGraph& mg, const SvOptions& opt) : mg_(mg), opt_(opt) {}

    CandidateSet winners(CandidateSet active) {
        if (active.empty()) throw std::invalid_argument("empty candidate set");
        if (active.size() == 1) return active;

        if (opt_.use_memo) {
            auto it = memo_.find(active.key());
            if (it != memo_.end()) return CandidateSet(it->second);
        }

        CandidateSet result;
        if (opt_.condorcet_short_circuit) {
            if (auto cw = condorcet_winner_in(mg_, active)) {
                result.add(*cw);
                if (opt_.use_memo) memo_.emplace(active.key(), result.bits());
                return result;
            }
        }

        CandidateSet firsts = active;
        if (opt_.restrict_to_smith) firsts = smith_set_in(mg_, active);

        // Walk margin levels from the top; the first level where any match
        // qualifies decides the election.
        auto matches = build_matches(active, firsts);
        size_t i = 0;
        while (i < matches.size()) {
            const int level = matches[i].margin;
            CandidateSet qualified;
            for (; i < matches.size() && matches[i].margin == level; ++i) {
                const Match& match = matches[i];
                if (qualified.contains(match.first)) continue;
                if (winners(active.without(match.second)).contains(match.first))
                    qualified.add(match.first);
            }
            if (!qualified.empty()) {
                result = qualified;
                break;
            }
        }
        if (result.empty())
            throw std::logic_error("stable voting recursion found no winner");
        if (opt_.use_memo) memo_.emplace(active.key(), result.bits());
        return result;
    }

    std::vector<Match> build_matches(CandidateSet active, CandidateSet firsts) const {
        std::vector<Match> out;
        const auto ids = active.members();
        out.reserve(ids.size() * (ids.size() - 1));
        for (int a : firsts.members())
            for (int b : ids)
                if (a != b) out.push_back({a, b, mg_.margin(a, b)});
        std::stable_sort(out.begin(), out.end(), [](const Match& x, const Match& y) {
            if (x.margin != y.margin) return x.margin > y.margin;
            if (x.first != y.first) return x.first < y.first;
            return x.second < y.second;
        });
        return out;
    }

private:
    const MarginGraph& mg_;
    SvOptions opt_;
    std::unordered_map<std::uint64_t, std::uint64_t> memo_;
};

void check_smith_cap(const MarginGraph& mg, CandidateSet active, const SvOptions& opt) {
    const int width = smith_set_in(mg, active).size();
    if (width > opt.smith_cap) throw SmithCapError(width, opt.smith_cap);
}

}  // namespace

std::vector<int> sv_winners_in(const MarginGraph& mg, CandidateSet active, const SvOptions& opt) {
    check_smith_cap(mg, active, opt);
    SvEngine engine(mg, opt);
    return engine.winners(active).members();
}

std::vector<int> sv_winners(const MarginGraph& mg, const SvOptions& opt) {
    return sv_winners_in(mg, CandidateSet::full(mg.n()), opt);
}

SvTrace sv_trace(const MarginGraph& mg, const SvOptions& opt) {
    const CandidateSet active = CandidateSet::full(mg.n());
    check_smith_cap(mg, active, opt);

    SvTrace trace;
    if (active.size() == 1) {
        trace.winners = {active.lowest()};
        return trace;
    }
    if (opt.condorcet_short_circuit) {
        if (auto cw = condorcet_winner_in(mg, active)) {
            trace.condorcet_winner = *cw;
            trace.winners = {*cw};
            return trace;
        }
    }

    SvEngine engine(mg, opt);

    // The trace lists every ordered match, not just the Smith-led ones, so
    // the printed explanation is complete. Matches led from outside the
    // Smith set never qualify before the decision level.
    auto matches = engine.build_matches(active, active);
    CandidateSet winners;
    size_t i = 0;
    while (i < matches.size() && winners.empty()) {
        const int level = matches[i].margin;
        for (; i < matches.size() && matches[i].margin == level; ++i) {
            SvTraceEntry entry;
            entry.match = matches[i];
            entry.examined = true;
            const CandidateSet sub = engine.winners(active.without(matches[i].second));
            entry.sub_winners = sub.members();
            if (sub.contains(matches[i].first)) {
                entry.verdict = SvVerdict::Qualified;
                winners.add(matches[i].first);
            } else {
                entry.verdict = SvVerdict::Failed;
            }
            trace.entries.push_back(std::move(entry));
        }
    }
    for (; i < matches.size(); ++i) {
        SvTraceEntry entry;
        entry.match = matches[i];
        entry.examined = false;
        entry.verdict = SvVerdict::Skipped;
        trace.entries.push_back(std::move(entry));
    }
    trace.winners = winners.members();
    return trace;
}

std::vector<int> winners_from_trace(const SvTrace& trace) {
    if (trace.condorcet_winner) return {*trace.condorcet_winner};
    CandidateSet winners;
    for (const auto& e : trace.entries)
        if (e.verdict == SvVerdict::Qualified) winners.add(e.match.first);
    if (winners.empty() && !trace.winners.empty()) return trace.winners;  // single candidate
    return winners.members();
}

std::vector<int> svs_winners(const MarginGraph& mg, const SvOptions& opt) {
    const CandidateSet smith = smith_set_in(mg, CandidateSet::full(mg.n()));
    auto restriction = restrict_graph(mg, smith);
    return map_ids(sv_winners(restriction.graph, opt), restriction.orig_ids);
}

std::vector<int> sv_weak_condorcet_variant(const MarginGraph& mg, const SvOptions& opt) {
    const CandidateSet active = CandidateSet::full(mg.n());
    const auto weak = weak_condorcet_winners(mg);
    if (weak.size() == 1) return weak;
    if (weak.empty()) return sv_winners(mg, opt);

    check_smith_cap(mg, active, opt);
    SvEngine engine(mg, opt);
    auto matches = engine.build_matches(active, CandidateSet::of(weak));
    CandidateSet winners;
    size_t i = 0;
    while (i < matches.size() && winners.empty()) {
        const int level = matches[i].margin;
        for (; i < matches.size() && matches[i].margin == level; ++i)
            if (engine.winners(active.without(matches[i].second)).contains(matches[i].first))
                winners.add(matches[i].first);
    }
    if (winners.empty())
        throw std::logic_error("weak-Condorcet variant found no qualifying match");
    return winners.members();
}

std::vector<int> three_candidate_oracle(const MarginGraph& mg) {
    if (mg.n() != 3) throw std::invalid_argument("three_candidate_oracle needs exactly 3 candidates");

    const auto undefeated = weak_condorcet_winners(mg);
    if (!undefeated.empty()) {
        int best = INT32_MIN;
        std::vector<int> max_margin(3, INT32_MIN);
        for (int a : undefeated) {
            for (int b = 0; b < 3; ++b)
                if (b != a) max_margin[static_cast<size_t>(a)] =
                    std::max(max_margin[static_cast<size_t>(a)], mg.margin(a, b));
            best = std::max(best, max_margin[static_cast<size_t>(a)]);
        }
        std::vector<int> out;
        for (int a : undefeated)
            if (max_margin[static_cast<size_t>(a)] == best) out.push_back(a);
        return out;
    }

    // No undefeated candidate in a 3-cycle: everyone has exactly one loss,
    // and the smallest loss wins.
    std::vector<int> loss(3, 0);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b && mg.margin(b, a) > 0) loss[static_cast<size_t>(a)] =
                std::max(loss[static_cast<size_t>(a)], mg.margin(b, a));
    const int smallest = *std::min_element(loss.begin(), loss.end());
    std::vector<int> out;
    for (int a = 0; a < 3; ++a)
        if (loss[static_cast<size_t>(a)] == smallest) out.push_back(a);
    return out;
}

namespace {

std::string join_names(const MarginGraph& mg, const std::vector<int>& ids) {
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) out += ids.size() == 2 && i == 1 ? " and " : ", ";
        out += mg.name_of(ids[static_cast<size_t>(i)]);
    }
    return out;
}

}  // namespace

std::string render_trace_text(const MarginGraph& mg, const SvTrace& trace) {
    std::ostringstream out;
    if (trace.condorcet_winner) {
        const std::string& w = mg.name_of(*trace.condorcet_winner);
        out << w << " beats every other candidate head-to-head. " << w << " is elected.\n";
        return out.str();
    }
    if (trace.entries.empty()) {
        if (trace.winners.size() == 1)
            out << mg.name_of(trace.winners[0]) << " is the only candidate. "
                << mg.name_of(trace.winners[0]) << " is elected.\n";
        return out.str();
    }
    int idx = 0;
    for (const auto& e : trace.entries) {
        ++idx;
        const std::string first = mg.name_of(e.match.first);
        const std::string second = mg.name_of(e.match.second);
        out << idx << ". " << first << " vs. " << second << ": margin of " << e.match.margin
            << ".";
        if (!e.examined) {
            out << " (not reached)\n";
            continue;
        }
        out << "\n   " << first;
        if (e.verdict == SvVerdict::Qualified) {
            out << " wins";
            // Name the lone opponent of a two-candidate sub-election.
            if (e.sub_winners.size() == 1 && mg.n() >= 2) {
                std::vector<int> others;
                for (int c = 0; c < mg.n(); ++c)
                    if (c != e.match.first && c != e.match.second) others.push_back(c);
                if (others.size() == 1) out << " (against " << mg.name_of(others[0]) << ")";
            }
            out << " after removing " << second << ". " << first << " is elected.\n";
        } else {
            out << " loses (to " << join_names(mg, e.sub_winners) << ") after removing " << second
                << ". Continue to next match:\n";
        }
    }
    return out.str();
}

}  // namespace stally
