#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <map>
#include <random>

#include "json.hpp"
#include "stally/io.hpp"
#include "stally/simulation.hpp"
#include "stally/stable_voting.hpp"
#include "stally/tournament.hpp"
#include "test_util.hpp"

using namespace stally;
using namespace testutil;

namespace {

bool same_rows(const ExperimentResult& a, const ExperimentResult& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        if (x.method != y.method || x.candidates != y.candidates || x.voters != y.voters ||
            x.samples != y.samples || x.hits != y.hits)
            return false;
    }
    return true;
}

std::vector<std::vector<int>> all_orders(int n) {
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    std::vector<std::vector<int>> orders;
    do {
        orders.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return orders;
}

// Exact three-candidate tie count, computed without the engine: margins by
// direct pair counting, winners by the closed three-candidate form.
long brute_force_tie_count(int voters) {
    const auto orders = all_orders(3);
    long ties = 0;
    std::vector<size_t> pick(static_cast<size_t>(voters), 0);
    while (true) {
        std::array<std::array<int, 3>, 3> m{};
        for (size_t v = 0; v < pick.size(); ++v) {
            const auto& order = orders[pick[v]];
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    ++m[static_cast<size_t>(order[static_cast<size_t>(i)])]
                       [static_cast<size_t>(order[static_cast<size_t>(j)])];
                    --m[static_cast<size_t>(order[static_cast<size_t>(j)])]
                       [static_cast<size_t>(order[static_cast<size_t>(i)])];
                }
        }
        MarginGraph mg = MarginGraph::zero(letter_names(3));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                mg.margin_ref(a, b) = m[static_cast<size_t>(a)][static_cast<size_t>(b)];
        if (three_candidate_oracle(mg).size() >= 2) ++ties;

        size_t i = 0;
        while (i < pick.size() && pick[i] == orders.size() - 1) pick[i++] = 0;
        if (i == pick.size()) break;
        ++pick[i];
    }
    return ties;
}

}  // namespace

TEST_CASE("sampler is deterministic per (seed, index)") {
    const SamplerSpec spec{4, 9, 42, CultureModel::ImpartialCulture};
    const Profile a = sample_linear_profile(spec, 7);
    const Profile b = sample_linear_profile(spec, 7);
    REQUIRE(a.ballots.size() == b.ballots.size());
    for (size_t i = 0; i < a.ballots.size(); ++i) CHECK(a.ballots[i].tiers == b.ballots[i].tiers);

    const Profile c = sample_linear_profile(spec, 8);
    bool all_same = true;
    for (size_t i = 0; i < a.ballots.size(); ++i)
        if (a.ballots[i].tiers != c.ballots[i].tiers) all_same = false;
    CHECK(!all_same);
}

TEST_CASE("single-candidate sampling gives the only possible ballot") {
    const SamplerSpec spec{1, 5, 9, CultureModel::ImpartialCulture};
    const Profile p = sample_linear_profile(spec, 0);
    for (const auto& b : p.ballots) CHECK(b.tiers == std::vector<std::vector<int>>{{0}});
}

TEST_CASE("sampled linear orders are roughly uniform") {
    const SamplerSpec spec{3, 6000, 1234, CultureModel::ImpartialCulture};
    const Profile p = sample_linear_profile(spec, 0);
    std::map<std::vector<std::vector<int>>, long> freq;
    for (const auto& b : p.ballots) freq[b.tiers] += b.count;
    CHECK(freq.size() == 6);
    const double expected = 6000.0 / 6.0;
    const double sigma = std::sqrt(6000.0 * (1.0 / 6.0) * (5.0 / 6.0));
    for (const auto& [order, count] : freq)
        CHECK(std::abs(static_cast<double>(count) - expected) <= 3.0 * sigma);
}

TEST_CASE("lift moves a candidate one position up") {
    const Profile p = linear_profile(3, {{{1, 0, 2}, 1}});  // B > A > C
    const Profile lifted = lift_one_position(p, {0, 0}, 0);
    CHECK(lifted.ballots[0].tiers == std::vector<std::vector<int>>{{0}, {1}, {2}});

    // Lifting the displaced candidate back restores the profile.
    const Profile restored = lift_one_position(lifted, {0, 0}, 1);
    CHECK(restored.ballots[0].tiers == p.ballots[0].tiers);

    CHECK_THROWS_AS(lift_one_position(p, {0, 0}, 1), std::invalid_argument);  // already top
    CHECK_THROWS_AS(lift_one_position(p, {5, 0}, 0), std::invalid_argument);
}

TEST_CASE("lift shifts exactly one margin pair by two") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const Profile p = random_linear_profile(rng, n, 7);
        const int ballot = static_cast<int>(rng() % p.ballots.size());
        // Pick any non-top candidate on that ballot.
        const auto& tiers = p.ballots[static_cast<size_t>(ballot)].tiers;
        const size_t pos = 1 + rng() % (tiers.size() - 1);
        const int a = tiers[pos][0];
        const int displaced = tiers[pos - 1][0];

        const MarginGraph before = margin_graph(p);
        const MarginGraph after = margin_graph(lift_one_position(p, {ballot, 0}, a));
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                const int delta = after.margin(x, y) - before.margin(x, y);
                if (x == a && y == displaced)
                    CHECK(delta == 2);
                else if (x == displaced && y == a)
                    CHECK(delta == -2);
                else
                    CHECK(delta == 0);
            }
    }
}

TEST_CASE("lift splits multi-copy ballots") {
    const Profile p = linear_profile(3, {{{1, 0, 2}, 4}});
    const Profile lifted = lift_one_position(p, {0, 2}, 0);
    CHECK(lifted.total_voters() == 4);
    REQUIRE(lifted.ballots.size() == 2);
    CHECK(lifted.ballots[0].count == 3);
    CHECK(lifted.ballots[1].count == 1);
    CHECK(lifted.ballots[1].tiers == std::vector<std::vector<int>>{{0}, {1}, {2}});
}

TEST_CASE("tie rates are zero with a single candidate") {
    const auto result = tie_rate_experiment(
        {MethodId::StableVoting, MethodId::IrvPut, MethodId::BeatPath}, {1}, {2}, 50, 7);
    for (const auto& row : result.rows) {
        CHECK(row.hits == 0);
        CHECK(row.rate == 0.0);
    }
}

TEST_CASE("exhaustive tie rates match the independent enumeration") {
    const auto result = tie_rate_exhaustive({MethodId::StableVoting}, {3}, {2, 3});
    REQUIRE(result.rows.size() == 2);

    CHECK(result.rows[0].samples == 36);
    CHECK(result.rows[0].hits == brute_force_tie_count(2));
    CHECK(result.rows[1].samples == 216);
    CHECK(result.rows[1].hits == brute_force_tie_count(3));
    // With three voters the only ties are the twelve Condorcet-cycle
    // profiles, all of which tie three ways.
    CHECK(result.rows[1].hits == 12);

    CHECK_THROWS_AS(tie_rate_exhaustive({MethodId::StableVoting}, {5}, {10}),
                    std::invalid_argument);
}

TEST_CASE("experiment streams are deterministic and parallel-independent") {
    const std::vector<MethodId> methods{MethodId::StableVoting, MethodId::IrvPut};
    SimOptions serial;
    serial.threads = 1;
    SimOptions parallel;
    parallel.threads = 4;

    const auto a = tie_rate_experiment(methods, {3, 4}, {4}, 40, 99, serial);
    const auto b = tie_rate_experiment(methods, {3, 4}, {4}, 40, 99, parallel);
    CHECK(same_rows(a, b));

    const auto m1 = monotonicity_experiment(methods, 4, {5}, 60, 3, serial);
    const auto m2 = monotonicity_experiment(methods, 4, {5}, 60, 3, parallel);
    CHECK(same_rows(m1, m2));
}

TEST_CASE("hit counts are monotone in the sample count under one seed") {
    const std::vector<MethodId> methods{MethodId::IrvPut};
    const auto small = monotonicity_experiment(methods, 4, {7}, 40, 11);
    const auto large = monotonicity_experiment(methods, 4, {7}, 80, 11);
    CHECK(small.rows[0].hits <= large.rows[0].hits);

    const auto t_small = tie_rate_experiment(methods, {4}, {6}, 50, 11);
    const auto t_large = tie_rate_experiment(methods, {4}, {6}, 100, 11);
    CHECK(t_small.rows[0].hits <= t_large.rows[0].hits);
}

TEST_CASE("two-candidate monotonicity violations never happen") {
    const auto result =
        monotonicity_experiment({MethodId::StableVoting, MethodId::IrvPut, MethodId::SmithIrv},
                                2, {3, 8}, 100, 5);
    for (const auto& row : result.rows) CHECK(row.hits == 0);
}

TEST_CASE("criterion audit on the added-loser graph") {
    const MarginGraph mg = added_loser_graph();

    auto status_of = [](const std::vector<CriterionVerdict>& vs, const std::string& name) {
        for (const auto& v : vs)
            if (v.criterion == name) return v.status;
        FAIL("missing criterion");
        return CriterionStatus::Fail;
    };

    const auto sv = check_criteria_graph(mg, MethodId::StableVoting);
    for (const auto& v : sv) CHECK(v.status != CriterionStatus::Fail);

    const auto bp = check_criteria_graph(mg, MethodId::BeatPath);
    CHECK(status_of(bp, "stability-with-tiebreaking") == CriterionStatus::Fail);

    const auto rp = check_criteria_graph(mg, MethodId::RankedPairs);
    CHECK(status_of(rp, "stability-with-tiebreaking") == CriterionStatus::Fail);
}

TEST_CASE("isda audit on the symmetric-cycle graph is flagged, with the diff") {
    const auto verdicts = check_criteria_graph(symmetric_cycle_graph(), MethodId::StableVoting);
    bool found = false;
    for (const auto& v : verdicts) {
        if (v.criterion != "isda") continue;
        found = true;
        CHECK(v.status == CriterionStatus::NotApplicable);
        CHECK(v.details.find("not uniquely weighted") != std::string::npos);
        CHECK(v.details.find("{A}") != std::string::npos);
        CHECK(v.details.find("{A, B, C}") != std::string::npos);
    }
    CHECK(found);
}

TEST_CASE("every method passes every criterion on a two-candidate profile") {
    const Profile p = linear_profile(2, {{{0, 1}, 3}, {{1, 0}, 1}});
    for (MethodId id : all_methods()) {
        for (const auto& v : check_criteria(p, id)) CHECK(v.status != CriterionStatus::Fail);
    }
}

TEST_CASE("sv criterion audits stay clean on random profiles") {
    std::mt19937_64 rng(1212);
    for (int trial = 0; trial < 40; ++trial) {
        const Profile p = random_linear_profile(rng, 3 + static_cast<int>(rng() % 3),
                                                3 + static_cast<int>(rng() % 8));
        for (const auto& v : check_criteria(p, MethodId::StableVoting))
            CHECK(v.status != CriterionStatus::Fail);
    }
}

TEST_CASE("regression: a concrete stable-voting monotonicity violation") {
    // Found by random search; lifting A one position on one ballot knocks A
    // out of the winner set.
    const auto doc = nlohmann::json::parse(read_fixture("sv_monotonicity_violation.json"));
    const Profile p = parse_profile_json(doc["profile"].dump());
    REQUIRE(doc["method"] == "sv");

    const MarginGraph before = margin_graph(p);
    const auto winners = sv_winners(before);
    std::vector<std::string> names_before;
    for (int w : winners) names_before.push_back(before.name_of(w));
    CHECK(names_before == doc["winners_before"].get<std::vector<std::string>>());

    int lifted_id = -1;
    for (const auto& c : p.roster)
        if (c.name == doc["candidate"].get<std::string>()) lifted_id = c.id;
    REQUIRE(lifted_id >= 0);
    CHECK(std::binary_search(winners.begin(), winners.end(), lifted_id));

    const Profile lifted =
        lift_one_position(p, {doc["ballot"].get<int>(), doc["copy"].get<int>()}, lifted_id);
    const MarginGraph after_graph = margin_graph(lifted);
    const auto after = sv_winners(after_graph);
    std::vector<std::string> names_after;
    for (int w : after) names_after.push_back(after_graph.name_of(w));
    CHECK(names_after == doc["winners_after"].get<std::vector<std::string>>());
    CHECK(!std::binary_search(after.begin(), after.end(), lifted_id));

    // Same verdict from the unrestricted evaluator.
    CHECK(sv_winners(before, SvOptions::naive()) == winners);
    CHECK(sv_winners(after_graph, SvOptions::naive()) == after);

    CHECK(has_monotonicity_violation(p, MethodId::StableVoting));
}

TEST_CASE("experiment serialization") {
    const auto result = tie_rate_experiment({MethodId::StableVoting}, {3}, {4}, 20, 17);
    const std::string csv = write_experiment_csv(result);
    CHECK(csv.find("method,candidates,voters,samples,hits,rate\n") == 0);
    CHECK(csv.find("sv,3,4,40,") != std::string::npos);

    const std::string json = write_experiment_json(result);
    CHECK(json.find("\"stable-tally/1\"") != std::string::npos);
    CHECK(json.find("\"seed\": 17") != std::string::npos);
}
