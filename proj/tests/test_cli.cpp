#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "test_util.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Run the CLI and capture combined stdout/stderr.
RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(STALLY_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fixture(const std::string& name) { return testutil::fixture_path(name); }

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "stally_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("tabulate splits the added-loser graph across the three methods") {
    const auto r = run_cli("tabulate --input " + fixture("five_candidates_added_loser.json") +
                           " --method sv --method beat-path --method ranked-pairs");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("sv: A\n") != std::string::npos);
    CHECK(r.output.find("beat-path: B\n") != std::string::npos);
    CHECK(r.output.find("ranked-pairs: C\n") != std::string::npos);
}

TEST_CASE("tabulate on the ward cycle elects Dornan") {
    const auto r = run_cli("tabulate --input " + fixture("govan_cycle.json") + " --method sv");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("sv: Dornan\n") != std::string::npos);
    CHECK(r.output.find("Condorcet winner: none\n") != std::string::npos);
    CHECK(r.output.find("Smith set: Dornan, Flanagan, Hunter\n") != std::string::npos);
}

TEST_CASE("tabulate json output carries the documented fields") {
    const auto r = run_cli("tabulate --input " + fixture("burlington_2009.json") +
                           " --method sv --method minimax --format json");
    CHECK(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.output);
    CHECK(doc["format"] == "stable-tally/1");
    CHECK(doc["condorcet_winner"] == "Montroll");
    CHECK(doc["smith_set"] == nlohmann::json::array({"Montroll"}));
    REQUIRE(doc["results"].size() == 2);
    CHECK(doc["results"][0]["method"] == "sv");
    CHECK(doc["results"][0]["winners"] == nlohmann::json::array({"Montroll"}));
    CHECK(doc["results"][0]["is_tie"] == false);
}

TEST_CASE("tabulate reports ties explicitly") {
    const auto r = run_cli("tabulate --input " + fixture("symmetric_cycle_tiebreak.json") +
                           " --method sv --method svs");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("sv: A\n") != std::string::npos);
    CHECK(r.output.find("svs: A, B, C (tie)\n") != std::string::npos);
}

TEST_CASE("explain matches the golden ward trace byte for byte") {
    const auto r = run_cli("explain --input " + fixture("govan_cycle.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output == testutil::read_fixture("glasgow_trace_golden.txt"));
}

TEST_CASE("explain short-circuits on a condorcet winner") {
    const auto r = run_cli("explain --input " + fixture("burlington_2009.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output ==
          "Montroll beats every other candidate head-to-head. Montroll is elected.\n"
          "Winner: Montroll\n");
}

TEST_CASE("single-candidate input") {
    const auto dir = temp_dir();
    const auto solo = dir / "solo.json";
    std::ofstream(solo) << R"({"format":"stable-tally/1","type":"margin_graph",)"
                        << R"("candidates":["Solo"],"margins":[[0]]})";
    const auto r = run_cli("tabulate --input " + solo.string() + " --format json");
    CHECK(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.output);
    CHECK(doc["results"][0]["winners"] == nlohmann::json::array({"Solo"}));
    CHECK(doc["results"][0]["is_tie"] == false);
}

TEST_CASE("explain on the nested-cycles graph ends with A elected") {
    const auto r = run_cli("explain --input " + fixture("four_candidates_nested_cycles.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("A wins after removing B. A is elected.\n") != std::string::npos);
    CHECK(r.output.find("12. ") != std::string::npos);  // full match list shown
    CHECK(r.output.find("Winner: A\n") != std::string::npos);
    // Four examined entries, everything after is visibly skipped.
    CHECK(r.output.find("5. B vs. C: margin of 4. (not reached)") != std::string::npos);
}

TEST_CASE("explain rejects non-sv methods") {
    const auto r = run_cli("explain --input " + fixture("govan_cycle.json") + " --method minimax");
    CHECK(r.exit_code == 2);
}

TEST_CASE("tabulate on the full synthetic ward file") {
    const auto r = run_cli("tabulate --input " + fixture("govan_2007_synthetic.toc") +
                           " --method sv --method irv --method runoff --method plurality");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("sv: Dornan\n") != std::string::npos);
    CHECK(r.output.find("irv: Hunter\n") != std::string::npos);
    CHECK(r.output.find("runoff: Flanagan\n") != std::string::npos);
    CHECK(r.output.find("plurality: Hunter\n") != std::string::npos);
    CHECK(r.output.find("Smith set: Dornan, Flanagan, Hunter\n") != std::string::npos);
}

TEST_CASE("distinct exit codes for the failure classes") {
    CHECK(run_cli("tabulate --input /no/such/file.json").exit_code == 2);

    const auto bad = temp_dir() / "garbage.json";
    std::ofstream(bad) << "{\"format\": \"stable-tally/1\"}";
    CHECK(run_cli("tabulate --input " + bad.string()).exit_code == 2);

    // Ballot method on a margin-graph input.
    CHECK(run_cli("tabulate --input " + fixture("govan_cycle.json") + " --method irv").exit_code ==
          3);

    // Smith set wider than the cap.
    CHECK(run_cli("tabulate --input " + fixture("govan_cycle.json") +
                  " --method sv --smith-cap 2")
              .exit_code == 4);

    // Ranked-pairs tie-break enumeration over the cap.
    CHECK(run_cli("tabulate --input " + fixture("symmetric_cycle_tiebreak.json") +
                  " --method ranked-pairs --rp-cap 10")
              .exit_code == 5);
}

TEST_CASE("check audits stability on the added-loser graph") {
    const auto sv = run_cli("check --input " + fixture("five_candidates_added_loser.json") +
                            " --method sv");
    CHECK(sv.exit_code == 0);
    CHECK(sv.output.find("FAIL") == std::string::npos);

    const auto bp = run_cli("check --input " + fixture("five_candidates_added_loser.json") +
                            " --method beat-path --method ranked-pairs");
    CHECK(bp.exit_code == 0);
    // Both comparison methods flunk stability-with-tiebreaking here.
    size_t fails = 0;
    size_t pos = 0;
    while ((pos = bp.output.find("stability-with-tiebreaking", pos)) != std::string::npos) {
        const size_t eol = bp.output.find('\n', pos);
        if (bp.output.substr(pos, eol - pos).find("FAIL") != std::string::npos) ++fails;
        pos = eol;
    }
    CHECK(fails == 2);
}

TEST_CASE("check shows the smith-restriction diff on the symmetric cycle") {
    const auto r = run_cli("check --input " + fixture("symmetric_cycle_tiebreak.json") +
                           " --method sv");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("not uniquely weighted") != std::string::npos);
    CHECK(r.output.find("{A}") != std::string::npos);
    CHECK(r.output.find("{A, B, C}") != std::string::npos);
}

TEST_CASE("simulate writes deterministic csv and json") {
    const auto dir = temp_dir();
    const std::string out1 = (dir / "tie1").string();
    const std::string out2 = (dir / "tie2").string();
    const std::string args = "simulate --experiment tie --candidates 3 --voters 4 --samples 30"
                             " --seed December --out ";
    // Seeds are numeric; a word should be rejected by the parser.
    CHECK(run_cli(args + out1).exit_code == 2);

    const std::string good = "simulate --experiment tie --candidates 3 --voters 4 --samples 30"
                             " --seed 21 --out ";
    CHECK(run_cli(good + out1).exit_code == 0);
    CHECK(run_cli(good + out2).exit_code == 0);
    CHECK(slurp(out1 + ".csv") == slurp(out2 + ".csv"));
    CHECK(slurp(out1 + ".json") == slurp(out2 + ".json"));
    CHECK(slurp(out1 + ".csv").find("method,candidates,voters,samples,hits,rate") == 0);
}

TEST_CASE("simulate exhaustive mode reproduces the exact tiny-scale tie rate") {
    const auto dir = temp_dir();
    const std::string out = (dir / "exact").string();
    const auto r = run_cli("simulate --experiment tie --exhaustive --candidates 3 --voters 3"
                           " --method sv --seed 0 --out " +
                           out);
    CHECK(r.exit_code == 0);
    CHECK(slurp(out + ".csv").find("sv,3,3,216,12,") != std::string::npos);
}

TEST_CASE("simulate rejects bad grids") {
    CHECK(run_cli("simulate --experiment tie --candidates 0 --voters 4 --samples 5 --seed 1"
                  " --out /tmp/x")
              .exit_code == 2);
    CHECK(run_cli("simulate --experiment tie --exhaustive --candidates 6 --voters 20 --seed 1"
                  " --out /tmp/x")
              .exit_code == 2);
    CHECK(run_cli("simulate --experiment monotonicity --candidates 3 4 --voters 5 --samples 5"
                  " --seed 1 --out /tmp/x")
              .exit_code == 2);
}

TEST_CASE("convert round-trips between the formats") {
    const auto dir = temp_dir();
    const auto as_json = dir / "ward.json";
    const auto back_toc = dir / "ward.toc";
    const auto as_margin = dir / "ward_margins.json";

    CHECK(run_cli("convert --input " + fixture("govan_2007_synthetic.toc") + " --output " +
                  as_json.string())
              .exit_code == 0);
    CHECK(run_cli("convert --input " + as_json.string() + " --output " + back_toc.string())
              .exit_code == 0);

    // Margins survive the full round trip.
    const auto direct = run_cli("tabulate --input " + fixture("govan_2007_synthetic.toc") +
                                " --format json");
    const auto round = run_cli("tabulate --input " + back_toc.string() + " --format json");
    CHECK(nlohmann::json::parse(direct.output)["smith_set"] ==
          nlohmann::json::parse(round.output)["smith_set"]);
    CHECK(nlohmann::json::parse(direct.output)["results"] ==
          nlohmann::json::parse(round.output)["results"]);

    // Ballot data to margin graph is allowed but flagged as lossy.
    const auto lossy = run_cli("convert --input " + as_json.string() + " --to margin-json" +
                               " --output " + as_margin.string());
    CHECK(lossy.exit_code == 0);
    CHECK(lossy.output.find("lossy") != std::string::npos);

    // And there is no way back from margins to ballots.
    CHECK(run_cli("convert --input " + as_margin.string() + " --to profile-json --output " +
                  (dir / "nope.json").string())
              .exit_code == 2);

    // Identity conversion is byte-stable.
    const auto id1 = dir / "id1.json";
    const auto id2 = dir / "id2.json";
    CHECK(run_cli("convert --input " + as_json.string() + " --output " + id1.string())
              .exit_code == 0);
    CHECK(run_cli("convert --input " + id1.string() + " --output " + id2.string()).exit_code ==
          0);
    CHECK(slurp(id1) == slurp(id2));
}
