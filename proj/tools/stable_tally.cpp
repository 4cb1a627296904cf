// stable-tally: ranked-ballot tabulation, explanation, simulation, and
// format conversion around Stable Voting and the usual Condorcet methods.
//
// Exit codes: 0 success; 2 unreadable/invalid input or grid; 3 method/input
// mismatch; 4 Smith-set width cap exceeded; 5 ranked-pairs tie-break cap
// exceeded; 1 anything unexpected.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stally/core.hpp"
#include "stally/io.hpp"
#include "stally/methods.hpp"
#include "stally/simulation.hpp"
#include "stally/stable_voting.hpp"
#include "stally/tournament.hpp"

namespace {

using nlohmann::ordered_json;
using namespace stally;

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitMethodMismatch = 3;
constexpr int kExitSmithCap = 4;
constexpr int kExitRankedPairsCap = 5;

struct Input {
    std::optional<Profile> profile;
    MarginGraph graph;
    std::string path;

    bool has_ballots() const { return profile.has_value(); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::optional<PreflibKind> preflib_kind_for(const std::string& ext) {
    if (ext == ".soc") return PreflibKind::Soc;
    if (ext == ".toc") return PreflibKind::Toc;
    if (ext == ".toi") return PreflibKind::Toi;
    return std::nullopt;
}

Input load_input(const std::string& path) {
    Input input;
    input.path = path;
    const std::string text = read_file(path);
    const std::string ext = std::filesystem::path(path).extension().string();

    if (const auto kind = preflib_kind_for(ext)) {
        input.profile = parse_preflib(text, *kind);
        input.graph = margin_graph(*input.profile);
        return input;
    }

    // JSON documents carry their own type tag.
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("type"))
        throw ParseError(0, path, "unrecognized input (want .soc/.toc/.toi or a stable-tally JSON file)");
    if (doc["type"] == "profile") {
        input.profile = parse_profile_json(text);
        input.graph = margin_graph(*input.profile);
    } else if (doc["type"] == "margin_graph") {
        input.graph = parse_margin_graph(text);
    } else {
        throw ParseError(0, "type", "unknown document type");
    }
    return input;
}

std::vector<MethodId> parse_methods(const std::vector<std::string>& names) {
    std::vector<MethodId> out;
    for (const auto& name : names) {
        const auto id = method_from_name(name);
        if (!id) throw ParseError(0, "--method", "unknown method '" + name + "'");
        out.push_back(*id);
    }
    return out;
}

std::string join_names(const MarginGraph& mg, const std::vector<int>& ids,
                       const char* separator = ", ") {
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) out += separator;
        out += mg.name_of(ids[i]);
    }
    return out;
}

ordered_json names_json(const MarginGraph& mg, const std::vector<int>& ids) {
    ordered_json arr = ordered_json::array();
    for (int id : ids) arr.push_back(mg.name_of(id));
    return arr;
}

struct CommonOpts {
    std::string input_path;
    std::vector<std::string> method_names;
    std::string format = "text";
    int smith_cap = SvOptions{}.smith_cap;
    long rp_cap = RankedPairsOptions{}.max_orders;

    EvalOptions eval() const {
        EvalOptions opt;
        opt.sv.smith_cap = smith_cap;
        opt.rp.max_orders = rp_cap;
        return opt;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts, const char* default_method) {
    cmd->add_option("--input", opts.input_path, "election file (.soc/.toc/.toi or JSON)")
        ->required();
    opts.method_names = {default_method};
    cmd->add_option("--method", opts.method_names,
                    "voting method (repeatable); see README for names");
    cmd->add_option("--format", opts.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--smith-cap", opts.smith_cap, "abort when the Smith set is wider than this");
    cmd->add_option("--rp-cap", opts.rp_cap, "ranked-pairs tie-break order cap");
}

int cmd_tabulate(const CommonOpts& opts) {
    const Input input = load_input(opts.input_path);
    const auto methods = parse_methods(opts.method_names);
    const EvalOptions eval = opts.eval();

    ordered_json results = ordered_json::array();
    std::ostringstream text;
    for (MethodId id : methods) {
        std::vector<int> winners;
        if (input.has_ballots())
            winners = evaluate_method(id, *input.profile, eval);
        else
            winners = evaluate_method_on_graph(id, input.graph, eval);
        const bool is_tie = winners.size() >= 2;
        text << method_name(id) << ": " << join_names(input.graph, winners)
             << (is_tie ? " (tie)" : "") << "\n";
        results.push_back({{"method", method_name(id)},
                           {"winners", names_json(input.graph, winners)},
                           {"is_tie", is_tie}});
    }

    const auto cw = condorcet_winner(input.graph);
    const auto smith = smith_set(input.graph);
    text << "Condorcet winner: " << (cw ? input.graph.name_of(*cw) : std::string("none")) << "\n";
    text << "Smith set: " << join_names(input.graph, smith) << "\n";

    if (opts.format == "json") {
        ordered_json doc;
        doc["format"] = "stable-tally/1";
        doc["type"] = "tabulation";
        doc["input"] = opts.input_path;
        doc["results"] = std::move(results);
        doc["condorcet_winner"] = cw ? ordered_json(input.graph.name_of(*cw)) : ordered_json(nullptr);
        doc["smith_set"] = names_json(input.graph, smith);
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << text.str();
    }
    return kExitOk;
}

int cmd_explain(const CommonOpts& opts) {
    const Input input = load_input(opts.input_path);
    const auto methods = parse_methods(opts.method_names);
    if (methods.size() != 1 ||
        (methods[0] != MethodId::StableVoting && methods[0] != MethodId::Svs))
        throw ParseError(0, "--method", "explain supports the sv and svs methods");
    const EvalOptions eval = opts.eval();

    MarginGraph graph = input.graph;
    if (methods[0] == MethodId::Svs) {
        const auto smith = smith_set_in(graph, CandidateSet::full(graph.n()));
        graph = restrict_graph(graph, smith).graph;
    }
    const SvTrace trace = sv_trace(graph, eval.sv);

    if (opts.format == "json") {
        ordered_json doc;
        doc["format"] = "stable-tally/1";
        doc["type"] = "sv_trace";
        doc["method"] = method_name(methods[0]);
        doc["winners"] = names_json(graph, trace.winners);
        doc["is_tie"] = trace.winners.size() >= 2;
        doc["condorcet_winner"] = trace.condorcet_winner
                                      ? ordered_json(graph.name_of(*trace.condorcet_winner))
                                      : ordered_json(nullptr);
        ordered_json entries = ordered_json::array();
        for (const auto& e : trace.entries) {
            ordered_json item;
            item["first"] = graph.name_of(e.match.first);
            item["second"] = graph.name_of(e.match.second);
            item["margin"] = e.match.margin;
            item["examined"] = e.examined;
            item["verdict"] = e.verdict == SvVerdict::Qualified  ? "qualified"
                              : e.verdict == SvVerdict::Failed   ? "failed"
                                                                 : "skipped";
            if (e.examined) item["sub_winners"] = names_json(graph, e.sub_winners);
            entries.push_back(std::move(item));
        }
        doc["entries"] = std::move(entries);
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << render_trace_text(graph, trace);
        if (trace.winners.size() == 1)
            std::cout << "Winner: " << graph.name_of(trace.winners[0]) << "\n";
        else
            std::cout << "Winners (tie): " << join_names(graph, trace.winners) << "\n";
    }
    return kExitOk;
}

int cmd_check(const CommonOpts& opts) {
    const Input input = load_input(opts.input_path);
    const auto methods = parse_methods(opts.method_names);
    const EvalOptions eval = opts.eval();

    ordered_json audits = ordered_json::array();
    std::ostringstream text;
    for (MethodId id : methods) {
        std::vector<CriterionVerdict> verdicts;
        if (input.has_ballots())
            verdicts = check_criteria(*input.profile, id, eval);
        else
            verdicts = check_criteria_graph(input.graph, id, eval);

        text << "method: " << method_name(id) << "\n";
        ordered_json rows = ordered_json::array();
        for (const auto& v : verdicts) {
            const char* status = v.status == CriterionStatus::Pass   ? "PASS"
                                 : v.status == CriterionStatus::Fail ? "FAIL"
                                                                     : "N/A";
            text << "  " << v.criterion;
            for (size_t pad = v.criterion.size(); pad < 28; ++pad) text << ' ';
            text << status << "  " << v.details << "\n";
            rows.push_back({{"criterion", v.criterion},
                            {"status", status},
                            {"details", v.details}});
        }
        audits.push_back({{"method", method_name(id)}, {"criteria", std::move(rows)}});
    }

    if (opts.format == "json") {
        ordered_json doc;
        doc["format"] = "stable-tally/1";
        doc["type"] = "criterion_audit";
        doc["input"] = opts.input_path;
        doc["audits"] = std::move(audits);
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << text.str();
    }
    return kExitOk;
}

struct SimulateOpts {
    std::string experiment = "tie";
    std::vector<std::string> method_names;
    std::vector<int> candidates;
    std::vector<int> voters;
    long samples = 1000;
    std::uint64_t seed = 0;
    bool exhaustive = false;
    int threads = 0;
    std::string out_prefix = "experiment";
    int smith_cap = SvOptions{}.smith_cap;
    long rp_cap = RankedPairsOptions{}.max_orders;
};

int cmd_simulate(const SimulateOpts& opts) {
    if (opts.candidates.empty() || opts.voters.empty())
        throw ParseError(0, "--candidates/--voters", "experiment grid must be non-empty");
    for (int n : opts.candidates)
        if (n < 1) throw ParseError(0, "--candidates", "candidate counts must be positive");
    for (int v : opts.voters)
        if (v < 1) throw ParseError(0, "--voters", "voter counts must be positive");

    SimOptions sim;
    sim.threads = opts.threads;
    sim.eval.sv.smith_cap = opts.smith_cap;
    sim.eval.rp.max_orders = opts.rp_cap;

    std::vector<MethodId> methods;
    if (!opts.method_names.empty()) {
        methods = parse_methods(opts.method_names);
    } else if (opts.experiment == "tie") {
        methods = {MethodId::StableVoting, MethodId::IrvPut, MethodId::BeatPath};
    } else {
        methods = {MethodId::IrvPut, MethodId::SmithIrv, MethodId::StableVoting};
    }

    ExperimentResult result;
    if (opts.experiment == "tie") {
        if (opts.exhaustive) {
            try {
                result = tie_rate_exhaustive(methods, opts.candidates, opts.voters, sim);
            } catch (const std::invalid_argument& e) {
                throw ParseError(0, "--exhaustive", e.what());
            }
        } else {
            if (opts.samples < 1) throw ParseError(0, "--samples", "need at least one sample");
            result = tie_rate_experiment(methods, opts.candidates, opts.voters, opts.samples,
                                         opts.seed, sim);
        }
    } else if (opts.experiment == "monotonicity") {
        if (opts.samples < 1) throw ParseError(0, "--samples", "need at least one sample");
        if (opts.candidates.size() != 1)
            throw ParseError(0, "--candidates",
                             "monotonicity experiment runs one candidate count at a time");
        result = monotonicity_experiment(methods, opts.candidates[0], opts.voters, opts.samples,
                                         opts.seed, sim);
    } else {
        throw ParseError(0, "--experiment", "unknown experiment '" + opts.experiment + "'");
    }

    const std::string csv_path = opts.out_prefix + ".csv";
    const std::string json_path = opts.out_prefix + ".json";
    std::ofstream(csv_path) << write_experiment_csv(result);
    std::ofstream(json_path) << write_experiment_json(result);
    std::cout << "wrote " << csv_path << " and " << json_path << "\n";
    return kExitOk;
}

struct ConvertOpts {
    std::string input_path;
    std::string output_path;
    std::string to;  // preflib | profile-json | margin-json | (infer)
};

int cmd_convert(const ConvertOpts& opts) {
    const Input input = load_input(opts.input_path);

    std::string target = opts.to;
    if (target.empty()) {
        const std::string ext = std::filesystem::path(opts.output_path).extension().string();
        if (preflib_kind_for(ext))
            target = "preflib";
        else if (ext == ".json")
            target = input.has_ballots() ? "profile-json" : "margin-json";
        else
            throw ParseError(0, "--output", "cannot infer target format from '" + ext + "'");
    }

    std::string payload;
    if (target == "preflib") {
        if (!input.has_ballots())
            throw ParseError(0, "--to", "margin graphs cannot be converted back to ballots");
        payload = write_preflib(*input.profile);
    } else if (target == "profile-json") {
        if (!input.has_ballots())
            throw ParseError(0, "--to", "margin graphs cannot be converted back to ballots");
        payload = write_profile_json(*input.profile);
    } else if (target == "margin-json") {
        if (input.has_ballots())
            std::cerr << "note: converting ballots to a margin graph is lossy\n";
        payload = write_margin_graph(input.graph);
    } else {
        throw ParseError(0, "--to", "unknown target format '" + target + "'");
    }

    std::ofstream out(opts.output_path, std::ios::binary);
    if (!out) throw ParseError(0, opts.output_path, "cannot open output file");
    out << payload;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stable-tally: ranked-ballot tabulation with Stable Voting"};
    app.require_subcommand(1);

    CommonOpts tab_opts;
    auto* tab = app.add_subcommand("tabulate", "compute winners for one or more methods");
    add_common(tab, tab_opts, "sv");

    CommonOpts explain_opts;
    auto* explain = app.add_subcommand("explain", "show the Stable Voting match-by-match trace");
    add_common(explain, explain_opts, "sv");

    CommonOpts check_opts;
    auto* check = app.add_subcommand("check", "audit voting criteria on the given election");
    add_common(check, check_opts, "sv");

    SimulateOpts sim_opts;
    auto* sim = app.add_subcommand("simulate", "run sampling experiments");
    sim->add_option("--experiment", sim_opts.experiment, "tie or monotonicity")
        ->check(CLI::IsMember({"tie", "monotonicity"}));
    sim->add_option("--method", sim_opts.method_names, "methods to evaluate (repeatable)");
    sim->add_option("--candidates", sim_opts.candidates, "candidate counts")->required();
    sim->add_option("--voters", sim_opts.voters, "voter counts")->required();
    sim->add_option("--samples", sim_opts.samples, "samples per parity (tie) or per point");
    sim->add_option("--seed", sim_opts.seed, "RNG seed")->required();
    sim->add_flag("--exhaustive", sim_opts.exhaustive, "enumerate all profiles instead of sampling");
    sim->add_option("--threads", sim_opts.threads, "worker threads (0 = auto)");
    sim->add_option("--out", sim_opts.out_prefix, "output file prefix");
    sim->add_option("--smith-cap", sim_opts.smith_cap, "Smith set width cap");
    sim->add_option("--rp-cap", sim_opts.rp_cap, "ranked-pairs tie-break order cap");

    ConvertOpts conv_opts;
    auto* conv = app.add_subcommand("convert", "convert between election file formats");
    conv->add_option("--input", conv_opts.input_path, "input file")->required();
    conv->add_option("--output", conv_opts.output_path, "output file")->required();
    conv->add_option("--to", conv_opts.to, "preflib, profile-json, or margin-json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitBadInput;
    }

    try {
        if (tab->parsed()) return cmd_tabulate(tab_opts);
        if (explain->parsed()) return cmd_explain(explain_opts);
        if (check->parsed()) return cmd_check(check_opts);
        if (sim->parsed()) return cmd_simulate(sim_opts);
        if (conv->parsed()) return cmd_convert(conv_opts);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const MethodNeedsBallotsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMethodMismatch;
    } catch (const SmithCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSmithCap;
    } catch (const RankedPairsCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRankedPairsCap;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitUnexpected;
    }
    return kExitUnexpected;
}
