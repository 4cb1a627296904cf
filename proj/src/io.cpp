#include "stally/io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"

namespace stally {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
    return lines;
}

long parse_long(const std::string& tok, int line, const char* what) {
    try {
        size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "", std::string("expected ") + what + ", got '" + tok + "'");
    }
}

// "r1,r2,{r3,r4},r5" -> tiers of 1-based candidate numbers.
std::vector<std::vector<int>> parse_ranking(const std::string& text, int line) {
    std::vector<std::vector<int>> tiers;
    std::string tok;
    bool in_braces = false;
    std::vector<int> brace_tier;

    auto flush = [&](bool tied) {
        const std::string t = trim(tok);
        tok.clear();
        if (t.empty()) throw ParseError(line, "", "empty entry in ranking");
        const int cand = static_cast<int>(parse_long(t, line, "candidate number"));
        if (tied)
            brace_tier.push_back(cand);
        else
            tiers.push_back({cand});
    };

    for (char ch : text) {
        if (ch == '{') {
            if (in_braces) throw ParseError(line, "", "nested '{' in ranking");
            if (!trim(tok).empty()) throw ParseError(line, "", "unexpected '{' in ranking");
            tok.clear();
            in_braces = true;
        } else if (ch == '}') {
            if (!in_braces) throw ParseError(line, "", "unmatched '}' in ranking");
            flush(true);
            if (brace_tier.empty()) throw ParseError(line, "", "empty tie group");
            tiers.push_back(brace_tier);
            brace_tier.clear();
            in_braces = false;
        } else if (ch == ',') {
            if (in_braces) {
                flush(true);
            } else if (trim(tok).empty()) {
                // separator right after a closing brace
                if (tiers.empty()) throw ParseError(line, "", "empty entry in ranking");
                tok.clear();
            } else {
                flush(false);
            }
        } else {
            tok.push_back(ch);
        }
    }
    if (in_braces) throw ParseError(line, "", "unterminated '{' in ranking");
    if (!trim(tok).empty()) flush(false);
    if (tiers.empty()) throw ParseError(line, "", "empty ranking");
    return tiers;
}

struct RawBallotLine {
    long count;
    std::string ranking;
    int line;
};

}  // namespace

Profile parse_preflib(const std::string& text, PreflibKind kind) {
    const auto lines = split_lines(text);

    int declared_n = -1;
    std::vector<std::pair<int, std::string>> declared_names;  // (number, name)
    std::vector<RawBallotLine> raw;

    size_t i = 0;
    bool legacy_header_done = false;

    // Modern '#' metadata may appear anywhere before the ballots.
    for (; i < lines.size(); ++i) {
        const int line_no = static_cast<int>(i) + 1;
        std::string s = trim(lines[i]);
        if (s.empty()) continue;

        if (s[0] == '#') {
            const std::string meta = trim(s.substr(1));
            const auto colon = meta.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = trim(meta.substr(0, colon));
            const std::string value = trim(meta.substr(colon + 1));
            if (key == "NUMBER ALTERNATIVES") {
                declared_n = static_cast<int>(parse_long(value, line_no, "candidate count"));
            } else if (key.rfind("ALTERNATIVE NAME", 0) == 0) {
                const std::string num = trim(key.substr(std::string("ALTERNATIVE NAME").size()));
                declared_names.emplace_back(
                    static_cast<int>(parse_long(num, line_no, "candidate number")), value);
            }
            continue;
        }

        // Legacy layout: a bare candidate count, then "i,Name" declarations,
        // then a totals line, then ballots.
        if (declared_n < 0 && declared_names.empty() && !legacy_header_done &&
            s.find(',') == std::string::npos && s.find(':') == std::string::npos) {
            declared_n = static_cast<int>(parse_long(s, line_no, "candidate count"));
            int seen = 0;
            for (++i; i < lines.size() && seen < declared_n; ++i) {
                const int decl_line = static_cast<int>(i) + 1;
                const std::string d = trim(lines[i]);
                if (d.empty() || d[0] == '#') continue;
                const auto comma = d.find(',');
                if (comma == std::string::npos)
                    throw ParseError(decl_line, "", "expected 'number,name' declaration");
                const int num =
                    static_cast<int>(parse_long(trim(d.substr(0, comma)), decl_line,
                                                "candidate number"));
                declared_names.emplace_back(num, trim(d.substr(comma + 1)));
                ++seen;
            }
            // Totals line ("<voters>,<sum>,<unique>"); tolerated but unused.
            for (; i < lines.size(); ++i) {
                const std::string d = trim(lines[i]);
                if (d.empty() || d[0] == '#') continue;
                if (d.find(':') == std::string::npos && std::count(d.begin(), d.end(), ',') <= 2 &&
                    d.find('{') == std::string::npos) {
                    bool numeric = true;
                    for (char ch : d)
                        if (!std::isdigit(static_cast<unsigned char>(ch)) && ch != ',' && ch != ' ')
                            numeric = false;
                    if (numeric) {
                        ++i;
                        break;
                    }
                }
                break;
            }
            legacy_header_done = true;
            --i;  // outer loop increments
            continue;
        }

        // Ballot line: "count: ranking" or legacy "count,ranking".
        const auto colon = s.find(':');
        if (colon != std::string::npos) {
            const long count = parse_long(trim(s.substr(0, colon)), line_no, "ballot count");
            raw.push_back({count, trim(s.substr(colon + 1)), line_no});
        } else {
            const auto comma = s.find(',');
            if (comma == std::string::npos)
                throw ParseError(line_no, "", "expected 'count: ranking' ballot line");
            const long count = parse_long(trim(s.substr(0, comma)), line_no, "ballot count");
            raw.push_back({count, trim(s.substr(comma + 1)), line_no});
        }
    }

    if (declared_n < 0 && !declared_names.empty())
        declared_n = static_cast<int>(declared_names.size());
    if (declared_n <= 0) throw ParseError(1, "", "no candidate declarations found");

    std::vector<std::string> names(static_cast<size_t>(declared_n));
    std::vector<bool> have(static_cast<size_t>(declared_n), false);
    for (const auto& [num, name] : declared_names) {
        if (num < 1 || num > declared_n)
            throw ParseError(1, "", "candidate number " + std::to_string(num) +
                                        " outside 1.." + std::to_string(declared_n));
        names[static_cast<size_t>(num - 1)] = name;
        have[static_cast<size_t>(num - 1)] = true;
    }
    for (int c = 0; c < declared_n; ++c)
        if (!have[static_cast<size_t>(c)]) names[static_cast<size_t>(c)] = "Candidate " + std::to_string(c + 1);

    std::vector<Ballot> ballots;
    ballots.reserve(raw.size());
    for (const auto& rb : raw) {
        if (rb.count < 1) throw ParseError(rb.line, "", "ballot count must be positive");
        Ballot b;
        b.count = static_cast<int>(rb.count);
        for (auto& tier : parse_ranking(rb.ranking, rb.line)) {
            std::vector<int> ids;
            for (int num : tier) {
                if (num < 1 || num > declared_n)
                    throw ParseError(rb.line, "",
                                     "unknown candidate number " + std::to_string(num));
                ids.push_back(num - 1);
            }
            b.tiers.push_back(std::move(ids));
        }
        if (kind == PreflibKind::Soc) {
            size_t ranked = 0;
            for (const auto& t : b.tiers) {
                if (t.size() != 1)
                    throw ParseError(rb.line, "", "tie group in a strict-order (soc) file");
                ranked += t.size();
            }
            if (ranked != static_cast<size_t>(declared_n))
                throw ParseError(rb.line, "", "incomplete ranking in a complete-order (soc) file");
        }
        ballots.push_back(std::move(b));
    }

    try {
        return Profile::make(std::move(names), std::move(ballots));
    } catch (const std::invalid_argument& e) {
        throw ParseError(1, "", e.what());
    }
}

std::string write_preflib(const Profile& profile) {
    std::ostringstream out;
    out << "# FILE NAME: profile.toc\n";
    out << "# DATA TYPE: toc\n";
    out << "# NUMBER ALTERNATIVES: " << profile.num_candidates() << "\n";
    for (const auto& c : profile.roster)
        out << "# ALTERNATIVE NAME " << (c.id + 1) << ": " << c.name << "\n";
    out << "# NUMBER VOTERS: " << profile.total_voters() << "\n";
    for (const auto& b : profile.ballots) {
        out << b.count << ": ";
        for (size_t t = 0; t < b.tiers.size(); ++t) {
            if (t > 0) out << ",";
            if (b.tiers[t].size() == 1) {
                out << b.tiers[t][0] + 1;
            } else {
                out << "{";
                for (size_t j = 0; j < b.tiers[t].size(); ++j) {
                    if (j > 0) out << ",";
                    out << b.tiers[t][j] + 1;
                }
                out << "}";
            }
        }
        out << "\n";
    }
    return out.str();
}

namespace {

json profile_to_json(const Profile& profile) {
    json doc;
    doc["format"] = "stable-tally/1";
    doc["type"] = "profile";
    json cands = json::array();
    for (const auto& c : profile.roster) cands.push_back({{"id", c.id}, {"name", c.name}});
    doc["candidates"] = std::move(cands);
    json ballots = json::array();
    for (const auto& b : profile.ballots) {
        json tiers = json::array();
        for (const auto& t : b.tiers) tiers.push_back(t);
        ballots.push_back({{"count", b.count}, {"tiers", std::move(tiers)}});
    }
    doc["ballots"] = std::move(ballots);
    return doc;
}

json parse_json_or_throw(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError(0, "$", "not valid JSON");
    return doc;
}

void require_format(const json& doc) {
    if (!doc.is_object()) throw ParseError(0, "$", "expected a JSON object");
    if (!doc.contains("format") || doc["format"] != "stable-tally/1")
        throw ParseError(0, "format", "missing or unsupported format tag (want stable-tally/1)");
}

}  // namespace

std::string write_profile_json(const Profile& profile) {
    return profile_to_json(profile).dump(2) + "\n";
}

Profile parse_profile_json(const std::string& text) {
    const json doc = parse_json_or_throw(text);
    require_format(doc);
    if (!doc.contains("type") || doc["type"] != "profile")
        throw ParseError(0, "type", "expected type 'profile'");
    if (!doc.contains("candidates") || !doc["candidates"].is_array())
        throw ParseError(0, "candidates", "expected an array of candidates");
    if (!doc.contains("ballots") || !doc["ballots"].is_array())
        throw ParseError(0, "ballots", "expected an array of ballots");

    std::vector<std::string> names;
    size_t ci = 0;
    for (const auto& c : doc["candidates"]) {
        const std::string path = "candidates[" + std::to_string(ci) + "]";
        if (!c.is_object() || !c.contains("name") || !c["name"].is_string())
            throw ParseError(0, path, "expected {id, name}");
        if (c.contains("id") &&
            (!c["id"].is_number_integer() || c["id"].get<long>() != static_cast<long>(ci)))
            throw ParseError(0, path + ".id", "ids must be dense 0..n-1 in order");
        names.push_back(c["name"].get<std::string>());
        ++ci;
    }

    std::vector<Ballot> ballots;
    size_t bi = 0;
    for (const auto& b : doc["ballots"]) {
        const std::string path = "ballots[" + std::to_string(bi) + "]";
        if (!b.is_object() || !b.contains("tiers") || !b["tiers"].is_array())
            throw ParseError(0, path, "expected {count, tiers}");
        Ballot ballot;
        if (b.contains("count")) {
            if (!b["count"].is_number_integer() || b["count"].get<long>() < 1)
                throw ParseError(0, path + ".count", "count must be a positive integer");
            ballot.count = b["count"].get<int>();
        }
        size_t ti = 0;
        for (const auto& t : b["tiers"]) {
            if (!t.is_array())
                throw ParseError(0, path + ".tiers[" + std::to_string(ti) + "]",
                                 "expected an array of candidate ids");
            std::vector<int> tier;
            for (const auto& v : t) {
                if (!v.is_number_integer())
                    throw ParseError(0, path + ".tiers[" + std::to_string(ti) + "]",
                                     "candidate ids must be integers");
                tier.push_back(v.get<int>());
            }
            ballot.tiers.push_back(std::move(tier));
            ++ti;
        }
        ballots.push_back(std::move(ballot));
        ++bi;
    }

    try {
        return Profile::make(std::move(names), std::move(ballots));
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, "ballots", e.what());
    }
}

std::string write_margin_graph(const MarginGraph& mg) {
    json doc;
    doc["format"] = "stable-tally/1";
    doc["type"] = "margin_graph";
    doc["candidates"] = mg.names;
    json rows = json::array();
    for (int a = 0; a < mg.n(); ++a) {
        json row = json::array();
        for (int b = 0; b < mg.n(); ++b) row.push_back(mg.margin(a, b));
        rows.push_back(std::move(row));
    }
    doc["margins"] = std::move(rows);
    return doc.dump(2) + "\n";
}

MarginGraph parse_margin_graph(const std::string& text) {
    const json doc = parse_json_or_throw(text);
    require_format(doc);
    if (!doc.contains("type") || doc["type"] != "margin_graph")
        throw ParseError(0, "type", "expected type 'margin_graph'");
    if (!doc.contains("candidates") || !doc["candidates"].is_array())
        throw ParseError(0, "candidates", "expected an array of candidate names");
    if (!doc.contains("margins") || !doc["margins"].is_array())
        throw ParseError(0, "margins", "expected a square integer matrix");

    std::vector<std::string> names;
    for (const auto& c : doc["candidates"]) {
        if (!c.is_string())
            throw ParseError(0, "candidates", "candidate names must be strings");
        names.push_back(c.get<std::string>());
    }
    const size_t n = names.size();
    if (n == 0) throw ParseError(0, "candidates", "need at least one candidate");

    std::vector<int> m(n * n, 0);
    if (doc["margins"].size() != n)
        throw ParseError(0, "margins", "expected " + std::to_string(n) + " rows");
    for (size_t a = 0; a < n; ++a) {
        const auto& row = doc["margins"][a];
        if (!row.is_array() || row.size() != n)
            throw ParseError(0, "margins[" + std::to_string(a) + "]",
                             "expected a row of " + std::to_string(n) + " integers");
        for (size_t b = 0; b < n; ++b) {
            if (!row[b].is_number_integer())
                throw ParseError(0,
                                 "margins[" + std::to_string(a) + "][" + std::to_string(b) + "]",
                                 "margins must be integers");
            m[a * n + b] = row[b].get<int>();
        }
    }

    for (size_t a = 0; a < n; ++a) {
        if (m[a * n + a] != 0)
            throw ParseError(0, "margins[" + std::to_string(a) + "][" + std::to_string(a) + "]",
                             "diagonal margin must be zero for " + names[a]);
        for (size_t b = a + 1; b < n; ++b)
            if (m[a * n + b] != -m[b * n + a])
                throw ParseError(
                    0, "margins[" + std::to_string(a) + "][" + std::to_string(b) + "]",
                    "margin of (" + names[a] + ", " + names[b] + ") is " +
                        std::to_string(m[a * n + b]) + " but the reverse entry is " +
                        std::to_string(m[b * n + a]) + "; expected the negation");
    }

    return MarginGraph(std::move(names), std::move(m));
}

}  // namespace stally
