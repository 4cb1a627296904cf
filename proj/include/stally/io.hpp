#ifndef STALLY_IO_HPP
#define STALLY_IO_HPP

#include <stdexcept>
#include <string>

#include "stally/core.hpp"

namespace stally {

// File-format error carrying the position it was detected at. `line` is
// 1-based for text formats and 0 for JSON schema errors, which report a
// field path instead.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, std::string field, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : field + ": " + message),
          line(line),
          field(std::move(field)) {}
    int line;
    std::string field;
};

enum class PreflibKind { Soc, Toc, Toi };

// Preflib order files, both vintages: legacy headers ("<n>" then "i,name"
// lines and a totals line) and modern "# ALTERNATIVE NAME i:" metadata.
// Ballot lines are "count: r1,r2,{r3,r4}" or legacy "count,r1,r2,{r3,r4}".
// Unranked candidates end up tied below all ranked ones.
Profile parse_preflib(const std::string& text, PreflibKind kind);
std::string write_preflib(const Profile& profile);

// Native JSON profile document (format tag "stable-tally/1").
std::string write_profile_json(const Profile& profile);
Profile parse_profile_json(const std::string& text);

// Named margin matrix as JSON; antisymmetry is validated on parse.
std::string write_margin_graph(const MarginGraph& mg);
MarginGraph parse_margin_graph(const std::string& text);

}  // namespace stally

#endif
