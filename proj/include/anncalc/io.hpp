#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anncalc/network.hpp"

namespace anncalc {

// Result of parsing a network file. `activation_hint` is carried verbatim
// (null in the file maps to nullopt); `warnings` collects non-fatal issues
// such as non-finite weights, which are loadable but rejected later by
// certification.
struct LoadedAnn {
  Ann ann;
  std::optional<std::string> activation_hint;
  std::vector<std::string> warnings;
};

// Serializes to the "ann-v1" JSON document. Finite doubles are written as
// shortest round-trip decimals (bit-exact on reload); NaN and infinities are
// written as the strings "NaN", "Infinity", "-Infinity".
std::string save(const Ann& ann,
                 const std::optional<std::string>& activation_hint);

// Parses an "ann-v1" document. Throws ParseError for malformed JSON and
// SchemaViolationError for a well-formed document that does not match the
// format (wrong "format" tag, missing keys, rows/cols inconsistent with the
// array lengths, non-chaining layer shapes).
LoadedAnn load(const std::string& text);

void save_file(const std::string& path, const Ann& ann,
               const std::optional<std::string>& activation_hint);
LoadedAnn load_file(const std::string& path);

}  // namespace anncalc
