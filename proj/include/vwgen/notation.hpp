#pragma once

// Reading and writing the textual grammar notation (.vw files).
//
//   NAME :: member member ; member .          metarule
//   hypernotion : member , member ; EMPTY .   hyperrule
//
// `#` starts a line comment, `','` is a literal comma mark, and blanks are
// layout except that they separate uppercase runs.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vwgen/model.hpp"

namespace vw {

struct SourceSpan {
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t len = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct Diagnostic {
    std::string code; // e.g. "SyntaxError", "AmbiguousHypernotion"
    std::string message;
    SourceSpan span;
};

struct ValidationReport {
    std::vector<Diagnostic> errors;
    std::vector<Diagnostic> warnings;

    bool ok() const noexcept { return errors.empty(); }
    bool has_error(std::string_view code) const;
};

/// `grammar` is set iff `report.ok()`.
struct ParseResult {
    std::optional<VWGrammar> grammar;
    ValidationReport report;
};

ParseResult parse_grammar(std::string_view text);

/// Parse or throw std::runtime_error listing the diagnostics. Handy for tests
/// and for corpus files known to be valid.
VWGrammar parse_grammar_or_throw(std::string_view text);

/// Decompose one member body into metanotion references and chunks.
/// Uppercase runs must be tiled by `names` in exactly one way; a run equal to
/// `start_name` that no tiling covers is kept as a chunk.
/// Throws Error(UnknownMetanotion) or Error(AmbiguousHypernotion).
Hypernotion tokenize_hypernotion(std::string_view body,
                                 const std::set<MetanotionName>& names,
                                 std::string_view start_name = {});

std::string render_grammar(const VWGrammar& g);
std::string render_hypernotion(const Hypernotion& h);
std::string render_hyperrule(const Hyperrule& r);

/// Render `rule` with `b` applied, e.g. "aii : a symbol, ai.".
std::string render_ground_rule(const Hyperrule& rule, const Binding& b);

/// Read a whole file into a string; throws std::runtime_error on failure.
std::string read_text_file(const std::string& path);

} // namespace vw
