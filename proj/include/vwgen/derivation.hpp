#pragma once

// Producing words: bounded breadth-first enumeration over a queue of
// sentential forms, seeded random derivation, transformation of an input
// word, and k-part split output.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vwgen/matcher.hpp"
#include "vwgen/model.hpp"

namespace vw {

enum class GenerationMode { Exhaustive, Random };

struct GenerationConfig {
    GenerationMode mode = GenerationMode::Exhaustive;
    std::uint64_t seed = 0;
    std::size_t max_steps = 200;    // rule applications per derivation
    std::size_t max_forms = 100000; // sentential forms ever queued
    std::size_t max_notion_len = 64;
    std::size_t max_words = 1000;
    std::size_t free_meta_len = 8;
    std::size_t max_depth = 0; // derivation-tree depth of a notion; 0 = unbounded
    std::optional<TerminalConvention> convention; // overrides the grammar's
    MatchLimits match_limits;

    /// Throws Error(InvalidConfig) if a bound is zero.
    void validate() const;
};

struct GeneratedWord {
    std::vector<Protonotion> word;
    DerivationTrace trace;
};

struct GenResult {
    std::vector<GeneratedWord> words;
    bool truncated = false;
    std::string truncation; // comma-separated reasons
};

struct StepMeta {
    std::optional<std::size_t> rule; // empty: notion marked terminal
    std::size_t notion = 0;
    std::size_t alternative = 0;
    Binding binding;
};

struct Successor {
    SententialForm form;
    StepMeta meta;
};

struct StepOutcome {
    std::vector<Successor> successors;
    bool dead_end = false; // unmatched notion without the symbol suffix
    bool truncated = false;
    std::string truncation;
};

/// Rewriting engine bound to one grammar. Memoises the expansions of every
/// notion it has seen, so reuse one Deriver for many calls.
class Deriver {
public:
    Deriver(const VWGrammar& g, GenerationConfig cfg);
    ~Deriver();
    Deriver(const Deriver&) = delete;
    Deriver& operator=(const Deriver&) = delete;

    const GenerationConfig& config() const noexcept { return cfg_; }
    TerminalConvention convention() const noexcept;

    /// Successors of `form` obtained by rewriting its leftmost open notion.
    StepOutcome step(const SententialForm& form);

    /// Throws Error(NoStart) if the grammar has no ground start notion.
    GenResult generate();

    /// Throws Error(NoDerivation) if no word is produced.
    GenResult transform(const std::vector<Protonotion>& input);

    /// Derivations from an explicit start form; never throws NoDerivation.
    GenResult derive(const SententialForm& start);

private:
    struct Expansion {
        std::size_t rule;
        std::size_t alternative;
        Binding binding;
        std::vector<Protonotion> members;
    };
    struct Expansions {
        std::vector<Expansion> items;
        bool truncated = false;
        std::string truncation;
    };

    const Expansions& expansions(const Protonotion& notion);
    const MetaEnumeration& free_values(const MetanotionName& name);
    GenResult exhaustive(const SententialForm& start);
    GenResult random(const SententialForm& start);

    const VWGrammar& grammar_;
    GenerationConfig cfg_;
    Matcher matcher_;
    std::map<Protonotion, Expansions> cache_;
    std::map<MetanotionName, MetaEnumeration> free_cache_;
};

StepOutcome step(const VWGrammar& g, const SententialForm& form, const GenerationConfig& cfg);
GenResult generate(const VWGrammar& g, const GenerationConfig& cfg);
GenResult transform(const VWGrammar& g, const std::vector<Protonotion>& input, const GenerationConfig& cfg);

struct SplitResult {
    std::vector<GenResult> parts;  // parts[p].words[w] is part p of derivation w
    std::vector<Binding> shared;   // binding of the start rule, per derivation
    bool truncated = false;
    std::string truncation;
};

/// Derive words and partition each one by the top-level member of the start
/// rule its terminals descend from.
SplitResult split_parts(const VWGrammar& g, const GenerationConfig& cfg);

/// Re-apply a trace to its start form. Returns the form after each step.
std::vector<SententialForm> replay(const VWGrammar& g, const SententialForm& start, const DerivationTrace& trace,
                                   TerminalConvention convention);

/// Words of a symbol-suffix grammar are strings of terminal symbols and are
/// concatenated; otherwise notions are separated by single blanks.
std::string render_word(const std::vector<Protonotion>& word, TerminalConvention convention);

std::string render_form(const SententialForm& form);

/// Split an input word into notions: `;` and newlines separate notions,
/// blanks inside a notion are dropped.
std::vector<Protonotion> parse_input_word(const std::string& text);

} // namespace vw
