#pragma once

// Core value types for two-level (Van Wijngaarden) grammars.
//
// Everything here is immutable once built. Protonotions are stored without
// blanks: blanks are layout only and never take part in matching.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vw {

/// True for the small syntactic marks a protonotion may contain.
bool is_small_mark(char c) noexcept;

/// True for the big syntactic marks metanotion names are spelled with.
inline bool is_big_mark(char c) noexcept { return c >= 'A' && c <= 'Z'; }

/// A sequence of small syntactic marks. Ordered canonically: shorter first,
/// then mark-lexicographic.
struct Protonotion {
    std::string marks;

    Protonotion() = default;
    Protonotion(std::string m) : marks(std::move(m)) {}
    Protonotion(const char* m) : marks(m) {}

    bool empty() const noexcept { return marks.empty(); }
    std::size_t size() const noexcept { return marks.size(); }

    friend bool operator==(const Protonotion&, const Protonotion&) = default;
    friend std::strong_ordering operator<=>(const Protonotion& a, const Protonotion& b) {
        if (auto c = a.marks.size() <=> b.marks.size(); c != 0) return c;
        return a.marks <=> b.marks;
    }
};

Protonotion operator+(const Protonotion& a, const Protonotion& b);

struct MetanotionName {
    std::string name;

    MetanotionName() = default;
    MetanotionName(std::string n) : name(std::move(n)) {}
    MetanotionName(const char* n) : name(n) {}

    friend auto operator<=>(const MetanotionName&, const MetanotionName&) = default;
};

struct MetaRef {
    MetanotionName name;
    friend bool operator==(const MetaRef&, const MetaRef&) = default;
};

/// A run of small marks. `display` keeps the source spelling with single
/// blanks so rendered rules stay readable; it is ignored by equality.
struct Chunk {
    Protonotion marks;
    std::string display;

    friend bool operator==(const Chunk& a, const Chunk& b) { return a.marks == b.marks; }
};

struct Segment {
    std::variant<MetaRef, Chunk> item;
    bool blank_before = false; // layout only

    bool is_meta() const noexcept { return std::holds_alternative<MetaRef>(item); }
    const MetaRef& meta() const { return std::get<MetaRef>(item); }
    const Chunk& chunk() const { return std::get<Chunk>(item); }

    friend bool operator==(const Segment& a, const Segment& b) { return a.item == b.item; }
};

Segment meta_segment(MetanotionName name, bool blank_before = false);
Segment chunk_segment(std::string_view marks, bool blank_before = false);

/// Alternating sequence of metanotion references and (fused) chunks.
struct Hypernotion {
    std::vector<Segment> segments;

    bool is_ground() const noexcept;
    bool empty() const noexcept { return segments.empty(); }
    std::set<MetanotionName> metanotions() const;

    friend bool operator==(const Hypernotion&, const Hypernotion&) = default;
};

/// Merge adjacent chunks so no two chunks are neighbours.
Hypernotion fuse(std::vector<Segment> segments);

Hypernotion concat(const Hypernotion& a, const Hypernotion& b);

struct Metarule {
    MetanotionName lhs;
    std::vector<Hypernotion> alternatives; // members fused into one hypernotion each

    friend bool operator==(const Metarule&, const Metarule&) = default;
};

/// One alternative of a hyperrule: the comma-separated members. An empty
/// member list is the EMPTY alternative.
using HyperAlternative = std::vector<Hypernotion>;

struct Hyperrule {
    Hypernotion lhs;
    std::vector<HyperAlternative> alternatives;

    std::set<MetanotionName> metanotions() const;

    friend bool operator==(const Hyperrule&, const Hyperrule&) = default;
};

enum class TerminalConvention {
    SymbolSuffix, // notions ending in "symbol" are terminals
    NoMatch,      // notions matching no left-hand side are terminals
};

std::string_view to_string(TerminalConvention c);

inline constexpr std::string_view kSymbolSuffix = "symbol";

struct VWGrammar {
    std::map<MetanotionName, Metarule> metarules;
    std::set<char> small_alphabet;
    std::vector<Hyperrule> hyperrules;
    std::optional<Hypernotion> start;
    /// Uppercase spelling of the start notion when it is not a metanotion
    /// (the conventional `S`). Empty if the start is spelled in small marks.
    std::string start_name;
    TerminalConvention terminal_convention = TerminalConvention::NoMatch;

    const Metarule* find_metarule(const MetanotionName& name) const;
    std::set<MetanotionName> metanotion_names() const;

    friend bool operator==(const VWGrammar&, const VWGrammar&) = default;
};

struct Binding {
    std::map<MetanotionName, Protonotion> entries;

    const Protonotion* find(const MetanotionName& name) const;
    bool contains(const MetanotionName& name) const { return find(name) != nullptr; }
    void set(const MetanotionName& name, Protonotion value) { entries[name] = std::move(value); }

    friend bool operator==(const Binding&, const Binding&) = default;
};

/// Replace every metanotion in `h` by its bound protonotion.
/// Throws Error(UnboundMetanotion) when a reference has no entry.
Protonotion ground(const Hypernotion& h, const Binding& b);

/// Like ground(), but keeps the source blanks for display.
std::string ground_display(const Hypernotion& h, const Binding& b);

enum class NotionStatus { Open, Terminal };

struct Notion {
    Protonotion text;
    NotionStatus status = NotionStatus::Open;

    friend auto operator<=>(const Notion&, const Notion&) = default;
};

struct SententialForm {
    std::vector<Notion> notions;

    bool has_open() const noexcept;
    std::optional<std::size_t> leftmost_open() const noexcept;

    friend auto operator<=>(const SententialForm&, const SententialForm&) = default;
};

SententialForm open_form(const std::vector<Protonotion>& notions);

struct DerivationStep {
    SententialForm form; // form after the step
    std::optional<std::size_t> rule; // empty: the notion was marked terminal
    std::size_t notion = 0;
    std::size_t alternative = 0;
    Binding binding;

    friend bool operator==(const DerivationStep&, const DerivationStep&) = default;
};

struct DerivationTrace {
    std::vector<DerivationStep> steps;

    friend bool operator==(const DerivationTrace&, const DerivationTrace&) = default;
};

} // namespace vw
