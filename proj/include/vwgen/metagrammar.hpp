#pragma once

// The metarules read as an ordinary context-free grammar over small marks.

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "vwgen/model.hpp"

namespace vw {

struct MetaEnumeration {
    MetanotionName metanotion;
    std::vector<Protonotion> produced; // canonical order, duplicate-free
    bool exhausted = false;            // the whole (finite) language is listed
};

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// Compiled view of a grammar's metarules. Cheap to build; every query is
/// const and reentrant.
class MetaGrammar {
public:
    explicit MetaGrammar(const VWGrammar& g);

    bool defines(const MetanotionName& m) const;

    /// Throws Error(UnknownMetanotion) for undefined `m`.
    bool contains(const MetanotionName& m, std::string_view marks) const;

    /// Every end offset e with start <= e <= start + max_len such that
    /// text[start, e) is a terminal metaproduction of `m`, ascending.
    std::vector<std::size_t> ends_from(const MetanotionName& m, std::string_view text, std::size_t start,
                                       std::size_t max_len = kUnbounded) const;

    MetaEnumeration enumerate(const MetanotionName& m, std::size_t max_len, std::size_t max_items) const;

    bool is_finite(const MetanotionName& m) const;
    bool is_productive(const MetanotionName& m) const;
    bool is_nullable(const MetanotionName& m) const;

private:
    struct Symbol {
        bool nonterminal;
        int value; // nonterminal index or mark
    };
    struct Alternative {
        int lhs;
        std::vector<Symbol> body;
    };

    int index_of(const MetanotionName& m) const;
    std::vector<bool> reachable_from(int root) const;

    std::vector<MetanotionName> names_;
    std::vector<Alternative> alts_;
    std::vector<std::vector<int>> alts_of_; // nonterminal -> alternative ids
    std::vector<bool> nullable_;
    std::vector<bool> productive_;
};

bool meta_contains(const VWGrammar& g, const MetanotionName& m, const Protonotion& p);
MetaEnumeration enumerate_meta(const VWGrammar& g, const MetanotionName& m, std::size_t max_len,
                               std::size_t max_items);
bool is_meta_finite(const VWGrammar& g, const MetanotionName& m);

/// Metanotions whose language is empty, in name order.
std::vector<MetanotionName> empty_language_metanotions(const VWGrammar& g);

} // namespace vw
