#pragma once

// Matching ground notions against hyperrule left-hand sides, and
// instantiating hyperrules under a binding.

#include <cstddef>
#include <string>
#include <vector>

#include "vwgen/metagrammar.hpp"
#include "vwgen/model.hpp"

namespace vw {

struct MatchLimits {
    std::size_t max_solutions = 64;
    std::size_t max_meta_len = 32; // marks bound to a single metanotion
};

struct SegmentSpan {
    std::size_t segment;
    std::size_t begin;
    std::size_t end;

    friend bool operator==(const SegmentSpan&, const SegmentSpan&) = default;
};

struct MatchSolution {
    Binding binding;
    std::vector<SegmentSpan> segmentation; // one entry per pattern segment

    friend bool operator==(const MatchSolution&, const MatchSolution&) = default;
};

struct MatchResult {
    std::vector<MatchSolution> solutions; // ordered by segmentation offsets
    bool truncated = false;
    std::string truncation; // "solutions" or "metanotion-length"
};

class Matcher {
public:
    explicit Matcher(const VWGrammar& g, MatchLimits limits = {});

    MatchResult match(const Protonotion& target, const Hypernotion& pattern) const;

    const MetaGrammar& meta() const noexcept { return meta_; }
    const MatchLimits& limits() const noexcept { return limits_; }

private:
    MetaGrammar meta_;
    MatchLimits limits_;
};

MatchResult match_lhs(const VWGrammar& g, const Protonotion& target, const Hyperrule& rule,
                      const MatchLimits& limits = {});

struct RuleBinding {
    Binding binding;
    std::vector<MetanotionName> free; // used by the rule but not bound by its left-hand side
};

RuleBinding consistent_across_rule(const Hyperrule& rule, const MatchSolution& sol);

struct GroundRule {
    Protonotion lhs;
    std::vector<std::vector<Protonotion>> rhs_alternatives;

    friend bool operator==(const GroundRule&, const GroundRule&) = default;
};

/// Throws Error(UnboundMetanotion) if `b` misses a metanotion of `rule`.
GroundRule instantiate(const VWGrammar& g, const Hyperrule& rule, const Binding& b);

} // namespace vw
