#include "vwgen/matcher.hpp"

#include <map>
#include <string_view>
#include <utility>

namespace vw {

Matcher::Matcher(const VWGrammar& g, MatchLimits limits) : meta_(g), limits_(limits) {}

namespace {

// Depth-first walk over the pattern segments. Each metanotion reference is
// parsed with the metagrammar; repeated references must reuse the first
// occurrence's substring.
class Search {
public:
    Search(const MetaGrammar& meta, const MatchLimits& limits, std::string_view target, const Hypernotion& pattern)
        : meta_(meta), limits_(limits), target_(target), pattern_(pattern) {}

    MatchResult run() {
        spans_.reserve(pattern_.segments.size());
        walk(0, 0);
        return std::move(result_);
    }

private:
    void walk(std::size_t seg, std::size_t pos) {
        if (result_.solutions.size() >= limits_.max_solutions) {
            result_.truncated = true;
            result_.truncation = "solutions";
            return;
        }
        if (seg == pattern_.segments.size()) {
            if (pos == target_.size()) result_.solutions.push_back({binding_, spans_});
            return;
        }
        const auto& s = pattern_.segments[seg];
        if (!s.is_meta()) {
            const auto& marks = s.chunk().marks.marks;
            if (target_.compare(pos, marks.size(), marks) != 0) return;
            descend(seg, pos, pos + marks.size());
            return;
        }
        const auto& name = s.meta().name;
        if (const auto* bound = binding_.find(name)) {
            if (target_.compare(pos, bound->size(), bound->marks) != 0) return;
            descend(seg, pos, pos + bound->size());
            return;
        }
        for (std::size_t end : ends(name, pos)) {
            if (result_.solutions.size() >= limits_.max_solutions && result_.truncated) return;
            binding_.set(name, Protonotion(std::string(target_.substr(pos, end - pos))));
            descend(seg, pos, end);
            binding_.entries.erase(name);
        }
    }

    void descend(std::size_t seg, std::size_t begin, std::size_t end) {
        spans_.push_back({seg, begin, end});
        walk(seg + 1, end);
        spans_.pop_back();
    }

    const std::vector<std::size_t>& ends(const MetanotionName& name, std::size_t pos) {
        auto key = std::make_pair(name.name, pos);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        auto all = meta_.ends_from(name, target_, pos);
        std::vector<std::size_t> kept;
        for (auto e : all) {
            if (e - pos <= limits_.max_meta_len) {
                kept.push_back(e);
            } else if (!result_.truncated) {
                result_.truncated = true;
                result_.truncation = "metanotion-length";
            }
        }
        return memo_.emplace(key, std::move(kept)).first->second;
    }

    const MetaGrammar& meta_;
    const MatchLimits& limits_;
    std::string_view target_;
    const Hypernotion& pattern_;
    Binding binding_;
    std::vector<SegmentSpan> spans_;
    std::map<std::pair<std::string, std::size_t>, std::vector<std::size_t>> memo_;
    MatchResult result_;
};

} // namespace

MatchResult Matcher::match(const Protonotion& target, const Hypernotion& pattern) const {
    return Search(meta_, limits_, target.marks, pattern).run();
}

MatchResult match_lhs(const VWGrammar& g, const Protonotion& target, const Hyperrule& rule,
                      const MatchLimits& limits) {
    return Matcher(g, limits).match(target, rule.lhs);
}

RuleBinding consistent_across_rule(const Hyperrule& rule, const MatchSolution& sol) {
    RuleBinding out{sol.binding, {}};
    for (const auto& name : rule.metanotions())
        if (!out.binding.contains(name)) out.free.push_back(name);
    return out;
}

GroundRule instantiate(const VWGrammar&, const Hyperrule& rule, const Binding& b) {
    GroundRule out{ground(rule.lhs, b), {}};
    for (const auto& alt : rule.alternatives) {
        std::vector<Protonotion> members;
        for (const auto& member : alt) members.push_back(ground(member, b));
        out.rhs_alternatives.push_back(std::move(members));
    }
    return out;
}

} // namespace vw
