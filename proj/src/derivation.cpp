#include "vwgen/derivation.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

#include "vwgen/error.hpp"
#include "vwgen/rng.hpp"

namespace vw {

void GenerationConfig::validate() const {
    auto check = [](std::size_t v, const char* name) {
        if (v == 0) throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be at least 1");
    };
    check(max_steps, "max_steps");
    check(max_forms, "max_forms");
    check(max_notion_len, "max_notion_len");
    check(max_words, "max_words");
    check(free_meta_len, "free_meta_len");
    check(match_limits.max_solutions, "max_solutions");
    check(match_limits.max_meta_len, "max_meta_len");
}

namespace {

constexpr std::size_t kRandomRestarts = 32;
constexpr std::size_t kFreeValueCap = 4096;

bool has_symbol_suffix(const Protonotion& p) {
    const auto& m = p.marks;
    return m.size() >= kSymbolSuffix.size() &&
           m.compare(m.size() - kSymbolSuffix.size(), kSymbolSuffix.size(), kSymbolSuffix) == 0;
}

Protonotion strip_symbol_suffix(const Protonotion& p) {
    return Protonotion(p.marks.substr(0, p.marks.size() - kSymbolSuffix.size()));
}

class Reasons {
public:
    void add(const std::string& r) {
        if (!r.empty()) set_.insert(r);
    }
    bool any() const { return !set_.empty(); }
    std::string joined() const {
        std::string out;
        for (const auto& r : set_) out += (out.empty() ? "" : ",") + r;
        return out;
    }

private:
    std::set<std::string> set_;
};

// A sentential form together with the derivation-tree depth of each notion.
struct Node {
    SententialForm form;
    std::vector<std::size_t> depth;
    std::size_t rewrites = 0;
    std::ptrdiff_t parent = -1;
    StepMeta meta;
};

std::string form_key(const Node& n, bool with_depth) {
    std::string key;
    for (std::size_t i = 0; i < n.form.notions.size(); ++i) {
        const auto& notion = n.form.notions[i];
        key += notion.status == NotionStatus::Open ? 'o' : 't';
        key += notion.text.marks;
        if (with_depth) key += '@' + std::to_string(n.depth[i]);
        key += '\x01';
    }
    return key;
}

std::vector<Protonotion> word_of(const SententialForm& f) {
    std::vector<Protonotion> w;
    for (const auto& n : f.notions) w.push_back(n.text);
    return w;
}

// Apply the bounds to a successor of `parent`. Returns the new node, or an
// empty optional with `reason` set when the successor is cut off.
std::optional<Node> bounded_child(const Node& parent, Successor succ, const GenerationConfig& cfg,
                                  std::string& reason) {
    Node child;
    child.rewrites = parent.rewrites;
    child.meta = std::move(succ.meta);
    const std::size_t at = child.meta.notion;
    if (!child.meta.rule) {
        child.depth = parent.depth;
    } else {
        child.rewrites += 1;
        if (child.rewrites > cfg.max_steps) {
            reason = "max-steps";
            return std::nullopt;
        }
        const std::size_t added = succ.form.notions.size() + 1 - parent.form.notions.size();
        const std::size_t d = parent.depth[at] + 1;
        if (cfg.max_depth && added > 0 && d > cfg.max_depth) {
            reason = "max-depth";
            return std::nullopt;
        }
        child.depth.assign(parent.depth.begin(), parent.depth.begin() + static_cast<std::ptrdiff_t>(at));
        child.depth.insert(child.depth.end(), added, d);
        child.depth.insert(child.depth.end(), parent.depth.begin() + static_cast<std::ptrdiff_t>(at + 1),
                           parent.depth.end());
        for (std::size_t k = at; k < at + added; ++k) {
            if (succ.form.notions[k].text.size() > cfg.max_notion_len) {
                reason = "max-notion-len";
                return std::nullopt;
            }
        }
    }
    child.form = std::move(succ.form);
    return child;
}

} // namespace

Deriver::Deriver(const VWGrammar& g, GenerationConfig cfg)
    : grammar_(g), cfg_(std::move(cfg)), matcher_(g, cfg_.match_limits) {
    cfg_.validate();
}

Deriver::~Deriver() = default;

TerminalConvention Deriver::convention() const noexcept {
    return cfg_.convention.value_or(grammar_.terminal_convention);
}

const MetaEnumeration& Deriver::free_values(const MetanotionName& name) {
    auto it = free_cache_.find(name);
    if (it == free_cache_.end())
        it = free_cache_.emplace(name, matcher_.meta().enumerate(name, cfg_.free_meta_len, kFreeValueCap)).first;
    return it->second;
}

// Every (rule, solution, alternative, free-metanotion choice) that rewrites
// `notion`, in rule order, then solution order, then alternative order.
const Deriver::Expansions& Deriver::expansions(const Protonotion& notion) {
    if (auto it = cache_.find(notion); it != cache_.end()) return it->second;
    Expansions out;
    const auto& rules = grammar_.hyperrules;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const auto& rule = rules[r];
        auto matched = matcher_.match(notion, rule.lhs);
        if (matched.truncated) {
            out.truncated = true;
            out.truncation = matched.truncation;
        }
        for (const auto& sol : matched.solutions) {
            const Binding& bound = sol.binding;
            for (std::size_t a = 0; a < rule.alternatives.size(); ++a) {
                const auto& alt = rule.alternatives[a];
                std::vector<MetanotionName> free;
                for (const auto& member : alt)
                    for (const auto& name : member.metanotions())
                        if (!bound.contains(name) && std::find(free.begin(), free.end(), name) == free.end())
                            free.push_back(name);
                std::sort(free.begin(), free.end());

                std::vector<const std::vector<Protonotion>*> values;
                bool empty_choice = false;
                for (const auto& name : free) {
                    const auto& e = free_values(name);
                    if (e.produced.size() >= kFreeValueCap) {
                        out.truncated = true;
                        out.truncation = "free-metanotion";
                    }
                    values.push_back(&e.produced);
                    empty_choice = empty_choice || e.produced.empty();
                }
                if (empty_choice) continue;

                std::vector<std::size_t> pick(free.size(), 0);
                for (;;) {
                    Binding b = bound;
                    for (std::size_t f = 0; f < free.size(); ++f) b.set(free[f], (*values[f])[pick[f]]);
                    Expansion e{r, a, b, {}};
                    for (const auto& member : alt) e.members.push_back(ground(member, b));
                    out.items.push_back(std::move(e));
                    bool done = true;
                    for (std::size_t f = free.size(); f-- > 0;) {
                        if (++pick[f] < values[f]->size()) {
                            done = false;
                            break;
                        }
                        pick[f] = 0;
                    }
                    if (done) break;
                }
            }
        }
    }
    return cache_.emplace(notion, std::move(out)).first->second;
}

StepOutcome Deriver::step(const SententialForm& form) {
    StepOutcome out;
    auto at = form.leftmost_open();
    if (!at) return out;
    const auto& notion = form.notions[*at];
    const auto& exps = expansions(notion.text);
    out.truncated = exps.truncated;
    out.truncation = exps.truncation;

    auto splice = [&](const std::vector<Notion>& replacement) {
        SententialForm f;
        f.notions.reserve(form.notions.size() + replacement.size());
        f.notions.insert(f.notions.end(), form.notions.begin(), form.notions.begin() + static_cast<std::ptrdiff_t>(*at));
        f.notions.insert(f.notions.end(), replacement.begin(), replacement.end());
        f.notions.insert(f.notions.end(), form.notions.begin() + static_cast<std::ptrdiff_t>(*at + 1),
                         form.notions.end());
        return f;
    };

    if (exps.items.empty()) {
        Protonotion text = notion.text;
        if (convention() == TerminalConvention::SymbolSuffix) {
            if (!has_symbol_suffix(text)) {
                out.dead_end = true;
                return out;
            }
            text = strip_symbol_suffix(text);
        }
        out.successors.push_back({splice({Notion{text, NotionStatus::Terminal}}), StepMeta{std::nullopt, *at, 0, {}}});
        return out;
    }
    for (const auto& e : exps.items) {
        std::vector<Notion> replacement;
        for (const auto& m : e.members) replacement.push_back({m, NotionStatus::Open});
        out.successors.push_back({splice(replacement), StepMeta{e.rule, *at, e.alternative, e.binding}});
    }
    return out;
}

namespace {

DerivationTrace trace_of(const std::vector<Node>& nodes, std::size_t idx) {
    DerivationTrace t;
    for (auto i = static_cast<std::ptrdiff_t>(idx); nodes[static_cast<std::size_t>(i)].parent >= 0;
         i = nodes[static_cast<std::size_t>(i)].parent) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        t.steps.push_back({n.form, n.meta.rule, n.meta.notion, n.meta.alternative, n.meta.binding});
    }
    std::reverse(t.steps.begin(), t.steps.end());
    return t;
}

} // namespace

GenResult Deriver::exhaustive(const SententialForm& start) {
    GenResult result;
    Reasons reasons;
    const bool keyed_depth = cfg_.max_depth > 0;

    std::vector<Node> nodes;
    nodes.push_back(Node{start, std::vector<std::size_t>(start.notions.size(), 0), 0, -1, {}});
    std::unordered_set<std::string> seen{form_key(nodes[0], keyed_depth)};
    std::set<std::vector<Protonotion>> words_seen;
    std::deque<std::size_t> queue{0};
    bool out_of_forms = false;

    while (!queue.empty()) {
        if (result.words.size() >= cfg_.max_words) {
            reasons.add("max-words");
            break;
        }
        const std::size_t idx = queue.front();
        queue.pop_front();
        if (!nodes[idx].form.has_open()) {
            auto w = word_of(nodes[idx].form);
            if (words_seen.insert(w).second) result.words.push_back({std::move(w), trace_of(nodes, idx)});
            continue;
        }
        if (out_of_forms) continue;
        auto outcome = step(nodes[idx].form);
        if (outcome.truncated) reasons.add(outcome.truncation);
        for (auto& succ : outcome.successors) {
            std::string why;
            auto child = bounded_child(nodes[idx], std::move(succ), cfg_, why);
            if (!child) {
                reasons.add(why);
                continue;
            }
            child->parent = static_cast<std::ptrdiff_t>(idx);
            if (!seen.insert(form_key(*child, keyed_depth)).second) continue;
            if (nodes.size() >= cfg_.max_forms) {
                reasons.add("max-forms");
                out_of_forms = true;
                break;
            }
            nodes.push_back(std::move(*child));
            queue.push_back(nodes.size() - 1);
        }
    }
    result.truncated = reasons.any();
    result.truncation = reasons.joined();
    return result;
}

GenResult Deriver::random(const SententialForm& start) {
    GenResult result;
    Reasons reasons;
    std::set<std::vector<Protonotion>> words_seen;

    for (std::size_t d = 0; d < cfg_.max_words; ++d) {
        auto rng = SplitMix64::stream(cfg_.seed, d);
        for (std::size_t attempt = 0; attempt < kRandomRestarts; ++attempt) {
            std::vector<Node> path;
            path.push_back(Node{start, std::vector<std::size_t>(start.notions.size(), 0), 0, -1, {}});
            bool dead = false;
            while (path.back().form.has_open()) {
                auto outcome = step(path.back().form);
                if (outcome.truncated) reasons.add(outcome.truncation);
                std::vector<Node> viable;
                for (auto& succ : outcome.successors) {
                    std::string why;
                    if (auto child = bounded_child(path.back(), std::move(succ), cfg_, why))
                        viable.push_back(std::move(*child));
                    else
                        reasons.add(why);
                }
                if (viable.empty()) {
                    dead = true;
                    break;
                }
                Node next = std::move(viable[rng.below(viable.size())]);
                next.parent = static_cast<std::ptrdiff_t>(path.size() - 1);
                path.push_back(std::move(next));
            }
            if (dead) continue;
            auto w = word_of(path.back().form);
            if (words_seen.insert(w).second) result.words.push_back({std::move(w), trace_of(path, path.size() - 1)});
            break;
        }
    }
    result.truncated = reasons.any();
    result.truncation = reasons.joined();
    return result;
}

GenResult Deriver::derive(const SententialForm& start) {
    return cfg_.mode == GenerationMode::Exhaustive ? exhaustive(start) : random(start);
}

GenResult Deriver::generate() {
    if (!grammar_.start) throw Error(ErrorCode::NoStart, "grammar has no ground start notion");
    return derive(open_form({ground(*grammar_.start, {})}));
}

GenResult Deriver::transform(const std::vector<Protonotion>& input) {
    if (input.empty()) throw Error(ErrorCode::NoDerivation, "empty input word");
    auto result = derive(open_form(input));
    // A word reached by terminal marking alone is the input echoed back.
    std::erase_if(result.words, [](const GeneratedWord& w) {
        return std::none_of(w.trace.steps.begin(), w.trace.steps.end(),
                            [](const DerivationStep& s) { return s.rule.has_value(); });
    });
    if (result.words.empty()) {
        std::string msg = "no derivation of the input word within bounds";
        if (result.truncated) msg += " (cut off by " + result.truncation + ")";
        throw Error(ErrorCode::NoDerivation, msg);
    }
    return result;
}

StepOutcome step(const VWGrammar& g, const SententialForm& form, const GenerationConfig& cfg) {
    return Deriver(g, cfg).step(form);
}

GenResult generate(const VWGrammar& g, const GenerationConfig& cfg) { return Deriver(g, cfg).generate(); }

GenResult transform(const VWGrammar& g, const std::vector<Protonotion>& input, const GenerationConfig& cfg) {
    return Deriver(g, cfg).transform(input);
}

std::vector<SententialForm> replay(const VWGrammar& g, const SententialForm& start, const DerivationTrace& trace,
                                   TerminalConvention convention) {
    std::vector<SententialForm> forms;
    SententialForm cur = start;
    for (const auto& s : trace.steps) {
        if (s.notion >= cur.notions.size()) throw std::out_of_range("trace step refers to a missing notion");
        auto at = cur.notions.begin() + static_cast<std::ptrdiff_t>(s.notion);
        if (!s.rule) {
            at->status = NotionStatus::Terminal;
            if (convention == TerminalConvention::SymbolSuffix) at->text = strip_symbol_suffix(at->text);
        } else {
            const auto& rule = g.hyperrules.at(*s.rule);
            std::vector<Notion> replacement;
            for (const auto& member : rule.alternatives.at(s.alternative))
                replacement.push_back({ground(member, s.binding), NotionStatus::Open});
            at = cur.notions.erase(at);
            cur.notions.insert(at, replacement.begin(), replacement.end());
        }
        forms.push_back(cur);
    }
    return forms;
}

SplitResult split_parts(const VWGrammar& g, const GenerationConfig& cfg) {
    auto all = generate(g, cfg);
    SplitResult out;
    out.truncated = all.truncated;
    out.truncation = all.truncation;

    std::size_t k = 1;
    std::vector<std::vector<std::size_t>> origins_per_word;
    for (const auto& w : all.words) {
        // origin[i]: which top-level member notion i descends from
        std::vector<std::size_t> origin{0};
        bool first = true;
        for (const auto& s : w.trace.steps) {
            if (!s.rule) continue;
            const auto members = g.hyperrules[*s.rule].alternatives[s.alternative].size();
            auto at = origin.begin() + static_cast<std::ptrdiff_t>(s.notion);
            if (first) {
                origin.clear();
                for (std::size_t m = 0; m < members; ++m) origin.push_back(m);
                k = std::max(k, members);
                first = false;
                continue;
            }
            std::size_t o = *at;
            at = origin.erase(at);
            origin.insert(at, members, o);
        }
        origins_per_word.push_back(std::move(origin));
        out.shared.push_back(w.trace.steps.empty() || !w.trace.steps.front().rule ? Binding{}
                                                                                  : w.trace.steps.front().binding);
    }

    out.parts.assign(k, GenResult{});
    for (std::size_t w = 0; w < all.words.size(); ++w) {
        std::vector<std::vector<Protonotion>> pieces(k);
        const auto& word = all.words[w].word;
        for (std::size_t i = 0; i < word.size(); ++i) pieces[origins_per_word[w][i]].push_back(word[i]);
        for (std::size_t p = 0; p < k; ++p) out.parts[p].words.push_back({std::move(pieces[p]), all.words[w].trace});
    }
    for (auto& part : out.parts) {
        part.truncated = all.truncated;
        part.truncation = all.truncation;
    }
    return out;
}

std::string render_word(const std::vector<Protonotion>& word, TerminalConvention convention) {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i && convention == TerminalConvention::NoMatch) out += ' ';
        out += word[i].marks;
    }
    return out;
}

std::string render_form(const SententialForm& form) {
    std::string out;
    for (std::size_t i = 0; i < form.notions.size(); ++i) {
        if (i) out += ' ';
        const auto& n = form.notions[i];
        out += n.status == NotionStatus::Terminal ? "'" + n.text.marks + "'" : n.text.marks;
    }
    return out;
}

std::vector<Protonotion> parse_input_word(const std::string& text) {
    std::vector<Protonotion> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.emplace_back(cur);
        cur.clear();
    };
    for (char c : text) {
        if (c == ';' || c == '\n') {
            flush();
        } else if (c != ' ' && c != '\t' && c != '\r') {
            cur += c;
        }
    }
    flush();
    return out;
}

} // namespace vw
