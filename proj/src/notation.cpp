#include "vwgen/notation.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "vwgen/error.hpp"
#include "vwgen/metagrammar.hpp"

namespace vw {

bool ValidationReport::has_error(std::string_view code) const {
    for (const auto& d : errors)
        if (d.code == code) return true;
    return false;
}

namespace {

constexpr std::string_view kEmptyToken = "EMPTY";

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

struct PosChar {
    char c;
    std::size_t line;
    std::size_t col;
    bool quoted;
};

using CharRun = std::vector<PosChar>;

struct RawRule {
    CharRun text;
};

SourceSpan span_of(const CharRun& run, std::size_t from, std::size_t len) {
    if (run.empty()) return {};
    from = std::min(from, run.size() - 1);
    const auto& first = run[from];
    std::size_t n = 1;
    while (n < len && from + n < run.size() && run[from + n].line == first.line) ++n;
    return {first.line, first.col, n};
}

SourceSpan span_of(const CharRun& run) { return span_of(run, 0, run.size()); }

CharRun trim(const CharRun& run) {
    std::size_t b = 0, e = run.size();
    while (b < e && is_blank(run[b].c) && !run[b].quoted) ++b;
    while (e > b && is_blank(run[e - 1].c) && !run[e - 1].quoted) --e;
    return CharRun(run.begin() + static_cast<std::ptrdiff_t>(b), run.begin() + static_cast<std::ptrdiff_t>(e));
}

std::string plain(const CharRun& run) {
    std::string s;
    for (const auto& pc : run) s += pc.c;
    return s;
}

std::vector<CharRun> split_unquoted(const CharRun& run, char sep) {
    std::vector<CharRun> parts(1);
    for (const auto& pc : run) {
        if (pc.c == sep && !pc.quoted)
            parts.emplace_back();
        else
            parts.back().push_back(pc);
    }
    return parts;
}

struct ScanResult {
    std::vector<RawRule> rules;
    std::vector<Diagnostic> errors;
};

ScanResult scan(std::string_view text) {
    ScanResult out;
    CharRun current;
    std::size_t line = 1, col = 1;
    auto has_content = [](const CharRun& r) {
        for (const auto& pc : r)
            if (!is_blank(pc.c) || pc.quoted) return true;
        return false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '#') {
            while (i + 1 < text.size() && text[i + 1] != '\n') {
                ++i;
                ++col;
            }
            ++col;
            continue;
        }
        if (c == '\'' && i + 2 < text.size() && text[i + 1] == ',' && text[i + 2] == '\'') {
            current.push_back({',', line, col, true});
            i += 2;
            col += 3;
            continue;
        }
        if (c == '.') {
            if (has_content(current))
                out.rules.push_back({std::move(current)});
            else
                out.errors.push_back({"SyntaxError", "empty rule before '.'", {line, col, 1}});
            current.clear();
        } else {
            current.push_back({c, line, col, false});
        }
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    if (has_content(current)) {
        auto t = trim(current);
        out.errors.push_back({"SyntaxError", "rule is not terminated by '.'", span_of(t)});
    }
    return out;
}

struct TokenizeError {
    std::string code;
    std::string message;
    std::size_t offset;
    std::size_t len;
};

using TokenizeOutcome = std::variant<Hypernotion, TokenizeError>;

// Number of ways (capped at 2) to tile `run` by `names`, plus the first tiling.
std::pair<int, std::vector<std::string>> tile(std::string_view run, const std::set<MetanotionName>& names) {
    const std::size_t n = run.size();
    std::vector<int> ways(n + 1, 0);
    std::vector<std::size_t> pick(n + 1, 0);
    ways[n] = 1;
    for (std::size_t k = n; k-- > 0;) {
        for (const auto& name : names) {
            const auto& s = name.name;
            if (s.empty() || k + s.size() > n || run.compare(k, s.size(), s) != 0) continue;
            int w = ways[k + s.size()];
            if (w == 0) continue;
            if (ways[k] == 0) pick[k] = s.size();
            ways[k] = std::min(2, ways[k] + w);
        }
    }
    std::vector<std::string> tiling;
    if (ways[0] > 0) {
        for (std::size_t k = 0; k < n; k += pick[k]) tiling.emplace_back(run.substr(k, pick[k]));
    }
    return {ways[0], tiling};
}

TokenizeOutcome tokenize_core(std::string_view body, const std::set<MetanotionName>& names,
                              std::string_view start_name) {
    std::vector<Segment> segs;
    bool blank = false;
    std::size_t i = 0;
    while (i < body.size()) {
        char c = body[i];
        if (is_blank(c)) {
            blank = true;
            ++i;
            continue;
        }
        std::size_t j = i;
        if (is_big_mark(c)) {
            while (j < body.size() && is_big_mark(body[j])) ++j;
            std::string_view run = body.substr(i, j - i);
            auto [ways, tiling] = tile(run, names);
            if (ways == 0) {
                if (!start_name.empty() && run == start_name) {
                    segs.push_back(Segment{Chunk{Protonotion(std::string(run)), std::string(run)}, blank});
                } else {
                    return TokenizeError{"UndefinedMetanotion",
                                         "'" + std::string(run) + "' is not made of defined metanotions", i, j - i};
                }
            } else if (ways > 1) {
                return TokenizeError{"AmbiguousHypernotion",
                                     "'" + std::string(run) + "' splits into metanotions in more than one way", i,
                                     j - i};
            } else {
                bool first = true;
                for (auto& name : tiling) {
                    segs.push_back(meta_segment(MetanotionName(std::move(name)), first && blank));
                    first = false;
                }
            }
        } else {
            while (j < body.size() && !is_blank(body[j]) && !is_big_mark(body[j])) ++j;
            segs.push_back(chunk_segment(body.substr(i, j - i), blank));
        }
        blank = false;
        i = j;
    }
    return fuse(std::move(segs));
}

bool contains_empty_token(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_big_mark(s[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && is_big_mark(s[j])) ++j;
        if (s.substr(i, j - i) == kEmptyToken) return true;
        i = j;
    }
    return false;
}

class RuleBuilder {
public:
    RuleBuilder(const std::set<MetanotionName>& names, std::string start_name)
        : names_(names), start_name_(std::move(start_name)) {}

    std::optional<Diagnostic> member(const CharRun& raw, Hypernotion& out) const {
        CharRun run = trim(raw);
        if (run.empty()) return Diagnostic{"SyntaxError", "empty member", span_of(raw)};
        for (std::size_t k = 0; k < run.size(); ++k) {
            const auto& pc = run[k];
            if (pc.quoted || is_blank(pc.c) || is_big_mark(pc.c)) continue;
            if (pc.c == ',' || !is_small_mark(pc.c))
                return Diagnostic{"SyntaxError", std::string("unexpected character '") + pc.c + "'",
                                  span_of(run, k, 1)};
        }
        std::string body = plain(run);
        if (contains_empty_token(body))
            return Diagnostic{"SyntaxError", "EMPTY must be the only member of its alternative", span_of(run)};
        auto outcome = tokenize_core(body, names_, start_name_);
        if (auto* err = std::get_if<TokenizeError>(&outcome))
            return Diagnostic{err->code, err->message, span_of(run, err->offset, err->len)};
        out = std::get<Hypernotion>(std::move(outcome));
        if (out.empty()) return Diagnostic{"SyntaxError", "empty member", span_of(run)};
        return std::nullopt;
    }

    static bool is_empty_alternative(const CharRun& raw) { return plain(trim(raw)) == kEmptyToken; }

private:
    const std::set<MetanotionName>& names_;
    std::string start_name_;
};

struct RuleShape {
    bool is_meta = false;
    CharRun lhs;
    CharRun rhs;
};

std::optional<Diagnostic> split_rule(const RawRule& rule, RuleShape& shape) {
    const auto& t = rule.text;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k].c != ':' || t[k].quoted) continue;
        shape.is_meta = k + 1 < t.size() && t[k + 1].c == ':' && !t[k + 1].quoted;
        shape.lhs.assign(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k));
        shape.rhs.assign(t.begin() + static_cast<std::ptrdiff_t>(k + (shape.is_meta ? 2 : 1)), t.end());
        for (std::size_t r = 0; r < shape.rhs.size(); ++r)
            if (shape.rhs[r].c == ':' && !shape.rhs[r].quoted)
                return Diagnostic{"SyntaxError", "unexpected ':' in right-hand side", span_of(shape.rhs, r, 1)};
        if (trim(shape.lhs).empty())
            return Diagnostic{"SyntaxError", "missing left-hand side", span_of(trim(t), 0, 1)};
        return std::nullopt;
    }
    return Diagnostic{"SyntaxError", "expected ':' or '::'", span_of(trim(t))};
}

std::string render_chunk_display(const std::string& display) {
    std::string out;
    for (char c : display) {
        if (c == ',')
            out += "','";
        else
            out += c;
    }
    return out;
}

bool touches_upper(const std::string& s, bool at_front) {
    if (s.empty()) return false;
    return is_big_mark(at_front ? s.front() : s.back());
}

} // namespace

ParseResult parse_grammar(std::string_view text) {
    ParseResult result;
    auto& report = result.report;
    auto scanned = scan(text);
    report.errors = scanned.errors;

    std::vector<RuleShape> shapes;
    for (const auto& raw : scanned.rules) {
        RuleShape shape;
        if (auto d = split_rule(raw, shape)) {
            report.errors.push_back(*d);
            continue;
        }
        shapes.push_back(std::move(shape));
    }

    // Pass 1: metanotion names.
    VWGrammar g;
    std::set<MetanotionName> names;
    std::vector<bool> ok(shapes.size(), true);
    for (std::size_t r = 0; r < shapes.size(); ++r) {
        if (!shapes[r].is_meta) continue;
        CharRun lhs = trim(shapes[r].lhs);
        std::string name = plain(lhs);
        bool valid = !name.empty();
        for (char c : name) valid = valid && is_big_mark(c);
        if (!valid) {
            report.errors.push_back({"SyntaxError", "metanotion name must be a run of uppercase letters", span_of(lhs)});
            ok[r] = false;
        } else if (name == kEmptyToken) {
            report.errors.push_back({"SyntaxError", "EMPTY is reserved", span_of(lhs)});
            ok[r] = false;
        } else if (!names.insert(MetanotionName(name)).second) {
            report.errors.push_back({"DuplicateMetarule", "metanotion " + name + " is defined twice", span_of(lhs)});
            ok[r] = false;
        }
    }

    // The first hyperrule's left-hand side may be a bare uppercase start name.
    std::string start_name;
    for (const auto& shape : shapes) {
        if (shape.is_meta) continue;
        std::string lhs;
        for (const auto& pc : shape.lhs)
            if (!is_blank(pc.c)) lhs += pc.c;
        bool upper = !lhs.empty();
        for (char c : lhs) upper = upper && is_big_mark(c);
        if (upper && lhs != kEmptyToken && tile(lhs, names).first == 0) start_name = lhs;
        break;
    }
    g.start_name = start_name;

    // Pass 2: bodies.
    RuleBuilder builder(names, start_name);
    for (std::size_t r = 0; r < shapes.size(); ++r) {
        if (!ok[r]) continue;
        const auto& shape = shapes[r];
        auto alts = split_unquoted(shape.rhs, ';');
        std::optional<Diagnostic> err;
        if (shape.is_meta) {
            Metarule rule{MetanotionName(plain(trim(shape.lhs))), {}};
            for (const auto& alt : alts) {
                if (RuleBuilder::is_empty_alternative(alt)) {
                    rule.alternatives.emplace_back();
                    continue;
                }
                for (std::size_t k = 0; k < alt.size() && !err; ++k)
                    if (alt[k].c == ',' && !alt[k].quoted)
                        err = Diagnostic{"SyntaxError", "metarule members are separated by blanks, not ','",
                                         span_of(alt, k, 1)};
                Hypernotion h;
                if (!err) err = builder.member(alt, h);
                if (err) break;
                rule.alternatives.push_back(std::move(h));
            }
            if (err) {
                report.errors.push_back(*err);
                continue;
            }
            g.metarules.emplace(rule.lhs, std::move(rule));
        } else {
            Hyperrule rule;
            for (std::size_t k = 0; k < shape.lhs.size() && !err; ++k)
                if (shape.lhs[k].c == ',' && !shape.lhs[k].quoted)
                    err = Diagnostic{"SyntaxError", "unexpected ',' in left-hand side", span_of(shape.lhs, k, 1)};
            if (!err) err = builder.member(shape.lhs, rule.lhs);
            for (std::size_t a = 0; a < alts.size() && !err; ++a) {
                if (RuleBuilder::is_empty_alternative(alts[a])) {
                    rule.alternatives.emplace_back();
                    continue;
                }
                HyperAlternative alternative;
                for (const auto& raw_member : split_unquoted(alts[a], ',')) {
                    Hypernotion h;
                    if ((err = builder.member(raw_member, h))) break;
                    alternative.push_back(std::move(h));
                }
                rule.alternatives.push_back(std::move(alternative));
            }
            if (err) {
                report.errors.push_back(*err);
                continue;
            }
            g.hyperrules.push_back(std::move(rule));
        }
    }

    if (!report.ok()) return result;

    for (const auto& [_, rule] : g.metarules)
        for (const auto& alt : rule.alternatives)
            for (const auto& s : alt.segments)
                if (!s.is_meta())
                    for (char c : s.chunk().marks.marks) g.small_alphabet.insert(c);
    bool symbol_suffix = false;
    for (const auto& rule : g.hyperrules) {
        for (const auto* h : {&rule.lhs})
            for (const auto& s : h->segments)
                if (!s.is_meta())
                    for (char c : s.chunk().marks.marks) g.small_alphabet.insert(c);
        for (const auto& alt : rule.alternatives)
            for (const auto& member : alt) {
                for (const auto& s : member.segments)
                    if (!s.is_meta())
                        for (char c : s.chunk().marks.marks) g.small_alphabet.insert(c);
                if (!member.segments.empty() && !member.segments.back().is_meta()) {
                    const auto& m = member.segments.back().chunk().marks.marks;
                    if (m.size() >= kSymbolSuffix.size() &&
                        m.compare(m.size() - kSymbolSuffix.size(), kSymbolSuffix.size(), kSymbolSuffix) == 0)
                        symbol_suffix = true;
                }
            }
    }
    g.terminal_convention = symbol_suffix ? TerminalConvention::SymbolSuffix : TerminalConvention::NoMatch;

    if (!g.hyperrules.empty() && g.hyperrules.front().lhs.is_ground())
        g.start = g.hyperrules.front().lhs;
    else
        report.warnings.push_back({"NoStart",
                                   "the first hyperrule's left-hand side is not ground; only transformation of "
                                   "input words is available",
                                   {}});

    for (const auto& name : empty_language_metanotions(g))
        report.warnings.push_back({"EmptyLanguage", "metanotion " + name.name + " produces no protonotion", {}});

    result.grammar = std::move(g);
    return result;
}

VWGrammar parse_grammar_or_throw(std::string_view text) {
    auto result = parse_grammar(text);
    if (!result.grammar) {
        std::ostringstream os;
        os << "grammar has errors:";
        for (const auto& d : result.report.errors)
            os << "\n  " << d.span.line << ':' << d.span.col << ": " << d.code << ": " << d.message;
        throw std::runtime_error(os.str());
    }
    return std::move(*result.grammar);
}

Hypernotion tokenize_hypernotion(std::string_view body, const std::set<MetanotionName>& names,
                                 std::string_view start_name) {
    std::string cooked;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body.compare(i, 3, "','") == 0) {
            cooked += ',';
            i += 2;
        } else {
            cooked += body[i];
        }
    }
    auto outcome = tokenize_core(cooked, names, start_name);
    if (auto* err = std::get_if<TokenizeError>(&outcome)) {
        auto code = err->code == "AmbiguousHypernotion" ? ErrorCode::AmbiguousHypernotion
                                                        : ErrorCode::UnknownMetanotion;
        throw Error(code, err->message);
    }
    return std::get<Hypernotion>(std::move(outcome));
}

std::string render_hypernotion(const Hypernotion& h) {
    std::string out;
    bool after_meta = false;
    for (const auto& s : h.segments) {
        std::string piece = s.is_meta() ? s.meta().name.name : render_chunk_display(s.chunk().display);
        // adjacent metanotions keep their source spelling ("AN"); they tiled
        // uniquely when read, so they tile the same way again
        bool joined_metas = after_meta && s.is_meta();
        after_meta = s.is_meta();
        bool sep = s.blank_before || (!joined_metas && touches_upper(out, false) && touches_upper(piece, true));
        if (sep && !out.empty()) out += ' ';
        out += piece;
    }
    return out;
}

namespace {

std::string render_alternative(const HyperAlternative& alt) {
    if (alt.empty()) return std::string(kEmptyToken);
    std::string out;
    for (std::size_t i = 0; i < alt.size(); ++i) {
        if (i) out += ", ";
        out += render_hypernotion(alt[i]);
    }
    return out;
}

} // namespace

std::string render_hyperrule(const Hyperrule& r) {
    std::string out = render_hypernotion(r.lhs) + " :";
    for (std::size_t a = 0; a < r.alternatives.size(); ++a) {
        out += a ? "; " : " ";
        out += render_alternative(r.alternatives[a]);
    }
    return out + ".";
}

std::string render_grammar(const VWGrammar& g) {
    std::ostringstream os;
    for (const auto& [name, rule] : g.metarules) {
        os << name.name << " ::";
        for (std::size_t a = 0; a < rule.alternatives.size(); ++a) {
            os << (a ? "; " : " ");
            const auto& alt = rule.alternatives[a];
            os << (alt.empty() ? std::string(kEmptyToken) : render_hypernotion(alt));
        }
        os << ".\n";
    }
    if (!g.metarules.empty() && !g.hyperrules.empty()) os << '\n';
    for (const auto& rule : g.hyperrules) os << render_hyperrule(rule) << '\n';
    return os.str();
}

std::string render_ground_rule(const Hyperrule& rule, const Binding& b) {
    std::string out = render_chunk_display(ground_display(rule.lhs, b)) + " :";
    for (std::size_t a = 0; a < rule.alternatives.size(); ++a) {
        out += a ? "; " : " ";
        const auto& alt = rule.alternatives[a];
        if (alt.empty()) {
            out += kEmptyToken;
            continue;
        }
        for (std::size_t m = 0; m < alt.size(); ++m) {
            if (m) out += ", ";
            out += render_chunk_display(ground_display(alt[m], b));
        }
    }
    return out + ".";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace vw
