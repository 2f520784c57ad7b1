#include "vwgen/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

#include "vwgen/audit.hpp"
#include "vwgen/derivation.hpp"
#include "vwgen/error.hpp"
#include "vwgen/matcher.hpp"
#include "vwgen/metagrammar.hpp"
#include "vwgen/notation.hpp"
#include "vwgen/toyisa.hpp"

namespace vw::cli {

namespace {

using nlohmann::json;

struct GenFlags {
    std::size_t max_steps = 200;
    std::size_t max_forms = 100000;
    std::size_t max_notion_len = 64;
    std::size_t max_words = 1000;
    std::size_t free_meta_len = 8;
    std::size_t max_depth = 0;
    std::uint64_t seed = 0;
    std::string mode = "exhaustive";
    std::string convention;
    std::string trace_path;

    GenerationConfig config() const {
        GenerationConfig c;
        c.mode = mode == "random" ? GenerationMode::Random : GenerationMode::Exhaustive;
        c.seed = seed;
        c.max_steps = max_steps;
        c.max_forms = max_forms;
        c.max_notion_len = max_notion_len;
        c.max_words = max_words;
        c.free_meta_len = free_meta_len;
        c.max_depth = max_depth;
        if (convention == "symbol-suffix") c.convention = TerminalConvention::SymbolSuffix;
        if (convention == "no-match") c.convention = TerminalConvention::NoMatch;
        return c;
    }
};

void add_generation_flags(CLI::App* cmd, GenFlags& f) {
    cmd->add_option("--max-steps", f.max_steps, "rule applications per derivation")->check(CLI::PositiveNumber);
    cmd->add_option("--max-forms", f.max_forms, "sentential forms ever queued")->check(CLI::PositiveNumber);
    cmd->add_option("--max-notion-len", f.max_notion_len, "marks per notion")->check(CLI::PositiveNumber);
    cmd->add_option("--max-words", f.max_words, "words to emit")->check(CLI::PositiveNumber);
    cmd->add_option("--free-meta-len", f.free_meta_len, "longest value tried for a free metanotion")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-depth", f.max_depth, "derivation-tree depth of a notion (0: unbounded)");
    cmd->add_option("--seed", f.seed, "seed for random mode");
    cmd->add_option("--mode", f.mode, "exhaustive or random")->check(CLI::IsMember({"exhaustive", "random"}));
    cmd->add_option("--terminal-convention", f.convention, "symbol-suffix or no-match")
        ->check(CLI::IsMember({"symbol-suffix", "no-match"}));
    cmd->add_option("--trace", f.trace_path, "write derivation traces to this file");
}

class GrammarLoadError : public std::runtime_error {
public:
    GrammarLoadError(int code) : std::runtime_error("grammar"), exit_code(code) {}
    int exit_code;
};

void print_diagnostics(const std::string& path, const ValidationReport& report, std::ostream& err) {
    for (const auto& d : report.errors)
        err << path << ':' << d.span.line << ':' << d.span.col << ": error: " << d.code << ": " << d.message << '\n';
    for (const auto& d : report.warnings) err << path << ": warning: " << d.code << ": " << d.message << '\n';
}

VWGrammar load_grammar(const std::string& path, std::ostream& err) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception& e) {
        err << "vwgen: " << e.what() << '\n';
        throw GrammarLoadError(kExitUsage);
    }
    auto parsed = parse_grammar(text);
    if (!parsed.grammar) {
        print_diagnostics(path, parsed.report, err);
        throw GrammarLoadError(kExitFailure);
    }
    return std::move(*parsed.grammar);
}

std::string binding_text(const Binding& b) {
    std::string out;
    for (const auto& [name, value] : b.entries) {
        if (!out.empty()) out += ' ';
        out += name.name + "=" + value.marks;
    }
    return out;
}

json binding_json(const Binding& b) {
    json j = json::object();
    for (const auto& [name, value] : b.entries) j[name.name] = value.marks;
    return j;
}

void write_traces(const std::string& path, const GenResult& result) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t w = 0; w < result.words.size(); ++w) {
        const auto& steps = result.words[w].trace.steps;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const auto& s = steps[i];
            out << "word " << w << " step " << i << " rule " << (s.rule ? std::to_string(*s.rule) : "-")
                << " notion " << s.notion << " alt " << s.alternative;
            if (!s.binding.entries.empty()) out << ' ' << binding_text(s.binding);
            out << '\n';
        }
    }
}

void print_words(const GenResult& result, TerminalConvention convention, bool as_json, std::ostream& out,
                 std::ostream& err) {
    for (const auto& w : result.words) {
        if (as_json) {
            json j;
            j["text"] = render_word(w.word, convention);
            j["notions"] = json::array();
            for (const auto& n : w.word) j["notions"].push_back(n.marks);
            j["steps"] = w.trace.steps.size();
            out << j.dump() << '\n';
        } else {
            out << render_word(w.word, convention) << '\n';
        }
    }
    if (result.truncated) err << "vwgen: note: output bounded by " << result.truncation << '\n';
}

int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception& e) {
        err << "vwgen: " << e.what() << '\n';
        return kExitUsage;
    }
    auto parsed = parse_grammar(text);
    print_diagnostics(path, parsed.report, err);
    if (!parsed.grammar) return kExitFailure;
    const auto& g = *parsed.grammar;
    out << "ok: " << g.metarules.size() << " metarules, " << g.hyperrules.size() << " hyperrules, start "
        << (g.start ? render_hypernotion(*g.start) : std::string("(none)")) << ", convention "
        << to_string(g.terminal_convention) << '\n';
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-level (Van Wijngaarden) grammar engine", "vwgen"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::string grammar_path;
    std::string input;
    bool as_json = false;
    GenFlags gen;

    auto* check = app.add_subcommand("check", "validate a grammar file");
    check->add_option("grammar", grammar_path, "grammar file")->required();

    auto* meta = app.add_subcommand("meta", "query a metanotion's language");
    std::string meta_name, contains;
    std::size_t meta_len = 6, meta_items = 100;
    meta->add_option("grammar", grammar_path, "grammar file")->required();
    meta->add_option("metanotion", meta_name, "metanotion name")->required();
    meta->add_option("--max-len", meta_len, "longest protonotion listed");
    meta->add_option("--max-items", meta_items, "protonotions listed");
    meta->add_option("--contains", contains, "only test membership of this protonotion");
    meta->add_flag("--json", as_json, "JSON output");

    auto* match = app.add_subcommand("match", "match a notion against hyperrule left-hand sides");
    long rule_index = -1;
    match->add_option("grammar", grammar_path, "grammar file")->required();
    match->add_option("--input", input, "ground notion")->required();
    match->add_option("--rule", rule_index, "only this hyperrule (0-based)");
    match->add_flag("--json", as_json, "JSON output");

    auto* generate_cmd = app.add_subcommand("generate", "enumerate or sample words of the language");
    generate_cmd->add_option("grammar", grammar_path, "grammar file")->required();
    add_generation_flags(generate_cmd, gen);
    generate_cmd->add_flag("--json", as_json, "JSON output");

    auto* transform_cmd = app.add_subcommand("transform", "derive variants of an input word");
    bool echo_fixpoint = false;
    transform_cmd->add_option("grammar", grammar_path, "grammar file")->required();
    transform_cmd->add_option("--input", input, "input word; ';' or newline separates notions")->required();
    add_generation_flags(transform_cmd, gen);
    transform_cmd->add_flag("--json", as_json, "JSON output");
    transform_cmd->add_flag("--echo-fixpoint", echo_fixpoint, "print the input itself when nothing derives");

    auto* split = app.add_subcommand("split", "derive k-part words and write each part to its own file");
    std::string out_dir;
    split->add_option("grammar", grammar_path, "grammar file")->required();
    split->add_option("--out", out_dir, "output directory")->required();
    add_generation_flags(split, gen);
    split->add_flag("--json", as_json, "JSON summary");

    auto* audit_cmd = app.add_subcommand("audit", "check that every variant of a program is equivalent");
    std::string probes_path;
    std::size_t probe_count = 16;
    std::uint64_t probe_seed = 1;
    std::vector<std::string> consts;
    audit_cmd->add_option("grammar", grammar_path, "grammar file")->required();
    audit_cmd->add_option("--input", input, "program text")->required();
    audit_cmd->add_option("--probes", probes_path, "probe state file (name=value blocks)");
    audit_cmd->add_option("--probe-count", probe_count, "random probes when no file is given")
        ->check(CLI::PositiveNumber);
    audit_cmd->add_option("--probe-seed", probe_seed, "seed for random probes");
    audit_cmd->add_option("--const", consts, "symbolic immediate, name=value");
    add_generation_flags(audit_cmd, gen);
    audit_cmd->add_flag("--json", as_json, "JSON output");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check(grammar_path, out, err);

        const VWGrammar g = load_grammar(grammar_path, err);

        if (meta->parsed()) {
            MetaGrammar mg(g);
            if (!mg.defines(MetanotionName(meta_name))) {
                err << "vwgen: " << meta_name << " is not a metanotion of " << grammar_path << '\n';
                return kExitUsage;
            }
            if (meta->count("--contains")) {
                bool yes = mg.contains(MetanotionName(meta_name), contains);
                out << (yes ? "yes" : "no") << '\n';
                return kExitOk;
            }
            auto e = mg.enumerate(MetanotionName(meta_name), meta_len, meta_items);
            bool finite = mg.is_finite(MetanotionName(meta_name));
            if (as_json) {
                json j;
                j["metanotion"] = meta_name;
                j["finite"] = finite;
                j["exhausted"] = e.exhausted;
                j["produced"] = json::array();
                for (const auto& p : e.produced) j["produced"].push_back(p.marks);
                out << j.dump() << '\n';
                return kExitOk;
            }
            out << meta_name << ' ' << (finite ? "finite" : "infinite") << '\n';
            for (const auto& p : e.produced) out << (p.empty() ? std::string("EMPTY") : p.marks) << '\n';
            out << "exhausted: " << (e.exhausted ? "yes" : "no") << '\n';
            return kExitOk;
        }

        if (match->parsed()) {
            Protonotion target;
            for (const auto& p : parse_input_word(input)) target.marks += p.marks;
            Matcher matcher(g);
            bool any = false;
            for (std::size_t r = 0; r < g.hyperrules.size(); ++r) {
                if (rule_index >= 0 && static_cast<std::size_t>(rule_index) != r) continue;
                auto m = matcher.match(target, g.hyperrules[r].lhs);
                for (const auto& sol : m.solutions) {
                    any = true;
                    if (as_json) {
                        json j;
                        j["rule"] = r;
                        j["binding"] = binding_json(sol.binding);
                        j["segmentation"] = json::array();
                        for (const auto& s : sol.segmentation)
                            j["segmentation"].push_back({s.segment, s.begin, s.end});
                        out << j.dump() << '\n';
                    } else {
                        out << "rule " << r << ": " << render_hyperrule(g.hyperrules[r]) << '\n';
                        out << "  " << (sol.binding.entries.empty() ? "(no metanotions)" : binding_text(sol.binding))
                            << '\n';
                    }
                }
                if (m.truncated) err << "vwgen: note: rule " << r << " matches bounded by " << m.truncation << '\n';
            }
            if (!any && !as_json) out << "no hyperrule matches " << target.marks << '\n';
            return kExitOk;
        }

        const auto cfg = gen.config();
        const auto convention = cfg.convention.value_or(g.terminal_convention);

        if (generate_cmd->parsed()) {
            auto result = generate(g, cfg);
            print_words(result, convention, as_json, out, err);
            write_traces(gen.trace_path, result);
            return kExitOk;
        }

        if (transform_cmd->parsed()) {
            auto word = parse_input_word(input);
            try {
                auto result = transform(g, word, cfg);
                print_words(result, convention, as_json, out, err);
                write_traces(gen.trace_path, result);
                return kExitOk;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NoDerivation) throw;
                err << "vwgen: " << to_string(e.code()) << ": " << e.what() << '\n';
                if (!echo_fixpoint) return kExitFailure;
                GenResult echo;
                echo.words.push_back({word, {}});
                print_words(echo, convention, as_json, out, err);
                return kExitOk;
            }
        }

        if (split->parsed()) {
            auto result = split_parts(g, cfg);
            namespace fs = std::filesystem;
            fs::create_directories(out_dir);
            for (std::size_t p = 0; p < result.parts.size(); ++p) {
                std::ofstream f(fs::path(out_dir) / ("part" + std::to_string(p + 1) + ".txt"));
                for (const auto& w : result.parts[p].words) f << render_word(w.word, convention) << '\n';
            }
            std::ofstream shared(fs::path(out_dir) / "shared.txt");
            for (const auto& b : result.shared) shared << binding_text(b) << '\n';
            const std::size_t derivations = result.shared.size();
            if (as_json) {
                json j;
                j["parts"] = result.parts.size();
                j["derivations"] = derivations;
                j["truncated"] = result.truncated;
                out << j.dump() << '\n';
            } else {
                out << result.parts.size() << " parts, " << derivations << " derivations written to " << out_dir
                    << '\n';
            }
            if (result.truncated) err << "vwgen: note: output bounded by " << result.truncation << '\n';
            return kExitOk;
        }

        if (audit_cmd->parsed()) {
            AuditConfig acfg;
            acfg.generation = cfg;
            acfg.probe_seed = probe_seed;
            for (const auto& c : consts) {
                auto eq = c.find('=');
                if (eq == std::string::npos) {
                    err << "vwgen: --const expects name=value, got " << c << '\n';
                    return kExitUsage;
                }
                acfg.constants[c.substr(0, eq)] = std::stoull(c.substr(eq + 1), nullptr, 0);
            }
            if (!probes_path.empty())
                acfg.probes = isa::parse_probes(read_text_file(probes_path), acfg.exec);
            else
                acfg.probes = isa::random_probes(probe_count, probe_seed, acfg.exec);
            auto report = audit(g, input, acfg);
            for (const auto& v : report.variants) {
                const char* tag = v.status == VariantVerdict::Status::Pass   ? "PASS"
                                  : v.status == VariantVerdict::Status::Fail ? "FAIL"
                                                                             : "UNPARSEABLE";
                if (as_json) {
                    json j;
                    j["status"] = tag;
                    j["variant"] = v.text;
                    if (!v.diagnostic.empty()) j["diagnostic"] = v.diagnostic;
                    out << j.dump() << '\n';
                } else {
                    out << tag << ' ' << v.text;
                    if (!v.diagnostic.empty()) out << "  # " << v.diagnostic;
                    out << '\n';
                }
            }
            out << report.variants.size() << " variants: " << report.passed << " passed, " << report.failed
                << " failed, " << report.unparseable << " unparseable\n";
            if (!report.note.empty()) err << "vwgen: note: " << report.note << '\n';
            return report.ok() ? kExitOk : kExitFailure;
        }
    } catch (const GrammarLoadError& e) {
        return e.exit_code;
    } catch (const Error& e) {
        err << "vwgen: " << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "vwgen: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace vw::cli
