#include "vwgen/audit.hpp"

#include "vwgen/error.hpp"

namespace vw {

AuditReport audit(const VWGrammar& g, const std::string& program_text, const AuditConfig& cfg) {
    const auto original = isa::parse_program(program_text, cfg.constants);
    const auto probes = cfg.probes.empty() ? isa::random_probes(16, cfg.probe_seed, cfg.exec) : cfg.probes;

    AuditReport report;
    GenResult variants;
    try {
        variants = transform(g, parse_input_word(program_text), cfg.generation);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoDerivation) throw;
        report.note = e.what();
        return report;
    }

    for (const auto& v : variants.words) {
        VariantVerdict verdict;
        verdict.text = render_word(v.word, TerminalConvention::NoMatch);
        try {
            auto program = isa::parse_program(verdict.text, cfg.constants);
            auto eq = isa::equivalent(original, program, probes, cfg.ignore, cfg.exec);
            verdict.status = eq.equivalent ? VariantVerdict::Status::Pass : VariantVerdict::Status::Fail;
            verdict.diagnostic = eq.diagnostic;
        } catch (const Error& e) {
            verdict.status = VariantVerdict::Status::Unparseable;
            verdict.diagnostic = e.what();
        }
        switch (verdict.status) {
        case VariantVerdict::Status::Pass: ++report.passed; break;
        case VariantVerdict::Status::Fail: ++report.failed; break;
        case VariantVerdict::Status::Unparseable: ++report.unparseable; break;
        }
        report.variants.push_back(std::move(verdict));
    }
    if (variants.truncated) report.note = "variants cut off by " + variants.truncation;
    return report;
}

} // namespace vw
