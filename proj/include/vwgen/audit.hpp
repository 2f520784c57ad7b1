#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vwgen/derivation.hpp"
#include "vwgen/toyisa.hpp"

namespace vw {

struct AuditConfig {
    GenerationConfig generation;
    isa::Constants constants;
    std::vector<isa::MachineState> probes; // empty: 16 seeded random probes
    std::uint64_t probe_seed = 1;
    isa::IgnoreSet ignore = isa::scratch_locations();
    isa::ExecConfig exec;
};

struct VariantVerdict {
    enum class Status { Pass, Fail, Unparseable };
    std::string text;
    Status status = Status::Pass;
    std::string diagnostic;
};

struct AuditReport {
    std::vector<VariantVerdict> variants;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t unparseable = 0;
    std::string note; // why no variant was produced, if none was

    bool ok() const noexcept { return failed == 0 && unparseable == 0; }
};

/// Rewrite `program_text` with the grammar and check every variant against
/// the original on the interpreter. Throws Error(BadInstruction) if the
/// original program itself does not parse.
AuditReport audit(const VWGrammar& g, const std::string& program_text, const AuditConfig& cfg);

} // namespace vw
