#pragma once

// A small straight-line instruction set used as a semantic oracle for
// rewritten programs. Not x86: 64-bit words, no flags, no control flow, and
// push/pop move esp by 4.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace vw::isa {

enum class Opcode { Mov, Push, Pop, Add, Sub, Inc, Dec, Xor, And, Or, Not };
enum class Register { Eax, Ebx, Ecx, Edx, Esp };

inline constexpr std::size_t kRegisterCount = 5;

std::string_view to_string(Opcode op);
std::string_view to_string(Register r);

struct Immediate {
    std::uint64_t value;
    friend bool operator==(const Immediate&, const Immediate&) = default;
};
struct MemAtRegister {
    Register reg;
    friend bool operator==(const MemAtRegister&, const MemAtRegister&) = default;
};
struct MemAtAddress {
    std::uint64_t address;
    friend bool operator==(const MemAtAddress&, const MemAtAddress&) = default;
};

using Operand = std::variant<Register, Immediate, MemAtRegister, MemAtAddress>;

struct Instruction {
    Opcode op;
    std::vector<Operand> operands;
    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct ToyProgram {
    std::vector<Instruction> instructions;
    friend bool operator==(const ToyProgram&, const ToyProgram&) = default;
};

using Constants = std::map<std::string, std::uint64_t, std::less<>>;

/// Instructions are separated by newlines or `;`. A new instruction also
/// starts at every mnemonic, so blank-separated token streams such as
/// "push 0 pop eax" parse too. Symbolic immediates resolve through `constants`.
/// Throws Error(BadInstruction).
ToyProgram parse_program(std::string_view text, const Constants& constants = {});

std::string render_program(const ToyProgram& p);

struct MachineState {
    std::array<std::uint64_t, kRegisterCount> registers{};
    std::map<std::uint64_t, std::uint64_t> memory; // unwritten cells read as 0

    std::uint64_t& reg(Register r) { return registers[static_cast<std::size_t>(r)]; }
    std::uint64_t reg(Register r) const { return registers[static_cast<std::size_t>(r)]; }
    std::uint64_t load(std::uint64_t address) const;

    friend bool operator==(const MachineState&, const MachineState&) = default;
};

struct ExecConfig {
    std::uint64_t stack_lo = 0x10000; // esp must stay within [stack_lo, stack_hi]
    std::uint64_t stack_hi = 0x80000;
};

/// Throws Error(OutOfFuel) if the program is longer than `fuel`, and
/// Error(StackBounds) if esp leaves the stack window.
MachineState exec(const ToyProgram& p, MachineState init, std::size_t fuel, const ExecConfig& cfg = {});

/// Locations whose final values are not compared.
struct IgnoreSet {
    std::set<Register> registers;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> memory; // half-open ranges

    bool ignores(std::uint64_t address) const;
};

struct Equivalence {
    bool equivalent = false;
    std::string diagnostic;
};

Equivalence equivalent(const ToyProgram& p1, const ToyProgram& p2, const std::vector<MachineState>& probes,
                       const IgnoreSet& ignore, const ExecConfig& cfg = {});

/// `n` seeded probe states: esp at the top of the stack window, other
/// registers random and kept outside the window, and a random memory cell
/// behind each of them.
std::vector<MachineState> random_probes(std::size_t n, std::uint64_t seed, const ExecConfig& cfg = {});

/// Probe file: blocks separated by blank lines, one `name=value` per line,
/// where name is a register or `[address]`. Throws Error(BadProbe).
std::vector<MachineState> parse_probes(std::string_view text, const ExecConfig& cfg = {});

/// The scratch set used for auditing rewrites: ecx and the stack below the
/// window top.
IgnoreSet scratch_locations(const ExecConfig& cfg = {});

} // namespace vw::isa
