#include "vwgen/toyisa.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>

#include "vwgen/error.hpp"
#include "vwgen/rng.hpp"

namespace vw::isa {

namespace {

constexpr std::array<std::pair<std::string_view, Opcode>, 11> kOpcodes{{
    {"mov", Opcode::Mov},
    {"push", Opcode::Push},
    {"pop", Opcode::Pop},
    {"add", Opcode::Add},
    {"sub", Opcode::Sub},
    {"inc", Opcode::Inc},
    {"dec", Opcode::Dec},
    {"xor", Opcode::Xor},
    {"and", Opcode::And},
    {"or", Opcode::Or},
    {"not", Opcode::Not},
}};

constexpr std::array<std::pair<std::string_view, Register>, kRegisterCount> kRegisters{{
    {"eax", Register::Eax},
    {"ebx", Register::Ebx},
    {"ecx", Register::Ecx},
    {"edx", Register::Edx},
    {"esp", Register::Esp},
}};

std::optional<Opcode> opcode_named(std::string_view s) {
    for (const auto& [name, op] : kOpcodes)
        if (name == s) return op;
    return std::nullopt;
}

std::optional<Register> register_named(std::string_view s) {
    for (const auto& [name, r] : kRegisters)
        if (name == s) return r;
    return std::nullopt;
}

std::optional<std::uint64_t> parse_number(std::string_view s) {
    std::uint64_t v = 0;
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        s.remove_prefix(2);
        base = 16;
    }
    if (s.empty()) return std::nullopt;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

struct Token {
    enum Kind { Word, LBracket, RBracket, Comma, Separator } kind;
    std::string text;
    std::size_t line;
};

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t line = 1;
    for (std::size_t i = 0; i < text.size();) {
        char c = text[i];
        if (c == '\n' || c == ';') {
            out.push_back({Token::Separator, std::string(1, c), line});
            if (c == '\n') ++line;
            ++i;
        } else if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
        } else if (c == '[') {
            out.push_back({Token::LBracket, "[", line});
            ++i;
        } else if (c == ']') {
            out.push_back({Token::RBracket, "]", line});
            ++i;
        } else if (c == ',') {
            out.push_back({Token::Comma, ",", line});
            ++i;
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            out.push_back({Token::Word, std::string(text.substr(i, j - i)), line});
            i = j;
        } else {
            throw Error(ErrorCode::BadInstruction,
                        "line " + std::to_string(line) + ": unexpected character '" + std::string(1, c) + "'");
        }
    }
    return out;
}

[[noreturn]] void bad(std::size_t line, const std::string& why) {
    throw Error(ErrorCode::BadInstruction, "line " + std::to_string(line) + ": " + why);
}

std::uint64_t immediate(const Token& t, const Constants& constants) {
    if (auto v = parse_number(t.text)) return *v;
    if (auto it = constants.find(t.text); it != constants.end()) return it->second;
    bad(t.line, "unknown operand '" + t.text + "'");
}

bool is_memory(const Operand& o) {
    return std::holds_alternative<MemAtRegister>(o) || std::holds_alternative<MemAtAddress>(o);
}

bool is_writable(const Operand& o) { return !std::holds_alternative<Immediate>(o); }

void check_shape(const Instruction& ins, std::size_t line) {
    const auto& ops = ins.operands;
    auto name = std::string(to_string(ins.op));
    switch (ins.op) {
    case Opcode::Mov: case Opcode::Add: case Opcode::Sub:
    case Opcode::Xor: case Opcode::And: case Opcode::Or:
        if (ops.size() != 2) bad(line, name + " takes 2 operands");
        if (!is_writable(ops[0])) bad(line, name + " cannot write an immediate");
        if (is_memory(ops[0]) && is_memory(ops[1])) bad(line, name + " cannot take two memory operands");
        return;
    case Opcode::Push:
        if (ops.size() != 1) bad(line, "push takes 1 operand");
        return;
    case Opcode::Pop: case Opcode::Inc: case Opcode::Dec: case Opcode::Not:
        if (ops.size() != 1) bad(line, name + " takes 1 operand");
        if (!is_writable(ops[0])) bad(line, name + " cannot write an immediate");
        return;
    }
}

} // namespace

std::string_view to_string(Opcode op) {
    for (const auto& [name, o] : kOpcodes)
        if (o == op) return name;
    return "?";
}

std::string_view to_string(Register r) { return kRegisters[static_cast<std::size_t>(r)].first; }

ToyProgram parse_program(std::string_view text, const Constants& constants) {
    ToyProgram program;
    auto tokens = lex(text);
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (tokens[i].kind == Token::Separator) {
            ++i;
            continue;
        }
        const Token& head = tokens[i];
        auto op = head.kind == Token::Word ? opcode_named(head.text) : std::nullopt;
        if (!op) bad(head.line, "expected a mnemonic, got '" + head.text + "'");
        Instruction ins{*op, {}};
        ++i;
        bool want_operand = true;
        while (i < tokens.size() && tokens[i].kind != Token::Separator) {
            const Token& t = tokens[i];
            if (t.kind == Token::Word && opcode_named(t.text)) break;
            if (t.kind == Token::Comma) {
                if (want_operand) bad(t.line, "misplaced ','");
                want_operand = true;
                ++i;
                continue;
            }
            if (!want_operand) bad(t.line, "missing ',' between operands");
            if (t.kind == Token::LBracket) {
                if (i + 2 >= tokens.size() || tokens[i + 1].kind != Token::Word ||
                    tokens[i + 2].kind != Token::RBracket)
                    bad(t.line, "malformed memory operand");
                const Token& inner = tokens[i + 1];
                if (auto r = register_named(inner.text))
                    ins.operands.emplace_back(MemAtRegister{*r});
                else
                    ins.operands.emplace_back(MemAtAddress{immediate(inner, constants)});
                i += 3;
            } else if (t.kind == Token::Word) {
                if (auto r = register_named(t.text))
                    ins.operands.emplace_back(*r);
                else
                    ins.operands.emplace_back(Immediate{immediate(t, constants)});
                ++i;
            } else {
                bad(t.line, "unexpected '" + t.text + "'");
            }
            want_operand = false;
        }
        if (want_operand && !ins.operands.empty()) bad(head.line, "trailing ','");
        check_shape(ins, head.line);
        program.instructions.push_back(std::move(ins));
    }
    return program;
}

namespace {

std::string render_operand(const Operand& o) {
    if (auto* r = std::get_if<Register>(&o)) return std::string(to_string(*r));
    if (auto* imm = std::get_if<Immediate>(&o)) return std::to_string(imm->value);
    if (auto* m = std::get_if<MemAtRegister>(&o)) return "[ " + std::string(to_string(m->reg)) + " ]";
    std::ostringstream os;
    os << "[ 0x" << std::hex << std::get<MemAtAddress>(o).address << " ]";
    return os.str();
}

} // namespace

std::string render_program(const ToyProgram& p) {
    std::string out;
    for (const auto& ins : p.instructions) {
        out += to_string(ins.op);
        for (std::size_t k = 0; k < ins.operands.size(); ++k) out += (k ? ", " : " ") + render_operand(ins.operands[k]);
        out += '\n';
    }
    return out;
}

std::uint64_t MachineState::load(std::uint64_t address) const {
    auto it = memory.find(address);
    return it == memory.end() ? 0 : it->second;
}

MachineState exec(const ToyProgram& p, MachineState s, std::size_t fuel, const ExecConfig& cfg) {
    if (fuel < p.instructions.size())
        throw Error(ErrorCode::OutOfFuel, "program has " + std::to_string(p.instructions.size()) +
                                              " instructions but fuel is " + std::to_string(fuel));
    auto address = [&](const Operand& o) -> std::uint64_t {
        if (auto* m = std::get_if<MemAtRegister>(&o)) return s.reg(m->reg);
        return std::get<MemAtAddress>(o).address;
    };
    auto read = [&](const Operand& o) -> std::uint64_t {
        if (auto* r = std::get_if<Register>(&o)) return s.reg(*r);
        if (auto* imm = std::get_if<Immediate>(&o)) return imm->value;
        return s.load(address(o));
    };
    auto write = [&](const Operand& o, std::uint64_t v) {
        if (auto* r = std::get_if<Register>(&o))
            s.reg(*r) = v;
        else
            s.memory[address(o)] = v;
    };

    std::size_t index = 0;
    for (const auto& ins : p.instructions) {
        ++index;
        const auto& ops = ins.operands;
        std::uint64_t& esp = s.reg(Register::Esp);
        switch (ins.op) {
        case Opcode::Mov: write(ops[0], read(ops[1])); break;
        case Opcode::Add: write(ops[0], read(ops[0]) + read(ops[1])); break;
        case Opcode::Sub: write(ops[0], read(ops[0]) - read(ops[1])); break;
        case Opcode::Xor: write(ops[0], read(ops[0]) ^ read(ops[1])); break;
        case Opcode::And: write(ops[0], read(ops[0]) & read(ops[1])); break;
        case Opcode::Or: write(ops[0], read(ops[0]) | read(ops[1])); break;
        case Opcode::Inc: write(ops[0], read(ops[0]) + 1); break;
        case Opcode::Dec: write(ops[0], read(ops[0]) - 1); break;
        case Opcode::Not: write(ops[0], ~read(ops[0])); break;
        case Opcode::Push: {
            std::uint64_t v = read(ops[0]);
            esp -= 4;
            s.memory[esp] = v;
            break;
        }
        case Opcode::Pop: {
            std::uint64_t v = s.load(esp);
            esp += 4;
            write(ops[0], v);
            break;
        }
        }
        std::uint64_t top = s.reg(Register::Esp);
        if (top < cfg.stack_lo || top > cfg.stack_hi)
            throw Error(ErrorCode::StackBounds, "instruction " + std::to_string(index) + " moved esp out of the stack");
    }
    return s;
}

bool IgnoreSet::ignores(std::uint64_t address) const {
    for (const auto& [lo, hi] : memory)
        if (address >= lo && address < hi) return true;
    return false;
}

Equivalence equivalent(const ToyProgram& p1, const ToyProgram& p2, const std::vector<MachineState>& probes,
                       const IgnoreSet& ignore, const ExecConfig& cfg) {
    for (std::size_t k = 0; k < probes.size(); ++k) {
        MachineState a, b;
        try {
            a = exec(p1, probes[k], p1.instructions.size(), cfg);
            b = exec(p2, probes[k], p2.instructions.size(), cfg);
        } catch (const Error& e) {
            return {false, "probe " + std::to_string(k) + ": " + std::string(to_string(e.code())) + ": " + e.what()};
        }
        for (std::size_t r = 0; r < kRegisterCount; ++r) {
            auto reg = static_cast<Register>(r);
            if (ignore.registers.count(reg) || a.reg(reg) == b.reg(reg)) continue;
            return {false, "probe " + std::to_string(k) + ": " + std::string(to_string(reg)) + " differs (" +
                               std::to_string(a.reg(reg)) + " vs " + std::to_string(b.reg(reg)) + ")"};
        }
        std::set<std::uint64_t> cells;
        for (const auto& [addr, _] : a.memory) cells.insert(addr);
        for (const auto& [addr, _] : b.memory) cells.insert(addr);
        for (auto addr : cells) {
            if (ignore.ignores(addr) || a.load(addr) == b.load(addr)) continue;
            std::ostringstream os;
            os << "probe " << k << ": memory [0x" << std::hex << addr << "] differs";
            return {false, os.str()};
        }
    }
    return {true, {}};
}

std::vector<MachineState> random_probes(std::size_t n, std::uint64_t seed, const ExecConfig& cfg) {
    std::vector<MachineState> out;
    for (std::size_t k = 0; k < n; ++k) {
        auto rng = SplitMix64::stream(seed, k);
        MachineState s;
        for (std::size_t r = 0; r < kRegisterCount; ++r) {
            auto reg = static_cast<Register>(r);
            if (reg == Register::Esp) {
                s.reg(reg) = cfg.stack_hi;
                continue;
            }
            std::uint64_t v;
            do {
                v = rng.next();
            } while (v >= cfg.stack_lo && v <= cfg.stack_hi);
            s.reg(reg) = v;
            s.memory[v] = rng.next();
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<MachineState> parse_probes(std::string_view text, const ExecConfig& cfg) {
    std::vector<MachineState> out;
    std::optional<MachineState> cur;
    std::size_t line_no = 0;
    auto fresh = [&] {
        MachineState s;
        s.reg(Register::Esp) = cfg.stack_hi;
        return s;
    };
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string compact;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
        if (compact.empty()) {
            if (cur) out.push_back(std::move(*cur));
            cur.reset();
            continue;
        }
        auto eq = compact.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::BadProbe, "line " + std::to_string(line_no) + ": expected name=value");
        std::string name = compact.substr(0, eq);
        auto value = parse_number(std::string_view(compact).substr(eq + 1));
        if (!value) throw Error(ErrorCode::BadProbe, "line " + std::to_string(line_no) + ": bad value");
        if (!cur) cur = fresh();
        if (auto r = register_named(name)) {
            cur->reg(*r) = *value;
        } else if (name.size() > 2 && name.front() == '[' && name.back() == ']') {
            auto addr = parse_number(std::string_view(name).substr(1, name.size() - 2));
            if (!addr) throw Error(ErrorCode::BadProbe, "line " + std::to_string(line_no) + ": bad address");
            cur->memory[*addr] = *value;
        } else {
            throw Error(ErrorCode::BadProbe, "line " + std::to_string(line_no) + ": unknown location " + name);
        }
    }
    if (cur) out.push_back(std::move(*cur));
    return out;
}

IgnoreSet scratch_locations(const ExecConfig& cfg) {
    IgnoreSet s;
    s.registers.insert(Register::Ecx);
    s.memory.emplace_back(cfg.stack_lo, cfg.stack_hi);
    return s;
}

} // namespace vw::isa
