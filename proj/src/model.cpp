#include "vwgen/model.hpp"

#include "vwgen/error.hpp"

namespace vw {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnboundMetanotion: return "UnboundMetanotion";
    case ErrorCode::UnknownMetanotion: return "UnknownMetanotion";
    case ErrorCode::AmbiguousHypernotion: return "AmbiguousHypernotion";
    case ErrorCode::NoStart: return "NoStart";
    case ErrorCode::NoDerivation: return "NoDerivation";
    case ErrorCode::BadInstruction: return "BadInstruction";
    case ErrorCode::StackBounds: return "StackBounds";
    case ErrorCode::OutOfFuel: return "OutOfFuel";
    case ErrorCode::BadProbe: return "BadProbe";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

std::string_view to_string(TerminalConvention c) {
    return c == TerminalConvention::SymbolSuffix ? "symbol-suffix" : "no-match";
}

bool is_small_mark(char c) noexcept {
    if (c >= 'a' && c <= 'z') return true;
    if (c >= '0' && c <= '9') return true;
    switch (c) {
    case '[': case ']': case '(': case ')': case '<': case '>':
    case '\'': case ',': case '-':
        return true;
    default:
        return false;
    }
}

Protonotion operator+(const Protonotion& a, const Protonotion& b) {
    return Protonotion(a.marks + b.marks);
}

Segment meta_segment(MetanotionName name, bool blank_before) {
    return Segment{MetaRef{std::move(name)}, blank_before};
}

Segment chunk_segment(std::string_view marks, bool blank_before) {
    return Segment{Chunk{Protonotion(std::string(marks)), std::string(marks)}, blank_before};
}

bool Hypernotion::is_ground() const noexcept {
    for (const auto& s : segments)
        if (s.is_meta()) return false;
    return true;
}

std::set<MetanotionName> Hypernotion::metanotions() const {
    std::set<MetanotionName> out;
    for (const auto& s : segments)
        if (s.is_meta()) out.insert(s.meta().name);
    return out;
}

Hypernotion fuse(std::vector<Segment> segments) {
    Hypernotion out;
    for (auto& s : segments) {
        if (!s.is_meta() && s.chunk().marks.empty()) continue;
        if (!s.is_meta() && !out.segments.empty() && !out.segments.back().is_meta()) {
            auto& prev = std::get<Chunk>(out.segments.back().item);
            const auto& next = s.chunk();
            prev.marks.marks += next.marks.marks;
            if (s.blank_before) prev.display += ' ';
            prev.display += next.display;
            continue;
        }
        out.segments.push_back(std::move(s));
    }
    return out;
}

Hypernotion concat(const Hypernotion& a, const Hypernotion& b) {
    std::vector<Segment> all = a.segments;
    all.insert(all.end(), b.segments.begin(), b.segments.end());
    return fuse(std::move(all));
}

std::set<MetanotionName> Hyperrule::metanotions() const {
    auto out = lhs.metanotions();
    for (const auto& alt : alternatives)
        for (const auto& member : alt) {
            auto m = member.metanotions();
            out.insert(m.begin(), m.end());
        }
    return out;
}

const Metarule* VWGrammar::find_metarule(const MetanotionName& name) const {
    auto it = metarules.find(name);
    return it == metarules.end() ? nullptr : &it->second;
}

std::set<MetanotionName> VWGrammar::metanotion_names() const {
    std::set<MetanotionName> out;
    for (const auto& [name, _] : metarules) out.insert(name);
    return out;
}

const Protonotion* Binding::find(const MetanotionName& name) const {
    auto it = entries.find(name);
    return it == entries.end() ? nullptr : &it->second;
}

namespace {

const Protonotion& lookup(const Binding& b, const MetanotionName& name) {
    const auto* p = b.find(name);
    if (!p) throw Error(ErrorCode::UnboundMetanotion, "unbound metanotion " + name.name);
    return *p;
}

} // namespace

Protonotion ground(const Hypernotion& h, const Binding& b) {
    std::string out;
    for (const auto& s : h.segments)
        out += s.is_meta() ? lookup(b, s.meta().name).marks : s.chunk().marks.marks;
    return Protonotion(std::move(out));
}

std::string ground_display(const Hypernotion& h, const Binding& b) {
    std::string out;
    for (const auto& s : h.segments) {
        if (s.blank_before && !out.empty()) out += ' ';
        out += s.is_meta() ? lookup(b, s.meta().name).marks : s.chunk().display;
    }
    return out;
}

bool SententialForm::has_open() const noexcept { return leftmost_open().has_value(); }

std::optional<std::size_t> SententialForm::leftmost_open() const noexcept {
    for (std::size_t i = 0; i < notions.size(); ++i)
        if (notions[i].status == NotionStatus::Open) return i;
    return std::nullopt;
}

SententialForm open_form(const std::vector<Protonotion>& notions) {
    SententialForm f;
    for (const auto& n : notions) f.notions.push_back({n, NotionStatus::Open});
    return f;
}

} // namespace vw
