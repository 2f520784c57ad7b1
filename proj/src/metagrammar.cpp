#include "vwgen/metagrammar.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_set>

#include "vwgen/error.hpp"

namespace vw {

MetaGrammar::MetaGrammar(const VWGrammar& g) {
    for (const auto& [name, _] : g.metarules) names_.push_back(name);
    alts_of_.resize(names_.size());
    for (const auto& [name, rule] : g.metarules) {
        int lhs = index_of(name);
        for (const auto& alt : rule.alternatives) {
            Alternative a{lhs, {}};
            for (const auto& s : alt.segments) {
                if (s.is_meta()) {
                    int id = index_of(s.meta().name);
                    if (id < 0) throw Error(ErrorCode::UnknownMetanotion, "undefined metanotion " + s.meta().name.name);
                    a.body.push_back({true, id});
                } else {
                    for (char c : s.chunk().marks.marks) a.body.push_back({false, static_cast<unsigned char>(c)});
                }
            }
            alts_of_[static_cast<std::size_t>(lhs)].push_back(static_cast<int>(alts_.size()));
            alts_.push_back(std::move(a));
        }
    }

    const std::size_t n = names_.size();
    nullable_.assign(n, false);
    productive_.assign(n, false);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& a : alts_) {
            auto lhs = static_cast<std::size_t>(a.lhs);
            bool null = std::all_of(a.body.begin(), a.body.end(), [&](const Symbol& s) {
                return s.nonterminal && nullable_[static_cast<std::size_t>(s.value)];
            });
            bool prod = std::all_of(a.body.begin(), a.body.end(), [&](const Symbol& s) {
                return !s.nonterminal || productive_[static_cast<std::size_t>(s.value)];
            });
            if (null && !nullable_[lhs]) nullable_[lhs] = changed = true;
            if (prod && !productive_[lhs]) productive_[lhs] = changed = true;
        }
    }
}

int MetaGrammar::index_of(const MetanotionName& m) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), m);
    if (it == names_.end() || !(*it == m)) return -1;
    return static_cast<int>(it - names_.begin());
}

bool MetaGrammar::defines(const MetanotionName& m) const { return index_of(m) >= 0; }

namespace {

[[noreturn]] void unknown(const MetanotionName& m) {
    throw Error(ErrorCode::UnknownMetanotion, "undefined metanotion " + m.name);
}

} // namespace

bool MetaGrammar::is_nullable(const MetanotionName& m) const {
    int id = index_of(m);
    if (id < 0) unknown(m);
    return nullable_[static_cast<std::size_t>(id)];
}

bool MetaGrammar::is_productive(const MetanotionName& m) const {
    int id = index_of(m);
    if (id < 0) unknown(m);
    return productive_[static_cast<std::size_t>(id)];
}

bool MetaGrammar::contains(const MetanotionName& m, std::string_view marks) const {
    auto ends = ends_from(m, marks, 0, marks.size());
    return !ends.empty() && ends.back() == marks.size();
}

// Earley recognition from `start`, with nullable prediction handled in the
// predictor (Aycock & Horspool), so empty alternatives and cycles are fine.
std::vector<std::size_t> MetaGrammar::ends_from(const MetanotionName& m, std::string_view text,
                                                std::size_t start, std::size_t max_len) const {
    int root = index_of(m);
    if (root < 0) unknown(m);
    if (start > text.size()) return {};
    const std::size_t n = std::min(text.size() - start, max_len);

    struct Item {
        int alt;
        std::uint32_t dot;
        std::uint32_t origin;
    };
    auto key = [](const Item& it) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(it.alt)) << 40) |
               (static_cast<std::uint64_t>(it.dot) << 24) | it.origin;
    };
    std::vector<std::vector<Item>> sets(n + 1);
    std::vector<std::unordered_set<std::uint64_t>> seen(n + 1);
    auto add = [&](std::size_t pos, Item it) {
        if (seen[pos].insert(key(it)).second) sets[pos].push_back(it);
    };

    for (int a : alts_of_[static_cast<std::size_t>(root)]) add(0, {a, 0, 0});

    std::vector<std::size_t> ends;
    for (std::size_t pos = 0; pos <= n; ++pos) {
        for (std::size_t k = 0; k < sets[pos].size(); ++k) {
            const Item it = sets[pos][k];
            const auto& alt = alts_[static_cast<std::size_t>(it.alt)];
            if (it.dot < alt.body.size()) {
                const auto& sym = alt.body[it.dot];
                if (sym.nonterminal) {
                    auto nt = static_cast<std::size_t>(sym.value);
                    for (int a : alts_of_[nt]) add(pos, {a, 0, static_cast<std::uint32_t>(pos)});
                    if (nullable_[nt]) add(pos, {it.alt, it.dot + 1, it.origin});
                } else if (pos < n && static_cast<unsigned char>(text[start + pos]) == sym.value) {
                    add(pos + 1, {it.alt, it.dot + 1, it.origin});
                }
                continue;
            }
            if (it.origin == 0 && alt.lhs == root) ends.push_back(start + pos);
            const auto& parents = sets[it.origin];
            for (std::size_t p = 0; p < parents.size(); ++p) {
                const Item parent = parents[p];
                const auto& palt = alts_[static_cast<std::size_t>(parent.alt)];
                if (parent.dot < palt.body.size() && palt.body[parent.dot].nonterminal &&
                    palt.body[parent.dot].value == alt.lhs)
                    add(pos, {parent.alt, parent.dot + 1, parent.origin});
            }
        }
    }
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    return ends;
}

std::vector<bool> MetaGrammar::reachable_from(int root) const {
    std::vector<bool> seen(names_.size(), false);
    std::vector<int> stack{root};
    seen[static_cast<std::size_t>(root)] = true;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int a : alts_of_[static_cast<std::size_t>(x)]) {
            const auto& alt = alts_[static_cast<std::size_t>(a)];
            bool useful = std::all_of(alt.body.begin(), alt.body.end(), [&](const Symbol& s) {
                return !s.nonterminal || productive_[static_cast<std::size_t>(s.value)];
            });
            if (!useful) continue;
            for (const auto& s : alt.body) {
                if (!s.nonterminal || seen[static_cast<std::size_t>(s.value)]) continue;
                seen[static_cast<std::size_t>(s.value)] = true;
                stack.push_back(s.value);
            }
        }
    }
    return seen;
}

// L(m) is infinite iff some useful nonterminal X reachable from m derives
// u X v with uv nonempty.
bool MetaGrammar::is_finite(const MetanotionName& m) const {
    int root = index_of(m);
    if (root < 0) unknown(m);
    if (!productive_[static_cast<std::size_t>(root)]) return true;

    const std::size_t n = names_.size();
    auto useful = [&](const Alternative& alt) {
        return std::all_of(alt.body.begin(), alt.body.end(), [&](const Symbol& s) {
            return !s.nonterminal || productive_[static_cast<std::size_t>(s.value)];
        });
    };
    std::vector<bool> grows(n, false); // derives some nonempty protonotion
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& alt : alts_) {
            if (!useful(alt) || grows[static_cast<std::size_t>(alt.lhs)]) continue;
            bool g = std::any_of(alt.body.begin(), alt.body.end(), [&](const Symbol& s) {
                return !s.nonterminal || grows[static_cast<std::size_t>(s.value)];
            });
            if (g) grows[static_cast<std::size_t>(alt.lhs)] = changed = true;
        }
    }

    auto from_root = reachable_from(root);
    for (std::size_t x = 0; x < n; ++x) {
        if (!from_root[x]) continue;
        for (int a : alts_of_[x]) {
            const auto& alt = alts_[static_cast<std::size_t>(a)];
            if (!useful(alt)) continue;
            for (std::size_t p = 0; p < alt.body.size(); ++p) {
                if (!alt.body[p].nonterminal) continue;
                bool growing = false;
                for (std::size_t q = 0; q < alt.body.size() && !growing; ++q)
                    if (q != p) growing = !alt.body[q].nonterminal || grows[static_cast<std::size_t>(alt.body[q].value)];
                if (!growing) continue;
                if (reachable_from(alt.body[p].value)[x]) return false;
            }
        }
    }
    return true;
}

namespace {

using Cell = std::set<std::string>;

// Keep only the `cap` smallest strings of a cell (all share one length, so
// std::string order is the canonical order).
void trim_cell(Cell& c, std::size_t cap) {
    while (c.size() > cap) c.erase(std::prev(c.end()));
}

} // namespace

MetaEnumeration MetaGrammar::enumerate(const MetanotionName& m, std::size_t max_len, std::size_t max_items) const {
    int root = index_of(m);
    if (root < 0) unknown(m);
    MetaEnumeration out{m, {}, false};

    const std::size_t n = names_.size();
    const auto reach = reachable_from(root);
    const bool finite = is_finite(m);

    // Longest word of a finite language: longest-path relaxation, which
    // converges because no growing cycle is reachable from m.
    const long kNone = -1;
    long top = kNone;
    if (finite) {
        std::vector<long> longest(n, kNone);
        for (std::size_t round = 0; round <= n + 1; ++round) {
            for (const auto& alt : alts_) {
                if (!reach[static_cast<std::size_t>(alt.lhs)]) continue;
                long sum = 0;
                for (const auto& s : alt.body) {
                    if (!s.nonterminal) {
                        ++sum;
                        continue;
                    }
                    long v = longest[static_cast<std::size_t>(s.value)];
                    if (v == kNone) {
                        sum = kNone;
                        break;
                    }
                    sum += v;
                }
                auto& cur = longest[static_cast<std::size_t>(alt.lhs)];
                cur = std::max(cur, sum);
            }
        }
        top = longest[static_cast<std::size_t>(root)];
    }
    const std::size_t last_len = finite ? std::min(max_len, static_cast<std::size_t>(std::max(top, 0L))) : max_len;

    // Capping every cell at cap smallest items keeps the cap smallest of every
    // concatenation exact, because fixed-length concatenation preserves order.
    const std::size_t cap = max_items == kUnbounded ? kUnbounded : max_items + 1;
    std::vector<std::vector<Cell>> lang(n, std::vector<Cell>(last_len + 1));

    std::size_t total = 0;
    for (std::size_t len = 0; len <= last_len; ++len) {
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& alt : alts_) {
                if (!reach[static_cast<std::size_t>(alt.lhs)]) continue;
                // prefix[l]: strings of length l derivable from the members seen so far
                std::vector<Cell> prefix(len + 1);
                prefix[0].insert(std::string());
                for (const auto& sym : alt.body) {
                    std::vector<Cell> next(len + 1);
                    for (std::size_t l1 = 0; l1 <= len; ++l1) {
                        if (prefix[l1].empty()) continue;
                        if (!sym.nonterminal) {
                            if (l1 + 1 > len) continue;
                            for (const auto& s : prefix[l1]) next[l1 + 1].insert(s + static_cast<char>(sym.value));
                            trim_cell(next[l1 + 1], cap);
                            continue;
                        }
                        const auto& cells = lang[static_cast<std::size_t>(sym.value)];
                        for (std::size_t l2 = 0; l1 + l2 <= len; ++l2) {
                            if (cells[l2].empty()) continue;
                            auto& dst = next[l1 + l2];
                            for (const auto& a : prefix[l1]) {
                                for (const auto& b : cells[l2]) {
                                    std::string s = a + b;
                                    dst.insert(s);
                                    if (dst.size() <= cap) continue;
                                    trim_cell(dst, cap);
                                    // later b only give larger strings for this a
                                    if (!dst.count(s)) break;
                                }
                            }
                        }
                    }
                    prefix = std::move(next);
                }
                auto& target = lang[static_cast<std::size_t>(alt.lhs)][len];
                std::size_t before = target.size();
                std::string last = before ? *target.rbegin() : std::string();
                target.insert(prefix[len].begin(), prefix[len].end());
                trim_cell(target, cap);
                if (target.size() != before || (before && *target.rbegin() != last)) changed = true;
            }
        }
        for (const auto& s : lang[static_cast<std::size_t>(root)][len]) {
            if (out.produced.size() < max_items) out.produced.emplace_back(s);
            ++total;
        }
        // longer words come after everything listed so far
        if (total > max_items) break;
    }

    out.exhausted = finite && total <= max_items && (top == kNone || static_cast<std::size_t>(top) <= max_len);
    return out;
}

bool meta_contains(const VWGrammar& g, const MetanotionName& m, const Protonotion& p) {
    return MetaGrammar(g).contains(m, p.marks);
}

MetaEnumeration enumerate_meta(const VWGrammar& g, const MetanotionName& m, std::size_t max_len,
                               std::size_t max_items) {
    return MetaGrammar(g).enumerate(m, max_len, max_items);
}

bool is_meta_finite(const VWGrammar& g, const MetanotionName& m) { return MetaGrammar(g).is_finite(m); }

std::vector<MetanotionName> empty_language_metanotions(const VWGrammar& g) {
    MetaGrammar meta(g);
    std::vector<MetanotionName> out;
    for (const auto& [name, _] : g.metarules)
        if (!meta.is_productive(name)) out.push_back(name);
    return out;
}

} // namespace vw
