#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "union_find.hpp"
#include "word.hpp"

namespace fracmetric {

/// psi_cell(P_boundary): a point of V^(1) before identification.
struct CellPoint {
    int cell = 0;
    int boundary = 0;
    friend auto operator<=>(const CellPoint&, const CellPoint&) = default;
};

/// psi_a.cell(P_a.boundary) = psi_b.cell(P_b.boundary).
struct Glue {
    CellPoint a;
    CellPoint b;
};

/// Combinatorial description of a finitely ramified self-similar set: k cell
/// maps, the first N of whose fixed points form V^(0), and the level-1
/// identifications between boundary images.
struct FractalSpec {
    std::string name;
    int k = 0;
    int n = 0;
    std::vector<Glue> glues;
};

class SpecError : public std::runtime_error {
public:
    enum class Kind { Syntax, DuplicateGlue, IndexOutOfRange, NonInjectiveGlue };

    SpecError(Kind kind, int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

    Kind kind() const { return kind_; }
    int line() const { return line_; }

private:
    Kind kind_;
    int line_;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline bool parse_int(std::string_view s, int& out) {
    if (s.empty() || s.size() > 9 || s.find_first_not_of("0123456789") != std::string_view::npos) return false;
    out = std::stoi(std::string(s));
    return true;
}

} // namespace detail

/// Reads the line-oriented spec format:
///
///     fractal <name>
///     cells <k>
///     boundary <N>
///     glue <i>.<j> = <i'>.<j'>
///
/// `#` starts a comment. Axioms are not checked here; see validate_spec.
inline FractalSpec parse_spec(std::string_view text) {
    using K = SpecError::Kind;
    FractalSpec spec;
    bool have_name = false;
    std::vector<std::pair<int, std::string>> glue_lines;

    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string line(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto toks = detail::split_ws(line);
        if (toks.empty()) continue;

        const auto& kw = toks[0];
        if (kw == "fractal") {
            if (toks.size() != 2) throw SpecError(K::Syntax, lineno, "expected 'fractal <name>'");
            if (have_name) throw SpecError(K::Syntax, lineno, "duplicate 'fractal' line");
            spec.name = toks[1];
            have_name = true;
        } else if (kw == "cells" || kw == "boundary") {
            int v = 0;
            if (toks.size() != 2 || !detail::parse_int(toks[1], v))
                throw SpecError(K::Syntax, lineno, "expected '" + kw + " <integer>'");
            int& slot = kw == "cells" ? spec.k : spec.n;
            if (slot != 0) throw SpecError(K::Syntax, lineno, "duplicate '" + kw + "' line");
            if (v == 0) throw SpecError(K::IndexOutOfRange, lineno, kw + " must be positive");
            slot = v;
        } else if (kw == "glue") {
            // Re-join so that "1.2=2.1" and "1.2 = 2.1" are both accepted.
            std::string rest;
            for (size_t t = 1; t < toks.size(); ++t) rest += toks[t];
            glue_lines.emplace_back(lineno, rest);
        } else {
            throw SpecError(K::Syntax, lineno, "unknown keyword '" + kw + "'");
        }
    }
    if (!have_name) throw SpecError(K::Syntax, lineno, "missing 'fractal <name>'");
    if (spec.k == 0) throw SpecError(K::Syntax, lineno, "missing 'cells <k>'");
    if (spec.n == 0) throw SpecError(K::Syntax, lineno, "missing 'boundary <N>'");
    if (spec.k < 2 || spec.k > 255) throw SpecError(K::IndexOutOfRange, lineno, "cells must be in 2..255");
    if (spec.n < 2 || spec.n > spec.k) throw SpecError(K::IndexOutOfRange, lineno, "boundary must be in 2..cells");

    auto parse_point = [&](const std::string& s, int ln) {
        auto dot = s.find('.');
        CellPoint p;
        if (dot == std::string::npos || !detail::parse_int(s.substr(0, dot), p.cell) ||
            !detail::parse_int(s.substr(dot + 1), p.boundary))
            throw SpecError(K::Syntax, ln, "expected '<cell>.<boundary>', got '" + s + "'");
        if (p.cell < 1 || p.cell > spec.k)
            throw SpecError(K::IndexOutOfRange, ln, "cell index " + std::to_string(p.cell) + " out of range");
        if (p.boundary < 1 || p.boundary > spec.n)
            throw SpecError(K::IndexOutOfRange, ln, "boundary index " + std::to_string(p.boundary) + " out of range");
        return p;
    };

    std::set<std::pair<CellPoint, CellPoint>> seen;
    for (const auto& [ln, rest] : glue_lines) {
        auto eq = rest.find('=');
        if (eq == std::string::npos || rest.find('=', eq + 1) != std::string::npos)
            throw SpecError(K::Syntax, ln, "expected 'glue <i>.<j> = <i'>.<j'>'");
        Glue g{parse_point(rest.substr(0, eq), ln), parse_point(rest.substr(eq + 1), ln)};
        if (g.a.cell == g.b.cell) throw SpecError(K::NonInjectiveGlue, ln, "glue within a single cell");
        auto key = std::minmax(g.a, g.b);
        if (!seen.insert({key.first, key.second}).second) throw SpecError(K::DuplicateGlue, ln, "duplicate glue");
        spec.glues.push_back(g);
    }
    return spec;
}

inline std::string format_spec(const FractalSpec& spec) {
    std::ostringstream out;
    out << "fractal " << spec.name << "\ncells " << spec.k << "\nboundary " << spec.n << '\n';
    for (const auto& g : spec.glues)
        out << "glue " << g.a.cell << '.' << g.a.boundary << " = " << g.b.cell << '.' << g.b.boundary << '\n';
    return out.str();
}

struct ValidationReport {
    struct Check {
        std::string axiom;
        bool passed = true;
        std::string detail;
    };
    std::vector<Check> checks;

    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
    const Check* find(std::string_view axiom) const {
        for (const auto& c : checks)
            if (c.axiom == axiom) return &c;
        return nullptr;
    }
};

/// Checks the structural axioms on the level-1 identification closure.
/// Never throws on a malformed spec; every problem becomes a failed entry.
inline ValidationReport validate_spec(const FractalSpec& spec) {
    ValidationReport report;
    auto add = [&](std::string axiom, bool passed, std::string detail) {
        report.checks.push_back({std::move(axiom), passed, std::move(detail)});
    };

    bool ranges_ok = spec.k >= 2 && spec.k <= 255 && spec.n >= 2 && spec.n <= spec.k;
    std::string range_detail = ranges_ok ? "" : "need 2 <= boundary <= cells <= 255";
    for (const auto& g : spec.glues)
        for (const auto& p : {g.a, g.b})
            if (ranges_ok && (p.cell < 1 || p.cell > spec.k || p.boundary < 1 || p.boundary > spec.n)) {
                ranges_ok = false;
                range_detail = "glue point " + std::to_string(p.cell) + "." + std::to_string(p.boundary) +
                               " out of range";
            }
    add("well-formed", ranges_ok, range_detail);
    if (!ranges_ok) {
        for (auto name : {"injective-glue", "boundary-fixed-points", "cell-intersection", "connected"})
            add(name, false, "skipped: spec is not well-formed");
        return report;
    }

    const int k = spec.k, n = spec.n;
    auto idx = [n](int cell, int boundary) { return static_cast<size_t>((cell - 1) * n + (boundary - 1)); };
    UnionFind uf(static_cast<size_t>(k * n));
    for (const auto& g : spec.glues) uf.unite(idx(g.a.cell, g.a.boundary), idx(g.b.cell, g.b.boundary));

    std::map<size_t, std::vector<CellPoint>> classes;
    for (int i = 1; i <= k; ++i)
        for (int j = 1; j <= n; ++j) classes[uf.find(idx(i, j))].push_back({i, j});

    auto pt = [](const CellPoint& p) { return std::to_string(p.cell) + "." + std::to_string(p.boundary); };

    // psi_i must be injective on V^(0): one class never holds two points of the same cell.
    std::string inj_detail;
    for (const auto& [root, members] : classes) {
        for (size_t a = 0; a < members.size() && inj_detail.empty(); ++a)
            for (size_t b = a + 1; b < members.size(); ++b)
                if (members[a].cell == members[b].cell) {
                    inj_detail = pt(members[a]) + " and " + pt(members[b]) + " are identified";
                    break;
                }
    }
    add("injective-glue", inj_detail.empty(), inj_detail);

    // psi_i(P_j) = P_h forces i = j = h: the fixed point (h,h) stays a singleton.
    std::string fix_detail;
    for (int h = 1; h <= n && fix_detail.empty(); ++h) {
        const auto& members = classes[uf.find(idx(h, h))];
        if (members.size() > 1)
            for (const auto& m : members)
                if (!(m.cell == h && m.boundary == h)) {
                    fix_detail = "boundary point P" + std::to_string(h) + " identified with " + pt(m);
                    break;
                }
    }
    add("boundary-fixed-points", fix_detail.empty(), fix_detail);

    // Distinct 1-cells share at most one point. Counted per boundary image, so
    // a glue that also collapses points of one cell still shows up here.
    std::map<std::pair<int, int>, int> shared;
    for (int a = 1; a <= k; ++a)
        for (int b = 1; b <= k; ++b) {
            if (a == b) continue;
            int count = 0;
            for (int j = 1; j <= n; ++j) {
                const auto& members = classes[uf.find(idx(a, j))];
                if (std::any_of(members.begin(), members.end(), [b](const CellPoint& m) { return m.cell == b; })) ++count;
            }
            auto& slot = shared[{std::min(a, b), std::max(a, b)}];
            slot = std::max(slot, count);
        }
    std::string int_detail;
    for (const auto& [pair, count] : shared)
        if (count > 1) {
            int_detail = "cells " + std::to_string(pair.first) + " and " + std::to_string(pair.second) + " share " +
                         std::to_string(count) + " points";
            break;
        }
    add("cell-intersection", int_detail.empty(), int_detail);

    // Connectivity: the 1-cells, linked whenever they share a point.
    UnionFind cells(static_cast<size_t>(k));
    for (const auto& [root, members] : classes)
        for (const auto& m : members) cells.unite(static_cast<size_t>(members.front().cell - 1), static_cast<size_t>(m.cell - 1));
    std::set<size_t> components;
    for (int i = 0; i < k; ++i) components.insert(cells.find(static_cast<size_t>(i)));
    add("connected", components.size() == 1,
        components.size() == 1 ? "" : std::to_string(components.size()) + " components at level 1");
    return report;
}

/// psi_word(P_boundary).
struct Address {
    Word word;
    int boundary = 0;

    std::string str(int k) const { return word.str(k) + "." + std::to_string(boundary); }

    /// "<word>.<j>", with "e" for the empty word.
    static Address parse(std::string_view text, int k) {
        auto dot = text.rfind('.');
        if (dot == std::string_view::npos) throw std::invalid_argument("address must be '<word>.<j>'");
        int j = 0;
        if (!detail::parse_int(text.substr(dot + 1), j) || j < 1)
            throw std::invalid_argument("bad boundary index in '" + std::string(text) + "'");
        return {Word::parse(text.substr(0, dot), k), j};
    }

    friend bool operator==(const Address&, const Address&) = default;
};

/// A point of V^(m): the identification class of an address at level m.
struct VertexId {
    int level = 0;
    std::uint32_t index = 0;
    friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

/// V^(m) with every identification resolved. Vertex indices follow the order
/// of canonical addresses (shortest representing word, then lexicographic),
/// so V^(l) occupies the same leading indices at every level m >= l.
class LevelVertices {
public:
    LevelVertices(const FractalSpec& spec, int level) : spec_(spec), level_(level) {
        if (level < 0) throw std::invalid_argument("negative level");
        const std::uint64_t k = static_cast<std::uint64_t>(spec.k);
        const std::uint64_t n = static_cast<std::uint64_t>(spec.n);
        pow_.assign(static_cast<size_t>(level) + 1, 1);
        for (int t = 1; t <= level; ++t) {
            pow_[t] = pow_[t - 1] * k;
            if (pow_[t] > (std::uint64_t{1} << 26)) throw std::length_error("level too deep for this fractal");
        }
        const std::uint64_t addresses = pow_[level] * n;

        // Glues act under every prefix u of length l < m; the tail beyond the
        // glued cell is padded with the boundary index (psi_j(P_j) = P_j).
        UnionFind uf(addresses);
        for (int l = 0; l < level; ++l) {
            const int tail = level - l - 1;
            for (std::uint64_t u = 0; u < pow_[l]; ++u)
                for (const auto& g : spec.glues)
                    uf.unite(raw_index(u, g.a.cell, g.a.boundary, tail), raw_index(u, g.b.cell, g.b.boundary, tail));
        }

        struct Key {
            size_t len;
            std::uint64_t word;
            int boundary;
            auto operator<=>(const Key&) const = default;
        };
        std::vector<Key> best(addresses, Key{SIZE_MAX, 0, 0});
        std::vector<size_t> root(addresses);
        for (std::uint64_t a = 0; a < addresses; ++a) {
            root[a] = uf.find(a);
            int j = static_cast<int>(a % n) + 1;
            std::uint64_t w = a / n;
            size_t len = static_cast<size_t>(level);
            while (len > 0 && static_cast<int>(w % k) + 1 == j) {
                w /= k;
                --len;
            }
            Key key{len, w, j};
            if (key < best[root[a]]) best[root[a]] = key;
        }
        std::vector<std::pair<Key, size_t>> reps;
        for (std::uint64_t a = 0; a < addresses; ++a)
            if (root[a] == a) reps.emplace_back(best[a], a);
        std::sort(reps.begin(), reps.end());

        std::vector<std::uint32_t> id_of_root(addresses);
        canonical_.reserve(reps.size());
        for (size_t i = 0; i < reps.size(); ++i) {
            id_of_root[reps[i].second] = static_cast<std::uint32_t>(i);
            canonical_.push_back({Word::from_index(reps[i].first.word, reps[i].first.len, spec.k), reps[i].first.boundary});
        }
        class_of_.resize(addresses);
        for (std::uint64_t a = 0; a < addresses; ++a) class_of_[a] = id_of_root[root[a]];
    }

    const FractalSpec& spec() const { return spec_; }
    int level() const { return level_; }
    size_t size() const { return canonical_.size(); }

    /// Canonical vertex of psi_word(P_j); words shorter than the level are
    /// lifted by padding with j.
    VertexId canonicalize(const Address& a) const {
        if (a.boundary < 1 || a.boundary > spec_.n) throw std::out_of_range("boundary index out of range");
        if (a.word.size() > static_cast<size_t>(level_))
            throw std::invalid_argument("address " + a.str(spec_.k) + " is deeper than level " + std::to_string(level_));
        for (int l : a.word.letters())
            if (l > spec_.k) throw std::out_of_range("cell index out of range");
        const size_t tail = static_cast<size_t>(level_) - a.word.size();
        std::uint64_t w = a.word.index(spec_.k) * pow_[tail] + repunit(a.boundary, tail);
        return {level_, class_of_[w * static_cast<std::uint64_t>(spec_.n) + (a.boundary - 1)]};
    }

    /// Strict variant: the address must have length exactly m.
    VertexId canonicalize_exact(const Address& a) const {
        if (a.word.size() != static_cast<size_t>(level_))
            throw std::invalid_argument("level mismatch: address " + a.str(spec_.k) + " at level " + std::to_string(level_));
        return canonicalize(a);
    }

    VertexId boundary_point(int j) const { return canonicalize({Word{}, j}); }

    const Address& canonical_address(VertexId v) const {
        check(v);
        return canonical_[v.index];
    }
    std::string label(VertexId v) const { return canonical_address(v).str(spec_.k); }

    /// V^(m) ∩ K_w: vertices having an address with prefix w.
    std::vector<VertexId> cell_vertices(const Word& w) const {
        if (w.size() > static_cast<size_t>(level_))
            throw std::invalid_argument("cell word longer than level");
        const std::uint64_t n = static_cast<std::uint64_t>(spec_.n);
        const std::uint64_t span = pow_[static_cast<size_t>(level_) - w.size()] * n;
        const std::uint64_t first = w.index(spec_.k) * span;
        std::vector<std::uint32_t> ids;
        for (std::uint64_t a = first; a < first + span; ++a) ids.push_back(class_of_[a]);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        std::vector<VertexId> out;
        out.reserve(ids.size());
        for (auto id : ids) out.push_back({level_, id});
        return out;
    }

    /// V_w = psi_w(V^(0)) as level-m vertices, indexed by boundary j-1.
    std::vector<VertexId> cell_boundary(const Word& w) const {
        std::vector<VertexId> out;
        for (int j = 1; j <= spec_.n; ++j) out.push_back(canonicalize({w, j}));
        return out;
    }

    /// All addresses of length m in the class of v.
    std::vector<Address> addresses_of(VertexId v) const {
        check(v);
        std::vector<Address> out;
        const std::uint64_t n = static_cast<std::uint64_t>(spec_.n);
        for (std::uint64_t a = 0; a < class_of_.size(); ++a)
            if (class_of_[a] == v.index)
                out.push_back({Word::from_index(a / n, static_cast<size_t>(level_), spec_.k), static_cast<int>(a % n) + 1});
        return out;
    }

private:
    void check(VertexId v) const {
        if (v.level != level_ || v.index >= canonical_.size()) throw std::out_of_range("vertex not in this level");
    }

    std::uint64_t repunit(int j, size_t len) const {
        // (j-1) * (1 + k + ... + k^{len-1}): the index of j^(len).
        std::uint64_t r = 0;
        for (size_t t = 0; t < len; ++t) r = r * static_cast<std::uint64_t>(spec_.k) + (j - 1);
        return r;
    }

    std::uint64_t raw_index(std::uint64_t prefix, int cell, int boundary, int tail) const {
        std::uint64_t w = (prefix * static_cast<std::uint64_t>(spec_.k) + (cell - 1)) * pow_[tail] +
                          repunit(boundary, static_cast<size_t>(tail));
        return w * static_cast<std::uint64_t>(spec_.n) + (boundary - 1);
    }

    FractalSpec spec_;
    int level_;
    std::vector<std::uint64_t> pow_;
    std::vector<std::uint32_t> class_of_;
    std::vector<Address> canonical_;
};

inline VertexId canonicalize(const FractalSpec& spec, int level, const Address& a) {
    return LevelVertices(spec, level).canonicalize_exact(a);
}

inline size_t vertex_count(const FractalSpec& spec, int level) { return LevelVertices(spec, level).size(); }

inline std::vector<VertexId> cell_vertices(const FractalSpec& spec, int level, const Word& w) {
    return LevelVertices(spec, level).cell_vertices(w);
}

} // namespace fracmetric
