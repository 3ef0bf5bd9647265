#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "level_graph.hpp"
#include "rational.hpp"

namespace fracmetric {

/// Index set J^ of ordered boundary pairs, in lexicographic order:
/// (1,2), (1,3), ..., (1,N), (2,1), (2,3), ...
class JHat {
public:
    explicit JHat(int n) : n_(n) {}

    size_t size() const { return static_cast<size_t>(n_ * (n_ - 1)); }
    int boundary_count() const { return n_; }

    size_t index(Iota i) const {
        if (i.from < 1 || i.from > n_ || i.to < 1 || i.to > n_ || i.from == i.to)
            throw std::out_of_range("not an ordered pair of distinct boundary indices: " + i.str());
        return static_cast<size_t>((i.from - 1) * (n_ - 1) + (i.to < i.from ? i.to - 1 : i.to - 2));
    }

    Iota operator[](size_t idx) const {
        int from = static_cast<int>(idx) / (n_ - 1) + 1;
        int to = static_cast<int>(idx) % (n_ - 1) + 1;
        if (to >= from) ++to;
        return {from, to};
    }

    size_t swapped(size_t idx) const { return index((*this)[idx].swapped()); }

    Iota parse(std::string_view text) const {
        std::string s;
        for (char c : text)
            if (c != '(' && c != ')' && c != ' ') s += c;
        auto comma = s.find(',');
        int a = 0, b = 0;
        if (comma == std::string::npos || !detail::parse_int(s.substr(0, comma), a) ||
            !detail::parse_int(s.substr(comma + 1), b))
            throw std::invalid_argument("bad pair '" + std::string(text) + "'");
        Iota i{a, b};
        index(i);
        return i;
    }

private:
    int n_;
};

/// Dense vector on J^.
using EdgeVector = std::vector<Rational>;

/// H(x): sum of the coordinates.
template <class T>
T total(const std::vector<T>& x) {
    T s = 0;
    for (const auto& v : x) s += v;
    return s;
}

/// One step of a path: the label (iota, word) of the traversed edge with
/// iota oriented along the direction of travel; no label for a repeated
/// vertex (weak step, weight 0).
struct PathStep {
    std::optional<Iota> iota;
    Word word;

    bool weak() const { return !iota.has_value(); }
};

/// A path in the level graph, with the edge label of every step.
class PathRecord {
public:
    PathRecord() = default;

    /// Derives the step labels from the graph; throws if two consecutive
    /// vertices are neither equal nor adjacent.
    static PathRecord from_vertices(const LevelGraph& g, std::vector<VertexId> vertices) {
        if (vertices.empty()) throw std::invalid_argument("empty path");
        PathRecord p;
        p.level_ = g.level();
        for (const auto& v : vertices) g.check(v);
        for (size_t h = 1; h < vertices.size(); ++h) {
            if (vertices[h] == vertices[h - 1]) {
                p.steps_.push_back({});
                continue;
            }
            auto e = g.edge_between(vertices[h - 1], vertices[h]);
            if (!e)
                throw std::invalid_argument("vertices " + g.vertices().label(vertices[h - 1]) + " and " +
                                            g.vertices().label(vertices[h]) + " are not adjacent");
            const auto& edge = g.edges()[*e];
            p.steps_.push_back({edge.label_from(vertices[h - 1]), edge.word});
        }
        p.vertices_ = std::move(vertices);
        return p;
    }

    int level() const { return level_; }
    const std::vector<VertexId>& vertices() const { return vertices_; }
    const std::vector<PathStep>& steps() const { return steps_; }
    size_t step_count() const { return steps_.size(); }
    VertexId front() const { return vertices_.front(); }
    VertexId back() const { return vertices_.back(); }

    /// Pairwise distinct vertices.
    bool strict() const {
        auto sorted = vertices_;
        std::sort(sorted.begin(), sorted.end());
        return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    }

    /// No step stays inside V^(0) (every step carries a nonempty word).
    bool strong() const {
        return std::all_of(steps_.begin(), steps_.end(), [](const PathStep& s) { return !s.weak() && !s.word.empty(); });
    }

    PathRecord reversed() const {
        PathRecord r;
        r.level_ = level_;
        r.vertices_.assign(vertices_.rbegin(), vertices_.rend());
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
            PathStep s = *it;
            if (s.iota) s.iota = s.iota->swapped();
            r.steps_.push_back(std::move(s));
        }
        return r;
    }

    /// Pi ∘ Pi': requires back() == other.front().
    PathRecord concat(const PathRecord& other) const {
        if (other.level_ != level_ || back() != other.front()) throw std::invalid_argument("paths do not chain");
        PathRecord r = *this;
        r.vertices_.insert(r.vertices_.end(), other.vertices_.begin() + 1, other.vertices_.end());
        r.steps_.insert(r.steps_.end(), other.steps_.begin(), other.steps_.end());
        return r;
    }

    /// "addr -(iota,word,weight)-> addr ..." with exact weights when alpha is
    /// given and symbolic ones otherwise.
    std::string str(const LevelGraph& g, const PolyRatio* alpha = nullptr) const {
        const auto& vs = g.vertices();
        const int k = g.spec().k;
        std::string s = vs.label(vertices_.front());
        for (size_t h = 0; h < steps_.size(); ++h) {
            const auto& st = steps_[h];
            if (st.weak())
                s += " -(weak,0)-> ";
            else
                s += " -(" + st.iota->str() + "," + st.word.str(k) + "," +
                     (alpha ? word_weight(*alpha, st.word).get_str() : symbolic_weight(st.word)) + ")-> ";
            s += vs.label(vertices_[h + 1]);
        }
        return s;
    }

    std::vector<std::string> vertex_labels(const LevelGraph& g) const {
        std::vector<std::string> out;
        for (const auto& v : vertices_) out.push_back(g.vertices().label(v));
        return out;
    }

    friend bool operator==(const PathRecord& a, const PathRecord& b) {
        return a.level_ == b.level_ && a.vertices_ == b.vertices_;
    }

private:
    int level_ = 0;
    std::vector<VertexId> vertices_;
    std::vector<PathStep> steps_;
};

/// Sigma_Pi(alpha): summed step weights, weak steps contributing 0.
inline Rational sum_along(const PathRecord& p, const PolyRatio& alpha) {
    Rational s = 0;
    for (const auto& st : p.steps())
        if (!st.weak()) s += word_weight(alpha, st.word);
    return s;
}

/// Sigma^_Pi(alpha): step weights collected by oriented label.
inline EdgeVector hat_sigma(const PathRecord& p, const PolyRatio& alpha, const JHat& jhat) {
    EdgeVector x(jhat.size(), Rational(0));
    for (const auto& st : p.steps())
        if (!st.weak()) x[jhat.index(*st.iota)] += word_weight(alpha, st.word);
    return x;
}

/// A choice, for every iota in J^, of a strict level-1 path from P_j1 to P_j2.
class Gamma {
public:
    Gamma(const LevelGraph& level1, std::vector<PathRecord> paths) : paths_(std::move(paths)) {
        if (level1.level() != 1) throw std::invalid_argument("Gamma lives on the level-1 graph");
        JHat jhat(level1.spec().n);
        if (paths_.size() != jhat.size()) throw std::invalid_argument("Gamma needs one path per ordered pair");
        for (size_t i = 0; i < paths_.size(); ++i) {
            Iota io = jhat[i];
            const auto& p = paths_[i];
            if (p.level() != 1 || !p.strict() || p.front() != level1.vertices().boundary_point(io.from) ||
                p.back() != level1.vertices().boundary_point(io.to))
                throw std::invalid_argument("path for " + io.str() + " is not a strict level-1 path between its endpoints");
        }
    }

    /// Every iota mapped to the single edge (P_j1, P_j2).
    static Gamma trivial(const LevelGraph& level1) {
        JHat jhat(level1.spec().n);
        std::vector<PathRecord> paths;
        for (size_t i = 0; i < jhat.size(); ++i)
            paths.push_back(PathRecord::from_vertices(
                level1, {level1.vertices().boundary_point(jhat[i].from), level1.vertices().boundary_point(jhat[i].to)}));
        return Gamma(level1, std::move(paths));
    }

    size_t size() const { return paths_.size(); }
    const PathRecord& operator[](size_t idx) const { return paths_.at(idx); }
    const std::vector<PathRecord>& paths() const { return paths_; }

private:
    std::vector<PathRecord> paths_;
};

/// D(gamma)(Pi): every step psi_w(P_iota) of Pi is replaced by psi_w(gamma(iota)).
/// `next` must be the graph one level below Pi's.
inline PathRecord insert(const Gamma& gamma, const PathRecord& path, const LevelGraph& level1, const LevelGraph& next) {
    if (next.level() != path.level() + 1) throw std::invalid_argument("insertion target must be one level deeper");
    const auto& next_vs = next.vertices();
    const auto& here = level1.vertices();
    JHat jhat(next.spec().n);

    // V^(m) keeps its vertex indices inside V^(m+1).
    std::vector<VertexId> out{{next.level(), path.front().index}};
    for (size_t h = 0; h < path.step_count(); ++h) {
        const auto& st = path.steps()[h];
        if (st.weak()) {
            out.push_back(out.back());
            continue;
        }
        const auto& sub = gamma[jhat.index(*st.iota)];
        for (size_t t = 1; t < sub.vertices().size(); ++t) {
            const Address& a = here.canonical_address(sub.vertices()[t]);
            out.push_back(next_vs.canonicalize({st.word + a.word, a.boundary}));
        }
    }
    return PathRecord::from_vertices(next, std::move(out));
}

class PathLimitExceeded : public std::runtime_error {
public:
    explicit PathLimitExceeded(size_t cap)
        : std::runtime_error("more than " + std::to_string(cap) + " strict paths; use the shortest-path formulation") {}
};

/// All strict paths from P_j1 to P_j2 in the level-1 graph, lexicographic by
/// vertex index sequence.
inline std::vector<PathRecord> enumerate_strict_paths(const LevelGraph& level1, Iota iota, size_t cap = 100000) {
    if (level1.level() != 1) throw std::invalid_argument("strict path enumeration runs on the level-1 graph");
    JHat(level1.spec().n).index(iota);
    const auto src = level1.vertices().boundary_point(iota.from).index;
    const auto dst = level1.vertices().boundary_point(iota.to).index;

    std::vector<PathRecord> out;
    std::vector<char> on_path(level1.vertex_count(), 0);
    std::vector<std::uint32_t> stack{src};
    on_path[src] = 1;

    std::function<void(std::uint32_t)> dfs = [&](std::uint32_t v) {
        for (const Arc& a : level1.arcs(v)) {
            if (on_path[a.to]) continue;
            stack.push_back(a.to);
            if (a.to == dst) {
                if (out.size() >= cap) throw PathLimitExceeded(cap);
                std::vector<VertexId> vs;
                for (auto x : stack) vs.push_back(level1.vertex(x));
                out.push_back(PathRecord::from_vertices(level1, std::move(vs)));
            } else {
                on_path[a.to] = 1;
                dfs(a.to);
                on_path[a.to] = 0;
            }
            stack.pop_back();
        }
    };
    dfs(src);
    return out;
}

/// Matrix of T_gamma: row iota holds Sigma^ of gamma(iota), i.e.
/// T_gamma(e_iota) = sum_iota' M[iota][iota'] e_iota'.
inline std::vector<EdgeVector> transfer_matrix(const Gamma& gamma, const PolyRatio& alpha, const JHat& jhat) {
    std::vector<EdgeVector> m;
    for (size_t i = 0; i < jhat.size(); ++i) m.push_back(hat_sigma(gamma[i], alpha, jhat));
    return m;
}

/// T_gamma(x) = sum_iota x_iota T_gamma(e_iota).
inline EdgeVector transfer_apply(const Gamma& gamma, const EdgeVector& x, const PolyRatio& alpha, const JHat& jhat) {
    if (x.size() != jhat.size()) throw std::invalid_argument("edge vector has the wrong dimension");
    EdgeVector y(jhat.size(), Rational(0));
    for (size_t i = 0; i < jhat.size(); ++i) {
        if (x[i] == 0) continue;
        auto row = hat_sigma(gamma[i], alpha, jhat);
        for (size_t t = 0; t < row.size(); ++t) y[t] += x[i] * row[t];
    }
    return y;
}

} // namespace fracmetric
