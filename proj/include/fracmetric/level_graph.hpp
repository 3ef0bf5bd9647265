#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fractal.hpp"
#include "rational.hpp"

namespace fracmetric {

/// Ordered pair (j1, j2) of distinct boundary indices.
struct Iota {
    int from = 0;
    int to = 0;
    Iota swapped() const { return {to, from}; }
    std::string str() const { return "(" + std::to_string(from) + "," + std::to_string(to) + ")"; }
    friend auto operator<=>(const Iota&, const Iota&) = default;
};

/// Edge psi_word(P_j1) -- psi_word(P_j2), stored with j1 < j2; `u` is the
/// image of P_j1 and `v` the image of P_j2.
struct LabeledEdge {
    VertexId u;
    VertexId v;
    int j1 = 0;
    int j2 = 0;
    Word word;

    Iota label_from(VertexId start) const { return start == u ? Iota{j1, j2} : Iota{j2, j1}; }
};

/// alpha_w: product of the ratios along the word (1 for the empty word).
inline Rational word_weight(const PolyRatio& alpha, const Word& w) {
    Rational r = 1;
    for (int l : w.letters()) r *= alpha[static_cast<size_t>(l)];
    return r;
}

inline double word_weight(const std::vector<double>& alpha, const Word& w) {
    double r = 1;
    for (int l : w.letters()) r *= alpha[static_cast<size_t>(l) - 1];
    return r;
}

/// Traversal of an edge out of a vertex.
struct Arc {
    std::uint32_t to = 0;
    std::uint32_t edge = 0;
    bool forward = true; // leaving the P_j1 end
};

/// The graph on V^(m): one edge per word of length <= m and unordered pair
/// of boundary indices.
class LevelGraph {
public:
    LevelGraph(const FractalSpec& spec, int level) : vertices_(spec, level) {
        adjacency_.resize(vertices_.size());
        for (const auto& w : words_up_to(spec.k, static_cast<size_t>(level))) {
            auto images = vertices_.cell_boundary(w);
            for (int j1 = 1; j1 <= spec.n; ++j1)
                for (int j2 = j1 + 1; j2 <= spec.n; ++j2) {
                    LabeledEdge e{images[j1 - 1], images[j2 - 1], j1, j2, w};
                    if (e.u == e.v) throw std::logic_error("self-loop in level graph (axioms violated)");
                    auto id = static_cast<std::uint32_t>(edges_.size());
                    auto key = std::minmax(e.u.index, e.v.index);
                    if (!by_endpoints_.emplace(key, id).second)
                        throw std::logic_error("two edges share endpoints (axioms violated)");
                    adjacency_[e.u.index].push_back({e.v.index, id, true});
                    adjacency_[e.v.index].push_back({e.u.index, id, false});
                    edges_.push_back(std::move(e));
                }
        }
        for (auto& arcs : adjacency_)
            std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
    }

    const LevelVertices& vertices() const { return vertices_; }
    const FractalSpec& spec() const { return vertices_.spec(); }
    int level() const { return vertices_.level(); }
    size_t vertex_count() const { return vertices_.size(); }
    const std::vector<LabeledEdge>& edges() const { return edges_; }
    const std::vector<Arc>& arcs(std::uint32_t v) const { return adjacency_.at(v); }

    VertexId vertex(std::uint32_t index) const { return {level(), index}; }

    std::optional<std::uint32_t> edge_between(VertexId a, VertexId b) const {
        auto it = by_endpoints_.find(std::minmax(a.index, b.index));
        if (it == by_endpoints_.end()) return std::nullopt;
        return it->second;
    }

    void check(VertexId v) const {
        if (v.level != level() || v.index >= vertex_count()) throw std::out_of_range("vertex not in this graph");
    }

private:
    LevelVertices vertices_;
    std::vector<LabeledEdge> edges_;
    std::vector<std::vector<Arc>> adjacency_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> by_endpoints_;
};

inline LevelGraph build_level_graph(const FractalSpec& spec, int level) { return LevelGraph(spec, level); }

template <class W>
struct ShortestPathTree {
    std::vector<std::optional<W>> dist;
    std::vector<std::int64_t> parent_arc_edge; // edge used to reach the vertex, -1 at the root
    std::vector<std::uint32_t> parent;

    /// Vertex indices from the source to `target`; empty if unreachable.
    std::vector<std::uint32_t> path_to(std::uint32_t target) const {
        if (!dist[target]) return {};
        std::vector<std::uint32_t> out{target};
        while (parent_arc_edge[out.back()] >= 0) out.push_back(parent[out.back()]);
        std::reverse(out.begin(), out.end());
        return out;
    }
};

/// Single-source Dijkstra over an arbitrary weight type with exact
/// comparisons. `cost(arc)` returns std::nullopt for arcs that must not be
/// used. Ties keep the first relaxation, so results are deterministic.
template <class W, class Cost>
ShortestPathTree<W> dijkstra(const LevelGraph& g, std::uint32_t source, Cost&& cost,
                             std::optional<std::uint32_t> stop_at = std::nullopt) {
    const size_t n = g.vertex_count();
    ShortestPathTree<W> tree{std::vector<std::optional<W>>(n), std::vector<std::int64_t>(n, -1),
                             std::vector<std::uint32_t>(n, 0)};
    std::vector<char> done(n, 0);
    using Item = std::pair<W, std::uint32_t>;
    auto cmp = [](const Item& a, const Item& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
    tree.dist[source] = W(0);
    heap.emplace(W(0), source);
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (done[v] || *tree.dist[v] != d) continue;
        done[v] = 1;
        if (stop_at && v == *stop_at) break;
        for (const Arc& arc : g.arcs(v)) {
            if (done[arc.to]) continue;
            std::optional<W> c = cost(arc);
            if (!c) continue;
            W nd = d + *c;
            if (!tree.dist[arc.to] || nd < *tree.dist[arc.to]) {
                tree.dist[arc.to] = nd;
                tree.parent[arc.to] = v;
                tree.parent_arc_edge[arc.to] = arc.edge;
                heap.emplace(std::move(nd), arc.to);
            }
        }
    }
    return tree;
}

/// Edge weights alpha_w of a level graph, with exact all-pairs queries.
/// When every weight is an integer multiple of 1/Q^m that fits comfortably in
/// 64 bits (Q the lcm of the ratio denominators), distances are computed on
/// scaled integers; otherwise on rationals. Both routes are exact.
class WeightedGraph {
public:
    WeightedGraph(const LevelGraph& g, const PolyRatio& alpha) : g_(&g) {
        if (alpha.size() != static_cast<size_t>(g.spec().k))
            throw std::invalid_argument("polyratio has " + std::to_string(alpha.size()) + " entries, expected " +
                                        std::to_string(g.spec().k));
        exact_.reserve(g.edges().size());
        for (const auto& e : g.edges()) exact_.push_back(word_weight(alpha, e.word));

        mpz_class q = 1;
        for (const auto& a : alpha.values()) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), a.get_den_mpz_t());
        mpz_pow_ui(scale_.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(g.level()));
        mpz_class total = 0;
        std::vector<std::int64_t> scaled;
        scaled.reserve(exact_.size());
        bool fits = true;
        for (const auto& w : exact_) {
            mpz_class s = w.get_num() * (scale_ / w.get_den());
            total += s;
            if (total > mpz_class("1000000000000000000")) {
                fits = false;
                break;
            }
            scaled.push_back(s.get_si());
        }
        if (fits) scaled_ = std::move(scaled);
    }

    const LevelGraph& graph() const { return *g_; }
    const Rational& weight(std::uint32_t edge) const { return exact_.at(edge); }
    bool uses_scaled_integers() const { return scaled_.has_value(); }

    /// Exact distances from `source` to every vertex (nullopt if unreachable).
    std::vector<std::optional<Rational>> distances_from(VertexId source, std::optional<VertexId> target = std::nullopt) const {
        g_->check(source);
        std::optional<std::uint32_t> stop;
        if (target) stop = target->index;
        std::vector<std::optional<Rational>> out(g_->vertex_count());
        if (scaled_) {
            auto tree = dijkstra<std::int64_t>(
                *g_, source.index, [this](const Arc& a) { return std::optional<std::int64_t>((*scaled_)[a.edge]); }, stop);
            for (size_t v = 0; v < out.size(); ++v)
                if (tree.dist[v]) {
                    Rational r(mpz_class(std::to_string(*tree.dist[v]), 10), scale_);
                    r.canonicalize();
                    out[v] = r;
                }
        } else {
            auto tree = dijkstra<Rational>(*g_, source.index, [this](const Arc& a) { return std::optional<Rational>(exact_[a.edge]); }, stop);
            for (size_t v = 0; v < out.size(); ++v) out[v] = tree.dist[v];
        }
        return out;
    }

    Rational distance(VertexId a, VertexId b) const {
        g_->check(b);
        auto d = distances_from(a, b)[b.index];
        if (!d) throw std::runtime_error("vertices are not connected");
        return *d;
    }

private:
    const LevelGraph* g_;
    std::vector<Rational> exact_;
    mpz_class scale_;
    std::optional<std::vector<std::int64_t>> scaled_;
};

/// Minimum over paths in g of the summed edge weights alpha_w.
inline Rational shortest_distance(const LevelGraph& g, const PolyRatio& alpha, VertexId a, VertexId b) {
    return WeightedGraph(g, alpha).distance(a, b);
}

/// Largest distance (in the whole graph) between two level-m vertices of K_w.
inline Rational cell_diameter(const WeightedGraph& wg, const Word& w) {
    auto cell = wg.graph().vertices().cell_vertices(w);
    Rational best = 0;
    for (size_t s = 0; s < cell.size(); ++s) {
        auto dist = wg.distances_from(cell[s]);
        for (size_t t = s + 1; t < cell.size(); ++t) {
            const auto& d = dist[cell[t].index];
            if (!d) throw std::runtime_error("cell vertices are not connected");
            if (*d > best) best = *d;
        }
    }
    return best;
}

inline Rational cell_diameter(const LevelGraph& g, const PolyRatio& alpha, const Word& w) {
    return cell_diameter(WeightedGraph(g, alpha), w);
}

/// Whether the level-m cells link V^(m) into one piece: only edges whose word
/// has length exactly m count, since the shorter edges join points that the
/// cells themselves might never connect (the boundary edge of a Cantor set).
inline bool connectedness(const LevelGraph& g) {
    if (g.vertex_count() == 0) return true;
    const size_t top = static_cast<size_t>(g.level());
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<std::uint32_t> stack{0};
    seen[0] = 1;
    size_t count = 1;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (const Arc& a : g.arcs(v))
            if (!seen[a.to] && g.edges()[a.edge].word.size() == top) {
                seen[a.to] = 1;
                ++count;
                stack.push_back(a.to);
            }
    }
    return count == g.vertex_count();
}

/// "a1*a3" style symbolic weight, "1" for the empty word.
inline std::string symbolic_weight(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    for (size_t t = 0; t < w.size(); ++t) {
        if (t) s += '*';
        s += "a" + std::to_string(w[t]);
    }
    return s;
}

/// Graphviz rendering: node label is the canonical address, edge label is
/// "iota/word/weight" (exact weight when alpha is given, symbolic otherwise).
inline void write_dot(std::ostream& out, const LevelGraph& g, const PolyRatio* alpha = nullptr) {
    const auto& vs = g.vertices();
    const int k = g.spec().k;
    out << "graph \"" << g.spec().name << "_level" << g.level() << "\" {\n";
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
        out << "  v" << v << " [label=\"" << vs.label(g.vertex(v)) << "\"];\n";
    for (const auto& e : g.edges()) {
        std::string weight = alpha ? word_weight(*alpha, e.word).get_str() : symbolic_weight(e.word);
        out << "  v" << e.u.index << " -- v" << e.v.index << " [label=\"" << Iota{e.j1, e.j2}.str() << '/'
            << e.word.str(k) << '/' << weight << "\"];\n";
    }
    out << "}\n";
}

} // namespace fracmetric
