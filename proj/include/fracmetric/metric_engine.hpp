#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fractal.hpp"
#include "level_graph.hpp"
#include "rational.hpp"

namespace fracmetric {

inline Rational path_distance(const FractalSpec& spec, const PolyRatio& alpha, int level, const Address& a,
                              const Address& b) {
    LevelGraph g(spec, level);
    return shortest_distance(g, alpha, g.vertices().canonicalize(a), g.vertices().canonicalize(b));
}

/// Cheapest chain of cells between two level-m vertices: a sequence of words
/// of length <= m, consecutive cells intersecting, the first containing the
/// start and the last the end, costed by the sum of alpha_w.
///
/// Two cells meet iff one contains the other or their boundary sets share a
/// point, so intersection is decided on V^(m) alone.
class ChainGraph {
public:
    ChainGraph(const FractalSpec& spec, const PolyRatio& alpha, int level)
        : vertices_(spec, level), words_(words_up_to(spec.k, static_cast<size_t>(level))) {
        if (alpha.size() != static_cast<size_t>(spec.k)) throw std::invalid_argument("polyratio length mismatch");
        const size_t nv = vertices_.size();
        const size_t nw = words_.size();
        containing_.resize(nv);
        std::vector<std::vector<std::uint32_t>> bnd(nw);
        for (size_t i = 0; i < nw; ++i) {
            weight_.push_back(word_weight(alpha, words_[i]));
            for (auto v : vertices_.cell_vertices(words_[i])) containing_[v.index].push_back(static_cast<std::uint32_t>(i));
            for (auto v : vertices_.cell_boundary(words_[i])) bnd[i].push_back(v.index);
            std::sort(bnd[i].begin(), bnd[i].end());
        }
        adj_.resize(nw);
        for (size_t i = 0; i < nw; ++i)
            for (size_t j = i + 1; j < nw; ++j) {
                bool meet = !words_[i].incomparable(words_[j]);
                if (!meet) {
                    std::vector<std::uint32_t> common;
                    std::set_intersection(bnd[i].begin(), bnd[i].end(), bnd[j].begin(), bnd[j].end(),
                                          std::back_inserter(common));
                    meet = !common.empty();
                }
                if (meet) {
                    adj_[i].push_back(static_cast<std::uint32_t>(j));
                    adj_[j].push_back(static_cast<std::uint32_t>(i));
                }
            }
    }

    const LevelVertices& vertices() const { return vertices_; }
    const std::vector<Word>& words() const { return words_; }

    /// Words whose cell contains v.
    const std::vector<std::uint32_t>& containing(VertexId v) const { return containing_.at(v.index); }

    /// Chain distances from `a` to every vertex (0 at a itself).
    std::vector<Rational> distances_from(VertexId a) const {
        const size_t nw = words_.size();
        std::vector<std::optional<Rational>> best(nw);
        std::vector<char> done(nw, 0);
        using Item = std::pair<Rational, std::uint32_t>;
        auto cmp = [](const Item& x, const Item& y) {
            if (x.first != y.first) return x.first > y.first;
            return x.second > y.second;
        };
        std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
        for (auto w : containing(a)) {
            best[w] = weight_[w];
            heap.emplace(weight_[w], w);
        }
        while (!heap.empty()) {
            auto [d, w] = heap.top();
            heap.pop();
            if (done[w] || *best[w] != d) continue;
            done[w] = 1;
            for (auto x : adj_[w]) {
                if (done[x]) continue;
                Rational nd = d + weight_[x];
                if (!best[x] || nd < *best[x]) {
                    best[x] = nd;
                    heap.emplace(nd, x);
                }
            }
        }
        std::vector<Rational> out(vertices_.size());
        for (size_t v = 0; v < vertices_.size(); ++v) {
            if (v == a.index) continue;
            std::optional<Rational> m;
            for (auto w : containing_[v])
                if (best[w] && (!m || *best[w] < *m)) m = best[w];
            if (!m) throw std::runtime_error("no chain between " + vertices_.label(a) + " and " +
                                             vertices_.label({vertices_.level(), static_cast<std::uint32_t>(v)}));
            out[v] = *m;
        }
        return out;
    }

    Rational distance(VertexId a, VertexId b) const {
        if (a == b) return 0;
        return distances_from(a)[b.index];
    }

private:
    LevelVertices vertices_;
    std::vector<Word> words_;
    std::vector<Rational> weight_;
    std::vector<std::vector<std::uint32_t>> containing_;
    std::vector<std::vector<std::uint32_t>> adj_;
};

inline Rational chain_distance(const FractalSpec& spec, const PolyRatio& alpha, int level, const Address& a,
                               const Address& b) {
    ChainGraph cg(spec, alpha, level);
    return cg.distance(cg.vertices().canonicalize(a), cg.vertices().canonicalize(b));
}

struct ComparisonReport {
    int level = 0;
    size_t pairs = 0;
    size_t violations = 0;      // pairs with chain > path
    Rational max_ratio = 0;     // max path / chain over pairs with chain > 0
    bool holds() const { return violations == 0; }
};

/// Checks chain <= path on the given pairs of level-m vertices; every pair
/// when `pairs` is empty.
inline ComparisonReport compare_chain_path(const FractalSpec& spec, const PolyRatio& alpha, int level,
                                           std::vector<std::pair<VertexId, VertexId>> pairs = {}) {
    LevelGraph g(spec, level);
    WeightedGraph wg(g, alpha);
    ChainGraph cg(spec, alpha, level);
    if (pairs.empty())
        for (std::uint32_t a = 0; a < g.vertex_count(); ++a)
            for (std::uint32_t b = a + 1; b < g.vertex_count(); ++b) pairs.push_back({g.vertex(a), g.vertex(b)});

    ComparisonReport rep;
    rep.level = level;
    std::sort(pairs.begin(), pairs.end());
    std::optional<VertexId> cached;
    std::vector<std::optional<Rational>> path;
    std::vector<Rational> chain;
    for (const auto& [a, b] : pairs) {
        if (!cached || *cached != a) {
            path = wg.distances_from(a);
            chain = cg.distances_from(a);
            cached = a;
        }
        ++rep.pairs;
        if (a == b) continue;
        const Rational& p = *path[b.index];
        const Rational& c = chain[b.index];
        if (c > p) ++rep.violations;
        if (c > 0 && p / c > rep.max_ratio) rep.max_ratio = p / c;
    }
    return rep;
}

struct ScalingRow {
    Word word;
    Rational weight;   // alpha_w
    Rational diameter; // level-m diameter of V^(m) ∩ K_w
    Rational ratio;    // diameter / (alpha_w * total diameter)
    Rational coarse_ratio; // diameter / (alpha_w * level-(m-|w|) total diameter), always <= 1
};

struct ScalingReport {
    int level = 0;
    int cell_depth = 0;
    Rational total_diameter;
    std::vector<ScalingRow> rows; // words of length <= cell_depth, shorter first
    Rational min_ratio;
    Rational max_ratio;
    Rational max_coarse_ratio;
};

inline ScalingReport scaling_report(const FractalSpec& spec, const PolyRatio& alpha, int level, int cell_depth) {
    if (cell_depth < 0 || cell_depth > level) throw std::invalid_argument("cell depth must lie in [0, level]");
    LevelGraph g(spec, level);
    WeightedGraph wg(g, alpha);
    ScalingReport rep;
    rep.level = level;
    rep.cell_depth = cell_depth;
    rep.total_diameter = cell_diameter(wg, Word{});
    // Total diameters at levels m-d..m, for the coarse ratios.
    std::vector<Rational> whole(static_cast<size_t>(level) + 1);
    whole[static_cast<size_t>(level)] = rep.total_diameter;
    for (int l = level - cell_depth; l < level; ++l) whole[static_cast<size_t>(l)] = cell_diameter(LevelGraph(spec, l), alpha, Word{});
    for (const auto& w : words_up_to(spec.k, static_cast<size_t>(cell_depth))) {
        ScalingRow row{w, word_weight(alpha, w), cell_diameter(wg, w), 0, 0};
        row.ratio = row.diameter / (row.weight * rep.total_diameter);
        row.coarse_ratio = row.diameter / (row.weight * whole[static_cast<size_t>(level) - w.size()]);
        rep.rows.push_back(std::move(row));
    }
    rep.min_ratio = rep.rows.front().ratio;
    rep.max_ratio = rep.rows.front().ratio;
    for (const auto& r : rep.rows) {
        rep.min_ratio = std::min(rep.min_ratio, r.ratio);
        rep.max_ratio = std::max(rep.max_ratio, r.ratio);
        rep.max_coarse_ratio = std::max(rep.max_coarse_ratio, r.coarse_ratio);
    }
    return rep;
}

} // namespace fracmetric
