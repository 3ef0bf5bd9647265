#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "level_graph.hpp"
#include "path_algebra.hpp"
#include "rational.hpp"

namespace fracmetric {

/// Positive weights on J^; in an uniform-positivity certificate they satisfy
/// Phi(u) >= u, and min u is a witness for the uniform lower bound.
using WeightVector = std::vector<Rational>;

/// One step of the min-over-Gamma recursion on the level-1 graph:
///
///     Phi(u)(iota) = min over strict level-1 iota-paths pi of
///                    sum_h alpha_{w(h,pi)} * u(iota(h,pi)).
///
/// Gamma picks a path for every iota independently, so this per-iota minimum
/// is the minimum of H(T_gamma1 ... T_gammaN e_iota) one level at a time.
/// Each minimum is a Dijkstra run with arc cost alpha_w * u(label); with
/// nonnegative costs the shortest walk can always be taken strict.
class BellmanOperator {
public:
    struct Options {
        /// Forbid the single empty-word edge (P_j1, P_j2) of the pair itself.
        bool exclude_direct = false;
        /// If set, only arcs whose oriented label is flagged may be used, and
        /// only rows with a flag are evaluated.
        const std::vector<char>* allowed = nullptr;
    };

    template <class T>
    struct Result {
        std::vector<std::optional<T>> value;
        std::vector<std::vector<VertexId>> argmin;
    };

    BellmanOperator(const FractalSpec& spec, const PolyRatio& alpha)
        : graph_(spec, 1), jhat_(spec.n), alpha_(alpha) {
        if (alpha.size() != static_cast<size_t>(spec.k))
            throw std::invalid_argument("polyratio has " + std::to_string(alpha.size()) + " entries, expected " +
                                        std::to_string(spec.k));
        for (const auto& e : graph_.edges()) {
            edge_alpha_.push_back(word_weight(alpha, e.word));
            edge_alpha_d_.push_back(edge_alpha_.back().get_d());
            forward_label_.push_back(jhat_.index({e.j1, e.j2}));
            backward_label_.push_back(jhat_.index({e.j2, e.j1}));
        }
    }

    const LevelGraph& graph() const { return graph_; }
    const JHat& jhat() const { return jhat_; }
    const PolyRatio& alpha() const { return alpha_; }

    template <class T>
    Result<T> evaluate(const std::vector<T>& u, Options opt = {}) const {
        if (u.size() != jhat_.size()) throw std::invalid_argument("weight vector has the wrong dimension");
        Result<T> out{std::vector<std::optional<T>>(jhat_.size()), std::vector<std::vector<VertexId>>(jhat_.size())};
        for (size_t i = 0; i < jhat_.size(); ++i) {
            if (opt.allowed && !(*opt.allowed)[i]) continue;
            const Iota io = jhat_[i];
            const auto src = graph_.vertices().boundary_point(io.from).index;
            const auto dst = graph_.vertices().boundary_point(io.to).index;
            auto cost = [&](const Arc& a) -> std::optional<T> {
                const auto& e = graph_.edges()[a.edge];
                size_t label = a.forward ? forward_label_[a.edge] : backward_label_[a.edge];
                if (opt.allowed && !(*opt.allowed)[label]) return std::nullopt;
                if (opt.exclude_direct && e.word.empty() &&
                    std::minmax(e.u.index, e.v.index) == std::minmax(src, dst))
                    return std::nullopt;
                return T(alpha_of<T>(a.edge) * u[label]);
            };
            auto tree = dijkstra<T>(graph_, src, cost, dst);
            if (!tree.dist[dst]) continue;
            out.value[i] = *tree.dist[dst];
            for (auto v : tree.path_to(dst)) out.argmin[i].push_back(graph_.vertex(v));
        }
        return out;
    }

    /// Phi(u), all rows, every path allowed.
    template <class T>
    std::vector<T> apply(const std::vector<T>& u) const {
        auto r = evaluate(u);
        std::vector<T> out;
        out.reserve(r.value.size());
        for (auto& v : r.value) out.push_back(std::move(*v));
        return out;
    }

    /// Exact test of u > 0 and Phi(u) >= u.
    bool is_subinvariant(const WeightVector& u) const {
        if (u.size() != jhat_.size()) return false;
        for (const auto& x : u)
            if (x <= 0) return false;
        auto phi = apply(u);
        for (size_t i = 0; i < u.size(); ++i)
            if (phi[i] < u[i]) return false;
        return true;
    }

private:
    template <class T>
    const T& alpha_of(std::uint32_t edge) const {
        if constexpr (std::is_same_v<T, double>)
            return edge_alpha_d_[edge];
        else
            return edge_alpha_[edge];
    }

    LevelGraph graph_;
    JHat jhat_;
    PolyRatio alpha_;
    std::vector<Rational> edge_alpha_;
    std::vector<double> edge_alpha_d_;
    std::vector<size_t> forward_label_;
    std::vector<size_t> backward_label_;
};

inline WeightVector phi_apply(const FractalSpec& spec, const PolyRatio& alpha, const WeightVector& u) {
    for (const auto& x : u)
        if (x < 0) throw std::invalid_argument("weights must be nonnegative");
    return BellmanOperator(spec, alpha).apply(u);
}

/// g_0 = 1, g_n = Phi(g_{n-1}); g_n(iota) is the minimum over gamma_1..gamma_n
/// of H(T_gamma1 ... T_gamman e_iota). Stops after the first repeat.
inline std::vector<WeightVector> dp_iterate(const BellmanOperator& op, int max_depth) {
    if (max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
    std::vector<WeightVector> seq{WeightVector(op.jhat().size(), Rational(1))};
    for (int n = 1; n <= max_depth; ++n) {
        seq.push_back(op.apply(seq.back()));
        if (seq.back() == seq[seq.size() - 2]) break;
    }
    return seq;
}

inline std::vector<WeightVector> dp_iterate(const FractalSpec& spec, const PolyRatio& alpha, int max_depth) {
    return dp_iterate(BellmanOperator(spec, alpha), max_depth);
}

inline bool verify_up_certificate(const BellmanOperator& op, const WeightVector& u) { return op.is_subinvariant(u); }

inline bool verify_up_certificate(const FractalSpec& spec, const PolyRatio& alpha, const WeightVector& u) {
    return BellmanOperator(spec, alpha).is_subinvariant(u);
}

/// A stationary choice of paths on a label set S that is closed under the
/// choice, with a positive vector v on S and lambda < 1 such that M v <= lambda v
/// for the induced nonnegative matrix M. Repeating that gamma forever makes
/// H(T_gamma^n e_iota) <= (max v / min v) lambda^n, which tends to 0.
struct NotUpCertificate {
    std::vector<Iota> labels;        // S
    std::vector<PathRecord> policy;  // aligned with labels; level-1 paths
    std::vector<Rational> v;         // aligned with labels
    Rational lambda;
};

/// (M v)_iota for the policy rows, or nullopt if a path leaves S or is not a
/// strict level-1 path between the right endpoints.
inline std::optional<std::vector<Rational>> policy_image(const BellmanOperator& op, const NotUpCertificate& c) {
    const auto& g = op.graph();
    const auto& jhat = op.jhat();
    if (c.labels.empty() || c.policy.size() != c.labels.size() || c.v.size() != c.labels.size()) return std::nullopt;
    std::vector<long> pos(jhat.size(), -1);
    for (size_t s = 0; s < c.labels.size(); ++s) {
        size_t i = jhat.index(c.labels[s]);
        if (pos[i] >= 0) return std::nullopt;
        pos[i] = static_cast<long>(s);
    }
    std::vector<Rational> image;
    for (size_t s = 0; s < c.labels.size(); ++s) {
        // Labels are re-derived from the graph rather than trusted.
        PathRecord p;
        try {
            p = PathRecord::from_vertices(g, c.policy[s].vertices());
        } catch (const std::exception&) {
            return std::nullopt;
        }
        const Iota io = c.labels[s];
        if (!p.strict() || p.front() != g.vertices().boundary_point(io.from) ||
            p.back() != g.vertices().boundary_point(io.to))
            return std::nullopt;
        Rational row = 0;
        for (const auto& st : p.steps()) {
            long at = pos[jhat.index(*st.iota)];
            if (at < 0) return std::nullopt;
            row += word_weight(op.alpha(), st.word) * c.v[static_cast<size_t>(at)];
        }
        image.push_back(row);
    }
    return image;
}

inline bool verify_notup_certificate(const BellmanOperator& op, const NotUpCertificate& c) {
    if (c.lambda >= 1) return false;
    for (const auto& x : c.v)
        if (x <= 0) return false;
    auto image = policy_image(op, c);
    if (!image) return false;
    for (size_t s = 0; s < image->size(); ++s)
        if ((*image)[s] > c.lambda * c.v[s]) return false;
    return true;
}

inline bool verify_notup_certificate(const FractalSpec& spec, const PolyRatio& alpha, const NotUpCertificate& c) {
    return verify_notup_certificate(BellmanOperator(spec, alpha), c);
}

struct ProvenUp {
    WeightVector u;
    std::string method; // "all-ones", "fixed-point", "policy-iteration"
};

struct ProvenNotUp {
    NotUpCertificate certificate;
};

struct Undecided {
    int depth = 0;
    std::vector<double> floor; // float snapshot of g_depth
};

using Verdict = std::variant<ProvenUp, ProvenNotUp, Undecided>;

enum class MetricStatus { Metric, NotMetric, Undecided };

inline MetricStatus metric_verdict(const Verdict& v) {
    if (std::holds_alternative<ProvenUp>(v)) return MetricStatus::Metric;
    if (std::holds_alternative<ProvenNotUp>(v)) return MetricStatus::NotMetric;
    return MetricStatus::Undecided;
}

inline const char* to_string(MetricStatus s) {
    switch (s) {
    case MetricStatus::Metric:
        return "METRIC";
    case MetricStatus::NotMetric:
        return "NOT_METRIC";
    default:
        return "UNDECIDED";
    }
}

struct CheckOptions {
    int max_depth = 256;
    /// Exact Phi iterations attempted before the float-guided certificate search.
    int exact_warmup = 12;
};

namespace detail {

/// Gaussian elimination over the rationals; nullopt when singular.
inline std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col] / a[col][col];
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

/// Groups coordinate indices by value, ascending, merging values that agree
/// to a relative 1e-9.
inline std::vector<std::vector<size_t>> value_groups(const std::vector<double>& g) {
    std::vector<size_t> order(g.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return g[a] < g[b]; });
    std::vector<std::vector<size_t>> groups;
    for (size_t i : order) {
        if (!groups.empty()) {
            double ref = g[groups.back().front()];
            if (std::fabs(g[i] - ref) <= 1e-9 * std::max(std::fabs(ref), std::fabs(g[i]))) {
                groups.back().push_back(i);
                continue;
            }
        }
        groups.push_back({i});
    }
    return groups;
}

/// Row weights of the matrix induced by one path: sum of alpha_w per label.
inline std::vector<Rational> path_row(const BellmanOperator& op, const std::vector<VertexId>& vertices) {
    auto p = PathRecord::from_vertices(op.graph(), vertices);
    std::vector<Rational> row(op.jhat().size(), Rational(0));
    for (const auto& st : p.steps()) row[op.jhat().index(*st.iota)] += word_weight(op.alpha(), st.word);
    return row;
}

class CertificateSearch {
public:
    explicit CertificateSearch(const BellmanOperator& op) : op_(op), jn_(op.jhat().size()) {}

    /// Tries every "lowest values" prefix of the guide as the decaying set.
    std::optional<NotUpCertificate> not_up(const std::vector<double>& guide) {
        auto groups = value_groups(guide);
        std::vector<char> in(jn_, 0);
        std::set<std::vector<char>> tried;
        for (const auto& grp : groups) {
            for (size_t i : grp) in[i] = 1;
            if (auto c = not_up_on(in, tried)) return c;
        }
        return std::nullopt;
    }

    /// Policy iteration for a fixed point of Phi: the highest-value prefixes
    /// of the guide are pinned at 1 and the rest solved exactly.
    std::optional<WeightVector> up(const std::vector<double>& guide) {
        auto groups = value_groups(guide);
        std::reverse(groups.begin(), groups.end());
        std::vector<char> pinned(jn_, 0);
        for (size_t gi = 0; gi + 1 < groups.size(); ++gi) {
            for (size_t i : groups[gi]) pinned[i] = 1;
            if (auto u = up_with(pinned, guide)) return u;
        }
        // No coordinate at 1: solve the eigen-equation with the largest
        // coordinate normalized instead.
        return up_with(std::vector<char>(jn_, 0), guide);
    }

private:
    std::optional<NotUpCertificate> not_up_on(std::vector<char> s, std::set<std::vector<char>>& tried) {
        BellmanOperator::Options opt;
        opt.exclude_direct = true;
        for (;;) {
            if (std::none_of(s.begin(), s.end(), [](char c) { return c; })) return std::nullopt;
            if (!tried.insert(s).second) return std::nullopt;
            opt.allowed = &s;

            // Damped, normalized power iteration of the restricted operator.
            std::vector<double> x(jn_, 0.0);
            for (size_t i = 0; i < jn_; ++i)
                if (s[i]) x[i] = 1.0;
            bool pruned = false;
            BellmanOperator::Result<double> r;
            double rho = 0;
            for (int it = 0; it < 400; ++it) {
                r = op_.evaluate(x, opt);
                for (size_t i = 0; i < jn_; ++i)
                    if (s[i] && !r.value[i]) {
                        s[i] = 0;
                        pruned = true;
                    }
                if (pruned) break;
                double mx = 0;
                rho = 0;
                for (size_t i = 0; i < jn_; ++i)
                    if (s[i]) {
                        mx = std::max(mx, *r.value[i]);
                        if (x[i] > 0) rho = std::max(rho, *r.value[i] / x[i]);
                    }
                if (mx <= 0) break;
                double nx = 0;
                for (size_t i = 0; i < jn_; ++i)
                    if (s[i]) {
                        x[i] = 0.5 * x[i] + 0.5 * (*r.value[i] / mx);
                        nx = std::max(nx, x[i]);
                    }
                for (size_t i = 0; i < jn_; ++i) x[i] /= nx;
            }
            if (pruned) continue;
            r = op_.evaluate(x, opt);
            if (!(rho < 1.0 - 1e-12)) return std::nullopt;

            NotUpCertificate cert;
            std::vector<std::vector<Rational>> rows;
            std::vector<double> xs;
            for (size_t i = 0; i < jn_; ++i)
                if (s[i]) {
                    cert.labels.push_back(op_.jhat()[i]);
                    cert.policy.push_back(PathRecord::from_vertices(op_.graph(), r.argmin[i]));
                    rows.push_back(path_row(op_, r.argmin[i]));
                    xs.push_back(x[i]);
                }

            // First try the rounded eigenvector itself.
            bool rounded_ok = true;
            for (double xi : xs) {
                Rational q = approximate(xi, 1'000'000);
                if (q <= 0) rounded_ok = false;
                cert.v.push_back(q);
            }
            if (rounded_ok && finish(cert, rows, s)) return cert;

            // Otherwise v = (mu I - M)^{-1} 1 for some rho < mu < 1, which is
            // positive and satisfies M v = mu v - 1 < mu v.
            Rational mu = approximate(0.5 * (1.0 + rho), 1'000'000);
            if (mu >= 1 || mu <= 0) return std::nullopt;
            const size_t n = cert.labels.size();
            std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
            std::vector<size_t> idx;
            for (size_t i = 0; i < jn_; ++i)
                if (s[i]) idx.push_back(i);
            for (size_t r0 = 0; r0 < n; ++r0)
                for (size_t c0 = 0; c0 < n; ++c0) a[r0][c0] = (r0 == c0 ? mu : Rational(0)) - rows[r0][idx[c0]];
            auto v = solve_linear(a, std::vector<Rational>(n, Rational(1)));
            if (!v) return std::nullopt;
            cert.v = *v;
            if (std::any_of(cert.v.begin(), cert.v.end(), [](const Rational& q) { return q <= 0; })) return std::nullopt;
            Rational mx = *std::max_element(cert.v.begin(), cert.v.end());
            for (auto& q : cert.v) q /= mx;
            if (finish(cert, rows, s)) return cert;
            return std::nullopt;
        }
    }

    /// lambda := max (M v)_i / v_i; accepted if < 1 and the certificate verifies.
    bool finish(NotUpCertificate& cert, const std::vector<std::vector<Rational>>& rows, const std::vector<char>& s) {
        std::vector<size_t> idx;
        for (size_t i = 0; i < jn_; ++i)
            if (s[i]) idx.push_back(i);
        Rational lambda = 0;
        for (size_t r0 = 0; r0 < idx.size(); ++r0) {
            Rational mv = 0;
            for (size_t c0 = 0; c0 < idx.size(); ++c0) mv += rows[r0][idx[c0]] * cert.v[c0];
            Rational ratio = mv / cert.v[r0];
            if (ratio > lambda) lambda = ratio;
        }
        cert.lambda = lambda;
        return lambda < 1 && verify_notup_certificate(op_, cert);
    }

    std::optional<WeightVector> up_with(const std::vector<char>& pinned, const std::vector<double>& guide) {
        BellmanOperator::Options opt;
        opt.exclude_direct = true;
        auto r = op_.evaluate(guide, opt);
        std::vector<std::vector<VertexId>> policy = r.argmin;

        bool eigen = std::none_of(pinned.begin(), pinned.end(), [](char c) { return c; });
        size_t pivot = 0;
        if (eigen) pivot = static_cast<size_t>(std::max_element(guide.begin(), guide.end()) - guide.begin());

        for (int round = 0; round < 8; ++round) {
            std::vector<size_t> free;
            for (size_t i = 0; i < jn_; ++i)
                if (!pinned[i] && !(eigen && i == pivot)) free.push_back(i);
            std::vector<std::vector<Rational>> rows(jn_);
            for (size_t i : free) {
                if (policy[i].empty()) return std::nullopt;
                rows[i] = path_row(op_, policy[i]);
            }
            const size_t n = free.size();
            std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
            std::vector<Rational> b(n, Rational(0));
            for (size_t r0 = 0; r0 < n; ++r0) {
                const auto& row = rows[free[r0]];
                for (size_t c0 = 0; c0 < n; ++c0) a[r0][c0] = (r0 == c0 ? Rational(1) : Rational(0)) - row[free[c0]];
                for (size_t i = 0; i < jn_; ++i)
                    if (pinned[i] || (eigen && i == pivot)) b[r0] += row[i];
            }
            auto sol = solve_linear(a, b);
            if (!sol) return std::nullopt;
            WeightVector u(jn_, Rational(1));
            for (size_t r0 = 0; r0 < n; ++r0) u[free[r0]] = (*sol)[r0];
            if (std::any_of(u.begin(), u.end(), [](const Rational& q) { return q <= 0; })) return std::nullopt;
            if (op_.is_subinvariant(u)) return u;

            // Policy improvement against the exact candidate.
            auto better = op_.evaluate(u, opt);
            bool changed = false;
            for (size_t i : free)
                if (!better.argmin[i].empty() && better.value[i] && *better.value[i] < u[i] &&
                    better.argmin[i] != policy[i]) {
                    policy[i] = better.argmin[i];
                    changed = true;
                }
            if (!changed) return std::nullopt;
        }
        return std::nullopt;
    }

    const BellmanOperator& op_;
    size_t jn_;
};

} // namespace detail

/// Decides uniform positivity for (spec, alpha), emitting only certificates
/// that re-verify exactly:
///   1. u = 1 is subinvariant (every ratio large enough);
///   2. exact iteration of Phi reaches a positive fixed point;
///   3. a decaying label set carries a stationary contracting policy;
///   4. policy iteration finds an exact positive fixed point;
///   5. otherwise the answer is Undecided at max_depth.
/// A float shadow of the iteration guides steps 3-4 and never decides.
inline Verdict check_up(const FractalSpec& spec, const PolyRatio& alpha, CheckOptions opt = {}) {
    if (opt.max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
    BellmanOperator op(spec, alpha);
    const size_t jn = op.jhat().size();

    WeightVector g(jn, Rational(1));
    if (op.is_subinvariant(g)) return ProvenUp{g, "all-ones"};

    int depth = 0;
    auto exact_until = [&](int limit) -> std::optional<Verdict> {
        while (depth < limit) {
            auto next = op.apply(g);
            ++depth;
            if (next == g) {
                if (op.is_subinvariant(g)) return ProvenUp{g, "fixed-point"};
                return std::nullopt;
            }
            g = std::move(next);
        }
        return std::nullopt;
    };
    if (auto v = exact_until(std::min(opt.max_depth, opt.exact_warmup))) return *v;

    std::vector<std::vector<double>> guides;
    std::vector<double> shadow(jn, 1.0);
    std::vector<int> checkpoints{16, 64, opt.max_depth};
    for (int n = 1; n <= opt.max_depth; ++n) {
        shadow = op.apply(shadow);
        if (std::find(checkpoints.begin(), checkpoints.end(), n) != checkpoints.end()) guides.push_back(shadow);
    }
    std::reverse(guides.begin(), guides.end());

    detail::CertificateSearch search(op);
    for (const auto& guide : guides) {
        if (auto c = search.not_up(guide)) return ProvenNotUp{std::move(*c)};
        if (auto u = search.up(guide)) return ProvenUp{std::move(*u), "policy-iteration"};
    }

    if (auto v = exact_until(opt.max_depth)) return *v;
    return Undecided{opt.max_depth, shadow};
}

} // namespace fracmetric
