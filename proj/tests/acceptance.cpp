// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. All checks are exact except the wall-clock limits below.

#include <fracmetric/fracmetric.hpp>
#include <fracmetric/json_io.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace fracmetric;

namespace {

constexpr double kGasketGridSeconds = 60.0;
constexpr double kVicsekGridSeconds = 300.0;
constexpr int kIntervalCases = 200;
constexpr int kFastPathCases = 100;
constexpr int kInsertionCases = 500;
constexpr int kRecursionCases = 500;
constexpr int kChainAlphas = 20;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& run) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o = run();
    std::printf("[%s] %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Emitted {
    std::string spec;
    PolyRatio alpha;
    Verdict verdict;
};

// Every decided verdict from criteria 1-4, for the soundness check.
std::vector<Emitted> emitted;
// ProvenUP cases from the two grids, for the lower-bound check.
std::vector<Emitted> grid_up;

std::vector<PolyRatio> grid(int k, const std::vector<Rational>& values) {
    std::vector<PolyRatio> out;
    std::vector<size_t> idx(static_cast<size_t>(k), 0);
    for (;;) {
        std::vector<Rational> a;
        for (auto i : idx) a.push_back(values[i]);
        out.emplace_back(a);
        size_t p = 0;
        while (p < idx.size() && ++idx[p] == values.size()) idx[p++] = 0;
        if (p == idx.size()) return out;
    }
}

Outcome grid_agreement(const char* name, const std::vector<Rational>& values, int k, double limit) {
    auto spec = builtin(name);
    auto t0 = std::chrono::steady_clock::now();
    size_t points = 0, mismatches = 0, undecided = 0;
    for (const auto& a : grid(k, values)) {
        ++points;
        auto v = check_up(spec, a);
        auto status = metric_verdict(v);
        if (status == MetricStatus::Undecided) {
            ++undecided;
            continue;
        }
        if ((status == MetricStatus::Metric) != closed_form_metric(name, a)) ++mismatches;
        emitted.push_back({name, a, v});
        if (status == MetricStatus::Metric) grid_up.push_back({name, a, v});
    }
    double t = seconds_since(t0);
    Outcome o;
    o.pass = mismatches == 0 && undecided == 0 && t < limit;
    o.detail = fmt("%zu points, %zu mismatches, %zu undecided, %.2f s (limit %.0f s)", points, mismatches, undecided, t,
                   limit);
    return o;
}

std::vector<Rational> tenths() {
    std::vector<Rational> v;
    for (int i = 1; i <= 9; ++i) v.push_back(Rational(i, 10));
    return v;
}

std::vector<Rational> fifths() {
    std::vector<Rational> v;
    for (int i = 1; i <= 4; ++i) {
        Rational r(i, 5);
        r.canonicalize();
        v.push_back(r);
    }
    return v;
}

Outcome interval_recursion(std::mt19937_64& rng) {
    auto spec = builtin("interval");
    size_t verdict_bad = 0, undecided = 0, up = 0;
    for (int c = 0; c < kIntervalCases; ++c) {
        auto a = oracle::random_alpha(rng, 2);
        auto v = check_up(spec, a);
        if (metric_verdict(v) == MetricStatus::Undecided) {
            ++undecided;
            continue;
        }
        emitted.push_back({"interval", a, v});
        bool is_up = std::holds_alternative<ProvenUp>(v);
        up += is_up;
        if (is_up != (a[1] + a[2] >= 1)) ++verdict_bad;
    }
    size_t dist_bad = 0, brute_bad = 0, dist_cases = 0, contracting = 0;
    std::vector<LevelGraph> graphs;
    for (int m = 1; m <= 6; ++m) graphs.emplace_back(spec, m);
    for (int c = 0; c < kIntervalCases / 10; ++c) {
        auto a = oracle::random_alpha(rng, 2);
        for (int m = 1; m <= 6; ++m) {
            const auto& g = graphs[static_cast<size_t>(m - 1)];
            auto p1 = g.vertices().boundary_point(1), p2 = g.vertices().boundary_point(2);
            // The level-0 edge P1-P2 of weight 1 stays in every level graph.
            Rational s = std::min(Rational(1), Rational(a[1] + a[2]));
            Rational expect = 1;
            for (int i = 0; i < m; ++i) expect *= s;
            contracting += m == 1 && a[1] + a[2] <= 1;
            Rational d = shortest_distance(g, a, p1, p2);
            ++dist_cases;
            if (d != expect) ++dist_bad;
            if (m <= 3 && oracle::brute_distance(g, a, p1, p2) != d) ++brute_bad;
        }
    }
    Outcome o;
    o.pass = verdict_bad == 0 && undecided == 0 && dist_bad == 0 && brute_bad == 0;
    o.detail = fmt("%d verdicts (%zu UP), %zu wrong, %zu undecided; %zu level distances m<=6 (%zu polyratios with "
                   "a1+a2 <= 1), %zu off min(1,a1+a2)^m, %zu brute-force disagreements at m<=3",
                   kIntervalCases, up, verdict_bad, undecided, dist_cases, contracting, dist_bad, brute_bad);
    return o;
}

PolyRatio random_half_or_more(std::mt19937_64& rng, int k) {
    std::vector<Rational> v;
    for (int i = 0; i < k; ++i) {
        int q = std::uniform_int_distribution<int>(2, 20)(rng);
        int p = std::uniform_int_distribution<int>((q + 1) / 2, q - 1)(rng);
        Rational r(p, q);
        r.canonicalize();
        v.push_back(r);
    }
    return PolyRatio(v);
}

Outcome fast_path(std::mt19937_64& rng) {
    size_t cases = 0, bad = 0;
    for (const auto& name : builtin_names()) {
        auto spec = builtin(name);
        for (int c = 0; c < kFastPathCases; ++c) {
            auto a = random_half_or_more(rng, spec.k);
            auto v = check_up(spec, a);
            ++cases;
            auto* up = std::get_if<ProvenUp>(&v);
            if (up) emitted.push_back({name, a, v});
            if (!up || up->u != WeightVector(up->u.size(), Rational(1)) || !verify_up_certificate(spec, a, up->u)) ++bad;
        }
    }
    Outcome o;
    o.pass = bad == 0;
    o.detail = fmt("%zu cases over %zu built-ins, %zu without an accepted u = 1 certificate", cases,
                   builtin_names().size(), bad);
    return o;
}

// Independent validity judgements for mutated certificates. Phi(u) is
// recomputed by Bellman-Ford relaxation over the level-1 arcs; with positive
// costs the cheapest walks are strict paths.
bool oracle_up_valid(const LevelGraph& g1, const std::vector<Rational>& edge_weight, const WeightVector& u) {
    for (const auto& x : u)
        if (x <= 0) return false;
    JHat jhat(g1.spec().n);
    const size_t n = g1.vertex_count();
    for (size_t i = 0; i < jhat.size(); ++i) {
        const auto src = g1.vertices().boundary_point(jhat[i].from);
        const auto dst = g1.vertices().boundary_point(jhat[i].to);
        std::vector<std::optional<Rational>> d(n);
        d[src.index] = 0;
        for (bool changed = true; changed;) {
            changed = false;
            for (std::uint32_t v = 0; v < n; ++v) {
                if (!d[v]) continue;
                for (const auto& arc : g1.arcs(v)) {
                    const auto& e = g1.edges()[arc.edge];
                    Rational c = *d[v] + edge_weight[arc.edge] * u[jhat.index(e.label_from(g1.vertex(v)))];
                    if (!d[arc.to] || c < *d[arc.to]) {
                        d[arc.to] = c;
                        changed = true;
                    }
                }
            }
        }
        if (*d[dst.index] < u[i]) return false;
    }
    return true;
}

bool oracle_notup_valid(const LevelGraph& g1, const PolyRatio& a, const NotUpCertificate& c) {
    JHat jhat(g1.spec().n);
    if (c.lambda >= 1 || c.labels.empty()) return false;
    std::map<size_t, Rational> v;
    for (size_t s = 0; s < c.labels.size(); ++s) {
        if (c.v[s] <= 0) return false;
        v[jhat.index(c.labels[s])] = c.v[s];
    }
    for (size_t s = 0; s < c.labels.size(); ++s) {
        const auto& p = c.policy[s];
        if (!p.strict() || p.front() != g1.vertices().boundary_point(c.labels[s].from) ||
            p.back() != g1.vertices().boundary_point(c.labels[s].to))
            return false;
        auto x = hat_sigma(p, a, jhat);
        Rational mv = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0) continue;
            if (!v.count(i)) return false;
            mv += x[i] * v[i];
        }
        if (mv > c.lambda * c.v[s]) return false;
    }
    return true;
}

std::vector<Rational> mutations(const Rational& x) {
    return {x * Rational(3, 2), x * Rational(2, 3), x + Rational(1, 100), x - Rational(1, 100), Rational(0)};
}

Outcome soundness() {
    size_t certs = 0, reverify_bad = 0, round_trip_bad = 0, mutants = 0, verifier_oracle_disagree = 0,
           certs_without_rejection = 0;
    std::map<std::string, LevelGraph> level1;
    for (const auto& e : emitted) {
        auto spec = builtin(e.spec);
        if (!level1.count(e.spec)) level1.emplace(e.spec, LevelGraph(spec, 1));
        const auto& g1 = level1.at(e.spec);
        BellmanOperator op(spec, e.alpha);
        ++certs;
        if (!verify_certificate(op, e.verdict)) ++reverify_bad;
        auto back = certificate_from_json(op, Json::parse(certificate_to_json(op, e.verdict).dump()));
        if (!verify_certificate(op, back) ||
            certificate_to_json(op, back).dump() != certificate_to_json(op, e.verdict).dump())
            ++round_trip_bad;

        size_t rejected = 0;
        auto judge = [&](const Verdict& mutant, bool truth) {
            ++mutants;
            bool said = verify_certificate(op, mutant);
            if (said != truth) ++verifier_oracle_disagree;
            if (!said) ++rejected;
        };
        if (auto* up = std::get_if<ProvenUp>(&e.verdict)) {
            std::vector<Rational> edge_weight;
            for (const auto& edge : g1.edges()) edge_weight.push_back(word_weight(e.alpha, edge.word));
            for (size_t i = 0; i < up->u.size(); ++i)
                for (const auto& m : mutations(up->u[i])) {
                    auto u = up->u;
                    u[i] = m;
                    judge(ProvenUp{u, "mutant"}, oracle_up_valid(g1, edge_weight, u));
                }
            // A certificate entry far above every route cost.
            auto u = up->u;
            u[0] = 100;
            judge(ProvenUp{u, "mutant"}, oracle_up_valid(g1, edge_weight, u));
        } else {
            const auto& c = std::get<ProvenNotUp>(e.verdict).certificate;
            for (size_t s = 0; s <= c.v.size(); ++s) {
                const Rational& x = s < c.v.size() ? c.v[s] : c.lambda;
                for (const auto& m : mutations(x)) {
                    auto mc = c;
                    (s < c.v.size() ? mc.v[s] : mc.lambda) = m;
                    judge(ProvenNotUp{mc}, oracle_notup_valid(g1, e.alpha, mc));
                }
            }
            auto mc = c;
            mc.lambda = 1;
            judge(ProvenNotUp{mc}, oracle_notup_valid(g1, e.alpha, mc));
        }
        if (rejected == 0) ++certs_without_rejection;
    }
    Outcome o;
    o.pass = certs > 0 && reverify_bad == 0 && round_trip_bad == 0 && verifier_oracle_disagree == 0 &&
             certs_without_rejection == 0;
    o.detail = fmt("%zu certificates, %zu fail re-verification, %zu fail JSON round trip; %zu single-rational "
                   "mutants, %zu verifier/oracle disagreements, %zu certificates with no rejected mutant",
                   certs, reverify_bad, round_trip_bad, mutants, verifier_oracle_disagree, certs_without_rejection);
    return o;
}

struct Graphs {
    FractalSpec spec;
    std::vector<LevelGraph> by_level; // index = level
};

std::vector<Graphs> graph_ladders(int top) {
    std::vector<Graphs> out;
    for (const auto& name : builtin_names()) {
        Graphs gs{builtin(name), {}};
        for (int m = 0; m <= top; ++m) gs.by_level.emplace_back(gs.spec, m);
        out.push_back(std::move(gs));
    }
    return out;
}

Outcome insertion_identity(std::mt19937_64& rng, const std::vector<Graphs>& ladders) {
    size_t bad = 0, weak_steps = 0;
    for (int c = 0; c < kInsertionCases; ++c) {
        const auto& gs = ladders[static_cast<size_t>(c) % ladders.size()];
        int m = std::uniform_int_distribution<int>(1, 2)(rng);
        const auto& g = gs.by_level[static_cast<size_t>(m)];
        auto a = oracle::random_alpha(rng, gs.spec.k);
        auto gamma = oracle::random_gamma(rng, gs.by_level[1]);
        auto path = oracle::random_walk(rng, g, std::uniform_int_distribution<size_t>(1, 8)(rng));
        for (const auto& st : path.steps()) weak_steps += st.weak();
        JHat jhat(gs.spec.n);
        auto lhs = hat_sigma(insert(gamma, path, gs.by_level[1], gs.by_level[static_cast<size_t>(m) + 1]), a, jhat);
        auto rhs = transfer_apply(gamma, hat_sigma(path, a, jhat), a, jhat);
        if (lhs != rhs) ++bad;
    }
    Outcome o;
    o.pass = bad == 0;
    o.detail = fmt("%d cases (paths at levels 1-2, %zu weak steps), %zu violations", kInsertionCases, weak_steps, bad);
    return o;
}

Outcome recursion_identity(std::mt19937_64& rng, const std::vector<Graphs>& ladders) {
    size_t bad = 0;
    for (int c = 0; c < kRecursionCases; ++c) {
        const auto& gs = ladders[static_cast<size_t>(c) % ladders.size()];
        const auto& g1 = gs.by_level[1];
        JHat jhat(gs.spec.n);
        auto a = oracle::random_alpha(rng, gs.spec.k);
        int m = std::uniform_int_distribution<int>(1, 2)(rng);
        std::vector<Gamma> gammas; // gamma_1 .. gamma_{m+1}
        for (int i = 0; i <= m; ++i) gammas.push_back(oracle::random_gamma(rng, g1));
        auto iota = jhat[std::uniform_int_distribution<size_t>(0, jhat.size() - 1)(rng)];

        // H(T_1 ... T_{m+1} e_iota) from the path obtained by repeated insertion.
        auto path_of = [&](size_t count, size_t idx) {
            PathRecord p = gammas[count - 1][idx];
            for (size_t i = count - 1; i-- > 0;) p = insert(gammas[i], p, g1, gs.by_level[p.level() + 1]);
            return p;
        };
        Rational lhs = sum_along(path_of(static_cast<size_t>(m) + 1, jhat.index(iota)), a);

        // Sum over iota' of T_{m+1}(e_iota)_iota' * H(T_1 ... T_m e_iota').
        auto first = transfer_matrix(gammas[static_cast<size_t>(m)], a, jhat)[jhat.index(iota)];
        Rational rhs = 0;
        for (size_t t = 0; t < jhat.size(); ++t) {
            if (first[t] == 0) continue;
            EdgeVector e(jhat.size(), Rational(0));
            e[t] = 1;
            for (size_t i = static_cast<size_t>(m); i-- > 0;) e = transfer_apply(gammas[i], e, a, jhat);
            Rational h = 0;
            for (const auto& x : e) h += x;
            rhs += first[t] * h;
        }
        if (lhs != rhs) ++bad;
    }
    Outcome o;
    o.pass = bad == 0;
    o.detail = fmt("%d products of length 2-3, %zu violations", kRecursionCases, bad);
    return o;
}

Outcome chain_below_path(std::mt19937_64& rng) {
    size_t pairs = 0, violations = 0, runs = 0;
    for (const auto& name : builtin_names()) {
        auto spec = builtin(name);
        for (int c = 0; c < kChainAlphas; ++c) {
            auto rep = compare_chain_path(spec, oracle::random_alpha(rng, spec.k), 2);
            ++runs;
            pairs += rep.pairs;
            violations += rep.violations;
        }
    }
    Outcome o;
    o.pass = violations == 0 && runs == builtin_names().size() * kChainAlphas;
    o.detail = fmt("%zu polyratios, %zu V^(2) pairs, %zu with chain > path", runs, pairs, violations);
    return o;
}

Outcome scaling() {
    auto g = scaling_report(builtin("gasket"), PolyRatio::parse("1/2,1/2,1/2"), 4, 2);
    size_t not_one = 0;
    for (const auto& r : g.rows) not_one += r.ratio != 1;
    auto v = scaling_report(builtin("vicsek"), PolyRatio::parse("3/10,3/10,3/10,3/10,2/5"), 4, 2);
    size_t outside = 0;
    for (const auto& r : v.rows) outside += !(r.ratio > 0 && r.ratio <= 1);
    Outcome o;
    o.pass = !g.rows.empty() && not_one == 0 && !v.rows.empty() && outside == 0 && v.min_ratio > 0 && v.max_ratio <= 1;
    o.detail = fmt("gasket %zu cells, %zu ratios != 1; vicsek %zu cells, %zu outside (0,1], min %s, max %s",
                   g.rows.size(), not_one, v.rows.size(), outside, to_string(v.min_ratio).c_str(),
                   to_string(v.max_ratio).c_str());
    return o;
}

Outcome lower_bound() {
    size_t cases = 0, pairs = 0, violations = 0;
    std::map<std::string, LevelGraph> level3;
    for (const auto& e : grid_up) {
        if (!level3.count(e.spec)) level3.emplace(e.spec, LevelGraph(builtin(e.spec), 3));
        const auto& g = level3.at(e.spec);
        const auto& u = std::get<ProvenUp>(e.verdict).u;
        Rational c3 = *std::min_element(u.begin(), u.end());
        Rational bound = c3 * e.alpha.min() * e.alpha.min() * e.alpha.min();
        WeightedGraph wg(g, e.alpha);
        ++cases;
        for (std::uint32_t s = 0; s < g.vertex_count(); ++s) {
            auto d = wg.distances_from(g.vertex(s));
            for (std::uint32_t t = s + 1; t < g.vertex_count(); ++t) {
                ++pairs;
                if (!d[t] || *d[t] < bound) ++violations;
            }
        }
    }
    Outcome o;
    o.pass = cases > 0 && violations == 0;
    o.detail = fmt("%zu ProvenUP grid cases, %zu V^(3) pairs, %zu below (min u)(min alpha)^3", cases, pairs, violations);
    return o;
}

} // namespace

int main() {
    std::mt19937_64 rng(kSeed);
    report(1, "gasket grid agreement", [] { return grid_agreement("gasket", tenths(), 3, kGasketGridSeconds); });
    report(2, "vicsek grid agreement", [] { return grid_agreement("vicsek", fifths(), 5, kVicsekGridSeconds); });
    report(3, "interval closed recursion", [&] { return interval_recursion(rng); });
    report(4, "fast path alpha_i >= 1/2", [&] { return fast_path(rng); });
    report(5, "certificate soundness", [] { return soundness(); });
    auto ladders = graph_ladders(3);
    report(6, "insertion commutes with transfer", [&] { return insertion_identity(rng, ladders); });
    report(7, "H recursion over products", [&] { return recursion_identity(rng, ladders); });
    report(8, "chain distance below path distance", [&] { return chain_below_path(rng); });
    report(9, "scaling report", [] { return scaling(); });
    report(10, "finite-level lower bound", [] { return lower_bound(); });
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
