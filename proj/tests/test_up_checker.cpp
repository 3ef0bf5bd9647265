#include <fracmetric/catalog.hpp>
#include <fracmetric/up_checker.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace fracmetric;

namespace {

WeightVector ones(size_t n) { return WeightVector(n, Rational(1)); }

VertexId at(const LevelGraph& g, const char* addr) {
    return g.vertices().canonicalize(Address::parse(addr, g.spec().k));
}

PathRecord path(const LevelGraph& g, std::initializer_list<const char*> addrs) {
    std::vector<VertexId> vs;
    for (auto a : addrs) vs.push_back(at(g, a));
    return PathRecord::from_vertices(g, vs);
}

NotUpCertificate gasket_pair_certificate(const LevelGraph& g, Rational lambda) {
    return {{{1, 2}, {2, 1}},
            {path(g, {"e.1", "1.2", "e.2"}), path(g, {"e.2", "1.2", "e.1"})},
            {Rational(1), Rational(1)},
            lambda};
}

} // namespace

TEST(Phi, Examples) {
    auto iv = builtin("interval");
    auto phi = phi_apply(iv, PolyRatio::parse("3/10,3/10"), ones(2));
    EXPECT_EQ(phi[0], Rational(3, 5));
    EXPECT_EQ(phi[1], Rational(3, 5));

    auto gk = builtin("gasket");
    auto g1 = phi_apply(gk, PolyRatio::parse("2/5,1/2,3/5"), ones(6));
    EXPECT_EQ(g1[JHat(3).index({1, 2})], Rational(9, 10));

    auto zero = phi_apply(gk, PolyRatio::parse("2/5,1/2,3/5"), WeightVector(6, Rational(0)));
    for (const auto& z : zero) EXPECT_EQ(z, 0);
    EXPECT_THROW(phi_apply(gk, PolyRatio::parse("2/5,1/2,3/5"), ones(5)), std::invalid_argument);
}

TEST(Phi, MatchesEnumerationOracle) {
    std::mt19937_64 rng(43);
    for (const auto& name : builtin_names()) {
        auto s = builtin(name);
        LevelGraph g1(s, 1);
        JHat j(s.n);
        for (int t = 0; t < 50; ++t) {
            auto a = oracle::random_alpha(rng, s.k);
            WeightVector u;
            for (size_t i = 0; i < j.size(); ++i) u.push_back(oracle::random_ratio(rng, 30));
            EXPECT_EQ(phi_apply(s, a, u), oracle::phi_by_enumeration(g1, a, u)) << name << " " << a.str();
        }
    }
}

TEST(Phi, BoundedHomogeneousMonotone) {
    std::mt19937_64 rng(47);
    for (const auto& name : builtin_names()) {
        auto s = builtin(name);
        JHat j(s.n);
        for (int t = 0; t < 20; ++t) {
            auto a = oracle::random_alpha(rng, s.k);
            BellmanOperator op(s, a);
            WeightVector u, bigger;
            for (size_t i = 0; i < j.size(); ++i) {
                u.push_back(oracle::random_ratio(rng));
                bigger.push_back(u.back() + oracle::random_ratio(rng));
            }
            Rational c = oracle::random_ratio(rng) * 7;
            WeightVector cu;
            for (const auto& x : u) cu.push_back(c * x);
            auto pu = op.apply(u), pcu = op.apply(cu), pb = op.apply(bigger);
            for (size_t i = 0; i < j.size(); ++i) {
                EXPECT_LE(pu[i], u[i]);
                EXPECT_EQ(pcu[i], c * pu[i]);
                EXPECT_LE(pu[i], pb[i]);
            }
        }
    }
}

TEST(Phi, FloatShadowTracksExact) {
    std::mt19937_64 rng(53);
    auto s = builtin("vicsek");
    for (int t = 0; t < 10; ++t) {
        auto a = oracle::random_alpha(rng, s.k);
        BellmanOperator op(s, a);
        auto exact = op.apply(ones(12));
        auto approx = op.apply(std::vector<double>(12, 1.0));
        for (size_t i = 0; i < 12; ++i) EXPECT_NEAR(approx[i], exact[i].get_d(), 1e-12);
    }
}

TEST(DpIterate, Examples) {
    auto iv = builtin("interval");
    auto fixed = dp_iterate(iv, PolyRatio::parse("1/2,1/2"), 10);
    ASSERT_EQ(fixed.size(), 2u);
    EXPECT_EQ(fixed[1], fixed[0]);

    auto seq = dp_iterate(iv, PolyRatio::parse("3/10,3/10"), 8);
    ASSERT_EQ(seq.size(), 9u);
    Rational p = 1;
    for (const auto& g : seq) {
        EXPECT_EQ(g[0], p);
        EXPECT_EQ(g[1], p);
        p *= Rational(3, 5);
    }

    auto gs = dp_iterate(builtin("gasket"), PolyRatio::parse("1/2,1/2,1/2"), 5);
    EXPECT_EQ(gs.size(), 2u);
    EXPECT_EQ(gs[1], ones(6));
    EXPECT_THROW(dp_iterate(iv, PolyRatio::parse("1/2,1/2"), 0), std::invalid_argument);
}

TEST(DpIterate, NonincreasingAndSwapSymmetric) {
    std::mt19937_64 rng(59);
    for (const auto& name : builtin_names()) {
        auto s = builtin(name);
        JHat j(s.n);
        for (int t = 0; t < 10; ++t) {
            auto seq = dp_iterate(s, oracle::random_alpha(rng, s.k), 6);
            for (size_t n = 0; n < seq.size(); ++n)
                for (size_t i = 0; i < j.size(); ++i) {
                    EXPECT_EQ(seq[n][i], seq[n][j.swapped(i)]);
                    if (n) {
                        EXPECT_LE(seq[n][i], seq[n - 1][i]);
                    }
                }
        }
    }
}

TEST(DpIterate, EqualsMinimumOverGammaSequences) {
    // g_2(iota) is the minimum over all pairs (gamma1, gamma2) of
    // H(T_gamma1 T_gamma2 e_iota); on the interval Gamma is small enough to
    // enumerate outright.
    auto s = builtin("interval");
    LevelGraph g1(s, 1);
    JHat j(2);
    std::mt19937_64 rng(61);
    for (int t = 0; t < 10; ++t) {
        auto a = oracle::random_alpha(rng, 2);
        std::vector<Gamma> all;
        auto p12 = enumerate_strict_paths(g1, {1, 2}), p21 = enumerate_strict_paths(g1, {2, 1});
        for (const auto& x : p12)
            for (const auto& y : p21) all.emplace_back(g1, std::vector<PathRecord>{x, y});
        auto seq = dp_iterate(s, a, 2);
        for (size_t i = 0; i < j.size(); ++i) {
            std::optional<Rational> best;
            for (const auto& ga : all)
                for (const auto& gb : all) {
                    EdgeVector e(2, Rational(0));
                    e[i] = 1;
                    Rational h = total(transfer_apply(ga, transfer_apply(gb, e, a, j), a, j));
                    if (!best || h < *best) best = h;
                }
            EXPECT_EQ(seq.back()[i], *best);
        }
    }
}

TEST(VerifyUp, Examples) {
    EXPECT_TRUE(verify_up_certificate(builtin("gasket"), PolyRatio::parse("1/2,1/2,1/2"), ones(6)));
    EXPECT_FALSE(verify_up_certificate(builtin("interval"), PolyRatio::parse("3/10,3/10"), ones(2)));
    EXPECT_FALSE(verify_up_certificate(builtin("gasket"), PolyRatio::parse("1/2,1/2,1/2"), WeightVector(6, Rational(0))));
    EXPECT_FALSE(verify_up_certificate(builtin("gasket"), PolyRatio::parse("1/2,1/2,1/2"), ones(5)));
}

TEST(VerifyNotUp, Examples) {
    auto s = builtin("gasket");
    auto a = PolyRatio::parse("2/5,1/2,3/5");
    LevelGraph g1(s, 1);
    EXPECT_TRUE(verify_notup_certificate(s, a, gasket_pair_certificate(g1, Rational(9, 10))));
    EXPECT_FALSE(verify_notup_certificate(s, a, gasket_pair_certificate(g1, Rational(4, 5))));

    auto iv = builtin("interval");
    LevelGraph i1(iv, 1);
    NotUpCertificate c{{{1, 2}, {2, 1}},
                       {path(i1, {"e.1", "1.2", "e.2"}), path(i1, {"e.2", "1.2", "e.1"})},
                       {Rational(1), Rational(1)},
                       Rational(3, 5)};
    EXPECT_TRUE(verify_notup_certificate(iv, PolyRatio::parse("3/10,3/10"), c));
}

TEST(VerifyNotUp, RejectsStructuralDefects) {
    auto s = builtin("gasket");
    auto a = PolyRatio::parse("2/5,1/2,3/5");
    LevelGraph g1(s, 1);
    auto good = gasket_pair_certificate(g1, Rational(9, 10));

    // (P1, Q12, P2) only carries label (1,2), so S = {(1,2)} alone is sound.
    auto c = good;
    c.labels.pop_back();
    c.policy.pop_back();
    c.v.pop_back();
    EXPECT_TRUE(verify_notup_certificate(s, a, c));

    c = good;
    c.policy[0] = path(g1, {"e.1", "1.3", "3.2", "e.2"});
    EXPECT_FALSE(verify_notup_certificate(s, a, c)) << "labels (1,3), (3,2) lie outside S";

    c = good;
    c.v[0] = 0;
    EXPECT_FALSE(verify_notup_certificate(s, a, c));

    c = good;
    c.lambda = 1;
    EXPECT_FALSE(verify_notup_certificate(s, a, c));

    c = good;
    c.policy[0] = path(g1, {"e.1", "1.3", "e.3"});
    EXPECT_FALSE(verify_notup_certificate(s, a, c)) << "wrong endpoints";

    c = good;
    c.policy[0] = path(g1, {"e.1", "1.2", "1.3", "1.2", "e.2"});
    EXPECT_FALSE(verify_notup_certificate(s, a, c)) << "not strict";

    c = good;
    c.labels = {};
    c.policy = {};
    c.v = {};
    EXPECT_FALSE(verify_notup_certificate(s, a, c));
}

TEST(CheckUp, Examples) {
    auto v = check_up(builtin("gasket"), PolyRatio::parse("1/2,1/2,1/2"));
    ASSERT_TRUE(std::holds_alternative<ProvenUp>(v));
    EXPECT_EQ(std::get<ProvenUp>(v).u, ones(6));
    EXPECT_EQ(metric_verdict(v), MetricStatus::Metric);

    v = check_up(builtin("gasket"), PolyRatio::parse("2/5,1/2,3/5"));
    ASSERT_TRUE(std::holds_alternative<ProvenNotUp>(v));
    const auto& c = std::get<ProvenNotUp>(v).certificate;
    EXPECT_EQ(c.lambda, Rational(9, 10));
    ASSERT_EQ(c.labels.size(), 2u);
    EXPECT_EQ(c.labels[0].str(), "(1,2)");
    EXPECT_EQ(metric_verdict(v), MetricStatus::NotMetric);

    auto vs = builtin("vicsek");
    auto a = PolyRatio::parse("1/5,1/5,4/5,4/5,9/20");
    v = check_up(vs, a);
    ASSERT_TRUE(std::holds_alternative<ProvenUp>(v));
    const auto& u = std::get<ProvenUp>(v).u;
    JHat j(4);
    EXPECT_LT(u[j.index({1, 2})], 1);
    EXPECT_TRUE(verify_up_certificate(vs, a, u));
}

TEST(CheckUp, VicsekFixedPointByHand) {
    // The only cheap route P1 -> P2 runs corner 1, center, corner 2 at cost
    // 1/5 + 9/20 u(1,2) + 1/5, so u(1,2) = 2/5 + 9/20 u(1,2) = 8/11; every
    // other pair keeps 1. The exact iterates decrease towards u and never
    // cross it.
    auto s = builtin("vicsek");
    auto a = PolyRatio::parse("1/5,1/5,4/5,4/5,9/20");
    auto v = check_up(s, a);
    const auto& u = std::get<ProvenUp>(v).u;
    EXPECT_EQ(phi_apply(s, a, u), u);
    JHat j(4);
    for (size_t i = 0; i < j.size(); ++i) {
        bool small_pair = j[i].from + j[i].to == 3;
        EXPECT_EQ(u[i], small_pair ? Rational(8, 11) : Rational(1)) << j[i].str();
    }
    BellmanOperator op(s, a);
    std::vector<double> g(12, 1.0);
    for (int n = 0; n < 200; ++n) g = op.apply(g);
    for (size_t i = 0; i < j.size(); ++i) EXPECT_NEAR(g[i], u[i].get_d(), 1e-9);
    for (const auto& gn : dp_iterate(s, a, 12))
        for (size_t i = 0; i < j.size(); ++i) EXPECT_GE(gn[i], u[i]);
}

TEST(CheckUp, VerdictPlumbing) {
    EXPECT_EQ(metric_verdict(Undecided{3, {}}), MetricStatus::Undecided);
    EXPECT_STREQ(to_string(MetricStatus::Undecided), "UNDECIDED");
    EXPECT_STREQ(to_string(MetricStatus::NotMetric), "NOT_METRIC");
    CheckOptions opt;
    opt.max_depth = 0;
    EXPECT_THROW(check_up(builtin("interval"), PolyRatio::parse("1/2,1/2"), opt), std::invalid_argument);
}

TEST(CheckUp, EveryCertificateVerifies) {
    std::mt19937_64 rng(67);
    for (const auto& name : builtin_names()) {
        auto s = builtin(name);
        for (int t = 0; t < 40; ++t) {
            auto a = oracle::random_alpha(rng, s.k, 12);
            BellmanOperator op(s, a);
            auto v = check_up(s, a);
            if (auto* up = std::get_if<ProvenUp>(&v))
                EXPECT_TRUE(verify_up_certificate(op, up->u));
            else if (auto* no = std::get_if<ProvenNotUp>(&v))
                EXPECT_TRUE(verify_notup_certificate(op, no->certificate));
            else
                ADD_FAILURE() << name << " " << a.str() << " undecided";
            EXPECT_EQ(metric_verdict(v) == MetricStatus::Metric, closed_form_metric(name, a)) << name << " " << a.str();
        }
    }
}
