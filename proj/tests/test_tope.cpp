#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "architope/tope.hpp"

using namespace architope;

namespace {

const auto leb1 = measures::lebesgue(1);
const auto quad = QuadratureScheme::tensor(4096);

std::shared_ptr<const Partition> shells(std::size_t N, double width = 1.0) {
    return std::make_shared<const Partition>(make_shell_partition(1, N, width));
}

PolynomialModel constant_model(const Box& box, double c) {
    PolynomialModel m(box.dimension(), 1, 0, PolynomialBasis::chebyshev, box);
    Eigen::MatrixXd coeffs(1, 1);
    coeffs(0, 0) = c;
    m.set_coefficients(coeffs);
    return m;
}

PolynomialModel identity_model(const Box& box) {
    PolynomialModel m(1, 1, 1, PolynomialBasis::monomial, box);
    Eigen::MatrixXd coeffs(1, 2);
    coeffs << 0.0, 1.0;
    m.set_coefficients(coeffs);
    return m;
}

double at(const Architope& a, double x) {
    const double pt[] = {x};
    return a(pt)[0];
}

} // namespace

TEST(Architope, SingleTermGating) {
    const auto p = shells(2);
    Architope a(p, {{1, 1.0, constant_model(p->region(1).outer, 1.0)}}, std::nullopt);
    EXPECT_EQ(at(a, 0.5), 1.0);
    EXPECT_EQ(at(a, 1.5), 0.0);
}

TEST(Architope, TailBranchOutsideUnion) {
    const auto p = shells(2);
    const Box big = p->bounding_box(2);
    Architope a(p, {{1, 0.0, constant_model(big, 1.0)}}, Tail{2.0, constant_model(big, 1.0)});
    EXPECT_EQ(at(a, 5.0), 2.0);
    EXPECT_EQ(at(a, 0.0), 0.0);
}

TEST(Architope, SecondRegionBranch) {
    const auto p = shells(2);
    Architope a(p,
                {{1, 1.0, constant_model(p->region(1).outer, 1.0)},
                 {2, 3.0, identity_model(p->region(2).outer)}},
                std::nullopt);
    EXPECT_DOUBLE_EQ(at(a, 1.5), 4.5);
    EXPECT_DOUBLE_EQ(at(a, 1.0), 1.0);  // boundary: smallest index wins
}

TEST(Architope, TailCoversRegionsWithoutTerms) {
    // I^+ is the complement of the term regions, so K_2 falls to the tail here.
    const auto p = shells(3);
    const Box big = p->bounding_box(3);
    Architope a(p, {{1, 1.0, constant_model(big, 1.0)}}, Tail{5.0, constant_model(big, 1.0)});
    EXPECT_EQ(at(a, 1.5), 5.0);
    EXPECT_EQ(at(a, 0.5), 1.0);
}

TEST(Architope, RejectsInvalidTerms) {
    const auto p = shells(2);
    const Box b = p->region(1).outer;
    EXPECT_THROW(Architope(p, {{1, 0.0, constant_model(b, 1.0)}}, std::nullopt), ValidationError);
    EXPECT_THROW(Architope(p, {{3, 1.0, constant_model(b, 1.0)}}, std::nullopt), ValidationError);
    EXPECT_THROW(Architope(p, {{1, 1.0, constant_model(b, 1.0)}, {1, 1.0, constant_model(b, 2.0)}}, std::nullopt),
                 ValidationError);
    EXPECT_THROW(Architope(p, {}, std::nullopt), ValidationError);
}

TEST(Architope, ContainsTheBaseClass) {
    // β = 1 on every region with the same f, and tail (1, f): agrees with f everywhere.
    const auto p = shells(4);
    const Box big = p->bounding_box(4);
    PolynomialModel f(1, 1, 3, PolynomialBasis::chebyshev, big);
    Eigen::MatrixXd c(1, 4);
    c << 0.3, -1.2, 0.7, 0.05;
    f.set_coefficients(c);
    std::vector<Term> terms;
    for (std::size_t i = 1; i <= 4; ++i) terms.push_back({i, 1.0, f});
    Architope a(p, terms, Tail{1.0, f});
    for (double x = -6; x <= 6; x += 0.01) {
        const double pt[] = {x};
        EXPECT_EQ(a(pt), f(pt)) << x;
    }
}

TEST(Architope, GatingIsLinear) {
    const auto p = shells(3);
    std::vector<Term> terms;
    for (std::size_t i = 1; i <= 3; ++i) terms.push_back({i, 0.5 * static_cast<double>(i), identity_model(p->region(i).outer)});
    const Architope a(p, terms, Tail{1.0, constant_model(p->bounding_box(3), 2.0)});
    const Architope b = a.scaled(-3.0);
    for (double x = -4; x <= 4; x += 0.125) EXPECT_DOUBLE_EQ(at(b, x), -3.0 * at(a, x)) << x;
}

TEST(Architope, WithBetaPreservesEvaluation) {
    const auto p = shells(2);
    const Architope a(p, {{1, 1.0, identity_model(p->region(1).outer)}, {2, 1.0, constant_model(p->region(2).outer, 4.0)}},
                      std::nullopt);
    const Architope b = a.with_beta(2, 8.0);
    EXPECT_EQ(b.terms()[1].beta, 8.0);
    for (double x = -2; x <= 2; x += 0.1) EXPECT_NEAR(at(a, x), at(b, x), 1e-15);
    EXPECT_THROW(a.with_beta(2, 0.0), ValidationError);
}

TEST(Upgrade, IndicatorIsRepresentedExactly) {
    const auto p = shells(2);
    const auto target = functions::indicator(p->region(1));
    UpgradeOptions opt;
    opt.fit.p = 1.0;
    const auto r = upgrade(target, PolynomialLearner{0}, p, leb1, 2, opt);
    EXPECT_LT(r.report.strict_norm, 1e-8);
    const double in[] = {0.2}, out[] = {1.7};
    EXPECT_NEAR(evaluate(r.architope.terms()[0].model, in)[0], 1.0, 1e-12);
    EXPECT_NEAR(evaluate(r.architope.terms()[1].model, out)[0], 0.0, 1e-12);
    ASSERT_TRUE(r.architope.tail().has_value());
    EXPECT_EQ(r.architope.tail()->beta, 0.0);
}

TEST(Upgrade, ZeroTarget) {
    const auto p = shells(3);
    const auto r = upgrade(functions::zero(), PolynomialLearner{4}, p, leb1, 3);
    EXPECT_LT(r.report.lp_total, 1e-10);
    EXPECT_LT(r.report.strict_norm, 1e-10);
    EXPECT_LT(r.report.local_metric, 1e-10);
}

TEST(Upgrade, ExpDecayEightShellsDegreeSix) {
    // The kink of e^{-|x|} sits inside K_1. Oracle: the L¹-optimal degree-6
    // polynomial on [-1,1] (linear program over 4000 midpoint nodes) has L¹
    // error 0.031592, so no degree-6 fit reaches a total below that; the
    // remaining shells are smooth and contribute little.
    constexpr double kL1OptimalOnFirstShell = 0.031592;
    const auto p = shells(8);
    const auto target = functions::scalar([](Point x) { return std::exp(-std::abs(x[0])); }, "exp-decay");
    UpgradeOptions opt;
    opt.fit.p = 1.0;
    const auto r = upgrade(target, PolynomialLearner{6}, p, leb1, 8, opt);
    EXPECT_GE(r.report.per_region[0].value, kL1OptimalOnFirstShell - 1e-4);
    EXPECT_LT(r.report.per_region[0].value, 1.2 * kL1OptimalOnFirstShell);
    double rest = 0;
    for (std::size_t i = 1; i < 8; ++i) rest += r.report.per_region[i].value;
    EXPECT_LT(rest, 5e-3);
    EXPECT_NEAR(r.report.lp_total, r.report.per_region[0].value + rest, 1e-12);
}

TEST(Upgrade, StrictErrorNonIncreasingInDegree) {
    const auto p = shells(4);
    const auto target = functions::scalar([](Point x) { return std::cos(2 * x[0]) * std::exp(-0.3 * std::abs(x[0])); }, "t");
    UpgradeOptions opt;
    opt.quad = QuadratureScheme::tensor(1024);
    opt.fit.node_budget = 1024;
    opt.fit.p = 2.0;
    double previous = INFINITY;
    for (unsigned k = 0; k <= 8; ++k) {
        const auto r = upgrade(target, PolynomialLearner{k}, p, leb1, 4, opt);
        EXPECT_LE(r.report.strict_norm, previous + 1e-9) << k;
        previous = r.report.strict_norm;
    }
}

TEST(Upgrade, SupportControl) {
    const auto p = shells(6);
    const auto target = functions::scalar([](Point x) { return 1 + x[0] * x[0]; }, "t");
    const auto r = upgrade(target, PolynomialLearner{2}, p, leb1, 3);
    const auto idx = ess_support_index(as_function(r.architope), *p, leb1, quad, 1e-9);
    ASSERT_TRUE(idx.has_value());
    EXPECT_LE(*idx, 3u);
}

TEST(Upgrade, ThreadCountDoesNotChangeResult) {
    const auto p = shells(6);
    const auto target = functions::scalar([](Point x) { return std::tanh(x[0]); }, "tanh");
    UpgradeOptions opt;
    opt.quad = QuadratureScheme::tensor(512);
    opt.fit.node_budget = 512;
    const auto a = upgrade(target, PolynomialLearner{5}, p, leb1, 6, opt);
    opt.threads = 4;
    const auto b = upgrade(target, PolynomialLearner{5}, p, leb1, 6, opt);
    EXPECT_EQ(to_json(a.architope).dump(), to_json(b.architope).dump());
    EXPECT_EQ(a.report.lp_total, b.report.lp_total);
}

TEST(Upgrade, MlpLearner) {
    const auto p = shells(2);
    const auto target = functions::scalar([](Point x) { return std::sin(x[0]); }, "sin");
    UpgradeOptions opt;
    opt.fit.train.epochs = 300;
    opt.fit.node_budget = 256;
    opt.quad = QuadratureScheme::tensor(512);
    const auto r = upgrade(target, MlpLearner{{8}}, p, leb1, 2, opt);
    EXPECT_LT(r.report.strict_norm, 0.1);
    EXPECT_TRUE(std::holds_alternative<MlpModel>(r.architope.terms()[0].model));
}

TEST(Upgrade, ZeroMassRegionIsAssumptionViolation) {
    const auto p = shells(3);
    MeasureSpec m{1, [](Point x) { return std::abs(x[0]) <= 1.0 ? 1.0 : 0.0; }, "central"};
    try {
        upgrade(functions::zero(), PolynomialLearner{0}, p, m, 3);
        FAIL();
    } catch (const AssumptionViolation& e) {
        EXPECT_EQ(e.region(), 2u);
    }
}

TEST(Upgrade, FitErrorsCarryRegionIndex) {
    const auto p = shells(2);
    const auto target = functions::scalar([](Point x) { return x[0] > 1.5 ? NAN : 0.0; }, "nan");
    try {
        upgrade(target, PolynomialLearner{1}, p, leb1, 2);
        FAIL();
    } catch (const RegionFitError& e) {
        EXPECT_EQ(e.region(), 2u);
    }
}

TEST(GapDemo, ArchitopeRowIsExactAndPolynomialsLeak) {
    const auto p = shells(2);
    std::vector<unsigned> degrees(16);
    for (unsigned k = 0; k < 16; ++k) degrees[k] = k;
    const auto r = gap_demo(p, leb1, 1.0, degrees, quad);
    ASSERT_EQ(r.rows.size(), 17u);
    for (std::size_t i = 0; i < 16; ++i) {
        EXPECT_EQ(r.rows[i].kind, "global-polynomial");
        EXPECT_GT(r.rows[i].off_support_mass, 1e-8) << i;
    }
    EXPECT_EQ(r.rows.back().kind, "architope");
    EXPECT_LT(r.rows.back().strict_error, 1e-10);
    EXPECT_LT(r.rows.back().off_support_mass, 1e-12);
}

TEST(GapDemo, DegreeZeroIsTheMean) {
    // oracle: grid search for the best constant under equal masses μ(K_1) = μ(K_2) = 2
    double best = 0, best_err = INFINITY;
    for (int i = 0; i <= 1000; ++i) {
        const double c = i / 1000.0;
        const double err = 2 * (1 - c) * (1 - c) + 2 * c * c;
        if (err < best_err) best_err = err, best = c;
    }
    const auto p = shells(2);
    const auto r = gap_demo(p, leb1, 1.0, {0}, quad);
    const double x[] = {0.0};
    EXPECT_NEAR(r.global_models[0](x)[0], best, 1e-6);
    EXPECT_NEAR(r.rows[0].off_support_mass, 1.0, 1e-9);
}

TEST(GapDemo, EmptyDegreeListGivesArchitopeRowOnly) {
    const auto r = gap_demo(shells(2), leb1, 1.0, {}, QuadratureScheme::tensor(256));
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].kind, "architope");
    EXPECT_THROW(gap_demo(shells(1), leb1, 1.0, {}, quad), PreconditionError);
}

TEST(ArchitopeJson, RoundTrip) {
    const auto p = shells(3);
    const auto target = functions::scalar([](Point x) { return std::exp(-std::abs(x[0])); }, "exp");
    const auto r = upgrade(target, PolynomialLearner{4}, p, leb1, 3);
    const auto back = architope_from_json(nlohmann::json::parse(to_json(r.architope).dump()));
    for (double x = -4; x <= 4; x += 0.01) {
        const double pt[] = {x};
        EXPECT_EQ(r.architope(pt), back(pt));
    }
}
