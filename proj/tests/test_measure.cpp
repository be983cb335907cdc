#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "architope/measure.hpp"
#include "architope/partition.hpp"

using namespace architope;

namespace {

const auto one = [](Point) { return 1.0; };

Box interval(double a, double b) { return Box{{a}, {b}}; }

} // namespace

TEST(Measure, ConstantIntegrandIsExact) {
    const auto leb = measures::lebesgue(1);
    for (std::size_t r : {2, 3, 7, 64, 1000})
        EXPECT_NEAR(integrate(one, interval(-1, 1), leb, QuadratureScheme::tensor(r)), 2.0, 1e-12);
}

TEST(Measure, ZeroIntegrand) {
    const auto zero = [](Point) { return 0.0; };
    EXPECT_EQ(integrate(zero, interval(-3, 5), measures::gaussian(1, 2.0), QuadratureScheme::tensor(17)), 0.0);
    EXPECT_EQ(integrate(zero, Box::cube(2, 1), measures::exp_decay(2, 1.0), QuadratureScheme::tensor(9)), 0.0);
}

TEST(Measure, SquareOnUnitInterval) {
    // ∫_0^1 x² dx = 1/3; midpoint error is h²/12 · (1/... ) ≈ 5e-9 at r = 4096.
    const auto sq = [](Point x) { return x[0] * x[0]; };
    EXPECT_NEAR(integrate(sq, interval(0, 1), measures::lebesgue(1), QuadratureScheme::tensor(4096)), 1.0 / 3.0,
                1e-6);
}

TEST(Measure, TensorNodeCount) {
    const auto nodes = make_nodes(Box::cube(3, 1), QuadratureScheme::tensor(5));
    EXPECT_EQ(nodes.size(), 125u);
    EXPECT_THROW(make_nodes(Box::cube(1, 1), QuadratureScheme::tensor(1)), ValidationError);
}

TEST(Measure, DegenerateBoxRejected) {
    EXPECT_THROW(integrate(one, interval(1, 1), measures::lebesgue(1), QuadratureScheme::tensor(4)),
                 ValidationError);
}

TEST(Measure, NonFiniteDensityIsAnError) {
    MeasureSpec bad{1, [](Point x) { return x[0] > 0 ? std::nan("") : 1.0; }, "bad"};
    try {
        integrate(one, interval(-1, 1), bad, QuadratureScheme::tensor(4));
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        EXPECT_NE(std::string(e.what()).find("node (0.25)"), std::string::npos) << e.what();
    }
    MeasureSpec negative{1, [](Point) { return -1.0; }, "neg"};
    EXPECT_THROW(integrate(one, interval(-1, 1), negative, QuadratureScheme::tensor(4)), EvaluationError);
}

TEST(Measure, NonFiniteIntegrandIsAnError) {
    const auto inf = [](Point x) { return 1.0 / x[0]; };
    // r = 3 puts a midpoint at 0.
    EXPECT_THROW(integrate(inf, interval(-1, 1), measures::lebesgue(1), QuadratureScheme::tensor(3)),
                 EvaluationError);
}

TEST(Measure, AdditivityUnderBisection) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto meas = measures::exp_decay(2, 0.7);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = u(rng), b = u(rng), c = u(rng);
        auto g = [=](Point x) { return std::exp(a * x[0]) + b * x[1] * x[1] + c * x[0] * x[1] + 2; };
        Box box{{-1.5, 0.0}, {2.5, 1.0}};
        std::vector<std::size_t> full{64, 32}, half{32, 32};
        const double whole = sum_weighted(g, weigh(tensor_nodes(box, full), meas));
        Box left = box, right = box;
        left.hi[0] = right.lo[0] = 0.5;
        const double parts =
            sum_weighted(g, weigh(tensor_nodes(left, half), meas)) + sum_weighted(g, weigh(tensor_nodes(right, half), meas));
        EXPECT_NEAR(whole, parts, 1e-10);
    }
}

TEST(Measure, Monotonicity) {
    const auto meas = measures::gaussian(2, 0.8);
    const auto quad = QuadratureScheme::tensor(40);
    auto g1 = [](Point x) { return std::sin(x[0]) * std::sin(x[0]); };
    auto g2 = [](Point x) { return std::sin(x[0]) * std::sin(x[0]) + 0.01 * x[1] * x[1]; };
    EXPECT_LE(integrate(g1, Box::cube(2, 2), meas, quad), integrate(g2, Box::cube(2, 2), meas, quad));
}

TEST(Measure, DeterministicBits) {
    const auto meas = measures::gaussian(4, 1.0);
    auto g = [](Point x) { return std::cos(x[0] + x[1] * x[2] - x[3]); };
    const auto mc = QuadratureScheme::monte_carlo(20000, 1234);
    const double a = integrate(g, Box::cube(4, 2), meas, mc);
    const double b = integrate(g, Box::cube(4, 2), meas, mc);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b));
    const auto n1 = make_nodes(Box::cube(4, 2), mc);
    const auto n2 = make_nodes(Box::cube(4, 2), mc);
    EXPECT_EQ(n1.coords, n2.coords);
    const auto other = make_nodes(Box::cube(4, 2), QuadratureScheme::monte_carlo(20000, 1235));
    EXPECT_NE(n1.coords, other.coords);
}

TEST(Measure, MonteCarloConvergesForGaussianMass) {
    // ∫_{[-3,3]^4} N(0, I) ≈ erf(3/√2)^4.
    const double expected = std::pow(std::erf(3 / std::sqrt(2.0)), 4);
    const double got = integrate(one, Box::cube(4, 3), measures::gaussian(4, 1.0), QuadratureScheme::default_for(4));
    EXPECT_NEAR(got, expected, 3e-2);
}

TEST(Measure, DefaultSchemeSwitchesAtDimensionFour) {
    EXPECT_EQ(QuadratureScheme::default_for(3).kind, QuadratureKind::tensor_midpoint);
    EXPECT_EQ(QuadratureScheme::default_for(4).kind, QuadratureKind::monte_carlo);
}

TEST(Measure, RestrictToRegionMass) {
    Region k1{interval(-1, 1), std::nullopt, 1};
    const auto restricted = restrict_to_region(measures::lebesgue(1), k1);
    EXPECT_NEAR(integrate(one, interval(-3, 3), restricted, QuadratureScheme::tensor(600)), 2.0, 1e-12);
    EXPECT_NE(restricted.label.find("K_1"), std::string::npos);
}

TEST(Measure, RestrictIsIdempotent) {
    Region shell{interval(-2, 2), interval(-1, 1), 2};
    const auto base = measures::gaussian(1, 1.3);
    const auto once = restrict_to_region(base, shell);
    const auto twice = restrict_to_region(once, shell);
    for (double x = -3; x <= 3; x += 0.0625) {
        const double p[] = {x};
        EXPECT_EQ(once(p), twice(p)) << x;
    }
}

TEST(Measure, RestrictedGaussianMassIsErfOne) {
    // density e^{-x²}/√π is N(0, 1/2).
    Region k1{interval(-1, 1), std::nullopt, 1};
    const auto g = measures::gaussian(1, 1.0 / std::sqrt(2.0));
    const double mass = integrate(one, k1, restrict_to_region(g, k1), QuadratureScheme::tensor(4096));
    EXPECT_NEAR(mass, std::erf(1.0), 1e-4);
    EXPECT_NEAR(mass, 0.8427007929497148, 1e-4);
}

TEST(Measure, TabulatedDensityInterpolates) {
    // density 1 + x + 2y on a 3×2 grid: multilinear interpolation is exact for it.
    std::vector<std::vector<double>> rows;
    for (double x : {0.0, 0.5, 1.0})
        for (double y : {0.0, 1.0}) rows.push_back({x, y, 1 + x + 2 * y});
    const auto m = measures::tabulated(2, rows);
    const double p[] = {0.3, 0.25};
    EXPECT_NEAR(m(p), 1 + 0.3 + 0.5, 1e-14);
    const double outside[] = {1.5, 0.5};
    EXPECT_EQ(m(outside), 0.0);
    // ∫_{[0,1]²} (1 + x + 2y) = 1 + 1/2 + 1 = 2.5
    EXPECT_NEAR(integrate(one, Box{{0, 0}, {1, 1}}, m, QuadratureScheme::tensor(64)), 2.5, 1e-12);
}

TEST(Measure, TabulatedDensityRejectsIncompleteGrid) {
    std::vector<std::vector<double>> rows{{0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
    EXPECT_THROW(measures::tabulated(2, rows), ValidationError);
    std::vector<std::vector<double>> negative{{0, -1}, {1, 1}};
    EXPECT_THROW(measures::tabulated(1, negative), ValidationError);
}
