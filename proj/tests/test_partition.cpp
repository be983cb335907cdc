#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "architope/partition.hpp"

using namespace architope;

namespace {

const auto one = [](Point) { return 1.0; };
const auto quad = QuadratureScheme::tensor(4096);

std::optional<std::size_t> locate1(const Partition& p, double x) {
    const double pt[] = {x};
    return p.locate(pt);
}

} // namespace

TEST(Partition, SingleShellIsCentralInterval) {
    const auto p = make_shell_partition(1, 1, 1.0);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_FALSE(p.region(1).inner.has_value());
    EXPECT_NEAR(region_mass(p, 1, measures::lebesgue(1), quad), 2.0, 1e-12);
}

TEST(Partition, SecondShellLebesgueMass) {
    const auto p = make_shell_partition(1, 2, 1.0);
    EXPECT_NEAR(region_mass(p, 2, measures::lebesgue(1), quad), 2.0, 1e-12);
}

TEST(Partition, TwoDimensionalShellMassMatchesBoxArithmetic) {
    const auto p = make_shell_partition(2, 2, 1.0);
    const double arithmetic = 4.0 * 4.0 - 2.0 * 2.0;
    EXPECT_NEAR(region_mass(p, 2, measures::lebesgue(2), QuadratureScheme::tensor(64)), arithmetic, 1e-10);
    EXPECT_DOUBLE_EQ(p.region(2).lebesgue_volume(), arithmetic);
}

TEST(Partition, ShellMassesUnderExpDecay) {
    const auto p = make_shell_partition(1, 3, 1.0);
    const auto m = measures::exp_decay(1, 1.0);
    EXPECT_NEAR(region_mass(p, 1, m, quad), 2 * (1 - std::exp(-1.0)), 1e-4);
    EXPECT_NEAR(region_mass(p, 1, m, quad), 1.2642411176571153, 1e-4);
    EXPECT_NEAR(region_mass(p, 3, measures::lebesgue(1), quad), 2.0, 1e-12);
}

TEST(Partition, ShellMassesSumToCube) {
    for (std::size_t d : {1, 2, 3})
        for (double width : {0.5, 1.0, 2.0}) {
            const std::size_t N = d == 3 ? 3 : 5;
            const auto p = make_shell_partition(d, N, width);
            const auto q = QuadratureScheme::tensor(d == 3 ? 4 : 16);
            double total = 0;
            for (std::size_t n = 1; n <= N; ++n) total += region_mass(p, n, measures::lebesgue(d), q);
            EXPECT_NEAR(total, std::pow(2 * width * static_cast<double>(N), static_cast<double>(d)), 1e-8)
                << "d=" << d << " width=" << width;
        }
}

TEST(Partition, LocateTieBreakAndOutside) {
    const auto p = make_shell_partition(1, 2, 1.0);
    EXPECT_EQ(locate1(p, 0.5), 1u);
    EXPECT_EQ(locate1(p, 1.0), 1u);
    EXPECT_EQ(locate1(p, -1.0), 1u);
    EXPECT_EQ(locate1(p, 1.5), 2u);
    EXPECT_EQ(locate1(p, 2.0), 2u);
    EXPECT_FALSE(locate1(p, 7.3).has_value());
}

TEST(Partition, LocateAgreesWithMembershipOnCube) {
    const auto p = make_shell_partition(2, 4, 0.75);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 5000; ++i) {
        const double x[] = {u(rng), u(rng)};
        const auto n = p.locate(x);
        ASSERT_TRUE(n.has_value());
        EXPECT_TRUE(p.region(*n).contains(x));
        for (std::size_t m = 1; m < *n; ++m) EXPECT_FALSE(p.region(m).contains(x));
    }
}

TEST(Partition, OuterBoundaryIsMember) {
    const auto p = make_shell_partition(2, 3, 1.0);
    const double corner[] = {3.0, -3.0};
    const double edge[] = {2.0, 0.5};
    EXPECT_TRUE(p.region(3).contains(corner));
    EXPECT_TRUE(p.region(2).contains(edge));
    EXPECT_TRUE(p.region(3).contains(edge));  // shared face with the inner cube
}

TEST(Partition, OverlapsAreNullAndCubeIsCovered) {
    for (std::size_t d : {1, 2}) {
        const auto p = make_shell_partition(d, 4, 1.0);
        for (const auto& m : {measures::lebesgue(d), measures::gaussian(d, 1.5), measures::exp_decay(d, 0.5)}) {
            const auto check = check_partition(p, m, QuadratureScheme::tensor(d == 1 ? 512 : 32));
            EXPECT_LE(check.max_overlap, 1e-10);
            EXPECT_LE(check.uncovered, 1e-10);
            EXPECT_EQ(check.masses.size(), 4u);
        }
    }
}

TEST(Partition, OverlappingRegionsAreDetected) {
    std::vector<Region> regions{{Box{{-1}, {1}}, std::nullopt, 1}, {Box{{0}, {2}}, std::nullopt, 2}};
    Partition p(1, regions);
    EXPECT_NEAR(overlap_mass(p, 1, 2, measures::lebesgue(1), QuadratureScheme::tensor(64)), 1.0, 1e-12);
    EXPECT_THROW(check_partition(p, measures::lebesgue(1), QuadratureScheme::tensor(64)), ValidationError);
}

TEST(Partition, GapIsDetected) {
    std::vector<Region> regions{{Box{{-1}, {0}}, std::nullopt, 1}, {Box{{0.5}, {2}}, std::nullopt, 2}};
    Partition p(1, regions);
    EXPECT_NEAR(uncovered_mass(p, 2, measures::lebesgue(1), QuadratureScheme::tensor(300)), 0.5, 1e-12);
}

TEST(Partition, ZeroMassRegionViolatesAssumption) {
    // density vanishes on [5, 6]
    MeasureSpec m{1, [](Point x) { return x[0] < 4 ? 1.0 : 0.0; }, "cut"};
    std::vector<Region> regions{{Box{{-1}, {1}}, std::nullopt, 1}, {Box{{5}, {6}}, std::nullopt, 2}};
    Partition p(1, regions);
    try {
        region_mass(p, 2, m, QuadratureScheme::tensor(32));
        FAIL();
    } catch (const AssumptionViolation& e) {
        EXPECT_EQ(e.region(), 2u);
    }
}

TEST(Partition, ConstructorValidation) {
    EXPECT_THROW(make_shell_partition(1, 0, 1.0), ValidationError);
    EXPECT_THROW(make_shell_partition(1, 2, 0.0), ValidationError);
    EXPECT_THROW(make_shell_partition(0, 2, 1.0), ValidationError);
    std::vector<Region> wrong_index{{Box{{-1}, {1}}, std::nullopt, 2}};
    EXPECT_THROW(Partition(1, wrong_index), ValidationError);
    std::vector<Region> inner_touching{{Box{{-1}, {1}}, Box{{-1}, {0}}, 1}};
    EXPECT_THROW(Partition(1, inner_touching), ValidationError);
    EXPECT_THROW(make_shell_partition(1, 2, 1.0).region(3), ValidationError);
}

TEST(Partition, RegionPiecesTileTheShell) {
    const auto p = make_shell_partition(3, 3, 1.0);
    const auto pieces = p.region(3).pieces();
    EXPECT_EQ(pieces.size(), 6u);
    double vol = 0;
    for (const auto& b : pieces) vol += b.volume();
    EXPECT_DOUBLE_EQ(vol, 216.0 - 64.0);
}

TEST(Partition, JsonRoundTrip) {
    const auto p = make_shell_partition(2, 3, 1.5);
    const auto j = to_json(p);
    EXPECT_EQ(j["dimension"], 2);
    EXPECT_FALSE(j["regions"][0].contains("inner"));
    EXPECT_TRUE(j["regions"][1].contains("inner"));
    const auto back = partition_from_json(nlohmann::json::parse(j.dump()));
    ASSERT_EQ(back.size(), p.size());
    for (std::size_t n = 1; n <= p.size(); ++n) {
        EXPECT_EQ(back.region(n).outer, p.region(n).outer);
        EXPECT_EQ(back.region(n).inner, p.region(n).inner);
    }
}

TEST(Partition, JsonRejectsMalformed) {
    EXPECT_THROW(partition_from_json(nlohmann::json::parse(R"({"dimension":1})")), ValidationError);
    EXPECT_THROW(partition_from_json(nlohmann::json::parse(
                     R"({"dimension":1,"regions":[{"index":1,"outer":{"lo":[1],"hi":[0]}}]})")),
                 ValidationError);
}
