#pragma once

// Compact partitions {K_n} of ℝ^d. Every region is an axis-aligned closed
// box, optionally minus an open box strictly inside it, which keeps
// membership exact and lets each region be split into at most 2d disjoint
// boxes for quadrature.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "architope/errors.hpp"
#include "architope/measure.hpp"

namespace architope {

/// Masses at or below this count as zero (Assumption checks, null overlaps).
inline constexpr double kMassTolerance = 1e-10;

struct Region {
    Box outer;
    std::optional<Box> inner;  // open; removed from outer
    std::size_t index = 0;

    bool operator==(const Region&) const = default;

    std::size_t dimension() const noexcept { return outer.dimension(); }

    bool contains(Point x) const {
        if (!outer.contains(x)) return false;
        return !(inner && inner->contains_open(x));
    }

    void validate() const {
        if (index == 0) throw ValidationError("region index must be >= 1");
        const std::string where = "regions[" + std::to_string(index) + "]";
        if (!outer.non_degenerate()) throw ValidationError("outer box is degenerate", where);
        if (inner) {
            if (inner->dimension() != outer.dimension() || !inner->non_degenerate())
                throw ValidationError("inner box is degenerate", where);
            for (std::size_t k = 0; k < outer.dimension(); ++k)
                if (!(inner->lo[k] > outer.lo[k] && inner->hi[k] < outer.hi[k]))
                    throw ValidationError("inner box must lie strictly inside outer", where);
        }
    }

    /// Disjoint (up to shared faces) boxes whose union is the region.
    std::vector<Box> pieces() const {
        if (!inner) return {outer};
        const std::size_t d = dimension();
        std::vector<Box> out;
        out.reserve(2 * d);
        for (std::size_t k = 0; k < d; ++k) {
            Box base = outer;
            for (std::size_t j = 0; j < k; ++j) {
                base.lo[j] = inner->lo[j];
                base.hi[j] = inner->hi[j];
            }
            Box below = base, above = base;
            below.hi[k] = inner->lo[k];
            above.lo[k] = inner->hi[k];
            out.push_back(std::move(below));
            out.push_back(std::move(above));
        }
        return out;
    }

    double lebesgue_volume() const { return outer.volume() - (inner ? inner->volume() : 0.0); }
};

/// Quadrature nodes covering the region (cell volumes as weights, no density).
inline NodeSet region_nodes(const Region& region, const QuadratureScheme& quad) {
    NodeSet out;
    out.dimension = region.dimension();
    std::uint64_t stream = region.index * 64;
    for (const auto& piece : region.pieces()) out.append(make_nodes(piece, quad, stream++));
    return out;
}

/// ∫_{K} g dμ.
template <class G>
double integrate(const G& g, const Region& region, const MeasureSpec& measure,
                 const QuadratureScheme& quad) {
    return sum_weighted(g, weigh(region_nodes(region, quad), measure));
}

/// The finite measure μ_n with dμ_n/dμ = I_{K_n}.
inline MeasureSpec restrict_to_region(const MeasureSpec& measure, const Region& region) {
    if (measure.dimension != region.dimension())
        throw ValidationError("measure and region dimensions differ");
    region.validate();
    auto base = measure.density;
    return {measure.dimension,
            [base, region](Point x) { return region.contains(x) ? base(x) : 0.0; },
            measure.label + "|K_" + std::to_string(region.index)};
}

class Partition {
public:
    Partition() = default;
    Partition(std::size_t dimension, std::vector<Region> regions)
        : dimension_(dimension), regions_(std::move(regions)) {
        validate();
    }

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return regions_.size(); }
    const std::vector<Region>& regions() const noexcept { return regions_; }

    /// 1-based, matching K_1, K_2, ….
    const Region& region(std::size_t n) const {
        if (n < 1 || n > regions_.size())
            throw ValidationError("region index " + std::to_string(n) + " out of range 1.." +
                                  std::to_string(regions_.size()));
        return regions_[n - 1];
    }

    /// Smallest n with x ∈ K_n; nullopt when x lies outside the union.
    std::optional<std::size_t> locate(Point x) const { return locate(x, regions_.size()); }

    /// As locate(), considering only K_1..K_limit.
    std::optional<std::size_t> locate(Point x, std::size_t limit) const {
        limit = std::min(limit, regions_.size());
        for (std::size_t i = 0; i < limit; ++i)
            if (regions_[i].contains(x)) return i + 1;
        return std::nullopt;
    }

    /// Bounding box of K_1 ∪ … ∪ K_n.
    Box bounding_box(std::size_t n) const {
        n = std::min(n, regions_.size());
        if (n == 0) throw ValidationError("bounding box of an empty set of regions");
        Box b = regions_[0].outer;
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t k = 0; k < dimension_; ++k) {
                b.lo[k] = std::min(b.lo[k], regions_[i].outer.lo[k]);
                b.hi[k] = std::max(b.hi[k], regions_[i].outer.hi[k]);
            }
        return b;
    }

    void validate() const {
        if (dimension_ == 0) throw ValidationError("partition dimension must be >= 1", "dimension");
        if (regions_.empty()) throw ValidationError("partition has no regions", "regions");
        for (std::size_t i = 0; i < regions_.size(); ++i) {
            const auto& r = regions_[i];
            if (r.index != i + 1)
                throw ValidationError("region indices must be 1..N in order",
                                      "regions[" + std::to_string(i) + "].index");
            if (r.dimension() != dimension_)
                throw ValidationError("region dimension does not match partition",
                                      "regions[" + std::to_string(i) + "]");
            r.validate();
        }
    }

private:
    std::size_t dimension_ = 0;
    std::vector<Region> regions_;
};

/// Shell partition: K_1 = [-w, w]^d and, for n >= 2,
/// K_n = [-n w, n w]^d minus the open cube (-(n-1) w, (n-1) w)^d.
/// The union of K_1..K_N is exactly [-N w, N w]^d.
inline Partition make_shell_partition(std::size_t d, std::size_t count, double width) {
    if (d < 1) throw ValidationError("dimension must be >= 1", "partition.dimension");
    if (count < 1) throw ValidationError("region count must be >= 1", "partition.regions");
    if (!(width > 0) || !std::isfinite(width))
        throw ValidationError("width must be finite and > 0", "partition.width");
    std::vector<Region> regions;
    regions.reserve(count);
    for (std::size_t n = 1; n <= count; ++n) {
        Region r;
        r.index = n;
        r.outer = Box::cube(d, static_cast<double>(n) * width);
        if (n >= 2) r.inner = Box::cube(d, static_cast<double>(n - 1) * width);
        regions.push_back(std::move(r));
    }
    return Partition(d, std::move(regions));
}

/// μ(K_n). Throws AssumptionViolation when the mass is not positive.
inline double region_mass(const Partition& partition, std::size_t n, const MeasureSpec& measure,
                          const QuadratureScheme& quad) {
    const double mass =
        integrate([](Point) { return 1.0; }, partition.region(n), measure, quad);
    if (!(mass > kMassTolerance)) throw AssumptionViolation(n, mass);
    return mass;
}

namespace detail {

template <class G>
double box_integral_or_zero(const G& g, const Box& b, const MeasureSpec& m,
                            const QuadratureScheme& q) {
    return b.non_degenerate() ? integrate(g, b, m, q) : 0.0;
}

} // namespace detail

/// μ(K_n ∩ K_m) by inclusion–exclusion over the outer/inner boxes.
inline double overlap_mass(const Partition& partition, std::size_t n, std::size_t m,
                           const MeasureSpec& measure, const QuadratureScheme& quad) {
    const Region& a = partition.region(n);
    const Region& b = partition.region(m);
    const Box common = a.outer.intersect(b.outer);
    if (!common.non_degenerate()) return 0.0;
    auto one = [](Point) { return 1.0; };
    double v = detail::box_integral_or_zero(one, common, measure, quad);
    std::optional<Box> ia, ib;
    if (a.inner) {
        ia = common.intersect(*a.inner);
        v -= detail::box_integral_or_zero(one, *ia, measure, quad);
    }
    if (b.inner) {
        ib = common.intersect(*b.inner);
        v -= detail::box_integral_or_zero(one, *ib, measure, quad);
    }
    if (ia && ib) v += detail::box_integral_or_zero(one, ia->intersect(*ib), measure, quad);
    return std::max(0.0, v);
}

/// Mass of the bounding box of K_1..K_n not covered by any of them.
inline double uncovered_mass(const Partition& partition, std::size_t n, const MeasureSpec& measure,
                             const QuadratureScheme& quad) {
    auto outside = [&](Point x) { return partition.locate(x, n) ? 0.0 : 1.0; };
    return integrate(outside, partition.bounding_box(n), measure, quad);
}

struct PartitionCheck {
    std::vector<double> masses;
    double max_overlap = 0;
    double uncovered = 0;
};

/// Checks null overlaps, covering of the bounding box, and 0 < μ(K_n) for
/// every region. Throws on the first violation.
inline PartitionCheck check_partition(const Partition& partition, const MeasureSpec& measure,
                                      const QuadratureScheme& quad) {
    PartitionCheck out;
    const std::size_t count = partition.size();
    for (std::size_t n = 1; n <= count; ++n)
        out.masses.push_back(region_mass(partition, n, measure, quad));
    for (std::size_t n = 1; n <= count; ++n)
        for (std::size_t m = n + 1; m <= count; ++m) {
            const double o = overlap_mass(partition, n, m, measure, quad);
            out.max_overlap = std::max(out.max_overlap, o);
            if (o > kMassTolerance)
                throw ValidationError("regions " + std::to_string(n) + " and " +
                                      std::to_string(m) + " overlap with mass " +
                                      io::format_double(o));
        }
    out.uncovered = uncovered_mass(partition, count, measure, quad);
    if (out.uncovered > kMassTolerance)
        throw ValidationError("regions leave mass " + io::format_double(out.uncovered) +
                              " of their bounding box uncovered");
    return out;
}

// JSON: {dimension, regions: [{index, outer:{lo[],hi[]}, inner?:{lo[],hi[]}}]}

inline nlohmann::json to_json(const Box& b) { return {{"lo", b.lo}, {"hi", b.hi}}; }

inline Box box_from_json(const nlohmann::json& j, const std::string& path) {
    try {
        Box b{j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>()};
        if (b.lo.size() != b.hi.size()) throw ValidationError("lo/hi length mismatch", path);
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(e.what(), path);
    }
}

inline nlohmann::json to_json(const Partition& p) {
    nlohmann::json regions = nlohmann::json::array();
    for (const auto& r : p.regions()) {
        nlohmann::json jr = {{"index", r.index}, {"outer", to_json(r.outer)}};
        if (r.inner) jr["inner"] = to_json(*r.inner);
        regions.push_back(std::move(jr));
    }
    return {{"dimension", p.dimension()}, {"regions", std::move(regions)}};
}

inline Partition partition_from_json(const nlohmann::json& j) {
    try {
        const auto d = j.at("dimension").get<std::size_t>();
        std::vector<Region> regions;
        const auto& jr = j.at("regions");
        if (!jr.is_array()) throw ValidationError("must be an array", "regions");
        for (std::size_t i = 0; i < jr.size(); ++i) {
            const std::string path = "regions[" + std::to_string(i) + "]";
            Region r;
            r.index = jr[i].at("index").get<std::size_t>();
            r.outer = box_from_json(jr[i].at("outer"), path + ".outer");
            if (jr[i].contains("inner") && !jr[i]["inner"].is_null())
                r.inner = box_from_json(jr[i]["inner"], path + ".inner");
            regions.push_back(std::move(r));
        }
        return Partition(d, std::move(regions));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed partition JSON: ") + e.what());
    }
}

} // namespace architope
