#pragma once

/**
 * @file measure.hpp
 * @brief Reference measures given by a Lebesgue density, and deterministic
 *        quadrature over axis-aligned boxes.
 *
 * Every integral in the library has the form
 *
 *     ∫_B g(x) dμ(x) = ∫_B g(x) ρ(x) dx ≈ Σ_j g(x_j) ρ(x_j) w_j
 *
 * where ρ is the density of μ and (x_j, w_j) are the nodes and cell volumes of
 * a quadrature scheme on the box B. Two schemes exist:
 *
 *   - tensor midpoint: r nodes per axis at cell centres, r^d nodes total.
 *     Exact for affine integrands, O(h²) otherwise; never evaluates on a
 *     cell face, so indicator boundaries aligned with cell faces are exact.
 *   - Monte Carlo: n uniform samples drawn from a seeded mt19937_64.
 *
 * Integration never happens over all of ℝ^d; unbounded statements are
 * approached through finite unions of boxes.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "architope/errors.hpp"
#include "architope/io.hpp"

namespace architope {

using Point = std::span<const double>;

inline std::string format_point(Point x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += io::format_double(x[i]);
    }
    return s + ")";
}

/// Closed axis-aligned box [lo_1, hi_1] × … × [lo_d, hi_d].
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dimension() const noexcept { return lo.size(); }

    static Box cube(std::size_t d, double half_width) {
        return Box{std::vector<double>(d, -half_width), std::vector<double>(d, half_width)};
    }

    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
        return v;
    }

    bool non_degenerate() const {
        if (lo.size() != hi.size() || lo.empty()) return false;
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(std::isfinite(lo[i]) && std::isfinite(hi[i]) && hi[i] > lo[i])) return false;
        return true;
    }

    bool contains(Point x) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }

    /// Membership in the open interior.
    bool contains_open(Point x) const {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] <= lo[i] || x[i] >= hi[i]) return false;
        return true;
    }

    /// Intersection; may be empty or degenerate (check with non_degenerate()).
    Box intersect(const Box& other) const {
        Box out{lo, hi};
        for (std::size_t i = 0; i < lo.size(); ++i) {
            out.lo[i] = std::max(lo[i], other.lo[i]);
            out.hi[i] = std::min(hi[i], other.hi[i]);
        }
        return out;
    }

    bool operator==(const Box&) const = default;
};

/// σ-finite Borel measure on ℝ^d, absolutely continuous w.r.t. Lebesgue,
/// represented by its density.
struct MeasureSpec {
    std::size_t dimension = 1;
    std::function<double(Point)> density;
    std::string label;

    double operator()(Point x) const { return density(x); }
};

namespace measures {

inline MeasureSpec lebesgue(std::size_t d) {
    return {d, [](Point) { return 1.0; }, "lebesgue"};
}

/// Centred isotropic normal density N(0, σ² I).
inline MeasureSpec gaussian(std::size_t d, double sigma) {
    if (!(sigma > 0) || !std::isfinite(sigma)) throw ValidationError("gaussian sigma must be > 0");
    const double norm = std::pow(sigma * std::sqrt(2.0 * M_PI), static_cast<double>(d));
    return {d,
            [sigma, norm](Point x) {
                double r2 = 0;
                for (double v : x) r2 += v * v;
                return std::exp(-r2 / (2 * sigma * sigma)) / norm;
            },
            "gaussian(" + io::format_double(sigma) + ")"};
}

/// Unnormalised density e^{-λ‖x‖₁}.
inline MeasureSpec exp_decay(std::size_t d, double lambda) {
    if (!(lambda > 0) || !std::isfinite(lambda))
        throw ValidationError("exp-decay lambda must be > 0");
    return {d,
            [lambda](Point x) {
                double r = 0;
                for (double v : x) r += std::abs(v);
                return std::exp(-lambda * r);
            },
            "exp-decay(" + io::format_double(lambda) + ")"};
}

/// Density tabulated on a full tensor grid, multilinearly interpolated and
/// zero outside the grid's bounding box. Rows are (x_1, …, x_d, density) in
/// any order.
inline MeasureSpec tabulated(std::size_t d, const std::vector<std::vector<double>>& rows,
                             std::string label = "tabulated") {
    if (d == 0) throw ValidationError("tabulated density needs d >= 1");
    std::vector<std::vector<double>> axes(d);
    for (const auto& r : rows) {
        if (r.size() != d + 1)
            throw ValidationError("tabulated density rows need " + std::to_string(d + 1) +
                                  " columns");
        if (!std::isfinite(r[d]) || r[d] < 0)
            throw ValidationError("tabulated density value must be finite and >= 0");
        for (std::size_t k = 0; k < d; ++k) axes[k].push_back(r[k]);
    }
    std::size_t total = 1;
    for (auto& a : axes) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        if (a.size() < 2) throw ValidationError("tabulated density needs >= 2 grid values per axis");
        total *= a.size();
    }
    if (total != rows.size())
        throw ValidationError("tabulated density is not a complete tensor grid");

    std::vector<double> values(total, std::nan(""));
    for (const auto& r : rows) {
        std::size_t flat = 0;
        for (std::size_t k = 0; k < d; ++k) {
            auto pos = static_cast<std::size_t>(
                std::lower_bound(axes[k].begin(), axes[k].end(), r[k]) - axes[k].begin());
            flat = flat * axes[k].size() + pos;
        }
        values[flat] = r[d];
    }
    if (std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); }))
        throw ValidationError("tabulated density has duplicate grid points");

    auto density = [axes, values, d](Point x) {
        std::vector<std::size_t> base(d);
        std::vector<double> frac(d);
        for (std::size_t k = 0; k < d; ++k) {
            const auto& a = axes[k];
            if (x[k] < a.front() || x[k] > a.back()) return 0.0;
            auto it = std::upper_bound(a.begin(), a.end(), x[k]);
            std::size_t i = it == a.end() ? a.size() - 2
                                          : static_cast<std::size_t>(it - a.begin()) - 1;
            base[k] = i;
            frac[k] = (x[k] - a[i]) / (a[i + 1] - a[i]);
        }
        double acc = 0;
        for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
            double w = 1;
            std::size_t flat = 0;
            for (std::size_t k = 0; k < d; ++k) {
                bool up = (corner >> k) & 1U;
                w *= up ? frac[k] : 1 - frac[k];
                flat = flat * axes[k].size() + base[k] + (up ? 1 : 0);
            }
            if (w != 0) acc += w * values[flat];
        }
        return acc;
    };
    return {d, density, std::move(label)};
}

} // namespace measures

enum class QuadratureKind { tensor_midpoint, monte_carlo };

struct QuadratureScheme {
    QuadratureKind kind = QuadratureKind::tensor_midpoint;
    /// Nodes per axis (tensor) or total samples (Monte Carlo).
    std::size_t refinement = 256;
    std::uint64_t seed = 0;

    static QuadratureScheme tensor(std::size_t nodes_per_axis) {
        return {QuadratureKind::tensor_midpoint, nodes_per_axis, 0};
    }
    static QuadratureScheme monte_carlo(std::size_t samples, std::uint64_t seed) {
        return {QuadratureKind::monte_carlo, samples, seed};
    }
    /// Tensor midpoint for d <= 3, fixed-seed Monte Carlo beyond.
    static QuadratureScheme default_for(std::size_t d) {
        if (d <= 3) return tensor(d == 1 ? 4096 : d == 2 ? 256 : 48);
        return monte_carlo(1U << 18, 0x5eed);
    }

    void validate() const {
        if (kind == QuadratureKind::tensor_midpoint && refinement < 2)
            throw ValidationError("tensor refinement must be >= 2", "quadrature.refinement");
        if (kind == QuadratureKind::monte_carlo && refinement < 1)
            throw ValidationError("Monte Carlo sample count must be >= 1", "quadrature.refinement");
    }
};

/// Quadrature nodes (row-major, n × d) with per-node weights. Before
/// weigh() the weights are cell volumes; after, they include the density.
struct NodeSet {
    std::size_t dimension = 0;
    std::vector<double> coords;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
    Point node(std::size_t j) const { return {coords.data() + j * dimension, dimension}; }

    void append(const NodeSet& other) {
        coords.insert(coords.end(), other.coords.begin(), other.coords.end());
        weights.insert(weights.end(), other.weights.begin(), other.weights.end());
    }
};

/// Tensor midpoint nodes with an explicit node count per axis.
inline NodeSet tensor_nodes(const Box& box, std::span<const std::size_t> per_axis) {
    const std::size_t d = box.dimension();
    if (!box.non_degenerate()) throw ValidationError("integration box is degenerate");
    if (per_axis.size() != d) throw ValidationError("per-axis node counts do not match dimension");
    std::vector<double> step(d);
    double cell = 1.0;
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) {
        if (per_axis[k] < 1) throw ValidationError("per-axis node count must be >= 1");
        step[k] = (box.hi[k] - box.lo[k]) / static_cast<double>(per_axis[k]);
        cell *= step[k];
        total *= per_axis[k];
    }
    NodeSet out;
    out.dimension = d;
    out.coords.resize(total * d);
    out.weights.assign(total, cell);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t j = 0; j < total; ++j) {
        for (std::size_t k = 0; k < d; ++k)
            out.coords[j * d + k] = box.lo[k] + (static_cast<double>(idx[k]) + 0.5) * step[k];
        for (std::size_t k = d; k-- > 0;) {
            if (++idx[k] < per_axis[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

namespace detail {

/// 53-bit uniform double in [0, 1); identical across standard libraries,
/// unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Nodes of `quad` on `box`. `stream` decorrelates Monte Carlo draws for
/// different boxes of the same integral.
inline NodeSet make_nodes(const Box& box, const QuadratureScheme& quad, std::uint64_t stream = 0) {
    quad.validate();
    if (!box.non_degenerate()) throw ValidationError("integration box is degenerate");
    const std::size_t d = box.dimension();
    if (quad.kind == QuadratureKind::tensor_midpoint) {
        std::vector<std::size_t> counts(d, quad.refinement);
        return tensor_nodes(box, counts);
    }
    std::mt19937_64 rng(detail::splitmix64(quad.seed ^ detail::splitmix64(stream)));
    NodeSet out;
    out.dimension = d;
    out.coords.resize(quad.refinement * d);
    out.weights.assign(quad.refinement, box.volume() / static_cast<double>(quad.refinement));
    for (std::size_t j = 0; j < quad.refinement; ++j)
        for (std::size_t k = 0; k < d; ++k)
            out.coords[j * d + k] = box.lo[k] + (box.hi[k] - box.lo[k]) * detail::unit_uniform(rng);
    return out;
}

/// Multiplies cell volumes by the density. Rejects non-finite or negative
/// density values, naming the node.
inline NodeSet weigh(NodeSet nodes, const MeasureSpec& measure) {
    if (measure.dimension != nodes.dimension)
        throw ValidationError("measure dimension does not match nodes");
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double rho = measure.density(nodes.node(j));
        if (!std::isfinite(rho) || rho < 0)
            throw EvaluationError("density '" + measure.label + "' is " + io::format_double(rho) +
                                  " at node " + format_point(nodes.node(j)));
        nodes.weights[j] *= rho;
    }
    return nodes;
}

/// Σ_j g(x_j) w_j over already weighted nodes, summed in node order.
template <class G>
double sum_weighted(const G& g, const NodeSet& weighted) {
    double acc = 0;
    for (std::size_t j = 0; j < weighted.size(); ++j) {
        if (weighted.weights[j] == 0) continue;
        const double v = g(weighted.node(j));
        if (!std::isfinite(v))
            throw EvaluationError("integrand is " + io::format_double(v) + " at node " +
                                  format_point(weighted.node(j)));
        acc += v * weighted.weights[j];
    }
    return acc;
}

/// ∫_box g dμ under the given scheme.
template <class G>
double integrate(const G& g, const Box& box, const MeasureSpec& measure,
                 const QuadratureScheme& quad) {
    if (box.dimension() != measure.dimension)
        throw ValidationError("box and measure dimensions differ");
    return sum_weighted(g, weigh(make_nodes(box, quad), measure));
}

} // namespace architope
