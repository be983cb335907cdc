#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "architope/errors.hpp"
#include "architope/measure.hpp"
#include "architope/partition.hpp"

namespace architope {

using Vector = std::vector<double>;

/// A function ℝ^d → ℝ^D. The pointwise norm used by every metric is the
/// Euclidean norm on ℝ^D.
struct FunctionHandle {
    std::function<Vector(Point)> evaluate;
    std::size_t output_dimension = 1;
    std::string label;

    Vector operator()(Point x) const { return evaluate(x); }
};

namespace functions {

inline FunctionHandle constant(Vector value, std::string label = {}) {
    const std::size_t dim = value.size();
    if (label.empty()) label = "constant";
    return {[value = std::move(value)](Point) { return value; }, dim, std::move(label)};
}

inline FunctionHandle constant(double value, std::string label = {}) {
    if (label.empty()) label = "constant(" + io::format_double(value) + ")";
    return constant(Vector{value}, std::move(label));
}

inline FunctionHandle zero(std::size_t output_dimension = 1) {
    return constant(Vector(output_dimension, 0.0), "zero");
}

/// Scalar function wrapped as a D = 1 handle.
inline FunctionHandle scalar(std::function<double(Point)> f, std::string label) {
    return {[f = std::move(f)](Point x) { return Vector{f(x)}; }, 1, std::move(label)};
}

/// b · I_{K}.
inline FunctionHandle indicator(const Region& region, double height = 1.0) {
    return scalar([region, height](Point x) { return region.contains(x) ? height : 0.0; },
                  "indicator(K_" + std::to_string(region.index) + ")");
}

inline FunctionHandle scaled(FunctionHandle f, double c) {
    auto label = io::format_double(c) + "*" + f.label;
    const std::size_t dim = f.output_dimension;
    return {[f = std::move(f), c](Point x) {
                Vector v = f(x);
                for (double& e : v) e *= c;
                return v;
            },
            dim, std::move(label)};
}

/// a·f + b·g.
inline FunctionHandle combine(FunctionHandle f, double a, FunctionHandle g, double b) {
    if (f.output_dimension != g.output_dimension)
        throw ValidationError("cannot combine functions with different output dimensions");
    auto label = io::format_double(a) + "*" + f.label + " + " + io::format_double(b) + "*" + g.label;
    const std::size_t dim = f.output_dimension;
    return {[f = std::move(f), g = std::move(g), a, b](Point x) {
                Vector u = f(x);
                Vector v = g(x);
                for (std::size_t i = 0; i < u.size(); ++i) u[i] = a * u[i] + b * v[i];
                return u;
            },
            dim, std::move(label)};
}

inline FunctionHandle sum(FunctionHandle f, FunctionHandle g) {
    return combine(std::move(f), 1.0, std::move(g), 1.0);
}

} // namespace functions

/// Euclidean norm of the pointwise difference f(x) − g(x).
inline double pointwise_distance(const Vector& u, const Vector& v) {
    double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double e = u[i] - v[i];
        s += e * e;
    }
    return std::sqrt(s);
}

inline double pointwise_norm(const Vector& u) {
    double s = 0;
    for (double e : u) s += e * e;
    return std::sqrt(s);
}

} // namespace architope
