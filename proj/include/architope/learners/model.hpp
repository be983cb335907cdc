#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "architope/errors.hpp"
#include "architope/function.hpp"
#include "architope/learners/mlp.hpp"
#include "architope/learners/polynomial.hpp"
#include "architope/measure.hpp"
#include "architope/partition.hpp"

namespace architope {

/// A fitted member of the base class: a polynomial or a network.
using LocalModel = std::variant<PolynomialModel, MlpModel>;

inline Vector evaluate(const LocalModel& m, Point x) {
    return std::visit([&](const auto& v) { return v.evaluate(x); }, m);
}

inline std::size_t output_dimension(const LocalModel& m) {
    return std::visit([](const auto& v) { return v.output_dimension(); }, m);
}

inline std::size_t input_dimension(const LocalModel& m) {
    return std::visit([](const auto& v) { return v.dimension(); }, m);
}

inline LocalModel scaled(const LocalModel& m, double c) {
    return std::visit([&](const auto& v) -> LocalModel { return v.scaled(c); }, m);
}

inline FunctionHandle as_function(LocalModel m, std::string label = "model") {
    const std::size_t D = output_dimension(m);
    return {[m = std::move(m)](Point x) { return evaluate(m, x); }, D, std::move(label)};
}

/// Z_n(f) = f · I_{K_n}.
inline FunctionHandle extend_by_zero(LocalModel model, const Region& region) {
    if (input_dimension(model) != region.dimension())
        throw ValidationError("model and region dimensions differ");
    const std::size_t D = output_dimension(model);
    return {[m = std::move(model), region, D](Point x) {
                return region.contains(x) ? evaluate(m, x) : Vector(D, 0.0);
            },
            D, "Z_" + std::to_string(region.index)};
}

struct FitConfig {
    /// Exponent the reports are measured in. Fits always minimize squared error.
    double p = 2.0;
    /// Quadrature nodes per region piece (rounded down to a tensor grid for d ≤ 3).
    std::size_t node_budget = 4096;
    double lambda = 0.0;
    PolynomialBasis basis = PolynomialBasis::chebyshev;
    Activation activation = Activation::tanh;
    MlpTrainConfig train{};
    std::uint64_t seed = 0;

    void validate() const {
        if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("must be in [1, inf)", "p");
        if (node_budget < 2) throw ValidationError("must be >= 2", "learner.node_budget");
        if (!(lambda >= 0) || !std::isfinite(lambda)) throw ValidationError("must be >= 0", "learner.lambda");
        if (!(train.learning_rate > 0)) throw ValidationError("must be > 0", "learner.learning_rate");
    }
};

/// Quadrature used for fitting: r^d nodes per piece with r^d ≤ budget for
/// d ≤ 3, otherwise `budget` seeded Monte Carlo samples.
inline QuadratureScheme fit_quadrature(std::size_t d, const FitConfig& cfg) {
    if (d <= 3) {
        auto r = static_cast<std::size_t>(
            std::floor(std::pow(static_cast<double>(cfg.node_budget), 1.0 / static_cast<double>(d)) + 1e-9));
        return QuadratureScheme::tensor(std::max<std::size_t>(2, r));
    }
    return QuadratureScheme::monte_carlo(cfg.node_budget, cfg.seed);
}

/// Density-weighted fit nodes of the region; throws AssumptionViolation when
/// the region carries no mass.
inline NodeSet fit_nodes(const Region& region, const MeasureSpec& measure, const FitConfig& cfg) {
    NodeSet nodes = weigh(region_nodes(region, fit_quadrature(region.dimension(), cfg)), measure);
    const double mass = std::accumulate(nodes.weights.begin(), nodes.weights.end(), 0.0);
    if (!(mass > kMassTolerance)) throw AssumptionViolation(region.index, mass);
    return nodes;
}

/// Least-squares polynomial of total degree ≤ `degree` on the region, in
/// the basis scaled to the region's bounding box.
inline PolynomialFit fit_polynomial(const FunctionHandle& target, const Region& region,
                                    const MeasureSpec& measure, unsigned degree,
                                    const FitConfig& cfg = {}) {
    cfg.validate();
    return fit_polynomial_on_nodes(target, fit_nodes(region, measure, cfg), region.outer, degree,
                                   cfg.basis, cfg.lambda);
}

/// Trains a network with the given layer widths on the region from a seeded
/// initialization.
inline MlpFit fit_mlp(const FunctionHandle& target, const Region& region, const MeasureSpec& measure,
                      std::vector<std::size_t> widths, const FitConfig& cfg = {}) {
    cfg.validate();
    MlpModel init(std::move(widths), cfg.activation, cfg.seed);
    return train_mlp(std::move(init), target, fit_nodes(region, measure, cfg), cfg.train);
}

inline nlohmann::json to_json(const LocalModel& m) {
    return std::visit([](const auto& v) { return to_json(v); }, m);
}

inline LocalModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ValidationError("model JSON needs a 'kind'");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "polynomial") return polynomial_from_json(j);
    if (kind == "mlp") return mlp_from_json(j);
    throw ValidationError("unknown model kind '" + kind + "'", "kind");
}

} // namespace architope
