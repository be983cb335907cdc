#pragma once

// Fully connected feedforward networks f = W ∘ f^(J), f^(j) = σ • (W^(j) f^(j-1)),
// trained by gradient descent on density-weighted squared error over
// quadrature nodes. The output layer is affine (no activation).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "architope/errors.hpp"
#include "architope/function.hpp"
#include "architope/measure.hpp"

namespace architope {

enum class Activation { tanh, relu };

inline const char* to_string(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }

inline Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::tanh;
    if (s == "relu") return Activation::relu;
    throw ValidationError("unknown activation '" + s + "'", "learner.activation");
}

struct DenseLayer {
    Eigen::MatrixXd weights;  // out × in
    Eigen::VectorXd bias;     // out

    bool operator==(const DenseLayer& o) const {
        return weights.rows() == o.weights.rows() && weights.cols() == o.weights.cols() &&
               weights == o.weights && bias == o.bias;
    }
};

class MlpModel {
public:
    MlpModel() = default;

    /// Uniform initialization in [-1/√fan_in, 1/√fan_in] from a seeded mt19937_64.
    MlpModel(std::vector<std::size_t> widths, Activation activation, std::uint64_t seed)
        : widths_(std::move(widths)), activation_(activation) {
        validate_widths(widths_);
        std::mt19937_64 rng(seed);
        for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
            const auto in = static_cast<Eigen::Index>(widths_[l]);
            const auto out = static_cast<Eigen::Index>(widths_[l + 1]);
            const double bound = 1.0 / std::sqrt(static_cast<double>(in));
            auto draw = [&] { return bound * (2.0 * detail::unit_uniform(rng) - 1.0); };
            DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
            for (Eigen::Index r = 0; r < out; ++r)
                for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = draw();
            for (Eigen::Index r = 0; r < out; ++r) layer.bias(r) = draw();
            layers_.push_back(std::move(layer));
        }
    }

    MlpModel(std::vector<std::size_t> widths, Activation activation, std::vector<DenseLayer> layers)
        : widths_(std::move(widths)), activation_(activation), layers_(std::move(layers)) {
        validate_widths(widths_);
        if (layers_.size() + 1 != widths_.size())
            throw ValidationError("layer count does not match widths");
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const auto& L = layers_[l];
            if (L.weights.cols() != static_cast<Eigen::Index>(widths_[l]) ||
                L.weights.rows() != static_cast<Eigen::Index>(widths_[l + 1]) ||
                L.bias.size() != static_cast<Eigen::Index>(widths_[l + 1]))
                throw ValidationError("layer " + std::to_string(l) + " has the wrong shape");
            if (!L.weights.allFinite() || !L.bias.allFinite())
                throw ValidationError("layer " + std::to_string(l) + " has non-finite parameters");
        }
    }

    static void validate_widths(const std::vector<std::size_t>& widths) {
        if (widths.size() < 2) throw ValidationError("need at least input and output widths", "learner.widths");
        for (auto w : widths)
            if (w == 0) throw ValidationError("layer widths must be positive", "learner.widths");
    }

    const std::vector<std::size_t>& widths() const noexcept { return widths_; }
    Activation activation() const noexcept { return activation_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& mutable_layers() noexcept { return layers_; }
    std::size_t dimension() const noexcept { return widths_.front(); }
    std::size_t output_dimension() const noexcept { return widths_.back(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& L : layers_) n += static_cast<std::size_t>(L.weights.size() + L.bias.size());
        return n;
    }

    double activate(double z) const {
        return activation_ == Activation::tanh ? std::tanh(z) : std::max(0.0, z);
    }
    double activate_derivative(double z) const {
        if (activation_ == Activation::tanh) {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        return z > 0 ? 1.0 : 0.0;
    }

    /// Columns of X are inputs; returns the D × n outputs.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const {
        Eigen::MatrixXd A = X;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            Eigen::MatrixXd Z = (layers_[l].weights * A).colwise() + layers_[l].bias;
            if (l + 1 < layers_.size()) Z = Z.unaryExpr([this](double z) { return activate(z); });
            A = std::move(Z);
        }
        return A;
    }

    Vector evaluate(Point x) const {
        Eigen::MatrixXd X(static_cast<Eigen::Index>(x.size()), 1);
        for (std::size_t k = 0; k < x.size(); ++k) X(static_cast<Eigen::Index>(k), 0) = x[k];
        Eigen::MatrixXd y = forward(X);
        return Vector(y.data(), y.data() + y.size());
    }

    Vector operator()(Point x) const { return evaluate(x); }

    /// Scales the output; only the final affine layer changes.
    MlpModel scaled(double c) const {
        MlpModel out = *this;
        out.layers_.back().weights *= c;
        out.layers_.back().bias *= c;
        return out;
    }

    bool operator==(const MlpModel& o) const {
        return widths_ == o.widths_ && activation_ == o.activation_ && layers_ == o.layers_;
    }

private:
    std::vector<std::size_t> widths_;
    Activation activation_ = Activation::tanh;
    std::vector<DenseLayer> layers_;
};

struct MlpGradient {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> bias;
};

/// Loss L = Σ_j w_j ‖net(x_j) − t_j‖² / Σ_j w_j and its parameter gradient
/// by backpropagation. X is d × n, T is D × n, w has n entries.
inline double mlp_loss_and_gradient(const MlpModel& model, const Eigen::MatrixXd& X,
                                    const Eigen::MatrixXd& T, const Eigen::VectorXd& w,
                                    MlpGradient* grad) {
    const auto& layers = model.layers();
    const std::size_t L = layers.size();
    std::vector<Eigen::MatrixXd> pre(L), post(L + 1);
    post[0] = X;
    for (std::size_t l = 0; l < L; ++l) {
        pre[l] = (layers[l].weights * post[l]).colwise() + layers[l].bias;
        post[l + 1] = l + 1 < L ? pre[l].unaryExpr([&](double z) { return model.activate(z); })
                                : pre[l];
    }
    const double wsum = w.sum();
    const Eigen::MatrixXd R = post[L] - T;
    const double loss = (R.colwise().squaredNorm().transpose().cwiseProduct(w)).sum() / wsum;
    if (!grad) return loss;

    grad->weights.resize(L);
    grad->bias.resize(L);
    Eigen::MatrixXd G = (2.0 / wsum) * (R.array().rowwise() * w.transpose().array()).matrix();
    for (std::size_t l = L; l-- > 0;) {
        grad->weights[l] = G * post[l].transpose();
        grad->bias[l] = G.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = layers[l].weights.transpose() * G;
            G = back.cwiseProduct(
                pre[l - 1].unaryExpr([&](double z) { return model.activate_derivative(z); }));
        }
    }
    return loss;
}

enum class Optimizer { gradient_descent, adam };

inline const char* to_string(Optimizer o) {
    return o == Optimizer::adam ? "adam" : "gradient-descent";
}

inline Optimizer optimizer_from_string(const std::string& s) {
    if (s == "adam") return Optimizer::adam;
    if (s == "gradient-descent" || s == "gd") return Optimizer::gradient_descent;
    throw ValidationError("unknown optimizer '" + s + "'", "learner.optimizer");
}

struct MlpTrainConfig {
    std::size_t epochs = 500;
    double learning_rate = 0.01;
    /// 0 means full batch.
    std::size_t batch_size = 0;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::adam;
};

struct MlpFit {
    MlpModel model;
    std::vector<double> loss_trace;  // full-data loss after each epoch
};

/// Trains `model` in place on weighted nodes. Deterministic given the config.
/// Throws TrainingError when the loss exceeds 1e6 or becomes non-finite.
inline MlpFit train_mlp(MlpModel model, const FunctionHandle& target, const NodeSet& weighted,
                        const MlpTrainConfig& cfg) {
    if (model.dimension() != weighted.dimension)
        throw ValidationError("network input width does not match the node dimension");
    if (model.output_dimension() != target.output_dimension)
        throw ValidationError("network output width does not match the target");
    if (!(cfg.learning_rate > 0)) throw ValidationError("learning rate must be > 0", "learner.learning_rate");

    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < weighted.size(); ++j)
        if (weighted.weights[j] > 0) active.push_back(j);
    if (active.empty()) throw PreconditionError("no quadrature node carries positive weight");

    const auto n = static_cast<Eigen::Index>(active.size());
    const auto d = static_cast<Eigen::Index>(weighted.dimension);
    const auto D = static_cast<Eigen::Index>(target.output_dimension);
    Eigen::MatrixXd X(d, n), T(D, n);
    Eigen::VectorXd w(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto j = active[static_cast<std::size_t>(c)];
        for (Eigen::Index k = 0; k < d; ++k) X(k, c) = weighted.node(j)[static_cast<std::size_t>(k)];
        const Vector t = target(weighted.node(j));
        for (Eigen::Index k = 0; k < D; ++k) {
            T(k, c) = t[static_cast<std::size_t>(k)];
            if (!std::isfinite(T(k, c)))
                throw EvaluationError("target '" + target.label + "' is non-finite at node " +
                                      format_point(weighted.node(j)));
        }
        w(c) = weighted.weights[j];
    }

    MlpFit fit{std::move(model), {}};
    auto& layers = fit.model.mutable_layers();
    std::vector<Eigen::MatrixXd> mW, vW;
    std::vector<Eigen::VectorXd> mb, vb;
    for (const auto& Lr : layers) {
        mW.push_back(Eigen::MatrixXd::Zero(Lr.weights.rows(), Lr.weights.cols()));
        vW.push_back(mW.back());
        mb.push_back(Eigen::VectorXd::Zero(Lr.bias.size()));
        vb.push_back(mb.back());
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::size_t step = 0;

    std::mt19937_64 rng(detail::splitmix64(cfg.seed));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto batch = cfg.batch_size == 0 ? n : std::min<Eigen::Index>(n, static_cast<Eigen::Index>(cfg.batch_size));

    auto apply = [&](const MlpGradient& g) {
        ++step;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            if (cfg.optimizer == Optimizer::gradient_descent) {
                layers[l].weights -= cfg.learning_rate * g.weights[l];
                layers[l].bias -= cfg.learning_rate * g.bias[l];
                continue;
            }
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            mW[l] = beta1 * mW[l] + (1 - beta1) * g.weights[l];
            vW[l] = beta2 * vW[l] + (1 - beta2) * g.weights[l].cwiseAbs2();
            mb[l] = beta1 * mb[l] + (1 - beta1) * g.bias[l];
            vb[l] = beta2 * vb[l] + (1 - beta2) * g.bias[l].cwiseAbs2();
            layers[l].weights.array() -= cfg.learning_rate * (mW[l].array() / c1) /
                                         ((vW[l].array() / c2).sqrt() + eps);
            layers[l].bias.array() -= cfg.learning_rate * (mb[l].array() / c1) /
                                      ((vb[l].array() / c2).sqrt() + eps);
        }
    };

    MlpGradient g;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (batch == n) {
            mlp_loss_and_gradient(fit.model, X, T, w, &g);
            apply(g);
        } else {
            std::shuffle(order.begin(), order.end(), rng);
            for (Eigen::Index start = 0; start < n; start += batch) {
                const auto len = std::min(batch, n - start);
                Eigen::MatrixXd Xb(d, len), Tb(D, len);
                Eigen::VectorXd wb(len);
                for (Eigen::Index c = 0; c < len; ++c) {
                    const auto src = order[static_cast<std::size_t>(start + c)];
                    Xb.col(c) = X.col(src);
                    Tb.col(c) = T.col(src);
                    wb(c) = w(src);
                }
                mlp_loss_and_gradient(fit.model, Xb, Tb, wb, &g);
                apply(g);
            }
        }
        const double loss = mlp_loss_and_gradient(fit.model, X, T, w, nullptr);
        fit.loss_trace.push_back(loss);
        if (!std::isfinite(loss) || loss > 1e6) throw TrainingError(epoch, loss);
    }
    return fit;
}

/// Compares backpropagated gradients of the squared error ‖net(x) − y‖² at
/// a single point against central finite differences with step h. Returns
/// max |analytic − numeric| / max(1, |analytic|, |numeric|) over all parameters.
inline double gradient_check(const MlpModel& model, Point x, std::span<const double> y, double h) {
    if (model.dimension() != x.size() || model.output_dimension() != y.size())
        throw ValidationError("gradient_check point/target dimensions do not match the network");
    Eigen::MatrixXd X(static_cast<Eigen::Index>(x.size()), 1), T(static_cast<Eigen::Index>(y.size()), 1);
    for (std::size_t k = 0; k < x.size(); ++k) X(static_cast<Eigen::Index>(k), 0) = x[k];
    for (std::size_t k = 0; k < y.size(); ++k) T(static_cast<Eigen::Index>(k), 0) = y[k];
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(1);

    MlpGradient g;
    mlp_loss_and_gradient(model, X, T, w, &g);

    MlpModel probe = model;
    double worst = 0;
    auto compare = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + h;
        const double up = mlp_loss_and_gradient(probe, X, T, w, nullptr);
        param = saved - h;
        const double down = mlp_loss_and_gradient(probe, X, T, w, nullptr);
        param = saved;
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
        worst = std::max(worst, std::abs(analytic - numeric) / scale);
    };
    auto& layers = probe.mutable_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        for (Eigen::Index r = 0; r < layers[l].weights.rows(); ++r)
            for (Eigen::Index c = 0; c < layers[l].weights.cols(); ++c)
                compare(layers[l].weights(r, c), g.weights[l](r, c));
        for (Eigen::Index r = 0; r < layers[l].bias.size(); ++r) compare(layers[l].bias(r), g.bias[l](r));
    }
    return worst;
}

/// Gradient check against the all-ones target.
inline double gradient_check(const MlpModel& model, Point x, double h) {
    const std::vector<double> ones(model.output_dimension(), 1.0);
    return gradient_check(model, x, ones, h);
}

// JSON: {"kind":"mlp", widths, activation, layers:[{weights:[[row]…], bias:[…]}]}
inline nlohmann::json to_json(const MlpModel& m) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& L : m.layers()) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < L.weights.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(L.weights.cols()));
            for (Eigen::Index c = 0; c < L.weights.cols(); ++c) row[static_cast<std::size_t>(c)] = L.weights(r, c);
            rows.push_back(row);
        }
        layers.push_back({{"weights", std::move(rows)},
                          {"bias", std::vector<double>(L.bias.data(), L.bias.data() + L.bias.size())}});
    }
    return {{"kind", "mlp"},
            {"widths", m.widths()},
            {"activation", to_string(m.activation())},
            {"layers", std::move(layers)}};
}

inline MlpModel mlp_from_json(const nlohmann::json& j) {
    try {
        auto widths = j.at("widths").get<std::vector<std::size_t>>();
        MlpModel::validate_widths(widths);
        const auto& jl = j.at("layers");
        std::vector<DenseLayer> layers;
        for (std::size_t l = 0; l < jl.size(); ++l) {
            const auto rows = jl[l].at("weights").get<std::vector<std::vector<double>>>();
            const auto bias = jl[l].at("bias").get<std::vector<double>>();
            const auto cols = rows.empty() ? std::size_t{0} : rows.front().size();
            DenseLayer L{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols)),
                         Eigen::VectorXd(static_cast<Eigen::Index>(bias.size()))};
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != cols) throw ValidationError("ragged weight matrix", "layers");
                for (std::size_t c = 0; c < cols; ++c)
                    L.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
            }
            for (std::size_t r = 0; r < bias.size(); ++r) L.bias(static_cast<Eigen::Index>(r)) = bias[r];
            layers.push_back(std::move(L));
        }
        return MlpModel(std::move(widths), activation_from_string(j.at("activation").get<std::string>()),
                        std::move(layers));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed mlp JSON: ") + e.what());
    }
}

} // namespace architope
