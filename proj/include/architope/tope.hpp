#pragma once

/**
 * @file tope.hpp
 * @brief Architopes: base models gated onto the regions of a partition,
 *
 *     f(x) = Σ_i β_i I_{K_i}(x) f_i(x) + β_0 f_0(x) I^+(x),
 *
 * where I^+ is the indicator of the set not covered by the term regions.
 * upgrade() fits one base model per region under the restricted measure and
 * glues them together; gap_demo() contrasts that with a single global
 * polynomial, which being analytic cannot vanish on K_2 while matching a
 * target supported on K_1.
 */

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "architope/errors.hpp"
#include "architope/function.hpp"
#include "architope/learners/model.hpp"
#include "architope/measure.hpp"
#include "architope/metrics.hpp"
#include "architope/partition.hpp"

namespace architope {

struct Term {
    std::size_t region = 0;
    double beta = 1.0;
    LocalModel model;
};

struct Tail {
    double beta = 0.0;
    LocalModel model;
};

class Architope {
public:
    Architope(std::shared_ptr<const Partition> partition, std::vector<Term> terms,
              std::optional<Tail> tail, double p = 1.0)
        : partition_(std::move(partition)), terms_(std::move(terms)), tail_(std::move(tail)), p_(p) {
        validate();
    }

    const Partition& partition() const noexcept { return *partition_; }
    std::shared_ptr<const Partition> partition_ptr() const noexcept { return partition_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    const std::optional<Tail>& tail() const noexcept { return tail_; }
    double p() const noexcept { return p_; }
    std::size_t output_dimension() const { return architope::output_dimension(terms_.front().model); }

    /// Term whose region is the first (smallest index) to contain x, or null.
    const Term* gate(Point x) const {
        for (const auto& t : terms_)
            if (partition_->region(t.region).contains(x)) return &t;
        return nullptr;
    }

    Vector evaluate(Point x) const {
        const std::size_t D = output_dimension();
        if (const Term* t = gate(x)) return scale(architope::evaluate(t->model, x), t->beta);
        if (tail_) return scale(architope::evaluate(tail_->model, x), tail_->beta);
        return Vector(D, 0.0);
    }

    Vector operator()(Point x) const { return evaluate(x); }

    /// Every model (tail included) scaled by c.
    Architope scaled(double c) const {
        Architope out = *this;
        for (auto& t : out.terms_) t.model = architope::scaled(t.model, c);
        if (out.tail_) out.tail_->model = architope::scaled(out.tail_->model, c);
        return out;
    }

    /// Moves the scale of term `region` into β: β' = beta, f' = (β/beta) f.
    /// Evaluation is unchanged.
    Architope with_beta(std::size_t region, double beta) const {
        if (beta == 0 || !std::isfinite(beta)) throw ValidationError("beta must be finite and non-zero");
        Architope out = *this;
        for (auto& t : out.terms_)
            if (t.region == region) {
                t.model = architope::scaled(t.model, t.beta / beta);
                t.beta = beta;
                return out;
            }
        throw ValidationError("architope has no term on region " + std::to_string(region));
    }

private:
    static Vector scale(Vector v, double c) {
        for (double& e : v) e *= c;
        return v;
    }

    void validate() {
        if (!partition_) throw ValidationError("architope needs a partition");
        if (terms_.empty()) throw ValidationError("architope needs at least one term", "terms");
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return a.region < b.region; });
        bool any_nonzero = tail_ && tail_->beta != 0;
        const std::size_t D = architope::output_dimension(terms_.front().model);
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            const auto& t = terms_[i];
            if (t.region < 1 || t.region > partition_->size())
                throw ValidationError("term region " + std::to_string(t.region) + " is not in the partition",
                                      "terms");
            if (i > 0 && terms_[i - 1].region == t.region)
                throw ValidationError("duplicate term region " + std::to_string(t.region), "terms");
            if (!std::isfinite(t.beta)) throw ValidationError("beta must be finite", "terms");
            if (architope::output_dimension(t.model) != D ||
                input_dimension(t.model) != partition_->dimension())
                throw ValidationError("term models must share input/output dimensions", "terms");
            any_nonzero = any_nonzero || t.beta != 0;
        }
        if (tail_ && (architope::output_dimension(tail_->model) != D ||
                      input_dimension(tail_->model) != partition_->dimension()))
            throw ValidationError("tail model dimensions differ from the terms", "tail");
        if (!any_nonzero) throw ValidationError("at least one beta must be non-zero", "terms");
    }

    std::shared_ptr<const Partition> partition_;
    std::vector<Term> terms_;
    std::optional<Tail> tail_;
    double p_ = 1.0;
};

inline FunctionHandle as_function(Architope a, std::string label = "architope") {
    const std::size_t D = a.output_dimension();
    return {[a = std::move(a)](Point x) { return a.evaluate(x); }, D, std::move(label)};
}

struct PolynomialLearner {
    unsigned degree = 0;
};

struct MlpLearner {
    std::vector<std::size_t> hidden_widths;
};

using LearnerSpec = std::variant<PolynomialLearner, MlpLearner>;

struct RegionFitSummary {
    std::size_t region = 0;
    double mass = 0;
    /// Polynomial: √(weighted residual). Network: final training loss.
    double fit_residual = 0;
    bool rank_deficient = false;
};

struct UpgradeResult {
    Architope architope;
    ErrorReport report;
    std::vector<RegionFitSummary> fits;
};

struct UpgradeOptions {
    FitConfig fit{};
    /// Quadrature for region masses and the error report.
    QuadratureScheme quad = QuadratureScheme::tensor(4096);
    /// Worker threads for per-region fits; results do not depend on it.
    std::size_t threads = 1;
};

/// Fits f_i on K_i under μ restricted to K_i for i = 1..count with β_i = 1,
/// tail (0, zero model), and reports the error against the target.
inline UpgradeResult upgrade(const FunctionHandle& target, const LearnerSpec& learner,
                             std::shared_ptr<const Partition> partition, const MeasureSpec& measure,
                             std::size_t count, const UpgradeOptions& opt = {}) {
    if (!partition) throw ValidationError("upgrade needs a partition");
    if (count < 1 || count > partition->size())
        throw ValidationError("region count must be in 1.." + std::to_string(partition->size()), "regions");
    if (measure.dimension != partition->dimension())
        throw ValidationError("measure and partition dimensions differ");
    opt.fit.validate();

    std::vector<double> masses(count);
    for (std::size_t i = 1; i <= count; ++i) masses[i - 1] = region_mass(*partition, i, measure, opt.quad);

    std::vector<std::optional<LocalModel>> models(count);
    std::vector<RegionFitSummary> fits(count);
    std::vector<std::exception_ptr> failures(count);

    auto fit_one = [&](std::size_t i) {
        const Region& region = partition->region(i);
        const MeasureSpec restricted = restrict_to_region(measure, region);
        FitConfig cfg = opt.fit;
        cfg.seed = opt.fit.seed + i;
        cfg.train.seed = opt.fit.train.seed + i;
        fits[i - 1].region = i;
        fits[i - 1].mass = masses[i - 1];
        try {
            if (const auto* poly = std::get_if<PolynomialLearner>(&learner)) {
                auto fit = fit_polynomial(target, region, restricted, poly->degree, cfg);
                fits[i - 1].fit_residual = fit.report.weighted_residual;
                fits[i - 1].rank_deficient = fit.report.rank_deficient;
                models[i - 1] = std::move(fit.model);
            } else {
                const auto& mlp = std::get<MlpLearner>(learner);
                std::vector<std::size_t> widths{partition->dimension()};
                widths.insert(widths.end(), mlp.hidden_widths.begin(), mlp.hidden_widths.end());
                widths.push_back(target.output_dimension);
                MlpModel init(std::move(widths), cfg.activation, cfg.seed);
                auto fit = train_mlp(std::move(init), target, fit_nodes(region, restricted, cfg), cfg.train);
                fits[i - 1].fit_residual = fit.loss_trace.empty() ? 0.0 : fit.loss_trace.back();
                models[i - 1] = std::move(fit.model);
            }
        } catch (const AssumptionViolation&) {
            failures[i - 1] = std::current_exception();
        } catch (const std::exception& e) {
            failures[i - 1] = std::make_exception_ptr(RegionFitError(i, e.what()));
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(opt.threads, 1, count);
    if (workers == 1) {
        for (std::size_t i = 1; i <= count; ++i) fit_one(i);
    } else {
        std::atomic<std::size_t> next{1};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i <= count; i = next++) fit_one(i);
            });
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    std::vector<Term> terms;
    for (std::size_t i = 1; i <= count; ++i) terms.push_back({i, 1.0, std::move(*models[i - 1])});
    Tail tail{0.0, PolynomialModel::zero(partition->bounding_box(count), target.output_dimension)};
    Architope tope(partition, std::move(terms), std::move(tail), opt.fit.p);
    auto report = error_report(as_function(tope), target, *partition, measure, opt.fit.p, count, opt.quad);
    return {std::move(tope), std::move(report), std::move(fits)};
}

struct GapRow {
    std::string kind;  // "global-polynomial" or "architope"
    unsigned degree = 0;
    double strict_error = 0;
    double off_support_mass = 0;
    double lp_error = 0;
};

struct GapDemoResult {
    std::vector<GapRow> rows;
    /// One global fit per requested degree, same order as the rows.
    std::vector<PolynomialModel> global_models;
};

/// Target I_{K_1}. For each degree, one polynomial fitted by least squares
/// over K_1 ∪ K_2, with its strict error over the two regions and its L¹
/// mass on K_2; then the 2-region degree-0 architope for comparison.
inline GapDemoResult gap_demo(std::shared_ptr<const Partition> partition, const MeasureSpec& measure,
                              double p, const std::vector<unsigned>& degrees,
                              const QuadratureScheme& quad) {
    if (!partition || partition->size() < 2)
        throw PreconditionError("gap demo needs a partition with at least 2 regions");
    detail::check_exponent(p);
    const auto target = functions::indicator(partition->region(1), 1.0);
    const auto zero = functions::zero(1);

    NodeSet nodes = weigh(region_nodes(partition->region(1), quad), measure);
    nodes.append(weigh(region_nodes(partition->region(2), quad), measure));
    const Box reference = partition->bounding_box(2);

    GapDemoResult out;
    for (unsigned degree : degrees) {
        auto fit = fit_polynomial_on_nodes(target, nodes, reference, degree, PolynomialBasis::chebyshev, 0.0);
        const auto f = as_function(fit.model, "global-degree-" + std::to_string(degree));
        const auto err = region_power_errors(f, target, *partition, measure, p, 2, quad);
        const auto mass = region_power_errors(f, zero, *partition, measure, 1.0, 2, quad);
        out.rows.push_back({"global-polynomial", degree,
                            std::max(std::pow(err[0], 1 / p), std::pow(err[1], 1 / p)), mass[1],
                            std::pow(err[0] + err[1], 1 / p)});
        out.global_models.push_back(std::move(fit.model));
    }

    UpgradeOptions opt;
    opt.quad = quad;
    opt.fit.p = p;
    if (quad.kind == QuadratureKind::tensor_midpoint) {
        std::size_t budget = 1;
        for (std::size_t k = 0; k < partition->dimension(); ++k) budget *= quad.refinement;
        opt.fit.node_budget = budget;
    } else {
        opt.fit.node_budget = quad.refinement;
        opt.fit.seed = quad.seed;
    }
    auto up = upgrade(target, PolynomialLearner{0}, partition, measure, 2, opt);
    const auto tope = as_function(up.architope);
    const auto mass = region_power_errors(tope, zero, *partition, measure, 1.0, 2, quad);
    out.rows.push_back({"architope", 0, up.report.strict_norm, mass[1], up.report.lp_total});
    return out;
}

inline std::string to_csv(const GapDemoResult& r, const std::string& config_hash = {}) {
    std::ostringstream os;
    os << "config_hash,kind,degree,strict_error,off_support_mass,lp_error\n";
    for (const auto& row : r.rows)
        os << config_hash << ',' << row.kind << ',' << row.degree << ','
           << io::format_double(row.strict_error) << ',' << io::format_double(row.off_support_mass) << ','
           << io::format_double(row.lp_error) << '\n';
    return os.str();
}

// JSON: {"kind":"architope", p, partition:{…}, terms:[{index, beta, model}], tail:{beta, model}|null}
inline nlohmann::json to_json(const Architope& a) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : a.terms())
        terms.push_back({{"index", t.region}, {"beta", t.beta}, {"model", to_json(t.model)}});
    nlohmann::json tail = nullptr;
    if (a.tail()) tail = {{"beta", a.tail()->beta}, {"model", to_json(a.tail()->model)}};
    return {{"kind", "architope"},
            {"p", a.p()},
            {"partition", to_json(a.partition())},
            {"terms", std::move(terms)},
            {"tail", std::move(tail)}};
}

inline Architope architope_from_json(const nlohmann::json& j) {
    try {
        auto partition = std::make_shared<const Partition>(partition_from_json(j.at("partition")));
        std::vector<Term> terms;
        for (const auto& jt : j.at("terms"))
            terms.push_back({jt.at("index").get<std::size_t>(), jt.at("beta").get<double>(),
                             model_from_json(jt.at("model"))});
        std::optional<Tail> tail;
        if (j.contains("tail") && !j["tail"].is_null())
            tail = Tail{j["tail"].at("beta").get<double>(), model_from_json(j["tail"].at("model"))};
        return Architope(std::move(partition), std::move(terms), std::move(tail), j.value("p", 1.0));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed architope JSON: ") + e.what());
    }
}

} // namespace architope
