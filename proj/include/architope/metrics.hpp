#pragma once

/**
 * @file metrics.hpp
 * @brief Error functionals over a partition {K_n}.
 *
 * With e_n = ∫_{K_n} ‖f − g‖^p dμ:
 *
 *   classical L^p     (Σ_n e_n)^{1/p}
 *   local L^p metric  Σ_n 2^{-n} e_n / (1 + e_n)
 *   strict norm       max_{n ≤ N} e_n^{1/p}
 *
 * The strict norm takes the max over regions, so an error of fixed size
 * cannot hide in a far-away region the way it does under the 2^{-n}
 * weights of the local metric.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "architope/errors.hpp"
#include "architope/function.hpp"
#include "architope/measure.hpp"
#include "architope/partition.hpp"

namespace architope {

namespace detail {

inline void check_exponent(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("exponent p must be in [1, inf)", "p");
}

inline void check_compatible(const FunctionHandle& f, const FunctionHandle& g) {
    if (f.output_dimension != g.output_dimension)
        throw ValidationError("functions '" + f.label + "' and '" + g.label +
                              "' have different output dimensions");
}

inline void check_truncation(const Partition& partition, std::size_t n, const char* what) {
    if (n < 1 || n > partition.size())
        throw ValidationError(std::string(what) + " must be in 1.." + std::to_string(partition.size()));
}

/// ∫ ‖f − g‖^p over weighted nodes.
inline double power_integral(const FunctionHandle& f, const FunctionHandle& g,
                             const NodeSet& weighted, double p) {
    return sum_weighted(
        [&](Point x) {
            const double r = pointwise_distance(f(x), g(x));
            return p == 1.0 ? r : p == 2.0 ? r * r : std::pow(r, p);
        },
        weighted);
}

} // namespace detail

/// e_n = ∫_{K_n} ‖f − g‖^p dμ for n = 1..count, in index order.
inline std::vector<double> region_power_errors(const FunctionHandle& f, const FunctionHandle& g,
                                               const Partition& partition,
                                               const MeasureSpec& measure, double p,
                                               std::size_t count, const QuadratureScheme& quad) {
    detail::check_exponent(p);
    detail::check_compatible(f, g);
    detail::check_truncation(partition, count, "truncation");
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t n = 1; n <= count; ++n)
        out.push_back(detail::power_integral(
            f, g, weigh(region_nodes(partition.region(n), quad), measure), p));
    return out;
}

/// (∫_region ‖f − g‖^p dμ)^{1/p}.
inline double lp_distance(const FunctionHandle& f, const FunctionHandle& g,
                          const MeasureSpec& measure, const Region& region, double p,
                          const QuadratureScheme& quad) {
    detail::check_exponent(p);
    detail::check_compatible(f, g);
    return std::pow(detail::power_integral(f, g, weigh(region_nodes(region, quad), measure), p),
                    1.0 / p);
}

inline double lp_distance(const FunctionHandle& f, const FunctionHandle& g,
                          const MeasureSpec& measure, const Box& box, double p,
                          const QuadratureScheme& quad) {
    detail::check_exponent(p);
    detail::check_compatible(f, g);
    return std::pow(detail::power_integral(f, g, weigh(make_nodes(box, quad), measure), p),
                    1.0 / p);
}

/// Classical L^p distance over K_1 ∪ … ∪ K_count, summed region by region.
inline double lp_distance(const FunctionHandle& f, const FunctionHandle& g,
                          const Partition& partition, const MeasureSpec& measure, double p,
                          std::size_t count, const QuadratureScheme& quad) {
    double total = 0;
    for (double e : region_power_errors(f, g, partition, measure, p, count, quad)) total += e;
    return std::pow(total, 1.0 / p);
}

/// ‖f‖_{p:N} = max_{i ≤ N} (∫ ‖f I_{K_i}‖^p dμ)^{1/p}.
inline double strict_norm(const FunctionHandle& f, const Partition& partition,
                          const MeasureSpec& measure, double p, std::size_t count,
                          const QuadratureScheme& quad) {
    const auto zero = functions::zero(f.output_dimension);
    double best = 0;
    for (double e : region_power_errors(f, zero, partition, measure, p, count, quad))
        best = std::max(best, std::pow(e, 1.0 / p));
    return best;
}

/// Strict-norm distance ‖f − g‖_{p:N}.
inline double strict_distance(const FunctionHandle& f, const FunctionHandle& g,
                              const Partition& partition, const MeasureSpec& measure, double p,
                              std::size_t count, const QuadratureScheme& quad) {
    double best = 0;
    for (double e : region_power_errors(f, g, partition, measure, p, count, quad))
        best = std::max(best, std::pow(e, 1.0 / p));
    return best;
}

struct LocalMetric {
    double value = 0;
    /// Σ_{n > N} 2^{-n} e_n/(1+e_n) < 2^{-N}.
    double tail_bound = 0;
};

inline double local_metric_series(std::span<const double> power_errors) {
    double acc = 0;
    double weight = 0.5;
    for (double e : power_errors) {
        acc += weight * (e / (1.0 + e));
        weight *= 0.5;
    }
    return acc;
}

/// Truncated local-L^p metric Σ_{n ≤ N} 2^{-n} e_n/(1 + e_n).
inline LocalMetric local_metric(const FunctionHandle& f, const FunctionHandle& g,
                                const Partition& partition, const MeasureSpec& measure, double p,
                                std::size_t terms, const QuadratureScheme& quad) {
    const auto e = region_power_errors(f, g, partition, measure, p, terms, quad);
    return {local_metric_series(e), std::ldexp(1.0, -static_cast<int>(terms))};
}

struct RegionError {
    std::size_t region = 0;
    double value = 0;  // (∫_{K_n} ‖f − g‖^p dμ)^{1/p}
};

struct ErrorReport {
    std::vector<RegionError> per_region;
    double lp_total = 0;
    double strict_norm = 0;
    double local_metric = 0;
    double local_metric_tail_bound = 0;
    double p = 1;
    std::size_t truncation = 0;
};

/// All three functionals from one pass of per-region integrals, so
/// lp_total^p == Σ per_region^p and strict_norm == max per_region exactly.
inline ErrorReport error_report(const FunctionHandle& f, const FunctionHandle& g,
                                const Partition& partition, const MeasureSpec& measure, double p,
                                std::size_t count, const QuadratureScheme& quad) {
    const auto e = region_power_errors(f, g, partition, measure, p, count, quad);
    ErrorReport r;
    r.p = p;
    r.truncation = count;
    double total = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double v = std::pow(e[i], 1.0 / p);
        r.per_region.push_back({i + 1, v});
        r.strict_norm = std::max(r.strict_norm, v);
        total += e[i];
    }
    r.lp_total = std::pow(total, 1.0 / p);
    r.local_metric = local_metric_series(e);
    r.local_metric_tail_bound = std::ldexp(1.0, -static_cast<int>(count));
    return r;
}

/// Smallest n such that every region after n carries L¹ mass of ‖f‖ at most
/// `tol`; 0 when f vanishes on every region, nullopt ("unbounded") when the
/// last region of the partition still carries mass.
inline std::optional<std::size_t> ess_support_index(const FunctionHandle& f,
                                                    const Partition& partition,
                                                    const MeasureSpec& measure,
                                                    const QuadratureScheme& quad, double tol) {
    if (!(tol > 0)) throw ValidationError("support tolerance must be > 0", "tol");
    const auto masses =
        region_power_errors(f, functions::zero(f.output_dimension), partition, measure, 1.0,
                            partition.size(), quad);
    if (masses.back() > tol) return std::nullopt;
    std::size_t index = 0;
    for (std::size_t n = masses.size(); n-- > 0;)
        if (masses[n] > tol) {
            index = n + 1;
            break;
        }
    return index;
}

enum class Verdict { converging, support_violation, not_converging };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::converging: return "converging";
    case Verdict::support_violation: return "support-violation";
    case Verdict::not_converging: return "not-converging";
    }
    return "?";
}

struct DiagnosticOptions {
    double p = 1.0;
    /// Support threshold, and the slack allowed between successive errors.
    double tol = 1e-9;
    /// A finite sequence counts as converging when its final strict error is
    /// below tol or at most this fraction of its first error.
    double contraction = 0.5;
};

struct DiagnosticStep {
    std::size_t k = 0;  // 1-based position in the sequence
    double strict_error = 0;
    double lp_error = 0;
    std::optional<std::size_t> support_index;
};

struct DiagnosticResult {
    Verdict verdict = Verdict::not_converging;
    std::optional<std::size_t> target_support_index;
    std::vector<DiagnosticStep> steps;
};

/// Necessary condition for strict convergence f_k → f ∈ L^p_{μ:n}: all but
/// finitely many f_k must also be essentially supported in K_1 ∪ … ∪ K_n.
/// The trailing half of the finite sequence stands in for "all but finitely
/// many".
inline DiagnosticResult strict_convergence_diagnostic(const std::vector<FunctionHandle>& sequence,
                                                      const FunctionHandle& target,
                                                      const Partition& partition,
                                                      const MeasureSpec& measure,
                                                      const QuadratureScheme& quad,
                                                      const DiagnosticOptions& opt = {}) {
    if (sequence.empty()) throw PreconditionError("diagnostic sequence is empty");
    DiagnosticResult out;
    out.target_support_index = ess_support_index(target, partition, measure, quad, opt.tol);
    if (!out.target_support_index)
        throw PreconditionError("target has unbounded support index; it is not in any L^p_{mu:n}");
    const std::size_t n_star = *out.target_support_index;
    const std::size_t count = partition.size();

    std::vector<std::vector<double>> region_errors;
    for (std::size_t k = 0; k < sequence.size(); ++k) {
        auto e = region_power_errors(sequence[k], target, partition, measure, opt.p, count, quad);
        DiagnosticStep step;
        step.k = k + 1;
        double total = 0;
        for (double& v : e) {
            total += v;
            v = std::pow(v, 1.0 / opt.p);
            step.strict_error = std::max(step.strict_error, v);
        }
        step.lp_error = std::pow(total, 1.0 / opt.p);
        step.support_index = ess_support_index(sequence[k], partition, measure, quad, opt.tol);
        out.steps.push_back(step);
        region_errors.push_back(std::move(e));
    }

    const std::size_t trailing = (sequence.size() + 1) / 2;
    for (std::size_t k = sequence.size() - trailing; k < sequence.size(); ++k) {
        const auto& s = out.steps[k].support_index;
        if (!s || *s > n_star) {
            out.verdict = Verdict::support_violation;
            return out;
        }
    }

    bool monotone = true;
    for (std::size_t k = 1; k < region_errors.size() && monotone; ++k)
        for (std::size_t i = 0; i < count; ++i)
            if (region_errors[k][i] > region_errors[k - 1][i] + opt.tol) {
                monotone = false;
                break;
            }
    const double first = out.steps.front().strict_error;
    const double last = out.steps.back().strict_error;
    const bool small = last < opt.tol || (sequence.size() > 1 && last <= opt.contraction * first);
    out.verdict = monotone && small ? Verdict::converging : Verdict::not_converging;
    return out;
}

// Serialization. CSV has one row per region plus aggregate rows:
//   config_hash,kind,region,value
inline std::string to_csv(const ErrorReport& r, const std::string& config_hash = {}) {
    std::ostringstream os;
    os << "config_hash,kind,region,value\n";
    for (const auto& e : r.per_region)
        os << config_hash << ",region," << e.region << ',' << io::format_double(e.value) << '\n';
    os << config_hash << ",lp_total,," << io::format_double(r.lp_total) << '\n';
    os << config_hash << ",strict_norm,," << io::format_double(r.strict_norm) << '\n';
    os << config_hash << ",local_metric,," << io::format_double(r.local_metric) << '\n';
    os << config_hash << ",local_metric_tail_bound,," << io::format_double(r.local_metric_tail_bound)
       << '\n';
    os << config_hash << ",p,," << io::format_double(r.p) << '\n';
    os << config_hash << ",truncation,," << r.truncation << '\n';
    return os.str();
}

inline nlohmann::json to_json(const ErrorReport& r) {
    nlohmann::json regions = nlohmann::json::array();
    for (const auto& e : r.per_region) regions.push_back({{"region", e.region}, {"value", e.value}});
    return {{"per_region", std::move(regions)},
            {"lp_total", r.lp_total},
            {"strict_norm", r.strict_norm},
            {"local_metric", r.local_metric},
            {"local_metric_tail_bound", r.local_metric_tail_bound},
            {"p", r.p},
            {"truncation", r.truncation}};
}

} // namespace architope
