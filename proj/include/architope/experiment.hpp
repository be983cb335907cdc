#pragma once

/**
 * @file experiment.hpp
 * @brief Config-driven experiment runners behind the command line tool.
 *
 * A run is fully determined by one JSON config file (plus the --seed
 * override). Each runner returns the report files it produced as
 * name → content, so callers can write them or compare them directly.
 * Report bodies carry the config hash and no timestamps, so identical
 * configs give byte-identical files.
 */

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "architope/errors.hpp"
#include "architope/function.hpp"
#include "architope/io.hpp"
#include "architope/learners/model.hpp"
#include "architope/measure.hpp"
#include "architope/metrics.hpp"
#include "architope/partition.hpp"
#include "architope/tope.hpp"

namespace architope::experiment {

using nlohmann::json;
namespace fs = std::filesystem;

/// Report files keyed by file name.
using Reports = std::map<std::string, std::string>;

struct ExperimentConfig {
    json raw;
    fs::path base_dir;  // relative paths in the config resolve against this
    std::size_t dimension = 1;
    MeasureSpec measure;
    std::shared_ptr<const Partition> partition;
    json target_spec;
    LearnerSpec learner = PolynomialLearner{0};
    FitConfig fit;
    double p = 1.0;
    QuadratureScheme quad;
    std::size_t regions = 0;
    std::string output = "out";
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::vector<unsigned> degrees;
    std::string config_hash;
};

namespace detail {

struct Call {
    std::string name;
    std::vector<std::string> args;
};

/// Parses `name` or `name(a, b, …)`.
inline Call parse_call(const std::string& text, const std::string& path) {
    static const std::regex re(R"(^\s*([A-Za-z][A-Za-z0-9_-]*)\s*(?:\((.*)\))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw ValidationError("cannot parse '" + text + "'", path);
    Call c{m[1].str(), {}};
    if (m[2].matched) {
        std::stringstream ss(m[2].str());
        std::string item;
        while (std::getline(ss, item, ',')) c.args.push_back(io::trim(item));
    }
    return c;
}

inline double number_arg(const Call& c, std::size_t i, const std::string& path) {
    double v = 0;
    if (i >= c.args.size() || !io::parse_double(c.args[i], v))
        throw ValidationError("expected a number as argument " + std::to_string(i + 1) + " of '" + c.name + "'",
                              path);
    return v;
}

template <class T>
T get(const json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw ValidationError("has the wrong type", path + (path.empty() ? "" : ".") + key);
    }
}

inline std::size_t positive_count(const json& j, const std::string& key, const std::string& path,
                                  std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto full = path.empty() ? key : path + "." + key;
    if (!j[key].is_number_integer() || j[key].get<long long>() < 1)
        throw ValidationError("must be a positive integer", full);
    return j[key].get<std::size_t>();
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

inline MeasureSpec parse_measure(const json& j, std::size_t d, const fs::path& base) {
    const std::string path = "measure";
    if (j.is_null()) return measures::lebesgue(d);
    if (j.is_string()) {
        const auto c = parse_call(j.get<std::string>(), path);
        if (c.name == "lebesgue") return measures::lebesgue(d);
        if (c.name == "gaussian") {
            const double s = c.args.empty() ? 1.0 : number_arg(c, 0, path);
            if (!(s > 0)) throw ValidationError("sigma must be > 0", path);
            return measures::gaussian(d, s);
        }
        if (c.name == "exp-decay") {
            const double l = c.args.empty() ? 1.0 : number_arg(c, 0, path);
            if (!(l > 0)) throw ValidationError("lambda must be > 0", path);
            return measures::exp_decay(d, l);
        }
        throw ValidationError("unknown measure '" + c.name + "'", path);
    }
    if (j.is_object()) {
        const auto kind = get<std::string>(j, "kind", path, "");
        if (kind == "tabulated") {
            const auto file = get<std::string>(j, "path", path, "");
            if (file.empty()) throw ValidationError("tabulated measure needs a path", path + ".path");
            return measures::tabulated(d, io::read_numeric_csv(resolve(base, file).string()), "tabulated(" + file + ")");
        }
        return parse_measure(json(kind.empty() ? "?" : kind + (j.contains("parameter") ? "(" + j["parameter"].dump() + ")" : "")),
                             d, base);
    }
    throw ValidationError("must be a string or object", path);
}

inline Partition parse_partition(const json& j, const fs::path& base) {
    const std::string path = "partition";
    auto shells = [&](long long d, long long n, double width) {
        if (d < 1) throw ValidationError("dimension must be >= 1", path + ".dimension");
        if (n < 1) throw ValidationError("region count must be >= 1", path + ".regions");
        if (!(width > 0) || !std::isfinite(width)) throw ValidationError("width must be > 0", path + ".width");
        return make_shell_partition(static_cast<std::size_t>(d), static_cast<std::size_t>(n), width);
    };
    if (j.is_string()) {
        const auto c = parse_call(j.get<std::string>(), path);
        if (c.name != "shells" || c.args.size() != 3)
            throw ValidationError("expected shells(d, N, width)", path);
        return shells(static_cast<long long>(number_arg(c, 0, path)), static_cast<long long>(number_arg(c, 1, path)),
                      number_arg(c, 2, path));
    }
    if (!j.is_object()) throw ValidationError("must be a string or object", path);
    if (j.contains("regions") && j["regions"].is_array()) return partition_from_json(j);
    const auto kind = get<std::string>(j, "kind", path, "");
    if (kind == "shells")
        return shells(get<long long>(j, "dimension", path, 1), get<long long>(j, "regions", path, 0),
                      get<double>(j, "width", path, 0.0));
    if (kind == "file") {
        const auto file = resolve(base, get<std::string>(j, "path", path, ""));
        std::ifstream in(file);
        if (!in) throw ValidationError("cannot open partition file '" + file.string() + "'", path + ".path");
        try {
            return partition_from_json(json::parse(in));
        } catch (const json::parse_error& e) {
            throw ValidationError(e.what(), path + ".path");
        }
    }
    throw ValidationError("unknown partition kind '" + kind + "'", path + ".kind");
}

/// Samples (x, y) read from CSV: linear interpolation in d = 1 (held
/// constant past the ends), nearest sample for d ≥ 2.
inline FunctionHandle sampled_target(std::size_t d, std::size_t D, std::vector<std::vector<double>> rows,
                                     std::string label) {
    for (const auto& r : rows)
        if (r.size() != d + D)
            throw ValidationError("CSV target rows need " + std::to_string(d + D) + " columns", "target.path");
    if (d == 1) {
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
        return {[rows, D](Point x) {
                    Vector out(D);
                    auto it = std::lower_bound(rows.begin(), rows.end(), x[0],
                                               [](const auto& r, double v) { return r[0] < v; });
                    if (it == rows.begin() || it == rows.end()) {
                        const auto& r = it == rows.end() ? rows.back() : rows.front();
                        for (std::size_t k = 0; k < D; ++k) out[k] = r[1 + k];
                        return out;
                    }
                    const auto& hi = *it;
                    const auto& lo = *(it - 1);
                    const double t = hi[0] == lo[0] ? 0.0 : (x[0] - lo[0]) / (hi[0] - lo[0]);
                    for (std::size_t k = 0; k < D; ++k) out[k] = lo[1 + k] + t * (hi[1 + k] - lo[1 + k]);
                    return out;
                },
                D, std::move(label)};
    }
    return {[rows, d, D](Point x) {
                std::size_t best = 0;
                double best_d2 = INFINITY;
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    double d2 = 0;
                    for (std::size_t k = 0; k < d; ++k) d2 += (rows[i][k] - x[k]) * (rows[i][k] - x[k]);
                    if (d2 < best_d2) best_d2 = d2, best = i;
                }
                return Vector(rows[best].begin() + static_cast<std::ptrdiff_t>(d), rows[best].end());
            },
            D, std::move(label)};
}

} // namespace detail

/// Built-in targets: "indicator(K_i)", "exp-decay[(λ)]" = e^{-λ‖x‖₁},
/// "gaussian[(σ)]" = e^{-‖x‖²/(2σ²)} (σ = 1/√2 by default, i.e. e^{-‖x‖²}),
/// "sine[(ω)]" = sin(ω Σx), "abs" = ‖x‖₁, "zero", "constant(c)"; or
/// {"kind":"csv","path":…, "output_dimension":D}.
inline FunctionHandle parse_target(const json& j, std::size_t d, const Partition* partition, const fs::path& base,
                                   const std::string& path = "target") {
    if (j.is_object()) {
        const auto kind = detail::get<std::string>(j, "kind", path, "");
        if (kind != "csv") throw ValidationError("unknown target kind '" + kind + "'", path + ".kind");
        const auto file = detail::get<std::string>(j, "path", path, "");
        const auto D = detail::positive_count(j, "output_dimension", path, 1);
        return detail::sampled_target(d, D, io::read_numeric_csv(detail::resolve(base, file).string()),
                                      "csv(" + file + ")");
    }
    if (!j.is_string()) throw ValidationError("must be a string or object", path);
    const auto text = j.get<std::string>();
    const auto c = detail::parse_call(text, path);
    if (c.name == "indicator") {
        if (!partition) throw ValidationError("indicator target needs a partition", path);
        if (c.args.size() != 1) throw ValidationError("expected indicator(K_i)", path);
        std::string a = c.args[0];
        if (a.rfind("K_", 0) == 0) a = a.substr(2);
        double idx = 0;
        if (!io::parse_double(a, idx) || idx < 1 || idx != std::floor(idx) ||
            static_cast<std::size_t>(idx) > partition->size())
            throw ValidationError("indicator region must be one of K_1..K_" + std::to_string(partition->size()), path);
        return functions::indicator(partition->region(static_cast<std::size_t>(idx)));
    }
    if (c.name == "exp-decay") {
        const double l = c.args.empty() ? 1.0 : detail::number_arg(c, 0, path);
        return functions::scalar(
            [l](Point x) {
                double r = 0;
                for (double v : x) r += std::abs(v);
                return std::exp(-l * r);
            },
            text);
    }
    if (c.name == "gaussian") {
        const double s = c.args.empty() ? 1.0 / std::sqrt(2.0) : detail::number_arg(c, 0, path);
        if (!(s > 0)) throw ValidationError("sigma must be > 0", path);
        return functions::scalar(
            [s](Point x) {
                double r2 = 0;
                for (double v : x) r2 += v * v;
                return std::exp(-r2 / (2 * s * s));
            },
            text);
    }
    if (c.name == "sine") {
        const double w = c.args.empty() ? 1.0 : detail::number_arg(c, 0, path);
        return functions::scalar(
            [w](Point x) {
                double s = 0;
                for (double v : x) s += v;
                return std::sin(w * s);
            },
            text);
    }
    if (c.name == "abs")
        return functions::scalar(
            [](Point x) {
                double r = 0;
                for (double v : x) r += std::abs(v);
                return r;
            },
            text);
    if (c.name == "zero") return functions::zero();
    if (c.name == "constant") return functions::constant(detail::number_arg(c, 0, path));
    throw ValidationError("unknown target '" + c.name + "'", path);
}

inline QuadratureScheme parse_quadrature(const json& j, std::size_t d, std::uint64_t seed) {
    const std::string path = "quadrature";
    if (j.is_null()) {
        auto q = QuadratureScheme::default_for(d);
        if (q.kind == QuadratureKind::monte_carlo) q.seed = seed;
        return q;
    }
    if (!j.is_object()) throw ValidationError("must be an object", path);
    const auto kind = detail::get<std::string>(j, "kind", path, "tensor");
    if (kind == "tensor") {
        const auto r = detail::positive_count(j, "refinement", path, QuadratureScheme::default_for(std::min<std::size_t>(d, 3)).refinement);
        if (r < 2) throw ValidationError("must be >= 2", path + ".refinement");
        return QuadratureScheme::tensor(r);
    }
    if (kind == "monte-carlo")
        return QuadratureScheme::monte_carlo(detail::positive_count(j, "samples", path, 1U << 18),
                                             detail::get<std::uint64_t>(j, "seed", path, seed));
    throw ValidationError("unknown quadrature kind '" + kind + "'", path + ".kind");
}

inline void parse_learner(const json& j, ExperimentConfig& cfg) {
    const std::string path = "learner";
    if (j.is_null()) return;
    if (!j.is_object()) throw ValidationError("must be an object", path);
    const auto kind = detail::get<std::string>(j, "kind", path, "polynomial");
    cfg.fit.node_budget = detail::positive_count(j, "node_budget", path, cfg.fit.node_budget);
    if (kind == "polynomial") {
        const auto degree = detail::get<long long>(j, "degree", path, 0);
        if (degree < 0) throw ValidationError("must be >= 0", path + ".degree");
        cfg.learner = PolynomialLearner{static_cast<unsigned>(degree)};
        cfg.fit.basis = polynomial_basis_from_string(detail::get<std::string>(j, "basis", path, "chebyshev"));
        cfg.fit.lambda = detail::get<double>(j, "lambda", path, 0.0);
        if (!(cfg.fit.lambda >= 0)) throw ValidationError("must be >= 0", path + ".lambda");
        return;
    }
    if (kind == "mlp") {
        const auto widths = detail::get<std::vector<long long>>(j, "widths", path, {16});
        MlpLearner m;
        for (auto w : widths) {
            if (w < 1) throw ValidationError("widths must be positive", path + ".widths");
            m.hidden_widths.push_back(static_cast<std::size_t>(w));
        }
        cfg.learner = std::move(m);
        cfg.fit.activation = activation_from_string(detail::get<std::string>(j, "activation", path, "tanh"));
        cfg.fit.train.epochs = static_cast<std::size_t>(detail::get<long long>(j, "epochs", path, 500));
        cfg.fit.train.learning_rate = detail::get<double>(j, "learning_rate", path, 0.01);
        if (!(cfg.fit.train.learning_rate > 0)) throw ValidationError("must be > 0", path + ".learning_rate");
        cfg.fit.train.batch_size = static_cast<std::size_t>(detail::get<long long>(j, "batch_size", path, 0));
        cfg.fit.train.optimizer = optimizer_from_string(detail::get<std::string>(j, "optimizer", path, "adam"));
        return;
    }
    throw ValidationError("unknown learner kind '" + kind + "'", path + ".kind");
}

/// Parses and validates a config. `seed_override` replaces the "seed" key
/// before hashing. Throws ValidationError (with a field path) before any
/// numerical work.
inline ExperimentConfig parse_config(json raw, const fs::path& base_dir = ".",
                                     std::optional<std::uint64_t> seed_override = std::nullopt) {
    if (!raw.is_object()) throw ValidationError("config must be a JSON object");
    if (seed_override) raw["seed"] = *seed_override;
    ExperimentConfig cfg;
    cfg.base_dir = base_dir;
    cfg.seed = detail::get<std::uint64_t>(raw, "seed", "", 0);
    cfg.output = detail::get<std::string>(raw, "output", "", "out");
    cfg.threads = detail::positive_count(raw, "threads", "", 1);

    if (!raw.contains("partition")) throw ValidationError("is required", "partition");
    cfg.partition = std::make_shared<const Partition>(detail::parse_partition(raw["partition"], base_dir));
    cfg.dimension = cfg.partition->dimension();
    if (raw.contains("dimension") && detail::get<std::size_t>(raw, "dimension", "", 0) != cfg.dimension)
        throw ValidationError("does not match the partition dimension", "dimension");

    cfg.measure = detail::parse_measure(raw.value("measure", json()), cfg.dimension, base_dir);
    cfg.p = detail::get<double>(raw, "p", "", 1.0);
    if (!(cfg.p >= 1.0) || !std::isfinite(cfg.p)) throw ValidationError("must be in [1, inf)", "p");
    cfg.quad = parse_quadrature(raw.value("quadrature", json()), cfg.dimension, cfg.seed);
    cfg.regions = detail::positive_count(raw, "regions", "", cfg.partition->size());
    if (cfg.regions > cfg.partition->size())
        throw ValidationError("exceeds the partition size " + std::to_string(cfg.partition->size()), "regions");

    cfg.target_spec = raw.value("target", json("zero"));
    parse_target(cfg.target_spec, cfg.dimension, cfg.partition.get(), base_dir);  // validate early

    cfg.fit.seed = cfg.seed;
    cfg.fit.train.seed = cfg.seed;
    cfg.fit.p = cfg.p;
    parse_learner(raw.value("learner", json()), cfg);
    cfg.fit.validate();

    if (raw.contains("degrees")) {
        for (const auto& d : raw["degrees"]) {
            if (!d.is_number_integer() || d.get<long long>() < 0)
                throw ValidationError("degrees must be non-negative integers", "degrees");
            cfg.degrees.push_back(d.get<unsigned>());
        }
    } else {
        for (unsigned k = 0; k <= 15; ++k) cfg.degrees.push_back(k);
    }

    json hashed = raw;
    hashed.erase("output");
    cfg.config_hash = io::hex64(io::fnv1a(hashed.dump()));
    cfg.raw = std::move(raw);
    return cfg;
}

inline ExperimentConfig load_config(const fs::path& file, std::optional<std::uint64_t> seed_override = std::nullopt) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open config file '" + file.string() + "'");
    json raw;
    try {
        raw = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(std::move(raw), file.parent_path().empty() ? fs::path(".") : file.parent_path(),
                        seed_override);
}

inline FunctionHandle target_of(const ExperimentConfig& cfg) {
    return parse_target(cfg.target_spec, cfg.dimension, cfg.partition.get(), cfg.base_dir);
}

inline json support_json(const std::optional<std::size_t>& s) {
    return s ? json(*s) : json("unbounded");
}

/// Default tolerance for essential-support indexing.
inline constexpr double kSupportTolerance = 1e-9;

/// upgrade: architope.json, error_report.csv, summary.json.
inline Reports run_upgrade(const ExperimentConfig& cfg) {
    const auto target = target_of(cfg);
    UpgradeOptions opt;
    opt.fit = cfg.fit;
    opt.quad = cfg.quad;
    opt.threads = cfg.threads;
    auto result = upgrade(target, cfg.learner, cfg.partition, cfg.measure, cfg.regions, opt);

    const auto support =
        ess_support_index(as_function(result.architope), *cfg.partition, cfg.measure, cfg.quad, kSupportTolerance);
    json fits = json::array();
    for (const auto& f : result.fits)
        fits.push_back({{"region", f.region}, {"mass", f.mass}, {"fit_residual", f.fit_residual},
                        {"rank_deficient", f.rank_deficient}});
    json summary = {{"config_hash", cfg.config_hash},
                    {"lp_total", result.report.lp_total},
                    {"strict_norm", result.report.strict_norm},
                    {"local_metric", result.report.local_metric},
                    {"local_metric_tail_bound", result.report.local_metric_tail_bound},
                    {"ess_support_index", support_json(support)},
                    {"p", cfg.p},
                    {"regions", cfg.regions},
                    {"fits", std::move(fits)}};
    json tope = to_json(result.architope);
    tope["config_hash"] = cfg.config_hash;
    return {{"architope.json", tope.dump(2) + "\n"},
            {"error_report.csv", to_csv(result.report, cfg.config_hash)},
            {"summary.json", summary.dump(2) + "\n"}};
}

/// gap-demo: gap_demo.csv.
inline Reports run_gap_demo(const ExperimentConfig& cfg) {
    const auto r = gap_demo(cfg.partition, cfg.measure, cfg.p, cfg.degrees, cfg.quad);
    return {{"gap_demo.csv", to_csv(r, cfg.config_hash)}};
}

/// Built-in sequence families for the convergence diagnostic, all with
/// target I_{K_1}.
inline std::vector<FunctionHandle> sequence_family(const std::string& family, const Partition& p, std::size_t steps) {
    std::vector<FunctionHandle> seq;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double kk = static_cast<double>(k);
        if (family == "shrinking-on-K1")
            seq.push_back(functions::indicator(p.region(1), 1.0 - 1.0 / kk));
        else if (family == "leaking-to-K2")
            seq.push_back(functions::sum(functions::indicator(p.region(1)), functions::indicator(p.region(2), 1.0 / kk)));
        else
            throw ValidationError("unknown sequence family '" + family + "'", "diagnostic.family");
    }
    return seq;
}

/// diagnose: diagnostic.json.
inline Reports run_diagnostic(const ExperimentConfig& cfg) {
    const json d = cfg.raw.value("diagnostic", json::object());
    const std::string path = "diagnostic";
    DiagnosticOptions opt;
    opt.p = cfg.p;
    opt.tol = detail::get<double>(d, "tol", path, kSupportTolerance);
    if (!(opt.tol > 0)) throw ValidationError("must be > 0", path + ".tol");
    const auto family = detail::get<std::string>(d, "family", path, "");

    std::vector<FunctionHandle> seq;
    FunctionHandle target;
    if (family == "models") {
        const auto dir = detail::resolve(cfg.base_dir, detail::get<std::string>(d, "models_dir", path, ""));
        if (!fs::is_directory(dir)) throw ValidationError("is not a directory", path + ".models_dir");
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ValidationError(e.what(), path + ".models_dir/" + f.filename().string());
            }
            if (j.value("kind", "") == "architope")
                seq.push_back(as_function(architope_from_json(j), f.filename().string()));
            else
                seq.push_back(as_function(model_from_json(j), f.filename().string()));
        }
        if (seq.empty()) throw ValidationError("contains no model files", path + ".models_dir");
        target = target_of(cfg);
    } else {
        if (cfg.partition->size() < 2) throw ValidationError("built-in families need >= 2 regions", "partition");
        seq = sequence_family(family, *cfg.partition, detail::positive_count(d, "steps", path, 64));
        target = functions::indicator(cfg.partition->region(1));
    }
    const auto r = strict_convergence_diagnostic(seq, target, *cfg.partition, cfg.measure, cfg.quad, opt);
    json steps = json::array();
    for (const auto& s : r.steps)
        steps.push_back({{"k", s.k}, {"strict_error", s.strict_error}, {"lp_error", s.lp_error},
                         {"support_index", support_json(s.support_index)}});
    json out = {{"config_hash", cfg.config_hash},
                {"family", family},
                {"verdict", to_string(r.verdict)},
                {"target_support_index", support_json(r.target_support_index)},
                {"per_step", std::move(steps)}};
    return {{"diagnostic.json", out.dump(2) + "\n"}};
}

/// metrics: one-off distances between config keys metrics.f and metrics.g.
inline Reports run_metrics(const ExperimentConfig& cfg) {
    const json m = cfg.raw.value("metrics", json::object());
    if (!m.contains("f")) throw ValidationError("is required", "metrics.f");
    const auto f = parse_target(m["f"], cfg.dimension, cfg.partition.get(), cfg.base_dir, "metrics.f");
    const auto g = parse_target(m.value("g", json("zero")), cfg.dimension, cfg.partition.get(), cfg.base_dir,
                                "metrics.g");
    const auto report = error_report(f, g, *cfg.partition, cfg.measure, cfg.p, cfg.regions, cfg.quad);
    json out = to_json(report);
    out["config_hash"] = cfg.config_hash;
    out["f"] = f.label;
    out["g"] = g.label;
    out["ess_support_index_f"] =
        support_json(ess_support_index(f, *cfg.partition, cfg.measure, cfg.quad, kSupportTolerance));
    return {{"metrics.json", out.dump(2) + "\n"}, {"metrics.csv", to_csv(report, cfg.config_hash)}};
}

/// partition: partition.json and its invariant checks under the configured measure.
inline Reports run_partition(const ExperimentConfig& cfg) {
    const auto check = check_partition(*cfg.partition, cfg.measure, cfg.quad);
    json out = {{"config_hash", cfg.config_hash},
                {"measure", cfg.measure.label},
                {"masses", check.masses},
                {"max_overlap", check.max_overlap},
                {"uncovered", check.uncovered},
                {"valid", true}};
    return {{"partition.json", to_json(*cfg.partition).dump(2) + "\n"}, {"partition_check.json", out.dump(2) + "\n"}};
}

inline void write_reports(const Reports& reports, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& [name, body] : reports) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write '" + (dir / name).string() + "'");
        out << body;
    }
}

} // namespace architope::experiment
