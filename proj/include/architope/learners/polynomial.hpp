#pragma once

// Polynomials of bounded total degree in d variables, fitted by
// density-weighted least squares on quadrature nodes.
//
// The Chebyshev basis is T_α(u) = Π_k T_{α_k}(u_k) with u the affine image of
// the reference box on [-1,1]^d; the monomial basis is x^α on raw
// coordinates. Terms are ordered by total degree, then lexicographically, so
// the degree-k basis is a prefix of the degree-(k+1) basis.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "architope/errors.hpp"
#include "architope/function.hpp"
#include "architope/measure.hpp"
#include "architope/partition.hpp"

namespace architope {

enum class PolynomialBasis { chebyshev, monomial };

inline const char* to_string(PolynomialBasis b) {
    return b == PolynomialBasis::chebyshev ? "chebyshev" : "monomial";
}

inline PolynomialBasis polynomial_basis_from_string(const std::string& s) {
    if (s == "chebyshev") return PolynomialBasis::chebyshev;
    if (s == "monomial") return PolynomialBasis::monomial;
    throw ValidationError("unknown polynomial basis '" + s + "'", "learner.basis");
}

/// Exponent vectors α with |α| ≤ degree, graded then lexicographic
/// (larger leading exponent first within a grade).
inline std::vector<std::vector<unsigned>> graded_multi_indices(std::size_t d, unsigned degree) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> alpha(d, 0);
    for (unsigned total = 0; total <= degree; ++total) {
        // enumerate compositions of `total` into d non-negative parts
        auto rec = [&](auto&& self, std::size_t k, unsigned remaining) -> void {
            if (k + 1 == d) {
                alpha[k] = remaining;
                out.push_back(alpha);
                return;
            }
            for (unsigned a = remaining + 1; a-- > 0;) {
                alpha[k] = a;
                self(self, k + 1, remaining - a);
            }
        };
        rec(rec, 0, total);
    }
    return out;
}

/// C(d + degree, d).
inline std::size_t polynomial_term_count(std::size_t d, unsigned degree) {
    std::size_t c = 1;
    for (std::size_t i = 1; i <= d; ++i) c = c * (degree + i) / i;
    return c;
}

class PolynomialModel {
public:
    PolynomialModel() = default;

    PolynomialModel(std::size_t dimension, std::size_t output_dimension, unsigned degree,
                    PolynomialBasis basis, Box reference_box)
        : dimension_(dimension), degree_(degree), basis_(basis),
          reference_box_(std::move(reference_box)),
          exponents_(graded_multi_indices(dimension, degree)),
          coefficients_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(output_dimension),
                                              static_cast<Eigen::Index>(exponents_.size()))) {
        if (dimension == 0) throw ValidationError("polynomial dimension must be >= 1");
        if (output_dimension == 0) throw ValidationError("polynomial output dimension must be >= 1");
        if (reference_box_.dimension() != dimension || !reference_box_.non_degenerate())
            throw ValidationError("polynomial reference box is invalid");
    }

    /// Constant zero polynomial on `box` (degree 0).
    static PolynomialModel zero(const Box& box, std::size_t output_dimension = 1) {
        return PolynomialModel(box.dimension(), output_dimension, 0, PolynomialBasis::chebyshev, box);
    }

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t output_dimension() const noexcept {
        return static_cast<std::size_t>(coefficients_.rows());
    }
    unsigned degree() const noexcept { return degree_; }
    PolynomialBasis basis() const noexcept { return basis_; }
    const Box& reference_box() const noexcept { return reference_box_; }
    std::size_t term_count() const noexcept { return exponents_.size(); }
    const std::vector<std::vector<unsigned>>& exponents() const noexcept { return exponents_; }

    /// D × term_count.
    const Eigen::MatrixXd& coefficients() const noexcept { return coefficients_; }
    void set_coefficients(Eigen::MatrixXd c) {
        if (c.rows() != coefficients_.rows() || c.cols() != coefficients_.cols())
            throw ValidationError("coefficient matrix has the wrong shape");
        if (!c.allFinite()) throw ValidationError("polynomial coefficients must be finite");
        coefficients_ = std::move(c);
    }

    /// Basis values at x, written into `row` (length term_count()).
    void basis_row(Point x, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const {
        const std::size_t d = dimension_;
        const std::size_t stride = degree_ + 1;
        thread_local std::vector<double> table;
        table.assign(d * stride, 1.0);
        for (std::size_t k = 0; k < d; ++k) {
            double* t = table.data() + k * stride;
            if (basis_ == PolynomialBasis::chebyshev) {
                const double lo = reference_box_.lo[k], hi = reference_box_.hi[k];
                const double u = (2.0 * x[k] - lo - hi) / (hi - lo);
                if (degree_ >= 1) t[1] = u;
                for (std::size_t n = 2; n <= degree_; ++n) t[n] = 2.0 * u * t[n - 1] - t[n - 2];
            } else {
                for (std::size_t n = 1; n <= degree_; ++n) t[n] = t[n - 1] * x[k];
            }
        }
        for (std::size_t j = 0; j < exponents_.size(); ++j) {
            double v = 1.0;
            for (std::size_t k = 0; k < d; ++k) v *= table[k * stride + exponents_[j][k]];
            row[static_cast<Eigen::Index>(j)] = v;
        }
    }

    Vector evaluate(Point x) const {
        Eigen::RowVectorXd row(static_cast<Eigen::Index>(term_count()));
        basis_row(x, row);
        Eigen::VectorXd y = coefficients_ * row.transpose();
        return Vector(y.data(), y.data() + y.size());
    }

    Vector operator()(Point x) const { return evaluate(x); }

    PolynomialModel scaled(double c) const {
        PolynomialModel out = *this;
        out.coefficients_ *= c;
        return out;
    }

    bool is_zero() const { return (coefficients_.array() == 0.0).all(); }

private:
    std::size_t dimension_ = 0;
    unsigned degree_ = 0;
    PolynomialBasis basis_ = PolynomialBasis::chebyshev;
    Box reference_box_;
    std::vector<std::vector<unsigned>> exponents_;
    Eigen::MatrixXd coefficients_;
};

struct PolynomialFitReport {
    /// sqrt(Σ_j w_j ‖target(x_j) − model(x_j)‖²), the minimized objective without the ridge term.
    double weighted_residual = 0;
    std::size_t rank = 0;
    std::size_t terms = 0;
    std::size_t nodes = 0;
    /// λ = 0 and the weighted design matrix lost rank; the minimum-norm solution was taken.
    bool rank_deficient = false;
};

struct PolynomialFit {
    PolynomialModel model;
    PolynomialFitReport report;
};

/// Weighted objective Σ_j w_j ‖target(x_j) − model(x_j)‖² over weighted nodes.
template <class F>
double weighted_squared_residual(const F& model, const FunctionHandle& target,
                                 const NodeSet& weighted) {
    double acc = 0;
    for (std::size_t j = 0; j < weighted.size(); ++j) {
        if (weighted.weights[j] == 0) continue;
        const double r = pointwise_distance(model(weighted.node(j)), target(weighted.node(j)));
        acc += weighted.weights[j] * r * r;
    }
    return acc;
}

/// Minimizes Σ_j w_j ‖target(x_j) − P(x_j)‖² + λ‖coeffs‖² over polynomials of
/// total degree ≤ `degree`. Solved through a complete orthogonal
/// decomposition of the √w-scaled design matrix, which also yields the
/// minimum-norm solution when the system is rank deficient.
inline PolynomialFit fit_polynomial_on_nodes(const FunctionHandle& target, const NodeSet& weighted,
                                             const Box& reference_box, unsigned degree,
                                             PolynomialBasis basis, double lambda) {
    if (!(lambda >= 0) || !std::isfinite(lambda))
        throw ValidationError("regularization must be finite and >= 0", "learner.lambda");
    PolynomialModel model(weighted.dimension, target.output_dimension, degree, basis, reference_box);
    const auto m = static_cast<Eigen::Index>(model.term_count());
    const auto D = static_cast<Eigen::Index>(target.output_dimension);

    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < weighted.size(); ++j)
        if (weighted.weights[j] > 0) active.push_back(j);
    if (active.empty()) throw PreconditionError("no quadrature node carries positive weight");

    const auto rows = static_cast<Eigen::Index>(active.size()) + (lambda > 0 ? m : 0);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, m);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(rows, D);
    for (std::size_t r = 0; r < active.size(); ++r) {
        const auto j = active[r];
        const auto row = static_cast<Eigen::Index>(r);
        const double s = std::sqrt(weighted.weights[j]);
        model.basis_row(weighted.node(j), A.row(row));
        A.row(row) *= s;
        const Vector t = target(weighted.node(j));
        if (t.size() != target.output_dimension)
            throw EvaluationError("target '" + target.label + "' returned wrong output dimension");
        for (Eigen::Index k = 0; k < D; ++k) {
            if (!std::isfinite(t[static_cast<std::size_t>(k)]))
                throw EvaluationError("target '" + target.label + "' is non-finite at node " +
                                      format_point(weighted.node(j)));
            B(row, k) = s * t[static_cast<std::size_t>(k)];
        }
    }
    if (lambda > 0)
        A.bottomRows(m).diagonal().setConstant(std::sqrt(lambda));

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    Eigen::MatrixXd X = cod.solve(B);  // m × D
    model.set_coefficients(X.transpose());

    PolynomialFit fit{std::move(model), {}};
    fit.report.rank = static_cast<std::size_t>(cod.rank());
    fit.report.terms = static_cast<std::size_t>(m);
    fit.report.nodes = active.size();
    fit.report.rank_deficient = lambda == 0 && cod.rank() < m;
    fit.report.weighted_residual =
        std::sqrt(weighted_squared_residual(fit.model, target, weighted));
    return fit;
}

// JSON: {"kind":"polynomial", dimension, output_dimension, degree, basis,
//        reference_box:{lo,hi}, coefficients:[[…] per output]}
inline nlohmann::json to_json(const PolynomialModel& m) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.coefficients().rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.coefficients().cols()));
        for (Eigen::Index c = 0; c < m.coefficients().cols(); ++c)
            row[static_cast<std::size_t>(c)] = m.coefficients()(r, c);
        coeffs.push_back(row);
    }
    return {{"kind", "polynomial"},
            {"dimension", m.dimension()},
            {"output_dimension", m.output_dimension()},
            {"degree", m.degree()},
            {"basis", to_string(m.basis())},
            {"reference_box", to_json(m.reference_box())},
            {"coefficients", std::move(coeffs)}};
}

inline PolynomialModel polynomial_from_json(const nlohmann::json& j) {
    try {
        PolynomialModel m(j.at("dimension").get<std::size_t>(),
                          j.at("output_dimension").get<std::size_t>(),
                          j.at("degree").get<unsigned>(),
                          polynomial_basis_from_string(j.at("basis").get<std::string>()),
                          box_from_json(j.at("reference_box"), "reference_box"));
        const auto& rows = j.at("coefficients");
        Eigen::MatrixXd c(static_cast<Eigen::Index>(m.output_dimension()),
                          static_cast<Eigen::Index>(m.term_count()));
        if (rows.size() != m.output_dimension())
            throw ValidationError("wrong number of coefficient rows", "coefficients");
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto v = rows[r].get<std::vector<double>>();
            if (v.size() != m.term_count())
                throw ValidationError("wrong number of coefficients", "coefficients");
            for (std::size_t k = 0; k < v.size(); ++k)
                c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = v[k];
        }
        m.set_coefficients(std::move(c));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed polynomial JSON: ") + e.what());
    }
}

} // namespace architope
