#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lgeo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };        // point or stencil outside chart domain
struct SignatureError : Error { using Error::Error; };     // eigenvalue sign count mismatch
struct TemporalError : Error { using Error::Error; };      // gradient of tau not timelike
struct ConeCollapseError : Error { using Error::Error; };  // widening exceeds the lapse
struct BudgetError : Error { using Error::Error; };        // node / step budgets exceeded
struct UnreachableError : Error { using Error::Error; };   // target not connected in graph
struct ConfigError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Basic geometry types
// ---------------------------------------------------------------------------

/// Axis-aligned coordinate box. Infinite bounds are allowed for chart domains.
struct Box {
    Vec lower;
    Vec upper;

    Box() = default;
    Box(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size())
            throw ConfigError("Box: bound dimension mismatch");
        for (int i = 0; i < lower.size(); ++i)
            if (!(lower[i] < upper[i]))
                throw ConfigError("Box: lower must be componentwise below upper");
    }

    int dim() const { return static_cast<int>(lower.size()); }

    bool contains(const Vec& p, double pad = 0.0) const {
        if (p.size() != lower.size()) return false;
        for (int i = 0; i < p.size(); ++i)
            if (p[i] < lower[i] - pad || p[i] > upper[i] + pad) return false;
        return true;
    }

    static Box unbounded(int dim) {
        const double inf = std::numeric_limits<double>::infinity();
        Box b;
        b.lower = Vec::Constant(dim, -inf);
        b.upper = Vec::Constant(dim, inf);
        return b;
    }
};

/// Tangent vector with its base point; components in chart coordinates.
struct TangentVector {
    Vec base;
    Vec comp;
};

// ---------------------------------------------------------------------------
// Metric fields
// ---------------------------------------------------------------------------

/// A smooth symmetric-matrix field on a single coordinate chart.
///
/// The first coordinate is conventionally the time coordinate for Lorentzian
/// fields (index 1); Riemannian fields have index 0. Analytic partials may be
/// attached up to second order; central finite differences fill the rest.
class MetricField {
public:
    using EvalFn = std::function<Mat(const Vec&)>;
    using D1Fn = std::function<Mat(const Vec&, int)>;        // (p, a)    -> d_a g
    using D2Fn = std::function<Mat(const Vec&, int, int)>;   // (p, a, b) -> d_a d_b g

    MetricField() = default;
    MetricField(int dim, int negative_eigenvalues, EvalFn eval)
        : dim_(dim), index_(negative_eigenvalues), eval_(std::move(eval)),
          domain_(Box::unbounded(dim)) {}

    MetricField& with_domain(Box b) { domain_ = std::move(b); return *this; }
    MetricField& with_analytic_d1(D1Fn f) { d1_ = std::move(f); return *this; }
    MetricField& with_analytic_d2(D2Fn f) { d2_ = std::move(f); return *this; }
    MetricField& with_step(double h) { step_ = h; return *this; }

    int dim() const { return dim_; }
    int index() const { return index_; }            // count of negative eigenvalues
    bool lorentzian() const { return index_ == 1; }
    double step() const { return step_; }
    const Box& domain() const { return domain_; }
    int analytic_order() const { return d2_ ? 2 : (d1_ ? 1 : 0); }

    /// Evaluate with domain, finiteness and symmetry checks.
    Mat operator()(const Vec& p) const;

    /// First partial d_a g, analytic when attached.
    Mat d1(const Vec& p, int a) const;

    /// Second partial d_a d_b g, analytic when attached.
    Mat d2(const Vec& p, int a, int b) const;

    /// Throws SignatureError unless the eigenvalue sign counts at p match the
    /// declared index. Validation is per-point; fields are arbitrary user code.
    void validate_signature(const Vec& p) const;

private:
    void check_point(const Vec& p, double pad = 0.0) const;

    int dim_ = 0;
    int index_ = 1;
    EvalFn eval_;
    D1Fn d1_;
    D2Fn d2_;
    Box domain_;
    double step_ = 1e-4;
};

// ---------------------------------------------------------------------------
// Jets
// ---------------------------------------------------------------------------

/// Partial derivatives of the metric components at a point, orders 0..order.
struct Jet {
    Vec point;
    int order = 0;
    Mat g;                             // order 0
    std::vector<Mat> d1;               // [a] = d_a g
    std::vector<std::vector<Mat>> d2;  // [a][b] = d_a d_b g
};

/// Metric jet at p up to order k (k <= 2). Analytic partials are used when
/// the field declares them; otherwise central differences with the field's
/// step. Throws DomainError when the stencil leaves the domain.
Jet jet(const MetricField& field, const Vec& p, int k);

/// Christoffel symbols of the second kind; result[k](i,j) = Gamma^k_ij.
/// Symmetric in (i,j) exactly by construction.
std::vector<Mat> christoffel(const MetricField& field, const Vec& p);
std::vector<Mat> christoffel(const Jet& jet2);

/// Partial derivatives of the Christoffel symbols, dGamma[c][k](i,j) = d_c Gamma^k_ij,
/// assembled from a jet of order 2.
std::vector<std::vector<Mat>> christoffel_d1(const MetricField& field, const Vec& p);

/// Riemann tensor with one index up: R[a][b](c,d) = R^a_{bcd}.
std::vector<std::vector<Mat>> riemann_up(const MetricField& field, const Vec& p);

/// |nabla^a Rm|_ref at p for a in {0,1}; ref must be Riemannian.
double riemann_norm(const MetricField& field, const MetricField& ref, const Vec& p, int a);

// ---------------------------------------------------------------------------
// Small algebra helpers
// ---------------------------------------------------------------------------

inline double inner(const Mat& g, const Vec& u, const Vec& v) { return u.dot(g * v); }

/// Index raise: components of g^{-1} w for a covector w.
Vec raise_index(const Mat& g, const Vec& covec);

/// Index lower: g v.
inline Vec lower_index(const Mat& g, const Vec& v) { return g * v; }

/// Frobenius-style norm of a (0,2)-tensor measured in a Riemannian reference
/// metric: |T|^2 = h^{ac} h^{bd} T_ab T_cd.
double tensor_norm2(const Mat& T, const Mat& href);

/// Same for rank-3 and rank-4 component arrays (vectors of matrices indexed
/// by the leading slots).
double tensor_norm3(const std::vector<Mat>& T, const Mat& href);
double tensor_norm4(const std::vector<std::vector<Mat>>& T, const Mat& href);

/// Euclidean-chart grid over a box, n points per axis (endpoints included).
std::vector<Vec> grid_points(const Box& box, int per_axis);

} // namespace lgeo
