#pragma once

#include "lgeo/causal.hpp"
#include "lgeo/core.hpp"
#include "lgeo/temporal.hpp"

#include <memory>
#include <mutex>

namespace lgeo {

enum class DistanceKind { Null, Wick, NullWick };

std::string to_string(DistanceKind kind);

struct LatticeParams {
    Box box;
    Vec spacing;                    // per axis; a single value is broadcast
    int stencil_radius = 3;
    std::vector<bool> periodic;     // a periodic axis must span its full period
    bool strict_edges = false;      // classify at both endpoints as well as midpoint
    bool simpson = false;           // 3-point Simpson for Wick edge weights
    double eps_null = 1e-9;
    double eps_cone = 1e-6;
    std::size_t max_nodes = 4'000'000;  // overridable via WICKBENCH_MAX_LATTICE_NODES

    static std::size_t node_budget_from_env(std::size_t fallback);
};

struct DistanceResult {
    double value = 0.0;
    std::vector<int> path;          // node indices, source first
    DistanceKind kind = DistanceKind::Null;
    Vec spacing;
    int stencil = 0;
    double tau_p = 0.0;
    double tau_q = 0.0;
    int path_len_nodes = 0;
};

/// Finite grid graph over a compact coordinate box. Edges join nodes that
/// differ by a coprime integer offset of max-norm <= R; every edge caches its
/// causal class, |delta tau| and Wick length. Immutable once built.
class Lattice {
public:
    static Lattice build(const MetricField& g, const TemporalField& tau, LatticeParams params);

    int dim() const { return dim_; }
    std::size_t node_count() const { return nodes_; }
    const LatticeParams& params() const { return params_; }

    Vec coords(int node) const;
    /// Nearest node to p; throws DomainError when p is off the box.
    int node_near(const Vec& p) const;

    double tau_at(int node) const { return tau_values_[node]; }

    /// Shortest piecewise-causal path with |delta tau| weights; symmetric.
    /// Throws UnreachableError when the causal-edge graph does not connect
    /// the endpoints at this resolution.
    DistanceResult null_distance(int a, int b) const;

    /// Shortest path over all edges with Wick weights (the Riemannian
    /// distance of the Wick-rotated metric on the lattice).
    DistanceResult wick_distance(int a, int b) const;

    /// Shortest path through the piecewise-null graph: exactly-null chords
    /// carry their Wick length; other causal chords are split into two exact
    /// null pieces (apex solved from the metric) and carry the summed g_W
    /// lengths of the pieces. Wholly independent of the null-distance route.
    DistanceResult null_wick_distance(int a, int b) const;

    /// Future reach: breadth-first closure over chords that are future-causal
    /// with margin eps_cone. An inner approximation of J^+.
    std::vector<int> reach(int a) const;

    // introspection used by tests
    struct EdgeView {
        int a, b;
        CausalKind cls;
        double null_w, wick_w;
        bool eligible;
    };
    std::vector<EdgeView> edges() const;

private:
    struct Edge {
        int a, b;
        double null_w = 0.0;
        double wick_w = 0.0;
        CausalKind cls = CausalKind::Spacelike;
        bool future_ab = false;   // orientation by tau for causal chords
        bool margin_ab = false;   // future-causal with margin, a -> b
        bool margin_ba = false;
        bool eligible = false;    // chord null within eps_cone
    };

    DistanceResult dijkstra(int a, int b, DistanceKind kind) const;
    void ensure_nullwick_weights() const;
    double apex_weight(const Edge& e) const;

    int dim_ = 0;
    std::size_t nodes_ = 0;
    std::vector<int> counts_;
    Vec origin_;
    LatticeParams params_;
    MetricField g_;
    MetricField gw_;
    TemporalField tau_;
    std::vector<double> tau_values_;
    std::vector<Edge> edge_list_;
    std::vector<std::vector<int>> adjacency_;  // node -> edge indices

    // lazily built piecewise-null weights, shared so the lattice stays movable
    struct NullwickCache {
        std::once_flag once;
        std::vector<double> w;
    };
    std::shared_ptr<NullwickCache> nullwick_ = std::make_shared<NullwickCache>();
};

// ---------------------------------------------------------------------------
// Verdicts and studies
// ---------------------------------------------------------------------------

/// Side-by-side record for the encoding-of-causality checks.
struct EncodingVerdict {
    bool causal = false;           // oracle verdict: q in J^+(p)
    double dhat = 0.0;             // lattice null distance
    double delta_tau = 0.0;        // tau(q) - tau(p)
    double dhat_residual = 0.0;    // |dhat - (tau(q) - tau(p))|
    double d_wick = 0.0;           // lattice Wick distance
    double sqrt2_delta_tau = 0.0;
    bool wick_below_sqrt2 = false; // d_W < sqrt(2) (tau(q) - tau(p))
};

/// Certified via the 2D diagonal reach oracle; the lattice supplies the
/// distances. p, q given in chart coordinates (snapped to nodes).
EncodingVerdict encodes_causality(const Lattice& lat, const MetricField& g,
                                  const TemporalField& tau, const Vec& p, const Vec& q,
                                  const OdeOptions& opts = OdeOptions::defaults());

/// Advisory variant for charts outside the certified oracle class: the causal
/// verdict comes from the lattice reach set (an inner approximation, so
/// "causal" is reliable and "not causal" is advisory).
EncodingVerdict encodes_causality_advisory(const Lattice& lat, const TemporalField& tau,
                                           const Vec& p, const Vec& q);

/// Null length of an explicit piecewise causal polyline: sum of |delta tau|
/// over break points. Throws NumericError when a piece fails to be causal at
/// sampled interior points.
double path_null_length(const MetricField& g, const TemporalField& tau,
                        const std::vector<Vec>& polyline, int samples_per_piece = 9);

struct RefineRow {
    double spacing;
    int stencil;
    double value;
};

/// Distance table across spacings and stencil radii; verifies that values are
/// monotone non-increasing in the stencil radius at fixed spacing.
std::vector<RefineRow> refine_study(const MetricField& g, const TemporalField& tau,
                                    const LatticeParams& base, const Vec& p, const Vec& q,
                                    DistanceKind kind, const std::vector<double>& spacings,
                                    const std::vector<int>& stencils);

} // namespace lgeo
