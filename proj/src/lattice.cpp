#include "lgeo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <thread>

namespace lgeo {

std::string to_string(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::Null: return "null";
        case DistanceKind::Wick: return "wick";
        case DistanceKind::NullWick: return "nullwick";
    }
    return "?";
}

std::size_t LatticeParams::node_budget_from_env(std::size_t fallback) {
    if (const char* env = std::getenv("WICKBENCH_MAX_LATTICE_NODES")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return fallback;
}

namespace {

int gcd_abs(int a, int b) { return std::gcd(std::abs(a), std::abs(b)); }

// coprime offsets of max-norm <= R, one representative per +- pair
// (first nonzero component positive)
std::vector<std::vector<int>> half_offsets(int dim, int R) {
    std::vector<std::vector<int>> out;
    std::vector<int> o(dim, -R);
    while (true) {
        bool zero = true;
        int g = 0;
        for (int c : o) {
            if (c != 0) zero = false;
            g = g == 0 ? std::abs(c) : gcd_abs(g, c);
        }
        if (!zero && g == 1) {
            int first = 0;
            for (int c : o)
                if (c != 0) {
                    first = c;
                    break;
                }
            if (first > 0) out.push_back(o);
        }
        int axis = dim - 1;
        while (axis >= 0 && o[axis] == R) o[axis--] = -R;
        if (axis < 0) break;
        ++o[axis];
    }
    return out;
}

} // namespace

Lattice Lattice::build(const MetricField& g, const TemporalField& tau, LatticeParams params) {
    Lattice lat;
    lat.dim_ = g.dim();
    const int n = lat.dim_;
    if (params.box.dim() != n) throw ConfigError("build_lattice: box dimension mismatch");
    if (params.spacing.size() == 1 && n > 1) {
        const double s = params.spacing[0];
        params.spacing = Vec::Constant(n, s);
    }
    if (params.spacing.size() != n) throw ConfigError("build_lattice: spacing dimension mismatch");
    for (int i = 0; i < n; ++i)
        if (!(params.spacing[i] > 0)) throw ConfigError("build_lattice: spacing must be positive");
    if (params.stencil_radius < 1) throw ConfigError("build_lattice: stencil radius must be >= 1");
    if (params.periodic.empty()) params.periodic.assign(n, false);
    params.max_nodes = LatticeParams::node_budget_from_env(params.max_nodes);

    lat.counts_.resize(n);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) {
        const double span = params.box.upper[i] - params.box.lower[i];
        if (!std::isfinite(span) || span <= 0) throw ConfigError("build_lattice: empty box");
        if (params.periodic[i]) {
            lat.counts_[i] = static_cast<int>(std::llround(span / params.spacing[i]));
            if (lat.counts_[i] < 2 * params.stencil_radius + 1)
                throw ConfigError("build_lattice: periodic axis too coarse for the stencil");
        } else {
            lat.counts_[i] = static_cast<int>(std::floor(span / params.spacing[i] + 1e-9)) + 1;
        }
        if (lat.counts_[i] < 2) throw ConfigError("build_lattice: empty box after discretization");
        total *= static_cast<std::size_t>(lat.counts_[i]);
        if (total > params.max_nodes)
            throw BudgetError("build_lattice: node count exceeds budget");
    }
    lat.nodes_ = total;
    lat.origin_ = params.box.lower;
    lat.params_ = params;
    lat.g_ = g;
    lat.gw_ = wick_field(g, tau);
    lat.tau_ = tau;

    lat.tau_values_.resize(total);
    for (std::size_t id = 0; id < total; ++id) lat.tau_values_[id] = tau(lat.coords(id));

    const auto offsets = half_offsets(n, params.stencil_radius);
    lat.adjacency_.assign(total, {});

    auto wrap_neighbor = [&](std::size_t id, const std::vector<int>& off, bool& ok) {
        std::size_t rem = id;
        std::size_t nbr = 0;
        std::size_t stride = 1;
        ok = true;
        for (int i = 0; i < n; ++i) {
            const int ci = static_cast<int>(rem % lat.counts_[i]);
            rem /= lat.counts_[i];
            int t = ci + off[i];
            if (params.periodic[i]) {
                t %= lat.counts_[i];
                if (t < 0) t += lat.counts_[i];
            } else if (t < 0 || t >= lat.counts_[i]) {
                ok = false;
                return std::size_t{0};
            }
            nbr += stride * static_cast<std::size_t>(t);
            stride *= static_cast<std::size_t>(lat.counts_[i]);
        }
        return nbr;
    };

    // classify and weight the edges of one node (pure; runs concurrently)
    auto build_node_edges = [&](std::size_t a, std::vector<Edge>& out) {
        const Vec pa = lat.coords(static_cast<int>(a));
        for (const auto& off : offsets) {
            bool ok = false;
            const std::size_t b = wrap_neighbor(a, off, ok);
            if (!ok || b == a) continue;

            Vec chord(n);
            for (int i = 0; i < n; ++i) chord[i] = off[i] * params.spacing[i];
            const Vec mid = pa + 0.5 * chord;

            Edge e;
            e.a = static_cast<int>(a);
            e.b = static_cast<int>(b);

            const Mat gm = g(mid);
            const double q_mid = inner(gm, chord, chord);
            const Mat wm = lat.gw_(mid);
            const double w_mid = inner(wm, chord, chord);

            auto classify_at = [&](const Vec& pt) {
                const Mat gg = g(pt);
                const double q = inner(gg, chord, chord);
                const double ref = inner(lat.gw_(pt), chord, chord);
                if (std::abs(q) <= params.eps_null * ref) return CausalKind::Null;
                return q < 0 ? CausalKind::Timelike : CausalKind::Spacelike;
            };

            CausalKind cls = (std::abs(q_mid) <= params.eps_null * w_mid)
                                 ? CausalKind::Null
                                 : (q_mid < 0 ? CausalKind::Timelike : CausalKind::Spacelike);
            if (params.strict_edges && cls != CausalKind::Spacelike) {
                const CausalKind ca = classify_at(pa);
                const CausalKind cb = classify_at(pa + chord);
                if (ca == CausalKind::Spacelike || cb == CausalKind::Spacelike)
                    cls = CausalKind::Spacelike;
            }
            e.cls = cls;

            const double dtau = lat.tau_values_[b] - lat.tau_values_[a];
            e.null_w = std::abs(dtau);
            e.future_ab = dtau > 0;

            if (params.simpson) {
                const double w_a = inner(lat.gw_(pa), chord, chord);
                const double w_b = inner(lat.gw_(pa + chord), chord, chord);
                e.wick_w = (std::sqrt(std::max(0.0, w_a)) + 4.0 * std::sqrt(std::max(0.0, w_mid)) +
                            std::sqrt(std::max(0.0, w_b))) /
                           6.0;
            } else {
                e.wick_w = std::sqrt(std::max(0.0, w_mid));
            }

            e.eligible = std::abs(q_mid) <= params.eps_cone * w_mid;
            const bool has_margin = q_mid <= -params.eps_cone * w_mid;
            e.margin_ab = has_margin && dtau > 0;
            e.margin_ba = has_margin && dtau < 0;

            out.push_back(e);
        }
    };

    // evaluations are pure, so the per-node work parallelizes; chunks merge in
    // node order to keep edge indices (and everything downstream) deterministic
    const unsigned hw = std::thread::hardware_concurrency();
    const unsigned workers =
        (total > 20000) ? std::min(8u, std::max(1u, hw)) : 1u;
    if (workers <= 1) {
        for (std::size_t a = 0; a < total; ++a) build_node_edges(a, lat.edge_list_);
    } else {
        std::vector<std::vector<Edge>> chunks(workers);
        std::vector<std::thread> pool;
        const std::size_t per = (total + workers - 1) / workers;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                try {
                    const std::size_t lo = w * per;
                    const std::size_t hi = std::min(total, lo + per);
                    for (std::size_t a = lo; a < hi; ++a) build_node_edges(a, chunks[w]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
        for (const auto& chunk : chunks)
            lat.edge_list_.insert(lat.edge_list_.end(), chunk.begin(), chunk.end());
    }

    for (std::size_t i = 0; i < lat.edge_list_.size(); ++i) {
        lat.adjacency_[lat.edge_list_[i].a].push_back(static_cast<int>(i));
        lat.adjacency_[lat.edge_list_[i].b].push_back(static_cast<int>(i));
    }
    return lat;
}

Vec Lattice::coords(int node) const {
    Vec p(dim_);
    std::size_t rem = static_cast<std::size_t>(node);
    for (int i = 0; i < dim_; ++i) {
        p[i] = origin_[i] + params_.spacing[i] * static_cast<double>(rem % counts_[i]);
        rem /= counts_[i];
    }
    return p;
}

int Lattice::node_near(const Vec& p) const {
    if (p.size() != dim_) throw DomainError("node_near: dimension mismatch");
    std::size_t id = 0;
    std::size_t stride = 1;
    for (int i = 0; i < dim_; ++i) {
        double q = (p[i] - origin_[i]) / params_.spacing[i];
        long k = std::lround(q);
        if (params_.periodic[i]) {
            k %= counts_[i];
            if (k < 0) k += counts_[i];
        } else if (k < 0 || k >= counts_[i]) {
            throw DomainError("node_near: point outside lattice box");
        }
        id += stride * static_cast<std::size_t>(k);
        stride *= static_cast<std::size_t>(counts_[i]);
    }
    return static_cast<int>(id);
}

double Lattice::apex_weight(const Edge& e) const {
    // Split a causal chord into two exactly null pieces through an apex m and
    // report the summed g_W lengths (midpoint rule per piece). The apex is
    // found with a damped Newton iteration on
    //   F(m) = ( g((a+m)/2)(m-a, m-a),  g((m+b)/2)(b-m, b-m) ).
    const Vec a = coords(e.a);
    Vec b = coords(e.b);
    // unwrap periodic coordinates so the chord is geometrically contiguous
    for (int i = 0; i < dim_; ++i)
        if (params_.periodic[i]) {
            const double period = counts_[i] * params_.spacing[i];
            while (b[i] - a[i] > 0.5 * period) b[i] -= period;
            while (a[i] - b[i] > 0.5 * period) b[i] += period;
        }

    const Vec mid = 0.5 * (a + b);
    const Mat gm = g_(mid);

    // null directions at the chord midpoint (2D): v = (alpha, w) per spatial sign
    auto null_dirs = [&]() {
        std::vector<Vec> dirs;
        for (const double w : {1.0, -1.0}) {
            const double gtt = gm(0, 0), gtx = gm(0, 1) * w, gxx = gm(1, 1);
            const double disc = gtx * gtx - gtt * gxx;
            if (disc < 0) continue;
            for (const double sgn : {1.0, -1.0}) {
                Vec v(2);
                v << (-gtx + sgn * std::sqrt(disc)) / gtt, w;
                dirs.push_back(v);
            }
        }
        return dirs;
    };

    auto piece_len = [&](const Vec& from, const Vec& to) {
        const Vec c = to - from;
        return std::sqrt(std::max(0.0, inner(gw_(0.5 * (from + to)), c, c)));
    };

    auto F = [&](const Vec& m, Vec& out) {
        const Vec c1 = m - a, c2 = b - m;
        out[0] = inner(g_(0.5 * (a + m)), c1, c1);
        out[1] = inner(g_(0.5 * (m + b)), c2, c2);
    };

    const double scale = inner(gw_(mid), b - a, b - a);
    double best = std::numeric_limits<double>::quiet_NaN();

    const auto dirs = null_dirs();
    for (size_t i = 0; i < dirs.size(); ++i)
        for (size_t j = 0; j < dirs.size(); ++j) {
            if (i == j) continue;
            // initial guess: intersect a + s dirs[i] with b - u dirs[j]
            Mat A(2, 2);
            A.col(0) = dirs[i];
            A.col(1) = dirs[j];
            Eigen::FullPivLU<Mat> lu(A);
            if (!lu.isInvertible()) continue;
            const Vec su = lu.solve(b - a);
            if (!(su[0] > 0 && su[1] > 0)) continue;  // apex must lie between
            Vec m = a + su[0] * dirs[i];

            Vec f(2);
            bool converged = false;
            for (int it = 0; it < 30; ++it) {
                F(m, f);
                if (std::abs(f[0]) + std::abs(f[1]) <= 1e-12 * std::max(scale, 1e-30)) {
                    converged = true;
                    break;
                }
                // finite-difference Jacobian
                Mat J(2, 2);
                const double h = 1e-7 * std::max(1.0, m.cwiseAbs().maxCoeff());
                for (int c = 0; c < 2; ++c) {
                    Vec mp = m, mm = m;
                    mp[c] += h;
                    mm[c] -= h;
                    Vec fp(2), fm(2);
                    F(mp, fp);
                    F(mm, fm);
                    J.col(c) = (fp - fm) / (2 * h);
                }
                Eigen::FullPivLU<Mat> jl(J);
                if (!jl.isInvertible()) break;
                const Vec step = jl.solve(f);
                m -= step;
                if (step.cwiseAbs().maxCoeff() < 1e-15) {
                    F(m, f);
                    converged =
                        std::abs(f[0]) + std::abs(f[1]) <= 1e-10 * std::max(scale, 1e-30);
                    break;
                }
            }
            if (!converged) continue;
            const double w = piece_len(a, m) + piece_len(m, b);
            if (std::isnan(best) || w < best) best = w;
        }
    return best;
}

void Lattice::ensure_nullwick_weights() const {
    std::call_once(nullwick_->once, [this]() {
        auto& w = nullwick_->w;
        w.assign(edge_list_.size(), std::numeric_limits<double>::quiet_NaN());
        auto fill = [this, &w](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const Edge& e = edge_list_[i];
                if (e.eligible) {
                    w[i] = e.wick_w;
                } else if (e.cls != CausalKind::Spacelike && dim_ == 2) {
                    w[i] = apex_weight(e);
                }
            }
        };
        const unsigned hw = std::thread::hardware_concurrency();
        const unsigned workers =
            (edge_list_.size() > 50000) ? std::min(8u, std::max(1u, hw)) : 1u;
        if (workers <= 1) {
            fill(0, edge_list_.size());
            return;
        }
        std::vector<std::thread> pool;
        const std::size_t per = (edge_list_.size() + workers - 1) / workers;
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&fill, t, per, this]() {
                fill(t * per, std::min(edge_list_.size(), (t + 1) * per));
            });
        for (auto& t : pool) t.join();
    });
}

DistanceResult Lattice::dijkstra(int src, int dst, DistanceKind kind) const {
    if (kind == DistanceKind::NullWick) ensure_nullwick_weights();

    auto edge_usable = [&](const Edge& e, double& w) {
        switch (kind) {
            case DistanceKind::Null:
                if (e.cls == CausalKind::Spacelike) return false;
                w = e.null_w;
                return true;
            case DistanceKind::Wick:
                w = e.wick_w;
                return true;
            case DistanceKind::NullWick: {
                const double nw = nullwick_->w[&e - edge_list_.data()];
                if (std::isnan(nw)) return false;
                w = nw;
                return true;
            }
        }
        return false;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(nodes_, inf);
    std::vector<int> hops(nodes_, 0);
    std::vector<int> parent(nodes_, -1);
    using Entry = std::tuple<double, int, int>;  // (dist, hops, node): deterministic order
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.emplace(0.0, 0, src);

    while (!pq.empty()) {
        auto [d, h, u] = pq.top();
        pq.pop();
        if (d > dist[u] || (d == dist[u] && h > hops[u])) continue;
        if (u == dst) break;
        for (const int ei : adjacency_[u]) {
            const Edge& e = edge_list_[ei];
            double w = 0.0;
            if (!edge_usable(e, w)) continue;
            const int v = (e.a == u) ? e.b : e.a;
            const double nd = d + w;
            const int nh = h + 1;
            if (nd < dist[v] || (nd == dist[v] && nh < hops[v])) {
                dist[v] = nd;
                hops[v] = nh;
                parent[v] = u;
                pq.emplace(nd, nh, v);
            }
        }
    }

    if (dist[dst] == inf) {
        if (kind == DistanceKind::NullWick)
            throw UnreachableError("null_wick_distance: piecewise-null graph disconnected at "
                                   "this resolution; a larger stencil radius may help");
        throw UnreachableError(to_string(kind) +
                               "_distance: endpoints not connected at this resolution "
                               "(box too small or lattice too coarse)");
    }

    DistanceResult res;
    res.value = dist[dst];
    res.kind = kind;
    res.spacing = params_.spacing;
    res.stencil = params_.stencil_radius;
    res.tau_p = tau_values_[src];
    res.tau_q = tau_values_[dst];
    for (int v = dst; v != -1; v = parent[v]) res.path.push_back(v);
    std::reverse(res.path.begin(), res.path.end());
    res.path_len_nodes = static_cast<int>(res.path.size());
    return res;
}

namespace {

// the graph metric is symmetric; canonicalizing the query direction makes the
// returned value bit-identical under endpoint swap
DistanceResult oriented(DistanceResult res, bool swapped) {
    if (swapped) {
        std::reverse(res.path.begin(), res.path.end());
        std::swap(res.tau_p, res.tau_q);
    }
    return res;
}

} // namespace

DistanceResult Lattice::null_distance(int a, int b) const {
    return oriented(dijkstra(std::min(a, b), std::max(a, b), DistanceKind::Null), a > b);
}

DistanceResult Lattice::wick_distance(int a, int b) const {
    return oriented(dijkstra(std::min(a, b), std::max(a, b), DistanceKind::Wick), a > b);
}

DistanceResult Lattice::null_wick_distance(int a, int b) const {
    return oriented(dijkstra(std::min(a, b), std::max(a, b), DistanceKind::NullWick), a > b);
}

std::vector<int> Lattice::reach(int a) const {
    std::vector<char> seen(nodes_, 0);
    std::vector<int> stack{a};
    seen[a] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const int ei : adjacency_[u]) {
            const Edge& e = edge_list_[ei];
            const int v = (e.a == u) ? e.b : e.a;
            const bool forward = (e.a == u) ? e.margin_ab : e.margin_ba;
            if (forward && !seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes_; ++i)
        if (seen[i]) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<Lattice::EdgeView> Lattice::edges() const {
    std::vector<EdgeView> out;
    out.reserve(edge_list_.size());
    for (const Edge& e : edge_list_)
        out.push_back({e.a, e.b, e.cls, e.null_w, e.wick_w, e.eligible});
    return out;
}

// ---------------------------------------------------------------------------

EncodingVerdict encodes_causality(const Lattice& lat, const MetricField& g,
                                  const TemporalField& tau, const Vec& p, const Vec& q,
                                  const OdeOptions& opts) {
    EncodingVerdict v;
    const int a = lat.node_near(p);
    const int b = lat.node_near(q);
    const Vec pa = lat.coords(a);
    const Vec qb = lat.coords(b);

    if (qb[0] > pa[0]) {
        const auto region = reach_2d_diagonal(g, pa, qb[0] + 1e-9, opts);
        v.causal = region.contains(qb, 10.0 * opts.tol);
    } else if (qb[0] == pa[0]) {
        v.causal = (qb - pa).norm() == 0.0;
    } else {
        const auto region = reach_2d_diagonal(g, qb, pa[0] + 1e-9, opts);
        v.causal = region.contains(pa, 10.0 * opts.tol);
    }

    v.delta_tau = tau(qb) - tau(pa);
    v.dhat = (a == b) ? 0.0 : lat.null_distance(a, b).value;
    v.dhat_residual = std::abs(v.dhat - std::abs(v.delta_tau));
    v.d_wick = (a == b) ? 0.0 : lat.wick_distance(a, b).value;
    v.sqrt2_delta_tau = std::sqrt(2.0) * v.delta_tau;
    v.wick_below_sqrt2 = v.d_wick < v.sqrt2_delta_tau;
    return v;
}

EncodingVerdict encodes_causality_advisory(const Lattice& lat, const TemporalField& tau,
                                           const Vec& p, const Vec& q) {
    EncodingVerdict v;
    const int a = lat.node_near(p);
    const int b = lat.node_near(q);
    const int lo = lat.tau_at(a) <= lat.tau_at(b) ? a : b;
    const int hi = lo == a ? b : a;
    const auto reach = lat.reach(lo);
    v.causal = std::find(reach.begin(), reach.end(), hi) != reach.end();
    v.delta_tau = tau(lat.coords(b)) - tau(lat.coords(a));
    v.dhat = (a == b) ? 0.0 : lat.null_distance(a, b).value;
    v.dhat_residual = std::abs(v.dhat - std::abs(v.delta_tau));
    v.d_wick = (a == b) ? 0.0 : lat.wick_distance(a, b).value;
    v.sqrt2_delta_tau = std::sqrt(2.0) * v.delta_tau;
    v.wick_below_sqrt2 = v.d_wick < v.sqrt2_delta_tau;
    return v;
}

double path_null_length(const MetricField& g, const TemporalField& tau,
                        const std::vector<Vec>& polyline, int samples_per_piece) {
    if (polyline.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        const Vec& a = polyline[i];
        const Vec& b = polyline[i + 1];
        const Vec chord = b - a;
        for (int s = 0; s <= samples_per_piece; ++s) {
            const Vec pt = a + chord * (static_cast<double>(s) / samples_per_piece);
            const auto cls = causal_character_tau(g, TangentVector{pt, chord},
                                                  tau.differential(pt));
            if (!cls.causal())
                throw NumericError("path_null_length: piece " + std::to_string(i) +
                                   " not causal at a sampled point");
        }
        total += std::abs(tau(b) - tau(a));
    }
    return total;
}

std::vector<RefineRow> refine_study(const MetricField& g, const TemporalField& tau,
                                    const LatticeParams& base, const Vec& p, const Vec& q,
                                    DistanceKind kind, const std::vector<double>& spacings,
                                    const std::vector<int>& stencils) {
    std::vector<RefineRow> rows;
    for (const double s : spacings) {
        double prev = std::numeric_limits<double>::infinity();
        for (const int R : stencils) {
            LatticeParams params = base;
            params.spacing = Vec::Constant(g.dim(), s);
            params.stencil_radius = R;
            const Lattice lat = Lattice::build(g, tau, params);
            const int a = lat.node_near(p);
            const int b = lat.node_near(q);
            double value = 0.0;
            switch (kind) {
                case DistanceKind::Null: value = lat.null_distance(a, b).value; break;
                case DistanceKind::Wick: value = lat.wick_distance(a, b).value; break;
                case DistanceKind::NullWick: value = lat.null_wick_distance(a, b).value; break;
            }
            if (value > prev + 1e-12)
                throw NumericError("refine_study: distance increased when the stencil grew");
            prev = value;
            rows.push_back({s, R, value});
        }
    }
    return rows;
}

} // namespace lgeo
