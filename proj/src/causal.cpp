#include "lgeo/causal.hpp"

#include <algorithm>
#include <cmath>

namespace lgeo {

namespace {

CausalChar classify(const Mat& gm, const Vec& comp, double time_sign, double eps_null) {
    CausalChar c;
    const double ref = comp.squaredNorm();
    if (ref == 0.0) {
        c.zero = true;
        c.kind = CausalKind::Spacelike;
        c.orientation = Orientation::None;
        return c;
    }
    const double q = comp.dot(gm * comp);
    if (std::abs(q) <= eps_null * ref)
        c.kind = CausalKind::Null;
    else if (q < 0.0)
        c.kind = CausalKind::Timelike;
    else
        c.kind = CausalKind::Spacelike;

    if (c.kind == CausalKind::Spacelike)
        c.orientation = Orientation::None;
    else
        c.orientation = (time_sign > 0.0) ? Orientation::Future : Orientation::Past;
    return c;
}

} // namespace

CausalChar causal_character(const MetricField& g, const TangentVector& v,
                            const std::function<Vec(const Vec&)>& T, double eps_null) {
    const Mat gm = g(v.base);
    const Vec t = T(v.base);
    if (!(t.dot(gm * t) < 0.0))
        throw TemporalError("causal_character: time-orientation field not timelike");
    // future iff v lies in the cone of T: g(v, T) < 0
    const double pairing = v.comp.dot(gm * t);
    return classify(gm, v.comp, -pairing, eps_null);
}

CausalChar causal_character_tau(const MetricField& g, const TangentVector& v, const Vec& dtau,
                                double eps_null) {
    return classify(g(v.base), v.comp, dtau.dot(v.comp), eps_null);
}

double ReachRegion2D::hi_at(double tq) const {
    auto it = std::lower_bound(t.begin(), t.end(), tq);
    if (it == t.begin()) return x_hi.front();
    if (it == t.end()) return x_hi.back();
    const size_t i = it - t.begin();
    const double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * x_hi[i - 1] + w * x_hi[i];
}

double ReachRegion2D::lo_at(double tq) const {
    auto it = std::lower_bound(t.begin(), t.end(), tq);
    if (it == t.begin()) return x_lo.front();
    if (it == t.end()) return x_lo.back();
    const size_t i = it - t.begin();
    const double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * x_lo[i - 1] + w * x_lo[i];
}

bool ReachRegion2D::contains(const Vec& q, double pad) const {
    if (q[0] < t.front() - 1e-15 || q[0] > t.back() + 1e-15) return false;
    return q[1] >= lo_at(q[0]) + pad && q[1] <= hi_at(q[0]) - pad;
}

ReachRegion2D reach_2d_diagonal(const MetricField& g, const Vec& p, double t_max,
                                const OdeOptions& opts) {
    if (g.dim() != 2) throw ConfigError("reach_2d_diagonal: 2D charts only");
    if (!(t_max > p[0])) throw ConfigError("reach_2d_diagonal: t_max must exceed p_t");

    auto f_at = [&g](double t, double x) {
        Vec q(2);
        q << t, x;
        const Mat gm = g(q);
        if (std::abs(gm(0, 0) + 1.0) > 1e-10 || std::abs(gm(0, 1)) > 1e-12)
            throw ConfigError("reach_2d_diagonal: metric not of the form -dt^2 + f^2 dx^2");
        const double f2 = gm(1, 1);
        if (!(f2 > 0.0)) throw NumericError("reach_2d_diagonal: f <= 0 encountered");
        return std::sqrt(f2);
    };

    ReachRegion2D region;
    region.origin = p;
    region.ode_tol = opts.tol;

    // a shared time grid: integrate the right boundary, record its times, then
    // the left boundary sampled onto the same grid
    std::vector<double> ts, xs_hi;
    {
        std::vector<double> state{p[1]};
        integrate_adaptive(
            [&](const std::vector<double>& x, std::vector<double>& dxdt, double t) {
                dxdt[0] = 1.0 / f_at(t, x[0]);
            },
            state, p[0], t_max, opts,
            [&](const std::vector<double>& x, double t) {
                ts.push_back(t);
                xs_hi.push_back(x[0]);
            });
    }
    std::vector<double> xs_lo(ts.size());
    {
        std::vector<double> state{p[1]};
        size_t cursor = 1;  // fill xs_lo on the ts grid while integrating
        xs_lo[0] = p[1];
        double prev_t = ts[0], prev_x = p[1];
        integrate_adaptive(
            [&](const std::vector<double>& x, std::vector<double>& dxdt, double t) {
                dxdt[0] = -1.0 / f_at(t, x[0]);
            },
            state, p[0], t_max, opts,
            [&](const std::vector<double>& x, double t) {
                while (cursor < ts.size() && ts[cursor] <= t + 1e-15) {
                    const double w =
                        (t > prev_t) ? (ts[cursor] - prev_t) / (t - prev_t) : 1.0;
                    xs_lo[cursor] = (1.0 - w) * prev_x + w * x[0];
                    ++cursor;
                }
                prev_t = t;
                prev_x = x[0];
            });
        for (; cursor < ts.size(); ++cursor) xs_lo[cursor] = prev_x;
    }

    region.t = std::move(ts);
    region.x_hi = std::move(xs_hi);
    region.x_lo = std::move(xs_lo);
    for (size_t i = 0; i < region.t.size(); ++i)
        if (region.x_lo[i] > region.x_hi[i] + 1e-12)
            throw NumericError("reach_2d_diagonal: crossed boundaries");
    return region;
}

} // namespace lgeo
