#include "lgeo/ode.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace lgeo {

namespace odeint = boost::numeric::odeint;

OdeOptions OdeOptions::defaults() {
    OdeOptions o;
    if (const char* env = std::getenv("WICKBENCH_ODE_STEP_FLOOR")) {
        const double floor = std::atof(env);
        if (floor > 0) o.min_step = floor;
    }
    return o;
}

void integrate_adaptive(const OdeRhs& rhs, std::vector<double>& state, double t0, double t1,
                        const OdeOptions& opts, const OdeObserver& observer) {
    using state_type = std::vector<double>;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<state_type>>(
        opts.tol, opts.tol);

    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    double dt = dir * std::min(opts.initial_step, std::abs(t1 - t0));
    if (observer) observer(state, t);

    long steps = 0;
    while (dir * (t1 - t) > 0.0) {
        if (++steps > opts.max_steps)
            throw BudgetError("integrate_adaptive: step budget exceeded");
        if (dir * dt > dir * (t1 - t)) dt = t1 - t;
        odeint::controlled_step_result res;
        int rejects = 0;
        do {
            res = stepper.try_step(rhs, state, t, dt);
            if (res == odeint::fail) {
                if (std::abs(dt) < opts.min_step)
                    throw NumericError("integrate_adaptive: step underflow");
                if (++rejects > 200)
                    throw NumericError("integrate_adaptive: controller stalled");
            }
        } while (res == odeint::fail);
        if (observer) observer(state, t);
    }
}

} // namespace lgeo
