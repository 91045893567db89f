#pragma once

#include "lgeo/core.hpp"

#include <cstdlib>

namespace lgeo {

/// Controls for the adaptive embedded Runge-Kutta driver.
struct OdeOptions {
    double tol = 1e-9;          // per-step absolute and relative tolerance
    double initial_step = 1e-3;
    double min_step = 1e-14;    // step floor; underflow raises NumericError
    long max_steps = 2'000'000;

    static OdeOptions defaults();
};

using OdeRhs = std::function<void(const std::vector<double>&, std::vector<double>&, double)>;
using OdeObserver = std::function<void(const std::vector<double>&, double)>;

/// Integrate y' = f(y, t) from t0 to t1 with a controlled Dormand-Prince 5(4)
/// stepper. The observer sees every accepted step including both endpoints.
void integrate_adaptive(const OdeRhs& rhs, std::vector<double>& state, double t0, double t1,
                        const OdeOptions& opts, const OdeObserver& observer = nullptr);

} // namespace lgeo
