#pragma once

#include <functional>

namespace maxtail {

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;  // sum of per-panel |K15 - G7|
    int evaluations = 0;
    bool converged = false;
};

// Adaptive Gauss-Kronrod 7/15 on [a, b]. Panels are bisected worst-first
// until the summed error estimate falls below abs_tol or the evaluation
// budget runs out. The initial mesh keeps panels at width <= 0.5 so a
// narrow feature cannot hide between nodes of a wide panel.
IntegrationResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b, double abs_tol,
                                     int max_evaluations = 600000);

}  // namespace maxtail
