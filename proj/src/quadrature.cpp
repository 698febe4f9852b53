#include "maxtail/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace maxtail {

namespace {

// Gauss-Kronrod 7-15 nodes and weights (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a,
                     double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    const double fc = f(center);
    fv[7] = fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }

    double result_gauss = kWg[3] * fc;
    // Gauss-7 nodes sit at the even Kronrod indices 1, 3, 5
    for (int j = 0; j < 3; ++j) {
        const int k = 2 * j + 1;
        result_gauss += kWg[j] * (fv[k] + fv[14 - k]);
    }

    double result_kronrod = kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        result_kronrod += kWgk[j] * (fv[j] + fv[14 - j]);
    }

    Panel p;
    p.a = a;
    p.b = b;
    p.value = result_kronrod * half;
    p.error = std::fabs((result_kronrod - result_gauss) * half);
    return p;
}

}  // namespace

IntegrationResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b, double abs_tol,
                                     int max_evaluations) {
    if (!(b > a)) {
        throw std::domain_error("integrate_adaptive: requires b > a");
    }
    IntegrationResult res;

    const int initial =
        std::max(4, std::min(4096, static_cast<int>(std::ceil((b - a) / 0.5))));
    std::priority_queue<Panel> heap;
    double total_value = 0.0;
    double total_error = 0.0;
    for (int i = 0; i < initial; ++i) {
        const double pa = a + (b - a) * static_cast<double>(i) / initial;
        const double pb = a + (b - a) * static_cast<double>(i + 1) / initial;
        Panel p = evaluate_panel(f, pa, pb);
        res.evaluations += 15;
        total_value += p.value;
        total_error += p.error;
        heap.push(p);
    }

    const double width_floor =
        1e-14 * (std::fabs(a) + std::fabs(b) + 1.0);
    while (total_error > abs_tol && res.evaluations + 30 <= max_evaluations) {
        Panel worst = heap.top();
        if (worst.b - worst.a <= width_floor) break;  // roundoff floor
        heap.pop();
        total_value -= worst.value;
        total_error -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = evaluate_panel(f, worst.a, mid);
        Panel right = evaluate_panel(f, mid, worst.b);
        res.evaluations += 30;
        total_value += left.value + right.value;
        total_error += left.error + right.error;
        heap.push(left);
        heap.push(right);
    }

    res.value = total_value;
    res.error_estimate = total_error;
    res.converged = total_error <= abs_tol;
    return res;
}

}  // namespace maxtail
