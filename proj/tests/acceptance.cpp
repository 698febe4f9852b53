// Acceptance suite: runs each numbered criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.
//
//   acceptance [--cli PATH] [N ...]
//
// With no N arguments every criterion runs. The CLI path is only needed
// by criterion 8 (report determinism across worker threads).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "maxtail/bounds.hpp"
#include "maxtail/corr_model.hpp"
#include "maxtail/equicorr.hpp"
#include "maxtail/monte_carlo.hpp"
#include "maxtail/slepian.hpp"
#include "maxtail/special.hpp"
#include "oracle.hpp"

using namespace maxtail;

namespace {

std::string g_cli_path;
std::vector<std::string> g_notes;

void note(const std::string& line) { g_notes.push_back(line); }

// ---- frozen study constants -------------------------------------------
// Initial ceilings, tightened after the first quadrature oracle run
// (observed values recorded next to each constant).
//
// criterion 2: observed band ratios over the 9 parameter cells were
// 1.036..1.263 with C_hat increasing in n, so end ratios C(1e6)/C(1e2)
// were all >= 1.0356.
constexpr double kBandRatioCeiling = 10.0;   // initial
constexpr double kBandRatioFrozen = 1.5;     // frozen; observed max 1.2627
constexpr double kEndRatioFloor = 0.1;       // initial
constexpr double kEndRatioFrozen = 0.9;      // frozen; observed min 1.0356
// criterion 4: observed |ratio - 1| = 0.1945 at n = 1e6, decreasing
// monotonically from 0.3251 at n = 1e3.
constexpr double kExponentGapCeiling = 0.35; // initial
constexpr double kExponentGapFrozen = 0.25;  // frozen; observed 0.1945
// criterion 6: c0 = 4 confirmed by the oracle run (the slack
// c0 sqrt(loglog n) exceeds the observed median gap everywhere).
constexpr double kC0 = 4.0;

struct Criterion {
    int id;
    const char* label;
    std::function<bool()> run;
};

bool mc_consistent(double exact, const MonteCarloEstimate& est) {
    if (est.value == 0.0) {
        return exact <= est.ci_high;  // Clopper-Pearson envelope
    }
    return std::fabs(exact - est.value) <= 4.0 * est.std_error;
}

// 1. Oracle equivalence: quadrature vs Monte Carlo across the grid.
bool criterion_oracle_equivalence() {
    bool ok = true;
    std::uint64_t seed = 20260801;
    for (std::int64_t n : {2, 8, 64}) {
        for (double rho0 : {0.1, 0.5, 0.9}) {
            for (double delta0 : {0.3, 0.7}) {
                const double t = threshold(n, delta0, rho0);
                const CorrelationModel model =
                    CorrelationModel::equicorrelated(static_cast<int>(n), rho0);

                const QuadratureResult lower = lower_tail_exact(n, rho0, t);
                const MonteCarloEstimate lower_mc =
                    estimate_lower_tail(model, t, 1000000, seed++, 2);
                if (!lower.converged || !mc_consistent(lower.value, lower_mc)) {
                    note("  lower tail mismatch at n=" + std::to_string(n) +
                         " rho0=" + std::to_string(rho0) +
                         " delta0=" + std::to_string(delta0) + ": exact=" +
                         std::to_string(lower.value) + " mc=" +
                         std::to_string(lower_mc.value) + " se=" +
                         std::to_string(lower_mc.std_error));
                    ok = false;
                }

                const QuadratureResult ball = small_ball_exact(n, rho0, t);
                const MonteCarloEstimate ball_mc =
                    estimate_small_ball(model, t, 1000000, seed++, 2);
                if (!mc_consistent(ball.value, ball_mc)) {
                    note("  small ball mismatch at n=" + std::to_string(n) +
                         " rho0=" + std::to_string(rho0) +
                         " delta0=" + std::to_string(delta0) + ": exact=" +
                         std::to_string(ball.value) + " mc=" +
                         std::to_string(ball_mc.value));
                    ok = false;
                }
            }
        }
    }
    return ok;
}

// 2. Theorem sharpness: C_hat(n) = exact/rate stays in a fixed band.
bool criterion_sharpness_band() {
    const std::array<std::int64_t, 5> grid = {100, 1000, 10000, 100000,
                                              1000000};
    bool ok = true;
    for (double delta0 : {0.3, 0.5, 0.7}) {
        for (double rho0 : {0.3, 0.5, 0.7}) {
            const SharpnessStudy study = empirical_constant(grid, delta0, rho0);
            const double end_ratio =
                study.rows.back().c_hat / study.rows.front().c_hat;
            const bool cell_ok =
                study.excluded == 0 && study.c_min > 0.0 &&
                study.band_ratio <= kBandRatioCeiling &&
                study.band_ratio <= kBandRatioFrozen &&
                end_ratio >= kEndRatioFloor && end_ratio >= kEndRatioFrozen;
            note("  delta0=" + std::to_string(delta0) +
                 " rho0=" + std::to_string(rho0) +
                 " band=[" + std::to_string(study.c_min) + ", " +
                 std::to_string(study.c_max) +
                 "] ratio=" + std::to_string(study.band_ratio) +
                 " end_ratio=" + std::to_string(end_ratio) +
                 (cell_ok ? "" : "  <- FAIL"));
            ok = ok && cell_ok;
        }
    }
    return ok;
}

// 3. Bound validity: every applicable probability bound dominates the
// exact probability. Zero violations allowed.
bool criterion_bound_validity() {
    constexpr double kSlack = 1e-9;  // quadrature error allowance
    bool ok = true;
    for (std::int64_t n : {100, 1000, 10000}) {
        for (double rho0 : {0.3, 0.5, 0.7}) {
            const double med = median_exact(n, rho0);
            const double var = moments_exact(n, rho0).variance;
            const double med_abs = median_absmax_exact(n, rho0);
            const double sigma_n_sq =
                CorrelationModel::equicorrelated(static_cast<int>(n), rho0)
                    .residual_variances()
                    .sigma_n_sq;

            for (double delta0 : {0.3, 0.5, 0.7}) {
                const double t = threshold(n, delta0, rho0);

                // Borell-TIS at the study threshold
                const double s = med - t;
                if (s > 0.0) {
                    const BoundEvaluation b = borell_tis(med, s);
                    const double exact = lower_tail_exact(n, rho0, t).value;
                    if (exact > b.value + kSlack) {
                        note("  borell_tis violated at n=" + std::to_string(n));
                        ok = false;
                    }
                }

                // Paouris-Valettas fixed-ratio form
                const BoundEvaluation pv = pv_fixed_ratio(med, var, delta0);
                if (pv.applicable) {
                    const double exact =
                        lower_tail_exact(n, rho0, pv.threshold).value;
                    if (exact > pv.value + kSlack) {
                        note("  pv_fixed_ratio violated at n=" +
                             std::to_string(n) + " rho0=" + std::to_string(rho0) +
                             " delta0=" + std::to_string(delta0));
                        ok = false;
                    }
                }

                // Latala-Oleszkiewicz needs delta0 < 1/2
                const BoundEvaluation lo = latala_oleszkiewicz(med_abs, delta0);
                if (lo.applicable) {
                    const double exact =
                        small_ball_exact(n, rho0, lo.threshold).value;
                    if (exact > lo.value + kSlack) {
                        note("  latala_oleszkiewicz violated at n=" +
                             std::to_string(n));
                        ok = false;
                    }
                }
            }

            // Hartigan at its own threshold, eps chosen inside the range
            for (double eps : {0.3, 0.1, 0.01}) {
                if (!(eps < 1.0 / 2.718281828459045)) continue;
                const BoundEvaluation h = hartigan(n, eps, sigma_n_sq);
                if (!h.applicable) continue;
                if (h.threshold < -8.0) continue;  // below the tested range
                const double exact =
                    lower_tail_exact(n, rho0, h.threshold).value;
                if (exact > h.value + kSlack) {
                    note("  hartigan violated at n=" + std::to_string(n) +
                         " rho0=" + std::to_string(rho0) +
                         " eps=" + std::to_string(eps));
                    ok = false;
                }
            }
        }
    }
    return ok;
}

// 4. Exponent comparison: med^2/(var 2 log n) * rho0/(1-rho0) -> 1.
bool criterion_exponent_comparison() {
    const double rho0 = 0.5;
    std::vector<double> ratios;
    for (std::int64_t n : {1000, 10000, 100000, 1000000}) {
        const double med = median_exact(n, rho0);
        const double var = moments_exact(n, rho0).variance;
        const double ratio = med * med /
                             (var * 2.0 * std::log(static_cast<double>(n))) *
                             (rho0 / (1.0 - rho0));
        ratios.push_back(ratio);
        note("  n=" + std::to_string(n) + " ratio=" + std::to_string(ratio));
    }
    bool monotone = true;
    for (size_t i = 1; i < ratios.size(); ++i) {
        // moves monotonically toward 1
        if (std::fabs(1.0 - ratios[i]) > std::fabs(1.0 - ratios[i - 1])) {
            monotone = false;
        }
    }
    const double gap = std::fabs(ratios.back() - 1.0);
    if (!monotone) note("  ratio sequence is not monotone toward 1");
    if (gap > kExponentGapFrozen) {
        note("  final gap " + std::to_string(gap) + " exceeds " +
             std::to_string(kExponentGapFrozen));
    }
    return monotone && gap <= kExponentGapCeiling && gap <= kExponentGapFrozen;
}

// 5. Slepian consistency on 50 random capped 8x8 models.
bool criterion_slepian_consistency() {
    const double t = threshold(8, 0.5, 0.5);
    const CorrelationModel cap = CorrelationModel::equicorrelated(8, 0.5);
    bool ok = true;
    int violations = 0, inconclusive = 0;
    for (int rep = 0; rep < 50; ++rep) {
        std::mt19937_64 gen(5000 + rep);
        std::normal_distribution<double> normal(0.0, 1.0);
        const int n = 8;
        std::vector<double> b(64);
        for (double& v : b) v = normal(gen);
        std::vector<double> r(64, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double sum = 0.0;
                for (int k = 0; k < n; ++k) sum += b[i * 8 + k] * b[j * 8 + k];
                r[i * 8 + j] = sum;
            }
        }
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = std::sqrt(r[i * 8 + i]);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                r[i * 8 + j] /= d[i] * d[j];
                if (i != j) worst = std::max(worst, r[i * 8 + j]);
            }
            r[i * 8 + i] = 1.0;
        }
        if (worst > 0.5) {
            const double c = 0.5 / worst;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) r[i * 8 + j] *= c;
        }
        const CorrelationModel a = CorrelationModel::dense(8, std::move(r));
        const ComparisonReport report =
            check_comparison(a, cap, t, 1000000, 7000 + rep, 2);
        if (report.verdict == ComparisonVerdict::violation) {
            ++violations;
            note("  violation at rep " + std::to_string(rep) + ": p_a=" +
                 std::to_string(report.p_a) + " p_b=" +
                 std::to_string(report.p_b));
            ok = false;
        } else if (report.verdict != ComparisonVerdict::consistent) {
            ++inconclusive;
            note("  non-consistent verdict at rep " + std::to_string(rep));
            ok = false;  // every repetition must come back consistent
        }
    }
    note("  verdicts: " + std::to_string(50 - violations - inconclusive) +
         " consistent, " + std::to_string(inconclusive) + " inconclusive, " +
         std::to_string(violations) + " violations");
    return ok && violations == 0;
}

// 6. Reference-level sandwich for the exact median.
bool criterion_median_sandwich() {
    bool ok = true;
    for (std::int64_t n : {100, 1000, 10000, 100000, 1000000}) {
        for (double rho0 : {0.1, 0.5, 0.9}) {
            const double med = median_exact(n, rho0);
            const ReferenceLevel level = reference_level(n, rho0, kC0);
            if (!(med <= level.upper + 1e-9 && med >= level.lower)) {
                note("  sandwich broken at n=" + std::to_string(n) +
                     " rho0=" + std::to_string(rho0) + ": med=" +
                     std::to_string(med) + " in [" +
                     std::to_string(level.lower) + ", " +
                     std::to_string(level.upper) + "]?");
                ok = false;
            }
        }
    }
    return ok;
}

// 7. Special-function accuracy against the long-double oracle.
bool criterion_special_accuracy() {
    bool ok = true;
    for (double x = -37.0; x <= 8.0; x += 0.01) {
        const double ref = static_cast<double>(testoracle::log_normal_cdf(x));
        const double got = log_std_normal_cdf(x);
        if (std::fabs(got - ref) > 1e-12 * std::fabs(ref)) {
            note("  logPhi off at x=" + std::to_string(x));
            ok = false;
            break;
        }
    }
    for (double x = 1.001; x <= 12.0; x += 0.0097) {
        const double q = std_normal_upper_tail(x);
        if (!(mills_lower(x) <= q && q <= mills_upper(x))) {
            note("  Mills sandwich broken at x=" + std::to_string(x));
            ok = false;
            break;
        }
    }
    // Round trip in x at 1e-10 wherever the double representation of
    // cdf(x) retains that much information; near +6 the cdf rounds
    // against ulp(1) = 2^-53, erasing x to ~ulp/phi(x) (~7e-9 at x = 6)
    // for any implementation, so the quantization floor applies there.
    for (double x = -6.0; x <= 6.0; x += 0.011) {
        const double p = std_normal_cdf(x);
        const double floor =
            0.75 * (std::nextafter(p, 2.0) - p) / std_normal_pdf(x);
        if (std::fabs(std_normal_quantile(p) - x) > std::max(1e-10, floor)) {
            note("  quantile round trip off at x=" + std::to_string(x));
            ok = false;
            break;
        }
    }
    // and the probability-direction contract everywhere
    for (double p = 0.002; p < 1.0; p += 0.0017) {
        if (std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) > 1e-12) {
            note("  cdf(quantile(p)) off at p=" + std::to_string(p));
            ok = false;
            break;
        }
    }
    return ok;
}

std::string run_capture(const std::string& cmd, int* exit_code) {
    std::string output;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!pipe) {
        *exit_code = -1;
        return output;
    }
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, got);
    *exit_code = WEXITSTATUS(pclose(pipe));
    return output;
}

// Extracts the "payload" object (timestamp-free by construction) from a
// report; byte comparison between runs happens on this section.
std::string payload_section(const std::string& report) {
    const size_t begin = report.find("\"payload\"");
    const size_t end = report.find("\"schema\"");
    if (begin == std::string::npos || end == std::string::npos || end < begin) {
        return report;
    }
    return report.substr(begin, end - begin);
}

// 8. Determinism of Monte Carlo reports across worker thread counts.
bool criterion_determinism() {
    if (g_cli_path.empty()) {
        note("  no --cli path supplied");
        return false;
    }
    const std::string base =
        g_cli_path + " mc --n 16 --rho0 0.4 --t 1.1 --samples 1000000 --seed 99";
    bool ok = true;

    int code = 0;
    const std::string once = run_capture(base + " --threads 1", &code);
    ok = ok && code == 0;
    const std::string again = run_capture(base + " --threads 1", &code);
    ok = ok && code == 0;
    if (once != again) {
        note("  repeated identical invocations differ");
        ok = false;
    }
    const std::string two = run_capture(base + " --threads 2", &code);
    ok = ok && code == 0;
    const std::string eight = run_capture(base + " --threads 8", &code);
    ok = ok && code == 0;
    if (payload_section(once) != payload_section(two) ||
        payload_section(once) != payload_section(eight)) {
        note("  payload differs across 1/2/8 worker threads");
        ok = false;
    }

    // small-ball path exercises the per-coordinate sampler
    const std::string sb =
        g_cli_path +
        " mc --n 16 --rho0 0.4 --t 1.1 --samples 400000 --seed 5 --small-ball";
    const std::string sb1 = run_capture(sb + " --threads 1", &code);
    ok = ok && code == 0;
    const std::string sb8 = run_capture(sb + " --threads 8", &code);
    ok = ok && code == 0;
    if (payload_section(sb1) != payload_section(sb8)) {
        note("  small-ball payload differs across worker threads");
        ok = false;
    }

    // statistics path exercises the stored-sample merge
    const std::string st =
        g_cli_path + " mc --n 16 --rho0 0.4 --stats --samples 300000 --seed 8";
    const std::string st1 = run_capture(st + " --threads 1", &code);
    ok = ok && code == 0;
    const std::string st8 = run_capture(st + " --threads 8", &code);
    ok = ok && code == 0;
    if (payload_section(st1) != payload_section(st8)) {
        note("  statistics payload differs across worker threads");
        ok = false;
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--cli") == 0 && i + 1 < argc) {
            g_cli_path = argv[++i];
        } else {
            selected.push_back(std::atoi(argv[i]));
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "oracle equivalence (quadrature vs Monte Carlo)",
         criterion_oracle_equivalence},
        {2, "sharpness band stability of C_hat(n)", criterion_sharpness_band},
        {3, "bound validity (zero violations)", criterion_bound_validity},
        {4, "exponent comparison med^2/var vs 2 log n", criterion_exponent_comparison},
        {5, "Slepian consistency on random capped models",
         criterion_slepian_consistency},
        {6, "median reference-level sandwich", criterion_median_sandwich},
        {7, "special-function accuracy", criterion_special_accuracy},
        {8, "Monte Carlo report determinism", criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.id) ==
                selected.end()) {
            continue;
        }
        g_notes.clear();
        const bool passed = criterion.run();
        std::printf("%s  criterion-%d: %s\n", passed ? "PASS" : "FAIL",
                    criterion.id, criterion.label);
        if (!passed) {
            for (const std::string& line : g_notes) {
                std::printf("%s\n", line.c_str());
            }
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
