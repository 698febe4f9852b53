#include "maxtail/slepian.hpp"

#include <cmath>
#include <stdexcept>

#include "maxtail/equicorr.hpp"
#include "maxtail/monte_carlo.hpp"

namespace maxtail {

DominationReport dominates(const CorrelationModel& a,
                           const CorrelationModel& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("dominates: dimension mismatch");
    }
    const double tol = 1e-12;
    DominationReport report;
    for (int i = 0; i < a.dim(); ++i) {
        for (int j = 0; j < a.dim(); ++j) {
            if (i == j) continue;
            const double lhs = a.entry(i, j);
            const double rhs = b.entry(i, j);
            if (lhs > rhs + tol) {
                report.violating_pairs.push_back({i, j, lhs, rhs});
                report.max_violation =
                    std::max(report.max_violation, lhs - rhs);
            }
        }
    }
    report.dominates = report.violating_pairs.empty();
    return report;
}

ComparisonReport check_comparison(const CorrelationModel& a,
                                  const CorrelationModel& b, double t,
                                  std::int64_t mc_samples, std::uint64_t seed,
                                  int threads, ComparisonMode mode) {
    ComparisonReport report;
    report.domination = dominates(a, b);
    if (!report.domination.dominates) {
        report.verdict = ComparisonVerdict::hypothesis_fails;
        return report;
    }

    double se_sq = 0.0;
    double quad_err = 0.0;
    bool quad_failed = false;
    int zero_information = 0;

    auto evaluate = [&](const CorrelationModel& model, std::uint64_t leg_seed,
                        std::string& method) {
        if (model.is_equicorrelated() && mode == ComparisonMode::automatic) {
            method = "quadrature";
            const QuadratureResult qr =
                lower_tail_exact(model.dim(), model.rho(), t);
            quad_err += qr.abs_error_bound;
            if (!qr.converged) quad_failed = true;
            return qr.value;
        }
        method = "monte-carlo";
        const MonteCarloEstimate est =
            estimate_lower_tail(model, t, mc_samples, leg_seed, threads);
        se_sq += est.std_error * est.std_error;
        if (est.value == 0.0 || est.value == 1.0) ++zero_information;
        return est.value;
    };

    report.p_a = evaluate(a, seed, report.method_a);
    report.p_b = evaluate(b, seed ^ 0x5DEECE66DULL, report.method_b);
    report.slack = 4.0 * std::sqrt(se_sq) + quad_err;

    if (quad_failed || zero_information == 2) {
        report.verdict = ComparisonVerdict::inconclusive;
    } else if (report.p_a <= report.p_b + report.slack) {
        report.verdict = ComparisonVerdict::consistent;
    } else {
        report.verdict = ComparisonVerdict::violation;
    }
    return report;
}

BlockEmbedding block_embedding(const CorrelationModel& model, double rho0) {
    if (!(rho0 > 0.0 && rho0 < 1.0)) {
        throw std::domain_error("block_embedding: rho0 must lie in (0, 1)");
    }
    const int n = model.dim();
    const double tol = 1e-12;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double e = model.entry(i, j);
            if (e < -tol || e > rho0 + tol) {
                throw std::invalid_argument(
                    "block_embedding: entry R[" + std::to_string(i) + "][" +
                    std::to_string(j) + "] = " + std::to_string(e) +
                    " outside [0, rho0]");
            }
        }
    }

    const int m = 2 * n;
    std::vector<double> y(static_cast<size_t>(m) * m, 0.0);
    std::vector<double> yp(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double r = model.entry(i, j);
            y[static_cast<size_t>(i) * m + j] = r;
            y[static_cast<size_t>(n + i) * m + (n + j)] = r;
            y[static_cast<size_t>(i) * m + (n + j)] = -r;
            y[static_cast<size_t>(n + i) * m + j] = -r;
            const double rp = (i == j) ? 1.0 : rho0;
            yp[static_cast<size_t>(i) * m + j] = rp;
            yp[static_cast<size_t>(n + i) * m + (n + j)] = rp;
        }
    }

    BlockEmbedding embedding{CorrelationModel::dense(m, std::move(y)),
                             CorrelationModel::dense(m, std::move(yp)),
                             {}};
    embedding.report = dominates(embedding.cor_y, embedding.cor_y_prime);
    return embedding;
}

const char* to_string(ComparisonVerdict verdict) {
    switch (verdict) {
        case ComparisonVerdict::consistent: return "consistent";
        case ComparisonVerdict::violation: return "violation";
        case ComparisonVerdict::inconclusive: return "inconclusive";
        case ComparisonVerdict::hypothesis_fails: return "hypothesis_fails";
    }
    return "unknown";
}

}  // namespace maxtail
