#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxtail/corr_model.hpp"

// Entrywise-domination checks and numerical verification of Slepian-type
// comparisons: if R_ij <= R'_ij everywhere then P(M(X) <= t) <= P(M(X') <= t)
// for all t. Includes the (X, -X) block embedding that reduces small-ball
// probabilities to lower-tail ones.

namespace maxtail {

struct DominationReport {
    bool dominates = false;
    struct Violation {
        int i, j;
        double lhs, rhs;
    };
    std::vector<Violation> violating_pairs;  // ordered pairs i != j
    double max_violation = 0.0;
};

// Entrywise off-diagonal a <= b, tolerance 1e-12.
DominationReport dominates(const CorrelationModel& a,
                           const CorrelationModel& b);

enum class ComparisonVerdict { consistent, violation, inconclusive,
                               hypothesis_fails };

enum class ComparisonMode { automatic, force_monte_carlo };

struct ComparisonReport {
    ComparisonVerdict verdict = ComparisonVerdict::inconclusive;
    double p_a = 0.0;
    double p_b = 0.0;
    double slack = 0.0;  // 4x combined stderr + quadrature error bounds
    std::string method_a;  // "quadrature" or "monte-carlo"
    std::string method_b;
    DominationReport domination;
};

// Compares P(M(a) <= t) against P(M(b) <= t). Each side uses quadrature
// when its model is equicorrelated, Monte Carlo otherwise (or always,
// under force_monte_carlo). Requires dominates(a, b); otherwise the
// verdict is hypothesis_fails and no probability claim is made.
ComparisonReport check_comparison(const CorrelationModel& a,
                                  const CorrelationModel& b, double t,
                                  std::int64_t mc_samples, std::uint64_t seed,
                                  int threads = 1,
                                  ComparisonMode mode = ComparisonMode::automatic);

struct BlockEmbedding {
    CorrelationModel cor_y;        // [[R, -R], [-R, R]], dimension 2n
    CorrelationModel cor_y_prime;  // blockdiag(R', R'), R' equicorrelated
    DominationReport report;       // cor_y <= cor_y_prime entrywise
};

// Requires R_ij in [0, rho0] off the diagonal; violations raise an error
// naming the offending entry.
BlockEmbedding block_embedding(const CorrelationModel& model, double rho0);

const char* to_string(ComparisonVerdict verdict);

}  // namespace maxtail
