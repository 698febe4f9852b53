#pragma once

#include <json.hpp>

#include "maxtail/bounds.hpp"
#include "maxtail/equicorr.hpp"
#include "maxtail/monte_carlo.hpp"
#include "maxtail/slepian.hpp"

// JSON views of the report types. nlohmann::json orders keys
// alphabetically, so serialized payloads are byte-stable.

namespace maxtail {

inline void to_json(nlohmann::json& j, const QuadratureResult& r) {
    j = nlohmann::json{{"value", r.value},
                       {"abs_error_bound", r.abs_error_bound},
                       {"truncation_bound", r.truncation_bound},
                       {"evaluations", r.evaluations},
                       {"converged", r.converged}};
}

inline void to_json(nlohmann::json& j, const BoundEvaluation& b) {
    j = nlohmann::json{
        {"name", b.name},
        {"threshold", b.threshold},
        {"value", b.value},
        {"log_value", b.log_value},
        {"kind", b.kind == BoundKind::probability_bound ? "probability-bound"
                                                        : "rate-no-constant"},
        {"applicable", b.applicable},
        {"reason", b.reason},
        {"inputs", b.inputs}};
}

inline void to_json(nlohmann::json& j, const MonteCarloEstimate& e) {
    j = nlohmann::json{{"value", e.value},
                       {"std_error", e.std_error},
                       {"ci_low", e.ci_low},
                       {"ci_high", e.ci_high},
                       {"n_samples", e.n_samples},
                       {"seed", e.seed},
                       {"ci_method", e.ci_method}};
}

inline void to_json(nlohmann::json& j, const DominationReport& r) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& v : r.violating_pairs) {
        pairs.push_back({{"i", v.i}, {"j", v.j}, {"lhs", v.lhs}, {"rhs", v.rhs}});
    }
    j = nlohmann::json{{"dominates", r.dominates},
                       {"violating_pairs", pairs},
                       {"max_violation", r.max_violation}};
}

inline void to_json(nlohmann::json& j, const ComparisonReport& r) {
    j = nlohmann::json{{"verdict", to_string(r.verdict)},
                       {"p_a", r.p_a},
                       {"p_b", r.p_b},
                       {"slack", r.slack},
                       {"method_a", r.method_a},
                       {"method_b", r.method_b},
                       {"domination", r.domination}};
}

inline void to_json(nlohmann::json& j, const SharpnessRow& r) {
    j = nlohmann::json{{"n", r.n},
                       {"threshold", r.threshold},
                       {"exact", r.exact},
                       {"exact_error", r.exact_error},
                       {"rate", r.rate},
                       {"c_hat", r.c_hat},
                       {"flagged", r.flagged}};
}

inline void to_json(nlohmann::json& j, const SharpnessStudy& s) {
    j = nlohmann::json{{"rows", s.rows},
                       {"c_min", s.c_min},
                       {"c_max", s.c_max},
                       {"band_ratio", s.band_ratio},
                       {"loglog_slope", s.loglog_slope},
                       {"excluded", s.excluded}};
}

}  // namespace maxtail
