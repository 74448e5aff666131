#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "evalgate/aggregates.hpp"
#include "evalgate/comparison.hpp"
#include "evalgate/json_util.hpp"
#include "evalgate/ledger.hpp"
#include "evalgate/numeric.hpp"

namespace evalgate {

enum class UnknownMetricPolicy { fail_closed, warn };

inline const char* to_string(UnknownMetricPolicy p) {
    return p == UnknownMetricPolicy::fail_closed ? "fail_closed" : "warn";
}

inline UnknownMetricPolicy unknown_metric_policy_from_string(const std::string& name) {
    if (name == "fail_closed") return UnknownMetricPolicy::fail_closed;
    if (name == "warn") return UnknownMetricPolicy::warn;
    throw EvalError(ErrorKind::parse_error, "unknown unknown_metric_policy: " + name);
}

// Thresholds are configuration, not code. When the accuracy floor is unset
// the reference run's own accuracy is used, and every noise multiplier
// defaults to 1.0 (no increase allowed over the reference).
struct GateConfig {
    std::optional<double> smoke_accuracy_floor;
    std::map<std::string, double> noise_ceiling;
    UnknownMetricPolicy unknown_metric_policy = UnknownMetricPolicy::fail_closed;

    double multiplier_for(const std::string& counter) const {
        auto it = noise_ceiling.find(counter);
        return it == noise_ceiling.end() ? 1.0 : it->second;
    }
};

inline GateConfig gate_config_from_json(const Json& j) {
    GateConfig cfg;
    if (auto it = j.find("smoke_accuracy_floor"); it != j.end()) {
        cfg.smoke_accuracy_floor = it->get<double>();
        if (*cfg.smoke_accuracy_floor < 0.0 || *cfg.smoke_accuracy_floor > 100.0) {
            throw EvalError(ErrorKind::invalid_config, "smoke_accuracy_floor must be in [0,100]");
        }
    }
    if (auto it = j.find("noise_ceiling"); it != j.end()) {
        for (const auto& [key, value] : it->items()) {
            double mult = value.get<double>();
            if (mult <= 0.0) {
                throw EvalError(ErrorKind::invalid_config, "noise multiplier must be > 0");
            }
            cfg.noise_ceiling[key] = mult;
        }
    }
    if (auto it = j.find("unknown_metric_policy"); it != j.end()) {
        cfg.unknown_metric_policy = unknown_metric_policy_from_string(it->get<std::string>());
    }
    return cfg;
}

struct GateCriterion {
    std::string name;
    std::string required;
    std::string observed;
    bool satisfied = false;
};

struct GateVerdict {
    bool pass = false;
    std::vector<GateCriterion> criteria;

    bool criterion_satisfied(const std::string& name) const {
        for (const auto& c : criteria) {
            if (c.name == name) return c.satisfied;
        }
        throw EvalError(ErrorKind::missing_field, "criterion " + name);
    }
};

inline Json gate_verdict_to_json(const GateVerdict& v) {
    Json criteria = Json::array();
    for (const auto& c : v.criteria) {
        criteria.push_back({{"name", c.name},
                            {"required", c.required},
                            {"observed", c.observed},
                            {"satisfied", c.satisfied}});
    }
    return Json{{"pass", v.pass}, {"criteria", criteria}};
}

inline GateVerdict gate_verdict_from_json(const Json& j) {
    GateVerdict v;
    v.pass = require_bool(j, "pass");
    for (const auto& c : require_field(j, "criteria")) {
        v.criteria.push_back({c.at("name").get<std::string>(),
                              c.at("required").get<std::string>(),
                              c.at("observed").get<std::string>(),
                              c.at("satisfied").get<bool>()});
    }
    return v;
}

namespace detail {

inline void finalize(GateVerdict& v) {
    v.pass = std::all_of(v.criteria.begin(), v.criteria.end(),
                         [](const GateCriterion& c) { return c.satisfied; });
}

// Adds a comparison criterion, failing closed (or warning) when either side
// is unrecorded.
template <typename T, typename Cmp>
void add_compare(GateVerdict& v, const std::string& name, const std::string& required,
                 const std::optional<T>& observed, const std::optional<T>& bound, Cmp cmp,
                 UnknownMetricPolicy policy, int decimals = 0) {
    GateCriterion c;
    c.name = name;
    c.required = required;
    if (!observed || !bound) {
        c.observed = "unrecorded";
        c.satisfied = policy == UnknownMetricPolicy::warn;
        if (c.satisfied) c.observed = "unrecorded (warn)";
    } else {
        if constexpr (std::is_floating_point_v<T>) {
            c.observed = fmt_fixed(*observed, decimals);
        } else {
            c.observed = fmt_count(*observed);
        }
        c.satisfied = cmp(*observed, *bound);
    }
    v.criteria.push_back(std::move(c));
}

}  // namespace detail

// Smoke launch gate: accuracy must clear the floor, every noise counter must
// stay within the reference ceiling, and no finals may be missing.
inline GateVerdict evaluate_smoke_gate(const RunAggregates& smoke, const RunAggregates& reference,
                                       const GateConfig& cfg = {}) {
    GateVerdict v;
    const auto policy = cfg.unknown_metric_policy;
    double floor = cfg.smoke_accuracy_floor ? *cfg.smoke_accuracy_floor : reference.accuracy_pct();
    detail::add_compare<double>(v, "accuracy >= floor", ">= " + fmt_fixed(floor, 2),
                                smoke.accuracy_pct(), floor,
                                [](double a, double b) { return a >= b; }, policy, 2);

    struct Counter {
        const char* name;
        std::optional<std::uint64_t> smoke_value;
        std::optional<std::uint64_t> reference_value;
    };
    const Counter counters[] = {
        {"tracebacks", smoke.tracebacks, reference.tracebacks},
        {"timeout_mentions", smoke.timeout_mentions, reference.timeout_mentions},
        {"tool_failure_mentions", smoke.tool_failure_mentions, reference.tool_failure_mentions},
        {"attempts", smoke.attempts, reference.attempts},
    };
    for (const auto& counter : counters) {
        std::optional<double> bound;
        if (counter.reference_value) {
            bound = static_cast<double>(*counter.reference_value) *
                    cfg.multiplier_for(counter.name);
        }
        std::optional<double> observed;
        if (counter.smoke_value) observed = static_cast<double>(*counter.smoke_value);
        detail::add_compare<double>(
            v, std::string(counter.name) + " <= ceiling",
            bound ? "<= " + fmt_fixed(*bound, 2) : "<= (unrecorded reference)", observed, bound,
            [](double a, double b) { return a <= b; }, policy);
    }
    detail::add_compare<std::uint64_t>(v, "missing_finals == 0", "== 0", smoke.missing_finals,
                                       std::optional<std::uint64_t>(0),
                                       [](std::uint64_t a, std::uint64_t b) { return a == b; },
                                       policy);
    detail::finalize(v);
    return v;
}

// Multi-criterion success gate for a recovery candidate. Accuracy must beat
// the baseline strictly and at least match recovery v1; every cost and noise
// metric must be strictly below recovery v1; missing finals and
// baseline-relative correct-to-wrong movement must not grow.
inline GateVerdict evaluate_recovery_v2_gate(
    const RunAggregates& candidate, const RunAggregates& baseline,
    const RunAggregates& recovery_v1,
    const std::optional<TransitionCounts>& movement_vs_baseline,
    const std::optional<TransitionCounts>& v1_movement_vs_baseline,
    const GateConfig& cfg = {}) {
    GateVerdict v;
    const auto policy = cfg.unknown_metric_policy;
    auto lt = [](double a, double b) { return a < b; };

    detail::add_compare<double>(v, "accuracy > baseline",
                                "> " + fmt_fixed(baseline.accuracy_pct(), 2),
                                candidate.accuracy_pct(), baseline.accuracy_pct(),
                                [](double a, double b) { return a > b; }, policy, 2);
    detail::add_compare<double>(v, "accuracy >= recovery_v1",
                                ">= " + fmt_fixed(recovery_v1.accuracy_pct(), 2),
                                candidate.accuracy_pct(), recovery_v1.accuracy_pct(),
                                [](double a, double b) { return a >= b; }, policy, 2);

    struct Counter {
        const char* name;
        std::optional<std::uint64_t> candidate_value;
        std::optional<std::uint64_t> v1_value;
    };
    const Counter counters[] = {
        {"tracebacks", candidate.tracebacks, recovery_v1.tracebacks},
        {"timeout_mentions", candidate.timeout_mentions, recovery_v1.timeout_mentions},
        {"tool_failure_mentions", candidate.tool_failure_mentions,
         recovery_v1.tool_failure_mentions},
        {"attempts", candidate.attempts, recovery_v1.attempts},
    };
    for (const auto& counter : counters) {
        detail::add_compare<double>(
            v, std::string(counter.name) + " < recovery_v1",
            counter.v1_value ? "< " + fmt_count(*counter.v1_value) : "< (unrecorded)",
            counter.candidate_value
                ? std::optional<double>(static_cast<double>(*counter.candidate_value))
                : std::nullopt,
            counter.v1_value ? std::optional<double>(static_cast<double>(*counter.v1_value))
                             : std::nullopt,
            lt, policy);
    }

    // Token volume is input + output; no weighting between the two.
    std::optional<double> candidate_tokens, v1_tokens;
    if (candidate.tokens) candidate_tokens = static_cast<double>(candidate.tokens->total_tokens());
    if (recovery_v1.tokens) v1_tokens = static_cast<double>(recovery_v1.tokens->total_tokens());
    detail::add_compare<double>(v, "total_tokens < recovery_v1",
                                v1_tokens ? "< " + fmt_fixed(*v1_tokens, 0) : "< (unrecorded)",
                                candidate_tokens, v1_tokens, lt, policy);

    detail::add_compare<double>(
        v, "priority_cost < recovery_v1",
        recovery_v1.priority_cost ? "< " + fmt_fixed(*recovery_v1.priority_cost, 2)
                                  : "< (unrecorded)",
        candidate.priority_cost, recovery_v1.priority_cost, lt, policy, 2);

    detail::add_compare<std::uint64_t>(
        v, "missing_finals <= baseline",
        baseline.missing_finals ? "<= " + fmt_count(*baseline.missing_finals)
                                : "<= (unrecorded)",
        candidate.missing_finals, baseline.missing_finals,
        [](std::uint64_t a, std::uint64_t b) { return a <= b; }, policy);

    std::optional<std::uint64_t> candidate_ctw, v1_ctw;
    if (movement_vs_baseline) candidate_ctw = movement_vs_baseline->correct_to_wrong;
    if (v1_movement_vs_baseline) v1_ctw = v1_movement_vs_baseline->correct_to_wrong;
    detail::add_compare<std::uint64_t>(
        v, "correct_to_wrong_vs_baseline <= recovery_v1",
        v1_ctw ? "<= " + fmt_count(*v1_ctw) : "<= (unrecorded)", candidate_ctw, v1_ctw,
        [](std::uint64_t a, std::uint64_t b) { return a <= b; }, policy);

    detail::finalize(v);
    return v;
}

enum class ProviderStatus { healthy, rate_limited, unavailable };

inline const char* to_string(ProviderStatus s) {
    switch (s) {
        case ProviderStatus::healthy: return "healthy";
        case ProviderStatus::rate_limited: return "rate_limited";
        case ProviderStatus::unavailable: return "unavailable";
    }
    return "unknown";
}

inline ProviderStatus provider_status_from_string(const std::string& name) {
    if (name == "healthy") return ProviderStatus::healthy;
    if (name == "rate_limited") return ProviderStatus::rate_limited;
    if (name == "unavailable") return ProviderStatus::unavailable;
    throw EvalError(ErrorKind::parse_error, "unknown provider status: " + name);
}

struct ProviderProbeResult {
    std::string provider;
    ProviderStatus status = ProviderStatus::unavailable;
    double probe_ts = 0.0;
};

// Pre-scoring health gate. Under strict_primary only the primary provider
// matters; with fallback enabled every probed fallback must be healthy too.
inline GateVerdict provider_health_gate(const std::vector<ProviderProbeResult>& probes,
                                        SearchRoute route, const std::string& primary) {
    std::map<std::string, ProviderStatus> by_provider;
    for (const auto& p : probes) {
        if (!by_provider.emplace(p.provider, p.status).second) {
            throw EvalError(ErrorKind::invalid_config,
                            "more than one probe for provider " + p.provider);
        }
    }
    auto it = by_provider.find(primary);
    if (it == by_provider.end()) {
        throw EvalError(ErrorKind::no_primary_probe, primary);
    }
    GateVerdict v;
    v.criteria.push_back({"primary " + primary + " healthy", "healthy", to_string(it->second),
                          it->second == ProviderStatus::healthy});
    if (route == SearchRoute::primary_with_fallback) {
        for (const auto& [provider, status] : by_provider) {
            if (provider == primary) continue;
            v.criteria.push_back({"fallback " + provider + " healthy", "healthy",
                                  to_string(status), status == ProviderStatus::healthy});
        }
    }
    detail::finalize(v);
    return v;
}

// Any run that fails integrity verification is rejected by every downstream
// gate: the integrity reasons are prepended as a failing criterion.
inline GateVerdict with_integrity_precheck(const IntegrityVerdict& integrity, GateVerdict gate) {
    if (integrity.valid) return gate;
    std::string reasons;
    for (const auto& r : integrity.reasons) {
        if (!reasons.empty()) reasons += "; ";
        reasons += r;
    }
    gate.criteria.insert(gate.criteria.begin(), {"run integrity", "valid", reasons, false});
    gate.pass = false;
    return gate;
}

}  // namespace evalgate
