#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "evalgate/aggregates.hpp"
#include "evalgate/json_util.hpp"
#include "evalgate/sha256.hpp"

namespace evalgate {

enum class SearchRoute { strict_primary, primary_with_fallback };

inline const char* to_string(SearchRoute route) {
    switch (route) {
        case SearchRoute::strict_primary: return "strict_primary";
        case SearchRoute::primary_with_fallback: return "primary_with_fallback";
    }
    return "unknown";
}

inline SearchRoute search_route_from_string(const std::string& name) {
    if (name == "strict_primary") return SearchRoute::strict_primary;
    if (name == "primary_with_fallback") return SearchRoute::primary_with_fallback;
    throw EvalError(ErrorKind::parse_error, "unknown search_route: " + name);
}

// Every flag must be enabled for a run to count as a clean evaluation.
struct IntegrityFlags {
    bool direct_solvers_disabled = false;
    bool lockdown_enabled = false;
    bool policy_autoload_disabled = false;
    bool meta_learning_disabled = false;
    bool evolution_promotion_disabled = false;
    bool healing_policy_load_disabled = false;
    bool reruns_forbidden = false;
    bool midrun_tuning_forbidden = false;

    bool all_enabled() const {
        return direct_solvers_disabled && lockdown_enabled && policy_autoload_disabled &&
               meta_learning_disabled && evolution_promotion_disabled &&
               healing_policy_load_disabled && reruns_forbidden && midrun_tuning_forbidden;
    }
    friend bool operator==(const IntegrityFlags&, const IntegrityFlags&) = default;
};

// Frozen description of a campaign's protocol. Commit and diff hashes are
// opaque strings supplied by the caller; the ledger does not talk to version
// control. Abort rules and comparison metrics are stored, not interpreted.
struct RunManifest {
    std::string code_commit;
    std::string dirty_diff_hash;
    std::string policy_hash;
    std::string prompt_hash;
    std::string scorer_hash;
    std::string task_manifest_hash;
    std::uint64_t seed = 0;
    std::string model_label;
    std::string runtime_env;
    std::vector<std::string> abort_rules;
    std::vector<std::string> comparison_metrics;
    IntegrityFlags integrity_flags;
    SearchRoute search_route = SearchRoute::strict_primary;
    std::optional<std::string> frozen_hash;

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

namespace detail {

inline void validate_manifest_fields(const RunManifest& m) {
    auto require = [](const std::string& value, const char* name) {
        if (value.empty()) throw EvalError(ErrorKind::missing_field, name);
    };
    require(m.code_commit, "code_commit");
    require(m.dirty_diff_hash, "dirty_diff_hash");
    require(m.policy_hash, "policy_hash");
    require(m.prompt_hash, "prompt_hash");
    require(m.scorer_hash, "scorer_hash");
    require(m.task_manifest_hash, "task_manifest_hash");
    require(m.model_label, "model_label");
    require(m.runtime_env, "runtime_env");
}

}  // namespace detail

inline Json integrity_flags_to_json(const IntegrityFlags& f) {
    return Json{{"direct_solvers_disabled", f.direct_solvers_disabled},
                {"lockdown_enabled", f.lockdown_enabled},
                {"policy_autoload_disabled", f.policy_autoload_disabled},
                {"meta_learning_disabled", f.meta_learning_disabled},
                {"evolution_promotion_disabled", f.evolution_promotion_disabled},
                {"healing_policy_load_disabled", f.healing_policy_load_disabled},
                {"reruns_forbidden", f.reruns_forbidden},
                {"midrun_tuning_forbidden", f.midrun_tuning_forbidden}};
}

inline IntegrityFlags integrity_flags_from_json(const Json& j) {
    IntegrityFlags f;
    f.direct_solvers_disabled = require_bool(j, "direct_solvers_disabled");
    f.lockdown_enabled = require_bool(j, "lockdown_enabled");
    f.policy_autoload_disabled = require_bool(j, "policy_autoload_disabled");
    f.meta_learning_disabled = require_bool(j, "meta_learning_disabled");
    f.evolution_promotion_disabled = require_bool(j, "evolution_promotion_disabled");
    f.healing_policy_load_disabled = require_bool(j, "healing_policy_load_disabled");
    f.reruns_forbidden = require_bool(j, "reruns_forbidden");
    f.midrun_tuning_forbidden = require_bool(j, "midrun_tuning_forbidden");
    return f;
}

// Canonical serialization: sorted keys, UTF-8, no insignificant whitespace,
// decimal integers. The frozen hash is computed over this text with the
// frozen_hash field itself excluded.
inline std::string canonical_manifest_text(const RunManifest& m) {
    Json j;
    j["abort_rules"] = m.abort_rules;
    j["code_commit"] = m.code_commit;
    j["comparison_metrics"] = m.comparison_metrics;
    j["dirty_diff_hash"] = m.dirty_diff_hash;
    j["integrity_flags"] = integrity_flags_to_json(m.integrity_flags);
    j["model_label"] = m.model_label;
    j["policy_hash"] = m.policy_hash;
    j["prompt_hash"] = m.prompt_hash;
    j["runtime_env"] = m.runtime_env;
    j["scorer_hash"] = m.scorer_hash;
    j["search_route"] = to_string(m.search_route);
    j["seed"] = m.seed;
    j["task_manifest_hash"] = m.task_manifest_hash;
    return j.dump();
}

inline RunManifest freeze_manifest(const RunManifest& draft) {
    detail::validate_manifest_fields(draft);
    RunManifest frozen = draft;
    frozen.frozen_hash = sha256_hex(canonical_manifest_text(draft));
    return frozen;
}

inline Json manifest_to_json(const RunManifest& m) {
    Json j = parse_json(canonical_manifest_text(m));
    if (m.frozen_hash) j["frozen_hash"] = *m.frozen_hash;
    return j;
}

// Manifest file content: the canonical serialization, frozen_hash included
// when present.
inline std::string manifest_file_text(const RunManifest& m) { return manifest_to_json(m).dump(); }

inline RunManifest manifest_from_json(const Json& j) {
    RunManifest m;
    m.code_commit = require_nonempty_string(j, "code_commit");
    m.dirty_diff_hash = require_nonempty_string(j, "dirty_diff_hash");
    m.policy_hash = require_nonempty_string(j, "policy_hash");
    m.prompt_hash = require_nonempty_string(j, "prompt_hash");
    m.scorer_hash = require_nonempty_string(j, "scorer_hash");
    m.task_manifest_hash = require_nonempty_string(j, "task_manifest_hash");
    m.seed = require_uint(j, "seed");
    m.model_label = require_nonempty_string(j, "model_label");
    m.runtime_env = require_nonempty_string(j, "runtime_env");
    const Json& rules = require_field(j, "abort_rules");
    if (!rules.is_array()) throw EvalError(ErrorKind::parse_error, "abort_rules must be an array");
    m.abort_rules = rules.get<std::vector<std::string>>();
    const Json& metrics = require_field(j, "comparison_metrics");
    if (!metrics.is_array()) {
        throw EvalError(ErrorKind::parse_error, "comparison_metrics must be an array");
    }
    m.comparison_metrics = metrics.get<std::vector<std::string>>();
    m.integrity_flags = integrity_flags_from_json(require_field(j, "integrity_flags"));
    m.search_route = search_route_from_string(require_nonempty_string(j, "search_route"));
    if (auto it = j.find("frozen_hash"); it != j.end()) m.frozen_hash = it->get<std::string>();
    return m;
}

// One task's result. task_seq is a per-run index, never a benchmark
// identifier. failure_classes is a multiset stored as label -> count.
struct TaskOutcome {
    std::uint64_t task_seq = 0;
    bool correct = false;
    bool final_present = false;
    std::uint64_t attempts = 0;
    double duration_s = 0.0;
    std::map<std::string, std::uint64_t> failure_classes;

    friend bool operator==(const TaskOutcome&, const TaskOutcome&) = default;
};

struct RunRecord {
    std::string manifest_hash;
    std::vector<TaskOutcome> outcomes;
    double elapsed_s = 0.0;
    std::uint64_t seed = 0;
    std::optional<RunAggregates> aggregates;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline Json outcome_to_json(const TaskOutcome& o) {
    Json j;
    j["task_seq"] = o.task_seq;
    j["correct"] = o.correct;
    j["final_present"] = o.final_present;
    j["attempts"] = o.attempts;
    j["duration_s"] = o.duration_s;
    if (!o.failure_classes.empty()) j["failure_classes"] = o.failure_classes;
    return j;
}

inline TaskOutcome outcome_from_json(const Json& j) {
    TaskOutcome o;
    o.task_seq = require_uint(j, "task_seq");
    o.correct = require_bool(j, "correct");
    o.final_present = require_bool(j, "final_present");
    o.attempts = require_uint(j, "attempts");
    o.duration_s = require_number(j, "duration_s");
    if (o.duration_s < 0.0) {
        throw EvalError(ErrorKind::parse_error, "duration_s must be non-negative");
    }
    if (o.final_present && o.attempts == 0) {
        throw EvalError(ErrorKind::parse_error, "attempts must be >= 1 when final_present");
    }
    if (auto it = j.find("failure_classes"); it != j.end()) {
        o.failure_classes = it->get<std::map<std::string, std::uint64_t>>();
    }
    return o;
}

inline Json run_record_to_json(const RunRecord& r) {
    Json j;
    j["manifest_hash"] = r.manifest_hash;
    j["elapsed_s"] = r.elapsed_s;
    j["seed"] = r.seed;
    Json outcomes = Json::array();
    for (const auto& o : r.outcomes) outcomes.push_back(outcome_to_json(o));
    j["outcomes"] = outcomes;
    if (r.aggregates) j["aggregates"] = aggregates_to_json(*r.aggregates);
    return j;
}

inline RunRecord run_record_from_json(const Json& j) {
    RunRecord r;
    r.manifest_hash = require_nonempty_string(j, "manifest_hash");
    r.elapsed_s = require_number(j, "elapsed_s");
    r.seed = require_uint(j, "seed");
    const Json& outcomes = require_field(j, "outcomes");
    if (!outcomes.is_array()) throw EvalError(ErrorKind::parse_error, "outcomes must be an array");
    for (const auto& o : outcomes) r.outcomes.push_back(outcome_from_json(o));
    if (auto it = j.find("aggregates"); it != j.end()) r.aggregates = aggregates_from_json(*it);
    return r;
}

struct IntegrityVerdict {
    bool valid = true;
    std::vector<std::string> reasons;
};

// Fail-closed integrity check. A duplicated task_seq is the observable
// consequence of a rerun, which frozen protocols forbid.
inline IntegrityVerdict verify_run_integrity(const RunManifest& manifest, const RunRecord& run) {
    if (!manifest.frozen_hash) {
        throw EvalError(ErrorKind::invalid_config, "manifest is not frozen");
    }
    IntegrityVerdict verdict;
    auto fail = [&verdict](std::string reason) {
        verdict.valid = false;
        verdict.reasons.push_back(std::move(reason));
    };
    if (run.manifest_hash != *manifest.frozen_hash) fail("manifest hash mismatch");
    if (!manifest.integrity_flags.all_enabled()) fail("clean evaluation violated");
    std::unordered_set<std::uint64_t> seen;
    for (const auto& o : run.outcomes) {
        if (!seen.insert(o.task_seq).second) {
            fail("rerun detected");
            break;
        }
    }
    return verdict;
}

struct CompletenessVerdict {
    bool complete = false;
    std::uint64_t missing_finals = 0;
};

// Zero tolerance for missing finals; a count shortfall is treated as that
// many missing finals.
inline CompletenessVerdict validate_completeness(const RunRecord& run,
                                                 std::uint64_t expected_total) {
    std::uint64_t absent = 0;
    for (const auto& o : run.outcomes) {
        if (!o.final_present) ++absent;
    }
    std::uint64_t shortfall =
        expected_total > run.outcomes.size() ? expected_total - run.outcomes.size() : 0;
    CompletenessVerdict verdict;
    verdict.missing_finals = absent + shortfall;
    verdict.complete = run.outcomes.size() == expected_total && absent == 0;
    return verdict;
}

}  // namespace evalgate
