#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "evalgate/events.hpp"
#include "evalgate/json_util.hpp"

namespace evalgate {

enum class FailureLabel {
    provider_unavailable,
    missing_file,
    deterministic_nonzero_exit,
    execution_timeout,
    transient_network,
    unknown,
};

inline const char* to_string(FailureLabel label) {
    switch (label) {
        case FailureLabel::provider_unavailable: return "provider_unavailable";
        case FailureLabel::missing_file: return "missing_file";
        case FailureLabel::deterministic_nonzero_exit: return "deterministic_nonzero_exit";
        case FailureLabel::execution_timeout: return "execution_timeout";
        case FailureLabel::transient_network: return "transient_network";
        case FailureLabel::unknown: return "unknown";
    }
    return "unknown";
}

struct FailureClass {
    FailureLabel label = FailureLabel::unknown;
    bool retryable = true;
    bool cleanup_required = false;
};

inline FailureClass failure_class_for(FailureLabel label) {
    switch (label) {
        case FailureLabel::provider_unavailable: return {label, false, false};
        case FailureLabel::missing_file: return {label, false, false};
        case FailureLabel::deterministic_nonzero_exit: return {label, false, false};
        case FailureLabel::execution_timeout: return {label, true, true};
        case FailureLabel::transient_network: return {label, true, false};
        case FailureLabel::unknown: return {label, true, false};
    }
    return {FailureLabel::unknown, true, false};
}

inline FailureLabel failure_label_from_code(const std::string& code) {
    if (code == "provider_unavailable") return FailureLabel::provider_unavailable;
    if (code == "missing_file") return FailureLabel::missing_file;
    if (code == "deterministic_nonzero_exit") return FailureLabel::deterministic_nonzero_exit;
    if (code == "execution_timeout") return FailureLabel::execution_timeout;
    if (code == "transient_network") return FailureLabel::transient_network;
    // Unrecognized codes stay retryable so the budget, not the classifier,
    // bounds them.
    return FailureLabel::unknown;
}

inline FailureClass classify_failure(const EventRecord& event) {
    switch (event.event_type) {
        case EventType::tool_error:
        case EventType::traceback:
            return failure_class_for(failure_label_from_code(event.payload.value("code", "")));
        case EventType::timeout_mention:
            return failure_class_for(FailureLabel::execution_timeout);
        default:
            throw EvalError(ErrorKind::not_a_failure_event, to_string(event.event_type));
    }
}

struct RetryBudget {
    std::uint64_t per_task_cap = 2;
    std::uint64_t per_tool_cap = 2;
    std::uint64_t storm_threshold = 3;
};

inline RetryBudget retry_budget_from_json(const Json& j) {
    RetryBudget b;
    b.per_task_cap = require_uint(j, "per_task_cap");
    b.per_tool_cap = require_uint(j, "per_tool_cap");
    b.storm_threshold = require_uint(j, "storm_threshold");
    if (b.storm_threshold < 2) {
        throw EvalError(ErrorKind::invalid_config, "storm_threshold must be >= 2");
    }
    return b;
}

inline Json retry_budget_to_json(const RetryBudget& b) {
    return Json{{"per_task_cap", b.per_task_cap},
                {"per_tool_cap", b.per_tool_cap},
                {"storm_threshold", b.storm_threshold}};
}

struct RetryDecision {
    bool retry = false;
    std::string stop_reason;  // empty when retry is authorized
};

// Attempt counts reflect attempts already made, including the initial one.
// Non-retryable classes stop regardless of remaining budget.
inline RetryDecision should_retry(const FailureClass& cls, std::uint64_t task_attempts,
                                  std::uint64_t tool_attempts, const RetryBudget& budget) {
    if (!cls.retryable) return {false, "non-retryable"};
    if (task_attempts >= budget.per_task_cap) return {false, "task cap"};
    if (tool_attempts >= budget.per_tool_cap) return {false, "tool cap"};
    return {true, {}};
}

struct StormFlag {
    std::uint64_t task_seq = 0;
    std::string tool;
    FailureLabel label = FailureLabel::unknown;
    std::uint64_t count = 0;

    friend bool operator==(const StormFlag&, const StormFlag&) = default;
};

// Flags every (task, tool, class) group whose same-class failure count
// reaches the storm threshold, largest groups first. Grouping ignores
// interleaving between tasks.
inline std::vector<StormFlag> detect_retry_storm(const std::vector<EventRecord>& events,
                                                 const RetryBudget& budget) {
    std::map<std::tuple<std::uint64_t, std::string, FailureLabel>, std::uint64_t> groups;
    for (const auto& e : events) {
        if (e.event_type != EventType::tool_error && e.event_type != EventType::traceback &&
            e.event_type != EventType::timeout_mention) {
            continue;
        }
        FailureClass cls = classify_failure(e);
        std::string tool = e.payload.value("tool", "");
        ++groups[{e.task_seq, tool, cls.label}];
    }
    std::vector<StormFlag> flags;
    for (const auto& [key, count] : groups) {
        if (count >= budget.storm_threshold) {
            flags.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
        }
    }
    std::sort(flags.begin(), flags.end(), [](const StormFlag& x, const StormFlag& y) {
        if (x.count != y.count) return x.count > y.count;
        if (x.task_seq != y.task_seq) return x.task_seq < y.task_seq;
        if (x.tool != y.tool) return x.tool < y.tool;
        return static_cast<int>(x.label) < static_cast<int>(y.label);
    });
    return flags;
}

}  // namespace evalgate
