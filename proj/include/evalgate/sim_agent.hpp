#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evalgate/comparison.hpp"
#include "evalgate/events.hpp"
#include "evalgate/ledger.hpp"
#include "evalgate/retry_policy.hpp"
#include "evalgate/telemetry.hpp"

namespace evalgate {

struct TokenMeans {
    std::uint64_t input_mean = 1000;
    std::uint64_t output_mean = 100;
};

// Configuration for the seeded executor model. It reproduces operational
// behavior only (attempts, failures, timing, tokens); task semantics are out
// of scope, so correctness is an independent per-task draw.
struct SimConfig {
    std::uint64_t task_count = 1;
    double base_correct_prob = 0.5;
    double timeout_rate = 0.0;
    double tool_failure_rate = 0.0;
    double nonretryable_fraction = 0.0;
    std::uint32_t escalation_depth = 0;
    RetryBudget retry_budget;
    TokenMeans tokens_per_call;
    std::uint64_t seed = 0;
};

inline void validate_sim_config(const SimConfig& cfg) {
    auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (cfg.task_count < 1) {
        throw EvalError(ErrorKind::invalid_config, "task_count must be >= 1");
    }
    if (!probability(cfg.base_correct_prob) || !probability(cfg.timeout_rate) ||
        !probability(cfg.tool_failure_rate) || !probability(cfg.nonretryable_fraction)) {
        throw EvalError(ErrorKind::invalid_config, "probabilities must be in [0,1]");
    }
    if (cfg.timeout_rate + cfg.tool_failure_rate > 1.0) {
        throw EvalError(ErrorKind::invalid_config,
                        "timeout_rate + tool_failure_rate must not exceed 1");
    }
    if (cfg.tokens_per_call.input_mean > 1000000000000ULL ||
        cfg.tokens_per_call.output_mean > 1000000000000ULL) {
        throw EvalError(ErrorKind::invalid_config, "token means out of range");
    }
}

inline SimConfig sim_config_from_json(const Json& j) {
    SimConfig cfg;
    cfg.task_count = require_uint(j, "task_count");
    cfg.base_correct_prob = require_number(j, "base_correct_prob");
    cfg.timeout_rate = require_number(j, "timeout_rate");
    cfg.tool_failure_rate = require_number(j, "tool_failure_rate");
    cfg.nonretryable_fraction = require_number(j, "nonretryable_fraction");
    cfg.escalation_depth = static_cast<std::uint32_t>(require_uint(j, "escalation_depth"));
    cfg.retry_budget = retry_budget_from_json(require_field(j, "retry_budget"));
    const Json& tokens = require_field(j, "tokens_per_call");
    cfg.tokens_per_call.input_mean = require_uint(tokens, "input_mean");
    cfg.tokens_per_call.output_mean = require_uint(tokens, "output_mean");
    cfg.seed = require_uint(j, "seed");
    validate_sim_config(cfg);
    return cfg;
}

inline Json sim_config_to_json(const SimConfig& cfg) {
    return Json{{"task_count", cfg.task_count},
                {"base_correct_prob", cfg.base_correct_prob},
                {"timeout_rate", cfg.timeout_rate},
                {"tool_failure_rate", cfg.tool_failure_rate},
                {"nonretryable_fraction", cfg.nonretryable_fraction},
                {"escalation_depth", cfg.escalation_depth},
                {"retry_budget", retry_budget_to_json(cfg.retry_budget)},
                {"tokens_per_call",
                 Json{{"input_mean", cfg.tokens_per_call.input_mean},
                      {"output_mean", cfg.tokens_per_call.output_mean}}},
                {"seed", cfg.seed}};
}

namespace sim_detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent substream per (seed, task, purpose) so that changing retry
// budgets never shifts the correctness draws.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t task, std::uint64_t purpose) {
    return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ task) ^ purpose));
}

// Distributions are hand-rolled on top of mt19937_64 output; the standard
// library's distribution objects are implementation-defined and would break
// cross-platform byte-identical replay.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t sample_tokens(std::mt19937_64& rng, std::uint64_t mean) {
    if (mean == 0) return 0;
    std::uint64_t low = std::max<std::uint64_t>(1, mean / 2);
    return low + rng() % (mean + 1);
}

struct SimCall {
    std::string tool;
    int outcome = 0;  // 0 ok, 1 timeout, 2 tool error
    FailureLabel label = FailureLabel::unknown;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    double dt = 0.0;
};

struct AttemptScript {
    std::vector<SimCall> calls;
    std::uint64_t planner_input = 0;
    std::uint64_t planner_output = 0;
    double planner_dt = 0.0;
};

inline AttemptScript draw_attempt(std::mt19937_64& rng, const SimConfig& cfg) {
    static const std::array<const char*, 4> tools = {"search", "docs", "python", "browser"};
    static const std::array<FailureLabel, 3> deterministic_labels = {
        FailureLabel::provider_unavailable, FailureLabel::missing_file,
        FailureLabel::deterministic_nonzero_exit};
    AttemptScript script;
    script.planner_input = sample_tokens(rng, cfg.tokens_per_call.input_mean);
    script.planner_output = sample_tokens(rng, cfg.tokens_per_call.output_mean);
    script.planner_dt = 0.2 + uniform01(rng) * 0.8;
    std::size_t call_count = 1 + rng() % 3;
    script.calls.resize(call_count);
    for (auto& call : script.calls) {
        // Every value is drawn unconditionally so the sequence of draws does
        // not depend on sampled outcomes.
        call.tool = tools[rng() % tools.size()];
        double failure_draw = uniform01(rng);
        double class_draw = uniform01(rng);
        std::uint64_t deterministic_pick = rng() % deterministic_labels.size();
        call.input_tokens = sample_tokens(rng, cfg.tokens_per_call.input_mean);
        call.output_tokens = sample_tokens(rng, cfg.tokens_per_call.output_mean);
        call.dt = 0.5 + uniform01(rng) * 2.0;
        if (failure_draw < cfg.timeout_rate) {
            call.outcome = 1;
            call.label = FailureLabel::execution_timeout;
        } else if (failure_draw < cfg.timeout_rate + cfg.tool_failure_rate) {
            call.outcome = 2;
            call.label = class_draw < cfg.nonretryable_fraction
                             ? deterministic_labels[deterministic_pick]
                             : FailureLabel::transient_network;
        }
    }
    return script;
}

inline bool persists_across_retries(FailureLabel label) {
    return label == FailureLabel::provider_unavailable || label == FailureLabel::missing_file ||
           label == FailureLabel::deterministic_nonzero_exit;
}

}  // namespace sim_detail

struct SimResult {
    RunManifest manifest;
    RunRecord record;
    std::vector<EventRecord> events;
};

// Deterministic function of the config (seed included). The executor model
// is deliberately class-blind: it retries any failure while the caps allow,
// which is exactly the amplification behavior the retry policy module is
// meant to rein in. Deterministic failure classes replay identically on
// every retry; transient ones are re-drawn.
inline SimResult simulate_run(const SimConfig& cfg) {
    using namespace sim_detail;
    validate_sim_config(cfg);

    SimResult result;
    std::vector<EventRecord>& events = result.events;
    RunRecord& record = result.record;
    double clock = 0.0;

    for (std::uint64_t task = 0; task < cfg.task_count; ++task) {
        auto correct_rng = substream(cfg.seed, task, 1);
        auto exec_rng = substream(cfg.seed, task, 2);
        const bool correct = uniform01(correct_rng) < cfg.base_correct_prob;

        const double task_start = clock;
        TaskOutcome outcome;
        outcome.task_seq = task;
        outcome.correct = correct;
        outcome.final_present = true;

        auto emit = [&](EventType type, Json payload, double dt) {
            clock += dt;
            events.push_back(EventRecord{clock, task, type, std::move(payload)});
        };

        std::map<std::string, std::uint64_t> tool_failures;
        std::uint64_t attempts = 0;
        std::uint32_t escalations_used = 0;
        bool replaying = false;
        AttemptScript replay_script;

        while (true) {
            ++attempts;
            const AttemptScript script = replaying ? replay_script : draw_attempt(exec_rng, cfg);
            emit(EventType::attempt_start, Json::object(), 0.05);
            if (attempts > 1 && escalations_used < cfg.escalation_depth) {
                ++escalations_used;
                emit(EventType::tool_call, Json{{"tool", "planner"}}, 0.05);
                emit(EventType::token_usage,
                     Json{{"input_tokens", script.planner_input},
                          {"output_tokens", script.planner_output}},
                     0.05);
            }
            emit(EventType::token_usage,
                 Json{{"input_tokens", script.planner_input},
                      {"output_tokens", script.planner_output}},
                 script.planner_dt);

            bool failed = false;
            std::string failing_tool;
            FailureLabel failure_label = FailureLabel::unknown;
            for (const auto& call : script.calls) {
                emit(EventType::tool_call, Json{{"tool", call.tool}}, 0.05);
                emit(EventType::token_usage,
                     Json{{"input_tokens", call.input_tokens},
                          {"output_tokens", call.output_tokens}},
                     call.dt);
                if (call.outcome == 1) {
                    emit(EventType::timeout_mention, Json{{"tool", call.tool}}, 0.05);
                    failed = true;
                } else if (call.outcome == 2) {
                    emit(EventType::tool_error,
                         Json{{"tool", call.tool}, {"code", to_string(call.label)}}, 0.05);
                    emit(EventType::traceback, Json{{"code", to_string(call.label)}}, 0.05);
                    failed = true;
                }
                if (failed) {
                    failing_tool = call.tool;
                    failure_label = call.label;
                    ++outcome.failure_classes[to_string(call.label)];
                    break;
                }
            }
            if (!failed) break;
            ++tool_failures[failing_tool];
            if (persists_across_retries(failure_label)) {
                replaying = true;
                replay_script = script;
            } else {
                replaying = false;
            }
            if (attempts >= cfg.retry_budget.per_task_cap) break;
            if (tool_failures[failing_tool] >= cfg.retry_budget.per_tool_cap) break;
        }

        emit(EventType::final_answer, Json{{"text", "value-" + std::to_string(task)}}, 0.05);
        emit(EventType::task_end, Json::object(), 0.05);
        outcome.attempts = attempts;
        outcome.duration_s = clock - task_start;
        record.outcomes.push_back(std::move(outcome));
    }

    record.elapsed_s = clock;
    record.seed = cfg.seed;

    RunManifest draft;
    std::string cfg_text = sim_config_to_json(cfg).dump();
    draft.code_commit = sha256_hex("sim-code").substr(0, 12);
    draft.dirty_diff_hash = sha256_hex("sim-diff:" + cfg_text);
    draft.policy_hash = sha256_hex("sim-policy:" + cfg_text);
    draft.prompt_hash = sha256_hex("sim-prompt");
    draft.scorer_hash = sha256_hex("sim-scorer");
    draft.task_manifest_hash = sha256_hex("sim-tasks:" + std::to_string(cfg.task_count));
    draft.seed = cfg.seed;
    draft.model_label = "simulated-agent";
    draft.runtime_env = "sim;rng=mt19937_64;streams=splitmix64";
    draft.abort_rules = {"halt_on_integrity_violation"};
    draft.comparison_metrics = {"accuracy", "tracebacks", "timeout_mentions",
                                "tool_failure_mentions", "attempts", "priority_cost"};
    draft.integrity_flags = IntegrityFlags{true, true, true, true, true, true, true, true};
    draft.search_route = SearchRoute::strict_primary;
    result.manifest = freeze_manifest(draft);
    record.manifest_hash = *result.manifest.frozen_hash;
    record.aggregates = aggregate_run(events, record.outcomes, RateTable{}, record.elapsed_s);
    return result;
}

// ---------------------------------------------------------------------------
// Replay fixtures
//
// Each fixture is a synthetic event stream plus outcome vector constructed so
// that aggregation reproduces the recorded summary row of a real campaign
// exactly. Metrics the source row never recorded are omitted from the stored
// aggregates (they fail closed at gates); per-task details (durations, the
// outcome vector, event placement) are synthetic choices documented in the
// fixture metadata.
// ---------------------------------------------------------------------------

struct FixtureRun {
    std::string label;
    RunManifest manifest;
    RunRecord record;
    std::vector<EventRecord> events;
    Json meta;
};

inline const std::vector<std::string>& replay_fixture_labels() {
    static const std::vector<std::string> labels = {"baseline", "recovery_v1", "strict_diagnostic",
                                                    "smoke_positive", "smoke_subsequent"};
    return labels;
}

namespace fixture_detail {

// Task-level movement classes shared by the two full-run fixtures:
// 23 correct in both, 6 correct only in baseline, 4 correct only in the
// recovery run, 20 wrong in both. The interleaving is a fixed permutation.
inline const std::array<char, 53>& transition_classes() {
    static const std::array<char, 53> classes = [] {
        std::array<char, 53> cls{};
        std::size_t idx = 0;
        for (int i = 0; i < 23; ++i) cls[idx++] = 'B';
        for (int i = 0; i < 6; ++i) cls[idx++] = 'b';
        for (int i = 0; i < 4; ++i) cls[idx++] = 'r';
        for (int i = 0; i < 20; ++i) cls[idx++] = 'w';
        std::mt19937_64 rng(2026);
        for (std::size_t i = cls.size() - 1; i > 0; --i) {
            std::size_t j = rng() % (i + 1);
            std::swap(cls[i], cls[j]);
        }
        return cls;
    }();
    return classes;
}

inline std::vector<bool> shuffled_mask(std::size_t total, std::size_t correct,
                                       std::uint64_t seed) {
    std::vector<bool> mask(total, false);
    for (std::size_t i = 0; i < correct; ++i) mask[i] = true;
    std::mt19937_64 rng(seed);
    for (std::size_t i = mask.size() - 1; i > 0; --i) {
        std::size_t j = rng() % (i + 1);
        std::swap(mask[i], mask[j]);
    }
    return mask;
}

struct TaskPlan {
    bool correct = false;
    std::uint64_t attempts = 1;
    double duration = 0.0;
    std::vector<std::pair<std::string, std::uint64_t>> tool_calls;
    std::uint64_t tracebacks = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t tool_errors = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> token_events;
};

// Emits one task's events with timestamps spread evenly across its duration.
inline void emit_task(std::vector<EventRecord>& events, std::vector<TaskOutcome>& outcomes,
                      std::uint64_t task, double start, const TaskPlan& plan) {
    std::vector<EventRecord> staged;
    auto stage = [&](EventType type, Json payload) {
        staged.push_back(EventRecord{0.0, task, type, std::move(payload)});
    };
    for (std::uint64_t i = 0; i < plan.attempts; ++i) stage(EventType::attempt_start, Json::object());
    const std::string lead_tool = plan.tool_calls.empty() ? "search" : plan.tool_calls[0].first;
    for (const auto& [tool, count] : plan.tool_calls) {
        for (std::uint64_t i = 0; i < count; ++i) stage(EventType::tool_call, Json{{"tool", tool}});
    }
    for (std::uint64_t i = 0; i < plan.tool_errors; ++i) {
        stage(EventType::tool_error, Json{{"tool", lead_tool}, {"code", "transient_network"}});
    }
    for (std::uint64_t i = 0; i < plan.tracebacks; ++i) stage(EventType::traceback, Json::object());
    for (std::uint64_t i = 0; i < plan.timeouts; ++i) {
        stage(EventType::timeout_mention, Json{{"tool", lead_tool}});
    }
    for (const auto& [input, output] : plan.token_events) {
        stage(EventType::token_usage, Json{{"input_tokens", input}, {"output_tokens", output}});
    }
    stage(EventType::final_answer, Json{{"text", "recorded"}});
    stage(EventType::task_end, Json::object());

    const double step = plan.duration / static_cast<double>(staged.size());
    for (std::size_t i = 0; i < staged.size(); ++i) {
        staged[i].ts = start + step * static_cast<double>(i + 1);
        events.push_back(std::move(staged[i]));
    }

    TaskOutcome outcome;
    outcome.task_seq = task;
    outcome.correct = plan.correct;
    outcome.final_present = true;
    outcome.attempts = plan.attempts;
    outcome.duration_s = plan.duration;
    if (plan.tool_errors > 0) outcome.failure_classes["transient_network"] = plan.tool_errors;
    if (plan.timeouts > 0) outcome.failure_classes["execution_timeout"] = plan.timeouts;
    if (plan.tracebacks > 0) outcome.failure_classes["unknown"] = plan.tracebacks;
    outcomes.push_back(std::move(outcome));
}

inline RunManifest fixture_manifest(const std::string& label, std::uint64_t seed,
                                    SearchRoute route, const std::string& task_set) {
    RunManifest m;
    m.code_commit = sha256_hex("code:" + label).substr(0, 12);
    m.dirty_diff_hash = sha256_hex("diff:" + label);
    m.policy_hash = sha256_hex("policy:" + label);
    m.prompt_hash = sha256_hex("prompt:" + label);
    m.scorer_hash = sha256_hex("scorer:exact-match-v2");
    m.task_manifest_hash = sha256_hex("tasks:" + task_set);
    m.seed = seed;
    m.model_label = "agent-main";
    m.runtime_env = "linux-x86_64;replay=v1";
    m.abort_rules = {"halt_on_integrity_violation", "halt_on_manifest_mismatch"};
    m.comparison_metrics = {"accuracy", "tracebacks", "timeout_mentions",
                            "tool_failure_mentions", "attempts", "priority_cost"};
    m.integrity_flags = IntegrityFlags{true, true, true, true, true, true, true, true};
    m.search_route = route;
    return freeze_manifest(m);
}

inline bool contains(std::initializer_list<std::uint64_t> values, std::uint64_t v) {
    for (auto candidate : values) {
        if (candidate == v) return true;
    }
    return false;
}

inline void expect(bool ok, const std::string& what) {
    if (!ok) {
        throw EvalError(ErrorKind::inconsistent_input, "fixture self-check failed: " + what);
    }
}

}  // namespace fixture_detail

inline FixtureRun build_replay_fixture(const std::string& label) {
    using namespace fixture_detail;
    static const std::array<const char*, 3> tools = {"search", "docs", "python"};

    FixtureRun fx;
    fx.label = label;
    std::vector<TaskPlan> plans;
    double elapsed = 0.0;
    std::uint64_t seed = 0;

    if (label == "baseline" || label == "recovery_v1") {
        const bool base = label == "baseline";
        elapsed = base ? 6653.89 : 7230.93;
        seed = base ? 1782047163ULL : 1778025467ULL;
        const double duration_target = base ? 6140.58 : 6619.17;
        const auto& classes = transition_classes();
        double partial = 0.0;
        for (std::uint64_t i = 0; i < 53; ++i) {
            TaskPlan plan;
            char cls = classes[i];
            plan.correct = base ? (cls == 'B' || cls == 'b') : (cls == 'B' || cls == 'r');
            if (base) {
                plan.attempts = contains({5, 17, 29, 41}, i) ? 2 : 1;
                plan.duration = i < 52 ? 110.0 + static_cast<double>(i % 12)
                                       : round_half_away(duration_target - partial, 2);
                plan.tool_calls = {{tools[i % 3], 2}};
                plan.tracebacks = 1 + (i < 9 ? 1 : 0);
                plan.timeouts = 14 + (i < 27 ? 1 : 0);
                plan.tool_errors = 3 + (i < 11 ? 1 : 0);
            } else {
                plan.attempts = contains({3, 11, 19, 27, 35}, i) ? 2 : 1;
                plan.duration = i < 52 ? 118.0 + static_cast<double>(i % 14)
                                       : round_half_away(duration_target - partial, 2);
                plan.tool_calls = {{tools[i % 3], 2}, {tools[(i + 1) % 3], 1}};
                plan.tracebacks = 2 + (i < 35 ? 1 : 0);
                plan.timeouts = 17 + (i < 38 ? 1 : 0);
                plan.tool_errors = 5 + (i < 17 ? 1 : 0);
            }
            partial += plan.duration;
            plans.push_back(std::move(plan));
        }
        fx.manifest = fixture_manifest(label, seed, SearchRoute::primary_with_fallback,
                                       "full-set-53");
    } else if (label == "strict_diagnostic") {
        elapsed = 5438.06;
        seed = 1779246001ULL;  // the source row records no seed; synthetic
        const auto& classes = transition_classes();
        std::optional<std::uint64_t> flipped;
        for (std::uint64_t i = 0; i < 53 && !flipped; ++i) {
            if (classes[i] == 'w') flipped = i;
        }
        std::uint64_t token_index = 0;
        for (std::uint64_t i = 0; i < 53; ++i) {
            TaskPlan plan;
            char cls = classes[i];
            plan.correct = cls == 'B' || cls == 'b' || i == *flipped;
            plan.attempts = contains({2, 10, 18, 26, 34, 42}, i) ? 2 : 1;
            plan.duration = i < 26 ? 80.0 : (i < 52 ? 96.0 : 88.0);
            if (i < 44) {
                plan.tool_calls = {{tools[i % 3], 2}};
            } else if (i < 52) {
                plan.tool_calls = {{"search", 1}, {"docs", 1}};
            } else {
                plan.tool_calls = {{"search", 9}, {"python", 16}};
            }
            const std::uint64_t token_count = i < 27 ? 18 : 17;
            for (std::uint64_t k = 0; k < token_count; ++k) {
                plan.token_events.push_back({12520 + (token_index < 641 ? 1 : 0),
                                             103 + (token_index < 337 ? 1 : 0)});
                ++token_index;
            }
            plans.push_back(std::move(plan));
        }
        fx.manifest =
            fixture_manifest(label, seed, SearchRoute::strict_primary, "full-set-53");
    } else if (label == "smoke_positive" || label == "smoke_subsequent") {
        const bool positive = label == "smoke_positive";
        elapsed = positive ? 2819.61 : 2761.30;
        seed = positive ? 1778077117ULL : 1778082895ULL;
        const auto mask = shuffled_mask(20, positive ? 12 : 11, positive ? 2027 : 2028);
        for (std::uint64_t i = 0; i < 20; ++i) {
            TaskPlan plan;
            plan.correct = mask[i];
            if (positive) {
                plan.attempts = contains({4, 9, 14, 19}, i) ? 2 : 1;
                plan.duration = 120.0 + static_cast<double>(i % 5);
                plan.tracebacks = i < 18 ? 1 : 0;
                plan.timeouts = 12 + (i < 1 ? 1 : 0);
                plan.tool_errors = 2 + (i < 12 ? 1 : 0);
            } else {
                plan.attempts = contains({6, 13, 18}, i) ? 2 : 1;
                plan.duration = 118.0 + static_cast<double>(i % 5);
                plan.tracebacks = 3 + (i < 11 ? 1 : 0);
                plan.timeouts = 40 + (i < 12 ? 1 : 0);
                plan.tool_errors = 4 + (i < 15 ? 1 : 0);
            }
            plan.tool_calls = {{tools[i % 3], 2}};
            plans.push_back(std::move(plan));
        }
        fx.manifest = fixture_manifest(label, seed, SearchRoute::primary_with_fallback,
                                       "smoke-20:" + label);
    } else {
        throw EvalError(ErrorKind::unknown_fixture, label);
    }

    double duration_sum = 0.0;
    for (const auto& plan : plans) duration_sum += plan.duration;
    const double gap = (elapsed - duration_sum) / static_cast<double>(plans.size());
    expect(gap >= 0.0, label + " durations exceed elapsed time");
    double start = 0.0;
    for (std::uint64_t i = 0; i < plans.size(); ++i) {
        emit_task(fx.events, fx.record.outcomes, i, start, plans[i]);
        start += plans[i].duration + gap;
    }

    fx.record.manifest_hash = *fx.manifest.frozen_hash;
    fx.record.elapsed_s = elapsed;
    fx.record.seed = seed;

    RunAggregates computed =
        aggregate_run(fx.events, fx.record.outcomes, RateTable{}, elapsed);
    Json recorded;  // which aggregate fields come from the source row
    if (label == "baseline" || label == "recovery_v1") {
        const bool base = label == "baseline";
        expect(computed.correct == (base ? 29u : 27u), label + " correct");
        expect(*computed.attempts == (base ? 57u : 58u), label + " attempts");
        expect(*computed.tracebacks == (base ? 62u : 141u), label + " tracebacks");
        expect(*computed.timeout_mentions == (base ? 769u : 939u), label + " timeouts");
        expect(*computed.tool_failure_mentions == (base ? 170u : 282u), label + " tool failures");
        expect(*computed.missing_finals == 0, label + " missing finals");
        expect(computed.avg_task_s == (base ? 115.86 : 124.89), label + " avg task time");
        expect(!computed.tokens.has_value(), label + " tokens must be unrecorded");
        computed.priority_cost = base ? 197.32 : 231.55;
        computed.standard_cost = base ? 98.66 : 115.78;
        recorded = Json::array({"correct", "total", "accuracy", "elapsed_s", "avg_task_s",
                                "attempts", "missing_finals", "tracebacks", "timeout_mentions",
                                "tool_failure_mentions", "priority_cost", "standard_cost",
                                "seed"});
    } else if (label == "strict_diagnostic") {
        expect(computed.correct == 30u, label + " correct");
        expect(*computed.attempts == 59u, label + " attempts");
        expect(*computed.missing_finals == 0, label + " missing finals");
        expect(computed.avg_task_s == 88.0, label + " avg task time");
        expect(computed.tokens.has_value() && computed.tokens->calls == 928 &&
                   computed.tokens->input_tokens == 11619201 &&
                   computed.tokens->output_tokens == 95921,
               label + " token usage");
        expect(computed.priority_cost == 185.80 && computed.standard_cost == 92.90,
               label + " cost estimates");
        expect(round_half_away(*computed.entropy_score, 4) == 0.1687, label + " entropy score");
        // Noise counters were not recorded for this run; gates must treat
        // them as missing rather than zero.
        computed.tracebacks.reset();
        computed.timeout_mentions.reset();
        computed.tool_failure_mentions.reset();
        recorded = Json::array({"correct", "total", "accuracy", "elapsed_s", "avg_task_s",
                                "attempts", "missing_finals", "tokens", "priority_cost",
                                "standard_cost", "entropy_score"});
    } else {
        const bool positive = label == "smoke_positive";
        expect(computed.correct == (positive ? 12u : 11u), label + " correct");
        expect(*computed.attempts == (positive ? 24u : 23u), label + " attempts");
        expect(*computed.missing_finals == 0, label + " missing finals");
        recorded = Json::array({"correct", "total", "accuracy", "elapsed_s", "attempts",
                                "missing_finals", "seed"});
    }
    fx.record.aggregates = computed;

    fx.meta = Json{
        {"label", label},
        {"recorded", recorded},
        {"synthetic",
         Json::array({"per-task outcome vector", "per-task durations", "event placement",
                      "failure class mix", "tool mix"})},
        {"notes",
         "Synthetic replay stream: aggregating the events reproduces every recorded field "
         "exactly; fields absent from the aggregates row were never recorded for this run "
         "and fail closed at gates. Per-task durations are one consistent choice among many "
         "(only their mean and the elapsed wall clock are recorded)."}};
    if (label == "strict_diagnostic") {
        fx.meta["notes"] = std::string(fx.meta["notes"].get<std::string>()) +
                           " The seed is synthetic; the source row records none.";
    }
    if (label == "smoke_positive" || label == "smoke_subsequent") {
        fx.meta["notes"] =
            std::string(fx.meta["notes"].get<std::string>()) +
            " Noise counters in the aggregates row are synthetic values consistent with the "
            "run's recorded narrative (within the reference ceiling for the positive smoke, "
            "above it on tracebacks and timeouts for the subsequent one); only the fields in "
            "'recorded' come from the source row.";
    }
    return fx;
}

inline void write_replay_fixture(const FixtureRun& fx, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / (fx.label + ".manifest.json"), manifest_file_text(fx.manifest) + "\n");
    write_text_file(dir / (fx.label + ".run.json"),
                    run_record_to_json(fx.record).dump(2) + "\n");
    std::ostringstream events;
    write_event_log(events, fx.events);
    write_text_file(dir / (fx.label + ".events.ndjson"), events.str());
    write_text_file(dir / (fx.label + ".meta.json"), fx.meta.dump(2) + "\n");
}

inline FixtureRun load_replay_fixture(const std::string& label,
                                      const std::filesystem::path& dir) {
    const auto& labels = replay_fixture_labels();
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
        throw EvalError(ErrorKind::unknown_fixture, label);
    }
    FixtureRun fx;
    fx.label = label;
    fx.manifest = manifest_from_json(parse_json(read_text_file(dir / (label + ".manifest.json"))));
    fx.record = run_record_from_json(parse_json(read_text_file(dir / (label + ".run.json"))));
    std::istringstream events(read_text_file(dir / (label + ".events.ndjson")));
    fx.events = parse_event_log(events);
    fx.meta = parse_json(read_text_file(dir / (label + ".meta.json")));
    return fx;
}

inline std::vector<TaskResult> task_results(const RunRecord& record) {
    std::vector<TaskResult> results;
    results.reserve(record.outcomes.size());
    for (const auto& o : record.outcomes) results.push_back({o.task_seq, o.correct});
    return results;
}

}  // namespace evalgate
