#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "evalgate/aggregates.hpp"
#include "evalgate/events.hpp"
#include "evalgate/ledger.hpp"

namespace evalgate {

inline CostEstimate estimate_cost(const TokenUsage& tokens, const RateTable& rates) {
    double cents_raw = (static_cast<double>(tokens.input_tokens) * rates.input_rate +
                        static_cast<double>(tokens.output_tokens) * rates.output_rate) /
                       10000.0;
    std::int64_t priority_cents = std::llround(cents_raw);
    // Derive the standard estimate from integer cents so that exact halves
    // (e.g. 231.55 / 2) round away from zero instead of riding representation
    // error.
    std::int64_t standard_cents =
        std::llround(static_cast<double>(priority_cents) / rates.standard_divisor);
    return CostEstimate{from_cents(priority_cents), from_cents(standard_cents)};
}

// Mean over tasks of the normalized Shannon entropy of each task's action
// histogram. A task with a single action type scores 0; a uniform two-type
// task scores 1. Invariant under scaling every count in a histogram.
inline double entropy_score(const std::vector<std::map<std::string, std::uint64_t>>& per_task) {
    if (per_task.empty()) {
        throw EvalError(ErrorKind::empty_histogram, "no task histograms");
    }
    double sum = 0.0;
    for (const auto& histogram : per_task) {
        if (histogram.empty()) {
            throw EvalError(ErrorKind::empty_histogram, "empty task histogram");
        }
        double total = 0.0;
        for (const auto& [name, count] : histogram) {
            if (count == 0) {
                throw EvalError(ErrorKind::empty_histogram, "zero count for " + name);
            }
            total += static_cast<double>(count);
        }
        if (histogram.size() == 1) continue;  // degenerate distribution scores 0
        double entropy = 0.0;
        for (const auto& [name, count] : histogram) {
            double p = static_cast<double>(count) / total;
            entropy -= p * std::log(p);
        }
        sum += entropy / std::log(static_cast<double>(histogram.size()));
    }
    return sum / static_cast<double>(per_task.size());
}

// Aggregate one run's event stream against its outcomes. Counters are exact
// event-type counts; the merge across tasks is commutative, so any task
// ordering yields identical results. Tokens (and the costs derived from
// them) are marked absent when the stream carries no token_usage records:
// "never logged" is not the same as "zero".
inline RunAggregates aggregate_run(const std::vector<EventRecord>& events,
                                   const std::vector<TaskOutcome>& outcomes,
                                   const RateTable& rates, double elapsed_s) {
    std::unordered_set<std::uint64_t> known_tasks;
    for (const auto& o : outcomes) {
        if (!known_tasks.insert(o.task_seq).second) {
            throw EvalError(ErrorKind::inconsistent_input,
                            "duplicate task_seq " + std::to_string(o.task_seq) + " in outcomes");
        }
    }

    NoiseCounters noise;
    TokenUsage tokens;
    bool saw_token_event = false;
    std::unordered_map<std::uint64_t, double> last_ts;
    std::unordered_map<std::uint64_t, std::map<std::string, std::uint64_t>> tool_histograms;
    std::unordered_set<std::uint64_t> final_seen;

    for (const auto& e : events) {
        if (!known_tasks.contains(e.task_seq)) {
            throw EvalError(ErrorKind::inconsistent_input,
                            "event references unknown task_seq " + std::to_string(e.task_seq));
        }
        auto [it, inserted] = last_ts.try_emplace(e.task_seq, e.ts);
        if (!inserted) {
            if (e.ts < it->second) {
                throw EvalError(ErrorKind::inconsistent_input,
                                "ts decreased within task " + std::to_string(e.task_seq));
            }
            it->second = e.ts;
        }
        switch (e.event_type) {
            case EventType::attempt_start:
                ++noise.attempts;
                break;
            case EventType::tool_call:
                ++tool_histograms[e.task_seq][e.payload.value("tool", "(unnamed)")];
                break;
            case EventType::tool_error:
                ++noise.tool_failure_mentions;
                break;
            case EventType::traceback:
                ++noise.tracebacks;
                break;
            case EventType::timeout_mention:
                ++noise.timeout_mentions;
                break;
            case EventType::token_usage:
                saw_token_event = true;
                ++tokens.calls;
                tokens.input_tokens += e.payload.at("input_tokens").get<std::uint64_t>();
                tokens.output_tokens += e.payload.at("output_tokens").get<std::uint64_t>();
                break;
            case EventType::final_answer:
                final_seen.insert(e.task_seq);
                break;
            case EventType::task_end:
                break;
        }
    }

    double duration_sum = 0.0;
    std::vector<std::map<std::string, std::uint64_t>> histograms;
    histograms.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        duration_sum += o.duration_s;
        if (!final_seen.contains(o.task_seq)) ++noise.missing_finals;
        if (auto it = tool_histograms.find(o.task_seq); it != tool_histograms.end()) {
            histograms.push_back(it->second);
        }
    }

    RunAggregates agg;
    agg.set_noise(noise);
    agg.correct = static_cast<std::uint64_t>(
        std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.correct; }));
    agg.total = outcomes.size();
    agg.elapsed_s = elapsed_s;
    agg.avg_task_s =
        outcomes.empty()
            ? 0.0
            : round_half_away(duration_sum / static_cast<double>(outcomes.size()), 2);
    agg.entropy_score = histograms.empty() ? 0.0 : entropy_score(histograms);
    if (saw_token_event) {
        agg.tokens = tokens;
        CostEstimate cost = estimate_cost(tokens, rates);
        agg.priority_cost = cost.priority;
        agg.standard_cost = cost.standard;
    }
    return agg;
}

inline RunAggregates aggregate_run(const std::vector<EventRecord>& events, const RunRecord& run,
                                   const RateTable& rates = RateTable{}) {
    return aggregate_run(events, run.outcomes, rates, run.elapsed_s);
}

}  // namespace evalgate
