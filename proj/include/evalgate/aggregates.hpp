#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "evalgate/json_util.hpp"
#include "evalgate/numeric.hpp"

namespace evalgate {

// Operational-noise counters. Additive: concatenating two disjoint runs sums
// field by field.
struct NoiseCounters {
    std::uint64_t tracebacks = 0;
    std::uint64_t timeout_mentions = 0;
    std::uint64_t tool_failure_mentions = 0;
    std::uint64_t attempts = 0;
    std::uint64_t missing_finals = 0;

    NoiseCounters& operator+=(const NoiseCounters& other) {
        tracebacks += other.tracebacks;
        timeout_mentions += other.timeout_mentions;
        tool_failure_mentions += other.tool_failure_mentions;
        attempts += other.attempts;
        missing_finals += other.missing_finals;
        return *this;
    }
    friend NoiseCounters operator+(NoiseCounters a, const NoiseCounters& b) { return a += b; }
    friend bool operator==(const NoiseCounters&, const NoiseCounters&) = default;
};

struct TokenUsage {
    std::uint64_t calls = 0;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;

    std::uint64_t total_tokens() const { return input_tokens + output_tokens; }

    TokenUsage& operator+=(const TokenUsage& other) {
        calls += other.calls;
        input_tokens += other.input_tokens;
        output_tokens += other.output_tokens;
        return *this;
    }
    friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) { return a += b; }
    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

// Rates are operational estimates per million tokens, not billing facts,
// hence configurable. standard cost = priority / standard_divisor.
struct RateTable {
    double input_rate = 15.0;
    double output_rate = 120.0;
    double standard_divisor = 2.0;
};

inline RateTable rate_table_from_json(const Json& j) {
    RateTable rates;
    rates.input_rate = require_number(j, "input_rate");
    rates.output_rate = require_number(j, "output_rate");
    if (auto it = j.find("standard_divisor"); it != j.end()) {
        rates.standard_divisor = it->get<double>();
    }
    if (rates.input_rate < 0.0 || rates.output_rate < 0.0 || rates.standard_divisor <= 0.0) {
        throw EvalError(ErrorKind::invalid_config,
                        "rates must be non-negative and standard_divisor positive");
    }
    return rates;
}

struct CostEstimate {
    double priority = 0.0;
    double standard = 0.0;
};

// Percentage accuracy, half away from zero at two decimals.
inline double accuracy(std::uint64_t correct, std::uint64_t total) {
    if (total == 0) {
        throw EvalError(ErrorKind::division_by_zero, "accuracy with total = 0");
    }
    if (correct > total) {
        throw EvalError(ErrorKind::inconsistent_input, "correct exceeds total");
    }
    return static_cast<double>(std::llround((10000.0 * static_cast<double>(correct)) /
                                            static_cast<double>(total))) /
           100.0;
}

// Run-level aggregate row. A metric that the source run never recorded is
// absent (std::nullopt), which is different from a recorded zero: gates fail
// closed on absent metrics.
struct RunAggregates {
    std::optional<std::uint64_t> tracebacks;
    std::optional<std::uint64_t> timeout_mentions;
    std::optional<std::uint64_t> tool_failure_mentions;
    std::optional<std::uint64_t> attempts;
    std::optional<std::uint64_t> missing_finals;
    std::optional<TokenUsage> tokens;
    std::uint64_t correct = 0;
    std::uint64_t total = 0;
    double elapsed_s = 0.0;
    double avg_task_s = 0.0;
    std::optional<double> entropy_score;
    std::optional<double> priority_cost;
    std::optional<double> standard_cost;

    double accuracy_pct() const { return accuracy(correct, total); }

    void set_noise(const NoiseCounters& noise) {
        tracebacks = noise.tracebacks;
        timeout_mentions = noise.timeout_mentions;
        tool_failure_mentions = noise.tool_failure_mentions;
        attempts = noise.attempts;
        missing_finals = noise.missing_finals;
    }

    friend bool operator==(const RunAggregates&, const RunAggregates&) = default;
};

inline Json aggregates_to_json(const RunAggregates& a) {
    Json j;
    j["correct"] = a.correct;
    j["total"] = a.total;
    j["elapsed_s"] = a.elapsed_s;
    j["avg_task_s"] = a.avg_task_s;
    Json noise = Json::object();
    if (a.tracebacks) noise["tracebacks"] = *a.tracebacks;
    if (a.timeout_mentions) noise["timeout_mentions"] = *a.timeout_mentions;
    if (a.tool_failure_mentions) noise["tool_failure_mentions"] = *a.tool_failure_mentions;
    if (a.attempts) noise["attempts"] = *a.attempts;
    if (a.missing_finals) noise["missing_finals"] = *a.missing_finals;
    if (!noise.empty()) j["noise"] = noise;
    if (a.tokens) {
        j["tokens"] = {{"calls", a.tokens->calls},
                       {"input_tokens", a.tokens->input_tokens},
                       {"output_tokens", a.tokens->output_tokens}};
    }
    if (a.entropy_score) j["entropy_score"] = *a.entropy_score;
    if (a.priority_cost) j["priority_cost"] = *a.priority_cost;
    if (a.standard_cost) j["standard_cost"] = *a.standard_cost;
    return j;
}

inline RunAggregates aggregates_from_json(const Json& j) {
    RunAggregates a;
    a.correct = require_uint(j, "correct");
    a.total = require_uint(j, "total");
    a.elapsed_s = require_number(j, "elapsed_s");
    a.avg_task_s = require_number(j, "avg_task_s");
    if (auto it = j.find("noise"); it != j.end()) {
        const Json& noise = *it;
        auto pick = [&noise](const char* key) -> std::optional<std::uint64_t> {
            auto n = noise.find(key);
            if (n == noise.end()) return std::nullopt;
            if (!n->is_number_unsigned()) {
                throw EvalError(ErrorKind::parse_error,
                                std::string(key) + " must be a non-negative integer");
            }
            return n->get<std::uint64_t>();
        };
        a.tracebacks = pick("tracebacks");
        a.timeout_mentions = pick("timeout_mentions");
        a.tool_failure_mentions = pick("tool_failure_mentions");
        a.attempts = pick("attempts");
        a.missing_finals = pick("missing_finals");
    }
    if (auto it = j.find("tokens"); it != j.end()) {
        TokenUsage usage;
        usage.calls = require_uint(*it, "calls");
        usage.input_tokens = require_uint(*it, "input_tokens");
        usage.output_tokens = require_uint(*it, "output_tokens");
        a.tokens = usage;
    }
    if (auto it = j.find("entropy_score"); it != j.end()) a.entropy_score = it->get<double>();
    if (auto it = j.find("priority_cost"); it != j.end()) a.priority_cost = it->get<double>();
    if (auto it = j.find("standard_cost"); it != j.end()) a.standard_cost = it->get<double>();
    return a;
}

}  // namespace evalgate
