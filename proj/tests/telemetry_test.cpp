#include "evalgate/telemetry.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace evalgate {
namespace {

TEST(ParseEventLine, WellFormedTraceback) {
    EventRecord rec =
        parse_event_line(R"({"ts": 1.5, "task_seq": 3, "event_type": "traceback", "payload": {}})");
    EXPECT_EQ(rec.event_type, EventType::traceback);
    EXPECT_EQ(rec.task_seq, 3u);
    EXPECT_DOUBLE_EQ(rec.ts, 1.5);
}

TEST(ParseEventLine, NegativeTokenCountIsAParseError) {
    try {
        parse_event_line(
            R"({"ts": 1, "task_seq": 0, "event_type": "token_usage",)"
            R"( "payload": {"input_tokens": -5, "output_tokens": 2}})");
        FAIL() << "expected ParseError";
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse_error);
    }
}

TEST(ParseEventLine, TruncatedLineIsAParseError) {
    try {
        parse_event_line(R"({"ts": 1, "task_seq": 0, "event_ty)");
        FAIL() << "expected ParseError";
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse_error);
    }
}

TEST(ParseEventLine, UnknownEventTypeIsRejected) {
    try {
        parse_event_line(R"({"ts": 1, "task_seq": 0, "event_type": "telemetry_blip"})");
        FAIL() << "expected UnknownEventType";
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unknown_event_type);
    }
}

TEST(ParseEventLine, RoundTripsThroughLineText) {
    EventRecord rec{2.25, 7, EventType::tool_call, Json{{"tool", "search"}}};
    EventRecord reparsed = parse_event_line(event_to_line(rec));
    EXPECT_EQ(reparsed.event_type, rec.event_type);
    EXPECT_EQ(reparsed.payload, rec.payload);
    EXPECT_DOUBLE_EQ(reparsed.ts, rec.ts);
}

TEST(Accuracy, MatchesRecordedRows) {
    EXPECT_DOUBLE_EQ(accuracy(29, 53), 54.72);
    EXPECT_DOUBLE_EQ(accuracy(27, 53), 50.94);
    EXPECT_DOUBLE_EQ(accuracy(30, 53), 56.60);
    EXPECT_DOUBLE_EQ(accuracy(0, 53), 0.00);
    EXPECT_DOUBLE_EQ(accuracy(12, 20), 60.00);
}

TEST(Accuracy, ZeroTotalIsDivisionByZero) {
    try {
        accuracy(0, 0);
        FAIL() << "expected DivisionByZero";
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::division_by_zero);
    }
}

TEST(Accuracy, ScaleInvariant) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        std::uint64_t total = 1 + rng() % 1000;
        std::uint64_t correct = rng() % (total + 1);
        std::uint64_t k = 1 + rng() % 50;
        EXPECT_DOUBLE_EQ(accuracy(correct, total), accuracy(k * correct, k * total));
    }
}

// Independent route: round each component to cents first, then sum; the
// recorded total must agree with the production route to the cent.
TEST(EstimateCost, FittedRatesReproduceRecordedTotal) {
    double input_component = round_half_away(11619201.0 * 15.0 / 1e6, 2);
    double output_component = round_half_away(95921.0 * 120.0 / 1e6, 2);
    EXPECT_DOUBLE_EQ(input_component, 174.29);
    EXPECT_DOUBLE_EQ(output_component, 11.51);
    EXPECT_DOUBLE_EQ(input_component + output_component, 185.80);

    CostEstimate cost = estimate_cost({928, 11619201, 95921}, RateTable{});
    EXPECT_DOUBLE_EQ(cost.priority, 185.80);
    EXPECT_DOUBLE_EQ(cost.standard, 92.90);
}

TEST(EstimateCost, StandardIsHalfOfPriority) {
    // 197.32 -> 98.66 exactly; 231.55 -> 115.775 rounds away from zero.
    EXPECT_DOUBLE_EQ(std::round(19732.0 / 2.0) / 100.0, 98.66);
    EXPECT_DOUBLE_EQ(std::round(23155.0 / 2.0) / 100.0, 115.78);
}

TEST(EstimateCost, ZeroTokensCostNothing) {
    CostEstimate cost = estimate_cost({0, 0, 0}, RateTable{});
    EXPECT_DOUBLE_EQ(cost.priority, 0.0);
    EXPECT_DOUBLE_EQ(cost.standard, 0.0);
}

TEST(EstimateCost, LinearBeforeRoundingAndDivisorConsistent) {
    std::mt19937_64 rng(13);
    RateTable rates;
    for (int i = 0; i < 300; ++i) {
        TokenUsage t{1, rng() % 20000000, rng() % 300000};
        CostEstimate cost = estimate_cost(t, rates);
        double raw = (static_cast<double>(t.input_tokens) * rates.input_rate +
                      static_cast<double>(t.output_tokens) * rates.output_rate) /
                     1e6;
        EXPECT_NEAR(cost.priority, raw, 0.005 + 1e-9);
        EXPECT_NEAR(cost.standard * rates.standard_divisor, cost.priority,
                    0.01 * rates.standard_divisor / 2.0 + 1e-9);
        TokenUsage doubled{2, 2 * t.input_tokens, 2 * t.output_tokens};
        double doubled_raw = 2.0 * raw;
        EXPECT_NEAR(estimate_cost(doubled, rates).priority, doubled_raw, 0.005 + 1e-9);
    }
}

TEST(EntropyScore, DegenerateAndUniform) {
    EXPECT_DOUBLE_EQ(entropy_score({{{"search", 9}}}), 0.0);
    EXPECT_DOUBLE_EQ(entropy_score({{{"search", 4}, {"docs", 4}}}), 1.0);
}

TEST(EntropyScore, HandComputedThreeBucketCase) {
    // Counts {1,1,2}: H = 1.5 bits, log2(3) bits max -> 0.946395.
    double score = entropy_score({{{"a", 1}, {"b", 1}, {"c", 2}}});
    EXPECT_NEAR(score, 0.9464, 1e-4);
    double by_hand = 1.5 / std::log2(3.0);
    EXPECT_NEAR(score, by_hand, 1e-12);
}

TEST(EntropyScore, ScalingCountsLeavesScoreUnchanged) {
    std::vector<std::map<std::string, std::uint64_t>> base = {
        {{"a", 1}, {"b", 3}}, {{"a", 2}, {"b", 2}, {"c", 6}}, {{"solo", 5}}};
    std::vector<std::map<std::string, std::uint64_t>> scaled = base;
    for (auto& h : scaled) {
        for (auto& [k, v] : h) v *= 17;
    }
    EXPECT_DOUBLE_EQ(entropy_score(base), entropy_score(scaled));
}

TEST(EntropyScore, EmptyHistogramIsRejected) {
    try {
        entropy_score({{}});
        FAIL() << "expected EmptyHistogram";
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::empty_histogram);
    }
    EXPECT_THROW(entropy_score({}), EvalError);
}

// -- aggregation ------------------------------------------------------------

struct StreamSpec {
    std::uint64_t task_seq = 0;
    bool correct = false;
    std::uint64_t attempts = 1;
    std::uint64_t tracebacks = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t tool_errors = 0;
    std::uint64_t token_events = 0;
    double duration = 10.0;
};

std::vector<EventRecord> events_for(const std::vector<StreamSpec>& specs) {
    std::vector<EventRecord> events;
    double ts = 0.0;
    for (const auto& s : specs) {
        auto push = [&](EventType type, Json payload) {
            ts += 0.25;
            events.push_back({ts, s.task_seq, type, std::move(payload)});
        };
        for (std::uint64_t i = 0; i < s.attempts; ++i) push(EventType::attempt_start, {});
        push(EventType::tool_call, Json{{"tool", "search"}});
        for (std::uint64_t i = 0; i < s.tracebacks; ++i) push(EventType::traceback, {});
        for (std::uint64_t i = 0; i < s.timeouts; ++i) {
            push(EventType::timeout_mention, Json{{"tool", "search"}});
        }
        for (std::uint64_t i = 0; i < s.tool_errors; ++i) {
            push(EventType::tool_error, Json{{"tool", "search"}, {"code", "transient_network"}});
        }
        for (std::uint64_t i = 0; i < s.token_events; ++i) {
            push(EventType::token_usage, Json{{"input_tokens", 100}, {"output_tokens", 10}});
        }
        push(EventType::final_answer, Json{{"text", "x"}});
        push(EventType::task_end, {});
    }
    return events;
}

std::vector<TaskOutcome> outcomes_for(const std::vector<StreamSpec>& specs) {
    std::vector<TaskOutcome> outcomes;
    for (const auto& s : specs) {
        outcomes.push_back({s.task_seq, s.correct, true, s.attempts, s.duration, {}});
    }
    return outcomes;
}

TEST(AggregateRun, CountsAreExact) {
    std::vector<StreamSpec> specs = {
        {0, true, 1, 2, 3, 1, 4, 10.0},
        {1, false, 2, 0, 5, 2, 3, 20.0},
        {2, true, 1, 1, 0, 0, 0, 30.0},
    };
    RunAggregates agg = aggregate_run(events_for(specs), outcomes_for(specs), RateTable{}, 75.0);
    EXPECT_EQ(*agg.tracebacks, 3u);
    EXPECT_EQ(*agg.timeout_mentions, 8u);
    EXPECT_EQ(*agg.tool_failure_mentions, 3u);
    EXPECT_EQ(*agg.attempts, 4u);
    EXPECT_EQ(*agg.missing_finals, 0u);
    EXPECT_EQ(agg.correct, 2u);
    EXPECT_EQ(agg.total, 3u);
    EXPECT_DOUBLE_EQ(agg.avg_task_s, 20.0);
    EXPECT_DOUBLE_EQ(agg.elapsed_s, 75.0);
    ASSERT_TRUE(agg.tokens.has_value());
    EXPECT_EQ(agg.tokens->calls, 7u);
    EXPECT_EQ(agg.tokens->input_tokens, 700u);
    EXPECT_EQ(agg.tokens->output_tokens, 70u);
    EXPECT_TRUE(agg.priority_cost.has_value());
}

TEST(AggregateRun, EmptyStreamWithZeroOutcomesIsAllZero) {
    RunAggregates agg = aggregate_run({}, std::vector<TaskOutcome>{}, RateTable{}, 0.0);
    EXPECT_EQ(*agg.tracebacks, 0u);
    EXPECT_EQ(*agg.timeout_mentions, 0u);
    EXPECT_EQ(*agg.tool_failure_mentions, 0u);
    EXPECT_EQ(*agg.attempts, 0u);
    EXPECT_EQ(*agg.missing_finals, 0u);
    EXPECT_EQ(agg.total, 0u);
    EXPECT_FALSE(agg.tokens.has_value());
    EXPECT_FALSE(agg.priority_cost.has_value());
}

TEST(AggregateRun, MissingFinalIsCounted) {
    std::vector<StreamSpec> specs = {{0, true, 1, 0, 0, 0, 0, 5.0}};
    auto events = events_for(specs);
    events.erase(std::remove_if(events.begin(), events.end(),
                                [](const EventRecord& e) {
                                    return e.event_type == EventType::final_answer;
                                }),
                 events.end());
    RunAggregates agg = aggregate_run(events, outcomes_for(specs), RateTable{}, 5.0);
    EXPECT_EQ(*agg.missing_finals, 1u);
}

TEST(AggregateRun, UnknownTaskIsInconsistent) {
    std::vector<StreamSpec> specs = {{0, true, 1, 0, 0, 0, 0, 5.0}};
    auto events = events_for(specs);
    events.push_back({999.0, 42, EventType::traceback, Json::object()});
    try {
        aggregate_run(events, outcomes_for(specs), RateTable{}, 5.0);
        FAIL() << "expected InconsistentInput";
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::inconsistent_input);
    }
}

TEST(AggregateRun, DecreasingTimestampWithinTaskIsInconsistent) {
    std::vector<EventRecord> events = {
        {5.0, 0, EventType::attempt_start, Json::object()},
        {4.0, 0, EventType::final_answer, Json{{"text", "x"}}},
    };
    std::vector<TaskOutcome> outcomes = {{0, true, true, 1, 5.0, {}}};
    EXPECT_THROW(aggregate_run(events, outcomes, RateTable{}, 5.0), EvalError);
}

TEST(AggregateRun, DuplicateOutcomeIsInconsistent) {
    std::vector<StreamSpec> specs = {{0, true, 1, 0, 0, 0, 0, 5.0}};
    auto outcomes = outcomes_for(specs);
    outcomes.push_back(outcomes.front());
    EXPECT_THROW(aggregate_run(events_for(specs), outcomes, RateTable{}, 5.0), EvalError);
}

TEST(AggregateRun, CountersAreAdditiveOverDisjointTaskSets) {
    std::vector<StreamSpec> part_a = {{0, true, 2, 1, 4, 2, 3, 10.0},
                                      {1, false, 1, 0, 2, 1, 2, 14.0}};
    std::vector<StreamSpec> part_b = {{2, true, 1, 3, 1, 0, 5, 6.0},
                                      {3, true, 3, 2, 2, 2, 1, 8.0}};
    std::vector<StreamSpec> both = part_a;
    both.insert(both.end(), part_b.begin(), part_b.end());

    RunAggregates a = aggregate_run(events_for(part_a), outcomes_for(part_a), RateTable{}, 1.0);
    RunAggregates b = aggregate_run(events_for(part_b), outcomes_for(part_b), RateTable{}, 1.0);
    RunAggregates ab = aggregate_run(events_for(both), outcomes_for(both), RateTable{}, 1.0);

    EXPECT_EQ(*ab.tracebacks, *a.tracebacks + *b.tracebacks);
    EXPECT_EQ(*ab.timeout_mentions, *a.timeout_mentions + *b.timeout_mentions);
    EXPECT_EQ(*ab.tool_failure_mentions, *a.tool_failure_mentions + *b.tool_failure_mentions);
    EXPECT_EQ(*ab.attempts, *a.attempts + *b.attempts);
    EXPECT_EQ(*ab.missing_finals, *a.missing_finals + *b.missing_finals);
    EXPECT_EQ(ab.tokens->calls, a.tokens->calls + b.tokens->calls);
    EXPECT_EQ(ab.tokens->input_tokens, a.tokens->input_tokens + b.tokens->input_tokens);
    EXPECT_EQ(ab.tokens->output_tokens, a.tokens->output_tokens + b.tokens->output_tokens);
    EXPECT_EQ(ab.correct, a.correct + b.correct);
    EXPECT_EQ(ab.total, a.total + b.total);
}

TEST(AggregateRun, TaskOrderDoesNotMatter) {
    std::vector<StreamSpec> specs = {{0, true, 2, 1, 4, 2, 3, 10.0},
                                     {1, false, 1, 0, 2, 1, 2, 14.0},
                                     {2, true, 1, 3, 1, 0, 5, 6.0}};
    RunAggregates forward = aggregate_run(events_for(specs), outcomes_for(specs), RateTable{}, 9.0);
    std::vector<StreamSpec> reversed(specs.rbegin(), specs.rend());
    RunAggregates backward =
        aggregate_run(events_for(reversed), outcomes_for(reversed), RateTable{}, 9.0);
    EXPECT_EQ(forward, backward);
}

}  // namespace
}  // namespace evalgate
