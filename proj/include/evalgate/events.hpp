#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "evalgate/json_util.hpp"

namespace evalgate {

// One record per line in an event log. Timestamps are seconds since run
// start and must be non-decreasing within a task's stream.
enum class EventType {
    attempt_start,
    tool_call,
    tool_error,
    traceback,
    timeout_mention,
    token_usage,
    final_answer,
    task_end,
};

inline const char* to_string(EventType type) {
    switch (type) {
        case EventType::attempt_start: return "attempt_start";
        case EventType::tool_call: return "tool_call";
        case EventType::tool_error: return "tool_error";
        case EventType::traceback: return "traceback";
        case EventType::timeout_mention: return "timeout_mention";
        case EventType::token_usage: return "token_usage";
        case EventType::final_answer: return "final_answer";
        case EventType::task_end: return "task_end";
    }
    return "unknown";
}

inline EventType event_type_from_string(const std::string& name) {
    if (name == "attempt_start") return EventType::attempt_start;
    if (name == "tool_call") return EventType::tool_call;
    if (name == "tool_error") return EventType::tool_error;
    if (name == "traceback") return EventType::traceback;
    if (name == "timeout_mention") return EventType::timeout_mention;
    if (name == "token_usage") return EventType::token_usage;
    if (name == "final_answer") return EventType::final_answer;
    if (name == "task_end") return EventType::task_end;
    throw EvalError(ErrorKind::unknown_event_type, name);
}

struct EventRecord {
    double ts = 0.0;
    std::uint64_t task_seq = 0;
    EventType event_type = EventType::attempt_start;
    Json payload = Json::object();
};

inline EventRecord parse_event_line(std::string_view line) {
    Json j = parse_json(line);
    if (!j.is_object()) {
        throw EvalError(ErrorKind::parse_error, "event line is not an object");
    }
    EventRecord rec;
    rec.ts = require_number(j, "ts");
    if (!std::isfinite(rec.ts) || rec.ts < 0.0) {
        throw EvalError(ErrorKind::parse_error, "ts must be a non-negative finite number");
    }
    rec.task_seq = require_uint(j, "task_seq");
    rec.event_type = event_type_from_string(require_nonempty_string(j, "event_type"));
    if (auto it = j.find("payload"); it != j.end()) {
        if (!it->is_object()) {
            throw EvalError(ErrorKind::parse_error, "payload must be an object");
        }
        rec.payload = *it;
    }
    if (rec.event_type == EventType::token_usage) {
        // Token counts are invariant-checked at the parse boundary so that
        // downstream accounting can assume non-negative integers.
        for (const char* key : {"input_tokens", "output_tokens"}) {
            auto it = rec.payload.find(key);
            if (it == rec.payload.end() || !it->is_number_unsigned()) {
                throw EvalError(ErrorKind::parse_error,
                                std::string(key) + " must be a non-negative integer");
            }
        }
    }
    return rec;
}

inline Json event_to_json(const EventRecord& rec) {
    Json j;
    j["ts"] = rec.ts;
    j["task_seq"] = rec.task_seq;
    j["event_type"] = to_string(rec.event_type);
    j["payload"] = rec.payload;
    return j;
}

inline std::string event_to_line(const EventRecord& rec) { return event_to_json(rec).dump(); }

inline std::vector<EventRecord> parse_event_log(std::istream& in) {
    std::vector<EventRecord> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            events.push_back(parse_event_line(line));
        } catch (const EvalError& e) {
            throw EvalError(e.kind(), "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return events;
}

inline void write_event_log(std::ostream& out, const std::vector<EventRecord>& events) {
    for (const auto& rec : events) {
        out << event_to_line(rec) << '\n';
    }
}

}  // namespace evalgate
