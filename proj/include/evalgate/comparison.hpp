#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "evalgate/json_util.hpp"

namespace evalgate {

// Sanitized task-level movement between two runs. Counts only; no task
// identifiers or payload strings survive into this type.
struct TransitionCounts {
    std::uint64_t correct_to_wrong = 0;
    std::uint64_t wrong_to_correct = 0;
    std::uint64_t same_correct = 0;
    std::uint64_t same_wrong = 0;

    std::uint64_t sum() const {
        return correct_to_wrong + wrong_to_correct + same_correct + same_wrong;
    }
    friend bool operator==(const TransitionCounts&, const TransitionCounts&) = default;
};

struct TaskResult {
    std::uint64_t task_seq = 0;
    bool correct = false;
};

struct ComparisonResult {
    TransitionCounts transitions;
    std::uint64_t common = 0;
    // Tasks covered by only one run are excluded from the counts but
    // surfaced so coverage gaps are visible.
    std::uint64_t only_in_a = 0;
    std::uint64_t only_in_b = 0;
};

inline ComparisonResult compute_transitions(const std::vector<TaskResult>& a,
                                            const std::vector<TaskResult>& b) {
    std::unordered_map<std::uint64_t, bool> b_by_seq;
    b_by_seq.reserve(b.size());
    for (const auto& r : b) {
        if (!b_by_seq.emplace(r.task_seq, r.correct).second) {
            throw EvalError(ErrorKind::duplicate_task, std::to_string(r.task_seq));
        }
    }
    std::unordered_map<std::uint64_t, bool> a_by_seq;
    a_by_seq.reserve(a.size());
    ComparisonResult result;
    for (const auto& r : a) {
        if (!a_by_seq.emplace(r.task_seq, r.correct).second) {
            throw EvalError(ErrorKind::duplicate_task, std::to_string(r.task_seq));
        }
        auto it = b_by_seq.find(r.task_seq);
        if (it == b_by_seq.end()) {
            ++result.only_in_a;
            continue;
        }
        ++result.common;
        if (r.correct && it->second) {
            ++result.transitions.same_correct;
        } else if (r.correct && !it->second) {
            ++result.transitions.correct_to_wrong;
        } else if (!r.correct && it->second) {
            ++result.transitions.wrong_to_correct;
        } else {
            ++result.transitions.same_wrong;
        }
    }
    for (const auto& r : b) {
        if (!a_by_seq.contains(r.task_seq)) ++result.only_in_b;
    }
    return result;
}

struct ConsistencyVerdict {
    bool pass = false;
    std::vector<std::string> failed_identities;
};

// Cross-checks transition counts against independently reported run totals.
inline ConsistencyVerdict check_consistency(const TransitionCounts& t, std::uint64_t a_correct,
                                            std::uint64_t b_correct, std::uint64_t common) {
    ConsistencyVerdict verdict;
    if (t.sum() != common) verdict.failed_identities.push_back("common total");
    if (t.correct_to_wrong + t.same_correct != a_correct) {
        verdict.failed_identities.push_back("baseline identity");
    }
    if (t.wrong_to_correct + t.same_correct != b_correct) {
        verdict.failed_identities.push_back("candidate identity");
    }
    verdict.pass = verdict.failed_identities.empty();
    return verdict;
}

inline Json transitions_to_json(const TransitionCounts& t) {
    return Json{{"correct_to_wrong", t.correct_to_wrong},
                {"wrong_to_correct", t.wrong_to_correct},
                {"same_correct", t.same_correct},
                {"same_wrong", t.same_wrong}};
}

inline TransitionCounts transitions_from_json(const Json& j) {
    // Accept either a bare counts object or a comparison document wrapping
    // one under "transitions".
    const Json& src = j.contains("transitions") ? j.at("transitions") : j;
    TransitionCounts t;
    t.correct_to_wrong = require_uint(src, "correct_to_wrong");
    t.wrong_to_correct = require_uint(src, "wrong_to_correct");
    t.same_correct = require_uint(src, "same_correct");
    t.same_wrong = require_uint(src, "same_wrong");
    return t;
}

inline Json comparison_to_json(const ComparisonResult& c) {
    Json j;
    j["transitions"] = transitions_to_json(c.transitions);
    j["common"] = c.common;
    j["only_in_a"] = c.only_in_a;
    j["only_in_b"] = c.only_in_b;
    return j;
}

}  // namespace evalgate
