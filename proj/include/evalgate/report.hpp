#pragma once

#include <cstdint>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "evalgate/aggregates.hpp"
#include "evalgate/comparison.hpp"
#include "evalgate/gates.hpp"
#include "evalgate/numeric.hpp"

namespace evalgate {

inline constexpr const char* kCostNote =
    "cost figures are operational estimates derived from campaign logs, not billing statements";

struct ReportRun {
    std::string label;
    bool diagnostic = false;  // smoke runs must carry this label
    std::string manifest_hash;
    RunAggregates aggregates;
};

struct ReportInputs {
    std::vector<ReportRun> runs;
    std::optional<ComparisonResult> movement;
    std::optional<ConsistencyVerdict> consistency;
    std::vector<std::pair<std::string, GateVerdict>> gates;
    std::string notes;  // caller-screened free text
};

struct RenderedReport {
    std::string machine;
    std::string table;
};

namespace report_detail {

inline std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

inline std::string column_title(const ReportRun& run) {
    return run.diagnostic ? run.label + " [diagnostic]" : run.label;
}

struct MetricRow {
    std::string name;
    std::vector<std::string> cells;
};

inline std::vector<MetricRow> metric_rows(const std::vector<ReportRun>& runs) {
    auto count_cell = [](const std::optional<std::uint64_t>& v) {
        return v ? fmt_count(*v) : std::string("-");
    };
    auto money_cell = [](const std::optional<double>& v) {
        return v ? fmt_fixed(*v, 2) : std::string("-");
    };
    std::vector<MetricRow> rows = {
        {"correct/total", {}},        {"accuracy_pct", {}},
        {"elapsed_s", {}},            {"avg_task_s", {}},
        {"attempts", {}},             {"missing_finals", {}},
        {"tracebacks", {}},           {"timeout_mentions", {}},
        {"tool_failure_mentions", {}},{"token_calls", {}},
        {"input_tokens", {}},         {"output_tokens", {}},
        {"entropy_score", {}},        {"priority_cost_usd", {}},
        {"standard_cost_usd", {}},
    };
    for (const auto& run : runs) {
        const RunAggregates& a = run.aggregates;
        std::size_t i = 0;
        rows[i++].cells.push_back(fmt_count(a.correct) + "/" + fmt_count(a.total));
        rows[i++].cells.push_back(a.total > 0 ? fmt_fixed(a.accuracy_pct(), 2) : "-");
        rows[i++].cells.push_back(fmt_fixed(a.elapsed_s, 2));
        rows[i++].cells.push_back(fmt_fixed(a.avg_task_s, 2));
        rows[i++].cells.push_back(count_cell(a.attempts));
        rows[i++].cells.push_back(count_cell(a.missing_finals));
        rows[i++].cells.push_back(count_cell(a.tracebacks));
        rows[i++].cells.push_back(count_cell(a.timeout_mentions));
        rows[i++].cells.push_back(count_cell(a.tool_failure_mentions));
        rows[i++].cells.push_back(a.tokens ? fmt_count(a.tokens->calls) : "-");
        rows[i++].cells.push_back(a.tokens ? fmt_count(a.tokens->input_tokens) : "-");
        rows[i++].cells.push_back(a.tokens ? fmt_count(a.tokens->output_tokens) : "-");
        rows[i++].cells.push_back(a.entropy_score ? fmt_fixed(*a.entropy_score, 4) : "-");
        rows[i++].cells.push_back(money_cell(a.priority_cost));
        rows[i++].cells.push_back(money_cell(a.standard_cost));
    }
    return rows;
}

}  // namespace report_detail

inline RenderedReport render_report(const ReportInputs& inputs) {
    using namespace report_detail;
    RenderedReport out;

    // Machine-readable document.
    Json machine;
    machine["kind"] = "evalgate_report";
    machine["cost_note"] = kCostNote;
    Json runs = Json::array();
    for (const auto& run : inputs.runs) {
        Json r;
        r["label"] = run.label;
        r["diagnostic"] = run.diagnostic;
        if (!run.manifest_hash.empty()) r["manifest_hash"] = run.manifest_hash;
        r["aggregates"] = aggregates_to_json(run.aggregates);
        if (run.aggregates.total > 0) r["accuracy_pct"] = run.aggregates.accuracy_pct();
        runs.push_back(r);
    }
    machine["runs"] = runs;
    if (inputs.movement) machine["movement"] = comparison_to_json(*inputs.movement);
    if (inputs.consistency) {
        machine["consistency"] = Json{{"pass", inputs.consistency->pass},
                                      {"failed_identities", inputs.consistency->failed_identities}};
    }
    if (!inputs.gates.empty()) {
        Json gates = Json::array();
        for (const auto& [label, verdict] : inputs.gates) {
            Json g = gate_verdict_to_json(verdict);
            g["label"] = label;
            gates.push_back(g);
        }
        machine["gates"] = gates;
    }
    if (!inputs.notes.empty()) machine["notes"] = inputs.notes;
    out.machine = machine.dump(2) + "\n";

    // Human-readable table, metric rows by run columns.
    std::string t;
    if (!inputs.runs.empty()) {
        t += "run telemetry\n";
        std::vector<std::size_t> widths;
        std::string header = pad("  metric", 26);
        for (const auto& run : inputs.runs) {
            std::size_t w = std::max<std::size_t>(column_title(run).size() + 2, 14);
            widths.push_back(w);
            header += pad(column_title(run), w);
        }
        t += header + "\n";
        for (const auto& row : metric_rows(inputs.runs)) {
            std::string line = pad("  " + row.name, 26);
            for (std::size_t c = 0; c < row.cells.size(); ++c) {
                line += pad(row.cells[c], widths[c]);
            }
            t += line + "\n";
        }
        t += "  note: " + std::string(kCostNote) + "\n";
    }
    if (inputs.movement) {
        const auto& m = *inputs.movement;
        t += "\ntask movement (over common tasks)\n";
        t += "  correct_to_wrong      " + fmt_count(m.transitions.correct_to_wrong) + "\n";
        t += "  wrong_to_correct      " + fmt_count(m.transitions.wrong_to_correct) + "\n";
        t += "  same_correct          " + fmt_count(m.transitions.same_correct) + "\n";
        t += "  same_wrong            " + fmt_count(m.transitions.same_wrong) + "\n";
        t += "  common                " + fmt_count(m.common) + "\n";
        t += "  only_in_a             " + fmt_count(m.only_in_a) + "\n";
        t += "  only_in_b             " + fmt_count(m.only_in_b) + "\n";
    }
    if (inputs.consistency) {
        std::string status = inputs.consistency->pass ? "pass" : "fail:";
        for (const auto& f : inputs.consistency->failed_identities) status += " " + f + ";";
        t += "  consistency           " + status + "\n";
    }
    for (const auto& [label, verdict] : inputs.gates) {
        t += "\ngate " + label + ": " + (verdict.pass ? "PASS" : "FAIL") + "\n";
        t += pad("  criterion", 46) + pad("required", 22) + pad("observed", 16) + "ok\n";
        for (const auto& c : verdict.criteria) {
            t += pad("  " + c.name, 46) + pad(c.required, 22) + pad(c.observed, 16) +
                 (c.satisfied ? "yes" : "NO") + "\n";
        }
    }
    if (!inputs.notes.empty()) {
        t += "\nnotes\n  " + inputs.notes + "\n";
    }
    if (!t.empty() && t.front() == '\n') t.erase(0, 1);
    out.table = t;
    return out;
}

struct RedactViolation {
    std::string kind;   // url, deny_field, trace_marker
    std::string token;
    std::size_t position = 0;
};

// Conservative pattern scan over a rendered document. False positives are
// acceptable; a missed leak is a bug.
inline std::vector<RedactViolation> redact_check(std::string_view document) {
    static const std::regex url_pattern(R"((https?://|www\.))", std::regex::icase);
    static const std::regex deny_pattern(
        R"((^|[^A-Za-z0-9_])(task_text|task_id|gold|prediction|attachment|trace)($|[^A-Za-z0-9_]))",
        std::regex::icase);
    static const std::regex marker_pattern(
        R"(Traceback \(most recent call last|\n  File "|stack trace:)", std::regex::icase);

    std::vector<RedactViolation> violations;
    std::string text(document);
    auto scan = [&](const std::regex& pattern, const char* kind, int group) {
        for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern);
             it != std::sregex_iterator(); ++it) {
            violations.push_back({kind, it->str(group),
                                  static_cast<std::size_t>(it->position(group))});
        }
    };
    scan(url_pattern, "url", 0);
    scan(deny_pattern, "deny_field", 2);
    scan(marker_pattern, "trace_marker", 0);
    return violations;
}

}  // namespace evalgate
