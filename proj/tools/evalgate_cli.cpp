// evalgate command-line front end: manifest freezing and verification, event
// aggregation, run comparison, launch/recovery/provider gates, answer
// canonicalization, storm detection, simulation, and sanitized reporting.
//
// Exit codes: 0 success or gate pass, 1 gate fail or invalid verdict,
// 2 usage or input error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "evalgate/canonicalizer.hpp"
#include "evalgate/comparison.hpp"
#include "evalgate/gates.hpp"
#include "evalgate/report.hpp"
#include "evalgate/retry_policy.hpp"
#include "evalgate/sim_agent.hpp"
#include "evalgate/telemetry.hpp"

namespace {

using namespace evalgate;

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        write_text_file(output_path, text);
    }
}

Json load_json_file(const std::string& path) { return parse_json(read_text_file(path)); }

std::vector<EventRecord> load_events_file(const std::string& path) {
    std::istringstream stream(read_text_file(path));
    return parse_event_log(stream);
}

// Accepts either a bare aggregates document or a run record carrying one.
RunAggregates load_aggregates_file(const std::string& path) {
    Json j = load_json_file(path);
    if (j.contains("aggregates")) return aggregates_from_json(j.at("aggregates"));
    return aggregates_from_json(j);
}

std::pair<std::string, std::string> split_label_path(const std::string& spec) {
    auto pos = spec.find('=');
    if (pos == std::string::npos || pos == 0 || pos + 1 >= spec.size()) {
        throw EvalError(ErrorKind::invalid_config, "expected label=path, got: " + spec);
    }
    return {spec.substr(0, pos), spec.substr(pos + 1)};
}

GateConfig load_gate_config(const std::string& path) {
    if (path.empty()) return GateConfig{};
    return gate_config_from_json(load_json_file(path));
}

std::string gate_table(const std::string& label, const GateVerdict& verdict) {
    ReportInputs inputs;
    inputs.gates.push_back({label, verdict});
    return render_report(inputs).table;
}

int run_gate_output(const std::string& label, const GateVerdict& verdict,
                    const std::string& format, const std::string& output_path) {
    if (format == "machine") {
        Json j = gate_verdict_to_json(verdict);
        j["label"] = label;
        emit(j.dump(2), output_path);
    } else {
        emit(gate_table(label, verdict), output_path);
    }
    return verdict.pass ? 0 : 1;
}

std::optional<IntegrityVerdict> integrity_precheck(const std::string& manifest_path,
                                                   const std::string& run_path) {
    if (manifest_path.empty() && run_path.empty()) return std::nullopt;
    if (manifest_path.empty() || run_path.empty()) {
        throw EvalError(ErrorKind::invalid_config, "--manifest and --run must be given together");
    }
    RunManifest manifest = manifest_from_json(load_json_file(manifest_path));
    RunRecord run = run_record_from_json(load_json_file(run_path));
    return verify_run_integrity(manifest, run);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evalgate: reliability harness for agent evaluation campaigns"};
    app.require_subcommand(1);

    // Data commands emit machine documents by default; gates and reports
    // default to the human-readable table.
    std::string format;
    std::string output_path;
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"table", "machine"}));
    app.add_option("--output", output_path, "Write the main document to this file");
    auto resolved_format = [&format](const char* fallback) {
        return format.empty() ? std::string(fallback) : format;
    };

    int rc = 0;

    // manifest freeze / verify
    auto* manifest_cmd = app.add_subcommand("manifest", "Freeze and verify run manifests");
    manifest_cmd->require_subcommand(1);

    std::string draft_path;
    auto* freeze_cmd = manifest_cmd->add_subcommand("freeze", "Freeze a draft manifest");
    freeze_cmd->add_option("draft", draft_path, "Draft manifest JSON file")->required();
    freeze_cmd->callback([&] {
        Json draft = load_json_file(draft_path);
        draft.erase("frozen_hash");
        RunManifest frozen = freeze_manifest(manifest_from_json(draft));
        emit(manifest_file_text(frozen), output_path);
    });

    std::string verify_manifest_path, verify_run_path;
    std::uint64_t expected_total = 0;
    bool have_expected = false;
    auto* verify_cmd = manifest_cmd->add_subcommand("verify", "Verify a run against a manifest");
    verify_cmd->add_option("manifest", verify_manifest_path, "Frozen manifest file")->required();
    verify_cmd->add_option("run", verify_run_path, "Run record file")->required();
    verify_cmd->add_option("--expected-total", expected_total, "Also check completeness")
        ->each([&](const std::string&) { have_expected = true; });
    verify_cmd->callback([&] {
        RunManifest manifest = manifest_from_json(load_json_file(verify_manifest_path));
        RunRecord run = run_record_from_json(load_json_file(verify_run_path));
        IntegrityVerdict verdict = verify_run_integrity(manifest, run);
        Json j{{"valid", verdict.valid}, {"reasons", verdict.reasons}};
        bool ok = verdict.valid;
        if (have_expected) {
            CompletenessVerdict completeness = validate_completeness(run, expected_total);
            j["completeness"] = {{"complete", completeness.complete},
                                 {"missing_finals", completeness.missing_finals}};
            ok = ok && completeness.complete;
        }
        if (resolved_format("machine") == "machine") {
            emit(j.dump(2), output_path);
        } else {
            std::string t = std::string("integrity: ") + (verdict.valid ? "valid" : "invalid");
            for (const auto& r : verdict.reasons) t += "\n  reason: " + r;
            if (have_expected) {
                t += std::string("\ncompleteness: ") +
                     (j["completeness"]["complete"].get<bool>() ? "complete" : "incomplete") +
                     " (missing finals: " +
                     std::to_string(j["completeness"]["missing_finals"].get<std::uint64_t>()) +
                     ")";
            }
            emit(t, output_path);
        }
        rc = ok ? 0 : 1;
    });

    // aggregate
    std::string events_path, run_path, rates_path;
    auto* aggregate_cmd =
        app.add_subcommand("aggregate", "Aggregate an event log against a run record");
    aggregate_cmd->add_option("events", events_path, "Event log (one JSON object per line)")
        ->required();
    aggregate_cmd->add_option("outcomes", run_path, "Run record file with outcomes")->required();
    aggregate_cmd->add_option("--rates", rates_path, "Rate table JSON file");
    aggregate_cmd->callback([&] {
        RunRecord run = run_record_from_json(load_json_file(run_path));
        RateTable rates =
            rates_path.empty() ? RateTable{} : rate_table_from_json(load_json_file(rates_path));
        RunAggregates agg = aggregate_run(load_events_file(events_path), run, rates);
        if (resolved_format("machine") == "machine") {
            emit(aggregates_to_json(agg).dump(2), output_path);
        } else {
            ReportInputs inputs;
            inputs.runs.push_back({std::filesystem::path(run_path).stem().string(), false,
                                   run.manifest_hash, agg});
            emit(render_report(inputs).table, output_path);
        }
    });

    // compare
    std::string run_a_path, run_b_path;
    auto* compare_cmd = app.add_subcommand("compare", "Task-level movement between two runs");
    compare_cmd->add_option("run-a", run_a_path, "First run record")->required();
    compare_cmd->add_option("run-b", run_b_path, "Second run record")->required();
    compare_cmd->callback([&] {
        RunRecord a = run_record_from_json(load_json_file(run_a_path));
        RunRecord b = run_record_from_json(load_json_file(run_b_path));
        ComparisonResult result = compute_transitions(task_results(a), task_results(b));
        auto correct_count = [](const RunRecord& r) {
            std::uint64_t n = 0;
            for (const auto& o : r.outcomes) n += o.correct ? 1 : 0;
            return n;
        };
        ConsistencyVerdict consistency = check_consistency(
            result.transitions, correct_count(a), correct_count(b), result.common);
        if (resolved_format("machine") == "machine") {
            Json j = comparison_to_json(result);
            j["consistency"] = {{"pass", consistency.pass},
                                {"failed_identities", consistency.failed_identities}};
            emit(j.dump(2), output_path);
        } else {
            ReportInputs inputs;
            inputs.movement = result;
            inputs.consistency = consistency;
            emit(render_report(inputs).table, output_path);
        }
        rc = consistency.pass ? 0 : 1;
    });

    // gate smoke | recovery | provider
    auto* gate_cmd = app.add_subcommand("gate", "Run launch/acceptance gates");
    gate_cmd->require_subcommand(1);

    std::string gate_config_path, gate_manifest_path, gate_run_path;
    std::string smoke_path, reference_path;
    auto* smoke_cmd = gate_cmd->add_subcommand("smoke", "Smoke launch gate");
    smoke_cmd->add_option("smoke", smoke_path, "Smoke run aggregates")->required();
    smoke_cmd->add_option("reference", reference_path, "Reference run aggregates")->required();
    smoke_cmd->add_option("--config", gate_config_path, "GateConfig JSON file");
    smoke_cmd->add_option("--manifest", gate_manifest_path, "Candidate manifest for integrity");
    smoke_cmd->add_option("--run", gate_run_path, "Candidate run record for integrity");
    smoke_cmd->callback([&] {
        GateVerdict verdict =
            evaluate_smoke_gate(load_aggregates_file(smoke_path),
                                load_aggregates_file(reference_path),
                                load_gate_config(gate_config_path));
        if (auto integrity = integrity_precheck(gate_manifest_path, gate_run_path)) {
            verdict = with_integrity_precheck(*integrity, verdict);
        }
        rc = run_gate_output("smoke", verdict, resolved_format("table"), output_path);
    });

    std::string candidate_path, baseline_path, v1_path, movement_path, v1_movement_path;
    auto* recovery_cmd = gate_cmd->add_subcommand("recovery", "Recovery-v2 success gate");
    recovery_cmd->add_option("candidate", candidate_path, "Candidate run aggregates")->required();
    recovery_cmd->add_option("baseline", baseline_path, "Baseline run aggregates")->required();
    recovery_cmd->add_option("recovery-v1", v1_path, "Recovery v1 aggregates")->required();
    recovery_cmd->add_option("--movement", movement_path,
                             "Candidate-vs-baseline transition counts");
    recovery_cmd->add_option("--v1-movement", v1_movement_path,
                             "V1-vs-baseline transition counts");
    recovery_cmd->add_option("--config", gate_config_path, "GateConfig JSON file");
    recovery_cmd->add_option("--manifest", gate_manifest_path, "Candidate manifest for integrity");
    recovery_cmd->add_option("--run", gate_run_path, "Candidate run record for integrity");
    recovery_cmd->callback([&] {
        std::optional<TransitionCounts> movement, v1_movement;
        if (!movement_path.empty()) {
            movement = transitions_from_json(load_json_file(movement_path));
        }
        if (!v1_movement_path.empty()) {
            v1_movement = transitions_from_json(load_json_file(v1_movement_path));
        }
        GateVerdict verdict = evaluate_recovery_v2_gate(
            load_aggregates_file(candidate_path), load_aggregates_file(baseline_path),
            load_aggregates_file(v1_path), movement, v1_movement,
            load_gate_config(gate_config_path));
        if (auto integrity = integrity_precheck(gate_manifest_path, gate_run_path)) {
            verdict = with_integrity_precheck(*integrity, verdict);
        }
        rc = run_gate_output("recovery", verdict, resolved_format("table"), output_path);
    });

    std::string probes_path, route_override, primary_override;
    auto* provider_cmd = gate_cmd->add_subcommand("provider", "Provider health gate");
    provider_cmd->add_option("probes", probes_path, "Probe results JSON file")->required();
    provider_cmd->add_option("--route", route_override, "Search route")
        ->check(CLI::IsMember({"strict_primary", "primary_with_fallback"}));
    provider_cmd->add_option("--primary", primary_override, "Primary provider name");
    provider_cmd->callback([&] {
        Json j = load_json_file(probes_path);
        std::vector<ProviderProbeResult> probes;
        for (const auto& p : require_field(j, "probes")) {
            probes.push_back({p.at("provider").get<std::string>(),
                              provider_status_from_string(p.at("status").get<std::string>()),
                              p.value("probe_ts", 0.0)});
        }
        std::string primary =
            !primary_override.empty() ? primary_override : j.value("primary", "");
        if (primary.empty()) {
            throw EvalError(ErrorKind::invalid_config,
                            "primary provider missing (file key \"primary\" or --primary)");
        }
        std::string route_name =
            !route_override.empty() ? route_override : j.value("route", "");
        if (route_name.empty()) {
            throw EvalError(ErrorKind::invalid_config,
                            "search route missing (file key \"route\" or --route)");
        }
        GateVerdict verdict =
            provider_health_gate(probes, search_route_from_string(route_name), primary);
        rc = run_gate_output("provider", verdict, resolved_format("table"), output_path);
    });

    // canon
    std::string shape_name, raw_answer, units_path;
    bool list_unordered = false;
    auto* canon_cmd = app.add_subcommand("canon", "Canonicalize a final answer");
    canon_cmd->add_option("shape", shape_name, "number|date|list|string|number_with_unit")
        ->required();
    canon_cmd->add_option("raw", raw_answer, "Raw answer text")->required();
    canon_cmd->add_flag("--unordered", list_unordered, "Treat list order as insignificant");
    canon_cmd->add_option("--units", units_path,
                          "JSON object of extra unit tokens: {\"token\": \"SYMBOL\"}");
    canon_cmd->callback([&] {
        AnswerShape shape{answer_kind_from_string(shape_name), !list_unordered};
        UnitTable units = default_unit_table();
        if (!units_path.empty()) {
            for (const auto& [token, symbol] : load_json_file(units_path).items()) {
                units[token] = symbol.get<std::string>();
            }
        }
        emit(canonicalize(raw_answer, shape, units).canonical_text, output_path);
    });

    // storms
    std::string storm_events_path, budget_path;
    auto* storms_cmd = app.add_subcommand("storms", "Detect retry storms in an event log");
    storms_cmd->add_option("events", storm_events_path, "Event log file")->required();
    storms_cmd->add_option("--config", budget_path, "Retry budget JSON file");
    storms_cmd->callback([&] {
        RetryBudget budget = budget_path.empty()
                                 ? RetryBudget{}
                                 : retry_budget_from_json(load_json_file(budget_path));
        auto flags = detect_retry_storm(load_events_file(storm_events_path), budget);
        if (resolved_format("machine") == "machine") {
            Json j = Json::array();
            for (const auto& f : flags) {
                j.push_back({{"task_seq", f.task_seq},
                             {"tool", f.tool},
                             {"class", to_string(f.label)},
                             {"count", f.count}});
            }
            emit(j.dump(2), output_path);
        } else {
            std::string t = "retry storms (threshold " +
                            std::to_string(budget.storm_threshold) + ")\n";
            for (const auto& f : flags) {
                t += "  task " + std::to_string(f.task_seq) + " tool " +
                     (f.tool.empty() ? "(none)" : f.tool) + " class " + to_string(f.label) +
                     " count " + std::to_string(f.count) + "\n";
            }
            if (flags.empty()) t += "  none\n";
            emit(t, output_path);
        }
    });

    // simulate
    std::string sim_config_path, sim_prefix = "sim";
    std::uint64_t sim_seed = 0;
    bool have_seed = false;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the seeded executor model");
    simulate_cmd->add_option("--config", sim_config_path, "SimConfig JSON file")->required();
    simulate_cmd->add_option("--seed", sim_seed, "Override the config seed")
        ->each([&](const std::string&) { have_seed = true; });
    simulate_cmd->add_option("--prefix", sim_prefix,
                             "Output prefix for .events.ndjson/.run.json/.manifest.json");
    simulate_cmd->callback([&] {
        SimConfig cfg = sim_config_from_json(load_json_file(sim_config_path));
        if (have_seed) cfg.seed = sim_seed;
        SimResult sim = simulate_run(cfg);
        std::ostringstream events;
        write_event_log(events, sim.events);
        write_text_file(sim_prefix + ".events.ndjson", events.str());
        write_text_file(sim_prefix + ".run.json", run_record_to_json(sim.record).dump(2) + "\n");
        write_text_file(sim_prefix + ".manifest.json", manifest_file_text(sim.manifest) + "\n");
        if (resolved_format("machine") == "machine") {
            emit(aggregates_to_json(*sim.record.aggregates).dump(2), output_path);
        } else {
            ReportInputs inputs;
            inputs.runs.push_back(
                {"simulated", false, sim.record.manifest_hash, *sim.record.aggregates});
            emit(render_report(inputs).table, output_path);
        }
    });

    // report
    std::vector<std::string> run_specs, smoke_labels, verdict_specs;
    std::string transitions_path, notes;
    auto* report_cmd = app.add_subcommand("report", "Render a sanitized aggregate report");
    report_cmd->add_option("--run", run_specs, "label=aggregates-or-run-record-file (repeat)")
        ->required();
    report_cmd->add_option("--smoke", smoke_labels, "Mark a run label as a diagnostic smoke run");
    report_cmd->add_option("--transitions", transitions_path, "Comparison document to include");
    report_cmd->add_option("--verdict", verdict_specs, "label=gate-verdict-file (repeat)");
    report_cmd->add_option("--notes", notes, "Screened free-text notes");
    report_cmd->callback([&] {
        ReportInputs inputs;
        for (const auto& spec : run_specs) {
            auto [label, path] = split_label_path(spec);
            Json j = load_json_file(path);
            ReportRun run;
            run.label = label;
            run.diagnostic = std::find(smoke_labels.begin(), smoke_labels.end(), label) !=
                             smoke_labels.end();
            run.manifest_hash = j.value("manifest_hash", "");
            run.aggregates = aggregates_from_json(j.contains("aggregates") ? j.at("aggregates") : j);
            inputs.runs.push_back(std::move(run));
        }
        if (!transitions_path.empty()) {
            Json j = load_json_file(transitions_path);
            ComparisonResult movement;
            movement.transitions = transitions_from_json(j);
            movement.common = j.value("common", movement.transitions.sum());
            movement.only_in_a = j.value("only_in_a", 0u);
            movement.only_in_b = j.value("only_in_b", 0u);
            inputs.movement = movement;
            if (j.contains("consistency")) {
                ConsistencyVerdict consistency;
                consistency.pass = j["consistency"].value("pass", false);
                consistency.failed_identities =
                    j["consistency"].value("failed_identities", std::vector<std::string>{});
                inputs.consistency = consistency;
            }
        }
        for (const auto& spec : verdict_specs) {
            auto [label, path] = split_label_path(spec);
            inputs.gates.push_back({label, gate_verdict_from_json(load_json_file(path))});
        }
        inputs.notes = notes;
        RenderedReport rendered = render_report(inputs);
        emit(resolved_format("table") == "machine" ? rendered.machine : rendered.table,
             output_path);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const EvalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}
