#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "evalgate/json_util.hpp"
#include "evalgate/sim_agent.hpp"

namespace evalgate {
namespace {

const std::string kCli = EVALGATE_CLI_PATH;
const std::filesystem::path kFixtureDir = EVALGATE_FIXTURE_DIR;

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    std::string command = kCli + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    CliResult result;
    char buffer[4096];
    std::size_t n;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, n);
    }
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string fixture(const std::string& name) { return (kFixtureDir / name).string(); }

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::path(testing::TempDir()) / name;
}

TEST(Cli, ManifestFreezeIsDeterministic) {
    Json draft = parse_json(read_text_file(fixture("baseline.manifest.json")));
    draft.erase("frozen_hash");
    auto draft_path = temp_path("draft.json");
    write_text_file(draft_path, draft.dump());

    CliResult a = run_cli("manifest freeze " + draft_path.string());
    CliResult b = run_cli("manifest freeze " + draft_path.string());
    EXPECT_EQ(a.exit_code, 0) << a.output;
    EXPECT_EQ(a.output, b.output);
    Json frozen = parse_json(a.output);
    EXPECT_EQ(frozen.at("frozen_hash"),
              parse_json(read_text_file(fixture("baseline.manifest.json"))).at("frozen_hash"));
}

TEST(Cli, ManifestFreezeMissingFieldExitsWithError) {
    Json draft = parse_json(read_text_file(fixture("baseline.manifest.json")));
    draft.erase("frozen_hash");
    draft.erase("scorer_hash");
    auto draft_path = temp_path("draft_missing.json");
    write_text_file(draft_path, draft.dump());
    CliResult r = run_cli("manifest freeze " + draft_path.string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("scorer_hash"), std::string::npos);
}

TEST(Cli, ManifestVerifyPassesForFixture) {
    CliResult r = run_cli("manifest verify " + fixture("baseline.manifest.json") + " " +
                          fixture("baseline.run.json") + " --expected-total 53");
    EXPECT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("valid"), std::string::npos);
}

TEST(Cli, ManifestVerifyFailsOnTamperedRun) {
    Json run = parse_json(read_text_file(fixture("baseline.run.json")));
    run["outcomes"].push_back(run["outcomes"][0]);  // duplicate task_seq = rerun
    auto run_path = temp_path("tampered_run.json");
    write_text_file(run_path, run.dump());
    CliResult r = run_cli("manifest verify " + fixture("baseline.manifest.json") + " " +
                          run_path.string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("rerun detected"), std::string::npos);
}

TEST(Cli, AggregateReproducesFixtureCounters) {
    CliResult r = run_cli("--format machine aggregate " + fixture("baseline.events.ndjson") +
                          " " + fixture("baseline.run.json"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    Json agg = parse_json(r.output);
    EXPECT_EQ(agg["noise"]["tracebacks"], 62);
    EXPECT_EQ(agg["noise"]["timeout_mentions"], 769);
    EXPECT_EQ(agg["noise"]["tool_failure_mentions"], 170);
    EXPECT_EQ(agg["noise"]["attempts"], 57);
    EXPECT_EQ(agg["correct"], 29);
}

TEST(Cli, CompareEmitsTransitionsAndConsistency) {
    CliResult r = run_cli("--format machine compare " + fixture("baseline.run.json") + " " +
                          fixture("recovery_v1.run.json"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    Json j = parse_json(r.output);
    EXPECT_EQ(j["transitions"]["correct_to_wrong"], 6);
    EXPECT_EQ(j["transitions"]["wrong_to_correct"], 4);
    EXPECT_EQ(j["transitions"]["same_correct"], 23);
    EXPECT_EQ(j["transitions"]["same_wrong"], 20);
    EXPECT_EQ(j["common"], 53);
    EXPECT_TRUE(j["consistency"]["pass"].get<bool>());
}

TEST(Cli, SmokeGatePassesAndFailsPerFixture) {
    CliResult pass = run_cli("gate smoke " + fixture("smoke_positive.run.json") + " " +
                             fixture("baseline.run.json"));
    EXPECT_EQ(pass.exit_code, 0) << pass.output;
    EXPECT_NE(pass.output.find("PASS"), std::string::npos);

    CliResult fail = run_cli("gate smoke " + fixture("smoke_subsequent.run.json") + " " +
                             fixture("baseline.run.json"));
    EXPECT_EQ(fail.exit_code, 1);
    EXPECT_NE(fail.output.find("FAIL"), std::string::npos);
    EXPECT_NE(fail.output.find("tracebacks"), std::string::npos);
}

TEST(Cli, RecoveryGateShowsPerCriterionTable) {
    auto movement_path = temp_path("movement.json");
    write_text_file(movement_path,
                    transitions_to_json(TransitionCounts{6, 4, 23, 20}).dump());
    CliResult r = run_cli("gate recovery " + fixture("recovery_v1.run.json") + " " +
                          fixture("baseline.run.json") + " " + fixture("recovery_v1.run.json") +
                          " --movement " + movement_path.string() + " --v1-movement " +
                          movement_path.string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("accuracy > baseline"), std::string::npos);
    EXPECT_NE(r.output.find("NO"), std::string::npos);
}

TEST(Cli, GateRejectsRunThatFailsIntegrity) {
    Json run = parse_json(read_text_file(fixture("smoke_positive.run.json")));
    run["outcomes"].push_back(run["outcomes"][0]);
    auto run_path = temp_path("integrity_run.json");
    write_text_file(run_path, run.dump());
    CliResult r = run_cli("gate smoke " + fixture("smoke_positive.run.json") + " " +
                          fixture("baseline.run.json") + " --manifest " +
                          fixture("smoke_positive.manifest.json") + " --run " +
                          run_path.string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("run integrity"), std::string::npos);
}

TEST(Cli, ProviderGateRoutes) {
    Json probes{{"primary", "bing"},
                {"route", "strict_primary"},
                {"probes", Json::array({Json{{"provider", "bing"}, {"status", "healthy"},
                                             {"probe_ts", 1.0}},
                                        Json{{"provider", "fallback-search"},
                                             {"status", "rate_limited"},
                                             {"probe_ts", 2.0}}})}};
    auto probes_path = temp_path("probes.json");
    write_text_file(probes_path, probes.dump());
    EXPECT_EQ(run_cli("gate provider " + probes_path.string()).exit_code, 0);
    EXPECT_EQ(run_cli("gate provider " + probes_path.string() +
                      " --route primary_with_fallback")
                  .exit_code,
              1);
}

TEST(Cli, CanonPrintsCanonicalText) {
    CliResult r = run_cli("canon number \"1,234.50\"");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.output, "1234.5\n");
    CliResult date = run_cli("canon date \"March 5, 2021\"");
    EXPECT_EQ(date.output, "2021-03-05\n");
    CliResult ambiguous = run_cli("canon date 01/02/2021");
    EXPECT_EQ(ambiguous.exit_code, 2);
    EXPECT_NE(ambiguous.output.find("ambiguous_date"), std::string::npos);
    CliResult unordered = run_cli("canon list \"c, b, a\" --unordered");
    EXPECT_EQ(unordered.output, "a;b;c\n");
}

TEST(Cli, CanonAcceptsExtraUnitTokens) {
    auto units_path = temp_path("units.json");
    write_text_file(units_path, R"({"parsec": "pc", "parsecs": "pc"})");
    CliResult without = run_cli("canon number_with_unit \"3 parsecs\"");
    EXPECT_EQ(without.exit_code, 2);
    CliResult with_units =
        run_cli("canon number_with_unit \"3 parsecs\" --units " + units_path.string());
    EXPECT_EQ(with_units.exit_code, 0);
    EXPECT_EQ(with_units.output, "3 pc\n");
}

TEST(Cli, StormsFlagsRepeatedFailures) {
    CliResult r = run_cli("--format machine storms " + fixture("baseline.events.ndjson"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    Json flags = parse_json(r.output);
    ASSERT_TRUE(flags.is_array());
    EXPECT_FALSE(flags.empty());  // every baseline task repeats timeouts on one tool
    EXPECT_EQ(flags[0]["class"], "execution_timeout");
}

TEST(Cli, SimulateWritesDeterministicArtifacts) {
    SimConfig cfg;
    cfg.task_count = 4;
    cfg.tool_failure_rate = 0.4;
    cfg.nonretryable_fraction = 1.0;
    cfg.retry_budget = {2, 2, 3};
    cfg.tokens_per_call = {800, 90};
    cfg.seed = 11;
    auto cfg_path = temp_path("sim_config.json");
    write_text_file(cfg_path, sim_config_to_json(cfg).dump());
    auto prefix_a = temp_path("sim_a");
    auto prefix_b = temp_path("sim_b");
    CliResult a = run_cli("simulate --config " + cfg_path.string() + " --prefix " +
                          prefix_a.string());
    CliResult b = run_cli("simulate --config " + cfg_path.string() + " --prefix " +
                          prefix_b.string());
    ASSERT_EQ(a.exit_code, 0) << a.output;
    ASSERT_EQ(b.exit_code, 0) << b.output;
    EXPECT_EQ(read_text_file(prefix_a.string() + ".events.ndjson"),
              read_text_file(prefix_b.string() + ".events.ndjson"));
    EXPECT_EQ(read_text_file(prefix_a.string() + ".run.json"),
              read_text_file(prefix_b.string() + ".run.json"));
    // Seed override must change the stream.
    CliResult c = run_cli("simulate --config " + cfg_path.string() + " --prefix " +
                          prefix_a.string() + " --seed 12");
    ASSERT_EQ(c.exit_code, 0) << c.output;
    EXPECT_NE(read_text_file(prefix_a.string() + ".events.ndjson"),
              read_text_file(prefix_b.string() + ".events.ndjson"));
}

TEST(Cli, ReportRendersFixtureSummary) {
    auto movement_path = temp_path("report_movement.json");
    CliResult cmp = run_cli("--format machine compare " + fixture("baseline.run.json") + " " +
                            fixture("recovery_v1.run.json"));
    write_text_file(movement_path, cmp.output);
    CliResult r = run_cli("report --run baseline=" + fixture("baseline.run.json") +
                          " --run recovery_v1=" + fixture("recovery_v1.run.json") +
                          " --run smoke_positive=" + fixture("smoke_positive.run.json") +
                          " --smoke smoke_positive --transitions " + movement_path.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("54.72"), std::string::npos);
    EXPECT_NE(r.output.find("50.94"), std::string::npos);
    EXPECT_NE(r.output.find("smoke_positive [diagnostic]"), std::string::npos);
    EXPECT_NE(r.output.find("correct_to_wrong      6"), std::string::npos);

    CliResult machine = run_cli("--format machine report --run baseline=" +
                                fixture("baseline.run.json"));
    ASSERT_EQ(machine.exit_code, 0);
    Json doc = parse_json(machine.output);
    EXPECT_EQ(doc["kind"], "evalgate_report");
}

TEST(Cli, MissingInputFileExitsTwo) {
    CliResult r = run_cli("aggregate /nonexistent/events.ndjson /nonexistent/run.json");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, UnknownSubcommandExitsTwo) {
    CliResult r = run_cli("frobnicate");
    EXPECT_EQ(r.exit_code, 2);
}

}  // namespace
}  // namespace evalgate
