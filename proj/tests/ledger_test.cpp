#include "evalgate/ledger.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

namespace evalgate {
namespace {

RunManifest make_draft() {
    RunManifest m;
    m.code_commit = "a1b2c3d4e5f6";
    m.dirty_diff_hash = sha256_hex("diff");
    m.policy_hash = sha256_hex("policy");
    m.prompt_hash = sha256_hex("prompt");
    m.scorer_hash = sha256_hex("scorer");
    m.task_manifest_hash = sha256_hex("tasks");
    m.seed = 1782047163ULL;
    m.model_label = "agent-main";
    m.runtime_env = "linux-x86_64";
    m.abort_rules = {"halt_on_integrity_violation"};
    m.comparison_metrics = {"accuracy", "tracebacks"};
    m.integrity_flags = IntegrityFlags{true, true, true, true, true, true, true, true};
    m.search_route = SearchRoute::primary_with_fallback;
    return m;
}

RunRecord make_run(const RunManifest& frozen, std::size_t tasks = 5) {
    RunRecord r;
    r.manifest_hash = frozen.frozen_hash.value();
    r.seed = frozen.seed;
    r.elapsed_s = 100.0 * static_cast<double>(tasks);
    for (std::size_t i = 0; i < tasks; ++i) {
        TaskOutcome o;
        o.task_seq = i;
        o.correct = i % 2 == 0;
        o.final_present = true;
        o.attempts = 1;
        o.duration_s = 90.0;
        r.outcomes.push_back(o);
    }
    return r;
}

TEST(FreezeManifest, DeterministicAcrossInvocations) {
    RunManifest draft = make_draft();
    RunManifest a = freeze_manifest(draft);
    RunManifest b = freeze_manifest(draft);
    ASSERT_TRUE(a.frozen_hash.has_value());
    EXPECT_EQ(*a.frozen_hash, *b.frozen_hash);
    EXPECT_EQ(manifest_file_text(a), manifest_file_text(b));
}

TEST(FreezeManifest, FieldInsertionOrderDoesNotMatter) {
    RunManifest draft = make_draft();
    std::string canonical = canonical_manifest_text(draft);
    // Reparse a deliberately reordered document; canonical form must agree.
    Json j = parse_json(canonical);
    Json reordered = Json::object();
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    for (auto it = keys.rbegin(); it != keys.rend(); ++it) reordered[*it] = j[*it];
    RunManifest reparsed = manifest_from_json(reordered);
    EXPECT_EQ(*freeze_manifest(draft).frozen_hash, *freeze_manifest(reparsed).frozen_hash);
}

TEST(FreezeManifest, SeedChangesHash) {
    RunManifest a = make_draft();
    RunManifest b = make_draft();
    a.seed = 1782047163ULL;
    b.seed = 1778025467ULL;
    EXPECT_NE(*freeze_manifest(a).frozen_hash, *freeze_manifest(b).frozen_hash);
}

TEST(FreezeManifest, EverySingleFieldChangeChangesHash) {
    const std::string reference = *freeze_manifest(make_draft()).frozen_hash;
    std::vector<RunManifest> variants;
    auto variant = [&]() -> RunManifest& {
        variants.push_back(make_draft());
        return variants.back();
    };
    variant().code_commit = "ffffffffffff";
    variant().dirty_diff_hash = sha256_hex("other diff");
    variant().policy_hash = sha256_hex("other policy");
    variant().prompt_hash = sha256_hex("other prompt");
    variant().scorer_hash = sha256_hex("other scorer");
    variant().task_manifest_hash = sha256_hex("other tasks");
    variant().seed = 1;
    variant().model_label = "agent-alt";
    variant().runtime_env = "linux-arm64";
    variant().abort_rules = {"halt_on_integrity_violation", "halt_on_budget"};
    variant().comparison_metrics = {"accuracy"};
    variant().integrity_flags.reruns_forbidden = false;
    variant().search_route = SearchRoute::strict_primary;
    ASSERT_EQ(variants.size(), 13u);
    for (const auto& v : variants) {
        EXPECT_NE(*freeze_manifest(v).frozen_hash, reference);
    }
}

TEST(FreezeManifest, MissingFieldIsReported) {
    RunManifest draft = make_draft();
    draft.scorer_hash.clear();
    try {
        freeze_manifest(draft);
        FAIL() << "expected MissingField";
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::missing_field);
        EXPECT_NE(std::string(e.what()).find("scorer_hash"), std::string::npos);
    }
}

TEST(FreezeManifest, MissingKeyInDocumentIsReported) {
    Json j = parse_json(canonical_manifest_text(make_draft()));
    j.erase("scorer_hash");
    EXPECT_THROW(manifest_from_json(j), EvalError);
}

TEST(ManifestJson, RoundTripsThroughFileText) {
    RunManifest frozen = freeze_manifest(make_draft());
    RunManifest reparsed = manifest_from_json(parse_json(manifest_file_text(frozen)));
    EXPECT_EQ(frozen, reparsed);
}

TEST(VerifyRunIntegrity, ValidRun) {
    RunManifest frozen = freeze_manifest(make_draft());
    IntegrityVerdict v = verify_run_integrity(frozen, make_run(frozen));
    EXPECT_TRUE(v.valid);
    EXPECT_TRUE(v.reasons.empty());
}

TEST(VerifyRunIntegrity, DuplicateTaskSeqIsARerun) {
    RunManifest frozen = freeze_manifest(make_draft());
    RunRecord run = make_run(frozen);
    run.outcomes.push_back(run.outcomes.front());
    IntegrityVerdict v = verify_run_integrity(frozen, run);
    EXPECT_FALSE(v.valid);
    ASSERT_EQ(v.reasons.size(), 1u);
    EXPECT_EQ(v.reasons[0], "rerun detected");
}

TEST(VerifyRunIntegrity, DisabledSolverFlagViolatesCleanEvaluation) {
    RunManifest draft = make_draft();
    draft.integrity_flags.direct_solvers_disabled = false;
    RunManifest frozen = freeze_manifest(draft);
    IntegrityVerdict v = verify_run_integrity(frozen, make_run(frozen));
    EXPECT_FALSE(v.valid);
    ASSERT_EQ(v.reasons.size(), 1u);
    EXPECT_EQ(v.reasons[0], "clean evaluation violated");
}

TEST(VerifyRunIntegrity, HashMismatch) {
    RunManifest frozen = freeze_manifest(make_draft());
    RunRecord run = make_run(frozen);
    run.manifest_hash = sha256_hex("someone else");
    IntegrityVerdict v = verify_run_integrity(frozen, run);
    EXPECT_FALSE(v.valid);
    EXPECT_EQ(v.reasons[0], "manifest hash mismatch");
}

TEST(VerifyRunIntegrity, UnfrozenManifestIsAUsageError) {
    RunManifest draft = make_draft();
    RunRecord run;
    run.manifest_hash = "x";
    EXPECT_THROW(verify_run_integrity(draft, run), EvalError);
}

TEST(ValidateCompleteness, AllFinalsPresent) {
    RunManifest frozen = freeze_manifest(make_draft());
    RunRecord run = make_run(frozen, 53);
    CompletenessVerdict v = validate_completeness(run, 53);
    EXPECT_TRUE(v.complete);
    EXPECT_EQ(v.missing_finals, 0u);
}

TEST(ValidateCompleteness, OneAbsentFinal) {
    RunManifest frozen = freeze_manifest(make_draft());
    RunRecord run = make_run(frozen, 53);
    run.outcomes[7].final_present = false;
    CompletenessVerdict v = validate_completeness(run, 53);
    EXPECT_FALSE(v.complete);
    EXPECT_EQ(v.missing_finals, 1u);
}

TEST(ValidateCompleteness, CountShortfallCountsAsMissingFinals) {
    RunManifest frozen = freeze_manifest(make_draft());
    RunRecord run = make_run(frozen, 52);
    CompletenessVerdict v = validate_completeness(run, 53);
    EXPECT_FALSE(v.complete);
    EXPECT_EQ(v.missing_finals, 1u);
}

TEST(ValidateCompleteness, RemovingAnyOutcomeBreaksCompleteness) {
    RunManifest frozen = freeze_manifest(make_draft());
    RunRecord run = make_run(frozen, 12);
    ASSERT_TRUE(validate_completeness(run, 12).complete);
    for (std::size_t i = 0; i < run.outcomes.size(); ++i) {
        RunRecord shrunk = run;
        shrunk.outcomes.erase(shrunk.outcomes.begin() + static_cast<std::ptrdiff_t>(i));
        EXPECT_FALSE(validate_completeness(shrunk, 12).complete);
    }
}

TEST(RunRecordJson, RoundTrips) {
    RunManifest frozen = freeze_manifest(make_draft());
    RunRecord run = make_run(frozen);
    run.outcomes[1].failure_classes["execution_timeout"] = 3;
    RunRecord reparsed = run_record_from_json(run_record_to_json(run));
    EXPECT_EQ(run, reparsed);
}

TEST(RunRecordJson, RejectsFinalWithoutAttempts) {
    Json j = outcome_to_json(TaskOutcome{0, true, true, 1, 1.0, {}});
    j["attempts"] = 0;
    EXPECT_THROW(outcome_from_json(j), EvalError);
}

}  // namespace
}  // namespace evalgate
