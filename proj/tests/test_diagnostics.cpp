#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lps;
using namespace lps::testing;

namespace {

SolverTrace synthetic(const std::function<TraceRecord(long long)>& f, long long n, double scale = 1.0)
{
    SolverTrace t;
    t.input_scale = scale;
    for (long long k = 0; k <= n; ++k)
        t.records.push_back(f(k));
    return t;
}

TraceRecord rec(long long k, double res, double nl, double ns = 0.0)
{
    TraceRecord r;
    r.iter = k;
    r.residual = res;
    r.norm_L = nl;
    r.norm_S = ns;
    r.rank_L = 1;
    r.nnz_S = 1;
    return r;
}

} // namespace

TEST(Classify, GodecOnSecondDemoIsNotConverged)
{
    RpcaConfig cfg;
    cfg.r = 1;
    cfg.s = 1;
    cfg.max_iters = 2000;
    const SolverTrace t = godec(demo_matrices().second, cfg);
    const Classification c = classify(t);
    EXPECT_NE(c.verdict, Verdict::ConvergedFeasible);
    ASSERT_TRUE(c.growth_exponent.has_value());
    EXPECT_GT(*c.growth_exponent, 0.1);
}

TEST(Classify, PlantedConvergesFeasible)
{
    Rng rng(3);
    const Matrix M = planted_spike(rng);
    RpcaConfig cfg;
    cfg.r = 1;
    cfg.s = 1;
    cfg.res_tol = 1e-12;
    const Classification c = classify(godec(M, cfg));
    EXPECT_EQ(c.verdict, Verdict::ConvergedFeasible);
    EXPECT_LT(c.final_residual, 1e-4 * M.norm());
}

TEST(Classify, ConstantTraceIsStalled)
{
    const SolverTrace t = synthetic([](long long k) { return rec(k, 0.5, 2.0); }, 200);
    EXPECT_EQ(classify(t).verdict, Verdict::Stalled);
}

TEST(Classify, SlowlyDecreasingIsBudgetExhausted)
{
    const SolverTrace t = synthetic([](long long k) { return rec(k, 1.0 / (1.0 + k), 2.0); }, 200);
    EXPECT_EQ(classify(t).verdict, Verdict::BudgetExhausted);
}

TEST(Classify, SmallResidualGrowingNormsDiverge)
{
    const SolverTrace t = synthetic([](long long k) { return rec(k, 1e-6, 10.0 * (k + 1), 10.0 * (k + 1)); }, 500);
    const Classification c = classify(t);
    EXPECT_EQ(c.verdict, Verdict::DivergingComponents);
    EXPECT_DOUBLE_EQ(c.max_component_norm, 5010.0);
}

TEST(Classify, BigButShrinkingIsNotDiverging)
{
    const SolverTrace t = synthetic([](long long k) { return rec(k, 1e-6, 1e6 / (k + 1)); }, 100);
    EXPECT_NE(classify(t).verdict, Verdict::DivergingComponents);
}

TEST(Classify, ThresholdsScaleWithInput)
{
    const SolverTrace a = synthetic([](long long k) { return rec(k, 5e-4, 10.0); }, 100, 1.0);
    const SolverTrace b = synthetic([](long long k) { return rec(k, 5e-4, 10.0); }, 100, 10.0);
    EXPECT_NE(classify(a).verdict, Verdict::ConvergedFeasible);
    EXPECT_EQ(classify(b).verdict, Verdict::ConvergedFeasible);
}

TEST(Classify, EmptyTraceRejected) { EXPECT_THROW(classify(SolverTrace{}), DomainError); }

TEST(Classify, StableUnderDoubledCap)
{
    // verdicts on the demo traces should not hinge on the exact cap
    for (const auto& run : repro_fig1({2000, 0})) {
        ClassifyConfig twice = run.thresholds;
        twice.divergence_cap *= 2;
        const Verdict v = classify(run.trace, twice).verdict;
        if (run.verdict.verdict != Verdict::DivergingComponents)
            EXPECT_NE(v, Verdict::DivergingComponents) << run.name;
    }
}

TEST(GrowthRate, SyntheticExponents)
{
    const SolverTrace lin = synthetic([](long long k) { return rec(k, 0.1, 3.0 * k); }, 400);
    EXPECT_NEAR(*growth_rate(lin), 1.0, 1e-9);
    const SolverTrace flat = synthetic([](long long k) { return rec(k, 0.1, 3.0); }, 400);
    EXPECT_NEAR(*growth_rate(flat), 0.0, 1e-12);
    const SolverTrace quarter = synthetic([](long long k) { return rec(k, 0.1, std::pow(k + 0.0, 0.25)); }, 400);
    EXPECT_NEAR(*growth_rate(quarter), 0.25, 1e-9);
    EXPECT_FALSE(growth_rate(synthetic([](long long k) { return rec(k, 0.1, 1.0); }, 5)).has_value());
}

TEST(EpsilonStudy, SimpleFamilyResidualIsTwoEps)
{
    ConstructionSpec spec;
    spec.family = Family::Simple3;
    spec.r = 1;
    spec.s = 1;
    const auto rows = epsilon_study(spec, default_eps_schedule());
    ASSERT_EQ(rows.size(), 6u);
    for (const auto& row : rows) {
        EXPECT_LE(std::abs(row.residual - 2.0 * row.eps), 1e-12 * row.eps) << row.eps;
        EXPECT_EQ(row.rank_L, 1);
        EXPECT_LE(row.nnz_S, 1);
        EXPECT_NEAR(row.norm_S, 1.0 / row.eps, 1e-9 / row.eps);
    }
    for (size_t k = 1; k < rows.size(); ++k) {
        EXPECT_LT(rows[k].residual, rows[k - 1].residual);
        EXPECT_GT(rows[k].norm_L, rows[k - 1].norm_L);
    }
}

TEST(EpsilonStudy, InvariantsAcrossFamilies)
{
    for (Family f : {Family::Lemma1General, Family::Lemma2, Family::Lemma3, Family::Lemma4Block}) {
        ConstructionSpec spec;
        spec.family = f;
        spec.r = f == Family::Lemma3 ? 2 : 1;
        spec.s = f == Family::Lemma2 ? 2 : 1;
        spec.seed = 5;
        const auto rows = epsilon_study(spec, default_eps_schedule());
        for (size_t k = 0; k < rows.size(); ++k) {
            EXPECT_LE(rows[k].rank_L, spec.r) << family_name(f);
            EXPECT_LE(rows[k].nnz_S, spec.s) << family_name(f);
            if (k > 0)
                EXPECT_LT(rows[k].residual, rows[k - 1].residual) << family_name(f);
        }
        EXPECT_GT(std::max(rows.back().norm_L, rows.back().norm_S), 100.0 * rows.front().norm_L) << family_name(f);
    }
}

TEST(Emission, Headers)
{
    EXPECT_EQ(trace_csv(SolverTrace{}), std::string(kTraceHeader) + "\n");
    EXPECT_EQ(sweep_csv({}), std::string(kSweepHeader) + "\n");
    EXPECT_EQ(epsilon_csv({}), std::string(kEpsilonHeader) + "\n");
    SweepRow bad;
    bad.lambda = 0.5;
    bad.error = "x";
    EXPECT_EQ(sweep_csv({bad}), std::string(kSweepHeader) + "\n0.5,,,,\n");
}

TEST(Emission, TraceRoundTrip)
{
    RpcaConfig cfg;
    cfg.r = 1;
    cfg.s = 1;
    cfg.max_iters = 300;
    const SolverTrace t = altmin(demo_matrices().second, cfg);
    const SolverTrace back = parse_trace_csv(trace_csv(t), t.input_scale);
    EXPECT_EQ(back.records, t.records);
    EXPECT_EQ(classify(back).verdict, classify(t).verdict);
}

TEST(Emission, TraceCsvRejectsMalformed)
{
    const std::string h = std::string(kTraceHeader) + "\n";
    EXPECT_THROW(parse_trace_csv("iter,res\n"), DomainError);
    EXPECT_THROW(parse_trace_csv(h + "0,1,1,1,1\n"), DomainError);
    EXPECT_THROW(parse_trace_csv(h + "1,1,1,1,1,1\n0,1,1,1,1,1\n"), DomainError);
    EXPECT_THROW(parse_trace_csv(h + "0,abc,1,1,1,1\n"), DomainError);
    EXPECT_THROW(read_trace_csv("/nonexistent/t.csv"), IoError);
}

TEST(Emission, JsonShape)
{
    RpcaConfig cfg;
    cfg.r = 1;
    cfg.s = 1;
    cfg.max_iters = 5;
    const SolverTrace t = godec(demo_matrices().second, cfg);
    const nlohmann::json j = to_json(t);
    EXPECT_EQ(j["algo"], "godec");
    EXPECT_EQ(j["records"].size(), t.records.size());
    EXPECT_TRUE(j["config"].contains("r"));
    const nlohmann::json c = to_json(classify(t));
    EXPECT_TRUE(c.contains("verdict"));
    EXPECT_TRUE(c["growth_exponent"].is_null());
}
