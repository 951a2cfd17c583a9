#ifndef LPS_REPRO_HPP
#define LPS_REPRO_HPP

#include "lps/completion.hpp"
#include "lps/constructions.hpp"
#include "lps/diagnostics.hpp"
#include "lps/rpca.hpp"

#include <string>
#include <vector>

namespace lps {

struct ReproRun {
    std::string name; // file stem, e.g. "fig1_fastgd"
    std::string matrix; // "M1" or "M2"
    SolverTrace trace;
    ClassifyConfig thresholds;
    Classification verdict;
};

struct ReproOptions {
    long long max_iters = 10000;
    std::uint64_t seed = 0;
};

/// Non-convex RPCA on the two demo matrices with (r, s) = (1, 1).
inline std::vector<ReproRun> repro_fig1(const ReproOptions& opt = {})
{
    const auto [M1, M2] = demo_matrices();
    RpcaConfig cfg;
    cfg.r = 1;
    cfg.s = 1;
    cfg.max_iters = opt.max_iters;
    cfg.seed = opt.seed;

    std::vector<ReproRun> runs;
    auto add = [&](const std::string& algo, const std::string& which, SolverTrace t) {
        ReproRun run{"fig1_" + algo, which, std::move(t), {}, {}};
        run.verdict = classify(run.trace, run.thresholds);
        runs.push_back(std::move(run));
    };
    RpcaConfig fg = cfg;
    fg.lambda = 3.23;
    fg.eta = 1.0 / 6.0;
    add("fastgd", "M1", fastgd(M1, fg));
    add("altmin", "M2", altmin(M2, cfg));
    add("altproj", "M2", altproj(M2, cfg.r, cfg.beta, cfg));
    RpcaConfig gd = cfg;
    gd.godec_power_iters = 10;
    add("godec", "M2", godec(M2, gd));
    return runs;
}

struct Fig2Result {
    std::vector<double> grid;
    std::vector<SweepRow> pcp;
    std::vector<SweepRow> ialm;
};

inline std::vector<double> fig2_grid() { return parse_grid("0.05:2:0.05"); }

inline Fig2Result repro_fig2(const ReproOptions& opt = {}, unsigned threads = 1)
{
    const Matrix M1 = demo_matrices().first;
    RpcaConfig cfg;
    cfg.seed = opt.seed;
    cfg.max_iters = opt.max_iters;
    Fig2Result out;
    out.grid = fig2_grid();
    out.pcp = lambda_sweep(M1, out.grid, ConvexSolver::PCP, cfg, threads);
    out.ialm = lambda_sweep(M1, out.grid, ConvexSolver::IALM, cfg, threads);
    return out;
}

/// Completion of the first demo matrix with its top-left entry hidden. Thresholds are absolute:
/// residual 1e-4 and norm 1e3.
inline std::vector<ReproRun> repro_fig3(const ReproOptions& opt = {})
{
    const Matrix M1 = demo_matrices().first;
    const ObservationMask mask = make_mask(3, 3, {{0, 0}});
    const double scale = mask.project(M1).norm();
    McConfig cfg;
    cfg.r = 1;
    cfg.init = McInit::RandomNonzeroCorner;
    cfg.seed = opt.seed;
    cfg.max_iters = opt.max_iters;
    cfg.res_tol = 1e-4 / scale;

    ClassifyConfig th;
    th.res_tol = 1e-4 / scale;
    th.divergence_cap = 1e3 / scale;

    std::vector<ReproRun> runs;
    auto add = [&](const std::string& algo, SolverTrace t) {
        ReproRun run{"fig3_" + algo, "M1", std::move(t), th, {}};
        run.verdict = classify(run.trace, th);
        runs.push_back(std::move(run));
    };
    add("asd", asd(M1, mask, cfg));
    add("pf", power_factorization(M1, mask, cfg));
    add("lmafit", lmafit(M1, mask, cfg));
    add("cgiht", cgiht(M1, mask, cfg));
    return runs;
}

inline nlohmann::json to_json(const ReproRun& run)
{
    nlohmann::json j = to_json(run.verdict);
    j["algo"] = run.trace.algo;
    j["matrix"] = run.matrix;
    j["iterations"] = run.trace.last().iter;
    j["stop_reason"] = run.trace.stop_reason;
    j["input_scale"] = run.trace.input_scale;
    j["res_tol"] = run.thresholds.res_tol;
    j["divergence_cap"] = run.thresholds.divergence_cap;
    j["window"] = run.thresholds.window;
    j["config"] = run.trace.config_snapshot;
    return j;
}

} // namespace lps

#endif
