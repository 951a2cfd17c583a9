#ifndef LPS_TOOLS_CLI_HPP
#define LPS_TOOLS_CLI_HPP

#include "lps/lps.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace lps::cli {

using nlohmann::json;

// Flag registry for one subcommand. Values come from flags, then the --config JSON file, then
// the defaults already stored in the bound variables.
class Params {
public:
    explicit Params(CLI::App* app) : app_(app)
    {
        app_->add_option("--config", config_path_, "JSON file with flag values (flags override it)");
    }

    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& desc, bool required = false)
    {
        CLI::Option* opt = app_->add_option("--" + name, var, desc)->capture_default_str();
        Slot slot;
        slot.opt = opt;
        slot.from = [&var, name](const json& j) {
            try {
                var = j.get<T>();
            } catch (const json::exception&) {
                throw DomainError("config key '" + name + "' has the wrong type");
            }
        };
        slot.to = [&var] { return json(var); };
        slot.required = required;
        slots_.emplace(name, std::move(slot));
        if (required)
            opt->description(desc + " (required)");
        return opt;
    }

    CLI::Option* flag(const std::string& name, bool& var, const std::string& desc)
    {
        CLI::Option* opt = app_->add_flag("--" + name, var, desc)->capture_default_str();
        Slot slot;
        slot.opt = opt;
        slot.from = [&var, name](const json& j) {
            if (!j.is_boolean())
                throw DomainError("config key '" + name + "' must be a boolean");
            var = j.get<bool>();
        };
        slot.to = [&var] { return json(var); };
        slots_.emplace(name, std::move(slot));
        return opt;
    }

    bool given(const std::string& name) const { return given_.count(name) > 0; }

    // call after parsing
    json resolve()
    {
        json file = json::object();
        if (!config_path_.empty()) {
            try {
                file = json::parse(read_text_file(config_path_));
            } catch (const json::parse_error& e) {
                throw DomainError("config '" + config_path_ + "': " + e.what());
            }
            if (!file.is_object())
                throw DomainError("config '" + config_path_ + "' must hold a JSON object");
        }
        for (auto it = file.begin(); it != file.end(); ++it)
            if (!slots_.count(it.key()))
                throw DomainError("config '" + config_path_ + "': unknown key '" + it.key() + "'");
        json resolved = json::object();
        for (auto& [name, slot] : slots_) {
            if (slot.opt->count() > 0) {
                given_.insert(name);
            } else if (file.contains(name)) {
                slot.from(file[name]);
                given_.insert(name);
            } else if (slot.required) {
                throw DomainError("missing required flag --" + name);
            }
            resolved[name] = slot.to();
        }
        return resolved;
    }

private:
    struct Slot {
        CLI::Option* opt = nullptr;
        std::function<void(const json&)> from;
        std::function<json()> to;
        bool required = false;
    };
    CLI::App* app_;
    std::string config_path_;
    std::map<std::string, Slot> slots_;
    std::set<std::string> given_;
};

inline json matrix_json(const Matrix& M) { return matrix_to_string(M); }

inline json to_json(const RigidityCertificate& c)
{
    json j = {{"r", c.r},
              {"lower_bound", c.lower_bound},
              {"numerical_lower_bound", c.numerical_lower_bound},
              {"status", status_name(c.status)},
              {"supports_examined", c.supports_examined},
              {"levels_completed", c.levels_completed}};
    j["upper_bound"] = c.upper_bound == kNoUpperBound ? json(nullptr) : json(c.upper_bound);
    j["witness"] = c.witness ? matrix_json(*c.witness) : json(nullptr);
    return j;
}

inline json spec_json(const ConstructionSpec& spec, const ConstructionOutput& out)
{
    json j = {{"family", family_name(spec.family)},
              {"r", spec.r},
              {"s", spec.s},
              {"p", spec.p},
              {"epsilon", spec.epsilon},
              {"seed", spec.seed},
              {"n", out.n},
              {"effective_s", out.s},
              {"claimed_rigidity_lower_bound", out.claimed_rigidity_lower_bound},
              {"eps_constant", out.eps_constant},
              {"valiant_upper_bound", valiant_upper_bound(out.n, out.r)},
              {"residual_fro", (out.M_eps - out.M_limit).norm()}};
    j["pad_to"] = spec.pad_to ? json(*spec.pad_to) : json(nullptr);
    return j;
}

inline std::vector<double> parse_real_list(const std::string& text)
{
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t end = text.find(',', pos);
        if (end == std::string::npos)
            end = text.size();
        const std::string tok = text.substr(pos, end - pos);
        if (tok.empty())
            throw DomainError("empty entry in list '" + text + "'");
        out.push_back(parse_real(tok));
        pos = end + 1;
    }
    return out;
}

struct Context {
    std::ostream& out;
    std::ostream& err;
};

inline void print_config(Context& ctx, const std::string& cmd, json cfg)
{
    ctx.err << json{{"command", cmd}, {"config", std::move(cfg)}}.dump() << '\n';
}

inline std::filesystem::path out_path(const std::string& dir, const std::string& file)
{
    return std::filesystem::path(dir) / file;
}

inline void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    Context ctx{out, err};
    CLI::App app{"lps: low-rank plus sparse constructions, rigidity oracle and solvers", "lps"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // construct ---------------------------------------------------------------
    CLI::App* c_construct = app.add_subcommand("construct", "Build a limit matrix, its epsilon family and the split");
    Params p_construct(c_construct);
    std::string family = "simple3", out_prefix;
    long long r = 1, s = 1, p = 1, pad = 0;
    double eps = 0.1;
    std::uint64_t seed = 0;
    p_construct.add("family", family, "simple3|lemma1|lemma2|lemma3|lemma4|maxrigid3|demo1|demo2");
    p_construct.add("r", r, "target rank");
    p_construct.add("s", s, "sparsity (lemma4 needs s = p^2 r)");
    p_construct.add("p", p, "block grid size (lemma4)");
    p_construct.add("eps", eps, "epsilon");
    p_construct.add("seed", seed, "PRNG seed");
    p_construct.add("pad", pad, "zero-pad to this size (0 keeps the natural size)");
    p_construct.add("out-prefix", out_prefix, "output prefix", true);

    // rigidity ----------------------------------------------------------------
    CLI::App* c_rig = app.add_subcommand("rigidity", "Bound Rig(M, r) by support enumeration");
    Params p_rig(c_rig);
    std::string matrix_path, out_file;
    long long rig_r = 1, smax = -1, max_supports = 1'000'000, restarts = 20;
    double budget_sec = 300.0, feas_tol = 1e-7;
    unsigned threads = 1;
    std::uint64_t rig_seed = 0;
    p_rig.add("matrix", matrix_path, "matrix text file", true);
    p_rig.add("r", rig_r, "target rank");
    p_rig.add("smax", smax, "largest support size to enumerate (-1 uses (m-r)(n-r))");
    p_rig.add("budget-sec", budget_sec, "wall-clock budget in seconds");
    p_rig.add("max-supports", max_supports, "support evaluation budget");
    p_rig.add("restarts", restarts, "local descent restarts per support");
    p_rig.add("feas-tol", feas_tol, "feasibility tolerance relative to sigma_1(M)");
    p_rig.add("seed", rig_seed, "PRNG seed for descent starts");
    p_rig.add("threads", threads, "worker threads");
    p_rig.add("out", out_file, "certificate JSON path", true);

    // rpca --------------------------------------------------------------------
    CLI::App* c_rpca = app.add_subcommand("rpca", "Run one robust PCA solver and write its trace");
    Params p_rpca(c_rpca);
    std::string rpca_algo = "godec", rpca_matrix, rpca_out, rpca_classify, rpca_L, rpca_S;
    RpcaConfig rc;
    double rpca_lambda = 0.0;
    p_rpca.add("algo", rpca_algo, "godec|altmin|altproj|fastgd|pcp|ialm");
    p_rpca.add("matrix", rpca_matrix, "matrix text file", true);
    p_rpca.add("r", rc.r, "rank");
    p_rpca.add("s", rc.s, "sparsity (altproj: cap, 0 for none)");
    p_rpca.add("lambda", rpca_lambda, "0 picks 3.23 for fastgd and 1/sqrt(max(m,n)) for pcp/ialm");
    p_rpca.add("eta", rc.eta, "fastgd step size");
    p_rpca.add("beta", rc.beta, "altproj threshold control");
    p_rpca.add("godec-power", rc.godec_power_iters, "godec power iterations");
    p_rpca.add("max-iters", rc.max_iters, "iteration cap");
    p_rpca.add("res-tol", rc.res_tol, "stop when residual <= res-tol * ||M||_F");
    p_rpca.add("convex-tol", rc.convex_tol, "pcp/ialm stopping tolerance");
    p_rpca.add("seed", rc.seed, "PRNG seed");
    p_rpca.add("out", rpca_out, "trace CSV path", true);
    p_rpca.add("classify-out", rpca_classify, "optional classification JSON path");
    p_rpca.add("L-out", rpca_L, "optional L matrix path (pcp/ialm)");
    p_rpca.add("S-out", rpca_S, "optional S matrix path (pcp/ialm)");

    // mc ----------------------------------------------------------------------
    CLI::App* c_mc = app.add_subcommand("mc", "Run one matrix completion solver and write its trace");
    Params p_mc(c_mc);
    std::string mc_algo = "asd", mc_matrix, mc_missing = "0,0", mc_init = "corner", mc_out, mc_classify;
    McConfig mc;
    double mc_abs_tol = 0.0;
    p_mc.add("algo", mc_algo, "asd|pf|lmafit|cgiht|niht");
    p_mc.add("matrix", mc_matrix, "matrix text file (missing entries may hold any value)", true);
    p_mc.add("missing", mc_missing, "missing entries as i,j;i,j");
    p_mc.add("r", mc.r, "rank");
    p_mc.add("init", mc_init, "corner|spectral");
    p_mc.add("corner-value", mc.corner_value, "value placed at (0,0) by the corner init");
    p_mc.add("max-iters", mc.max_iters, "iteration cap");
    p_mc.add("res-tol", mc.res_tol, "stop when observed residual <= res-tol * ||P(M)||_F");
    p_mc.add("abs-tol", mc_abs_tol, "absolute residual stop, overrides res-tol when > 0");
    p_mc.add("omega", mc.omega_sor, "lmafit initial over-relaxation weight");
    p_mc.add("restart-angle", mc.restart_angle, "cgiht restart threshold");
    p_mc.add("seed", mc.seed, "PRNG seed");
    p_mc.add("out", mc_out, "trace CSV path", true);
    p_mc.add("classify-out", mc_classify, "optional classification JSON path");

    // sweep -------------------------------------------------------------------
    CLI::App* c_sweep = app.add_subcommand("sweep", "Convex solver over a lambda grid");
    Params p_sweep(c_sweep);
    std::string sweep_algo = "ialm", sweep_matrix, sweep_grid = "0.05:2:0.05", sweep_out;
    RpcaConfig sc;
    unsigned sweep_threads = 1;
    p_sweep.add("algo", sweep_algo, "pcp|ialm");
    p_sweep.add("matrix", sweep_matrix, "matrix text file", true);
    p_sweep.add("lambda-grid", sweep_grid, "a:b:step, inclusive");
    p_sweep.add("max-iters", sc.max_iters, "iteration cap per lambda");
    p_sweep.add("convex-tol", sc.convex_tol, "stopping tolerance");
    p_sweep.add("threads", sweep_threads, "worker threads");
    p_sweep.add("out", sweep_out, "table CSV path", true);

    // diagnose ----------------------------------------------------------------
    CLI::App* c_diag = app.add_subcommand("diagnose", "Classify a trace CSV");
    Params p_diag(c_diag);
    std::string diag_trace, diag_matrix, diag_out;
    ClassifyConfig cc;
    double diag_scale = 1.0;
    p_diag.add("trace", diag_trace, "trace CSV", true);
    p_diag.add("res-tol", cc.res_tol, "residual threshold relative to the scale");
    p_diag.add("cap", cc.divergence_cap, "divergence threshold relative to the scale");
    p_diag.add("window", cc.window, "trailing window in iterations");
    p_diag.add("scale", diag_scale, "input scale (||M||_F)");
    p_diag.add("matrix", diag_matrix, "take the scale as ||M||_F of this matrix instead");
    p_diag.add("out", diag_out, "classification JSON path", true);

    // epsilon-study -----------------------------------------------------------
    CLI::App* c_eps = app.add_subcommand("epsilon-study", "Residual and component norms along an epsilon schedule");
    Params p_eps(c_eps);
    std::string eps_family = "simple3", eps_sched = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6", eps_out;
    long long eps_r = 1, eps_s = 1, eps_p = 1;
    std::uint64_t eps_seed = 0;
    p_eps.add("family", eps_family, "construction family");
    p_eps.add("r", eps_r, "target rank");
    p_eps.add("s", eps_s, "sparsity");
    p_eps.add("p", eps_p, "block grid size (lemma4)");
    p_eps.add("seed", eps_seed, "PRNG seed");
    p_eps.add("schedule", eps_sched, "comma separated epsilons");
    p_eps.add("out", eps_out, "table CSV path", true);

    // repro -------------------------------------------------------------------
    CLI::App* c_repro = app.add_subcommand("repro", "Figure reproductions");
    c_repro->require_subcommand(1);
    std::string repro_dir = ".";
    ReproOptions ro;
    unsigned repro_threads = 1;
    std::vector<std::pair<CLI::App*, std::unique_ptr<Params>>> repro_cmds;
    for (const char* fig : {"fig1", "fig2", "fig3"}) {
        CLI::App* sub = c_repro->add_subcommand(fig, std::string("Reproduce ") + fig + " data");
        auto params = std::make_unique<Params>(sub);
        params->add("out-dir", repro_dir, "output directory");
        params->add("max-iters", ro.max_iters, "iteration cap");
        params->add("seed", ro.seed, "PRNG seed");
        if (std::string(fig) == "fig2")
            params->add("threads", repro_threads, "worker threads");
        repro_cmds.emplace_back(sub, std::move(params));
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        // help requested on a subcommand surfaces as CallForHelp above; anything else is misuse
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (c_construct->parsed()) {
            json cfg = p_construct.resolve();
            print_config(ctx, "construct", cfg);
            ConstructionSpec spec;
            spec.family = parse_family(family);
            spec.r = r;
            spec.s = s;
            spec.p = p;
            spec.epsilon = eps;
            spec.seed = seed;
            if (pad > 0)
                spec.pad_to = pad;
            const ConstructionOutput o = construct(spec);
            write_matrix_file(out_prefix + "_M_limit.txt", o.M_limit);
            write_matrix_file(out_prefix + "_M_eps.txt", o.M_eps);
            write_matrix_file(out_prefix + "_L_eps.txt", o.L_eps);
            write_matrix_file(out_prefix + "_S_eps.txt", o.S_eps);
            write_text_file(out_prefix + ".json", dump(spec_json(spec, o)));
            out << "wrote " << out_prefix << "_{M_limit,M_eps,L_eps,S_eps}.txt and " << out_prefix << ".json\n";
            return 0;
        }
        if (c_rig->parsed()) {
            json cfg = p_rig.resolve();
            print_config(ctx, "rigidity", cfg);
            const Matrix M = read_matrix_file(matrix_path);
            RigidityConfig rcfg;
            rcfg.feas_tol = feas_tol;
            rcfg.restarts = static_cast<int>(restarts);
            rcfg.max_supports = max_supports;
            rcfg.budget_sec = budget_sec;
            rcfg.seed = rig_seed;
            rcfg.threads = threads;
            std::optional<Index> sm;
            if (smax >= 0)
                sm = smax;
            const RigidityCertificate cert = rigidity(M, rig_r, sm, rcfg);
            write_text_file(out_file, dump(to_json(cert)));
            out << "Rig(M, " << rig_r << "): lower " << cert.lower_bound << ", upper "
                << (cert.upper_bound == kNoUpperBound ? std::string("inf") : std::to_string(cert.upper_bound))
                << ", status " << status_name(cert.status) << '\n';
            return 0;
        }
        if (c_rpca->parsed()) {
            json cfg = p_rpca.resolve();
            const Matrix M = read_matrix_file(rpca_matrix);
            const bool convex = rpca_algo == "pcp" || rpca_algo == "ialm";
            rc.lambda = rpca_lambda > 0.0 ? rpca_lambda
                                          : (convex ? default_convex_lambda(M.rows(), M.cols()) : 3.23);
            cfg["lambda"] = rc.lambda;
            print_config(ctx, "rpca", cfg);
            SolverTrace trace;
            if (rpca_algo == "godec") {
                trace = godec(M, rc);
            } else if (rpca_algo == "altmin") {
                trace = altmin(M, rc);
            } else if (rpca_algo == "altproj") {
                trace = altproj(M, rc.r, rc.beta, rc);
            } else if (rpca_algo == "fastgd") {
                trace = fastgd(M, rc);
            } else if (convex) {
                ConvexResult res = rpca_algo == "pcp" ? pcp_admm(M, rc.lambda, rc) : ialm(M, rc.lambda, rc);
                if (!rpca_L.empty())
                    write_matrix_file(rpca_L, res.L);
                if (!rpca_S.empty())
                    write_matrix_file(rpca_S, res.S);
                trace = std::move(res.trace);
            } else {
                throw DomainError("unknown rpca algorithm '" + rpca_algo + "'");
            }
            write_text_file(rpca_out, trace_csv(trace));
            const Classification cl = classify(trace);
            if (!rpca_classify.empty()) {
                json j = to_json(cl);
                j["algo"] = trace.algo;
                j["stop_reason"] = trace.stop_reason;
                write_text_file(rpca_classify, dump(j));
            }
            out << trace.algo << ": " << trace.last().iter << " iterations, residual "
                << format_real(trace.last().residual) << ", verdict " << verdict_name(cl.verdict) << '\n';
            return 0;
        }
        if (c_mc->parsed()) {
            json cfg = p_mc.resolve();
            print_config(ctx, "mc", cfg);
            const Matrix M = read_matrix_file(mc_matrix);
            const ObservationMask mask = make_mask(M.rows(), M.cols(), parse_entries(mc_missing));
            if (mc_init == "corner")
                mc.init = McInit::RandomNonzeroCorner;
            else if (mc_init == "spectral")
                mc.init = McInit::SpectralOfZeroFill;
            else
                throw DomainError("unknown init '" + mc_init + "'");
            ClassifyConfig th;
            if (mc_abs_tol > 0.0) {
                const double scale = mask.project(M).norm();
                mc.res_tol = mc_abs_tol / scale;
                th.res_tol = mc.res_tol;
            }
            SolverTrace trace;
            if (mc_algo == "asd")
                trace = asd(M, mask, mc);
            else if (mc_algo == "pf")
                trace = power_factorization(M, mask, mc);
            else if (mc_algo == "lmafit")
                trace = lmafit(M, mask, mc);
            else if (mc_algo == "cgiht")
                trace = cgiht(M, mask, mc);
            else if (mc_algo == "niht")
                trace = niht(M, mask, mc);
            else
                throw DomainError("unknown mc algorithm '" + mc_algo + "'");
            write_text_file(mc_out, trace_csv(trace));
            const Classification cl = classify(trace, th);
            if (!mc_classify.empty()) {
                json j = to_json(cl);
                j["algo"] = trace.algo;
                j["stop_reason"] = trace.stop_reason;
                write_text_file(mc_classify, dump(j));
            }
            out << trace.algo << ": " << trace.last().iter << " iterations, residual "
                << format_real(trace.last().residual) << ", verdict " << verdict_name(cl.verdict) << '\n';
            return 0;
        }
        if (c_sweep->parsed()) {
            json cfg = p_sweep.resolve();
            print_config(ctx, "sweep", cfg);
            const Matrix M = read_matrix_file(sweep_matrix);
            ConvexSolver solver;
            if (sweep_algo == "pcp")
                solver = ConvexSolver::PCP;
            else if (sweep_algo == "ialm")
                solver = ConvexSolver::IALM;
            else
                throw DomainError("unknown sweep algorithm '" + sweep_algo + "'");
            const auto rows = lambda_sweep(M, parse_grid(sweep_grid), solver, sc, sweep_threads);
            write_text_file(sweep_out, sweep_csv(rows));
            for (const auto& row : rows)
                if (!row.error.empty())
                    err << "lambda " << format_real(row.lambda) << ": " << row.error << '\n';
            out << rows.size() << " lambda values written to " << sweep_out << '\n';
            return 0;
        }
        if (c_diag->parsed()) {
            json cfg = p_diag.resolve();
            if (p_diag.given("matrix") && p_diag.given("scale"))
                throw DomainError("give either --scale or --matrix, not both");
            if (p_diag.given("matrix"))
                diag_scale = read_matrix_file(diag_matrix).norm();
            cfg["scale"] = diag_scale;
            print_config(ctx, "diagnose", cfg);
            const SolverTrace t = read_trace_csv(diag_trace, diag_scale);
            if (t.records.empty())
                throw DomainError("trace '" + diag_trace + "' has no records");
            const Classification cl = classify(t, cc);
            write_text_file(diag_out, dump(to_json(cl)));
            out << verdict_name(cl.verdict) << '\n';
            return 0;
        }
        if (c_eps->parsed()) {
            json cfg = p_eps.resolve();
            print_config(ctx, "epsilon-study", cfg);
            ConstructionSpec spec;
            spec.family = parse_family(eps_family);
            spec.r = eps_r;
            spec.s = eps_s;
            spec.p = eps_p;
            spec.seed = eps_seed;
            const auto rows = epsilon_study(spec, parse_real_list(eps_sched));
            write_text_file(eps_out, epsilon_csv(rows));
            out << rows.size() << " rows written to " << eps_out << '\n';
            return 0;
        }
        for (auto& [sub, params] : repro_cmds) {
            if (!sub->parsed())
                continue;
            const std::string fig = sub->get_name();
            json cfg = params->resolve();
            print_config(ctx, "repro " + fig, cfg);
            ensure_dir(repro_dir);
            if (fig == "fig2") {
                const Fig2Result res = repro_fig2(ro, repro_threads);
                write_text_file(out_path(repro_dir, "fig2_pcp.csv").string(), sweep_csv(res.pcp));
                write_text_file(out_path(repro_dir, "fig2_ialm.csv").string(), sweep_csv(res.ialm));
                for (const auto* rows : {&res.pcp, &res.ialm}) {
                    out << (rows == &res.pcp ? "pcp " : "ialm");
                    for (const auto& row : *rows)
                        out << ' ' << format_real(row.lambda) << ":(" << row.rank_L << ',' << row.nnz_S << ')';
                    out << '\n';
                }
                return 0;
            }
            const auto runs = fig == "fig1" ? repro_fig1(ro) : repro_fig3(ro);
            for (const auto& run : runs) {
                write_text_file(out_path(repro_dir, run.name + ".csv").string(), trace_csv(run.trace));
                write_text_file(out_path(repro_dir, run.name + ".json").string(), dump(to_json(run)));
                const TraceRecord& last = run.trace.last();
                out << run.name << " (" << run.matrix << "): iter " << last.iter << ", residual "
                    << format_real(last.residual) << ", max norm " << format_real(run.verdict.max_component_norm)
                    << ", " << verdict_name(run.verdict.verdict) << '\n';
            }
            return 0;
        }
        err << app.help();
        return 1;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(std::move(args), out, err);
}

} // namespace lps::cli

#endif
