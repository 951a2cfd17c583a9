#ifndef LPS_DIAGNOSTICS_HPP
#define LPS_DIAGNOSTICS_HPP

#include "lps/constructions.hpp"
#include "lps/rpca.hpp"
#include "lps/trace.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lps {

enum class Verdict { ConvergedFeasible, DivergingComponents, Stalled, BudgetExhausted };

inline std::string verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::ConvergedFeasible: return "ConvergedFeasible";
    case Verdict::DivergingComponents: return "DivergingComponents";
    case Verdict::Stalled: return "Stalled";
    case Verdict::BudgetExhausted: return "BudgetExhausted";
    }
    return "?";
}

struct Classification {
    Verdict verdict = Verdict::BudgetExhausted;
    double final_residual = 0.0;
    double max_component_norm = 0.0;
    std::optional<double> growth_exponent;
};

struct ClassifyConfig {
    double res_tol = 1e-4; // times trace.input_scale
    double divergence_cap = 1e3; // times trace.input_scale
    long long window = 50;
};

/// Power-law exponent of norm_L over the trailing half of the trace.
inline std::optional<double> growth_rate(const SolverTrace& trace)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto& rec : trace.records)
        if (rec.iter > 0 && rec.norm_L > 0.0)
            pts.emplace_back(std::log(static_cast<double>(rec.iter)), std::log(rec.norm_L));
    if (pts.size() < 10)
        return std::nullopt;
    const size_t start = pts.size() / 2;
    const double k = static_cast<double>(pts.size() - start);
    double sx = 0, sy = 0;
    for (size_t q = start; q < pts.size(); ++q) {
        sx += pts[q].first;
        sy += pts[q].second;
    }
    const double mx = sx / k, my = sy / k;
    double sxx = 0, sxy = 0;
    for (size_t q = start; q < pts.size(); ++q) {
        sxx += (pts[q].first - mx) * (pts[q].first - mx);
        sxy += (pts[q].first - mx) * (pts[q].second - my);
    }
    if (!(sxx > 0.0))
        return std::nullopt;
    return sxy / sxx;
}

inline Classification classify(const SolverTrace& trace, const ClassifyConfig& cfg = {})
{
    if (trace.records.empty())
        throw DomainError("classify: empty trace");
    const double scale = trace.input_scale > 0.0 ? trace.input_scale : 1.0;
    const TraceRecord& last = trace.last();
    Classification c;
    c.final_residual = last.residual;
    auto comp = [](const TraceRecord& r) { return std::max(r.norm_L, r.norm_S); };
    c.max_component_norm = comp(last);
    c.growth_exponent = growth_rate(trace);

    // trailing window by iteration count
    size_t first = trace.records.size() - 1;
    while (first > 0 && trace.records[first - 1].iter >= last.iter - cfg.window)
        --first;
    const TraceRecord& head = trace.records[first];

    const bool small = last.residual <= cfg.res_tol * scale;
    const bool big = c.max_component_norm >= cfg.divergence_cap * scale;
    bool growing = first < trace.records.size() - 1;
    for (size_t q = first + 1; q < trace.records.size() && growing; ++q)
        growing = comp(trace.records[q]) >= comp(trace.records[q - 1]);

    if (small && big && growing)
        c.verdict = Verdict::DivergingComponents;
    else if (small && !big)
        c.verdict = Verdict::ConvergedFeasible;
    else if (!small && first < trace.records.size() - 1 &&
             std::abs(last.residual - head.residual) <= 1e-12 * std::max(head.residual, 1e-300))
        c.verdict = Verdict::Stalled;
    else
        c.verdict = Verdict::BudgetExhausted;
    return c;
}

inline nlohmann::json to_json(const Classification& c)
{
    nlohmann::json j = {{"verdict", verdict_name(c.verdict)},
                        {"final_residual", c.final_residual},
                        {"max_component_norm", c.max_component_norm}};
    j["growth_exponent"] = c.growth_exponent ? nlohmann::json(*c.growth_exponent) : nlohmann::json(nullptr);
    return j;
}

struct EpsilonRow {
    double eps = 0.0;
    double residual = 0.0;
    double norm_L = 0.0;
    double norm_S = 0.0;
    Index rank_L = 0;
    Index nnz_S = 0;
};

inline std::vector<double> default_eps_schedule() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

inline std::vector<EpsilonRow> epsilon_study(const ConstructionSpec& spec, const std::vector<double>& schedule)
{
    std::vector<EpsilonRow> rows;
    for (double eps : schedule) {
        ConstructionSpec s = spec;
        s.epsilon = eps;
        const ConstructionOutput out = construct(s);
        rows.push_back({eps, (out.M_eps - out.M_limit).norm(), out.L_eps.norm(), out.S_eps.norm(),
                        numerical_rank(out.L_eps), count_nonzero(out.S_eps)});
    }
    return rows;
}

// ---- emission -------------------------------------------------------------

inline constexpr const char* kTraceHeader = "iter,residual,norm_L,norm_S,rank_L,nnz_S";
inline constexpr const char* kSweepHeader = "lambda,rank_L,nnz_S,nuclear_L,l1_S";
inline constexpr const char* kEpsilonHeader = "eps,residual,norm_L,norm_S,rank_L,nnz_S";

inline std::string trace_csv(const SolverTrace& t)
{
    std::ostringstream os;
    os << kTraceHeader << '\n';
    for (const auto& r : t.records)
        os << r.iter << ',' << format_real(r.residual) << ',' << format_real(r.norm_L) << ','
           << format_real(r.norm_S) << ',' << r.rank_L << ',' << r.nnz_S << '\n';
    return os.str();
}

inline nlohmann::json to_json(const SolverTrace& t)
{
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : t.records)
        recs.push_back({{"iter", r.iter},
                        {"residual", r.residual},
                        {"norm_L", r.norm_L},
                        {"norm_S", r.norm_S},
                        {"rank_L", r.rank_L},
                        {"nnz_S", r.nnz_S}});
    return {{"algo", t.algo},
            {"config", t.config_snapshot},
            {"input_scale", t.input_scale},
            {"stop_reason", t.stop_reason},
            {"records", recs}};
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::ostringstream os;
    os << kSweepHeader << '\n';
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            os << format_real(r.lambda) << ",,,,\n";
            continue;
        }
        os << format_real(r.lambda) << ',' << r.rank_L << ',' << r.nnz_S << ',' << format_real(r.nuclear_L) << ','
           << format_real(r.l1_S) << '\n';
    }
    return os.str();
}

inline nlohmann::json to_json(const std::vector<SweepRow>& rows)
{
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j = {{"lambda", r.lambda},
                            {"rank_L", r.rank_L},
                            {"nnz_S", r.nnz_S},
                            {"nuclear_L", r.nuclear_L},
                            {"l1_S", r.l1_S}};
        if (!r.error.empty())
            j["error"] = r.error;
        a.push_back(j);
    }
    return a;
}

inline std::string epsilon_csv(const std::vector<EpsilonRow>& rows)
{
    std::ostringstream os;
    os << kEpsilonHeader << '\n';
    for (const auto& r : rows)
        os << format_real(r.eps) << ',' << format_real(r.residual) << ',' << format_real(r.norm_L) << ','
           << format_real(r.norm_S) << ',' << r.rank_L << ',' << r.nnz_S << '\n';
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open '" + path + "' for writing");
    f << text;
    if (!f)
        throw IoError("write failed for '" + path + "'");
}

inline std::string read_text_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace detail

inline SolverTrace parse_trace_csv(const std::string& text, double input_scale = 1.0)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kTraceHeader)
        throw DomainError(std::string("trace CSV must start with header ") + kTraceHeader);
    SolverTrace t;
    t.input_scale = input_scale;
    long long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != 6)
            throw DomainError("trace CSV line " + std::to_string(lineno) + ": expected 6 fields");
        try {
            TraceRecord r;
            r.iter = std::stoll(cells[0]);
            r.residual = parse_real(cells[1]);
            r.norm_L = parse_real(cells[2]);
            r.norm_S = parse_real(cells[3]);
            r.rank_L = std::stoll(cells[4]);
            r.nnz_S = std::stoll(cells[5]);
            if (!t.records.empty() && r.iter <= t.records.back().iter)
                throw DomainError("iterations must increase");
            t.records.push_back(r);
        } catch (const std::exception& e) {
            throw DomainError("trace CSV line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return t;
}

inline SolverTrace read_trace_csv(const std::string& path, double input_scale = 1.0)
{
    return parse_trace_csv(read_text_file(path), input_scale);
}

} // namespace lps

#endif
