#ifndef LPS_TRACE_HPP
#define LPS_TRACE_HPP

#include "lps/linalg.hpp"

#include <json.hpp>

#include <chrono>
#include <string>
#include <vector>

namespace lps {

struct TraceRecord {
    long long iter = 0;
    double residual = 0.0;
    double norm_L = 0.0;
    double norm_S = 0.0;
    Index rank_L = 0;
    Index nnz_S = 0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct SolverTrace {
    std::string algo;
    std::vector<TraceRecord> records;
    nlohmann::json config_snapshot = nlohmann::json::object();
    double input_scale = 1.0; // ||M||_F, or ||P_Omega(M)||_F for completion
    double wall_time_sec = 0.0;
    std::string stop_reason;

    const TraceRecord& last() const { return records.back(); }
};

/// Keeps every iteration up to 1000, then every 10th, plus the final one.
class TraceRecorder {
public:
    explicit TraceRecorder(SolverTrace& trace) : trace_(trace), t0_(std::chrono::steady_clock::now()) {}

    static bool keep(long long iter) { return iter <= 1000 || iter % 10 == 0; }

    void record(const TraceRecord& rec)
    {
        if (!trace_.records.empty() && rec.iter <= trace_.records.back().iter)
            throw std::logic_error("trace iterations must increase");
        if (!std::isfinite(rec.residual) || !std::isfinite(rec.norm_L) || !std::isfinite(rec.norm_S))
            throw std::logic_error("non-finite trace record");
        pending_ = rec;
        has_pending_ = true;
        if (keep(rec.iter)) {
            trace_.records.push_back(rec);
            has_pending_ = false;
        }
    }

    void finish(const std::string& reason)
    {
        if (has_pending_)
            trace_.records.push_back(pending_);
        has_pending_ = false;
        trace_.stop_reason = reason;
        trace_.wall_time_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    SolverTrace& trace_;
    std::chrono::steady_clock::time_point t0_;
    TraceRecord pending_;
    bool has_pending_ = false;
};

inline TraceRecord make_record(long long iter, const Matrix& M, const Matrix& L, const Matrix& S)
{
    TraceRecord rec;
    rec.iter = iter;
    rec.residual = (M - L - S).norm();
    rec.norm_L = L.norm();
    rec.norm_S = S.norm();
    rec.rank_L = L.allFinite() ? numerical_rank(L) : 0;
    rec.nnz_S = count_nonzero(S);
    return rec;
}

} // namespace lps

#endif
