#ifndef LPS_MATRIX_HPP
#define LPS_MATRIX_HPP

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lps {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Bad parameters or preconditions (CLI exit code 1).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File and stream failures (CLI exit code 2).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Entry {
    Index i = 0;
    Index j = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
    friend auto operator<=>(const Entry&, const Entry&) = default;
};

using Support = std::vector<Entry>;

inline bool all_finite(const Matrix& M) { return M.allFinite(); }

inline void require_finite(const Matrix& M, const char* what)
{
    if (!M.allFinite())
        throw DomainError(std::string(what) + ": matrix has non-finite entries");
}

/// splitmix64; identical streams on every platform for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal()
    {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // magnitude in [lo, hi], random sign
    double signed_uniform(double lo, double hi)
    {
        const double mag = uniform(lo, hi);
        return (next_u64() & 1ULL) ? -mag : mag;
    }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    Matrix gaussian(Index rows, Index cols)
    {
        Matrix G(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j)
                G(i, j) = normal();
        return G;
    }

private:
    std::uint64_t state_;
};

/// Shortest decimal string that parses back to the same double.
inline std::string format_real(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline double parse_real(const std::string& tok)
{
    double v = 0.0;
    const char* first = tok.data();
    const char* last = first + tok.size();
    if (first != last && *first == '+')
        ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw IoError("cannot parse real '" + tok + "'");
    return v;
}

inline void write_matrix(std::ostream& os, const Matrix& M)
{
    os << M.rows() << ' ' << M.cols() << '\n';
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j)
                os << ' ';
            os << format_real(M(i, j));
        }
        os << '\n';
    }
}

inline std::string matrix_to_string(const Matrix& M)
{
    std::ostringstream os;
    write_matrix(os, M);
    return os.str();
}

inline Matrix read_matrix(std::istream& is)
{
    long long rows = 0, cols = 0;
    if (!(is >> rows >> cols))
        throw IoError("matrix header 'rows cols' missing");
    if (rows <= 0 || cols <= 0)
        throw IoError("matrix dimensions must be positive");
    Matrix M(rows, cols);
    std::string tok;
    for (long long i = 0; i < rows; ++i)
        for (long long j = 0; j < cols; ++j) {
            if (!(is >> tok))
                throw IoError("matrix truncated at entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
            M(i, j) = parse_real(tok);
        }
    if (is >> tok)
        throw IoError("trailing data after matrix entries");
    if (!M.allFinite())
        throw IoError("matrix has non-finite entries");
    return M;
}

inline Matrix matrix_from_string(const std::string& s)
{
    std::istringstream is(s);
    return read_matrix(is);
}

inline Matrix read_matrix_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    try {
        return read_matrix(in);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

inline void write_matrix_file(const std::string& path, const Matrix& M)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    write_matrix(out, M);
    if (!out)
        throw IoError("write failed for " + path);
}

inline Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
    const Index m = static_cast<Index>(rows.size());
    const Index n = m ? static_cast<Index>(rows.begin()->size()) : 0;
    Matrix M(m, n);
    Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Index>(row.size()) != n)
            throw DomainError("ragged matrix literal");
        Index j = 0;
        for (double v : row)
            M(i, j++) = v;
        ++i;
    }
    return M;
}

} // namespace lps

#endif
