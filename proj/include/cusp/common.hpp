#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace cusp {

using cplx = std::complex<double>;
using Vec2 = std::array<double, 2>;

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;
    cplx z() const { return {x1, x2}; }
    static Point from(cplx z) { return {z.real(), z.imag()}; }
};

// Error classes map onto CLI exit codes (config=2, convergence=3, domain=4).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
    double achieved;
    ConvergenceError(const std::string& what, double achieved_)
        : std::runtime_error(what), achieved(achieved_) {}
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
struct SeriesValue {
    T value{};
    double tail_bound = 0.0;
    int terms_used = 0;
};

struct TruncationPolicy {
    enum class Mode { FixedK, TailTarget };
    Mode mode = Mode::TailTarget;
    int k_max = 100000;
    double tail_tol = 1e-12;

    static TruncationPolicy fixed(int k) { return {Mode::FixedK, k, 0.0}; }
    static TruncationPolicy target(double tol, int k_max = 100000) {
        return {Mode::TailTarget, k_max, tol};
    }
};

// Number of worker threads: CUSP_THREADS if set, otherwise the OpenMP default.
int thread_count();

// Runs fn(i) for i in [0, n); each index is processed independently so the
// per-index results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// log of the binomial coefficient C(n, k)
double log_binom(int n, int k);

}  // namespace cusp
