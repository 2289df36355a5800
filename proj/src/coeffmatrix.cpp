#include "cusp/coeffmatrix.hpp"

#include <cmath>
#include <limits>

namespace cusp {

namespace {

void check_matrix_args(double alpha, double R0) {
    if (!(R0 > 2.0)) throw ConfigError("matrix operations require R0 > 2");
    if (!(alpha > -1.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (-1, 1)");
}

// Σ_{k≥1} r^k exp(logc) (kR0)^{-p} with a geometric tail bound.
SeriesValue<double> power_sum(double r, int p, double logc, double R0, double tol) {
    SeriesValue<double> out;
    if (r == 0.0) return out;
    const double ar = std::abs(r);
    double sum = 0.0;
    int k = 1;
    for (;; ++k) {
        sum += std::pow(r, k) * std::exp(logc - p * std::log(k * R0));
        const double tail = std::pow(ar, k + 1) * std::exp(logc - p * std::log((k + 1) * R0)) / (1.0 - ar);
        out.tail_bound = tail;
        if (tail <= tol || k > 10000000) break;
    }
    out.value = sum;
    out.terms_used = k;
    return out;
}

// Σ_{k≥1} r^k h(k) with |h| non-increasing; h supplied as a callable.
template <class F>
SeriesValue<double> ksum(double r, F h, double tol) {
    SeriesValue<double> out;
    if (r == 0.0) return out;
    const double ar = std::abs(r);
    double sum = 0.0;
    int k = 1;
    for (;; ++k) {
        sum += std::pow(r, k) * h(k);
        const double tail = std::pow(ar, k + 1) * std::abs(h(k + 1)) / (1.0 - ar);
        out.tail_bound = tail;
        if (tail <= tol || k > 10000000) break;
    }
    out.value = sum;
    out.terms_used = k;
    return out;
}

double entry_tol(const TruncationPolicy& t) { return std::min(t.tail_tol, 1e-17); }

}  // namespace

SeriesValue<double> b_entry(int l, int j, double alpha, double R0, const TruncationPolicy& trunc) {
    check_matrix_args(alpha, R0);
    if (l < 0 || j < 0) throw ConfigError("matrix indices must be non-negative");
    if (j == 0 || (l % 2) != (j % 2)) return {};
    const double tol = entry_tol(trunc);
    if (j % 2) {
        const int L = (l + 1) / 2, J = (j + 1) / 2;
        auto s = power_sum(alpha, 2 * L + 2 * J - 2, log_binom(2 * L + 2 * J - 3, 2 * J - 2), R0, tol);
        return {-2.0 * s.value, 2.0 * s.tail_bound, s.terms_used};
    }
    const int L = l / 2, J = j / 2;
    auto s = power_sum(-alpha, 2 * L + 2 * J, log_binom(2 * L + 2 * J - 1, 2 * J - 1), R0, tol);
    return {2.0 * s.value, 2.0 * s.tail_bound, s.terms_used};
}

ColumnSum column_abs_sum(int j, double alpha, double R0, const TruncationPolicy& trunc) {
    check_matrix_args(alpha, R0);
    if (j < 1) throw ConfigError("column_abs_sum requires j ≥ 1");
    const double tol = entry_tol(trunc);
    ColumnSum out;
    if (j % 2) {
        const int J = (j + 1) / 2;
        auto h = [&](int k) {
            return std::pow(k * R0 - 1.0, 1 - 2 * J) - std::pow(k * R0 + 1.0, 1 - 2 * J);
        };
        auto s = ksum(alpha, h, tol);
        out.value = {std::abs(s.value), s.tail_bound, s.terms_used};
        out.signed_sum = -s.value;
        out.is_bound = false;
    } else {
        const int J = j / 2;
        auto h = [&](int k) {
            return std::pow(k * R0 - 1.0, -2 * J) + std::pow(k * R0 + 1.0, -2 * J) -
                   2.0 * std::pow(k * R0, -2 * J);
        };
        auto b = ksum(std::abs(alpha), h, tol);
        auto s = ksum(-alpha, h, tol);
        out.value = b;
        out.signed_sum = s.value;
        out.is_bound = true;
    }
    return out;
}

double block_tail_bound(int N, double alpha, double R0) {
    check_matrix_args(alpha, R0);
    if (N < 0) throw ConfigError("block_tail_bound requires N ≥ 0");
    const double aa = std::abs(alpha);
    if (aa == 0.0) return 0.0;
    // Row r ≥ 1: Σ_j |B_{r,j}| ≤ Σ_k |α|^k [(kR0-1)^{-(r+1)} + (-1)^{r+1} (kR0+1)^{-(r+1)}];
    // row 0: Σ_k 2|α|^k/((kR0)² - 1). Summing the geometric series over r ≥ N in closed form:
    const int N1 = std::max(N, 1);
    auto h = [&](int k) {
        const double a = k * R0 - 1.0, b = k * R0 + 1.0;
        double v = std::pow(a, -N1) / (a - 1.0) + ((N1 % 2) ? 1.0 : -1.0) * std::pow(b, -N1) / (b + 1.0);
        if (N == 0) v += 2.0 / ((k * R0) * (k * R0) - 1.0);
        return v;
    };
    auto s = ksum(aa, h, 1e-300);
    // the first term dominates; add the certified remainder so the result stays an upper bound
    return s.value + s.tail_bound;
}

double TruncatedMatrix::min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (double v : gap) g = std::min(g, v);
    return g;
}

namespace {

void fill_gaps(TruncatedMatrix& T) {
    const int n = T.N + 1;
    T.gap.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (j == 0) {
            T.gap[0] = std::abs(T.M(0, 0));
            continue;
        }
        double off = 0.0;
        for (int l = 1; l < n; ++l)
            if (l != j) off += std::abs(T.M(l, j));
        T.gap[j] = std::abs(T.M(j, j)) - off;
    }
}

}  // namespace

TruncatedMatrix build_truncated(int N, double alpha, double R0) {
    check_matrix_args(alpha, R0);
    if (N < 1) throw ConfigError("build_truncated requires N ≥ 1");
    TruncatedMatrix T;
    T.N = N;
    T.alpha = alpha;
    T.R0 = R0;
    T.M = Eigen::MatrixXd::Identity(N + 1, N + 1);
    T.M(0, 0) = (1.0 - alpha) / (1.0 + alpha);  // 1/a0 under the constant-1 convention
    for (int j = 1; j <= N; ++j)
        for (int l = (j % 2); l <= N; l += 2) T.M(l, j) += b_entry(l, j, alpha, R0).value;
    fill_gaps(T);
    if (T.min_gap() <= 0.0)
        throw std::logic_error("build_truncated: column dominance violated (internal inconsistency)");
    return T;
}

TruncatedMatrix build_numerical(int N, const MediumParams& params, Family family, Parity parity,
                                int n_quad, const TruncationPolicy& trunc) {
    if (N < 1) throw ConfigError("build_numerical requires N ≥ 1");
    TruncatedMatrix T;
    T.N = N;
    T.alpha = params.alpha();
    T.R0 = params.R0;
    T.parity = parity;
    T.family = family;
    T.M = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int j = 0; j <= N; ++j) {
        if (parity == Parity::Odd && j == 0) {
            T.M(0, 0) = 1.0;  // v_0 ≡ 0; keeps the system square, g_0 must vanish
            continue;
        }
        CoeffVector c = numerical_trace_fourier({family, parity, j}, params, n_quad, N, trunc);
        for (int l = 0; l <= N; ++l) T.M(l, j) = c.entries[l];
    }
    fill_gaps(T);
    return T;
}

int select_N(double alpha, double R0, double tol, int n_cap) {
    for (int N = 1; N <= n_cap; ++N)
        if (block_tail_bound(N, alpha, R0) <= tol) return N;
    return n_cap;
}

double lp_s_norm(const std::vector<double>& v, double s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += v[j] * v[j] * std::pow(1.0 + j, 2.0 * s);
    return std::sqrt(acc);
}

double lp_s_norm(const CoeffVector& v, double s) { return lp_s_norm(v.entries, s); }

ExpandReport expand_with(const CoeffVector& g, const TruncatedMatrix& T) {
    const int n = T.N + 1;
    Eigen::VectorXd gv = Eigen::VectorXd::Zero(n);
    double gtail = 0.0;
    for (std::size_t l = 0; l < g.entries.size(); ++l) {
        if (static_cast<int>(l) < n)
            gv(l) = g.entries[l];
        else
            gtail += g.entries[l] * g.entries[l];
    }
    if (T.parity == Parity::Odd) gv(0) = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(T.M);
    Eigen::VectorXd a = lu.solve(gv);
    ExpandReport rep;
    rep.N = T.N;
    const double gn = gv.norm();
    rep.residual = gn > 0.0 ? (T.M * a - gv).norm() / gn : (T.M * a).norm();
    rep.a.parity = T.parity;
    rep.a.s_weight = g.s_weight;
    rep.a.entries.assign(a.data(), a.data() + n);
    const double gs = lp_s_norm(g, g.s_weight);
    rep.stability_ratio = gs > 0.0 ? lp_s_norm(rep.a, g.s_weight) / gs : 0.0;
    rep.g_tail = std::sqrt(gtail);
    if (!(rep.residual <= 1e-10))
        throw ConvergenceError("expand_boundary: ill-conditioned truncation", rep.residual);
    return rep;
}

ExpandReport expand_boundary(const CoeffVector& g, int N, const MediumParams& params, double tol) {
    if (params.a0 != params.b0 || g.parity != Parity::Even)
        throw ConfigError("expand_boundary uses the closed-form matrix: symmetric family, even parity");
    const double alpha = params.alpha();
    if (N <= 0) {
        N = select_N(alpha, params.R0, tol);
        int last = 0;
        for (std::size_t l = 0; l < g.entries.size(); ++l)
            if (std::abs(g.entries[l]) > tol) last = static_cast<int>(l);
        N = std::max(N, last + 1);
    }
    TruncatedMatrix T = build_truncated(N, alpha, params.R0);
    ExpandReport rep = expand_with(g, T);
    rep.block_tail = block_tail_bound(N, alpha, params.R0);
    return rep;
}

}  // namespace cusp
