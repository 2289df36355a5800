#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cusp/basis.hpp"

namespace cusp {

// Entry B_{l,j} of M = id + B in the e_l basis (l, j ≥ 0); R0 > 2, |alpha| < 1.
SeriesValue<double> b_entry(int l, int j, double alpha, double R0, const TruncationPolicy& trunc = {});

struct ColumnSum {
    SeriesValue<double> value;  // odd j: |signed closed form|; even j: the upper bound
    double signed_sum = 0.0;    // Σ_l B_{l,j} over l ≥ 1 (closed form)
    bool is_bound = false;      // true for even columns
};

// Σ_{l≥1} |B_{l,j}| through the single-sum closed forms.
ColumnSum column_abs_sum(int j, double alpha, double R0, const TruncationPolicy& trunc = {});

// Upper bound on Σ_{l≥N} Σ_{j≥0} |B_{l,j}|.
double block_tail_bound(int N, double alpha, double R0);

struct TruncatedMatrix {
    int N = 0;
    Eigen::MatrixXd M;  // (N+1)×(N+1)
    double alpha = 0.0;
    double R0 = 3.0;
    Parity parity = Parity::Even;
    Family family = Family::Symmetric;
    std::vector<double> gap;  // |M_jj| - Σ_{l≠j} |M_lj| per column (rows/cols ≥ 1)
    double min_gap() const;
};

// Closed-form symmetric even-parity matrix with the constant-1 convention: M_{0,0} = 1/a0.
TruncatedMatrix build_truncated(int N, double alpha, double R0);

// Column-by-column quadrature build for any family/parity (columns = traces of u_j or v_j).
TruncatedMatrix build_numerical(int N, const MediumParams& params, Family family, Parity parity,
                                int n_quad = 4096, const TruncationPolicy& trunc = {});

struct ExpandReport {
    CoeffVector a;
    int N = 0;
    double residual = 0.0;         // ‖M_N a - g_N‖ / ‖g_N‖
    double stability_ratio = 0.0;  // ‖a‖_{ℓ^s}/‖g‖_{ℓ^s}
    double block_tail = 0.0;
    double g_tail = 0.0;           // ℓ² mass of g beyond N
};

// Smallest N with block_tail_bound(N) ≤ tol (capped at n_cap).
int select_N(double alpha, double R0, double tol, int n_cap = 400);

// Solve M_N a = g_N. N ≤ 0: auto-select via block_tail_bound (symmetric closed form).
ExpandReport expand_boundary(const CoeffVector& g, int N, const MediumParams& params, double tol = 1e-12);
ExpandReport expand_with(const CoeffVector& g, const TruncatedMatrix& M);

double lp_s_norm(const CoeffVector& v, double s);
double lp_s_norm(const std::vector<double>& v, double s);

}  // namespace cusp
