#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cusp/common.hpp"
#include "cusp/geometry.hpp"

namespace cusp {

struct MediumParams {
    double a0 = 1.0;  // coefficient in the upper disk
    double b0 = 1.0;  // coefficient in the lower disk
    double R0 = 3.0;  // outer radius
    double alpha() const { return (a0 - 1.0) / (a0 + 1.0); }
    double beta() const { return (b0 - 1.0) / (b0 + 1.0); }
    double coefficient(Phase p) const {
        return p == Phase::Inclusion1 ? a0 : p == Phase::Inclusion2 ? b0 : 1.0;
    }
    void validate() const;
    static MediumParams from_alpha(double alpha, double R0);  // symmetric, a0 = b0
};

enum class Family { Symmetric, General };
enum class Parity { Even, Odd };

struct BasisId {
    Family family = Family::Symmetric;
    Parity parity = Parity::Even;
    int j = 0;
};

const char* to_string(Family f);
const char* to_string(Parity p);

// Finite coefficient sequence in the e_j basis (even parity: e_j = Re((-i)^j e^{ijθ}),
// i.e. e_{2l} = (-1)^l cos 2lθ, e_{2l-1} = (-1)^{l-1} sin(2l-1)θ, e_0 = 1) or the odd
// basis ẽ_j = Im((-i)^j e^{ijθ}) (ẽ_0 = 0, unused).
struct CoeffVector {
    std::vector<double> entries;
    Parity parity = Parity::Even;
    double s_weight = 0.0;
};

double trig_basis(Parity parity, int j, double theta);

// Ψ_j (even parity) or Ψ̃_j (odd parity); hint selects the branch formula for
// points on or near an interface.
SeriesValue<cplx> eval_psi(const BasisId& id, cplx z, const MediumParams& params,
                           const TruncationPolicy& trunc = {}, std::optional<Phase> hint = {});

// n-th complex derivative (n ≤ 3) of R0^{-j} Ψ_j.
SeriesValue<cplx> eval_psi_scaled_derivative(const BasisId& id, cplx z, const MediumParams& params,
                                             int n, const TruncationPolicy& trunc = {},
                                             std::optional<Phase> hint = {});

// u_j = R0^{-j} Re Ψ_j (even) / v_j = R0^{-j} Im Ψ̃_j (odd).
SeriesValue<double> eval_u(const BasisId& id, Point x, const MediumParams& params,
                           const TruncationPolicy& trunc = {}, std::optional<Phase> hint = {});

SeriesValue<Vec2> eval_u_gradient(const BasisId& id, Point x, const MediumParams& params,
                                  const TruncationPolicy& trunc = {}, std::optional<Phase> hint = {});

// ∂_{x1}^{mx} ∂_{x2}^{my} u_j, mx + my ≤ 3.
SeriesValue<double> eval_u_partial(const BasisId& id, Point x, const MediumParams& params, int mx,
                                   int my, const TruncationPolicy& trunc = {},
                                   std::optional<Phase> hint = {});

// Closed-form trace coefficients of u_j on |x| = R0 in the e_l basis, l = 0..n_max
// (symmetric family, even parity, R0 > 2).
CoeffVector trace_fourier(const BasisId& id, const MediumParams& params, int n_max,
                          const TruncationPolicy& trunc = {});

// Trapezoidal Fourier analysis of u_j on |x| = R0; entries l = 0..n_max in the
// basis matching id.parity.
CoeffVector numerical_trace_fourier(const BasisId& id, const MediumParams& params, int n_quad,
                                    int n_max, const TruncationPolicy& trunc = {});

// Fourier analysis of uniform samples g(θ_i), θ_i = 2πi/n, onto e_l or ẽ_l, l = 0..n_max.
std::vector<double> analyze_trig(const std::vector<double>& samples, Parity parity, int n_max);

struct AuditReport {
    int mx = 0, my = 0;
    // ratios[phase][j] = max over samples of |D^m u_j| R0^j/(j+|m|)^{|m|}
    std::vector<std::vector<double>> ratios;
    std::vector<double> median;
    std::vector<double> max;
    bool pass = false;
};

// Samples: points in closure(B_1) with their phase; points closer than band to an
// interface are skipped by the caller.
AuditReport derivative_bound_audit(Family family, Parity parity, int j_max, int mx, int my,
                                   const MediumParams& params,
                                   const std::vector<std::pair<Point, Phase>>& samples,
                                   const TruncationPolicy& trunc = {});

// Standard audit sample set in closure(B_1), at distance ≥ band from the interfaces.
std::vector<std::pair<Point, Phase>> audit_samples(int n_radial, int n_angular, double band);

}  // namespace cusp
