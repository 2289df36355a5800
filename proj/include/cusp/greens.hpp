#pragma once

#include <optional>
#include <vector>

#include "cusp/basis.hpp"

namespace cusp {

enum class KernelGeometry { Strip, Disk };
enum class Normalization { Paper, Physical };

// Paper convention: the kernel behaves like log|x - y| near the source, i.e.
// div(a∇G) = 2π a(y) δ_y.  Physical divides by 2π a(y) so div(a∇G) = δ_y.
struct TransmissionKernel {
    KernelGeometry geometry = KernelGeometry::Disk;
    MediumParams params;
    TruncationPolicy trunc = TruncationPolicy::target(1e-12);
    Normalization norm = Normalization::Paper;

    double scale(Phase y_phase) const;  // 1 or 1/(2π a(y))
};

// One image term: coef · log|P_s(x) - y*| where P_s(x) = x + (s, 0) (strip) or
// X_s(x) (disk) and y* = y / its reflection ((-y1, y2) in the strip, ȳ in the disk).
struct ImageTerm {
    double coef;
    int shift;
    bool reflected;
};

// Terms of series group k for a source in phase y_phase evaluated in phase x_phase.
// Strip phases: Inclusion1 ↔ x1 > 1/2, Inclusion2 ↔ x1 < -1/2.
void image_terms(Phase y_phase, Phase x_phase, const MediumParams& p, int k, std::vector<ImageTerm>& out);

struct KernelPoint {
    std::optional<Phase> x_hint;
    std::optional<Phase> y_hint;
};

SeriesValue<double> eval_gtilde(Point x, Point y, const TransmissionKernel& K, KernelPoint hints = {});
SeriesValue<double> eval_g(Point x, Point y, const TransmissionKernel& K, KernelPoint hints = {});

// Dispatch on K.geometry.
SeriesValue<double> eval_kernel(Point x, Point y, const TransmissionKernel& K, KernelPoint hints = {});
SeriesValue<Vec2> eval_kernel_gradient_x(Point x, Point y, const TransmissionKernel& K, KernelPoint hints = {});
SeriesValue<Vec2> eval_kernel_gradient_y(Point x, Point y, const TransmissionKernel& K, KernelPoint hints = {});

inline SeriesValue<Vec2> eval_g_gradient_y(Point x, Point y, const TransmissionKernel& K, KernelPoint h = {}) {
    TransmissionKernel k = K;
    k.geometry = KernelGeometry::Disk;
    return eval_kernel_gradient_y(x, y, k, h);
}
inline SeriesValue<Vec2> eval_g_gradient_x(Point x, Point y, const TransmissionKernel& K, KernelPoint h = {}) {
    TransmissionKernel k = K;
    k.geometry = KernelGeometry::Disk;
    return eval_kernel_gradient_x(x, y, k, h);
}

// Paper kernel plus α/(1-α)·G(x, c1) for sources in 𝔅1 (β/(1-β)·G(x, c2) in 𝔅2), c1,2 = (0, ±1).
// The image α log|X_{-1}(x) - ȳ| carries a point mass -α at the disk centre in x; the added
// x-only term cancels it, so div_x(a∇_x G) = 2π a(y) δ_y exactly.  Gradients in y are unchanged.
SeriesValue<double> eval_g_regular(Point x, Point y, const TransmissionKernel& K, KernelPoint hints = {});
double center_correction_weight(Phase y_phase, const MediumParams& p);

// The strip kernel with the source replaced by the origin (same branch table as y).
SeriesValue<double> strip_origin_kernel(Point x, Phase y_phase, const MediumParams& p,
                                        const TruncationPolicy& trunc, std::optional<Phase> x_hint = {});

// Coefficient of log|y| in the strip/disk correspondence for a source in y_phase.
double correspondence_constant(Phase y_phase, const MediumParams& p);

struct CorrespondenceResult {
    double residual = 0.0;
    double tail_bound = 0.0;
    double lhs = 0.0, rhs = 0.0;
};

// |G(Θx, y) - [G̃(x, Θy) - H(x) + C log|y|]| in the paper normalization; x is a strip point,
// y a disk point.
CorrespondenceResult correspondence_check(Point x, Point y, const MediumParams& p,
                                          const TruncationPolicy& trunc = TruncationPolicy::target(1e-12));

// Normalized charge ∮_{|x-y|=eps} a ∂_ν G ds with n_quad trapezoid nodes, divided by 2π a(y)
// in the paper convention; the ideal value is 1 in both conventions.
double contour_charge(Point y, double eps, const TransmissionKernel& K, int n_quad = 256);

}  // namespace cusp
