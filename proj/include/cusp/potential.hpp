#pragma once

#include <array>
#include <functional>
#include <optional>

#include "cusp/greens.hpp"

namespace cusp {

struct Smoothness {
    int n = 0;
    double gamma = 0.0;
};

// One vector field per phase (indexed by Phase); an empty component is zero.
struct PiecewiseField {
    std::array<std::function<Vec2(Point)>, 3> comp;
    std::array<Smoothness, 3> smoothness{};

    Vec2 operator()(Point y, Phase ph) const {
        const auto& f = comp[static_cast<int>(ph)];
        return f ? f(y) : Vec2{0.0, 0.0};
    }
    bool empty(Phase ph) const { return !comp[static_cast<int>(ph)]; }
    static PiecewiseField zero() { return {}; }
    static PiecewiseField constant(Phase ph, Vec2 v);
};

// η(r) = 1 on r ≤ l/2, 0 on r ≥ l, smooth step built from exp(-1/t) in between.
struct CutoffFunction {
    double l = 1.0;
    double value(Point y) const;
    Vec2 gradient(Point y) const;
};

// u and ∇u on the cutoff ring, with the phase of the point.
struct RingData {
    std::function<double(Point, Phase)> u;
    std::function<Vec2(Point, Phase)> grad;
};

// Polar quadrature about the singular point: Gauss panels in angle (≤ max_panel wide,
// split at tangent/intersection directions, cosine-graded), Gauss in radius per interval.
struct QuadSpec {
    int n_ang = 16;
    int n_rad = 16;
    double max_panel = kPi / 4.0;
    double support_radius = 3.0;  // region sets are intersected with B_{support_radius}

    QuadSpec refined() const { return {2 * n_ang, 2 * n_rad, max_panel, support_radius}; }
};

// ∫_{Y ∩ B_s} f(y) dy for a scalar integrand, by polar quadrature about c (the point where
// the integrand may be singular). Y is given by its phase; log_graded uses ρ = t² near c.
double integrate_region(Point c, Phase region, const QuadSpec& q, bool log_graded,
                        const std::function<double(Point, double /*rho*/)>& integrand);

// h(p) = ∫_Y ∇_y log|p - y| · f_Y(y) dy, or its reflected variant with log|p - ȳ|.
double log_layer(Point p, Phase region, bool reflected, const PiecewiseField& f, const QuadSpec& q);

// ∫_Y ∇_y G(x, y) · f_Y(y) dy (paper normalization) assembled as the image series of
// mapped layer potentials Σ c_t h^{(*)}(X_{s_t}(x)).
SeriesValue<double> reflected_sum_w(Point x, Phase region, const PiecewiseField& f, const MediumParams& p,
                                    const TruncationPolicy& trunc, const QuadSpec& q,
                                    std::optional<Phase> x_hint = {});

// Same integral by direct quadrature of the kernel gradient.
double direct_w(Point x, Phase region, const PiecewiseField& f, const TransmissionKernel& K, const QuadSpec& q,
                std::optional<Phase> x_hint = {});

enum class PotentialRoute { Direct, ImageSeries };

struct VolumeProblem {
    PiecewiseField f;
    std::optional<CutoffFunction> cutoff;  // absent: η ≡ 1
    std::optional<RingData> ring;          // absent: pure volume potential of f·η
    PotentialRoute route = PotentialRoute::Direct;
};

// ũ(x) = -∫ ∇_y G(x,y)·f̃(y) dy - ∫ G(x,y) s(y) dy with f̃ = fη + a u ∇η and
// s = f·∇η - a ∇u·∇η (ring terms only with ring data). Requires the physical normalization.
SeriesValue<double> volume_solution(Point x, const VolumeProblem& prob, const TransmissionKernel& K,
                                    const QuadSpec& q, std::optional<Phase> x_hint = {});

}  // namespace cusp
