#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "cusp/coeffmatrix.hpp"
#include "cusp/potential.hpp"

namespace cusp {

// Boundary data on |x| = R0 split by parity in x1: even part in the e_j basis,
// odd part in the ẽ_j basis (odd[0] unused, always 0).
struct FourierBoundary {
    std::vector<double> even;
    std::vector<double> odd;
    double R0 = 3.0;

    double operator()(double theta) const;
    std::vector<double> samples(int n) const;  // on θ_i = 2πi/n
    static FourierBoundary from_function(const std::function<double(double)>& g, double R0, int n = 4096);
};

// Uniform samples g(2πi/n), n a power of two ≥ 256.
FourierBoundary analyze_boundary(const std::vector<double>& samples, double R0);
// Explicit grid; rejected unless θ_i = 2πi/n to 1e-12.
FourierBoundary analyze_boundary(const std::vector<double>& theta, const std::vector<double>& samples, double R0);

struct SolveOptions {
    double tol = 1e-10;      // boundary re-synthesis must match g within 10·tol (max norm)
    int n_theta = 4096;      // θ-grid for columns and the re-synthesis check
    int n_cap = 256;         // largest truncation tried
    double s = 1.0;          // ℓ^s weight reported for the coefficients
    bool allow_unconverged = false;  // keep the result (flagged) instead of throwing
    TruncationPolicy trunc = TruncationPolicy::target(1e-14);
};

struct ParticularPart;

struct SeriesSolution {
    std::vector<double> even;  // γ over u_j
    std::vector<double> odd;   // γ over v_j (odd[0] = 0)
    MediumParams params;
    Family family = Family::Symmetric;
    TruncationPolicy trunc;
    double s = 1.0;
    double ls_norm = 0.0;              // (Σ|γ_j|²(1+j)^{2s})^{1/2} over both parities
    double boundary_residual = 0.0;    // max |trace - g| on the check grid
    bool converged = true;
    std::shared_ptr<const ParticularPart> particular;  // ũ for nonhomogeneous solves
};

struct ParticularPart {
    VolumeProblem problem;
    TransmissionKernel kernel;
    QuadSpec quad;
    double value(Point x, std::optional<Phase> hint = {}) const;
};

SeriesSolution solve_homogeneous(const FourierBoundary& g, const MediumParams& params, const SolveOptions& opt = {});

struct FieldSample {
    Point x;
    RegionTag tag = RegionTag::Matrix;
    double u = 0.0;
    Vec2 grad{0.0, 0.0};
    double tail_bound = 0.0;
};

struct EvalOptions {
    bool gradient = true;
    double fd_step = 1e-5;  // central-difference step for the gradient of ũ
};

FieldSample evaluate_point(const SeriesSolution& sol, Point x, std::optional<Phase> hint = {},
                           const EvalOptions& opt = {});
std::vector<FieldSample> evaluate_solution(const SeriesSolution& sol, const std::vector<Point>& pts,
                                           const std::vector<std::optional<Phase>>& hints = {},
                                           const EvalOptions& opt = {});

struct NonhomogeneousOptions {
    SolveOptions solve;
    QuadSpec quad;
    PotentialRoute route = PotentialRoute::ImageSeries;
    int n_trace = 4096;  // θ-grid for the boundary correction ũ|_{∂B_R0}
};

// u = ũ + w: ũ the volume potential of f (physical kernel), w homogeneous with boundary g - ũ.
SeriesSolution solve_nonhomogeneous(const PiecewiseField& f, const FourierBoundary& g, const MediumParams& params,
                                    const NonhomogeneousOptions& opt = {});

// Solution for disks of radii r1, r2 computed in the canonical geometry through the
// Möbius normalization F and evaluated in original coordinates.
struct ComposedSolution {
    DiskGeometry geo;
    MediumParams params;  // original a0, b0, R0
    MobiusMap map;
    SeriesSolution canonical;    // in w = F(x); params.R0 there is only a scale
    // fundamental-solution part Σ c_k G(w, y_k) with matrix-phase sources outside F(B_R0)
    std::vector<Point> sources;
    std::vector<double> weights;
    TransmissionKernel kernel;
    double boundary_residual = 0.0;  // max |u - g| on the original outer circle
    int N = 0;

    FieldSample evaluate(Point x, std::optional<Phase> hint = {}) const;
};

ComposedSolution unequal_radius_solve(const PiecewiseField& f, const FourierBoundary& g, const DiskGeometry& geo,
                                      const MediumParams& params, const NonhomogeneousOptions& opt = {});

}  // namespace cusp
