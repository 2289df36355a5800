#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <vector>

#include "cusp/potential.hpp"

namespace cusp {

// Uniform cell-centred grid covering B_{R0}; only cells whose centre lies in B_{R0} are unknowns.
// The origin sits on a cell vertex, so no centre coincides with the cusp.
struct Grid {
    double h = 0.0;
    double x0 = 0.0;  // lower-left corner (both axes)
    int n = 0;        // cells per side
    std::vector<int> index;       // n*n → unknown id or -1
    std::vector<Point> centers;   // per unknown
    std::vector<double> a;        // coefficient at the centre
    std::vector<RegionTag> tag;   // region of the centre
    Point center(int i, int j) const { return {x0 + (i + 0.5) * h, x0 + (j + 0.5) * h}; }
    std::size_t size() const { return centers.size(); }
};

struct FdProblem {
    DiskGeometry geo;
    MediumParams params;
    std::function<double(double theta)> boundary;  // Dirichlet data on |x| = R0
    PiecewiseField f;                               // div-form right-hand side
    std::function<double(Point)> source;            // optional scalar source s: div(a∇u) = div f + s
};

struct LinearSystem {
    Grid grid;
    Eigen::SparseMatrix<double> A;  // SPD
    Eigen::VectorXd b;
};

// Flux-conservative 5-point scheme. Face coefficients are harmonic means weighted by the
// fraction of the centre-to-centre segment in each phase; Dirichlet faces use the exact
// boundary crossing distance (diagonal-only change). RHS: face averages of f·n, split at
// circle crossings.
LinearSystem assemble(const FdProblem& prob, double h);

struct DiscreteSolution {
    Grid grid;
    Eigen::VectorXd u;
    double residual = 0.0;  // ‖Au - b‖/‖b‖
    int iterations = 0;
    double h = 0.0;
};

DiscreteSolution solve_system(const LinearSystem& sys, double tol = 1e-10, int max_iter = 20000);

enum class NormKind { Linf, L2 };

struct CompareSpec {
    NormKind norm = NormKind::L2;
    double interface_band = 2.0;  // in units of h
    double cusp_radius = 4.0;     // in units of h
    int stride = 1;               // keep every stride-th cell in each direction
};

// Cells retained for comparison (indices into grid.centers).
std::vector<std::size_t> comparison_cells(const Grid& grid, const DiskGeometry& geo, const CompareSpec& spec);

struct ErrorReport {
    double relative = 0.0;
    double absolute = 0.0;
    std::size_t count = 0;
    double region_relative[3] = {0.0, 0.0, 0.0};  // by Phase
};

// values[i] is the field at grid.centers[cells[i]].
ErrorReport compare(const std::vector<double>& values, const DiscreteSolution& sol,
                    const std::vector<std::size_t>& cells, NormKind norm);

void write_grid_csv(const std::string& path, const DiscreteSolution& sol, const std::string& header = {});

}  // namespace cusp
