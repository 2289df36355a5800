#include "cusp/fdoracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace cusp {

namespace {

Phase phase_at(Point p, const DiskGeometry& geo) {
    const double d1 = std::hypot(p.x1, p.x2 - geo.r1) - geo.r1;
    const double d2 = std::hypot(p.x1, p.x2 + geo.r2) - geo.r2;
    if (d1 < 0.0) return Phase::Inclusion1;
    if (d2 < 0.0) return Phase::Inclusion2;
    return Phase::Matrix;
}

// parameters t ∈ (0,1) where the segment p + t(q - p) crosses either interface circle
void crossings(Point p, Point q, const DiskGeometry& geo, std::vector<double>& ts) {
    ts.clear();
    const double dx = q.x1 - p.x1, dy = q.x2 - p.x2;
    const double A = dx * dx + dy * dy;
    for (int s = 0; s < 2; ++s) {
        const double cy = s == 0 ? geo.r1 : -geo.r2, r = s == 0 ? geo.r1 : geo.r2;
        const double mx = p.x1, my = p.x2 - cy;
        const double B = 2.0 * (mx * dx + my * dy), C = mx * mx + my * my - r * r;
        const double disc = B * B - 4.0 * A * C;
        if (disc < 0.0) continue;
        const double sq = std::sqrt(disc);
        for (double t : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)})
            if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
}

Point lerp(Point p, Point q, double t) { return {p.x1 + t * (q.x1 - p.x1), p.x2 + t * (q.x2 - p.x2)}; }

// 1 / (average of 1/a along the segment)
double face_coefficient(Point p, Point q, const DiskGeometry& geo, const MediumParams& mp, std::vector<double>& ts) {
    crossings(p, q, geo, ts);
    double inv = 0.0, t0 = 0.0;
    ts.push_back(1.0);
    for (double t1 : ts) {
        if (t1 > t0) inv += (t1 - t0) / mp.coefficient(phase_at(lerp(p, q, 0.5 * (t0 + t1)), geo));
        t0 = t1;
    }
    return 1.0 / inv;
}

// average over the face segment [p, q] of f·nrm (phase-split, 3-point Gauss per piece)
double face_flux(Point p, Point q, Vec2 nrm, const FdProblem& prob, std::vector<double>& ts) {
    crossings(p, q, prob.geo, ts);
    static const double gx[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
    static const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    double acc = 0.0, t0 = 0.0;
    ts.push_back(1.0);
    for (double t1 : ts) {
        if (t1 > t0) {
            const Phase ph = phase_at(lerp(p, q, 0.5 * (t0 + t1)), prob.geo);
            if (!prob.f.empty(ph))
                for (int g = 0; g < 3; ++g) {
                    const Vec2 v = prob.f(lerp(p, q, t0 + (t1 - t0) * gx[g]), ph);
                    acc += (t1 - t0) * gw[g] * (v[0] * nrm[0] + v[1] * nrm[1]);
                }
        }
        t0 = t1;
    }
    return acc;
}

bool any_field(const PiecewiseField& f) {
    return !f.empty(Phase::Inclusion1) || !f.empty(Phase::Inclusion2) || !f.empty(Phase::Matrix);
}

}  // namespace

LinearSystem assemble(const FdProblem& prob, double h) {
    prob.geo.validate();
    prob.params.validate();
    const double R0 = prob.params.R0;
    if (!(h > 0.0) || h > std::min(prob.geo.r1, prob.geo.r2) / 16.0)
        throw ConfigError("fdoracle: grid spacing must satisfy h ≤ r_min/16");
    if (!prob.boundary) throw ConfigError("fdoracle: boundary data required");
    LinearSystem sys;
    Grid& G = sys.grid;
    G.h = h;
    const int half = static_cast<int>(std::ceil(R0 / h)) + 1;
    G.n = 2 * half;
    G.x0 = -half * h;
    G.index.assign(static_cast<std::size_t>(G.n) * G.n, -1);
    for (int j = 0; j < G.n; ++j)
        for (int i = 0; i < G.n; ++i) {
            const Point c = G.center(i, j);
            if (std::hypot(c.x1, c.x2) < R0) {
                G.index[static_cast<std::size_t>(j) * G.n + i] = static_cast<int>(G.centers.size());
                G.centers.push_back(c);
                const Region r = classify(c, prob.geo, 0.0);
                G.tag.push_back(r.tag);
                G.a.push_back(prob.params.coefficient(phase_at(c, prob.geo)));
            }
        }
    const std::size_t N = G.size();
    sys.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * N);
    const bool has_f = any_field(prob.f);
    std::vector<double> ts;
    static const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int j = 0; j < G.n; ++j)
        for (int i = 0; i < G.n; ++i) {
            const int row = G.index[static_cast<std::size_t>(j) * G.n + i];
            if (row < 0) continue;
            const Point P = G.center(i, j);
            double diag = 0.0, rhs = 0.0;
            for (int d = 0; d < 4; ++d) {
                const int ii = i + di[d], jj = j + dj[d];
                const Point Q = G.center(ii, jj);
                const int col = G.index[static_cast<std::size_t>(jj) * G.n + ii];
                if (col >= 0) {
                    const double af = face_coefficient(P, Q, prob.geo, prob.params, ts);
                    diag += af;
                    trip.emplace_back(row, col, -af);
                } else {
                    // boundary crossing |P + t(Q-P)| = R0
                    const double dx = Q.x1 - P.x1, dy = Q.x2 - P.x2;
                    const double A = dx * dx + dy * dy, B = 2.0 * (P.x1 * dx + P.x2 * dy);
                    const double C = P.x1 * P.x1 + P.x2 * P.x2 - R0 * R0;
                    double t = (-B + std::sqrt(std::max(0.0, B * B - 4.0 * A * C))) / (2.0 * A);
                    t = std::clamp(t, 1e-2, 1.0);
                    const Point X = lerp(P, Q, t);
                    const double af = face_coefficient(P, X, prob.geo, prob.params, ts) / t;
                    diag += af;
                    rhs += af * prob.boundary(std::atan2(X.x2, X.x1));
                }
                if (has_f) {
                    // face centre and tangent extent
                    const Point M{0.5 * (P.x1 + Q.x1), 0.5 * (P.x2 + Q.x2)};
                    const Point a{M.x1 - 0.5 * h * dj[d], M.x2 - 0.5 * h * di[d]};
                    const Point b{M.x1 + 0.5 * h * dj[d], M.x2 + 0.5 * h * di[d]};
                    rhs -= h * face_flux(a, b, {double(di[d]), double(dj[d])}, prob, ts);
                }
            }
            if (prob.source) rhs -= h * h * prob.source(P);
            trip.emplace_back(row, row, diag);
            sys.b(row) = rhs;
        }
    sys.A.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    return sys;
}

namespace {

using RowMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Unsmoothed 2×2 aggregation multigrid on the cell lattice, used as a symmetric
// V-cycle preconditioner (forward Gauss–Seidel down, backward up).
struct AggregationMG {
    struct Level {
        RowMat A;
        Eigen::VectorXd diag;
        std::vector<int> agg;  // fine index → coarse index (into next level)
        std::vector<std::pair<int, int>> ij;
    };
    std::vector<Level> levels;
    Eigen::LDLT<Eigen::MatrixXd> coarse;
    double omega = 1.6;  // coarse-correction over-weighting (standard for plain aggregation)

    void build(const RowMat& A, std::vector<std::pair<int, int>> ij) {
        levels.clear();
        levels.push_back({A, A.diagonal(), {}, std::move(ij)});
        while (levels.back().A.rows() > 400) {
            Level& L = levels.back();
            const Eigen::Index n = L.A.rows();
            std::vector<std::pair<int, int>> cij;
            std::vector<long long> keys(n);
            for (Eigen::Index k = 0; k < n; ++k)
                keys[k] = (static_cast<long long>(L.ij[k].first >> 1) << 32) | static_cast<unsigned>(L.ij[k].second >> 1);
            std::vector<long long> uniq(keys);
            std::sort(uniq.begin(), uniq.end());
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            L.agg.resize(n);
            for (Eigen::Index k = 0; k < n; ++k)
                L.agg[k] = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), keys[k]) - uniq.begin());
            cij.resize(uniq.size());
            for (std::size_t c = 0; c < uniq.size(); ++c)
                cij[c] = {static_cast<int>(uniq[c] >> 32), static_cast<int>(uniq[c] & 0xffffffffLL)};
            std::vector<Eigen::Triplet<double>> trip;
            trip.reserve(L.A.nonZeros());
            for (Eigen::Index r = 0; r < n; ++r)
                for (RowMat::InnerIterator it(L.A, r); it; ++it) trip.emplace_back(L.agg[r], L.agg[it.col()], it.value());
            RowMat Ac(static_cast<Eigen::Index>(uniq.size()), static_cast<Eigen::Index>(uniq.size()));
            Ac.setFromTriplets(trip.begin(), trip.end());
            Ac.makeCompressed();
            if (Ac.rows() == n) break;  // no coarsening progress
            Eigen::VectorXd dg = Ac.diagonal();
            levels.push_back({std::move(Ac), std::move(dg), {}, std::move(cij)});
        }
        coarse.compute(Eigen::MatrixXd(levels.back().A));
    }

    static void gauss_seidel(const Level& L, Eigen::VectorXd& x, const Eigen::VectorXd& b, bool forward) {
        const Eigen::Index n = L.A.rows();
        for (Eigen::Index s = 0; s < n; ++s) {
            const Eigen::Index r = forward ? s : n - 1 - s;
            double acc = b(r);
            for (RowMat::InnerIterator it(L.A, r); it; ++it)
                if (it.col() != r) acc -= it.value() * x(it.col());
            x(r) = acc / L.diag(r);
        }
    }

    void vcycle(std::size_t l, Eigen::VectorXd& x, const Eigen::VectorXd& b) const {
        const Level& L = levels[l];
        if (l + 1 == levels.size()) {
            x = coarse.solve(b);
            return;
        }
        x.setZero(b.size());
        gauss_seidel(L, x, b, true);
        const Eigen::VectorXd r = b - L.A * x;
        Eigen::VectorXd rc = Eigen::VectorXd::Zero(levels[l + 1].A.rows());
        for (Eigen::Index k = 0; k < r.size(); ++k) rc(L.agg[k]) += r(k);
        Eigen::VectorXd ec;
        vcycle(l + 1, ec, rc);
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) += omega * ec(L.agg[k]);
        gauss_seidel(L, x, b, false);
    }
};

}  // namespace

DiscreteSolution solve_system(const LinearSystem& sys, double tol, int max_iter) {
    DiscreteSolution sol;
    sol.grid = sys.grid;
    sol.h = sys.grid.h;
    const double bn = sys.b.norm();
    const Eigen::Index n = sys.b.size();
    sol.u = Eigen::VectorXd::Zero(n);
    if (bn == 0.0) return sol;
    const Grid& G = sys.grid;
    // lattice coordinates of the unknowns, shifted so the cusp sits on an aggregate corner
    std::vector<std::pair<int, int>> ij(G.size());
    for (int j = 0; j < G.n; ++j)
        for (int i = 0; i < G.n; ++i) {
            const int id = G.index[static_cast<std::size_t>(j) * G.n + i];
            if (id >= 0) ij[id] = {i, j};
        }
    const RowMat A = sys.A;
    AggregationMG mg;
    mg.build(A, std::move(ij));
    // preconditioned conjugate gradients
    Eigen::VectorXd& x = sol.u;
    Eigen::VectorXd r = sys.b, z, p, Ap;
    mg.vcycle(0, z, r);
    p = z;
    double rz = r.dot(z);
    int it = 0;
    double rel = 1.0;
    for (; it < max_iter; ++it) {
        Ap = A * p;
        const double alpha = rz / p.dot(Ap);
        x += alpha * p;
        r -= alpha * Ap;
        rel = r.norm() / bn;
        if (rel <= tol) break;
        mg.vcycle(0, z, r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    sol.iterations = it + 1;
    sol.residual = (sys.A * sol.u - sys.b).norm() / bn;
    if (!(sol.residual <= tol * 1.01))
        throw ConvergenceError("fdoracle: CG did not reach the requested residual", sol.residual);
    return sol;
}

std::vector<std::size_t> comparison_cells(const Grid& grid, const DiskGeometry& geo, const CompareSpec& spec) {
    std::vector<std::size_t> out;
    const int st = std::max(1, spec.stride);
    for (int j = 0; j < grid.n; j += st)
        for (int i = 0; i < grid.n; i += st) {
            const int id = grid.index[static_cast<std::size_t>(j) * grid.n + i];
            if (id < 0) continue;
            const Point c = grid.centers[id];
            const double d1 = std::abs(std::hypot(c.x1, c.x2 - geo.r1) - geo.r1);
            const double d2 = std::abs(std::hypot(c.x1, c.x2 + geo.r2) - geo.r2);
            if (std::min(d1, d2) < spec.interface_band * grid.h) continue;
            if (std::hypot(c.x1, c.x2) < spec.cusp_radius * grid.h) continue;
            out.push_back(static_cast<std::size_t>(id));
        }
    return out;
}

ErrorReport compare(const std::vector<double>& values, const DiscreteSolution& sol,
                    const std::vector<std::size_t>& cells, NormKind norm) {
    if (cells.empty() || values.size() != cells.size()) throw ConfigError("compare: empty or mismatched sample set");
    ErrorReport rep;
    rep.count = cells.size();
    double num = 0.0, den = 0.0, rn[3] = {0, 0, 0}, rd[3] = {0, 0, 0};
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const double ref = sol.u(static_cast<Eigen::Index>(cells[k]));
        const double e = values[k] - ref;
        const RegionTag t = sol.grid.tag[cells[k]];
        const int r = t == RegionTag::Inclusion1 ? 0 : t == RegionTag::Inclusion2 ? 1 : 2;
        if (norm == NormKind::L2) {
            num += e * e;
            den += ref * ref;
            rn[r] += e * e;
            rd[r] += ref * ref;
        } else {
            num = std::max(num, std::abs(e));
            den = std::max(den, std::abs(ref));
            rn[r] = std::max(rn[r], std::abs(e));
            rd[r] = std::max(rd[r], std::abs(ref));
        }
    }
    const auto fin = [&](double n, double d) {
        if (norm == NormKind::L2) return d > 0.0 ? std::sqrt(n / d) : std::sqrt(n);
        return d > 0.0 ? n / d : n;
    };
    rep.relative = fin(num, den);
    rep.absolute = norm == NormKind::L2 ? std::sqrt(num / cells.size()) : num;
    for (int r = 0; r < 3; ++r) rep.region_relative[r] = fin(rn[r], rd[r]);
    return rep;
}

void write_grid_csv(const std::string& path, const DiscreteSolution& sol, const std::string& header) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path);
    os << header;
    os << "x1,x2,region,a,u\n" << std::setprecision(17);
    for (std::size_t k = 0; k < sol.grid.size(); ++k)
        os << sol.grid.centers[k].x1 << ',' << sol.grid.centers[k].x2 << ',' << to_string(sol.grid.tag[k]) << ','
           << sol.grid.a[k] << ',' << sol.u(static_cast<Eigen::Index>(k)) << '\n';
}

}  // namespace cusp
