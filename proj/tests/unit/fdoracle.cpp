#include "cusp/fdoracle.hpp"

#include <cstdio>
#include <fstream>

#include "support.hpp"

using namespace cusp;

namespace {

FdProblem harmonic_problem(MediumParams P, std::function<double(double)> g) {
    FdProblem fp;
    fp.params = P;
    fp.boundary = std::move(g);
    return fp;
}

double g_acc(double t) { return std::cos(2.0 * t) + 0.3 * std::sin(t); }

}  // namespace

TEST_SUITE("fdoracle") {

TEST_CASE("zero data gives the zero solution") {
    const auto sys = assemble(harmonic_problem({5.0, 0.5, 3.0}, [](double) { return 0.0; }), 1.0 / 16);
    CHECK(sys.b.norm() == 0.0);
    const auto sol = solve_system(sys);
    CHECK(sol.u.norm() == 0.0);
}

TEST_CASE("unit coefficient: 5-point Laplacian; interior rows conserve") {
    const auto sys = assemble(harmonic_problem({1.0, 1.0, 3.0}, g_acc), 1.0 / 16);
    const auto At = Eigen::SparseMatrix<double, Eigen::RowMajor>(sys.A);
    int interior = 0;
    for (int r = 0; r < At.rows(); ++r) {
        double diag = 0.0, off = 0.0;
        int n_off = 0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(At, r); it; ++it) {
            if (it.col() == r) {
                diag = it.value();
            } else {
                off += it.value();
                ++n_off;
                CHECK(it.value() == doctest::Approx(-1.0).epsilon(1e-14));
            }
        }
        if (n_off == 4) {
            CHECK(diag == doctest::Approx(4.0).epsilon(1e-14));
            ++interior;
        }
    }
    CHECK(interior > 0.8 * At.rows());

    // conservation with jumps: interior rows annihilate constants
    const auto s2 = assemble(harmonic_problem({5.0, 0.5, 3.0}, g_acc), 1.0 / 16);
    const auto A2 = Eigen::SparseMatrix<double, Eigen::RowMajor>(s2.A);
    for (int r = 0; r < A2.rows(); ++r) {
        double sum = 0.0, scale = 0.0;
        int n = 0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A2, r); it; ++it) {
            sum += it.value();
            scale = std::max(scale, std::abs(it.value()));
            ++n;
        }
        if (n == 5) CHECK(std::abs(sum) <= 1e-13 * scale);
    }
    // symmetric
    CHECK((Eigen::SparseMatrix<double>(s2.A.transpose()) - s2.A).norm() <= 1e-14 * s2.A.norm());
}

TEST_CASE("manufactured harmonic solution: convergence") {
    auto exact = [](Point p) { return p.x1 * p.x1 - p.x2 * p.x2; };
    const FdProblem fp = harmonic_problem({1.0, 1.0, 3.0}, [](double t) { return 9.0 * std::cos(2.0 * t); });
    double prev_all = 0.0, prev_in = 0.0;
    for (int k : {16, 32, 64}) {
        const auto sol = solve_system(assemble(fp, 1.0 / k));
        CHECK(sol.residual <= 1e-10);
        double e_all = 0.0, e_in = 0.0;
        for (std::size_t i = 0; i < sol.grid.size(); ++i) {
            const Point c = sol.grid.centers[i];
            const double e = std::abs(sol.u(static_cast<Eigen::Index>(i)) - exact(c));
            e_all = std::max(e_all, e);
            if (std::hypot(c.x1, c.x2) < 2.0) e_in = std::max(e_in, e);
        }
        if (prev_all > 0.0) {
            CHECK(std::log2(prev_all / e_all) >= 0.9);
            CHECK(std::log2(prev_in / e_in) >= 1.8);
        }
        prev_all = e_all;
        prev_in = e_in;
    }
}

TEST_CASE("maximum principle and mirror symmetry") {
    const FdProblem fp = harmonic_problem({5.0, 0.5, 3.0}, g_acc);
    const auto sol = solve_system(assemble(fp, 1.0 / 32));
    double gmin = 1e300, gmax = -1e300;
    for (int i = 0; i < 4096; ++i) {
        gmin = std::min(gmin, g_acc(2.0 * kPi * i / 4096));
        gmax = std::max(gmax, g_acc(2.0 * kPi * i / 4096));
    }
    CHECK(sol.u.maxCoeff() <= gmax + 1e-9);
    CHECK(sol.u.minCoeff() >= gmin - 1e-9);

    // cos 2θ is even in x1: mirrored cells carry equal values
    const FdProblem fe = harmonic_problem({5.0, 0.5, 3.0}, [](double t) { return std::cos(2.0 * t); });
    const auto se = solve_system(assemble(fe, 1.0 / 32));
    const Grid& G = se.grid;
    double worst = 0.0;
    for (int j = 0; j < G.n; ++j)
        for (int i = 0; i < G.n; ++i) {
            const int a = G.index[static_cast<std::size_t>(j) * G.n + i];
            const int b = G.index[static_cast<std::size_t>(j) * G.n + (G.n - 1 - i)];
            if (a < 0) continue;
            REQUIRE(b >= 0);
            worst = std::max(worst, std::abs(se.u(a) - se.u(b)));
        }
    CHECK(worst <= 1e-8);
}

TEST_CASE("analytic basis function vs FD with its own trace") {
    const MediumParams P = MediumParams::from_alpha(0.8, 3.0);
    const BasisId id{Family::Symmetric, Parity::Even, 2};
    const FdProblem fp = harmonic_problem(P, [&](double t) { return eval_u(id, {3.0 * std::cos(t), 3.0 * std::sin(t)}, P).value; });
    double errs[2];
    int idx = 0;
    for (int k : {128, 256}) {
        const auto sol = solve_system(assemble(fp, 1.0 / k));
        CompareSpec cs;
        cs.stride = k / 32;
        const auto cells = comparison_cells(sol.grid, {}, cs);
        std::vector<double> v(cells.size());
        parallel_for(cells.size(), [&](std::size_t i) { v[i] = eval_u(id, sol.grid.centers[cells[i]], P).value; });
        errs[idx++] = compare(v, sol, cells, NormKind::L2).relative;
    }
    CHECK(errs[0] <= 1e-2);
    CHECK(errs[1] < errs[0]);
}

TEST_CASE("mollified point source vs the physical Green's function") {
    TransmissionKernel K;
    K.params = {5.0, 0.5, 3.0};
    K.norm = Normalization::Physical;
    const Point y{0.3, 1.2};  // inside the upper disk
    const double eps = 0.15;
    FdProblem fp;
    fp.params = K.params;
    fp.boundary = [&](double t) { return eval_g_regular({3.0 * std::cos(t), 3.0 * std::sin(t)}, y, K).value; };
    fp.source = [&](Point x) {
        const double r2 = (std::pow(x.x1 - y.x1, 2) + std::pow(x.x2 - y.x2, 2)) / (eps * eps);
        return r2 < 1.0 ? 4.0 / (kPi * eps * eps) * std::pow(1.0 - r2, 3) : 0.0;
    };
    const auto sol = solve_system(assemble(fp, 1.0 / 64));
    CompareSpec cs;
    cs.stride = 2;
    std::vector<std::size_t> cells;
    for (auto c : comparison_cells(sol.grid, {}, cs))
        if (testing::dist(sol.grid.centers[c], y) > 0.5) cells.push_back(c);
    std::vector<double> v(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) { v[i] = eval_g_regular(sol.grid.centers[cells[i]], y, K).value; });
    CHECK(compare(v, sol, cells, NormKind::L2).relative <= 5e-2);
}

TEST_CASE("compare and grid dump") {
    const auto sol = solve_system(assemble(harmonic_problem({5.0, 0.5, 3.0}, g_acc), 1.0 / 16));
    const auto cells = comparison_cells(sol.grid, {}, {});
    std::vector<double> v(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) v[i] = sol.u(static_cast<Eigen::Index>(cells[i]));
    const auto r = compare(v, sol, cells, NormKind::Linf);
    CHECK(r.relative == 0.0);
    CHECK(r.count == cells.size());
    // exclusion bands remove cells near the interfaces and the cusp
    for (auto c : cells) CHECK(std::hypot(sol.grid.centers[c].x1, sol.grid.centers[c].x2) > 4.0 / 16 - 1e-12);

    const std::string path = "fd_dump_test.csv";
    write_grid_csv(path, sol, "# test\n");
    std::ifstream in(path);
    std::string l1, l2;
    std::getline(in, l1);
    std::getline(in, l2);
    CHECK(l1 == "# test");
    CHECK(l2 == "x1,x2,region,a,u");
    std::size_t rows = 0;
    for (std::string s; std::getline(in, s);) ++rows;
    CHECK(rows == sol.grid.size());
    in.close();
    std::remove(path.c_str());
}

}  // TEST_SUITE
