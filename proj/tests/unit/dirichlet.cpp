#include "cusp/dirichlet.hpp"

#include <algorithm>

#include "support.hpp"

using namespace cusp;
using testing::uniform;

namespace {

double g_acc(double t) { return std::cos(2.0 * t) + 0.3 * std::sin(t); }

std::vector<Point> interior_points(int n, double R, double band = 1e-2) {
    std::vector<Point> out;
    while (static_cast<int>(out.size()) < n) {
        const Point p{uniform(-R, R), uniform(-R, R)};
        if (std::hypot(p.x1, p.x2) < R && std::hypot(p.x1, p.x2) > 0.05 && !classify(p, {}, band).on_interface())
            out.push_back(p);
    }
    return out;
}

double max_coeff(const std::vector<double>& v, int skip) {
    double m = 0.0;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (i != skip) m = std::max(m, std::abs(v[i]));
    return m;
}

}  // namespace

TEST_SUITE("dirichlet") {

TEST_CASE("boundary analysis") {
    const auto c = FourierBoundary::from_function([](double) { return 2.5; }, 3.0, 512);
    CHECK(c.even[0] == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(max_coeff(c.even, 0) <= 1e-15);
    CHECK(max_coeff(c.odd, -1) <= 1e-15);

    const auto k = FourierBoundary::from_function([](double t) { return std::cos(2.0 * t); }, 3.0, 512);
    CHECK(k.even[2] == doctest::Approx(-1.0).epsilon(1e-15));  // e_2 = -cos 2θ
    CHECK(max_coeff(k.even, 2) <= 1e-15);
    CHECK(max_coeff(k.odd, -1) <= 1e-15);

    // random band-limited data: synthesis ∘ analysis = id
    std::vector<double> a(65), b(65);
    for (int m = 0; m <= 64; ++m) {
        a[m] = uniform(-1, 1);
        b[m] = uniform(-1, 1);
    }
    auto g = [&](double t) {
        double v = 0.0;
        for (int m = 0; m <= 64; ++m) v += a[m] * std::cos(m * t) + b[m] * std::sin(m * t);
        return v;
    };
    const auto fb = FourierBoundary::from_function(g, 3.0, 1024);
    double err = 0.0;
    for (int i = 0; i < 300; ++i) {
        const double t = uniform(0.0, 2.0 * kPi);
        err = std::max(err, std::abs(fb(t) - g(t)));
    }
    CHECK(err <= 1e-12);

    std::vector<double> th(256), s(256, 0.0);
    for (int i = 0; i < 256; ++i) th[i] = 2.0 * kPi * i / 256 + (i == 7 ? 1e-3 : 0.0);
    CHECK_THROWS_AS(analyze_boundary(th, s, 3.0), ConfigError);
    CHECK_THROWS_AS(analyze_boundary(std::vector<double>(300, 0.0), 3.0), ConfigError);
}

TEST_CASE("homogeneous solve: basis round trip") {
    const MediumParams P = MediumParams::from_alpha(0.8, 3.0);
    const BasisId id{Family::Symmetric, Parity::Even, 3};
    const auto g = FourierBoundary::from_function(
        [&](double t) { return eval_u(id, {3.0 * std::cos(t), 3.0 * std::sin(t)}, P, TruncationPolicy::target(1e-15)).value; }, 3.0);
    const SeriesSolution s = solve_homogeneous(g, P);
    for (int j = 0; j < static_cast<int>(s.even.size()); ++j) CHECK(std::abs(s.even[j] - (j == 3 ? 1.0 : 0.0)) <= 1e-9);
    for (double v : s.odd) CHECK(std::abs(v) <= 1e-9);
    CHECK(s.converged);
}

TEST_CASE("zero contrast: mean value property") {
    const MediumParams Z{1.0, 1.0, 3.0};
    auto g = [](double t) { return std::exp(std::cos(t)) * std::sin(3.0 * t + 0.4) + 0.2; };
    const SeriesSolution s = solve_homogeneous(FourierBoundary::from_function(g, 3.0), Z);
    double mean = 0.0;
    for (int i = 0; i < 4096; ++i) mean += g(2.0 * kPi * i / 4096) / 4096;
    // the centre is the tangency point; approach it along the matrix axis
    const auto c = evaluate_point(s, {1e-8, 0.0}, Phase::Matrix);
    CHECK(std::abs(c.u - mean) <= 1e-8 * std::hypot(c.grad[0], c.grad[1]) + 1e-12);
}

TEST_CASE("maximum principle, linearity and trace consistency") {
    const MediumParams P{5.0, 0.5, 3.0};
    const auto g1 = FourierBoundary::from_function(g_acc, 3.0);
    const auto g2 = FourierBoundary::from_function([](double t) { return std::sin(2.0 * t) - 0.5 * std::cos(3.0 * t); }, 3.0);
    const auto g12 = FourierBoundary::from_function(
        [](double t) { return 2.0 * g_acc(t) - 3.0 * (std::sin(2.0 * t) - 0.5 * std::cos(3.0 * t)); }, 3.0);
    const SeriesSolution s1 = solve_homogeneous(g1, P), s2 = solve_homogeneous(g2, P), s12 = solve_homogeneous(g12, P);
    double gmin = 1e300, gmax = -1e300;
    for (int i = 0; i < 4096; ++i) {
        gmin = std::min(gmin, g_acc(2.0 * kPi * i / 4096));
        gmax = std::max(gmax, g_acc(2.0 * kPi * i / 4096));
    }
    const auto pts = interior_points(300, 3.0);
    const auto f1 = evaluate_solution(s1, pts), f2 = evaluate_solution(s2, pts), f12 = evaluate_solution(s12, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(f1[i].u >= gmin - 1e-9);
        CHECK(f1[i].u <= gmax + 1e-9);
        const double lin = 2.0 * f1[i].u - 3.0 * f2[i].u;
        CHECK(std::abs(f12[i].u - lin) <= 1e-10 * std::max(1.0, std::abs(lin)));
    }
    // approaching the outer circle
    double prev = 1e300;
    for (double off : {1e-2, 1e-3, 1e-4}) {
        double e = 0.0;
        for (int i = 0; i < 64; ++i) {
            const double t = 2.0 * kPi * i / 64;
            const double r = 3.0 * (1.0 - off);
            e = std::max(e, std::abs(evaluate_point(s1, {r * std::cos(t), r * std::sin(t)}).u - g_acc(t)));
        }
        CHECK(e < prev);
        prev = e;
    }
    CHECK(s1.boundary_residual <= 1e-9);
}

TEST_CASE("transmission of the solved field") {
    for (MediumParams P : {MediumParams{5.0, 5.0, 3.0}, MediumParams{5.0, 0.5, 3.0}}) {
        const SeriesSolution s = solve_homogeneous(FourierBoundary::from_function(g_acc, 3.0), P);
        for (int c = 0; c < 2; ++c) {
            const Phase in = c == 0 ? Phase::Inclusion1 : Phase::Inclusion2;
            const double cy = c == 0 ? 1.0 : -1.0;
            for (int i = 0; i < 64; ++i) {
                const double t = 2.0 * kPi * (i + 0.5) / 64;
                const Point x{std::cos(t), cy + std::sin(t)};
                if (std::hypot(x.x1, x.x2) < 1e-2) continue;
                const auto ui = evaluate_point(s, x, in), um = evaluate_point(s, x, Phase::Matrix);
                CHECK(std::abs(ui.u - um.u) <= 1e-9);
                const double fi = P.coefficient(in) * (ui.grad[0] * std::cos(t) + ui.grad[1] * std::sin(t));
                const double fm = um.grad[0] * std::cos(t) + um.grad[1] * std::sin(t);
                CHECK(std::abs(fi - fm) <= 1e-8);
            }
        }
    }
}

TEST_CASE("evaluation: zero solution and truncation study") {
    const MediumParams P = MediumParams::from_alpha(0.8, 3.0);
    const SeriesSolution z = solve_homogeneous(FourierBoundary::from_function([](double) { return 0.0; }, 3.0), P);
    for (const auto& f : evaluate_solution(z, interior_points(20, 3.0))) {
        CHECK(f.u == 0.0);
        CHECK(f.grad[0] == 0.0);
    }
    // dropping the coefficients past N changes interior values by at most Σ_{j>N}|γ_j|·max|u_j|
    auto g = [](double t) { return 1.0 / (1.2 - std::cos(t - 0.3)); };
    SeriesSolution s = solve_homogeneous(FourierBoundary::from_function(g, 3.0), P);
    const int N = static_cast<int>(s.even.size()) / 2;
    SeriesSolution t = s;
    t.even.resize(N + 1);
    t.odd.resize(std::min<std::size_t>(t.odd.size(), N + 1));
    double bound = 0.0;
    for (std::size_t j = N + 1; j < s.even.size(); ++j) bound += std::abs(s.even[j]);
    for (std::size_t j = N + 1; j < s.odd.size(); ++j) bound += std::abs(s.odd[j]);
    for (const Point& p : interior_points(30, 1.0)) {
        const double d = std::abs(evaluate_point(s, p).u - evaluate_point(t, p).u);
        CHECK(d <= bound + 1e-12);
    }
}

TEST_CASE("nonhomogeneous solve: zero field reduces to the homogeneous solve") {
    const MediumParams P{5.0, 0.5, 3.0};
    const auto g = FourierBoundary::from_function(g_acc, 3.0);
    NonhomogeneousOptions o;
    o.n_trace = 512;
    const SeriesSolution a = solve_nonhomogeneous(PiecewiseField::zero(), g, P, o), b = solve_homogeneous(g, P);
    for (const Point& p : interior_points(30, 3.0))
        CHECK(std::abs(evaluate_point(a, p).u - evaluate_point(b, p).u) <= 1e-10);
}

TEST_CASE("nonhomogeneous solve: boundary data and superposition") {
    const MediumParams P{5.0, 0.5, 3.0};
    NonhomogeneousOptions o;
    o.n_trace = 512;
    PiecewiseField f;
    f.comp[0] = [](Point) { return Vec2{1.0, 0.5}; };
    const auto g = FourierBoundary::from_function(g_acc, 3.0);
    const auto zero = FourierBoundary::from_function([](double) { return 0.0; }, 3.0);
    const SeriesSolution u = solve_nonhomogeneous(f, g, P, o), uf = solve_nonhomogeneous(f, zero, P, o);
    const SeriesSolution ug = solve_homogeneous(g, P);
    for (int i = 0; i < 16; ++i) {
        const double t = 2.0 * kPi * i / 16;
        CHECK(evaluate_point(u, {3.0 * std::cos(t), 3.0 * std::sin(t)}).u == doctest::Approx(g_acc(t)).epsilon(1e-8));
    }
    for (const Point& p : interior_points(20, 2.8, 0.05)) {
        const double s = evaluate_point(uf, p).u + evaluate_point(ug, p).u;
        CHECK(std::abs(evaluate_point(u, p).u - s) <= 1e-9);
    }
}

TEST_CASE("unequal radii") {
    // r1 = r2: identical to the direct solve up to the scaling
    const MediumParams P{5.0, 5.0, 3.0};
    const auto g = FourierBoundary::from_function(g_acc, 3.0);
    const ComposedSolution c = unequal_radius_solve(PiecewiseField::zero(), g, {1.0, 1.0}, P);
    const SeriesSolution d = solve_homogeneous(g, P);
    for (const Point& p : interior_points(20, 3.0)) CHECK(std::abs(c.evaluate(p).u - evaluate_point(d, p).u) <= 1e-10);

    // harmonic case: conformal invariance
    const DiskGeometry geo{1.0, 2.0};
    const ComposedSolution h = unequal_radius_solve(PiecewiseField::zero(), g, geo, {1.0, 1.0, 3.0});
    const SeriesSolution hd = solve_homogeneous(g, {1.0, 1.0, 3.0});
    for (int i = 0; i < 20; ++i) {
        const Point p{uniform(-2.0, 2.0), uniform(-2.0, 2.0)};
        if (classify(p, geo, 1e-3).on_interface() || std::hypot(p.x1, p.x2) < 0.05) continue;
        CHECK(std::abs(h.evaluate(p).u - evaluate_point(hd, p, Phase::Matrix).u) <= 1e-8);
    }
    // the outer circle crossing an inclusion is reported, not silently fitted
    CHECK_THROWS_AS(unequal_radius_solve(PiecewiseField::zero(), g, geo, {5.0, 0.5, 3.0}), ConvergenceError);
}

TEST_CASE("errors") {
    const auto g = FourierBoundary::from_function(g_acc, 3.0);
    CHECK_THROWS_AS(solve_homogeneous(g, {5.0, 5.0, 4.0}), ConfigError);  // data on another radius
    const SeriesSolution s = solve_homogeneous(g, {5.0, 0.5, 3.0});
    CHECK_THROWS_AS(evaluate_point(s, {1.0, 1.0}), DomainError);
    CHECK_NOTHROW(evaluate_point(s, {1.0, 1.0}, Phase::Matrix));
}

}  // TEST_SUITE
