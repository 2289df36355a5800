#include "cusp/basis.hpp"

#include "support.hpp"

using namespace cusp;
using testing::uniform;

namespace {

Point random_point(double R) {
    for (;;) {
        const Point p{uniform(-R, R), uniform(-R, R)};
        const Region r = classify(p, {}, 1e-3);
        if (!r.on_interface() && std::hypot(p.x1, p.x2) < R && std::hypot(p.x1, p.x2) > 0.05) return p;
    }
}

}  // namespace

TEST_SUITE("basis") {

TEST_CASE("u_0 is 1/a0 on the outer circle") {
    const MediumParams P{2.0, 2.0, 3.0};
    for (int i = 0; i < 16; ++i) {
        const double t = 2.0 * kPi * i / 16;
        const auto u = eval_u({Family::Symmetric, Parity::Even, 0}, {3.0 * std::cos(t), 3.0 * std::sin(t)}, P);
        CHECK(std::abs(u.value - 0.5) <= u.tail_bound + 1e-15);
    }
}

TEST_CASE("zero contrast gives harmonic polynomials") {
    const MediumParams P{1.0, 1.0, 3.0};
    for (int j = 0; j <= 6; ++j)
        for (int i = 0; i < 20; ++i) {
            const Point p = random_point(3.0);
            const cplx zj = std::pow(cplx(p.x1, p.x2) * cplx(0.0, -1.0), j);  // (-i z)^j
            const double ue = zj.real() / std::pow(3.0, j);
            const double vo = zj.imag() / std::pow(3.0, j);
            CHECK(eval_u({Family::Symmetric, Parity::Even, j}, p, P).value == doctest::Approx(ue).epsilon(1e-12));
            if (j > 0)
                CHECK(eval_u({Family::Symmetric, Parity::Odd, j}, p, P).value == doctest::Approx(vo).epsilon(1e-12));
        }
}

TEST_CASE("general family with b0 = a0 reproduces the symmetric family") {
    const MediumParams P{5.0, 5.0, 3.0};
    for (Parity par : {Parity::Even, Parity::Odd})
        for (int j : {1, 2, 5, 8}) {
            for (int i = 0; i < 25; ++i) {
                const Point p = random_point(3.0);
                const auto s = eval_u({Family::Symmetric, par, j}, p, P);
                const auto g = eval_u({Family::General, par, j}, p, P);
                CHECK(std::abs(s.value - g.value) <= 2.0 * (s.tail_bound + g.tail_bound) + 1e-13);
            }
        }
}

TEST_CASE("general family u_0 is constant in the matrix") {
    const MediumParams P{5.0, 0.5, 3.0};
    const double a = P.alpha(), b = P.beta();
    const double c = eval_u({Family::General, Parity::Even, 0}, {2.0, 0.5}, P).value;
    for (int i = 0; i < 20; ++i) {
        const Point p = random_point(3.0);
        if (classify(p).tag != RegionTag::Matrix) continue;
        CHECK(eval_u({Family::General, Parity::Even, 0}, p, P).value == doctest::Approx(c).epsilon(1e-12));
    }
    CHECK(c == doctest::Approx((a - 1.0) * (b - 1.0) / (1.0 - a * b)).epsilon(1e-12));
    const double in1 = eval_u({Family::General, Parity::Even, 0}, {0.0, 1.0}, P).value;
    const double in2 = eval_u({Family::General, Parity::Even, 0}, {0.0, -1.0}, P).value;
    CHECK(in1 == doctest::Approx(c).epsilon(1e-12));
    CHECK(in2 == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("parity in x1") {
    const MediumParams P = MediumParams::from_alpha(0.8, 3.0);
    for (int j : {0, 1, 2, 3, 7}) {
        for (int i = 0; i < 20; ++i) {
            const Point p = random_point(3.0);
            const Point q{-p.x1, p.x2};
            const auto e1 = eval_u({Family::Symmetric, Parity::Even, j}, p, P);
            const auto e2 = eval_u({Family::Symmetric, Parity::Even, j}, q, P);
            CHECK(std::abs(e1.value - e2.value) <= 2.0 * (e1.tail_bound + e2.tail_bound) + 1e-13);
            if (j == 0) continue;
            const auto o1 = eval_u({Family::Symmetric, Parity::Odd, j}, p, P);
            const auto o2 = eval_u({Family::Symmetric, Parity::Odd, j}, q, P);
            CHECK(std::abs(o1.value + o2.value) <= 2.0 * (o1.tail_bound + o2.tail_bound) + 1e-13);
        }
    }
}

TEST_CASE("gradient: constant column, finite differences") {
    const MediumParams P{5.0, 0.5, 3.0};
    const auto g0 = eval_u_gradient({Family::Symmetric, Parity::Even, 0}, {0.4, 1.1}, MediumParams{5, 5, 3});
    CHECK(std::abs(g0.value[0]) < 1e-14);
    CHECK(std::abs(g0.value[1]) < 1e-14);
    for (Family fam : {Family::General}) {
        for (Parity par : {Parity::Even, Parity::Odd})
            for (int j : {1, 2, 4}) {
                for (int i = 0; i < 25; ++i) {
                    const Point p = random_point(2.9);
                    const BasisId id{fam, par, j};
                    const auto g = eval_u_gradient(id, p, P);
                    const double h = 1e-5;
                    const double d1 = (eval_u(id, {p.x1 + h, p.x2}, P).value - eval_u(id, {p.x1 - h, p.x2}, P).value) / (2 * h);
                    const double d2 = (eval_u(id, {p.x1, p.x2 + h}, P).value - eval_u(id, {p.x1, p.x2 - h}, P).value) / (2 * h);
                    const double tol = std::max(1e-6, 10.0 * g.tail_bound);
                    CHECK(std::abs(g.value[0] - d1) < tol);
                    CHECK(std::abs(g.value[1] - d2) < tol);
                }
            }
    }
}

TEST_CASE("piecewise harmonicity: 5-point Laplacian decays like h²") {
    const MediumParams P = MediumParams::from_alpha(0.8, 3.0);
    const BasisId id{Family::Symmetric, Parity::Even, 3};
    const Point p{0.35, 1.2};  // inside the upper disk
    auto lap = [&](double h) {
        auto u = [&](double a, double b) { return eval_u(id, {a, b}, P, TruncationPolicy::target(1e-16)).value; };
        return std::abs(u(p.x1 + h, p.x2) + u(p.x1 - h, p.x2) + u(p.x1, p.x2 + h) + u(p.x1, p.x2 - h) -
                        4.0 * u(p.x1, p.x2)) / (h * h);
    };
    const double l1 = lap(2e-2), l2 = lap(1e-2);
    CHECK(std::log2(l1 / l2) >= 1.8);
}

TEST_CASE("trace coefficients") {
    const MediumParams P = MediumParams::from_alpha(0.8, 3.0);
    const auto c0 = trace_fourier({Family::Symmetric, Parity::Even, 0}, P, 10);
    CHECK(c0.entries[0] == doctest::Approx(1.0 / P.a0).epsilon(1e-14));
    for (int l = 1; l <= 10; ++l) CHECK(std::abs(c0.entries[l]) < 1e-15);

    const MediumParams Z{1.0, 1.0, 3.0};
    for (int j = 0; j <= 8; ++j) {
        const auto c = trace_fourier({Family::Symmetric, Parity::Even, j}, Z, 10);
        for (int l = 0; l <= 10; ++l) CHECK(c.entries[l] == doctest::Approx(l == j ? 1.0 : 0.0));
    }

    for (double a : {0.8, -0.8}) {
        const MediumParams Q = MediumParams::from_alpha(a, 3.0);
        double worst = 0.0;
        for (int j = 0; j <= 30; j += 3) {
            const auto cf = trace_fourier({Family::Symmetric, Parity::Even, j}, Q, 40);
            const auto nq = numerical_trace_fourier({Family::Symmetric, Parity::Even, j}, Q, 4096, 40);
            for (int l = 0; l <= 40; ++l) worst = std::max(worst, std::abs(cf.entries[l] - nq.entries[l]));
        }
        CHECK(worst <= 1e-9);
    }

    // quadrature self-convergence
    const MediumParams G{5.0, 0.5, 3.0};
    for (int j : {0, 5, 12, 20}) {
        const auto a = numerical_trace_fourier({Family::General, Parity::Even, j}, G, 1024, 40);
        const auto b = numerical_trace_fourier({Family::General, Parity::Even, j}, G, 2048, 40);
        for (int l = 0; l <= 40; ++l) CHECK(std::abs(a.entries[l] - b.entries[l]) <= 1e-12);
    }

    // u_{2j} trace is e_{2j} plus O(R0^{-2j})
    for (int j : {2, 4, 6}) {
        const auto c = numerical_trace_fourier({Family::General, Parity::Even, 2 * j}, G, 4096, 60);
        CHECK(c.entries[2 * j] == doctest::Approx(1.0).epsilon(50.0 * std::pow(3.0, -2 * j)));
    }
    CHECK_THROWS_AS(numerical_trace_fourier({Family::General, Parity::Even, 0}, G, 100, 10), ConfigError);
}

TEST_CASE("derivative-bound audit") {
    const auto samples = audit_samples(6, 24, 1e-3);
    const MediumParams Z{1.0, 1.0, 3.0};
    const auto z = derivative_bound_audit(Family::Symmetric, Parity::Even, 20, 0, 0, Z, samples);
    for (const auto& ph : z.ratios)
        for (double r : ph) CHECK(r <= 1.0 + 1e-12);
    const MediumParams P = MediumParams::from_alpha(0.8, 3.0);
    const auto a = derivative_bound_audit(Family::Symmetric, Parity::Even, 40, 1, 0, P, samples);
    CHECK(a.pass);
    const auto b = derivative_bound_audit(Family::Symmetric, Parity::Even, 0, 0, 0, P, samples);
    for (const auto& ph : b.ratios)
        if (!ph.empty()) CHECK(ph[0] == doctest::Approx(1.0 / P.a0).epsilon(1e-12));
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(eval_u({Family::Symmetric, Parity::Even, -1}, {1, 1}, {}), ConfigError);
    CHECK_THROWS_AS(eval_u({Family::Symmetric, Parity::Even, 2}, {2, 0}, {5.0, 0.5, 3.0}), ConfigError);
    CHECK_THROWS_AS(eval_u({Family::Symmetric, Parity::Even, 2}, {1, 1}, {5.0, 5.0, 3.0}), DomainError);
}

}  // TEST_SUITE
