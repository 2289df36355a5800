#include "cusp/greens.hpp"

#include "support.hpp"

using namespace cusp;
using testing::dist;
using testing::uniform;

namespace {

Point random_off_interface(double R, double band = 1e-2) {
    for (;;) {
        const Point p{uniform(-R, R), uniform(-R, R)};
        if (!classify(p, {}, band).on_interface() && std::hypot(p.x1, p.x2) > 0.1) return p;
    }
}

TransmissionKernel disk_kernel(double a0, double b0, Normalization n = Normalization::Paper) {
    TransmissionKernel K;
    K.params = {a0, b0, 3.0};
    K.norm = n;
    return K;
}

}  // namespace

TEST_SUITE("greens") {

TEST_CASE("zero contrast collapses both kernels to log|x - y|") {
    TransmissionKernel K = disk_kernel(1.0, 1.0);
    TransmissionKernel S = K;
    S.geometry = KernelGeometry::Strip;
    for (int i = 0; i < 200; ++i) {
        const Point x = random_off_interface(2.5), y = random_off_interface(2.5);
        if (dist(x, y) < 1e-3) continue;
        CHECK(std::abs(eval_g(x, y, K).value - std::log(dist(x, y))) <= 1e-15 * std::max(1.0, std::abs(std::log(dist(x, y)))));
        const Point xs{uniform(-3, 3), uniform(-3, 3)}, ys{uniform(-3, 3), uniform(-3, 3)};
        if (std::abs(std::abs(xs.x1) - 0.5) < 1e-2 || std::abs(std::abs(ys.x1) - 0.5) < 1e-2) continue;
        CHECK(std::abs(eval_gtilde(xs, ys, S).value - std::log(dist(xs, ys))) <= 1e-15 * std::max(1.0, std::abs(std::log(dist(xs, ys)))));
        const auto gy = eval_g_gradient_y(x, y, K);
        const double r2 = std::pow(dist(x, y), 2);
        CHECK(gy.value[0] == doctest::Approx((y.x1 - x.x1) / r2).epsilon(1e-13));
        CHECK(gy.value[1] == doctest::Approx((y.x2 - x.x2) / r2).epsilon(1e-13));
    }
}

TEST_CASE("disk kernel: value and flux transmission on both circles") {
    for (auto [a0, b0] : {std::pair{5.0, 0.5}, std::pair{0.2, 3.0}}) {
        const TransmissionKernel K = disk_kernel(a0, b0);
        for (Point y : {Point{0.3, 1.2}, Point{-0.2, -0.7}, Point{1.6, 0.4}}) {
            for (int c = 0; c < 2; ++c) {
                const Phase in = c == 0 ? Phase::Inclusion1 : Phase::Inclusion2;
                const double cy = c == 0 ? 1.0 : -1.0;
                for (int i = 0; i < 32; ++i) {
                    const double t = 2.0 * kPi * (i + 0.5) / 32;
                    const Point x{std::cos(t), cy + std::sin(t)};
                    if (std::hypot(x.x1, x.x2) < 0.05) continue;
                    const auto vi = eval_g(x, y, K, {in, std::nullopt});
                    const auto vm = eval_g(x, y, K, {Phase::Matrix, std::nullopt});
                    const double tol = std::max(1e-8, 2.0 * (vi.tail_bound + vm.tail_bound));
                    CHECK(std::abs(vi.value - vm.value) <= tol);
                    const auto gi = eval_g_gradient_x(x, y, K, {in, std::nullopt});
                    const auto gm = eval_g_gradient_x(x, y, K, {Phase::Matrix, std::nullopt});
                    const double fi = K.params.coefficient(in) * (gi.value[0] * std::cos(t) + gi.value[1] * std::sin(t));
                    const double fm = gm.value[0] * std::cos(t) + gm.value[1] * std::sin(t);
                    CHECK(std::abs(fi - fm) <= std::max(1e-8, 2.0 * (gi.tail_bound + gm.tail_bound)));
                }
            }
        }
    }
}

TEST_CASE("strip kernel: value and flux continuity across x1 = ±1/2") {
    TransmissionKernel K = disk_kernel(5.0, 0.5);
    K.geometry = KernelGeometry::Strip;
    for (Point y : {Point{0.9, 0.3}, Point{-1.4, -0.2}, Point{0.1, 0.7}}) {
        for (double side : {0.5, -0.5}) {
            const Phase in = side > 0 ? Phase::Inclusion1 : Phase::Inclusion2;
            for (int i = 0; i < 32; ++i) {
                const Point x{side, -2.0 + 4.0 * (i + 0.5) / 32};
                const auto vi = eval_gtilde(x, y, K, {in, std::nullopt});
                const auto vm = eval_gtilde(x, y, K, {Phase::Matrix, std::nullopt});
                CHECK(std::abs(vi.value - vm.value) <= std::max(1e-8, 2.0 * (vi.tail_bound + vm.tail_bound)));
                const auto gi = eval_kernel_gradient_x(x, y, K, {in, std::nullopt});
                const auto gm = eval_kernel_gradient_x(x, y, K, {Phase::Matrix, std::nullopt});
                CHECK(std::abs(K.params.coefficient(in) * gi.value[0] - gm.value[0]) <=
                      std::max(1e-8, 2.0 * (gi.tail_bound + gm.tail_bound)));
            }
        }
    }
}

TEST_CASE("y-gradient matches finite differences") {
    const TransmissionKernel K = disk_kernel(5.0, 0.5);
    for (int i = 0; i < 60; ++i) {
        const Point x = random_off_interface(2.5), y = random_off_interface(2.5, 0.05);
        if (dist(x, y) < 0.1) continue;
        const KernelPoint kp{resolve_phase(x, {}), resolve_phase(y, {})};
        const auto g = eval_g_gradient_y(x, y, K, kp);
        const double h = 1e-6;
        const double d1 = (eval_g(x, {y.x1 + h, y.x2}, K, kp).value - eval_g(x, {y.x1 - h, y.x2}, K, kp).value) / (2 * h);
        const double d2 = (eval_g(x, {y.x1, y.x2 + h}, K, kp).value - eval_g(x, {y.x1, y.x2 - h}, K, kp).value) / (2 * h);
        CHECK(std::abs(g.value[0] - d1) <= std::max(1e-6, 10.0 * g.tail_bound));
        CHECK(std::abs(g.value[1] - d2) <= std::max(1e-6, 10.0 * g.tail_bound));
    }
}

TEST_CASE("reflection symmetry for a0 = b0") {
    const TransmissionKernel K = disk_kernel(5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const Point x = random_off_interface(2.5), y = random_off_interface(2.5);
        if (dist(x, y) < 1e-2) continue;
        const auto a = eval_g(x, y, K), b = eval_g({-x.x1, x.x2}, {-y.x1, y.x2}, K);
        CHECK(std::abs(a.value - b.value) <= 2.0 * (a.tail_bound + b.tail_bound) + 1e-12);
    }
}

TEST_CASE("contour charge is one in both normalizations") {
    for (Normalization n : {Normalization::Paper, Normalization::Physical}) {
        const TransmissionKernel K = disk_kernel(5.0, 0.5, n);
        for (Point y : {Point{0.2, 1.1}, Point{0.1, -0.9}, Point{1.5, 0.2}}) {
            const double c1 = contour_charge(y, 1e-2, K), c2 = contour_charge(y, 1e-3, K);
            const double extrap = c2 + (c2 - c1) / 9.0;
            CHECK(std::abs(extrap - 1.0) <= 1e-3);
        }
    }
}

TEST_CASE("regularized kernel carries no mass at the disk centres") {
    TransmissionKernel K = disk_kernel(5.0, 0.5);
    const Point y{0.3, 1.4};
    // charge around c1 = (0, 1) vanishes for the corrected kernel: a ∮ ∂_ν G over |x - c1| = ε
    auto flux = [&](bool regular) {
        double s = 0.0;
        const int n = 256;
        const double eps = 1e-3;
        for (int i = 0; i < n; ++i) {
            const double t = 2.0 * kPi * i / n;
            const Point x{eps * std::cos(t), 1.0 + eps * std::sin(t)};
            const double h = 1e-7;
            const Point xo{x.x1 + h * std::cos(t), x.x2 + h * std::sin(t)}, xi{x.x1 - h * std::cos(t), x.x2 - h * std::sin(t)};
            auto G = [&](Point p) { return regular ? eval_g_regular(p, y, K).value : eval_g(p, y, K).value; };
            s += (G(xo) - G(xi)) / (2 * h) * eps * 2.0 * kPi / n;
        }
        return s * K.params.a0 / (2.0 * kPi * K.params.a0);
    };
    CHECK(std::abs(flux(true)) < 1e-4);
    CHECK(std::abs(flux(false) + K.params.alpha()) < 1e-4);
}

TEST_CASE("strip/disk correspondence") {
    const MediumParams Z{1.0, 1.0, 3.0};
    const MediumParams P{(1.0 + 0.8) / (1.0 - 0.8), (1.0 - 0.5) / (1.0 + 0.5), 3.0};
    int seen = 0;
    for (int i = 0; i < 400 && seen < 100; ++i) {
        const Point y = random_off_interface(2.0, 0.05);
        const Point x{uniform(-3, 3), uniform(-3, 3)};
        if (std::abs(std::abs(x.x1) - 0.5) < 0.05 || std::hypot(x.x1, x.x2) < 0.3) continue;
        if (dist(theta(x), y) < 0.05) continue;
        try {
            CHECK(correspondence_check(x, y, Z).residual <= 1e-12);
            CHECK(correspondence_check(x, y, P).residual <= 1e-8);
            ++seen;
        } catch (const DomainError&) {
        }
    }
    CHECK(seen >= 50);
}

}  // TEST_SUITE
