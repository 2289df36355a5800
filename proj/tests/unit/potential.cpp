#include "cusp/potential.hpp"

#include "support.hpp"

using namespace cusp;

namespace {

PiecewiseField upper_unit() { return PiecewiseField::constant(Phase::Inclusion1, {1.0, 0.0}); }

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("zero field") {
    const QuadSpec q;
    const PiecewiseField z = PiecewiseField::zero();
    CHECK(log_layer({2.0, 0.3}, Phase::Inclusion1, false, z, q) == 0.0);
    VolumeProblem vp;
    TransmissionKernel K;
    K.params = {5.0, 0.5, 3.0};
    K.norm = Normalization::Physical;
    CHECK(volume_solution({0.4, 0.2}, vp, K, q).value == 0.0);
}

TEST_CASE("log layer of a constant field equals its boundary integral") {
    const QuadSpec q = QuadSpec{}.refined();
    for (Point x : {Point{4.0, 0.5}, Point{-2.5, 2.5}, Point{1.5, -0.5}}) {
        double b = 0.0;
        const int n = 4096;
        for (int i = 0; i < n; ++i) {
            const double t = 2.0 * kPi * i / n;
            const Point y{std::cos(t), 1.0 + std::sin(t)};
            b += std::log(std::hypot(x.x1 - y.x1, x.x2 - y.x2)) * std::cos(t) * 2.0 * kPi / n;
        }
        CHECK(std::abs(log_layer(x, Phase::Inclusion1, false, upper_unit(), q) - b) <= 1e-8);
    }
    // inside the region: polar desingularization about x
    const Point xin{0.2, 1.3};
    double b = 0.0;
    for (int i = 0; i < 4096; ++i) {
        const double t = 2.0 * kPi * i / 4096;
        b += std::log(std::hypot(xin.x1 - std::cos(t), xin.x2 - 1.0 - std::sin(t))) * std::cos(t) * 2.0 * kPi / 4096;
    }
    CHECK(std::abs(log_layer(xin, Phase::Inclusion1, false, upper_unit(), q) - b) <= 1e-6);
}

TEST_CASE("reflected series: zero contrast and two-route agreement") {
    const QuadSpec q;
    const MediumParams Z{1.0, 1.0, 3.0};
    for (Point x : {Point{1.5, 0.3}, Point{0.1, 1.5}, Point{-0.3, -1.2}}) {
        const auto w = reflected_sum_w(x, Phase::Inclusion1, upper_unit(), Z, TruncationPolicy::target(1e-12), q);
        CHECK(w.value == doctest::Approx(log_layer(x, Phase::Inclusion1, false, upper_unit(), q)).epsilon(1e-12));
    }
    const MediumParams P{9.0, 1.0 / 3.0, 3.0};
    TransmissionKernel K;
    K.params = P;
    K.norm = Normalization::Paper;
    PiecewiseField f = upper_unit();
    f.comp[static_cast<int>(Phase::Inclusion2)] = [](Point y) { return Vec2{0.5 * y.x2, -1.0}; };
    for (Phase region : {Phase::Inclusion1, Phase::Inclusion2}) {
        for (Point x : {Point{1.5, 0.3}, Point{0.4, 1.5}, Point{-0.3, -1.2}}) {
            const auto a = reflected_sum_w(x, region, f, P, TruncationPolicy::target(1e-12), q);
            const double b = direct_w(x, region, f, K, q);
            CHECK(std::abs(a.value - b) <= 1e-6 + a.tail_bound);
            const auto a2 = reflected_sum_w(x, region, f, P, TruncationPolicy::target(1e-14), q);
            CHECK(std::abs(a2.value - a.value) <= a.tail_bound + 1e-14);
        }
    }
}

TEST_CASE("volume potential: linearity and transmission of a div-form source") {
    TransmissionKernel K;
    K.params = {5.0, 0.5, 3.0};
    K.norm = Normalization::Physical;
    QuadSpec q;
    VolumeProblem p1, p2, p12;
    p1.f = upper_unit();
    p2.f.comp[static_cast<int>(Phase::Inclusion2)] = [](Point y) { return Vec2{y.x1, 0.3}; };
    p12.f.comp[0] = [](Point) { return Vec2{2.0, 0.0}; };
    p12.f.comp[1] = [](Point y) { return Vec2{-3.0 * y.x1, -0.9}; };
    for (auto* p : {&p1, &p2, &p12}) p->route = PotentialRoute::ImageSeries;
    for (Point x : {Point{0.3, 0.4}, Point{1.2, -2.0}, Point{0.1, 1.7}}) {
        const double u = 2.0 * volume_solution(x, p1, K, q).value - 3.0 * volume_solution(x, p2, K, q).value;
        CHECK(std::abs(volume_solution(x, p12, K, q).value - u) <= 1e-12 * std::max(1.0, std::abs(u)));
    }

    // [u] = 0 and [a ∂_ν u - f·ν] = 0 across ∂𝔅1 for f = (1, 0)χ_𝔅1; near-boundary values need
    // the refined quadrature
    q = q.refined().refined();
    for (double t : {0.3, 1.2, 2.5}) {
        const Point x{std::cos(t), 1.0 + std::sin(t)};
        const Vec2 n{std::cos(t), std::sin(t)};
        const double ui = volume_solution(x, p1, K, q, Phase::Inclusion1).value;
        const double um = volume_solution(x, p1, K, q, Phase::Matrix).value;
        CHECK(std::abs(ui - um) <= 1e-8);
        auto at = [&](double s) { return Point{x.x1 + s * n[0], x.x2 + s * n[1]}; };
        const double d = 2e-2;
        // second-order one-sided differences
        const double dm = (-3.0 * um + 4.0 * volume_solution(at(d), p1, K, q).value - volume_solution(at(2 * d), p1, K, q).value) / (2 * d);
        const double di = (3.0 * ui - 4.0 * volume_solution(at(-d), p1, K, q).value + volume_solution(at(-2 * d), p1, K, q).value) / (2 * d);
        const double jump = 5.0 * di - n[0] - dm;
        CHECK(std::abs(jump) <= 2e-3);
    }
}

TEST_CASE("cutoff function") {
    const CutoffFunction eta{2.0};
    CHECK(eta.value({0.5, 0.0}) == 1.0);
    CHECK(eta.value({2.5, 0.0}) == 0.0);
    const double v = eta.value({1.5, 0.0});
    CHECK((v > 0.0 && v < 1.0));
    const Point p{1.3, 0.4};
    const double h = 1e-6;
    const Vec2 g = eta.gradient(p);
    CHECK(g[0] == doctest::Approx((eta.value({p.x1 + h, p.x2}) - eta.value({p.x1 - h, p.x2})) / (2 * h)).epsilon(1e-6));
}

}  // TEST_SUITE
