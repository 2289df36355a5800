#include "cusp/geometry.hpp"

#include "support.hpp"

using namespace cusp;
using testing::dist;
using testing::uniform;

TEST_SUITE("geometry") {

TEST_CASE("theta: substitution, involution and the origin") {
    const Point t = theta(Point{1.0, 1.0});
    CHECK(t.x1 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t.x2 == doctest::Approx(0.5).epsilon(1e-15));
    const Point p{0.3, -1.7};
    CHECK(dist(theta(theta(p)), p) < 1e-15);
    CHECK_THROWS_AS(theta(Point{0.0, 0.0}), DomainError);

    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double r = std::pow(10.0, uniform(-5.9, 5.9));
        const double a = uniform(0.0, 2.0 * kPi);
        const Point q{r * std::cos(a), r * std::sin(a)};
        worst = std::max(worst, dist(theta(theta(q)), q) / r);
    }
    CHECK(worst < 1e-14);
}

TEST_CASE("theta maps the upper unit circle to the line x1 = 1/2") {
    for (int i = 1; i <= 20; ++i) {
        const double a = -kPi / 2 + 2.0 * kPi * i / 21.0;
        const Point p{std::cos(a), 1.0 + std::sin(a)};
        CHECK(theta(p).x1 == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("region transport under theta") {
    const DiskGeometry geo;
    int n0 = 0, n1 = 0;
    for (int i = 0; i < 4000; ++i) {
        const Point p{uniform(-3, 3), uniform(-3, 3)};
        const auto tag = classify(p, geo, 1e-6).tag;
        if (tag == RegionTag::Matrix) {
            CHECK(std::abs(theta(p).x1) < 0.5);
            ++n0;
        } else if (tag == RegionTag::Inclusion1) {
            CHECK(theta(p).x1 > 0.5);
            ++n1;
        }
    }
    CHECK(n0 > 100);
    CHECK(n1 > 100);
}

TEST_CASE("similarity identity |Θ(x) - y| / |x - Θ(y)| = |y| / |x|") {
    for (int i = 0; i < 500; ++i) {
        const Point x{uniform(-2, 2), uniform(-2, 2)}, y{uniform(-2, 2), uniform(-2, 2)};
        const double lhs = dist(theta(x), y) / dist(x, theta(y));
        const double rhs = std::hypot(y.x1, y.x2) / std::hypot(x.x1, x.x2);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("map_xk: identity, memberships, group action") {
    const Point p{0.2, 0.1};
    CHECK(dist(map_xk(p, 0), p) == 0.0);

    const Point q{0.6, 0.0};
    REQUIRE(classify(q).tag == RegionTag::Matrix);
    const Point m2 = map_xk(q, -2);
    CHECK(std::hypot(m2.x1, m2.x2) < 1.0);
    CHECK(classify(m2).tag != RegionTag::Inclusion1);
    CHECK(classify(map_xk(q, 1)).tag == RegionTag::Inclusion1);
    for (int k = 1; k <= 5; ++k) {
        const Point a = map_xk(q, -2 * k);
        CHECK(std::hypot(a.x1, a.x2) < 1.0);
        CHECK(classify(a).tag != RegionTag::Inclusion1);
    }

    for (int i = 0; i < 200; ++i) {
        const Point x{uniform(-1, 1), uniform(-1, 1)};
        const int k = static_cast<int>(uniform(-6, 6)), m = static_cast<int>(uniform(-6, 6));
        try {
            const Point a = map_xk(map_xk(x, k), m), b = map_xk(x, k + m);
            CHECK(dist(a, b) <= 1e-12 * std::max(1.0, std::hypot(b.x1, b.x2)));
        } catch (const DomainError&) {
        }
    }
}

TEST_CASE("map_xk_jet: derivative vs finite differences and |k|² growth") {
    CHECK(std::abs(map_xk_jet(Point{0.6, 0.0}, 0).deriv - cplx(1.0, 0.0)) < 1e-15);
    const cplx z(0.6, 0.0);
    for (int k : {-3, -1, 1, 2, 7}) {
        const double h = 1e-6;
        const cplx fd = (map_xk(z + h, k) - map_xk(z - h, k)) / (2.0 * h);
        CHECK(std::abs(map_xk_jet(Point::from(z), k).deriv - fd) < 1e-6);
    }
    // |dX_k/dz| / k² stays bounded on samples in the matrix part of B_1
    double lo = 1e300, hi = 0.0;
    for (int k = 1; k <= 50; ++k) {
        double mx = 0.0;
        for (double a = 0.05; a < 1.0; a += 0.1) {
            const Point s{a * 0.9, 0.02};
            mx = std::max(mx, std::abs(map_xk_jet(s, k).deriv));
        }
        lo = std::min(lo, mx / (k * k));
        hi = std::max(hi, mx / (k * k));
    }
    CHECK(hi < 10.0);
    CHECK(lo <= hi);
}

TEST_CASE("classify examples") {
    CHECK(classify(Point{0.0, 1.0}).tag == RegionTag::Inclusion1);
    CHECK(classify(Point{0.0, -1.0}).tag == RegionTag::Inclusion2);
    CHECK(classify(Point{0.0, 0.0}, {}, 1e-12).tag == RegionTag::Interface1);
    CHECK(classify(Point{2.0, 0.0}).tag == RegionTag::Matrix);
    CHECK(classify(Point{1.0, 1.0}).tag == RegionTag::Interface1);
    CHECK_THROWS_AS(resolve_phase(Point{1.0, 1.0}, std::nullopt), DomainError);
    CHECK(resolve_phase(Point{1.0, 1.0}, Phase::Matrix) == Phase::Matrix);
    CHECK_THROWS_AS(DiskGeometry({0.0, 1.0}).validate(), ConfigError);
}

TEST_CASE("equal_radius_map") {
    const MobiusMap id = equal_radius_map({1.0, 1.0}, 3.0);
    CHECK(id.affine);
    CHECK(std::abs(id.forward({0.3, -0.2}) - cplx(0.3, -0.2)) < 1e-15);

    const MobiusMap m = equal_radius_map({1.0, 2.0}, 3.0);
    REQUIRE(m.roots.size() == 2);
    CHECK(m.roots[0] == doctest::Approx(4.0 + std::sqrt(15.0)).epsilon(1e-12));
    CHECK(m.roots[0] * m.roots[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m.pole) > 4.0);  // outside B_3 with a unit margin
    CHECK(std::abs(m.forward(cplx(0.0, 0.0))) < 1e-9);
    // poles with equal image radii lie on a circle of diameter 4 r1 r2/|r2 - r1| (= 8 here)
    CHECK_THROWS_AS(equal_radius_map({1.0, 2.0}, 7.5), ConfigError);

    for (auto [r1, r2] : {std::pair{1.0, 2.0}, std::pair{0.5, 1.5}, std::pair{3.0, 1.0}, std::pair{1.0, 1.1}}) {
        const MobiusMap f = equal_radius_map({r1, r2}, 0.5);
        // images of three points per circle, circumscribed circle
        for (int c = 0; c < 2; ++c) {
            const double r = c == 0 ? r1 : r2;
            const cplx ctr(0.0, c == 0 ? r1 : -r2);
            cplx w[3];
            for (int i = 0; i < 3; ++i) w[i] = f.forward(ctr + r * std::polar(1.0, 0.7 + 2.0 * i));
            // circumcentre: 2 Re(conj(d_i) o) = |d_i|² for d_i = w_i - w_0
            const cplx a = w[1] - w[0], b = w[2] - w[0];
            const double det = 2.0 * (a.real() * b.imag() - a.imag() * b.real());
            const double na = std::norm(a), nb = std::norm(b);
            const cplx o = w[0] + cplx((na * b.imag() - nb * a.imag()) / det, (nb * a.real() - na * b.real()) / det);
            CHECK(std::abs(o - cplx(0.0, c == 0 ? 1.0 : -1.0)) < 1e-10);
            CHECK(std::abs(std::abs(w[0] - o) - 1.0) < 1e-10);
        }
        CHECK(std::abs(f.image_radius1 - f.image_radius2) <= 1e-12 * f.image_radius1);
        const cplx z(0.37, -0.81);
        CHECK(std::abs(f.inverse(f.forward(z)) - z) < 1e-12);
    }
}

}  // TEST_SUITE
