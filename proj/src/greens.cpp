#include "cusp/greens.hpp"

#include <cmath>
#include <limits>

namespace cusp {

double TransmissionKernel::scale(Phase y_phase) const {
    return norm == Normalization::Paper ? 1.0 : 1.0 / (2.0 * kPi * params.coefficient(y_phase));
}

void image_terms(Phase yp, Phase xp, const MediumParams& p, int k, std::vector<ImageTerm>& out) {
    out.clear();
    const double a = p.alpha(), b = p.beta(), q = a * b;
    const double qk = std::pow(q, k);
    const int k2 = 2 * k;
    using P = Phase;
    if (yp == P::Matrix) {
        if (xp == P::Matrix) {
            if (k == 0) {
                out.push_back({1.0, 0, false});
            } else {
                const double qk1 = std::pow(q, k - 1);
                out.push_back({qk, k2, false});
                out.push_back({qk, -k2, false});
                out.push_back({-qk1 * b, k2 - 1, true});
                out.push_back({-qk1 * a, -(k2 - 1), true});
            }
        } else if (xp == P::Inclusion1) {
            out.push_back({(1.0 - a) * qk, k2, false});
            out.push_back({-(1.0 - a) * b * qk, k2 + 1, true});
        } else {
            out.push_back({(1.0 - b) * qk, -k2, false});
            out.push_back({-(1.0 - b) * a * qk, -(k2 + 1), true});
        }
    } else if (yp == P::Inclusion1) {
        if (xp == P::Inclusion1) {
            if (k == 0) {
                out.push_back({1.0, 0, false});
                out.push_back({a, -1, true});
            }
            out.push_back({-2.0 * b * (1.0 + a) / (1.0 + p.a0) * qk, k2 + 1, true});
        } else if (xp == P::Matrix) {
            out.push_back({(1.0 + a) * qk, -k2, false});
            out.push_back({-(1.0 + a) * b * qk, k2 + 1, true});
        } else {
            out.push_back({2.0 * (1.0 + a) / (1.0 + p.b0) * qk, -k2, false});
        }
    } else {
        if (xp == P::Inclusion2) {
            if (k == 0) {
                out.push_back({1.0, 0, false});
                out.push_back({b, 1, true});
            }
            out.push_back({-2.0 * a * (1.0 + b) / (1.0 + p.b0) * qk, -(k2 + 1), true});
        } else if (xp == P::Matrix) {
            out.push_back({(1.0 + b) * qk, k2, false});
            out.push_back({-(1.0 + b) * a * qk, -(k2 + 1), true});
        } else {
            out.push_back({2.0 * (1.0 + b) / (1.0 + p.a0) * qk, k2, false});
        }
    }
}

namespace {

enum class Want { Value, GradX, GradY };

struct Ctx {
    KernelGeometry geom;
    cplx x;       // evaluation point
    cplx y;       // source (disk or strip coordinates)
    bool origin;  // strip-origin kernel (y* = 0)
    Want want;
    double absx, theta_abs, absy;
};

cplx reflect(const Ctx& c, cplx y) {
    if (c.geom == KernelGeometry::Strip) return {-y.real(), y.imag()};
    return std::conj(y);
}

// contribution of one term: value in [0], gradient in [0],[1]
Vec2 term_value(const Ctx& c, const ImageTerm& t) {
    cplx P, dP(1.0, 0.0);
    if (c.geom == KernelGeometry::Strip) {
        P = c.x + double(t.shift);
    } else {
        const cplx den = cplx(0.0, 1.0) + double(t.shift) * c.x;
        if (std::abs(den) <= kPoleTol) {
            // the image runs off to infinity; only its y-gradient has a finite (zero) limit
            if (c.want == Want::GradY) return {0.0, 0.0};
            throw DomainError("green: evaluation at an image pole");
        }
        P = cplx(0.0, 1.0) * c.x / den;
        dP = -1.0 / (den * den);
    }
    const cplx ys = c.origin ? cplx(0.0, 0.0) : (t.reflected ? reflect(c, c.y) : c.y);
    const cplx d = P - ys;
    const double n2 = std::norm(d);
    if (n2 == 0.0) throw DomainError("green: evaluation point coincides with the source or an image");
    switch (c.want) {
        case Want::Value: return {t.coef * 0.5 * std::log(n2), 0.0};
        case Want::GradX: {
            const cplx w = dP / d;
            return {t.coef * w.real(), -t.coef * w.imag()};
        }
        case Want::GradY: {
            // ∂/∂y of log|d|; d depends on y through -y*
            double g1, g2;
            if (!t.reflected) {
                g1 = -d.real() / n2;
                g2 = -d.imag() / n2;
            } else if (c.geom == KernelGeometry::Strip) {
                g1 = d.real() / n2;
                g2 = -d.imag() / n2;
            } else {
                g1 = -d.real() / n2;
                g2 = d.imag() / n2;
            }
            return {t.coef * g1, t.coef * g2};
        }
    }
    return {0.0, 0.0};
}

// a-priori bound on |term| (without coef) in a late group; false when not yet valid
bool term_bound(const Ctx& c, const ImageTerm& t, double& b) {
    const double s = std::abs(double(t.shift));
    if (c.geom == KernelGeometry::Strip) {
        const cplx ys = c.origin ? cplx(0.0, 0.0) : (t.reflected ? reflect(c, c.y) : c.y);
        const double D = std::abs(c.x - ys);
        if (c.want == Want::Value) {
            if (s - D < 1.0) return false;
            b = std::log(s + D);
        } else {
            if (s - D <= 0.5) return false;
            b = 1.0 / (s - D);
        }
        return true;
    }
    if (s <= c.theta_abs + 1.0) return false;
    const double delta = 1.0 / (s - c.theta_abs);
    if (c.origin) return false;
    if (delta >= 0.5 * c.absy) return false;
    switch (c.want) {
        case Want::Value: b = std::abs(std::log(c.absy)) + delta / (c.absy - delta); break;
        case Want::GradX: b = delta * delta / (c.absx * c.absx) / (c.absy - delta); break;
        case Want::GradY: b = 1.0 / (c.absy - delta); break;
    }
    return true;
}

SeriesValue<Vec2> core(const Ctx& c, Phase yp, Phase xp, const MediumParams& p, const TruncationPolicy& trunc) {
    const double q = std::abs(p.alpha() * p.beta());
    const bool fixed = trunc.mode == TruncationPolicy::Mode::FixedK;
    const int kmax = std::max(0, trunc.k_max);
    // the strip value bound grows like log k; all others are non-increasing in k
    const bool growing = c.geom == KernelGeometry::Strip && c.want == Want::Value;
    std::vector<ImageTerm> g0, g1, g2;
    Vec2 sum{0.0, 0.0};
    double tail = std::numeric_limits<double>::infinity();
    int k = 0;
    for (;; ++k) {
        image_terms(yp, xp, p, k, g0);
        for (const auto& t : g0) {
            if (t.coef == 0.0) continue;
            const Vec2 v = term_value(c, t);
            sum[0] += v[0];
            sum[1] += v[1];
        }
        image_terms(yp, xp, p, k + 1, g1);
        image_terms(yp, xp, p, k + 2, g2);
        double S1 = 0.0, S2 = 0.0, rho = q;
        bool ok = true;
        for (std::size_t i = 0; i < g1.size() && ok; ++i) {
            double b1 = 0.0, b2 = 0.0;
            if (g1[i].coef != 0.0) ok = term_bound(c, g1[i], b1);
            if (ok && i < g2.size() && g2[i].coef != 0.0) ok = term_bound(c, g2[i], b2);
            if (!ok) break;
            const double t1 = std::abs(g1[i].coef) * b1;
            const double t2 = i < g2.size() ? std::abs(g2[i].coef) * b2 : 0.0;
            S1 += t1;
            S2 += t2;
            if (growing && t1 > 0.0) rho = std::max(rho, t2 / t1);
        }
        if (!ok) {
            tail = std::numeric_limits<double>::infinity();
        } else if (q == 0.0) {
            tail = S1 + S2;  // every later group carries a positive power of αβ
        } else {
            tail = rho < 1.0 ? S1 / (1.0 - rho) : std::numeric_limits<double>::infinity();
        }
        if (fixed ? k >= kmax : (tail <= trunc.tail_tol || k >= kmax)) break;
    }
    SeriesValue<Vec2> out;
    out.value = sum;
    out.tail_bound = tail;
    out.terms_used = k + 1;
    return out;
}

Phase phase_for(KernelGeometry g, Point p, std::optional<Phase> hint) {
    return g == KernelGeometry::Strip ? resolve_strip_phase(p, hint) : resolve_phase(p, hint);
}

SeriesValue<Vec2> dispatch(Point x, Point y, const TransmissionKernel& K, KernelPoint h, Want want) {
    K.params.validate();
    const Phase yp = phase_for(K.geometry, y, h.y_hint);
    const Phase xp = phase_for(K.geometry, x, h.x_hint);
    Ctx c{K.geometry, x.z(), y.z(), false, want, std::abs(x.z()), 0.0, std::abs(y.z())};
    if (K.geometry == KernelGeometry::Disk) {
        if (c.absx < 1e-10) throw DomainError("green: evaluation point within 1e-10 of the cusp");
        if (c.absy < 1e-10) throw DomainError("green: source within 1e-10 of the cusp");
        c.theta_abs = 1.0 / c.absx;
    }
    auto s = core(c, yp, xp, K.params, K.trunc);
    const double sc = K.scale(yp);
    s.value[0] *= sc;
    s.value[1] *= sc;
    s.tail_bound *= sc;
    return s;
}

SeriesValue<double> first(const SeriesValue<Vec2>& s) { return {s.value[0], s.tail_bound, s.terms_used}; }

}  // namespace

SeriesValue<double> eval_kernel(Point x, Point y, const TransmissionKernel& K, KernelPoint h) {
    return first(dispatch(x, y, K, h, Want::Value));
}

SeriesValue<Vec2> eval_kernel_gradient_x(Point x, Point y, const TransmissionKernel& K, KernelPoint h) {
    return dispatch(x, y, K, h, Want::GradX);
}

SeriesValue<Vec2> eval_kernel_gradient_y(Point x, Point y, const TransmissionKernel& K, KernelPoint h) {
    return dispatch(x, y, K, h, Want::GradY);
}

SeriesValue<double> eval_gtilde(Point x, Point y, const TransmissionKernel& K, KernelPoint h) {
    TransmissionKernel k = K;
    k.geometry = KernelGeometry::Strip;
    return eval_kernel(x, y, k, h);
}

SeriesValue<double> eval_g(Point x, Point y, const TransmissionKernel& K, KernelPoint h) {
    TransmissionKernel k = K;
    k.geometry = KernelGeometry::Disk;
    return eval_kernel(x, y, k, h);
}

double center_correction_weight(Phase y_phase, const MediumParams& p) {
    if (y_phase == Phase::Inclusion1) return p.alpha() / (1.0 - p.alpha());
    if (y_phase == Phase::Inclusion2) return p.beta() / (1.0 - p.beta());
    return 0.0;
}

SeriesValue<double> eval_g_regular(Point x, Point y, const TransmissionKernel& K, KernelPoint h) {
    TransmissionKernel k = K;
    k.geometry = KernelGeometry::Disk;
    const Phase yp = resolve_phase(y, h.y_hint);
    auto g = eval_kernel(x, y, k, {h.x_hint, yp});
    const double w = center_correction_weight(yp, K.params);
    if (w != 0.0) {
        const Point c{0.0, yp == Phase::Inclusion1 ? 1.0 : -1.0};
        // G(x, c) is normalized with a(c) = a(y), so the same scale applies
        auto gc = eval_kernel(x, c, k, {h.x_hint, yp});
        g.value += w * gc.value;
        g.tail_bound += std::abs(w) * gc.tail_bound;
    }
    return g;
}

SeriesValue<double> strip_origin_kernel(Point x, Phase y_phase, const MediumParams& p,
                                        const TruncationPolicy& trunc, std::optional<Phase> x_hint) {
    const Phase xp = resolve_strip_phase(x, x_hint);
    Ctx c{KernelGeometry::Strip, x.z(), {0.0, 0.0}, true, Want::Value, std::abs(x.z()), 0.0, 0.0};
    return first(core(c, y_phase, xp, p, trunc));
}

double correspondence_constant(Phase y_phase, const MediumParams& p) {
    const double a = p.alpha(), b = p.beta();
    switch (y_phase) {
        case Phase::Matrix: return (1.0 - a) * (1.0 - b) / (1.0 - a * b);
        case Phase::Inclusion1: return (1.0 + a) * (1.0 - b) / (1.0 - a * b);
        case Phase::Inclusion2: return (1.0 + b) * (1.0 - a) / (1.0 - a * b);
    }
    return 0.0;
}

CorrespondenceResult correspondence_check(Point x, Point y, const MediumParams& p, const TruncationPolicy& trunc) {
    const Phase xp = resolve_strip_phase(x, {});
    const Phase yp = resolve_phase(y, {});
    TransmissionKernel K{KernelGeometry::Disk, p, trunc, Normalization::Paper};
    const auto lhs = eval_g(theta(x), y, K, {xp, yp});
    const auto gt = eval_gtilde(x, theta(y), K, {xp, yp});
    const auto H = strip_origin_kernel(x, yp, p, trunc, xp);
    const double rhs = gt.value - H.value + correspondence_constant(yp, p) * std::log(std::abs(y.z()));
    return {std::abs(lhs.value - rhs), lhs.tail_bound + gt.tail_bound + H.tail_bound, lhs.value, rhs};
}

double contour_charge(Point y, double eps, const TransmissionKernel& K, int n_quad) {
    const Phase yp = phase_for(K.geometry, y, {});
    const double a = K.params.coefficient(yp);
    double acc = 0.0;
    for (int i = 0; i < n_quad; ++i) {
        const double ph = 2.0 * kPi * i / n_quad;
        const Point x{y.x1 + eps * std::cos(ph), y.x2 + eps * std::sin(ph)};
        const auto g = eval_kernel_gradient_x(x, y, K, {yp, yp});
        acc += a * (g.value[0] * std::cos(ph) + g.value[1] * std::sin(ph)) * eps * (2.0 * kPi / n_quad);
    }
    if (K.norm == Normalization::Paper) acc /= 2.0 * kPi * a;
    return acc;
}

}  // namespace cusp
