#include "cusp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace cusp {

PiecewiseField PiecewiseField::constant(Phase ph, Vec2 v) {
    PiecewiseField f;
    f.comp[static_cast<int>(ph)] = [v](Point) { return v; };
    f.smoothness[static_cast<int>(ph)] = {100, 0.0};
    return f;
}

namespace {

// smooth step: 0 for t ≤ 0, 1 for t ≥ 1
double psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double dpsi(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

}  // namespace

double CutoffFunction::value(Point y) const {
    const double r = std::hypot(y.x1, y.x2);
    const double t = (l - r) / (0.5 * l);  // 1 at r = l/2, 0 at r = l
    const double a = psi(t), b = psi(1.0 - t);
    return a / (a + b);
}

Vec2 CutoffFunction::gradient(Point y) const {
    const double r = std::hypot(y.x1, y.x2);
    if (r <= 0.5 * l || r >= l) return {0.0, 0.0};
    const double t = (l - r) / (0.5 * l);
    const double a = psi(t), b = psi(1.0 - t);
    const double da = dpsi(t), db = -dpsi(1.0 - t);
    const double deta_dt = (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
    const double deta_dr = deta_dt * (-2.0 / l);
    return {deta_dr * y.x1 / r, deta_dr * y.x2 / r};
}

namespace {

struct GaussRule {
    std::vector<double> x, w;  // on (0, 1)
};

const GaussRule& gauss(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        g.x[i] = 0.5 * (1.0 - z);
        g.w[i] = 1.0 / ((1.0 - z * z) * dp * dp);  // (2/((1-z²)P'²))/2
    }
    return cache.emplace(n, std::move(g)).first->second;
}

struct Disk {
    cplx c;
    double r;
};

using Intervals = std::vector<std::pair<double, double>>;

// [ρ-, ρ+] ∩ [0, ∞) of the ray c + ρe inside the disk
bool ray_disk(cplx c, cplx e, const Disk& d, double& lo, double& hi) {
    const cplx m = c - d.c;
    const double b = m.real() * e.real() + m.imag() * e.imag();
    const double disc = b * b - (std::norm(m) - d.r * d.r);
    if (disc <= 0.0) return false;
    const double s = std::sqrt(disc);
    lo = std::max(0.0, -b - s);
    hi = -b + s;
    return hi > lo;
}

Intervals intersect(const Intervals& A, double lo, double hi) {
    Intervals out;
    for (auto [a, b] : A) {
        const double l = std::max(a, lo), h = std::min(b, hi);
        if (h > l) out.push_back({l, h});
    }
    return out;
}

Intervals subtract(const Intervals& A, double lo, double hi) {
    Intervals out;
    for (auto [a, b] : A) {
        if (hi <= a || lo >= b) {
            out.push_back({a, b});
            continue;
        }
        if (lo > a) out.push_back({a, lo});
        if (hi < b) out.push_back({hi, b});
    }
    return out;
}

const Disk kC1{{0.0, 1.0}, 1.0};
const Disk kC2{{0.0, -1.0}, 1.0};

Intervals region_intervals(cplx c, cplx e, Phase region, double support) {
    double lo, hi;
    Intervals I;
    if (!ray_disk(c, e, {{0.0, 0.0}, support}, lo, hi)) return I;
    I.push_back({lo, hi});
    if (region == Phase::Inclusion1 || region == Phase::Inclusion2) {
        if (!ray_disk(c, e, region == Phase::Inclusion1 ? kC1 : kC2, lo, hi)) return {};
        return intersect(I, lo, hi);
    }
    for (const Disk& d : {kC1, kC2})
        if (ray_disk(c, e, d, lo, hi)) I = subtract(I, lo, hi);
    return I;
}

void add_circle_points(const Disk& A, const Disk& B, std::vector<cplx>& pts) {
    const double d = std::abs(B.c - A.c);
    if (d == 0.0 || d > A.r + B.r || d < std::abs(A.r - B.r)) return;
    const double a = (A.r * A.r - B.r * B.r + d * d) / (2.0 * d);
    const double h = std::sqrt(std::max(0.0, A.r * A.r - a * a));
    const cplx u = (B.c - A.c) / d;
    const cplx base = A.c + a * u;
    pts.push_back(base + h * cplx(-u.imag(), u.real()));
    if (h > 0.0) pts.push_back(base - h * cplx(-u.imag(), u.real()));
}

std::vector<double> breakpoints(cplx c, const QuadSpec& q) {
    std::vector<double> br;
    const Disk W{{0.0, 0.0}, q.support_radius};
    for (const Disk& d : {W, kC1, kC2}) {
        const double dist = std::abs(c - d.c);
        if (dist > d.r * (1.0 + 1e-14)) {
            const double base = std::arg(d.c - c), half = std::asin(d.r / dist);
            br.push_back(base - half);
            br.push_back(base + half);
        }
    }
    std::vector<cplx> pts;
    add_circle_points(W, kC1, pts);
    add_circle_points(W, kC2, pts);
    pts.push_back({0.0, 0.0});  // tangency of C1 and C2
    for (cplx p : pts)
        if (std::abs(p - c) > 1e-14) br.push_back(std::arg(p - c));
    for (double& b : br) {
        b = std::fmod(b, 2.0 * kPi);
        if (b < 0.0) b += 2.0 * kPi;
    }
    std::sort(br.begin(), br.end());
    std::vector<double> out;
    for (double b : br)
        if (out.empty() || b - out.back() > 1e-13) out.push_back(b);
    if (out.empty()) out.push_back(0.0);
    // wrap-around duplicate
    if (out.size() > 1 && out.front() + 2.0 * kPi - out.back() <= 1e-13) out.pop_back();
    return out;
}

}  // namespace

double integrate_region(Point centre, Phase region, const QuadSpec& q, bool log_graded,
                        const std::function<double(Point, double)>& integrand) {
    if (q.n_ang < 1 || q.n_rad < 1 || !(q.max_panel > 0.0)) throw ConfigError("invalid quadrature spec");
    const cplx c = centre.z();
    std::vector<double> br = breakpoints(c, q);
    br.push_back(br.front() + 2.0 * kPi);
    const GaussRule& ga = gauss(q.n_ang);
    const GaussRule& gr = gauss(q.n_rad);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < br.size(); ++p) {
        const double A = br[p], B = br[p + 1];
        const int nsub = std::max(1, static_cast<int>(std::ceil((B - A) / q.max_panel)));
        for (int s = 0; s < nsub; ++s) {
            const double a = A + (B - A) * s / nsub, b = A + (B - A) * (s + 1) / nsub;
            for (int i = 0; i < q.n_ang; ++i) {
                // cosine grading clusters nodes at both panel ends (square-root endpoint behaviour)
                const double t = ga.x[i];
                const double phi = a + (b - a) * 0.5 * (1.0 - std::cos(kPi * t));
                const double wphi = ga.w[i] * (b - a) * 0.5 * kPi * std::sin(kPi * t);
                const cplx e = std::polar(1.0, phi);
                for (auto [lo, hi] : region_intervals(c, e, region, q.support_radius)) {
                    double acc = 0.0;
                    for (int j = 0; j < q.n_rad; ++j) {
                        double rho, wr;
                        if (log_graded && lo == 0.0) {
                            rho = hi * gr.x[j] * gr.x[j];
                            wr = gr.w[j] * 2.0 * hi * gr.x[j];
                        } else {
                            rho = lo + (hi - lo) * gr.x[j];
                            wr = gr.w[j] * (hi - lo);
                        }
                        const cplx y = c + rho * e;
                        acc += wr * rho * integrand({y.real(), y.imag()}, rho);
                    }
                    total += wphi * acc;
                }
            }
        }
    }
    return total;
}

namespace {

Phase mirror(Phase p) {
    if (p == Phase::Inclusion1) return Phase::Inclusion2;
    if (p == Phase::Inclusion2) return Phase::Inclusion1;
    return Phase::Matrix;
}

double region_area(Phase region, const QuadSpec& q) {
    QuadSpec qq = q;
    return integrate_region({0.0, 0.0}, region, qq, false, [](Point, double) { return 1.0; });
}

// max |f| over a sample lattice of the region (used only in tail estimates)
double field_sup(const PiecewiseField& f, Phase region, double support) {
    if (f.empty(region)) return 0.0;
    double m = 0.0;
    const int n = 48;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const Point y{-support + 2.0 * support * i / n, -support + 2.0 * support * j / n};
            if (std::hypot(y.x1, y.x2) > support) continue;
            const Region r = classify(y, {}, 0.0);
            const bool in = (region == Phase::Inclusion1 && r.tag == RegionTag::Inclusion1) ||
                            (region == Phase::Inclusion2 && r.tag == RegionTag::Inclusion2) ||
                            (region == Phase::Matrix && r.tag == RegionTag::Matrix);
            if (!in) continue;
            const Vec2 v = f(y, region);
            m = std::max(m, std::hypot(v[0], v[1]));
        }
    return m;
}

}  // namespace

double log_layer(Point p, Phase region, bool reflected, const PiecewiseField& f, const QuadSpec& q) {
    if (f.empty(region)) return 0.0;
    if (!reflected) {
        return integrate_region(p, region, q, false, [&](Point y, double rho) {
            if (rho == 0.0) return 0.0;
            const Vec2 v = f(y, region);
            const double dx = y.x1 - p.x1, dy = y.x2 - p.x2;
            return (dx * v[0] + dy * v[1]) / (rho * rho);
        });
    }
    // ∫_Y ∇_y log|p - ȳ|·f dy = ∫_{Ȳ} ∇ log|p - y'|·(f1(ȳ'), -f2(ȳ')) dy'
    return integrate_region(p, mirror(region), q, false, [&](Point yp, double rho) {
        if (rho == 0.0) return 0.0;
        const Vec2 v = f({yp.x1, -yp.x2}, region);
        const double dx = yp.x1 - p.x1, dy = yp.x2 - p.x2;
        return (dx * v[0] - dy * v[1]) / (rho * rho);
    });
}

SeriesValue<double> reflected_sum_w(Point x, Phase region, const PiecewiseField& f, const MediumParams& p,
                                    const TruncationPolicy& trunc, const QuadSpec& q, std::optional<Phase> x_hint) {
    SeriesValue<double> out;
    if (f.empty(region)) return out;
    const Phase xp = resolve_phase(x, x_hint);
    if (std::abs(x.z()) < 1e-10) throw DomainError("potential: evaluation within 1e-10 of the cusp");
    const double qq = std::abs(p.alpha() * p.beta());
    // |h| ≤ sup|f| ∫_Y |p - y|^{-1} dy ≤ sup|f| · 2√(π |Y|)
    const double M = field_sup(f, region, q.support_radius) * 2.0 * std::sqrt(kPi * region_area(region, q));
    const bool fixed = trunc.mode == TruncationPolicy::Mode::FixedK;
    std::vector<ImageTerm> g, g1, g2;
    double sum = 0.0, tail = 0.0;
    int k = 0;
    for (;; ++k) {
        image_terms(region, xp, p, k, g);
        for (const auto& t : g) {
            if (t.coef == 0.0) continue;
            const cplx den = cplx(0.0, 1.0) + double(t.shift) * x.z();
            if (std::abs(den) <= kPoleTol) continue;  // image at infinity: h → 0
            const cplx P = cplx(0.0, 1.0) * x.z() / den;
            sum += t.coef * log_layer(Point::from(P), region, t.reflected, f, q);
        }
        image_terms(region, xp, p, k + 1, g1);
        image_terms(region, xp, p, k + 2, g2);
        double c1 = 0.0, c2 = 0.0;
        for (const auto& t : g1) c1 += std::abs(t.coef);
        for (const auto& t : g2) c2 += std::abs(t.coef);
        tail = qq == 0.0 ? (c1 + c2) * M : c1 * M / (1.0 - qq);
        if (fixed ? k >= trunc.k_max : (tail <= trunc.tail_tol || k >= trunc.k_max)) break;
    }
    out.value = sum;
    out.tail_bound = tail;
    out.terms_used = k + 1;
    return out;
}

double direct_w(Point x, Phase region, const PiecewiseField& f, const TransmissionKernel& K, const QuadSpec& q,
                std::optional<Phase> x_hint) {
    if (f.empty(region)) return 0.0;
    TransmissionKernel k = K;
    k.geometry = KernelGeometry::Disk;
    const Phase xp = resolve_phase(x, x_hint);
    return integrate_region(x, region, q, false, [&](Point y, double rho) {
        if (rho == 0.0) return 0.0;
        const Vec2 v = f(y, region);
        if (v[0] == 0.0 && v[1] == 0.0) return 0.0;
        const auto g = eval_kernel_gradient_y(x, y, k, {xp, region});
        return g.value[0] * v[0] + g.value[1] * v[1];
    });
}

SeriesValue<double> volume_solution(Point x, const VolumeProblem& prob, const TransmissionKernel& K,
                                    const QuadSpec& q0, std::optional<Phase> x_hint) {
    if (K.norm != Normalization::Physical || K.geometry != KernelGeometry::Disk)
        throw ConfigError("volume_solution requires the physical disk kernel");
    const MediumParams& p = K.params;
    QuadSpec q = q0;
    if (prob.cutoff) q.support_radius = std::min(q.support_radius, prob.cutoff->l);
    const Phase xp = resolve_phase(x, x_hint);
    const auto eta = [&](Point y) { return prob.cutoff ? prob.cutoff->value(y) : 1.0; };
    const auto deta = [&](Point y) { return prob.cutoff ? prob.cutoff->gradient(y) : Vec2{0.0, 0.0}; };

    // f̃ = fη + a u ∇η
    PiecewiseField ft;
    for (Phase Y : {Phase::Inclusion1, Phase::Inclusion2, Phase::Matrix}) {
        const bool has_ring = prob.ring && prob.cutoff;
        if (prob.f.empty(Y) && !has_ring) continue;
        const double a = p.coefficient(Y);
        ft.comp[static_cast<int>(Y)] = [&, Y, a, has_ring](Point y) {
            Vec2 v = prob.f(y, Y);
            const double e = eta(y);
            v = {v[0] * e, v[1] * e};
            if (has_ring) {
                const Vec2 d = deta(y);
                if (d[0] != 0.0 || d[1] != 0.0) {
                    const double u = prob.ring->u(y, Y);
                    v[0] += a * u * d[0];
                    v[1] += a * u * d[1];
                }
            }
            return v;
        };
    }

    SeriesValue<double> out;
    for (Phase Y : {Phase::Inclusion1, Phase::Inclusion2, Phase::Matrix}) {
        if (ft.empty(Y)) continue;
        if (prob.route == PotentialRoute::Direct) {
            out.value -= direct_w(x, Y, ft, K, q, xp);
        } else {
            auto w = reflected_sum_w(x, Y, ft, p, K.trunc, q, xp);
            const double sc = K.scale(Y);
            out.value -= sc * w.value;
            out.tail_bound += sc * w.tail_bound;
            out.terms_used = std::max(out.terms_used, w.terms_used);
        }
    }
    if (prob.ring && prob.cutoff) {
        // -∫ G s dy with s = f·∇η - a ∇u·∇η over the ring
        TransmissionKernel k = K;
        for (Phase Y : {Phase::Inclusion1, Phase::Inclusion2, Phase::Matrix}) {
            const double a = p.coefficient(Y);
            auto s = [&](Point y) {
                const Vec2 d = deta(y);
                if (d[0] == 0.0 && d[1] == 0.0) return 0.0;
                const Vec2 fv = prob.f(y, Y);
                const Vec2 gu = prob.ring->grad(y, Y);
                return fv[0] * d[0] + fv[1] * d[1] - a * (gu[0] * d[0] + gu[1] * d[1]);
            };
            const double gs = integrate_region(x, Y, q, true, [&](Point y, double rho) {
                if (rho == 0.0) return 0.0;
                const double sv = s(y);
                if (sv == 0.0) return 0.0;
                return eval_kernel(x, y, k, {xp, Y}).value * sv;
            });
            out.value -= gs;
            const double w = center_correction_weight(Y, p);
            if (w != 0.0) {
                const double ms = integrate_region({0.0, 0.0}, Y, q, false, [&](Point y, double) { return s(y); });
                const Point c{0.0, Y == Phase::Inclusion1 ? 1.0 : -1.0};
                out.value -= w * eval_kernel(x, c, k, {xp, Y}).value * ms;
            }
        }
    }
    return out;
}

}  // namespace cusp
