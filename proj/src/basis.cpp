#include "cusp/basis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace cusp {

void MediumParams::validate() const {
    if (!(a0 > 0.0) || !(b0 > 0.0) || !std::isfinite(a0) || !std::isfinite(b0))
        throw ConfigError("coefficients a0, b0 must be finite and positive");
    if (!(R0 > 0.0) || !std::isfinite(R0)) throw ConfigError("R0 must be finite and positive");
}

MediumParams MediumParams::from_alpha(double alpha, double R0) {
    if (!(alpha > -1.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (-1, 1)");
    const double a0 = (1.0 + alpha) / (1.0 - alpha);
    return {a0, a0, R0};
}

const char* to_string(Family f) { return f == Family::Symmetric ? "symmetric" : "general"; }
const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

double trig_basis(Parity parity, int j, double theta) {
    // (-i)^j e^{ijθ} = e^{ij(θ - π/2)}
    const double ph = j * (theta - kPi / 2.0);
    return parity == Parity::Even ? std::cos(ph) : std::sin(ph);
}

namespace {

// coef · (z/(σi + c z))^j  ==  coef · φ(σw + c) with w = i/z, φ(w) = w^{-j}
struct Term {
    double coef;
    double sigma;
    double c;
};

void check_id(const BasisId& id, const MediumParams& p) {
    if (id.j < 0) throw ConfigError("basis index j must be non-negative");
    p.validate();
    if (id.family == Family::Symmetric && p.a0 != p.b0)
        throw ConfigError("symmetric family requires a0 == b0");
}

double ratio_of(const BasisId& id, const MediumParams& p) {
    return id.family == Family::Symmetric ? std::abs(p.alpha()) : std::abs(p.alpha() * p.beta());
}

// Group k of the three-branch formula for the given phase.
void group_terms(const BasisId& id, const MediumParams& p, Phase ph, int k, std::vector<Term>& out) {
    out.clear();
    const double a = p.alpha();
    const bool jodd = (id.j % 2) != 0;
    if (id.family == Family::Symmetric) {
        // even parity: α^k for odd j, (-α)^k for even j; the odd family swaps them
        double s = jodd ? 1.0 : -1.0;
        if (id.parity == Parity::Odd) s = -s;
        const double eps = std::pow(s * a, k);
        const double sgn2 = jodd ? -1.0 : 1.0;
        switch (ph) {
            case Phase::Inclusion1: out.push_back({(1.0 - a) * eps, 1.0, double(k)}); break;
            case Phase::Inclusion2: out.push_back({sgn2 * (1.0 - a) * eps, -1.0, double(k)}); break;
            case Phase::Matrix:
                if (k == 0) {
                    out.push_back({1.0, 1.0, 0.0});
                } else {
                    out.push_back({eps, 1.0, double(k)});
                    out.push_back({sgn2 * eps, -1.0, double(k)});
                }
                break;
        }
        return;
    }
    const double b = p.beta();
    const double q = a * b;
    const double rho = id.parity == Parity::Even ? -1.0 : 1.0;  // sign of the reflected images
    const double qk = std::pow(q, k);
    switch (ph) {
        case Phase::Inclusion1:
            out.push_back({(1.0 - a) * qk, 1.0, 2.0 * k});
            out.push_back({rho * (1.0 - a) * b * qk, -1.0, -(2.0 * k + 1.0)});
            break;
        case Phase::Inclusion2:
            out.push_back({(1.0 - b) * qk, 1.0, -2.0 * k});
            out.push_back({rho * (1.0 - b) * a * qk, -1.0, 2.0 * k + 1.0});
            break;
        case Phase::Matrix:
            if (k == 0) {
                out.push_back({1.0, 1.0, 0.0});
            } else {
                const double qk1 = std::pow(q, k - 1);
                out.push_back({qk, 1.0, 2.0 * k});
                out.push_back({qk, 1.0, -2.0 * k});
                out.push_back({rho * a * qk1, -1.0, 2.0 * k - 1.0});
                out.push_back({rho * b * qk1, -1.0, -(2.0 * k - 1.0)});
            }
            break;
    }
}

cplx ipow(cplx z, int n) {
    cplx r(1.0, 0.0);
    while (n > 0) {
        if (n & 1) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

double falling(int j, int m) {  // j!/(j-m)!
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= (j - i);
    return r;
}
double rising(int j, int p) {  // j(j+1)...(j+p-1)
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= (j + i);
    return r;
}
double binom_small(int n, int m) {
    double r = 1.0;
    for (int i = 1; i <= m; ++i) r = r * (n - m + i) / i;
    return r;
}

// n-th derivative of (z/s)^j R^{-j}, s = σi + cz.
cplx term_derivative(cplx z, const Term& t, int j, int n, double R) {
    const cplx s = cplx(0.0, t.sigma) + t.c * z;
    if (std::abs(s) <= kPoleTol) throw DomainError("basis: evaluation at a term pole");
    const cplx rr = z / s / R;
    if (n == 0) return ipow(rr, j);
    cplx acc(0.0, 0.0);
    const cplx sn = ipow(1.0 / s, n);
    for (int m = 0; m <= std::min(n, j); ++m) {
        const int pp = n - m;
        double fac = binom_small(n, m) * falling(j, m) * rising(j, pp);
        if (pp % 2) fac = -fac;
        if (fac == 0.0) continue;
        acc += fac * std::pow(t.c, pp) * ipow(rr, j - m) * std::pow(R, -m);
    }
    return acc * sn;
}

// Envelope of the n-th derivative of a term in group k+1 and later; valid (non-increasing
// in k) when the real part of σw + c moves away from zero as |c| grows.
bool term_envelope(cplx w, double absz, const Term& t, int j, int n, double R, double& env) {
    const double re = t.sigma * w.real() + t.c;
    if (t.c == 0.0 || re * t.c <= 0.0) return false;
    const double d = std::abs(t.sigma * w + t.c);
    const double aw = std::abs(w);
    double poly = 0.0;
    for (int m = 0; m <= std::min(n, j); ++m) {
        const int pp = n - m;
        poly += binom_small(n, m) * falling(j, m) * rising(j, pp) * std::pow(1.0 + aw / d, pp);
    }
    env = std::abs(t.coef) * std::pow(d * R, -j) * std::pow(absz, -n) * poly;
    return true;
}

SeriesValue<cplx> eval_core(const BasisId& id, cplx z, const MediumParams& p, int n, double R,
                            const TruncationPolicy& trunc, std::optional<Phase> hint) {
    check_id(id, p);
    if (n < 0 || n > 3) throw ConfigError("derivative order must be in [0, 3]");
    const double absz = std::abs(z);
    if (absz <= kPoleTol) throw DomainError("basis: evaluation at the tangency point");
    const Phase ph = resolve_phase(Point::from(z), hint);
    const cplx w = cplx(0.0, 1.0) / z;
    const double q = ratio_of(id, p);
    const bool fixed = trunc.mode == TruncationPolicy::Mode::FixedK;
    const int kmax = std::max(0, trunc.k_max);

    SeriesValue<cplx> out;
    std::vector<Term> terms;
    cplx sum(0.0, 0.0);
    double tail = std::numeric_limits<double>::infinity();
    int k = 0;
    for (;; ++k) {
        group_terms(id, p, ph, k, terms);
        for (const Term& t : terms)
            if (t.coef != 0.0) sum += t.coef * term_derivative(z, t, id.j, n, R);
        // bound on groups k+1, k+2, ...
        group_terms(id, p, ph, k + 1, terms);
        double B = 0.0;
        bool ok = true;
        for (const Term& t : terms) {
            if (t.coef == 0.0) continue;
            double e = 0.0;
            if (!term_envelope(w, absz, t, id.j, n, R, e)) {
                ok = false;
                break;
            }
            B += e;
        }
        tail = ok ? B / (1.0 - q) : std::numeric_limits<double>::infinity();
        if (fixed) {
            if (k >= kmax) break;
        } else {
            if (tail <= trunc.tail_tol) break;
            if (k >= kmax) break;
        }
    }
    out.value = sum;
    out.tail_bound = tail;
    out.terms_used = k + 1;
    return out;
}

template <class T>
SeriesValue<T> with(const SeriesValue<cplx>& s, T v) {
    return {v, s.tail_bound, s.terms_used};
}

}  // namespace

SeriesValue<cplx> eval_psi(const BasisId& id, cplx z, const MediumParams& params,
                           const TruncationPolicy& trunc, std::optional<Phase> hint) {
    return eval_core(id, z, params, 0, 1.0, trunc, hint);
}

SeriesValue<cplx> eval_psi_scaled_derivative(const BasisId& id, cplx z, const MediumParams& params,
                                             int n, const TruncationPolicy& trunc,
                                             std::optional<Phase> hint) {
    return eval_core(id, z, params, n, params.R0, trunc, hint);
}

SeriesValue<double> eval_u(const BasisId& id, Point x, const MediumParams& params,
                           const TruncationPolicy& trunc, std::optional<Phase> hint) {
    auto s = eval_core(id, x.z(), params, 0, params.R0, trunc, hint);
    return with(s, id.parity == Parity::Even ? s.value.real() : s.value.imag());
}

SeriesValue<Vec2> eval_u_gradient(const BasisId& id, Point x, const MediumParams& params,
                                  const TruncationPolicy& trunc, std::optional<Phase> hint) {
    auto s = eval_core(id, x.z(), params, 1, params.R0, trunc, hint);
    const cplx d = s.value;
    // ∇Re F = (Re F', -Im F'), ∇Im F = (Im F', Re F')
    Vec2 g = id.parity == Parity::Even ? Vec2{d.real(), -d.imag()} : Vec2{d.imag(), d.real()};
    return with(s, g);
}

SeriesValue<double> eval_u_partial(const BasisId& id, Point x, const MediumParams& params, int mx,
                                   int my, const TruncationPolicy& trunc, std::optional<Phase> hint) {
    if (mx < 0 || my < 0 || mx + my > 3) throw ConfigError("partial derivative order must be ≤ 3");
    auto s = eval_core(id, x.z(), params, mx + my, params.R0, trunc, hint);
    // ∂x^a ∂y^b F = i^b F^{(a+b)} for holomorphic F
    const cplx v = ipow(cplx(0.0, 1.0), my) * s.value;
    return with(s, id.parity == Parity::Even ? v.real() : v.imag());
}

namespace {

// Σ_{k≥1} r^k C (kR0)^{-p}, C = exp(logC); tail bound uses the geometric envelope.
SeriesValue<double> kseries(double r, int p, double logC, double R0, double tol, int kmax) {
    SeriesValue<double> out;
    if (r == 0.0) return out;
    const double ar = std::abs(r);
    double sum = 0.0;
    int k = 1;
    for (; k <= kmax; ++k) {
        const double term = std::pow(r, k) * std::exp(logC - p * std::log(k * R0));
        sum += term;
        const double next = std::pow(ar, k + 1) * std::exp(logC - p * std::log((k + 1) * R0));
        const double tail = next / (1.0 - ar);
        if (tail <= tol) {
            out.tail_bound = tail;
            break;
        }
        out.tail_bound = tail;
    }
    out.value = sum;
    out.terms_used = k;
    return out;
}

}  // namespace

CoeffVector trace_fourier(const BasisId& id, const MediumParams& params, int n_max,
                          const TruncationPolicy& trunc) {
    check_id(id, params);
    if (id.family != Family::Symmetric || id.parity != Parity::Even)
        return numerical_trace_fourier(id, params, 4096, n_max, trunc);
    if (!(params.R0 > 2.0)) throw ConfigError("closed-form trace requires R0 > 2");
    const double a = params.alpha();
    const double R0 = params.R0;
    const double tol = std::min(trunc.tail_tol, 1e-17);
    CoeffVector cv;
    cv.parity = Parity::Even;
    cv.entries.assign(n_max + 1, 0.0);
    const int j = id.j;
    if (j == 0) {
        cv.entries[0] = 1.0 / params.a0;
        return cv;
    }
    if (j % 2) {
        // u_{2J+1} = (-1)^J sin(2J+1)θ - 2 Σ_k Σ_l α^k C(2l+2J+1, 2J) (-1)^l sin(2l+1)θ/(kR0)^{2J+2l+2}
        const int J = (j - 1) / 2;
        for (int l = 0; 2 * l + 1 <= n_max; ++l) {
            auto s = kseries(a, 2 * J + 2 * l + 2, log_binom(2 * l + 2 * J + 1, 2 * J), R0, tol, 1000000);
            cv.entries[2 * l + 1] = (l == J ? 1.0 : 0.0) - 2.0 * s.value;
        }
    } else {
        // u_{2J} = (-1)^J cos 2Jθ + 2 Σ_k Σ_l (-α)^k C(2l+2J-1, 2J-1) (-1)^l cos 2lθ/(kR0)^{2l+2J}
        const int J = j / 2;
        for (int l = 0; 2 * l <= n_max; ++l) {
            auto s = kseries(-a, 2 * l + 2 * J, log_binom(2 * l + 2 * J - 1, 2 * J - 1), R0, tol, 1000000);
            cv.entries[2 * l] = (l == J ? 1.0 : 0.0) + 2.0 * s.value;
        }
    }
    return cv;
}

std::vector<double> analyze_trig(const std::vector<double>& samples, Parity parity, int n_max) {
    const int n = static_cast<int>(samples.size());
    if (n < 4 || (n & (n - 1)) != 0) throw ConfigError("trig analysis needs a power-of-two sample count");
    if (n_max >= n / 2) throw ConfigError("requested modes exceed the Nyquist limit");
    std::vector<double> in(samples);
    std::vector<fftw_complex> out(n / 2 + 1);
    {
        static std::mutex plan_mutex;  // FFTW planning is not thread-safe
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(plan_mutex);
            plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), FFTW_ESTIMATE);
        }
        fftw_execute(plan);
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
    std::vector<double> c(n_max + 1, 0.0);
    for (int m = 0; m <= n_max; ++m) {
        const double am = (m == 0 ? 1.0 : 2.0) * out[m][0] / n;  // cos coefficient
        const double bm = -2.0 * out[m][1] / n;                   // sin coefficient
        // (-i)^m e^{imθ} = e^{im(θ-π/2)}: project onto cos/sin of m(θ - π/2)
        const double cs = std::cos(m * kPi / 2.0), sn = std::sin(m * kPi / 2.0);
        // g ⊃ am cos mθ + bm sin mθ = A cos m(θ-π/2) + B sin m(θ-π/2)
        const double A = am * std::round(cs) + bm * std::round(sn);
        const double B = -am * std::round(sn) + bm * std::round(cs);
        c[m] = parity == Parity::Even ? A : (m == 0 ? 0.0 : B);
    }
    return c;
}

CoeffVector numerical_trace_fourier(const BasisId& id, const MediumParams& params, int n_quad,
                                    int n_max, const TruncationPolicy& trunc) {
    check_id(id, params);
    if (n_quad < 256 || (n_quad & (n_quad - 1)) != 0)
        throw ConfigError("n_quad must be a power of two ≥ 256");
    std::vector<double> g(n_quad);
    parallel_for(n_quad, [&](std::size_t i) {
        const double th = 2.0 * kPi * i / n_quad;
        g[i] = eval_u(id, {params.R0 * std::cos(th), params.R0 * std::sin(th)}, params, trunc).value;
    });
    CoeffVector cv;
    cv.parity = id.parity;
    cv.entries = analyze_trig(g, id.parity, n_max);
    return cv;
}

AuditReport derivative_bound_audit(Family family, Parity parity, int j_max, int mx, int my,
                                   const MediumParams& params,
                                   const std::vector<std::pair<Point, Phase>>& samples,
                                   const TruncationPolicy& trunc) {
    AuditReport rep;
    rep.mx = mx;
    rep.my = my;
    rep.ratios.assign(3, std::vector<double>(j_max + 1, 0.0));
    const int mm = mx + my;
    for (int j = 0; j <= j_max; ++j) {
        const BasisId id{family, parity, j};
        const double norm = std::pow(params.R0, j) / (mm == 0 ? 1.0 : std::pow(double(j + mm), mm));
        for (const auto& [pt, ph] : samples) {
            const double v = eval_u_partial(id, pt, params, mx, my, trunc, ph).value;
            double& r = rep.ratios[static_cast<int>(ph)][j];
            r = std::max(r, std::abs(v) * norm);
        }
    }
    rep.pass = true;
    for (auto& seq : rep.ratios) {
        std::vector<double> s(seq);
        std::sort(s.begin(), s.end());
        const double med = s[s.size() / 2];
        const double mx_ = s.back();
        rep.median.push_back(med);
        rep.max.push_back(mx_);
        if (!(mx_ <= 10.0 * med) && mx_ > 0.0) rep.pass = false;
    }
    return rep;
}

std::vector<std::pair<Point, Phase>> audit_samples(int n_radial, int n_angular, double band) {
    std::vector<std::pair<Point, Phase>> out;
    for (int i = 1; i <= n_radial; ++i) {
        const double r = double(i) / n_radial;
        for (int k = 0; k < n_angular; ++k) {
            const double th = 2.0 * kPi * (k + 0.5) / n_angular;
            Point p{r * std::cos(th), r * std::sin(th)};
            Region reg = classify(p, {}, band);
            if (reg.on_interface()) continue;
            const Phase ph = reg.tag == RegionTag::Inclusion1   ? Phase::Inclusion1
                             : reg.tag == RegionTag::Inclusion2 ? Phase::Inclusion2
                                                                : Phase::Matrix;
            out.push_back({p, ph});
        }
    }
    return out;
}

}  // namespace cusp
