#include "cusp/dirichlet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace cusp {

namespace {

bool pow2(std::size_t n) { return n >= 256 && (n & (n - 1)) == 0; }

double synth(const std::vector<double>& c, Parity parity, double theta) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (c[j] != 0.0) s += c[j] * trig_basis(parity, static_cast<int>(j), theta);
    return s;
}

// drop the negligible tail so truncation choices follow the data (band-limited inputs stay short)
// (scale: largest coefficient over both parity parts; FFT round-off sits near 1e-16·scale)
void trim(std::vector<double>& c, double scale) {
    const double floor = 1e-14 * scale;
    for (double& v : c)
        if (std::abs(v) <= floor) v = 0.0;
    std::size_t n = c.size();
    while (n > 1 && c[n - 1] == 0.0) --n;
    c.resize(n);
}

double max_abs(const std::vector<double>& c) {
    double mx = 0.0;
    for (double v : c) mx = std::max(mx, std::abs(v));
    return mx;
}

int last_significant(const std::vector<double>& c) {
    for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j)
        if (c[j] != 0.0) return j;
    return -1;
}

double max_abs_diff(const Eigen::VectorXd& a, const std::vector<double>& b) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a(i) - b[i]));
    return r;
}

// Boundary samples of u_j (or v_j) on the n-point θ-grid of |x| = R0.
Eigen::VectorXd column_samples(const BasisId& id, const MediumParams& p, int n, const TruncationPolicy& trunc) {
    Eigen::VectorXd col(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        const double th = 2.0 * kPi * static_cast<double>(i) / n;
        col(static_cast<Eigen::Index>(i)) = eval_u(id, {p.R0 * std::cos(th), p.R0 * std::sin(th)}, p, trunc).value;
    });
    return col;
}

struct PartResult {
    std::vector<double> gamma;
    double residual = 0.0;
    Eigen::VectorXd trace;  // Σ γ_j (trace of u_j) on the grid
};

// Expansion of one parity part. The symmetric even part uses the closed-form matrix; all
// other cases build columns from boundary samples and grow N until the re-synthesized
// trace matches the data.
PartResult expand_part(const std::vector<double>& gc, Parity parity, Family family, const MediumParams& p,
                       const SolveOptions& opt) {
    PartResult out;
    const int n = opt.n_theta;
    std::vector<double> target(n);
    for (int i = 0; i < n; ++i) target[i] = synth(gc, parity, 2.0 * kPi * i / n);
    const int last = last_significant(gc);
    if (last < 0) {
        out.gamma.assign(1, 0.0);
        out.trace = Eigen::VectorXd::Zero(n);
        return out;
    }
    const double accept = 10.0 * opt.tol;
    std::vector<Eigen::VectorXd> cols;  // cached samples of u_j, j = 0..
    auto trace_of = [&](const std::vector<double>& gamma) {
        Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
        for (std::size_t j = 0; j < gamma.size(); ++j) {
            if (gamma[j] == 0.0) continue;
            while (cols.size() <= j)
                cols.push_back(column_samples({family, parity, static_cast<int>(cols.size())}, p, n, opt.trunc));
            t += gamma[j] * cols[j];
        }
        return t;
    };

    if (family == Family::Symmetric && parity == Parity::Even) {
        CoeffVector g{gc, Parity::Even, opt.s};
        auto rep = expand_boundary(g, 0, p, std::min(opt.tol, 1e-12));
        out.gamma = rep.a.entries;
        out.trace = trace_of(out.gamma);
        out.residual = max_abs_diff(out.trace, target);
        if (out.residual <= accept) return out;
        // the closed-form truncation was not enough (e.g. coarse tol); fall through to the sampled build
    }

    const int j0 = parity == Parity::Odd ? 1 : 0;
    double best = std::numeric_limits<double>::infinity();
    PartResult best_out;
    for (int N = std::max(16, last + 8); ; N = std::min(2 * N, opt.n_cap)) {
        if (2 * N + 2 > n) throw ConfigError("dirichlet: θ-grid too coarse for the requested truncation");
        while (static_cast<int>(cols.size()) <= N)
            cols.push_back(column_samples({family, parity, static_cast<int>(cols.size())}, p, n, opt.trunc));
        const int m = N + 1 - j0;
        Eigen::MatrixXd M(m, m);
        for (int j = j0; j <= N; ++j) {
            std::vector<double> s(cols[j].data(), cols[j].data() + n);
            const auto c = analyze_trig(s, parity, N);
            for (int l = j0; l <= N; ++l) M(l - j0, j - j0) = c[l];
        }
        Eigen::VectorXd rhs(m);
        for (int l = j0; l <= N; ++l) rhs(l - j0) = l < static_cast<int>(gc.size()) ? gc[l] : 0.0;
        const Eigen::VectorXd a = M.partialPivLu().solve(rhs);
        PartResult cur;
        cur.gamma.assign(N + 1, 0.0);
        for (int j = j0; j <= N; ++j) cur.gamma[j] = a(j - j0);
        cur.trace = trace_of(cur.gamma);
        cur.residual = max_abs_diff(cur.trace, target);
        if (cur.residual < best) {
            best = cur.residual;
            best_out = cur;
        }
        if (cur.residual <= accept || N >= opt.n_cap) break;
    }
    return best_out;
}

double ls_norm(const std::vector<double>& a, double s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * a[j] * std::pow(1.0 + j, 2.0 * s);
    return acc;
}

}  // namespace

double FourierBoundary::operator()(double theta) const {
    return synth(even, Parity::Even, theta) + synth(odd, Parity::Odd, theta);
}

std::vector<double> FourierBoundary::samples(int n) const {
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = (*this)(2.0 * kPi * i / n);
    return s;
}

FourierBoundary FourierBoundary::from_function(const std::function<double(double)>& g, double R0, int n) {
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = g(2.0 * kPi * i / n);
    return analyze_boundary(s, R0);
}

FourierBoundary analyze_boundary(const std::vector<double>& samples, double R0) {
    const std::size_t n = samples.size();
    if (!pow2(n)) throw ConfigError("analyze_boundary: sample count must be a power of two ≥ 256");
    // x1 ↦ -x1 is θ ↦ π - θ, i.e. index i ↦ n/2 - i (mod n)
    std::vector<double> ge(n), go(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = samples[(n + n / 2 - i) % n];
        ge[i] = 0.5 * (samples[i] + r);
        go[i] = 0.5 * (samples[i] - r);
    }
    FourierBoundary fb;
    fb.R0 = R0;
    const int nmax = static_cast<int>(n / 2) - 1;
    fb.even = analyze_trig(ge, Parity::Even, nmax);
    fb.odd = analyze_trig(go, Parity::Odd, nmax);
    const double scale = std::max(max_abs(fb.even), max_abs(fb.odd));
    trim(fb.even, scale);
    trim(fb.odd, scale);
    return fb;
}

FourierBoundary analyze_boundary(const std::vector<double>& theta, const std::vector<double>& samples, double R0) {
    if (theta.size() != samples.size()) throw ConfigError("analyze_boundary: θ and sample counts differ");
    const std::size_t n = theta.size();
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(theta[i] - 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)) > 1e-12)
            throw ConfigError("analyze_boundary: θ-grid is not uniform from 0");
    return analyze_boundary(samples, R0);
}

SeriesSolution solve_homogeneous(const FourierBoundary& g, const MediumParams& params, const SolveOptions& opt) {
    params.validate();
    if (std::abs(g.R0 - params.R0) > 1e-14 * params.R0)
        throw ConfigError("solve_homogeneous: boundary data radius differs from R0");
    if (!pow2(static_cast<std::size_t>(opt.n_theta))) throw ConfigError("n_theta must be a power of two ≥ 256");
    if (params.a0 == params.b0 && !(params.R0 > 2.0))
        throw ConfigError("solve_homogeneous: symmetric case requires R0 > 2");
    SeriesSolution sol;
    sol.params = params;
    sol.family = params.a0 == params.b0 ? Family::Symmetric : Family::General;
    sol.trunc = opt.trunc;
    sol.s = opt.s;
    const PartResult ev = expand_part(g.even, Parity::Even, sol.family, params, opt);
    const PartResult od = expand_part(g.odd, Parity::Odd, sol.family, params, opt);
    sol.even = ev.gamma;
    sol.odd = od.gamma;
    sol.ls_norm = std::sqrt(ls_norm(sol.even, opt.s) + ls_norm(sol.odd, opt.s));
    // full re-synthesis against g (both parts)
    const auto gs = g.samples(opt.n_theta);
    sol.boundary_residual = max_abs_diff(ev.trace + od.trace, gs);
    sol.converged = sol.boundary_residual <= 10.0 * opt.tol;
    if (!sol.converged && !opt.allow_unconverged)
        throw ConvergenceError("solve_homogeneous: boundary re-synthesis residual exceeds 10·tol",
                               sol.boundary_residual);
    return sol;
}

double ParticularPart::value(Point x, std::optional<Phase> hint) const {
    return volume_solution(x, problem, kernel, quad, hint).value;
}

FieldSample evaluate_point(const SeriesSolution& sol, Point x, std::optional<Phase> hint, const EvalOptions& opt) {
    FieldSample fs;
    fs.x = x;
    const Region reg = classify(x);
    fs.tag = reg.tag;
    const Phase ph = resolve_phase(x, hint);
    for (int par = 0; par < 2; ++par) {
        const auto& g = par == 0 ? sol.even : sol.odd;
        const Parity parity = par == 0 ? Parity::Even : Parity::Odd;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (g[j] == 0.0) continue;
            const BasisId id{sol.family, parity, static_cast<int>(j)};
            if (opt.gradient) {
                const auto d = eval_u_gradient(id, x, sol.params, sol.trunc, ph);
                fs.grad[0] += g[j] * d.value[0];
                fs.grad[1] += g[j] * d.value[1];
                fs.tail_bound += std::abs(g[j]) * d.tail_bound;
            }
            const auto v = eval_u(id, x, sol.params, sol.trunc, ph);
            fs.u += g[j] * v.value;
            fs.tail_bound += std::abs(g[j]) * v.tail_bound;
        }
    }
    if (sol.particular) {
        const auto v = volume_solution(x, sol.particular->problem, sol.particular->kernel, sol.particular->quad, ph);
        fs.u += v.value;
        fs.tail_bound += v.tail_bound;
        if (opt.gradient) {
            const double h = opt.fd_step * std::max(1.0, std::hypot(x.x1, x.x2));
            for (int c = 0; c < 2; ++c) {
                Point a = x, b = x;
                (c == 0 ? a.x1 : a.x2) += h;
                (c == 0 ? b.x1 : b.x2) -= h;
                fs.grad[c] += (sol.particular->value(a, ph) - sol.particular->value(b, ph)) / (2.0 * h);
            }
        }
    }
    return fs;
}

std::vector<FieldSample> evaluate_solution(const SeriesSolution& sol, const std::vector<Point>& pts,
                                           const std::vector<std::optional<Phase>>& hints, const EvalOptions& opt) {
    if (!hints.empty() && hints.size() != pts.size()) throw ConfigError("evaluate_solution: hint count mismatch");
    std::vector<FieldSample> out(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        out[i] = evaluate_point(sol, pts[i], hints.empty() ? std::nullopt : hints[i], opt);
    });
    return out;
}

SeriesSolution solve_nonhomogeneous(const PiecewiseField& f, const FourierBoundary& g, const MediumParams& params,
                                    const NonhomogeneousOptions& opt) {
    params.validate();
    const bool none = f.empty(Phase::Inclusion1) && f.empty(Phase::Inclusion2) && f.empty(Phase::Matrix);
    if (none) return solve_homogeneous(g, params, opt.solve);
    if (!pow2(static_cast<std::size_t>(opt.n_trace))) throw ConfigError("n_trace must be a power of two ≥ 256");
    auto part = std::make_shared<ParticularPart>();
    part->problem.f = f;
    part->problem.route = opt.route;
    part->kernel.geometry = KernelGeometry::Disk;
    part->kernel.params = params;
    part->kernel.norm = Normalization::Physical;
    part->kernel.trunc = opt.solve.trunc;
    part->quad = opt.quad;
    part->quad.support_radius = params.R0;
    const int n = opt.n_trace;
    std::vector<double> h(n);
    const auto gs = g.samples(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        const double th = 2.0 * kPi * static_cast<double>(i) / n;
        h[i] = gs[i] - part->value({params.R0 * std::cos(th), params.R0 * std::sin(th)});
    });
    SolveOptions so = opt.solve;
    SeriesSolution sol = solve_homogeneous(analyze_boundary(h, params.R0), params, so);
    sol.particular = part;
    return sol;
}

// ---- unequal radii ---------------------------------------------------------------------

namespace {

// Transformed right-hand side in w = F(x): f'(w) = DF f(x) / |F'(x)|², zero outside F(B_R0).
PiecewiseField pull_field(const PiecewiseField& f, const MobiusMap& m, double R0) {
    PiecewiseField out;
    for (Phase ph : {Phase::Inclusion1, Phase::Inclusion2, Phase::Matrix}) {
        if (f.empty(ph)) continue;
        out.comp[static_cast<int>(ph)] = [f, m, R0, ph](Point w) -> Vec2 {
            const cplx x = m.inverse(w.z());
            if (std::abs(x) >= R0) return {0.0, 0.0};
            const cplx d = m.deriv(x);
            const Vec2 v = f(Point::from(x), ph);
            const cplx r = d * cplx(v[0], v[1]) / std::norm(d);
            return {r.real(), r.imag()};
        };
    }
    return out;
}

}  // namespace

ComposedSolution unequal_radius_solve(const PiecewiseField& f, const FourierBoundary& g, const DiskGeometry& geo,
                                      const MediumParams& params, const NonhomogeneousOptions& opt) {
    geo.validate();
    params.validate();
    ComposedSolution cs;
    cs.geo = geo;
    cs.params = params;
    cs.map = equal_radius_map(geo, params.R0);
    const MobiusMap& m = cs.map;
    const bool has_f = !(f.empty(Phase::Inclusion1) && f.empty(Phase::Inclusion2) && f.empty(Phase::Matrix));

    if (m.affine) {
        // F(x) = x/r maps |x| = R0 to the centred circle |w| = R0/r
        MediumParams cp = params;
        cp.R0 = params.R0 / m.scale;
        FourierBoundary gc = g;
        gc.R0 = cp.R0;
        NonhomogeneousOptions o = opt;
        cs.canonical = has_f ? solve_nonhomogeneous(pull_field(f, m, params.R0), gc, cp, o)
                             : solve_homogeneous(gc, cp, opt.solve);
        cs.boundary_residual = cs.canonical.boundary_residual;
        cs.N = static_cast<int>(std::max(cs.canonical.even.size(), cs.canonical.odd.size())) - 1;
        return cs;
    }

    // canonical problem: basis scaled by the radius of the centred disk containing F(B_R0)
    const Circle img = m.image({cplx(0.0, 0.0), params.R0});
    MediumParams cp = params;
    cp.R0 = std::abs(img.c) + img.r;
    SeriesSolution& sol = cs.canonical;
    sol.params = cp;
    sol.family = params.a0 == params.b0 ? Family::Symmetric : Family::General;
    sol.trunc = opt.solve.trunc;
    sol.s = opt.solve.s;

    if (has_f) {
        auto part = std::make_shared<ParticularPart>();
        part->problem.f = pull_field(f, m, params.R0);
        part->problem.route = opt.route;
        part->kernel.params = cp;
        part->kernel.norm = Normalization::Physical;
        part->kernel.trunc = opt.solve.trunc;
        part->quad = opt.quad;
        part->quad.support_radius = cp.R0;
        sol.particular = part;
    }

    // Least-squares fit of g - ũ on the image of the outer circle. F(B_R0) is not centred,
    // so the cusp-centred basis alone cannot converge there (reflections of F(∞) reach the
    // cusp); transmission kernels with sources on the ring |x| = ρ R0 outside the domain
    // supply the missing far-field behaviour.
    cs.kernel.geometry = KernelGeometry::Disk;
    cs.kernel.params = cp;
    cs.kernel.norm = Normalization::Paper;
    cs.kernel.trunc = opt.solve.trunc;
    const double rho = std::min(1.5, 0.5 * (1.0 + (std::abs(m.pole) - 0.5) / params.R0));
    const double accept = 10.0 * opt.solve.tol;
    double best = std::numeric_limits<double>::infinity();
    int stalled = 0;  // consecutive doublings that gained less than 4×
    for (int N = 16;; N = std::min(2 * N, opt.solve.n_cap)) {
        // sources: matrix-phase points of the ring; their number tracks N
        std::vector<Point> src;
        const int K = 2 * N;
        for (int k = 0; k < K; ++k) {
            const double th = 2.0 * kPi * (k + 0.5) / K;
            const Point x{rho * params.R0 * std::cos(th), rho * params.R0 * std::sin(th)};
            if (classify(x, geo, 1e-3).tag != RegionTag::Matrix) continue;
            src.push_back(Point::from(m.forward(x.z())));
        }
        const int nb = 2 * N + 1;  // u_0..u_N, v_1..v_N
        const int ncol = nb + static_cast<int>(src.size());
        int M = 256;
        while (M < 4 * ncol) M *= 2;
        const int Mc = 2 * M;  // check grid: fit nodes plus midpoints
        std::vector<Point> w(Mc);
        std::vector<double> target(Mc);
        for (int i = 0; i < Mc; ++i) {
            const double th = 2.0 * kPi * i / Mc;
            w[i] = Point::from(m.forward(params.R0 * cplx(std::cos(th), std::sin(th))));
            target[i] = g(th);
        }
        if (sol.particular)
            parallel_for(static_cast<std::size_t>(Mc), [&](std::size_t i) { target[i] -= sol.particular->value(w[i]); });
        Eigen::MatrixXd A(Mc, ncol);
        parallel_for(static_cast<std::size_t>(ncol), [&](std::size_t c) {
            const int ci = static_cast<int>(c);
            for (int i = 0; i < Mc; ++i) {
                double v;
                if (ci < nb) {
                    const int j = ci <= N ? ci : ci - N;
                    const Parity par = ci <= N ? Parity::Even : Parity::Odd;
                    v = eval_u({sol.family, par, j}, w[i], cp, sol.trunc).value;
                } else {
                    v = eval_g(w[i], src[ci - nb], cs.kernel, {std::nullopt, Phase::Matrix}).value;
                }
                A(i, ci) = v;
            }
        });
        // column equilibration keeps the QR well scaled
        Eigen::VectorXd scale(ncol);
        for (int c = 0; c < ncol; ++c) {
            const double nrm = A.col(c).cwiseAbs().maxCoeff();
            scale(c) = nrm > 0.0 ? 1.0 / nrm : 1.0;
            A.col(c) *= scale(c);
        }
        Eigen::MatrixXd Af(M, ncol);
        Eigen::VectorXd bf(M);
        for (int i = 0; i < M; ++i) {
            Af.row(i) = A.row(2 * i);
            bf(i) = target[2 * i];
        }
        const Eigen::VectorXd x = Af.colPivHouseholderQr().solve(bf);
        const Eigen::VectorXd fit = A * x;
        const double res = max_abs_diff(fit, target);
        stalled = res > 0.25 * best ? stalled + 1 : 0;
        if (res < best) {
            best = res;
            const Eigen::VectorXd xs = x.cwiseProduct(scale);
            sol.even.assign(N + 1, 0.0);
            sol.odd.assign(N + 1, 0.0);
            for (int j = 0; j <= N; ++j) sol.even[j] = xs(j);
            for (int j = 1; j <= N; ++j) sol.odd[j] = xs(N + j);
            cs.sources = src;
            cs.weights.assign(xs.data() + nb, xs.data() + ncol);
            cs.N = N;
        }
        // a corner singularity on |x| = R0 (outer circle crossing an inclusion) shows up as stagnation
        if (res <= accept || N >= opt.solve.n_cap || stalled >= 2) break;
    }
    cs.boundary_residual = best;
    sol.boundary_residual = best;
    sol.ls_norm = std::sqrt(ls_norm(sol.even, sol.s) + ls_norm(sol.odd, sol.s));
    sol.converged = best <= accept;
    if (!sol.converged && !opt.solve.allow_unconverged)
        throw ConvergenceError("unequal_radius_solve: boundary fit residual exceeds 10·tol", best);
    return cs;
}

FieldSample ComposedSolution::evaluate(Point x, std::optional<Phase> hint) const {
    const Region reg = classify(x, geo);
    const Phase ph = resolve_phase(x, hint, geo);
    const cplx w = map.forward(x.z());
    FieldSample c = evaluate_point(canonical, Point::from(w), ph);
    for (std::size_t k = 0; k < sources.size(); ++k) {
        const KernelPoint kp{ph, Phase::Matrix};
        const auto v = eval_g(Point::from(w), sources[k], kernel, kp);
        const auto d = eval_g_gradient_x(Point::from(w), sources[k], kernel, kp);
        c.u += weights[k] * v.value;
        c.grad[0] += weights[k] * d.value[0];
        c.grad[1] += weights[k] * d.value[1];
        c.tail_bound += std::abs(weights[k]) * (v.tail_bound + d.tail_bound);
    }
    // ∇_x u = DFᵀ ∇_w v; with F' = d: ∂_x1 = Re(d)∂_w1 + Im(d)∂_w2, ∂_x2 = -Im(d)∂_w1 + Re(d)∂_w2
    const cplx d = map.deriv(x.z());
    FieldSample out = c;
    out.x = x;
    out.tag = reg.tag;
    out.grad = {d.real() * c.grad[0] + d.imag() * c.grad[1], -d.imag() * c.grad[0] + d.real() * c.grad[1]};
    out.tail_bound = c.tail_bound * std::max(1.0, std::abs(d));
    return out;
}

}  // namespace cusp
