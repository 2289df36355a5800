#include "cusp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "cusp/dirichlet.hpp"
#include "cusp/fdoracle.hpp"

namespace cusp {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

// Samples on the two unit interface circles: (point, outward normal of the disk, inclusion phase).
struct InterfaceSample {
    Point x;
    Vec2 nu;
    Phase inside;
};

std::vector<InterfaceSample> interface_samples(int n) {
    std::vector<InterfaceSample> out;
    for (int c = 0; c < 2; ++c)
        for (int s = 0; s < n; ++s) {
            const double ph = 2.0 * kPi * (s + 0.5) / n;
            const double cy = c == 0 ? 1.0 : -1.0;
            out.push_back({{std::cos(ph), cy + std::sin(ph)}, {std::cos(ph), std::sin(ph)},
                           c == 0 ? Phase::Inclusion1 : Phase::Inclusion2});
        }
    return out;
}

double dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }

// ---- 1: transmission suite -------------------------------------------------------------

CheckResult check_transmission(const VerifyConfig& cfg) {
    CheckResult r;
    r.name = "transmission";
    r.criterion = 1;
    r.budget = 60.0;
    const auto samples = interface_samples(64);
    double worst = 0.0;
    std::string where;
    for (auto [a0, b0] : cfg.media) {
        const MediumParams P{a0, b0, cfg.R0};
        // negative control: inclusion side evaluated with the contrast sign flipped
        const MediumParams Pin = cfg.corrupt_sign ? MediumParams{1.0 / a0, 1.0 / b0, cfg.R0} : P;
        for (Family fam : {Family::Symmetric, Family::General}) {
            if (fam == Family::Symmetric && a0 != b0) continue;
            for (Parity par : {Parity::Even, Parity::Odd}) {
                std::vector<double> ratio(21, 0.0);
                parallel_for(21, [&](std::size_t j) {
                    const BasisId id{fam, par, static_cast<int>(j)};
                    double w = 0.0;
                    for (const auto& s : samples) {
                        const double ain = P.coefficient(s.inside);
                        const auto ui = eval_u(id, s.x, Pin, {}, s.inside);
                        const auto uo = eval_u(id, s.x, P, {}, Phase::Matrix);
                        const auto gi = eval_u_gradient(id, s.x, Pin, {}, s.inside);
                        const auto go = eval_u_gradient(id, s.x, P, {}, Phase::Matrix);
                        const double res_v = std::abs(ui.value - uo.value);
                        const double res_f = std::abs(ain * dot(gi.value, s.nu) - dot(go.value, s.nu));
                        const double tb_v = ui.tail_bound + uo.tail_bound;
                        const double tb_f = ain * gi.tail_bound + go.tail_bound;
                        w = std::max({w, res_v / std::max(1e-8, 2.0 * tb_v), res_f / std::max(1e-8, 2.0 * tb_f)});
                    }
                    ratio[j] = w;
                });
                for (int j = 0; j <= 20; ++j)
                    if (ratio[j] > worst) {
                        worst = ratio[j];
                        where = "a0=" + fmt(a0) + " b0=" + fmt(b0) + " " + to_string(fam) + "/" + to_string(par) +
                                " j=" + std::to_string(j);
                    }
            }
        }
    }
    r.measured = worst;
    r.threshold = 1.0;
    r.pass = worst <= 1.0;
    r.detail = "max residual/max(1e-8, 2·tail) = " + fmt(worst) + " at " + where;
    return r;
}

// ---- 2: column dominance ---------------------------------------------------------------

CheckResult check_dominance(const VerifyConfig& cfg) {
    CheckResult r;
    r.name = "dominance";
    r.criterion = 2;
    r.budget = 10.0;
    double worst_sum = 0.0, worst_agree = 0.0, worst_bound_excess = -1.0;
    const TruncationPolicy tp = TruncationPolicy::target(1e-17);
    for (double a : cfg.dominance_alphas)
        for (double R0 : cfg.dominance_R0) {
            std::vector<double> sums(201, 0.0), agree(201, 0.0), excess(201, -1.0);
            parallel_for(200, [&](std::size_t jj) {
                const int j = static_cast<int>(jj) + 1;
                const ColumnSum cs = column_abs_sum(j, a, R0, tp);
                // entrywise summation over rows l ≥ 1 of the same parity
                double abs_sum = 0.0, signed_sum = 0.0, peak = 0.0;
                for (int l = (j % 2) ? 1 : 2;; l += 2) {
                    const double e = b_entry(l, j, a, R0, tp).value;
                    abs_sum += std::abs(e);
                    signed_sum += e;
                    peak = std::max(peak, std::abs(e));
                    if (l > j && std::abs(e) <= 1e-18 * std::max(peak, 1e-300)) break;
                    if (l > 200000) break;
                }
                sums[j] = cs.value.value;
                agree[j] = std::abs(signed_sum - cs.signed_sum);
                if (!cs.is_bound) agree[j] = std::max(agree[j], std::abs(abs_sum - cs.value.value));
                excess[j] = abs_sum - cs.value.value;  // ≤ 0 when the closed form bounds the entrywise sum
            });
            for (int j = 1; j <= 200; ++j) {
                worst_sum = std::max(worst_sum, sums[j]);
                worst_agree = std::max(worst_agree, agree[j]);
                worst_bound_excess = std::max(worst_bound_excess, excess[j]);
            }
        }
    r.measured = worst_sum;
    r.threshold = 1.0;
    r.metrics = {{"max_column_sum", worst_sum}, {"closed_vs_entrywise", worst_agree},
                 {"bound_excess", worst_bound_excess}};
    r.pass = worst_sum < 1.0 && worst_agree <= 1e-10 && worst_bound_excess <= 1e-10;
    r.detail = "max column sum " + fmt(worst_sum) + ", closed-form vs entrywise " + fmt(worst_agree) +
               ", bound excess " + fmt(worst_bound_excess);
    return r;
}

// ---- 3: trace round trip ---------------------------------------------------------------

CheckResult check_trace(const VerifyConfig& cfg) {
    CheckResult r;
    r.name = "trace_roundtrip";
    r.criterion = 3;
    r.budget = 30.0;
    const MediumParams P = MediumParams::from_alpha(cfg.alpha, cfg.R0);
    std::vector<double> err(31, 0.0);
    const int n_max = 64;
    for (int j = 0; j <= 30; ++j) {
        const BasisId id{Family::Symmetric, Parity::Even, j};
        const auto a = trace_fourier(id, P, n_max);
        const auto b = numerical_trace_fourier(id, P, 4096, n_max);
        for (int l = 0; l <= n_max; ++l) err[j] = std::max(err[j], std::abs(a.entries[l] - b.entries[l]));
    }
    r.measured = *std::max_element(err.begin(), err.end());
    r.threshold = 1e-9;
    r.pass = r.measured <= r.threshold;
    r.detail = "max |closed form - 4096-point quadrature| over j ≤ 30, l ≤ 64: " + fmt(r.measured);
    return r;
}

// ---- 4: Schauder expansion -------------------------------------------------------------

CheckResult check_expansion(const VerifyConfig& cfg) {
    CheckResult r;
    r.name = "expansion";
    r.criterion = 4;
    r.budget = 10.0;
    const MediumParams P = MediumParams::from_alpha(cfg.alpha, cfg.R0);
    double unit_err = 0.0;
    for (int j = 0; j <= 10; ++j) {
        const auto g = trace_fourier({Family::Symmetric, Parity::Even, j}, P, 80);
        const auto rep = expand_boundary(g, 0, P, 1e-12);
        for (std::size_t l = 0; l < rep.a.entries.size(); ++l)
            unit_err = std::max(unit_err, std::abs(rep.a.entries[l] - (static_cast<int>(l) == j ? 1.0 : 0.0)));
    }
    // g = cos 2θ = -e_2
    CoeffVector g{{0.0, 0.0, -1.0}, Parity::Even, 0.0};
    const auto rep = expand_boundary(g, 0, P, 1e-12);
    const int n = 4096;
    std::vector<double> tr(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        const double th = 2.0 * kPi * static_cast<double>(i) / n;
        const Point x{P.R0 * std::cos(th), P.R0 * std::sin(th)};
        double s = 0.0;
        for (std::size_t j = 0; j < rep.a.entries.size(); ++j)
            if (rep.a.entries[j] != 0.0)
                s += rep.a.entries[j] * eval_u({Family::Symmetric, Parity::Even, static_cast<int>(j)}, x, P).value;
        tr[i] = std::abs(s - std::cos(2.0 * th));
    });
    const double resyn = *std::max_element(tr.begin(), tr.end());
    r.metrics = {{"unit_vector_error", unit_err}, {"resynthesis_error", resyn}, {"N", double(rep.N)}};
    r.measured = std::max(unit_err / 1e-9, resyn / 1e-8);
    r.threshold = 1.0;
    r.pass = unit_err <= 1e-9 && resyn <= 1e-8;
    r.detail = "unit-vector error " + fmt(unit_err) + " (≤1e-9), cos 2θ re-synthesis " + fmt(resyn) +
               " (≤1e-8) with auto N = " + std::to_string(rep.N);
    return r;
}

// ---- 5: Green's suite ------------------------------------------------------------------

CheckResult check_greens(const VerifyConfig& cfg) {
    CheckResult r;
    r.name = "greens";
    r.criterion = 5;
    r.budget = 120.0;
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    // zero-contrast collapse
    const TransmissionKernel K0{KernelGeometry::Disk, MediumParams{1.0, 1.0, cfg.R0}, TruncationPolicy::target(1e-12),
                                Normalization::Paper};
    double collapse = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Point x{U(rng), U(rng)}, y{U(rng), U(rng)};
        collapse = std::max(collapse, std::abs(eval_g(x, y, K0).value - std::log(std::hypot(x.x1 - y.x1, x.x2 - y.x2))));
    }
    // nine branches: three source regions × three evaluation regions, through both interfaces
    const auto samples = interface_samples(32);
    double branch = 0.0;
    const std::vector<Point> sources{{0.2, 1.3}, {-0.4, -0.8}, {0.3, -0.2}};  // 𝔅1, 𝔅2, matrix
    for (auto [a0, b0] : cfg.media) {
        const MediumParams P{a0, b0, cfg.R0};
        const MediumParams Pin = cfg.corrupt_sign ? MediumParams{1.0 / a0, 1.0 / b0, cfg.R0} : P;
        const TransmissionKernel K{KernelGeometry::Disk, P, TruncationPolicy::target(1e-10), Normalization::Paper};
        TransmissionKernel Kin = K;
        Kin.params = Pin;
        for (const Point& y : sources)
            for (const auto& s : samples) {
                const double ain = P.coefficient(s.inside);
                const auto vi = eval_g(s.x, y, Kin, {s.inside, {}});
                const auto vo = eval_g(s.x, y, K, {Phase::Matrix, {}});
                const auto gi = eval_g_gradient_x(s.x, y, Kin, {s.inside, {}});
                const auto go = eval_g_gradient_x(s.x, y, K, {Phase::Matrix, {}});
                const double rv = std::abs(vi.value - vo.value) / (2.0 * (vi.tail_bound + vo.tail_bound));
                const double rf = std::abs(ain * dot(gi.value, s.nu) - dot(go.value, s.nu)) /
                                  (2.0 * (ain * gi.tail_bound + go.tail_bound));
                branch = std::max({branch, rv, rf});
            }
    }
    // charge with ε-extrapolation (error is O(ε) from the O(1) smooth part)
    const MediumParams Pc{(1.0 + cfg.alpha) / (1.0 - cfg.alpha), (1.0 + cfg.beta) / (1.0 - cfg.beta), cfg.R0};
    const TransmissionKernel Kp{KernelGeometry::Disk, Pc, TruncationPolicy::target(1e-12), Normalization::Physical};
    double charge = 0.0;
    for (const Point& y : sources) {
        const double c1 = contour_charge(y, 1e-2, Kp), c2 = contour_charge(y, 5e-3, Kp);
        charge = std::max(charge, std::abs(2.0 * c2 - c1 - 1.0));
    }
    // strip ↔ disk correspondence at 100 random pairs
    double corr = 0.0;
    int n = 0;
    while (n < 100) {
        const Point x{U(rng), U(rng)}, y{U(rng), U(rng)};
        if (classify_strip(x, 1e-3).on_interface() || classify(y, {}, 1e-3).on_interface()) continue;
        if (std::hypot(y.x1, y.x2) < 1e-2) continue;
        corr = std::max(corr, correspondence_check(x, y, Pc).residual);
        ++n;
    }
    r.metrics = {{"zero_contrast", collapse}, {"branch_ratio", branch}, {"charge_error", charge},
                 {"correspondence", corr}};
    r.pass = collapse <= 1e-15 && branch <= 1.0 && charge <= 1e-3 && corr <= 1e-8;
    r.measured = std::max({collapse / 1e-15, branch, charge / 1e-3, corr / 1e-8});
    r.threshold = 1.0;
    r.detail = "collapse " + fmt(collapse) + ", branch residual/(2·tail) " + fmt(branch) + ", charge error " +
               fmt(charge) + ", correspondence " + fmt(corr);
    return r;
}

// ---- 6: solver vs FD oracle -------------------------------------------------------------

double oracle_g(double t) { return std::cos(2.0 * t) + 0.3 * std::sin(t); }

SeriesSolution oracle_solution(const VerifyConfig& cfg) {
    const MediumParams P{cfg.oracle_a0, cfg.oracle_b0, cfg.R0};
    return solve_homogeneous(FourierBoundary::from_function(oracle_g, cfg.R0), P);
}

PiecewiseField oracle_field() {
    PiecewiseField f;
    f.comp[static_cast<int>(Phase::Inclusion1)] = [](Point) { return Vec2{1.0, 0.5}; };
    f.comp[static_cast<int>(Phase::Inclusion2)] = [](Point) { return Vec2{-0.5, 1.0}; };
    return f;
}

ErrorReport compare_with(const SeriesSolution& sol, const DiscreteSolution& ds, const CompareSpec& cs) {
    const auto cells = comparison_cells(ds.grid, {}, cs);
    std::vector<Point> pts;
    pts.reserve(cells.size());
    for (auto c : cells) pts.push_back(ds.grid.centers[c]);
    EvalOptions eo;
    eo.gradient = false;
    const auto fs = evaluate_solution(sol, pts, {}, eo);
    std::vector<double> v(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) v[i] = fs[i].u;
    return compare(v, ds, cells, NormKind::L2);
}

CheckResult check_oracle(const VerifyConfig& cfg) {
    CheckResult r;
    r.name = "oracle";
    r.criterion = 6;
    r.budget = 300.0;
    const MediumParams P{cfg.oracle_a0, cfg.oracle_b0, cfg.R0};
    const SeriesSolution sol = oracle_solution(cfg);
    double e128 = 0.0, e256 = 0.0, enh = 0.0;
    for (double h : {1.0 / 128.0, 1.0 / 256.0}) {
        const FdProblem fp{{}, P, oracle_g, {}, {}};
        const auto ds = solve_system(assemble(fp, h));
        CompareSpec cs;
        cs.stride = h < 0.005 ? 4 : 2;  // every 1/64 in both runs
        const auto rep = compare_with(sol, ds, cs);
        (h > 0.005 ? e128 : e256) = rep.relative;
    }
    {
        NonhomogeneousOptions o;
        o.n_trace = cfg.n_trace;
        const PiecewiseField f = oracle_field();
        FourierBoundary g0;
        g0.even = {0.0};
        g0.odd = {0.0};
        g0.R0 = cfg.R0;
        const SeriesSolution nh = solve_nonhomogeneous(f, g0, P, o);
        const FdProblem fp{{}, P, [](double) { return 0.0; }, f, {}};
        const auto ds = solve_system(assemble(fp, 1.0 / 128.0));
        CompareSpec cs;
        cs.stride = cfg.nonhom_stride;
        enh = compare_with(nh, ds, cs).relative;
    }
    r.metrics = {{"relL2_h128", e128}, {"relL2_h256", e256}, {"relL2_nonhomogeneous_h128", enh}};
    r.pass = e128 <= 1e-2 && e256 < e128 && enh <= 2e-2;
    r.measured = e128;
    r.threshold = 1e-2;
    r.detail = "homogeneous rel L2 " + fmt(e128) + " (h=1/128), " + fmt(e256) + " (h=1/256); nonhomogeneous " +
               fmt(enh) + " (≤2e-2)";
    return r;
}

// ---- 7: cusp boundedness ---------------------------------------------------------------

CheckResult check_cusp(const VerifyConfig& cfg) {
    CheckResult r;
    r.name = "cusp";
    r.criterion = 7;
    r.budget = 10.0;
    const SeriesSolution sol = oracle_solution(cfg);
    struct Path {
        const char* name;
        Vec2 dir;
        Phase ph;
    };
    const Path paths[3] = {{"(0,+t)", {0.0, 1.0}, Phase::Inclusion1},
                           {"(0,-t)", {0.0, -1.0}, Phase::Inclusion2},
                           {"(t,0)", {1.0, 0.0}, Phase::Matrix}};
    double worst_ratio = 0.0;
    bool blowup = false;
    std::string detail;
    // approach sequence m = 1..20 (m = 0 gives the disk centres and (1, 0), not cusp approaches;
    // it is reported but not part of the ratio)
    for (const auto& p : paths) {
        std::vector<double> g;
        for (int m = 0; m <= 20; ++m) {
            const double t = std::ldexp(1.0, -m);
            const auto fs = evaluate_point(sol, {t * p.dir[0], t * p.dir[1]}, p.ph);
            g.push_back(std::hypot(fs.grad[0], fs.grad[1]));
        }
        const auto [mn, mx] = std::minmax_element(g.begin() + 1, g.end());
        const double ratio = *mx / std::max(*mn, 1e-300);
        worst_ratio = std::max(worst_ratio, ratio);
        // blow-up: increasing over the last ten steps without the increments decaying
        bool inc = true;
        for (int m = 11; m <= 20; ++m) inc = inc && g[m] > g[m - 1];
        const bool no_decay = inc && (g[20] - g[19]) >= 0.5 * (g[15] - g[14]);
        blowup = blowup || no_decay;
        detail += std::string(p.name) + ": |∇u| " + fmt(*mn) + ".." + fmt(*mx) + " (m=0: " + fmt(g[0]) +
                  ", m=20: " + fmt(g[20]) + "); ";
    }
    r.measured = worst_ratio;
    r.threshold = 10.0;
    r.pass = worst_ratio < 10.0 && !blowup;
    r.detail = detail + "max/min " + fmt(worst_ratio) + (blowup ? ", monotone growth detected" : "");
    return r;
}

// ---- 8: unequal radii ------------------------------------------------------------------

CheckResult check_unequal(const VerifyConfig& cfg) {
    CheckResult r;
    r.name = "unequal";
    r.criterion = 8;
    r.budget = 30.0;
    const DiskGeometry geo{1.0, 2.0};
    const MobiusMap m = equal_radius_map(geo, cfg.R0);
    const double t_expected = 4.0 + std::sqrt(15.0);
    const double root_err = m.roots.empty() ? 1.0 : std::abs(m.roots[0] - t_expected) / t_expected;
    const Circle c1 = m.image({cplx(0.0, geo.r1), geo.r1}), c2 = m.image({cplx(0.0, -geo.r2), geo.r2});
    const double radius_err = std::max({std::abs(m.image_radius1 - m.image_radius2) / m.image_radius1,
                                        std::abs(c1.r - 1.0), std::abs(c2.r - 1.0)});
    // harmonic case: pulled-back solve vs direct solve
    const MediumParams P{1.0, 1.0, cfg.R0};
    const FourierBoundary g = FourierBoundary::from_function(oracle_g, cfg.R0);
    const ComposedSolution cs = unequal_radius_solve({}, g, geo, P);
    const SeriesSolution direct = solve_homogeneous(g, P);
    double diff = 0.0;
    for (int i = 1; i <= 12; ++i)
        for (int k = 0; k < 24; ++k) {
            const double rr = cfg.R0 * 0.95 * i / 12.0, th = 2.0 * kPi * (k + 0.25) / 24.0;
            const Point x{rr * std::cos(th), rr * std::sin(th)};
            if (classify(x, geo, 1e-6).on_interface()) continue;
            diff = std::max(diff, std::abs(cs.evaluate(x).u - evaluate_point(direct, x, {}, {false}).u));
        }
    r.metrics = {{"root_error", root_err}, {"image_radius_error", radius_err}, {"harmonic_difference", diff}};
    r.pass = root_err <= 1e-12 && radius_err <= 1e-12 && diff <= 1e-8;
    r.measured = diff;
    r.threshold = 1e-8;
    r.detail = "root t = " + fmt(m.roots.empty() ? 0.0 : m.roots[0]) + " (rel err " + fmt(root_err) +
               "), image radii " + fmt(radius_err) + ", pulled-back harmonic vs direct " + fmt(diff);
    return r;
}

// ---- 9: derivative-bound trend ---------------------------------------------------------

CheckResult check_derivatives(const VerifyConfig& cfg) {
    CheckResult r;
    r.name = "derivative_bounds";
    r.criterion = 9;
    r.budget = 60.0;
    const MediumParams P = MediumParams::from_alpha(cfg.alpha, cfg.R0);
    const auto samples = audit_samples(8, 32, 1e-3);
    double worst = 0.0;
    bool pass = true;
    for (int mm = 0; mm <= 2; ++mm)
        for (int mx = 0; mx <= mm; ++mx) {
            const auto rep = derivative_bound_audit(Family::Symmetric, Parity::Even, 40, mx, mm - mx, P, samples);
            pass = pass && rep.pass;
            for (std::size_t ph = 0; ph < rep.max.size(); ++ph)
                if (rep.median[ph] > 0.0) worst = std::max(worst, rep.max[ph] / rep.median[ph]);
        }
    r.measured = worst;
    r.threshold = 10.0;
    r.pass = pass;
    r.detail = "max over (m, region) of max/median normalized ratio: " + fmt(worst);
    return r;
}

const std::map<std::string, std::function<CheckResult(const VerifyConfig&)>>& registry() {
    static const std::map<std::string, std::function<CheckResult(const VerifyConfig&)>> reg{
        {"transmission", check_transmission}, {"dominance", check_dominance},
        {"trace_roundtrip", check_trace},     {"expansion", check_expansion},
        {"greens", check_greens},             {"oracle", check_oracle},
        {"cusp", check_cusp},                 {"unequal", check_unequal},
        {"derivative_bounds", check_derivatives}};
    return reg;
}

}  // namespace

std::vector<std::string> battery_names() {
    return {"transmission", "dominance", "trace_roundtrip", "expansion", "greens",
            "oracle",       "cusp",      "unequal",         "derivative_bounds"};
}

CheckResult run_check(const std::string& name, const VerifyConfig& cfg) {
    const auto& reg = registry();
    const auto it = reg.find(name);
    if (it == reg.end()) throw ConfigError("unknown check: " + name);
    const auto t0 = Clock::now();
    CheckResult r;
    try {
        r = it->second(cfg);
    } catch (const ConvergenceError& e) {
        r.name = name;
        r.pass = false;
        r.detail = std::string("convergence failure: ") + e.what() + " (achieved " + fmt(e.achieved) + ")";
    } catch (const DomainError& e) {
        r.name = name;
        r.pass = false;
        r.detail = std::string("domain error: ") + e.what();
    }
    const auto names = battery_names();
    r.criterion = static_cast<int>(std::find(names.begin(), names.end(), name) - names.begin()) + 1;
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (r.budget > 0.0 && r.seconds >= r.budget) {
        r.pass = false;
        r.detail += " [runtime " + fmt(r.seconds) + " s exceeds budget]";
    }
    return r;
}

std::vector<CheckResult> run_battery(const std::vector<std::string>& names, const VerifyConfig& cfg) {
    std::vector<CheckResult> out;
    for (const auto& n : names.empty() ? battery_names() : names) out.push_back(run_check(n, cfg));
    return out;
}

}  // namespace cusp
