// cusp — batch front-end: every capability as a subcommand, JSON configs in, CSV/JSON out.
#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cusp/dirichlet.hpp"
#include "cusp/fdoracle.hpp"
#include "cusp/verify.hpp"

using namespace cusp;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kFail = 1, kConfig = 2, kConvergence = 3, kDomain = 4 };

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// ---- output ---------------------------------------------------------------------------

struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file.open(path);
            if (!file) throw ConfigError("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& operator*() { return *os; }
};

struct Header {
    std::string command;
    std::string config_hash;
    std::vector<std::pair<std::string, std::string>> lines;
    void add(const std::string& k, const std::string& v) { lines.emplace_back(k, v); }
    void add(const std::string& k, double v) { lines.emplace_back(k, num(v)); }
    void write(std::ostream& os) const {
        os << "# cusp " << command << "\n# config_hash: " << config_hash << "\n";
        for (const auto& [k, v] : lines) os << "# " << k << ": " << v << "\n";
    }
};

const char* tag_name(RegionTag t) { return to_string(t); }

std::optional<Phase> interface_hint(RegionTag t) {
    if (t == RegionTag::Interface1) return Phase::Inclusion1;
    if (t == RegionTag::Interface2) return Phase::Inclusion2;
    return std::nullopt;
}

// n×n cell centres of [-L, L]², optionally clipped to the open disk of radius L
std::vector<Point> square_grid(int n, double L, bool clip) {
    std::vector<Point> pts;
    const double h = 2.0 * L / n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Point p{-L + (i + 0.5) * h, -L + (j + 0.5) * h};
            if (!clip || std::hypot(p.x1, p.x2) < L) pts.push_back(p);
        }
    return pts;
}

Vec2 parse_vec2(const std::vector<double>& v, const char* what) {
    if (v.empty()) return {0.0, 0.0};
    if (v.size() != 2) throw ConfigError(std::string(what) + " needs exactly two components");
    return {v[0], v[1]};
}

// "k:c" terms of a cosine/sine series
std::vector<std::pair<int, double>> parse_modes(const std::vector<std::string>& items, const char* what) {
    std::vector<std::pair<int, double>> out;
    for (const auto& s : items) {
        const auto c = s.find(':');
        try {
            if (c == std::string::npos) throw std::invalid_argument(s);
            std::size_t used = 0;
            const int k = std::stoi(s.substr(0, c), &used);
            if (used != c || k < 0) throw std::invalid_argument(s);
            out.emplace_back(k, std::stod(s.substr(c + 1)));
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": expected k:coefficient, got '" + s + "'");
        }
    }
    return out;
}

DiskGeometry parse_geometry(const std::string& s) {
    DiskGeometry g;
    if (s.empty()) return g;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto e = item.find('=');
        if (e == std::string::npos) throw ConfigError("--geometry: expected r1=..,r2=..");
        const std::string k = item.substr(0, e);
        double v = 0.0;
        try {
            v = std::stod(item.substr(e + 1));
        } catch (const std::exception&) {
            throw ConfigError("--geometry: bad number in '" + item + "'");
        }
        if (k == "r1") g.r1 = v;
        else if (k == "r2") g.r2 = v;
        else throw ConfigError("--geometry: unknown key '" + k + "'");
    }
    g.validate();
    return g;
}

// ---- shared option groups -------------------------------------------------------------

struct Medium {
    double a0 = 1.0, b0 = 1.0, R0 = 3.0;
    std::optional<double> alpha, b0_set;
    void add(CLI::App* sc) {
        sc->add_option("--a0", a0, "coefficient in the upper disk")->capture_default_str();
        sc->add_option("--b0", b0_set, "coefficient in the lower disk (default: a0)");
        sc->add_option("--alpha", alpha, "symmetric contrast (sets a0 = b0)");
        sc->add_option("--R0", R0, "outer radius")->capture_default_str();
    }
    MediumParams params() const {
        MediumParams p;
        if (alpha) {
            if (std::abs(*alpha) >= 1.0) throw ConfigError("--alpha must satisfy |alpha| < 1");
            p = MediumParams::from_alpha(*alpha, R0);
        } else {
            p = {a0, b0_set.value_or(a0), R0};
        }
        p.validate();
        return p;
    }
};

struct Data {
    double g_const = 0.0;
    std::vector<std::string> g_cos, g_sin;
    std::vector<double> f1, f2, fm;
    void add(CLI::App* sc) {
        sc->add_option("--g-const", g_const, "constant term of the boundary data")->capture_default_str();
        sc->add_option("--g-cos", g_cos, "cosine modes k:c of g(θ)");
        sc->add_option("--g-sin", g_sin, "sine modes k:c of g(θ)");
        add_field(sc);
    }
    void add_field(CLI::App* sc) {
        sc->add_option("--f1", f1, "constant field in the upper disk (two components)")->expected(2);
        sc->add_option("--f2", f2, "constant field in the lower disk")->expected(2);
        sc->add_option("--fm", fm, "constant field in the matrix")->expected(2);
    }
    std::function<double(double)> boundary() const {
        auto c = parse_modes(g_cos, "--g-cos");
        auto s = parse_modes(g_sin, "--g-sin");
        const double k0 = g_const;
        return [c, s, k0](double t) {
            double v = k0;
            for (auto [k, a] : c) v += a * std::cos(k * t);
            for (auto [k, a] : s) v += a * std::sin(k * t);
            return v;
        };
    }
    PiecewiseField field() const {
        PiecewiseField f;
        auto set = [&](Phase ph, const std::vector<double>& v, const char* what) {
            if (v.empty()) return;
            f = merge(f, PiecewiseField::constant(ph, parse_vec2(v, what)), ph);
        };
        set(Phase::Inclusion1, f1, "--f1");
        set(Phase::Inclusion2, f2, "--f2");
        set(Phase::Matrix, fm, "--fm");
        return f;
    }
    bool has_field() const { return !(f1.empty() && f2.empty() && fm.empty()); }
    static PiecewiseField merge(PiecewiseField a, const PiecewiseField& b, Phase ph) {
        a.comp[static_cast<int>(ph)] = b.comp[static_cast<int>(ph)];
        return a;
    }
};

// ---- JSON config ----------------------------------------------------------------------

// Values from the JSON file fill every option not given on the command line.
void apply_config(CLI::App* sc, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config: " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, val] : cfg.items()) {
        if (key == "config") throw ConfigError("config files cannot nest 'config'");
        CLI::Option* opt = sc->get_option_no_throw("--" + key);
        if (!opt) throw ConfigError("unknown config key '" + key + "' for " + sc->get_name());
        if (opt->count() > 0) continue;  // command line wins
        std::vector<std::string> tokens;
        auto token = [&](const json& v) {
            if (v.is_string()) tokens.push_back(v.get<std::string>());
            else if (v.is_boolean()) tokens.push_back(v.get<bool>() ? "true" : "false");
            else if (v.is_number_integer()) tokens.push_back(std::to_string(v.get<long long>()));
            else if (v.is_number()) tokens.push_back(num(v.get<double>()));
            else throw ConfigError("config key '" + key + "': unsupported value type");
        };
        if (val.is_array())
            for (const auto& v : val) token(v);
        else
            token(val);
        if (opt->get_type_size() == 0) {  // flag
            if (tokens.size() != 1 || (tokens[0] != "true" && tokens[0] != "false"))
                throw ConfigError("config key '" + key + "' is a flag and needs a boolean");
            if (tokens[0] == "false") continue;
        }
        try {
            for (const auto& t : tokens) opt->add_result(t);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

// Effective option set minus where it came from or where output goes.
std::string config_hash(const CLI::App* sc) {
    std::istringstream in(sc->config_to_str(true, false));
    std::string key = sc->get_name() + "\n", line;
    while (std::getline(in, line))
        if (line.rfind("config=", 0) != 0 && line.rfind("out=", 0) != 0 && line.rfind("report=", 0) != 0)
            key += line + "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, fnv1a(key));
    return buf;
}

// ---- subcommands ----------------------------------------------------------------------

struct Common {
    std::string config, out, report;
    void add(CLI::App* sc, bool with_report) {
        sc->add_option("--config", config, "JSON file with option values (keys = long option names)");
        sc->add_option("--out", out, "CSV output path (default: stdout)");
        if (with_report) sc->add_option("--report", report, "JSON/CSV report path (default: stdout)");
    }
};

void emit_json(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open report file: " + path);
    f << j.dump(2) << "\n";
}

std::string trunc_str(const TruncationPolicy& t) {
    return t.mode == TruncationPolicy::Mode::FixedK ? "fixed k=" + std::to_string(t.k_max)
                                                    : "tail_tol=" + num(t.tail_tol);
}

// basis ----------------------------------------------------------------------------------
struct BasisCmd {
    Common io;
    Medium med;
    std::string family = "sym", parity = "even", trace_out;
    int j = 0, grid = 0, n = 256, trace_n = -1, trace_quad = 4096;
    bool circle = false;
    double tail_tol = 1e-14;

    void add(CLI::App* sc) {
        io.add(sc, false);
        med.add(sc);
        sc->add_option("--family", family, "sym | gen")->check(CLI::IsMember({"sym", "gen"}))->capture_default_str();
        sc->add_option("--parity", parity, "even | odd")->check(CLI::IsMember({"even", "odd"}))->capture_default_str();
        sc->add_option("--j", j, "basis index")->check(CLI::NonNegativeNumber)->capture_default_str();
        sc->add_flag("--circle", circle, "evaluate on |x| = R0");
        sc->add_option("--n", n, "samples on the circle")->check(CLI::PositiveNumber)->capture_default_str();
        sc->add_option("--grid", grid, "evaluate on an n×n grid of B_R0")->check(CLI::NonNegativeNumber);
        sc->add_option("--trace-out", trace_out, "trace-coefficient CSV path");
        sc->add_option("--trace-n", trace_n, "largest trace coefficient index (default: j + 10)");
        sc->add_option("--trace-quad", trace_quad, "quadrature nodes for the numerical trace")->capture_default_str();
        sc->add_option("--tail-tol", tail_tol, "series tail target")->capture_default_str();
    }

    int run(CLI::App* sc) {
        const MediumParams P = med.params();
        const BasisId id{family == "sym" ? Family::Symmetric : Family::General,
                         parity == "even" ? Parity::Even : Parity::Odd, j};
        if (id.family == Family::Symmetric && P.a0 != P.b0) throw ConfigError("symmetric family needs a0 = b0");
        const auto tr = TruncationPolicy::target(tail_tol);
        if (!circle && grid == 0) circle = true;
        Header hd{"basis", config_hash(sc), {}};
        hd.add("truncation", trunc_str(tr));
        hd.add("basis", std::string(family) + " " + parity + " j=" + std::to_string(j));
        hd.add("params", "a0=" + num(P.a0) + " b0=" + num(P.b0) + " R0=" + num(P.R0));

        std::vector<Point> pts;
        std::vector<double> thetas;
        if (circle) {
            for (int i = 0; i < n; ++i) {
                const double t = 2.0 * kPi * i / n;
                thetas.push_back(t);
                pts.push_back({P.R0 * std::cos(t), P.R0 * std::sin(t)});
            }
        } else {
            pts = square_grid(grid, P.R0, true);
        }
        std::vector<SeriesValue<double>> vals(pts.size());
        std::vector<RegionTag> tags(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            tags[i] = classify(pts[i]).tag;
            vals[i] = eval_u(id, pts[i], P, tr, interface_hint(tags[i]));
        });
        double tail = 0.0;
        for (const auto& v : vals) tail = std::max(tail, v.tail_bound);
        hd.add("achieved_tail_bound", tail);

        Output out(io.out);
        hd.write(*out);
        *out << (circle ? "theta,x1,x2,region,u\n" : "x1,x2,region,u\n");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (circle) *out << num(thetas[i]) << ",";
            *out << num(pts[i].x1) << "," << num(pts[i].x2) << "," << tag_name(tags[i]) << "," << num(vals[i].value)
                 << "\n";
        }

        if (!trace_out.empty()) {
            const int nmax = trace_n >= 0 ? trace_n : j + 10;
            const auto numer = numerical_trace_fourier(id, P, trace_quad, nmax, tr);
            const bool closed = id.family == Family::Symmetric && id.parity == Parity::Even;
            CoeffVector cf;
            if (closed) cf = trace_fourier(id, P, nmax, tr);
            Output t(trace_out);
            Header th = hd;
            th.add("trace_quadrature", std::to_string(trace_quad));
            th.write(*t);
            *t << (closed ? "l,closed_form,quadrature\n" : "l,quadrature\n");
            for (int l = 0; l <= nmax; ++l) {
                *t << l << ",";
                if (closed) *t << num(cf.entries[l]) << ",";
                *t << num(numer.entries[l]) << "\n";
            }
        }
        return kOk;
    }
};

// matrix ---------------------------------------------------------------------------------
struct MatrixCmd {
    Common io;
    Medium med;
    std::string family = "sym", parity = "even";
    int N = 100, quad = 4096;

    void add(CLI::App* sc) {
        io.add(sc, true);
        med.add(sc);
        sc->add_option("--family", family, "sym | gen")->check(CLI::IsMember({"sym", "gen"}))->capture_default_str();
        sc->add_option("--parity", parity, "even | odd")->check(CLI::IsMember({"even", "odd"}))->capture_default_str();
        sc->add_option("--N", N, "truncation order")->check(CLI::NonNegativeNumber)->capture_default_str();
        sc->add_option("--quad", quad, "quadrature nodes for numerically built columns")->capture_default_str();
    }

    int run(CLI::App* sc) {
        const MediumParams P = med.params();
        if (P.R0 <= 2.0) throw ConfigError("R0 must exceed 2");
        const bool closed = family == "sym" && parity == "even";
        if (family == "sym" && P.a0 != P.b0) throw ConfigError("symmetric family needs a0 = b0");
        const TruncatedMatrix M =
            closed ? build_truncated(N, P.alpha(), P.R0)
                   : build_numerical(N, P, family == "sym" ? Family::Symmetric : Family::General,
                                     parity == "even" ? Parity::Even : Parity::Odd, quad);
        Header hd{"matrix", config_hash(sc), {}};
        hd.add("build", closed ? "closed form" : "quadrature n=" + std::to_string(quad));
        hd.add("N", std::to_string(N));
        hd.add("params", "a0=" + num(P.a0) + " b0=" + num(P.b0) + " R0=" + num(P.R0));
        if (closed) hd.add("block_tail_bound", block_tail_bound(N + 1, P.alpha(), P.R0));

        Output out(io.out);
        hd.write(*out);
        *out << "l,j,M\n";
        for (int l = 0; l <= N; ++l)
            for (int jj = 0; jj <= N; ++jj) *out << l << "," << jj << "," << num(M.M(l, jj)) << "\n";

        // dominance report: one row per column
        Output rep(io.report.empty() ? std::string("-") : io.report);
        if (io.report.empty()) *rep << "\n";
        Header rh = hd;
        rh.add("min_gap", M.min_gap());
        rh.write(*rep);
        *rep << (closed ? "j,diag,offdiag_sum,gap,column_abs_sum,is_bound,dominant\n"
                        : "j,diag,offdiag_sum,gap,dominant\n");
        for (int jj = 1; jj <= N; ++jj) {
            double off = 0.0;
            for (int l = 1; l <= N; ++l)
                if (l != jj) off += std::abs(M.M(l, jj));
            *rep << jj << "," << num(M.M(jj, jj)) << "," << num(off) << "," << num(M.gap[jj]) << ",";
            if (closed) {
                const auto cs = column_abs_sum(jj, P.alpha(), P.R0);
                *rep << num(cs.value.value) << "," << (cs.is_bound ? 1 : 0) << ",";
            }
            *rep << (M.gap[jj] > 0.0 ? 1 : 0) << "\n";
        }
        return kOk;
    }
};

// green ----------------------------------------------------------------------------------
struct GreenCmd {
    Common io;
    Medium med;
    std::vector<double> y{0.3, 1.2};
    std::string geometry = "disk", norm = "paper", y_phase;
    int grid = 32;
    double extent = 3.0, tail_tol = 1e-12;
    bool regular = false, gradient = false;

    void add(CLI::App* sc) {
        io.add(sc, false);
        med.add(sc);
        sc->add_option("--y", y, "source point (two components)")->expected(2)->capture_default_str();
        sc->add_option("--y-phase", y_phase, "phase of a source on an interface")
            ->check(CLI::IsMember({"inclusion1", "inclusion2", "matrix"}));
        sc->add_option("--geometry", geometry, "disk | strip")->check(CLI::IsMember({"disk", "strip"}))->capture_default_str();
        sc->add_option("--norm", norm, "paper | physical")->check(CLI::IsMember({"paper", "physical"}))->capture_default_str();
        sc->add_flag("--regular", regular, "add the disk-centre correction (disk geometry)");
        sc->add_flag("--gradient", gradient, "also write ∇_x G");
        sc->add_option("--grid", grid, "n×n grid of [-extent, extent]²")->check(CLI::PositiveNumber)->capture_default_str();
        sc->add_option("--extent", extent, "half-width of the grid")->capture_default_str();
        sc->add_option("--tail-tol", tail_tol, "series tail target")->capture_default_str();
    }

    static std::optional<Phase> phase_of(const std::string& s) {
        if (s == "inclusion1") return Phase::Inclusion1;
        if (s == "inclusion2") return Phase::Inclusion2;
        if (s == "matrix") return Phase::Matrix;
        return std::nullopt;
    }

    int run(CLI::App* sc) {
        TransmissionKernel K;
        K.params = med.params();
        K.geometry = geometry == "disk" ? KernelGeometry::Disk : KernelGeometry::Strip;
        K.norm = norm == "paper" ? Normalization::Paper : Normalization::Physical;
        K.trunc = TruncationPolicy::target(tail_tol);
        if (regular && K.geometry != KernelGeometry::Disk) throw ConfigError("--regular applies to the disk kernel");
        const Point ys{y[0], y[1]};
        const KernelPoint base{std::nullopt, phase_of(y_phase)};
        const auto pts = square_grid(grid, extent, false);
        std::vector<SeriesValue<double>> v(pts.size());
        std::vector<SeriesValue<Vec2>> d(pts.size());
        std::vector<RegionTag> tags(pts.size());
        std::vector<char> skip(pts.size(), 0);
        parallel_for(pts.size(), [&](std::size_t i) {
            const Region r = K.geometry == KernelGeometry::Disk ? classify(pts[i]) : classify_strip(pts[i]);
            tags[i] = r.tag;
            if (std::hypot(pts[i].x1 - ys.x1, pts[i].x2 - ys.x2) < 1e-12) {
                skip[i] = 1;
                return;
            }
            KernelPoint kp = base;
            kp.x_hint = interface_hint(r.tag);
            v[i] = regular ? eval_g_regular(pts[i], ys, K, kp) : eval_kernel(pts[i], ys, K, kp);
            if (gradient) d[i] = eval_kernel_gradient_x(pts[i], ys, K, kp);
        });
        double tail = 0.0;
        for (const auto& s : v) tail = std::max(tail, s.tail_bound);
        Header hd{"green", config_hash(sc), {}};
        hd.add("kernel", geometry + " " + norm + (regular ? " regular" : ""));
        hd.add("source", num(ys.x1) + "," + num(ys.x2));
        hd.add("truncation", trunc_str(K.trunc));
        hd.add("achieved_tail_bound", tail);
        Output out(io.out);
        hd.write(*out);
        *out << (gradient ? "x1,x2,region,G,dG_dx1,dG_dx2,tail_bound\n" : "x1,x2,region,G,tail_bound\n");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (skip[i]) continue;
            *out << num(pts[i].x1) << "," << num(pts[i].x2) << "," << tag_name(tags[i]) << "," << num(v[i].value);
            if (gradient) *out << "," << num(d[i].value[0]) << "," << num(d[i].value[1]);
            *out << "," << num(v[i].tail_bound) << "\n";
        }
        return kOk;
    }
};

// potential ------------------------------------------------------------------------------
struct PotentialCmd {
    Common io;
    Medium med;
    Data data;
    std::string route = "image";
    int grid = 16, n_ang = 16, n_rad = 16;

    void add(CLI::App* sc) {
        io.add(sc, false);
        med.add(sc);
        data.add_field(sc);
        sc->add_option("--route", route, "direct | image")->check(CLI::IsMember({"direct", "image"}))->capture_default_str();
        sc->add_option("--grid", grid, "n×n grid of B_R0")->check(CLI::PositiveNumber)->capture_default_str();
        sc->add_option("--n-ang", n_ang, "angular Gauss nodes per panel")->capture_default_str();
        sc->add_option("--n-rad", n_rad, "radial Gauss nodes per interval")->capture_default_str();
    }

    int run(CLI::App* sc) {
        const MediumParams P = med.params();
        VolumeProblem prob;
        prob.f = data.field();
        prob.route = route == "direct" ? PotentialRoute::Direct : PotentialRoute::ImageSeries;
        TransmissionKernel K;
        K.params = P;
        K.norm = Normalization::Physical;
        QuadSpec q;
        q.n_ang = n_ang;
        q.n_rad = n_rad;
        q.support_radius = P.R0;
        const auto pts = square_grid(grid, P.R0, true);
        std::vector<SeriesValue<double>> v(pts.size());
        std::vector<RegionTag> tags(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            tags[i] = classify(pts[i]).tag;
            v[i] = volume_solution(pts[i], prob, K, q, interface_hint(tags[i]));
        });
        double tail = 0.0;
        for (const auto& s : v) tail = std::max(tail, s.tail_bound);
        Header hd{"potential", config_hash(sc), {}};
        hd.add("route", route);
        hd.add("quadrature", "n_ang=" + std::to_string(n_ang) + " n_rad=" + std::to_string(n_rad));
        hd.add("truncation", trunc_str(K.trunc));
        hd.add("achieved_tail_bound", tail);
        Output out(io.out);
        hd.write(*out);
        *out << "x1,x2,region,u\n";
        for (std::size_t i = 0; i < pts.size(); ++i)
            *out << num(pts[i].x1) << "," << num(pts[i].x2) << "," << tag_name(tags[i]) << "," << num(v[i].value)
                 << "\n";
        return kOk;
    }
};

// solve / oracle -------------------------------------------------------------------------
struct ProblemArgs {
    Medium med;
    Data data;
    std::string geometry;
    void add(CLI::App* sc) {
        med.add(sc);
        data.add(sc);
        sc->add_option("--geometry", geometry, "unequal radii, e.g. r1=1,r2=2 (default: canonical pair)");
    }
    FdProblem fd() const {
        FdProblem p;
        p.geo = parse_geometry(geometry);
        p.params = med.params();
        p.boundary = data.boundary();
        if (data.has_field()) p.f = data.field();
        return p;
    }
};

struct FdRun {
    DiscreteSolution ds;
    double seconds = 0.0;
};

FdRun run_fd(const FdProblem& p, int h_inv, double tol) {
    const auto t0 = std::chrono::steady_clock::now();
    FdRun r;
    r.ds = solve_system(assemble(p, 1.0 / h_inv), tol);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

struct SolveCmd {
    Common io;
    ProblemArgs prob;
    int grid = 32, n_trace = 4096, n_cap = 256, oracle_h = 128, oracle_stride = 2;
    double tol = 1e-10;
    bool oracle = false, allow_unconverged = false;

    void add(CLI::App* sc) {
        io.add(sc, true);
        prob.add(sc);
        sc->add_option("--grid", grid, "n×n output grid of B_R0 (0: none)")->check(CLI::NonNegativeNumber)->capture_default_str();
        sc->add_option("--tol", tol, "boundary re-synthesis tolerance")->capture_default_str();
        sc->add_option("--n-cap", n_cap, "largest truncation tried")->capture_default_str();
        sc->add_option("--n-trace", n_trace, "θ-grid for the boundary correction")->capture_default_str();
        sc->add_flag("--allow-unconverged", allow_unconverged, "keep an unconverged result (flagged)");
        sc->add_flag("--oracle", oracle, "compare against the finite-difference oracle");
        sc->add_option("--oracle-h", oracle_h, "oracle grid: h = 1/n")->check(CLI::PositiveNumber)->capture_default_str();
        sc->add_option("--oracle-stride", oracle_stride, "comparison cell stride")->check(CLI::PositiveNumber)->capture_default_str();
    }

    int run(CLI::App* sc) {
        const FdProblem fp = prob.fd();
        const MediumParams& P = fp.params;
        const bool unequal = fp.geo.r1 != 1.0 || fp.geo.r2 != 1.0;
        NonhomogeneousOptions o;
        o.solve.tol = tol;
        o.solve.n_cap = n_cap;
        o.solve.allow_unconverged = allow_unconverged;
        o.n_trace = n_trace;
        const FourierBoundary g = FourierBoundary::from_function(fp.boundary, P.R0);
        const PiecewiseField f = prob.data.has_field() ? fp.f : PiecewiseField::zero();

        std::function<FieldSample(Point, std::optional<Phase>)> eval;
        json rep;
        std::optional<SeriesSolution> sol;
        std::optional<ComposedSolution> comp;
        if (unequal) {
            comp = unequal_radius_solve(f, g, fp.geo, P, o);
            eval = [&](Point x, std::optional<Phase> h) { return comp->evaluate(x, h); };
            rep["N"] = comp->N;
            rep["boundary_residual"] = comp->boundary_residual;
            rep["fundamental_solutions"] = comp->sources.size();
            rep["transmission"] = transmission_report(fp.geo, P, eval);
        } else {
            sol = prob.data.has_field() ? solve_nonhomogeneous(f, g, P, o) : solve_homogeneous(g, P, o.solve);
            eval = [&](Point x, std::optional<Phase> h) { return evaluate_point(*sol, x, h); };
            rep["N"] = static_cast<int>(std::max(sol->even.size(), sol->odd.size())) - 1;
            rep["boundary_residual"] = sol->boundary_residual;
            rep["converged"] = sol->converged;
            rep["ls_norm"] = sol->ls_norm;
        }
        rep["geometry"] = {{"r1", fp.geo.r1}, {"r2", fp.geo.r2}};
        rep["params"] = {{"a0", P.a0}, {"b0", P.b0}, {"R0", P.R0}};
        rep["tolerance"] = tol;

        if (oracle) {
            const FdRun fr = run_fd(fp, oracle_h, 1e-10);
            CompareSpec cs;
            cs.stride = oracle_stride;
            const auto cells = comparison_cells(fr.ds.grid, fp.geo, cs);
            std::vector<double> v(cells.size());
            parallel_for(cells.size(), [&](std::size_t i) { v[i] = eval(fr.ds.grid.centers[cells[i]], {}).u; });
            const auto er = compare(v, fr.ds, cells, NormKind::L2);
            rep["oracle"] = {{"h", 1.0 / oracle_h},       {"relative_L2", er.relative}, {"absolute_L2", er.absolute},
                             {"cells", er.count},        {"fd_iterations", fr.ds.iterations},
                             {"fd_residual", fr.ds.residual}, {"fd_seconds", fr.seconds}};
        }

        Header hd{"solve", config_hash(sc), {}};
        hd.add("truncation_N", std::to_string(rep["N"].get<int>()));
        hd.add("tolerance", tol);
        hd.add("achieved_boundary_residual", rep["boundary_residual"].get<double>());
        if (grid > 0) {
            const auto pts = square_grid(grid, P.R0, true);
            std::vector<FieldSample> fs(pts.size());
            parallel_for(pts.size(), [&](std::size_t i) {
                fs[i] = eval(pts[i], interface_hint(classify(pts[i], fp.geo).tag));
            });
            Output out(io.out);
            hd.write(*out);
            *out << "x1,x2,region,u,du_dx1,du_dx2\n";
            for (const auto& s : fs)
                *out << num(s.x.x1) << "," << num(s.x.x2) << "," << tag_name(s.tag) << "," << num(s.u) << ","
                     << num(s.grad[0]) << "," << num(s.grad[1]) << "\n";
        }
        rep["config_hash"] = hd.config_hash;
        emit_json(rep, io.report);
        return kOk;
    }

    // value and flux jumps at 64 points on each original interface circle
    static json transmission_report(const DiskGeometry& geo, const MediumParams& P,
                                    const std::function<FieldSample(Point, std::optional<Phase>)>& eval) {
        json out = json::array();
        const double rs[2] = {geo.r1, geo.r2};
        const double cy[2] = {geo.r1, -geo.r2};
        const Phase in[2] = {Phase::Inclusion1, Phase::Inclusion2};
        for (int c = 0; c < 2; ++c) {
            double dv = 0.0, df = 0.0, scale = 0.0;
            for (int i = 0; i < 64; ++i) {
                const double t = 2.0 * kPi * (i + 0.5) / 64;
                const Point x{rs[c] * std::cos(t), cy[c] + rs[c] * std::sin(t)};
                if (std::hypot(x.x1, x.x2) < 1e-3 || std::hypot(x.x1, x.x2) >= P.R0) continue;
                const auto ui = eval(x, in[c]);
                const auto um = eval(x, Phase::Matrix);
                const double nx = std::cos(t), ny = std::sin(t);
                const double fi = P.coefficient(in[c]) * (ui.grad[0] * nx + ui.grad[1] * ny);
                const double fm = um.grad[0] * nx + um.grad[1] * ny;
                dv = std::max(dv, std::abs(ui.u - um.u));
                df = std::max(df, std::abs(fi - fm));
                scale = std::max({scale, std::abs(um.u), std::abs(fm)});
            }
            out.push_back({{"circle", c + 1}, {"value_jump", dv}, {"flux_jump", df}, {"scale", scale}});
        }
        return out;
    }
};

struct OracleCmd {
    Common io;
    ProblemArgs prob;
    int h_inv = 128;
    double tol = 1e-10;

    void add(CLI::App* sc) {
        io.add(sc, true);
        prob.add(sc);
        sc->add_option("--h-inv", h_inv, "grid spacing h = 1/n")->check(CLI::PositiveNumber)->capture_default_str();
        sc->add_option("--tol", tol, "relative residual target")->capture_default_str();
    }

    int run(CLI::App* sc) {
        const FdProblem fp = prob.fd();
        const FdRun fr = run_fd(fp, h_inv, tol);
        Header hd{"oracle", config_hash(sc), {}};
        hd.add("h", 1.0 / h_inv);
        hd.add("tolerance", tol);
        hd.add("achieved_residual", fr.ds.residual);
        hd.add("iterations", std::to_string(fr.ds.iterations));
        std::ostringstream hs;
        hd.write(hs);
        std::string header = hs.str();
        if (io.out.empty() || io.out == "-") {
            const std::string tmp = "/dev/stdout";
            write_grid_csv(tmp, fr.ds, header);
        } else {
            write_grid_csv(io.out, fr.ds, header);
        }
        if (!io.report.empty())
            emit_json({{"h", 1.0 / h_inv},
                       {"unknowns", fr.ds.grid.size()},
                       {"iterations", fr.ds.iterations},
                       {"residual", fr.ds.residual},
                       {"seconds", fr.seconds},
                       {"config_hash", hd.config_hash}},
                      io.report);
        return kOk;
    }
};

// verify ---------------------------------------------------------------------------------
struct VerifyCmd {
    Common io;
    std::vector<std::string> checks;
    bool zero_contrast = false, corrupt_sign = false;
    int n_trace = 512;

    void add(CLI::App* sc) {
        sc->add_option("--config", io.config, "JSON file with option values");
        sc->add_option("--report", io.report, "JSON report path (default: stdout)");
        sc->add_option("--checks", checks, "checks to run (default: all)");
        sc->add_flag("--zero-contrast", zero_contrast, "run the battery with a0 = b0 = 1");
        sc->add_flag("--corrupt-sign", corrupt_sign, "negative control: flip the contrast on the inclusion side");
        sc->add_option("--n-trace", n_trace, "boundary-correction θ-grid for the nonhomogeneous oracle case")
            ->capture_default_str();
    }

    int run(CLI::App* sc) {
        VerifyConfig cfg;
        cfg.corrupt_sign = corrupt_sign;
        cfg.n_trace = n_trace;
        if (zero_contrast) {
            cfg.media = {{1.0, 1.0}};
            cfg.alpha = 0.0;
            cfg.beta = 0.0;
            cfg.dominance_alphas = {0.0};
            cfg.oracle_a0 = cfg.oracle_b0 = 1.0;
        }
        std::vector<CheckResult> res;
        for (const auto& name : checks.empty() ? battery_names() : checks) {
            res.push_back(run_check(name, cfg));
            const auto& r = res.back();
            std::fprintf(stderr, "%-18s %s  %s (%.1f s)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                         r.detail.c_str(), r.seconds);
        }
        json j;
        j["config_hash"] = config_hash(sc);
        j["checks"] = json::array();
        bool all = true;
        std::vector<std::string> failed;
        for (const auto& r : res) {
            json m = json::object();
            for (const auto& [k, v] : r.metrics) m[k] = v;
            j["checks"].push_back({{"name", r.name},
                                   {"criterion", r.criterion},
                                   {"pass", r.pass},
                                   {"measured", r.measured},
                                   {"threshold", r.threshold},
                                   {"seconds", r.seconds},
                                   {"budget", r.budget},
                                   {"metrics", m},
                                   {"detail", r.detail}});
            all = all && r.pass;
            if (!r.pass) failed.push_back(r.name);
        }
        j["pass"] = all;
        j["failed"] = failed;
        emit_json(j, io.report);
        return all ? kOk : kFail;
    }
};

// map ------------------------------------------------------------------------------------
struct MapCmd {
    Common io;
    double r1 = 1.0, r2 = 2.0, R0 = 3.0;
    std::vector<double> points;

    void add(CLI::App* sc) {
        sc->add_option("--config", io.config, "JSON file with option values");
        sc->add_option("--report", io.report, "JSON report path (default: stdout)");
        sc->add_option("--r1", r1, "upper disk radius")->capture_default_str();
        sc->add_option("--r2", r2, "lower disk radius")->capture_default_str();
        sc->add_option("--R0", R0, "outer radius (the pole is kept outside B_R0)")->capture_default_str();
        sc->add_option("--point", points, "points to map, x1 x2 pairs");
    }

    int run(CLI::App* sc) {
        const DiskGeometry geo{r1, r2};
        geo.validate();
        if (points.size() % 2) throw ConfigError("--point takes x1 x2 pairs");
        const MobiusMap m = equal_radius_map(geo, R0);
        auto c2j = [](cplx z) { return json::array({z.real(), z.imag()}); };
        json j;
        j["config_hash"] = config_hash(sc);
        j["affine"] = m.affine;
        if (m.affine) {
            j["scale"] = m.scale;
        } else {
            j["q_rhs"] = m.q_rhs;
            j["roots"] = m.roots;
            j["root_used"] = m.root_t;
            j["pole"] = c2j(m.pole);
            j["mu"] = c2j(m.mu);
            j["shift"] = c2j(m.shift);
            j["image_radius1"] = m.image_radius1;
            j["image_radius2"] = m.image_radius2;
        }
        const Circle outer = m.image({cplx(0.0, 0.0), R0});
        j["outer_image"] = {{"center", c2j(outer.c)}, {"radius", outer.r}};
        json pts = json::array();
        for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
            const cplx z(points[i], points[i + 1]);
            pts.push_back({{"x", c2j(z)}, {"F", c2j(m.forward(z))}, {"dF", c2j(m.deriv(z))}});
        }
        j["points"] = pts;
        emit_json(j, io.report);
        return kOk;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit solutions, basis matrices and Green's functions for two tangent disks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "cusp 1.0");

    BasisCmd basis;
    MatrixCmd matrix;
    GreenCmd green;
    PotentialCmd potential;
    SolveCmd solve;
    OracleCmd oracle;
    VerifyCmd verify;
    MapCmd map;

    struct Entry {
        CLI::App* sc;
        std::string* config;
        std::function<int(CLI::App*)> run;
    };
    std::vector<Entry> entries;
    auto reg = [&](const char* name, const char* help, auto& cmd) {
        CLI::App* sc = app.add_subcommand(name, help);
        cmd.add(sc);
        entries.push_back({sc, &cmd.io.config, [&cmd](CLI::App* s) { return cmd.run(s); }});
    };
    reg("basis", "evaluate u_j / v_j on a circle or grid; trace coefficients", basis);
    reg("matrix", "truncated expansion matrix and per-column dominance report", matrix);
    reg("green", "transmission Green's function on a grid", green);
    reg("potential", "volume potential of a piecewise-constant field", potential);
    reg("solve", "Dirichlet solve; field CSV and residual report (optionally vs FD)", solve);
    reg("oracle", "finite-difference oracle; grid dump CSV", oracle);
    reg("verify", "run the named verification battery; exit 0 iff all pass", verify);
    reg("map", "Möbius normalization for unequal radii", map);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }
    try {
        for (auto& e : entries) {
            if (!e.sc->parsed()) continue;
            apply_config(e.sc, *e.config);
            return e.run(e.sc);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfig;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "convergence failure: %s (achieved %.3e)\n", e.what(), e.achieved);
        return kConvergence;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return kDomain;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFail;
    }
    return kFail;
}
