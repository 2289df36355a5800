#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cusp/dirichlet.hpp"
#include "cusp/fdoracle.hpp"
#include "cusp/verify.hpp"

namespace py = pybind11;
using namespace cusp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point> points_from(const Array& a) {
    if (a.ndim() != 2 || a.shape(1) != 2) throw ConfigError("points must have shape (n, 2)");
    auto r = a.unchecked<2>();
    std::vector<Point> p(static_cast<std::size_t>(r.shape(0)));
    for (py::ssize_t i = 0; i < r.shape(0); ++i) p[i] = {r(i, 0), r(i, 1)};
    return p;
}

Family family_of(const std::string& s) {
    if (s == "sym") return Family::Symmetric;
    if (s == "gen") return Family::General;
    throw ConfigError("family must be 'sym' or 'gen'");
}

Parity parity_of(const std::string& s) {
    if (s == "even") return Parity::Even;
    if (s == "odd") return Parity::Odd;
    throw ConfigError("parity must be 'even' or 'odd'");
}

std::optional<Phase> phase_of(const std::optional<std::string>& s) {
    if (!s) return std::nullopt;
    if (*s == "inclusion1") return Phase::Inclusion1;
    if (*s == "inclusion2") return Phase::Inclusion2;
    if (*s == "matrix") return Phase::Matrix;
    throw ConfigError("phase must be 'inclusion1', 'inclusion2' or 'matrix'");
}

Array vec(const std::vector<double>& v) {
    Array a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

FourierBoundary boundary_from(const Array& samples, double R0) {
    if (samples.ndim() != 1) throw ConfigError("boundary samples must be one-dimensional");
    return analyze_boundary(std::vector<double>(samples.data(), samples.data() + samples.size()), R0);
}

py::dict evaluate(const std::function<FieldSample(Point, std::optional<Phase>)>& f, const Array& pts,
                  const std::optional<std::string>& hint) {
    const auto p = points_from(pts);
    const auto ph = phase_of(hint);
    std::vector<FieldSample> out(p.size());
    {
        py::gil_scoped_release nogil;
        parallel_for(p.size(), [&](std::size_t i) { out[i] = f(p[i], ph); });
    }
    Array u(static_cast<py::ssize_t>(p.size())), g({static_cast<py::ssize_t>(p.size()), py::ssize_t(2)});
    std::vector<std::string> tags(p.size());
    auto gm = g.mutable_unchecked<2>();
    for (std::size_t i = 0; i < p.size(); ++i) {
        u.mutable_data()[i] = out[i].u;
        gm(i, 0) = out[i].grad[0];
        gm(i, 1) = out[i].grad[1];
        tags[i] = to_string(out[i].tag);
    }
    py::dict d;
    d["u"] = u;
    d["grad"] = g;
    d["region"] = tags;
    return d;
}

}  // namespace

PYBIND11_MODULE(_cusp, m) {
    m.doc() = "Explicit transmission-problem solutions for two tangent disks";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<MediumParams>(m, "MediumParams")
        .def(py::init([](double a0, std::optional<double> b0, double R0) {
                 MediumParams p{a0, b0.value_or(a0), R0};
                 p.validate();
                 return p;
             }),
             py::arg("a0") = 1.0, py::arg("b0") = py::none(), py::arg("R0") = 3.0)
        .def_static("from_alpha", &MediumParams::from_alpha, py::arg("alpha"), py::arg("R0") = 3.0)
        .def_readwrite("a0", &MediumParams::a0)
        .def_readwrite("b0", &MediumParams::b0)
        .def_readwrite("R0", &MediumParams::R0)
        .def_property_readonly("alpha", &MediumParams::alpha)
        .def_property_readonly("beta", &MediumParams::beta)
        .def("__repr__", [](const MediumParams& p) {
            return "MediumParams(a0=" + std::to_string(p.a0) + ", b0=" + std::to_string(p.b0) +
                   ", R0=" + std::to_string(p.R0) + ")";
        });

    m.def("classify", [](double x1, double x2, double band) { return std::string(to_string(classify({x1, x2}, {}, band).tag)); },
          py::arg("x1"), py::arg("x2"), py::arg("band") = kDefaultBand);

    m.def(
        "eval_u",
        [](int j, const Array& pts, const MediumParams& P, const std::string& family, const std::string& parity,
           const std::optional<std::string>& hint, double tail_tol) {
            const BasisId id{family_of(family), parity_of(parity), j};
            const auto p = points_from(pts);
            const auto ph = phase_of(hint);
            const auto tr = TruncationPolicy::target(tail_tol);
            std::vector<double> v(p.size());
            {
                py::gil_scoped_release nogil;
                parallel_for(p.size(), [&](std::size_t i) { v[i] = eval_u(id, p[i], P, tr, ph).value; });
            }
            return vec(v);
        },
        py::arg("j"), py::arg("points"), py::arg("params"), py::arg("family") = "sym", py::arg("parity") = "even",
        py::arg("hint") = py::none(), py::arg("tail_tol") = 1e-12,
        "u_j (even parity) or v_j (odd parity) at points of shape (n, 2)");

    m.def(
        "trace_fourier",
        [](int j, const MediumParams& P, int n_max) {
            return vec(trace_fourier(BasisId{Family::Symmetric, Parity::Even, j}, P, n_max).entries);
        },
        py::arg("j"), py::arg("params"), py::arg("n_max"), "closed-form trace coefficients (symmetric, even)");

    m.def(
        "numerical_trace_fourier",
        [](int j, const MediumParams& P, int n_quad, int n_max, const std::string& family, const std::string& parity) {
            return vec(numerical_trace_fourier(BasisId{family_of(family), parity_of(parity), j}, P, n_quad, n_max).entries);
        },
        py::arg("j"), py::arg("params"), py::arg("n_quad") = 4096, py::arg("n_max") = 32, py::arg("family") = "sym",
        py::arg("parity") = "even");

    m.def(
        "build_truncated",
        [](int N, double alpha, double R0) {
            const TruncatedMatrix T = build_truncated(N, alpha, R0);
            py::dict d;
            d["M"] = py::array_t<double>({T.M.rows(), T.M.cols()}, {sizeof(double), sizeof(double) * T.M.rows()},
                                         T.M.data());
            d["gap"] = vec(T.gap);
            d["min_gap"] = T.min_gap();
            return d;
        },
        py::arg("N"), py::arg("alpha"), py::arg("R0") = 3.0, "truncated matrix M = id + B and column gaps");
    m.def("column_abs_sum", [](int j, double alpha, double R0) { return column_abs_sum(j, alpha, R0).value.value; },
          py::arg("j"), py::arg("alpha"), py::arg("R0") = 3.0);
    m.def("block_tail_bound", &block_tail_bound, py::arg("N"), py::arg("alpha"), py::arg("R0") = 3.0);
    m.def(
        "expand_boundary",
        [](const Array& g, const MediumParams& P, int N, double tol) {
            CoeffVector c{std::vector<double>(g.data(), g.data() + g.size()), Parity::Even, 0.0};
            const auto r = expand_boundary(c, N, P, tol);
            py::dict d;
            d["a"] = vec(r.a.entries);
            d["N"] = r.N;
            d["residual"] = r.residual;
            d["stability_ratio"] = r.stability_ratio;
            return d;
        },
        py::arg("g"), py::arg("params"), py::arg("N") = 0, py::arg("tol") = 1e-12);

    m.def(
        "green",
        [](const Array& pts, std::pair<double, double> y, const MediumParams& P, const std::string& geometry,
           const std::string& norm, bool regular) {
            TransmissionKernel K;
            K.params = P;
            if (geometry != "disk" && geometry != "strip") throw ConfigError("geometry must be 'disk' or 'strip'");
            if (norm != "paper" && norm != "physical") throw ConfigError("norm must be 'paper' or 'physical'");
            K.geometry = geometry == "disk" ? KernelGeometry::Disk : KernelGeometry::Strip;
            K.norm = norm == "paper" ? Normalization::Paper : Normalization::Physical;
            const auto p = points_from(pts);
            const Point ys{y.first, y.second};
            std::vector<double> v(p.size());
            {
                py::gil_scoped_release nogil;
                for (std::size_t i = 0; i < p.size(); ++i)
                    v[i] = regular ? eval_g_regular(p[i], ys, K).value : eval_kernel(p[i], ys, K).value;
            }
            return vec(v);
        },
        py::arg("points"), py::arg("y"), py::arg("params"), py::arg("geometry") = "disk", py::arg("norm") = "paper",
        py::arg("regular") = false);

    m.def(
        "equal_radius_map",
        [](double r1, double r2, double exclusion) {
            const MobiusMap mm = equal_radius_map(DiskGeometry{r1, r2}, exclusion);
            py::dict d;
            d["affine"] = mm.affine;
            d["roots"] = mm.roots;
            d["pole"] = mm.pole;
            d["image_radius1"] = mm.image_radius1;
            d["image_radius2"] = mm.image_radius2;
            d["forward"] = py::cpp_function([mm](std::complex<double> z) { return mm.forward(z); });
            return d;
        },
        py::arg("r1"), py::arg("r2"), py::arg("exclusion_radius") = 3.0);

    py::class_<SeriesSolution>(m, "SeriesSolution")
        .def_property_readonly("even", [](const SeriesSolution& s) { return vec(s.even); })
        .def_property_readonly("odd", [](const SeriesSolution& s) { return vec(s.odd); })
        .def_readonly("boundary_residual", &SeriesSolution::boundary_residual)
        .def_readonly("converged", &SeriesSolution::converged)
        .def_readonly("ls_norm", &SeriesSolution::ls_norm)
        .def(
            "evaluate",
            [](const SeriesSolution& s, const Array& pts, const std::optional<std::string>& hint) {
                return evaluate([&](Point x, std::optional<Phase> h) { return evaluate_point(s, x, h); }, pts, hint);
            },
            py::arg("points"), py::arg("hint") = py::none(), "values, gradients and region tags");

    m.def(
        "solve",
        [](const Array& samples, const MediumParams& P, double tol, std::optional<std::pair<double, double>> f1,
           std::optional<std::pair<double, double>> f2, int n_trace) {
            const FourierBoundary g = boundary_from(samples, P.R0);
            SolveOptions o;
            o.tol = tol;
            py::gil_scoped_release nogil;
            if (!f1 && !f2) return solve_homogeneous(g, P, o);
            PiecewiseField f;
            if (f1) f.comp[0] = [v = *f1](Point) { return Vec2{v.first, v.second}; };
            if (f2) f.comp[1] = [v = *f2](Point) { return Vec2{v.first, v.second}; };
            NonhomogeneousOptions no;
            no.solve = o;
            no.n_trace = n_trace;
            return solve_nonhomogeneous(f, g, P, no);
        },
        py::arg("boundary"), py::arg("params"), py::arg("tol") = 1e-10, py::arg("f1") = py::none(),
        py::arg("f2") = py::none(), py::arg("n_trace") = 4096,
        "Dirichlet solve on B_R0 with boundary samples g(2πi/n) and optional constant fields in the disks");

    m.def(
        "fd_solve",
        [](const Array& samples, const MediumParams& P, int h_inv, double tol) {
            const FourierBoundary g = boundary_from(samples, P.R0);
            FdProblem fp;
            fp.params = P;
            fp.boundary = [g](double t) { return g(t); };
            DiscreteSolution ds;
            {
                py::gil_scoped_release nogil;
                ds = solve_system(assemble(fp, 1.0 / h_inv), tol);
            }
            Array c({static_cast<py::ssize_t>(ds.grid.size()), py::ssize_t(2)});
            auto cm = c.mutable_unchecked<2>();
            for (std::size_t i = 0; i < ds.grid.size(); ++i) {
                cm(i, 0) = ds.grid.centers[i].x1;
                cm(i, 1) = ds.grid.centers[i].x2;
            }
            py::dict d;
            d["centers"] = c;
            d["u"] = vec(std::vector<double>(ds.u.data(), ds.u.data() + ds.u.size()));
            d["residual"] = ds.residual;
            d["iterations"] = ds.iterations;
            return d;
        },
        py::arg("boundary"), py::arg("params"), py::arg("h_inv") = 64, py::arg("tol") = 1e-10,
        "finite-difference oracle (homogeneous)");

    m.def("battery_names", &battery_names);
    m.def(
        "run_check",
        [](const std::string& name, bool corrupt_sign) {
            VerifyConfig cfg;
            cfg.corrupt_sign = corrupt_sign;
            CheckResult r;
            {
                py::gil_scoped_release nogil;
                r = run_check(name, cfg);
            }
            py::dict d;
            d["name"] = r.name;
            d["criterion"] = r.criterion;
            d["pass"] = r.pass;
            d["measured"] = r.measured;
            d["threshold"] = r.threshold;
            d["seconds"] = r.seconds;
            d["detail"] = r.detail;
            return d;
        },
        py::arg("name"), py::arg("corrupt_sign") = false);
}
