// Python bindings for the core operations: grids, transforms, bilinear
// application, wavelet analysis, symbol norms, and scaling sweeps. Values
// cross the boundary as numpy complex arrays shaped by the grid.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <vector>

#include "bfm/bumps.hpp"
#include "bfm/counterexamples.hpp"
#include "bfm/errors.hpp"
#include "bfm/grid.hpp"
#include "bfm/multiplier.hpp"
#include "bfm/norms.hpp"
#include "bfm/wavelets.hpp"

namespace py = pybind11;
using namespace bfm;
using pycplx = std::complex<double>;
using pyarray = py::array_t<pycplx, py::array::c_style | py::array::forcecast>;

namespace {

std::vector<cplx> values_in(const pyarray& a, const TorusGrid& grid) {
    if (a.size() != grid.point_count())
        throw parameter_error("value count does not match the grid");
    return {a.data(), a.data() + a.size()};
}

py::array values_out(const std::vector<cplx>& v, const TorusGrid& grid) {
    // Explicit shape vector: a braced {n} would pick the scalar-count ctor,
    // which pybind11 2.9 mishandles. Shape-and-pointer copies the data.
    std::vector<py::ssize_t> shape{py::ssize_t(v.size())};
    if (grid.dim == 2) shape = {grid.M, grid.M};
    return py::array_t<cplx>(shape, v.data());
}

py::dict report_out(const NormReport& nr) {
    py::dict d;
    d["r"] = nr.r;
    d["s"] = nr.s;
    d["sobolev"] = nr.sobolev ? py::object(py::float_(*nr.sobolev)) : py::none();
    d["hormander"] = nr.hormander;
    py::dict per;
    for (const auto& [j, v] : nr.per_j) per[py::int_(j)] = v;
    d["per_j"] = per;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "bilinear Fourier multiplier laboratory";
    m.attr("__version__") = "0.1.0";

    py::register_exception<guard_error>(m, "GuardError");
    py::register_exception<parameter_error>(m, "ParameterError");

    py::enum_<Side>(m, "Side")
        .value("space", Side::space)
        .value("frequency", Side::frequency);

    py::class_<TorusGrid>(m, "TorusGrid")
        .def(py::init<int, double, int>(), py::arg("dim"), py::arg("L"), py::arg("M"))
        .def_readonly("dim", &TorusGrid::dim)
        .def_readonly("L", &TorusGrid::L)
        .def_readonly("M", &TorusGrid::M)
        .def("spacing", &TorusGrid::spacing)
        .def("freq_spacing", &TorusGrid::freq_spacing)
        .def("nyquist", &TorusGrid::nyquist)
        .def("point_count", &TorusGrid::point_count)
        .def("coord", &TorusGrid::coord)
        .def("freq", &TorusGrid::freq)
        .def("signed_index", &TorusGrid::signed_index)
        .def("dual", &TorusGrid::dual)
        .def("same_as", &TorusGrid::same_as)
        .def("__repr__", [](const TorusGrid& g) {
            return "TorusGrid(dim=" + std::to_string(g.dim) + ", L=" + std::to_string(g.L) +
                   ", M=" + std::to_string(g.M) + ")";
        });

    py::class_<SampledFunction>(m, "SampledFunction")
        .def(py::init<const TorusGrid&, Side>(), py::arg("grid"), py::arg("side"))
        .def(py::init([](const TorusGrid& grid, Side side, const pyarray& values) {
                 SampledFunction f(grid, side);
                 f.values = values_in(values, grid);
                 return f;
             }),
             py::arg("grid"), py::arg("side"), py::arg("values"))
        .def_readonly("grid", &SampledFunction::grid)
        .def_readonly("side", &SampledFunction::side)
        .def_property(
            "values",
            [](const SampledFunction& f) { return values_out(f.values, f.grid); },
            [](SampledFunction& f, const pyarray& v) { f.values = values_in(v, f.grid); });

    py::class_<Symbol>(m, "Symbol")
        .def(py::init([](const TorusGrid& plane, std::array<double, 2> lo,
                         std::array<double, 2> hi, const pyarray& values) {
                 return Symbol(plane, lo, hi, values_in(values, plane));
             }),
             py::arg("plane"), py::arg("lo"), py::arg("hi"), py::arg("values"))
        .def_static(
            "from_function",
            [](const TorusGrid& plane, std::array<double, 2> lo, std::array<double, 2> hi,
               const std::function<pycplx(double, double)>& fn) {
                return Symbol::from_function(plane, lo, hi,
                                             [&](double x, double y) { return cplx(fn(x, y)); });
            },
            py::arg("plane"), py::arg("lo"), py::arg("hi"), py::arg("fn"))
        .def_readonly("plane", &Symbol::plane)
        .def_readonly("lo", &Symbol::lo)
        .def_readonly("hi", &Symbol::hi)
        .def_property_readonly(
            "values", [](const Symbol& s) { return values_out(s.values, s.plane); })
        .def("band", &Symbol::band, py::arg("axis"));

    m.def("symbol_plane", &symbol_plane, py::arg("operand"));
    m.def("symbol_axis", &symbol_axis, py::arg("operand"));
    m.def("dft_forward", &dft_forward, py::arg("f"));
    m.def("dft_inverse", &dft_inverse, py::arg("F"));
    m.def("lp_norm", &lp_norm, py::arg("f"), py::arg("p"));
    m.def("apply_bilinear", &apply_bilinear, py::arg("sigma"), py::arg("f"), py::arg("g"));
    m.def("apply_bilinear_bruteforce", &apply_bilinear_bruteforce, py::arg("sigma"),
          py::arg("f"), py::arg("g"));
    m.def("schwartz_profile", &schwartz_profile, py::arg("t"));
    m.def("schwartz_bump", &schwartz_bump, py::arg("grid"),
          py::arg("side") = Side::frequency);
    m.def("plateau_bump", &plateau_bump, py::arg("grid"), py::arg("inner"),
          py::arg("outer"), py::arg("side") = Side::frequency);

    py::class_<WaveletSystem>(m, "WaveletSystem")
        .def_readonly("order", &WaveletSystem::order)
        .def_readonly("depth", &WaveletSystem::depth)
        .def_readonly("iterations", &WaveletSystem::iterations)
        .def_readonly("residual", &WaveletSystem::residual);
    m.def("make_wavelet_system", &make_wavelet_system, py::arg("order") = 6,
          py::arg("depth") = 10);

    py::class_<WaveletCoeffs>(m, "WaveletCoeffs")
        .def_readonly("order", &WaveletCoeffs::order)
        .def_readonly("ell", &WaveletCoeffs::ell)
        .def_readonly("lambda_max", &WaveletCoeffs::lambda_max)
        .def("energy", &WaveletCoeffs::energy)
        .def("size", &WaveletCoeffs::size)
        .def("records", [](const WaveletCoeffs& c) {
            py::list out;
            for (const CoeffBlock& blk : c.blocks)
                for (std::size_t j1 = 0; j1 < blk.mu1.size(); ++j1)
                    for (std::size_t j2 = 0; j2 < blk.mu2.size(); ++j2) {
                        py::dict d;
                        d["lambda"] = blk.lambda;
                        d["G"] = py::make_tuple(blk.g1, blk.g2);
                        d["mu"] = py::make_tuple(blk.mu1[j1], blk.mu2[j2]);
                        d["a"] = pycplx(blk.at(j1, j2));
                        out.append(d);
                    }
            return out;
        });
    m.def("analyze", &analyze, py::arg("sigma"), py::arg("system"), py::arg("lambda_max"));
    m.def("synthesize", &synthesize, py::arg("coeffs"), py::arg("system"), py::arg("plane"));
    m.def("level_square_norm", &level_square_norm, py::arg("coeffs"), py::arg("system"),
          py::arg("lam"), py::arg("r"));

    m.def("sobolev_norm", &sobolev_norm, py::arg("sigma"), py::arg("r"), py::arg("s"));
    m.def("tl_norm", &tl_norm, py::arg("sigma"), py::arg("r"), py::arg("q"), py::arg("s"));
    m.def(
        "hormander_norm",
        [](const Symbol& sigma, double r, double s) {
            return report_out(hormander_norm(sigma, r, s));
        },
        py::arg("sigma"), py::arg("r"), py::arg("s"));

    m.def(
        "scaling_sweep",
        [](const std::string& family, int mm, int k, const std::string& mode,
           const std::vector<int>& N_list, int S, const std::vector<double>& p_in,
           double p, double r, double s, std::uint64_t seed, bool with_hormander) {
            const auto fam = family_from_name(family);
            if (!fam) throw parameter_error("unknown family " + family);
            if (mode != "widened" && mode != "narrow")
                throw parameter_error("mode must be widened or narrow");
            const ScalingReport rep = scaling_sweep(
                *fam, mm, k, mode == "narrow" ? BumpMode::narrow : BumpMode::widened,
                N_list, S, p_in, p, r, s, seed, with_hormander);
            py::dict d;
            d["family"] = family_name(rep.family);
            d["m"] = rep.m;
            d["k"] = rep.k;
            d["samples"] = rep.samples;
            d["p"] = rep.p;
            d["p_in"] = rep.p_in;
            d["r"] = rep.r;
            d["s"] = rep.s;
            d["N"] = rep.N_list;
            py::list per;
            for (const SweepPoint& pt : rep.per_N) {
                py::dict row;
                row["N"] = pt.N;
                row["mean"] = pt.mc.output.mean;
                row["stderr"] = pt.mc.output.std_err;
                py::list ins;
                for (const McStat& st : pt.mc.inputs)
                    ins.append(py::make_tuple(st.mean, st.std_err));
                row["inputs"] = ins;
                row["sigma_sup"] = pt.sigma_sup;
                row["sobolev"] = pt.sobolev ? py::object(py::float_(*pt.sobolev)) : py::none();
                row["hormander"] =
                    pt.hormander ? py::object(py::float_(*pt.hormander)) : py::none();
                per.append(row);
            }
            d["per_N"] = per;
            d["exponent_target"] = rep.exponent_target;
            d["fitted_exponent"] = rep.fitted_exponent;
            d["fit_residual"] = rep.fit_residual;
            d["fitted_input_exponents"] = rep.fitted_input_exponents;
            d["sigma_exponent_basis"] = rep.sigma_exponent_basis;
            d["gap"] = rep.gap;
            d["gap_threshold"] = rep.gap_threshold;
            d["verdict"] = rep.verdict;
            return d;
        },
        py::arg("family"), py::arg("m") = 2, py::arg("k") = 2,
        py::arg("mode") = "widened", py::arg("N"), py::arg("S") = 16, py::arg("p_in"),
        py::arg("p") = 1.0, py::arg("r") = 2.0, py::arg("s") = 0.5, py::arg("seed") = 0,
        py::arg("with_hormander") = false);
}
