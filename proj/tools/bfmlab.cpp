// Command-line front end. Every run writes a JSON report with the schema
// {command, params, results, timings, seed}; the results section is a pure
// function of the resolved parameters and seed, so identical invocations
// produce byte-identical results (timings live outside that section).
//
// Exit codes: 0 success, 1 failed verify suite or internal error, 2 invalid
// usage or parameters, 3 module guard violation. Nonzero exits still print a
// machine-readable error record.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bfm/bumps.hpp"
#include "bfm/counterexamples.hpp"
#include "bfm/decomposition.hpp"
#include "bfm/errors.hpp"
#include "bfm/grid.hpp"
#include "bfm/multiplier.hpp"
#include "bfm/norms.hpp"
#include "bfm/wavelets.hpp"
#include "json.hpp"

using namespace bfm;
using json = nlohmann::ordered_json;

namespace {

std::string out_dir_default() {
    const char* env = std::getenv("BFMLAB_OUT");
    return env && *env ? env : ".";
}

double rel_l2(const std::vector<cplx>& got, const std::vector<cplx>& want) {
    long double num = 0.0L, den = 0.0L;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += std::norm(got[i] - want[i]);
        den += std::norm(want[i]);
    }
    return den > 0 ? std::sqrt(double(num / den)) : std::sqrt(double(num));
}

json values_to_json(const std::vector<cplx>& values) {
    json arr = json::array();
    for (const cplx& v : values) {
        arr.push_back(v.real());
        arr.push_back(v.imag());
    }
    return arr;
}

std::vector<cplx> values_from_json(const json& arr) {
    if (!arr.is_array() || arr.size() % 2 != 0)
        throw parameter_error("values must be a flat [re, im, ...] array");
    std::vector<cplx> out(arr.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = cplx(arr[2 * i].get<double>(), arr[2 * i + 1].get<double>());
    return out;
}

json function_to_json(const SampledFunction& f) {
    json j;
    j["dim"] = f.grid.dim;
    j["L"] = f.grid.L;
    j["M"] = f.grid.M;
    j["side"] = f.side == Side::space ? "space" : "frequency";
    j["values"] = values_to_json(f.values);
    return j;
}

SampledFunction function_from_json(const json& j) {
    const TorusGrid grid(j.at("dim").get<int>(), j.at("L").get<double>(),
                         j.at("M").get<int>());
    const std::string side = j.at("side").get<std::string>();
    if (side != "space" && side != "frequency")
        throw parameter_error("side must be space or frequency");
    SampledFunction f(grid, side == "space" ? Side::space : Side::frequency);
    f.values = values_from_json(j.at("values"));
    if (f.values.size() != std::size_t(grid.point_count()))
        throw parameter_error("value count does not match the grid");
    return f;
}

json symbol_to_json(const Symbol& s) {
    json j;
    j["L"] = s.plane.L;
    j["M"] = s.plane.M;
    j["lo"] = {s.lo[0], s.lo[1]};
    j["hi"] = {s.hi[0], s.hi[1]};
    j["values"] = values_to_json(s.values);
    return j;
}

Symbol symbol_from_json(const json& j) {
    const TorusGrid plane(2, j.at("L").get<double>(), j.at("M").get<int>());
    return Symbol(plane,
                  {j.at("lo").at(0).get<double>(), j.at("lo").at(1).get<double>()},
                  {j.at("hi").at(0).get<double>(), j.at("hi").at(1).get<double>()},
                  values_from_json(j.at("values")));
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parameter_error("cannot write " + path);
    out << text;
}

// report skeleton; the caller fills results and the final timing
struct Report {
    json j;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    Report(const std::string& command, std::uint64_t seed) {
        j["command"] = command;
        j["params"] = json::object();
        j["results"] = json::object();
        j["timings"] = json::object();
        j["seed"] = seed;
    }
    void finish(const std::string& out_dir, const std::string& name) {
        j["timings"]["total_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::filesystem::create_directories(out_dir);
        const std::string text = j.dump(2) + "\n";
        write_text(out_dir + "/" + name, text);
        std::fputs(text.c_str(), stdout);
    }
};

SampledFunction random_band_limited(const TorusGrid& grid, double radius,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    SampledFunction F(grid, Side::frequency);
    for (int k = 0; k < grid.M; ++k) {
        if (std::abs(grid.freq(k)) > radius) continue;
        F.values[std::size_t(k)] = cplx(gauss(rng), gauss(rng));
    }
    return dft_inverse(F);
}

// built-in demo symbol: smooth bump supported in [-2,2]^2
Symbol demo_symbol(const TorusGrid& plane) {
    return Symbol::from_function(plane, {-2.0, -2.0}, {2.0, 2.0},
                                 [](double x, double y) {
                                     return cplx(schwartz_profile(x / 2.0) *
                                                     schwartz_profile(y / 2.0),
                                                 0.0);
                                 });
}

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- subcommand: apply ----------------------------------------------------

struct ApplyArgs {
    std::string f_path, g_path, symbol = "constant-one";
    std::string out = out_dir_default(), json_name = "apply.json",
                output_name = "apply_output.json";
};

int run_apply(const ApplyArgs& a) {
    Report rep("apply", 0);
    rep.j["params"] = {{"f", a.f_path},
                       {"g", a.g_path},
                       {"symbol", a.symbol},
                       {"out", a.out},
                       {"output", a.output_name}};
    const SampledFunction f = function_from_json(load_json(a.f_path));
    const SampledFunction g = function_from_json(load_json(a.g_path));
    if (!f.grid.same_as(g.grid)) throw parameter_error("f and g live on different grids");

    Symbol sigma = [&] {
        if (a.symbol == "constant-one") {
            const TorusGrid plane = symbol_plane(f.grid);
            const double half = plane.L / 2;
            return Symbol(plane, {-half, -half}, {half, half},
                          std::vector<cplx>(std::size_t(plane.point_count()), cplx(1.0)));
        }
        return symbol_from_json(load_json(a.symbol));
    }();

    const SampledFunction T = apply_bilinear(sigma, f, g);
    std::filesystem::create_directories(a.out);
    write_text(a.out + "/" + a.output_name, function_to_json(T).dump(2) + "\n");

    rep.j["results"]["output_l1"] = lp_norm(T, 1.0);
    rep.j["results"]["output_l2"] = lp_norm(T, 2.0);
    rep.finish(a.out, a.json_name);
    return 0;
}

// ---- subcommand: norms -----------------------------------------------------

struct NormsArgs {
    std::string symbol;  // empty: demo bump
    double L = 16.0;
    int M = 512;
    double r = 2.0, s = 0.75, q = 2.0;
    bool with_tl = false, with_hormander = false;
    std::string out = out_dir_default(), json_name = "norms.json";
};

int run_norms(const NormsArgs& a) {
    Report rep("norms", 0);
    rep.j["params"] = {{"symbol", a.symbol.empty() ? "demo" : a.symbol},
                       {"L", a.L},
                       {"M", a.M},
                       {"r", a.r},
                       {"s", a.s},
                       {"q", a.q},
                       {"tl", a.with_tl},
                       {"hormander", a.with_hormander},
                       {"out", a.out}};
    const Symbol sigma = a.symbol.empty() ? demo_symbol(TorusGrid(2, a.L, a.M))
                                          : symbol_from_json(load_json(a.symbol));
    json& res = rep.j["results"];
    res["sobolev"] = sobolev_norm(sigma, a.r, a.s);
    if (a.with_tl) res["tl"] = tl_norm(sigma, a.r, a.q, a.s);
    if (a.with_hormander) {
        const NormReport nr = hormander_norm(sigma, a.r, a.s);
        res["hormander"] = nr.hormander;
        json per = json::object();
        for (const auto& [jj, v] : nr.per_j) per[std::to_string(jj)] = v;
        res["per_j"] = per;
    }
    rep.finish(a.out, a.json_name);
    return 0;
}

// ---- subcommand: decompose --------------------------------------------------

struct DecomposeArgs {
    std::string symbol;  // empty: demo bump
    double L = 16.0;
    int M = 512;
    int order = 6, lambda_max = 4, lambda = 3;
    double r = 2.0, s = 0.75;
    std::uint64_t seed = 7;
    int max_classes = 16;
    std::string out = out_dir_default(), json_name = "decompose.json",
                coeffs_name = "coeffs.json", csv_name = "ratios.csv";
};

int run_decompose(const DecomposeArgs& a) {
    Report rep("decompose", a.seed);
    rep.j["params"] = {{"symbol", a.symbol.empty() ? "demo" : a.symbol},
                       {"L", a.L},
                       {"M", a.M},
                       {"order", a.order},
                       {"lambda_max", a.lambda_max},
                       {"lambda", a.lambda},
                       {"r", a.r},
                       {"s", a.s},
                       {"max_classes", a.max_classes},
                       {"out", a.out},
                       {"coeffs", a.coeffs_name},
                       {"csv", a.csv_name}};

    const Symbol sigma = a.symbol.empty() ? demo_symbol(TorusGrid(2, a.L, a.M))
                                          : symbol_from_json(load_json(a.symbol));
    const TorusGrid& plane = sigma.plane;
    const TorusGrid grid(1, double(plane.M) / plane.L, plane.M);  // dual operand grid
    const WaveletSystem ws = make_wavelet_system(a.order, 6);
    const WaveletCoeffs coeffs = analyze(sigma, ws, a.lambda_max);

    json recs = json::array();
    for (const CoeffBlock& blk : coeffs.blocks)
        for (std::size_t j1 = 0; j1 < blk.mu1.size(); ++j1)
            for (std::size_t j2 = 0; j2 < blk.mu2.size(); ++j2) {
                const cplx v = blk.at(j1, j2);
                recs.push_back({{"lambda", blk.lambda},
                                {"G", {blk.g1, blk.g2}},
                                {"mu", {blk.mu1[j1], blk.mu2[j2]}},
                                {"re", v.real()},
                                {"im", v.imag()}});
            }
    std::filesystem::create_directories(a.out);
    write_text(a.out + "/" + a.coeffs_name, recs.dump() + "\n");

    const double snorm = sobolev_norm(sigma, a.r, a.s);
    const SampledFunction f = random_band_limited(grid, 1.0, a.seed);
    const SampledFunction g = random_band_limited(grid, 1.0, a.seed + 1);
    const SubclassPartition part = partition_subclasses(coeffs, a.lambda, ws);
    std::vector<SubclassKey> keys;
    for (const auto& [key, members] : part.classes) keys.push_back(key);

    std::string csv = "lambda,kappa,tau,gamma,K,ratio_rows,ratio_cols,ratio_imp\n";
    double worst_imp = 0.0;
    int rows = 0;
    const std::size_t step =
        std::max<std::size_t>(1, keys.size() / std::size_t(std::max(1, a.max_classes)));
    for (std::size_t pick = 0; pick < keys.size(); pick += step) {
        const int kid = kappa_id(part, keys[pick]);
        const int tau_max = level_set_split(part, keys[pick], 0, a.r).tau_max;
        for (int tau = 0; tau <= tau_max; ++tau) {
            const LevelSetSplit sp = level_set_split(part, keys[pick], tau, a.r);
            if (sp.size() == 0) continue;
            const RatioRecord rc = verify_piece_bounds(sp, f, g, snorm, a.s, ws);
            worst_imp = std::max(worst_imp, rc.ratio_imp);
            ++rows;
            csv += std::to_string(rc.lambda) + "," + std::to_string(kid) + "," +
                   std::to_string(rc.tau) + "," + std::to_string(rc.gamma) + "," +
                   csv_num(rc.K) + "," + csv_num(rc.ratio_rows) + "," +
                   csv_num(rc.ratio_cols) + "," + csv_num(rc.ratio_imp) + "\n";
        }
    }
    write_text(a.out + "/" + a.csv_name, csv);

    json& res = rep.j["results"];
    res["coeff_count"] = coeffs.size();
    res["energy"] = coeffs.energy();
    res["sobolev"] = snorm;
    res["class_count"] = keys.size();
    res["ratio_rows_written"] = rows;
    res["worst_ratio_imp"] = worst_imp;
    rep.finish(a.out, a.json_name);
    return 0;
}

// ---- subcommand: counterexample ---------------------------------------------

struct CounterArgs {
    std::string family = "bilinear_sigmaN", mode = "widened";
    int N = 8, m = 2, k = 2;
    std::uint64_t seed = 0;
    long long sample = 0;
    std::vector<double> p_in;
    double p = 1.0;
    std::string out = out_dir_default(), json_name = "counterexample.json";
};

int run_counterexample(const CounterArgs& a) {
    Report rep("counterexample", a.seed);
    const auto fam = family_from_name(a.family);
    if (!fam) throw parameter_error("unknown family " + a.family);
    if (a.mode != "widened" && a.mode != "narrow")
        throw parameter_error("mode must be widened or narrow");
    const BumpMode mode = a.mode == "narrow" ? BumpMode::narrow : BumpMode::widened;
    std::vector<double> p_in = a.p_in;
    if (p_in.empty()) p_in.assign(std::size_t(a.m), 2.0);

    rep.j["params"] = {{"family", a.family}, {"N", a.N},    {"m", a.m},
                       {"k", a.k},           {"mode", a.mode}, {"sample", a.sample},
                       {"p_in", p_in},       {"p", a.p},    {"out", a.out}};

    const TorusGrid grid = default_grid(a.N, a.m, mode);
    const CounterexampleInstance inst =
        build_instance(*fam, a.N, a.m, a.k, mode, grid, a.seed, p_in, a.sample);

    const SampledFunction closed = closed_form_T(inst);
    const SampledFunction applied =
        inst.m == 2 ? apply_bilinear(*inst.symbol, inst.functions[0], inst.functions[1])
                    : apply_mlinear_bruteforce(*inst.msymbol, inst.functions);

    json& res = rep.j["results"];
    res["grid"] = {{"L", grid.L}, {"M", grid.M}};
    res["c_lo"] = inst.c_lo;
    res["c_hi"] = inst.c_hi;
    res["closed_form_rel_err"] = rel_l2(applied.values, closed.values);
    json in_norms = json::array();
    for (std::size_t i = 0; i < inst.functions.size(); ++i)
        in_norms.push_back(lp_norm(inst.functions[i], p_in[i]));
    res["input_norms"] = in_norms;
    res["output_norm"] = std::pow(lp_mass(applied, a.p), 1.0 / a.p);
    double sup = 0.0;
    if (inst.symbol)
        for (const cplx& v : inst.symbol->values) sup = std::max(sup, std::abs(v));
    if (inst.msymbol)
        for (const cplx& v : inst.msymbol->values) sup = std::max(sup, std::abs(v));
    res["sigma_sup"] = sup;
    rep.finish(a.out, a.json_name);
    return 0;
}

// ---- subcommand: sweep --------------------------------------------------------

struct SweepArgs {
    std::string family = "bilinear_sigmaN", mode = "widened";
    std::vector<int> N_list;
    int m = 2, k = 2, S = 16;
    double p1 = 2.0, p2 = 2.0, p3 = 2.0, p = 1.0, r = 2.0, s = 0.5;
    std::uint64_t seed = 0;
    bool with_hormander = false;
    std::string out = out_dir_default(), json_name = "sweep.json",
                csv_name = "sweep.csv";
};

int run_sweep(const SweepArgs& a) {
    Report rep("sweep", a.seed);
    const auto fam = family_from_name(a.family);
    if (!fam) throw parameter_error("unknown family " + a.family);
    if (a.mode != "widened" && a.mode != "narrow")
        throw parameter_error("mode must be widened or narrow");
    const BumpMode mode = a.mode == "narrow" ? BumpMode::narrow : BumpMode::widened;
    std::vector<double> p_in = {a.p1, a.p2};
    if (a.m >= 3) p_in.push_back(a.p3);

    rep.j["params"] = {{"family", a.family},
                       {"N", a.N_list},
                       {"m", a.m},
                       {"k", a.k},
                       {"mode", a.mode},
                       {"S", a.S},
                       {"p_in", p_in},
                       {"p", a.p},
                       {"r", a.r},
                       {"s", a.s},
                       {"hormander", a.with_hormander},
                       {"out", a.out}};

    const ScalingReport sr = scaling_sweep(*fam, a.m, a.k, mode, a.N_list, a.S, p_in,
                                           a.p, a.r, a.s, a.seed, a.with_hormander);

    json per = json::array();
    std::string csv = "family,N,p,mean,stderr,sobolev,hormander\n";
    for (const SweepPoint& pt : sr.per_N) {
        json row = {{"N", pt.N},
                    {"mean", pt.mc.output.mean},
                    {"stderr", pt.mc.output.std_err},
                    {"sigma_sup", pt.sigma_sup}};
        json in_means = json::array(), in_errs = json::array();
        for (const McStat& st : pt.mc.inputs) {
            in_means.push_back(st.mean);
            in_errs.push_back(st.std_err);
        }
        row["input_means"] = in_means;
        row["input_stderrs"] = in_errs;
        if (pt.sobolev) row["sobolev"] = *pt.sobolev;
        if (pt.hormander) row["hormander"] = *pt.hormander;
        per.push_back(row);
        csv += a.family + "," + std::to_string(pt.N) + "," + csv_num(a.p) + "," +
               csv_num(pt.mc.output.mean) + "," + csv_num(pt.mc.output.std_err) + "," +
               (pt.sobolev ? csv_num(*pt.sobolev) : std::string()) + "," +
               (pt.hormander ? csv_num(*pt.hormander) : std::string()) + "\n";
    }

    json& res = rep.j["results"];
    res["family"] = a.family;
    res["samples"] = sr.samples;
    res["per_N"] = per;
    res["exponent_target"] = sr.exponent_target;
    res["fitted_exponent"] = sr.fitted_exponent;
    res["fit_residual"] = sr.fit_residual;
    res["fitted_input_exponents"] = sr.fitted_input_exponents;
    res["sigma_exponent_basis"] = sr.sigma_exponent_basis;
    res["gap"] = sr.gap;
    res["gap_threshold"] = sr.gap_threshold;
    res["verdict"] = sr.verdict;

    std::filesystem::create_directories(a.out);
    write_text(a.out + "/" + a.csv_name, csv);
    rep.finish(a.out, a.json_name);
    return 0;
}

// ---- subcommand: verify --------------------------------------------------------

struct VerifyArgs {
    std::string suite = "wavelets";
    std::string out = out_dir_default(), json_name = "verify.json";
};

void push_check(json& checks, bool& all_ok, const std::string& name, double measure,
                double tol) {
    const bool ok = measure <= tol;
    checks.push_back({{"check", name}, {"measure", measure}, {"tol", tol}, {"ok", ok}});
    all_ok &= ok;
}

int run_verify(const VerifyArgs& a) {
    Report rep("verify", 0);
    rep.j["params"] = {{"suite", a.suite}, {"out", a.out}};
    json checks = json::array();
    bool all_ok = true;

    if (a.suite == "wavelets") {
        auto sdot = [](const std::vector<double>& x, const std::vector<double>& y,
                       long long shift) {
            long double acc = 0.0L;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const long long j = (long long)i - shift;
                if (j >= 0 && j < (long long)y.size())
                    acc += (long double)x[i] * y[std::size_t(j)];
            }
            return double(acc);
        };
        double filt = 0.0;
        for (int order = 1; order <= 10; ++order) {
            const auto h = daubechies_filters(order);
            const auto g = highpass_from(h);
            double sum = 0.0;
            for (double v : h) sum += v;
            filt = std::max(filt, std::abs(sum - std::numbers::sqrt2));
            for (int m = 0; m < 2 * order; ++m) {
                const double want = m == 0 ? 1.0 : 0.0;
                filt = std::max({filt, std::abs(sdot(h, h, 2 * m) - want),
                                 std::abs(sdot(g, g, 2 * m) - want),
                                 std::abs(sdot(h, g, 2 * m))});
            }
        }
        push_check(checks, all_ok, "filter_orthonormality_orders_1_10", filt, 1e-12);

        const WaveletSystem ws = make_wavelet_system(6, 10);
        const double w = std::ldexp(1.0, -10);
        long double nF = 0.0L, nM = 0.0L;
        for (std::size_t j = 0; j < ws.psiF.size(); ++j) {
            nF += (long double)ws.psiF[j] * ws.psiF[j];
            nM += (long double)ws.psiM[j] * ws.psiM[j];
        }
        push_check(checks, all_ok, "cascade_l2_normalization",
                   std::max(std::abs(double(nF) * w - 1.0), std::abs(double(nM) * w - 1.0)),
                   1e-6);
        double moment = 0.0;
        for (int alpha = 0; alpha < 6; ++alpha) {
            long double mom = 0.0L;
            for (std::size_t j = 0; j < ws.psiM.size(); ++j)
                mom += ws.psiM[j] * std::pow((long double)j * w, (long double)alpha);
            moment = std::max(moment, std::abs(double(mom) * w));
        }
        push_check(checks, all_ok, "vanishing_moments_to_order_5", moment, 1e-5);

        const TorusGrid plane(2, 8.0, 256);
        const WaveletSystem ws2 = make_wavelet_system(2, 6);
        const std::vector<WaveletIndex> idx = {
            {0, 0, 0, 0, 0}, {0, 0, 1, 3, -2}, {0, 1, 1, 5, 5}, {1, 0, 1, 2, 1},
            {1, 1, 0, -7, 0}, {2, 1, 1, -3, 4}, {3, 0, 1, 0, 0}, {4, 1, 1, 10, -20},
        };
        std::vector<SampledFunction> wv;
        for (const auto& i : idx) wv.push_back(tensor_wavelet(ws2, i, plane));
        double gram = 0.0;
        const double cell = plane.cell(Side::space);
        for (std::size_t x = 0; x < wv.size(); ++x)
            for (std::size_t y = x; y < wv.size(); ++y) {
                cplx acc(0);
                for (std::size_t i = 0; i < wv[x].values.size(); ++i)
                    acc += wv[x].values[i] * std::conj(wv[y].values[i]);
                gram = std::max(gram, std::abs(acc * cell - (x == y ? cplx(1) : cplx(0))));
            }
        push_check(checks, all_ok, "tensor_wavelet_gram", gram, 1e-12);
    } else if (a.suite == "multiplier") {
        const TorusGrid grid(1, 8.0, 32);
        const TorusGrid plane = symbol_plane(grid);
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> gauss;
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<cplx> vals(std::size_t(plane.point_count()), cplx(0));
            for (int i1 = 0; i1 < plane.M; ++i1)
                for (int i2 = 0; i2 < plane.M; ++i2) {
                    if (std::abs(plane.signed_index(i1)) > 7 ||
                        std::abs(plane.signed_index(i2)) > 7)
                        continue;
                    vals[std::size_t(i1) * plane.M + i2] = cplx(gauss(rng), gauss(rng));
                }
            const Symbol sigma(plane, {-0.9, -0.9}, {0.9, 0.9}, std::move(vals));
            const SampledFunction f = random_band_limited(grid, 0.875, rng());
            const SampledFunction g = random_band_limited(grid, 0.875, rng());
            worst = std::max(worst, rel_l2(apply_bilinear(sigma, f, g).values,
                                           apply_bilinear_bruteforce(sigma, f, g).values));
        }
        push_check(checks, all_ok, "fast_apply_vs_direct_sum", worst, 1e-10);

        const double half = plane.L / 2;
        const Symbol one(plane, {-half, -half}, {half, half},
                         std::vector<cplx>(std::size_t(plane.point_count()), cplx(1.0)));
        const SampledFunction f = random_band_limited(grid, 0.875, 5);
        const SampledFunction g = random_band_limited(grid, 0.875, 6);
        std::vector<cplx> prod(f.values.size());
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f.values[i] * g.values[i];
        push_check(checks, all_ok, "constant_one_is_pointwise_product",
                   rel_l2(apply_bilinear(one, f, g).values, prod), 1e-12);

        const SampledFunction back = dft_inverse(dft_forward(f));
        push_check(checks, all_ok, "dft_round_trip", rel_l2(back.values, f.values), 1e-12);
    } else if (a.suite == "decomposition") {
        const TorusGrid plane(2, 16.0, 512);
        const WaveletSystem ws = make_wavelet_system(6, 6);
        const WaveletCoeffs coeffs = analyze(demo_symbol(plane), ws, 4);
        double cover = 0.0;  // 0 when every coefficient lands in exactly one class
        std::size_t level_count = 0, class_total = 0;
        for (const CoeffBlock& blk : coeffs.blocks)
            if (blk.lambda == 3) level_count += blk.a.size();
        const SubclassPartition part = partition_subclasses(coeffs, 3, ws);
        class_total = part.size();
        cover = double(level_count > class_total ? level_count - class_total
                                                 : class_total - level_count);
        push_check(checks, all_ok, "partition_covers_level", cover, 0.0);

        bool gamma_ok = true;
        std::mt19937_64 rng(404);
        std::normal_distribution<double> gauss;
        SubclassPartition randomized = part;
        for (int trial = 0; trial < 20; ++trial) {
            for (auto& [key, members] : randomized.classes)
                for (auto& [idx, av] : members) av = cplx(gauss(rng), gauss(rng));
            for (const auto& [key, members] : randomized.classes) {
                const int tau_max = level_set_split(randomized, key, 0, 2.0).tau_max;
                for (int tau = 0; tau <= tau_max; ++tau) {
                    const LevelSetSplit sp = level_set_split(randomized, key, tau, 2.0);
                    gamma_ok &= double(sp.gamma) <= 4.0 * sp.K;
                }
            }
        }
        push_check(checks, all_ok, "heavy_column_budget", gamma_ok ? 0.0 : 1.0, 0.0);
    } else {
        throw parameter_error("unknown suite " + a.suite +
                              " (expected wavelets, multiplier, or decomposition)");
    }

    rep.j["results"]["checks"] = checks;
    rep.j["results"]["all_ok"] = all_ok;
    rep.finish(a.out, a.json_name);
    return all_ok ? 0 : 1;
}

json error_record(const std::string& type, const std::string& message) {
    return json{{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bilinear Fourier multiplier laboratory"};
    app.require_subcommand(1);

    ApplyArgs aa;
    CLI::App* apply = app.add_subcommand("apply", "apply a bilinear symbol to stored f, g");
    apply->add_option("--f", aa.f_path, "input function JSON")->required();
    apply->add_option("--g", aa.g_path, "input function JSON")->required();
    apply->add_option("--symbol", aa.symbol, "symbol JSON path or constant-one");
    apply->add_option("--out", aa.out, "output directory");
    apply->add_option("--json", aa.json_name, "report file name");
    apply->add_option("--output", aa.output_name, "output function file name");

    NormsArgs na;
    CLI::App* norms = app.add_subcommand("norms", "symbol norms");
    norms->add_option("--symbol", na.symbol, "symbol JSON (default: demo bump)");
    norms->add_option("--L", na.L, "demo plane extent");
    norms->add_option("--M", na.M, "demo plane cells per axis");
    norms->add_option("--r", na.r, "integrability exponent");
    norms->add_option("--s", na.s, "smoothness exponent");
    norms->add_option("--q", na.q, "summation exponent for the tl norm");
    norms->add_flag("--tl", na.with_tl, "include the dyadic-partition norm");
    norms->add_flag("--hormander", na.with_hormander, "include the dilation-sup norm");
    norms->add_option("--out", na.out, "output directory");
    norms->add_option("--json", na.json_name, "report file name");

    DecomposeArgs da;
    CLI::App* deco = app.add_subcommand("decompose", "wavelet analysis and level-set splits");
    deco->add_option("--symbol", da.symbol, "symbol JSON (default: demo bump)");
    deco->add_option("--L", da.L, "demo plane extent");
    deco->add_option("--M", da.M, "demo plane cells per axis");
    deco->add_option("--order", da.order, "wavelet order");
    deco->add_option("--lambda-max", da.lambda_max, "analysis depth");
    deco->add_option("--lambda", da.lambda, "level to partition");
    deco->add_option("--r", da.r, "integrability exponent");
    deco->add_option("--s", da.s, "smoothness exponent");
    deco->add_option("--seed", da.seed, "seed for the probe functions");
    deco->add_option("--max-classes", da.max_classes, "classes to sample for ratios");
    deco->add_option("--out", da.out, "output directory");
    deco->add_option("--json", da.json_name, "report file name");
    deco->add_option("--coeffs", da.coeffs_name, "coefficient records file name");
    deco->add_option("--csv", da.csv_name, "ratio table file name");

    CounterArgs ca;
    CLI::App* ce = app.add_subcommand("counterexample", "build one lacunary instance");
    ce->add_option("--family", ca.family, "bilinear_sigmaN | mlinear_sigmaN | single_bump | mixed_k");
    ce->add_option("--N", ca.N, "frequency count")->required();
    ce->add_option("--m", ca.m, "linearity");
    ce->add_option("--k", ca.k, "signed slots (mixed_k)");
    ce->add_option("--mode", ca.mode, "widened | narrow");
    ce->add_option("--seed", ca.seed, "master seed");
    ce->add_option("--sample", ca.sample, "sample index");
    ce->add_option("--p-in", ca.p_in, "input exponents");
    ce->add_option("--p", ca.p, "output exponent");
    ce->add_option("--out", ca.out, "output directory");
    ce->add_option("--json", ca.json_name, "report file name");

    SweepArgs sa;
    CLI::App* sweep = app.add_subcommand("sweep", "scaling sweep with exponent fits");
    sweep->add_option("--family", sa.family, "bilinear_sigmaN | mlinear_sigmaN | single_bump | mixed_k");
    sweep->add_option("--N", sa.N_list, "sizes (comma separated)")->required()->delimiter(',');
    sweep->add_option("--m", sa.m, "linearity");
    sweep->add_option("--k", sa.k, "signed slots (mixed_k)");
    sweep->add_option("--mode", sa.mode, "widened | narrow");
    sweep->add_option("--S", sa.S, "Monte-Carlo samples per size");
    sweep->add_option("--p1", sa.p1, "first input exponent");
    sweep->add_option("--p2", sa.p2, "second input exponent");
    sweep->add_option("--p3", sa.p3, "third input exponent (m = 3)");
    sweep->add_option("--p", sa.p, "output exponent");
    sweep->add_option("--r", sa.r, "norm integrability exponent");
    sweep->add_option("--s", sa.s, "norm smoothness exponent");
    sweep->add_option("--seed", sa.seed, "master seed");
    sweep->add_flag("--hormander", sa.with_hormander, "add the dilation-sup norm column");
    sweep->add_option("--out", sa.out, "output directory");
    sweep->add_option("--json", sa.json_name, "report file name");
    sweep->add_option("--csv", sa.csv_name, "per-N table file name");

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "run an invariant suite");
    verify->add_option("--suite", va.suite, "wavelets | multiplier | decomposition");
    verify->add_option("--out", va.out, "output directory");
    verify->add_option("--json", va.json_name, "report file name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::fputs(error_record("usage", e.what()).dump().c_str(), stdout);
        std::fputs("\n", stdout);
        return 2;
    }

    try {
        if (app.got_subcommand(apply)) return run_apply(aa);
        if (app.got_subcommand(norms)) return run_norms(na);
        if (app.got_subcommand(deco)) return run_decompose(da);
        if (app.got_subcommand(ce)) return run_counterexample(ca);
        if (app.got_subcommand(sweep)) return run_sweep(sa);
        if (app.got_subcommand(verify)) return run_verify(va);
    } catch (const parameter_error& e) {
        std::fputs((error_record("parameter", e.what()).dump() + "\n").c_str(), stdout);
        return 2;
    } catch (const guard_error& e) {
        std::fputs((error_record("guard", e.what()).dump() + "\n").c_str(), stdout);
        return 3;
    } catch (const std::exception& e) {
        std::fputs((error_record("internal", e.what()).dump() + "\n").c_str(), stdout);
        return 1;
    }
    return 0;
}
