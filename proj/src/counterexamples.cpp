#include "bfm/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bfm/bumps.hpp"
#include "bfm/errors.hpp"
#include "bfm/norms.hpp"

namespace bfm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct ModeShape {
    double f_radius;  // f-bump support radius in u = N xi - j units
    double inner;     // plateau is 1 on |u| <= inner
    double outer;     // plateau is 0 on |u| >= outer
};

ModeShape shape_of(BumpMode mode) {
    if (mode == BumpMode::narrow) return {1.0 / 100, 1.0 / 20, 1.0 / 10};
    return {1.0 / 8, 1.0 / 8, 1.0 / 4};
}

// Frequency cells between adjacent bump centers (L/N); centers must sit on
// gridpoints so translated bumps are exact copies of each other.
long long center_step(int N, const TorusGrid& grid, BumpMode mode) {
    if (grid.dim != 1) throw parameter_error("counterexample: operand grid must be dim 1");
    if (N < 1) throw parameter_error("counterexample: N >= 1 required");
    const double q = grid.L / N;
    const double rounded = std::round(q);
    if (rounded < 1.0 || std::abs(q - rounded) > 1e-9 * q)
        throw guard_error("counterexample: bump centers j/N must sit on frequency "
                          "gridpoints (L must be an integer multiple of N)");
    if (mode == BumpMode::narrow && rounded < 300.0)
        throw guard_error("counterexample: narrow-mode bumps need frequency spacing "
                          "<= 1/(300 N), i.e. L >= 300 N");
    return static_cast<long long>(rounded);
}

// Adds sign * profile((d cells)/radius) around center_cell on the frequency
// side. radius_cells < 1 degenerates to a single sample at the center.
void scatter_bump(SampledFunction& fhat, long long center_cell, double sign,
                  double radius_cells) {
    const int reach = static_cast<int>(std::ceil(radius_cells));
    for (int d = -reach; d <= reach; ++d) {
        const double v = schwartz_profile(static_cast<double>(d) / radius_cells);
        if (v == 0.0) continue;
        fhat.values[static_cast<std::size_t>(fhat.grid.storage_index(center_cell + d))] +=
            sign * v;
    }
}

// Plateau value at a cell offset from a bump center.
double plateau_cell(int d, long long q, const ModeShape& sh) {
    return plateau_profile(static_cast<double>(d) / static_cast<double>(q), sh.inner,
                           sh.outer);
}

// Centers j*q for j in [1,N] (or [-N,N]) are distinct mod M iff their count
// times the step fits within one period.
void check_center_collisions(int N, bool symmetric, long long q, int M) {
    const long long count = symmetric ? 2LL * N + 1 : N;
    if (count * q > M)
        throw guard_error("counterexample: bump centers collide mod M on this grid");
}

double sup_abs(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& z : v) s = std::max(s, std::abs(z));
    return s;
}

// Sorted before summation so the aggregate is independent of the order the
// samples were produced in (safe under future parallel evaluation).
McStat stats_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const int n = static_cast<int>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    McStat st;
    st.mean = sum / n;
    if (n >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - st.mean) * (x - st.mean);
        st.std_err = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
    }
    return st;
}

struct LineFit {
    double slope = 0.0;
    double residual = 0.0;  // root mean square
};

LineFit ols(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int n = static_cast<int>(xs.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    const double intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - (intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

// Largest symbol plane we are willing to materialize (~0.5 GB of samples).
constexpr std::size_t kMaxPlanePoints = 33'000'000;

}  // namespace

int RademacherDraw::sign(int family, long long index) const {
    auto it = overrides.find({family, index});
    if (it != overrides.end()) return it->second;
    std::uint64_t h = splitmix64(seed + 0x632be59bd9b4e019ULL *
                                            (static_cast<std::uint64_t>(family) + 1));
    h = splitmix64(h + static_cast<std::uint64_t>(index));
    return (h >> 63) ? -1 : 1;
}

std::uint64_t sample_seed(std::uint64_t master, long long sample) {
    return splitmix64(splitmix64(master) +
                      0xd1b54a32d192ed03ULL * (static_cast<std::uint64_t>(sample) + 1));
}

const char* family_name(Family f) {
    switch (f) {
        case Family::bilinear_sigmaN: return "bilinear_sigmaN";
        case Family::mlinear_sigmaN: return "mlinear_sigmaN";
        case Family::single_bump: return "single_bump";
        case Family::mixed_k: return "mixed_k";
    }
    throw parameter_error("counterexample: unknown family");
}

std::optional<Family> family_from_name(const std::string& name) {
    if (name == "bilinear_sigmaN") return Family::bilinear_sigmaN;
    if (name == "mlinear_sigmaN") return Family::mlinear_sigmaN;
    if (name == "single_bump") return Family::single_bump;
    if (name == "mixed_k") return Family::mixed_k;
    return std::nullopt;
}

std::pair<int, int> c_window(int N) {
    if (N < 1) throw parameter_error("counterexample: N >= 1 required");
    return {(9 * N + 9) / 10, (11 * N) / 10};
}

void check_resolution(int N, int m, const TorusGrid& grid, BumpMode mode) {
    if (m != 2 && m != 3) throw parameter_error("counterexample: m must be 2 or 3");
    if (m == 3 && mode == BumpMode::narrow)
        throw guard_error("counterexample: m = 3 runs on the aliased single-cell "
                          "lane; narrow-mode resolution is not representable there");
    const long long q = center_step(N, grid, mode);
    if (m == 3) {
        if (grid.M > 32)
            throw guard_error("counterexample: m = 3 evaluation is direct summation; "
                              "M <= 32 required");
        if (static_cast<double>(N) * q > grid.M)
            throw guard_error("counterexample: m = 3 centers must stay distinct mod M "
                              "(need N * (L/N) <= M)");
        return;
    }
    if (mode == BumpMode::widened && q < 8)
        throw guard_error("counterexample: widened bumps need L >= 8 N so the plateau "
                          "spans at least one cell per side");
    const double need = 1.1 * m + 0.05;
    if (grid.nyquist() + 1e-9 < need)
        throw guard_error("counterexample: operand Nyquist too small for in-band "
                          "output frequencies (need M/(2L) >= " +
                          std::to_string(need) + ")");
}

TorusGrid default_grid(int N, int m, BumpMode mode) {
    if (m == 3) return TorusGrid(1, static_cast<double>(N), 32);
    if (mode == BumpMode::narrow) return TorusGrid(1, 300.0 * N, 1380 * N);
    return TorusGrid(1, 8.0 * N, 40 * N);
}

SampledFunction build_fN(int N, int var, bool with_signs, bool symmetric,
                         const RademacherDraw& draw, const TorusGrid& grid,
                         BumpMode mode) {
    const long long q = center_step(N, grid, mode);
    check_center_collisions(N, symmetric, q, grid.M);
    const ModeShape sh = shape_of(mode);
    const double rad_cells = sh.f_radius * static_cast<double>(q);
    SampledFunction fhat(grid, Side::frequency);
    const int jlo = symmetric ? -N : 1;
    for (int j = jlo; j <= N; ++j) {
        const double sgn = with_signs ? draw.sign(var, j) : 1.0;
        scatter_bump(fhat, j * q, sgn, rad_cells);
    }
    return dft_inverse(fhat);
}

Symbol build_sigmaN(int N, const RademacherDraw& draw, const TorusGrid& operand_grid,
                    BumpMode mode, int var1, int var2, int var3, bool symmetric,
                    int signed_slots) {
    const long long q = center_step(N, operand_grid, mode);
    check_center_collisions(N, symmetric, q, operand_grid.M);
    const ModeShape sh = shape_of(mode);
    const TorusGrid plane = symbol_plane(operand_grid);
    if (plane.point_count() > kMaxPlanePoints)
        throw guard_error("counterexample: symbol plane too large to materialize; "
                          "use the widened mode or a coarser operand grid");
    const auto [clo, chi] = c_window(N);
    const int reach = static_cast<int>(std::ceil(sh.outer * static_cast<double>(q)));
    std::vector<cplx> vals(plane.point_count());
    const int jlo = symmetric ? -N : 1;
    for (int j = jlo; j <= N; ++j) {
        for (int k = jlo; k <= N; ++k) {
            const int l = j + k;
            if (l < clo || l > chi) continue;
            double sgn = draw.sign(var3, l);
            if (signed_slots >= 1) sgn *= draw.sign(var1, j);
            if (signed_slots >= 2) sgn *= draw.sign(var2, k);
            for (int d1 = -reach; d1 <= reach; ++d1) {
                const double v1 = plateau_cell(d1, q, sh);
                if (v1 == 0.0) continue;
                const std::size_t row =
                    static_cast<std::size_t>(plane.storage_index(j * q + d1)) * plane.M;
                for (int d2 = -reach; d2 <= reach; ++d2) {
                    const double v2 = plateau_cell(d2, q, sh);
                    if (v2 == 0.0) continue;
                    vals[row + plane.storage_index(k * q + d2)] += sgn * v1 * v2;
                }
            }
        }
    }
    const double pad = sh.outer / N;
    std::array<double, 2> lo{}, hi{};
    if (symmetric) {
        lo = {-1.0 - pad, -1.0 - pad};
        hi = {1.0 + pad, 1.0 + pad};
    } else if (std::max(1, clo - N) <= std::min(N, chi - 1)) {
        const double cmin = std::max(1, clo - N) / static_cast<double>(N);
        const double cmax = std::min(N, chi - 1) / static_cast<double>(N);
        lo = {cmin - pad, cmin - pad};
        hi = {cmax + pad, cmax + pad};
    }  // else: the window holds no lattice point; all-zero symbol, point box
    return Symbol(plane, lo, hi, std::move(vals));
}

MultiSymbol build_sigmaN_mlinear(int N, int m, const RademacherDraw& draw,
                                 const TorusGrid& operand_grid, BumpMode mode) {
    if (m != 3) throw parameter_error("counterexample: the dense m-linear symbol "
                                      "builder covers m = 3");
    check_resolution(N, m, operand_grid, mode);
    const long long q = center_step(N, operand_grid, mode);
    const ModeShape sh = shape_of(mode);
    const TorusGrid axis = symbol_axis(operand_grid);
    const auto [clo, chi] = c_window(N);
    const int reach = static_cast<int>(std::ceil(sh.outer * static_cast<double>(q)));
    const std::size_t M = static_cast<std::size_t>(axis.M);
    std::vector<cplx> vals(M * M * M);
    for (int j1 = 1; j1 <= N; ++j1) {
        for (int j2 = 1; j2 <= N; ++j2) {
            for (int j3 = 1; j3 <= N; ++j3) {
                const int l = j1 + j2 + j3;
                if (l < clo || l > chi) continue;
                const double sgn = draw.sign(1, j1) * draw.sign(2, j2) *
                                   draw.sign(3, j3) * draw.sign(4, l);
                for (int d1 = -reach; d1 <= reach; ++d1) {
                    const double v1 = plateau_cell(d1, q, sh);
                    if (v1 == 0.0) continue;
                    const std::size_t i1 = axis.storage_index(j1 * q + d1);
                    for (int d2 = -reach; d2 <= reach; ++d2) {
                        const double v2 = plateau_cell(d2, q, sh);
                        if (v2 == 0.0) continue;
                        const std::size_t i2 = axis.storage_index(j2 * q + d2);
                        for (int d3 = -reach; d3 <= reach; ++d3) {
                            const double v3 = plateau_cell(d3, q, sh);
                            if (v3 == 0.0) continue;
                            const std::size_t i3 = axis.storage_index(j3 * q + d3);
                            vals[(i1 * M + i2) * M + i3] += sgn * v1 * v2 * v3;
                        }
                    }
                }
            }
        }
    }
    const std::vector<double> lo(3, -axis.L / 2);
    const std::vector<double> hi(3, axis.L / 2);
    return MultiSymbol(3, axis, lo, hi, std::move(vals));
}

CounterexampleInstance build_instance(Family family, int N, int m, int k, BumpMode mode,
                                      const TorusGrid& grid, std::uint64_t seed,
                                      const std::vector<double>& p_in,
                                      long long sample) {
    if (family == Family::single_bump) {
        CounterexampleInstance inst = build_single_bump(N, m, p_in, grid, mode);
        inst.seed = seed;
        inst.sample = sample;
        return inst;
    }
    if (family == Family::mixed_k)
        return build_mixed(N, m, k, seed, p_in, grid, mode, sample);
    if (static_cast<int>(p_in.size()) != m)
        throw parameter_error("counterexample: p_in must carry one exponent per slot");
    for (double pv : p_in)
        if (!(pv > 0)) throw parameter_error("counterexample: input exponents must be > 0");
    if (family == Family::bilinear_sigmaN && m != 2)
        throw parameter_error("counterexample: bilinear_sigmaN has m = 2");
    if (family == Family::mlinear_sigmaN && m != 3)
        throw parameter_error("counterexample: mlinear_sigmaN is the m = 3 lane");
    check_resolution(N, m, grid, mode);

    CounterexampleInstance inst;
    inst.family = family;
    inst.N = N;
    inst.m = m;
    inst.k = k;
    inst.mode = mode;
    inst.grid = grid;
    inst.seed = seed;
    inst.sample = sample;
    inst.p_in = p_in;
    std::tie(inst.c_lo, inst.c_hi) = c_window(N);

    const RademacherDraw draw{sample_seed(seed, sample), {}};
    for (int i = 0; i < m; ++i)
        inst.functions.push_back(build_fN(N, i + 1, true, false, draw, grid, mode));
    if (m == 2)
        inst.symbol = build_sigmaN(N, draw, grid, mode);
    else
        inst.msymbol = build_sigmaN_mlinear(N, m, draw, grid, mode);
    return inst;
}

CounterexampleInstance build_single_bump(int N, int m, const std::vector<double>& p_in,
                                         const TorusGrid& grid, BumpMode mode) {
    if (static_cast<int>(p_in.size()) != m)
        throw parameter_error("counterexample: p_in must carry one exponent per slot");
    check_resolution(N, m, grid, mode);
    const long long q = center_step(N, grid, mode);
    const ModeShape sh = shape_of(mode);

    CounterexampleInstance inst;
    inst.family = Family::single_bump;
    inst.N = N;
    inst.m = m;
    inst.k = m;
    inst.mode = mode;
    inst.grid = grid;
    inst.p_in = p_in;
    inst.c_lo = 0;
    inst.c_hi = -1;  // no sign window

    SampledFunction fhat(grid, Side::frequency);
    scatter_bump(fhat, static_cast<long long>(N) * q, 1.0,
                 sh.f_radius * static_cast<double>(q));
    const SampledFunction f = dft_inverse(fhat);
    for (int i = 0; i < m; ++i) inst.functions.push_back(f);

    const int reach = static_cast<int>(std::ceil(sh.outer * static_cast<double>(q)));
    const double pad = sh.outer / N;
    if (m == 2) {
        const TorusGrid plane = symbol_plane(grid);
        if (plane.point_count() > kMaxPlanePoints)
            throw guard_error("counterexample: symbol plane too large to materialize; "
                              "use the widened mode or a coarser operand grid");
        std::vector<cplx> vals(plane.point_count());
        for (int d1 = -reach; d1 <= reach; ++d1) {
            const double v1 = plateau_cell(d1, q, sh);
            if (v1 == 0.0) continue;
            const std::size_t row =
                static_cast<std::size_t>(plane.storage_index(N * q + d1)) * plane.M;
            for (int d2 = -reach; d2 <= reach; ++d2) {
                const double v2 = plateau_cell(d2, q, sh);
                if (v2 == 0.0) continue;
                vals[row + plane.storage_index(N * q + d2)] = v1 * v2;
            }
        }
        inst.symbol = Symbol(plane, {1.0 - pad, 1.0 - pad}, {1.0 + pad, 1.0 + pad},
                             std::move(vals));
    } else {
        const TorusGrid axis = symbol_axis(grid);
        const std::size_t M = static_cast<std::size_t>(axis.M);
        std::vector<cplx> vals(M * M * M);
        for (int d1 = -reach; d1 <= reach; ++d1) {
            const double v1 = plateau_cell(d1, q, sh);
            if (v1 == 0.0) continue;
            const std::size_t i1 = axis.storage_index(N * q + d1);
            for (int d2 = -reach; d2 <= reach; ++d2) {
                const double v2 = plateau_cell(d2, q, sh);
                if (v2 == 0.0) continue;
                const std::size_t i2 = axis.storage_index(N * q + d2);
                for (int d3 = -reach; d3 <= reach; ++d3) {
                    const double v3 = plateau_cell(d3, q, sh);
                    if (v3 == 0.0) continue;
                    vals[(i1 * M + i2) * M + axis.storage_index(N * q + d3)] =
                        v1 * v2 * v3;
                }
            }
        }
        inst.msymbol = MultiSymbol(3, axis, std::vector<double>(3, -axis.L / 2),
                                   std::vector<double>(3, axis.L / 2), std::move(vals));
    }
    return inst;
}

CounterexampleInstance build_mixed(int N, int m, int k, std::uint64_t seed,
                                   const std::vector<double>& p_in,
                                   const TorusGrid& grid, BumpMode mode,
                                   long long sample) {
    if (m != 2)
        throw parameter_error("counterexample: mixed_k is implemented on the "
                              "bilinear lane (m = 2)");
    if (k < 0 || k > m) throw parameter_error("counterexample: need 0 <= k <= m");
    if (static_cast<int>(p_in.size()) != m)
        throw parameter_error("counterexample: p_in must carry one exponent per slot");
    check_resolution(N, m, grid, mode);

    CounterexampleInstance inst;
    inst.family = Family::mixed_k;
    inst.N = N;
    inst.m = m;
    inst.k = k;
    inst.mode = mode;
    inst.grid = grid;
    inst.seed = seed;
    inst.sample = sample;
    inst.p_in = p_in;
    std::tie(inst.c_lo, inst.c_hi) = c_window(N);

    const RademacherDraw draw{sample_seed(seed, sample), {}};
    for (int i = 0; i < m; ++i)
        inst.functions.push_back(build_fN(N, i + 1, i < k, true, draw, grid, mode));
    inst.symbol = build_sigmaN(N, draw, grid, mode, 1, 2, 0, true, k);
    return inst;
}

long long lattice_count(int N, int m, bool symmetric, long long l) {
    if (m == 1) {
        const long long lo = symmetric ? -N : 1;
        return (l >= lo && l <= N) ? 1 : 0;
    }
    const long long lo = symmetric ? -N : 1;
    long long count = 0;
    for (long long j = lo; j <= N; ++j) count += lattice_count(N, m - 1, symmetric, l - j);
    return count;
}

SampledFunction closed_form_T(const CounterexampleInstance& inst) {
    const TorusGrid& g = inst.grid;
    SampledFunction T(g, Side::space);
    if (inst.family == Family::single_bump) {
        for (int i = 0; i < g.M; ++i) {
            cplx prod = 1.0;
            for (const SampledFunction& f : inst.functions) prod *= f.values[i];
            T.values[i] = prod;
        }
        return T;
    }
    const long long q = center_step(inst.N, g, inst.mode);
    const ModeShape sh = shape_of(inst.mode);
    SampledFunction bump0(g, Side::frequency);
    scatter_bump(bump0, 0, 1.0, sh.f_radius * static_cast<double>(q));
    const SampledFunction env = dft_inverse(bump0);

    const bool symmetric = inst.family == Family::mixed_k;
    const int wvar = symmetric ? 0 : inst.m + 1;
    const RademacherDraw draw{sample_seed(inst.seed, inst.sample), {}};
    std::vector<std::pair<long long, double>> window;  // (l, sign * multiplicity)
    for (long long l = inst.c_lo; l <= inst.c_hi; ++l) {
        const long long R = lattice_count(inst.N, inst.m, symmetric, l);
        if (R == 0) continue;
        window.emplace_back(l, draw.sign(wvar, l) * static_cast<double>(R));
    }
    for (int i = 0; i < g.M; ++i) {
        const double x = g.coord(i);
        cplx acc = 0.0;
        for (const auto& [l, w] : window) {
            const double phase = 2.0 * std::numbers::pi * x * static_cast<double>(l) / inst.N;
            acc += w * cplx(std::cos(phase), std::sin(phase));
        }
        cplx e = env.values[i];
        for (int t = 1; t < inst.m; ++t) e *= env.values[i];
        T.values[i] = e * acc;
    }
    return T;
}

double lp_mass(const SampledFunction& f, double p) {
    if (!(p > 0)) throw parameter_error("counterexample: lp_mass needs p > 0");
    const double cell = f.grid.cell(f.side);
    double sum = 0.0;
    for (const cplx& z : f.values) sum += std::pow(std::abs(z), p);
    return sum * cell;
}

McReport mc_norm(const CounterexampleInstance& inst, double p, int S) {
    if (S < 1) throw parameter_error("counterexample: mc_norm needs S >= 1");
    if (!(p > 0)) throw parameter_error("counterexample: mc_norm needs p > 0");
    McReport rep;
    rep.p = p;
    rep.samples = S;
    std::vector<double> out;
    out.reserve(S);
    std::vector<std::vector<double>> in(inst.m);
    for (int i = 0; i < S; ++i) {
        const CounterexampleInstance cur =
            build_instance(inst.family, inst.N, inst.m, inst.k, inst.mode, inst.grid,
                           inst.seed, inst.p_in, i);
        const SampledFunction T =
            inst.m == 2 ? apply_bilinear(*cur.symbol, cur.functions[0], cur.functions[1])
                        : apply_mlinear_bruteforce(*cur.msymbol, cur.functions);
        out.push_back(lp_mass(T, p));
        for (int slot = 0; slot < inst.m; ++slot)
            in[slot].push_back(lp_mass(cur.functions[slot], inst.p_in[slot]));
    }
    rep.output = stats_of(std::move(out));
    for (int slot = 0; slot < inst.m; ++slot)
        rep.inputs.push_back(stats_of(std::move(in[slot])));
    return rep;
}

ScalingReport scaling_sweep(Family family, int m, int k, BumpMode mode,
                            const std::vector<int>& N_list, int S,
                            const std::vector<double>& p_in, double p, double r,
                            double s, std::uint64_t seed, bool with_hormander) {
    if (N_list.size() < 3)
        throw parameter_error("counterexample: scaling fit needs at least 3 sizes "
                              "(degenerate otherwise)");
    ScalingReport rep;
    rep.family = family;
    rep.m = m;
    rep.k = k;
    rep.mode = mode;
    rep.seed = seed;
    rep.samples = S;
    rep.p = p;
    rep.p_in = p_in;
    rep.r = r;
    rep.s = s;
    rep.N_list = N_list;

    for (int N : N_list) {
        const TorusGrid grid = default_grid(N, m, mode);
        const CounterexampleInstance inst0 =
            build_instance(family, N, m, k, mode, grid, seed, p_in, 0);
        SweepPoint pt;
        pt.N = N;
        pt.mc = mc_norm(inst0, p, S);
        const int nsob = family == Family::single_bump ? 1 : std::min(S, 8);
        const int nhor = family == Family::single_bump ? 1 : std::min(S, 2);
        if (m == 2) {
            double acc = 0.0, sup = 0.0, hacc = 0.0;
            for (int i = 0; i < nsob; ++i) {
                const CounterexampleInstance cur =
                    i == 0 ? inst0
                           : build_instance(family, N, m, k, mode, grid, seed, p_in, i);
                sup = std::max(sup, sup_abs(cur.symbol->values));
                acc += sobolev_norm(*cur.symbol, r, s);
                if (with_hormander && i < nhor)
                    hacc += hormander_norm(*cur.symbol, r, s).hormander;
            }
            pt.sigma_sup = sup;
            pt.sobolev = acc / nsob;
            if (with_hormander) pt.hormander = hacc / nhor;
        } else {
            pt.sigma_sup = sup_abs(inst0.msymbol->values);
        }
        rep.per_N.push_back(std::move(pt));
    }

    std::vector<double> lx;
    for (int N : N_list) lx.push_back(std::log(static_cast<double>(N)));
    std::vector<double> ly;
    for (const SweepPoint& pt : rep.per_N) {
        if (!(pt.mc.output.mean > 0))
            throw guard_error("counterexample: degenerate statistics (zero mean norm); "
                              "the family is empty at this size");
        ly.push_back(std::log(pt.mc.output.mean) / p);
    }
    const LineFit fit = ols(lx, ly);
    rep.fitted_exponent = fit.slope;
    rep.fit_residual = fit.residual;
    for (int slot = 0; slot < m; ++slot) {
        std::vector<double> li;
        for (const SweepPoint& pt : rep.per_N)
            li.push_back(std::log(pt.mc.inputs[slot].mean) / p_in[slot]);
        rep.fitted_input_exponents.push_back(ols(lx, li).slope);
    }

    rep.exponent_target = family == Family::single_bump ? 1.0 / p - m : 1.0 / p - 0.5;
    rep.sigma_exponent_basis = family == Family::single_bump ? s - m / r : s;
    double input_sum = 0.0;
    for (int slot = 0; slot < m; ++slot)
        if (family != Family::mixed_k || slot < k)
            input_sum += rep.fitted_input_exponents[slot];
    rep.gap = rep.fitted_exponent - rep.sigma_exponent_basis - input_sum;
    switch (family) {
        case Family::bilinear_sigmaN: rep.gap_threshold = (0.5 - s) - 0.1; break;
        case Family::mlinear_sigmaN: rep.gap_threshold = ((m - 1) / 2.0 - s) - 0.1; break;
        case Family::single_bump: rep.gap_threshold = (m / r - s) - 0.1; break;
        case Family::mixed_k: rep.gap_threshold = 0.1; break;
    }
    rep.verdict = family == Family::mixed_k ? rep.gap <= rep.gap_threshold
                                            : rep.gap >= rep.gap_threshold;
    return rep;
}

}  // namespace bfm
