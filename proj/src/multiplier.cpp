#include "bfm/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bfm/errors.hpp"

namespace bfm {

namespace {

// Relative cutoff when scanning a transformed operand for its frequency band;
// inverse-transform round-off sits many orders below this.
constexpr double kBandCutoff = 1e-13;

void check_dual(const TorusGrid& plane, const TorusGrid& operand, const char* who) {
    if (plane.M != operand.M ||
        std::abs(plane.L - double(operand.M) / operand.L) > 1e-9 * plane.L)
        throw guard_error(std::string(who) + ": symbol grid is not dual to the operand grid");
}

// Signed index range where |F| exceeds kBandCutoff * max|F|; {1, 0} if none.
std::pair<int, int> nonzero_band(const SampledFunction& F) {
    double peak = 0.0;
    for (const auto& v : F.values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return {1, 0};
    const double cut = kBandCutoff * peak;
    const int M = F.grid.M;
    int lo = M, hi = -M;
    for (int i = 0; i < M; ++i) {
        if (std::abs(F.values[std::size_t(i)]) > cut) {
            int k = F.grid.signed_index(i);
            lo = std::min(lo, k);
            hi = std::max(hi, k);
        }
    }
    return {lo, hi};
}

void check_box(const TorusGrid& grid, const std::vector<double>& lo,
               const std::vector<double>& hi, const std::vector<cplx>& values) {
    const int dim = int(lo.size());
    for (int a = 0; a < dim; ++a) {
        if (!(lo[a] <= hi[a]))
            throw parameter_error("symbol: support box has lo > hi");
        if (lo[a] < -grid.L / 2 || hi[a] > grid.L / 2)
            throw parameter_error("symbol: support box exceeds the torus");
    }
    const double slack = 1e-9 * grid.spacing();
    const int M = grid.M;
    std::size_t n = values.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(values[i]) == 0.0) continue;
        std::size_t rest = i;
        for (int a = dim - 1; a >= 0; --a) {
            const int idx = int(rest % std::size_t(M));
            rest /= std::size_t(M);
            const double z = grid.signed_index(idx) * grid.spacing();
            if (z < lo[std::size_t(a)] - slack || z > hi[std::size_t(a)] + slack)
                throw guard_error("symbol: nonzero sample outside the declared support box");
        }
    }
}

std::pair<int, int> box_band(const TorusGrid& grid, double lo, double hi) {
    const double h = grid.spacing();
    const double slack = 1e-9 * h;
    int kmin = int(std::ceil((lo - slack) / h));
    int kmax = int(std::floor((hi + slack) / h));
    kmin = std::max(kmin, -grid.M / 2);
    kmax = std::min(kmax, grid.M / 2 - 1);
    return {kmin, kmax};
}

}  // namespace

TorusGrid symbol_plane(const TorusGrid& operand_grid) {
    if (operand_grid.dim != 1)
        throw parameter_error("symbol_plane: operand grid must be one-dimensional");
    return TorusGrid(2, operand_grid.M / operand_grid.L, operand_grid.M);
}

TorusGrid symbol_axis(const TorusGrid& operand_grid) {
    if (operand_grid.dim != 1)
        throw parameter_error("symbol_axis: operand grid must be one-dimensional");
    return TorusGrid(1, operand_grid.M / operand_grid.L, operand_grid.M);
}

Symbol::Symbol(TorusGrid plane_, std::array<double, 2> lo_, std::array<double, 2> hi_,
               std::vector<cplx> values_)
    : plane(plane_), lo(lo_), hi(hi_), values(std::move(values_)) {
    if (plane.dim != 2) throw parameter_error("Symbol: plane must be two-dimensional");
    if (values.size() != plane.point_count())
        throw parameter_error("Symbol: value count does not match plane");
    check_box(plane, {lo[0], lo[1]}, {hi[0], hi[1]}, values);
}

Symbol Symbol::from_function(const TorusGrid& plane, std::array<double, 2> lo,
                             std::array<double, 2> hi,
                             const std::function<cplx(double, double)>& fn) {
    if (plane.dim != 2) throw parameter_error("Symbol: plane must be two-dimensional");
    std::vector<cplx> vals(plane.point_count(), cplx(0));
    const int M = plane.M;
    for (int i1 = 0; i1 < M; ++i1) {
        const double z1 = plane.coord(i1);
        if (z1 < lo[0] || z1 > hi[0]) continue;
        for (int i2 = 0; i2 < M; ++i2) {
            const double z2 = plane.coord(i2);
            if (z2 < lo[1] || z2 > hi[1]) continue;
            vals[std::size_t(i1) * std::size_t(M) + std::size_t(i2)] = fn(z1, z2);
        }
    }
    return Symbol(plane, lo, hi, std::move(vals));
}

std::pair<int, int> Symbol::band(int axis) const {
    return box_band(plane, lo[std::size_t(axis)], hi[std::size_t(axis)]);
}

MultiSymbol::MultiSymbol(int m_, TorusGrid axis_, std::vector<double> lo_,
                         std::vector<double> hi_, std::vector<cplx> values_)
    : m(m_), axis(axis_), lo(std::move(lo_)), hi(std::move(hi_)), values(std::move(values_)) {
    if (m != 2 && m != 3) throw parameter_error("MultiSymbol: m must be 2 or 3");
    if (axis.dim != 1) throw parameter_error("MultiSymbol: axis grid must be one-dimensional");
    if (lo.size() != std::size_t(m) || hi.size() != std::size_t(m))
        throw parameter_error("MultiSymbol: box must have m entries per side");
    std::size_t want = 1;
    for (int a = 0; a < m; ++a) want *= std::size_t(axis.M);
    if (values.size() != want)
        throw parameter_error("MultiSymbol: value count does not match M^m");
    check_box(axis, lo, hi, values);
}

MultiSymbol MultiSymbol::from_function(
    int m, const TorusGrid& axis, std::vector<double> lo, std::vector<double> hi,
    const std::function<cplx(const std::vector<double>&)>& fn) {
    if (m != 2 && m != 3) throw parameter_error("MultiSymbol: m must be 2 or 3");
    std::size_t n = 1;
    for (int a = 0; a < m; ++a) n *= std::size_t(axis.M);
    std::vector<cplx> vals(n, cplx(0));
    std::vector<double> z(std::size_t(m), 0.0);
    const int M = axis.M;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rest = i;
        bool inside = true;
        for (int a = m - 1; a >= 0; --a) {
            z[std::size_t(a)] = axis.coord(int(rest % std::size_t(M)));
            rest /= std::size_t(M);
            if (z[std::size_t(a)] < lo[std::size_t(a)] || z[std::size_t(a)] > hi[std::size_t(a)])
                inside = false;
        }
        if (inside) vals[i] = fn(z);
    }
    return MultiSymbol(m, axis, std::move(lo), std::move(hi), std::move(vals));
}

SampledFunction apply_bilinear(const Symbol& s, const SampledFunction& f,
                               const SampledFunction& g) {
    if (f.side != Side::space || g.side != Side::space)
        throw guard_error("apply_bilinear: operands must be space-side samples");
    if (!f.grid.same_as(g.grid))
        throw guard_error("apply_bilinear: operand grids differ");
    if (f.grid.dim != 1)
        throw guard_error("apply_bilinear: operands must be one-dimensional");
    check_dual(s.plane, f.grid, "apply_bilinear");

    const SampledFunction F = dft_forward(f);
    const SampledFunction G = dft_forward(g);
    const auto [fb0, fb1] = nonzero_band(F);
    const auto [gb0, gb1] = nonzero_band(G);
    const auto [s10, s11] = s.band(0);
    const auto [s20, s21] = s.band(1);
    const int a0 = std::max(fb0, s10), a1 = std::min(fb1, s11);
    const int b0 = std::max(gb0, s20), b1 = std::min(gb1, s21);

    const int M = f.grid.M;
    SampledFunction H(f.grid, Side::frequency);
    if (a0 <= a1 && b0 <= b1) {
        if (a0 + b0 < -M / 2 || a1 + b1 > M / 2 - 1)
            throw guard_error("apply_bilinear: symbol support plus operand bands "
                              "exceeds the representable frequencies; refine the grid");
        for (int k1 = a0; k1 <= a1; ++k1) {
            const cplx Fv = F.values[std::size_t(f.grid.storage_index(k1))];
            if (std::abs(Fv) == 0.0) continue;
            const int i1 = s.plane.storage_index(k1);
            for (int k2 = b0; k2 <= b1; ++k2) {
                const cplx sv = s.at(i1, s.plane.storage_index(k2));
                if (std::abs(sv) == 0.0) continue;
                H.values[std::size_t(f.grid.storage_index(k1 + k2))] +=
                    sv * Fv * G.values[std::size_t(f.grid.storage_index(k2))];
            }
        }
        const double w = 1.0 / f.grid.L;
        for (auto& v : H.values) v *= w;
    }
    return dft_inverse(H);
}

SampledFunction apply_bilinear_bruteforce(const Symbol& s, const SampledFunction& f,
                                          const SampledFunction& g) {
    if (f.side != Side::space || g.side != Side::space)
        throw guard_error("apply_bilinear_bruteforce: operands must be space-side samples");
    if (!f.grid.same_as(g.grid))
        throw guard_error("apply_bilinear_bruteforce: operand grids differ");
    if (f.grid.dim != 1)
        throw guard_error("apply_bilinear_bruteforce: operands must be one-dimensional");
    if (f.grid.M > 64)
        throw guard_error("apply_bilinear_bruteforce: M must be <= 64");
    check_dual(s.plane, f.grid, "apply_bilinear_bruteforce");

    const SampledFunction F = dft_forward(f);
    const SampledFunction G = dft_forward(g);
    const int M = f.grid.M;
    const double L = f.grid.L;
    SampledFunction T(f.grid, Side::space);
    for (int i = 0; i < M; ++i) {
        const double x = f.grid.coord(i);
        cplx acc(0);
        for (int k1 = 0; k1 < M; ++k1) {
            const long long sk1 = f.grid.signed_index(k1);
            const cplx Fv = F.values[std::size_t(k1)];
            for (int k2 = 0; k2 < M; ++k2) {
                const cplx sv = s.at(k1, k2);
                if (std::abs(sv) == 0.0) continue;
                const long long sk2 = f.grid.signed_index(k2);
                const double phase =
                    2.0 * std::numbers::pi * x * double(sk1 + sk2) / L;
                acc += sv * Fv * G.values[std::size_t(k2)] *
                       cplx(std::cos(phase), std::sin(phase));
            }
        }
        T.values[std::size_t(i)] = acc / (L * L);
    }
    return T;
}

SampledFunction apply_mlinear_bruteforce(const MultiSymbol& s,
                                         const std::vector<SampledFunction>& fs) {
    if (int(fs.size()) != s.m)
        throw guard_error("apply_mlinear_bruteforce: operand count must equal m");
    for (const auto& f : fs) {
        if (f.side != Side::space)
            throw guard_error("apply_mlinear_bruteforce: operands must be space-side samples");
        if (!f.grid.same_as(fs[0].grid))
            throw guard_error("apply_mlinear_bruteforce: operand grids differ");
        if (f.grid.dim != 1)
            throw guard_error("apply_mlinear_bruteforce: operands must be one-dimensional");
    }
    const int M = fs[0].grid.M;
    if ((s.m == 2 && M > 64) || (s.m == 3 && M > 32))
        throw guard_error("apply_mlinear_bruteforce: grid too large for direct summation");
    check_dual(s.axis, fs[0].grid, "apply_mlinear_bruteforce");

    std::vector<SampledFunction> Fs;
    Fs.reserve(fs.size());
    for (const auto& f : fs) Fs.push_back(dft_forward(f));

    const double L = fs[0].grid.L;
    const std::size_t n = s.values.size();
    SampledFunction T(fs[0].grid, Side::space);
    for (int i = 0; i < M; ++i) {
        const double x = fs[0].grid.coord(i);
        cplx acc(0);
        for (std::size_t flat = 0; flat < n; ++flat) {
            const cplx sv = s.values[flat];
            if (std::abs(sv) == 0.0) continue;
            std::size_t rest = flat;
            cplx term = sv;
            long long ksum = 0;
            for (int a = s.m - 1; a >= 0; --a) {
                const int idx = int(rest % std::size_t(M));
                rest /= std::size_t(M);
                term *= Fs[std::size_t(a)].values[std::size_t(idx)];
                ksum += fs[0].grid.signed_index(idx);
            }
            const double phase = 2.0 * std::numbers::pi * x * double(ksum) / L;
            acc += term * cplx(std::cos(phase), std::sin(phase));
        }
        T.values[std::size_t(i)] = acc * std::pow(1.0 / L, s.m);
    }
    return T;
}

SampledFunction hl_maximal(const SampledFunction& f) {
    if (f.grid.dim != 1) throw guard_error("hl_maximal: input must be one-dimensional");
    const int M = f.grid.M;
    // prefix sums of |f| over three periods so any centered window, shifted by
    // one period, stays inside the table
    std::vector<double> pre(std::size_t(3 * M + 1), 0.0);
    for (int i = 0; i < 3 * M; ++i)
        pre[std::size_t(i + 1)] =
            pre[std::size_t(i)] + std::abs(f.values[std::size_t(i % M)]);
    const double full_mean = pre[std::size_t(M)] / M;

    SampledFunction out(f.grid, f.side);
    for (int i = 0; i < M; ++i) {
        double best = std::abs(f.values[std::size_t(i)]);  // singleton window
        for (int w = 1; 2 * w + 1 <= M; w *= 2) {
            const int a = i - w + M;  // shift into the doubled range
            const double sum = pre[std::size_t(a + 2 * w + 1)] - pre[std::size_t(a)];
            best = std::max(best, sum / (2 * w + 1));
        }
        best = std::max(best, full_mean);
        out.values[std::size_t(i)] = best;
    }
    return out;
}

}  // namespace bfm
