#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "bfm/grid.hpp"

namespace bfm {

/// The 2D torus whose space-side sample points are exactly the frequency
/// points k/L of a 1D operand grid (L, M): extent M/L with M cells per axis.
TorusGrid symbol_plane(const TorusGrid& operand_grid);

/// 1D version, one axis of an m-linear symbol.
TorusGrid symbol_axis(const TorusGrid& operand_grid);

/// Bilinear symbol sampled on the space side of a dim-2 plane whose cell
/// spacing equals the operand frequency spacing. `lo`/`hi` give the closed
/// support box per axis in frequency units; construction verifies the samples
/// vanish outside it.
struct Symbol {
    TorusGrid plane;
    std::array<double, 2> lo{}, hi{};
    std::vector<cplx> values;

    Symbol(TorusGrid plane_, std::array<double, 2> lo_, std::array<double, 2> hi_,
           std::vector<cplx> values_);

    static Symbol from_function(const TorusGrid& plane, std::array<double, 2> lo,
                                std::array<double, 2> hi,
                                const std::function<cplx(double, double)>& fn);

    const cplx& at(int i1, int i2) const { return values[std::size_t(i1) * std::size_t(plane.M) + std::size_t(i2)]; }

    /// Signed sample-index range [first, last] covered by the support box on
    /// one axis, clamped to the representable range. first > last means empty.
    std::pair<int, int> band(int axis) const;
};

/// m-linear symbol (m = 2 or 3) sampled at (k_1/L, ..., k_m/L), row-major in
/// storage order. Same vanish-outside-box construction check as Symbol.
struct MultiSymbol {
    int m = 2;
    TorusGrid axis;  // dim-1 torus shared by every axis
    std::vector<double> lo, hi;
    std::vector<cplx> values;  // size M^m

    MultiSymbol(int m_, TorusGrid axis_, std::vector<double> lo_,
                std::vector<double> hi_, std::vector<cplx> values_);

    static MultiSymbol from_function(
        int m, const TorusGrid& axis, std::vector<double> lo, std::vector<double> hi,
        const std::function<cplx(const std::vector<double>&)>& fn);
};

/// T_sigma(f, g)(x) = (1/L^2) sum_{k1,k2} sigma(k1/L, k2/L) fhat(k1/L)
/// ghat(k2/L) e^{2 pi i x (k1+k2)/L}, evaluated via one anti-diagonal
/// accumulation in frequency plus an inverse transform (O(M^2)).
/// pre: f, g space-side on the same dim-1 grid; symbol plane dual to it; the
/// sum of the per-axis supports (symbol box intersected with the operand
/// frequency bands) stays inside [-M/2, M/2) so no output frequency wraps.
SampledFunction apply_bilinear(const Symbol& s, const SampledFunction& f,
                               const SampledFunction& g);

/// Same quantity summed directly in x with explicit exponentials, no
/// wraparound bookkeeping and no margin guard. pre: M <= 64.
SampledFunction apply_bilinear_bruteforce(const Symbol& s, const SampledFunction& f,
                                          const SampledFunction& g);

/// m-linear direct summation, (1/L^m) weight. pre: m == fs.size(), all
/// operands space-side on one grid, M <= 64 for m = 2 and M <= 32 for m = 3.
SampledFunction apply_mlinear_bruteforce(const MultiSymbol& s,
                                         const std::vector<SampledFunction>& fs);

/// Discrete centered maximal average: at each sample, the largest mean of |f|
/// over the singleton, the centered windows of half-width 2^t cells for every
/// t with 2^(t+1) + 1 <= M, and the full torus. Real-valued output on the
/// same grid/side. pre: dim 1.
SampledFunction hl_maximal(const SampledFunction& f);

}  // namespace bfm
