#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "bfm/errors.hpp"

namespace bfm {

using cplx = std::complex<double>;

/// Which side of the transform a sample vector lives on.
enum class Side { space, frequency };

/// Uniform periodic grid on a torus of length L with M cells per axis.
///
/// Space samples sit at x_i = s(i)*h with h = L/M; frequency samples at
/// xi_k = s(k)/L. s(i) is the signed representative: i for i < M/2, i-M
/// otherwise (natural DFT storage order).
struct TorusGrid {
    int dim = 1;      // 1 or 2
    double L = 8.0;   // torus length per axis
    int M = 256;      // samples per axis, even, >= 4

    TorusGrid() = default;
    TorusGrid(int dim_, double L_, int M_);

    double spacing() const { return L / M; }        // space-side cell
    double freq_spacing() const { return 1.0 / L; } // frequency-side cell
    double nyquist() const { return M / (2.0 * L); }

    /// Signed index: 0,1,...,M/2-1,-M/2,...,-1 in storage order.
    int signed_index(int i) const { return i < M / 2 ? i : i - M; }
    /// Storage index of a signed index (reduces mod M).
    int storage_index(long long k) const;

    double coord(int i) const { return signed_index(i) * spacing(); }
    double freq(int i) const { return signed_index(i) / L; }

    /// Number of points per axis (dim 1: M; dim 2: values are M x M row-major).
    std::size_t point_count() const;

    /// Cell measure of one side's quadrature.
    double cell(Side side) const;

    bool same_as(const TorusGrid& o) const;

    /// Grid whose space samples coincide with this grid's frequency samples.
    TorusGrid dual() const { return TorusGrid(dim, M / L, M); }
};

/// Sample vector attached to one side of a grid. dim-2 data is row-major:
/// values[i1*M + i2].
struct SampledFunction {
    TorusGrid grid;
    Side side = Side::space;
    std::vector<cplx> values;

    SampledFunction() = default;
    SampledFunction(TorusGrid g, Side s);
    SampledFunction(TorusGrid g, Side s, std::vector<cplx> v);

    cplx& at(int i) { return values[static_cast<std::size_t>(i)]; }
    cplx& at(int i1, int i2) { return values[static_cast<std::size_t>(i1) * grid.M + i2]; }
    const cplx& at(int i) const { return values[static_cast<std::size_t>(i)]; }
    const cplx& at(int i1, int i2) const {
        return values[static_cast<std::size_t>(i1) * grid.M + i2];
    }
};

/// Forward transform: F(k/L) = h^dim * sum_x f(x) e^{-2 pi i x k / L}.
SampledFunction dft_forward(const SampledFunction& f);

/// Inverse transform: f(x) = L^-dim * sum_k F(k/L) e^{+2 pi i x k / L}.
SampledFunction dft_inverse(const SampledFunction& F);

/// Quadrature L^p norm with the side's cell measure; p = inf -> max modulus.
/// p must satisfy p >= 1 or be infinity.
double lp_norm(const SampledFunction& f, double p);

/// Unnormalized forward/backward FFT on a flat complex buffer (internal
/// plumbing shared by the norm routines; dim in {1,2}, per-axis length M).
void fft_raw(std::vector<cplx>& data, int dim, int M, bool forward);

}  // namespace bfm
