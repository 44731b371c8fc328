#pragma once

#include <array>
#include <compare>
#include <vector>

#include "bfm/grid.hpp"
#include "bfm/multiplier.hpp"

namespace bfm {

/// Lowpass (scaling) filter of the minimal-phase compactly supported
/// orthonormal family with `order` vanishing moments: 2*order taps,
/// sum = sqrt(2), discrete orthogonality sum_t h_t h_{t+2m} = delta_m to
/// better than 1e-12. Computed by spectral factorization of the binomial
/// half-band polynomial in extended precision. pre: 1 <= order <= 10.
std::vector<double> daubechies_filters(int order);

/// Alternating-flip highpass companion g_t = (-1)^t h_{2K-1-t}; the pair
/// (psi_F, psi_M) built from (h, g) is supported in [0, 2*order-1].
std::vector<double> highpass_from(const std::vector<double>& h);

/// Scaling/wavelet pair sampled on the dyadic grid j*2^-depth,
/// j = 0 .. (2*order-1)*2^depth, plus the defining filters.
struct WaveletSystem {
    int order = 6;
    std::vector<double> lowpass;   // h, 2*order taps
    std::vector<double> highpass;  // g
    int depth = 10;                // sample spacing 2^-depth
    std::vector<double> psiF, psiM;
    int iterations = 0;    // cascade fixed-point iterations used
    double residual = 0.0; // final sup change relative to sup |psiF|
};

/// Build filters and run the cascade at the given depth. pre: depth >= 6.
WaveletSystem make_wavelet_system(int order = 6, int depth = 10);

/// Re-run the two-scale fixed-point iteration at a new depth. The iteration
/// runs on the fixed grid j*2^-depth (which the map x -> 2x - k preserves),
/// seeded with the iterated-filter-bank samples, until the sup change drops
/// below 1e-8 relative; non-convergence raises guard_error.
WaveletSystem cascade(const WaveletSystem& base, int depth);

/// Iterated synthesis-filter-bank vector at the given depth: S^depth(delta)
/// for the father, S^(depth-1)(G delta) for the mother, where
/// (S v)[t] = sum_k h_{t-2k} v[k] and likewise G with the highpass. These
/// vectors are exactly orthonormal in l2 under translation by 2^depth, at
/// every depth, which is what makes the discrete frame below exact.
std::vector<double> filterbank_vector(const WaveletSystem& ws, int depth, bool mother);

/// Tap count of filterbank_vector: (2*order-1)*(2^depth - 1) + 1.
int wavelet_taps(int order, int depth);

/// One tensor wavelet 2^lambda Psi^G(2^lambda x - mu) on a dyadic plane:
/// gender 0 = father (F), 1 = mother (M); (0,0) only occurs at the coarsest
/// analyzed level. mu is a signed translation, reduced modulo the L*2^lambda
/// distinct torus translates.
struct WaveletIndex {
    int lambda = 0;
    int g1 = 0, g2 = 0;
    int mu1 = 0, mu2 = 0;
    friend auto operator<=>(const WaveletIndex&, const WaveletIndex&) = default;
};

/// Coefficients of one (lambda, g1, g2) block over the translates kept by the
/// support-box restriction; a is mu1.size() x mu2.size(), row-major.
struct CoeffBlock {
    int lambda = 0;
    int depth = 0;  // ell - lambda
    int g1 = 0, g2 = 0;
    std::vector<int> mu1, mu2;  // ascending signed translates
    std::vector<cplx> a;

    const cplx& at(std::size_t j1, std::size_t j2) const { return a[j1 * mu2.size() + j2]; }
};

/// Full analysis record: blocks for lambda = 0..lambda_max with genders
/// (F,F) at lambda = 0 only and (F,M), (M,F), (M,M) at every level; only
/// translates whose sampled support meets the symbol's support box appear
/// (the omitted coefficients are exactly zero).
struct WaveletCoeffs {
    TorusGrid plane;
    Side side = Side::space;
    int order = 6;
    int ell = 0;  // grid spacing 2^-ell
    int lambda_max = 0;
    std::array<double, 2> box_lo{}, box_hi{};
    std::vector<CoeffBlock> blocks;

    /// sum over all stored coefficients of |a|^2 (Parseval check).
    double energy() const;
    std::size_t size() const;
};

/// The dyadic exponent ell with grid spacing exactly 2^-ell (ell >= 1 and
/// 2^ell divides M required); guard_error otherwise.
int grid_dyadic_exponent(const TorusGrid& grid);

/// Samples of the indexed tensor wavelet on the plane's space side.
/// pre: dyadic plane; the level's filter-bank support fits (taps <= M);
/// 0 <= lambda <= ell-1.
SampledFunction tensor_wavelet(const WaveletSystem& ws, const WaveletIndex& idx,
                               const TorusGrid& grid2d);

/// All inner products <sigma, Psi_omega> for lambda <= lambda_max, by exact
/// grid quadrature, restricted to translates meeting sigma's support box.
/// pre: lambda_max <= ell-1 (the finest level keeps one filter-bank stage).
WaveletCoeffs analyze(const Symbol& sigma, const WaveletSystem& ws, int lambda_max);

/// sum_omega a_omega Psi_omega on the plane. With lambda_max = ell-1 the
/// system is a complete orthonormal basis, so synthesize(analyze(s)) == s to
/// machine precision for s supported in its box.
Symbol synthesize(const WaveletCoeffs& coeffs, const WaveletSystem& ws,
                  const TorusGrid& grid2d);

/// || (sum_{G,mu at level lambda} |a Psi|^2)^(1/2) ||_{L^r} by quadrature.
double level_square_norm(const WaveletCoeffs& coeffs, const WaveletSystem& ws,
                         int lambda, double r);

}  // namespace bfm
