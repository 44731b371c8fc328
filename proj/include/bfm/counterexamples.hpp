#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bfm/grid.hpp"
#include "bfm/multiplier.hpp"

namespace bfm {

/// Scaling families for the necessity experiments: random-sign bump sums
/// whose operator, input and symbol norms follow power laws in the size N.
/// Fitted exponents of those laws demonstrate the sharpness constraints on
/// the smoothness index s.

/// Deterministic +-1 source: one independent Rademacher family per formal
/// sign variable, keyed by (family, index) through a splitmix64-style hash of
/// (seed, family, index). Lookups are pure, order-free and reproducible.
/// `overrides` pins selected signs explicitly (tests enumerate small sign
/// spaces exhaustively through it); untabled entries fall back to the hash.
struct RademacherDraw {
    std::uint64_t seed = 0;
    std::map<std::pair<int, long long>, int> overrides;

    /// -1 or +1.
    int sign(int family, long long index) const;
};

/// Per-sample seed for Monte-Carlo sample `sample` under a master seed; the
/// stated splittable scheme (two splitmix64 rounds) keeps samples
/// independent and aggregation order-free.
std::uint64_t sample_seed(std::uint64_t master, long long sample);

/// The four families. Names are the CLI vocabulary:
///   bilinear_sigmaN  signed bump sums f_N, g_N against the signed window
///                    symbol (m = 2);
///   mlinear_sigmaN   the m = 3 analogue on the aliased single-cell lane;
///   single_bump      one bump per operand at frequency 1, deterministic;
///   mixed_k          symmetric-range variant with k signed slots and m - k
///                    unsigned ones; the operator output is k-independent.
enum class Family { bilinear_sigmaN, mlinear_sigmaN, single_bump, mixed_k };

const char* family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

/// Bump geometry. Units below are u = N xi - j (bump-local frequency).
///   narrow   f-bumps of radius 1/100, plateaus 1 on |u| <= 1/20 vanishing
///            beyond 1/10; needs frequency spacing <= 1/(300 N).
///   widened  the same shapes scaled to radius 1/8 and plateau 1/8 -> 1/4.
///            All disjointness and sign structure is preserved, and the
///            stock extent L = 8 N keeps the discretization self-similar in
///            N, so fitted exponents are comparable across N and across
///            modes (the two modes are cross-checked at equal N in tests).
enum class BumpMode { narrow, widened };

/// Closed integer sign window [ceil(9N/10), floor(11N/10)] on j_1+...+j_m.
std::pair<int, int> c_window(int N);

/// Verifies the operand grid can host a size-N family:
///   - bump centers j/N sit on frequency gridpoints (L an integer multiple
///     of N);
///   - narrow mode resolves the bump radius (L >= 300 N); widened mode needs
///     L >= 8 N so the plateau spans at least one cell each side;
///   - m = 2 families keep every contributing output frequency inside
///     Nyquist (M/(2L) >= 1.1 m + 0.1);
///   - m = 3 runs on the aliased lane: L <= M <= 32 with single-cell bumps
///     (centers remain distinct mod M), evaluated by direct summation, so
///     no Nyquist margin is required. narrow mode is rejected for m = 3.
/// Throws guard_error on violation.
void check_resolution(int N, int m, const TorusGrid& grid, BumpMode mode);

/// Stock operand grid: (1, 8N, 40N) for m = 2 widened, (1, 300N, 1380N) for
/// m = 2 narrow, (1, N, 32) for the m = 3 lane.
TorusGrid default_grid(int N, int m, BumpMode mode);

/// Signed/unsigned bump sum on the frequency side, returned space-side:
///   fhat(xi) = sum_{j in J} sign_j phi^((N xi - j) / radius),
/// J = [1, N] (symmetric = false) or [-N, N] (symmetric = true), with
/// sign_j = draw.sign(var, j) when with_signs, else +1. The profile is the
/// compact Schwartz-class bump; radius per `mode`.
SampledFunction build_fN(int N, int var, bool with_signs, bool symmetric,
                         const RademacherDraw& draw, const TorusGrid& grid,
                         BumpMode mode);

/// Bilinear window symbol on the plane dual to the operand grid:
///   sigma(xi1, xi2) = sum_{j,k in J, c_{j+k}=1} s1(j) s2(k) s3(j+k)
///                     theta(N xi1 - j) theta(N xi2 - k),
/// theta the plateau of `mode`, s_i = draw.sign(var_i, .); the window signs
/// use var3 and the factor signs var1/var2 cancel against signed operands.
/// J as in build_fN. Plateau supports are pairwise disjoint, every sample is
/// a single bump value, and max |sigma| = 1 whenever the window is nonempty.
Symbol build_sigmaN(int N, const RademacherDraw& draw, const TorusGrid& operand_grid,
                    BumpMode mode, int var1 = 1, int var2 = 2, int var3 = 3,
                    bool symmetric = false, int signed_slots = 2);

/// m = 3 analogue as a dense m-linear array on the dual axis; entries live at
/// aliased center triples and carry s1(j1) s2(j2) s3(j3) s4(j1+j2+j3).
MultiSymbol build_sigmaN_mlinear(int N, int m, const RademacherDraw& draw,
                                 const TorusGrid& operand_grid, BumpMode mode);

/// One realized experiment: operands, symbol and window of a family at size
/// N. `seed` is the master seed; the stored draw is sample_seed(seed, sample).
/// Sign variable conventions: window signs use variable m+1 (variable 0 for
/// mixed_k), operand slot i uses variable i+1; mixed_k signs slots 0..k-1 and
/// leaves the rest unsigned; single_bump carries no signs at all.
struct CounterexampleInstance {
    Family family = Family::bilinear_sigmaN;
    int N = 8, m = 2, k = 2;
    BumpMode mode = BumpMode::widened;
    TorusGrid grid;                  // 1-D operand grid
    std::uint64_t seed = 0;          // master seed
    long long sample = 0;            // which Monte-Carlo sample this is
    std::vector<double> p_in;        // input Lebesgue exponents p_1..p_m
    int c_lo = 0, c_hi = 0;          // sign window on the center sum
    std::vector<SampledFunction> functions;  // f_1..f_m, space side
    std::optional<Symbol> symbol;            // m == 2
    std::optional<MultiSymbol> msymbol;      // m == 3
};

/// Builds the instance for (family, N, m, k) at one Monte-Carlo sample.
/// k is ignored except by mixed_k (where 0 <= k <= m). p_in must carry m
/// exponents. Throws guard_error via check_resolution, parameter_error on
/// inconsistent arguments.
CounterexampleInstance build_instance(Family family, int N, int m, int k,
                                      BumpMode mode, const TorusGrid& grid,
                                      std::uint64_t seed,
                                      const std::vector<double>& p_in,
                                      long long sample = 0);

/// Deterministic one-bump-per-slot instance: fhat_i = phi^(N(xi - 1)/radius),
/// sigma the product plateau at center (1, ..., 1). The operator output is
/// exactly the pointwise product of the inputs.
CounterexampleInstance build_single_bump(int N, int m, const std::vector<double>& p_in,
                                         const TorusGrid& grid, BumpMode mode);

/// Symmetric-range instance with the first k slots signed and the rest
/// unsigned; the symbol carries the window signs plus the slot signs of the
/// signed inputs only, so the operator output is independent of k.
CounterexampleInstance build_mixed(int N, int m, int k, std::uint64_t seed,
                                   const std::vector<double>& p_in,
                                   const TorusGrid& grid, BumpMode mode,
                                   long long sample = 0);

/// Exact operator output from the family's closed form: the common bump
/// envelope to the m-th power times the window-signed trigonometric sum with
/// lattice multiplicities (product of the inputs for single_bump). Oracle
/// for apply_bilinear / apply_mlinear_bruteforce to near machine precision.
SampledFunction closed_form_T(const CounterexampleInstance& inst);

/// Number of tuples (j_1..j_m) in J^m with j_1+...+j_m = l; J = [1,N] or
/// [-N,N].
long long lattice_count(int N, int m, bool symmetric, long long l);

/// Quadrature mass sum |f|^p * cell = ||f||_p^p; valid for every p > 0
/// (Hoelder products of input exponents drop below 1, where lp_norm's
/// guard would reject).
double lp_mass(const SampledFunction& f, double p);

struct McStat {
    double mean = 0.0;
    double std_err = 0.0;  // standard error of the mean; 0 when S == 1
};

/// Monte-Carlo report: statistics of ||T(f_1..f_m)||_p^p and of each input
/// ||f_i||_{p_i}^{p_i} over S independent draws.
struct McReport {
    double p = 1.0;
    int samples = 0;
    McStat output;
    std::vector<McStat> inputs;
};

/// Runs S samples of the instance's family (sample i rebuilt under
/// sample_seed(seed, i)), evaluating T honestly through the multiplier
/// (FFT path for m = 2, direct summation for m = 3). Deterministic given the
/// instance's master seed. Statistical use expects S >= 8; S >= 1 is
/// accepted so a single evaluation stays expressible (std_err 0 at S = 1).
McReport mc_norm(const CounterexampleInstance& inst, double p, int S);

struct SweepPoint {
    int N = 0;
    McReport mc;
    double sigma_sup = 0.0;            // max sample modulus of the symbol
    std::optional<double> sobolev;     // mean over min(S,8) draws; m == 2 only
    std::optional<double> hormander;   // mean over min(S,2) draws, on request
};

/// Scaling fit plus the necessity verdict for one family.
///
/// fitted_exponent: ordinary least squares slope of log mean-norm
/// (mean of ||T||_p^p to the power 1/p) against log N; fit_residual is the
/// root-mean-square residual. fitted_input_exponents likewise per input.
///
/// The verdict compares the fitted operator exponent against the symbol
/// growth basis plus the fitted exponents of the inputs that scale with N
/// (every slot, except the unsigned mixed_k slots whose norms stay bounded):
///   gap = fitted_exponent - sigma_exponent_basis - sum(scaling input fits)
/// with basis s for the window families (symbol norm grows like N^s) and
/// s - m/r for single_bump (norm decays below N^s by the bump volume).
/// Pass rule: gap >= gap_threshold, where the threshold is
///   (1/2 - s) - 0.1        bilinear_sigmaN,
///   ((m-1)/2 - s) - 0.1    mlinear_sigmaN,
///   (m/r - s) - 0.1        single_bump;
/// mixed_k instead reproduces the upper bound: pass iff gap <= 0.1
/// (unsigned inputs have bounded norms and enter the chain as constants).
struct ScalingReport {
    Family family = Family::bilinear_sigmaN;
    int m = 2, k = 2;
    BumpMode mode = BumpMode::widened;
    std::uint64_t seed = 0;
    int samples = 0;
    double p = 1.0;
    std::vector<double> p_in;
    double r = 2.0, s = 0.5;
    std::vector<int> N_list;
    std::vector<SweepPoint> per_N;
    double exponent_target = 0.0;  // 1/p - 1/2; 1/p - m for single_bump
    double fitted_exponent = 0.0;
    double fit_residual = 0.0;
    std::vector<double> fitted_input_exponents;
    double sigma_exponent_basis = 0.0;
    double gap = 0.0;
    double gap_threshold = 0.0;
    bool verdict = false;
};

/// Full sweep: per-N Monte-Carlo statistics and symbol norms on the stock
/// grids, exponent fits, and the necessity verdict. Requires at least 3
/// sizes (fit degeneracy otherwise); every N must pass check_resolution.
/// with_hormander adds the dilation-sup norm column (m == 2 only; slower).
ScalingReport scaling_sweep(Family family, int m, int k, BumpMode mode,
                            const std::vector<int>& N_list, int S,
                            const std::vector<double>& p_in, double p, double r,
                            double s, std::uint64_t seed, bool with_hormander = false);

}  // namespace bfm
