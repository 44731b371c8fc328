#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "bfm/grid.hpp"
#include "bfm/multiplier.hpp"
#include "bfm/wavelets.hpp"

namespace bfm {

// L^r norm of a sampled tensor wavelet at the given level (translate
// independent), and the one-axis factor it is a product of.
double wavelet_axis_lr_norm(const WaveletSystem& ws, int lambda, int gender,
                            const TorusGrid& plane, double r);
double wavelet_lr_norm(const WaveletSystem& ws, int lambda, int g1, int g2,
                       const TorusGrid& plane, double r);

// subclass key: (g1, g2, mu1 mod Q, mu2 mod Q) with Q the residue modulus
using SubclassKey = std::array<int, 4>;

// Level-lambda coefficients split into classes whose member wavelets have
// pairwise disjoint sampled supports.
struct SubclassPartition {
    int lambda = 0;
    int modulus = 2;  // per-axis support length + 1
    int ell = 0;
    int order = 1;
    TorusGrid plane;
    std::array<double, 2> box_lo{}, box_hi{};
    std::map<SubclassKey, std::vector<std::pair<WaveletIndex, cplx>>> classes;  // a-coefficients
    std::size_t size() const;
};

SubclassPartition partition_subclasses(const WaveletCoeffs& coeffs, int lambda,
                                       const WaveletSystem& ws);

// position of a class key in the partition's sorted class list (CSV id)
int kappa_id(const SubclassPartition& part, const SubclassKey& kappa);

// One dyadic cell of the coefficient level set of a kappa-class, split into
// the heavy-column part and the remainder. Coefficients here are the
// renormalized b = a * ||wavelet||_{L^r}.
struct LevelSetSplit {
    int lambda = 0;
    SubclassKey kappa{};
    double r = 2.0;
    int tau = 0;
    int tau_max = 0;
    double K = 1.0;  // heavy-column threshold 2^{tau r / 2}
    double B = 0.0;  // l^r budget of the class
    int gamma = 0;   // distinct heavy first indices
    int ell = 0;
    int order = 1;
    TorusGrid plane;
    std::array<double, 2> box_lo{}, box_hi{};
    std::vector<std::pair<WaveletIndex, cplx>> heavy, light;
    std::size_t size() const { return heavy.size() + light.size(); }
};

// Cell boundaries: tau < tau_max holds B 2^-tau < |b| <= B 2^{-tau+1}; the
// tau_max cell takes everything below; each member lands in its first
// matching cell by ascending tau (|b| = B lands in tau = 1).
LevelSetSplit level_set_split(const SubclassPartition& part, const SubclassKey& kappa,
                              int tau, double r);

enum class PieceKind { heavy, light };

// Sampled symbol of one piece, using L^r-normalized wavelets; heavy + light
// summed over all tau cells rebuilds the kappa-class part of the symbol.
Symbol reconstruct_piece(const LevelSetSplit& split, PieceKind which,
                         const WaveletSystem& ws);

struct RatioRecord {
    int lambda = 0;
    int kappa = 0;
    int tau = 0;
    int gamma = 0;
    double K = 1.0;
    double ratio_rows = 0.0, ratio_cols = 0.0, ratio_imp = 0.0;
    bool degenerate = false;  // some denominator vanished; its ratio reads 0
};

// Measured operator bounds of one level-set cell against the dyadic budgets:
// rows uses gamma^{1/2} 2^{-tau}, cols uses K^{1/2} 2^{-tau}, and the
// combined bound uses 2^{(r/4-1)tau}, all times sigma_norm_rs 2^{lambda(2/r-s)}.
RatioRecord verify_piece_bounds(const LevelSetSplit& split, const SampledFunction& f,
                                const SampledFunction& g, double sigma_norm_rs, double s,
                                const WaveletSystem& ws);

// Near-axis split of a level-lambda symbol piece: m2 takes second-axis
// translates with |mu2| <= 2 n_support, m3 takes |mu1| <= 2 n_support among
// the rest, m1 the remainder; the three sum to the level piece exactly.
struct AxisSplit {
    int j = 0;
    int lambda = 0;
    int n_support = 1;  // per-axis translate support length 2 * order - 1
    Symbol m1, m2, m3;
};

AxisSplit axis_split(const Symbol& mj, int j, const WaveletCoeffs& coeffs,
                     const WaveletSystem& ws, int lambda);

}  // namespace bfm
