#pragma once

#include <map>
#include <optional>

#include "bfm/grid.hpp"
#include "bfm/multiplier.hpp"
#include "bfm/wavelets.hpp"

namespace bfm {

// Sobolev L^r_s norm: lp_norm(((1 + 4 pi^2 |z|^2)^{s/2} sigma^)_inverse, r).
// The support box must stay within the central half of the torus so the
// periodized Bessel kernel does not truncate; a box covering the whole torus
// is allowed and is interpreted in the global periodic sense.
double sobolev_norm(const Symbol& sigma, double r, double s);

// Triebel-Lizorkin F^s_{r,q} norm via the dyadic frequency partition; the
// j = 0 bin collects the entire low-frequency telescope, and j is truncated
// at the grid's Nyquist scale.
double tl_norm(const Symbol& sigma, double r, double q, double s);

// Sequence-space f^s_{r,q} norm of analyzed coefficients: gamma = 2^lambda a,
// cube indicators of side 2^{1-lambda} centered at the wavelet positions.
double sequence_norm(const WaveletCoeffs& coeffs, double r, double q, double s);

struct NormReport {
    double r = 2.0, s = 0.0;
    std::optional<double> sobolev;  // absent when the box violates the margin rule
    double hormander = 0.0;         // max of per_j
    std::map<int, double> per_j;    // j -> sobolev norm of sigma(2^j .) psi^
};

// Hormander-type norm: sup over dyadic dilates j of the Sobolev norm of the
// annulus-localized piece sigma(2^j .) psi^. The jrange must cover every
// dilate whose piece is nonzero; the two-argument form derives it from the
// support box.
NormReport hormander_norm(const Symbol& sigma, double r, double s);
NormReport hormander_norm(const Symbol& sigma, double r, double s, int jmin, int jmax);

}  // namespace bfm
