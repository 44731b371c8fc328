#pragma once

#include <vector>

#include "bfm/grid.hpp"

namespace bfm {

/// Smooth compactly supported profiles used to assemble symbols, frequency
/// envelopes and dyadic partitions. All profiles are even, take values in
/// [0,1], and are exactly zero outside their stated support.

/// exp(1 - 1/(1-t^2)) on |t| < 1, zero outside; peak value 1 at t = 0.
double schwartz_profile(double t);

/// C^inf ramp: 0 for u <= 0, 1 for u >= 1, strictly increasing between.
double smooth_ramp(double u);

/// Radial plateau: 1 on |t| <= inner, 0 on |t| >= outer, smooth monotone ramp.
double plateau_profile(double t, double inner, double outer);

/// Distance from z to c on a circle of circumference extent.
double torus_distance(double z, double c, double extent);

/// Samples of the compact Schwartz-class bump with support radius 1/100,
/// normalized to peak 1, taken at the chosen side's sample points.
/// pre: at least 3 cells per support radius (cell spacing <= 1/300).
SampledFunction schwartz_bump(const TorusGrid& grid, Side side = Side::frequency);

/// Samples of the radial plateau (1 on [-inner,inner], 0 outside
/// (-outer,outer)). pre: 0 < inner < outer, cell spacing <= outer/3.
SampledFunction plateau_bump(const TorusGrid& grid, double inner, double outer,
                             Side side = Side::space);

/// Dyadic radial partition pieces psi_j(z) = theta(2^-j z) - theta(2^(1-j) z),
/// j = jmin..jmax, where theta is the radial plateau with inner radius 1 and
/// outer radius 2. Pieces are nonnegative, each supported in the annulus
/// 2^(j-1) <= |z| <= 2^(j+1), and telescope: their sum equals
/// theta(2^-jmax z) - theta(2^(1-jmin) z), which is identically 1 on
/// 2^jmin <= |z| <= 2^jmax.
std::vector<SampledFunction> lp_partition(const TorusGrid& grid, int jmin, int jmax,
                                          Side side = Side::space);

/// theta(2^-j z) for the same profile; j may be "low" accumulator: the sum of
/// all pieces with index <= 0 collapses to theta itself.
SampledFunction lp_low(const TorusGrid& grid, int j, Side side = Side::space);

}  // namespace bfm
