#include "bfm/bumps.hpp"

#include <cmath>

#include "bfm/errors.hpp"

namespace bfm {

double schwartz_profile(double t) {
    const double t2 = t * t;
    if (t2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t2));
}

double smooth_ramp(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

double plateau_profile(double t, double inner, double outer) {
    const double a = std::abs(t);
    if (a <= inner) return 1.0;
    if (a >= outer) return 0.0;
    return smooth_ramp((outer - a) / (outer - inner));
}

double torus_distance(double z, double c, double extent) {
    double d = std::fmod(z - c, extent);
    if (d < -extent / 2) d += extent;
    if (d >= extent / 2) d -= extent;
    return std::abs(d);
}

namespace {

// Euclidean distance from the sample point with flat index i to the origin,
// each coordinate wrapped into the fundamental domain.
double radial_coord(const TorusGrid& grid, Side side, std::size_t i) {
    const double extent = (side == Side::space) ? grid.L : double(grid.M) / grid.L;
    if (grid.dim == 1) {
        const double z = (side == Side::space) ? grid.coord(int(i)) : grid.freq(int(i));
        return torus_distance(z, 0.0, extent);
    }
    const int i1 = int(i) / grid.M;
    const int i2 = int(i) % grid.M;
    const double z1 = (side == Side::space) ? grid.coord(i1) : grid.freq(i1);
    const double z2 = (side == Side::space) ? grid.coord(i2) : grid.freq(i2);
    const double d1 = torus_distance(z1, 0.0, extent);
    const double d2 = torus_distance(z2, 0.0, extent);
    return std::hypot(d1, d2);
}

double side_spacing(const TorusGrid& grid, Side side) {
    return (side == Side::space) ? grid.spacing() : grid.freq_spacing();
}

}  // namespace

SampledFunction schwartz_bump(const TorusGrid& grid, Side side) {
    const double radius = 0.01;
    if (side_spacing(grid, side) > radius / 3)
        throw guard_error("schwartz_bump: grid does not resolve the support "
                          "radius 1/100 (need cell spacing <= 1/300)");
    SampledFunction f{grid, side, std::vector<cplx>(grid.point_count())};
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = schwartz_profile(radial_coord(grid, side, i) / radius);
    return f;
}

SampledFunction plateau_bump(const TorusGrid& grid, double inner, double outer,
                             Side side) {
    if (!(0.0 < inner && inner < outer))
        throw parameter_error("plateau_bump: need 0 < inner < outer");
    if (side_spacing(grid, side) > outer / 3)
        throw guard_error("plateau_bump: grid does not resolve the outer "
                          "radius (need cell spacing <= outer/3)");
    SampledFunction f{grid, side, std::vector<cplx>(grid.point_count())};
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = plateau_profile(radial_coord(grid, side, i), inner, outer);
    return f;
}

SampledFunction lp_low(const TorusGrid& grid, int j, Side side) {
    const double scale = std::ldexp(1.0, -j);
    SampledFunction f{grid, side, std::vector<cplx>(grid.point_count())};
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = plateau_profile(scale * radial_coord(grid, side, i), 1.0, 2.0);
    return f;
}

std::vector<SampledFunction> lp_partition(const TorusGrid& grid, int jmin, int jmax,
                                          Side side) {
    if (jmin > jmax) throw parameter_error("lp_partition: need jmin <= jmax");
    // The smallest annulus has inner edge 2^(jmin-1); require 3 cells per edge
    // radius so no piece collapses to a single sample.
    if (side_spacing(grid, side) > std::ldexp(1.0, jmin - 1) / 3)
        throw guard_error("lp_partition: grid does not resolve scale jmin");
    std::vector<SampledFunction> pieces;
    pieces.reserve(std::size_t(jmax - jmin + 1));
    SampledFunction prev = lp_low(grid, jmin - 1, side);
    for (int j = jmin; j <= jmax; ++j) {
        SampledFunction cur = lp_low(grid, j, side);
        SampledFunction piece{grid, side, std::vector<cplx>(grid.point_count())};
        for (std::size_t i = 0; i < piece.values.size(); ++i)
            piece.values[i] = cur.values[i] - prev.values[i];
        pieces.push_back(std::move(piece));
        prev = std::move(cur);
    }
    return pieces;
}

}  // namespace bfm
