#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "bfm/errors.hpp"
#include "bfm/grid.hpp"
#include "bfm/multiplier.hpp"
#include "bfm/norms.hpp"
#include "bfm/wavelets.hpp"
#include "doctest.h"
#include "test_family.hpp"

using namespace bfm;

namespace {

Symbol annulus_symbol(const TorusGrid& plane, double inner = 0.55, double outer = 1.9) {
    return Symbol::from_function(plane, {-outer, -outer}, {outer, outer},
        [=](double x, double y) {
            const double rad = std::hypot(x, y);
            if (rad <= inner || rad >= outer) return cplx(0);
            const double t = (rad - inner) / (outer - inner);  // smooth radial plateau
            return cplx(std::exp(1.0 - 1.0 / (1.0 - (2.0 * t - 1.0) * (2.0 * t - 1.0))), 0.0);
        });
}

// sigma(2x) by exact stride sampling; the support box halves
Symbol dilate_by_two(const Symbol& sigma) {
    const TorusGrid& plane = sigma.plane;
    const int M = plane.M;
    std::vector<cplx> vals(sigma.values.size(), cplx(0));
    for (int i1 = 0; i1 < M; ++i1)
        for (int i2 = 0; i2 < M; ++i2) {
            const long long s1 = 2LL * plane.signed_index(i1);
            const long long s2 = 2LL * plane.signed_index(i2);
            if (std::llabs(s1) > M / 2 - 1 || std::llabs(s2) > M / 2 - 1) continue;
            vals[std::size_t(i1) * std::size_t(M) + std::size_t(i2)] =
                sigma.values[std::size_t(plane.storage_index(s1)) * std::size_t(M) +
                             std::size_t(plane.storage_index(s2))];
        }
    return Symbol(plane, {sigma.lo[0] / 2, sigma.lo[1] / 2},
                  {sigma.hi[0] / 2, sigma.hi[1] / 2}, std::move(vals));
}

}  // namespace

TEST_SUITE("norms") {

TEST_CASE("s = 0 reduces to the plain lp norm") {
    const TorusGrid plane(2, 8.0, 256);
    const auto fam = families::smooth(plane, 1.5);
    for (double r : {1.5, 2.0, 3.0}) {
        CAPTURE(r);
        const double direct = lp_norm(SampledFunction(plane, Side::space, fam[2].values), r);
        CHECK(sobolev_norm(fam[2], r, 0.0) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("a torus character is an eigenfunction of the Bessel multiplier") {
    const TorusGrid plane(2, 8.0, 256);
    const double k1 = 0.375, k2 = -0.25;  // multiples of 1/L
    std::vector<cplx> vals(std::size_t(plane.point_count()));
    for (int i1 = 0; i1 < plane.M; ++i1)
        for (int i2 = 0; i2 < plane.M; ++i2) {
            const double ph = 2.0 * std::numbers::pi *
                              (plane.coord(i1) * k1 + plane.coord(i2) * k2);
            vals[std::size_t(i1) * 256 + std::size_t(i2)] = cplx(std::cos(ph), std::sin(ph));
        }
    const Symbol sigma(plane, {-4.0, -4.0}, {4.0, 4.0}, std::move(vals));  // global mode
    for (auto [r, s] : {std::pair{2.5, 0.8}, std::pair{2.0, 0.0}, std::pair{1.5, 1.5}}) {
        CAPTURE(r);
        CAPTURE(s);
        const double bessel = std::pow(1.0 + 4.0 * std::numbers::pi * std::numbers::pi *
                                                 (k1 * k1 + k2 * k2),
                                       s / 2);
        const double want = bessel * std::pow(plane.L * plane.L, 1.0 / r);
        CHECK(sobolev_norm(sigma, r, s) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("sobolev_norm is monotone in s") {
    const TorusGrid plane(2, 8.0, 256);
    for (const auto& sigma : families::smooth(plane, 1.8)) {
        double prev = 0.0;
        for (double s : {0.0, 0.3, 0.75, 1.1, 1.5}) {
            const double cur = sobolev_norm(sigma, 2.0, s);
            CHECK(cur >= prev * (1.0 - 1e-12));
            prev = cur;
        }
    }
}

TEST_CASE("margin rule rejects large proper support boxes only") {
    const TorusGrid plane(2, 8.0, 256);
    const auto big = Symbol::from_function(plane, {-3.0, -3.0}, {3.0, 3.0},
        [](double x, double y) {
            return cplx((std::abs(x) < 3.0 && std::abs(y) < 3.0) ? 1.0 : 0.0, 0.0);
        });
    CHECK_THROWS_AS(sobolev_norm(big, 2.0, 0.5), guard_error);
    CHECK_THROWS_AS(tl_norm(big, 2.0, 2.0, 0.5), guard_error);

    const auto edge = families::smooth(plane, 2.0)[0];  // box exactly the central half
    CHECK(sobolev_norm(edge, 2.0, 0.5) > 0.0);
}

TEST_CASE("parameter guards") {
    const TorusGrid plane(2, 8.0, 256);
    const auto sigma = families::smooth(plane, 1.5)[0];
    CHECK_THROWS_AS(sobolev_norm(sigma, 1.0, 0.5), parameter_error);
    CHECK_THROWS_AS(sobolev_norm(sigma, 2.0, -0.1), parameter_error);
    CHECK_THROWS_AS(tl_norm(sigma, 2.0, 0.5, 0.5), parameter_error);
    const auto ws = make_wavelet_system(2, 6);
    const auto coeffs = analyze(sigma, ws, 2);
    CHECK_THROWS_AS(sequence_norm(coeffs, 0.9, 2.0, 0.5), parameter_error);
}

TEST_CASE("tl_norm of the zero symbol is zero") {
    const TorusGrid plane(2, 8.0, 256);
    std::vector<cplx> vals(std::size_t(plane.point_count()), cplx(0));
    const Symbol zero(plane, {-1.0, -1.0}, {1.0, 1.0}, std::move(vals));
    CHECK(tl_norm(zero, 2.0, 2.0, 0.7) == 0.0);
}

TEST_CASE("tl at r = q = 2 is comparable to the sobolev norm") {
    // the dyadic weights 2^{2js} track the Bessel weight (1+4pi^2|z|^2)^s only
    // up to (2pi)^{2s}, so the equivalence window widens as s grows
    const TorusGrid plane(2, 8.0, 256);
    for (const auto& sigma : families::smooth(plane, 1.8)) {
        for (auto [s, floor_] : {std::pair{0.3, 0.25}, std::pair{0.75, 0.25 / 16.0}}) {
            CAPTURE(s);
            const double a = tl_norm(sigma, 2.0, 2.0, s);
            const double b = sobolev_norm(sigma, 2.0, s);
            const double ratio = (a * a) / (b * b);
            CHECK(ratio > floor_);
            CHECK(ratio < 4.0);
        }
    }
}

TEST_CASE("tl dilation covariance at s = 0, r = q = 2") {
    // modulation pushes the spectrum away from the low-frequency plateau,
    // where the squared partition is not dilation covariant
    const TorusGrid plane(2, 16.0, 1024);
    const auto sigma = Symbol::from_function(plane, {-2.0, -2.0}, {2.0, 2.0},
        [](double x, double y) {
            const double rad = std::hypot(x, y) / 2.0;
            const double b = rad < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - rad * rad)) : 0.0;
            const double ph = 2.0 * std::numbers::pi * 12.0 * x;
            return cplx(b * std::cos(ph), b * std::sin(ph));
        });
    const auto half = dilate_by_two(sigma);
    const double a = tl_norm(half, 2.0, 2.0, 0.0);
    const double b = tl_norm(sigma, 2.0, 2.0, 0.0);
    CHECK(a == doctest::Approx(0.5 * b).epsilon(5e-3));
}

TEST_CASE("sequence_norm closed form for a single coefficient") {
    const TorusGrid plane(2, 8.0, 256);
    const auto ws = make_wavelet_system(2, 6);
    const int lambda = 2;
    const cplx c(0.75, -1.0);
    const auto w = tensor_wavelet(ws, {lambda, 1, 1, 3, -5}, plane);
    std::vector<cplx> vals(w.values.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = c * w.values[i];
    const Symbol sigma(plane, {-4.0, -4.0}, {4.0, 4.0}, std::move(vals));
    const auto coeffs = analyze(sigma, ws, 4);
    for (auto [r, q, s] : {std::tuple{2.0, 2.0, 0.6}, std::tuple{4.0, 1.5, 0.0},
                           std::tuple{1.5, 3.0, 1.2}}) {
        CAPTURE(r);
        const double gamma = std::ldexp(std::abs(c), lambda);
        const double vol = std::pow(2.0, 2.0 * (1.0 - lambda));
        const double want = std::pow(2.0, lambda * s) * gamma * std::pow(vol, 1.0 / r);
        CHECK(sequence_norm(coeffs, r, q, s) == doctest::Approx(want).epsilon(1e-10));
    }
    CHECK(sequence_norm(WaveletCoeffs{plane, Side::space, 2, 5, 4, {}, {}, {}}, 2.0, 2.0,
                        0.5) == 0.0);
}

TEST_CASE("sequence_norm is equivalent to the sobolev norm on smooth symbols") {
    const TorusGrid plane(2, 16.0, 512);
    const auto ws = make_wavelet_system(6, 8);
    double lo = 1e300, hi = 0.0;
    for (const auto& sigma : families::smooth(plane, 2.0)) {
        const auto coeffs = analyze(sigma, ws, 4);
        const double ratio =
            sequence_norm(coeffs, 2.0, 2.0, 0.75) / sobolev_norm(sigma, 2.0, 0.75);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.05);             // bounded below
    CHECK(hi < 20.0);             // bounded above
    CHECK(hi / lo < 25.0);        // family-wide spread stays moderate
}

TEST_CASE("hormander norm sees only the dilates meeting the annulus") {
    const TorusGrid plane(2, 8.0, 256);
    const auto sigma = annulus_symbol(plane);
    const auto rep = hormander_norm(sigma, 2.0, 0.75);
    REQUIRE(rep.sobolev.has_value());
    CHECK(rep.hormander > 0.0);
    for (const auto& [j, v] : rep.per_j) {
        CAPTURE(j);
        if (j >= -1 && j <= 1)
            CHECK(v > 0.0);
        else
            CHECK(v == 0.0);
    }
    CHECK(rep.per_j.count(-1) == 1);
    CHECK(rep.per_j.count(1) == 1);
}

TEST_CASE("hormander per-j values shift under exact dilation") {
    const TorusGrid plane(2, 8.0, 256);
    const auto sigma = annulus_symbol(plane);
    const auto half = dilate_by_two(sigma);
    const auto ra = hormander_norm(sigma, 2.0, 0.6);
    const auto rb = hormander_norm(half, 2.0, 0.6);
    // strides are exact for j >= 0 on both sides of the reindexing
    CHECK(rb.per_j.at(0) == doctest::Approx(ra.per_j.at(1)).epsilon(1e-12));
    // interpolated negative dilates agree to the interpolation error; the
    // deepest pair compares interpolants at different effective resolutions
    CHECK(rb.per_j.at(-1) == doctest::Approx(ra.per_j.at(0)).epsilon(1e-4));
    CHECK(rb.per_j.at(-2) == doctest::Approx(ra.per_j.at(-1)).epsilon(1e-2));
    CHECK(rb.hormander == doctest::Approx(ra.hormander).epsilon(1e-4));
}

TEST_CASE("hormander coverage error lists the missing dilate") {
    const TorusGrid plane(2, 8.0, 256);
    const auto sigma = annulus_symbol(plane);
    bool threw = false;
    try {
        hormander_norm(sigma, 2.0, 0.5, 0, 2);
    } catch (const guard_error& e) {
        threw = true;
        CHECK(std::string(e.what()).find("-1") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("hormander handles zero symbols and margin-violating boxes") {
    const TorusGrid plane(2, 8.0, 256);
    std::vector<cplx> vals(std::size_t(plane.point_count()), cplx(0));
    const Symbol zero(plane, {-1.0, -1.0}, {1.0, 1.0}, vals);
    const auto rz = hormander_norm(zero, 2.0, 0.5);
    CHECK(rz.hormander == 0.0);
    CHECK(rz.per_j.empty());

    // support reaching outside the central half: per-dilate norms still fine,
    // but the symbol's own sobolev norm is unavailable
    const auto wide = Symbol::from_function(plane, {-3.0, -3.0}, {3.0, 3.0},
        [](double x, double y) {
            const double rad = std::hypot(x, y);
            return cplx((rad > 2.2 && rad < 2.9) ? 1.0 : 0.0, 0.0);
        });
    const auto rw = hormander_norm(wide, 2.0, 0.5);
    CHECK_FALSE(rw.sobolev.has_value());
    CHECK(rw.hormander > 0.0);
}

}  // TEST_SUITE
