#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "bfm/bumps.hpp"
#include "bfm/decomposition.hpp"
#include "bfm/errors.hpp"
#include "bfm/grid.hpp"
#include "bfm/multiplier.hpp"
#include "bfm/norms.hpp"
#include "bfm/wavelets.hpp"
#include "doctest.h"
#include "test_family.hpp"

using namespace bfm;

namespace {

const WaveletSystem& sys6() {
    static const WaveletSystem ws = make_wavelet_system(6, 6);
    return ws;
}

// radial smooth symbol in [-2,2]^2 and its analysis, shared across cases
const Symbol& radial512() {
    static const Symbol s = families::smooth(TorusGrid(2, 16.0, 512), 2.0)[1];
    return s;
}

const WaveletCoeffs& radial_coeffs() {
    static const WaveletCoeffs c = analyze(radial512(), sys6(), 4);
    return c;
}

// random trigonometric polynomial with fhat supported in |xi| <= radius
SampledFunction random_band_limited(const TorusGrid& grid, double radius,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    SampledFunction F(grid, Side::frequency);
    for (int k = 0; k < grid.M; ++k) {
        if (std::abs(grid.freq(k)) > radius) continue;
        F.values[std::size_t(k)] = cplx(gauss(rng), gauss(rng));
    }
    return dft_inverse(F);
}

// single handmade coefficient at level lambda on the shared plane
WaveletCoeffs one_coefficient(const TorusGrid& plane, int lambda, int g1, int g2,
                              int mu1, int mu2, cplx a) {
    WaveletCoeffs coeffs;
    coeffs.plane = plane;
    coeffs.side = Side::space;
    coeffs.order = 6;
    coeffs.ell = grid_dyadic_exponent(plane);
    coeffs.lambda_max = lambda;
    coeffs.box_lo = {-4.0, -4.0};
    coeffs.box_hi = {4.0, 4.0};
    CoeffBlock blk;
    blk.lambda = lambda;
    blk.depth = coeffs.ell - lambda;
    blk.g1 = g1;
    blk.g2 = g2;
    blk.mu1 = {mu1};
    blk.mu2 = {mu2};
    blk.a = {a};
    coeffs.blocks.push_back(std::move(blk));
    return coeffs;
}

double sup_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, std::abs(a[i] - b[i]));
    return sup;
}

double sup_abs(const std::vector<cplx>& a) {
    double sup = 0.0;
    for (const cplx& v : a) sup = std::max(sup, std::abs(v));
    return sup;
}

}  // namespace

TEST_SUITE("decomposition") {

TEST_CASE("closed-form wavelet lr norms match dense quadrature") {
    const TorusGrid plane(2, 16.0, 512);
    const auto& ws = sys6();
    const SampledFunction w = tensor_wavelet(ws, WaveletIndex{3, 1, 0, 5, -7}, plane);
    for (double r : {1.5, 2.0, 4.0}) {
        CAPTURE(r);
        CHECK(wavelet_lr_norm(ws, 3, 1, 0, plane, r) ==
              doctest::Approx(lp_norm(w, r)).epsilon(1e-12));
    }
    // r = 2 is the orthonormal normalization
    CHECK(wavelet_lr_norm(ws, 2, 1, 1, plane, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(wavelet_axis_lr_norm(ws, 4, 0, plane, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("subclass partition covers the level with residue keys") {
    const auto& ws = sys6();
    const WaveletCoeffs& coeffs = radial_coeffs();
    std::size_t level3 = 0;
    for (const auto& blk : coeffs.blocks)
        if (blk.lambda == 3) level3 += blk.a.size();
    REQUIRE(level3 > 0);

    const SubclassPartition part = partition_subclasses(coeffs, 3, ws);
    CHECK(part.modulus == 12);
    CHECK(part.lambda == 3);
    CHECK(part.size() == level3);

    bool keys_ok = true;
    for (const auto& [key, members] : part.classes) {
        keys_ok &= key[2] >= 0 && key[2] < 12 && key[3] >= 0 && key[3] < 12;
        for (const auto& [idx, a] : members)
            keys_ok &= idx.lambda == 3 && idx.g1 == key[0] && idx.g2 == key[1] &&
                       ((idx.mu1 % 12) + 12) % 12 == key[2] &&
                       ((idx.mu2 % 12) + 12) % 12 == key[3];
    }
    CHECK(keys_ok);

    // class ids enumerate the sorted key list
    int id = 0;
    bool ids_ok = true;
    for (const auto& [key, members] : part.classes) ids_ok &= kappa_id(part, key) == id++;
    CHECK(ids_ok);

    // the two-tap system separates translates mod 2
    const WaveletSystem haar = make_wavelet_system(1, 6);
    CHECK(partition_subclasses(analyze(radial512(), haar, 2), 1, haar).modulus == 2);
}

TEST_CASE("same-class wavelets have disjoint sampled supports") {
    const TorusGrid plane(2, 16.0, 512);
    const auto& ws = sys6();
    const SubclassPartition part = partition_subclasses(radial_coeffs(), 3, ws);

    const auto cls = std::find_if(part.classes.begin(), part.classes.end(),
                                  [](const auto& kv) { return kv.second.size() >= 4; });
    REQUIRE(cls != part.classes.end());
    std::vector<SampledFunction> ws_samples;
    for (int i = 0; i < 4; ++i)
        ws_samples.push_back(tensor_wavelet(ws, cls->second[std::size_t(i)].first, plane));
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double overlap = 0.0;
            for (std::size_t t = 0; t < ws_samples[0].values.size(); ++t)
                overlap = std::max(overlap, std::abs(ws_samples[std::size_t(i)].values[t]) *
                                                std::abs(ws_samples[std::size_t(j)].values[t]));
            CHECK(overlap == 0.0);
        }

    // non-vacuous: adjacent translates from different classes do overlap
    const WaveletIndex a = cls->second[0].first;
    WaveletIndex b = a;
    b.mu1 += 1;
    const SampledFunction wa = tensor_wavelet(ws, a, plane);
    const SampledFunction wb = tensor_wavelet(ws, b, plane);
    double cross = 0.0;
    for (std::size_t t = 0; t < wa.values.size(); ++t)
        cross = std::max(cross, std::abs(wa.values[t]) * std::abs(wb.values[t]));
    CHECK(cross > 0.0);
}

TEST_CASE("translate sets that wrap the torus trip the overlap guard") {
    const TorusGrid plane(2, 16.0, 512);
    const auto& ws = sys6();
    const Symbol ones(plane, {-8.0, -8.0}, {8.0, 8.0},
                      std::vector<cplx>(plane.point_count(), cplx(1)));
    const WaveletCoeffs coeffs = analyze(ones, ws, 4);
    CHECK_THROWS_AS((void)partition_subclasses(coeffs, 4, ws), guard_error);
}

TEST_CASE("a single coefficient lands in the first cell with unit profile") {
    const TorusGrid plane(2, 16.0, 512);
    const auto& ws = sys6();
    const cplx a(2.5, -1.0);
    const WaveletCoeffs coeffs = one_coefficient(plane, 2, 1, 1, 5, -3, a);
    const SubclassPartition part = partition_subclasses(coeffs, 2, ws);
    REQUIRE(part.classes.size() == 1);
    const SubclassKey key{1, 1, 5, 9};  // -3 mod 12
    CHECK(kappa_id(part, key) == 0);

    const double r = 2.0;
    const double bmag = std::abs(a) * wavelet_lr_norm(ws, 2, 1, 1, plane, r);
    const LevelSetSplit s1 = level_set_split(part, key, 1, r);
    CHECK(s1.tau_max == 2);
    CHECK(s1.B == doctest::Approx(bmag).epsilon(1e-12));
    CHECK(s1.K == doctest::Approx(2.0));
    CHECK(s1.size() == 1);
    CHECK(s1.light.size() == 1);  // one member per column stays under K = 2
    CHECK(s1.gamma == 0);
    CHECK(level_set_split(part, key, 0, r).size() == 0);
    CHECK(level_set_split(part, key, 2, r).size() == 0);

    // the light piece is exactly a times the wavelet, with L^r norm B
    const Symbol piece = reconstruct_piece(s1, PieceKind::light, ws);
    const SampledFunction w = tensor_wavelet(ws, WaveletIndex{2, 1, 1, 5, -3}, plane);
    std::vector<cplx> scaled = w.values;
    for (cplx& v : scaled) v *= a;
    CHECK(sup_diff(piece.values, scaled) <= 1e-12 * sup_abs(scaled));
    CHECK(lp_norm(SampledFunction(plane, Side::space, piece.values), r) ==
          doctest::Approx(bmag).epsilon(1e-12));

    const Symbol empty = reconstruct_piece(s1, PieceKind::heavy, ws);
    CHECK(lp_norm(SampledFunction(plane, Side::space, empty.values), 2.0) == 0.0);
}

TEST_CASE("level set cells recompose the class symbol") {
    const TorusGrid plane(2, 16.0, 512);
    const auto& ws = sys6();
    const WaveletCoeffs& coeffs = radial_coeffs();
    const SubclassPartition part = partition_subclasses(coeffs, 3, ws);

    const auto cls = std::find_if(part.classes.begin(), part.classes.end(),
                                  [](const auto& kv) { return kv.second.size() >= 6; });
    REQUIRE(cls != part.classes.end());
    const double r = 2.0;

    std::size_t total = 0;
    std::vector<cplx> acc(plane.point_count(), cplx(0));
    const int tau_max = level_set_split(part, cls->first, 0, r).tau_max;
    for (int tau = 0; tau <= tau_max; ++tau) {
        const LevelSetSplit sp = level_set_split(part, cls->first, tau, r);
        total += sp.size();

        // exhaustive column law: light columns sit under K, heavy at or above
        std::map<int, int> cell_columns;
        for (const auto& [idx, b] : sp.heavy) ++cell_columns[idx.mu1];
        for (const auto& [idx, b] : sp.light) ++cell_columns[idx.mu1];
        int heavy_columns = 0;
        bool law_ok = true;
        std::map<int, int> light_columns;
        for (const auto& [idx, b] : sp.light) ++light_columns[idx.mu1];
        for (const auto& [mu1, n] : cell_columns) {
            if (static_cast<double>(n) >= sp.K) {
                ++heavy_columns;
                law_ok &= light_columns.find(mu1) == light_columns.end();
            } else {
                law_ok &= light_columns[mu1] == n;
            }
        }
        CHECK(law_ok);
        CHECK(sp.gamma == heavy_columns);

        for (PieceKind kind : {PieceKind::heavy, PieceKind::light}) {
            const Symbol p = reconstruct_piece(sp, kind, ws);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p.values[i];
        }
    }
    CHECK(total == cls->second.size());

    // direct synthesis of just this class
    WaveletCoeffs classonly;
    classonly.plane = plane;
    classonly.side = coeffs.side;
    classonly.order = coeffs.order;
    classonly.ell = coeffs.ell;
    classonly.lambda_max = 3;
    classonly.box_lo = coeffs.box_lo;
    classonly.box_hi = coeffs.box_hi;
    CoeffBlock blk;
    blk.lambda = 3;
    blk.depth = coeffs.ell - 3;
    blk.g1 = cls->first[0];
    blk.g2 = cls->first[1];
    for (const auto& [idx, a] : cls->second) {
        blk.mu1.push_back(idx.mu1);
        blk.mu2.push_back(idx.mu2);
    }
    std::sort(blk.mu1.begin(), blk.mu1.end());
    blk.mu1.erase(std::unique(blk.mu1.begin(), blk.mu1.end()), blk.mu1.end());
    std::sort(blk.mu2.begin(), blk.mu2.end());
    blk.mu2.erase(std::unique(blk.mu2.begin(), blk.mu2.end()), blk.mu2.end());
    blk.a.assign(blk.mu1.size() * blk.mu2.size(), cplx(0));
    for (const auto& [idx, a] : cls->second) {
        const auto j1 = std::size_t(std::lower_bound(blk.mu1.begin(), blk.mu1.end(), idx.mu1) -
                                    blk.mu1.begin());
        const auto j2 = std::size_t(std::lower_bound(blk.mu2.begin(), blk.mu2.end(), idx.mu2) -
                                    blk.mu2.begin());
        blk.a[j1 * blk.mu2.size() + j2] = a;
    }
    classonly.blocks.push_back(std::move(blk));
    const Symbol direct = synthesize(classonly, ws, plane);
    CHECK(sup_diff(acc, direct.values) <= 1e-9 * sup_abs(direct.values));
}

TEST_CASE("heavy column count stays within the level-set budget") {
    const auto& ws = sys6();
    SubclassPartition part = partition_subclasses(radial_coeffs(), 4, ws);

    // three most populated classes
    std::vector<SubclassKey> keys;
    for (const auto& [key, members] : part.classes) keys.push_back(key);
    std::sort(keys.begin(), keys.end(), [&](const SubclassKey& x, const SubclassKey& y) {
        return part.classes.at(x).size() > part.classes.at(y).size();
    });
    keys.resize(3);
    REQUIRE(part.classes.at(keys[2]).size() >= 8);

    const double r = 2.0;
    std::mt19937_64 rng(404);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool bound_ok = true;
    bool saw_heavy = false;
    for (int trial = 0; trial < 100; ++trial) {
        // fresh coefficients; a few random columns carry boosted weight so
        // heavy columns actually occur
        for (auto& [key, members] : part.classes) {
            std::vector<int> columns;
            for (auto& [idx, a] : members) {
                a = cplx(gauss(rng), gauss(rng));
                columns.push_back(idx.mu1);
            }
            std::sort(columns.begin(), columns.end());
            columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
            std::vector<int> boosted;
            for (int c : columns)
                if (unif(rng) < 0.25) boosted.push_back(c);
            for (auto& [idx, a] : members)
                if (std::binary_search(boosted.begin(), boosted.end(), idx.mu1)) a *= 100.0;
        }
        for (const SubclassKey& key : keys) {
            const int tau_max = level_set_split(part, key, 0, r).tau_max;
            for (int tau = 1; tau <= tau_max; ++tau) {
                const LevelSetSplit sp = level_set_split(part, key, tau, r);
                bound_ok &= static_cast<double>(sp.gamma) <= 4.0 * std::pow(2.0, tau * r / 2.0);
                saw_heavy |= sp.gamma > 0;
            }
        }
    }
    CHECK(bound_ok);
    CHECK(saw_heavy);
}

TEST_CASE("piece operator ratios stay bounded for a smooth symbol") {
    const TorusGrid grid(1, 32.0, 512);
    const TorusGrid plane = symbol_plane(grid);
    REQUIRE(plane.same_as(TorusGrid(2, 16.0, 512)));
    const auto& ws = sys6();
    const Symbol& sigma = radial512();
    const SampledFunction f = random_band_limited(grid, 1.0, 11);
    const SampledFunction g = random_band_limited(grid, 1.0, 12);
    const double r = 2.0, s = 0.75;
    const double snorm = sobolev_norm(sigma, r, s);
    REQUIRE(snorm > 0.0);

    const WaveletCoeffs& coeffs = radial_coeffs();
    bool finite_ok = true;
    double worst = 0.0;
    for (int lambda : {1, 2, 3}) {
        const SubclassPartition part = partition_subclasses(coeffs, lambda, ws);
        std::vector<SubclassKey> keys;
        for (const auto& [key, members] : part.classes) keys.push_back(key);
        REQUIRE(keys.size() >= 3);
        const std::size_t step = keys.size() / 3;
        for (std::size_t pick = 0; pick < 3; ++pick) {
            const SubclassKey key = keys[pick * step];
            const int tau_max = level_set_split(part, key, 0, r).tau_max;
            for (int tau = 0; tau <= tau_max; ++tau) {
                const LevelSetSplit sp = level_set_split(part, key, tau, r);
                if (sp.size() == 0) continue;
                const RatioRecord rec = verify_piece_bounds(sp, f, g, snorm, s, ws);
                finite_ok &= std::isfinite(rec.ratio_imp) && rec.ratio_imp >= 0.0;
                if (sp.gamma == 0) {
                    finite_ok &= rec.degenerate && rec.ratio_rows == 0.0;
                } else {
                    finite_ok &= std::isfinite(rec.ratio_rows);
                }
                worst = std::max(worst, rec.ratio_imp);
            }
        }
    }
    CHECK(finite_ok);
    CHECK(worst > 0.0);
    CHECK(worst <= 50.0);  // the combined-bound budget; measured 4e-5 here
}

TEST_CASE("axis split separates translates near each frequency axis") {
    const TorusGrid plane(2, 16.0, 512);
    const auto& ws = sys6();

    // bump well away from both axes: no near-axis translates survive
    const Symbol off = Symbol::from_function(
        plane, {1.9, 1.9}, {3.0, 3.0}, [](double x, double y) {
            return cplx(schwartz_profile((x - 2.45) / 0.55) * schwartz_profile((y - 2.45) / 0.55),
                        0.0);
        });
    const WaveletCoeffs oc = analyze(off, ws, 4);
    const AxisSplit osp = axis_split(off, 0, oc, ws, 4);
    CHECK(osp.n_support == 11);
    CHECK(osp.lambda == 4);
    CHECK(sup_abs(osp.m2.values) == 0.0);
    CHECK(sup_abs(osp.m3.values) == 0.0);
    CHECK(sup_abs(osp.m1.values) > 0.0);

    // radial symbol meets both axes and splits three ways, summing exactly
    const WaveletCoeffs& coeffs = radial_coeffs();
    const AxisSplit sp = axis_split(radial512(), 0, coeffs, ws, 4);
    CHECK(sup_abs(sp.m2.values) > 0.0);
    CHECK(sup_abs(sp.m3.values) > 0.0);

    WaveletCoeffs level = coeffs;
    std::erase_if(level.blocks, [](const CoeffBlock& blk) { return blk.lambda != 4; });
    const Symbol direct = synthesize(level, ws, plane);
    std::vector<cplx> sum = sp.m1.values;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += sp.m2.values[i] + sp.m3.values[i];
    CHECK(sup_diff(sum, direct.values) <= 1e-10 * sup_abs(direct.values));
}

TEST_CASE("near-axis piece tensorizes into one-dimensional multipliers") {
    const TorusGrid grid(1, 32.0, 512);
    const TorusGrid plane = symbol_plane(grid);
    const auto& ws = sys6();
    const int lambda = 4;
    const int d = grid_dyadic_exponent(plane) - lambda;
    const WaveletCoeffs& coeffs = radial_coeffs();
    const AxisSplit sp = axis_split(radial512(), 0, coeffs, ws, lambda);

    const SampledFunction f = random_band_limited(grid, 1.0, 21);
    const SampledFunction g = random_band_limited(grid, 1.0, 22);
    const SampledFunction lhs = apply_bilinear(sp.m2, f, g);
    const SampledFunction fhat = dft_forward(f);
    const SampledFunction ghat = dft_forward(g);
    const SampledFunction maxg = hl_maximal(g);

    const int T = 2 * sp.n_support;
    const double rooth = std::sqrt(plane.spacing());
    const auto axis_wavelet = [&](int gender, int mu) {
        const auto u = filterbank_vector(ws, d, gender == 1);
        std::vector<cplx> w(std::size_t(grid.M), cplx(0));
        for (std::size_t t = 0; t < u.size(); ++t) {
            const int cell = (((mu * (1 << d)) + int(t)) % grid.M + grid.M) % grid.M;
            w[std::size_t(cell)] = u[t] / rooth;
        }
        return w;
    };

    std::vector<cplx> rhs(std::size_t(grid.M), cplx(0));
    double dom_worst = 0.0;
    for (const auto& blk : coeffs.blocks) {
        if (blk.lambda != lambda) continue;
        for (std::size_t j2 = 0; j2 < blk.mu2.size(); ++j2) {
            if (std::abs(blk.mu2[j2]) > T) continue;
            std::vector<cplx> m1d(std::size_t(grid.M), cplx(0));
            for (std::size_t j1 = 0; j1 < blk.mu1.size(); ++j1) {
                const cplx a = blk.at(j1, j2);
                if (a == cplx(0)) continue;
                const auto wk = axis_wavelet(blk.g1, blk.mu1[j1]);
                for (std::size_t i = 0; i < rhs.size(); ++i) m1d[i] += a * wk[i];
            }
            const auto wl = axis_wavelet(blk.g2, blk.mu2[j2]);
            SampledFunction Fm(grid, Side::frequency), Gw(grid, Side::frequency);
            for (std::size_t i = 0; i < rhs.size(); ++i) {
                Fm.values[i] = m1d[i] * fhat.values[i];
                Gw.values[i] = wl[i] * ghat.values[i];
            }
            const SampledFunction Tf = dft_inverse(Fm);
            const SampledFunction Tg = dft_inverse(Gw);
            for (std::size_t i = 0; i < rhs.size(); ++i)
                rhs[i] += Tf.values[i] * Tg.values[i];

            // one wavelet multiplier sits under the maximal average of g,
            // with the level's 2^{-lambda/2} amplitude
            for (std::size_t i = 0; i < rhs.size(); ++i) {
                const double m = std::abs(maxg.values[i]);
                if (m <= 0.0) continue;
                dom_worst = std::max(dom_worst, std::abs(Tg.values[i]) /
                                                    (std::pow(2.0, -lambda / 2.0) * m));
            }
        }
    }
    CHECK(sup_diff(lhs.values, rhs) <= 1e-10 * sup_abs(lhs.values));
    CHECK(dom_worst > 0.0);
    CHECK(dom_worst <= 12.0);  // measured 7.94 for this seed pair
}

TEST_CASE("class budgets sit under the level square norm") {
    // multiscale coefficients on levels >= 1 only: the level-0 wavelets span
    // the whole torus and would force a global box, which the class partition
    // rejects; a 32-long torus keeps the padded box inside the central half
    const TorusGrid plane(2, 32.0, 1024);
    const auto& ws = sys6();
    const double r = 2.0, s = 0.75;
    const Symbol shape = families::smooth(plane, 2.0)[1];
    WaveletCoeffs coeffs = analyze(shape, ws, 4);
    std::erase_if(coeffs.blocks, [](const CoeffBlock& blk) { return blk.lambda == 0; });
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (CoeffBlock& blk : coeffs.blocks) {
        const double amp = std::pow(2.0, -blk.lambda * (s + 1.0));
        for (cplx& a : blk.a) a = cplx(amp * unif(rng), amp * unif(rng));
    }
    const Symbol sigma = synthesize(coeffs, ws, plane);
    const double snorm = sobolev_norm(sigma, r, s);
    REQUIRE(snorm > 0.0);
    for (int lambda : {1, 2, 3, 4}) {
        CAPTURE(lambda);
        const double lsn = level_square_norm(coeffs, ws, lambda, r);
        const SubclassPartition part = partition_subclasses(coeffs, lambda, ws);
        double max_budget = 0.0;
        for (const auto& [key, members] : part.classes)
            max_budget = std::max(max_budget, level_set_split(part, key, 0, r).B);
        CHECK(max_budget > 0.0);
        CHECK(max_budget <= lsn * (1 + 1e-9));
        // 2^{s lambda}-rescaled level norms stay level against the symbol
        // norm (measured 0.19 down to 0.086 across these four levels)
        const double chained = lsn * std::pow(2.0, s * lambda) / snorm;
        CHECK(chained < 1.0);
    }
}

TEST_CASE("dyadic operand bands overlap at most lambda plus two deep") {
    const TorusGrid grid(1, 32.0, 512);
    const int lambda = 3;
    const SampledFunction f = random_band_limited(grid, 4.0, 31);
    const SampledFunction fhat = dft_forward(f);

    bool count_ok = true;
    int deepest = 0;
    long double banded = 0.0L, plain = 0.0L;
    for (int k = 0; k < grid.M; ++k) {
        const double z = std::abs(grid.freq(k));
        const double e = std::norm(fhat.values[std::size_t(k)]) * grid.cell(Side::frequency);
        plain += e;
        if (z == 0.0) continue;
        int hits = 0;
        for (int j = -8; j <= 8; ++j)
            if (std::pow(2.0, j - lambda) <= z && z <= std::pow(2.0, j + 1)) ++hits;
        count_ok &= hits <= lambda + 2;
        deepest = std::max(deepest, hits);
        banded += hits * e;
    }
    CHECK(count_ok);
    CHECK(deepest == lambda + 2);  // attained at dyadic radii
    CHECK(static_cast<double>(banded) <=
          (lambda + 2) * static_cast<double>(plain) * (1 + 1e-12));
    // frequency-side energy is the squared L^2 norm
    CHECK(static_cast<double>(plain) ==
          doctest::Approx(std::pow(lp_norm(f, 2.0), 2)).epsilon(1e-10));
}

TEST_CASE("guards reject bad decomposition parameters") {
    const TorusGrid plane(2, 16.0, 512);
    const auto& ws = sys6();
    const WaveletCoeffs coeffs = one_coefficient(plane, 2, 1, 1, 5, -3, cplx(1));
    const SubclassPartition part = partition_subclasses(coeffs, 2, ws);
    const SubclassKey key{1, 1, 5, 9};

    CHECK_THROWS_AS((void)partition_subclasses(coeffs, 3, ws), parameter_error);
    CHECK_THROWS_AS((void)level_set_split(part, key, -1, 2.0), parameter_error);
    CHECK_THROWS_AS((void)level_set_split(part, key, 3, 2.0), parameter_error);
    CHECK_THROWS_AS((void)level_set_split(part, key, 1, 0.5), parameter_error);
    CHECK_THROWS_AS((void)kappa_id(part, SubclassKey{0, 0, 0, 0}), parameter_error);
    CHECK_THROWS_AS((void)wavelet_axis_lr_norm(ws, 5, 0, plane, 2.0), parameter_error);
    CHECK_THROWS_AS((void)wavelet_axis_lr_norm(ws, 2, 0, plane, 0.5), parameter_error);
    CHECK_THROWS_AS((void)axis_split(radial512(), 0, coeffs, ws, 3), parameter_error);

    const TorusGrid other(2, 16.0, 256);
    const Symbol mismatched = Symbol::from_function(
        other, {-1.0, -1.0}, {1.0, 1.0}, [](double, double) { return cplx(0); });
    CHECK_THROWS_AS((void)axis_split(mismatched, 0, coeffs, ws, 2), guard_error);
}

}  // TEST_SUITE
