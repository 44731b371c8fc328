#include "bfm/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "bfm/errors.hpp"

namespace bfm {

namespace {

using cld = std::complex<long double>;

// Roots of a real polynomial (ascending coefficients) by Durand-Kerner in
// extended precision; degree is small (<= 9) so the simple iteration is fine.
std::vector<cld> poly_roots(std::vector<long double> c) {
    const std::size_t deg = c.size() - 1;
    const long double lead = c[deg];
    for (auto& v : c) v /= lead;
    auto eval = [&](cld x) {
        cld acc = c[deg];
        for (std::size_t k = deg; k-- > 0;) acc = acc * x + c[k];
        return acc;
    };
    std::vector<cld> r(deg);
    cld seed(0.4L, 0.9L), p(1.0L);
    for (auto& x : r) {
        p *= seed;
        x = p;
    }
    for (int it = 0; it < 500; ++it) {
        long double change = 0.0L;
        for (std::size_t i = 0; i < deg; ++i) {
            cld den(1.0L);
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) den *= r[i] - r[j];
            cld step = eval(r[i]) / den;
            r[i] -= step;
            change = std::max(change, std::abs(step));
        }
        if (change < 1e-30L) break;
    }
    return r;
}

}  // namespace

std::vector<double> daubechies_filters(int order) {
    if (order < 1 || order > 10)
        throw parameter_error("daubechies_filters: order must be in 1..10");
    const int K = order;

    // |m0(e^{iw})|^2 = cos^{2K}(w/2) P(sin^2(w/2)) with
    // P(y) = sum_{k<K} C(K-1+k,k) y^k. Each y-root maps to a z pair through
    // y = (2 - z - 1/z)/4; keeping the root inside the unit disk gives the
    // minimal-phase factor R, and m0 = ((1+z)/2)^K R(z), h = sqrt(2) m0.
    std::vector<cld> m0{cld(1.0L)};
    auto mul_linear = [&](cld root, cld scale) {
        std::vector<cld> out(m0.size() + 1, cld(0.0L));
        for (std::size_t i = 0; i < m0.size(); ++i) {
            out[i + 1] += m0[i];
            out[i] -= root * m0[i];
        }
        for (auto& v : out) v *= scale;
        m0 = std::move(out);
    };
    if (K > 1) {
        std::vector<long double> P(std::size_t(K), 0.0L);
        long double binom = 1.0L;
        for (int k = 0; k < K; ++k) {
            P[std::size_t(k)] = binom;
            binom = binom * (K + k) / (k + 1);
        }
        for (cld y : poly_roots(P)) {
            const cld b = 2.0L - 4.0L * y;
            const cld disc = std::sqrt(b * b - 4.0L);
            const cld z1 = (b + disc) / 2.0L, z2 = (b - disc) / 2.0L;
            // the larger root gives the standard extremal-phase coefficients
            const cld z = std::abs(z1) > std::abs(z2) ? z1 : z2;
            mul_linear(z, 1.0L / (1.0L - z));  // (z - zi)/(1 - zi), equal to 1 at z = 1
        }
    }
    for (int k = 0; k < K; ++k) mul_linear(cld(-1.0L), cld(0.5L));  // (1+z)/2

    if (m0.size() != std::size_t(2 * K))
        throw error("daubechies_filters: internal length mismatch");
    long double sum = 0.0L;
    for (const auto& v : m0) {
        if (std::abs(v.imag()) > 1e-9L)
            throw guard_error("daubechies_filters: factorization lost realness");
        sum += v.real();
    }
    const long double scale = std::sqrt(2.0L) / sum;  // pin sum h = sqrt(2)
    std::vector<double> h(m0.size());
    for (std::size_t t = 0; t < m0.size(); ++t)
        h[t] = double(m0[t].real() * scale);
    return h;
}

std::vector<double> highpass_from(const std::vector<double>& h) {
    const std::size_t n = h.size();
    std::vector<double> g(n);
    for (std::size_t t = 0; t < n; ++t)
        g[t] = (t % 2 == 0 ? 1.0 : -1.0) * h[n - 1 - t];
    return g;
}

int wavelet_taps(int order, int depth) {
    return (2 * order - 1) * ((1 << depth) - 1) + 1;
}

namespace {

// (S v)[t] = sum_k filt[t-2k] v[k]; exact l2 isometry for orthogonal filters.
std::vector<double> upsample_filter(const std::vector<double>& filt,
                                    const std::vector<double>& v) {
    const int nf = int(filt.size()), nv = int(v.size());
    std::vector<double> out(std::size_t(2 * (nv - 1) + nf), 0.0);
    for (int k = 0; k < nv; ++k) {
        const double vk = v[std::size_t(k)];
        if (vk == 0.0) continue;
        for (int t = 0; t < nf; ++t) out[std::size_t(2 * k + t)] += filt[std::size_t(t)] * vk;
    }
    return out;
}

}  // namespace

std::vector<double> filterbank_vector(const WaveletSystem& ws, int depth, bool mother) {
    if (depth < 1) throw parameter_error("filterbank_vector: depth must be >= 1");
    std::vector<double> v{1.0};
    v = upsample_filter(mother ? ws.highpass : ws.lowpass, v);
    for (int d = 1; d < depth; ++d) v = upsample_filter(ws.lowpass, v);
    return v;
}

namespace {

// Two-scale fixed-point iteration for the father samples on the fixed grid
// j 2^{-depth}, j = 0..(2K-1) 2^depth (the map x -> 2x - k preserves it).
// Each iterate is renormalized to unit quadrature integral. The fixed point
// is the exact dyadic sample vector; convergence is geometric.
std::vector<double> cascade_father(const WaveletSystem& ws, int depth, int& iters,
                                   double& resid) {
    const int K = ws.order;
    const long long step = 1LL << depth;
    const long long last = (long long)(2 * K - 1) * step;

    // seed with the iterated-filter-bank samples (already close to the limit)
    std::vector<double> v(std::size_t(last + 1), 0.0);
    {
        auto u = filterbank_vector(ws, depth, false);
        const double s = std::ldexp(1.0, depth / 2) * (depth % 2 ? std::numbers::sqrt2 : 1.0);
        for (std::size_t j = 0; j < u.size(); ++j) v[j] = s * u[j];
    }

    std::vector<double> next(v.size());
    const double tol = 1e-8;
    resid = 1.0;
    for (iters = 1; iters <= 400; ++iters) {
        for (long long j = 0; j <= last; ++j) {
            long double acc = 0.0L;
            for (int k = 0; k < 2 * K; ++k) {
                const long long src = 2 * j - k * step;
                if (src >= 0 && src <= last) acc += ws.lowpass[std::size_t(k)] * v[std::size_t(src)];
            }
            next[std::size_t(j)] = double(std::numbers::sqrt2 * acc);
        }
        long double s = 0.0L;
        for (double x : next) s += x;
        s = s * std::ldexp(1.0L, -depth);  // quadrature of the integral, exactly 1 at the fixed point
        double change = 0.0, peak = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            next[j] = double(next[j] / s);
            change = std::max(change, std::abs(next[j] - v[j]));
            peak = std::max(peak, std::abs(next[j]));
        }
        v.swap(next);
        resid = change / peak;
        if (resid < tol) return v;
    }
    throw guard_error("cascade: two-scale iteration did not converge below 1e-8");
}

std::vector<double> cascade_mother(const WaveletSystem& ws, int depth,
                                   const std::vector<double>& father) {
    const long long step = 1LL << depth;
    const long long last = (long long)(2 * ws.order - 1) * step;
    std::vector<double> psi(father.size(), 0.0);
    for (long long j = 0; j <= last; ++j) {
        long double acc = 0.0L;
        for (int k = 0; k < 2 * ws.order; ++k) {
            const long long src = 2 * j - k * step;
            if (src >= 0 && src <= last) acc += ws.highpass[std::size_t(k)] * father[std::size_t(src)];
        }
        psi[std::size_t(j)] = double(std::numbers::sqrt2 * acc);
    }
    return psi;
}

}  // namespace

WaveletSystem cascade(const WaveletSystem& base, int depth) {
    if (depth < 6) throw parameter_error("cascade: depth must be >= 6");
    WaveletSystem ws = base;
    ws.depth = depth;
    ws.psiF = cascade_father(ws, depth, ws.iterations, ws.residual);
    ws.psiM = cascade_mother(ws, depth, ws.psiF);
    return ws;
}

WaveletSystem make_wavelet_system(int order, int depth) {
    WaveletSystem ws;
    ws.order = order;
    ws.lowpass = daubechies_filters(order);
    ws.highpass = highpass_from(ws.lowpass);
    return cascade(ws, depth);
}

int grid_dyadic_exponent(const TorusGrid& grid) {
    const double h = grid.spacing();
    const int ell = int(std::lround(-std::log2(h)));
    if (ell < 1 || ell > 30 || std::abs(std::ldexp(1.0, -ell) - h) > 1e-12 * h)
        throw guard_error("grid spacing is not a dyadic 2^-ell with ell >= 1");
    if (grid.M % (1 << ell) != 0)
        throw guard_error("grid cell count is not divisible by 2^ell");
    return ell;
}

namespace {

struct LevelGeom {
    int depth;   // ell - lambda
    int taps;    // filter-bank support in cells
    int stride;  // 2^depth cells between translates
    int count;   // distinct torus translates per axis
};

LevelGeom level_geom(int order, int ell, int lambda, int M) {
    LevelGeom g;
    g.depth = ell - lambda;
    g.taps = wavelet_taps(order, g.depth);
    g.stride = 1 << g.depth;
    g.count = M / g.stride;
    return g;
}

int translate_storage(int mu, int count) {
    int m = mu % count;
    return m < 0 ? m + count : m;
}

// Signed translates whose sampled support [mu*stride, mu*stride + taps - 1]
// (mod M) meets the signed cell interval [cmin, cmax].
std::vector<int> kept_translates(const LevelGeom& g, long long cmin, long long cmax, int M) {
    std::vector<int> kept;
    const long long span = cmax - cmin;
    for (int m = 0; m < g.count; ++m) {
        const long long s = (long long)m * g.stride;
        bool hit = span >= M - 1;
        for (int rep = -1; !hit && rep <= 2; ++rep)
            hit = s <= cmax + (long long)rep * M && s + g.taps - 1 >= cmin + (long long)rep * M;
        if (hit) kept.push_back(m < (g.count + 1) / 2 ? m : m - g.count);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::pair<long long, long long> box_cells(double lo, double hi, double h) {
    const double slack = 1e-9 * h;
    return {(long long)std::ceil((lo - slack) / h), (long long)std::floor((hi + slack) / h)};
}

std::vector<std::array<int, 2>> gender_pairs(int lambda) {
    if (lambda == 0) return {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    return {{0, 1}, {1, 0}, {1, 1}};
}

}  // namespace

SampledFunction tensor_wavelet(const WaveletSystem& ws, const WaveletIndex& idx,
                               const TorusGrid& grid2d) {
    if (grid2d.dim != 2) throw parameter_error("tensor_wavelet: grid must be 2D");
    if ((idx.g1 != 0 && idx.g1 != 1) || (idx.g2 != 0 && idx.g2 != 1))
        throw parameter_error("tensor_wavelet: genders must be 0 (father) or 1 (mother)");
    const int ell = grid_dyadic_exponent(grid2d);
    if (idx.lambda < 0 || idx.lambda > ell - 1)
        throw parameter_error("tensor_wavelet: lambda outside [0, ell-1]");
    const int M = grid2d.M;
    const LevelGeom g = level_geom(ws.order, ell, idx.lambda, M);
    if (g.taps > M)
        throw parameter_error("tensor_wavelet: wavelet support does not fit the torus");

    const auto u1 = filterbank_vector(ws, g.depth, idx.g1 == 1);
    const auto u2 = filterbank_vector(ws, g.depth, idx.g2 == 1);
    std::vector<double> a1(std::size_t(M), 0.0), a2(std::size_t(M), 0.0);
    const int s1 = translate_storage(idx.mu1, g.count) * g.stride;
    const int s2 = translate_storage(idx.mu2, g.count) * g.stride;
    for (int t = 0; t < g.taps; ++t) {
        a1[std::size_t((s1 + t) % M)] += u1[std::size_t(t)];
        a2[std::size_t((s2 + t) % M)] += u2[std::size_t(t)];
    }
    const double scale = 1.0 / grid2d.spacing();  // h^{-1/2} per axis
    SampledFunction w(grid2d, Side::space);
    for (int i1 = 0; i1 < M; ++i1) {
        if (a1[std::size_t(i1)] == 0.0) continue;
        for (int i2 = 0; i2 < M; ++i2)
            w.values[std::size_t(i1) * std::size_t(M) + std::size_t(i2)] =
                scale * a1[std::size_t(i1)] * a2[std::size_t(i2)];
    }
    return w;
}

double WaveletCoeffs::energy() const {
    long double e = 0.0L;
    for (const auto& b : blocks)
        for (const auto& v : b.a) e += std::norm(v);
    return double(e);
}

std::size_t WaveletCoeffs::size() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.a.size();
    return n;
}

WaveletCoeffs analyze(const Symbol& sigma, const WaveletSystem& ws, int lambda_max) {
    const TorusGrid& plane = sigma.plane;
    const int ell = grid_dyadic_exponent(plane);
    if (lambda_max < 0 || lambda_max > ell - 1)
        throw guard_error("analyze: lambda_max exceeds the grid's dyadic resolution "
                          "(need 2^-lambda_max >= 2 * spacing)");
    const int M = plane.M;
    const double h = plane.spacing();

    WaveletCoeffs out;
    out.plane = plane;
    out.side = Side::space;
    out.order = ws.order;
    out.ell = ell;
    out.lambda_max = lambda_max;
    out.box_lo = sigma.lo;
    out.box_hi = sigma.hi;

    const auto [c1min, c1max] = box_cells(sigma.lo[0], sigma.hi[0], h);
    const auto [c2min, c2max] = box_cells(sigma.lo[1], sigma.hi[1], h);

    for (int lambda = 0; lambda <= lambda_max; ++lambda) {
        const LevelGeom g = level_geom(ws.order, ell, lambda, M);
        if (g.taps > M)
            throw guard_error("analyze: wavelet support exceeds the torus at level " +
                              std::to_string(lambda));
        const auto uF = filterbank_vector(ws, g.depth, false);
        const auto uM = filterbank_vector(ws, g.depth, true);
        const auto mu1 = kept_translates(g, c1min, c1max, M);
        const auto mu2 = kept_translates(g, c2min, c2max, M);
        const std::size_t n1 = mu1.size(), n2 = mu2.size();
        if (n1 == 0 || n2 == 0) continue;

        // contract axis 2 once per gender
        std::array<std::vector<cplx>, 2> rows;
        for (int g2 = 0; g2 < 2; ++g2) {
            const auto& u = g2 == 0 ? uF : uM;
            rows[std::size_t(g2)].assign(std::size_t(M) * n2, cplx(0));
            for (int i1 = 0; i1 < M; ++i1) {
                const cplx* src = sigma.values.data() + std::size_t(i1) * std::size_t(M);
                cplx* dst = rows[std::size_t(g2)].data() + std::size_t(i1) * n2;
                for (std::size_t j2 = 0; j2 < n2; ++j2) {
                    const int s2 = translate_storage(mu2[j2], g.count) * g.stride;
                    cplx acc(0);
                    for (int t = 0; t < g.taps; ++t) acc += u[std::size_t(t)] * src[(s2 + t) % M];
                    dst[j2] = acc;
                }
            }
        }

        for (const auto& [g1, g2] : gender_pairs(lambda)) {
            CoeffBlock blk;
            blk.lambda = lambda;
            blk.depth = g.depth;
            blk.g1 = g1;
            blk.g2 = g2;
            blk.mu1 = mu1;
            blk.mu2 = mu2;
            blk.a.assign(n1 * n2, cplx(0));
            const auto& u = g1 == 0 ? uF : uM;
            const auto& row = rows[std::size_t(g2)];
            for (std::size_t j1 = 0; j1 < n1; ++j1) {
                const int s1 = translate_storage(mu1[j1], g.count) * g.stride;
                for (std::size_t j2 = 0; j2 < n2; ++j2) {
                    cplx acc(0);
                    for (int t = 0; t < g.taps; ++t)
                        acc += u[std::size_t(t)] * row[std::size_t((s1 + t) % M) * n2 + j2];
                    blk.a[j1 * n2 + j2] = h * acc;  // h^2 quadrature times h^-1 normalization
                }
            }
            out.blocks.push_back(std::move(blk));
        }
    }
    return out;
}

Symbol synthesize(const WaveletCoeffs& coeffs, const WaveletSystem& ws,
                  const TorusGrid& grid2d) {
    if (!grid2d.same_as(coeffs.plane))
        throw guard_error("synthesize: target grid differs from the analysis plane");
    const int M = grid2d.M;
    const double h = grid2d.spacing();
    std::vector<cplx> vals(std::size_t(M) * std::size_t(M), cplx(0));

    int lambda_min = coeffs.lambda_max;
    for (const auto& blk : coeffs.blocks) lambda_min = std::min(lambda_min, blk.lambda);

    for (const auto& blk : coeffs.blocks) {
        const LevelGeom g = level_geom(ws.order, coeffs.ell, blk.lambda, M);
        const auto u1 = filterbank_vector(ws, g.depth, blk.g1 == 1);
        const auto u2 = filterbank_vector(ws, g.depth, blk.g2 == 1);
        const std::size_t n1 = blk.mu1.size(), n2 = blk.mu2.size();
        std::vector<cplx> tmp(n1 * std::size_t(M), cplx(0));
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
            cplx* dst = tmp.data() + j1 * std::size_t(M);
            for (std::size_t j2 = 0; j2 < n2; ++j2) {
                const cplx a = blk.at(j1, j2);
                if (a == cplx(0)) continue;
                const int s2 = translate_storage(blk.mu2[j2], g.count) * g.stride;
                for (int t = 0; t < g.taps; ++t) dst[(s2 + t) % M] += a * u2[std::size_t(t)];
            }
        }
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
            const int s1 = translate_storage(blk.mu1[j1], g.count) * g.stride;
            const cplx* src = tmp.data() + j1 * std::size_t(M);
            for (int t = 0; t < g.taps; ++t) {
                const double w = u1[std::size_t(t)];
                if (w == 0.0) continue;
                cplx* dst = vals.data() + std::size_t((s1 + t) % M) * std::size_t(M);
                for (int i2 = 0; i2 < M; ++i2) dst[i2] += w * src[i2];
            }
        }
    }
    const double scale = 1.0 / h;
    for (auto& v : vals) v *= scale;

    // wavelets stick out of the analysis box by at most their support length
    const double pad = (2.0 * ws.order - 1.0) * std::ldexp(1.0, -lambda_min);
    std::array<double, 2> lo, hi;
    for (int a = 0; a < 2; ++a) {
        lo[std::size_t(a)] = std::max(coeffs.box_lo[std::size_t(a)] - pad, -grid2d.L / 2);
        hi[std::size_t(a)] = std::min(coeffs.box_hi[std::size_t(a)] + pad, grid2d.L / 2);
    }
    return Symbol(grid2d, lo, hi, std::move(vals));
}

double level_square_norm(const WaveletCoeffs& coeffs, const WaveletSystem& ws,
                         int lambda, double r) {
    if (lambda < 0 || lambda > coeffs.lambda_max)
        throw parameter_error("level_square_norm: lambda outside the analyzed range");
    const int M = coeffs.plane.M;
    std::vector<double> acc(std::size_t(M) * std::size_t(M), 0.0);
    bool any = false;

    for (const auto& blk : coeffs.blocks) {
        if (blk.lambda != lambda) continue;
        any = true;
        const LevelGeom g = level_geom(ws.order, coeffs.ell, blk.lambda, M);
        auto u1 = filterbank_vector(ws, g.depth, blk.g1 == 1);
        auto u2 = filterbank_vector(ws, g.depth, blk.g2 == 1);
        for (auto& x : u1) x *= x;
        for (auto& x : u2) x *= x;
        const std::size_t n1 = blk.mu1.size(), n2 = blk.mu2.size();
        std::vector<double> tmp(n1 * std::size_t(M), 0.0);
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
            double* dst = tmp.data() + j1 * std::size_t(M);
            for (std::size_t j2 = 0; j2 < n2; ++j2) {
                const double a2 = std::norm(blk.at(j1, j2));
                if (a2 == 0.0) continue;
                const int s2 = translate_storage(blk.mu2[j2], g.count) * g.stride;
                for (int t = 0; t < g.taps; ++t) dst[(s2 + t) % M] += a2 * u2[std::size_t(t)];
            }
        }
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
            const int s1 = translate_storage(blk.mu1[j1], g.count) * g.stride;
            const double* src = tmp.data() + j1 * std::size_t(M);
            for (int t = 0; t < g.taps; ++t) {
                const double w = u1[std::size_t(t)];
                if (w == 0.0) continue;
                double* dst = acc.data() + std::size_t((s1 + t) % M) * std::size_t(M);
                for (int i2 = 0; i2 < M; ++i2) dst[i2] += w * src[i2];
            }
        }
    }
    if (!any) return 0.0;

    SampledFunction sq(coeffs.plane, Side::space);
    const double scale = 1.0 / coeffs.plane.spacing();  // sqrt of the h^-2 tensor factor
    for (std::size_t i = 0; i < acc.size(); ++i)
        sq.values[i] = scale * std::sqrt(acc[i]);
    return lp_norm(sq, r);
}

}  // namespace bfm
