#include "bfm/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "bfm/errors.hpp"

namespace bfm {

namespace {

int residue(int mu, int q) {
    const int m = mu % q;
    return m < 0 ? m + q : m;
}

// filters only; the cascade samples are not needed for coefficient work
WaveletSystem filters_only(int order) {
    WaveletSystem ws;
    ws.order = order;
    ws.lowpass = daubechies_filters(order);
    ws.highpass = highpass_from(ws.lowpass);
    return ws;
}

}  // namespace

double wavelet_axis_lr_norm(const WaveletSystem& ws, int lambda, int gender,
                            const TorusGrid& plane, double r) {
    if (!(r >= 1.0)) throw parameter_error("wavelet_axis_lr_norm: r must be at least 1");
    const int ell = grid_dyadic_exponent(plane);
    if (lambda < 0 || lambda > ell - 1)
        throw parameter_error("wavelet_axis_lr_norm: lambda outside [0, ell-1]");
    const int d = ell - lambda;
    if (wavelet_taps(ws.order, d) > plane.M)
        throw guard_error("wavelet_axis_lr_norm: filter-bank support exceeds the torus");
    const double h = plane.spacing();
    const auto u = filterbank_vector(ws, d, gender == 1);
    long double s = 0.0L;
    for (double v : u) s += std::pow(std::abs(static_cast<long double>(v)), static_cast<long double>(r));
    // axis samples are h^{-1/2} u[t] with quadrature weight h per sample
    return std::pow(std::pow(h, 1.0 - r / 2.0) * static_cast<double>(s), 1.0 / r);
}

double wavelet_lr_norm(const WaveletSystem& ws, int lambda, int g1, int g2,
                       const TorusGrid& plane, double r) {
    return wavelet_axis_lr_norm(ws, lambda, g1, plane, r) *
           wavelet_axis_lr_norm(ws, lambda, g2, plane, r);
}

std::size_t SubclassPartition::size() const {
    std::size_t n = 0;
    for (const auto& [key, members] : classes) n += members.size();
    return n;
}

SubclassPartition partition_subclasses(const WaveletCoeffs& coeffs, int lambda,
                                       const WaveletSystem& ws) {
    if (lambda < 0 || lambda > coeffs.lambda_max)
        throw parameter_error("partition_subclasses: lambda outside the analyzed range");
    SubclassPartition part;
    part.lambda = lambda;
    part.modulus = 2 * ws.order;  // one more than the filter support length
    part.ell = coeffs.ell;
    part.order = ws.order;
    part.plane = coeffs.plane;
    part.box_lo = coeffs.box_lo;
    part.box_hi = coeffs.box_hi;

    std::array<std::set<int>, 2> seen;  // distinct translates per axis
    for (const auto& blk : coeffs.blocks) {
        if (blk.lambda != lambda) continue;
        for (int m : blk.mu1) seen[0].insert(m);
        for (int m : blk.mu2) seen[1].insert(m);
        for (std::size_t j1 = 0; j1 < blk.mu1.size(); ++j1)
            for (std::size_t j2 = 0; j2 < blk.mu2.size(); ++j2)
                part.classes[{blk.g1, blk.g2, residue(blk.mu1[j1], part.modulus),
                              residue(blk.mu2[j2], part.modulus)}]
                    .push_back({WaveletIndex{lambda, blk.g1, blk.g2, blk.mu1[j1], blk.mu2[j2]},
                                blk.at(j1, j2)});
    }

    // residue spacing separates same-class supports by at least one modulus
    // step, which exceeds the tap span; the only way two members of a class
    // can overlap is a support that wraps the torus back onto a classmate
    const int d = coeffs.ell - lambda;
    const int taps = wavelet_taps(ws.order, d);
    const int M = coeffs.plane.M;
    for (const auto& axis_mus : seen) {
        std::map<int, std::vector<char>> covered;  // residue -> cell bitmap
        for (int mu : axis_mus) {
            auto& cells = covered[residue(mu, part.modulus)];
            if (cells.empty()) cells.assign(static_cast<std::size_t>(M), 0);
            const int start = residue(mu, M >> d) << d;
            for (int t = 0; t < taps; ++t) {
                char& c = cells[static_cast<std::size_t>((start + t) % M)];
                if (c)
                    throw guard_error(
                        "partition_subclasses: same-class supports wrap around the torus "
                        "and overlap; restrict the symbol box or lower lambda");
                c = 1;
            }
        }
    }
    return part;
}

int kappa_id(const SubclassPartition& part, const SubclassKey& kappa) {
    int id = 0;
    for (const auto& [key, members] : part.classes) {
        if (key == kappa) return id;
        ++id;
    }
    throw parameter_error("kappa_id: no such class");
}

LevelSetSplit level_set_split(const SubclassPartition& part, const SubclassKey& kappa,
                              int tau, double r) {
    if (!(r >= 1.0)) throw parameter_error("level_set_split: r must be at least 1");
    LevelSetSplit split;
    split.lambda = part.lambda;
    split.kappa = kappa;
    split.r = r;
    split.tau_max = static_cast<int>(std::ceil(2.0 * part.lambda / r));
    if (tau < 0 || tau > split.tau_max)
        throw parameter_error("level_set_split: tau outside [0, tau_max]");
    split.tau = tau;
    split.K = std::pow(2.0, tau * r / 2.0);
    split.ell = part.ell;
    split.order = part.order;
    split.plane = part.plane;
    split.box_lo = part.box_lo;
    split.box_hi = part.box_hi;

    const auto it = part.classes.find(kappa);
    if (it == part.classes.end() || it->second.empty()) return split;

    // renormalize to b = a * ||Psi||_{L^r} and take the class l^r budget
    const WaveletSystem ws = filters_only(part.order);
    const double wnorm = wavelet_lr_norm(ws, part.lambda, kappa[0], kappa[1], part.plane, r);
    std::vector<std::pair<WaveletIndex, cplx>> members;
    long double budget = 0.0L;
    for (const auto& [idx, a] : it->second) {
        const cplx b = a * wnorm;
        members.push_back({idx, b});
        budget += std::pow(static_cast<long double>(std::abs(b)), static_cast<long double>(r));
    }
    split.B = static_cast<double>(std::pow(budget, 1.0L / static_cast<long double>(r)));

    // first matching cell by ascending tau; the last cell takes everything
    // the earlier ones left (including exact zeros)
    std::vector<std::pair<WaveletIndex, cplx>> cell;
    for (const auto& [idx, b] : members) {
        const double mag = std::abs(b);
        int assigned = split.tau_max;
        for (int t = 0; t < split.tau_max; ++t)
            if (mag > split.B * std::pow(2.0, -t) && mag <= split.B * std::pow(2.0, 1 - t)) {
                assigned = t;
                break;
            }
        if (assigned == tau) cell.push_back({idx, b});
    }

    // heavy columns: fixed first-axis translate holding at least K members
    std::map<int, int> column_count;
    for (const auto& [idx, b] : cell) ++column_count[idx.mu1];
    for (const auto& [mu1, n] : column_count)
        if (static_cast<double>(n) >= split.K) ++split.gamma;
    for (const auto& [idx, b] : cell) {
        if (static_cast<double>(column_count[idx.mu1]) >= split.K)
            split.heavy.push_back({idx, b});
        else
            split.light.push_back({idx, b});
    }
    return split;
}

Symbol reconstruct_piece(const LevelSetSplit& split, PieceKind which,
                         const WaveletSystem& ws) {
    const auto& members = which == PieceKind::heavy ? split.heavy : split.light;
    const double wnorm =
        wavelet_lr_norm(ws, split.lambda, split.kappa[0], split.kappa[1], split.plane, split.r);

    WaveletCoeffs coeffs;
    coeffs.plane = split.plane;
    coeffs.side = Side::space;
    coeffs.order = split.order;
    coeffs.ell = split.ell;
    coeffs.lambda_max = split.lambda;
    coeffs.box_lo = split.box_lo;
    coeffs.box_hi = split.box_hi;

    if (!members.empty()) {
        CoeffBlock blk;
        blk.lambda = split.lambda;
        blk.depth = split.ell - split.lambda;
        blk.g1 = split.kappa[0];
        blk.g2 = split.kappa[1];
        for (const auto& [idx, b] : members) {
            blk.mu1.push_back(idx.mu1);
            blk.mu2.push_back(idx.mu2);
        }
        std::sort(blk.mu1.begin(), blk.mu1.end());
        blk.mu1.erase(std::unique(blk.mu1.begin(), blk.mu1.end()), blk.mu1.end());
        std::sort(blk.mu2.begin(), blk.mu2.end());
        blk.mu2.erase(std::unique(blk.mu2.begin(), blk.mu2.end()), blk.mu2.end());
        blk.a.assign(blk.mu1.size() * blk.mu2.size(), cplx(0));
        for (const auto& [idx, b] : members) {
            const auto j1 = static_cast<std::size_t>(
                std::lower_bound(blk.mu1.begin(), blk.mu1.end(), idx.mu1) - blk.mu1.begin());
            const auto j2 = static_cast<std::size_t>(
                std::lower_bound(blk.mu2.begin(), blk.mu2.end(), idx.mu2) - blk.mu2.begin());
            blk.a[j1 * blk.mu2.size() + j2] = b / wnorm;  // back to analysis normalization
        }
        coeffs.blocks.push_back(std::move(blk));
    }
    return synthesize(coeffs, ws, split.plane);
}

RatioRecord verify_piece_bounds(const LevelSetSplit& split, const SampledFunction& f,
                                const SampledFunction& g, double sigma_norm_rs, double s,
                                const WaveletSystem& ws) {
    RatioRecord rec;
    rec.lambda = split.lambda;
    rec.tau = split.tau;
    rec.gamma = split.gamma;
    rec.K = split.K;

    const Symbol heavy = reconstruct_piece(split, PieceKind::heavy, ws);
    const Symbol light = reconstruct_piece(split, PieceKind::light, ws);
    const SampledFunction th = apply_bilinear(heavy, f, g);
    const SampledFunction tl = apply_bilinear(light, f, g);
    SampledFunction sum = th;
    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += tl.values[i];

    const double lvl = std::pow(2.0, split.lambda * (2.0 / split.r - s));
    const double den_rows = sigma_norm_rs * std::sqrt(static_cast<double>(split.gamma)) * lvl *
                            std::pow(2.0, -split.tau);
    const double den_cols = sigma_norm_rs * std::sqrt(split.K) * lvl * std::pow(2.0, -split.tau);
    const double den_imp =
        sigma_norm_rs * std::pow(2.0, (split.r / 4.0 - 1.0) * split.tau) * lvl;

    if (den_rows > 0.0)
        rec.ratio_rows = lp_norm(th, 1.0) / den_rows;
    else
        rec.degenerate = true;
    if (den_cols > 0.0)
        rec.ratio_cols = lp_norm(tl, 1.0) / den_cols;
    else
        rec.degenerate = true;
    if (den_imp > 0.0)
        rec.ratio_imp = lp_norm(sum, 1.0) / den_imp;
    else
        rec.degenerate = true;
    return rec;
}

AxisSplit axis_split(const Symbol& mj, int j, const WaveletCoeffs& coeffs,
                     const WaveletSystem& ws, int lambda) {
    if (!mj.plane.same_as(coeffs.plane))
        throw guard_error("axis_split: symbol plane differs from the coefficient plane");
    if (lambda < 0 || lambda > coeffs.lambda_max)
        throw parameter_error("axis_split: lambda outside the analyzed range");
    const int n_support = 2 * ws.order - 1;
    const int T = 2 * n_support;

    // three masked copies of the level-lambda blocks; other levels stay out
    const auto masked = [&](auto keep) {
        WaveletCoeffs out;
        out.plane = coeffs.plane;
        out.side = coeffs.side;
        out.order = coeffs.order;
        out.ell = coeffs.ell;
        out.lambda_max = coeffs.lambda_max;
        out.box_lo = coeffs.box_lo;
        out.box_hi = coeffs.box_hi;
        for (const auto& blk : coeffs.blocks) {
            if (blk.lambda != lambda) continue;
            CoeffBlock copy = blk;
            for (std::size_t j1 = 0; j1 < blk.mu1.size(); ++j1)
                for (std::size_t j2 = 0; j2 < blk.mu2.size(); ++j2)
                    if (!keep(blk.mu1[j1], blk.mu2[j2]))
                        copy.a[j1 * blk.mu2.size() + j2] = cplx(0);
            out.blocks.push_back(std::move(copy));
        }
        return out;
    };

    const auto near_axis1 = [&](int, int mu2) { return std::abs(mu2) <= T; };
    const auto near_axis2 = [&](int mu1, int mu2) {
        return std::abs(mu1) <= T && std::abs(mu2) > T;
    };
    const auto away = [&](int mu1, int mu2) {
        return std::abs(mu1) > T && std::abs(mu2) > T;
    };

    return AxisSplit{j, lambda, n_support, synthesize(masked(away), ws, mj.plane),
                     synthesize(masked(near_axis1), ws, mj.plane),
                     synthesize(masked(near_axis2), ws, mj.plane)};
}

}  // namespace bfm
