#include "bfm/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <mutex>

namespace bfm {

TorusGrid::TorusGrid(int dim_, double L_, int M_) : dim(dim_), L(L_), M(M_) {
    if (dim != 1 && dim != 2) throw parameter_error("TorusGrid: dim must be 1 or 2");
    if (!(L > 0.0)) throw parameter_error("TorusGrid: L must be positive");
    if (M < 4 || M % 2 != 0) throw parameter_error("TorusGrid: M must be even and >= 4");
}

int TorusGrid::storage_index(long long k) const {
    long long r = k % M;
    if (r < 0) r += M;
    return static_cast<int>(r);
}

std::size_t TorusGrid::point_count() const {
    std::size_t n = static_cast<std::size_t>(M);
    return dim == 1 ? n : n * n;
}

double TorusGrid::cell(Side side) const {
    double c = side == Side::space ? spacing() : freq_spacing();
    return dim == 1 ? c : c * c;
}

bool TorusGrid::same_as(const TorusGrid& o) const {
    return dim == o.dim && M == o.M && std::abs(L - o.L) <= 1e-12 * std::max(L, o.L);
}

SampledFunction::SampledFunction(TorusGrid g, Side s)
    : grid(g), side(s), values(g.point_count()) {}

SampledFunction::SampledFunction(TorusGrid g, Side s, std::vector<cplx> v)
    : grid(g), side(s), values(std::move(v)) {
    if (values.size() != grid.point_count())
        throw parameter_error("SampledFunction: value count does not match grid");
}

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void fft_raw(std::vector<cplx>& data, int dim, int M, bool forward) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        int sign = forward ? FFTW_FORWARD : FFTW_BACKWARD;
        unsigned flags = FFTW_ESTIMATE;
        plan = dim == 1 ? fftw_plan_dft_1d(M, p, p, sign, flags)
                        : fftw_plan_dft_2d(M, M, p, p, sign, flags);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
}

SampledFunction dft_forward(const SampledFunction& f) {
    if (f.side != Side::space)
        throw guard_error("dft_forward: input must be space-side samples");
    SampledFunction F(f.grid, Side::frequency, f.values);
    fft_raw(F.values, f.grid.dim, f.grid.M, true);
    double scale = std::pow(f.grid.spacing(), f.grid.dim);
    for (auto& v : F.values) v *= scale;
    return F;
}

SampledFunction dft_inverse(const SampledFunction& F) {
    if (F.side != Side::frequency)
        throw guard_error("dft_inverse: input must be frequency-side samples");
    SampledFunction f(F.grid, Side::space, F.values);
    fft_raw(f.values, F.grid.dim, F.grid.M, false);
    double scale = std::pow(1.0 / F.grid.L, F.grid.dim);
    for (auto& v : f.values) v *= scale;
    return f;
}

double lp_norm(const SampledFunction& f, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw parameter_error("lp_norm: p must be >= 1 or infinity");
    long double acc = 0.0L;
    for (const auto& v : f.values) acc += std::pow(static_cast<long double>(std::abs(v)), p);
    acc *= f.grid.cell(f.side);
    return static_cast<double>(std::pow(acc, 1.0L / p));
}

}  // namespace bfm
