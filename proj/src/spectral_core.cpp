#include "szego/spectral_core.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace szego {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }

}  // namespace

SpectralGrid::SpectralGrid(std::size_t n, double box_length) : n_(n), length_(box_length) {
    if (n < 16 || !is_power_of_two(n)) throw DimensionError("grid size must be a power of two >= 16");
    if (!(box_length > 0.0) || !std::isfinite(box_length)) throw DimensionError("box length must be positive");
    dx_ = length_ / static_cast<double>(n_);
    x_.resize(n_);
    xi_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        x_[j] = -0.5 * length_ + dx_ * static_cast<double>(j);
        xi_[j] = 2.0 * M_PI * static_cast<double>(wavenumber(j)) / length_;
    }
    cvec a(n_), b(n_);
    // FFTW_ESTIMATE keeps the plan (and therefore rounding) identical across runs.
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n_), as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_1d(static_cast<int>(n_), as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
}

SpectralGrid::~SpectralGrid() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

std::shared_ptr<const SpectralGrid> SpectralGrid::make(std::size_t n, double box_length) {
    return std::make_shared<const SpectralGrid>(n, box_length);
}

long SpectralGrid::wavenumber(std::size_t idx) const {
    const long i = static_cast<long>(idx);
    const long half = static_cast<long>(n_ / 2);
    return i < half ? i : i - static_cast<long>(n_);
}

void SpectralGrid::forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), as_fftw(in), as_fftw(out));
    // x_0 = -L/2 contributes (-1)^k relative to the plain DFT.
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k < n_; ++k) out[k] *= (k & 1U) ? -inv_n : inv_n;
}

void SpectralGrid::backward(const cplx* in, cplx* out) const {
    cvec tmp(in, in + n_);
    for (std::size_t k = 1; k < n_; k += 2) tmp[k] = -tmp[k];
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), as_fftw(tmp.data()), as_fftw(out));
}

HardyField HardyField::zero(GridPtr grid) {
    const std::size_t n = grid->size();
    return HardyField(std::move(grid), cvec(n), cvec(n));
}

HardyField HardyField::from_spectrum(GridPtr grid, cvec coeffs) {
    const std::size_t n = grid->size();
    if (coeffs.size() != n) throw DimensionError("spectrum length does not match grid");
    for (std::size_t k = 0; k < n; ++k)
        if (!grid->kept(k)) coeffs[k] = 0.0;
    cvec values(n);
    grid->backward(coeffs.data(), values.data());
    return HardyField(std::move(grid), std::move(values), std::move(coeffs));
}

HardyField HardyField::operator+(const HardyField& o) const {
    require_same_grid(*this, o);
    cvec v(values_), s(spectrum_);
    for (std::size_t j = 0; j < v.size(); ++j) {
        v[j] += o.values_[j];
        s[j] += o.spectrum_[j];
    }
    return HardyField(grid_, std::move(v), std::move(s));
}

HardyField HardyField::operator-(const HardyField& o) const {
    require_same_grid(*this, o);
    cvec v(values_), s(spectrum_);
    for (std::size_t j = 0; j < v.size(); ++j) {
        v[j] -= o.values_[j];
        s[j] -= o.spectrum_[j];
    }
    return HardyField(grid_, std::move(v), std::move(s));
}

HardyField HardyField::operator*(cplx c) const {
    cvec v(values_), s(spectrum_);
    for (std::size_t j = 0; j < v.size(); ++j) {
        v[j] *= c;
        s[j] *= c;
    }
    return HardyField(grid_, std::move(v), std::move(s));
}

void require_same_grid(const HardyField& u, const HardyField& v) {
    if (!u.grid() || !v.grid()) throw DimensionError("field has no grid");
    if (u.grid() == v.grid()) return;
    if (u.grid()->size() != v.grid()->size() || u.grid()->box_length() != v.grid()->box_length())
        throw DimensionError("fields live on different grids");
}

HardyField szego_project(const GridPtr& grid, const cvec& f) {
    const std::size_t n = grid->size();
    if (f.size() != n) throw DimensionError("sample count does not match grid");
    cvec spec(n);
    grid->forward(f.data(), spec.data());
    for (std::size_t k = 0; k < n; ++k)
        if (!grid->kept(k)) spec[k] = 0.0;
    cvec values(n);
    grid->backward(spec.data(), values.data());
    return HardyField(grid, std::move(values), std::move(spec));
}

double sobolev_norm(const HardyField& h, double s, bool homogeneous) {
    if (s != 0.0 && s != 0.5) throw UnsupportedExponent("sobolev_norm supports s in {0, 1/2}");
    const auto& g = *h.grid();
    const auto& c = h.spectrum();
    double acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.xi()[k];
        double weight = 1.0;
        if (s == 0.5) weight = homogeneous ? std::abs(xi) : std::sqrt(1.0 + xi * xi);
        else if (homogeneous) weight = 1.0;
        acc += weight * std::norm(c[k]);
    }
    return std::sqrt(g.box_length() * acc);
}

double l2_norm(const HardyField& h) { return sobolev_norm(h, 0.0); }

double l2_norm_physical(const HardyField& h) {
    double acc = 0.0;
    for (const auto& v : h.values()) acc += std::norm(v);
    return std::sqrt(h.grid()->dx() * acc);
}

namespace {
cplx hermitian(const HardyField& u, const HardyField& v) {
    require_same_grid(u, v);
    cplx acc = 0.0;
    const auto& a = u.values();
    const auto& b = v.values();
    for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * std::conj(b[j]);
    return acc * u.grid()->dx();
}
}  // namespace

double inner_real(const HardyField& u, const HardyField& v) { return hermitian(u, v).real(); }

double symplectic_pair(const HardyField& u, const HardyField& v) { return hermitian(u, v).imag(); }

cplx quadrature(const SpectralGrid& grid, const cvec& samples) {
    if (samples.size() != grid.size()) throw DimensionError("sample count does not match grid");
    cplx acc = 0.0;
    for (const auto& s : samples) acc += s;
    return acc * grid.dx();
}

double quadrature(const SpectralGrid& grid, const rvec& samples) {
    if (samples.size() != grid.size()) throw DimensionError("sample count does not match grid");
    double acc = 0.0;
    for (double s : samples) acc += s;
    return acc * grid.dx();
}

cvec sample(const SpectralGrid& grid, const std::function<cplx(double)>& f) {
    cvec out(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        out[j] = f(grid.x()[j]);
        if (!std::isfinite(out[j].real()) || !std::isfinite(out[j].imag()))
            throw NonFiniteSample("non-finite sample at x = " + std::to_string(grid.x()[j]));
    }
    return out;
}

double negative_frequency_fraction(const SpectralGrid& grid, const cvec& samples) {
    cvec spec(grid.size());
    grid.forward(samples.data(), spec.data());
    double lost = 0.0, total = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        total += std::norm(spec[k]);
        if (!grid.kept(k)) lost += std::norm(spec[k]);
    }
    return total > 0.0 ? lost / total : 0.0;
}

Synthesized synthesize(const GridPtr& grid, const std::function<cplx(double)>& f) {
    cvec s = sample(*grid, f);
    Synthesized out;
    out.discarded_fraction = negative_frequency_fraction(*grid, s);
    out.field = szego_project(grid, s);
    return out;
}

HardyField derivative(const HardyField& h) {
    const auto& g = *h.grid();
    cvec c(h.spectrum());
    for (std::size_t k = 0; k < g.size(); ++k) c[k] *= cplx(0.0, g.xi()[k]);
    return HardyField::from_spectrum(h.grid(), std::move(c));
}

HardyField times_i(const HardyField& h) { return h * cplx(0.0, 1.0); }

HardyField random_hardy_field(const GridPtr& grid, std::mt19937_64& rng, double decay) {
    std::normal_distribution<double> normal(0.0, 1.0);
    cvec c(grid->size());
    for (std::size_t k = 0; k < grid->size(); ++k) {
        if (!grid->kept(k)) continue;
        const double xi = grid->xi()[k];
        const double re = normal(rng);
        const double im = normal(rng);
        c[k] = cplx(re, im) * std::pow(1.0 + xi * xi, -decay);
    }
    HardyField h = HardyField::from_spectrum(grid, std::move(c));
    return h * (1.0 / l2_norm(h));
}

}  // namespace szego
