#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <new>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace szego {

using cplx = std::complex<double>;

template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t count) {
        return static_cast<T*>(::operator new(count * sizeof(T), alignment));
    }
    void deallocate(T* ptr, std::size_t) noexcept { ::operator delete(ptr, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using cvec = std::vector<cplx, AlignedAllocator<cplx>>;
using rvec = std::vector<double>;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct UnsupportedExponent : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonFiniteSample : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform periodic grid on [-L/2, L/2). Spectra are Fourier series coefficients
// c_k with f(x_j) = sum_k c_k exp(i xi_k x_j), stored in FFT index order.
class SpectralGrid {
public:
    SpectralGrid(std::size_t n, double box_length);
    ~SpectralGrid();
    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    static std::shared_ptr<const SpectralGrid> make(std::size_t n, double box_length);

    std::size_t size() const { return n_; }
    double box_length() const { return length_; }
    double dx() const { return dx_; }
    const rvec& x() const { return x_; }
    const rvec& xi() const { return xi_; }
    long wavenumber(std::size_t idx) const;
    // Strictly positive-or-zero frequency that survives the Szego projector.
    bool kept(std::size_t idx) const { return idx < n_ / 2; }

    void forward(const cplx* in, cplx* out) const;
    void backward(const cplx* in, cplx* out) const;

private:
    std::size_t n_;
    double length_;
    double dx_;
    rvec x_;
    rvec xi_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

// Element of the discrete Hardy space. Values and spectrum are both held and
// consistent; every constructor path ends in a projection or a spectral build.
class HardyField {
public:
    HardyField() = default;

    static HardyField zero(GridPtr grid);
    static HardyField from_spectrum(GridPtr grid, cvec coeffs);

    const GridPtr& grid() const { return grid_; }
    const cvec& values() const { return values_; }
    const cvec& spectrum() const { return spectrum_; }
    std::size_t size() const { return values_.size(); }

    HardyField operator+(const HardyField& o) const;
    HardyField operator-(const HardyField& o) const;
    HardyField operator*(cplx s) const;
    HardyField operator*(double s) const { return *this * cplx(s, 0.0); }

private:
    friend HardyField szego_project(const GridPtr& grid, const cvec& f);
    HardyField(GridPtr grid, cvec values, cvec spectrum)
        : grid_(std::move(grid)), values_(std::move(values)), spectrum_(std::move(spectrum)) {}

    GridPtr grid_;
    cvec values_;
    cvec spectrum_;
};

inline HardyField operator*(cplx s, const HardyField& h) { return h * s; }
inline HardyField operator*(double s, const HardyField& h) { return h * s; }

void require_same_grid(const HardyField& u, const HardyField& v);

HardyField szego_project(const GridPtr& grid, const cvec& f);

double sobolev_norm(const HardyField& h, double s, bool homogeneous = false);
double l2_norm(const HardyField& h);
double l2_norm_physical(const HardyField& h);

double inner_real(const HardyField& u, const HardyField& v);
double symplectic_pair(const HardyField& u, const HardyField& v);

cplx quadrature(const SpectralGrid& grid, const cvec& samples);
double quadrature(const SpectralGrid& grid, const rvec& samples);

struct Synthesized {
    HardyField field;
    double discarded_fraction = 0.0;  // negative-frequency share of the sampled L2 mass
};

Synthesized synthesize(const GridPtr& grid, const std::function<cplx(double)>& f);

cvec sample(const SpectralGrid& grid, const std::function<cplx(double)>& f);

HardyField derivative(const HardyField& h);
HardyField times_i(const HardyField& h);

// Gaussian random field with coefficient weights (1 + xi^2)^(-decay) on the
// kept modes, rescaled to unit L2 norm.
HardyField random_hardy_field(const GridPtr& grid, std::mt19937_64& rng, double decay = 1.0);

double negative_frequency_fraction(const SpectralGrid& grid, const cvec& samples);

}  // namespace szego
