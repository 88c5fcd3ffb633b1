#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "vlt2/core.hpp"
#include "vlt2/parallel.hpp"

namespace vlt2 {

/// Parallel-beam sinogram: values indexed by (angle, offset). Angles live in
/// [0, pi); offsets are uniform over [-s_max, s_max].
struct Sinogram {
    std::vector<double> angles;
    std::vector<double> offsets;
    std::vector<double> v; // row-major, angle-major

    int n_angles() const { return static_cast<int>(angles.size()); }
    int n_offsets() const { return static_cast<int>(offsets.size()); }
    double& at(int ia, int is) { return v[static_cast<std::size_t>(ia) * offsets.size() + is]; }
    double at(int ia, int is) const { return v[static_cast<std::size_t>(ia) * offsets.size() + is]; }
    double ds() const { return offsets.size() > 1 ? offsets[1] - offsets[0] : 0.0; }
};

struct SinogramSpec {
    int n_angles = 0;
    int n_offsets = 0;
    double s_max = 0.0;

    void validate() const {
        if (n_angles < 2 || n_offsets < 4 || !(s_max > 0.0))
            throw std::invalid_argument("SinogramSpec: bad parameters");
    }
};

inline std::vector<double> uniform_angles(int n) {
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = M_PI * i / n;
    return a;
}

inline std::vector<double> uniform_offsets(int n, double s_max) {
    std::vector<double> s(n);
    const double ds = 2.0 * s_max / (n - 1);
    for (int i = 0; i < n; ++i) s[i] = -s_max + i * ds;
    return s;
}

/// Radon transform of an arbitrary point sampler. The line with normal
/// xi = (cos t, sin t) and signed distance s is traced over arc length
/// [-t_half, t_half] with the given quadrature step.
template <class Sampler>
Sinogram radon_of(Sampler&& f, const std::vector<double>& angles, const std::vector<double>& offsets,
                  double t_half, double step) {
    Sinogram sino;
    sino.angles = angles;
    sino.offsets = offsets;
    sino.v.assign(angles.size() * offsets.size(), 0.0);
    int n = std::max(2, static_cast<int>(std::ceil(2.0 * t_half / step)));
    n += n & 1;
    const double dt = 2.0 * t_half / n;
    const int n_ang = static_cast<int>(angles.size());
    parallel_for(n_ang, [&](int a0, int a1) {
        for (int ia = a0; ia < a1; ++ia) {
            const double th = angles[ia];
            const Vec2 xi{std::cos(th), std::sin(th)};
            const Vec2 eta{-xi.x2, xi.x1};
            for (std::size_t is = 0; is < offsets.size(); ++is) {
                const Vec2 base = offsets[is] * xi;
                double acc = 0.0;
                for (int k = 0; k <= n; ++k) {
                    const double t = -t_half + k * dt;
                    const double w = (k == 0 || k == n) ? 1.0 / 3.0 : ((k & 1) ? 4.0 / 3.0 : 2.0 / 3.0);
                    acc += w * f(Vec2{base.x1 + t * eta.x1, base.x2 + t * eta.x2});
                }
                sino.at(ia, static_cast<int>(is)) = acc * dt;
            }
        }
    });
    return sino;
}

/// Radon transform of a gridded scalar (bilinear samples, zero outside).
inline Sinogram radon(const ScalarField2& h, const SinogramSpec& spec) {
    spec.validate();
    const double dx = h.spec.x_max - h.spec.x_min;
    const double dy = h.spec.y_max - h.spec.y_min;
    const double t_half = 0.5 * std::sqrt(dx * dx + dy * dy) + h.spec.h;
    return radon_of([&h](Vec2 p) { return h.sample(p); }, uniform_angles(spec.n_angles),
                    uniform_offsets(spec.n_offsets, spec.s_max), t_half, 0.5 * h.spec.h);
}

/// d/ds of sinogram rows (central differences, one-sided at the ends).
inline Sinogram radon_s_derivative(const Sinogram& sino) {
    Sinogram out = sino;
    const int ns = sino.n_offsets();
    const double ds = sino.ds();
    for (int ia = 0; ia < sino.n_angles(); ++ia) {
        out.at(ia, 0) = (-3.0 * sino.at(ia, 0) + 4.0 * sino.at(ia, 1) - sino.at(ia, 2)) / (2.0 * ds);
        for (int is = 1; is < ns - 1; ++is)
            out.at(ia, is) = (sino.at(ia, is + 1) - sino.at(ia, is - 1)) / (2.0 * ds);
        out.at(ia, ns - 1) =
            (3.0 * sino.at(ia, ns - 1) - 4.0 * sino.at(ia, ns - 2) + sino.at(ia, ns - 3)) / (2.0 * ds);
    }
    return out;
}

namespace detail {

inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_radix2: size must be a power of 2");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> t = w * a[i + k + len / 2];
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

/// Frequency response of the band-limited ramp (spatial Ram-Lak kernel,
/// transformed) multiplied by a raised-cosine rolloff starting at
/// rolloff_frac of the Nyquist frequency.
inline std::vector<double> ramp_filter_response(std::size_t n_pad, double ds, double rolloff_frac) {
    std::vector<std::complex<double>> kern(n_pad, 0.0);
    const double inv_ds2 = 1.0 / (ds * ds);
    kern[0] = 0.25 * inv_ds2;
    for (std::size_t m = 1; m <= n_pad / 2; ++m) {
        if (m % 2 == 1) {
            const double val = -inv_ds2 / (M_PI * M_PI * static_cast<double>(m) * static_cast<double>(m));
            kern[m] = val;
            kern[n_pad - m] = val;
        }
    }
    fft_radix2(kern, false);
    const double nyquist = 0.5 / ds;
    std::vector<double> resp(n_pad);
    for (std::size_t k = 0; k < n_pad; ++k) {
        const std::size_t kk = std::min(k, n_pad - k);
        const double nu = static_cast<double>(kk) / (static_cast<double>(n_pad) * ds);
        double w = 1.0;
        if (nu > rolloff_frac * nyquist) {
            const double t = (nu - rolloff_frac * nyquist) / ((1.0 - rolloff_frac) * nyquist);
            w = t >= 1.0 ? 0.0 : 0.5 * (1.0 + std::cos(M_PI * t));
        }
        resp[k] = kern[k].real() * w;
    }
    return resp;
}

} // namespace detail

/// Filtered backprojection with a Ram-Lak filter rolled off by a raised
/// cosine at 0.9 Nyquist. Angle weights come from the gaps between sample
/// angles, so sinograms with excluded angular bands backproject correctly.
inline ScalarField2 inverse_radon_fbp(const Sinogram& sino, const GridSpec& grid) {
    const int ns = sino.n_offsets();
    const int na = sino.n_angles();
    if (ns < 4 || na < 2) throw std::invalid_argument("inverse_radon_fbp: sinogram too small");
    const double ds = sino.ds();

    std::size_t n_pad = 1;
    while (n_pad < static_cast<std::size_t>(2 * ns)) n_pad <<= 1;
    const std::vector<double> resp = detail::ramp_filter_response(n_pad, ds, 0.9);

    // Filter every row: filtered = ds * IFFT(FFT(row_padded) * resp).
    std::vector<double> filtered(static_cast<std::size_t>(na) * ns);
    parallel_for(na, [&](int a0, int a1) {
        std::vector<std::complex<double>> buf(n_pad);
        for (int ia = a0; ia < a1; ++ia) {
            std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
            for (int is = 0; is < ns; ++is) buf[is] = sino.at(ia, is);
            detail::fft_radix2(buf, false);
            for (std::size_t k = 0; k < n_pad; ++k) buf[k] *= resp[k];
            detail::fft_radix2(buf, true);
            for (int is = 0; is < ns; ++is)
                filtered[static_cast<std::size_t>(ia) * ns + is] = ds * buf[is].real();
        }
    });

    // Per-angle trapezoid weights over [0, pi), wrapping periodically.
    std::vector<double> weight(na);
    if (na == 1) {
        weight[0] = M_PI;
    } else {
        for (int ia = 0; ia < na; ++ia) {
            const double prev = ia > 0 ? sino.angles[ia - 1] : sino.angles[na - 1] - M_PI;
            const double next = ia < na - 1 ? sino.angles[ia + 1] : sino.angles[0] + M_PI;
            weight[ia] = 0.5 * (next - prev);
        }
    }

    ScalarField2 out(grid);
    const double s0 = sino.offsets.front();
    parallel_for(grid.ny, [&](int j0, int j1) {
        for (int j = j0; j < j1; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const Vec2 p = grid.point(i, j);
                double acc = 0.0;
                for (int ia = 0; ia < na; ++ia) {
                    const double th = sino.angles[ia];
                    const double s = p.x1 * std::cos(th) + p.x2 * std::sin(th);
                    const double fs = (s - s0) / ds;
                    if (fs < 0.0 || fs > ns - 1) continue;
                    int k = static_cast<int>(fs);
                    if (k >= ns - 1) k = ns - 2;
                    const double a = fs - k;
                    const double* row = filtered.data() + static_cast<std::size_t>(ia) * ns;
                    acc += weight[ia] * ((1.0 - a) * row[k] + a * row[k + 1]);
                }
                out.at(i, j) = acc;
            }
    });
    return out;
}

} // namespace vlt2
