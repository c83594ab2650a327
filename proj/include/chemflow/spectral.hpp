#pragma once
#include <cmath>
#include <utility>

#include "chemflow/fft.hpp"
#include "chemflow/field.hpp"

namespace chemflow {

/// Forward transform of a field (no prefactor).
inline cvec forward(const Field& f) {
    return Fft::of_size(f.grid.n).forward(f.values);
}

/// Inverse transform back to a field (1/n^2 normalization).
inline Field inverse(const Grid& grid, cvec spec) {
    return Field(grid, Fft::of_size(grid.n).inverse(std::move(spec)));
}

/// Zero every mode with integer frequency above n/3 in either axis
/// (two-thirds rule), in place.
inline void dealias_inplace(const Grid& g, cvec& spec) {
    const int n = g.n, cut = g.dealias_cutoff(), stride = g.spectral_stride();
    for (int j = 0; j < n; ++j) {
        const int my = (j <= n / 2) ? j : j - n;
        const bool y_bad = (my > cut || my < -cut);
        std::complex<double>* row = spec.data() + std::size_t(j) * stride;
        if (y_bad) {
            for (int i = 0; i < stride; ++i) row[i] = 0.0;
        } else {
            for (int i = cut + 1; i < stride; ++i) row[i] = 0.0;
        }
    }
}

inline cvec dealiased(const Grid& g, cvec spec) {
    dealias_inplace(g, spec);
    return spec;
}

/// Spectral gradient from a precomputed spectrum. The Nyquist mode is
/// zeroed (kxd/kyd tables): it carries no usable sign information for
/// odd-order derivatives.
inline VectorField gradient_of_spectrum(const Grid& g, const cvec& spec) {
    const int n = g.n, stride = g.spectral_stride();
    cvec sx(spec.size()), sy(spec.size());
    for (int j = 0; j < n; ++j) {
        const double ky = g.kyd[j];
        const std::complex<double>* row = spec.data() + std::size_t(j) * stride;
        std::complex<double>* rx = sx.data() + std::size_t(j) * stride;
        std::complex<double>* ry = sy.data() + std::size_t(j) * stride;
        for (int i = 0; i < stride; ++i) {
            const std::complex<double> iu(0.0, 1.0);
            rx[i] = iu * g.kxd[i] * row[i];
            ry[i] = iu * ky * row[i];
        }
    }
    VectorField out(g);
    const Fft& fft = Fft::of_size(n);
    out.x_values = fft.inverse(std::move(sx));
    out.y_values = fft.inverse(std::move(sy));
    return out;
}

/// Spectral (Fourier-multiplier) gradient of a field.
inline VectorField gradient(const Field& f) {
    return gradient_of_spectrum(f.grid, forward(f));
}

/// Spectral Laplacian (full spectrum including Nyquist: even operator).
inline Field laplacian(const Field& f) {
    const Grid& g = f.grid;
    const int n = g.n, stride = g.spectral_stride();
    cvec spec = forward(f);
    for (int j = 0; j < n; ++j) {
        const double ky2 = g.ky[j] * g.ky[j];
        std::complex<double>* row = spec.data() + std::size_t(j) * stride;
        for (int i = 0; i < stride; ++i)
            row[i] *= -(g.kx[i] * g.kx[i] + ky2);
    }
    return inverse(g, std::move(spec));
}

/// Apply the exact diffusion semigroup to a spectrum in place:
/// each mode is multiplied by exp(-kappa |k|^2 dt).
inline void heat_multiplier_inplace(const Grid& g, double kappa, double dt,
                                    cvec& spec) {
    const int n = g.n, stride = g.spectral_stride();
    for (int j = 0; j < n; ++j) {
        const double ky2 = g.ky[j] * g.ky[j];
        std::complex<double>* row = spec.data() + std::size_t(j) * stride;
        for (int i = 0; i < stride; ++i)
            row[i] *= std::exp(-kappa * (g.kx[i] * g.kx[i] + ky2) * dt);
    }
}

/// Exact heat propagation: mass-preserving by construction (the k=0 mode
/// multiplier is exactly 1).
inline Field heat_propagate(const Field& f, double kappa, double dt) {
    if (!(dt >= 0.0)) throw invalid_argument("heat_propagate: dt must be >= 0");
    if (!(kappa >= 0.0)) throw invalid_argument("heat_propagate: kappa must be >= 0");
    cvec spec = forward(f);
    heat_multiplier_inplace(f.grid, kappa, dt, spec);
    return inverse(f.grid, std::move(spec));
}

/// Spectral divergence of a vector field (Nyquist zeroed, matching gradient).
inline Field divergence(const VectorField& v) {
    const Grid& g = v.grid;
    const int n = g.n, stride = g.spectral_stride();
    const Fft& fft = Fft::of_size(n);
    cvec sx = fft.forward(v.x_values);
    cvec sy = fft.forward(v.y_values);
    for (int j = 0; j < n; ++j) {
        const double ky = g.kyd[j];
        std::complex<double>* rx = sx.data() + std::size_t(j) * stride;
        std::complex<double>* ry = sy.data() + std::size_t(j) * stride;
        for (int i = 0; i < stride; ++i) {
            const std::complex<double> iu(0.0, 1.0);
            rx[i] = iu * (g.kxd[i] * rx[i] + ky * ry[i]);
        }
    }
    return inverse(g, std::move(sx));
}

/// Sum of |coeff|^2 with conjugate-symmetric x-modes double-counted, i.e.
/// the full-spectrum energy sum_k |f_hat(k)|^2 of the underlying complex
/// transform. Parseval: sum_x |f|^2 = (1/n^2) * spectral_energy.
inline double spectral_energy(const Grid& g, const cvec& spec) {
    const int n = g.n, stride = g.spectral_stride();
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        const std::complex<double>* row = spec.data() + std::size_t(j) * stride;
        for (int i = 0; i < stride; ++i) {
            const double e = std::norm(row[i]);
            const bool self_conjugate = (i == 0 || i == n / 2);
            total += self_conjugate ? e : 2.0 * e;
        }
    }
    return total;
}

}  // namespace chemflow
