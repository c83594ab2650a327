#pragma once
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "chemflow/errors.hpp"

namespace chemflow {

/// Discretized periodic computational box [0, L)^2 standing in for the
/// plane, with data kept contained in the center. Holds the per-mode
/// wavenumber tables used by all spectral operators.
///
/// Layout conventions used throughout:
///  - real samples are row-major with y outer: values[iy*n + ix];
///  - half-spectra (real transforms) keep the full y axis and the
///    non-negative x modes: coeff[iy*(n/2+1) + ix], ix in [0, n/2].
struct Grid {
    int n = 0;            // points per side (power of two)
    double box_size = 0;  // L
    double dx = 0;        // L/n

    std::vector<double> coord;  // coord[i] = i*dx
    std::vector<double> kx;     // size n/2+1: 2*pi*ix/L
    std::vector<double> ky;     // size n: 2*pi*my/L, my in [-n/2, n/2)
    std::vector<double> kxd;    // kx with the Nyquist mode zeroed (odd derivatives)
    std::vector<double> kyd;    // ky with the Nyquist mode zeroed

    int spectral_stride() const { return n / 2 + 1; }
    std::size_t size() const { return std::size_t(n) * n; }
    std::size_t spectral_size() const { return std::size_t(n) * (n / 2 + 1); }
    double center() const { return 0.5 * box_size; }
    double cell_area() const { return dx * dx; }

    /// Largest integer frequency kept by the two-thirds dealias rule.
    int dealias_cutoff() const { return n / 3; }

    bool operator==(const Grid& o) const {
        return n == o.n && box_size == o.box_size;
    }
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Build a grid. n must be a power of two >= 16; box_size > 0.
inline Grid make_grid(int n, double box_size) {
    if (!is_power_of_two(n) || n < 16)
        throw invalid_argument("make_grid: n must be a power of two >= 16, got " +
                               std::to_string(n));
    if (!(box_size > 0.0))
        throw invalid_argument("make_grid: box_size must be positive");

    Grid g;
    g.n = n;
    g.box_size = box_size;
    g.dx = box_size / n;

    g.coord.resize(n);
    for (int i = 0; i < n; ++i) g.coord[i] = i * g.dx;

    const double k0 = 2.0 * std::numbers::pi / box_size;
    g.kx.resize(n / 2 + 1);
    for (int i = 0; i <= n / 2; ++i) g.kx[i] = k0 * i;
    g.ky.resize(n);
    for (int j = 0; j < n; ++j) {
        int m = (j <= n / 2) ? j : j - n;
        g.ky[j] = k0 * m;
    }
    g.kxd = g.kx;
    g.kxd[n / 2] = 0.0;
    g.kyd = g.ky;
    g.kyd[n / 2] = 0.0;
    return g;
}

}  // namespace chemflow
