#pragma once
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <new>
#include <vector>

namespace chemflow {

/// 64-byte-aligned allocator so FFT plans created on our own buffers can be
/// re-executed on any other buffer of the same type (alignment class must
/// match for FFTW's new-array execute interface).
template <class T>
struct aligned_allocator {
    using value_type = T;
    static constexpr std::size_t alignment = 64;

    aligned_allocator() = default;
    template <class U>
    aligned_allocator(const aligned_allocator<U>&) {}

    T* allocate(std::size_t count) {
        std::size_t bytes = (count * sizeof(T) + alignment - 1) / alignment * alignment;
        void* p = std::aligned_alloc(alignment, bytes);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { std::free(p); }

    template <class U>
    bool operator==(const aligned_allocator<U>&) const { return true; }
    template <class U>
    bool operator!=(const aligned_allocator<U>&) const { return false; }
};

/// Real grid data, row-major with y as the outer (slow) index.
using rvec = std::vector<double, aligned_allocator<double>>;
/// Half-spectrum data of a real transform: n*(n/2+1) coefficients.
using cvec = std::vector<std::complex<double>, aligned_allocator<std::complex<double>>>;

/// Compensated (Kahan) sum in fixed index order: deterministic and accurate
/// enough that quadrature error is dominated by sampling, not summation.
inline double kahan_sum(const double* v, std::size_t count) {
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        double y = v[i] - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace chemflow
