#pragma once
#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "chemflow/errors.hpp"
#include "chemflow/types.hpp"

namespace chemflow {

/// Real 2D transforms of one size, planned once and reused process-wide.
///
/// Determinism: plans use FFTW_ESTIMATE only (heuristic, no timing), so the
/// algorithm choice — and therefore the floating-point rounding — is
/// identical across runs. Execution uses the new-array interface on caller
/// buffers; all buffers share one alignment class (aligned_allocator).
///
/// Normalization: forward carries no prefactor; inverse carries 1/n^2.
class Fft {
  public:
    /// Shared plans for size n (creation is mutex-guarded; execution is
    /// thread-safe on distinct buffers).
    static const Fft& of_size(int n) {
        static std::mutex mu;
        static std::map<int, std::unique_ptr<Fft>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it == cache.end())
            it = cache.emplace(n, std::unique_ptr<Fft>(new Fft(n))).first;
        return *it->second;
    }

    /// Real n*n samples -> n*(n/2+1) half-spectrum, no prefactor.
    cvec forward(const rvec& in) const {
        if (in.size() != std::size_t(n_) * n_)
            throw invalid_argument("Fft::forward: size mismatch");
        cvec out(std::size_t(n_) * (n_ / 2 + 1));
        // r2c preserves its input.
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(in.data()),
                             reinterpret_cast<fftw_complex*>(out.data()));
        return out;
    }

    /// Half-spectrum -> real samples, applying the 1/n^2 normalization.
    /// Takes the spectrum by value because FFTW's c2r destroys its input;
    /// call sites that are done with the spectrum should std::move it.
    rvec inverse(cvec spec) const {
        if (spec.size() != std::size_t(n_) * (n_ / 2 + 1))
            throw invalid_argument("Fft::inverse: size mismatch");
        rvec out(std::size_t(n_) * n_);
        fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(spec.data()),
                             out.data());
        const double norm = 1.0 / (double(n_) * double(n_));
        for (double& v : out) v *= norm;
        return out;
    }

    int n() const { return n_; }

    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

  private:
    explicit Fft(int n) : n_(n) {
        rvec r(std::size_t(n) * n);
        cvec c(std::size_t(n) * (n / 2 + 1));
        fwd_ = fftw_plan_dft_r2c_2d(n, n, r.data(),
                                    reinterpret_cast<fftw_complex*>(c.data()),
                                    FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(c.data()),
                                    r.data(), FFTW_ESTIMATE);
        if (!fwd_ || !inv_) throw error("Fft: FFTW planning failed");
    }

    int n_;
    fftw_plan fwd_;
    fftw_plan inv_;
};

}  // namespace chemflow
