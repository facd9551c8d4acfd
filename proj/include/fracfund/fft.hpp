#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fracfund::fft {

/// Smallest integer >= n whose prime factors are all in {2, 3, 5, 7}.
int good_size(int n);

/// Aligned buffer owned through fftw_free.
template <class T>
class Buffer {
public:
    explicit Buffer(std::size_t count);
    Buffer(Buffer&&) noexcept = default;
    Buffer& operator=(Buffer&&) noexcept = default;

    T* data() noexcept { return ptr_.get(); }
    const T* data() const noexcept { return ptr_.get(); }
    std::size_t size() const noexcept { return count_; }
    std::span<T> span() noexcept { return {ptr_.get(), count_}; }

private:
    struct Deleter {
        void operator()(void* p) const noexcept;
    };
    std::unique_ptr<T, Deleter> ptr_;
    std::size_t count_;
};

/// Real-to-complex transform pair on a periodic box of the given shape.
/// Plans are created once under a global lock (the FFTW planner is not
/// thread-safe); executing them on caller-owned buffers is.
class RealTransform {
public:
    explicit RealTransform(std::vector<int> shape);
    ~RealTransform();
    RealTransform(const RealTransform&) = delete;
    RealTransform& operator=(const RealTransform&) = delete;

    const std::vector<int>& shape() const noexcept { return shape_; }
    std::size_t real_size() const noexcept { return real_size_; }
    /// Complex coefficients in the half spectrum (last axis n/2 + 1).
    std::size_t complex_size() const noexcept { return complex_size_; }

    Buffer<double> make_real() const { return Buffer<double>(real_size_); }
    Buffer<std::complex<double>> make_complex() const {
        return Buffer<std::complex<double>>(complex_size_);
    }

    /// Unnormalised forward transform.
    void forward(Buffer<double>& in, Buffer<std::complex<double>>& out) const;
    /// Unnormalised inverse; destroys `in`.
    void backward(Buffer<std::complex<double>>& in, Buffer<double>& out) const;

private:
    std::vector<int> shape_;
    std::size_t real_size_;
    std::size_t complex_size_;
    void* forward_plan_;
    void* backward_plan_;
};

}  // namespace fracfund::fft
