#include "fracfund/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <stdexcept>

namespace fracfund::fft {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

int good_size(int n) {
    for (int m = std::max(n, 1);; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7}) {
            while (r % p == 0) r /= p;
        }
        if (r == 1) return m;
    }
}

template <class T>
void Buffer<T>::Deleter::operator()(void* p) const noexcept {
    fftw_free(p);
}

template <class T>
Buffer<T>::Buffer(std::size_t count)
    : ptr_(static_cast<T*>(fftw_malloc(sizeof(T) * (count ? count : 1)))), count_(count) {
    if (!ptr_) throw std::bad_alloc();
    for (std::size_t i = 0; i < count; ++i) ptr_.get()[i] = T{};
}

template class Buffer<double>;
template class Buffer<std::complex<double>>;

RealTransform::RealTransform(std::vector<int> shape) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 3) throw std::invalid_argument("RealTransform: rank 1..3");
    real_size_ = 1;
    for (int s : shape_) real_size_ *= static_cast<std::size_t>(s);
    complex_size_ = real_size_ / shape_.back() * (shape_.back() / 2 + 1);

    Buffer<double> r(real_size_);
    Buffer<std::complex<double>> c(complex_size_);
    const int rank = static_cast<int>(shape_.size());
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_r2c(rank, shape_.data(), r.data(),
                                      reinterpret_cast<fftw_complex*>(c.data()), FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft_c2r(rank, shape_.data(),
                                       reinterpret_cast<fftw_complex*>(c.data()), r.data(),
                                       FFTW_ESTIMATE);
    if (!forward_plan_ || !backward_plan_) throw std::runtime_error("FFTW planning failed");
}

RealTransform::~RealTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void RealTransform::forward(Buffer<double>& in, Buffer<std::complex<double>>& out) const {
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void RealTransform::backward(Buffer<std::complex<double>>& in, Buffer<double>& out) const {
    fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_plan_),
                         reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

}  // namespace fracfund::fft
