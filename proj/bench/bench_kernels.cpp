// Serial reference against OpenMP for each inner loop, and dense against
// FFT matrix-free application of the assembled operator.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fracfund/kernels.hpp"
#include "fracfund/operator.hpp"

using namespace fracfund;

namespace {

struct Lattice {
    GridPtr grid;
    std::vector<double> table, ext, u, v;

    explicit Lattice(int n_side) : grid(build_grid(2, 1.0, n_side)) {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const std::size_t w = 2 * static_cast<std::size_t>(n_side - 1) + 1;
        table.resize(w * w);
        for (double& t : table) t = U(rng);
        const std::size_t m = grid->active_count();
        ext.resize(m);
        u.resize(m);
        v.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            ext[i] = U(rng);
            u[i] = U(rng) - 0.5;
            v[i] = U(rng) - 0.5;
        }
    }

    kernels::LatticeView nodes() const { return {2, grid->active_lattice()}; }
    kernels::OffsetTable offsets() const { return {2, grid->n_side() - 1, table}; }
    std::size_t size() const { return grid->active_count(); }
};

template <bool Parallel>
void BM_assemble_dense(benchmark::State& state) {
    const Lattice L(static_cast<int>(state.range(0)));
    std::vector<double> A(L.size() * L.size());
    for (auto _ : state) {
        if constexpr (Parallel) kernels::omp::assemble_dense(L.nodes(), L.offsets(), 1.0, L.ext, A);
        else kernels::serial::assemble_dense(L.nodes(), L.offsets(), 1.0, L.ext, A);
        benchmark::DoNotOptimize(A.data());
    }
    state.counters["nodes"] = static_cast<double>(L.size());
}

template <bool Parallel>
void BM_dense_matvec(benchmark::State& state) {
    const Lattice L(static_cast<int>(state.range(0)));
    const std::size_t m = L.size();
    std::vector<double> A(m * m), y(m);
    kernels::serial::assemble_dense(L.nodes(), L.offsets(), 1.0, L.ext, A);
    for (auto _ : state) {
        if constexpr (Parallel) kernels::omp::dense_matvec(A, m, L.u, y);
        else kernels::serial::dense_matvec(A, m, L.u, y);
        benchmark::DoNotOptimize(y.data());
    }
}

template <bool Parallel>
void BM_neighbour_sums(benchmark::State& state) {
    const Lattice L(static_cast<int>(state.range(0)));
    std::vector<double> out(L.size());
    for (auto _ : state) {
        if constexpr (Parallel) kernels::omp::neighbour_sums(L.nodes(), L.offsets(), out);
        else kernels::serial::neighbour_sums(L.nodes(), L.offsets(), out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_pairwise_form(benchmark::State& state) {
    const Lattice L(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        double r = Parallel ? kernels::omp::pairwise_form(L.nodes(), L.offsets(), L.ext, L.u, L.v)
                            : kernels::serial::pairwise_form(L.nodes(), L.offsets(), L.ext, L.u, L.v);
        benchmark::DoNotOptimize(r);
    }
}

template <bool Parallel>
void BM_power_difference_sum(benchmark::State& state) {
    const Lattice L(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        double r = Parallel ? kernels::omp::power_difference_sum(L.nodes(), L.offsets(), L.u, 1.2)
                            : kernels::serial::power_difference_sum(L.nodes(), L.offsets(), L.u, 1.2);
        benchmark::DoNotOptimize(r);
    }
}

template <bool Dense>
void BM_apply(benchmark::State& state) {
    const FractionalOrder o(0.5, 2);
    const GridPtr g = build_grid(2, 1.0, static_cast<int>(state.range(0)));
    const AssembledOperator A(Kernel::pure_fractional(o), Potential::zero(o), g,
                              {Dense ? std::size_t(1) << 30 : std::size_t(1), true});
    std::vector<double> x(A.size(), 1.0), y(A.size());
    for (auto _ : state) {
        A.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.counters["nodes"] = static_cast<double>(A.size());
}

}  // namespace

BENCHMARK(BM_assemble_dense<false>)->Name("assemble_dense/serial")->Arg(33)->Arg(65);
BENCHMARK(BM_assemble_dense<true>)->Name("assemble_dense/omp")->Arg(33)->Arg(65);
BENCHMARK(BM_dense_matvec<false>)->Name("dense_matvec/serial")->Arg(33)->Arg(65);
BENCHMARK(BM_dense_matvec<true>)->Name("dense_matvec/omp")->Arg(33)->Arg(65);
BENCHMARK(BM_neighbour_sums<false>)->Name("neighbour_sums/serial")->Arg(33)->Arg(65);
BENCHMARK(BM_neighbour_sums<true>)->Name("neighbour_sums/omp")->Arg(33)->Arg(65);
BENCHMARK(BM_pairwise_form<false>)->Name("pairwise_form/serial")->Arg(33)->Arg(65);
BENCHMARK(BM_pairwise_form<true>)->Name("pairwise_form/omp")->Arg(33)->Arg(65);
BENCHMARK(BM_power_difference_sum<false>)->Name("power_difference_sum/serial")->Arg(33)->Arg(65);
BENCHMARK(BM_power_difference_sum<true>)->Name("power_difference_sum/omp")->Arg(33)->Arg(65);
BENCHMARK(BM_apply<true>)->Name("apply/dense")->Arg(33)->Arg(65);
BENCHMARK(BM_apply<false>)->Name("apply/fft")->Arg(33)->Arg(65)->Arg(129);

BENCHMARK_MAIN();
