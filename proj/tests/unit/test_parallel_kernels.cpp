#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "fracfund/kernels.hpp"

using namespace fracfund::kernels;

namespace {

struct Fixture {
    int n;
    int extent;
    std::vector<std::int32_t> coords;
    std::vector<double> table, ext, u, v;

    Fixture(int dim, int side, std::uint32_t seed) : n(dim), extent(2 * side) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        // Nodes of a ball of lattice radius `side`.
        for (int i = -side; i <= side; ++i)
            for (int j = -side; j <= side; ++j)
                for (int k = (n == 3 ? -side : 0); k <= (n == 3 ? side : 0); ++k) {
                    if (i * i + j * j + k * k > side * side) continue;
                    coords.push_back(i);
                    coords.push_back(j);
                    if (n == 3) coords.push_back(k);
                }
        const std::size_t w = 2 * static_cast<std::size_t>(extent) + 1;
        table.resize(n == 3 ? w * w * w : w * w);
        for (double& t : table) t = std::abs(U(rng));
        const std::size_t m = coords.size() / n;
        ext.resize(m);
        u.resize(m);
        v.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            ext[i] = std::abs(U(rng));
            u[i] = U(rng);
            v[i] = U(rng);
        }
    }

    LatticeView nodes() const { return {n, coords}; }
    OffsetTable offsets() const { return {n, extent, table}; }
    std::size_t size() const { return coords.size() / n; }
};

}  // namespace

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
    omp_set_num_threads(4);
    for (const Fixture& f : {Fixture(2, 9, 1), Fixture(3, 4, 2)}) {
        const std::size_t m = f.size();
        std::vector<double> A1(m * m), A2(m * m);
        serial::assemble_dense(f.nodes(), f.offsets(), 0.7, f.ext, A1);
        omp::assemble_dense(f.nodes(), f.offsets(), 0.7, f.ext, A2);
        CHECK(A1 == A2);

        std::vector<double> y1(m), y2(m);
        serial::dense_matvec(A1, m, f.u, y1);
        omp::dense_matvec(A1, m, f.u, y2);
        CHECK(y1 == y2);

        std::vector<double> s1(m), s2(m);
        serial::neighbour_sums(f.nodes(), f.offsets(), s1);
        omp::neighbour_sums(f.nodes(), f.offsets(), s2);
        CHECK(s1 == s2);

        CHECK(serial::pairwise_form(f.nodes(), f.offsets(), f.ext, f.u, f.v) ==
              omp::pairwise_form(f.nodes(), f.offsets(), f.ext, f.u, f.v));
        for (double p : {1.0, 1.3}) {
            CHECK(serial::power_difference_sum(f.nodes(), f.offsets(), f.u, p) ==
                  omp::power_difference_sum(f.nodes(), f.offsets(), f.u, p));
        }
    }
    CHECK(omp::max_threads() >= 1);
}

TEST_CASE("serial kernels match their definitions") {
    const Fixture f(2, 3, 5);
    const std::size_t m = f.size();
    const LatticeView nodes = f.nodes();
    const OffsetTable T = f.offsets();
    auto G = [&](std::size_t i, std::size_t j) {
        return T.values[T.flat(f.coords[2 * j] - f.coords[2 * i], f.coords[2 * j + 1] - f.coords[2 * i + 1], 0)];
    };
    std::vector<double> A(m * m);
    serial::assemble_dense(nodes, T, 0.5, f.ext, A);
    std::vector<double> sums(m);
    serial::neighbour_sums(nodes, T, sums);
    double form = 0.0, power = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) {
                CHECK(A[i * m + j] == f.ext[i]);
                continue;
            }
            CHECK(A[i * m + j] == -0.5 * G(i, j));
            s += G(i, j);
            form += 0.5 * (f.u[i] - f.u[j]) * (f.v[i] - f.v[j]) * G(i, j);
            power += std::pow(std::abs(f.u[i] - f.u[j]), 1.5) * G(i, j);
        }
        CHECK(sums[i] == doctest::Approx(s).epsilon(1e-13));
        form += f.u[i] * f.v[i] * f.ext[i];
    }
    CHECK(serial::pairwise_form(nodes, T, f.ext, f.u, f.v) == doctest::Approx(form).epsilon(1e-12));
    CHECK(serial::power_difference_sum(nodes, T, f.u, 1.5) == doctest::Approx(power).epsilon(1e-12));
}
