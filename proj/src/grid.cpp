#include "fracfund/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "fracfund/errors.hpp"

namespace fracfund {

Grid::Grid(int n, double radius, int n_side)
    : n_(n), radius_(radius), n_side_(n_side), h_(0.0), cell_volume_(0.0) {
    if (n != 2 && n != 3) {
        throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(n));
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ConfigError("grid radius R must be positive and finite");
    }
    if (n_side < 3) {
        throw ConfigError("grid needs N_side >= 3, got " + std::to_string(n_side));
    }
    h_ = 2.0 * radius / (n_side - 1);
    cell_volume_ = std::pow(h_, n);

    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(n_side);
    cube_to_active_.assign(total, -1);

    const double r2 = radius * radius;
    for (std::size_t c = 0; c < total; ++c) {
        const LatticeIndex idx = lattice_index(static_cast<std::int64_t>(c));
        double d2 = 0.0;
        for (int d = 0; d < n; ++d) {
            const double x = coordinate(idx[d]);
            d2 += x * x;
        }
        if (d2 < r2) {
            cube_to_active_[c] = static_cast<std::int64_t>(active_cube_.size());
            active_cube_.push_back(static_cast<std::int64_t>(c));
            for (int d = 0; d < n; ++d) active_lattice_.push_back(idx[d]);
        }
    }
    if (active_cube_.empty()) throw ConfigError("grid has an empty active set");
}

double Grid::coordinate(int i) const noexcept {
    return (2.0 * i - (n_side_ - 1)) * radius_ / (n_side_ - 1);
}

LatticeIndex Grid::lattice_index(std::int64_t cube) const noexcept {
    LatticeIndex idx{0, 0, 0};
    for (int d = n_ - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(cube % n_side_);
        cube /= n_side_;
    }
    return idx;
}

std::int64_t Grid::cube_flat(const LatticeIndex& idx) const noexcept {
    std::int64_t flat = 0;
    for (int d = 0; d < n_; ++d) flat = flat * n_side_ + idx[d];
    return flat;
}

std::int64_t Grid::active_index(const LatticeIndex& idx) const noexcept {
    for (int d = 0; d < n_; ++d) {
        if (idx[d] < 0 || idx[d] >= n_side_) return -1;
    }
    return cube_to_active_[cube_flat(idx)];
}

Point Grid::lattice_position(const LatticeIndex& idx) const noexcept {
    Point x{0.0, 0.0, 0.0};
    for (int d = 0; d < n_; ++d) x[d] = coordinate(idx[d]);
    return x;
}

Point Grid::position(std::size_t a) const noexcept {
    Point x{0.0, 0.0, 0.0};
    for (int d = 0; d < n_; ++d) x[d] = coordinate(active_lattice_[a * n_ + d]);
    return x;
}

GridPtr build_grid(int n, double radius, int n_side) {
    return std::make_shared<const Grid>(n, radius, n_side);
}

DiscreteField::DiscreteField(GridPtr grid) : grid_(std::move(grid)) {
    values_.assign(grid_->active_count(), 0.0);
}

DiscreteField::DiscreteField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->active_count()) {
        std::ostringstream msg;
        msg << "field has " << values_.size() << " values but the grid has "
            << grid_->active_count() << " active nodes";
        throw DomainError(msg.str());
    }
}

DiscreteField DiscreteField::sample(GridPtr grid, const std::function<double(const Point&)>& f) {
    std::vector<double> v(grid->active_count());
    for (std::size_t a = 0; a < v.size(); ++a) v[a] = f(grid->position(a));
    return DiscreteField(std::move(grid), std::move(v));
}

double DiscreteField::at_cube(std::int64_t cube) const noexcept {
    const std::int64_t a = grid_->active_index(cube);
    return a < 0 ? 0.0 : values_[static_cast<std::size_t>(a)];
}

double DiscreteField::at_lattice(const LatticeIndex& idx) const noexcept {
    const std::int64_t a = grid_->active_index(idx);
    return a < 0 ? 0.0 : values_[static_cast<std::size_t>(a)];
}

void DiscreteField::require_same_grid(const DiscreteField& other, const char* where) const {
    if (grid_ != other.grid_ && !(*grid_ == *other.grid_)) {
        throw DomainError(std::string(where) + ": fields live on different grids");
    }
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_field_csv(std::ostream& out, const DiscreteField& field) {
    const Grid& g = field.grid();
    static constexpr const char* axes[] = {"x", "y", "z"};
    for (int d = 0; d < g.n(); ++d) out << axes[d] << ',';
    out << "value\n";
    for (std::size_t a = 0; a < field.size(); ++a) {
        const Point x = g.position(a);
        for (int d = 0; d < g.n(); ++d) out << format_double(x[d]) << ',';
        out << format_double(field[a]) << '\n';
    }
}

}  // namespace fracfund
