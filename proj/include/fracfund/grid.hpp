#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fracfund {

using Point = std::array<double, 3>;
using LatticeIndex = std::array<int, 3>;

/// Uniform lattice on the cube [-R, R]^n with N_side nodes per axis. The active
/// set holds the nodes strictly inside the open ball B_R; every other point of
/// R^n carries the value zero.
class Grid {
public:
    Grid(int n, double radius, int n_side);

    int n() const noexcept { return n_; }
    double radius() const noexcept { return radius_; }
    int n_side() const noexcept { return n_side_; }
    double spacing() const noexcept { return h_; }
    /// h^n.
    double cell_volume() const noexcept { return cell_volume_; }

    std::size_t active_count() const noexcept { return active_cube_.size(); }
    std::size_t cube_size() const noexcept { return cube_to_active_.size(); }

    /// Coordinate of lattice index i along any axis; symmetric under i -> N-1-i.
    double coordinate(int i) const noexcept;

    /// Cube flat index of active node a.
    std::int64_t cube_index(std::size_t a) const noexcept { return active_cube_[a]; }
    /// Active index of a cube node, or -1 when the node is outside B_R.
    std::int64_t active_index(std::int64_t cube) const noexcept { return cube_to_active_[cube]; }
    /// Active index of a lattice node given by multi-index, -1 if outside the cube or ball.
    std::int64_t active_index(const LatticeIndex& idx) const noexcept;

    LatticeIndex lattice_index(std::int64_t cube) const noexcept;
    std::int64_t cube_flat(const LatticeIndex& idx) const noexcept;

    /// Position of active node a (unused trailing components are zero).
    Point position(std::size_t a) const noexcept;
    Point lattice_position(const LatticeIndex& idx) const noexcept;

    /// Integer offsets of active nodes from the cube's lower corner, flattened active x n.
    std::span<const std::int32_t> active_lattice() const noexcept { return active_lattice_; }

    bool operator==(const Grid& other) const noexcept {
        return n_ == other.n_ && radius_ == other.radius_ && n_side_ == other.n_side_;
    }

private:
    int n_;
    double radius_;
    int n_side_;
    double h_;
    double cell_volume_;
    std::vector<std::int64_t> active_cube_;
    std::vector<std::int64_t> cube_to_active_;
    std::vector<std::int32_t> active_lattice_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds the lattice. Throws ConfigError for n outside {2,3}, R <= 0,
/// N_side < 3 or an empty active set.
GridPtr build_grid(int n, double radius, int n_side);

/// Real values on the active nodes of a grid; zero everywhere else.
class DiscreteField {
public:
    explicit DiscreteField(GridPtr grid);
    DiscreteField(GridPtr grid, std::vector<double> values);

    static DiscreteField sample(GridPtr grid, const std::function<double(const Point&)>& f);

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator[](std::size_t a) const noexcept { return values_[a]; }
    double& operator[](std::size_t a) noexcept { return values_[a]; }

    /// Value at a cube node: exactly zero for nodes outside B_R.
    double at_cube(std::int64_t cube) const noexcept;
    /// Value at any lattice node, including nodes outside the stored cube.
    double at_lattice(const LatticeIndex& idx) const noexcept;

    void require_same_grid(const DiscreteField& other, const char* where) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Writes "x,y[,z],value" rows for the active nodes, 17 significant digits.
void write_field_csv(std::ostream& out, const DiscreteField& field);

/// Formats a double with 17 significant digits.
std::string format_double(double value);

}  // namespace fracfund
