#pragma once

#include "xxz/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace xxz {

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using CVectorD = CVector<double>;

enum class Boundary { Periodic, FixedEnds };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view s);

// Uniform 1-D grid in lattice-constant units. Periodic grids exclude x_max
// (it aliases x_min); FixedEnds grids include both end points.
class Grid {
  public:
    Grid() = default;
    Grid(std::size_t n_points, double x_min, double x_max, Boundary bc);

    // Unit-spaced sites x_min, x_min + 1, ... as used by the lattice models.
    static Grid sites(std::size_t n_sites, double x_min, Boundary bc);

    std::size_t size() const { return n_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double dx() const { return dx_; }
    double length() const { return x_max_ - x_min_; }
    Boundary bc() const { return bc_; }
    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
    Eigen::VectorXd coordinates() const;

    // Same grid with all coordinates multiplied by `factor` > 0.
    Grid scaled(double factor) const;

    bool operator==(const Grid& o) const = default;

  private:
    std::size_t n_ = 0;
    double x_min_ = 0;
    double x_max_ = 1;
    double dx_ = 1;
    Boundary bc_ = Boundary::Periodic;
};

// Complex envelope sampled on a grid at one instant.
struct Field {
    Grid grid;
    CVectorD values;
    double time = 0;

    Field() = default;
    Field(Grid g, CVectorD v, double t = 0);
};

void require_same_grid(const Grid& a, const Grid& b);
void require_finite(const CVectorD& v, const Grid& g, double time);

template <typename Fn>
Field sample(const Grid& g, double t, Fn&& fn)
{
    CVectorD v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = fn(g.x(i), t);
    return Field(g, std::move(v), t);
}

// Which equation produced a trajectory; the string form is persisted.
enum class Equation {
    Analytic,
    Nls,
    NlsEnvelope,
    ExtendedNls,
    ExtendedNlsVariant,
    LatticeSimplified,
    LatticeFull,
};

std::string_view to_string(Equation e);
Equation parse_equation(std::string_view s);

struct Snapshot {
    double time;
    CVectorD values;
};

// Ordered snapshots sharing one grid, plus whatever produced them.
struct Trajectory {
    Grid grid;
    Equation equation = Equation::Nls;
    double dt = 0;
    std::vector<Snapshot> snapshots;

    Field field(std::size_t i) const;
    const Snapshot& back() const { return snapshots.back(); }
    bool empty() const { return snapshots.empty(); }
    std::size_t size() const { return snapshots.size(); }

    // Appends, enforcing strictly increasing times and matching sample count.
    void push(double t, CVectorD values);
};

} // namespace xxz
