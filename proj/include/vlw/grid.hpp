#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace vlw {

using Point = std::array<double, 3>;

/// Uniform cell-centred grid on an axis-aligned box in dimension 1, 2 or 3.
///
/// Cells are numbered linearly with axis 0 varying fastest. The same number
/// of cells `m` is used along every axis; cell widths may differ per axis if
/// the box is not a cube.
class Grid {
 public:
  Grid() = default;
  Grid(int n, std::span<const double> lower, std::span<const double> upper,
       int m);

  int dim() const { return n_; }
  int cells_per_axis() const { return m_; }
  std::size_t cell_count() const { return count_; }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  double width(int axis) const { return h_[axis]; }
  double cell_volume() const { return cell_volume_; }
  double volume() const { return cell_volume_ * static_cast<double>(count_); }
  /// Smallest cell width over the active axes.
  double min_width() const;

  std::array<int, 3> index(std::size_t cell) const;
  std::size_t linear(const std::array<int, 3>& idx) const;
  Point center(std::size_t cell) const;

  bool operator==(const Grid& other) const = default;

 private:
  int n_ = 1;
  int m_ = 1;
  std::size_t count_ = 1;
  Point lower_{};
  Point upper_{};
  Point h_{1.0, 1.0, 1.0};
  double cell_volume_ = 1.0;
};

Grid make_uniform_grid(int n, std::span<const double> lower,
                       std::span<const double> upper, int m);

/// Axis-aligned cube [lower, lower + side) in the first `n` coordinates.
struct Cube {
  Point lower{};
  double side = 1.0;

  bool contains(const Point& x, int n) const;
  double volume(int n) const;
  Point center(int n) const;
};

struct CubeFamily {
  std::vector<Cube> cubes;
  bool disjoint = false;
};

/// Cells whose centres lie in the half-open cube, in increasing order.
std::vector<std::size_t> cells_in(const Grid& grid, const Cube& cube);

/// Cube covering the whole grid box. Requires a cubical box.
Cube whole_box(const Grid& grid);

/// The 2^{kn} cubes of dyadic level k tiling a cubical box.
CubeFamily dyadic_cubes(const Grid& grid, int level);
/// Dyadic cubes of level k shifted by half a side along every axis, keeping
/// those that lie inside the box.
CubeFamily shifted_dyadic_cubes(const Grid& grid, int level);
/// Concatenation of dyadic levels lo..hi (not disjoint).
CubeFamily dyadic_levels(const Grid& grid, int lo, int hi,
                         bool with_shifts = false);
/// Largest dyadic level supported by the grid resolution.
int max_dyadic_level(const Grid& grid);

/// Translates Q + side*k, k in Z^n, that meet the box. Q must be centred at
/// the origin.
CubeFamily translate_tiling(const Cube& q, const Grid& grid);

/// Cube with the same centre and three times the side.
Cube tripled(const Cube& q, int n);

bool interiors_overlap(const Cube& a, const Cube& b, int n);
bool has_overlap(const CubeFamily& family, int n);

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), values(g.cell_count(), fill) {}
  ScalarField(const Grid& g, std::vector<double> v);

  static ScalarField from_function(const Grid& g,
                                   const std::function<double(const Point&)>& f);
  std::size_t size() const { return values.size(); }
};

struct VectorField {
  Grid grid;
  int dim = 1;
  std::vector<double> values;  // cell-major: values[cell * dim + i]

  VectorField() = default;
  VectorField(const Grid& g, int d, double fill = 0.0)
      : grid(g), dim(d), values(g.cell_count() * static_cast<std::size_t>(d), fill) {}

  static VectorField from_scalar(const ScalarField& f);
  static VectorField from_function(
      const Grid& g, int d,
      const std::function<void(const Point&, std::span<double>)>& f);

  std::span<double> at(std::size_t cell) {
    return {values.data() + cell * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> at(std::size_t cell) const {
    return {values.data() + cell * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  ScalarField component(int i) const;
};

/// Field of symmetric d x d matrices, stored column-major per cell.
struct MatrixField {
  Grid grid;
  int dim = 1;
  std::vector<double> values;

  MatrixField() = default;
  MatrixField(const Grid& g, int d);

  static MatrixField identity(const Grid& g, int d);
  static MatrixField from_function(
      const Grid& g, int d,
      const std::function<Eigen::MatrixXd(const Point&)>& f);

  Eigen::Map<Eigen::MatrixXd> at(std::size_t cell) {
    return {values.data() + cell * stride(), dim, dim};
  }
  Eigen::Map<const Eigen::MatrixXd> at(std::size_t cell) const {
    return {values.data() + cell * stride(), dim, dim};
  }
  std::size_t stride() const { return static_cast<std::size_t>(dim) * dim; }

  /// Throws invalid_input if some cell is not symmetric within 1e-12.
  void check_symmetric() const;
};

struct IntegralResult {
  double value = 0.0;
  bool empty = false;
};

IntegralResult integrate(const ScalarField& f);
IntegralResult integrate(const ScalarField& f, const Cube& region);

}  // namespace vlw
