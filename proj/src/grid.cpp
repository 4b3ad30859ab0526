#include "vlw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vlw/error.hpp"

namespace vlw {

namespace {

constexpr double kGeomTol = 1e-12;

bool is_cubical(const Grid& g) {
  const double side = g.upper(0) - g.lower(0);
  for (int a = 1; a < g.dim(); ++a) {
    if (std::abs((g.upper(a) - g.lower(a)) - side) > kGeomTol * std::max(1.0, side)) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_domain: return "invalid-domain";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::singular_weight: return "singular-weight";
    case ErrorKind::degenerate_sample: return "degenerate-sample";
    case ErrorKind::resolution_limit: return "resolution-limit";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

Grid::Grid(int n, std::span<const double> lower, std::span<const double> upper,
           int m)
    : n_(n), m_(m) {
  if (n < 1 || n > 3) raise(ErrorKind::invalid_domain, "grid dimension must be 1, 2 or 3");
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n) {
    raise(ErrorKind::invalid_domain, "box corners must have one entry per axis");
  }
  if (m < 1) raise(ErrorKind::invalid_domain, "cells per axis must be positive");
  count_ = 1;
  cell_volume_ = 1.0;
  for (int a = 0; a < n; ++a) {
    if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]) || !(upper[a] > lower[a])) {
      std::ostringstream msg;
      msg << "degenerate box along axis " << a << ": [" << lower[a] << ", " << upper[a] << "]";
      raise(ErrorKind::invalid_domain, msg.str());
    }
    lower_[a] = lower[a];
    upper_[a] = upper[a];
    h_[a] = (upper[a] - lower[a]) / m;
    cell_volume_ *= h_[a];
    count_ *= static_cast<std::size_t>(m);
  }
}

double Grid::min_width() const {
  double h = h_[0];
  for (int a = 1; a < n_; ++a) h = std::min(h, h_[a]);
  return h;
}

std::array<int, 3> Grid::index(std::size_t cell) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < n_; ++a) {
    idx[a] = static_cast<int>(cell % static_cast<std::size_t>(m_));
    cell /= static_cast<std::size_t>(m_);
  }
  return idx;
}

std::size_t Grid::linear(const std::array<int, 3>& idx) const {
  std::size_t cell = 0;
  for (int a = n_ - 1; a >= 0; --a) {
    cell = cell * static_cast<std::size_t>(m_) + static_cast<std::size_t>(idx[a]);
  }
  return cell;
}

Point Grid::center(std::size_t cell) const {
  const auto idx = index(cell);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < n_; ++a) x[a] = lower_[a] + (idx[a] + 0.5) * h_[a];
  return x;
}

Grid make_uniform_grid(int n, std::span<const double> lower,
                       std::span<const double> upper, int m) {
  if (m < 2) raise(ErrorKind::invalid_domain, "uniform grid needs at least 2 cells per axis");
  return Grid(n, lower, upper, m);
}

bool Cube::contains(const Point& x, int n) const {
  for (int a = 0; a < n; ++a) {
    if (x[a] < lower[a] || x[a] >= lower[a] + side) return false;
  }
  return true;
}

double Cube::volume(int n) const { return std::pow(side, n); }

Point Cube::center(int n) const {
  Point c{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) c[a] = lower[a] + 0.5 * side;
  return c;
}

std::vector<std::size_t> cells_in(const Grid& grid, const Cube& cube) {
  const int n = grid.dim();
  const int m = grid.cells_per_axis();
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{1, 1, 1};  // exclusive
  for (int a = 0; a < n; ++a) {
    const double h = grid.width(a);
    // centre_i = L + (i + 1/2) h lies in [lo, lo + side)
    const double first = (cube.lower[a] - grid.lower(a)) / h - 0.5;
    const double last = (cube.lower[a] + cube.side - grid.lower(a)) / h - 0.5;
    lo[a] = std::max(0, static_cast<int>(std::ceil(first)));
    hi[a] = std::min(m, static_cast<int>(std::ceil(last)));
    if (hi[a] <= lo[a]) return {};
  }
  std::vector<std::size_t> cells;
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(hi[a] - lo[a]);
  cells.reserve(total);
  std::array<int, 3> idx = lo;
  for (int k = n; k < 3; ++k) idx[k] = 0;
  // odometer over the index box, axis 0 fastest, so output is sorted
  while (true) {
    cells.push_back(grid.linear(idx));
    int a = 0;
    for (; a < n; ++a) {
      if (++idx[a] < hi[a]) break;
      idx[a] = lo[a];
    }
    if (a == n) break;
  }
  return cells;
}

Cube whole_box(const Grid& grid) {
  if (!is_cubical(grid)) raise(ErrorKind::alignment, "grid box is not a cube");
  Cube q;
  for (int a = 0; a < grid.dim(); ++a) q.lower[a] = grid.lower(a);
  q.side = grid.upper(0) - grid.lower(0);
  return q;
}

CubeFamily dyadic_cubes(const Grid& grid, int level) {
  const int n = grid.dim();
  const int m = grid.cells_per_axis();
  if (level < 0 || level > 30) raise(ErrorKind::alignment, "dyadic level out of range");
  const int parts = 1 << level;
  if (m % parts != 0) {
    std::ostringstream msg;
    msg << "dyadic level " << level << " needs 2^" << level << " to divide m=" << m;
    raise(ErrorKind::alignment, msg.str());
  }
  const Cube box = whole_box(grid);
  const double side = box.side / parts;
  const int cells_per_cube = m / parts;
  CubeFamily family;
  family.disjoint = true;
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(parts);
  family.cubes.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    Cube q;
    q.side = side;
    for (int a = 0; a < n; ++a) {
      const int j = static_cast<int>(rest % static_cast<std::size_t>(parts));
      rest /= static_cast<std::size_t>(parts);
      // corner from integer cell offsets keeps it an exact multiple of h
      q.lower[a] = grid.lower(a) + (j * cells_per_cube) * grid.width(a);
    }
    family.cubes.push_back(q);
  }
  return family;
}

CubeFamily shifted_dyadic_cubes(const Grid& grid, int level) {
  const int n = grid.dim();
  const int m = grid.cells_per_axis();
  const int parts = 1 << level;
  if (level < 1 || m % (2 * parts) != 0) {
    raise(ErrorKind::alignment, "shifted dyadic cubes need level >= 1 and 2^(k+1) | m");
  }
  const Cube box = whole_box(grid);
  const double side = box.side / parts;
  const int cells_per_cube = m / parts;
  const int shift = cells_per_cube / 2;
  const int count = parts - 1;  // shifted cubes that stay inside the box
  CubeFamily family;
  family.disjoint = true;
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(count);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    Cube q;
    q.side = side;
    for (int a = 0; a < n; ++a) {
      const int j = static_cast<int>(rest % static_cast<std::size_t>(count));
      rest /= static_cast<std::size_t>(count);
      q.lower[a] = grid.lower(a) + (j * cells_per_cube + shift) * grid.width(a);
    }
    family.cubes.push_back(q);
  }
  return family;
}

int max_dyadic_level(const Grid& grid) {
  int level = 0;
  const int m = grid.cells_per_axis();
  while (m % (1 << (level + 1)) == 0) ++level;
  return level;
}

CubeFamily dyadic_levels(const Grid& grid, int lo, int hi, bool with_shifts) {
  CubeFamily family;
  for (int k = lo; k <= hi; ++k) {
    auto level = dyadic_cubes(grid, k);
    family.cubes.insert(family.cubes.end(), level.cubes.begin(), level.cubes.end());
    if (with_shifts && k >= 1 && grid.cells_per_axis() % (2 << k) == 0) {
      auto shifted = shifted_dyadic_cubes(grid, k);
      family.cubes.insert(family.cubes.end(), shifted.cubes.begin(), shifted.cubes.end());
    }
  }
  family.disjoint = (lo == hi) && !with_shifts;
  return family;
}

CubeFamily translate_tiling(const Cube& q, const Grid& grid) {
  const int n = grid.dim();
  if (!(q.side > 0.0)) raise(ErrorKind::precondition, "cube side must be positive");
  for (int a = 0; a < n; ++a) {
    if (std::abs(q.lower[a] + 0.5 * q.side) > kGeomTol * std::max(1.0, q.side)) {
      raise(ErrorKind::precondition, "translate_tiling requires a cube centred at the origin");
    }
  }
  // translates Q + side*k meet the box when their open interiors intersect it
  std::array<long, 3> kmin{0, 0, 0};
  std::array<long, 3> kmax{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    kmin[a] = static_cast<long>(std::floor((grid.lower(a) - q.lower[a]) / q.side - kGeomTol));
    kmax[a] = static_cast<long>(std::ceil((grid.upper(a) - q.lower[a]) / q.side + kGeomTol));
  }
  CubeFamily family;
  family.disjoint = true;
  std::array<long, 3> k = kmin;
  while (true) {
    Cube t;
    t.side = q.side;
    bool meets = true;
    for (int a = 0; a < n; ++a) {
      t.lower[a] = q.lower[a] + q.side * static_cast<double>(k[a]);
      const double lo = std::max(t.lower[a], grid.lower(a));
      const double hi = std::min(t.lower[a] + t.side, grid.upper(a));
      if (hi - lo <= kGeomTol * std::max(1.0, q.side)) meets = false;
    }
    if (meets) family.cubes.push_back(t);
    int a = 0;
    for (; a < n; ++a) {
      if (++k[a] <= kmax[a]) break;
      k[a] = kmin[a];
    }
    if (a == n) break;
  }
  return family;
}

Cube tripled(const Cube& q, int n) {
  Cube t;
  t.side = 3.0 * q.side;
  for (int a = 0; a < n; ++a) t.lower[a] = q.lower[a] - q.side;
  return t;
}

bool interiors_overlap(const Cube& a, const Cube& b, int n) {
  for (int k = 0; k < n; ++k) {
    const double lo = std::max(a.lower[k], b.lower[k]);
    const double hi = std::min(a.lower[k] + a.side, b.lower[k] + b.side);
    if (hi - lo <= kGeomTol * std::max(1.0, std::min(a.side, b.side))) return false;
  }
  return true;
}

bool has_overlap(const CubeFamily& family, int n) {
  const auto& c = family.cubes;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (interiors_overlap(c[i], c[j], n)) return true;
    }
  }
  return false;
}

ScalarField::ScalarField(const Grid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.cell_count()) {
    raise(ErrorKind::dimension_mismatch, "scalar field size does not match the grid");
  }
}

ScalarField ScalarField::from_function(const Grid& g,
                                       const std::function<double(const Point&)>& f) {
  ScalarField out(g);
  for (std::size_t i = 0; i < g.cell_count(); ++i) out.values[i] = f(g.center(i));
  return out;
}

VectorField VectorField::from_scalar(const ScalarField& f) {
  VectorField out(f.grid, 1);
  out.values = f.values;
  return out;
}

VectorField VectorField::from_function(
    const Grid& g, int d, const std::function<void(const Point&, std::span<double>)>& f) {
  VectorField out(g, d);
  for (std::size_t i = 0; i < g.cell_count(); ++i) f(g.center(i), out.at(i));
  return out;
}

ScalarField VectorField::component(int i) const {
  if (i < 0 || i >= dim) raise(ErrorKind::dimension_mismatch, "component index out of range");
  ScalarField out(grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    out.values[c] = values[c * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i)];
  }
  return out;
}

MatrixField::MatrixField(const Grid& g, int d)
    : grid(g), dim(d), values(g.cell_count() * static_cast<std::size_t>(d) * d, 0.0) {
  if (d < 1) raise(ErrorKind::dimension_mismatch, "matrix dimension must be positive");
}

MatrixField MatrixField::identity(const Grid& g, int d) {
  MatrixField out(g, d);
  for (std::size_t c = 0; c < g.cell_count(); ++c) out.at(c).setIdentity();
  return out;
}

MatrixField MatrixField::from_function(const Grid& g, int d,
                                       const std::function<Eigen::MatrixXd(const Point&)>& f) {
  MatrixField out(g, d);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    Eigen::MatrixXd v = f(g.center(c));
    if (v.rows() != d || v.cols() != d) {
      raise(ErrorKind::dimension_mismatch, "matrix generator returned the wrong shape");
    }
    out.at(c) = v;
  }
  out.check_symmetric();
  return out;
}

void MatrixField::check_symmetric() const {
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto w = at(c);
    if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      std::ostringstream msg;
      msg << "matrix field is not symmetric at cell " << c;
      raise(ErrorKind::invalid_input, msg.str());
    }
  }
}

IntegralResult integrate(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return {sum * f.grid.cell_volume(), f.values.empty()};
}

IntegralResult integrate(const ScalarField& f, const Cube& region) {
  const auto cells = cells_in(f.grid, region);
  if (cells.empty()) return {0.0, true};
  double sum = 0.0;
  for (auto c : cells) sum += f.values[c];
  return {sum * f.grid.cell_volume(), false};
}

}  // namespace vlw
