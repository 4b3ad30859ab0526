#include "vlw/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vlw/error.hpp"
#include "vlw/muckenhoupt.hpp"

namespace vlw {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    std::ostringstream out;
    out << origin_ << ":" << line_of(path) << ": field '" << path << "': " << msg;
    raise(ErrorKind::config, out.str());
  }

  void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(path, "expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!ok.count(it.key())) fail(join(path, it.key()), "unknown key");
    }
  }

  double number(const json& v, const std::string& path) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v == "inf" || v == "infinity")) return kInfiniteExponent;
    fail(path, "expected a number");
  }

  double number(const json& obj, const std::string& path, const char* key, double fallback) const {
    if (!obj.contains(key)) return fallback;
    return number(obj.at(key), join(path, key));
  }

  double required(const json& obj, const std::string& path, const char* key) const {
    if (!obj.contains(key)) fail(join(path, key), "missing");
    return number(obj.at(key), join(path, key));
  }

  int integer(const json& obj, const std::string& path, const char* key, int fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    return v.get<int>();
  }

  bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(join(path, key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& obj, const std::string& path, const char* key,
                     const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
  }

  // a number is accepted as a one-element list
  std::vector<double> numbers(const json& obj, const std::string& path, const char* key,
                              std::vector<double> fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    const std::string p = join(path, key);
    if (!v.is_array()) return {number(v, p)};
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], p + "[" + std::to_string(i) + "]"));
    return out;
  }

  static std::string join(const std::string& a, const std::string& b) {
    return a.empty() ? b : a + "." + b;
  }

  int line_of(const std::string& path) const {
    std::size_t pos = 0;
    std::stringstream parts(path);
    std::string part;
    while (std::getline(parts, part, '.')) {
      const auto br = part.find('[');
      if (br != std::string::npos) part = part.substr(0, br);
      const auto hit = text_.find("\"" + part + "\"", pos);
      if (hit == std::string::npos) break;
      pos = hit;
    }
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
  }

 private:
  const std::string& text_;
  std::string origin_;
};

std::vector<double> per_axis(const Reader& rd, const json& obj, const std::string& path,
                             const char* key, int n, double fallback) {
  auto v = rd.numbers(obj, path, key, std::vector<double>(static_cast<std::size_t>(n), fallback));
  if (v.size() == 1 && n > 1) v.assign(static_cast<std::size_t>(n), v[0]);
  if (static_cast<int>(v.size()) != n) rd.fail(Reader::join(path, key), "expected one value per axis");
  return v;
}

Grid read_grid(const Reader& rd, const json& root) {
  if (!root.contains("grid")) rd.fail("grid", "missing");
  const json& g = root.at("grid");
  rd.allow(g, "grid", {"n", "lower", "upper", "m"});
  const int n = rd.integer(g, "grid", "n", 1);
  if (n < 1 || n > 3) rd.fail("grid.n", "dimension must be 1, 2 or 3");
  const int m = rd.integer(g, "grid", "m", 0);
  if (m < 2) rd.fail("grid.m", "need at least 2 cells per axis");
  const auto lo = per_axis(rd, g, "grid", "lower", n, 0.0);
  const auto up = per_axis(rd, g, "grid", "upper", n, 1.0);
  try {
    return make_uniform_grid(n, lo, up, m);
  } catch (const Error& e) {
    rd.fail("grid", e.what());
  }
}

ExponentFunction read_exponent(const Reader& rd, const json& root, const Grid& grid) {
  if (!root.contains("exponent")) return ExponentFunction::constant(grid, 2.0);
  const json& e = root.at("exponent");
  const std::string path = "exponent";
  rd.allow(e, path, {"kind", "value", "base", "slope", "axis", "at", "left", "right", "values",
                     "inner", "outer"});
  const std::string kind = rd.string(e, path, "kind", "constant");
  const int n = grid.dim();
  try {
    if (kind == "constant") {
      return ExponentFunction::constant(grid, rd.required(e, path, "value"));
    }
    if (kind == "affine") {
      const double base = rd.required(e, path, "base");
      const auto slope = per_axis(rd, e, path, "slope", n, 0.0);
      return ExponentFunction::from_function(grid, [&](const Point& x) {
        double v = base;
        for (int a = 0; a < n; ++a) v += slope[static_cast<std::size_t>(a)] * x[a];
        return v;
      });
    }
    if (kind == "piecewise") {
      const int axis = rd.integer(e, path, "axis", 0);
      if (axis < 0 || axis >= n) rd.fail("exponent.axis", "axis out of range");
      const double at = rd.required(e, path, "at");
      const double left = rd.required(e, path, "left");
      const double right = rd.required(e, path, "right");
      return ExponentFunction::from_function(grid, [&](const Point& x) { return x[axis] < at ? left : right; });
    }
    if (kind == "radial") {
      // inner + (outer - inner) |x|^2 / (1 + |x|^2)
      const double inner = rd.required(e, path, "inner");
      const double outer = rd.required(e, path, "outer");
      return ExponentFunction::from_function(grid, [&](const Point& x) {
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
        return inner + (outer - inner) * r2 / (1.0 + r2);
      });
    }
    if (kind == "table") {
      auto values = rd.numbers(e, path, "values", {});
      if (values.size() != grid.cell_count()) rd.fail("exponent.values", "expected one value per cell");
      return ExponentFunction(grid, std::move(values));
    }
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::config) throw;
    rd.fail(path, err.what());
  }
  rd.fail("exponent.kind", "unknown kind '" + kind + "'");
}

WeightSpec read_weight(const Reader& rd, const json& root, const Grid& grid) {
  WeightSpec w;
  if (!root.contains("weight")) return w;
  const json& o = root.at("weight");
  const std::string path = "weight";
  rd.allow(o, path, {"generator", "d", "a", "b", "exponents", "theta_rate", "theta_offset", "scale",
                     "values"});
  w.generator = rd.string(o, path, "generator", "identity");
  w.d = rd.integer(o, path, "d", 1);
  w.a = rd.number(o, path, "a", 0.0);
  w.b = rd.number(o, path, "b", 0.0);
  w.exponents = rd.numbers(o, path, "exponents", {});
  w.theta_rate = rd.number(o, path, "theta_rate", 0.0);
  w.theta_offset = rd.number(o, path, "theta_offset", 0.0);
  w.scale = rd.number(o, path, "scale", 1.0);
  w.table = rd.numbers(o, path, "values", {});
  if (!(w.scale > 0.0)) rd.fail("weight.scale", "must be positive");
  if (w.generator == "identity") {
    if (w.d < 1 || w.d > 3) rd.fail("weight.d", "matrix size must be 1, 2 or 3");
  } else if (w.generator == "power") {
    w.d = 1;
  } else if (w.generator == "diagonal") {
    if (w.exponents.empty()) rd.fail("weight.exponents", "missing");
    w.d = static_cast<int>(w.exponents.size());
  } else if (w.generator == "rotating") {
    w.d = 2;
  } else if (w.generator == "table") {
    const std::size_t per = static_cast<std::size_t>(w.d * w.d);
    if (w.table.size() != grid.cell_count() * per) rd.fail("weight.values", "expected d*d values per cell");
  } else {
    rd.fail("weight.generator", "unknown generator '" + w.generator + "'");
  }
  return w;
}

FieldSpec read_field(const Reader& rd, const json& root) {
  FieldSpec f;
  if (!root.contains("field")) return f;
  const json& o = root.at("field");
  const std::string path = "field";
  rd.allow(o, path, {"kind", "value", "center", "at", "height", "sigma", "coeffs"});
  f.kind = rd.string(o, path, "kind", "constant");
  static const std::set<std::string> kinds{"constant", "random", "abs", "jump", "gaussian",
                                           "polynomial", "indicator"};
  if (!kinds.count(f.kind)) rd.fail("field.kind", "unknown kind '" + f.kind + "'");
  f.value = rd.numbers(o, path, "value", {1.0});
  f.center = rd.numbers(o, path, "center", {});
  f.at = rd.number(o, path, "at", 0.5);
  f.height = rd.number(o, path, "height", 0.2);
  f.sigma = rd.number(o, path, "sigma", 1.0);
  f.coeffs = rd.numbers(o, path, "coeffs", {});
  if (f.kind == "polynomial" && f.coeffs.empty()) rd.fail("field.coeffs", "missing");
  if (!(f.sigma > 0.0)) rd.fail("field.sigma", "must be positive");
  return f;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  Reader rd(text, origin);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte ? byte - 1 : 0), '\n');
    std::ostringstream msg;
    msg << origin << ":" << line << ": syntax error: " << e.what();
    raise(ErrorKind::config, msg.str());
  }
  rd.allow(root, "", {"grid", "exponent", "weight", "field", "family", "schedule", "epsilon",
                      "shells", "min_t", "k_max", "cube_side", "trials", "seed", "holder_constant",
                      "domain", "comment"});

  ExperimentConfig cfg;
  cfg.source_text = text;
  cfg.grid = read_grid(rd, root);
  cfg.exponent = read_exponent(rd, root, cfg.grid);
  cfg.weight = read_weight(rd, root, cfg.grid);
  cfg.field = read_field(rd, root);

  const int top = max_dyadic_level(cfg.grid);
  cfg.level_hi = std::min(3, top);
  if (root.contains("family")) {
    const json& fam = root.at("family");
    rd.allow(fam, "family", {"levels", "shifts"});
    const auto levels = rd.numbers(fam, "family", "levels", {0.0, static_cast<double>(cfg.level_hi)});
    if (levels.size() != 2) rd.fail("family.levels", "expected [lo, hi]");
    cfg.level_lo = static_cast<int>(levels[0]);
    cfg.level_hi = static_cast<int>(levels[1]);
    if (cfg.level_lo < 0 || cfg.level_hi < cfg.level_lo) rd.fail("family.levels", "need 0 <= lo <= hi");
    if (cfg.level_hi > top) {
      rd.fail("family.levels", "level " + std::to_string(cfg.level_hi) + " needs 2^level to divide m = " +
                                   std::to_string(cfg.grid.cells_per_axis()));
    }
    cfg.shifts = rd.boolean(fam, "family", "shifts", false);
  }
  if (root.contains("schedule")) {
    const json& s = root.at("schedule");
    rd.allow(s, "schedule", {"t0", "t_min", "ratio"});
    cfg.t0 = rd.number(s, "schedule", "t0", 0.0);
    cfg.t_min = rd.number(s, "schedule", "t_min", 0.0);
    cfg.ratio = rd.number(s, "schedule", "ratio", 0.5);
    if (!(cfg.ratio > 0.0 && cfg.ratio < 1.0)) rd.fail("schedule.ratio", "must lie in (0, 1)");
  }
  if (root.contains("domain")) {
    const json& d = root.at("domain");
    rd.allow(d, "domain", {"kind", "center", "radius"});
    const std::string kind = rd.string(d, "domain", "kind", "box");
    if (kind == "box_minus_ball") {
      cfg.domain.kind = Domain::Kind::box_minus_ball;
      const auto c = per_axis(rd, d, "domain", "center", cfg.grid.dim(), 0.0);
      for (int a = 0; a < cfg.grid.dim(); ++a) cfg.domain.center[a] = c[static_cast<std::size_t>(a)];
      cfg.domain.radius = rd.required(d, "domain", "radius");
    } else if (kind != "box") {
      rd.fail("domain.kind", "unknown kind '" + kind + "'");
    }
  }
  cfg.epsilon = rd.number(root, "", "epsilon", 0.05);
  if (!(cfg.epsilon > 0.0)) rd.fail("epsilon", "must be positive");
  cfg.shells = rd.integer(root, "", "shells", 4);
  cfg.min_t = rd.number(root, "", "min_t", 0.0);
  cfg.k_max = rd.integer(root, "", "k_max", 8);
  cfg.cube_side = rd.number(root, "", "cube_side", 0.0);
  cfg.trials = rd.integer(root, "", "trials", 1);
  if (cfg.trials < 1) rd.fail("trials", "must be at least 1");
  cfg.holder_constant = rd.number(root, "", "holder_constant", 4.0);
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      rd.fail("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (cfg.field.kind == "random" && !cfg.seed) rd.fail("seed", "mandatory for a random field");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::config, path.string() + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str(), path.string());
  cfg.source_path = path;
  return cfg;
}

MatrixField build_weight(const WeightSpec& spec, const Grid& grid) {
  MatrixField w;
  if (spec.generator == "identity") {
    w = MatrixField::identity(grid, spec.d);
  } else if (spec.generator == "power") {
    w = as_matrix_weight(make_power_weight(grid, spec.a));
  } else if (spec.generator == "diagonal") {
    w = make_diagonal_weight(grid, spec.exponents);
  } else if (spec.generator == "rotating") {
    const double rate = spec.theta_rate;
    const double offset = spec.theta_offset;
    w = make_rotating_weight(grid, [=](const Point& x) { return offset + rate * x[0]; }, spec.a, spec.b);
  } else if (spec.generator == "table") {
    w = MatrixField(grid, spec.d);
    w.values = spec.table;
    w.check_symmetric();
  } else {
    raise(ErrorKind::config, "unknown weight generator '" + spec.generator + "'");
  }
  if (spec.scale != 1.0) {
    for (double& v : w.values) v *= spec.scale;
  }
  return w;
}

VectorField build_field(const FieldSpec& spec, const Grid& grid, int d, std::uint64_t seed) {
  const int n = grid.dim();
  std::vector<double> dir(static_cast<std::size_t>(d), 1.0);
  if (spec.kind != "random") {
    if (spec.value.size() == 1) {
      dir.assign(static_cast<std::size_t>(d), spec.value[0]);
    } else if (static_cast<int>(spec.value.size()) == d) {
      dir = spec.value;
    } else {
      raise(ErrorKind::config, "field.value: expected 1 or d values");
    }
  }
  if (spec.kind == "random") {
    VectorField f(grid, d);
    std::mt19937_64 rng(seed);
    // top 53 bits mapped to [-1, 1); independent of the standard library's distributions
    for (double& v : f.values) v = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
    return f;
  }
  std::function<double(const Point&)> profile;
  if (spec.kind == "constant") {
    profile = [](const Point&) { return 1.0; };
  } else if (spec.kind == "abs") {
    std::vector<double> c = spec.center;
    if (c.empty()) c.assign(static_cast<std::size_t>(n), 0.5);
    if (c.size() == 1) c.assign(static_cast<std::size_t>(n), c[0]);
    profile = [c, n](const Point& x) {
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) r2 += (x[a] - c[static_cast<std::size_t>(a)]) * (x[a] - c[static_cast<std::size_t>(a)]);
      return std::sqrt(r2);
    };
  } else if (spec.kind == "jump") {
    const double at = spec.at;
    const double height = spec.height;
    profile = [at, height](const Point& x) {
      const double s = std::sin(std::numbers::pi * x[0]);
      return s * s * (1.0 + (x[0] >= at ? height : 0.0));
    };
  } else if (spec.kind == "gaussian") {
    const double s2 = spec.sigma * spec.sigma;
    profile = [s2, n](const Point& x) {
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
      return std::exp(-0.5 * r2 / s2);
    };
  } else if (spec.kind == "polynomial") {
    const auto c = spec.coeffs;
    profile = [c](const Point& x) {
      double v = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x[0] + *it;
      return v;
    };
  } else if (spec.kind == "indicator") {
    const double at = spec.at;
    profile = [at](const Point& x) { return x[0] < at ? 1.0 : 0.0; };
  } else {
    raise(ErrorKind::config, "unknown field kind '" + spec.kind + "'");
  }
  return VectorField::from_function(grid, d, [&](const Point& x, std::span<double> out) {
    const double v = profile(x);
    for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] = dir[static_cast<std::size_t>(i)] * v;
  });
}

CubeFamily build_family(const ExperimentConfig& cfg) {
  return dyadic_levels(cfg.grid, cfg.level_lo, cfg.level_hi, cfg.shifts);
}

}  // namespace vlw
