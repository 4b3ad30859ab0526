#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vlw/exponent.hpp"
#include "vlw/grid.hpp"
#include "vlw/sobolev.hpp"

namespace vlw {

struct FieldSpec {
  std::string kind = "constant";  // constant | random | abs | jump | gaussian | polynomial | indicator
  std::vector<double> value{1.0};  // constant value or direction per component
  std::vector<double> center;      // abs
  double at = 0.5;                 // jump, indicator
  double height = 0.2;             // jump
  double sigma = 1.0;              // gaussian
  std::vector<double> coeffs;      // polynomial in x_0
};

struct WeightSpec {
  std::string generator = "identity";  // identity | power | diagonal | rotating | table
  int d = 1;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> exponents;
  double theta_rate = 0.0;  // rotating: theta(x) = theta_offset + theta_rate * x_0
  double theta_offset = 0.0;
  double scale = 1.0;
  std::vector<double> table;
};

struct ExperimentConfig {
  std::string source_text;
  std::filesystem::path source_path;

  Grid grid;
  ExponentFunction exponent;
  WeightSpec weight;
  FieldSpec field;

  int level_lo = 0;
  int level_hi = 0;
  bool shifts = false;

  double t0 = 0.0;     // 0: box side / 4
  double t_min = 0.0;  // 0: 2h
  double ratio = 0.5;

  double epsilon = 0.05;
  int shells = 4;
  double min_t = 0.0;
  int k_max = 8;
  double cube_side = 0.0;  // tiled bound cube, 0: box side / 4
  int trials = 1;
  std::optional<std::uint64_t> seed;
  double holder_constant = 4.0;
  Domain domain;
};

/// Parses a JSON experiment file. Errors are ErrorKind::config with the line
/// and dotted field path in the message.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");

MatrixField build_weight(const WeightSpec& spec, const Grid& grid);
/// Field with `d` components; `seed` feeds the random kind.
VectorField build_field(const FieldSpec& spec, const Grid& grid, int d, std::uint64_t seed = 0);
CubeFamily build_family(const ExperimentConfig& cfg);

}  // namespace vlw
