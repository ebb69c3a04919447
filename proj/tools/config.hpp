#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmgf/hankel.hpp"
#include "lmgf/stack.hpp"

namespace lmgf::app {

// any schema violation; the message names the offending field
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Problem { Maxwell, ElasticTensor, ElasticVector };

struct Point3 {
  double x = 0, y = 0, z = 0;
};

struct RunConfig {
  Problem problem = Problem::Maxwell;
  double omega = 0;
  std::vector<double> interfaces;
  std::vector<Material> layers;
  double loss = 0;
  Point3 source;
  std::vector<double> k_rho;
  double alpha = 0;
  std::vector<double> target_z;
  std::vector<Point3> target_points;
  std::string output_path;
  std::string output_format = "csv";
  QuadratureSpec quadrature;
  Field field = Field::GE;  // Maxwell only; elastic runs always use Field::Elastic
  double perturb_coefficients = 0;

  LayerStack stack() const { return LayerStack(interfaces, layers, loss); }
  Field spatial_field() const { return problem == Problem::Maxwell ? field : Field::Elastic; }
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace lmgf::app
