#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lmgf/errors.hpp"

namespace lmgf::app {

namespace {

using json = nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

std::string path(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

double require_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError("missing required field '" + path(where, key) + "'");
  return number(obj.at(key), path(where, key));
}

std::optional<double> optional_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj.at(key), path(where, key));
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::string string_field(const json& obj, const std::string& where, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path(where, key) + ": expected a string");
  return v.get<std::string>();
}

Material parse_layer(const json& j, const std::string& where, Problem problem) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  if (j.contains("vacuum")) {
    only_keys(j, where, {"vacuum"});
    if (!j.at("vacuum").is_boolean() || !j.at("vacuum").get<bool>())
      throw ConfigError(where + ".vacuum: expected true");
    if (problem == Problem::Maxwell) throw ConfigError(where + ": vacuum layers exist only in elastic stacks");
    return Vacuum{};
  }
  if (problem == Problem::Maxwell) {
    only_keys(j, where, {"eps", "mu"});
    return EmMaterial{require_number(j, where, "eps"), require_number(j, where, "mu")};
  }
  only_keys(j, where, {"rho", "lambda", "mu"});
  return ElasticMaterial{require_number(j, where, "rho"), require_number(j, where, "lambda"),
                         require_number(j, where, "mu")};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(j, "config", {"schema_version", "problem", "omega", "stack", "source", "sweep", "targets", "output",
                          "quadrature", "loss", "field", "validate"});
  RunConfig c;
  if (!j.contains("schema_version")) throw ConfigError("missing required field 'schema_version'");
  if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != 1)
    throw ConfigError("schema_version: only version 1 is supported");

  if (!j.contains("problem")) throw ConfigError("missing required field 'problem'");
  const std::string problem = string_field(j, "", "problem");
  if (problem == "maxwell") c.problem = Problem::Maxwell;
  else if (problem == "elastic-tensor") c.problem = Problem::ElasticTensor;
  else if (problem == "elastic-vector") c.problem = Problem::ElasticVector;
  else throw ConfigError("problem: expected maxwell, elastic-tensor or elastic-vector");

  c.omega = require_number(j, "", "omega");
  if (!(c.omega > 0)) throw ConfigError("omega: must be positive");
  c.loss = optional_number(j, "", "loss").value_or(0.0);

  if (!j.contains("stack")) throw ConfigError("missing required field 'stack'");
  const json& st = j.at("stack");
  only_keys(st, "stack", {"interfaces", "layers"});
  if (!st.contains("interfaces")) throw ConfigError("missing required field 'stack.interfaces'");
  if (!st.contains("layers")) throw ConfigError("missing required field 'stack.layers'");
  c.interfaces = number_list(st.at("interfaces"), "stack.interfaces");
  if (!st.at("layers").is_array()) throw ConfigError("stack.layers: expected an array");
  for (size_t i = 0; i < st.at("layers").size(); ++i)
    c.layers.push_back(parse_layer(st.at("layers")[i], "stack.layers[" + std::to_string(i) + "]", c.problem));

  if (!j.contains("source")) throw ConfigError("missing required field 'source'");
  const json& src = j.at("source");
  only_keys(src, "source", {"x", "y", "z"});
  c.source = {optional_number(src, "source", "x").value_or(0.0), optional_number(src, "source", "y").value_or(0.0),
              require_number(src, "source", "z")};

  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    only_keys(sw, "sweep", {"k_rho", "alpha"});
    if (!sw.contains("k_rho")) throw ConfigError("missing required field 'sweep.k_rho'");
    const json& kr = sw.at("k_rho");
    if (kr.is_object()) {
      only_keys(kr, "sweep.k_rho", {"start", "stop", "count"});
      const double a = require_number(kr, "sweep.k_rho", "start"), b = require_number(kr, "sweep.k_rho", "stop");
      const json& n = kr.contains("count") ? kr.at("count") : throw ConfigError("missing required field 'sweep.k_rho.count'");
      if (!n.is_number_integer() || n.get<long>() < 1) throw ConfigError("sweep.k_rho.count: expected a positive integer");
      const long count = n.get<long>();
      for (long i = 0; i < count; ++i) c.k_rho.push_back(count == 1 ? a : a + (b - a) * double(i) / double(count - 1));
    } else {
      c.k_rho = number_list(kr, "sweep.k_rho");
    }
    for (double k : c.k_rho)
      if (!(k >= 0)) throw ConfigError("sweep.k_rho: values must be >= 0");
    c.alpha = optional_number(sw, "sweep", "alpha").value_or(0.0);
  }

  if (j.contains("targets")) {
    const json& tg = j.at("targets");
    only_keys(tg, "targets", {"z", "points"});
    if (tg.contains("z")) c.target_z = number_list(tg.at("z"), "targets.z");
    if (tg.contains("points")) {
      const json& pts = tg.at("points");
      if (!pts.is_array()) throw ConfigError("targets.points: expected an array of [x, y, z]");
      for (size_t i = 0; i < pts.size(); ++i) {
        const std::vector<double> p = number_list(pts[i], "targets.points[" + std::to_string(i) + "]");
        if (p.size() != 3) throw ConfigError("targets.points[" + std::to_string(i) + "]: expected [x, y, z]");
        c.target_points.push_back({p[0], p[1], p[2]});
      }
    }
  }

  if (j.contains("output")) {
    const json& out = j.at("output");
    only_keys(out, "output", {"path", "format"});
    if (out.contains("path")) c.output_path = string_field(out, "output", "path");
    if (out.contains("format")) c.output_format = string_field(out, "output", "format");
    if (c.output_format != "csv" && c.output_format != "json") throw ConfigError("output.format: expected csv or json");
  }

  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    only_keys(q, "quadrature", {"k_max", "truncation_factor", "panels", "rel_tol", "loss", "max_evaluations"});
    QuadratureSpec& s = c.quadrature;
    s.k_max = optional_number(q, "quadrature", "k_max").value_or(s.k_max);
    s.truncation_factor = optional_number(q, "quadrature", "truncation_factor").value_or(s.truncation_factor);
    s.panels = static_cast<int>(optional_number(q, "quadrature", "panels").value_or(s.panels));
    s.rel_tol = optional_number(q, "quadrature", "rel_tol").value_or(s.rel_tol);
    s.loss = optional_number(q, "quadrature", "loss").value_or(s.loss);
    s.max_evaluations = static_cast<long>(optional_number(q, "quadrature", "max_evaluations").value_or(double(s.max_evaluations)));
    if (!(s.rel_tol > 0 && s.rel_tol <= 1e-2)) throw ConfigError("quadrature.rel_tol: must lie in (0, 1e-2]");
    if (!(s.truncation_factor >= 2)) throw ConfigError("quadrature.truncation_factor: must be >= 2");
    if (s.k_max < 0 || s.loss < 0 || s.panels < 1 || s.max_evaluations < 1)
      throw ConfigError("quadrature: values must be positive");
  }

  if (j.contains("field")) {
    const std::string f = string_field(j, "", "field");
    if (f == "GE") c.field = Field::GE;
    else if (f == "GH") c.field = Field::GH;
    else throw ConfigError("field: expected GE or GH");
    if (c.problem != Problem::Maxwell) throw ConfigError("field: only meaningful for maxwell problems");
  }

  if (j.contains("validate")) {
    const json& v = j.at("validate");
    only_keys(v, "validate", {"perturb_coefficients"});
    c.perturb_coefficients = optional_number(v, "validate", "perturb_coefficients").value_or(0.0);
  }

  // stack-level checks surface as config errors too
  try {
    const LayerStack s = c.stack();
    const int t = s.locate(c.source.z);
    const Phase ph = s.phase(t);
    if (c.problem == Problem::ElasticTensor && ph != Phase::Solid)
      throw ConfigError("source.z: elastic-tensor sources must sit in a solid layer");
    if (c.problem == Problem::ElasticVector && ph != Phase::Fluid)
      throw ConfigError("source.z: elastic-vector sources must sit in a fluid layer");
  } catch (const Error& e) {
    const std::string where = e.kind() == ErrorKind::OnInterface ? "source.z" : "stack";
    throw ConfigError(where + ": " + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file '" + file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace lmgf::app
