#include "uwcrb/config.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "uwcrb/error.hpp"

namespace uwcrb {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ValidationError, field + ": " + why);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) invalid(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) invalid(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  const std::string field = path.empty() ? key : path + "." + key;
  if (!v.is_number()) invalid(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(field, "must be finite");
  return d;
}

double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  return obj.contains(key) ? number_at(obj, key, path) : fallback;
}

std::size_t count_or(const json& obj, const std::string& key, const std::string& path,
                     std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    invalid(path + "." + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> numbers_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  const std::string field = path + "." + key;
  if (!v.is_array()) invalid(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) invalid(field, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

BasisFunction basis_from_json(const json& j, const std::string& path, double depth_extent) {
  const json& kind_json = require(j, "kind", path);
  if (!kind_json.is_string()) invalid(path + ".kind", "expected a string");
  const std::string kind = kind_json.get<std::string>();
  double lo = 0.0;
  double hi = depth_extent;
  if (j.contains("domain")) {
    const auto d = numbers_at(j, "domain", path);
    if (d.size() != 2) invalid(path + ".domain", "expected [lo, hi]");
    lo = d[0];
    hi = d[1];
  }
  try {
    if (kind == "constant") return BasisFunction::constant(number_at(j, "value", path));
    if (kind == "polynomial") {
      return BasisFunction(PolynomialShape{lo, hi, numbers_at(j, "coefficients", path)});
    }
    if (kind == "legendre") {
      const json& deg = require(j, "degree", path);
      if (!deg.is_number_integer()) invalid(path + ".degree", "expected an integer");
      return BasisFunction::legendre(deg.get<int>(), lo, hi);
    }
    if (kind == "hat") {
      return BasisFunction(HatShape{number_at(j, "left", path), number_at(j, "peak", path),
                                    number_at(j, "right", path)});
    }
    if (kind == "tabulated") {
      return BasisFunction(TabulatedShape{numbers_at(j, "knots", path), numbers_at(j, "values", path)});
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) invalid(path, e.what());
    throw;
  }
  invalid(path + ".kind", "unknown basis kind '" + kind + "'");
}

Eigen::VectorXd sample_depths_from_json(const json& noise, double depth_extent) {
  if (!noise.contains("samples")) return uniform_column_depths(depth_extent, 10);
  const json& s = noise.at("samples");
  const std::string rule = s.value("rule", std::string("uniform_column"));
  if (rule == "uniform_column") {
    const std::size_t count = count_or(s, "count", "noise.samples", 10);
    if (count == 0) invalid("noise.samples.count", "must be >= 1");
    return uniform_column_depths(depth_extent, count);
  }
  if (rule == "explicit") {
    const auto d = numbers_at(s, "depths", "noise.samples");
    return Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  }
  invalid("noise.samples.rule", "unknown rule '" + rule + "'");
}

}  // namespace

SweepConfig config_from_json(const json& j) {
  if (!j.is_object()) invalid("<root>", "expected an object");
  const json& env = require(j, "environment", "");
  const double dh = number_at(env, "horizontal_extent", "environment");
  const double dz = number_at(env, "depth_extent", "environment");
  if (!(dh > 0.0)) invalid("environment.horizontal_extent", "must be > 0");
  if (!(dz > 0.0)) invalid("environment.depth_extent", "must be > 0");

  const json& prof = require(j, "profile", "");
  const BasisFunction nominal = basis_from_json(require(prof, "nominal", "profile"), "profile.nominal", dz);
  std::vector<BasisFunction> basis;
  if (prof.contains("basis")) {
    const json& arr = prof.at("basis");
    if (!arr.is_array()) invalid("profile.basis", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      basis.push_back(basis_from_json(arr[i], "profile.basis[" + std::to_string(i) + "]", dz));
    }
  }
  std::vector<double> coeffs;
  if (prof.contains("coefficients")) coeffs = numbers_at(prof, "coefficients", "profile");
  if (coeffs.size() != basis.size()) {
    invalid("profile.coefficients", "expected " + std::to_string(basis.size()) + " values");
  }
  std::optional<SoundSpeedProfile> profile;
  try {
    profile.emplace(nominal, basis,
                    Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size())),
                    DepthDomain{0.0, dz});
  } catch (const Error& e) {
    invalid("profile", e.what());
  }

  const json& noise_json = require(j, "noise", "");
  NoiseModel noise;
  noise.sigma_t_sq = number_at(noise_json, "sigma_t_sq", "noise");
  noise.sigma_z_sq = number_at(noise_json, "sigma_z_sq", "noise");
  noise.sigma_c_sq = number_at(noise_json, "sigma_c_sq", "noise");
  noise.sample_depths = sample_depths_from_json(noise_json, dz);
  try {
    noise.validate(*profile);
    build_sampling_matrix(*profile, noise.sample_depths);
  } catch (const Error& e) {
    invalid("noise", e.what());
  }

  SweepConfig cfg{dh, dz, number_or(j, "source_depth", "", 0.0), 200, 100, *profile, noise, {}, {}};
  if (!(cfg.source_depth >= 0.0 && cfg.source_depth <= dz)) {
    invalid("source_depth", "must lie within [0, depth_extent]");
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    cfg.n_h = count_or(g, "n_h", "grid", cfg.n_h);
    cfg.n_z = count_or(g, "n_z", "grid", cfg.n_z);
  }
  if (cfg.n_h < 2) invalid("grid.n_h", "must be >= 2");
  if (cfg.n_z < 2) invalid("grid.n_z", "must be >= 2");

  if (j.contains("montecarlo")) {
    const json& mc = j.at("montecarlo");
    cfg.montecarlo.h = number_or(mc, "h", "montecarlo", 0.0);
    cfg.montecarlo.z_d = number_or(mc, "z_d", "montecarlo", 0.0);
    cfg.montecarlo.trials = count_or(mc, "trials", "montecarlo", cfg.montecarlo.trials);
    if (mc.contains("seed")) {
      if (!mc.at("seed").is_number_unsigned()) invalid("montecarlo.seed", "expected an unsigned integer");
      cfg.montecarlo.seed = mc.at("seed").get<std::uint64_t>();
    }
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    cfg.output.csv = o.value("csv", cfg.output.csv);
    cfg.output.mc_csv = o.value("mc_csv", cfg.output.mc_csv);
    cfg.output.mc_json = o.value("mc_json", cfg.output.mc_json);
  }
  return cfg;
}

SweepConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << "line " << line << ", column " << column << ": " << e.what();
    throw Error(ErrorCode::ParseError, msg.str());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ValidationError, e.what());
  }
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace uwcrb
