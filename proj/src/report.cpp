#include "uwcrb/report.hpp"

#include <cstdio>
#include <ostream>

namespace uwcrb {
namespace {

nlohmann::json terms_json(const CrbTerms& t) {
  return {{"tof", t.tof}, {"depth_s", t.depth_s}, {"depth_d", t.depth_d}, {"ssp", t.ssp},
          {"total", t.total()}};
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::json to_json(const CrbReport& r) {
  const auto& p = r.projection;
  return {
      {"k0", r.k0},
      {"geometry",
       {{"t", r.geometry.t},
        {"h", r.geometry.h},
        {"D", r.geometry.D},
        {"theta_s", r.geometry.theta_s},
        {"theta_d", r.geometry.theta_d},
        {"theta_0", r.geometry.theta_0}}},
      {"crb_h", terms_json(r.crb_h)},
      {"crb_d", terms_json(r.crb_d)},
      {"crb_h_transform", r.crb_h_transform},
      {"crb_d_transform", r.crb_d_transform},
      {"cross_check_delta", r.cross_check_delta()},
      {"projection",
       {{"value", p.value},
        {"riemann_approx", p.riemann_approx},
        {"upper_bound", p.upper_bound},
        {"energy", p.energy},
        {"delta_z", p.delta_z},
        {"samples_in_interval", p.samples_in_interval}}},
      {"valid", r.valid},
  };
}

nlohmann::json to_json(const BoundValidationReport& r) {
  return {{"trials", r.trials},
          {"excluded", r.excluded},
          {"D_true", r.D_true},
          {"mean_D_hat", r.mean_D_hat},
          {"empirical_bias", r.empirical_bias},
          {"empirical_variance", r.empirical_variance},
          {"empirical_mse", r.empirical_mse},
          {"crb_d", r.crb_d},
          {"efficiency_ratio", r.efficiency_ratio},
          {"standard_error_of_variance", r.standard_error_of_variance},
          {"z_d_variance", r.z_d_variance}};
}

void write_text(std::ostream& out, const CrbReport& r) {
  char line[160];
  auto row = [&](const char* name, double h, double d) {
    std::snprintf(line, sizeof line, "  %-10s %16.6e %16.6e\n", name, h, d);
    out << line;
  };
  std::snprintf(line, sizeof line, "k0 = %.10e s/m  t = %.9f s  h = %.3f m  D = %.3f m\n", r.k0,
                r.geometry.t, r.geometry.h, r.geometry.D);
  out << line;
  std::snprintf(line, sizeof line, "theta_s = %.6f  theta_d = %.6f  theta_0 = %.6f rad\n",
                r.geometry.theta_s, r.geometry.theta_d, r.geometry.theta_0);
  out << line;
  out << "  term                 CRB_h [m^2]      CRB_D [m^2]\n";
  row("tof", r.crb_h.tof, r.crb_d.tof);
  row("depth_s", r.crb_h.depth_s, r.crb_d.depth_s);
  row("depth_d", r.crb_h.depth_d, r.crb_d.depth_d);
  row("ssp", r.crb_h.ssp, r.crb_d.ssp);
  row("total", r.crb_h_total, r.crb_d_total);
  row("transform", r.crb_h_transform, r.crb_d_transform);
  std::snprintf(line, sizeof line, "cross-check delta (range) = %.3e\n", r.cross_check_delta());
  out << line;
  std::snprintf(line, sizeof line,
                "projection = %.6e  riemann = %.6e  upper bound = %.6e  (samples %s path)\n",
                r.projection.value, r.projection.riemann_approx, r.projection.upper_bound,
                r.projection.samples_in_interval ? "inside" : "outside");
  out << line;
}

void write_csv(std::ostream& out, const BoundValidationReport& r) {
  out << kMonteCarloCsvHeader << '\n';
  out << r.trials << ',' << r.excluded;
  for (double v : {r.D_true, r.mean_D_hat, r.empirical_bias, r.empirical_variance, r.empirical_mse,
                   r.crb_d, r.efficiency_ratio, r.standard_error_of_variance, r.z_d_variance}) {
    out << ',' << g17(v);
  }
  out << '\n';
}

}  // namespace uwcrb
