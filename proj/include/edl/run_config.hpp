#pragma once

// Everything a CLI run depends on. Embedded verbatim in every JSON output so
// a run can be repeated from its own metadata.

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "edl/error.hpp"
#include "edl/qform.hpp"
#include "edl/radial_ode.hpp"

namespace edl {

struct RunConfig {
  std::string command = "profile";
  std::string f = "linear:2";
  double t = 1;
  double t_min = 0.5, t_max = 2;
  int n_t = 16;

  double startup_radius = 0.05;
  double picard_tol = 1e-12;
  int picard_max_iter = 50;
  double rtol = 1e-10, atol = 1e-12;
  double zero_margin = 0.02;
  double pi_clearance = 1e-3;
  int dense_points = 2048;

  int n_rho = 128, n_theta = 256;
  std::string out = "out";
  std::uint64_t seed = 1;

  std::optional<double> lambda, radius;
  std::string lambda_sweep;

  std::string field = "member";
  int mode = 3;

  std::array<double, 3> q{0, 0, 1};
  std::array<double, 3> w{0.1, 0, 0};
  double a = 1;

  bool operator==(const RunConfig&) const = default;

  SolverOptions solver() const
  {
    SolverOptions o;
    o.startup_radius = startup_radius;
    o.picard_tol = picard_tol;
    o.picard_max_iter = picard_max_iter;
    o.step.rtol = rtol;
    o.step.atol = atol;
    o.zero_margin = zero_margin;
    o.pi_clearance = pi_clearance;
    o.dense_points = dense_points;
    return o;
  }

  MeshOptions mesh() const
  {
    MeshOptions m;
    m.n_rho = n_rho;
    m.n_theta = n_theta;
    return m;
  }

  void validate() const
  {
    for (double v : {startup_radius, picard_tol, rtol, atol, zero_margin, pi_clearance})
      if (!(v > 0)) throw DomainError("tolerances and margins must be positive");
    if (picard_max_iter < 1) throw DomainError("picard_max_iter must be >= 1");
    if (dense_points < 16) throw DomainError("dense_points must be >= 16");
    if (!(t_min > 0)) throw DomainError("t_min must be positive");
    if (!(t_min < t_max)) throw DomainError("t_min < t_max required");
    if (n_t < 2) throw DomainError("n_t must be >= 2");
    if (n_rho < 3 || n_theta < 8) throw DomainError("mesh needs n_rho >= 3 and n_theta >= 8");
    if (mode < 2) throw DomainError("mode must be >= 2");
  }
};

inline void to_json(nlohmann::json& j, const RunConfig& c)
{
  j = nlohmann::json{{"command", c.command},
                     {"f", c.f},
                     {"t", c.t},
                     {"t_min", c.t_min},
                     {"t_max", c.t_max},
                     {"n_t", c.n_t},
                     {"startup_radius", c.startup_radius},
                     {"picard_tol", c.picard_tol},
                     {"picard_max_iter", c.picard_max_iter},
                     {"rtol", c.rtol},
                     {"atol", c.atol},
                     {"zero_margin", c.zero_margin},
                     {"pi_clearance", c.pi_clearance},
                     {"dense_points", c.dense_points},
                     {"n_rho", c.n_rho},
                     {"n_theta", c.n_theta},
                     {"out", c.out},
                     {"seed", c.seed},
                     {"lambda", c.lambda ? nlohmann::json(*c.lambda) : nlohmann::json()},
                     {"radius", c.radius ? nlohmann::json(*c.radius) : nlohmann::json()},
                     {"lambda_sweep", c.lambda_sweep},
                     {"field", c.field},
                     {"mode", c.mode},
                     {"q", c.q},
                     {"w", c.w},
                     {"a", c.a}};
}

inline void from_json(const nlohmann::json& j, RunConfig& c)
{
  RunConfig d;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("command", d.command);
  get("f", d.f);
  get("t", d.t);
  get("t_min", d.t_min);
  get("t_max", d.t_max);
  get("n_t", d.n_t);
  get("startup_radius", d.startup_radius);
  get("picard_tol", d.picard_tol);
  get("picard_max_iter", d.picard_max_iter);
  get("rtol", d.rtol);
  get("atol", d.atol);
  get("zero_margin", d.zero_margin);
  get("pi_clearance", d.pi_clearance);
  get("dense_points", d.dense_points);
  get("n_rho", d.n_rho);
  get("n_theta", d.n_theta);
  get("out", d.out);
  get("seed", d.seed);
  if (j.contains("lambda") && !j.at("lambda").is_null()) d.lambda = j.at("lambda").get<double>();
  if (j.contains("radius") && !j.at("radius").is_null()) d.radius = j.at("radius").get<double>();
  get("lambda_sweep", d.lambda_sweep);
  get("field", d.field);
  get("mode", d.mode);
  get("q", d.q);
  get("w", d.w);
  get("a", d.a);
  c = d;
}

}  // namespace edl
