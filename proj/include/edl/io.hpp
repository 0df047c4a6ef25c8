#pragma once

// CSV / JSON writers. CSV floats use the shortest round-trip form unless a
// digit count is requested.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edl/eigen_disk.hpp"
#include "edl/family_map.hpp"
#include "edl/format.hpp"
#include "edl/qform.hpp"
#include "edl/radial_ode.hpp"
#include "edl/verify.hpp"

namespace edl {

using nlohmann::json;

inline std::ofstream open_out(const std::filesystem::path& p)
{
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw DomainError("cannot write " + p.string());
  return os;
}

inline void write_json(const std::filesystem::path& p, const json& j)
{
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(); }

// profiles

inline void write_profile_csv(std::ostream& os, const RadialProfile& p)
{
  os << "rho,U,Uprime,Usecond\n";
  for (std::size_t i = 0; i < p.rho.size(); ++i)
    os << format_roundtrip(p.rho[i]) << ',' << format_roundtrip(p.U[i]) << ',' << format_roundtrip(p.Uprime[i]) << ','
       << format_roundtrip(p.Usecond[i]) << '\n';
}

inline json profile_metadata(const RadialProfile& p)
{
  return {{"t", p.t},
          {"r_t", opt(p.r_t)},
          {"alpha", opt(p.slope_at_zero)},
          {"f", p.nl.label},
          {"rho_max", p.rho_max()},
          {"points", p.rho.size()},
          {"startup_radius", p.startup_radius},
          {"picard_iterations", p.picard_iterations},
          {"contraction_bound", p.contraction_bound},
          {"tolerances",
           {{"picard_tol", p.opts.picard_tol},
            {"rtol", p.opts.step.rtol},
            {"atol", p.opts.step.atol},
            {"zero_margin", p.opts.zero_margin},
            {"pi_clearance", p.opts.pi_clearance}}}};
}

// eigenpairs

inline void write_eigen_csv(std::ostream& os, const std::vector<EigenPair>& rows)
{
  os << "lambda,R,alpha\n";
  for (const auto& r : rows)
    os << format_significant(r.lambda, 12) << ',' << format_significant(r.R, 12) << ','
       << format_significant(r.alpha, 12) << '\n';
}

// atlas

inline json atlas_manifest(const FamilyAtlas& a)
{
  json profiles = json::array();
  for (std::size_t i = 0; i < a.t_grid.size(); ++i)
    profiles.push_back({{"index", i},
                        {"t", a.t_grid[i]},
                        {"r_t", a.r_knot[i]},
                        {"dr_dt", a.dr_knot[i]},
                        {"file", "profile_" + std::to_string(i) + ".csv"}});
  json boundary = json::array();
  for (const auto& b : a.boundary) boundary.push_back({b[0], b[1]});
  return {{"f", a.nl.label},
          {"t_min", a.t_grid.front()},
          {"t_max", a.t_grid.back()},
          {"rho_ext", a.rho_ext},
          {"region_margin", a.margin_S},
          {"boundary_band", a.boundary_band},
          {"profiles", profiles},
          {"boundary", boundary}};
}

/// Profile CSV with the variation columns.
inline void write_atlas_profile_csv(std::ostream& os, const FamilyAtlas& a, std::size_t i)
{
  const auto& p = *a.profiles[i];
  const auto& v = *a.variations[i];
  os << "rho,U,Uprime,Usecond,H,Hprime\n";
  for (std::size_t k = 0; k < p.rho.size(); ++k)
    os << format_roundtrip(p.rho[k]) << ',' << format_roundtrip(p.U[k]) << ',' << format_roundtrip(p.Uprime[k]) << ','
       << format_roundtrip(p.Usecond[k]) << ',' << format_roundtrip(v.H[k]) << ',' << format_roundtrip(v.Hprime[k])
       << '\n';
}

// Q fields

inline void write_qfield_csv(std::ostream& os, const QFieldReport& r)
{
  os << "i,j,rho,theta,x,y,z,q11,q12,absQ,pde_residual\n";
  for (const auto& n : r.nodes)
    os << n.i << ',' << n.j << ',' << format_roundtrip(n.rho) << ',' << format_roundtrip(n.theta) << ','
       << format_roundtrip(n.x[0]) << ',' << format_roundtrip(n.x[1]) << ',' << format_roundtrip(n.x[2]) << ','
       << format_roundtrip(n.form.q11) << ',' << format_roundtrip(n.form.q12) << ',' << format_roundtrip(n.abs_Q)
       << ',' << format_roundtrip(n.pde_residual) << '\n';
}

inline json qfield_summary(const QFieldReport& r)
{
  json zeros = json::array();
  for (const auto& z : r.zeros) {
    json e{{"chart", {z.z.real(), z.z.imag()}},
           {"point", {z.x[0], z.x[1], z.x[2]}},
           {"rho", z.rho},
           {"theta", z.theta},
           {"abs_P", z.abs_P},
           {"circle_radius", z.circle_radius},
           {"note", z.note}};
    if (z.index) {
      e["index"] = z.index->index.str();
      e["index_value"] = z.index->index.value();
      e["winding"] = z.index->winding;
      e["negative"] = z.index->negative;
    } else {
      e["index"] = nullptr;
    }
    zeros.push_back(e);
  }
  return {{"label", r.label},
          {"center", {r.domain.center[0], r.domain.center[1], r.domain.center[2]}},
          {"radius", r.domain.radius},
          {"n_rho", r.mesh.n_rho},
          {"n_theta", r.mesh.n_theta},
          {"max_abs_Q", r.max_abs_Q},
          {"max_abs_pde_residual", r.max_abs_residual},
          {"identically_zero", r.identically_zero},
          {"all_indices_negative", r.all_indices_negative()},
          {"zeros", zeros}};
}

inline json similarity_json(const SimilarityReport& s)
{
  return {{"testable_nodes", s.testable_nodes},
          {"max_ratio", s.max_ratio},
          {"max_ratio_half", s.max_ratio_half},
          {"spacing", s.spacing},
          {"resolved", s.resolved},
          {"note", s.note}};
}

// verification

inline std::string verify_line_text(const VerifyLine& l)
{
  return std::string(l.pass ? "PASS" : "FAIL") + " " + l.lemma + " t=" + format_significant(l.t, 6) +
         " margin=" + format_significant(l.margin, 6) + " at=" + format_significant(l.where, 6) +
         (l.message.empty() ? "" : " (" + l.message + ")");
}

inline json verify_json(const VerifyReport& r)
{
  json lines = json::array();
  for (const auto& l : r.lines)
    lines.push_back({{"lemma", l.lemma},
                     {"t", l.t},
                     {"pass", l.pass},
                     {"margin", std::isfinite(l.margin) ? json(l.margin) : json()},
                     {"where", std::isfinite(l.where) ? json(l.where) : json()},
                     {"message", l.message}});
  return {{"f", r.f_label}, {"t", r.t}, {"all_pass", r.all_pass()}, {"failures", r.failures()}, {"lines", lines}};
}

}  // namespace edl
