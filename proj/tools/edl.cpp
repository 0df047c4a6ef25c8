// edl: command-line front end. Every subcommand writes CSV/JSON into --out
// and embeds its RunConfig in the JSON so `--config <file>` repeats the run.
//
// Exit codes: 0 success, 1 verification failure, 2 solver or config error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "edl/edl.hpp"

using namespace edl;
namespace fs = std::filesystem;

namespace {

int fail(const std::string& kind, const std::string& msg)
{
  std::cerr << json{{"error", kind}, {"message", msg}}.dump() << '\n';
  return 2;
}

std::array<double, 3> parse_vec3(const std::string& s)
{
  std::array<double, 3> v{};
  std::stringstream ss(s);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k == 3) throw DomainError("expected three comma-separated numbers, got '" + s + "'");
    std::size_t used = 0;
    try {
      v[k] = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw DomainError("bad number '" + item + "' in '" + s + "'");
    ++k;
  }
  if (k != 3) throw DomainError("expected three comma-separated numbers, got '" + s + "'");
  return v;
}

Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
json vec_json(const Vec3& v) { return {v[0], v[1], v[2]}; }

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

json base_json(const RunConfig& c) { return {{"config", c}}; }

// profile

int cmd_profile(const RunConfig& c)
{
  const auto p = solve_profile(parse_nonlinearity(c.f), c.t, c.solver());
  if (!p.r_t) throw NoZeroFound(p.rho_max(), p.U.back(), p.Uprime.back());
  {
    auto os = open_out(fs::path(c.out) / "profile.csv");
    write_profile_csv(os, p);
  }
  auto j = base_json(c);
  j["profile"] = profile_metadata(p);
  write_json(fs::path(c.out) / "profile.json", j);
  std::cout << "profile f=" << p.nl.label << " t=" << format_roundtrip(p.t) << " r_t=" << format_roundtrip(*p.r_t)
            << " alpha=" << format_roundtrip(*p.slope_at_zero) << '\n';
  return 0;
}

// verify

int cmd_verify(const RunConfig& c)
{
  VerifyOptions o;
  o.solver = c.solver();
  const auto rep = verify_lemmas(parse_nonlinearity(c.f), log_grid(c.t_min, c.t_max, c.n_t), o);
  auto j = base_json(c);
  j["verify"] = verify_json(rep);
  write_json(fs::path(c.out) / "verify.json", j);
  for (const auto& l : rep.lines) std::cout << verify_line_text(l) << '\n';
  std::cout << (rep.all_pass() ? "ALL PASS" : std::to_string(rep.failures()) + " FAILURES") << '\n';
  return rep.all_pass() ? 0 : 1;
}

// eigen

std::vector<double> parse_sweep(const std::string& s)
{
  const auto a = s.find(':'), b = s.rfind(':');
  if (a == std::string::npos || a == b) throw DomainError("lambda sweep must look like a:b:n, got '" + s + "'");
  double lo = 0, hi = 0;
  int n = 0;
  try {
    lo = std::stod(s.substr(0, a));
    hi = std::stod(s.substr(a + 1, b - a - 1));
    n = std::stoi(s.substr(b + 1));
  } catch (const std::exception&) {
    throw DomainError("lambda sweep must look like a:b:n, got '" + s + "'");
  }
  if (!(lo > 0 && hi > lo) || n < 2) throw DomainError("lambda sweep needs 0 < a < b and n >= 2");
  return log_grid(lo, hi, n);
}

int cmd_eigen(const RunConfig& c)
{
  std::vector<EigenPair> rows;
  const auto o = c.solver();
  if (c.lambda) rows.push_back(radius_for_lambda(*c.lambda, o));
  if (c.radius) rows.push_back(lambda_for_radius(*c.radius, o));
  if (!c.lambda_sweep.empty()) {
    const auto ls = parse_sweep(c.lambda_sweep);
    std::vector<EigenPair> sweep(ls.size());
    parallel_for(ls.size(), [&](std::size_t i) { sweep[i] = radius_for_lambda(ls[i], o); });
    rows.insert(rows.end(), sweep.begin(), sweep.end());
  }
  if (rows.empty()) throw DomainError("eigen needs --lambda, --radius or --lambda-sweep");
  {
    auto os = open_out(fs::path(c.out) / "eigen.csv");
    write_eigen_csv(os, rows);
  }
  write_json(fs::path(c.out) / "eigen.json", base_json(c));
  write_eigen_csv(std::cout, rows);
  return 0;
}

// qform

int cmd_qform(const RunConfig& c)
{
  const Vec3 q = to_vec(c.q);
  auto j = base_json(c);
  bool ok = true;
  QFieldReport rep;
  if (c.field.starts_with("synthetic:")) {
    const std::string kind = c.field.substr(10);
    std::function<cplx(cplx)> P;
    if (kind == "zbar") {
      P = [](cplx z) { return std::conj(z); };
    } else {
      int k = 0;
      std::size_t used = 0;
      try {
        k = kind.size() > 1 && kind[0] == 'z' ? std::stoi(kind.substr(1), &used) : 0;
      } catch (const std::exception&) {
        k = 0;
      }
      if (k < 1 || used + 1 != kind.size()) throw DomainError("synthetic field must be zbar or z<k> with k >= 1");
      P = [k](cplx z) { return std::pow(z, k); };
    }
    const DiskDomain dom(q, 1.0);
    const auto src = synthetic_source(dom, P);
    rep = qform_field(src, dom, c.mesh(), c.field);
    j["boundary_check"] = nullptr;
    j["similarity"] = similarity_json(similarity_check(src, dom));
    ok = rep.all_indices_negative();
  } else {
    const auto atlas = build_atlas(parse_nonlinearity(c.f), c.t_min, c.t_max, c.n_t, {.solver = c.solver()});
    const auto cand = make_candidate(atlas, q, c.t);
    auto member = std::make_shared<CandidateField>(cand);
    std::shared_ptr<const ScalarField> u = member;
    if (c.field == "member") {
    } else if (c.field.starts_with("perturbed:")) {
      double eps = 0;
      try {
        eps = std::stod(c.field.substr(10));
      } catch (const std::exception&) {
        throw DomainError("perturbed field must be perturbed:<eps>");
      }
      std::mt19937_64 rng(c.seed);
      const double phase = 2 * std::numbers::pi / c.mode * unit_uniform(rng);
      j["phase"] = phase;
      u = std::make_shared<PerturbedField>(member, std::make_shared<ModeBump>(cand, c.mode, phase), eps);
    } else {
      throw DomainError("unknown field '" + c.field + "' (member, perturbed:<eps>, synthetic:z<k>, synthetic:zbar)");
    }
    rep = qform_field(atlas, u, c.mesh());
    j["boundary_check"] = boundary_line_check(atlas, *u);
    j["similarity"] = similarity_json(similarity_check(atlas, u));
    ok = c.field == "member" ? rep.identically_zero : rep.all_indices_negative();
  }
  {
    auto os = open_out(fs::path(c.out) / "qform.csv");
    write_qfield_csv(os, rep);
  }
  j["summary"] = qfield_summary(rep);
  write_json(fs::path(c.out) / "qform.json", j);
  std::cout << "qform " << rep.label << " max|Q|=" << format_significant(rep.max_abs_Q, 6)
            << " identically_zero=" << (rep.identically_zero ? "true" : "false") << " zeros=" << rep.zeros.size();
  for (const auto& z : rep.zeros) std::cout << ' ' << (z.index ? z.index->index.str() : "?");
  std::cout << '\n';
  return ok ? 0 : 1;
}

// atlas

int cmd_atlas(const RunConfig& c)
{
  const auto a = build_atlas(parse_nonlinearity(c.f), c.t_min, c.t_max, c.n_t, {.solver = c.solver()});
  for (std::size_t i = 0; i < a->t_grid.size(); ++i) {
    auto os = open_out(fs::path(c.out) / ("profile_" + std::to_string(i) + ".csv"));
    write_atlas_profile_csv(os, *a, i);
  }
  auto j = base_json(c);
  j["atlas"] = atlas_manifest(*a);
  write_json(fs::path(c.out) / "atlas.json", j);
  std::cout << "atlas f=" << a->nl.label << " knots=" << a->t_grid.size() << " rho_ext=" << format_roundtrip(a->rho_ext)
            << '\n';
  return 0;
}

// candidate

int cmd_candidate(const RunConfig& c)
{
  const auto a = build_atlas(parse_nonlinearity(c.f), c.t_min, c.t_max, c.n_t, {.solver = c.solver()});
  const Vec3 q = to_vec(c.q), w = to_vec(c.w);
  const auto cand = candidate_at(a, q, w, c.a);
  const auto jq = evaluate_candidate(cand, q);
  const double limit = cand.allow_extension ? cand.rho_S : cand.r;
  const Vec3 dir = distance(cand.p, q) > 1e-12 ? Vec3(log_map(cand.p, q).normalized()) : fixed_frame(cand.p).first;
  {
    auto os = open_out(fs::path(c.out) / "candidate.csv");
    os << "rho,value,radial_derivative\n";
    for (int i = 0; i <= 64; ++i) {
      const double rho = limit * i / 64;
      const Vec3 x = exp_map(cand.p, rho * dir);
      const auto jx = evaluate_candidate(cand, x);
      const double dr = rho > 0 ? jx.gradient.dot(radial_unit(cand.p, x)) : 0.0;
      os << format_roundtrip(rho) << ',' << format_roundtrip(jx.value) << ',' << format_roundtrip(dr) << '\n';
    }
  }
  auto j = base_json(c);
  j["candidate"] = {{"p", vec_json(cand.p)},
                    {"t", cand.t},
                    {"r", cand.r},
                    {"rho_S", cand.rho_S},
                    {"allow_extension", cand.allow_extension},
                    {"value_at_q", jq.value},
                    {"gradient_at_q", vec_json(jq.gradient)},
                    {"value_error", std::abs(jq.value - c.a)},
                    {"gradient_error", (jq.gradient - w).norm()}};
  write_json(fs::path(c.out) / "candidate.json", j);
  std::cout << "candidate t=" << format_roundtrip(cand.t) << " r=" << format_roundtrip(cand.r) << " p=("
            << format_roundtrip(cand.p[0]) << ',' << format_roundtrip(cand.p[1]) << ',' << format_roundtrip(cand.p[2])
            << ")\n";
  return 0;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream is(path);
  if (!is) throw DomainError("cannot read config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw DomainError("config " + path + " is not valid JSON: " + e.what());
  }
  return (j.contains("config") ? j.at("config") : j).get<RunConfig>();
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Radial family solver, eigenvalue tables and Q-form diagnostics on the round sphere"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path, q_str, w_str;
  double lambda = 0, radius = 0;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "Repeat a run from a JSON file (its \"config\" entry)");
    s->add_option("--f", cfg.f, "linear:<lambda>, affine:<a>,<b>, allen-cahn, serrin, exp, table:<csv>");
    s->add_option("--out", cfg.out, "Output directory");
    s->add_option("--startup-radius", cfg.startup_radius);
    s->add_option("--picard-tol", cfg.picard_tol);
    s->add_option("--picard-max-iter", cfg.picard_max_iter);
    s->add_option("--rtol", cfg.rtol);
    s->add_option("--atol", cfg.atol);
    s->add_option("--zero-margin", cfg.zero_margin);
    s->add_option("--pi-clearance", cfg.pi_clearance);
    s->add_option("--dense-points", cfg.dense_points);
  };
  auto range = [&](CLI::App* s) {
    s->add_option("--t-min", cfg.t_min);
    s->add_option("--t-max", cfg.t_max);
    s->add_option("--n-t", cfg.n_t, "Number of t values (log spaced)");
  };

  auto* profile = app.add_subcommand("profile", "Radial profile U_t");
  common(profile);
  profile->add_option("--t", cfg.t, "U(0)");

  auto* verify = app.add_subcommand("verify", "Lemma suite over a log-spaced t sweep");
  common(verify);
  range(verify);

  auto* eigen = app.add_subcommand("eigen", "First Dirichlet eigenvalue of geodesic disks");
  common(eigen);
  auto* o_lambda = eigen->add_option("--lambda", lambda);
  auto* o_radius = eigen->add_option("--radius", radius);
  eigen->add_option("--lambda-sweep", cfg.lambda_sweep, "a:b:n, log spaced");

  auto* qform = app.add_subcommand("qform", "Q field, zeroes and indices");
  common(qform);
  range(qform);
  qform->add_option("--t", cfg.t, "Member parameter");
  qform->add_option("--field", cfg.field, "member, perturbed:<eps>, synthetic:z<k>, synthetic:zbar");
  qform->add_option("--mode", cfg.mode, "Angular mode of the perturbation");
  qform->add_option("--seed", cfg.seed, "Seed for the perturbation phase");
  qform->add_option("--n-rho", cfg.n_rho);
  qform->add_option("--n-theta", cfg.n_theta);
  qform->add_option("--q", q_str, "Disk centre x,y,z");

  auto* atlas = app.add_subcommand("atlas", "Family atlas manifest and profiles");
  common(atlas);
  range(atlas);

  auto* candidate = app.add_subcommand("candidate", "Family member matching a 1-jet (q, w, a)");
  common(candidate);
  range(candidate);
  candidate->add_option("--q", q_str, "Point x,y,z");
  candidate->add_option("--w", w_str, "Tangent gradient x,y,z");
  candidate->add_option("--a", cfg.a, "Value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config_error", e.what());
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else {
      if (o_lambda->count()) cfg.lambda = lambda;
      if (o_radius->count()) cfg.radius = radius;
      if (!q_str.empty()) cfg.q = parse_vec3(q_str);
      if (!w_str.empty()) cfg.w = parse_vec3(w_str);
    }
    cfg.command = name;
    cfg.validate();
    if (name == "profile") return cmd_profile(cfg);
    if (name == "verify") return cmd_verify(cfg);
    if (name == "eigen") return cmd_eigen(cfg);
    if (name == "qform") return cmd_qform(cfg);
    if (name == "atlas") return cmd_atlas(cfg);
    return cmd_candidate(cfg);
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const json::exception& e) {
    return fail("config_error", e.what());
  } catch (const std::exception& e) {
    return fail("internal_error", e.what());
  }
}
