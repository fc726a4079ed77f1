#pragma once

// Verification runs over one snapshot, serialized as JSON reports (stable key
// order) plus CSV tables. Everything except the "timings" block is a
// deterministic function of the RunConfig.

#include <chrono>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypwa/corridor.hpp"
#include "hypwa/factorization.hpp"
#include "hypwa/hyperbolicity.hpp"
#include "hypwa/kernel_matrix.hpp"
#include "hypwa/norm_lab.hpp"
#include "hypwa/providers.hpp"
#include "hypwa/subset_vector.hpp"

namespace hypwa {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

enum ExitCode : int { kExitPass = 0, kExitIdentity = 2, kExitInconclusive = 3, kExitInput = 4 };

struct RunConfig {
  ProviderSpec provider;
  ParamMode mode = ParamMode::empirical;
  std::optional<double> rho;
  std::optional<int> R1;
  std::optional<HalfInt> delta;
  std::string profile_mode = "auto";  // auto | exact | sampled
  std::uint64_t sample_budget = 2000;
  std::vector<Complex> z = {0.3, 0.6, 0.9};
  std::vector<int> n = {0, 1, 2, 3, 4, 5};
  int schedule = 4;
  double tol = 1e-9;
  double sdp_tol = 1e-6;
  std::uint64_t seed = 0;
  std::string out;
  int section = 16;
  std::optional<int> n_max;  // verify range; default: the horizon

  void validate() const {
    if (!(tol > 0) || !(sdp_tol > 0)) throw InputError("tolerances must be positive");
    if (section < 1 || section > kSdpDimCap) throw InputError("section size must lie in [1, 64]");
    if (schedule < 0) throw InputError("schedule length must be non-negative");
    for (auto z0 : z)
      if (!(std::abs(z0) < 1.0)) throw InputError("every z must satisfy |z| < 1");
    for (int v : n)
      if (v < 0) throw InputError("n values must be non-negative");
    if (profile_mode != "auto" && profile_mode != "exact" && profile_mode != "sampled")
      throw InputError("profile mode must be auto, exact or sampled");
  }
};

/// Parses "0.5", "-0.7", "0.3i", "0.2-0.4i" or polar "0.9@45" (degrees).
inline Complex parse_complex(const std::string& text) {
  auto fail = [&]() -> Complex { throw InputError("cannot parse complex number '" + text + "'"); };
  try {
    std::size_t used = 0;
    const auto at = text.find('@');
    if (at != std::string::npos) {
      const double r = std::stod(text.substr(0, at), &used);
      if (used != at) return fail();
      const std::string deg = text.substr(at + 1);
      const double d = std::stod(deg, &used);
      if (used != deg.size()) return fail();
      return std::polar(r, d * std::acos(-1.0) / 180.0);
    }
    if (!text.empty() && text.back() == 'i') {
      const std::string body = text.substr(0, text.size() - 1);
      // split at the last sign that is not at the start or after an exponent
      std::size_t split = std::string::npos;
      for (std::size_t i = 1; i < body.size(); ++i)
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') split = i;
      if (split == std::string::npos) {
        if (body.empty() || body == "+") return {0, 1};
        if (body == "-") return {0, -1};
        const double im = std::stod(body, &used);
        if (used != body.size()) return fail();
        return {0, im};
      }
      const std::string re_s = body.substr(0, split), im_s = body.substr(split);
      const double re = std::stod(re_s, &used);
      if (used != re_s.size()) return fail();
      double im = 0;
      if (im_s == "+" || im_s == "-") im = im_s == "+" ? 1 : -1;
      else {
        im = std::stod(im_s, &used);
        if (used != im_s.size()) return fail();
      }
      return {re, im};
    }
    const double re = std::stod(text, &used);
    if (used != text.size()) return fail();
    return {re, 0};
  } catch (const InputError&) {
    throw;
  } catch (const std::exception&) {
    return fail();
  }
}

inline Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json to_json(const CorridorParams& p) {
  return Json{{"mode", to_string(p.mode)}, {"delta", p.delta.to_double()}, {"rho", p.rho}, {"R0", p.R0}, {"R1", p.R1}};
}

inline Json to_json(const FactorizationConstants& c) {
  Json j{{"C1", c.C1}, {"R1", c.R1}, {"log2_C0", c.log2_C0}};
  // beyond double range in paper mode; the logarithm is authoritative
  j["C0"] = std::isfinite(c.C0) ? Json(c.C0) : Json(nullptr);
  j["C"] = std::isfinite(c.C) ? Json(c.C) : Json(nullptr);
  return j;
}

inline Json to_json(const NormCertificate& c) {
  Json j{{"kind", c.kind},
         {"bound", c.bound},
         {"sup_norm_plus", c.sup_norm_plus},
         {"sup_norm_minus", c.sup_norm_minus},
         {"analytic_bound", std::isfinite(c.analytic_bound) ? Json(c.analytic_bound) : Json(nullptr)},
         {"within_analytic", c.within_analytic}};
  j["C1"] = c.consts.C1;
  j["R1"] = c.consts.R1;
  j["log2_C0"] = c.consts.log2_C0;
  j["C0"] = std::isfinite(c.consts.C0) ? Json(c.consts.C0) : Json(nullptr);
  j["C"] = std::isfinite(c.consts.C) ? Json(c.consts.C) : Json(nullptr);
  j["params"] = to_json(c.params);
  j["mode"] = to_string(c.params.mode);
  if (c.z) j["z"] = complex_json(*c.z);
  if (c.n) j["n"] = *c.n;
  if (c.z) {
    j["tol"] = c.tol;
    j["K_max"] = c.K_max;
  }
  return j;
}

inline Json to_json(const CbNormResult& r) {
  return Json{{"value", r.value},
              {"lower", r.lower},
              {"upper", r.upper},
              {"tol", r.tol},
              {"iterations", r.iterations},
              {"projections", r.projections},
              {"feasibility_residual", r.feasibility_residual},
              {"inconclusive", r.inconclusive},
              {"method", r.method},
              {"initial_bracket", Json::array({r.initial_lower, r.initial_upper})}};
}

inline Json to_json(const IdentityReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations)
    v.push_back(Json{{"x", x.x}, {"y", x.y}, {"n", x.n}, {"d", x.distance}, {"z_count", x.z_count}, {"w_row", x.w_row}});
  return Json{{"passed", r.passed},
              {"n_max", r.n_max},
              {"pairs_checked", r.pairs_checked},
              {"cases_checked", r.cases_checked},
              {"violation_count", r.violation_count},
              {"violations", v}};
}

/// A single named check; the domain states what was covered.
struct Check {
  std::string name;
  bool passed = true;
  bool inconclusive = false;
  std::string domain;
};

/// Shared state of one run: the snapshot, its profile, both parameter sets
/// and the active corridor model.
struct Context {
  RunConfig config;
  std::vector<std::string> warnings;
  std::shared_ptr<const RayTable> table;
  HyperbolicityProfile profile;
  CorridorParams paper;
  CorridorParams empirical;
  CorridorParams active;
  std::unique_ptr<CorridorModel> model;
  Json timings = Json::object();
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline ProfileMode resolve_profile_mode(const RunConfig& c, std::size_t core) {
  if (c.profile_mode == "exact") return ProfileMode::exact;
  if (c.profile_mode == "sampled") return ProfileMode::sampled;
  return core <= 48 ? ProfileMode::exact : ProfileMode::sampled;
}

inline bool is_tree(const Graph& g) { return g.edge_count() + 1 == g.vertex_count(); }

}  // namespace detail

inline std::unique_ptr<Context> make_context(const RunConfig& config) {
  config.validate();
  auto ctx = std::make_unique<Context>();
  ctx->config = config;
  auto t0 = std::chrono::steady_clock::now();
  auto loaded = make_graph(config.provider);
  ctx->warnings = loaded.warnings;
  ctx->table = std::make_shared<const RayTable>(std::move(loaded.graph));
  ctx->timings["load"] = detail::seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto pm = detail::resolve_profile_mode(config, ctx->table->core_size());
  ctx->profile = hyperbolicity_profile(ctx->table->oracle(), pm, config.sample_budget, config.seed, config.delta);
  ctx->timings["profile"] = detail::seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const HalfInt delta = ctx->profile.delta_impl;
  ctx->paper = paper_params(delta);
  ctx->empirical = calibrate_empirical(ctx->table, delta, config.rho);
  ctx->active = config.mode == ParamMode::paper ? ctx->paper : ctx->empirical;
  if (config.rho) ctx->active.rho = *config.rho;
  if (config.R1) {
    ctx->active.R1 = *config.R1;
    if (config.mode == ParamMode::empirical) ctx->active.mode = ParamMode::manual;
  }
  ctx->model = std::make_unique<CorridorModel>(ctx->table, ctx->active);
  ctx->timings["calibration"] = detail::seconds_since(t0);
  return ctx;
}

inline Json config_json(const RunConfig& c) {
  Json p;
  switch (c.provider.kind) {
    case ProviderKind::edge_list_file: p = Json{{"kind", "edge_list"}, {"path", c.provider.path}}; break;
    case ProviderKind::free_group: p = Json{{"kind", "free_group"}, {"rank", c.provider.rank}, {"radius", c.provider.size}}; break;
    case ProviderKind::regular_tree: p = Json{{"kind", "regular_tree"}, {"branching", c.provider.branching}, {"depth", c.provider.size}}; break;
    case ProviderKind::line: p = Json{{"kind", "line"}, {"n", c.provider.size}}; break;
    case ProviderKind::cycle: p = Json{{"kind", "cycle"}, {"n", c.provider.size}}; break;
  }
  Json zs = Json::array();
  for (auto z : c.z) zs.push_back(complex_json(z));
  Json j{{"provider", p}, {"mode", to_string(c.mode)}};
  j["rho"] = c.rho ? Json(*c.rho) : Json(nullptr);
  j["R1"] = c.R1 ? Json(*c.R1) : Json(nullptr);
  j["delta"] = c.delta ? Json(c.delta->to_double()) : Json(nullptr);
  j["profile_mode"] = c.profile_mode;
  j["sample_budget"] = c.sample_budget;
  j["z"] = zs;
  j["n"] = c.n;
  j["schedule"] = c.schedule;
  j["tol"] = c.tol;
  j["sdp_tol"] = c.sdp_tol;
  j["seed"] = c.seed;
  j["section"] = c.section;
  j["n_max"] = c.n_max ? Json(*c.n_max) : Json(nullptr);
  return j;
}

inline Json graph_json(const Context& ctx) {
  const Graph& g = ctx.table->graph();
  return Json{{"provider", g.provider()},
              {"vertices", g.vertex_count()},
              {"edges", g.edge_count()},
              {"base_point", g.label(g.base_point())},
              {"core_radius", g.core_radius()},
              {"core_size", ctx.table->core_size()},
              {"base_ray_length", ctx.table->base().snapshot_length()},
              {"cayley", g.cayley()},
              {"tree", detail::is_tree(g)},
              {"warnings", ctx.warnings}};
}

inline Json parameters_json(const Context& ctx) {
  const CorridorModel paper_model(ctx.table, ctx.paper);
  const CorridorModel emp_model(ctx.table, ctx.empirical);
  return Json{{"active", to_json(ctx.active)},
              {"active_constants", to_json(constants(*ctx.model))},
              {"paper", to_json(ctx.paper)},
              {"paper_constants", to_json(constants(paper_model))},
              {"empirical", to_json(ctx.empirical)},
              {"empirical_constants", to_json(constants(emp_model))}};
}

// ---------------------------------------------------------------- profile

struct TaskResult {
  Json body = Json::object();
  std::vector<Check> checks;
};

inline TaskResult run_profile(Context& ctx) {
  TaskResult r;
  const auto& p = ctx.profile;
  r.body["hyperbolicity"] = Json{{"delta_thin", p.delta_thin.to_double()},
                                 {"delta_four_point", p.delta_four_point.to_double()},
                                 {"delta_impl", p.delta_impl.to_double()},
                                 {"sampled", p.sampled},
                                 {"triangles_checked", p.triangles_checked},
                                 {"quadruples_checked", p.quadruples_checked}};
  auto t0 = std::chrono::steady_clock::now();
  const auto thin = thinness_check(ctx.table->oracle(), p.delta_impl,
                                   p.sampled ? ProfileMode::sampled : ProfileMode::exact, ctx.config.sample_budget,
                                   ctx.config.seed);
  ctx.timings["thinness"] = detail::seconds_since(t0);
  const Graph& g = ctx.table->graph();
  Json viol = Json::array();
  for (const auto& v : thin.violations)
    viol.push_back(Json{{"x", g.label(v.x)}, {"y", g.label(v.y)}, {"w", g.label(v.w)}, {"distance", v.distance},
                        {"allowance", v.allowance.to_double()}});
  r.body["thinness"] = Json{{"passed", thin.passed},
                            {"sampled", thin.sampled},
                            {"multiplier", 10},
                            {"worst_slack", thin.worst_slack.to_double()},
                            {"worst_triple", Json::array({g.label(thin.worst_x), g.label(thin.worst_y), g.label(thin.worst_w)})},
                            {"triples_checked", thin.triples_checked},
                            {"violations", viol}};
  r.checks.push_back({"thinness", thin.passed, false,
                      std::to_string(thin.triples_checked) + (thin.sampled ? " sampled" : " exhaustive") +
                          " core triples, every geodesic [x,y]"});
  return r;
}

// ----------------------------------------------------------------- verify

struct BinomialSuiteResult {
  bool passed = true;
  std::uint64_t pairs = 0;
  std::uint64_t failures = 0;
};

/// Exhaustive over subsets S, T of {0..set_size-1}, materialized vectors,
/// exact integers.
inline BinomialSuiteResult binomial_suite(int set_size = 8) {
  BinomialSuiteResult r;
  const std::uint32_t count = 1u << set_size;
  std::vector<SubsetKey> keys;
  std::vector<IntSubsetVector> tp, tm, pp, pm;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    std::vector<VertexId> ids;
    for (int b = 0; b < set_size; ++b)
      if (mask & (1u << b)) ids.push_back(static_cast<VertexId>(b));
    keys.emplace_back(std::move(ids));
    tp.push_back(xi_vector(keys.back(), XiSign::plus, true));
    tm.push_back(xi_vector(keys.back(), XiSign::minus, true));
    pp.push_back(xi_vector(keys.back(), XiSign::plus, false));
    pm.push_back(xi_vector(keys.back(), XiSign::minus, false));
    const std::int64_t full = std::int64_t{1} << keys.back().size();
    const bool ok = tp.back().norm2() == full && tm.back().norm2() == full && pp.back().norm2() == full - 1 &&
                    pm.back().norm2() == full - 1;
    if (!ok) {
      r.passed = false;
      ++r.failures;
    }
  }
  for (std::uint32_t s = 0; s < count; ++s)
    for (std::uint32_t t = 0; t < count; ++t) {
      ++r.pairs;
      const std::int64_t expect = (s & t) ? 1 : 0;
      if (inner(pm[t], pp[s]) != expect) {
        r.passed = false;
        ++r.failures;
      }
    }
  return r;
}

struct EtaSuiteResult {
  bool orthogonal = true;
  bool norms_bounded = true;
  bool eta_equals_z = true;
  std::uint64_t orthogonality_cases = 0;
  std::uint64_t norm_cases = 0;
  std::uint64_t table_cases = 0;
  std::uint64_t table_ones = 0;
  double max_norm2 = 0;
  int n_max = 0;
};

/// eta orthogonality for |m - m'| >= 2, ||eta||^2 <= C0, and
/// <eta-_l(y), eta+_k(x)> == chi_Z(k,l)(x,y) for k + l <= n_max, with chi_Z
/// taken from the W-level lists rather than from corridor intersections.
inline EtaSuiteResult eta_suite(const CorridorModel& m, int n_max) {
  EtaSuiteResult r;
  r.n_max = n_max;
  const auto c = constants(m);
  for (std::size_t i = 0; i < m.core_size(); ++i) {
    const int top = m.table().max_level(i) + 2 + m.params().R1;
    for (auto sign : {XiSign::plus, XiSign::minus}) {
      for (int a = 0; a <= top; ++a) {
        const double n2 = detail::eta_gram_indexed(m, i, a, a, sign);
        ++r.norm_cases;
        r.max_norm2 = std::max(r.max_norm2, n2);
        if (!(n2 <= c.C0)) r.norms_bounded = false;
        for (int b = a + 2; b <= top; ++b) {
          ++r.orthogonality_cases;
          if (detail::eta_gram_indexed(m, i, a, b, sign) != 0.0) r.orthogonal = false;
        }
      }
    }
  }
  const int R1 = m.params().R1;
  for (std::size_t i = 0; i < m.core_size(); ++i)
    for (std::size_t j = 0; j < m.core_size(); ++j) {
      const auto levels = m.w_levels(i, j, n_max);
      for (int n = 0; n <= n_max; ++n) {
        const auto& w = levels[n];
        for (int k = 0; k <= n; ++k) {
          const auto it = std::lower_bound(w.begin(), w.end(), k);
          bool z = it != w.end() && *it == k;
          if (z && std::next(it) != w.end() && *std::next(it) - k <= R1) z = false;
          const int e = detail::eta_inner_indexed(m, i, k, j, n - k);
          ++r.table_cases;
          r.table_ones += e;
          if (e != static_cast<int>(z)) r.eta_equals_z = false;
        }
      }
    }
  return r;
}

inline TaskResult run_verify(Context& ctx) {
  TaskResult r;
  const CorridorModel& m = *ctx.model;
  const int n_max = ctx.config.n_max ? *ctx.config.n_max : ctx.table->horizon();
  r.body["n_max"] = n_max;
  r.body["horizon"] = ctx.table->horizon();

  auto t0 = std::chrono::steady_clock::now();
  const auto cov = covering_check(m, n_max);
  r.body["covering"] = to_json(cov);
  ctx.timings["covering"] = detail::seconds_since(t0);
  r.checks.push_back({"covering", cov.passed, false,
                      std::to_string(cov.pairs_checked) + " core pairs, n = 0.." + std::to_string(n_max)});

  t0 = std::chrono::steady_clock::now();
  const auto r1 = empirical_R1(m, n_max);
  r.body["empirical_R1"] = Json{{"R1", r1.R1},
                                {"n_max", r1.n_max},
                                {"active_R1", m.params().R1},
                                {"paper_bound", r1.bound_checked ? Json(2 * m.params().R0) : Json(nullptr)},
                                {"within_paper_bound", r1.within_bound},
                                {"witness", Json{{"x", ctx.table->graph().label(r1.witness_x)},
                                                 {"y", ctx.table->graph().label(r1.witness_y)},
                                                 {"n", r1.witness_n}}}};
  ctx.timings["empirical_R1"] = detail::seconds_since(t0);
  r.checks.push_back({"R1_disjointness", r1.R1 <= m.params().R1 && r1.within_bound, false,
                      "core pairs, k + l <= " + std::to_string(n_max)});

  t0 = std::chrono::steady_clock::now();
  const auto part = verify_partition(m, n_max);
  r.body["partition"] = to_json(part);
  ctx.timings["partition"] = detail::seconds_since(t0);
  r.checks.push_back({"partition", part.passed, false,
                      std::to_string(part.pairs_checked) + " core pairs, n = 0.." + std::to_string(n_max)});

  t0 = std::chrono::steady_clock::now();
  const auto prop = eta_suite(m, n_max);
  r.body["eta"] = Json{{"orthogonal", prop.orthogonal},
                               {"orthogonality_cases", prop.orthogonality_cases},
                               {"norms_bounded_by_C0", prop.norms_bounded},
                               {"max_norm2", prop.max_norm2},
                               {"norm_cases", prop.norm_cases},
                               {"eta_equals_chi_Z", prop.eta_equals_z},
                               {"table_cases", prop.table_cases},
                               {"table_ones", prop.table_ones},
                               {"n_max", prop.n_max}};
  ctx.timings["eta"] = detail::seconds_since(t0);
  r.checks.push_back({"eta_orthogonality", prop.orthogonal, false, "all core w, levels |m - m'| >= 2"});
  r.checks.push_back({"eta_norm_bound", prop.norms_bounded, false, "all core w, all levels"});
  r.checks.push_back({"eta_inner_equals_chi_Z", prop.eta_equals_z, false,
                      std::to_string(prop.table_cases) + " (x,y,k,l) with k + l <= " + std::to_string(n_max)});

  t0 = std::chrono::steady_clock::now();
  const auto bin = binomial_suite(8);
  r.body["binomial"] = Json{{"passed", bin.passed}, {"set_size", 8}, {"pairs", bin.pairs}, {"failures", bin.failures}};
  ctx.timings["binomial"] = detail::seconds_since(t0);
  r.checks.push_back({"binomial", bin.passed, false, "all S, T inside an 8-element set"});
  return r;
}

// ------------------------------------------------------------------ norms

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

}  // namespace detail

struct NormsResult : TaskResult {
  std::vector<CsvTable> tables;
};

inline NormsResult run_norms(Context& ctx) {
  NormsResult r;
  const CorridorModel& m = *ctx.model;
  const auto consts = constants(m);
  const double tol = ctx.config.tol;
  const Graph& g = ctx.table->graph();
  r.body["constants"] = to_json(consts);

  // theta certificates and the kernel identity they rest on
  auto t0 = std::chrono::steady_clock::now();
  CsvTable theta_csv{"certificate_vs_z", {"z_re", "z_im", "abs_z", "bound", "analytic_bound", "K_max"}, {}};
  Json thetas = Json::array();
  bool theta_ok = true, real_ok = true, kernel_ok = true;
  for (auto z : ctx.config.z) {
    const auto c = theta_certificate(m, z, tol);
    theta_ok = theta_ok && c.within_analytic;
    const bool real = z.imag() == 0.0;
    if (real) real_ok = real_ok && c.bound <= consts.C;
    ZetaKernel zk(m, z, tol);
    double dev = 0, slack = std::numeric_limits<double>::infinity();
    const auto core = ctx.table->core();
    for (std::size_t i = 0; i < m.core_size(); ++i)
      for (std::size_t j = 0; j < m.core_size(); ++j) {
        const auto e = zk.at(i, j);
        const double d = std::abs(e.value - std::pow(z, ctx.table->dist(i)[core[j]]));
        dev = std::max(dev, d);
        slack = std::min(slack, e.bound - d);
      }
    kernel_ok = kernel_ok && slack >= 0;
    Json j = to_json(c);
    j["kernel_identity"] = Json{{"max_deviation", dev}, {"min_bound_slack", slack}, {"within_bound", slack >= 0},
                                {"pairs", m.core_size() * m.core_size()}};
    thetas.push_back(j);
    theta_csv.rows.push_back({detail::num(z.real()), detail::num(z.imag()), detail::num(std::abs(z)), detail::num(c.bound),
                              detail::num(c.analytic_bound), std::to_string(c.K_max)});
  }
  r.body["theta"] = thetas;
  r.tables.push_back(theta_csv);
  ctx.timings["theta"] = detail::seconds_since(t0);
  r.checks.push_back({"theta_exact_le_analytic", theta_ok, false, "every z in the z list"});
  r.checks.push_back({"theta_real_le_2C0", real_ok, false, "real z in the z list"});
  r.checks.push_back({"zeta_kernel_identity", kernel_ok, false, "all core pairs, every z in the z list"});

  // spheres
  t0 = std::chrono::steady_clock::now();
  CsvTable sphere_csv{"sphere_vs_n", {"n", "bound", "bound_over_n_plus_1", "analytic_2C0_n_plus_1", "ratio_to_2_n_plus_1"}, {}};
  Json spheres = Json::array();
  bool sphere_ok = true;
  for (int n : ctx.config.n) {
    const auto c = sphere_certificate(m, n);
    sphere_ok = sphere_ok && c.within_analytic;
    Json j = to_json(c);
    j["ratio_to_tree_reference"] = c.bound / (2.0 * (n + 1));
    spheres.push_back(j);
    sphere_csv.rows.push_back({std::to_string(n), detail::num(c.bound), detail::num(c.bound / (n + 1)),
                               detail::num(c.analytic_bound), detail::num(c.bound / (2.0 * (n + 1)))});
  }
  r.body["sphere"] = spheres;
  r.tables.push_back(sphere_csv);
  ctx.timings["sphere"] = detail::seconds_since(t0);
  r.checks.push_back({"sphere_le_2C0_n_plus_1", sphere_ok, false, "every n in the n list"});

  // witnesses
  t0 = std::chrono::steady_clock::now();
  CsvTable sched_csv{"schedule", {"n", "r_n", "K_n", "certificate", "tail_core", "tail_infinite", "support"}, {}};
  CsvTable phi_csv{"witness_phi", {"vertex", "label", "depth"}, {}};
  Json witnesses = Json::array();
  bool witness_ok = true;
  std::vector<double> prev;
  std::vector<std::vector<double>> phis;
  for (int n = 1; n <= ctx.config.schedule; ++n) {
    const auto w = weak_amenability_witness(m, n, tol);
    bool finite = true, range = true, monotone = true;
    for (std::size_t i = 0; i < w.phi.size(); ++i) {
      range = range && w.phi[i] >= 0 && w.phi[i] <= 1;
      finite = finite && (w.depth[i] <= w.step.K || w.phi[i] == 0.0);
      if (!prev.empty()) monotone = monotone && w.phi[i] >= prev[i];
    }
    const bool at_base = w.radial.f(0) == 1.0;
    const bool cert_ok = w.radial.certificate.bound <= consts.C0 * 2 + 1;
    witness_ok = witness_ok && finite && range && monotone && at_base && cert_ok;
    prev = w.phi;
    phis.push_back(w.phi);
    phi_csv.header.push_back("phi_" + std::to_string(n));
    Json j{{"n", n},
           {"r_n", w.step.r},
           {"K_n", w.step.K},
           {"support_size", w.support_size},
           {"finitely_supported", finite},
           {"values_in_unit_interval", range},
           {"monotone_from_previous", monotone},
           {"certificate", to_json(w.radial.certificate)},
           {"theta_bound", w.radial.theta_bound},
           {"tail_core", w.radial.tail_core},
           {"tail_infinite", w.radial.tail_infinite},
           {"certificate_le_2C0_plus_1", cert_ok},
           {"warnings", w.warnings}};
    witnesses.push_back(j);
    sched_csv.rows.push_back({std::to_string(n), detail::num(w.step.r), std::to_string(w.step.K),
                              detail::num(w.radial.certificate.bound), detail::num(w.radial.tail_core),
                              detail::num(w.radial.tail_infinite), std::to_string(w.support_size)});
  }
  {
    const auto core = ctx.table->core();
    for (std::size_t i = 0; i < core.size(); ++i) {
      std::vector<std::string> row{std::to_string(core[i]), g.label(core[i]), std::to_string(g.depth(core[i]))};
      for (const auto& p : phis) row.push_back(detail::num(p[i]));
      phi_csv.rows.push_back(std::move(row));
    }
  }
  r.body["witness"] = witnesses;
  r.tables.push_back(sched_csv);
  r.tables.push_back(phi_csv);
  ctx.timings["witness"] = detail::seconds_since(t0);
  r.checks.push_back({"witness_schedule", witness_ok, false,
                      "n = 1.." + std::to_string(ctx.config.schedule) + ", every core vertex"});

  // finite sections: sandwiches and positivity
  t0 = std::chrono::steady_clock::now();
  const auto section = core_section(*ctx.table, static_cast<std::size_t>(ctx.config.section));
  Json sandwiches = Json::array();
  bool ordered = true, conclusive = true;
  auto sandwich = [&](const KernelMatrix& k, std::optional<double> cert, Json label) {
    const auto lb = lower_bound(k, {LowerStrategy::basis, LowerStrategy::rank_one_signs, LowerStrategy::random_gaussian,
                                    LowerStrategy::dual_trace},
                                ctx.config.seed);
    const auto cb = cb_norm_sdp(k, ctx.config.sdp_tol);
    const double eps = ctx.config.sdp_tol;
    bool ok = lb.value <= cb.value + eps;
    if (cert) ok = ok && cb.value <= *cert + eps;
    ordered = ordered && ok;
    conclusive = conclusive && !cb.inconclusive;
    label["dim"] = k.dim();
    label["lower_bound"] = Json{{"value", lb.value}, {"strategy", lb.strategy}, {"seed", lb.seed}};
    label["cb_norm"] = to_json(cb);
    label["certificate"] = cert ? Json(*cert) : Json(nullptr);
    label["ordered"] = ok;
    sandwiches.push_back(label);
  };
  for (auto z : ctx.config.z) {
    const auto cert = theta_certificate(m, z, tol);
    sandwich(power_kernel(*ctx.table, section, z), cert.bound, Json{{"kernel", "z^d"}, {"z", complex_json(z)}});
  }
  for (int n : ctx.config.n) {
    sandwich(sphere_kernel(*ctx.table, section, n), sphere_certificate(m, n).bound,
             Json{{"kernel", "chi_d=n"}, {"n", n}});
  }
  r.body["sandwich"] = sandwiches;
  r.checks.push_back({"sandwich_order", ordered, false, "section of " + std::to_string(section.size()) + " core vertices"});
  r.checks.push_back({"cb_norm_conclusive", true, !conclusive, "every sandwich section"});

  Json psd = Json::array();
  const bool tree = detail::is_tree(g);
  bool psd_ok = true;
  for (double rr : {0.3, 0.7, 0.95}) {
    const double e = psd_min_eig(power_kernel(*ctx.table, section, rr).values);
    if (tree) psd_ok = psd_ok && e >= -1e-9;
    psd.push_back(Json{{"r", rr}, {"min_eigenvalue", e}, {"asserted", tree}});
  }
  r.body["positivity"] = Json{{"tree", tree}, {"dim", section.size()}, {"kernels", psd}};
  r.checks.push_back({"tree_positivity", psd_ok, false, tree ? "r in {0.3, 0.7, 0.95}" : "not asserted (graph has cycles)"});
  ctx.timings["sections"] = detail::seconds_since(t0);
  return r;
}

// ----------------------------------------------------------------- output

struct Report {
  Json json;
  std::vector<CsvTable> tables;
  int exit_code = kExitPass;
};

inline Json checks_json(const std::vector<Check>& checks) {
  Json a = Json::array();
  for (const auto& c : checks)
    a.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"inconclusive", c.inconclusive}, {"domain", c.domain}});
  return a;
}

/// command: profile | verify | norms | all.
inline Report run_command(const std::string& command, const RunConfig& config) {
  if (command != "profile" && command != "verify" && command != "norms" && command != "all")
    throw InputError("unknown command '" + command + "'");
  const auto start = std::chrono::steady_clock::now();
  auto ctx = make_context(config);
  Report rep;
  Json& j = rep.json;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = config_json(config);
  j["graph"] = graph_json(*ctx);
  j["parameters"] = parameters_json(*ctx);
  std::vector<Check> checks;
  const bool all = command == "all";
  if (all || command == "profile") {
    auto t = run_profile(*ctx);
    j["profile"] = t.body;
    checks.insert(checks.end(), t.checks.begin(), t.checks.end());
  }
  if (all || command == "verify") {
    auto t = run_verify(*ctx);
    j["verify"] = t.body;
    checks.insert(checks.end(), t.checks.begin(), t.checks.end());
  }
  if (all || command == "norms") {
    auto t = run_norms(*ctx);
    j["norms"] = t.body;
    checks.insert(checks.end(), t.checks.begin(), t.checks.end());
    rep.tables = std::move(t.tables);
  }
  bool failed = false, inconclusive = false;
  for (const auto& c : checks) {
    failed = failed || !c.passed;
    inconclusive = inconclusive || c.inconclusive;
  }
  rep.exit_code = failed ? kExitIdentity : inconclusive ? kExitInconclusive : kExitPass;
  j["checks"] = checks_json(checks);
  j["verdict"] = Json{{"passed", !failed && !inconclusive}, {"exit_code", rep.exit_code}};
  ctx->timings["total"] = detail::seconds_since(start);
  j["timings"] = ctx->timings;
  return rep;
}

/// The report without its timings block, for comparisons across runs.
inline std::string stable_dump(const Json& report) {
  Json copy = report;
  copy.erase("timings");
  return copy.dump(2);
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path.string());
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

inline void write_report(const std::filesystem::path& dir, const Report& rep) {
  std::filesystem::create_directories(dir);
  const std::string cmd = rep.json.value("command", "report");
  {
    std::ofstream os(dir / (cmd + ".json"));
    if (!os) throw InputError("cannot write into " + dir.string());
    os << rep.json.dump(2) << '\n';
  }
  for (const auto& t : rep.tables) write_csv(dir / (t.name + ".csv"), t);
}

}  // namespace hypwa
