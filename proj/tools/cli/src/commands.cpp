#include "emdenflow/cli/commands.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>

#include "emdenflow/diagnostics.hpp"
#include "emdenflow/equilibria.hpp"
#include "emdenflow/manifolds.hpp"

namespace emdenflow::cli {

namespace fs = std::filesystem;

std::optional<double> env_seed_eps() {
  const char* raw = std::getenv("EMDENFLOW_SEED_EPS");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0) || !std::isfinite(v))
    throw UsageError(fmt::format("EMDENFLOW_SEED_EPS must be a positive number, got '{}'", raw));
  return v;
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::kConstants: return "constants";
    case Command::kEquilibria: return "equilibria";
    case Command::kClassify: return "classify";
    case Command::kTrajectory: return "trajectory";
    case Command::kPortrait: return "portrait";
    case Command::kDiagnose: return "diagnose";
    case Command::kShoot: return "shoot";
    case Command::kReport: return "report";
  }
  return "unknown";
}

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::kDefault: return "default";
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kJson: return "json";
    case OutputFormat::kSvg: return "svg";
    case OutputFormat::kText: return "text";
  }
  return "unknown";
}

void write_atomic(const std::string& path, const std::string& content) {
  if (path.empty()) throw IOError("empty output path");
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IOError(fmt::format("no such directory: {}", dir.string()));
  if (fs::is_directory(target, ec)) throw IOError(fmt::format("output is a directory: {}", path));
  const fs::path tmp =
      dir / fmt::format(".{}.tmp{}", target.filename().string(), static_cast<long>(::getpid()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IOError(fmt::format("cannot open {}: {}", path, std::strerror(errno)));
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) {
      os.close();
      fs::remove(tmp, ec);
      throw IOError(fmt::format("write failed: {}", path));
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IOError(fmt::format("cannot move output into place: {}", path));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IOError(fmt::format("cannot read {}", path));
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

SeedDescriptor resolve_seed(const ProblemParams& params, const SeedSpec& spec) {
  const std::optional<double> eps = spec.eps ? spec.eps : env_seed_eps();
  if (spec.kind == "regular") return seed_regular(params);
  if (spec.kind == "origin-stable") return seed_origin_stable(params, eps.value_or(1e-9));
  if (spec.kind == "origin-slow") return seed_origin_slow(params, eps.value_or(1e-9));
  if (spec.kind == "point") {
    SeedDescriptor s;
    s.kind = SeedKind::kUser;
    s.point = spec.point;
    s.direction = spec.backward ? -1 : 1;
    return s;
  }
  const std::vector<Equilibrium> eqs = find_equilibria(params);
  if (spec.eq < 0 || spec.eq >= static_cast<int>(eqs.size()))
    throw RegimeMismatch(fmt::format("equilibrium {} does not exist ({} in this regime)", spec.eq,
                                     eqs.size()));
  const Equilibrium& P = eqs[static_cast<std::size_t>(spec.eq)];
  if (spec.kind == "equilibrium") {
    SeedDescriptor s;
    s.kind = SeedKind::kEquilibrium;
    s.eq_id = spec.eq;
    s.point = {P.x, P.y};
    s.direction = spec.backward ? -1 : 1;
    return s;
  }
  if (spec.kind == "saddle") {
    const auto br = seed_saddle_branches(params, P, eps.value_or(default_seed_eps({P.x, P.y})),
                                         spec.eq);
    static constexpr std::array<std::string_view, 4> names = {"st-below", "st-above",
                                                              "unst-below", "unst-above"};
    for (std::size_t i = 0; i < names.size(); ++i)
      if (spec.branch == names[i]) return br[i];
    throw UsageError(fmt::format("unknown saddle branch '{}'", spec.branch));
  }
  throw UsageError(fmt::format("unknown seed kind '{}'", spec.kind));
}

Trajectory run_seed(const ProblemParams& params, const SeedDescriptor& seed,
                    IntegrationConfig cfg) {
  cfg.targets.clear();
  for (const Equilibrium& e : find_equilibria(params)) cfg.targets.push_back({e.x, e.y});
  return integrate(params, seed, cfg);
}

json cmd_constants(const RunConfig& cfg) {
  validate(cfg.params);
  json doc = report_header("constants", cfg.params);
  const RegimeTag tag = regime_of(cfg.params);
  doc["regime"] = {{"case", to_string(tag.kind)},
                   {"serrin_critical", tag.serrin_critical},
                   {"sobolev_critical", tag.sobolev_critical},
                   {"expected_roots", expected_root_count(tag.kind)}};
  return doc;
}

json cmd_equilibria(const RunConfig& cfg) {
  validate(cfg.params);
  json doc = report_header("equilibria", cfg.params);
  json bounds = json::object();
  auto put = [&](const char* name, const std::optional<RootBounds>& b) {
    if (b) bounds[name] = json::array({b->lo, b->hi});
  };
  put("single_positive_m", bounds_single_positive_m(cfg.params));
  put("single_negative_m", bounds_single_negative_m(cfg.params));
  put("first_large_m", bounds_first_large_m(cfg.params));
  put("second_large_m", bounds_second_large_m(cfg.params));
  doc["bounds"] = bounds;
  return doc;
}

json cmd_classify(const RunConfig& cfg) {
  validate(cfg.params);
  const SeedDescriptor seed = resolve_seed(cfg.params, cfg.seed);
  const Trajectory tr = run_seed(cfg.params, seed, cfg.integrator);
  json doc = report_header("classify", cfg.params);
  doc["seed"] = to_json(seed);
  doc["verdict"] = to_json(classify_limit(cfg.params, tr));
  return doc;
}

TrajectoryOutput cmd_trajectory(const RunConfig& cfg) {
  validate(cfg.params);
  const ProblemParams& params = cfg.params;
  const SeedDescriptor seed = resolve_seed(params, cfg.seed);
  const Trajectory tr = run_seed(params, seed, cfg.integrator);
  const LimitVerdict verdict = classify_limit(params, tr);
  const std::vector<Equilibrium> eqs = find_equilibria(params);
  const double p = params.p;

  std::vector<double> times;
  if (cfg.stride > 0) {
    const double sgn = tr.t_end() >= tr.t_begin() ? 1.0 : -1.0;
    const double span = std::abs(tr.t_end() - tr.t_begin());
    const auto n = static_cast<std::size_t>(std::floor(span / cfg.stride));
    for (std::size_t i = 0; i <= n; ++i)
      times.push_back(tr.t_begin() + sgn * static_cast<double>(i) * cfg.stride);
    if (times.back() != tr.t_end()) times.push_back(tr.t_end());
  } else if (cfg.stride < 0) {
    throw UsageError("stride must be nonnegative");
  } else {
    times = tr.t;
  }

  std::string csv = "t,r,x,y,u,ur,region,F,V,Z,G\n";
  for (double t : times) {
    const PhasePoint pt = tr.at(t);
    const double r = std::exp(t);
    const DiagnosticSample d = diagnostics_at(params, t, pt);
    csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                       t, r, pt.x, pt.y, std::pow(r, -2 / (p - 1)) * pt.x,
                       -std::pow(r, -(p + 1) / (p - 1)) * pt.y, to_string(region_of(params, pt, eqs)),
                       d.F, d.V, d.Z, d.G);
  }

  TrajectoryOutput out;
  out.csv = std::move(csv);
  out.sidecar = report_header("trajectory", params);
  out.sidecar["seed"] = to_json(seed);
  out.sidecar["rows"] = times.size();
  out.sidecar["verdict"] = to_json(verdict);
  out.sidecar["seed_error"] = seed.seed_error;
  return out;
}

json cmd_diagnose(const RunConfig& cfg) {
  validate(cfg.params);
  const ProblemParams& params = cfg.params;
  const SeedDescriptor seed = resolve_seed(params, cfg.seed);
  const Trajectory tr = run_seed(params, seed, cfg.integrator);
  const LimitVerdict verdict = classify_limit(params, tr);

  json doc = report_header("diagnose", params);
  doc["seed"] = to_json(seed);
  doc["verdict"] = to_json(verdict);
  doc["radial_residual"] = residual_check(params, tr);

  auto guarded = [](auto&& fn) -> json {
    try {
      return fn();
    } catch (const RegimeMismatch& e) {
      return {{"applicable", false}, {"reason", e.what()}};
    }
  };
  doc["V"] = guarded([&] { return to_json(check_V_monotonicity(params, tr)); });
  doc["F"] = guarded([&] { return to_json(check_F_monotonicity(params, tr)); });
  doc["Z"] = to_json(check_Z_relation(params, tr));
  doc["G"] = to_json(check_G_negative(params, tr));
  json bounds = json::array();
  for (const BoundCheck& b : check_a_priori_bounds(params, tr)) bounds.push_back(to_json(b));
  doc["bounds"] = bounds;

  const std::vector<DiagnosticSample> samples = eval_diagnostics(params, tr);
  if (!samples.empty() && samples.front().E) {
    const double e0 = *samples.front().E;
    double drift = 0;
    for (const DiagnosticSample& s : samples)
      if (s.E) drift = std::max(drift, std::abs(*s.E - e0));
    doc["energy"] = {{"initial", e0}, {"max_drift", drift}};
  }
  if (verdict.cycle) {
    doc["floquet"] = guarded([&]() -> json {
      try {
        const KolmogorovFloquet kf = kolmogorov_floquet(params, *verdict.cycle);
        return {{"integral", kf.integral},
                {"sigma_bar_integral", kf.sigma_bar_integral},
                {"z_bar_integral", kf.z_bar_integral},
                {"decomposition_lhs", kf.decomposition_lhs},
                {"decomposition_rhs", kf.decomposition_rhs},
                {"concavity_applies", kf.concavity_applies},
                {"concavity_holds", kf.concavity_holds},
                {"sign_agrees", kf.sign_agrees}};
      } catch (const TransformInvalid& e) {
        return {{"applicable", false}, {"reason", e.what()}};
      }
    });
  }
  return doc;
}

std::vector<double> shoot_grid(int N, double p, const ShootSpec& spec) {
  const int n = std::max(spec.m_points, 2);
  double lo = spec.m_lo, hi = spec.m_hi;
  const ProblemParams probe{N, p, 0.0};
  validate(probe);
  const DerivedConstants dc = derive_constants(probe);
  if (spec.target == ShootTarget::kH && !(dc.K < 0))
    throw RegimeMismatch("h needs K < 0, where two equilibria exist for M < -mu*");
  if (regime_of(probe).serrin_critical)
    throw RegimeMismatch("no shooting function at K = 0");
  if (std::isnan(lo) || std::isnan(hi)) {
    const CriticalConstants cc = critical_constants(probe);
    if (spec.target == ShootTarget::kG && dc.K > 0 && cc.m_bar && cc.m_node_hi && *cc.m_bar > 0) {
      const double w = *cc.m_node_hi - *cc.m_bar;
      lo = *cc.m_bar + 1e-3 * w;
      hi = *cc.m_node_hi;
    } else if (dc.K < 0 && cc.mu_star && cc.m_bar) {
      lo = -cc.mu_star_1;
      hi = spec.target == ShootTarget::kG ? -*cc.mu_star * (1 + 1e-3)
                                          : *cc.m_bar - 1e-3 * std::abs(*cc.m_bar);
    } else {
      throw UsageError("no default M window for this regime; pass --m-lo and --m-hi");
    }
  }
  if (!(lo < hi)) throw UsageError("need m-lo < m-hi");
  if (spec.log_spacing) return log_grid(lo, hi, n);
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return grid;
}

json cmd_shoot(const RunConfig& cfg) {
  const ShootSpec& spec = cfg.shoot;
  ShootOptions opt;
  opt.integration = cfg.integrator;
  opt.m_tol = spec.m_tol;
  opt.refine = spec.refine;
  opt.threads = spec.threads;
  const int N = cfg.params.N;
  const double p = cfg.params.p;
  const std::vector<double> grid = shoot_grid(N, p, spec);
  const ShootResult r = spec.target == ShootTarget::kG ? shoot_g(N, p, grid, opt)
                                                       : shoot_h(N, p, grid, opt);
  json doc = report_header("shoot", cfg.params);
  doc["shoot"] = to_json(r);
  return doc;
}

std::string cmd_report(const RunConfig& cfg) {
  if (cfg.input.empty()) throw UsageError("report needs --input");
  json doc;
  try {
    doc = json::parse(read_file(cfg.input));
  } catch (const json::parse_error& e) {
    throw UsageError(fmt::format("{} is not valid JSON: {}", cfg.input, e.what()));
  }
  if (cfg.format == OutputFormat::kJson) {
    summarize(doc);
    return doc.dump(2) + "\n";
  }
  return summarize(doc);
}

}  // namespace emdenflow::cli
