#include "emdenflow/cli/report.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "emdenflow/cli/config.hpp"
#include "emdenflow/equilibria.hpp"

namespace emdenflow::cli {

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json point(PhasePoint pt) { return json::array({pt.x, pt.y}); }

std::string scalar(const json& v) {
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void flatten(std::ostringstream& os, const std::string& prefix, const json& v) {
  if (v.is_object()) {
    for (const auto& [k, item] : v.items()) flatten(os, prefix.empty() ? k : prefix + "." + k, item);
  } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i)
      flatten(os, fmt::format("{}[{}]", prefix, i), v[i]);
  } else if (v.is_array()) {
    os << prefix << ":";
    for (const json& item : v) os << " " << scalar(item);
    os << "\n";
  } else {
    os << prefix << ": " << scalar(v) << "\n";
  }
}

}  // namespace

std::string num(double v) { return fmt::format("{:.17g}", v); }

json to_json(const ProblemParams& params) {
  return {{"N", params.N}, {"p", params.p}, {"M", params.M}};
}

json constants_json(const ProblemParams& params) {
  const DerivedConstants dc = derive_constants(params);
  const CriticalConstants cc = critical_constants(params);
  return {{"K", dc.K},
          {"L", dc.L},
          {"q", dc.q},
          {"mu_star", opt(cc.mu_star)},
          {"mu_star_1", cc.mu_star_1},
          {"mu_star_2", cc.mu_star_2},
          {"m_bar", opt(cc.m_bar)},
          {"m0", opt(cc.m_node_hi)},
          {"m1", opt(cc.m_node_lo)}};
}

json equilibria_json(const ProblemParams& params) {
  json out = json::array();
  std::vector<Equilibrium> eqs{Equilibrium{}};
  for (const Equilibrium& e : find_equilibria(params)) eqs.push_back(e);
  for (const Equilibrium& e : eqs) {
    const Classification c = classify_equilibrium(params, e);
    json eigs = json::array();
    for (const auto& z : c.eigenvalues) eigs.push_back(json::array({z.real(), z.imag()}));
    json item = {{"x", e.x},
                 {"y", e.y},
                 {"index", to_string(e.index)},
                 {"double", e.multiplicity == Multiplicity::kDouble},
                 {"kind", to_string(c.kind)},
                 {"trace", c.trace},
                 {"det", c.det},
                 {"eigs", eigs}};
    if (c.lyapunov_coeff) item["lyapunov"] = *c.lyapunov_coeff;
    out.push_back(std::move(item));
  }
  return out;
}

json to_json(const SeedDescriptor& seed) {
  return {{"kind", to_string(seed.kind)},
          {"branch", to_string(seed.branch)},
          {"eq_id", seed.eq_id},
          {"t0", seed.t0},
          {"offset", seed.offset},
          {"point", point(seed.point)},
          {"seed_error", seed.seed_error},
          {"direction", seed.direction}};
}

json to_json(const Event& ev) {
  return {{"kind", to_string(ev.kind)},
          {"t", ev.t},
          {"point", point(ev.point)},
          {"direction", ev.direction}};
}

json to_json(const LimitVerdict& v) {
  json out = {{"kind", to_string(v.kind)},
              {"direction", v.direction == TimeDirection::kForward ? "forward" : "backward"},
              {"termination", to_string(v.termination)},
              {"final_point", point(v.final_point)},
              {"final_distance", v.final_distance},
              {"section_crossings", v.section_crossings},
              {"equilibrium", nullptr},
              {"cycle", nullptr},
              {"exit", nullptr}};
  if (v.equilibrium) {
    out["equilibrium"] = {{"x", v.equilibrium->x},
                          {"y", v.equilibrium->y},
                          {"index", to_string(v.equilibrium->index)}};
  }
  if (v.cycle) {
    const CycleAnalysis& c = *v.cycle;
    out["cycle"] = {{"section_point", point(c.section_point)},
                    {"center", point({c.center.x, c.center.y})},
                    {"period", c.period},
                    {"floquet_integral", c.floquet_integral},
                    {"stability", to_string(c.stability)},
                    {"mean_y", c.mean_y},
                    {"amplitude", c.amplitude},
                    {"return_residual", c.return_residual}};
  }
  if (v.kind == VerdictKind::kExitsQ) {
    out["exit"] = {{"side", to_string(v.side)}, {"point", point(v.exit_point)}};
  }
  json events = json::array();
  for (const Event& e : v.events) events.push_back(to_json(e));
  out["events"] = std::move(events);
  return out;
}

json to_json(const ShootResult& r) {
  json grid = json::array();
  for (const ShootPoint& g : r.grid) {
    grid.push_back({{"M", g.M},
                    {"value", g.ok ? json(g.value) : json(nullptr)},
                    {"sign", g.ok ? (g.value > 0) - (g.value < 0) : 0},
                    {"ok", g.ok},
                    {"failure", g.failure},
                    {"branch", to_string(g.branch)},
                    {"x_a", g.x_a},
                    {"x_b", g.x_b},
                    {"conv_a", to_string(g.conv_a)},
                    {"conv_b", to_string(g.conv_b)},
                    {"verdict_a", to_string(g.verdict_a)},
                    {"verdict_b", to_string(g.verdict_b)},
                    {"widened", g.widened}});
  }
  json brackets = json::array();
  for (const Bracket& b : r.brackets) brackets.push_back(json::array({b.lo, b.hi}));
  json refined = json::array();
  for (const Refined& f : r.refined) {
    refined.push_back({{"M", f.M},
                       {"residual", f.residual},
                       {"iterations", f.iterations},
                       {"width", f.width}});
  }
  return {{"target", to_string(r.target)},
          {"grid", grid},
          {"brackets", brackets},
          {"refined", refined},
          {"conjecture_gap", opt(r.conjecture_gap)},
          {"gap_below_resolution", r.gap_below_resolution}};
}

json to_json(const MonotonicityReport& r) {
  return {{"direction", r.direction},
          {"holds", r.holds},
          {"worst_violation", r.worst_violation},
          {"identity_error", r.identity_error},
          {"integral_error", r.integral_error},
          {"checked", r.checked}};
}

json to_json(const ZRelationReport& r) {
  return {{"max_rel_error", r.max_rel_error},
          {"checked", r.checked},
          {"u_sign", r.u_sign},
          {"u_sign_constant", r.u_sign_constant}};
}

json to_json(const GReport& r) {
  return {{"applicable", r.applicable},
          {"g_negative", r.g_negative},
          {"lower_bound_holds", r.lower_bound_holds},
          {"max_G", r.max_G},
          {"liminf_value", r.liminf_value},
          {"liminf_bound", r.liminf_bound},
          {"liminf_holds", r.liminf_holds}};
}

json to_json(const BoundCheck& b) {
  return {{"name", b.name},
          {"applicable", b.applicable},
          {"holds", b.holds},
          {"value", b.value},
          {"bound", b.bound}};
}

json report_header(std::string_view command, const ProblemParams& params) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"params", to_json(params)},
          {"constants", constants_json(params)},
          {"equilibria", equilibria_json(params)}};
}

std::string summarize(const json& doc) {
  if (!doc.is_object() || !doc.contains("schema_version"))
    throw UsageError("not an emdenflow report: schema_version missing");
  if (doc.at("schema_version").get<int>() != kSchemaVersion)
    throw UsageError(fmt::format("unsupported schema_version {}", doc.at("schema_version").dump()));

  std::ostringstream os;
  os << "command: " << doc.value("command", std::string("?")) << "\n";
  if (doc.contains("params")) {
    const json& pr = doc["params"];
    os << "params: N=" << pr.at("N").get<int>() << " p=" << num(pr.at("p").get<double>())
       << " M=" << num(pr.at("M").get<double>()) << "\n";
  }
  if (doc.contains("constants")) flatten(os, "constants", doc["constants"]);
  if (doc.contains("equilibria")) {
    const json& eqs = doc["equilibria"];
    os << "equilibria: " << eqs.size() << "\n";
    for (const json& e : eqs) {
      os << "  " << e.at("index").get<std::string>() << " (" << num(e.at("x").get<double>())
         << ", " << num(e.at("y").get<double>()) << ") " << e.at("kind").get<std::string>()
         << "\n";
    }
  }
  if (doc.contains("shoot")) {
    const json& s = doc["shoot"];
    os << "shoot: target " << s.at("target").get<std::string>() << ", " << s.at("grid").size()
       << " grid points\n";
    for (const json& g : s.at("grid")) {
      os << "  M=" << num(g.at("M").get<double>()) << " value="
         << (g.at("value").is_null() ? std::string("n/a") : num(g.at("value").get<double>()))
         << " " << g.at("verdict_a").get<std::string>() << "/"
         << g.at("verdict_b").get<std::string>() << "\n";
    }
    for (const json& b : s.at("brackets"))
      os << "  bracket [" << num(b[0].get<double>()) << ", " << num(b[1].get<double>()) << "]\n";
    for (const json& f : s.at("refined")) {
      os << "  refined M=" << num(f.at("M").get<double>())
         << " residual=" << num(f.at("residual").get<double>())
         << " width=" << num(f.at("width").get<double>()) << "\n";
    }
    const json& gap = s.at("conjecture_gap");
    os << "  conjecture gap: " << (gap.is_null() ? std::string("n/a") : num(gap.get<double>()))
       << (s.value("gap_below_resolution", false) ? " (below resolution)" : "") << "\n";
  }
  for (const auto& [k, v] : doc.items()) {
    if (k == "schema_version" || k == "command" || k == "params" || k == "constants" ||
        k == "equilibria" || k == "shoot")
      continue;
    flatten(os, k, v);
  }
  return os.str();
}

}  // namespace emdenflow::cli
