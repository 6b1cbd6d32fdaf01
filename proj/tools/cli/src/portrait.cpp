#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "emdenflow/cli/commands.hpp"
#include "emdenflow/equilibria.hpp"
#include "emdenflow/field.hpp"

namespace emdenflow::cli {

namespace {

constexpr double kWidth = 800, kHeight = 640, kMargin = 48;
constexpr int kRegionGrid = 200;

struct Frame {
  double x_max = 2, y_max = 2;
  double px(double x) const { return kMargin + x / x_max * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - y / y_max * (kHeight - 2 * kMargin); }
  bool inside(PhasePoint pt) const {
    return pt.x >= 0 && pt.y >= 0 && pt.x <= x_max && pt.y <= y_max;
  }
};

Frame frame_for(const ProblemParams& params, const std::vector<Equilibrium>& eqs) {
  Frame f;
  if (!eqs.empty()) {
    double xm = 0, ym = 0;
    for (const Equilibrium& e : eqs) {
      xm = std::max(xm, e.x);
      ym = std::max(ym, e.y);
    }
    f.x_max = 2 * xm;
    f.y_max = 2 * ym;
  }
  // With K, M < 0 the curve C starts on the y axis; keep its lower end in view.
  const DerivedConstants dc = derive_constants(params);
  if (dc.K < 0 && params.M < 0)
    f.y_max = std::max(f.y_max, 3 * std::pow(dc.K / params.M, (params.p + 1) / (params.p - 1)));
  return f;
}

// Polylines of the visible pieces.
std::vector<std::vector<PhasePoint>> clip(const Frame& f, const std::vector<PhasePoint>& pts) {
  std::vector<std::vector<PhasePoint>> out;
  std::vector<PhasePoint> cur;
  for (const PhasePoint& pt : pts) {
    if (f.inside(pt)) {
      cur.push_back(pt);
    } else if (!cur.empty()) {
      if (cur.size() > 1) out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (cur.size() > 1) out.push_back(std::move(cur));
  return out;
}

std::string polyline(const Frame& f, const std::vector<PhasePoint>& pts, std::string_view cls) {
  std::string s = fmt::format("<polyline class=\"{}\" fill=\"none\" points=\"", cls);
  for (std::size_t i = 0; i < pts.size(); ++i)
    s += fmt::format("{}{:.3f},{:.3f}", i ? " " : "", f.px(pts[i].x), f.py(pts[i].y));
  return s + "\"/>\n";
}

bool curve_bounded(const ProblemParams& params, double y_max) {
  const double y_far = 1e6 * std::max(1.0, y_max);
  const Nullclines far = nullclines(params, y_far, 64);
  if (far.curve.empty()) return true;
  return far.curve.back().back().y < y_far;
}

}  // namespace

std::string cmd_portrait(const RunConfig& cfg) {
  validate(cfg.params);
  const ProblemParams& params = cfg.params;
  const std::vector<Equilibrium> eqs = find_equilibria(params);
  const Frame f = frame_for(params, eqs);

  json meta = {{"schema_version", kSchemaVersion},
               {"params", to_json(params)},
               {"viewport", {{"x_max", f.x_max}, {"y_max", f.y_max}}}};

  std::string body;

  // Quiver of unit field directions.
  const int nq = std::max(cfg.quiver, 2);
  const double cw = (kWidth - 2 * kMargin) / nq, ch = (kHeight - 2 * kMargin) / nq;
  const double len = 0.38 * std::min(cw, ch);
  body += "<g id=\"quiver\" stroke=\"#9aa4b1\" stroke-width=\"1\" marker-end=\"url(#head)\">\n";
  for (int i = 0; i < nq; ++i) {
    for (int j = 0; j < nq; ++j) {
      const PhasePoint pt{(i + 0.5) / nq * f.x_max, (j + 0.5) / nq * f.y_max};
      const auto [hx, hy] = eval_H(params, pt);
      // Pixel y grows downward.
      const double dx = hx / f.x_max, dy = -hy / f.y_max;
      const double n = std::hypot(dx * (kWidth - 2 * kMargin), dy * (kHeight - 2 * kMargin));
      if (!(n > 0)) continue;
      const double ux = dx * (kWidth - 2 * kMargin) / n, uy = dy * (kHeight - 2 * kMargin) / n;
      const double cx = f.px(pt.x), cy = f.py(pt.y);
      body += fmt::format("<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\"/>\n",
                          cx - 0.5 * len * ux, cy - 0.5 * len * uy, cx + 0.5 * len * ux,
                          cy + 0.5 * len * uy);
    }
  }
  body += "</g>\n";

  // Nullclines.
  const Nullclines nc = nullclines(params, f.y_max, 1024);
  std::vector<PhasePoint> line;
  for (int i = 0; i <= 64; ++i) {
    const double y = f.y_max * i / 64;
    line.push_back({(params.p - 1) * y / 2, y});
  }
  body += "<g id=\"nullcline-L\" stroke=\"#1f5fa8\" stroke-width=\"2\">\n";
  for (const auto& piece : clip(f, line)) body += polyline(f, piece, "nullcline-L");
  body += "</g>\n<g id=\"nullcline-C\" stroke=\"#b8481f\" stroke-width=\"2\">\n";
  int branches = 0;
  for (const auto& br : nc.curve) {
    const auto pieces = clip(f, br);
    branches += !pieces.empty();
    for (const auto& piece : pieces) body += polyline(f, piece, "nullcline-C");
  }
  body += "</g>\n";
  meta["curve"] = {{"branches", nc.curve.size()},
                   {"visible_branches", branches},
                   {"bounded", curve_bounded(params, f.y_max)}};

  // Regions: tag counts on a fine grid, label at the tagged sample nearest the centroid.
  std::map<RegionTag, std::array<double, 3>> acc;
  std::vector<std::pair<RegionTag, PhasePoint>> tagged;
  tagged.reserve(kRegionGrid * kRegionGrid);
  auto sample = [&](double x_hi, double y_hi, int n) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const PhasePoint pt{(i + 0.5) / n * x_hi, (j + 0.5) / n * y_hi};
        const RegionTag tag = region_of(params, pt, eqs);
        if (tag == RegionTag::kOnL || tag == RegionTag::kOnC || tag == RegionTag::kOutsideQ)
          continue;
        auto& a = acc[tag];
        a[0] += 1;
        a[1] += pt.x;
        a[2] += pt.y;
        tagged.emplace_back(tag, pt);
      }
    }
  };
  sample(f.x_max, f.y_max, kRegionGrid);
  // Small equilibria get their own box; E can be thinner than the coarse grid.
  for (const Equilibrium& e : eqs) sample(2 * e.x, 2 * e.y, kRegionGrid / 4);
  json regions = json::array();
  body += "<g id=\"regions\" font-family=\"sans-serif\" font-size=\"18\" fill=\"#333\">\n";
  for (const auto& [tag, a] : acc) {
    const PhasePoint c{a[1] / a[0], a[2] / a[0]};
    PhasePoint best = c;
    double bd = INFINITY;
    for (const auto& [t, pt] : tagged) {
      if (t != tag) continue;
      const double d = std::hypot((pt.x - c.x) / f.x_max, (pt.y - c.y) / f.y_max);
      if (d < bd) {
        bd = d;
        best = pt;
      }
    }
    regions.push_back(to_string(tag));
    body += fmt::format("<text class=\"region-label\" x=\"{:.3f}\" y=\"{:.3f}\">{}</text>\n",
                        f.px(best.x), f.py(best.y), to_string(tag));
  }
  body += "</g>\n";
  meta["regions"] = regions;

  // Overlaid trajectories.
  json overlays = json::array();
  for (const std::string& kind : cfg.overlays) {
    SeedSpec spec = cfg.seed;
    spec.kind = kind;
    const SeedDescriptor seed = resolve_seed(params, spec);
    const Trajectory tr = run_seed(params, seed, cfg.integrator);
    body += fmt::format("<g class=\"trajectory\" data-seed=\"{}\" stroke=\"#2a8a3e\" stroke-width=\"1.5\">\n", kind);
    for (const auto& piece : clip(f, tr.samples)) body += polyline(f, piece, "trajectory");
    body += "</g>\n";
    overlays.push_back({{"seed", kind}, {"verdict", to_string(classify_limit(params, tr).kind)}});
  }
  meta["overlays"] = overlays;

  // Equilibria on top.
  json eq_meta = json::array();
  std::vector<Equilibrium> all{Equilibrium{}};
  all.insert(all.end(), eqs.begin(), eqs.end());
  body += "<g id=\"equilibria\">\n";
  for (const Equilibrium& e : all) {
    const bool dbl = e.multiplicity == Multiplicity::kDouble;
    const std::string_view kind = to_string(classify_equilibrium(params, e).kind);
    body += fmt::format(
        "<circle class=\"equilibrium{}\" data-kind=\"{}\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{}\" "
        "fill=\"{}\" stroke=\"#000\"/>\n",
        dbl ? " double" : "", kind, f.px(e.x), f.py(e.y), dbl ? 7 : 5, dbl ? "#fff" : "#000");
    eq_meta.push_back({{"x", e.x},
                       {"y", e.y},
                       {"index", to_string(e.index)},
                       {"double", dbl},
                       {"kind", kind}});
  }
  body += "</g>\n";
  meta["equilibria"] = eq_meta;
  meta["interior_equilibria"] = eqs.size();

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      kWidth, kHeight);
  svg += "<metadata id=\"emdenflow\"><![CDATA[" + meta.dump() + "]]></metadata>\n";
  svg += "<defs><marker id=\"head\" viewBox=\"0 0 6 6\" refX=\"5\" refY=\"3\" markerWidth=\"5\" "
         "markerHeight=\"5\" orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#9aa4b1\"/>"
         "</marker></defs>\n";
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#fff\"/>\n", kWidth, kHeight);
  svg += fmt::format(
      "<rect x=\"{0}\" y=\"{0}\" width=\"{1}\" height=\"{2}\" fill=\"none\" stroke=\"#000\"/>\n",
      kMargin, kWidth - 2 * kMargin, kHeight - 2 * kMargin);
  svg += body;
  svg += fmt::format(
      "<text x=\"{:.3f}\" y=\"{:.3f}\" font-family=\"sans-serif\" font-size=\"12\">x (max {:.6g})</text>\n",
      kWidth - kMargin - 90, kHeight - kMargin / 3, f.x_max);
  svg += fmt::format(
      "<text x=\"4\" y=\"{:.3f}\" font-family=\"sans-serif\" font-size=\"12\">y (max {:.6g})</text>\n",
      kMargin - 8, f.y_max);
  svg += "</svg>\n";
  return svg;
}

json portrait_metadata(const std::string& svg) {
  const std::string open = "<metadata id=\"emdenflow\"><![CDATA[";
  const auto a = svg.find(open);
  if (a == std::string::npos) throw UsageError("SVG has no emdenflow metadata");
  const auto b = svg.find("]]></metadata>", a);
  if (b == std::string::npos) throw UsageError("unterminated metadata block");
  return json::parse(svg.substr(a + open.size(), b - a - open.size()));
}

}  // namespace emdenflow::cli
