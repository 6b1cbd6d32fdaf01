#include <array>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "emdenflow/cli/commands.hpp"

namespace emdenflow::cli {

namespace {

// Flat JSON object as a CLI11 config source; keys are option names without dashes.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json out = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        out[name] = res.size() == 1 ? json(res.front()) : json(res);
      } else if (default_also && !opt->get_default_str().empty()) {
        out[name] = opt->get_default_str();
      }
    }
    return out.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json doc;
    try {
      doc = json::parse(input);
    } catch (const json::parse_error& e) {
      throw CLI::ConversionError(fmt::format("config file is not valid JSON: {}", e.what()));
    }
    if (!doc.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.name = key;
      auto text = [](const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_float()) return num(v.get<double>());
        return v.dump();
      };
      if (value.is_array()) {
        for (const json& v : value) item.inputs.push_back(text(v));
      } else {
        item.inputs.push_back(text(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IOError*>(&e)) return 4;
  if (dynamic_cast<const UsageError*>(&e)) return 1;
  if (dynamic_cast<const RegimeMismatch*>(&e) || dynamic_cast<const RegimeUndefined*>(&e) ||
      dynamic_cast<const InvalidParams*>(&e) || dynamic_cast<const NotASaddle*>(&e) ||
      dynamic_cast<const NotAnEquilibrium*>(&e) || dynamic_cast<const BadK*>(&e))
    return 2;
  return 3;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
  } else {
    write_atomic(cfg.output, text);
  }
}

void emit_doc(const RunConfig& cfg, const json& doc, std::ostream& out) {
  emit(cfg, cfg.format == OutputFormat::kText ? summarize(doc) : doc.dump(2) + "\n", out);
}

bool undetermined(const json& doc) {
  return doc.contains("verdict") && doc["verdict"].value("kind", "") == "undetermined";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Phase-plane and bifurcation toolkit for -Lu = u^p + M|Du|^{2p/(p+1)}",
               "emdenflow"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; flags override it");
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("-N,--dim", cfg.params.N, "Space dimension")->capture_default_str();
  app.add_option("-p,--power", cfg.params.p, "Exponent p > 1")->capture_default_str();
  app.add_option("-M,--coupling", cfg.params.M, "Gradient coefficient M")->capture_default_str();

  app.add_option("--rel-tol", cfg.integrator.rel_tol)->capture_default_str();
  app.add_option("--abs-tol", cfg.integrator.abs_tol)->capture_default_str();
  app.add_option("--t1", cfg.integrator.t1, "Integration span in t = ln r")->capture_default_str();
  app.add_option("--max-steps", cfg.integrator.max_steps)->capture_default_str();
  app.add_option("--cycle-tol", cfg.integrator.cycle_tol)->capture_default_str();

  app.add_option("-o,--output", cfg.output, "Output path; stdout when omitted");
  const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::kCsv},
                                                    {"json", OutputFormat::kJson},
                                                    {"svg", OutputFormat::kSvg},
                                                    {"text", OutputFormat::kText}};
  std::string format;
  app.add_option("--format", format, "csv, json, svg or text")
      ->check(CLI::IsMember({"csv", "json", "svg", "text"}));

  app.add_option("--seed", cfg.seed.kind,
                 "regular, origin-stable, origin-slow, point, equilibrium or saddle")
      ->capture_default_str();
  app.add_option("--x0", cfg.seed.point.x);
  app.add_option("--y0", cfg.seed.point.y);
  app.add_flag("--backward", cfg.seed.backward, "Integrate a point seed backward");
  app.add_option("--branch", cfg.seed.branch, "st-below, st-above, unst-below or unst-above")
      ->capture_default_str();
  app.add_option("--eq", cfg.seed.eq, "Equilibrium index, origin excluded")->capture_default_str();
  double seed_eps = 0;
  CLI::Option* eps_opt = app.add_option("--seed-eps", seed_eps, "Seed offset (EMDENFLOW_SEED_EPS)");
  app.add_option("--stride", cfg.stride, "CSV sampling stride in t; 0 keeps integrator steps");

  std::string target = "g";
  app.add_option("--target", target, "Shooting function, g or h")
      ->check(CLI::IsMember({"g", "h"}))
      ->capture_default_str();
  app.add_option("--m-lo", cfg.shoot.m_lo);
  app.add_option("--m-hi", cfg.shoot.m_hi);
  app.add_option("--m-points", cfg.shoot.m_points)->capture_default_str();
  app.add_flag("!--linear", cfg.shoot.log_spacing, "Linear instead of log spacing in |M|");
  app.add_option("--m-tol", cfg.shoot.m_tol)->capture_default_str();
  app.add_flag("!--no-refine", cfg.shoot.refine, "Skip bisection of the brackets");
  app.add_option("--threads", cfg.shoot.threads, "Shoot workers; 0 uses all hardware threads")
      ->capture_default_str();

  app.add_option("--input", cfg.input, "Report to summarize");
  app.add_option("--overlay", cfg.overlays, "Seed kinds drawn over the portrait");
  app.add_option("--quiver", cfg.quiver, "Arrows per axis")->capture_default_str();

  const std::array<std::pair<const char*, Command>, 8> commands{{
      {"constants", Command::kConstants},
      {"equilibria", Command::kEquilibria},
      {"classify", Command::kClassify},
      {"trajectory", Command::kTrajectory},
      {"portrait", Command::kPortrait},
      {"diagnose", Command::kDiagnose},
      {"shoot", Command::kShoot},
      {"report", Command::kReport},
  }};
  for (const auto& [name, cmd] : commands) {
    app.add_subcommand(name)->callback([&cfg, c = cmd] { cfg.command = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (dynamic_cast<const CLI::FileError*>(&e)) {
      err << "error: " << e.what() << "\n";
      return 4;
    }
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  if (eps_opt->count() > 0) cfg.seed.eps = seed_eps;
  if (!format.empty()) cfg.format = formats.at(format);
  cfg.shoot.target = target == "h" ? ShootTarget::kH : ShootTarget::kG;

  try {
    switch (cfg.command) {
      case Command::kConstants:
        emit_doc(cfg, cmd_constants(cfg), out);
        return 0;
      case Command::kEquilibria:
        emit_doc(cfg, cmd_equilibria(cfg), out);
        return 0;
      case Command::kClassify: {
        const json doc = cmd_classify(cfg);
        emit_doc(cfg, doc, out);
        return undetermined(doc) ? 3 : 0;
      }
      case Command::kDiagnose: {
        const json doc = cmd_diagnose(cfg);
        emit_doc(cfg, doc, out);
        return undetermined(doc) ? 3 : 0;
      }
      case Command::kTrajectory: {
        if (cfg.output.empty()) throw UsageError("trajectory needs --output");
        const TrajectoryOutput t = cmd_trajectory(cfg);
        write_atomic(cfg.output, t.csv);
        try {
          write_atomic(cfg.output + ".json", t.sidecar.dump(2) + "\n");
        } catch (const IOError&) {
          std::error_code ec;
          std::filesystem::remove(cfg.output, ec);
          throw;
        }
        return undetermined(t.sidecar) ? 3 : 0;
      }
      case Command::kPortrait:
        emit(cfg, cmd_portrait(cfg), out);
        return 0;
      case Command::kShoot: {
        const json doc = cmd_shoot(cfg);
        emit_doc(cfg, doc, out);
        for (const json& g : doc["shoot"]["grid"])
          if (g.at("ok").get<bool>()) return 0;
        return 3;
      }
      case Command::kReport:
        emit(cfg, cmd_report(cfg), out);
        return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 1;
}

}  // namespace emdenflow::cli
