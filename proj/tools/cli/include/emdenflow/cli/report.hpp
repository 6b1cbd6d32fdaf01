#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "emdenflow/bifurcation.hpp"
#include "emdenflow/classifier.hpp"
#include "emdenflow/diagnostics.hpp"
#include "emdenflow/integrator.hpp"
#include "emdenflow/params.hpp"

namespace emdenflow::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const ProblemParams& params);
json constants_json(const ProblemParams& params);
json equilibria_json(const ProblemParams& params);
json to_json(const SeedDescriptor& seed);
json to_json(const Event& ev);
json to_json(const LimitVerdict& v);
json to_json(const ShootResult& r);
json to_json(const MonotonicityReport& r);
json to_json(const ZRelationReport& r);
json to_json(const GReport& r);
json to_json(const BoundCheck& b);

// {schema_version, command, params, constants, equilibria}
json report_header(std::string_view command, const ProblemParams& params);

// Text summary of any report written by this tool. Numbers use 17 significant digits.
std::string summarize(const json& doc);

// 17 significant digits.
std::string num(double v);

}  // namespace emdenflow::cli
