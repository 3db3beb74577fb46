#pragma once

#include <string>

#include <json.hpp>

#include "mhdcascade/config.hpp"
#include "mhdcascade/covers.hpp"
#include "mhdcascade/cutoffs.hpp"
#include "mhdcascade/pipeline.hpp"

namespace mhdc {

// Version of the report layout; bump with any change to schema/report.schema.json.
inline constexpr int kReportSchemaVersion = 1;

// Non-finite numbers are written as null.
nlohmann::json to_json(const RunConfig& c);
nlohmann::json to_json(const IntegralScaleQuantities& q);
nlohmann::json to_json(const CheckResult& r);
nlohmann::json to_json(const EnsembleReport& r);
nlohmann::json to_json(const LocalityResult& r);
nlohmann::json to_json(const A1Report& r);
nlohmann::json to_json(const A3Report& r);
nlohmann::json to_json(const AnalysisReport& r);
nlohmann::json to_json(const Cover& c);
nlohmann::json to_json(const CoverReport& r);
nlohmann::json to_json(const BoundReport& r);

// Cover from JSON written by to_json(Cover). Throws FormatError.
Cover cover_from_json(const nlohmann::json& j);

// One row per (scale, cover): flux and raw integral with the band bounds.
// Numbers use shortest round-trip formatting, so the text is a function of the
// values alone.
std::string flux_csv(const EnsembleReport& r);

}  // namespace mhdc
