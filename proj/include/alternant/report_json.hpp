#pragma once

#include <json.hpp>

#include "alternant/alternance.hpp"
#include "alternant/free_knot.hpp"
#include "alternant/poly_fit.hpp"
#include "alternant/spline_fit.hpp"

namespace alternant {

nlohmann::json to_json(const AlternatingSequence& seq);
nlohmann::json to_json(const FitReport& report);
nlohmann::json to_json(const SplineFitReport& report);
nlohmann::json to_json(const WMinimalityReport& report);
nlohmann::json to_json(const DescentResult& result);

}  // namespace alternant
