#pragma once

#include "json.hpp"

#include "spectral_match/evaluation.hpp"
#include "spectral_match/isomorphism.hpp"
#include "spectral_match/pipeline.hpp"

namespace spectral_match {

nlohmann::json to_json(const PipelineConfig& config);
nlohmann::json to_json(const EigenAlignment& alignment);
nlohmann::json to_json(const Correspondence& corr);  // run summary, no posterior matrix
nlohmann::json to_json(const MatchResult& result, const PipelineConfig& config);
nlohmann::json to_json(const ErrorReport& report);
nlohmann::json to_json(const IsoResult& result);

}  // namespace spectral_match
