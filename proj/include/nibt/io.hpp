#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "nibt/balance.hpp"
#include "nibt/model.hpp"
#include "nibt/weights.hpp"

namespace nibt {

nlohmann::json model_to_json(const StateSpaceModel& model);
StateSpaceModel model_from_json(const nlohmann::json& j);

nlohmann::json samples_to_json(const SampleSet& samples);
SampleSet samples_from_json(const nlohmann::json& j);

nlohmann::json rom_to_json(const ReducedModel& rom);
ReducedModel rom_from_json(const nlohmann::json& j);

nlohmann::json factors_to_json(const GramianFactors& factors);

void write_samples_csv(std::ostream& out, const SampleSet& samples);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace nibt
