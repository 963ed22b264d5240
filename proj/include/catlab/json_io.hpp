#ifndef CATLAB_JSON_IO_HPP
#define CATLAB_JSON_IO_HPP

#include <string>

#include "json.hpp"

#include "catlab/defense.hpp"
#include "catlab/evaluate.hpp"
#include "catlab/learner.hpp"
#include "catlab/stats.hpp"
#include "catlab/trigger_select.hpp"

namespace catlab {

// JSON forms used by the CLI and the report files. Matrices are written
// row-major as arrays of rows; field names match the struct fields.

nlohmann::json to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MlpModel& model);
MlpModel mlp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TriggerSpec& trigger);  // {"indices":[...],"values":[...]}
TriggerSpec trigger_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ZScoreRecord& record);

nlohmann::json to_json(const EvalReport& report);

nlohmann::json to_json(const PoisonPlan& plan);
PoisonPlan poison_plan_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BetaParams& params);
nlohmann::json to_json(const CredibleInterval& interval);
nlohmann::json to_json(const RobustnessEstimate& estimate);

nlohmann::json to_json(const DefenseReport& report);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace catlab

#endif
