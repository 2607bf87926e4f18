#pragma once

#include <string>

#include <json.hpp>

#include "qproc/behavior.hpp"
#include "qproc/measures.hpp"
#include "qproc/process.hpp"
#include "qproc/witness.hpp"

namespace qproc {

using Json = nlohmann::json;

// Malformed JSON text (distinct from invariant violations so the CLI can map
// it to its own exit code). The message carries line and column.
class JsonFormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/*
 * JSON conventions (stable; see README for the schemas):
 *   complex scalar  -> [re, im]
 *   matrix          -> array of rows, each an array of [re, im] pairs
 *   behavior table  -> 4-d nested arrays ordered (x0, y0, x1, y1)
 *   delay           -> number or "inf"
 */

Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);

Json state_to_json(const DensityMatrix& s);
DensityMatrix state_from_json(const Json& j);

Json povm_to_json(const Povm& p);
Povm povm_from_json(const Json& j);
Json povm_list_to_json(const std::vector<Povm>& povms);
std::vector<Povm> povm_list_from_json(const Json& j);

Json channel_to_json(const QuantumChannel& c);
QuantumChannel channel_from_json(const Json& j);

Json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

Json behavior_to_json(const Behavior& b);
Behavior behavior_from_json(const Json& j);

Json functional_to_json(const BellFunctional& f);
BellFunctional functional_from_json(const Json& j);

Json process_to_json(const Process& p);
Process process_from_json(const Json& j);

Json witness_to_json(const WitnessOperator& w);
WitnessOperator witness_from_json(const Json& j);

Json measure_result_to_json(const MeasureResult& r);

Json superprocess_to_json(const Superprocess& sp);
Superprocess superprocess_from_json(const Json& j);

// Parse with a diagnostic carrying line and column on failure.
Json parse_json_text(const std::string& text);
Json load_json_file(const std::string& path);

}  // namespace qproc
