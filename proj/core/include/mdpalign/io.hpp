#pragma once

#include "mdpalign/alignment.hpp"
#include "mdpalign/chain.hpp"
#include "mdpalign/mdp.hpp"
#include "mdpalign/multitask.hpp"
#include "mdpalign/optimality.hpp"
#include "mdpalign/search.hpp"
#include "mdpalign/sim.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace mdpalign::io {

using nlohmann::json;

/// Parsed JSON document together with its source text, so schema errors can be
/// anchored to a line.
struct Document {
    std::string path;
    std::string text;
    json value;
};

/// Reads and parses a file. Syntax errors raise InvalidInput naming the line.
Document read_document(const std::filesystem::path& path);
Document parse_document(std::string text, std::string path = "<memory>");

/// 1-based line of the first occurrence of "field" as a key in `text`, 0 when absent.
int locate_field(const std::string& text, const std::string& field);

// Instances. Parsing rejects unknown keys and validates the result.
json to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const json& j);

json to_json(const TabularPolicy& pi);
TabularPolicy policy_from_json(const json& j);

json to_json(const AlignmentMaps& maps);
AlignmentMaps alignment_from_json(const json& j);

json to_json(const ReductionMap& r);
ReductionMap reduction_from_json(const json& j);

json to_json(const CdnfExpr& b);
CdnfExpr cdnf_from_json(const json& j);

json to_json(const SearchConfig& cfg);
SearchConfig search_config_from_json(const json& j);

json to_json(const PlantSpec& spec);
PlantSpec plant_spec_from_json(const json& j);

/// {"x_mdps": [...], "y_mdps": [...]}
json taskset_to_json(const std::vector<TabularMdp>& xs, const std::vector<TabularMdp>& ys);
std::pair<std::vector<TabularMdp>, std::vector<TabularMdp>> taskset_from_json(const json& j);

// Results (output only).
json to_json(const OptimalityModel& opt);
json to_json(const ViolationReport& report);
json to_json(const ObjectiveScore& score);
json to_json(const TripletDistribution& d);
json to_json(const TransferResult& t);

/// One JSON object per line: {"sequence": [...], "mass": p}.
void write_jsonl(std::ostream& out, const SequenceDistribution& d);
/// Header "t,state,action"; the final state is written with an empty action.
void write_csv(std::ostream& out, const Rollout& r);
/// Header "iteration,loss,gap,tv".
void write_csv(std::ostream& out, const std::vector<TracePoint>& trace);

} // namespace mdpalign::io
