#include "mdpalign/io.hpp"

#include "mdpalign/errors.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace mdpalign::io {

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
    if (!j.is_object()) throw InvalidInput(what + " must be a JSON object", what);
    for (const auto& [key, value] : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
        if (!known) throw InvalidInput("unknown key '" + key + "' in " + what, key);
    }
}

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw InvalidInput(std::string("missing required key '") + key + "'", key);
    return *it;
}

int as_int(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw InvalidInput(field + " must be an integer", field);
    return v.get<int>();
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw InvalidInput(field + " must be a number", field);
    return v.get<double>();
}

std::uint64_t as_seed(const json& v, const std::string& field) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw InvalidInput(field + " must be a nonnegative integer", field);
    return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& field) {
    if (!v.is_boolean()) throw InvalidInput(field + " must be a boolean", field);
    return v.get<bool>();
}

const json& as_array(const json& v, const std::string& field) {
    if (!v.is_array()) throw InvalidInput(field + " must be an array", field);
    return v;
}

std::vector<int> int_array(const json& v, const std::string& field) {
    std::vector<int> out;
    for (const auto& e : as_array(v, field)) out.push_back(as_int(e, field));
    return out;
}

std::vector<double> number_array(const json& v, const std::string& field) {
    std::vector<double> out;
    for (const auto& e : as_array(v, field)) out.push_back(as_number(e, field));
    return out;
}

std::vector<std::string> string_array(const json& v, const std::string& field) {
    std::vector<std::string> out;
    for (const auto& e : as_array(v, field)) {
        if (!e.is_string()) throw InvalidInput(field + " entries must be strings", field);
        out.push_back(e.get<std::string>());
    }
    return out;
}

template <typename T, typename Read>
Table<T> table(const json& v, const std::string& field, std::size_t rows, std::size_t cols, Read read) {
    as_array(v, field);
    if (v.size() != rows)
        throw InvalidInput(field + " has " + std::to_string(v.size()) + " rows, expected " + std::to_string(rows), field);
    Table<T> out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = as_array(v[r], field);
        if (row.size() != cols)
            throw InvalidInput(field + " row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                                   " entries, expected " + std::to_string(cols),
                               field);
        for (std::size_t c = 0; c < cols; ++c) out(r, c) = read(row[c], field);
    }
    return out;
}

template <typename T>
json table_json(const Table<T>& t) {
    json out = json::array();
    for (std::size_t r = 0; r < t.rows(); ++r) {
        json row = json::array();
        for (const auto& v : t.row(r)) row.push_back(v);
        out.push_back(std::move(row));
    }
    return out;
}

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

} // namespace

Document parse_document(std::string text, std::string path) {
    Document doc{std::move(path), std::move(text), {}};
    try {
        doc.value = json::parse(doc.text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(doc.path + ":" + std::to_string(line_of_offset(doc.text, e.byte ? e.byte - 1 : 0)) +
                           ": malformed JSON: " + e.what());
    }
    return doc;
}

Document read_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "'", "path");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_document(buf.str(), path.string());
}

int locate_field(const std::string& text, const std::string& field) {
    if (field.empty()) return 0;
    const auto pos = text.find("\"" + field + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

json to_json(const TabularMdp& mdp) {
    json j;
    j["states"] = mdp.state_labels;
    j["actions"] = mdp.action_labels;
    j["transition"] = table_json(mdp.transition);
    j["reward"] = table_json(mdp.reward);
    j["eta"] = mdp.eta;
    j["gamma"] = mdp.gamma;
    if (mdp.dummy_state) j["dummy_state"] = *mdp.dummy_state;
    if (mdp.dummy_action) j["dummy_action"] = *mdp.dummy_action;
    return j;
}

TabularMdp mdp_from_json(const json& j) {
    check_keys(j, {"states", "actions", "transition", "reward", "eta", "gamma", "dummy_state", "dummy_action"},
               "MDP");
    TabularMdp mdp;
    mdp.state_labels = string_array(require(j, "states"), "states");
    mdp.action_labels = string_array(require(j, "actions"), "actions");
    const auto n = mdp.state_labels.size();
    const auto m = mdp.action_labels.size();
    if (n == 0) throw InvalidInput("states must be nonempty", "states");
    if (m == 0) throw InvalidInput("actions must be nonempty", "actions");
    mdp.transition = table<StateId>(require(j, "transition"), "transition", n, m, as_int);
    mdp.reward = table<double>(require(j, "reward"), "reward", n, m, as_number);
    mdp.eta = number_array(require(j, "eta"), "eta");
    if (auto it = j.find("gamma"); it != j.end()) mdp.gamma = as_number(*it, "gamma");
    if (auto it = j.find("dummy_state"); it != j.end()) mdp.dummy_state = as_int(*it, "dummy_state");
    if (auto it = j.find("dummy_action"); it != j.end()) mdp.dummy_action = as_int(*it, "dummy_action");
    mdp.validate();
    return mdp;
}

json to_json(const TabularPolicy& pi) { return {{"probs", table_json(pi.probs)}}; }

TabularPolicy policy_from_json(const json& j) {
    check_keys(j, {"probs"}, "policy");
    const auto& rows = as_array(require(j, "probs"), "probs");
    if (rows.empty() || !rows[0].is_array()) throw InvalidInput("probs must be a nonempty table", "probs");
    TabularPolicy pi{table<double>(rows, "probs", rows.size(), rows[0].size(), as_number)};
    pi.validate();
    return pi;
}

json to_json(const AlignmentMaps& maps) { return {{"f", maps.f}, {"g", maps.g}}; }

AlignmentMaps alignment_from_json(const json& j) {
    check_keys(j, {"f", "g"}, "alignment");
    return {int_array(require(j, "f"), "f"), int_array(require(j, "g"), "g")};
}

json to_json(const ReductionMap& r) { return {{"phi", r.phi}, {"psi", r.psi}}; }

ReductionMap reduction_from_json(const json& j) {
    check_keys(j, {"phi", "psi"}, "reduction");
    return {int_array(require(j, "phi"), "phi"), int_array(require(j, "psi"), "psi")};
}

json to_json(const CdnfExpr& b) { return {{"minterms", b.minterms}}; }

CdnfExpr cdnf_from_json(const json& j) {
    check_keys(j, {"minterms"}, "expression");
    CdnfExpr b;
    for (const auto& term : as_array(require(j, "minterms"), "minterms"))
        b.minterms.push_back(int_array(term, "minterms"));
    return b;
}

json to_json(const SearchConfig& cfg) {
    return {{"lambda", cfg.lambda},
            {"max_iters", cfg.max_iters},
            {"restarts", cfg.restarts},
            {"initial_temperature", cfg.initial_temperature},
            {"decay", cfg.decay},
            {"rng_seed", cfg.rng_seed},
            {"degenerate_penalty", cfg.degenerate_penalty}};
}

SearchConfig search_config_from_json(const json& j) {
    check_keys(j, {"lambda", "max_iters", "restarts", "initial_temperature", "decay", "rng_seed", "degenerate_penalty"},
               "search config");
    SearchConfig cfg;
    if (auto it = j.find("lambda"); it != j.end()) cfg.lambda = as_number(*it, "lambda");
    if (auto it = j.find("max_iters"); it != j.end()) cfg.max_iters = as_int(*it, "max_iters");
    if (auto it = j.find("restarts"); it != j.end()) cfg.restarts = as_int(*it, "restarts");
    if (auto it = j.find("initial_temperature"); it != j.end())
        cfg.initial_temperature = as_number(*it, "initial_temperature");
    if (auto it = j.find("decay"); it != j.end()) cfg.decay = as_number(*it, "decay");
    if (auto it = j.find("rng_seed"); it != j.end()) cfg.rng_seed = as_seed(*it, "rng_seed");
    if (auto it = j.find("degenerate_penalty"); it != j.end())
        cfg.degenerate_penalty = as_number(*it, "degenerate_penalty");
    cfg.validate();
    return cfg;
}

json to_json(const PlantSpec& spec) {
    return {{"base_states", spec.base_states},
            {"base_actions", spec.base_actions},
            {"split_factor_states", spec.split_factor_states},
            {"split_factor_actions", spec.split_factor_actions},
            {"permute", spec.permute},
            {"rng_seed", spec.rng_seed},
            {"gamma", spec.gamma}};
}

PlantSpec plant_spec_from_json(const json& j) {
    check_keys(j, {"base_states", "base_actions", "split_factor_states", "split_factor_actions", "permute", "rng_seed",
                   "gamma"},
               "plant spec");
    PlantSpec spec;
    spec.base_states = as_int(require(j, "base_states"), "base_states");
    spec.base_actions = as_int(require(j, "base_actions"), "base_actions");
    if (auto it = j.find("split_factor_states"); it != j.end())
        spec.split_factor_states = as_int(*it, "split_factor_states");
    if (auto it = j.find("split_factor_actions"); it != j.end())
        spec.split_factor_actions = as_int(*it, "split_factor_actions");
    if (auto it = j.find("permute"); it != j.end()) spec.permute = as_bool(*it, "permute");
    if (auto it = j.find("rng_seed"); it != j.end()) spec.rng_seed = as_seed(*it, "rng_seed");
    if (auto it = j.find("gamma"); it != j.end()) spec.gamma = as_number(*it, "gamma");
    spec.validate();
    return spec;
}

json taskset_to_json(const std::vector<TabularMdp>& xs, const std::vector<TabularMdp>& ys) {
    json jx = json::array(), jy = json::array();
    for (const auto& m : xs) jx.push_back(to_json(m));
    for (const auto& m : ys) jy.push_back(to_json(m));
    return {{"x_mdps", jx}, {"y_mdps", jy}};
}

std::pair<std::vector<TabularMdp>, std::vector<TabularMdp>> taskset_from_json(const json& j) {
    check_keys(j, {"x_mdps", "y_mdps"}, "task set");
    std::vector<TabularMdp> xs, ys;
    for (const auto& m : as_array(require(j, "x_mdps"), "x_mdps")) xs.push_back(mdp_from_json(m));
    for (const auto& m : as_array(require(j, "y_mdps"), "y_mdps")) ys.push_back(mdp_from_json(m));
    if (xs.empty()) throw InvalidInput("task set has no pairs", "x_mdps");
    if (xs.size() != ys.size()) throw InvalidInput("x_mdps and y_mdps differ in length", "y_mdps");
    return {std::move(xs), std::move(ys)};
}

json to_json(const OptimalityModel& opt) {
    json j;
    j["mode"] = std::string(to_string(opt.mode));
    if (!opt.externally_specified) {
        j["v_star"] = opt.v_star;
        j["q_star"] = table_json(opt.q_star);
        j["greedy_sets"] = opt.greedy_sets;
        j["recurrent_states"] = opt.recurrent_states;
    }
    Table<int> o(opt.optimal.rows(), opt.optimal.cols());
    for (std::size_t s = 0; s < o.rows(); ++s)
        for (std::size_t a = 0; a < o.cols(); ++a) o(s, a) = opt.optimal(s, a) ? 1 : 0;
    j["O"] = table_json(o);
    return j;
}

json to_json(const ViolationReport& report) {
    json opt = json::array(), sur = json::array(), dyn = json::array();
    for (const auto& v : report.optimality) opt.push_back({{"sx", v.sx}, {"ax", v.ax}});
    for (const auto& v : report.surjectivity) sur.push_back({{"sy", v.sy}, {"ay", v.ay}});
    for (const auto& v : report.dynamics) dyn.push_back({{"sy", v.sy}, {"ay", v.ay}, {"sx", v.sx}, {"ax", v.ax}});
    return {{"optimality_violations", opt},
            {"surjectivity_violations", sur},
            {"dynamics_violations", dyn},
            {"is_reduction", report.empty()}};
}

json to_json(const ObjectiveScore& score) {
    return {{"optimal_return", score.optimal_return},
            {"adapted_return", score.adapted_return},
            {"suboptimality_gap", score.suboptimality_gap},
            {"tv_distance", score.tv_distance},
            {"objective1_met", score.objective1_met},
            {"objective2_met", score.objective2_met}};
}

json to_json(const TripletDistribution& d) {
    json mass = json::array();
    for (const auto& [t, p] : d.mass) mass.push_back({{"s", t.state}, {"a", t.action}, {"s_next", t.next}, {"mass", p}});
    json j{{"kind", d.kind == DistributionKind::Exact ? "exact" : "empirical"}, {"mass", mass}};
    if (d.kind == DistributionKind::Empirical) j["sample_count"] = d.sample_count;
    return j;
}

json to_json(const TransferResult& t) {
    json j{{"transferable", t.transferable}, {"joint_reductions", t.joint_count}};
    if (t.witness) j["witness"] = {{"reduction", to_json(*t.witness)}, {"violations", to_json(t.violations)}};
    return j;
}

void write_jsonl(std::ostream& out, const SequenceDistribution& d) {
    for (const auto& [seq, p] : d.mass) out << json{{"sequence", seq}, {"mass", p}}.dump() << '\n';
}

void write_csv(std::ostream& out, const Rollout& r) {
    out << "t,state,action\n";
    for (int t = 0; t < r.length(); ++t) out << t << ',' << r.states[t] << ',' << r.actions[t] << '\n';
    out << r.length() << ',' << r.states.back() << ",\n";
}

void write_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
    out << "iteration,loss,gap,tv\n";
    out.precision(17);
    for (const auto& p : trace) out << p.iteration << ',' << p.loss << ',' << p.gap << ',' << p.tv << '\n';
}

} // namespace mdpalign::io
