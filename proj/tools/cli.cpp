#include "cli.hpp"

#include "mdpalign/alignment.hpp"
#include "mdpalign/errors.hpp"
#include "mdpalign/io.hpp"
#include "mdpalign/multitask.hpp"
#include "mdpalign/search.hpp"
#include "mdpalign/sim.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mdpalign::cli {

namespace {

namespace fs = std::filesystem;
using io::Document;
using io::json;

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw ComputeError("sha256 digest failed");
    std::ostringstream hex;
    hex << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(md[i]);
    return hex.str();
}

struct CommonOptions {
    std::string mode = "stationary";
    std::uint64_t seed = 0;
    int jobs = 1;
    bool strict = false;
    std::string out;
    bool no_timing = false;
    std::vector<CLI::Option*> seed_options;  // one per subcommand

    bool seed_given() const {
        for (const auto* opt : seed_options)
            if (opt->count() > 0) return true;
        return false;
    }
};

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("--mode", o.mode, "Optimality criterion")
        ->check(CLI::IsMember({"stationary", "occupancy"}))
        ->capture_default_str();
    o.seed_options.push_back(sub->add_option("--seed", o.seed, "Random seed")->capture_default_str());
    sub->add_option("--jobs", o.jobs, "Worker count for parallel library calls")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_flag("--strict", o.strict, "Unmet objectives or failed transfer exit with code 4");
    sub->add_option("--out", o.out, "Write the report here instead of stdout");
    sub->add_flag("--no-timing", o.no_timing, "Omit wall_time_ms from the report");
}

// Tracks the documents a command reads so the report can list their digests.
class Inputs {
public:
    Document load(const std::string& role, const std::string& path) {
        auto doc = io::read_document(path);
        list_.push_back({{"role", role}, {"path", path}, {"sha256", sha256_hex(doc.text)}});
        return doc;
    }

    const json& list() const { return list_; }

private:
    json list_ = json::array();
};

// Runs a schema conversion and anchors InvalidInput to the offending line.
template <typename F>
auto parse_as(const Document& doc, F&& convert) -> decltype(convert(doc.value)) {
    try {
        return convert(doc.value);
    } catch (const InvalidInput& e) {
        const int line = io::locate_field(doc.text, e.field());
        std::string where = doc.path + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": ";
        throw InvalidInput(where + e.what(), e.field());
    }
}

TabularMdp load_mdp(Inputs& inputs, const std::string& role, const std::string& path) {
    return parse_as(inputs.load(role, path), io::mdp_from_json);
}

TabularPolicy load_policy(Inputs& inputs, const std::string& path, const TabularMdp& mdp) {
    auto pi = parse_as(inputs.load("policy", path), io::policy_from_json);
    if (pi.state_count() != mdp.state_count() || pi.action_count() != mdp.action_count())
        throw InvalidInput(path + ": policy shape does not match the MDP", "probs");
    return pi;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + path + "'", "out");
    f << text;
}

struct Outcome {
    json result;
    int code = kOk;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact analysis of MDP reductions, alignments and policy adaptation", "mdpalign"};
    app.require_subcommand(1);
    CommonOptions o;
    std::function<Outcome(Inputs&, CriterionMode)> command;

    // solve
    std::string mdp_path;
    std::optional<double> gamma_override;
    auto* solve_cmd = app.add_subcommand("solve", "Solve an MDP: values, greedy sets, O table");
    solve_cmd->add_option("mdp", mdp_path, "MDP JSON")->required();
    solve_cmd->add_option("--gamma-override", gamma_override, "Replace the discount factor");
    add_common(solve_cmd, o);
    solve_cmd->callback([&] {
        command = [&](Inputs& in, CriterionMode mode) {
            auto mdp = load_mdp(in, "mdp", mdp_path);
            if (gamma_override) {
                mdp.gamma = *gamma_override;
                mdp.validate();
            }
            const auto opt = solve_optimal(mdp, mode);
            return Outcome{{{"optimality", io::to_json(opt)},
                            {"optimal_return", optimal_value(mdp, opt)},
                            {"covering_policy", io::to_json(covering_policy(opt))}}};
        };
    });

    // verify
    std::string mx_path, my_path, map_path;
    auto* verify_cmd = app.add_subcommand("verify", "Check a reduction (phi, psi) from M_x to M_y");
    verify_cmd->add_option("mx", mx_path, "M_x JSON")->required();
    verify_cmd->add_option("my", my_path, "M_y JSON")->required();
    verify_cmd->add_option("map", map_path, "Reduction JSON {phi, psi}")->required();
    add_common(verify_cmd, o);
    verify_cmd->callback([&] {
        command = [&](Inputs& in, CriterionMode mode) {
            const auto x = solve(load_mdp(in, "mx", mx_path), mode);
            const auto y = solve(load_mdp(in, "my", my_path), mode);
            const auto r = parse_as(in.load("map", map_path), io::reduction_from_json);
            const auto report = verify_reduction(x, y, r);
            return Outcome{{{"reduction", io::to_json(r)}, {"violations", io::to_json(report)}},
                           report.empty() ? kOk : kVerificationFailed};
        };
    });

    // adapt
    std::string policy_path;
    auto* adapt_cmd = app.add_subcommand("adapt", "Adapt a y-policy to M_x through (f, g)");
    adapt_cmd->add_option("my", my_path, "M_y JSON")->required();
    adapt_cmd->add_option("map", map_path, "Alignment {f, g} or reduction {phi, psi} JSON")->required();
    adapt_cmd->add_option("mx", mx_path, "M_x JSON")->required();
    adapt_cmd->add_option("--policy", policy_path, "y-policy JSON (default: covering policy of M_y)");
    add_common(adapt_cmd, o);
    adapt_cmd->callback([&] {
        command = [&](Inputs& in, CriterionMode mode) {
            const auto y = solve(load_mdp(in, "my", my_path), mode);
            const auto x = solve(load_mdp(in, "mx", mx_path), mode);
            const auto doc = in.load("map", map_path);
            AlignmentMaps maps;
            if (doc.value.is_object() && doc.value.contains("phi")) {
                const auto r = parse_as(doc, io::reduction_from_json);
                maps = alignment_from_reduction(r, x.mdp.action_count(), y.opt);
            } else {
                maps = parse_as(doc, io::alignment_from_json);
            }
            const auto pi_y = policy_path.empty() ? covering_policy(y.opt) : load_policy(in, policy_path, y.mdp);
            const auto pi_x = adapt_policy(pi_y, maps, x.mdp.action_count());
            const double optimal = optimal_value(x.mdp, x.opt);
            const double adapted = policy_value(x.mdp, pi_x);
            json result{{"maps", io::to_json(maps)},
                        {"adapted_policy", io::to_json(pi_x)},
                        {"optimal_return", optimal},
                        {"adapted_return", adapted},
                        {"suboptimality_gap", optimal - adapted}};
            try {
                result["objectives"] = io::to_json(evaluate_objectives(x, y, maps, pi_y));
            } catch (const ComputeError& e) {
                result["objectives"] = nullptr;
                result["objectives_error"] = e.what();
            }
            return Outcome{result};
        };
    });

    // align
    std::string cfg_path, trace_path, maps_out;
    auto* align_cmd = app.add_subcommand("align", "Search for an alignment by simulated annealing");
    align_cmd->add_option("mx", mx_path, "M_x JSON")->required();
    align_cmd->add_option("my", my_path, "M_y JSON")->required();
    align_cmd->add_option("config", cfg_path, "Search config JSON (default settings when omitted)");
    align_cmd->add_option("--policy", policy_path, "y-policy JSON (default: covering policy of M_y)");
    align_cmd->add_option("--trace", trace_path, "Write the loss trace as CSV");
    align_cmd->add_option("--maps-out", maps_out, "Write the best alignment {f, g} as JSON");
    add_common(align_cmd, o);
    align_cmd->callback([&] {
        command = [&](Inputs& in, CriterionMode mode) {
            const auto x = solve(load_mdp(in, "mx", mx_path), mode);
            const auto y = solve(load_mdp(in, "my", my_path), mode);
            SearchConfig cfg;
            if (!cfg_path.empty()) cfg = parse_as(in.load("config", cfg_path), io::search_config_from_json);
            if (o.seed_given() || cfg_path.empty()) cfg.rng_seed = o.seed;
            cfg.jobs = o.jobs;
            const auto pi_y = policy_path.empty() ? covering_policy(y.opt) : load_policy(in, policy_path, y.mdp);
            const auto res = search_alignment(x, y, pi_y, cfg);
            if (!trace_path.empty()) {
                std::ostringstream csv;
                io::write_csv(csv, res.trace);
                write_text(trace_path, csv.str());
            }
            if (!maps_out.empty()) write_text(maps_out, io::to_json(res.maps).dump(2) + "\n");
            json result{{"maps", io::to_json(res.maps)},
                        {"score", io::to_json(res.score)},
                        {"loss", res.loss},
                        {"degenerate", res.degenerate},
                        {"restart", res.restart},
                        {"iterations", res.trace.size()},
                        {"g_injective", res.maps.g_injective()},
                        {"config", io::to_json(cfg)}};
            const bool met = res.score.both_met();
            return Outcome{result, o.strict && !met ? kVerificationFailed : kOk};
        };
    });

    // enumerate
    auto* enum_cmd = app.add_subcommand("enumerate", "List every reduction from M_x to M_y");
    enum_cmd->add_option("mx", mx_path, "M_x JSON")->required();
    enum_cmd->add_option("my", my_path, "M_y JSON")->required();
    add_common(enum_cmd, o);
    enum_cmd->callback([&] {
        command = [&](Inputs& in, CriterionMode mode) {
            const auto x = solve(load_mdp(in, "mx", mx_path), mode);
            const auto y = solve(load_mdp(in, "my", my_path), mode);
            json list = json::array();
            for (const auto& r : enumerate_reductions(x, y)) list.push_back(io::to_json(r));
            return Outcome{{{"count", list.size()}, {"reductions", list}}};
        };
    });

    // maximal
    auto* max_cmd = app.add_subcommand("maximal", "Maximal self-reduction (coarsest quotient) of an MDP");
    max_cmd->add_option("mdp", mdp_path, "MDP JSON")->required();
    add_common(max_cmd, o);
    max_cmd->callback([&] {
        command = [&](Inputs& in, CriterionMode mode) {
            const auto m = solve(load_mdp(in, "mdp", mdp_path), mode);
            const auto res = maximal_reduction(m, o.seed);
            return Outcome{{{"quotient", io::to_json(res.quotient.mdp)},
                            {"quotient_optimality", io::to_json(res.quotient.opt)},
                            {"reduction", io::to_json(res.r)},
                            {"states_before", m.mdp.state_count()},
                            {"states_after", res.quotient.mdp.state_count()},
                            {"actions_before", m.mdp.action_count()},
                            {"actions_after", res.quotient.mdp.action_count()}}};
        };
    });

    // transfer
    std::string taskset_path, cdnf_path;
    std::vector<std::string> target_paths;
    auto* transfer_cmd = app.add_subcommand("transfer", "Check transferability of a task set to a target pair");
    transfer_cmd->add_option("taskset", taskset_path, "Task set JSON {x_mdps, y_mdps}")->required();
    transfer_cmd->add_option("targets", target_paths, "Target M_x and M_y JSON files")->expected(0, 2);
    transfer_cmd->add_option("--cdnf", cdnf_path, "Use the CDNF-composed target {minterms}");
    add_common(transfer_cmd, o);
    transfer_cmd->callback([&] {
        command = [&](Inputs& in, CriterionMode mode) {
            const auto [xs, ys] = parse_as(in.load("taskset", taskset_path), io::taskset_from_json);
            const auto ts = make_task_set(xs, ys, mode);
            TaskPair target;
            std::string kind;
            if (!cdnf_path.empty()) {
                if (!target_paths.empty()) throw InvalidInput("give either target files or --cdnf, not both", "targets");
                const auto b = parse_as(in.load("cdnf", cdnf_path), io::cdnf_from_json);
                target = cdnf_target(ts, b);
                kind = "cdnf";
            } else {
                if (target_paths.size() != 2) throw InvalidInput("transfer needs two target files or --cdnf", "targets");
                target = {solve(load_mdp(in, "target_x", target_paths[0]), mode),
                          solve(load_mdp(in, "target_y", target_paths[1]), mode)};
                kind = "files";
            }
            const auto res = is_transferable(ts, target);
            auto result = io::to_json(res);
            result["target"] = kind;
            return Outcome{result, o.strict && !res.transferable ? kVerificationFailed : kOk};
        };
    });

    // generate
    std::string spec_path, out_dir;
    auto* gen_cmd = app.add_subcommand("generate", "Generate a planted pair (M_x, M_y, reduction)");
    gen_cmd->add_option("spec", spec_path, "Plant spec JSON")->required();
    gen_cmd->add_option("out_dir", out_dir, "Directory for mx.json, my.json, planted.json")->required();
    add_common(gen_cmd, o);
    gen_cmd->callback([&] {
        command = [&](Inputs& in, CriterionMode mode) {
            auto spec = parse_as(in.load("spec", spec_path), io::plant_spec_from_json);
            if (o.seed_given()) spec.rng_seed = o.seed;
            spec.mode = mode;
            const auto pair = generate_planted(spec);
            fs::create_directories(out_dir);
            json files = json::array();
            auto emit = [&](const std::string& name, const json& j) {
                const auto path = (fs::path(out_dir) / name).string();
                const auto text = j.dump(2) + "\n";
                write_text(path, text);
                files.push_back({{"path", path}, {"sha256", sha256_hex(text)}});
            };
            emit("mx.json", io::to_json(pair.mx));
            emit("my.json", io::to_json(pair.my));
            emit("planted.json", io::to_json(pair.planted));
            return Outcome{{{"spec", io::to_json(spec)}, {"planted", io::to_json(pair.planted)}, {"files", files}}};
        };
    });

    // simulate
    int steps = 1000;
    int horizon = -1;
    std::vector<std::uint64_t> seeds;
    std::string rollout_csv, sequences_out;
    auto* sim_cmd = app.add_subcommand("simulate", "Roll out a policy; empirical and exact triplet distributions");
    sim_cmd->add_option("mdp", mdp_path, "MDP JSON")->required();
    sim_cmd->add_option("policy", policy_path, "Policy JSON (default: covering policy)");
    sim_cmd->add_option("-N,--steps", steps, "Transitions per rollout")->check(CLI::PositiveNumber)->capture_default_str();
    sim_cmd->add_option("--seeds", seeds, "Rollout seeds (default: --seed)");
    sim_cmd->add_option("--rollout-csv", rollout_csv, "Write the first rollout as CSV");
    sim_cmd->add_option("--horizon", horizon, "Exact sequence distribution up to this horizon")
        ->check(CLI::Range(0, kMaxSequenceHorizon));
    sim_cmd->add_option("--sequences-out", sequences_out, "Write the sequence distribution as JSON lines");
    add_common(sim_cmd, o);
    sim_cmd->callback([&] {
        command = [&](Inputs& in, CriterionMode mode) {
            const auto m = solve(load_mdp(in, "mdp", mdp_path), mode);
            const auto pi = policy_path.empty() ? covering_policy(m.opt) : load_policy(in, policy_path, m.mdp);
            if (seeds.empty()) seeds.push_back(o.seed);
            const auto empirical = empirical_triplet(m.mdp, pi, steps, seeds);
            json result{{"steps", steps}, {"seeds", seeds}, {"empirical", io::to_json(empirical)}};
            try {
                const auto exact = stationary_triplet(m.mdp, pi);
                result["exact"] = io::to_json(exact);
                result["tv_to_exact"] = tv_distance(empirical, exact);
            } catch (const MultichainError& e) {
                result["exact"] = nullptr;
                result["exact_error"] = e.what();
            }
            if (!rollout_csv.empty()) {
                std::ostringstream csv;
                io::write_csv(csv, rollout(m.mdp, pi, steps, seeds.front()));
                write_text(rollout_csv, csv.str());
            }
            if (horizon >= 0) {
                const auto seq = sequence_distribution(m.mdp, pi, horizon);
                result["sequence_count"] = seq.mass.size();
                if (!sequences_out.empty()) {
                    std::ostringstream lines;
                    io::write_jsonl(lines, seq);
                    write_text(sequences_out, lines.str());
                }
            }
            return Outcome{result};
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        Inputs inputs;
        const auto mode = parse_mode(o.mode);
        const auto outcome = command(inputs, mode);
        json report;
        report["command"] = app.get_subcommands().front()->get_name();
        report["args"] = args;
        report["inputs"] = inputs.list();
        report["seed"] = o.seed;
        report["mode"] = o.mode;
        report["result"] = outcome.result;
        report["exit_code"] = outcome.code;
        if (!o.no_timing) {
            const auto elapsed = std::chrono::steady_clock::now() - start;
            report["wall_time_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
        }
        const auto text = report.dump(2) + "\n";
        if (o.out.empty())
            out << text;
        else
            write_text(o.out, text);
        return outcome.code;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const ComputeError& e) {
        err << "error: " << e.what() << '\n';
        return kComputeError;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kComputeError;
    }
}

} // namespace mdpalign::cli
