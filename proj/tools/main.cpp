// qadse command-line tool: oracle dataset generation, surrogate fitting,
// design-space sweeps, and accelerator/model co-exploration as reproducible
// batch runs. All randomness flows from explicit --seed flags; output bytes
// are independent of --jobs.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qadse/coexplore.hpp"
#include "qadse/csv.hpp"
#include "qadse/explorer.hpp"
#include "qadse/manifest.hpp"
#include "qadse/model.hpp"
#include "qadse/oracle.hpp"
#include "qadse/space.hpp"
#include "qadse/surrogate.hpp"

namespace fs = std::filesystem;
using namespace qadse;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file \"" + path.string() + "\"");
    out << bytes;
}

// --nets accepts files and directories; directories contribute their *.json
// files in name order.
std::vector<std::string> collect_net_files(const std::vector<std::string>& args) {
    std::vector<std::string> files;
    for (const std::string& arg : args) {
        if (fs::is_directory(arg)) {
            std::vector<std::string> dir_files;
            for (const auto& entry : fs::directory_iterator(arg))
                if (entry.is_regular_file() && entry.path().extension() == ".json")
                    dir_files.push_back(entry.path().string());
            std::sort(dir_files.begin(), dir_files.end());
            files.insert(files.end(), dir_files.begin(), dir_files.end());
        } else if (fs::exists(arg)) {
            files.push_back(arg);
        } else {
            throw ValidationError("network path \"" + arg + "\" does not exist");
        }
    }
    if (files.empty()) throw ValidationError("no network files found");
    return files;
}

std::vector<NetworkConfig> load_networks(const std::vector<std::string>& files) {
    std::vector<NetworkConfig> nets;
    for (const std::string& f : files) nets.push_back(load_network(slurp(f)));
    return nets;
}

OracleParams load_params_or_defaults(const std::string& path, RunManifest& manifest) {
    if (path.empty()) return OracleParams::defaults();
    manifest.add_input(path);
    return load_oracle_params(slurp(path));
}

std::string model_file_name(const std::string& target, PeType pe) {
    return target + "_" + to_string(pe) + ".model.json";
}

SurrogateBundle load_bundle(const std::string& dir, const std::vector<PeType>& pe_types,
                            RunManifest& manifest) {
    SurrogateBundle bundle;
    for (PeType pe : pe_types) {
        const auto t = static_cast<std::size_t>(pe);
        for (const char* target : {"power", "area", "latency"}) {
            const fs::path path = fs::path(dir) / model_file_name(target, pe);
            if (!fs::exists(path))
                throw ValidationError("missing model file \"" + path.string() +
                                      "\" for pe_type " + to_string(pe));
            manifest.add_input(path.string());
            PolySurrogate model = load_surrogate(slurp(path.string()));
            if (std::string(target) == "power") bundle.power[t] = std::move(model);
            else if (std::string(target) == "area") bundle.area[t] = std::move(model);
            else bundle.latency[t] = std::move(model);
        }
    }
    return bundle;
}

void write_manifest(const fs::path& out_dir, RunManifest& manifest) {
    std::sort(manifest.outputs.begin(), manifest.outputs.end());
    spill(out_dir / "manifest.json", manifest.to_json());
}

std::string format_report_json(const FitReport& report, const PolySurrogate& model) {
    nlohmann::ordered_json j;
    j["chosen_K"] = report.chosen_K;
    j["degrees"] = nlohmann::ordered_json::array();
    for (const DegreeEntry& e : report.degrees) {
        nlohmann::ordered_json d;
        d["K"] = e.K;
        if (e.skipped) {
            d["skipped"] = true;
            d["note"] = e.note;
        } else {
            d["cv_mape_percent"] = e.cv_mape;
            d["cv_rmspe_percent"] = e.cv_rmspe;
        }
        j["degrees"].push_back(d);
    }
    if (std::isfinite(report.heldout_mape)) {
        j["heldout_mape_percent"] = report.heldout_mape;
        j["heldout_rmspe_percent"] = report.heldout_rmspe;
    }
    if (!report.note.empty()) j["note"] = report.note;
    j["design_rank"] = model.design_rank;
    j["rank_deficient"] = model.rank_deficient;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

struct OracleGenArgs {
    std::string space_file, params_file, out_dir;
    std::vector<std::string> nets;
    std::uint64_t seed = 0;
    std::uint64_t max_configs = 0;
};

int cmd_oracle_gen(const OracleGenArgs& args) {
    RunManifest manifest;
    manifest.command = "oracle-gen";
    manifest.seed = args.seed;
    manifest.add_input(args.space_file);

    const ConfigSpaceSpec space = parse_space(slurp(args.space_file));
    const std::vector<std::string> net_files = collect_net_files(args.nets);
    for (const std::string& f : net_files) manifest.add_input(f);
    const std::vector<NetworkConfig> nets = load_networks(net_files);
    const OracleParams params = load_params_or_defaults(args.params_file, manifest);

    manifest.parameters["space"] = args.space_file;
    manifest.parameters["max_configs"] =
        args.max_configs ? std::to_string(args.max_configs) : "all";

    fs::create_directories(args.out_dir);
    const fs::path out_dir(args.out_dir);

    // One power/area/latency file per PE type present in the space.
    std::array<std::ofstream, 4> power_files, area_files, latency_files;
    DatasetSinks sinks;
    for (PeType pe : space.pe_types) {
        const auto t = static_cast<std::size_t>(pe);
        const std::string suffix = std::string(to_string(pe)) + ".csv";
        for (auto [kind, files, sink] :
             {std::tuple{"power_", &power_files, sinks.power.data()},
              std::tuple{"area_", &area_files, sinks.area.data()},
              std::tuple{"latency_", &latency_files, sinks.latency.data()}}) {
            const std::string name = kind + suffix;
            (*files)[t].open(out_dir / name, std::ios::binary);
            if (!(*files)[t])
                throw ValidationError("cannot write \"" + (out_dir / name).string() + "\"");
            sink[t] = &(*files)[t];
            manifest.outputs.push_back(name);
        }
    }

    const DatasetStats stats = gen_dataset(
        space, nets, params, args.seed,
        args.max_configs ? std::optional<std::uint64_t>(args.max_configs) : std::nullopt,
        sinks);

    write_manifest(out_dir, manifest);
    std::uint64_t latency_rows = 0;
    for (auto r : stats.latency_rows) latency_rows += r;
    std::cout << "configs used: " << stats.configs_used
              << " (skipped " << stats.configs_skipped << " invalid combos)\n"
              << "latency rows: " << latency_rows << "\n"
              << "wrote " << manifest.outputs.size() << " dataset files + manifest to "
              << args.out_dir << "\n";
    return 0;
}

struct FitArgs {
    std::string data_dir, target, pe, out_dir;
    std::vector<int> k_range;
    int degree = -1;
    int folds = 5;
    std::uint64_t seed = 0;
};

int cmd_fit(const FitArgs& args) {
    RunManifest manifest;
    manifest.command = "fit";
    manifest.seed = args.seed;

    const PeType pe = pe_type_from_string(args.pe);
    if (args.target != "power" && args.target != "area" && args.target != "latency")
        throw ValidationError("target must be power, area or latency");

    const fs::path data_file =
        fs::path(args.data_dir) / (args.target + "_" + to_string(pe) + ".csv");
    if (!fs::exists(data_file))
        throw ValidationError("dataset file \"" + data_file.string() + "\" not found");
    manifest.add_input(data_file.string());

    std::ifstream in(data_file, std::ios::binary);
    const FeatureTable table = read_feature_csv(in);
    const int d = static_cast<int>(table.columns.size()) - 1;

    std::vector<int> k_range = args.k_range;
    if (k_range.empty()) {
        // Latency has a 14-dim feature space, so cross-validating high
        // degrees over large datasets gets expensive fast; the default range
        // stops at 2 and --k-range raises it.
        const int hi = args.target == "latency" ? 2 : 5;
        for (int k = 1; k <= hi; ++k) k_range.push_back(k);
    }

    FitReport report;
    int chosen = args.degree;
    if (args.degree > 0) {
        // Forced degree: still hold out 20% for an error estimate when the
        // dataset is large enough to cross-validate at that degree.
        try {
            auto [_, forced_report] =
                select_degree(table.features, table.targets, {args.degree}, args.folds,
                              args.seed);
            report = forced_report;
        } catch (const ValidationError&) {
            report.chosen_K = args.degree;
            report.heldout_mape = std::numeric_limits<double>::quiet_NaN();
            report.heldout_rmspe = std::numeric_limits<double>::quiet_NaN();
        }
        report.note = "degree forced by --degree";
    } else {
        auto [k, sel_report] = select_degree(table.features, table.targets, k_range,
                                             args.folds, args.seed);
        chosen = k;
        report = sel_report;
    }

    const PolySurrogate model = fit(table.features, table.targets,
                                    build_basis(d, chosen), args.target, pe);

    manifest.parameters["target"] = args.target;
    manifest.parameters["pe_type"] = to_string(pe);
    manifest.parameters["folds"] = std::to_string(args.folds);
    if (args.degree > 0) {
        manifest.parameters["degree"] = std::to_string(args.degree);
    } else {
        std::string range;
        for (int k : k_range) range += (range.empty() ? "" : ",") + std::to_string(k);
        manifest.parameters["k_range"] = range;
    }
    manifest.parameters["chosen_K"] = std::to_string(chosen);

    fs::create_directories(args.out_dir);
    const fs::path out_dir(args.out_dir);
    const std::string model_name = model_file_name(args.target, pe);
    const std::string report_name = args.target + "_" + to_string(pe) + ".report.json";
    spill(out_dir / model_name, serialize(model));
    spill(out_dir / report_name, format_report_json(report, model));
    manifest.outputs.push_back(model_name);
    manifest.outputs.push_back(report_name);
    write_manifest(out_dir, manifest);

    std::cout << "chosen degree K = " << chosen;
    if (std::isfinite(report.heldout_mape))
        std::cout << " (held-out MAPE " << report.heldout_mape << "%, RMSPE "
                  << report.heldout_rmspe << "%)";
    std::cout << "\nwrote " << model_name << " and " << report_name << " to "
              << args.out_dir << "\n";
    return 0;
}

struct PredictArgs {
    std::string model_file, features, csv_file, out_file;
};

int cmd_predict(const PredictArgs& args) {
    const PolySurrogate model = load_surrogate(slurp(args.model_file));
    std::vector<std::vector<double>> rows;
    if (!args.features.empty()) {
        std::istringstream in(args.features);
        std::string cell;
        std::vector<double> row;
        while (std::getline(in, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ValidationError("non-numeric feature \"" + cell + "\"");
            }
        }
        rows.push_back(std::move(row));
    } else if (!args.csv_file.empty()) {
        std::ifstream in(args.csv_file, std::ios::binary);
        if (!in) throw ValidationError("cannot read \"" + args.csv_file + "\"");
        const FeatureTable table = read_feature_csv(in);
        rows = table.features;
    } else {
        throw ValidationError("predict needs --features or --csv");
    }

    std::ostringstream out;
    for (const auto& row : rows) out << format_g9(model.predict(row)) << "\n";
    if (!args.out_file.empty()) {
        spill(args.out_file, out.str());
    } else {
        std::cout << out.str();
    }
    return 0;
}

// Flag misuse distinct from data errors; maps to exit code 1.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SweepArgs {
    std::string space_file, params_file, models_dir, out_dir;
    std::vector<std::string> nets;
    bool use_oracle = false;
    bool global_reference = false;
    int jobs = 1;
    std::uint64_t seed = 0;
};

int cmd_sweep(const SweepArgs& args) {
    RunManifest manifest;
    manifest.command = "sweep";
    manifest.seed = args.seed;
    manifest.add_input(args.space_file);

    const ConfigSpaceSpec space = parse_space(slurp(args.space_file));
    const std::vector<std::string> net_files = collect_net_files(args.nets);
    for (const std::string& f : net_files) manifest.add_input(f);
    const std::vector<NetworkConfig> nets = load_networks(net_files);

    CostSource source = args.use_oracle
        ? CostSource::from_oracle(load_params_or_defaults(args.params_file, manifest))
        : CostSource::from_surrogate(load_bundle(args.models_dir, space.pe_types, manifest));

    manifest.parameters["space"] = args.space_file;
    manifest.parameters["source"] = source.name();
    manifest.parameters["reference"] = args.global_reference ? "global" : "per-net";

    const bool has_int16 =
        std::find(space.pe_types.begin(), space.pe_types.end(), PeType::INT16) !=
        space.pe_types.end();
    const SweepResult result =
        sweep(space, nets, source, args.jobs, has_int16, args.global_reference);

    fs::create_directories(args.out_dir);
    const fs::path out_dir(args.out_dir);
    spill(out_dir / "results.csv", sweep_results_csv(result));
    spill(out_dir / "pareto.csv", sweep_pareto_csv(result));
    spill(out_dir / "summary.csv", sweep_summary_csv(result));
    manifest.outputs = {"results.csv", "pareto.csv", "summary.csv"};
    write_manifest(out_dir, manifest);

    std::cout << "evaluated " << result.points.size() << " (config, net) points ("
              << result.skipped << " invalid combos skipped)\n";
    for (const auto& [net, front] : result.fronts)
        std::cout << "pareto front for " << net << ": " << front.size() << " points\n";
    std::cout << "wrote results.csv, pareto.csv, summary.csv + manifest to "
              << args.out_dir << "\n";
    return 0;
}

struct CoexploreArgs {
    std::string cfg_space_file, params_file, models_dir, accuracy_file, out_dir;
    std::uint64_t n_archs = 1000;
    std::uint64_t n_cfgs = 64;
    int input_a = 32;
    bool use_oracle = false;
    int jobs = 1;
    std::uint64_t seed = 0;
};

int cmd_coexplore(const CoexploreArgs& args) {
    RunManifest manifest;
    manifest.command = "coexplore";
    manifest.seed = args.seed;
    manifest.add_input(args.cfg_space_file);

    const ConfigSpaceSpec cfg_space = parse_space(slurp(args.cfg_space_file));
    const ArchSpace arch_space = ArchSpace::default_space();

    CostSource source = args.use_oracle
        ? CostSource::from_oracle(load_params_or_defaults(args.params_file, manifest))
        : CostSource::from_surrogate(
              load_bundle(args.models_dir, cfg_space.pe_types, manifest));

    AccuracyProvider provider = AccuracyProvider::synthetic();
    if (!args.accuracy_file.empty()) {
        manifest.add_input(args.accuracy_file);
        provider = AccuracyProvider::from_table_csv(slurp(args.accuracy_file));
    }

    manifest.parameters["cfg_space"] = args.cfg_space_file;
    manifest.parameters["n_archs"] = std::to_string(args.n_archs);
    manifest.parameters["n_cfgs"] = std::to_string(args.n_cfgs);
    manifest.parameters["input_a"] = std::to_string(args.input_a);
    manifest.parameters["accuracy"] =
        args.accuracy_file.empty() ? "synthetic" : args.accuracy_file;
    manifest.parameters["source"] = source.name();

    std::cout << "architecture space size: " << arch_space.size() << "\n";
    const CoexploreResult result =
        coexplore(arch_space, cfg_space, args.n_archs, args.n_cfgs, provider, source,
                  args.seed, args.jobs, args.input_a);

    fs::create_directories(args.out_dir);
    const fs::path out_dir(args.out_dir);
    spill(out_dir / "coexplore.csv", coexplore_results_csv(result));
    manifest.outputs = {"coexplore.csv"};
    write_manifest(out_dir, manifest);

    std::cout << "evaluated " << result.points.size() << " (config, arch) pairs\n"
              << "energy/error front: " << result.front_energy.size() << " points, "
              << "area/error front: " << result.front_area.size() << " points\n"
              << "wrote coexplore.csv + manifest to " << args.out_dir << "\n";
    return 0;
}

struct ReportArgs {
    std::string dir;
};

int cmd_report(const ReportArgs& args) {
    const fs::path manifest_path = fs::path(args.dir) / "manifest.json";
    if (!fs::exists(manifest_path))
        throw ValidationError("no manifest.json in \"" + args.dir + "\"");
    const auto j = nlohmann::ordered_json::parse(slurp(manifest_path.string()));
    std::cout << "command: " << j.value("command", "?") << " (qadse "
              << j.value("version", "?") << ")\n"
              << "seed: " << j.value("seed", 0) << "\n";
    if (j.contains("parameters"))
        for (const auto& [k, v] : j.at("parameters").items())
            std::cout << "  " << k << " = " << v.get<std::string>() << "\n";
    if (j.contains("inputs"))
        for (const auto& e : j.at("inputs"))
            std::cout << "input: " << e.value("path", "?") << " (fnv1a64 "
                      << e.value("fnv1a64", "?") << ")\n";
    if (j.contains("outputs"))
        for (const auto& o : j.at("outputs")) {
            const fs::path p = fs::path(args.dir) / o.get<std::string>();
            std::cout << "output: " << o.get<std::string>();
            if (fs::exists(p)) std::cout << " (" << fs::file_size(p) << " bytes)";
            else std::cout << " (missing)";
            std::cout << "\n";
        }
    const fs::path summary = fs::path(args.dir) / "summary.csv";
    if (fs::exists(summary)) {
        std::cout << "\nsummary.csv:\n" << slurp(summary.string());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qadse: quantization-aware DNN accelerator design-space exploration"};
    app.require_subcommand(1);

    OracleGenArgs og;
    auto* gen = app.add_subcommand("oracle-gen",
                                   "Generate characterization datasets from the cost oracle");
    gen->add_option("--space", og.space_file, "design space JSON")->required();
    gen->add_option("--nets", og.nets, "network JSON files or directories")->required();
    gen->add_option("--params", og.params_file, "oracle params JSON (default: built-in)");
    gen->add_option("--seed", og.seed, "random seed");
    gen->add_option("--max-configs", og.max_configs,
                    "sample this many valid configs (default: all)");
    gen->add_option("--out", og.out_dir, "output directory")->required();

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a polynomial surrogate to a dataset");
    fit_cmd->add_option("--data", fa.data_dir, "dataset directory (from oracle-gen)")
        ->required();
    fit_cmd->add_option("--target", fa.target, "power | area | latency")->required();
    fit_cmd->add_option("--pe", fa.pe, "PE type (FP32, INT16, LightPE2, LightPE1)")
        ->required();
    fit_cmd->add_option("--k-range", fa.k_range, "candidate degrees (default 1..5, latency 1..2)");
    fit_cmd->add_option("--degree", fa.degree, "force this degree, skipping selection");
    fit_cmd->add_option("--folds", fa.folds, "cross-validation folds (default 5)");
    fit_cmd->add_option("--seed", fa.seed, "random seed");
    fit_cmd->add_option("--out", fa.out_dir, "output directory")->required();

    PredictArgs pa;
    auto* pred = app.add_subcommand("predict", "Evaluate a saved surrogate model");
    pred->add_option("--model", pa.model_file, "model JSON file")->required();
    pred->add_option("--features", pa.features, "comma-separated feature vector");
    pred->add_option("--csv", pa.csv_file, "feature CSV (last column ignored as target)");
    pred->add_option("--out", pa.out_file, "write predictions here instead of stdout");

    SweepArgs sa;
    auto* sw = app.add_subcommand("sweep", "Evaluate a design space against networks");
    sw->add_option("--space", sa.space_file, "design space JSON")->required();
    sw->add_option("--nets", sa.nets, "network JSON files or directories")->required();
    sw->add_flag("--oracle", sa.use_oracle, "evaluate with the cost oracle");
    sw->add_option("--params", sa.params_file, "oracle params JSON");
    sw->add_option("--models", sa.models_dir, "directory of fitted models");
    sw->add_flag("--global-reference", sa.global_reference,
                 "normalize against one best-INT16 point across all nets "
                 "(default: per net)");
    sw->add_option("--jobs", sa.jobs, "worker threads (does not affect output bytes)");
    sw->add_option("--seed", sa.seed, "random seed (recorded in the manifest)");
    sw->add_option("--out", sa.out_dir, "output directory")->required();

    CoexploreArgs ca;
    auto* co = app.add_subcommand("coexplore",
                                  "Jointly explore accelerator configs and architectures");
    co->add_option("--cfg-space", ca.cfg_space_file, "accelerator space JSON")->required();
    co->add_option("--n-archs", ca.n_archs, "architectures to sample (default 1000)");
    co->add_option("--n-cfgs", ca.n_cfgs, "accelerator configs to sample (default 64, 0 = all)");
    co->add_option("--input-a", ca.input_a, "input feature map size (default 32)");
    co->add_flag("--oracle", ca.use_oracle, "evaluate with the cost oracle");
    co->add_option("--params", ca.params_file, "oracle params JSON");
    co->add_option("--models", ca.models_dir, "directory of fitted models");
    co->add_option("--accuracy", ca.accuracy_file,
                   "accuracy table CSV (default: synthetic curve)");
    co->add_option("--jobs", ca.jobs, "worker threads (does not affect output bytes)");
    co->add_option("--seed", ca.seed, "random seed");
    co->add_option("--out", ca.out_dir, "output directory")->required();

    ReportArgs ra;
    auto* rep = app.add_subcommand("report", "Summarize a run directory");
    rep->add_option("--dir", ra.dir, "run directory containing manifest.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_oracle_gen(og);
        if (fit_cmd->parsed()) return cmd_fit(fa);
        if (pred->parsed()) return cmd_predict(pa);
        if (sw->parsed()) {
            if (sa.use_oracle == !sa.models_dir.empty())
                throw UsageError("sweep needs exactly one of --oracle or --models");
            return cmd_sweep(sa);
        }
        if (co->parsed()) {
            if (ca.use_oracle == !ca.models_dir.empty())
                throw UsageError("coexplore needs exactly one of --oracle or --models");
            return cmd_coexplore(ca);
        }
        if (rep->parsed()) return cmd_report(ra);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ArithmeticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
