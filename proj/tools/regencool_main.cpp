// Command-line front end: dataset generation, statistics, training,
// hyperparameter search, evaluation, channel marching/prediction and heat-map
// export. Every run writes exactly one manifest next to its outputs; outputs
// are written to a temp file and renamed so failures leave nothing partial.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "regencool/channel.hpp"
#include "regencool/dataset.hpp"
#include "regencool/errors.hpp"
#include "regencool/kde.hpp"
#include "regencool/mlp.hpp"
#include "regencool/pipeline.hpp"
#include "regencool/property_table.hpp"
#include "regencool/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace regencool;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// temp-file-then-rename so no partial file survives an error
void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        writer(out);
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot move " + tmp.string() + " to " + path.string());
    }
}

// same guarantee for library savers that take a path
void atomic_save(const fs::path& path, const std::function<void(const fs::path&)>& saver) {
    const fs::path tmp = path.string() + ".tmp";
    try {
        saver(tmp);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " to " + path.string());
    }
}

struct ManifestWriter {
    json doc;
    std::map<std::string, double> timings;
    fs::path out_dir;
    double t_start = now_ms();

    ManifestWriter(const std::string& subcommand, const fs::path& dir) : out_dir(dir) {
        doc["tool"] = std::string("regencool ") + kVersion;
        doc["subcommand"] = subcommand;
        doc["config"] = json::object();
        doc["inputs"] = json::object();
        doc["outputs"] = json::array();
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + out_dir.string());
    }

    void output(const fs::path& p) { doc["outputs"].push_back(p.string()); }

    void write(const std::string& subcommand) {
        timings["total"] = now_ms() - t_start;
        doc["timings_ms"] = timings;
        atomic_write(out_dir / (subcommand + "_manifest.json"),
                     [&](std::ostream& out) { out << doc.dump(1) << "\n"; });
    }
};

PropertyTable resolve_table(const std::string& table_ref, std::optional<double> gas_constant) {
    if (table_ref == "pseudo") return make_pseudo_fluid();
    return load_table(table_ref, gas_constant);
}

HeatFluxProfile resolve_heat_flux(double q_const, const std::string& profile_path) {
    if (profile_path.empty()) return HeatFluxProfile::constant(q_const);
    std::ifstream in(profile_path);
    if (!in) throw IoError("cannot open heat flux profile " + profile_path);
    HeatFluxProfile p;
    p.breaks_mm.clear();
    p.q_w_m2.clear();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#' || line.rfind("z[", 0) == 0) continue;
        double z = 0.0, q = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &z, &q) != 2) {
            throw ParseError("heat flux profile: malformed line " + std::to_string(line_no));
        }
        p.breaks_mm.push_back(z);
        p.q_w_m2.push_back(q);
    }
    p.validate();
    return p;
}

struct GeometryFlags {
    double width = 1.5, height = 3.0, wall = 1.0, fin = 1.0, length = 250.0, roughness = 3.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--width", width, "channel width b [mm]");
        cmd->add_option("--height", height, "channel height [mm]");
        cmd->add_option("--wall", wall, "hot-gas wall thickness d [mm]");
        cmd->add_option("--fin", fin, "fin thickness [mm]");
        cmd->add_option("--length", length, "channel length [mm]");
        cmd->add_option("--rough", roughness, "surface roughness [um]");
    }

    ChannelGeometry geometry() const {
        return {width, height, wall, fin, length, roughness};
    }

    json to_json() const {
        return {{"width_mm", width},  {"height_mm", height},   {"wall_mm", wall},
                {"fin_mm", fin},      {"length_mm", length},   {"roughness_um", roughness}};
    }
};

struct MarchFlags {
    GeometryFlags geom;
    double mdot = 0.08, t_in = 150.0, q = 30e6, dz = 2.0;
    double p_in = 0.0, p_out = 0.0;
    std::string q_profile;

    void add_to(CLI::App* cmd) {
        geom.add_to(cmd);
        cmd->add_option("--mdot", mdot, "mass flow rate [kg/s]");
        cmd->add_option("--t-in", t_in, "inlet bulk temperature [K]");
        cmd->add_option("--p-in", p_in, "inlet pressure [Pa]");
        cmd->add_option("--p-out", p_out, "outlet pressure [Pa]");
        cmd->add_option("--q", q, "constant hot-gas heat flux [W/m2]");
        cmd->add_option("--q-profile", q_profile, "piecewise-constant q(z) CSV: z[mm],q[W/m2]");
        cmd->add_option("--dz", dz, "station spacing [mm]");
    }

    MarchConfig config() const {
        MarchConfig cfg;
        cfg.mdot = mdot;
        cfg.T_in = t_in;
        if (p_in > 0.0) cfg.p_in = p_in;
        if (p_out > 0.0) cfg.p_out = p_out;
        cfg.heat_flux = resolve_heat_flux(q, q_profile);
        cfg.dz_mm = dz;
        return cfg;
    }

    json to_json() const {
        json j = geom.to_json();
        j["mdot"] = mdot;
        j["T_in"] = t_in;
        j["p_in"] = p_in;
        j["p_out"] = p_out;
        j["q"] = q;
        j["q_profile"] = q_profile;
        j["dz_mm"] = dz;
        return j;
    }
};

void warn_envelope(const ChannelGeometry& geom) {
    for (const auto& w : geom.envelope_warnings()) std::cerr << "warning: " << w << "\n";
}

int cmd_generate(const std::string& table_spec, std::optional<double> gas_constant,
                 const GeneratorConfig& cfg, const fs::path& out_dir) {
    ManifestWriter manifest("generate", out_dir);
    manifest.doc["inputs"]["table"] = table_spec;
    manifest.doc["config"] = {{"n_channels", cfg.n_channels},
                              {"seed", cfg.rng_seed},
                              {"dz_mm", cfg.dz_mm},
                              {"channel_length_mm", cfg.channel_length_mm},
                              {"label_noise_std_K", cfg.label_noise_std_k},
                              {"near_critical_fraction", cfg.near_critical_fraction},
                              {"p_out_bar", {cfg.p_out_bar.lo, cfg.p_out_bar.hi}},
                              {"T_in_K", {cfg.t_in_k.lo, cfg.t_in_k.hi}},
                              {"roughness_um", {cfg.roughness_um.lo, cfg.roughness_um.hi}},
                              {"area_mm2", {cfg.area_mm2.lo, cfg.area_mm2.hi}},
                              {"aspect_ratio", {cfg.aspect_ratio.lo, cfg.aspect_ratio.hi}},
                              {"wall_thickness_mm",
                               {cfg.wall_thickness_mm.lo, cfg.wall_thickness_mm.hi}},
                              {"heat_flux_w_m2", {cfg.heat_flux_w_m2.lo, cfg.heat_flux_w_m2.hi}},
                              {"mass_flux", {cfg.mass_flux.lo, cfg.mass_flux.hi}}};
    manifest.doc["label_constants"] = {{"nusselt_coefficient", kNusseltCoefficient},
                                       {"roughness_gain", kRoughnessGain},
                                       {"roughness_exponent", kRoughnessExponent},
                                       {"solid_conductivity", kSolidConductivity}};

    const PropertyTable table = resolve_table(table_spec, gas_constant);
    const double t0 = now_ms();
    const GenerateOutcome outcome = generate(table, cfg);
    manifest.timings["generate"] = now_ms() - t0;
    manifest.doc["channels_generated"] = outcome.channels_generated;
    manifest.doc["channels_skipped"] = outcome.channels_skipped;
    manifest.doc["samples"] = outcome.dataset.size();

    const fs::path data_path = out_dir / "dataset.csv";
    atomic_write(data_path,
                 [&](std::ostream& out) { write_dataset_csv(out, outcome.dataset); });
    manifest.output(data_path);
    manifest.write("generate");
    std::cout << "generated " << outcome.dataset.size() << " samples from "
              << outcome.channels_generated << " channels (" << outcome.channels_skipped
              << " skipped) -> " << data_path.string() << "\n";
    return 0;
}

int cmd_stats(const fs::path& data_path, const fs::path& out_dir) {
    ManifestWriter manifest("stats", out_dir);
    manifest.doc["inputs"]["data"] = data_path.string();
    const Dataset ds = load_dataset(data_path);

    const auto stats = stats_summary(ds);
    const fs::path stats_path = out_dir / "stats.csv";
    atomic_write(stats_path, [&](std::ostream& out) {
        out << "column,mean,std,p1,p25,p50,p75,p99\n";
        char buf[256];
        for (const auto& st : stats) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          st.name.c_str(), st.mean, st.stddev, st.percentiles[0],
                          st.percentiles[1], st.percentiles[2], st.percentiles[3],
                          st.percentiles[4]);
            out << buf;
        }
    });
    manifest.output(stats_path);

    std::vector<std::string> columns(Dataset::kFieldNames.begin(), Dataset::kFieldNames.end());
    if (ds.has_labels()) columns.emplace_back(Dataset::kLabelName);
    const Matrix corr = correlation_matrix(ds, columns);
    const fs::path corr_path = out_dir / "correlation.csv";
    atomic_write(corr_path, [&](std::ostream& out) {
        for (const auto& c : columns) out << "," << c;
        out << "\n";
        char buf[64];
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << columns[i];
            for (std::size_t j = 0; j < columns.size(); ++j) {
                std::snprintf(buf, sizeof buf, ",%.17g", corr(i, j));
                out << buf;
            }
            out << "\n";
        }
    });
    manifest.output(corr_path);
    manifest.write("stats");
    std::cout << "stats for " << ds.size() << " samples -> " << stats_path.string() << ", "
              << corr_path.string() << "\n";
    return 0;
}

int cmd_train(const fs::path& data_path, const fs::path& out_dir, const HyperParams& hp,
              double val_fraction, std::uint64_t split_seed, const std::string& features_csv,
              const fs::path& importance_target) {
    ManifestWriter manifest("train", out_dir);
    manifest.doc["inputs"]["data"] = data_path.string();
    manifest.doc["config"] = {{"hidden_layers", hp.n_hidden_layers},
                              {"neurons", hp.neurons_per_layer},
                              {"alpha_l2", hp.alpha_l2},
                              {"minibatch", hp.minibatch_size},
                              {"epochs", hp.epochs},
                              {"learning_rate", hp.learning_rate},
                              {"seed", hp.rng_seed},
                              {"val_fraction", val_fraction},
                              {"split_seed", split_seed},
                              {"features", features_csv}};

    const Dataset ds = load_dataset(data_path);
    FeatureSpec spec = FeatureSpec::canonical();
    if (!features_csv.empty()) {
        spec.names.clear();
        std::stringstream ss(features_csv);
        std::string name;
        while (std::getline(ss, name, ',')) spec.names.push_back(name);
    }
    const auto [train_ds, val_ds] = split(ds, 1.0 - val_fraction, split_seed);

    std::vector<double> weights;
    if (!importance_target.empty()) {
        const Dataset target = load_dataset(importance_target);
        weights = kde_importance_weights(feature_matrix(train_ds, spec),
                                         feature_matrix(target, spec));
        manifest.doc["inputs"]["importance_target"] = importance_target.string();
    }

    const double t0 = now_ms();
    const TrainResult result = fit_model(train_ds, val_ds, spec, hp, weights);
    manifest.timings["train"] = now_ms() - t0;

    if (result.report.diverged) {
        manifest.doc["diverged"] = true;
        manifest.write("train");
        throw DivergenceError("train: cost became non-finite");
    }
    if (hp.epochs == 0) {
        std::cerr << "warning: --epochs 0 saves an initialized, untrained model\n";
    }

    const fs::path model_path = out_dir / "model.json";
    atomic_save(model_path,
                [&](const fs::path& p) { save_model(result.model, result.scaler, p); });
    manifest.output(model_path);

    const fs::path report_path = out_dir / "train_report.csv";
    atomic_write(report_path, [&](std::ostream& out) {
        out << "epoch,train_cost,val_mae[K],val_mae_std[K],epoch_ms\n";
        char buf[256];
        for (std::size_t e = 0; e < result.report.train_cost.size(); ++e) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", e + 1,
                          result.report.train_cost[e], result.report.val_mae[e],
                          result.report.val_mae_std[e], result.report.epoch_ms[e]);
            out << buf;
        }
    });
    manifest.output(report_path);

    char checksum[32];
    std::snprintf(checksum, sizeof checksum, "%016llx",
                  static_cast<unsigned long long>(result.report.weights_checksum));
    manifest.doc["weights_checksum"] = checksum;
    manifest.write("train");
    if (!result.report.val_mae.empty()) {
        std::printf("final val MAE %.2f K (std %.2f K) after %zu epochs\n",
                    result.report.val_mae.back(), result.report.val_mae_std.back(),
                    result.report.val_mae.size());
    }
    std::cout << "model -> " << model_path.string() << "\n";
    return 0;
}

int cmd_search(const fs::path& data_path, const fs::path& out_dir, const SearchSpace& space,
               int n_trials, double val_fraction, std::uint64_t seed, int workers) {
    ManifestWriter manifest("search", out_dir);
    manifest.doc["inputs"]["data"] = data_path.string();
    manifest.doc["config"] = {{"trials", n_trials},
                              {"seed", seed},
                              {"workers", workers},
                              {"val_fraction", val_fraction},
                              {"hidden_layers", {space.hidden_layers.lo, space.hidden_layers.hi}},
                              {"neurons", {space.neurons.lo, space.neurons.hi}},
                              {"alpha_l2", {space.alpha_l2.lo, space.alpha_l2.hi}},
                              {"learning_rate", {space.learning_rate.lo, space.learning_rate.hi}},
                              {"minibatch", {space.minibatch.lo, space.minibatch.hi}},
                              {"epochs", {space.epochs.lo, space.epochs.hi}}};

    const Dataset ds = load_dataset(data_path);
    const auto [train_ds, val_ds] = split(ds, 1.0 - val_fraction, seed);

    const double t0 = now_ms();
    const auto trials =
        random_search(space, n_trials, train_ds, val_ds, FeatureSpec::canonical(), seed, workers);
    manifest.timings["search"] = now_ms() - t0;

    const fs::path report_path = out_dir / "search_report.csv";
    atomic_write(report_path, [&](std::ostream& out) { write_search_csv(out, trials); });
    manifest.output(report_path);
    manifest.write("search");
    if (trials.front().failed) {
        std::cerr << "warning: every trial diverged; see " << report_path.string() << "\n";
    } else {
        std::printf("best of %d trials: val MAE %.2f K (%d hidden layers, %d neurons)\n",
                    n_trials, trials.front().val_mae, trials.front().hp.n_hidden_layers,
                    trials.front().hp.neurons_per_layer);
    }
    std::cout << "report -> " << report_path.string() << "\n";
    return 0;
}

int cmd_eval(const fs::path& data_path, const fs::path& model_path, const fs::path& out_dir) {
    ManifestWriter manifest("eval", out_dir);
    manifest.doc["inputs"]["data"] = data_path.string();
    manifest.doc["inputs"]["model"] = model_path.string();

    const Dataset ds = load_dataset(data_path);
    const auto [model, scaler] = load_model(model_path);
    const EvalMetrics m = evaluate(model, scaler, ds);

    manifest.doc["metrics"] = {{"mae_K", m.mae},
                               {"std_abs_err_K", m.std_abs_err},
                               {"mape", m.mape},
                               {"samples", m.n}};
    manifest.write("eval");
    std::printf("MAE %.2f K, std %.2f K, MAPE %.3f %% over %zu samples\n", m.mae, m.std_abs_err,
                100.0 * m.mape, m.n);
    return 0;
}

int cmd_march(const std::string& table_spec, std::optional<double> gas_constant,
              const MarchFlags& flags, const fs::path& out_dir) {
    ManifestWriter manifest("march", out_dir);
    manifest.doc["inputs"]["table"] = table_spec;
    manifest.doc["config"] = flags.to_json();

    const PropertyTable table = resolve_table(table_spec, gas_constant);
    const ChannelGeometry geom = flags.geom.geometry();
    warn_envelope(geom);
    const double t0 = now_ms();
    const auto stations = march(table, geom, flags.config());
    manifest.timings["march"] = now_ms() - t0;

    const fs::path csv_path = out_dir / "march.csv";
    atomic_write(csv_path, [&](std::ostream& out) { write_march_csv(out, stations, geom); });
    manifest.output(csv_path);
    manifest.doc["stations"] = stations.size();
    manifest.write("march");
    std::printf("marched %zu stations, outlet p %.4g Pa, outlet T_b %.2f K -> %s\n",
                stations.size(), stations.back().p, stations.back().T_b, csv_path.string().c_str());
    return 0;
}

int cmd_predict(const std::string& table_spec, std::optional<double> gas_constant,
                const MarchFlags& flags, const fs::path& model_path, const fs::path& out_dir) {
    ManifestWriter manifest("predict", out_dir);
    manifest.doc["inputs"]["table"] = table_spec;
    manifest.doc["inputs"]["model"] = model_path.string();
    manifest.doc["config"] = flags.to_json();

    const PropertyTable table = resolve_table(table_spec, gas_constant);
    const auto [model, scaler] = load_model(model_path);
    const ChannelGeometry geom = flags.geom.geometry();
    warn_envelope(geom);

    const double t0 = now_ms();
    const auto predictions = predict_channel(table, geom, flags.config(), model, scaler);
    const double elapsed = now_ms() - t0;
    manifest.timings["predict"] = elapsed;

    std::vector<FlowState> stations;
    std::vector<double> wall;
    stations.reserve(predictions.size());
    wall.reserve(predictions.size());
    for (const auto& [s, t_w] : predictions) {
        stations.push_back(s);
        wall.push_back(t_w);
    }
    const fs::path csv_path = out_dir / "predict.csv";
    atomic_write(csv_path, [&](std::ostream& out) { write_march_csv(out, stations, geom, &wall); });
    manifest.output(csv_path);
    manifest.doc["stations"] = stations.size();
    manifest.write("predict");
    std::printf("channel predicted in %.2f ms (%zu stations) -> %s\n", elapsed, stations.size(),
                csv_path.string().c_str());
    return 0;
}

int cmd_heatmap(const fs::path& model_path, const fs::path& out_dir, const std::string& x_feature,
                const std::string& y_feature, double x_min, double x_max, double y_min,
                double y_max, std::size_t resolution, const std::vector<std::string>& fixed) {
    ManifestWriter manifest("heatmap", out_dir);
    manifest.doc["inputs"]["model"] = model_path.string();
    manifest.doc["config"] = {{"x", x_feature}, {"y", y_feature},
                              {"x_range", {x_min, x_max}}, {"y_range", {y_min, y_max}},
                              {"resolution", resolution}, {"fixed", fixed}};

    std::map<std::string, double> fixed_values;
    for (const auto& f : fixed) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("heatmap: --fixed expects name=value, got '" + f + "'");
        }
        try {
            fixed_values[f.substr(0, eq)] = std::stod(f.substr(eq + 1));
        } catch (const std::exception&) {
            throw ValidationError("heatmap: bad numeric value in '" + f + "'");
        }
    }

    const auto [model, scaler] = load_model(model_path);
    const HeatmapGrid grid = heatmap_grid(model, scaler, x_feature, y_feature, {x_min, x_max},
                                          {y_min, y_max}, resolution, fixed_values);
    const fs::path csv_path = out_dir / "heatmap.csv";
    atomic_write(csv_path, [&](std::ostream& out) { write_heatmap_csv(out, grid); });
    manifest.output(csv_path);
    manifest.write("heatmap");
    std::cout << "heatmap " << resolution << "x" << resolution << " -> " << csv_path.string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reduced-order cooling-channel model with an MLP wall-temperature surrogate"};
    app.require_subcommand(1);

    std::string table_spec = "pseudo";
    double gas_constant_flag = 0.0;
    fs::path out_dir = ".";
    app.add_option("--table", table_spec, "property table CSV, or 'pseudo' for the bundled fluid")
        ->capture_default_str();
    app.add_option("--gas-constant", gas_constant_flag,
                   "specific gas constant [J/(kg K)] overriding the table sidecar");
    app.add_option("--out-dir", out_dir, "directory for outputs and the run manifest")
        ->capture_default_str();

    // generate
    auto* gen = app.add_subcommand("generate", "synthesize a labeled channel dataset");
    GeneratorConfig gen_cfg;
    gen->add_option("--n-channels", gen_cfg.n_channels, "number of channels")
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_cfg.rng_seed, "RNG seed");
    gen->add_option("--dz", gen_cfg.dz_mm, "station spacing [mm]");
    gen->add_option("--length", gen_cfg.channel_length_mm, "channel length [mm]");
    gen->add_option("--noise-std", gen_cfg.label_noise_std_k, "Gaussian label noise std [K]");
    gen->add_option("--near-critical", gen_cfg.near_critical_fraction,
                    "fraction of channels drawn near the pseudo-critical point");
    gen->add_option("--q-min", gen_cfg.heat_flux_w_m2.lo, "heat flux lower bound [W/m2]");
    gen->add_option("--q-max", gen_cfg.heat_flux_w_m2.hi, "heat flux upper bound [W/m2]");
    gen->add_option("--g-min", gen_cfg.mass_flux.lo, "mass flux lower bound [kg/m2/s]");
    gen->add_option("--g-max", gen_cfg.mass_flux.hi, "mass flux upper bound [kg/m2/s]");

    // stats
    auto* stats = app.add_subcommand("stats", "per-column statistics and correlation matrix");
    fs::path stats_data;
    stats->add_option("--data", stats_data, "dataset CSV")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "train the wall-temperature network");
    fs::path train_data, importance_target;
    HyperParams hp;
    double val_fraction = 0.1;
    std::uint64_t split_seed = 0;
    std::string features_csv;
    train_cmd->add_option("--data", train_data, "labeled dataset CSV")->required();
    train_cmd->add_option("--hidden-layers", hp.n_hidden_layers, "hidden layer count");
    train_cmd->add_option("--neurons", hp.neurons_per_layer, "neurons per hidden layer");
    train_cmd->add_option("--alpha", hp.alpha_l2, "L2 regularization strength");
    train_cmd->add_option("--minibatch", hp.minibatch_size, "minibatch size");
    train_cmd->add_option("--epochs", hp.epochs, "training epochs");
    train_cmd->add_option("--lr", hp.learning_rate, "ADAM learning rate");
    train_cmd->add_option("--seed", hp.rng_seed, "RNG seed (init + shuffling)");
    train_cmd->add_option("--val-fraction", val_fraction, "held-back validation fraction");
    train_cmd->add_option("--split-seed", split_seed, "train/validation split seed");
    train_cmd->add_option("--features", features_csv,
                          "comma-separated feature list (default canonical)");
    train_cmd->add_option("--importance-target", importance_target,
                          "dataset CSV whose feature distribution defines KDE importance weights");

    // search
    auto* search_cmd = app.add_subcommand("search", "random hyperparameter search");
    fs::path search_data;
    SearchSpace space;
    int n_trials = 20, workers = 1;
    std::uint64_t search_seed = 0;
    double search_val_fraction = 0.1;
    search_cmd->add_option("--data", search_data, "labeled dataset CSV")->required();
    search_cmd->add_option("--trials", n_trials, "number of sampled configurations")
        ->check(CLI::PositiveNumber);
    search_cmd->add_option("--seed", search_seed, "RNG seed");
    search_cmd->add_option("--workers", workers, "parallel trial workers");
    search_cmd->add_option("--val-fraction", search_val_fraction, "validation fraction");
    search_cmd->add_option("--layers-min", space.hidden_layers.lo, "min hidden layers");
    search_cmd->add_option("--layers-max", space.hidden_layers.hi, "max hidden layers");
    search_cmd->add_option("--neurons-min", space.neurons.lo, "min neurons per layer");
    search_cmd->add_option("--neurons-max", space.neurons.hi, "max neurons per layer");
    search_cmd->add_option("--alpha-min", space.alpha_l2.lo, "min L2 alpha (log-uniform)");
    search_cmd->add_option("--alpha-max", space.alpha_l2.hi, "max L2 alpha (log-uniform)");
    search_cmd->add_option("--lr-min", space.learning_rate.lo, "min learning rate (log-uniform)");
    search_cmd->add_option("--lr-max", space.learning_rate.hi, "max learning rate (log-uniform)");
    search_cmd->add_option("--minibatch-min", space.minibatch.lo, "min minibatch size");
    search_cmd->add_option("--minibatch-max", space.minibatch.hi, "max minibatch size");
    search_cmd->add_option("--epochs-min", space.epochs.lo, "min epochs per trial");
    search_cmd->add_option("--epochs-max", space.epochs.hi, "max epochs per trial");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a labeled dataset");
    fs::path eval_data, eval_model;
    eval_cmd->add_option("--data", eval_data, "labeled dataset CSV")->required();
    eval_cmd->add_option("--model", eval_model, "model JSON")->required();

    // march
    auto* march_cmd = app.add_subcommand("march", "march bulk pressure/enthalpy along a channel");
    MarchFlags march_flags;
    march_flags.add_to(march_cmd);

    // predict
    auto* predict_cmd =
        app.add_subcommand("predict", "march a channel and predict wall temperatures");
    MarchFlags predict_flags;
    predict_flags.add_to(predict_cmd);
    fs::path predict_model;
    predict_cmd->add_option("--model", predict_model, "model JSON")->required();

    // heatmap
    auto* heatmap_cmd = app.add_subcommand("heatmap", "grid of predictions over two features");
    fs::path heatmap_model;
    std::string x_feature = "h_b", y_feature = "p_b";
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    std::size_t resolution = 32;
    std::vector<std::string> fixed;
    heatmap_cmd->add_option("--model", heatmap_model, "model JSON")->required();
    heatmap_cmd->add_option("--x-feature", x_feature, "x-axis feature");
    heatmap_cmd->add_option("--y-feature", y_feature, "y-axis feature");
    heatmap_cmd->add_option("--x-min", x_min)->required();
    heatmap_cmd->add_option("--x-max", x_max)->required();
    heatmap_cmd->add_option("--y-min", y_min)->required();
    heatmap_cmd->add_option("--y-max", y_max)->required();
    heatmap_cmd->add_option("--resolution", resolution, "grid resolution per axis");
    heatmap_cmd->add_option("--fixed", fixed, "name=value for each remaining feature");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation; // help/version exit cleanly
    }

    const std::optional<double> gas_constant =
        gas_constant_flag > 0.0 ? std::optional<double>(gas_constant_flag) : std::nullopt;

    try {
        if (gen->parsed()) return cmd_generate(table_spec, gas_constant, gen_cfg, out_dir);
        if (stats->parsed()) return cmd_stats(stats_data, out_dir);
        if (train_cmd->parsed()) {
            return cmd_train(train_data, out_dir, hp, val_fraction, split_seed, features_csv,
                             importance_target);
        }
        if (search_cmd->parsed()) {
            return cmd_search(search_data, out_dir, space, n_trials, search_val_fraction,
                              search_seed, workers);
        }
        if (eval_cmd->parsed()) return cmd_eval(eval_data, eval_model, out_dir);
        if (march_cmd->parsed()) {
            return cmd_march(table_spec, gas_constant, march_flags, out_dir);
        }
        if (predict_cmd->parsed()) {
            return cmd_predict(table_spec, gas_constant, predict_flags, predict_model, out_dir);
        }
        if (heatmap_cmd->parsed()) {
            return cmd_heatmap(heatmap_model, out_dir, x_feature, y_feature, x_min, x_max, y_min,
                               y_max, resolution, fixed);
        }
    } catch (const ConvergenceError& e) {
        std::cerr << "error [convergence]: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const DivergenceError& e) {
        std::cerr << "error [divergence]: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const ParseError& e) {
        std::cerr << "error [validation]: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error [validation]: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error [io]: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
