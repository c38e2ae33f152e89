// Acceptance suite: one line per criterion, each with its tolerance pinned in
// code. Run with --cli <path-to-cli-binary>; exits non-zero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "regencool/channel.hpp"
#include "regencool/dataset.hpp"
#include "regencool/errors.hpp"
#include "regencool/kde.hpp"
#include "regencool/mlp.hpp"
#include "regencool/pipeline.hpp"
#include "regencool/property_table.hpp"
#include "regencool/rng.hpp"
#include "regencool/synthetic.hpp"

using namespace regencool;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    if (!pass) ++g_failures;
    std::printf("[%s] %2d. %-38s %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// --- criterion 1: gradient correctness ------------------------------------

double min_preactivation_margin(const Mlp& m, const Matrix& x) {
    double margin = 1e300;
    std::vector<double> cur, next;
    for (std::size_t s = 0; s < x.rows; ++s) {
        cur.assign(x.row(s).begin(), x.row(s).end());
        for (std::size_t l = 0; l + 1 < m.n_layers(); ++l) {
            next.assign(m.weights[l].rows, 0.0);
            for (std::size_t j = 0; j < m.weights[l].rows; ++j) {
                double acc = m.biases[l][j];
                for (std::size_t k = 0; k < m.weights[l].cols; ++k) {
                    acc += m.weights[l](j, k) * cur[k];
                }
                margin = std::min(margin, std::abs(acc));
                next[j] = std::max(0.0, acc);
            }
            cur.swap(next);
        }
    }
    return margin;
}

void criterion_gradients() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Mlp model;
        Matrix x;
        std::vector<double> y;
        // redraw until all ReLU pre-activations clear the difference step
        for (;;) {
            const std::size_t in_dim = 2 + rng.below(4);
            const std::size_t hidden = 3 + rng.below(6);
            model = Mlp::init({in_dim, hidden, hidden, 1}, rng);
            for (auto& b : model.biases) {
                for (double& v : b) v = rng.uniform(-0.3, 0.3);
            }
            const std::size_t n = 4 + rng.below(6);
            x = Matrix(n, in_dim);
            y.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < in_dim; ++j) x(i, j) = rng.uniform(-2.0, 2.0);
                y[i] = rng.uniform(-1.0, 1.0);
            }
            if (min_preactivation_margin(model, x) > 1e-3) break;
        }
        const double alpha = (trial % 2 == 0) ? 0.0 : 0.05;

        Gradients g = Gradients::zeros_like(model);
        backprop(model, x, y, alpha, g);
        const double step = 1e-6;
        auto check_param = [&](double& theta, double analytic) {
            const double orig = theta;
            theta = orig + step;
            const double jp = cost(model, x, y, alpha);
            theta = orig - step;
            const double jm = cost(model, x, y, alpha);
            theta = orig;
            const double numeric = (jp - jm) / (2.0 * step);
            const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
            worst = std::max(worst, std::abs(numeric - analytic) / denom);
        };
        for (std::size_t l = 0; l < model.n_layers(); ++l) {
            for (std::size_t i = 0; i < model.weights[l].a.size(); ++i) {
                check_param(model.weights[l].a[i], g.dW[l].a[i]);
            }
            for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
                check_param(model.biases[l][i], g.db[l][i]);
            }
        }
    }
    const double secs = seconds_since(t0);
    report(1, "gradient correctness", worst < 1e-5 && secs < 10.0,
           fmt("max rel err %.2e (tol 1e-5), 20 nets", worst), secs);
}

// --- criterion 2: friction factor limits -----------------------------------

double colebrook(double reynolds, double rel_roughness) {
    double x = 5.0;
    for (int i = 0; i < 200; ++i) {
        x = -2.0 * std::log10(rel_roughness / 3.7 + 2.51 * x / reynolds);
    }
    return 1.0 / (x * x);
}

void criterion_friction() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    double worst_lam = 0.0, worst_cole = 0.0;
    for (double re : {100.0, 500.0, 1000.0}) {
        const double rel = std::abs(friction_factor(re, 0.0) - 64.0 / re) / (64.0 / re);
        worst_lam = std::max(worst_lam, rel);
        pass = pass && rel < 0.02;
    }
    double prev = friction_factor(1e5, 0.0);
    for (double rr : {1e-4, 1e-3, 1e-2}) {
        const double f = friction_factor(1e5, rr);
        pass = pass && f > prev;
        prev = f;
    }
    for (double re : {1e4, 1e5, 1e6}) {
        for (double rr : {0.0, 1e-3, 1e-2}) {
            const double ref = colebrook(re, rr);
            const double rel = std::abs(friction_factor(re, rr) - ref) / ref;
            worst_cole = std::max(worst_cole, rel);
            pass = pass && rel < 0.05;
        }
    }
    const double secs = seconds_since(t0);
    report(2, "friction-factor limits", pass && secs < 1.0,
           fmt("laminar max %.2e (tol 2e-2), Colebrook max %.2e (tol 5e-2)", worst_lam,
               worst_cole),
           secs);
}

// --- criterion 3: energy conservation --------------------------------------

void criterion_energy(const PropertyTable& table) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(515);
    double worst = 0.0;
    bool adiabatic_exact = true;
    for (int trial = 0; trial < 50; ++trial) {
        ChannelGeometry geom;
        MarchConfig cfg;
        // redraw until the estimated heating keeps the bulk well inside the
        // table and subsonic-like
        for (;;) {
            const double area = rng.uniform(2.0, 10.0);
            const double ar = rng.uniform(1.0, 6.0);
            geom.width_mm = std::sqrt(area / ar);
            geom.height_mm = std::sqrt(area * ar);
            geom.wall_thickness_mm = rng.uniform(0.8, 1.2);
            geom.roughness_um = rng.uniform(0.2, 15.0);
            geom.length_mm = 250.0;

            cfg.mdot = rng.uniform(8000.0, 25000.0) * area * 1e-6;
            cfg.T_in = rng.uniform(120.0, 300.0);
            cfg.p_in = rng.uniform(80e5, 250e5);
            cfg.heat_flux = HeatFluxProfile::constant(rng.uniform(5e6, 40e6));

            const double dh_total = cfg.heat_flux.at(0.0) *
                                    (geom.width_mm + geom.fin_thickness_mm) * 1e-3 * 0.25 /
                                    cfg.mdot;
            const double h_out_est = table.query(*cfg.p_in, cfg.T_in).h + dh_total;
            if (h_out_est > table.query(*cfg.p_in, 500.0).h) continue;
            const double t_out_est = table.temperature_from_enthalpy(*cfg.p_in, h_out_est);
            const PropertyState out_est = table.query(*cfg.p_in, t_out_est);
            const double mass_flux = cfg.mdot / (geom.area_mm2() * 1e-6);
            const double v_out_est = mass_flux / out_est.rho;
            if (v_out_est > 300.0) continue;
            // worst-case Darcy estimate of the total drop
            const double d_h_m = hydraulic_diameter(geom) * 1e-3;
            const double dp_est = 0.5 * 0.08 * out_est.rho * v_out_est * v_out_est * 0.25 / d_h_m;
            if (*cfg.p_in - 1.5 * dp_est > table.p_min() * 1.2) break;
        }

        const auto stations = march(table, geom, cfg);
        double expected = 0.0;
        for (std::size_t i = 1; i < stations.size(); ++i) {
            expected += enthalpy_step(cfg.heat_flux.at(0.0), geom,
                                      stations[i].z_mm - stations[i - 1].z_mm, cfg.mdot);
        }
        const double rise = stations.back().h_tot - stations.front().h_tot;
        worst = std::max(worst, std::abs(rise - expected) / std::abs(rise));

        cfg.heat_flux = HeatFluxProfile::constant(0.0);
        const auto cold = march(table, geom, cfg);
        for (const auto& s : cold) {
            adiabatic_exact = adiabatic_exact && s.h_tot == cold.front().h_tot;
        }
    }
    const double secs = seconds_since(t0);
    report(3, "energy conservation", worst <= 1e-9 && adiabatic_exact && secs < 30.0,
           fmt("telescoping max %.2e (tol 1e-9), adiabatic %s", worst,
               adiabatic_exact ? "bitwise" : "violated"),
           secs);
}

// --- criterion 4: refinement consistency ------------------------------------

void criterion_refinement(const PropertyTable& table) {
    const auto t0 = std::chrono::steady_clock::now();
    // reference channel crosses the pseudo-critical line mid-length
    ChannelGeometry geom{std::sqrt(2.0), 2.0 * std::sqrt(2.0), 1.0, 1.0, 250.0, 3.0};
    MarchConfig cfg;
    cfg.mdot = 0.06;
    cfg.T_in = 150.0;
    cfg.p_in = 100e5;
    cfg.heat_flux = HeatFluxProfile::constant(30e6);

    cfg.dz_mm = 2.0;
    const auto coarse = march(table, geom, cfg);
    cfg.dz_mm = 1.0;
    const auto fine = march(table, geom, cfg);
    const double dp = std::abs(fine.back().p - coarse.back().p) / coarse.back().p;
    const double dh = std::abs(fine.back().h_tot - coarse.back().h_tot) / coarse.back().h_tot;
    const double secs = seconds_since(t0);
    report(4, "refinement consistency", dp < 0.005 && dh < 0.005,
           fmt("outlet dp %.2e, dh_tot %.2e (tol 5e-3)", dp, dh), secs);
}

// --- criteria 5-8: end-to-end analogue ---------------------------------------

struct EndToEnd {
    Mlp model;
    ScalerParams scaler;
    double label_range = 0.0;
    double mae_exact = 0.0;
    Dataset train_full{"oracle", true};
    bool trained = false;
};

void criterion_end_to_end(const PropertyTable& table, EndToEnd& e2e) {
    const auto t0 = std::chrono::steady_clock::now();

    GeneratorConfig gen_cfg;
    gen_cfg.n_channels = 300;
    gen_cfg.rng_seed = 11;
    const GenerateOutcome out = generate(table, gen_cfg);
    e2e.train_full = out.dataset;

    const auto& labels = out.dataset.labels();
    const auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
    e2e.label_range = *hi - *lo;

    const auto [train_ds, val_ds] = split(out.dataset, 0.9, 1);
    HyperParams hp;
    hp.n_hidden_layers = 3;
    hp.neurons_per_layer = 128;
    hp.epochs = 60;
    hp.minibatch_size = 1024;
    hp.learning_rate = 3e-3;
    hp.alpha_l2 = 1e-6;
    hp.rng_seed = 3;
    const TrainResult res = fit_model(train_ds, val_ds, FeatureSpec::canonical(), hp);
    e2e.model = res.model;
    e2e.scaler = res.scaler;
    e2e.trained = true;

    const double val_mae = res.report.val_mae.back();
    const double val_tol = 0.03 * e2e.label_range;

    // 25 fresh channels, truth marched at dz = 0.5 mm, labels kept every 2 mm
    GeneratorConfig test_cfg;
    test_cfg.n_channels = 25;
    test_cfg.rng_seed = 99;
    test_cfg.dz_mm = 0.5;
    const GenerateOutcome test_out = generate(table, test_cfg);
    Dataset test_ds("oracle", true);
    for (std::size_t i = 0; i < test_out.dataset.size(); ++i) {
        const SampleRecord r = test_out.dataset.record(i);
        if (std::abs(r.z / 2.0 - std::round(r.z / 2.0)) < 1e-9) test_ds.append(r);
    }
    const EvalMetrics m = evaluate(e2e.model, e2e.scaler, test_ds);
    e2e.mae_exact = m.mae;
    const double test_tol = 0.05 * e2e.label_range;

    const double secs = seconds_since(t0);
    report(5, "end-to-end surrogate quality",
           val_mae < val_tol && m.mae < test_tol && secs < 900.0,
           fmt("val MAE %.2f K (tol %.1f), held-out MAE %.2f K (tol %.1f), %zu samples", val_mae,
               val_tol, m.mae, test_tol, out.dataset.size()),
           secs);
}

void criterion_hybrid(const PropertyTable& table, const EndToEnd& e2e) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!e2e.trained) {
        report(6, "hybrid vs exact inputs", false, "skipped: training failed", 0.0);
        return;
    }
    GeneratorConfig test_cfg;
    test_cfg.n_channels = 25;
    test_cfg.rng_seed = 99;
    test_cfg.dz_mm = 0.5;
    const GenerateOutcome test_out = generate(table, test_cfg);

    // group the fine dataset into channels at z = 0 boundaries
    std::vector<std::vector<SampleRecord>> channels;
    for (std::size_t i = 0; i < test_out.dataset.size(); ++i) {
        const SampleRecord r = test_out.dataset.record(i);
        if (r.z == 0.0) channels.emplace_back();
        channels.back().push_back(r);
    }

    double err_exact = 0.0, err_hybrid = 0.0;
    std::size_t n = 0;
    for (const auto& ch : channels) {
        const SampleRecord& r0 = ch.front();
        ChannelGeometry geom;
        geom.width_mm = std::sqrt(r0.A / r0.AR);
        geom.height_mm = std::sqrt(r0.A * r0.AR);
        geom.wall_thickness_mm = r0.d;
        geom.roughness_um = r0.r;
        geom.length_mm = 250.0;
        MarchConfig mc;
        mc.mdot = r0.G * r0.A * 1e-6;
        mc.T_in = r0.T_b;
        mc.p_out = ch.back().p_b; // truth-march outlet pressure
        mc.heat_flux = HeatFluxProfile::constant(r0.q);
        mc.dz_mm = 2.0;
        const auto pred = predict_channel(table, geom, mc, e2e.model, e2e.scaler);

        Dataset exact("oracle", true);
        std::vector<const SampleRecord*> kept;
        for (const auto& r : ch) {
            if (std::abs(r.z / 2.0 - std::round(r.z / 2.0)) < 1e-9) {
                exact.append(r);
                kept.push_back(&r);
            }
        }
        const std::vector<double> exact_pred = predict(e2e.model, e2e.scaler, exact);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const double z = kept[i]->z;
            const auto it = std::find_if(pred.begin(), pred.end(), [&](const auto& st) {
                return std::abs(st.first.z_mm - z) < 1e-9;
            });
            if (it == pred.end()) continue;
            err_exact += std::abs(exact_pred[i] - *kept[i]->T_w);
            err_hybrid += std::abs(it->second - *kept[i]->T_w);
            ++n;
        }
    }
    const double mae_exact = err_exact / static_cast<double>(n);
    const double mae_hybrid = err_hybrid / static_cast<double>(n);
    const double increase = (mae_hybrid - mae_exact) / mae_exact;
    const double secs = seconds_since(t0);
    report(6, "hybrid vs exact inputs", increase < 0.5,
           fmt("MAE exact %.2f K, marched %.2f K, increase %.1f%% (tol +50%%)", mae_exact,
               mae_hybrid, 100.0 * increase),
           secs);
}

struct CliRun {
    int exit_code = -1;
    std::string output;
    double seconds = 0.0;
};

CliRun run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
    const std::string cmd = cli + " " + args + " > " + log.string() + " 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.seconds = seconds_since(t0);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    r.output.assign(std::istreambuf_iterator<char>(in), {});
    return r;
}

void criterion_speed(const std::string& cli, const EndToEnd& e2e, const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!e2e.trained) {
        report(7, "prediction speed", false, "skipped: training failed", 0.0);
        return;
    }
    const fs::path model_path = work / "speed_model.json";
    save_model(e2e.model, e2e.scaler, model_path);

    // warm-up run, then the timed one
    const std::string args = "--out-dir " + (work / "speed").string() +
                             " predict --model " + model_path.string() +
                             " --p-in 1e7 --mdot 0.06 --t-in 150 --q 3e7"
                             " --width 1.4142 --height 2.8284 --length 250 --dz 2";
    run_cli(cli, args, work / "speed_warm.log");
    const CliRun r = run_cli(cli, args, work / "speed.log");

    double internal_ms = -1.0;
    const auto pos = r.output.find("channel predicted in ");
    if (pos != std::string::npos) {
        internal_ms = std::atof(r.output.c_str() + pos + 21);
    }
    const bool pass = r.exit_code == 0 && r.seconds < 0.6 && internal_ms >= 0.0 &&
                      internal_ms < 50.0 && r.output.find("126 stations") != std::string::npos;
    report(7, "prediction speed", pass,
           fmt("cmd_predict %.0f ms end-to-end (tol 600), march+ANN %.1f ms (target 50)",
               1000.0 * r.seconds, internal_ms),
           seconds_since(t0));
}

void criterion_correlations(const EndToEnd& e2e) {
    const auto t0 = std::chrono::steady_clock::now();
    if (e2e.train_full.size() == 0) {
        report(8, "correlation signs", false, "skipped: no dataset", 0.0);
        return;
    }
    const Matrix c = correlation_matrix(e2e.train_full, {"q", "r", "T_w"});
    const double q_tw = c(0, 2), r_tw = c(1, 2);
    report(8, "correlation signs", q_tw > 0.5 && r_tw < 0.0,
           fmt("corr(q,T_w) %.2f (> 0.5), corr(r,T_w) %.2f (< 0)", q_tw, r_tw),
           seconds_since(t0));
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void criterion_determinism(const std::string& cli, const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;

    const fs::path ga = work / "det_gen_a", gb = work / "det_gen_b";
    for (const auto& dir : {ga, gb}) {
        pass = pass && run_cli(cli, "--out-dir " + dir.string() +
                                        " generate --n-channels 6 --seed 42",
                               work / "det.log")
                               .exit_code == 0;
    }
    const bool gen_ok = file_bytes(ga / "dataset.csv") == file_bytes(gb / "dataset.csv");
    pass = pass && gen_ok;

    const fs::path ta = work / "det_train_a", tb = work / "det_train_b";
    for (const auto& dir : {ta, tb}) {
        pass = pass && run_cli(cli,
                               "--out-dir " + dir.string() + " train --data " +
                                   (ga / "dataset.csv").string() +
                                   " --epochs 2 --seed 5 --hidden-layers 1 --neurons 16",
                               work / "det.log")
                               .exit_code == 0;
    }
    const bool train_ok = file_bytes(ta / "model.json") == file_bytes(tb / "model.json");
    pass = pass && train_ok;

    const fs::path sa = work / "det_search_a", sb = work / "det_search_b";
    for (const auto& dir : {sa, sb}) {
        pass = pass && run_cli(cli,
                               "--out-dir " + dir.string() + " search --data " +
                                   (ga / "dataset.csv").string() +
                                   " --trials 2 --seed 5 --epochs-min 1 --epochs-max 1"
                                   " --layers-min 1 --layers-max 2 --neurons-min 4"
                                   " --neurons-max 16",
                               work / "det.log")
                               .exit_code == 0;
    }
    const bool search_ok =
        file_bytes(sa / "search_report.csv") == file_bytes(sb / "search_report.csv");
    pass = pass && search_ok;

    report(9, "seeded byte-identical reruns", pass,
           fmt("generate %s, train %s, search %s", gen_ok ? "ok" : "DIFF",
               train_ok ? "ok" : "DIFF", search_ok ? "ok" : "DIFF"),
           seconds_since(t0));
}

void criterion_round_trips(const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;

    Rng rng(77);
    Matrix x(500, 4);
    for (double& v : x.a) v = rng.uniform(-3.0, 900.0);
    const ScalerParams scaler = fit_scaler(x, {"a", "b", "c", "d"});
    const Matrix xs = scaler.transform(x);
    for (std::size_t j = 0; j < xs.cols; ++j) {
        double mean = 0.0, var = 0.0;
        for (std::size_t i = 0; i < xs.rows; ++i) mean += xs(i, j);
        mean /= static_cast<double>(xs.rows);
        for (std::size_t i = 0; i < xs.rows; ++i) var += (xs(i, j) - mean) * (xs(i, j) - mean);
        var /= static_cast<double>(xs.rows);
        pass = pass && std::abs(mean) < 1e-10 && std::abs(std::sqrt(var) - 1.0) < 1e-10;
    }
    std::vector<double> probe = {4.2, -1.0, 33.3, 800.0}, fwd(4), back(4);
    scaler.transform(probe, fwd);
    scaler.inverse_transform(fwd, back);
    for (std::size_t i = 0; i < 4; ++i) pass = pass && std::abs(back[i] - probe[i]) < 1e-12;

    Mlp model = Mlp::init({4, 16, 16, 1}, rng);
    const fs::path path = work / "roundtrip_model.json";
    save_model(model, scaler, path);
    const auto [loaded_model, loaded_scaler] = load_model(path);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> in(4), ins(4);
        for (double& v : in) v = rng.uniform(-3.0, 900.0);
        loaded_scaler.transform(in, ins);
        std::vector<double> ins2(4);
        scaler.transform(in, ins2);
        pass = pass && ins == ins2 && forward(loaded_model, ins) == forward(model, ins);
    }

    report(10, "scaler and model round trips", pass,
           "standardization 1e-10, inverse 1e-12, save/load forward bitwise",
           seconds_since(t0));
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
    }
    if (cli.empty()) {
        std::fprintf(stderr, "usage: acceptance --cli <path-to-regencool-binary>\n");
        return 64;
    }
    const fs::path work = fs::temp_directory_path() / "regencool_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    const PropertyTable table = make_pseudo_fluid();
    EndToEnd e2e;

    criterion_gradients();
    criterion_friction();
    criterion_energy(table);
    criterion_refinement(table);
    try {
        criterion_end_to_end(table, e2e);
    } catch (const std::exception& e) {
        report(5, "end-to-end surrogate quality", false, e.what(), 0.0);
    }
    try {
        criterion_hybrid(table, e2e);
    } catch (const std::exception& e) {
        report(6, "hybrid vs exact inputs", false, e.what(), 0.0);
    }
    criterion_speed(cli, e2e, work);
    criterion_correlations(e2e);
    criterion_determinism(cli, work);
    criterion_round_trips(work);

    fs::remove_all(work);
    if (g_failures == 0) {
        std::printf("acceptance: all 10 criteria passed\n");
    } else {
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    }
    return g_failures;
}
