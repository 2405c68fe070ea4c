// SPDX-License-Identifier: Apache-2.0
//
// pnc command-line front end. Talks to the core exclusively through the
// public C API in pnc.h.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pnc.h"

namespace {

using nlohmann::ordered_json;

constexpr const char* kToolVersion = "pnc 0.1.0";

// Exit codes, also documented in the README.
enum ExitCode {
    kExitOk = 0,
    kExitValidation = 2,
    kExitInfeasible = 3,
    kExitIo = 4,
    kExitParse = 5,
    kExitCounts = 6,
};

struct CliError {
    int exit_code;
    std::string message;
};

[[noreturn]] void die(int code, const std::string& message) {
    throw CliError{code, message};
}

void check(pnc_status status) {
    if (status == PNC_OK) return;
    std::string msg =
        std::string(pnc_status_name(status)) + ": " + pnc_last_error();
    switch (status) {
        case PNC_ERR_INFEASIBLE:
            die(kExitInfeasible, "calibration alarm, " + msg);
        case PNC_ERR_IO:
            die(kExitIo, msg);
        case PNC_ERR_PARSE:
            die(kExitParse, msg);
        case PNC_ERR_INSUFFICIENT_COUNTS:
        case PNC_ERR_EMPTY_STREAM:
            die(kExitCounts, msg);
        default:
            die(kExitValidation, msg);
    }
}

using SourcePtr = std::unique_ptr<pnc_source, decltype(&pnc_source_destroy)>;
using CountsPtr = std::unique_ptr<pnc_counts, decltype(&pnc_counts_destroy)>;

SourcePtr make_source(const std::string& spec) {
    pnc_source* raw = nullptr;
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    double mu = 0.0;
    if (colon != std::string::npos) {
        try {
            mu = std::stod(spec.substr(colon + 1));
        } catch (const std::exception&) {
            die(kExitValidation, "bad source spec: " + spec);
        }
    }
    if (kind == "poisson") {
        check(pnc_source_create_poisson(mu, &raw));
    } else if (kind == "thermal") {
        check(pnc_source_create_thermal(mu, &raw));
    } else if (kind == "single") {
        check(pnc_source_create_single_photon(&raw));
    } else if (kind == "quasi-thermal") {
        check(pnc_source_create_quasi_thermal(mu, &raw));
    } else {
        die(kExitValidation,
            "unknown source '" + kind +
                "' (expected poisson:<mu>, thermal:<mu>, single or "
                "quasi-thermal:<mu>)");
    }
    return {raw, pnc_source_destroy};
}

std::vector<double> parse_grid(const std::string& spec) {
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
        step <= 0.0 || stop < start) {
        die(kExitValidation, "bad grid '" + spec + "' (expected start:stop:step)");
    }
    std::vector<double> grid;
    for (double d = start; d <= stop + 1e-9; d += step) grid.push_back(d);
    return grid;
}

void require_writable(const std::string& path, bool force) {
    if (!force && std::filesystem::exists(path)) {
        die(kExitIo, "refusing to overwrite " + path + " (use --force)");
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) die(kExitIo, "cannot open " + path);
    os << text;
    if (!os.flush()) die(kExitIo, "write failed: " + path);
}

void write_metadata(const std::string& out_path, const ordered_json& config,
                    bool force) {
    ordered_json meta;
    meta["tool"] = kToolVersion;
    meta["config"] = config;
    std::string path = out_path + ".meta.json";
    require_writable(path, force);
    write_text_file(path, meta.dump(2) + "\n");
}

ordered_json correlations_to_json(const pnc_correlation g[3]) {
    ordered_json j;
    for (int i = 0; i < 3; ++i) {
        j["g" + std::to_string(g[i].order)] = {{"value", g[i].value},
                                               {"sigma", g[i].sigma}};
    }
    return j;
}

// Loads g_2..g_4 from an `estimate` report.
std::vector<pnc_correlation> correlations_from_report(const std::string& path) {
    std::ifstream is(path);
    if (!is) die(kExitIo, "cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        die(kExitParse, std::string("bad report JSON: ") + e.what());
    }
    std::vector<pnc_correlation> out;
    for (unsigned m = 2; m <= 4; ++m) {
        auto key = "g" + std::to_string(m);
        if (!j.contains("correlations") || !j["correlations"].contains(key)) {
            die(kExitParse, "report missing correlations." + key);
        }
        const auto& e = j["correlations"][key];
        out.push_back({m, e.at("value").get<double>(), e.at("sigma").get<double>()});
    }
    return out;
}

std::vector<pnc_correlation> preset_correlations(const std::string& name) {
    pnc_correlation g[3];
    check(pnc_preset_correlations(name.c_str(), g));
    return {g[0], g[1], g[2]};
}

size_t parse_orders(const std::string& orders) {
    if (orders == "2") return 1;
    if (orders == "2,3") return 2;
    if (orders == "2,3,4") return 3;
    die(kExitValidation,
        "orders must be one of '2', '2,3', '2,3,4' (got '" + orders + "')");
}

ordered_json bounds_to_json(const pnc_probability_bounds& bounds) {
    size_t needed = 0;
    std::string buf(4096, '\0');
    check(pnc_bounds_to_json(&bounds, buf.data(), buf.size(), &needed));
    buf.resize(needed - 1);
    return ordered_json::parse(buf);
}

// ---- subcommand configuration ------------------------------------------

struct SimulateOpts {
    std::string source = "poisson:0.42";
    std::uint64_t pulses = 1000000;
    pnc_detector_config detector{};
    std::vector<double> split;
    std::uint64_t seed = 1;
    std::string out;
    bool force = false;
};

struct EstimateOpts {
    std::string in;
    std::string out;  // empty -> stdout
    bool force = false;
};

struct BoundOpts {
    std::string preset;
    std::string report;
    double g2 = -1.0, g2_sigma = 0.0;
    double g3 = -1.0, g3_sigma = 0.0;
    double g4 = -1.0, g4_sigma = 0.0;
    std::string orders = "2,3,4";
    double mu = 0.42;
    double gamma = 7.0;
    std::size_t n_cut = 25;
    std::string out;
    bool force = false;
};

struct KeyrateOpts {
    std::string preset;
    std::string report;
    bool ideal = false;
    std::string orders = "2,3,4";
    double gamma = 7.0;
    std::size_t n_cut = 25;
    std::string grid = "0:100:5";
    pnc_channel_model channel{};
    pnc_protocol_params protocol{};
    std::string out;
    bool force = false;
};

std::vector<pnc_correlation> resolve_constraints(const std::string& preset,
                                                 const std::string& report) {
    if (!preset.empty() && !report.empty()) {
        die(kExitValidation, "--preset and --report are mutually exclusive");
    }
    if (!preset.empty()) return preset_correlations(preset);
    if (!report.empty()) return correlations_from_report(report);
    die(kExitValidation, "one of --preset or --report is required");
}

int run_simulate(const SimulateOpts& opt) {
    if (opt.split.size() == 4) {
        for (int i = 0; i < 4; ++i) {
            // validated by the library
        }
    } else if (!opt.split.empty()) {
        die(kExitValidation, "--split needs exactly 4 probabilities");
    }
    pnc_detector_config cfg = opt.detector;
    if (opt.split.size() == 4) {
        for (int i = 0; i < 4; ++i) cfg.split_probs[i] = opt.split[static_cast<size_t>(i)];
    }
    require_writable(opt.out, opt.force);
    auto source = make_source(opt.source);
    check(pnc_simulate_to_file(source.get(), opt.pulses, &cfg, opt.seed,
                               opt.out.c_str()));

    pnc_counts* raw = nullptr;
    check(pnc_counts_read_file(opt.out.c_str(), &raw));
    CountsPtr counts(raw, pnc_counts_destroy);

    ordered_json config;
    config["source"] = opt.source;
    config["pulses"] = opt.pulses;
    config["efficiency"] = cfg.efficiency;
    config["eta0_cap"] = cfg.eta0_cap;
    config["split_probs"] = {cfg.split_probs[0], cfg.split_probs[1],
                             cfg.split_probs[2], cfg.split_probs[3]};
    config["dark_count_prob"] = cfg.dark_count_prob;
    config["seed"] = opt.seed;
    config["out"] = opt.out;
    write_metadata(opt.out, config, opt.force);

    ordered_json summary;
    summary["records"] = pnc_counts_pulses(counts.get());
    summary["singles"] = {pnc_counts_singles(counts.get(), 0),
                          pnc_counts_singles(counts.get(), 1),
                          pnc_counts_singles(counts.get(), 2),
                          pnc_counts_singles(counts.get(), 3)};
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int run_estimate(const EstimateOpts& opt) {
    pnc_counts* raw = nullptr;
    check(pnc_counts_read_file(opt.in.c_str(), &raw));
    CountsPtr counts(raw, pnc_counts_destroy);
    pnc_correlation g[3];
    check(pnc_estimate_correlations(counts.get(), g));

    ordered_json report;
    report["n_pulses"] = pnc_counts_pulses(counts.get());
    report["singles"] = {pnc_counts_singles(counts.get(), 0),
                         pnc_counts_singles(counts.get(), 1),
                         pnc_counts_singles(counts.get(), 2),
                         pnc_counts_singles(counts.get(), 3)};
    report["correlations"] = correlations_to_json(g);
    report["metadata"] = {{"tool", kToolVersion}, {"input", opt.in}};
    std::string text = report.dump(2) + "\n";
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        require_writable(opt.out, opt.force);
        write_text_file(opt.out, text);
    }
    return kExitOk;
}

int run_bound(const BoundOpts& opt) {
    std::vector<pnc_correlation> g;
    if (!opt.preset.empty() || !opt.report.empty()) {
        g = resolve_constraints(opt.preset, opt.report);
    } else {
        if (opt.g2 < 0.0) {
            die(kExitValidation, "provide --preset, --report or at least --g2");
        }
        g.push_back({2, opt.g2, opt.g2_sigma});
        if (opt.g3 >= 0.0) g.push_back({3, opt.g3, opt.g3_sigma});
        if (opt.g4 >= 0.0) g.push_back({4, opt.g4, opt.g4_sigma});
    }
    size_t n_orders = std::min(parse_orders(opt.orders), g.size());

    pnc_probability_bounds bounds{};
    check(pnc_bound_probabilities(g.data(), n_orders, opt.mu, opt.gamma,
                                  opt.n_cut, &bounds));
    ordered_json j = bounds_to_json(bounds);
    j["metadata"] = {{"tool", kToolVersion},
                     {"preset", opt.preset},
                     {"report", opt.report}};
    std::string text = j.dump(2) + "\n";
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        require_writable(opt.out, opt.force);
        write_text_file(opt.out, text);
    }
    return kExitOk;
}

int run_keyrate(const KeyrateOpts& opt) {
    std::vector<pnc_correlation> g;
    size_t n_orders = 0;
    SourcePtr prepared(nullptr, pnc_source_destroy);
    if (!opt.ideal) {
        g = resolve_constraints(opt.preset, opt.report);
        n_orders = std::min(parse_orders(opt.orders), g.size());
        if (opt.preset == "paper-below-threshold") {
            pnc_source* raw = nullptr;
            check(pnc_source_create_quasi_thermal(opt.protocol.u, &raw));
            prepared.reset(raw);
        }
    }
    std::vector<double> grid = parse_grid(opt.grid);
    std::vector<pnc_keyrate_point> points(grid.size());
    check(pnc_keyrate_scan(g.empty() ? nullptr : g.data(), n_orders, opt.gamma,
                           opt.n_cut, &opt.channel, &opt.protocol,
                           prepared.get(), grid.data(), grid.size(),
                           points.data()));

    std::ostringstream csv;
    csv << "distance_km,Q_Z,E_Z,p1_lower,y1_lower,e1_upper,R\n";
    csv.precision(12);
    for (const auto& p : points) {
        csv << p.distance_km << ',' << p.q_z << ',' << p.e_z << ','
            << p.p1_lower << ',' << p.y1_lower << ',' << p.e1_upper << ','
            << p.rate << '\n';
    }
    if (opt.out.empty()) {
        std::cout << csv.str();
    } else {
        require_writable(opt.out, opt.force);
        write_text_file(opt.out, csv.str());
        ordered_json config;
        config["preset"] = opt.preset;
        config["report"] = opt.report;
        config["ideal"] = opt.ideal;
        config["orders"] = opt.orders;
        config["gamma"] = opt.gamma;
        config["n_cut"] = opt.n_cut;
        config["grid"] = opt.grid;
        config["channel"] = {{"alpha_db_per_km", opt.channel.alpha_db_per_km},
                             {"detector_efficiency", opt.channel.detector_efficiency},
                             {"dark_click_prob", opt.channel.dark_click_prob},
                             {"misalignment", opt.channel.misalignment},
                             {"vacuum_error", opt.channel.vacuum_error}};
        config["protocol"] = {{"p_z", opt.protocol.p_z},
                              {"f", opt.protocol.f},
                              {"delta", opt.protocol.delta},
                              {"e0_lower", opt.protocol.e0_lower},
                              {"u", opt.protocol.u},
                              {"v", opt.protocol.v},
                              {"w", opt.protocol.w},
                              {"p_u", opt.protocol.p_u},
                              {"p_v", opt.protocol.p_v},
                              {"p_w", opt.protocol.p_w}};
        // Single measured error rate stands in for both bases.
        config["x_basis_error_equals_z"] = true;
        write_metadata(opt.out, config, opt.force);
    }
    return kExitOk;
}

// Expands `--config file.json` into --key value tokens ahead of the other
// flags, so explicit flags override the file.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] != "--config") continue;
        if (i + 1 >= args.size()) die(kExitValidation, "--config needs a file");
        std::ifstream is(args[i + 1]);
        if (!is) die(kExitIo, "cannot open config " + args[i + 1]);
        nlohmann::json j;
        try {
            is >> j;
        } catch (const std::exception& e) {
            die(kExitParse, std::string("bad config JSON: ") + e.what());
        }
        std::vector<std::string> expanded;
        for (const auto& [key, value] : j.items()) {
            expanded.push_back("--" + key);
            if (value.is_boolean()) {
                if (!value.get<bool>()) expanded.pop_back();
                continue;
            }
            expanded.push_back(value.is_string() ? value.get<std::string>()
                                                 : value.dump());
        }
        args.erase(args.begin() + static_cast<long>(i),
                   args.begin() + static_cast<long>(i) + 2);
        // Keep the subcommand name (if any) in front of injected flags.
        size_t insert_at = i;
        args.insert(args.begin() + static_cast<long>(insert_at),
                    expanded.begin(), expanded.end());
        break;
    }
    return args;
}

void add_channel_flags(CLI::App* app, pnc_channel_model& ch,
                       pnc_protocol_params& pp) {
    app->add_option("--alpha", ch.alpha_db_per_km, "Fibre loss in dB/km");
    app->add_option("--det-efficiency", ch.detector_efficiency,
                    "Receiver detector efficiency");
    app->add_option("--dark", ch.dark_click_prob, "Dark click probability Y0");
    app->add_option("--misalignment", ch.misalignment, "Misalignment error e_d");
    app->add_option("--p-z", pp.p_z, "Z-basis probability");
    app->add_option("--f", pp.f, "Error-correction inefficiency");
    app->add_option("--delta", pp.delta, "Finite-size penalty");
    app->add_option("--e0-lower", pp.e0_lower,
                    "Lower bound on the vacuum error rate (0 = conservative)");
    app->add_option("--mu", pp.u, "Signal intensity u");
    app->add_option("--nu", pp.v, "Decoy intensity v");
    app->add_option("--w", pp.w, "Vacuum intensity w");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon-number statistics certification for decoy-state QKD"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    SimulateOpts sim;
    pnc_detector_config_init(&sim.detector);
    auto* c_sim = app.add_subcommand("simulate",
                                     "Generate a detection-record file");
    c_sim->add_option("--source", sim.source,
                      "poisson:<mu> | thermal:<mu> | single | quasi-thermal:<mu>");
    c_sim->add_option("--pulses", sim.pulses, "Number of pulses");
    c_sim->add_option("--efficiency", sim.detector.efficiency,
                      "Per-photon detection probability");
    c_sim->add_option("--eta0-cap", sim.detector.eta0_cap,
                      "Trusted efficiency ceiling");
    c_sim->add_option("--split", sim.split, "Four routing probabilities");
    c_sim->add_option("--dark-count", sim.detector.dark_count_prob,
                      "Dark count probability per pulse per detector");
    c_sim->add_option("--seed", sim.seed, "RNG seed");
    c_sim->add_option("--out", sim.out, "Output record file")->required();
    c_sim->add_flag("--force", sim.force, "Overwrite existing outputs");

    EstimateOpts est;
    auto* c_est = app.add_subcommand("estimate",
                                     "Estimate g2, g3, g4 from records");
    c_est->add_option("--in", est.in, "Detection-record file")->required();
    c_est->add_option("--out", est.out, "Report JSON (default stdout)");
    c_est->add_flag("--force", est.force, "Overwrite existing outputs");

    BoundOpts bnd;
    auto* c_bnd = app.add_subcommand(
        "bound", "Worst-case bounds on p0..p3 from correlation data");
    c_bnd->add_option("--preset", bnd.preset,
                      "paper-above-threshold | paper-below-threshold");
    c_bnd->add_option("--report", bnd.report, "estimate report JSON");
    c_bnd->add_option("--g2", bnd.g2, "g2 value");
    c_bnd->add_option("--g2-sigma", bnd.g2_sigma, "g2 standard deviation");
    c_bnd->add_option("--g3", bnd.g3, "g3 value");
    c_bnd->add_option("--g3-sigma", bnd.g3_sigma, "g3 standard deviation");
    c_bnd->add_option("--g4", bnd.g4, "g4 value");
    c_bnd->add_option("--g4-sigma", bnd.g4_sigma, "g4 standard deviation");
    c_bnd->add_option("--orders", bnd.orders, "2 | 2,3 | 2,3,4");
    c_bnd->add_option("--mu", bnd.mu, "Mean photon number");
    c_bnd->add_option("--gamma", bnd.gamma, "Confidence width in sigmas");
    c_bnd->add_option("--n-cut", bnd.n_cut, "Truncation order");
    c_bnd->add_option("--out", bnd.out, "Bounds JSON (default stdout)");
    c_bnd->add_flag("--force", bnd.force, "Overwrite existing outputs");

    KeyrateOpts kr;
    pnc_channel_model_init(&kr.channel);
    pnc_protocol_params_init(&kr.protocol);
    auto* c_kr = app.add_subcommand("keyrate",
                                    "Secure key rate versus distance (CSV)");
    c_kr->add_option("--preset", kr.preset,
                     "paper-above-threshold | paper-below-threshold");
    c_kr->add_option("--report", kr.report, "estimate report JSON");
    c_kr->add_flag("--ideal", kr.ideal, "Ideal Poissonian reference curve");
    c_kr->add_option("--orders", kr.orders, "2 | 2,3 | 2,3,4");
    c_kr->add_option("--gamma", kr.gamma, "Confidence width in sigmas");
    c_kr->add_option("--n-cut", kr.n_cut, "Truncation order");
    c_kr->add_option("--grid", kr.grid, "Distance grid start:stop:step in km");
    add_channel_flags(c_kr, kr.channel, kr.protocol);
    c_kr->add_option("--out", kr.out, "Curve CSV (default stdout)");
    c_kr->add_flag("--force", kr.force, "Overwrite existing outputs");

    // pipeline: simulate -> estimate -> bound -> keyrate in one run.
    struct PipelineOpts {
        SimulateOpts sim;
        double gamma = 7.0;
        std::size_t n_cut = 25;
        std::string orders = "2,3,4";
        std::string grid = "0:100:5";
        pnc_channel_model channel{};
        pnc_protocol_params protocol{};
        std::string out_dir;
        bool force = false;
    } pl;
    pnc_detector_config_init(&pl.sim.detector);
    pnc_channel_model_init(&pl.channel);
    pnc_protocol_params_init(&pl.protocol);
    auto* c_pl = app.add_subcommand("pipeline",
                                    "simulate + estimate + bound + keyrate");
    c_pl->add_option("--source", pl.sim.source, "Source spec");
    c_pl->add_option("--pulses", pl.sim.pulses, "Number of pulses");
    c_pl->add_option("--efficiency", pl.sim.detector.efficiency,
                     "Per-photon detection probability");
    c_pl->add_option("--eta0-cap", pl.sim.detector.eta0_cap,
                     "Trusted efficiency ceiling");
    c_pl->add_option("--seed", pl.sim.seed, "RNG seed");
    c_pl->add_option("--orders", pl.orders, "2 | 2,3 | 2,3,4");
    c_pl->add_option("--gamma", pl.gamma, "Confidence width in sigmas");
    c_pl->add_option("--n-cut", pl.n_cut, "Truncation order");
    c_pl->add_option("--grid", pl.grid, "Distance grid start:stop:step");
    add_channel_flags(c_pl, pl.channel, pl.protocol);
    c_pl->add_option("--out-dir", pl.out_dir, "Output directory")->required();
    c_pl->add_flag("--force", pl.force, "Overwrite existing outputs");

    try {
        auto args = expand_config(argc, argv);
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(cargs.size()),
                      const_cast<char**>(cargs.data()));
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e);  // --help
            std::cerr << e.what() << "\n";
            return kExitValidation;
        }

        if (c_sim->parsed()) return run_simulate(sim);
        if (c_est->parsed()) return run_estimate(est);
        if (c_bnd->parsed()) return run_bound(bnd);
        if (c_kr->parsed()) return run_keyrate(kr);
        if (c_pl->parsed()) {
            std::filesystem::create_directories(pl.out_dir);
            pl.sim.out = pl.out_dir + "/records.txt";
            pl.sim.force = pl.force;
            run_simulate(pl.sim);

            EstimateOpts e;
            e.in = pl.sim.out;
            e.out = pl.out_dir + "/correlations.json";
            e.force = pl.force;
            run_estimate(e);

            BoundOpts b;
            b.report = e.out;
            b.orders = pl.orders;
            b.mu = pl.protocol.u;
            b.gamma = pl.gamma;
            b.n_cut = pl.n_cut;
            b.out = pl.out_dir + "/bounds.json";
            b.force = pl.force;
            run_bound(b);

            KeyrateOpts k;
            k.report = e.out;
            k.orders = pl.orders;
            k.gamma = pl.gamma;
            k.n_cut = pl.n_cut;
            k.grid = pl.grid;
            k.channel = pl.channel;
            k.protocol = pl.protocol;
            k.out = pl.out_dir + "/keyrate.csv";
            k.force = pl.force;
            return run_keyrate(k);
        }
        return kExitValidation;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
