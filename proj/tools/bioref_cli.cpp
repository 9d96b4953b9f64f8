// bioref: batch front-end for suspension runs.
//
//   bioref run     --config cfg.json [--out-dir d] [--seed n] [--dt s] [--no-timing]
//   bioref compare --config cfg.json ...
//   bioref sweep   --config cfg.json ...
//   bioref check   --config cfg.json
//   bioref plot    --csv traj.csv --signals e1,sprung_accel [--config cfg.json] [--out-dir d]
//
// Exit codes: 0 ok, 1 a run faulted, 2 configuration or input error.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bioref/config.hpp"
#include "bioref/experiment.hpp"
#include "bioref/metrics.hpp"
#include "bioref/sim.hpp"
#include "bioref/svg.hpp"

namespace fs = std::filesystem;
using namespace bioref;

namespace {

constexpr int kOk = 0;
constexpr int kFault = 1;
constexpr int kConfig = 2;

struct CommonOpts {
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    bool no_timing = false;
};

void add_common(CLI::App* sub, CommonOpts& o, bool config_required = true) {
    auto* c = sub->add_option("--config", o.config, "experiment configuration (JSON)");
    if (config_required) c->required();
    sub->add_option("--out-dir", o.out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "road seed override");
    sub->add_option("--dt", o.dt, "integration step override [s]");
    sub->add_flag("--no-timing", o.no_timing, "skip controller timing");
}

ExperimentConfig load(const CommonOpts& o) {
    std::ifstream is(o.config);
    if (!is) throw ConfigError("cannot read config " + o.config);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(is, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(o.config + ": " + e.what());
    }
    ExperimentConfig cfg = parse_config(apply_overrides(doc, o.seed, o.dt, o.no_timing));
    if (!o.out_dir.empty()) cfg.output.dir = o.out_dir;
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& suffix) {
    fs::create_directories(cfg.output.dir);
    return (fs::path(cfg.output.dir) / (cfg.output.prefix + suffix)).string();
}

std::vector<std::pair<std::string, ControllerConfig>> experiment_controllers(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, ControllerConfig>> out;
    if (cfg.experiment) out = cfg.experiment->controllers;
    if (out.empty() && cfg.controller) out.emplace_back(controller_kind(*cfg.controller), *cfg.controller);
    return out;
}

void print_summary(const RunSummary& s) {
    std::printf("%-14s rms=%.6g m/s^2", s.label.c_str(), s.acc_rms);
    if (s.reduction_vs_passive != 0.0) std::printf("  reduction=%.2f%%", s.reduction_vs_passive);
    std::printf("  load=%.4f  |z1|max=%.4g m  envelope_violations=%zu", s.max_load_ratio,
                s.max_deflection, s.envelope_violation_count);
    if (s.mean_ctrl_eval_ns > 0) std::printf("  eval=%.0f ns", s.mean_ctrl_eval_ns);
    if (!s.fault.empty()) std::printf("  FAULT %s", s.fault.c_str());
    std::printf("\n");
}

int cmd_run(const CommonOpts& o) {
    const ExperimentConfig cfg = load(o);
    const ControllerConfig ctrl = cfg.controller.value_or(PassiveConfig{});
    Trajectory tr = run_closed_loop(cfg.plant, cfg.bio, ctrl, cfg.road, cfg.sim);
    tr.config_hash = cfg.hash;
    for (const auto& c : tr.initial_checks) {
        if (!c.ok) {
            std::fprintf(stderr, "warning: channel %d starts outside its envelope (|e0| = %g, limit %g)\n",
                         c.channel, std::abs(c.e0), c.limit);
        }
    }

    double passive_rms = 0.0;
    if (!std::holds_alternative<PassiveConfig>(ctrl)) {
        SimConfig s = cfg.sim;
        s.timing = false;
        const Trajectory p = run_closed_loop(cfg.plant, cfg.bio, PassiveConfig{}, cfg.road, s);
        if (!p.fault && !p.records.empty()) {
            passive_rms = rms(column_of(p.records, &Record::sprung_accel), s.dt * s.decimation);
        }
    }
    const RunSummary sum = summarize(tr, cfg.plant, ctrl, passive_rms, controller_kind(ctrl));
    const std::string traj_path = out_path(cfg, "_trajectory.csv");
    const std::string sum_path = out_path(cfg, "_summary.csv");
    write_trajectory_csv(traj_path, tr);
    write_summary_csv(sum_path, {sum});
    print_summary(sum);
    std::printf("wrote %s\nwrote %s\n", traj_path.c_str(), sum_path.c_str());
    if (tr.fault) {
        std::fprintf(stderr, "fault at t=%g in %s: %s\n", tr.fault->t, tr.fault->channel.c_str(),
                     tr.fault->message.c_str());
        return kFault;
    }
    return kOk;
}

int cmd_compare(const CommonOpts& o) {
    const ExperimentConfig cfg = load(o);
    const ExperimentSpec ex = cfg.experiment.value_or(ExperimentSpec{});
    const auto ctrls = experiment_controllers(cfg);
    const CompareResult res =
        run_compare(cfg.plant, cfg.bio, ctrls, cfg.road, cfg.sim, ex.velocities_kmh, ex.threads);

    const std::string table = out_path(cfg, "_compare.csv");
    const std::string runs = out_path(cfg, "_compare_runs.csv");
    {
        std::ofstream os(table);
        if (!os) throw ConfigError("cannot write " + table);
        write_compare_csv(os, res);
    }
    write_summary_csv(runs, res.cells);
    write_compare_csv(std::cout, res);
    std::printf("wrote %s\nwrote %s\n", table.c_str(), runs.c_str());
    return kOk;
}

int cmd_sweep(const CommonOpts& o) {
    const ExperimentConfig cfg = load(o);
    if (!cfg.experiment || cfg.experiment->masses.empty()) {
        throw ConfigError("experiment.masses: required for sweep");
    }
    const auto cells = mass_sweep(cfg.plant, cfg.bio, experiment_controllers(cfg), cfg.road, cfg.sim,
                                  cfg.experiment->masses, cfg.experiment->threads);
    const std::string path = out_path(cfg, "_sweep.csv");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    os << "ms,controller,acc_rms,rate,fault\n";
    std::printf("%8s %-12s %14s %10s\n", "ms", "controller", "acc_rms", "rate");
    for (const auto& c : cells) {
        std::string fault = c.error.empty() ? (c.fault ? c.fault->channel : "") : c.error;
        for (char& ch : fault) {
            if (ch == ',' || ch == '\n') ch = ' ';
        }
        char line[256];
        std::snprintf(line, sizeof line, "%.17g,%s,%.17g,%.17g,%s\n", c.ms, c.controller.c_str(),
                      c.acc_rms, c.rate, fault.c_str());
        os << line;
        std::printf("%8.1f %-12s %14.6g %10.4f %s\n", c.ms, c.controller.c_str(), c.acc_rms, c.rate,
                    fault.c_str());
    }
    std::printf("wrote %s\n", path.c_str());
    return kOk;
}

// Peak base acceleration of an analytic road [m/s^2]; nullopt for random roads.
std::optional<double> road_accel_amplitude(const RoadSpec& r) {
    if (const auto* b = std::get_if<BumpRoadSpec>(&r)) {
        const double w = 2.0 * M_PI * b->V / b->l;
        return 0.5 * b->alpha * w * w;
    }
    if (const auto* s = std::get_if<SineRoadSpec>(&r)) {
        const double w = 2.0 * M_PI * s->freq;
        return s->amplitude * w * w;
    }
    if (std::holds_alternative<FlatRoadSpec>(r)) return 0.0;
    return std::nullopt;
}

int cmd_check(const CommonOpts& o) {
    const ExperimentConfig cfg = load(o);
    auto ctrls = experiment_controllers(cfg);
    bool all_ok = true;
    auto line = [&](bool ok, const std::string& what) {
        all_ok = all_ok && ok;
        std::printf("%s  %s\n", ok ? "PASS" : "FAIL", what.c_str());
    };
    char buf[256];

    std::printf("initial-value conditions  min(dL, dU) rho(0) > |e(0)|\n");
    for (const auto& [label, c] : ctrls) {
        for (const auto& chk : initial_checks(c, cfg.sim.x0, cfg.sim.y0)) {
            std::snprintf(buf, sizeof buf, "%s channel %d: |e(0)| = %.6g, limit = %.6g", label.c_str(),
                          chk.channel, std::abs(chk.e0), chk.limit);
            line(chk.ok, buf);
        }
    }

    // Defaults for controller families the config does not list.
    ConvergenceInputs in;
    {
        const FacConfig f;
        const FacPpfConfig fp;
        const ApproxFreeConfig a;
        in.lambda1 = f.lambda1;
        in.lambda2 = f.lambda2;
        in.gamma1 = fp.gamma1;
        in.gamma2 = fp.gamma2;
        in.a = fp.bounds.delta_L;
        in.b = fp.bounds.delta_U;
        in.fac_ppf = fp.ppf;
        in.k1 = a.k1;
        in.k2 = a.k2;
        in.rho1 = a.ppf1.upper;
        in.rho2 = a.ppf2.upper;
    }
    for (const auto& [label, c] : ctrls) {
        if (const auto* f = std::get_if<FacConfig>(&c)) {
            in.lambda1 = f->lambda1;
            in.lambda2 = f->lambda2;
        } else if (const auto* f = std::get_if<FacPpfConfig>(&c)) {
            in.gamma1 = f->gamma1;
            in.gamma2 = f->gamma2;
            in.a = f->bounds.delta_L;
            in.b = f->bounds.delta_U;
            in.fac_ppf = f->ppf;
        } else if (const auto* a = std::get_if<ApproxFreeConfig>(&c)) {
            in.k1 = a->k1;
            in.k2 = a->k2;
            in.rho1 = a->ppf1.upper;
            in.rho2 = a->ppf2.upper;
            const ControlOutput out = approx_free_control(*a, 0.0, cfg.sim.x0, cfg.sim.y0);
            in.xi10 = out.diag.xi1;
            in.xi20 = out.diag.xi2;
        }
    }
    std::printf("gain conditions\n");
    for (const auto& c : convergence_conditions(in).conditions) {
        std::snprintf(buf, sizeof buf, "%s = %.6g", c.name.c_str(), c.value + 0.0);
        line(c.ok, buf);
    }

    std::printf("reference-model boundedness\n");
    const ReferenceBound lb = reference_bound(cfg.bio);
    const double radius = reference_domain_radius(cfg.bio);
    const double admissible = lb.delta_max(radius);
    std::printf("      domain |y1| < %.6g m, vartheta = %.6g 1/m, zeta = %.6g 1/s^2, admissible base "
                "acceleration at the domain edge = %.6g m/s^2\n",
                radius, lb.vartheta, lb.zeta, admissible);
    if (const auto amp = road_accel_amplitude(cfg.road)) {
        std::snprintf(buf, sizeof buf, "road acceleration amplitude %.6g m/s^2 <= %.6g m/s^2", *amp,
                      admissible);
        line(*amp <= admissible, buf);
    } else {
        std::printf("n/a   random road: acceleration is not amplitude-bounded\n");
    }
    if (cfg.sim.disturbance) {
        const double amp = cfg.sim.disturbance_mode == DisturbanceMode::force ? 1.2 / cfg.plant.ms : 1.2;
        std::printf("      sprung disturbance amplitude %.6g m/s^2 (%s mode)\n", amp,
                    cfg.sim.disturbance_mode == DisturbanceMode::force ? "force" : "acceleration");
    }
    std::printf("%s\n", all_ok ? "all conditions hold" : "some conditions fail");
    return kOk;
}

struct PlotOpts {
    std::string csv;
    std::string config;
    std::string out_dir = ".";
    std::vector<std::string> signals;
};

int cmd_plot(const PlotOpts& o) {
    if (o.signals.empty()) return kOk;
    const CsvTable tab = read_csv(o.csv);
    for (const auto& s : o.signals) tab.column(s);  // named error before any output
    const std::vector<double> t = tab.series("t");

    std::vector<EnvelopeChannel> channels;
    if (!o.config.empty()) {
        CommonOpts co;
        co.config = o.config;
        const ExperimentConfig cfg = load(co);
        if (cfg.controller) channels = envelope_channels(*cfg.controller);
    }

    fs::create_directories(o.out_dir);
    const std::string stem = fs::path(o.csv).stem().string();
    for (const auto& sig : o.signals) {
        std::vector<PlotSeries> series;
        series.push_back({sig, t, tab.series(sig), false, "#1f77b4"});
        for (const auto& ch : channels) {
            if (sig != "e" + std::to_string(ch.channel)) continue;
            PlotSeries lo{"lower bound", t, {}, true, "#2ca02c"};
            PlotSeries hi{"upper bound", t, {}, true, "#2ca02c"};
            for (double tt : t) {
                const ErrorLimits lim = error_limits(ch.band, ch.bounds, tt);
                lo.y.push_back(lim.lower);
                hi.y.push_back(lim.upper);
            }
            series.push_back(std::move(hi));
            series.push_back(std::move(lo));
        }
        PlotSpec spec;
        spec.title = stem + ": " + sig;
        spec.y_label = sig;
        const std::string path = (fs::path(o.out_dir) / (stem + "_" + sig + ".svg")).string();
        write_svg(path, spec, series);
        std::printf("wrote %s\n", path.c_str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bioinspired-reference suspension simulator"};
    app.require_subcommand(1);

    CommonOpts run_o, cmp_o, sweep_o, check_o;
    PlotOpts plot_o;
    auto* run = app.add_subcommand("run", "single closed-loop run; writes trajectory and summary CSV");
    add_common(run, run_o);
    auto* cmp = app.add_subcommand("compare", "passive vs controllers across road speeds");
    add_common(cmp, cmp_o);
    auto* sweep = app.add_subcommand("sweep", "sprung-mass sweep");
    add_common(sweep, sweep_o);
    auto* check = app.add_subcommand("check", "initial-value, gain and boundedness conditions");
    add_common(check, check_o);
    auto* plot = app.add_subcommand("plot", "SVG plots of trajectory columns");
    plot->add_option("--csv", plot_o.csv, "trajectory CSV")->required();
    plot->add_option("--signals", plot_o.signals, "columns to plot")->delimiter(',');
    plot->add_option("--config", plot_o.config, "config whose controller supplies envelope bands");
    plot->add_option("--out-dir", plot_o.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return cmd_run(run_o);
        if (*cmp) return cmd_compare(cmp_o);
        if (*sweep) return cmd_sweep(sweep_o);
        if (*check) return cmd_check(check_o);
        if (*plot) return cmd_plot(plot_o);
    } catch (const ConfigError& e) {
        for (const auto& issue : e.issues()) std::fprintf(stderr, "config error: %s\n", issue.c_str());
        return kConfig;
    } catch (const FaultError& e) {
        std::fprintf(stderr, "fault in %s: %s\n", e.channel().c_str(), e.what());
        return kFault;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "fault: %s\n", e.what());
        return kFault;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    }
    return kOk;
}
