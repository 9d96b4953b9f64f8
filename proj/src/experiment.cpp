#include "bioref/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "bioref/parallel.hpp"

namespace bioref {

std::size_t CompareResult::label_index(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return i;
    }
    throw ConfigError("no controller labelled '" + label + "' in the comparison");
}

CompareResult run_compare(const SuspensionParams& plant, const BioParams& bio,
                          const std::vector<std::pair<std::string, ControllerConfig>>& ctrls,
                          const RoadSpec& road, const SimConfig& sim,
                          const std::vector<double>& velocities_kmh, int threads) {
    if (velocities_kmh.empty()) throw ConfigError("compare: velocity list is empty");
    std::vector<std::pair<std::string, ControllerConfig>> all;
    all.emplace_back("passive", PassiveConfig{});
    for (const auto& c : ctrls) {
        if (!std::holds_alternative<PassiveConfig>(c.second)) all.push_back(c);
    }

    CompareResult res;
    res.velocities_kmh = velocities_kmh;
    for (const auto& [label, cfg] : all) {
        res.labels.push_back(label);
        res.kinds.push_back(controller_kind(cfg));
    }
    const std::size_t nc = all.size();
    const std::size_t n = velocities_kmh.size() * nc;
    res.cells.resize(n);
    res.errors.resize(n);
    std::vector<Trajectory> trajs(n);

    parallel_for(n, threads, [&](std::size_t i) {
        const std::size_t v = i / nc;
        try {
            trajs[i] = run_closed_loop(plant, bio, all[i % nc].second,
                                       with_speed(road, kmh_to_ms(velocities_kmh[v])), sim);
        } catch (const std::exception& e) {
            res.errors[i] = e.what();
        }
    });

    // Summaries after all runs so each row can refer to its passive cell.
    for (std::size_t v = 0; v < velocities_kmh.size(); ++v) {
        double passive = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            const std::size_t i = v * nc + c;
            char label[96];
            std::snprintf(label, sizeof label, "%s@%gkmh", all[c].first.c_str(), velocities_kmh[v]);
            if (!res.errors[i].empty()) {
                res.cells[i].label = label;
                res.cells[i].controller = res.kinds[c];
                res.cells[i].acc_rms = NAN;
                res.cells[i].reduction_vs_passive = NAN;
                res.cells[i].fault = "refused: " + res.errors[i];
                continue;
            }
            res.cells[i] = summarize(trajs[i], plant, all[c].second, c == 0 ? 0.0 : passive, label);
            if (trajs[i].fault) {
                res.cells[i].acc_rms = NAN;
                res.cells[i].reduction_vs_passive = NAN;
            }
            if (c == 0) passive = res.cells[i].acc_rms;
            trajs[i] = Trajectory{};
        }
    }
    return res;
}

void write_compare_csv(std::ostream& os, const CompareResult& r) {
    std::ptrdiff_t af = -1, fz = -1;
    for (std::size_t c = 0; c < r.kinds.size(); ++c) {
        if (af < 0 && r.kinds[c] == "approx_free") af = std::ptrdiff_t(c);
        if (fz < 0 && (r.kinds[c] == "fac" || r.kinds[c] == "fac_ppf")) fz = std::ptrdiff_t(c);
    }
    os << "V_kmh,passive";
    for (std::size_t c = 1; c < r.labels.size(); ++c) os << ',' << r.labels[c] << ',' << r.labels[c] << "_reduction";
    for (std::size_t c = 1; c < r.labels.size(); ++c) os << ',' << r.labels[c] << "_mean_eval_ns";
    if (af >= 0 && fz >= 0) os << ",timing_ratio";
    os << ",faults\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t v = 0; v < r.velocities_kmh.size(); ++v) {
        os << num(r.velocities_kmh[v]) << ',' << num(r.at(v, 0).acc_rms);
        for (std::size_t c = 1; c < r.labels.size(); ++c) {
            os << ',' << num(r.at(v, c).acc_rms) << ',' << num(r.at(v, c).reduction_vs_passive);
        }
        for (std::size_t c = 1; c < r.labels.size(); ++c) os << ',' << num(r.at(v, c).mean_ctrl_eval_ns);
        if (af >= 0 && fz >= 0) {
            const double den = r.at(v, std::size_t(fz)).mean_ctrl_eval_ns;
            os << ',' << num(den > 0 ? r.at(v, std::size_t(af)).mean_ctrl_eval_ns / den : NAN);
        }
        std::string faults;
        for (std::size_t c = 0; c < r.labels.size(); ++c) {
            if (r.at(v, c).fault.empty()) continue;
            if (!faults.empty()) faults += "; ";
            faults += r.labels[c] + ": " + r.at(v, c).fault;
        }
        // keep the field CSV-safe
        for (char& ch : faults) {
            if (ch == ',' || ch == '\n') ch = ' ';
        }
        os << ',' << faults << '\n';
    }
}

}  // namespace bioref
