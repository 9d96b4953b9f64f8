// Post-processing of completed runs.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bioref/controllers.hpp"
#include "bioref/plant.hpp"
#include "bioref/sim.hpp"

namespace bioref {

/// sqrt(integral of x^2 / T) with trapezoidal accumulation on a uniform grid.
/// Throws ConfigError on an empty series.
double rms(std::span<const double> x, double dt);

/// (1 - value / passive) * 100
double reduction_percent(double value, double passive) noexcept;

struct SafetyReport {
    double max_load_ratio = 0.0;  // max |Ft + Fb| / ((ms + mu) g)
    double max_deflection = 0.0;  // max |z1|
    bool load_ok = true;
    bool deflection_ok = true;
    bool pass() const noexcept { return load_ok && deflection_ok; }
};

SafetyReport safety_report(std::span<const Record> records, const SuspensionParams& p);

/// One tracked error and the band it must stay in.
struct EnvelopeChannel {
    int channel = 1;  // 1..3 selects e1..e3
    PpfBand band;
    TransformBounds bounds;
};

/// Bands configured on a controller (none for passive and plain fuzzy).
std::vector<EnvelopeChannel> envelope_channels(const ControllerConfig& c);

struct EnvelopeReport {
    std::size_t violations = 0;
    std::optional<double> first_violation_t;
    std::vector<std::size_t> per_channel;
};

EnvelopeReport envelope_report(std::span<const Record> records,
                               std::span<const EnvelopeChannel> channels);

struct TimingStats {
    std::size_t count = 0;
    double mean_ns = 0.0;
    double median_ns = 0.0;
    double p99_ns = 0.0;
};

TimingStats timing_stats(std::span<const std::uint32_t> ns);

/// Least-squares slope of v against t.
double linear_fit_slope(std::span<const double> t, std::span<const double> v);

/// Slope of the Lyapunov value over [t0, t1]. Uses V_eps when `eps` is set,
/// V_e otherwise.
double lyapunov_decay_slope(std::span<const Record> records, double t0, double t1, bool eps);

/// First time after which |x1| stays below `tol` until the end, if any.
std::optional<double> settling_time(std::span<const Record> records, double tol);

struct RunSummary {
    std::string label;
    std::string controller;
    double acc_rms = 0.0;
    double reduction_vs_passive = 0.0;
    double max_load_ratio = 0.0;
    double max_deflection = 0.0;
    bool safety_ok = true;
    std::size_t envelope_violation_count = 0;
    double mean_ctrl_eval_ns = 0.0;
    double median_ctrl_eval_ns = 0.0;
    double p99_ctrl_eval_ns = 0.0;
    double lyapunov_decay_slope = 0.0;
    std::size_t clamp_events = 0;
    double max_abs_w_hat = 0.0;
    std::string fault;
};

/// `passive_rms` <= 0 leaves the reduction at 0.
RunSummary summarize(const Trajectory& tr, const SuspensionParams& p, const ControllerConfig& c,
                     double passive_rms, const std::string& label = "");

void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& rows);
void write_summary_csv(const std::string& path, const std::vector<RunSummary>& rows);

std::vector<double> column_of(std::span<const Record> records, double Record::*field);

}  // namespace bioref
