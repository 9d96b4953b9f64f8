// Fixed-step closed-loop integration of plant + reference model + adaptive
// weights, with trajectory logging and per-evaluation controller timing.
#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bioref/bio.hpp"
#include "bioref/controllers.hpp"
#include "bioref/errors.hpp"
#include "bioref/plant.hpp"
#include "bioref/roads.hpp"

namespace bioref {

// ---------------------------------------------------------------------------
// RK4

struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, tmp;
    void resize(std::size_t n) {
        k1.resize(n);
        k2.resize(n);
        k3.resize(n);
        k4.resize(n);
        tmp.resize(n);
    }
};

/// Classical RK4 in place. `deriv(stage, t, y, dydt)` with stage in 0..3.
/// Throws FaultError("rk4 stage <k>") on a non-finite stage derivative.
template <class Deriv>
void rk4_step(Deriv&& deriv, std::span<double> y, double t, double dt, Rk4Workspace& ws) {
    const std::size_t n = y.size();
    ws.resize(n);
    auto check = [&](const std::vector<double>& k, int stage) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(k[i])) {
                throw FaultError("rk4 stage " + std::to_string(stage),
                                 "non-finite derivative in RK4 stage " + std::to_string(stage) +
                                     " at t = " + std::to_string(t));
            }
        }
    };
    deriv(0, t, std::span<const double>(y.data(), n), std::span<double>(ws.k1));
    check(ws.k1, 1);
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * dt * ws.k1[i];
    deriv(1, t + 0.5 * dt, std::span<const double>(ws.tmp), std::span<double>(ws.k2));
    check(ws.k2, 2);
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * dt * ws.k2[i];
    deriv(2, t + 0.5 * dt, std::span<const double>(ws.tmp), std::span<double>(ws.k3));
    check(ws.k3, 3);
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + dt * ws.k3[i];
    deriv(3, t + dt, std::span<const double>(ws.tmp), std::span<double>(ws.k4));
    check(ws.k4, 4);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += dt / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
    }
}

/// Convenience form for plain f(t, y) -> y' callables.
template <class F>
std::vector<double> rk4_step(F&& f, std::vector<double> y, double t, double dt) {
    Rk4Workspace ws;
    rk4_step(
        [&](int, double tt, std::span<const double> yy, std::span<double> dy) {
            const std::vector<double> d = f(tt, std::vector<double>(yy.begin(), yy.end()));
            std::copy(d.begin(), d.end(), dy.begin());
        },
        std::span<double>(y), t, dt, ws);
    return y;
}

// ---------------------------------------------------------------------------
// Configuration

/// What drives the base of the reference model.
enum class Routing {
    unsprung_accel,  // plant x4'
    road_accel,      // road profile second derivative
};

enum class InitialCheckMode { enforce, warn };

/// Units of the sprung-mass disturbance signal: a force in N (x2' += w/ms)
/// or an acceleration in m/s^2 (x2' += w).
enum class DisturbanceMode { force, acceleration };

struct SimConfig {
    double dt = 1e-4;
    double T = 50.0;
    Routing routing = Routing::unsprung_accel;
    bool disturbance = false;
    DisturbanceMode disturbance_mode = DisturbanceMode::force;
    std::uint64_t seed = 1;
    int decimation = 10;
    bool zoh = false;     // hold u (and the weight rate) over each step
    bool timing = true;
    PlantState x0;
    ReferenceState y0;
    InitialCheckMode initial_check = InitialCheckMode::enforce;
    // Passive runs start with the sprung mass resting at the plant's stable
    // static deflection instead of at x0 (the zero-deflection point is an
    // unstable equilibrium when ks1 < 0).
    bool passive_at_rest = true;

    void validate() const;
    std::size_t step_count() const noexcept;
    std::size_t record_count() const noexcept;
};

std::string routing_name(Routing r);

// ---------------------------------------------------------------------------
// Trajectory

struct Record {
    double t = 0, zr = 0, zr_dot = 0;
    double x1 = 0, x2 = 0, x3 = 0, x4 = 0;
    double y1 = 0, y2 = 0, z1 = 0, z2 = 0;
    double e1 = 0, e2 = 0, e3 = 0;
    double xi1 = 0, xi2 = 0, xi3 = 0;
    double eps1 = 0, eps2 = 0, eps3 = 0;
    double u = 0, u1 = 0, u2 = 0;
    double Ft = 0, Fb = 0, load_ratio = 0, sprung_accel = 0;
    double V_eps = 0, V_e = 0, w_hat_norm = 0;
};

/// Column names in CSV order.
const std::vector<std::string>& trajectory_columns();
std::vector<double> record_values(const Record& r);
Record record_from_values(std::span<const double> v);

struct Fault {
    double t = 0.0;
    std::string channel;
    std::string message;
};

struct InitialChannelCheck {
    int channel = 0;
    double e0 = 0.0;
    double limit = 0.0;  // min(dL, dU) rho0
    bool ok = true;
};

struct ReferenceMonitor {
    std::size_t domain_exits = 0;     // logged samples with |y1| outside the domain
    std::size_t bound_exceeded = 0;   // |base accel| > delta_max(|y|)
    double max_abs_y1 = 0.0;
    double max_y_norm = 0.0;
};

struct Trajectory {
    std::vector<Record> records;
    std::optional<Fault> fault;
    std::vector<InitialChannelCheck> initial_checks;
    ReferenceMonitor reference;
    std::size_t clamp_events = 0;               // stage evaluations with a clamped xi
    std::size_t magnitude_condition_misses = 0;  // logged samples with |u| <= |u1 + u2|
    std::size_t fls_fallbacks = 0;
    double max_abs_w_hat = 0.0;
    std::vector<std::uint32_t> eval_ns;  // controller evaluation durations
    std::uint64_t seed = 0;
    std::string config_hash;  // filled by the caller
    double dt = 0.0;
    int decimation = 1;
};

/// Initial-error checks for every PPF channel of the controller.
std::vector<InitialChannelCheck> initial_checks(const ControllerConfig& ctrl,
                                                const PlantState& x0, const ReferenceState& y0);

/// Integrates the coupled system. Throws ConfigError for invalid inputs or,
/// with InitialCheckMode::enforce, when an initial error starts outside its
/// envelope. Mid-run faults truncate the trajectory and set `fault`.
Trajectory run_closed_loop(const SuspensionParams& plant, const BioParams& bio,
                           const ControllerConfig& ctrl, const RoadSpec& road,
                           const SimConfig& sim);

// ---------------------------------------------------------------------------
// CSV

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
void write_trajectory_csv(const std::string& path, const Trajectory& tr);

struct CsvTable {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Index of a column; throws ConfigError naming it when absent.
    std::size_t column(const std::string& name) const;
    std::vector<double> series(const std::string& name) const;
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv(const std::string& path);

/// Records back from a trajectory CSV.
std::vector<Record> read_trajectory_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Mass sweep

struct SweepCell {
    double ms = 0.0;
    std::string controller;
    double acc_rms = 0.0;
    double rate = 0.0;  // acc_rms / passive acc_rms at the same mass
    std::optional<Fault> fault;
    std::string error;
};

/// One run per (mass, controller). The controllers keep their nominal theta;
/// only the plant mass changes. Faults and errors are collected per cell.
std::vector<SweepCell> mass_sweep(const SuspensionParams& plant, const BioParams& bio,
                                  const std::vector<std::pair<std::string, ControllerConfig>>& ctrls,
                                  const RoadSpec& road, const SimConfig& sim,
                                  const std::vector<double>& masses, int threads = 0);

}  // namespace bioref
