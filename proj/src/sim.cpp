#include "bioref/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bioref/metrics.hpp"
#include "bioref/parallel.hpp"

namespace bioref {

void SimConfig::validate() const {
    std::vector<std::string> issues;
    if (!(dt > 0.0)) issues.emplace_back("sim.dt must be > 0");
    if (!(T >= dt)) issues.emplace_back("sim.T must be >= sim.dt");
    if (decimation < 1) issues.emplace_back("sim.decimation must be >= 1");
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::size_t SimConfig::step_count() const noexcept {
    return std::size_t(std::floor(T / dt + 1e-9));
}

std::size_t SimConfig::record_count() const noexcept {
    return step_count() / std::size_t(decimation) + 1;
}

std::string routing_name(Routing r) {
    return r == Routing::road_accel ? "road_accel" : "unsprung_accel";
}

const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols{
        "t",    "zr",   "zr_dot", "x1", "x2",   "x3",         "x4",          "y1",
        "y2",   "z1",   "z2",     "e1", "e2",   "e3",         "xi1",         "xi2",
        "xi3",  "eps1", "eps2",   "eps3", "u",  "u1",         "u2",          "Ft",
        "Fb",   "load_ratio",     "sprung_accel", "V_eps",    "V_e",         "w_hat_norm"};
    return cols;
}

std::vector<double> record_values(const Record& r) {
    return {r.t,    r.zr,   r.zr_dot, r.x1,  r.x2,         r.x3,           r.x4,  r.y1,
            r.y2,   r.z1,   r.z2,     r.e1,  r.e2,         r.e3,           r.xi1, r.xi2,
            r.xi3,  r.eps1, r.eps2,   r.eps3, r.u,         r.u1,           r.u2,  r.Ft,
            r.Fb,   r.load_ratio,     r.sprung_accel,      r.V_eps,        r.V_e, r.w_hat_norm};
}

Record record_from_values(std::span<const double> v) {
    if (v.size() != trajectory_columns().size()) {
        throw ConfigError("trajectory row has " + std::to_string(v.size()) + " values, expected " +
                          std::to_string(trajectory_columns().size()));
    }
    Record r;
    double* f[] = {&r.t,    &r.zr,   &r.zr_dot, &r.x1,  &r.x2,   &r.x3,         &r.x4,
                   &r.y1,   &r.y2,   &r.z1,     &r.z2,  &r.e1,   &r.e2,         &r.e3,
                   &r.xi1,  &r.xi2,  &r.xi3,    &r.eps1, &r.eps2, &r.eps3,      &r.u,
                   &r.u1,   &r.u2,   &r.Ft,     &r.Fb,  &r.load_ratio, &r.sprung_accel,
                   &r.V_eps, &r.V_e, &r.w_hat_norm};
    for (std::size_t i = 0; i < v.size(); ++i) *f[i] = v[i];
    return r;
}

std::vector<InitialChannelCheck> initial_checks(const ControllerConfig& ctrl,
                                                const PlantState& x0, const ReferenceState& y0) {
    std::vector<InitialChannelCheck> out;
    if (const auto* c = std::get_if<ApproxFreeConfig>(&ctrl)) {
        const ControlOutput o = approx_free_control(*c, 0.0, x0, y0);
        const double e[3] = {o.diag.e1, o.diag.e2, o.diag.e3};
        const PpfBand* bands[3] = {&c->ppf1, &c->ppf2, &c->ppf3};
        const TransformBounds* bounds[3] = {&c->bounds1, &c->bounds2, &c->bounds3};
        for (int i = 0; i < 3; ++i) {
            const InitialCheck chk = validate_initial(e[i], *bands[i], *bounds[i]);
            out.push_back({i + 1, e[i], chk.margin + std::abs(e[i]), chk.ok});
        }
    } else if (const auto* c = std::get_if<FacPpfConfig>(&ctrl)) {
        const double e = relative_state(x0).z1 - y0.y1;
        const InitialCheck chk = validate_initial(e, PpfBand{c->ppf, {}}, c->bounds);
        out.push_back({1, e, chk.margin + std::abs(e), chk.ok});
    }
    return out;
}

namespace {

constexpr std::size_t kPlant = 4;
constexpr std::size_t kRef = 2;
constexpr std::size_t kBase = kPlant + kRef;

std::int64_t clock_overhead_ns() {
    using clock = std::chrono::steady_clock;
    std::int64_t best = INT64_MAX;
    for (int i = 0; i < 2000; ++i) {
        const auto a = clock::now();
        const auto b = clock::now();
        best = std::min<std::int64_t>(best, std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
    }
    return best;
}

double norm_inf(std::span<const double> w) {
    double m = 0.0;
    for (double v : w) m = std::max(m, std::abs(v));
    return m;
}

double norm2(std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += v * v;
    return std::sqrt(s);
}

// Everything computed at the first RK4 stage that the log needs.
struct StageCapture {
    RoadSample road;
    ControlDiagnostics diag;
    TireForces tire;
    double u = 0.0;
    double sprung_accel = 0.0;
    double base_accel = 0.0;
};

}  // namespace

Trajectory run_closed_loop(const SuspensionParams& plant, const BioParams& bio,
                           const ControllerConfig& ctrl, const RoadSpec& road,
                           const SimConfig& sim) {
    plant.validate();
    bio.validate();
    validate_controller(ctrl);
    validate_road(road);
    sim.validate();

    Trajectory tr;
    tr.seed = sim.seed;
    tr.dt = sim.dt;
    tr.decimation = sim.decimation;
    tr.initial_checks = initial_checks(ctrl, sim.x0, sim.y0);
    if (sim.initial_check == InitialCheckMode::enforce) {
        std::vector<std::string> issues;
        for (const auto& c : tr.initial_checks) {
            if (!c.ok) {
                issues.push_back("initial error of channel " + std::to_string(c.channel) + " (" +
                                 std::to_string(c.e0) + ") is outside its envelope (limit " +
                                 std::to_string(c.limit) + ")");
            }
        }
        if (!issues.empty()) throw ConfigError(std::move(issues));
    }

    const std::size_t nw = adaptive_weight_count(ctrl);
    const std::size_t n = kBase + nw;
    std::vector<double> y(n, 0.0);
    y[0] = sim.x0.x1;
    if (sim.passive_at_rest && std::holds_alternative<PassiveConfig>(ctrl)) {
        y[0] += static_deflection(plant);
    }
    y[1] = sim.x0.x2;
    y[2] = sim.x0.x3;
    y[3] = sim.x0.x4;
    y[4] = sim.y0.y1;
    y[5] = sim.y0.y2;

    RoadSource src(road, sim.seed);
    const ReferenceBound bound = reference_bound(bio);
    const std::int64_t overhead = sim.timing ? clock_overhead_ns() : 0;
    const std::size_t steps = sim.step_count();
    tr.records.reserve(sim.record_count());
    // Keep at most ~2M timing samples by striding through the evaluations.
    const std::size_t time_stride = std::max<std::size_t>(1, 4 * steps / 2'000'000);
    std::size_t eval_count = 0;
    if (sim.timing) tr.eval_ns.reserve(4 * steps / time_stride + 8);

    std::vector<double> phi(nw, 0.0);
    std::vector<double> w_dot_scratch(nw, 0.0);
    std::vector<double> w_dot_held(nw, 0.0);
    double u_held = 0.0;
    StageCapture cap;
    const double w_scale = sim.disturbance_mode == DisturbanceMode::acceleration ? plant.ms : 1.0;

    auto deriv = [&](int stage, double t, std::span<const double> s, std::span<double> d) {
        const PlantState x{s[0], s[1], s[2], s[3]};
        const ReferenceState ref{s[4], s[5]};
        const RoadSample rs = src.at(t);
        const std::span<const double> w_hat = s.subspan(kBase);
        const std::span<double> w_dot = d.subspan(kBase);

        double u = u_held;
        ControlDiagnostics diag;
        if (!sim.zoh || stage == 0) {
            ControlOutput out;
            if (sim.timing && eval_count++ % time_stride == 0) {
                const auto a = std::chrono::steady_clock::now();
                out = evaluate_controller(ctrl, t, x, ref, w_hat, w_dot_scratch, phi);
                const auto b = std::chrono::steady_clock::now();
                const std::int64_t ns =
                    std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count() - overhead;
                tr.eval_ns.push_back(std::uint32_t(std::clamp<std::int64_t>(ns, 0, UINT32_MAX)));
            } else {
                out = evaluate_controller(ctrl, t, x, ref, w_hat, w_dot_scratch, phi);
            }
            u = out.u;
            diag = out.diag;
            u_held = u;
            std::copy(w_dot_scratch.begin(), w_dot_scratch.end(), w_dot_held.begin());
            if (diag.clamp_count() > 0) ++tr.clamp_events;
            if (diag.fls_fallback) ++tr.fls_fallbacks;
        }
        std::copy(w_dot_held.begin(), w_dot_held.end(), w_dot.begin());

        const double w = sprung_disturbance(t, sim.disturbance) * w_scale;
        const PlantState dx = plant_deriv(plant, x, {u, rs.zr, rs.zr_dot, w});
        const double base = sim.routing == Routing::unsprung_accel ? dx.x4 : rs.zr_ddot_est;
        const ReferenceState dy = bio_deriv(bio, ref, base);
        d[0] = dx.x1;
        d[1] = dx.x2;
        d[2] = dx.x3;
        d[3] = dx.x4;
        d[4] = dy.y1;
        d[5] = dy.y2;

        if (stage == 0) {
            cap.road = rs;
            cap.diag = diag;
            cap.tire = tire_forces(plant, x.x3, x.x4, rs.zr, rs.zr_dot);
            cap.u = u;
            cap.sprung_accel = dx.x2;
            cap.base_accel = base;
        }
    };

    const double weight = (plant.ms + plant.mu) * plant.g;
    auto log_record = [&](double t) {
        Record r;
        r.t = t;
        r.zr = cap.road.zr;
        r.zr_dot = cap.road.zr_dot;
        r.x1 = y[0];
        r.x2 = y[1];
        r.x3 = y[2];
        r.x4 = y[3];
        r.y1 = y[4];
        r.y2 = y[5];
        r.z1 = y[0] - y[2];
        r.z2 = y[1] - y[3];
        const ControlDiagnostics& d = cap.diag;
        r.e1 = d.e1;
        r.e2 = d.e2;
        r.e3 = d.e3;
        r.xi1 = d.xi1;
        r.xi2 = d.xi2;
        r.xi3 = d.xi3;
        r.eps1 = d.eps1;
        r.eps2 = d.eps2;
        r.eps3 = d.eps3;
        r.u = cap.u;
        r.u1 = d.u1;
        r.u2 = d.u2;
        r.Ft = cap.tire.ft;
        r.Fb = cap.tire.fb;
        r.load_ratio = (cap.tire.ft + cap.tire.fb) / weight;
        r.sprung_accel = cap.sprung_accel;
        const LyapunovSample lv = lyapunov_values(d);
        r.V_eps = lv.v_eps;
        r.V_e = lv.v_e;
        const std::span<const double> w_hat(y.data() + kBase, nw);
        r.w_hat_norm = norm2(w_hat);
        tr.max_abs_w_hat = std::max(tr.max_abs_w_hat, norm_inf(w_hat));
        if (std::holds_alternative<ApproxFreeConfig>(ctrl) && !d.magnitude_condition_ok) {
            ++tr.magnitude_condition_misses;
        }

        const double ynorm = std::hypot(r.y1, r.y2);
        tr.reference.max_abs_y1 = std::max(tr.reference.max_abs_y1, std::abs(r.y1));
        tr.reference.max_y_norm = std::max(tr.reference.max_y_norm, ynorm);
        if (!in_reference_domain(bio, r.y1)) ++tr.reference.domain_exits;
        if (std::abs(cap.base_accel) > bound.delta_max(ynorm)) ++tr.reference.bound_exceeded;
        tr.records.push_back(r);
    };

    Rk4Workspace ws;
    ws.resize(n);
    const std::size_t dec = std::size_t(sim.decimation);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = double(k) * sim.dt;
        try {
            src.begin_step(t, sim.dt);
            if (k == steps) {
                // Final sample: evaluate once for the log, no step.
                deriv(0, t, std::span<const double>(y), std::span<double>(ws.k1));
                if (k % dec == 0) log_record(t);
                break;
            }
            rk4_step(
                [&](int stage, double tt, std::span<const double> s, std::span<double> d) {
                    deriv(stage, tt, s, d);
                    if (stage == 0 && k % dec == 0) log_record(tt);
                },
                std::span<double>(y), t, sim.dt, ws);
        } catch (const FaultError& e) {
            tr.fault = Fault{t, e.channel(), e.what()};
            break;
        } catch (const DomainError& e) {
            tr.fault = Fault{t, "y1", e.what()};
            break;
        }
    }
    return tr;
}

// ---------------------------------------------------------------------------
// CSV

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "# seed=" << tr.seed << " config_hash=" << (tr.config_hash.empty() ? "0" : tr.config_hash)
       << '\n';
    const auto& cols = trajectory_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    char buf[40];
    std::string line;
    for (const Record& r : tr.records) {
        line.clear();
        const std::vector<double> v = record_values(r);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) line += ',';
            std::snprintf(buf, sizeof buf, "%.17g", v[i]);
            line += buf;
        }
        line += '\n';
        os << line;
    }
    if (tr.fault) {
        os << "# fault t=" << tr.fault->t << " channel=" << tr.fault->channel << " message=\""
           << tr.fault->message << "\"\n";
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    write_trajectory_csv(os, tr);
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ConfigError("missing column '" + name + "'");
    return std::size_t(it - columns.begin());
}

std::vector<double> CsvTable::series(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string tok;
            while (ls >> tok) {
                if (tok.rfind("seed=", 0) == 0) t.seed = std::stoull(tok.substr(5));
                if (tok.rfind("config_hash=", 0) == 0) t.config_hash = tok.substr(12);
            }
            continue;
        }
        if (!have_header) {
            t.columns = split(line, ',');
            have_header = true;
            continue;
        }
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() != t.columns.size()) {
            throw ConfigError("csv line " + std::to_string(lineno) + ": " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.columns.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (end == c.c_str()) {
                throw ConfigError("csv line " + std::to_string(lineno) + ": '" + c + "' is not a number");
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw ConfigError("csv has no header row");
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read " + path);
    return read_csv(is);
}

std::vector<Record> read_trajectory_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const auto& cols = trajectory_columns();
    std::vector<std::size_t> idx;
    for (const auto& c : cols) idx.push_back(t.column(c));
    std::vector<Record> out;
    out.reserve(t.rows.size());
    std::vector<double> v(cols.size());
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < idx.size(); ++i) v[i] = row[idx[i]];
        out.push_back(record_from_values(v));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<SweepCell> mass_sweep(const SuspensionParams& plant, const BioParams& bio,
                                  const std::vector<std::pair<std::string, ControllerConfig>>& ctrls,
                                  const RoadSpec& road, const SimConfig& sim,
                                  const std::vector<double>& masses, int threads) {
    if (masses.empty()) throw ConfigError("mass sweep: mass list is empty");
    std::vector<std::pair<std::string, ControllerConfig>> all;
    all.emplace_back("passive", PassiveConfig{});
    for (const auto& c : ctrls) {
        if (!std::holds_alternative<PassiveConfig>(c.second)) all.push_back(c);
    }
    const std::size_t nc = all.size();
    std::vector<SweepCell> cells(masses.size() * nc);
    SimConfig s = sim;
    s.timing = false;

    parallel_for(cells.size(), threads, [&](std::size_t i) {
        SweepCell& cell = cells[i];
        cell.ms = masses[i / nc];
        cell.controller = all[i % nc].first;
        try {
            SuspensionParams p = plant;
            p.ms = cell.ms;
            const Trajectory tr = run_closed_loop(p, bio, all[i % nc].second, road, s);
            cell.fault = tr.fault;
            std::vector<double> acc;
            acc.reserve(tr.records.size());
            for (const auto& r : tr.records) acc.push_back(r.sprung_accel);
            if (!acc.empty()) cell.acc_rms = rms(acc, s.dt * s.decimation);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });

    for (std::size_t m = 0; m < masses.size(); ++m) {
        const double base = cells[m * nc].acc_rms;
        for (std::size_t c = 0; c < nc; ++c) {
            SweepCell& cell = cells[m * nc + c];
            cell.rate = base > 0.0 ? cell.acc_rms / base : NAN;
        }
    }
    return cells;
}

}  // namespace bioref
