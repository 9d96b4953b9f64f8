#include "bioref/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "bioref/errors.hpp"

namespace bioref {

double rms(std::span<const double> x, double dt) {
    if (x.empty()) throw ConfigError("rms of an empty series");
    if (x.size() == 1) return std::abs(x[0]);
    double acc = 0.0;
    for (double v : x) acc += v * v;
    acc -= 0.5 * (x.front() * x.front() + x.back() * x.back());
    const double T = dt * double(x.size() - 1);
    return std::sqrt(acc * dt / T);
}

double reduction_percent(double value, double passive) noexcept {
    return (1.0 - value / passive) * 100.0;
}

SafetyReport safety_report(std::span<const Record> records, const SuspensionParams& p) {
    SafetyReport r;
    const double weight = (p.ms + p.mu) * p.g;
    for (const Record& rec : records) {
        r.max_load_ratio = std::max(r.max_load_ratio, std::abs(rec.Ft + rec.Fb) / weight);
        r.max_deflection = std::max(r.max_deflection, std::abs(rec.z1));
    }
    r.load_ok = r.max_load_ratio < 1.0;
    r.deflection_ok = r.max_deflection < p.zmax;
    return r;
}

std::vector<EnvelopeChannel> envelope_channels(const ControllerConfig& c) {
    std::vector<EnvelopeChannel> out;
    if (const auto* a = std::get_if<ApproxFreeConfig>(&c)) {
        out.push_back({1, a->ppf1, a->bounds1});
        out.push_back({2, a->ppf2, a->bounds2});
        out.push_back({3, a->ppf3, a->bounds3});
    } else if (const auto* f = std::get_if<FacPpfConfig>(&c)) {
        out.push_back({1, PpfBand{f->ppf, {}}, f->bounds});
    }
    return out;
}

EnvelopeReport envelope_report(std::span<const Record> records,
                               std::span<const EnvelopeChannel> channels) {
    EnvelopeReport rep;
    rep.per_channel.assign(channels.size(), 0);
    for (const Record& r : records) {
        bool any = false;
        for (std::size_t i = 0; i < channels.size(); ++i) {
            const EnvelopeChannel& ch = channels[i];
            const double e = ch.channel == 1 ? r.e1 : ch.channel == 2 ? r.e2 : r.e3;
            const ErrorLimits lim = error_limits(ch.band, ch.bounds, r.t);
            if (!(e > lim.lower && e < lim.upper)) {
                ++rep.per_channel[i];
                any = true;
            }
        }
        if (any) {
            ++rep.violations;
            if (!rep.first_violation_t) rep.first_violation_t = r.t;
        }
    }
    return rep;
}

TimingStats timing_stats(std::span<const std::uint32_t> ns) {
    TimingStats s;
    s.count = ns.size();
    if (ns.empty()) return s;
    std::vector<std::uint32_t> v(ns.begin(), ns.end());
    s.mean_ns = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    auto nth = [&](double q) {
        const std::size_t k = std::min(v.size() - 1, std::size_t(q * double(v.size() - 1) + 0.5));
        std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(k), v.end());
        return double(v[k]);
    };
    s.median_ns = nth(0.5);
    s.p99_ns = nth(0.99);
    return s;
}

double linear_fit_slope(std::span<const double> t, std::span<const double> v) {
    const std::size_t n = std::min(t.size(), v.size());
    if (n < 2) return 0.0;
    double mt = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += t[i];
        mv += v[i];
    }
    mt /= double(n);
    mv /= double(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (t[i] - mt) * (v[i] - mv);
        sxx += (t[i] - mt) * (t[i] - mt);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

double lyapunov_decay_slope(std::span<const Record> records, double t0, double t1, bool eps) {
    std::vector<double> t, v;
    for (const Record& r : records) {
        if (r.t < t0 || r.t > t1) continue;
        t.push_back(r.t);
        v.push_back(eps ? r.V_eps : r.V_e);
    }
    return linear_fit_slope(t, v);
}

std::optional<double> settling_time(std::span<const Record> records, double tol) {
    if (records.empty() || !(std::abs(records.back().x1) < tol)) return std::nullopt;
    std::size_t i = records.size();
    while (i > 0 && std::abs(records[i - 1].x1) < tol) --i;
    return records[i == records.size() ? i - 1 : i].t;
}

std::vector<double> column_of(std::span<const Record> records, double Record::*field) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const Record& r : records) out.push_back(r.*field);
    return out;
}

RunSummary summarize(const Trajectory& tr, const SuspensionParams& p, const ControllerConfig& c,
                     double passive_rms, const std::string& label) {
    RunSummary s;
    s.label = label;
    s.controller = controller_kind(c);
    const std::span<const Record> recs(tr.records);
    if (!recs.empty()) {
        s.acc_rms = rms(column_of(recs, &Record::sprung_accel), tr.dt * tr.decimation);
    }
    if (passive_rms > 0.0) s.reduction_vs_passive = reduction_percent(s.acc_rms, passive_rms);
    const SafetyReport sr = safety_report(recs, p);
    s.max_load_ratio = sr.max_load_ratio;
    s.max_deflection = sr.max_deflection;
    s.safety_ok = sr.pass();
    const auto ch = envelope_channels(c);
    s.envelope_violation_count = envelope_report(recs, ch).violations;
    const TimingStats ts = timing_stats(tr.eval_ns);
    s.mean_ctrl_eval_ns = ts.mean_ns;
    s.median_ctrl_eval_ns = ts.median_ns;
    s.p99_ctrl_eval_ns = ts.p99_ns;
    if (!recs.empty()) {
        const bool eps = std::holds_alternative<ApproxFreeConfig>(c);
        s.lyapunov_decay_slope = lyapunov_decay_slope(recs, 0.0, recs.back().t, eps);
    }
    s.clamp_events = tr.clamp_events;
    s.max_abs_w_hat = tr.max_abs_w_hat;
    if (tr.fault) s.fault = tr.fault->channel + " at t=" + std::to_string(tr.fault->t);
    return s;
}

void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& rows) {
    os << "label,controller,acc_rms,reduction_vs_passive,max_load_ratio,max_deflection,safety_ok,"
          "envelope_violation_count,mean_ctrl_eval_ns,median_ctrl_eval_ns,p99_ctrl_eval_ns,"
          "lyapunov_decay_slope,clamp_events,max_abs_w_hat,fault\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const RunSummary& r : rows) {
        os << r.label << ',' << r.controller << ',' << num(r.acc_rms) << ','
           << num(r.reduction_vs_passive) << ',' << num(r.max_load_ratio) << ','
           << num(r.max_deflection) << ',' << (r.safety_ok ? 1 : 0) << ','
           << r.envelope_violation_count << ',' << num(r.mean_ctrl_eval_ns) << ','
           << num(r.median_ctrl_eval_ns) << ',' << num(r.p99_ctrl_eval_ns) << ','
           << num(r.lyapunov_decay_slope) << ',' << r.clamp_events << ',' << num(r.max_abs_w_hat)
           << ',' << r.fault << '\n';
    }
}

void write_summary_csv(const std::string& path, const std::vector<RunSummary>& rows) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    write_summary_csv(os, rows);
}

}  // namespace bioref
