#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bioref/errors.hpp"
#include "bioref/metrics.hpp"

using namespace bioref;

namespace {

std::vector<Record> records_with(std::size_t n, double dt) {
    std::vector<Record> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i].t = double(i) * dt;
    return r;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("rms of simple signals") {
    const std::vector<double> c(101, -2.5);
    CHECK(rms(c, 0.01) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(rms(std::vector<double>(50, 0.0), 0.1) == 0.0);

    const double dt = 1e-3;
    std::vector<double> s;
    for (int i = 0; i <= 3000; ++i) s.push_back(std::sin(2 * std::numbers::pi * i * dt));
    CHECK(rms(s, dt) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));

    std::vector<double> scaled = s;
    for (double& v : scaled) v *= -3.0;
    CHECK(rms(scaled, dt) == doctest::Approx(3.0 * rms(s, dt)).epsilon(1e-14));

    CHECK_THROWS_AS(rms(std::vector<double>{}, dt), ConfigError);
}

TEST_CASE("reduction against passive") {
    CHECK(reduction_percent(0.5, 2.0) == doctest::Approx(75.0));
    CHECK(reduction_percent(2.0, 2.0) == 0.0);
    CHECK(reduction_percent(3.0, 2.0) == doctest::Approx(-50.0));
}

TEST_CASE("safety thresholds") {
    const SuspensionParams p;
    const double weight = (p.ms + p.mu) * p.g;
    std::vector<Record> r = records_with(10, 0.01);
    CHECK(safety_report(r, p).pass());

    r[3].Ft = 1.1 * weight;
    SafetyReport s = safety_report(r, p);
    CHECK_FALSE(s.load_ok);
    CHECK(s.deflection_ok);
    CHECK(s.max_load_ratio == doctest::Approx(1.1));

    r[3].Ft = 0.0;
    r[5].z1 = -0.12;
    s = safety_report(r, p);
    CHECK(s.load_ok);
    CHECK_FALSE(s.deflection_ok);
    CHECK(s.max_deflection == doctest::Approx(0.12));
}

TEST_CASE("envelope counting") {
    ApproxFreeConfig a;
    const auto ch = envelope_channels(a);
    REQUIRE(ch.size() == 3);
    CHECK(envelope_channels(PassiveConfig{}).empty());
    CHECK(envelope_channels(FacConfig{}).empty());
    CHECK(envelope_channels(FacPpfConfig{}).size() == 1);

    std::vector<Record> r = records_with(100, 0.01);
    EnvelopeReport rep = envelope_report(r, ch);
    CHECK(rep.violations == 0);
    CHECK_FALSE(rep.first_violation_t);

    r[40].e2 = 10.0;  // far outside every e2 band
    r[60].e3 = -10.0;
    r[60].e1 = 1.0;
    rep = envelope_report(r, ch);
    CHECK(rep.violations == 2);
    REQUIRE(rep.first_violation_t);
    CHECK(*rep.first_violation_t == doctest::Approx(0.40));
    CHECK(rep.per_channel == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("timing statistics") {
    const std::vector<std::uint32_t> c(1000, 150);
    const TimingStats s = timing_stats(c);
    CHECK(s.count == 1000);
    CHECK(s.mean_ns == 150.0);
    CHECK(s.median_ns == 150.0);
    CHECK(s.p99_ns == 150.0);

    std::vector<std::uint32_t> ramp;
    for (std::uint32_t i = 1; i <= 101; ++i) ramp.push_back(i);
    const TimingStats r = timing_stats(ramp);
    CHECK(r.mean_ns == doctest::Approx(51.0));
    CHECK(r.median_ns == 51.0);
    CHECK(r.p99_ns == 100.0);
    CHECK(timing_stats({}).count == 0);
}

TEST_CASE("settling time") {
    std::vector<Record> r = records_with(11, 0.1);
    for (std::size_t i = 0; i < r.size(); ++i) r[i].x1 = 0.01 * double(10 - i);
    const auto ts = settling_time(r, 0.0355);
    REQUIRE(ts);
    CHECK(*ts == doctest::Approx(0.7));
    r.back().x1 = 0.5;
    CHECK_FALSE(settling_time(r, 0.0355));
}

TEST_CASE("Lyapunov slope") {
    std::vector<Record> r = records_with(200, 0.01);
    for (Record& x : r) {
        x.V_eps = 3.0 - 2.0 * x.t;
        x.V_e = 0.5 * x.t;
    }
    CHECK(lyapunov_decay_slope(r, 0.0, 2.0, true) == doctest::Approx(-2.0));
    CHECK(lyapunov_decay_slope(r, 0.5, 1.0, false) == doctest::Approx(0.5));
    CHECK(linear_fit_slope(std::vector<double>{1.0}, std::vector<double>{1.0}) == 0.0);
}

TEST_CASE("run summary and its CSV") {
    Trajectory tr;
    tr.dt = 0.01;
    tr.decimation = 1;
    tr.records = records_with(11, 0.01);
    for (Record& x : tr.records) x.sprung_accel = 2.0;
    tr.fault = Fault{0.1, "x2", "boom"};
    const RunSummary s = summarize(tr, {}, PassiveConfig{}, 4.0, "lbl");
    CHECK(s.acc_rms == doctest::Approx(2.0));
    CHECK(s.reduction_vs_passive == doctest::Approx(50.0));
    CHECK(s.controller == "passive");
    CHECK(s.fault.find("x2") == 0);

    std::ostringstream os;
    write_summary_csv(os, {s});
    const std::string text = os.str();
    CHECK(text.rfind("label,controller,acc_rms", 0) == 0);
    CHECK(text.find("\nlbl,passive,2,50,") != std::string::npos);
}

}
