#include "bioref/roads.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "bioref/errors.hpp"

namespace bioref {

using std::numbers::pi;

double RandomRoadSpec::decay() const noexcept { return 2.0 * pi * nz * V; }
double RandomRoadSpec::gain() const noexcept { return 2.0 * pi * n0 * std::sqrt(Gz * V); }

void validate_road(const RoadSpec& r) {
    std::vector<std::string> issues;
    if (const auto* s = std::get_if<RandomRoadSpec>(&r)) {
        if (!(s->V > 0)) issues.emplace_back("road.V must be > 0");
        if (!(s->nz >= 0)) issues.emplace_back("road.nz must be >= 0");
        if (!(s->n0 >= 0)) issues.emplace_back("road.n0 must be >= 0");
        if (!(s->Gz >= 0)) issues.emplace_back("road.Gz must be >= 0");
        if (s->noise == NoiseMode::sampled && !(s->hold > 0)) {
            issues.emplace_back("road.hold must be > 0");
        }
    } else if (const auto* b = std::get_if<BumpRoadSpec>(&r)) {
        if (!(b->V > 0)) issues.emplace_back("road.V must be > 0");
        if (!(b->alpha > 0)) issues.emplace_back("road.alpha must be > 0");
        if (!(b->l > 0)) issues.emplace_back("road.l must be > 0");
    } else if (const auto* s = std::get_if<SineRoadSpec>(&r)) {
        if (!(s->amplitude >= 0)) issues.emplace_back("road.amplitude must be >= 0");
        if (!(s->freq >= 0)) issues.emplace_back("road.freq must be >= 0");
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::string road_kind(const RoadSpec& r) {
    switch (r.index()) {
        case 1: return "random";
        case 2: return "bump";
        case 3: return "sine";
        default: return "flat";
    }
}

RoadSample bump_road(const BumpRoadSpec& s, double t) noexcept {
    const double end = s.l / s.V;
    if (t < 0.0 || t > end) return {};
    const double w = 2.0 * pi * s.V / s.l;
    return {0.25 * s.alpha * (1.0 - std::cos(w * t)), 0.25 * s.alpha * w * std::sin(w * t),
            0.25 * s.alpha * w * w * std::cos(w * t)};
}

RoadSample sine_road(const SineRoadSpec& s, double t) noexcept {
    const double w = 2.0 * pi * s.freq;
    const double z = s.amplitude * std::sin(w * t);
    return {z, s.amplitude * w * std::cos(w * t), -w * w * z};
}

double sprung_disturbance(double t, bool enabled) noexcept {
    if (!enabled) return 0.0;
    return std::sin(3.0 * pi * t) + 0.2 * std::sin(30.0 * pi * t);
}

RandomRoad::RandomRoad(const RandomRoadSpec& spec, std::uint64_t seed, double zr0)
    : spec_(spec), rng_(seed), zr_(zr0) {}

RoadSample RandomRoad::step(double dt) {
    if (spec_.noise == NoiseMode::wiener) {
        omega_ = normal_(rng_) / std::sqrt(dt);  // dW / dt
    } else if (first_ || held_for_ >= spec_.hold - 0.5 * dt) {
        omega_ = normal_(rng_);
        held_for_ = 0.0;
    }
    held_for_ += dt;

    RoadSample s;
    s.zr = zr_;
    s.zr_dot = -spec_.decay() * zr_ + spec_.gain() * omega_;
    s.zr_ddot_est = first_ ? 0.0 : (s.zr_dot - zr_dot_prev_) / dt;
    zr_dot_prev_ = s.zr_dot;
    first_ = false;

    zr_ += dt * s.zr_dot;
    return s;
}

RoadSource::RoadSource(const RoadSpec& spec, std::uint64_t seed) : spec_(spec) {
    if (const auto* r = std::get_if<RandomRoadSpec>(&spec_)) random_.emplace<RandomRoad>(*r, seed);
}

void RoadSource::begin_step(double /*t*/, double dt) {
    if (auto* r = std::get_if<RandomRoad>(&random_)) held_ = r->step(dt);
}

RoadSample RoadSource::at(double t) const noexcept {
    switch (spec_.index()) {
        case 1: return held_;
        case 2: return bump_road(std::get<BumpRoadSpec>(spec_), t);
        case 3: return sine_road(std::get<SineRoadSpec>(spec_), t);
        default: return {};
    }
}

RoadSpec with_speed(const RoadSpec& r, double v_ms) {
    RoadSpec out = r;
    if (auto* s = std::get_if<RandomRoadSpec>(&out)) s->V = v_ms;
    if (auto* s = std::get_if<BumpRoadSpec>(&out)) s->V = v_ms;
    return out;
}

}  // namespace bioref
