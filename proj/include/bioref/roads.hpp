// Road profiles and the sprung-mass force disturbance.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>

namespace bioref {

struct RoadSample {
    double zr = 0.0;           // [m]
    double zr_dot = 0.0;       // [m/s]
    double zr_ddot_est = 0.0;  // [m/s^2]
};

enum class NoiseMode {
    sampled,  // unit-variance sample held for `hold` seconds
    wiener,   // increment dW ~ N(0, dt) every step
};

/// Filtered white noise: zr' = -2 pi nz V zr + 2 pi n0 sqrt(Gz V) w(t).
struct RandomRoadSpec {
    double nz = 1e-4;     // cut-off spatial frequency [1/m]
    double n0 = 0.1;      // reference spatial frequency [1/m]
    double Gz = 256e-6;   // roughness PSD at n0 [m^3]
    double V = 100.0 / 3.6;
    NoiseMode noise = NoiseMode::sampled;
    double hold = 1e-3;   // [s], sampled mode only

    double decay() const noexcept;  // 2 pi nz V
    double gain() const noexcept;   // 2 pi n0 sqrt(Gz V)
};

/// Single cosine bump of height alpha/2 and length l crossed at speed V.
struct BumpRoadSpec {
    double alpha = 0.1;
    double l = 5.0;
    double V = 40.0 / 3.6;
};

struct SineRoadSpec {
    double amplitude = 0.025;
    double freq = 1.0;  // [Hz]
};

struct FlatRoadSpec {};

using RoadSpec = std::variant<FlatRoadSpec, RandomRoadSpec, BumpRoadSpec, SineRoadSpec>;

void validate_road(const RoadSpec& r);
std::string road_kind(const RoadSpec& r);

inline constexpr double kmh_to_ms(double v_kmh) noexcept { return v_kmh / 3.6; }

RoadSample bump_road(const BumpRoadSpec& s, double t) noexcept;
RoadSample sine_road(const SineRoadSpec& s, double t) noexcept;

/// Road with its speed replaced (random and bump only).
RoadSpec with_speed(const RoadSpec& r, double v_ms);

/// w(t) = sin(3 pi t) + 0.2 sin(30 pi t) when enabled [N].
double sprung_disturbance(double t, bool enabled) noexcept;

/// Euler-Maruyama generator for the filtered-noise road. The sample returned
/// by `step` is the value at the start of the step; it is held for the whole
/// integration step and the state then advances by dt.
class RandomRoad {
public:
    RandomRoad(const RandomRoadSpec& spec, std::uint64_t seed, double zr0 = 0.0);

    RoadSample step(double dt);
    double zr() const noexcept { return zr_; }

private:
    RandomRoadSpec spec_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    double zr_;
    double zr_dot_prev_ = 0.0;
    double omega_ = 0.0;
    double held_for_ = 0.0;
    bool first_ = true;
};

/// Stateful road source for a run: random roads advance by step, analytic
/// roads are evaluated at the requested time.
class RoadSource {
public:
    RoadSource(const RoadSpec& spec, std::uint64_t seed);

    /// Called once at the start of each integration step.
    void begin_step(double t, double dt);
    /// Sample at time t inside the current step.
    RoadSample at(double t) const noexcept;

private:
    RoadSpec spec_;
    std::variant<std::monostate, RandomRoad> random_;
    RoadSample held_;
};

}  // namespace bioref
