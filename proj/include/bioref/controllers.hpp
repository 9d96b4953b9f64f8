// Control laws for the suspension tracking the bioinspired reference.
//
//  - Passive: u = 0.
//  - ApproxFree: three-step prescribed-performance recursion with no
//    function approximator; each step feeds the log-ratio transformed error
//    of the previous one into the next virtual control.
//  - Fac: backstepping with a fuzzy logic system estimating the lumped
//    nonlinearity and an online weight law.
//  - FacPpf: the same fuzzy backstepping on PPF-transformed coordinates.
//
// All laws are pure functions of (t, plant, reference, weights). The
// adaptive weights live in the caller's state vector.
#pragma once

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bioref/bio.hpp"
#include "bioref/plant.hpp"
#include "bioref/ppf.hpp"

namespace bioref {

inline constexpr double kNominalTheta = 1.0 / 240.0;

struct PassiveConfig {};

struct ApproxFreeConfig {
    double k1 = 0.01;
    double k2 = 0.083;
    double k3 = 0.834;
    PpfBand ppf1{{0.001, 0.0001, 17.0}, {}};
    PpfBand ppf2{{0.55, 0.1, 15.0}, {}};
    PpfBand ppf3{{1.1, 0.95, 12.0}, {}};
    TransformBounds bounds1;
    TransformBounds bounds2;
    TransformBounds bounds3;
    double theta_nominal = kNominalTheta;  // 1/ms the controller is designed for

    void validate() const;
};

/// Gaussian memberships on a grid, product inference, normalized basis.
/// Input i is divided by `scale[i]` before membership evaluation.
struct FlsConfig {
    std::vector<double> centers1{-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<double> centers2{-1.0, -0.5, 0.0, 0.5, 1.0};
    double width = 0.5;
    std::array<double, 2> scale{0.01, 0.1};

    std::size_t rule_count() const noexcept { return centers1.size() * centers2.size(); }
    void validate(const std::string& where) const;
};

/// Sign of the weight update. `negative`: w_hat' = -e phi, the usual
/// published form. `positive`: w_hat' = +e phi, the sign that cancels the
/// weight-error cross term for the control laws as written.
enum class WeightLaw { negative, positive };

struct FacConfig {
    double lambda1 = 100.0;
    double lambda2 = 100.0;
    FlsConfig fls;
    WeightLaw weight_law = WeightLaw::negative;
    double theta_nominal = kNominalTheta;

    void validate() const;
};

struct FacPpfConfig {
    double gamma1 = 100.0;
    double gamma2 = 100.0;
    FlsConfig fls;
    WeightLaw weight_law = WeightLaw::negative;
    double theta_nominal = kNominalTheta;
    PpfSpec ppf{0.1, 0.001, 5.0};
    TransformBounds bounds;  // (a, b) = (delta_L, delta_U)

    void validate() const;
};

using ControllerConfig = std::variant<PassiveConfig, ApproxFreeConfig, FacConfig, FacPpfConfig>;

std::string controller_kind(const ControllerConfig& c);
void validate_controller(const ControllerConfig& c);

/// Number of adaptive weights carried in the integrator state.
std::size_t adaptive_weight_count(const ControllerConfig& c) noexcept;

struct ControlDiagnostics {
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    double xi1 = 0.0, xi2 = 0.0, xi3 = 0.0;
    double eps1 = 0.0, eps2 = 0.0, eps3 = 0.0;
    double u1 = 0.0, u2 = 0.0, u = 0.0;
    std::array<bool, 3> clamped{false, false, false};
    bool magnitude_condition_ok = true;  // |u| > |u1 + u2|
    bool fls_fallback = false;

    int clamp_count() const noexcept { return int(clamped[0]) + int(clamped[1]) + int(clamped[2]); }
};

struct ControlOutput {
    double u = 0.0;
    ControlDiagnostics diag;
};

ControlOutput approx_free_control(const ApproxFreeConfig& cfg, double t, const PlantState& plant,
                                  const ReferenceState& ref);

struct FlsResult {
    double estimate = 0.0;  // w_hat . phi
    bool fallback = false;  // firing vanished, phi set uniform
};

/// Writes the normalized basis into `phi` (size rule_count()).
FlsResult fls_eval(const FlsConfig& fls, double in1, double in2, std::span<const double> w_hat,
                   std::span<double> phi);

/// Basis only, for inspection.
std::vector<double> fls_basis(const FlsConfig& fls, double in1, double in2);

/// Writes the weight rate into `w_hat_dot`; `phi` is scratch of rule_count().
ControlOutput fac_control(const FacConfig& cfg, std::span<const double> w_hat,
                          const PlantState& plant, const ReferenceState& ref,
                          std::span<double> w_hat_dot, std::span<double> phi);

ControlOutput fac_ppf_control(const FacPpfConfig& cfg, std::span<const double> w_hat, double t,
                              const PlantState& plant, const ReferenceState& ref,
                              std::span<double> w_hat_dot, std::span<double> phi);

/// Dispatch on the variant. `w_hat`, `w_hat_dot`, `phi` may be empty for
/// non-adaptive laws.
ControlOutput evaluate_controller(const ControllerConfig& cfg, double t, const PlantState& plant,
                                  const ReferenceState& ref, std::span<const double> w_hat,
                                  std::span<double> w_hat_dot, std::span<double> phi);

struct LyapunovSample {
    double v_eps = 0.0;  // (eps1^2 + eps2^2 + eps3^2) / 2
    double v_e = 0.0;    // (e1^2 + e2^2) / 2
};

// The weight-error term of the adaptive laws needs the unknown ideal weights
// and is not included.
LyapunovSample lyapunov_values(const ControlDiagnostics& d) noexcept;
std::vector<LyapunovSample> lyapunov_series(std::span<const ControlDiagnostics> diags);

}  // namespace bioref
