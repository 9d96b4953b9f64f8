// Prescribed performance functions and the log-ratio error transform.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bioref {

/// rho(t) = (rho0 - rho_inf) exp(-l t) + rho_inf
struct PpfSpec {
    double rho0 = 1.0;
    double rho_inf = 0.1;
    double l = 1.0;

    void validate(const std::string& where) const;
};

double rho(const PpfSpec& s, double t) noexcept;
double rho_dot(const PpfSpec& s, double t) noexcept;
double rho_ddot(const PpfSpec& s, double t) noexcept;

/// Performance band for one error channel: symmetric when `lower` is empty,
/// otherwise asymmetric with its own lower function (or a
/// constant lower bound).
struct PpfBand {
    PpfSpec upper;
    std::optional<std::variant<double, PpfSpec>> lower;

    bool asymmetric() const noexcept { return lower.has_value(); }
    double upper_at(double t) const noexcept { return rho(upper, t); }
    double lower_at(double t) const noexcept;
    void validate(const std::string& where) const;
};

struct TransformBounds {
    double delta_L = 1.0;
    double delta_U = 1.0;

    void validate(const std::string& where) const;
};

/// Distance kept from the open interval ends before taking the log.
inline constexpr double kClampMargin = 1e-9;

/// Symmetric: e / rho. Throws ConfigError if rho <= 0.
double normalized_error(double e, double rho_value);

/// Asymmetric: (e - (rU - rL)/2) / ((rU + rL)/2). Throws ConfigError if
/// either bound is non-positive.
double normalized_error(double e, double rho_upper, double rho_lower);

double normalized_error(double e, const PpfBand& band, double t);

struct TransformResult {
    double eps = 0.0;
    double xi_used = 0.0;  // after clamping
    bool clamped = false;
};

/// eps = ln((dL + xi) / (dU - xi)), with xi clamped into
/// [-dL + kClampMargin, dU - kClampMargin].
TransformResult transform(double xi, const TransformBounds& b) noexcept;

/// Exact inverse of `transform` on the open interval:
/// xi = (dU e^eps - dL) / (e^eps + 1).
double inverse_transform(double eps, const TransformBounds& b) noexcept;

/// Closed-form xi interval implied by |eps| <= eps_bar.
struct XiInterval {
    double lower;
    double upper;
};
XiInterval xi_interval(double eps_bar, const TransformBounds& b) noexcept;

/// Error-space limits of the band at time t (xi = -dL and xi = dU).
struct ErrorLimits {
    double lower;
    double upper;
};
ErrorLimits error_limits(const PpfBand& band, const TransformBounds& b, double t) noexcept;

struct InitialCheck {
    bool ok = false;
    double margin = 0.0;  // min(dL, dU) rho0 - |e0|
};

/// min(dL, dU) * rho(0) > |e0|, using the upper function for asymmetric bands.
InitialCheck validate_initial(double e0, const PpfBand& band, const TransformBounds& b) noexcept;

// ---------------------------------------------------------------------------
// Gain feasibility for the fuzzy-vs-PPF convergence comparison.

struct ConvergenceInputs {
    // FAC with PPF vs plain FAC
    double gamma1 = 1.0;
    double gamma2 = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double a = 1.0;
    double b = 1.0;
    PpfSpec fac_ppf;
    // approximation-free controller at t = 0
    double k1 = 1.0;
    double k2 = 1.0;
    PpfSpec rho1;
    PpfSpec rho2;
    double xi10 = 0.0;
    double xi20 = 0.0;
};

struct ConditionResult {
    std::string name;
    double value = 0.0;  // left-hand side; condition is value >= 0
    bool ok = false;
};

struct FeasibilityReport {
    std::vector<ConditionResult> conditions;
    bool all_ok() const noexcept;
};

FeasibilityReport convergence_conditions(const ConvergenceInputs& in);

}  // namespace bioref
