#include "bioref/controllers.hpp"

#include <cmath>

#include "bioref/errors.hpp"

namespace bioref {

namespace {

void require_positive(std::vector<std::string>& issues, double v, const std::string& name) {
    if (!(v > 0.0) || !std::isfinite(v)) issues.push_back(name + " must be > 0");
}

template <class F>
void collect(std::vector<std::string>& issues, F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
}

void require_finite(double v, const char* channel) {
    if (!std::isfinite(v)) {
        throw FaultError(channel, std::string("non-finite controller signal '") + channel + "'");
    }
}

}  // namespace

void ApproxFreeConfig::validate() const {
    std::vector<std::string> issues;
    require_positive(issues, k1, "controller.k1");
    require_positive(issues, k2, "controller.k2");
    require_positive(issues, k3, "controller.k3");
    require_positive(issues, theta_nominal, "controller.theta_nominal");
    collect(issues, [&] { ppf1.validate("controller.ppf1"); });
    collect(issues, [&] { ppf2.validate("controller.ppf2"); });
    collect(issues, [&] { ppf3.validate("controller.ppf3"); });
    collect(issues, [&] { bounds1.validate("controller.bounds1"); });
    collect(issues, [&] { bounds2.validate("controller.bounds2"); });
    collect(issues, [&] { bounds3.validate("controller.bounds3"); });
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

void FlsConfig::validate(const std::string& where) const {
    std::vector<std::string> issues;
    if (centers1.size() < 2 || centers2.size() < 2) {
        issues.push_back(where + ": at least 2 centers per input");
    }
    require_positive(issues, width, where + ".width");
    require_positive(issues, scale[0], where + ".scale[0]");
    require_positive(issues, scale[1], where + ".scale[1]");
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

void FacConfig::validate() const {
    std::vector<std::string> issues;
    require_positive(issues, lambda1, "controller.lambda1");
    require_positive(issues, lambda2, "controller.lambda2");
    require_positive(issues, theta_nominal, "controller.theta_nominal");
    collect(issues, [&] { fls.validate("controller.fls"); });
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

void FacPpfConfig::validate() const {
    std::vector<std::string> issues;
    require_positive(issues, gamma1, "controller.gamma1");
    require_positive(issues, gamma2, "controller.gamma2");
    require_positive(issues, theta_nominal, "controller.theta_nominal");
    collect(issues, [&] { fls.validate("controller.fls"); });
    collect(issues, [&] { ppf.validate("controller.ppf"); });
    collect(issues, [&] { bounds.validate("controller.bounds"); });
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::string controller_kind(const ControllerConfig& c) {
    struct {
        std::string operator()(const PassiveConfig&) const { return "passive"; }
        std::string operator()(const ApproxFreeConfig&) const { return "approx_free"; }
        std::string operator()(const FacConfig&) const { return "fac"; }
        std::string operator()(const FacPpfConfig&) const { return "fac_ppf"; }
    } v;
    return std::visit(v, c);
}

void validate_controller(const ControllerConfig& c) {
    std::visit(
        [](const auto& cfg) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(cfg)>, PassiveConfig>) cfg.validate();
        },
        c);
}

std::size_t adaptive_weight_count(const ControllerConfig& c) noexcept {
    if (const auto* f = std::get_if<FacConfig>(&c)) return f->fls.rule_count();
    if (const auto* f = std::get_if<FacPpfConfig>(&c)) return f->fls.rule_count();
    return 0;
}

// ---------------------------------------------------------------------------

ControlOutput approx_free_control(const ApproxFreeConfig& cfg, double t, const PlantState& plant,
                                  const ReferenceState& ref) {
    const RelativeState z = relative_state(plant);
    ControlOutput out;
    ControlDiagnostics& d = out.diag;

    // Step 1: deflection error against the reference.
    d.e1 = z.z1 - ref.y1;
    d.xi1 = normalized_error(d.e1, cfg.ppf1, t);
    const TransformResult t1 = transform(d.xi1, cfg.bounds1);
    d.eps1 = t1.eps;
    d.clamped[0] = t1.clamped;
    d.u1 = -cfg.k1 * d.eps1;

    // Step 2: deflection-rate error shifted by the first virtual control.
    d.e2 = z.z2 - ref.y2 - d.u1;
    d.xi2 = normalized_error(d.e2, cfg.ppf2, t);
    const TransformResult t2 = transform(d.xi2, cfg.bounds2);
    d.eps2 = t2.eps;
    d.clamped[1] = t2.clamped;
    d.u2 = -(cfg.k2 / cfg.theta_nominal) * d.eps2;

    // Step 3: absolute sprung velocity against the second virtual control.
    d.e3 = plant.x2 - d.u2;
    d.xi3 = normalized_error(d.e3, cfg.ppf3, t);
    const TransformResult t3 = transform(d.xi3, cfg.bounds3);
    d.eps3 = t3.eps;
    d.clamped[2] = t3.clamped;
    d.u = -(cfg.k3 / cfg.theta_nominal) * d.eps3;

    d.magnitude_condition_ok = std::abs(d.u) > std::abs(d.u1 + d.u2);
    require_finite(d.u, "u");
    out.u = d.u;
    return out;
}

FlsResult fls_eval(const FlsConfig& fls, double in1, double in2, std::span<const double> w_hat,
                   std::span<double> phi) {
    const std::size_t n1 = fls.centers1.size();
    const std::size_t n2 = fls.centers2.size();
    const double s1 = in1 / fls.scale[0];
    const double s2 = in2 / fls.scale[1];
    const double inv_w = 1.0 / fls.width;

    // Product firing over the grid factorizes, so memberships are computed
    // once per input and the total is the product of the per-input sums.
    double m2[64];
    double sum1 = 0.0;
    double sum2 = 0.0;
    for (std::size_t j = 0; j < n2; ++j) {
        const double q = (s2 - fls.centers2[j]) * inv_w;
        m2[j] = std::exp(-q * q);
        sum2 += m2[j];
    }
    FlsResult r;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n1; ++i) {
        const double q = (s1 - fls.centers1[i]) * inv_w;
        const double m1 = std::exp(-q * q);
        sum1 += m1;
        for (std::size_t j = 0; j < n2; ++j) phi[k++] = m1 * m2[j];
    }
    const double total = sum1 * sum2;
    const std::size_t n = n1 * n2;
    if (!(total > 1e-300) || !std::isfinite(total)) {
        r.fallback = true;
        const double u = 1.0 / double(n);
        for (std::size_t i = 0; i < n; ++i) phi[i] = u;
    } else {
        const double inv = 1.0 / total;
        for (std::size_t i = 0; i < n; ++i) phi[i] *= inv;
    }
    if (!w_hat.empty()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += w_hat[i] * phi[i];
        r.estimate = acc;
    }
    return r;
}

std::vector<double> fls_basis(const FlsConfig& fls, double in1, double in2) {
    if (fls.centers2.size() > 64) throw ConfigError("fls: at most 64 centers on the second input");
    std::vector<double> phi(fls.rule_count());
    fls_eval(fls, in1, in2, {}, phi);
    return phi;
}

ControlOutput fac_control(const FacConfig& cfg, std::span<const double> w_hat,
                          const PlantState& plant, const ReferenceState& ref,
                          std::span<double> w_hat_dot, std::span<double> phi) {
    const RelativeState z = relative_state(plant);
    const double xs1 = z.z1 - ref.y1;
    const double xs2 = z.z2 - ref.y2;

    ControlOutput out;
    ControlDiagnostics& d = out.diag;
    d.e1 = xs1;
    const double alpha1 = -cfg.lambda1 * d.e1;
    const double alpha1_dot = -cfg.lambda1 * xs2;
    d.e2 = xs2 - alpha1;
    d.u1 = alpha1;

    const FlsResult fr = fls_eval(cfg.fls, xs1, xs2, w_hat, phi);
    d.fls_fallback = fr.fallback;
    d.u = (1.0 / cfg.theta_nominal) * (-cfg.lambda2 * d.e2 - d.e1 - fr.estimate + alpha1_dot);

    const std::size_t n = cfg.fls.rule_count();
    const double sgn = cfg.weight_law == WeightLaw::negative ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) w_hat_dot[i] = sgn * d.e2 * phi[i];

    require_finite(d.u, "u");
    out.u = d.u;
    return out;
}

ControlOutput fac_ppf_control(const FacPpfConfig& cfg, std::span<const double> w_hat, double t,
                              const PlantState& plant, const ReferenceState& ref,
                              std::span<double> w_hat_dot, std::span<double> phi) {
    const RelativeState z = relative_state(plant);
    const double xs1 = z.z1 - ref.y1;
    const double xs2 = z.z2 - ref.y2;
    const double a = cfg.bounds.delta_L;
    const double b = cfg.bounds.delta_U;
    const double r_t = rho(cfg.ppf, t);
    const double rd_t = rho_dot(cfg.ppf, t);

    ControlOutput out;
    ControlDiagnostics& d = out.diag;
    d.e1 = xs1;
    d.xi1 = normalized_error(xs1, r_t);
    const TransformResult tr = transform(d.xi1, cfg.bounds);
    d.clamped[0] = tr.clamped;
    const double xi = tr.xi_used;

    const double r = (a + b) / ((a + xi) * (b - xi) * r_t);
    const double eps_s1 = tr.eps;
    const double eps_s2 = r * (xs2 - xs1 * rd_t / r_t);
    const double s1 = eps_s1;
    const double alpha2 = -cfg.gamma1 * s1;
    const double alpha2_dot = -cfg.gamma1 * eps_s2;  // d(eps_s1)/dt = eps_s2
    const double s2 = eps_s2 - alpha2;

    d.eps1 = eps_s1;
    d.eps2 = eps_s2;
    d.e2 = s2;
    d.u1 = alpha2;

    const FlsResult fr = fls_eval(cfg.fls, xs1, xs2, w_hat, phi);
    d.fls_fallback = fr.fallback;
    d.u = (1.0 / (r * cfg.theta_nominal)) * (-cfg.gamma2 * s2 - s1 - fr.estimate + alpha2_dot);

    const std::size_t n = cfg.fls.rule_count();
    const double sgn = cfg.weight_law == WeightLaw::negative ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) w_hat_dot[i] = sgn * s2 * phi[i];

    require_finite(d.u, "u");
    out.u = d.u;
    return out;
}

ControlOutput evaluate_controller(const ControllerConfig& cfg, double t, const PlantState& plant,
                                  const ReferenceState& ref, std::span<const double> w_hat,
                                  std::span<double> w_hat_dot, std::span<double> phi) {
    switch (cfg.index()) {
        case 1:
            return approx_free_control(std::get<ApproxFreeConfig>(cfg), t, plant, ref);
        case 2:
            return fac_control(std::get<FacConfig>(cfg), w_hat, plant, ref, w_hat_dot, phi);
        case 3:
            return fac_ppf_control(std::get<FacPpfConfig>(cfg), w_hat, t, plant, ref, w_hat_dot, phi);
        default: {
            ControlOutput out;
            out.diag.e1 = relative_state(plant).z1 - ref.y1;
            out.diag.e2 = relative_state(plant).z2 - ref.y2;
            return out;
        }
    }
}

LyapunovSample lyapunov_values(const ControlDiagnostics& d) noexcept {
    return {0.5 * (d.eps1 * d.eps1 + d.eps2 * d.eps2 + d.eps3 * d.eps3),
            0.5 * (d.e1 * d.e1 + d.e2 * d.e2)};
}

std::vector<LyapunovSample> lyapunov_series(std::span<const ControlDiagnostics> diags) {
    std::vector<LyapunovSample> out;
    out.reserve(diags.size());
    for (const auto& d : diags) out.push_back(lyapunov_values(d));
    return out;
}

}  // namespace bioref
