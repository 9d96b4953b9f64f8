#include "bioref/ppf.hpp"

#include <algorithm>
#include <cmath>

#include "bioref/errors.hpp"

namespace bioref {

void PpfSpec::validate(const std::string& where) const {
    std::vector<std::string> issues;
    if (!(rho_inf > 0.0)) issues.push_back(where + ": rho_inf must be > 0");
    if (!(rho0 > rho_inf)) issues.push_back(where + ": rho0 must exceed rho_inf");
    if (!(l > 0.0)) issues.push_back(where + ": l must be > 0");
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

double rho(const PpfSpec& s, double t) noexcept {
    return (s.rho0 - s.rho_inf) * std::exp(-s.l * t) + s.rho_inf;
}

double rho_dot(const PpfSpec& s, double t) noexcept {
    return -s.l * (s.rho0 - s.rho_inf) * std::exp(-s.l * t);
}

double rho_ddot(const PpfSpec& s, double t) noexcept {
    return s.l * s.l * (s.rho0 - s.rho_inf) * std::exp(-s.l * t);
}

double PpfBand::lower_at(double t) const noexcept {
    if (!lower) return rho(upper, t);
    if (const double* c = std::get_if<double>(&*lower)) return *c;
    return rho(std::get<PpfSpec>(*lower), t);
}

void PpfBand::validate(const std::string& where) const {
    upper.validate(where + ".upper");
    if (!lower) return;
    if (const double* c = std::get_if<double>(&*lower)) {
        if (!(*c > 0.0)) throw ConfigError(where + ": lower_const must be > 0");
    } else {
        std::get<PpfSpec>(*lower).validate(where + ".lower");
    }
}

void TransformBounds::validate(const std::string& where) const {
    if (!(delta_L > 0.0) || !(delta_U > 0.0)) {
        throw ConfigError(where + ": delta_L and delta_U must be > 0");
    }
}

double normalized_error(double e, double rho_value) {
    if (!(rho_value > 0.0)) throw ConfigError("ppf: performance bound must be > 0");
    return e / rho_value;
}

double normalized_error(double e, double rho_upper, double rho_lower) {
    if (!(rho_upper > 0.0) || !(rho_lower > 0.0)) {
        throw ConfigError("ppf: performance bounds must be > 0");
    }
    return (e - 0.5 * (rho_upper - rho_lower)) / (0.5 * (rho_upper + rho_lower));
}

double normalized_error(double e, const PpfBand& band, double t) {
    if (!band.asymmetric()) return normalized_error(e, band.upper_at(t));
    return normalized_error(e, band.upper_at(t), band.lower_at(t));
}

TransformResult transform(double xi, const TransformBounds& b) noexcept {
    TransformResult r;
    const double lo = -b.delta_L + kClampMargin;
    const double hi = b.delta_U - kClampMargin;
    r.xi_used = std::clamp(xi, lo, hi);
    // NaN input falls through clamp unchanged; treat it as a violation too.
    r.clamped = !(xi >= lo && xi <= hi);
    if (std::isnan(r.xi_used)) r.xi_used = 0.0;
    r.eps = std::log((b.delta_L + r.xi_used) / (b.delta_U - r.xi_used));
    return r;
}

double inverse_transform(double eps, const TransformBounds& b) noexcept {
    // Written in terms of exp(-|eps|) so both tails stay finite.
    if (eps >= 0.0) {
        const double q = std::exp(-eps);
        return (b.delta_U - b.delta_L * q) / (1.0 + q);
    }
    const double q = std::exp(eps);
    return (b.delta_U * q - b.delta_L) / (q + 1.0);
}

XiInterval xi_interval(double eps_bar, const TransformBounds& b) noexcept {
    const double em = std::exp(-eps_bar);
    const double ep = std::exp(eps_bar);
    return {(em * b.delta_U - b.delta_L) / (em + 1.0), (ep * b.delta_U - b.delta_L) / (ep + 1.0)};
}

ErrorLimits error_limits(const PpfBand& band, const TransformBounds& b, double t) noexcept {
    if (!band.asymmetric()) {
        const double r = band.upper_at(t);
        return {-b.delta_L * r, b.delta_U * r};
    }
    const double ru = band.upper_at(t);
    const double rl = band.lower_at(t);
    const double mid = 0.5 * (ru - rl);
    const double half = 0.5 * (ru + rl);
    return {mid - b.delta_L * half, mid + b.delta_U * half};
}

InitialCheck validate_initial(double e0, const PpfBand& band, const TransformBounds& b) noexcept {
    InitialCheck c;
    c.margin = std::min(b.delta_L, b.delta_U) * band.upper.rho0 - std::abs(e0);
    c.ok = c.margin > 0.0;
    return c;
}

bool FeasibilityReport::all_ok() const noexcept {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const ConditionResult& c) { return c.ok; });
}

FeasibilityReport convergence_conditions(const ConvergenceInputs& in) {
    FeasibilityReport rep;
    const double sum = in.a + in.b;
    const double c2 = 16.0 / (sum * sum);
    const double r0 = in.fac_ppf.rho0;
    const double rd0 = rho_dot(in.fac_ppf, 0.0);

    const double cond1 = in.gamma1 * c2 - in.lambda1 * r0 * r0;
    const double cond2 = in.gamma2 * c2 - in.lambda2 * r0 * r0;

    // e = lambda1 rho + rho' is the coefficient of xi in e2 = x_s2 + lambda1 x_s1.
    const double e = in.lambda1 * r0 + rd0;
    double cond3 = -INFINITY;
    if (cond2 > 0.0) {
        const double cross = in.gamma1 * in.gamma2 * c2 - in.lambda2 * e * r0;
        cond3 = in.gamma2 * in.gamma1 * in.gamma1 * c2 - in.lambda2 * e * e - cross * cross / cond2;
    }
    // Condition 3 is identically <= 0 and only reaches 0 in the limit, so it
    // is judged against a tolerance scaled by its leading term.
    const double tol3 = 1e-9 * std::max(1.0, std::abs(in.gamma2 * in.gamma1 * in.gamma1 * c2));

    rep.conditions.push_back({"(1) 16 gamma1/(a+b)^2 - lambda1 rho0^2", cond1, cond1 >= 0.0});
    rep.conditions.push_back({"(2) 16 gamma2/(a+b)^2 - lambda2 rho0^2", cond2, cond2 >= 0.0});
    rep.conditions.push_back({"(3) third quadratic-form coefficient at t=0", cond3, cond3 >= -tol3});
    const double d = std::abs(in.a - in.b);
    rep.conditions.push_back({"(4) a = b", -d, d <= 1e-12 * std::max(1.0, std::abs(in.a))});

    // Initial-position conditions for the approximation-free controller, a = dL = dU.
    const double a = in.a;
    const double rho10 = in.rho1.rho0;
    const double rho20 = in.rho2.rho0;
    const double r10 = 2.0 * a / ((a + in.xi10) * (a - in.xi10) * rho10);
    const double r20 = 2.0 * a / ((a + in.xi20) * (a - in.xi20) * rho20);
    const double l1 = in.lambda1;
    const double l2 = in.lambda2;

    const double first = 4.0 * r10 * in.k1 / (a * a) - l1 * l1 * l2 * rho10 * rho10 - l1 * rho10 * rho10;
    const double denom = 4.0 * r10 * in.k1 - a * a * l1 * l1 * l2 * rho10 * rho10 - a * a * l1 * rho10 * rho10;
    const double mu = l1 * l1 * l2 * l2 * rho10 * rho10 * rho20 * rho20 * a * a / denom;
    const double second = 4.0 * r20 * in.k2 / (a * a) - l2 * rho20 * rho20 - mu;

    rep.conditions.push_back({"(5) 4 r10 k1/a^2 - lambda1^2 lambda2 rho10^2 - lambda1 rho10^2", first,
                              first >= 0.0});
    rep.conditions.push_back({"(6) 4 r20 k2/a^2 - lambda2 rho20^2 - mu", second,
                              denom > 0.0 && second >= 0.0});
    return rep;
}

}  // namespace bioref
