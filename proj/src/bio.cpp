#include "bioref/bio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bioref/errors.hpp"

namespace bioref {

void BioParams::validate() const {
    std::vector<std::string> issues;
    auto need = [&](bool ok, const char* what) {
        if (!ok) issues.emplace_back(std::string("bio.") + what);
    };
    need(M > 0, "M must be > 0");
    need(L1 > 0 && L1 < L2, "rod lengths must satisfy 0 < L1 < L2");
    need(theta1 > 0 && theta1 < std::numbers::pi / 2, "theta1 must lie in (0, pi/2)");
    need(L1 * std::sin(theta1) <= L2, "L1 sin(theta1) must not exceed L2");
    need(kh >= 0 && kv >= 0, "kh, kv must be >= 0");
    need(mu1 >= 0 && mu2 >= 0, "mu1, mu2 must be >= 0");
    need(nx >= 1, "nx must be >= 1");
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

double theta2(const BioParams& p) {
    const double s = p.L1 * std::sin(p.theta1) / p.L2;
    if (!(s >= -1.0 && s <= 1.0)) {
        throw ConfigError("bio: linkage cannot close, L1 sin(theta1) > L2");
    }
    return std::asin(s);
}

namespace {

struct Geometry {
    double v;
    double sigma1;
    double sigma2;
};

// v(y1) = L1 sin(theta1) + y1/2, sigma_i = sqrt(Li^2 - v^2)
Geometry geometry(const BioParams& p, double y1) {
    const double v = p.L1 * std::sin(p.theta1) + 0.5 * y1;
    const double s1 = p.L1 * p.L1 - v * v;
    const double s2 = p.L2 * p.L2 - v * v;
    if (!(s1 > 0.0) || !(s2 > 0.0)) {
        throw DomainError("bio: linkage cannot close at y1 = " + std::to_string(y1) + " m");
    }
    return {v, std::sqrt(s1), std::sqrt(s2)};
}

}  // namespace

double h1(const BioParams& p, double y1) {
    const Geometry gm = geometry(p, y1);
    const double rest = p.L1 * std::cos(p.theta1) + p.L2 * std::cos(theta2(p));
    return 0.5 * p.kh * (rest - gm.sigma1 - gm.sigma2) * (gm.v / gm.sigma1 + gm.v / gm.sigma2);
}

double h2(const BioParams& p, double y1) {
    const Geometry gm = geometry(p, y1);
    return 0.5 / gm.sigma1 + 0.5 / gm.sigma2;
}

double f_restoring(const BioParams& p, double y1) { return h1(p, y1) + p.kv * y1; }

double g_damping(const BioParams& p, double y1, double y2) {
    return p.mu1 * y2 + p.mu2 * p.nx * h2(p, y1) * y2;
}

ReferenceState bio_deriv(const BioParams& p, const ReferenceState& s, double base_accel) {
    // Single geometry evaluation for both terms; this runs at every RK4 stage.
    const Geometry gm = geometry(p, s.y1);
    const double rest = p.L1 * std::cos(p.theta1) + p.L2 * std::cos(theta2(p));
    const double h1v =
        0.5 * p.kh * (rest - gm.sigma1 - gm.sigma2) * (gm.v / gm.sigma1 + gm.v / gm.sigma2);
    const double h2v = 0.5 / gm.sigma1 + 0.5 / gm.sigma2;
    const double f = h1v + p.kv * s.y1;
    const double g = p.mu1 * s.y2 + p.mu2 * p.nx * h2v * s.y2;
    return {s.y2, -(f + g) / p.M - base_accel};
}

double reference_domain_radius(const BioParams& p) noexcept {
    const double s = std::sin(p.theta1);
    return std::min(p.L1 * s, p.L1 * (1.0 - s));
}

bool in_reference_domain(const BioParams& p, double y1) noexcept {
    return std::abs(y1) < reference_domain_radius(p);
}

double ReferenceBound::delta_max(double y_norm) const noexcept {
    return zeta * y_norm / std::sqrt(mu1_over_M * mu1_over_M + 4.0);
}

ReferenceBound reference_bound(const BioParams& p) noexcept {
    ReferenceBound b;
    b.vartheta = (p.L1 + p.L2) / (2.0 * p.L1 * p.L2);
    b.mu1_over_M = p.mu1 / p.M;
    const double first = p.mu1 / (p.M * p.M) * p.kv;
    const double second = (1.0 / p.M) * (p.mu1 / p.M + 2.0 * p.mu2 * p.nx * b.vartheta);
    b.zeta = std::min(first, second);
    return b;
}

}  // namespace bioref
