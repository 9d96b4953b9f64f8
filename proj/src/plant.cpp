#include "bioref/plant.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "bioref/errors.hpp"

namespace bioref {

void SuspensionParams::validate() const {
    std::vector<std::string> issues;
    auto need = [&](bool ok, const char* what) {
        if (!ok) issues.emplace_back(std::string("plant.") + what);
    };
    need(std::isfinite(ms) && ms > 0, "ms must be > 0");
    need(std::isfinite(mu) && mu > 0, "mu must be > 0");
    need(std::isfinite(kt) && kt > 0, "kt must be > 0");
    need(std::isfinite(ct) && ct >= 0, "ct must be >= 0");
    need(std::isfinite(zmax) && zmax > 0, "zmax must be > 0");
    need(std::isfinite(g) && g > 0, "g must be > 0");
    need(std::isfinite(ks1) && std::isfinite(ks2) && std::isfinite(ks3), "ks1..ks3 must be finite");
    need(std::isfinite(cs1) && std::isfinite(cs2), "cs1, cs2 must be finite");
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

double spring_force(const SuspensionParams& p, double dz) noexcept {
    return p.ks1 * dz + p.ks2 * dz * dz + p.ks3 * dz * dz * dz;
}

double damper_force(const SuspensionParams& p, double dv) noexcept {
    return p.cs1 * dv + p.cs2 * dv * dv;
}

TireForces tire_forces(const SuspensionParams& p, double x3, double x4, double zr,
                       double zr_dot) noexcept {
    return {p.kt * (x3 - zr), p.ct * (x4 - zr_dot)};
}

namespace {

void require_finite(double v, const char* channel) {
    if (!std::isfinite(v)) {
        throw FaultError(channel, std::string("non-finite plant signal '") + channel + "'");
    }
}

}  // namespace

PlantState plant_deriv(const SuspensionParams& p, const PlantState& s, const PlantInput& in) {
    require_finite(s.x1, "x1");
    require_finite(s.x2, "x2");
    require_finite(s.x3, "x3");
    require_finite(s.x4, "x4");
    require_finite(in.u, "u");
    require_finite(in.zr, "zr");
    require_finite(in.zr_dot, "zr_dot");
    require_finite(in.w, "w");

    const double fs = spring_force(p, s.x1 - s.x3);
    const double fd = damper_force(p, s.x2 - s.x4);
    const TireForces tire = tire_forces(p, s.x3, s.x4, in.zr, in.zr_dot);

    PlantState d;
    d.x1 = s.x2;
    d.x2 = (-fd - fs + in.u + in.w) / p.ms;
    d.x3 = s.x4;
    d.x4 = (fd + fs - tire.ft - tire.fb - in.u) / p.mu;

    require_finite(d.x2, "x2_dot");
    require_finite(d.x4, "x4_dot");
    return d;
}

RelativeState relative_state(const PlantState& s) noexcept {
    return {s.x1 - s.x3, s.x2 - s.x4};
}

double static_deflection(const SuspensionParams& p) noexcept {
    if (p.ks1 >= 0.0) return 0.0;
    // Nonzero roots of ks1 + ks2 z + ks3 z^2 = 0.
    double best = 0.0;
    auto consider = [&](double z) {
        if (!(z > 0.0)) return;
        const double k = p.ks1 + 2.0 * p.ks2 * z + 3.0 * p.ks3 * z * z;
        if (k > 0.0 && (best == 0.0 || z < best)) best = z;
    };
    if (p.ks3 == 0.0) {
        if (p.ks2 != 0.0) consider(-p.ks1 / p.ks2);
        return best;
    }
    const double disc = p.ks2 * p.ks2 - 4.0 * p.ks3 * p.ks1;
    if (disc < 0.0) return 0.0;
    const double r = std::sqrt(disc);
    consider((-p.ks2 + r) / (2.0 * p.ks3));
    consider((-p.ks2 - r) / (2.0 * p.ks3));
    return best;
}

}  // namespace bioref
