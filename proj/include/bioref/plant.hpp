// Nonlinear quarter-car suspension plant.
//
// State x = [zs, zs', zu, zu'] (sprung/unsprung displacement and velocity).
// The spring and damper are polynomial in the suspension deflection; the
// tire is a linear spring-damper against the road.
#pragma once

namespace bioref {

struct SuspensionParams {
    double ms = 240.0;       // sprung mass [kg]
    double mu = 23.61;       // unsprung mass [kg]
    double ks1 = -73696.0;   // [N/m]
    double ks2 = 3170400.0;  // [N/m^2]
    double ks3 = 181818.88;  // [N/m^3]
    double cs1 = 524.28;     // [N s/m]
    double cs2 = 13.8;       // [N s^2/m^2]
    double kt = 15394.0;     // tire stiffness [N/m]
    double ct = 1385.4;      // tire damping [N s/m]
    double zmax = 0.1;       // max suspension stroke [m]
    double g = 9.81;         // [m/s^2]

    /// Throws ConfigError listing every violated invariant.
    void validate() const;
};

struct PlantState {
    double x1 = 0.0;  // sprung displacement [m]
    double x2 = 0.0;  // sprung velocity [m/s]
    double x3 = 0.0;  // unsprung displacement [m]
    double x4 = 0.0;  // unsprung velocity [m/s]
};

struct PlantInput {
    double u = 0.0;       // actuator force [N]
    double zr = 0.0;      // road displacement [m]
    double zr_dot = 0.0;  // road velocity [m/s]
    double w = 0.0;       // force disturbance on the sprung mass [N]
};

struct TireForces {
    double ft = 0.0;  // elastic [N]
    double fb = 0.0;  // damping [N]
};

struct RelativeState {
    double z1 = 0.0;  // deflection zs - zu [m]
    double z2 = 0.0;  // deflection rate [m/s]
};

/// ks1 dz + ks2 dz^2 + ks3 dz^3
double spring_force(const SuspensionParams& p, double dz) noexcept;

/// cs1 dv + cs2 dv^2
double damper_force(const SuspensionParams& p, double dv) noexcept;

TireForces tire_forces(const SuspensionParams& p, double x3, double x4, double zr,
                       double zr_dot) noexcept;

/// Time derivative of the absolute state. The disturbance enters the sprung
/// row as +w/ms. Throws FaultError naming the first non-finite input or
/// output channel.
PlantState plant_deriv(const SuspensionParams& p, const PlantState& s, const PlantInput& in);

RelativeState relative_state(const PlantState& s) noexcept;

/// Smallest positive deflection where the spring force vanishes with a
/// positive local stiffness; 0 when the origin itself is stable (ks1 >= 0)
/// or no such root exists.
double static_deflection(const SuspensionParams& p) noexcept;

}  // namespace bioref
