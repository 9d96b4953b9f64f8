// Bioinspired X-shape reference model.
//
// Two short rods (L1) and two long rods (L2) hinged in an X with a
// horizontal spring kh across the joints and a vertical spring kv. The
// relative displacement y1 of the isolated mass M against its base obeys
//
//   y1' = y2
//   y2' = -(f(y1) + g(y1, y2)) / M - base_accel
//
// where the geometric nonlinearity lives in h1/h2 (see bio.cpp).
#pragma once

namespace bioref {

struct BioParams {
    double M = 240.0;              // isolated mass [kg]
    double L1 = 0.1;               // short rod [m]
    double L2 = 0.2;               // long rod [m]
    double theta1 = 0.52359877559829887;  // base angle of the short rods [rad], pi/6
    double kh = 500.0;             // horizontal spring [N/m]
    double kv = 250.0;             // vertical spring [N/m]
    double mu1 = 1.0;              // air damping [N s/m]
    double mu2 = 0.155;            // rotational friction [N s/m]
    int nx = 3;                    // number of joints

    void validate() const;
};

struct ReferenceState {
    double y1 = 0.0;  // relative displacement [m]
    double y2 = 0.0;  // relative velocity [m/s]
};

/// Long-rod angle closing the linkage at rest: L1 sin(theta1) = L2 sin(theta2).
double theta2(const BioParams& p);

/// Horizontal-spring restoring force [N]. Throws DomainError when the
/// linkage cannot close at y1.
double h1(const BioParams& p, double y1);

/// Joint-rotation rate factor [1/m].
double h2(const BioParams& p, double y1);

/// f(y1) = h1(y1) + kv y1
double f_restoring(const BioParams& p, double y1);

/// g(y1, y2) = mu1 y2 + mu2 nx h2(y1) y2
double g_damping(const BioParams& p, double y1, double y2);

ReferenceState bio_deriv(const BioParams& p, const ReferenceState& s, double base_accel);

/// Largest |y1| for which the uniform-boundedness result applies.
double reference_domain_radius(const BioParams& p) noexcept;
bool in_reference_domain(const BioParams& p, double y1) noexcept;

struct ReferenceBound {
    double vartheta = 0.0;  // (L1 + L2) / (2 L1 L2) [1/m]
    double zeta = 0.0;      // [1/s^2]
    double mu1_over_M = 0.0;

    /// Admissible base-acceleration bound for a given state norm [m/s^2].
    double delta_max(double y_norm) const noexcept;
};

ReferenceBound reference_bound(const BioParams& p) noexcept;

}  // namespace bioref
