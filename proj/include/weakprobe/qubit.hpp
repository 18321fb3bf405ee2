#pragma once

#include <cmath>

#include "weakprobe/errors.hpp"
#include "weakprobe/mat2.hpp"

namespace weakprobe {

constexpr double kPi = 3.14159265358979323846;

// Qubit Hamiltonian parameters in the energy eigenbasis (hbar = 1).
// beta is the angle between the charge basis and the energy eigenbasis.
struct QubitParams {
    double energy_splitting; // E > 0, angular frequency
    double beta;             // radians, in [0, pi/2]

    QubitParams(double e, double b) : energy_splitting(e), beta(b) {
        if (!(e > 0.0)) throw ConfigError("QubitParams: energy splitting must be > 0");
        if (!(b >= 0.0 && b <= kPi / 2.0))
            throw ConfigError("QubitParams: beta must be in [0, pi/2]");
    }
};

struct ChargeStates {
    Vec2 state_L, state_R;
};

// |R> = (cos b/2, sin b/2), |L> = (sin b/2, -cos b/2) in the energy eigenbasis.
inline ChargeStates charge_states(const QubitParams& qp) {
    const double c = std::cos(qp.beta / 2.0);
    const double s = std::sin(qp.beta / 2.0);
    return {Vec2{s, -c}, Vec2{c, s}};
}

// 2x2 density matrix in the energy eigenbasis. Construction does not
// validate; call check() where the invariants matter.
struct DensityMatrix {
    Mat2 m;

    static DensityMatrix pure(const Vec2& psi) { return {Mat2::outer(psi, psi)}; }

    static DensityMatrix maximally_mixed() { return {Mat2::diag(0.5, 0.5)}; }

    double purity() const { return (m * m).trace().real(); }

    // Hermitian to tol, unit trace to tol, eigenvalues >= -tol.
    bool check(double tol = 1e-12) const {
        if (std::abs(m.m01 - std::conj(m.m10)) > tol) return false;
        if (std::abs(m.m00.imag()) > tol || std::abs(m.m11.imag()) > tol) return false;
        if (std::abs(m.trace().real() - 1.0) > tol) return false;
        return herm_eig(m).eig_lo >= -tol;
    }
};

// Bloch-sphere point; (theta, phi) = (0, 0) is the ground state |0>.
// Convention: |psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
struct BlochVector {
    double r;     // in [0, 1]
    double theta; // [0, pi]
    double phi;   // [-pi, pi)
};

inline double wrap_phi(double phi) {
    phi = std::remainder(phi, 2.0 * kPi);
    if (phi >= kPi) phi -= 2.0 * kPi; // remainder returns (-pi, pi]
    return phi;
}

// Bloch direction of a unit vector. Global phase fixed so the |0>
// amplitude is real non-negative; a vanishing |0> amplitude maps to
// (theta, phi) = (pi, 0).
inline BlochVector bloch_from_state(const Vec2& psi) {
    const double n = psi.norm();
    if (std::abs(n - 1.0) > 1e-10)
        throw ConfigError("bloch_from_state: input is not a unit vector");
    const double a0 = std::abs(psi.a);
    const double a1 = std::abs(psi.b);
    const double theta = 2.0 * std::atan2(a1, a0);
    if (a0 < 1e-15) return {1.0, kPi, 0.0};
    if (a1 < 1e-15) return {1.0, theta, 0.0};
    const double phi = std::arg(psi.b * std::conj(psi.a));
    return {1.0, theta, wrap_phi(phi)};
}

inline Vec2 state_from_bloch(const BlochVector& bv) {
    return {std::cos(bv.theta / 2.0),
            std::polar(std::sin(bv.theta / 2.0), bv.phi)};
}

// Unit direction in Cartesian coordinates (x, y, z), ground state at +z.
struct Dir3 {
    double x, y, z;
};

inline Dir3 dir_from_angles(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
            std::cos(theta)};
}

inline Dir3 dir_from_bloch(const BlochVector& bv) {
    return dir_from_angles(bv.theta, bv.phi);
}

// Angle between two Bloch directions, in [0, pi]; r is ignored.
inline double angle_between(const BlochVector& a, const BlochVector& b) {
    const Dir3 na = dir_from_bloch(a);
    const Dir3 nb = dir_from_bloch(b);
    double dot = na.x * nb.x + na.y * nb.y + na.z * nb.z;
    dot = std::max(-1.0, std::min(1.0, dot));
    return std::acos(dot);
}

// rho = (1 + r n . sigma) / 2 in the energy eigenbasis.
inline DensityMatrix density_from_direction(double r, const Dir3& n) {
    if (r > 1.0 + 1e-12) throw ConfigError("density_from_direction: r > 1");
    const double x = r * n.x, y = r * n.y, z = r * n.z;
    return {Mat2{cplx(0.5 * (1.0 + z), 0.0), cplx(0.5 * x, -0.5 * y),
                 cplx(0.5 * x, 0.5 * y), cplx(0.5 * (1.0 - z), 0.0)}};
}

} // namespace weakprobe
