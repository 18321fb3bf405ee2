#pragma once

#include "weakprobe/mat2.hpp"
#include "weakprobe/qubit.hpp"
#include "weakprobe/trajectory.hpp"

namespace weakprobe {

// The observables carried by an accumulated propagator: measurement
// basis, relative likelihoods of the two outcomes, fidelity, rotation
// and the maximum-likelihood result.
struct MeasurementOutcome {
    Vec2 psi1, psi2;    // orthonormal measurement basis, weight order
    double w1, w2;      // relative likelihoods, w1 >= w2, w1 + w2 = 1
    double fidelity;    // |w1 - w2| / (w1 + w2) = w1 - w2
    Mat2 rotation;      // unitary part of the propagator
    BlochVector basis_angles; // canonical axis representative
    int result_index;   // 1 or 2, maximum-likelihood winner
    Vec2 final_state;   // rotation applied to the winning basis state
    bool degenerate;    // |w1 - w2| < 1e-9: axis unreliable
};

// Split the propagator into rotation * measurement and read off basis,
// weights and fidelity. log_scale never affects the output.
MeasurementOutcome analyze(const ScaledPropagator& prop);

// Deterministic representative of the basis axis (an antipodal pair):
// the member with theta in [0, pi/2]; ties at theta = pi/2 resolved by
// phi in [-pi/2, pi/2).
BlochVector canonical_axis(const Vec2& psi1, const Vec2& psi2);

// Bloch direction of the winning basis state, the inferred
// pre-measurement qubit state.
BlochVector result_direction(const MeasurementOutcome& outcome);

} // namespace weakprobe
