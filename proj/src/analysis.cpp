#include "weakprobe/analysis.hpp"

#include <cmath>

namespace weakprobe {

namespace {

// Axis representative with theta <= pi/2, antipodal flip otherwise.
BlochVector canonicalize(BlochVector bv) {
    const double eps = 1e-9;
    if (bv.theta > kPi / 2.0 + eps) {
        bv.theta = kPi - bv.theta;
        bv.phi = wrap_phi(bv.phi + kPi);
    } else if (std::abs(bv.theta - kPi / 2.0) <= eps) {
        bv.theta = kPi / 2.0;
        if (bv.phi < -kPi / 2.0 || bv.phi >= kPi / 2.0) bv.phi = wrap_phi(bv.phi + kPi);
    }
    if (bv.theta < eps || kPi - bv.theta < eps) bv.phi = 0.0;
    return bv;
}

} // namespace

BlochVector canonical_axis(const Vec2& psi1, const Vec2& psi2) {
    (void)psi2; // the pair is antipodal on the Bloch sphere
    return canonicalize(bloch_from_state(psi1));
}

MeasurementOutcome analyze(const ScaledPropagator& prop) {
    const Svd2 svd = svd2(prop.matrix);
    if (svd.s_hi < 1e-300)
        throw NumericalError("analyze: degenerate propagator");

    MeasurementOutcome out;
    // Columns of V are the eigenvectors of the positive part U_Meas;
    // singular values are its eigenvalues.
    out.psi1 = {svd.v.m00, svd.v.m10};
    out.psi2 = {svd.v.m01, svd.v.m11};
    const double p1 = svd.s_hi * svd.s_hi;
    const double p2 = svd.s_lo * svd.s_lo;
    out.w1 = p1 / (p1 + p2);
    out.w2 = p2 / (p1 + p2);
    out.fidelity = out.w1 - out.w2;
    out.rotation = svd.w * svd.v.adjoint();
    out.basis_angles = canonical_axis(out.psi1, out.psi2);
    out.result_index = 1;
    out.final_state = (out.rotation * out.psi1).normalized();
    out.degenerate = std::abs(out.w1 - out.w2) < 1e-9;
    return out;
}

BlochVector result_direction(const MeasurementOutcome& outcome) {
    if (outcome.degenerate || outcome.fidelity <= 0.0)
        throw NumericalError("result_direction: zero fidelity carries no "
                             "basis information");
    return bloch_from_state(outcome.result_index == 1 ? outcome.psi1
                                                      : outcome.psi2);
}

} // namespace weakprobe
