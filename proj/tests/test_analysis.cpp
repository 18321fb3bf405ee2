#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "weakprobe/analysis.hpp"
#include "weakprobe/detector.hpp"
#include "weakprobe/trajectory.hpp"

using namespace weakprobe;
using test_helpers::frob_dist;

namespace {

ScaledPropagator prop_of(const Mat2& m, double log_scale = 0.0) {
    ScaledPropagator p;
    p.matrix = m;
    p.log_scale = log_scale;
    return p;
}

} // namespace

TEST_CASE("identity propagator carries no information") {
    const MeasurementOutcome out = analyze(prop_of(Mat2::identity()));
    CHECK(out.w1 == doctest::Approx(0.5));
    CHECK(out.w2 == doctest::Approx(0.5));
    CHECK(out.fidelity == doctest::Approx(0.0));
    CHECK(out.degenerate);
}

TEST_CASE("rank-one diagonal propagator is a perfect energy-basis readout") {
    const MeasurementOutcome out = analyze(prop_of(Mat2::diag(1.0, 0.0)));
    CHECK(out.fidelity == doctest::Approx(1.0));
    CHECK(out.result_index == 1);
    CHECK(std::abs(out.psi1.a) == doctest::Approx(1.0));
    CHECK(std::abs(out.psi1.b) == doctest::Approx(0.0));
    CHECK(out.basis_angles.theta == doctest::Approx(0.0));
    CHECK(out.basis_angles.phi == doctest::Approx(0.0));
    const BlochVector dir = result_direction(out);
    CHECK(dir.theta == doctest::Approx(0.0));
    CHECK(dir.phi == doctest::Approx(0.0));
}

TEST_CASE("analyze is scale invariant, including the log scale") {
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> logu(-6.0 * std::log(10.0),
                                                6.0 * std::log(10.0));
    for (int i = 0; i < 50; ++i) {
        const Mat2 m = test_helpers::random_mat2(gen);
        const double c = std::exp(logu(gen));
        const MeasurementOutcome a = analyze(prop_of(m));
        const MeasurementOutcome b = analyze(prop_of(m * c, logu(gen)));
        CHECK(a.w1 == doctest::Approx(b.w1).epsilon(1e-10));
        CHECK(a.fidelity == doctest::Approx(b.fidelity).epsilon(1e-10));
        CHECK(std::abs(inner(a.psi1, b.psi1)) ==
              doctest::Approx(1.0).epsilon(1e-10));
        CHECK(a.basis_angles.theta ==
              doctest::Approx(b.basis_angles.theta).epsilon(1e-10));
        CHECK(frob_dist(a.rotation, b.rotation) < 1e-10);
    }
}

TEST_CASE("weights, fidelity and basis satisfy the outcome invariants") {
    std::mt19937_64 gen(29);
    for (int i = 0; i < 100; ++i) {
        const Mat2 m = test_helpers::random_mat2(gen);
        const MeasurementOutcome out = analyze(prop_of(m));
        CHECK(out.w1 >= out.w2);
        CHECK(out.w1 + out.w2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.fidelity == doctest::Approx(out.w1 - out.w2).epsilon(1e-12));
        CHECK(out.fidelity ==
              doctest::Approx(1.0 - 2.0 * std::min(out.w1, out.w2)).epsilon(1e-12));
        CHECK(out.fidelity >= 0.0);
        CHECK(out.fidelity <= 1.0);
        CHECK(std::abs(inner(out.psi1, out.psi2)) < 1e-10);
        CHECK(frob_dist(out.rotation * out.rotation.adjoint(),
                        Mat2::identity()) < 1e-10);

        // reconstruction: rotation * (s1 |psi1><psi1| + s2 |psi2><psi2|)
        const double s_sq_sum = m.frobenius_norm() * m.frobenius_norm();
        const double s1 = std::sqrt(out.w1 * s_sq_sum);
        const double s2 = std::sqrt(out.w2 * s_sq_sum);
        const Mat2 meas = Mat2::outer(out.psi1, out.psi1) * s1 +
                          Mat2::outer(out.psi2, out.psi2) * s2;
        CHECK(frob_dist(out.rotation * meas, m) <
              1e-10 * std::max(1.0, m.frobenius_norm()));

        // final state is the rotated winner
        const Vec2 expect = out.rotation * out.psi1;
        CHECK(std::abs(inner(expect, out.final_state)) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("canonical axis maps the anchor bases to the figure coordinates") {
    // energy eigenbasis
    const BlochVector z = canonical_axis({1.0, 0.0}, {0.0, 1.0});
    CHECK(z.theta == doctest::Approx(0.0));
    CHECK(z.phi == doctest::Approx(0.0));
    // charge basis at beta = pi/4
    const ChargeStates cs = charge_states(QubitParams(1.0, kPi / 4.0));
    const BlochVector c1 = canonical_axis(cs.state_R, cs.state_L);
    CHECK(c1.theta == doctest::Approx(kPi / 4.0).epsilon(1e-12));
    CHECK(c1.phi == doctest::Approx(0.0));
}

TEST_CASE("canonical axis is invariant under swapping the pair") {
    std::mt19937_64 gen(37);
    for (int i = 0; i < 200; ++i) {
        const Vec2 psi1 = test_helpers::random_unit_vec(gen);
        const Vec2 psi2{-std::conj(psi1.b), std::conj(psi1.a)};
        const BlochVector a = canonical_axis(psi1, psi2);
        const BlochVector b = canonical_axis(psi2, psi1);
        CHECK(a.theta == doctest::Approx(b.theta).epsilon(1e-9));
        // angle comparison is limited by acos conditioning near zero
        CHECK(angle_between(a, b) < 1e-7);
        CHECK(a.theta <= kPi / 2.0 + 1e-9);
        CHECK(a.phi >= -kPi);
        CHECK(a.phi < kPi);
    }
}

TEST_CASE("equatorial ties pick the representative with phi in [-pi/2, pi/2)") {
    const Vec2 plus_y = state_from_bloch({1.0, kPi / 2.0, kPi / 2.0});
    const Vec2 minus_y = state_from_bloch({1.0, kPi / 2.0, -kPi / 2.0});
    const BlochVector a = canonical_axis(plus_y, minus_y);
    CHECK(a.theta == doctest::Approx(kPi / 2.0));
    CHECK(a.phi == doctest::Approx(-kPi / 2.0));
}

TEST_CASE("result direction refuses zero-fidelity outcomes") {
    const MeasurementOutcome out = analyze(prop_of(Mat2::identity()));
    CHECK_THROWS_AS(result_direction(out), NumericalError);
}

TEST_CASE("result direction is invariant under propagator scaling") {
    std::mt19937_64 gen(41);
    for (int i = 0; i < 50; ++i) {
        const Mat2 m = test_helpers::random_mat2(gen);
        const MeasurementOutcome a = analyze(prop_of(m));
        if (a.degenerate) continue;
        const MeasurementOutcome b = analyze(prop_of(m * 37.5));
        CHECK(angle_between(result_direction(a), result_direction(b)) < 1e-7);
    }
}

TEST_CASE("beta = 0 fidelity matches the likelihood-product oracle") {
    const QubitParams qp(1.0, 0.0);
    const DetectorParams dp = calibrate(0.2, 1.0, 0.01, 1.0);
    const BinSet bins = build_bins(dp, qp);
    const DensityMatrix rho0 = DensityMatrix::pure({1.0, 0.0});
    for (std::uint64_t j = 0; j < 10; ++j) {
        const TrajectoryResult tr =
            run_trajectory(rho0, 20.0, bins, qp, 0.01, 321, j);
        const MeasurementOutcome out = analyze(tr.propagator);
        // co-diagonal chain: weights are the per-state likelihood products
        double log_l = 0.0, log_r = 0.0;
        for (std::uint32_t k : tr.record) {
            log_l += std::log(bins.mass_L[k]);
            log_r += std::log(bins.mass_R[k]);
        }
        const double m = std::max(log_l, log_r);
        const double pl = std::exp(log_l - m), pr = std::exp(log_r - m);
        const double oracle = std::abs(pl - pr) / (pl + pr);
        CHECK(out.fidelity == doctest::Approx(oracle).epsilon(1e-8));
    }
}
