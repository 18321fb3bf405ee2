#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "weakprobe/mat2.hpp"
#include "weakprobe/qubit.hpp"

using namespace weakprobe;
using test_helpers::frob_dist;
using test_helpers::random_mat2;
using test_helpers::random_unit_vec;

TEST_CASE("charge states at beta = 0 coincide with the energy basis") {
    const ChargeStates cs = charge_states(QubitParams(1.0, 0.0));
    CHECK(std::abs(cs.state_R.a - 1.0) < 1e-15);
    CHECK(std::abs(cs.state_R.b) < 1e-15);
    CHECK(std::abs(cs.state_L.a) < 1e-15);
    CHECK(std::abs(cs.state_L.b + 1.0) < 1e-15);
}

TEST_CASE("charge states at beta = pi/2") {
    const ChargeStates cs = charge_states(QubitParams(1.0, kPi / 2.0));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(cs.state_R.a - s) < 1e-15);
    CHECK(std::abs(cs.state_R.b - s) < 1e-15);
    CHECK(std::abs(cs.state_L.a - s) < 1e-15);
    CHECK(std::abs(cs.state_L.b + s) < 1e-15);
}

TEST_CASE("charge states are orthonormal for any beta") {
    for (double beta : {0.0, 0.1, 0.5, kPi / 4.0, 1.3, kPi / 2.0}) {
        const ChargeStates cs = charge_states(QubitParams(2.0, beta));
        CHECK(std::abs(inner(cs.state_L, cs.state_R)) < 1e-15);
        CHECK(cs.state_L.norm() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(cs.state_R.norm() == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("bloch_from_state convention anchors") {
    const BlochVector ground = bloch_from_state({1.0, 0.0});
    CHECK(ground.r == doctest::Approx(1.0));
    CHECK(ground.theta == doctest::Approx(0.0));
    CHECK(ground.phi == doctest::Approx(0.0));

    // |R> at beta = pi/4 sits at (theta, phi) = (pi/4, 0)
    const ChargeStates cs = charge_states(QubitParams(1.0, kPi / 4.0));
    const BlochVector r = bloch_from_state(cs.state_R);
    CHECK(r.theta == doctest::Approx(kPi / 4.0).epsilon(1e-12));
    CHECK(r.phi == doctest::Approx(0.0));

    const double s = 1.0 / std::sqrt(2.0);
    const BlochVector eq = bloch_from_state({s, cplx(0.0, s)});
    CHECK(eq.theta == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    CHECK(eq.phi == doctest::Approx(kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("bloch_from_state rejects non-unit input") {
    CHECK_THROWS_AS(bloch_from_state({0.5, 0.5}), ConfigError);
}

TEST_CASE("bloch round-trip recovers the state up to global phase") {
    std::mt19937_64 gen(7);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 psi = random_unit_vec(gen);
        const Vec2 back = state_from_bloch(bloch_from_state(psi));
        CHECK(std::abs(inner(psi, back)) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("polar_decompose on identity and on a positive diagonal") {
    const PolarFactors id = polar_decompose(Mat2::identity());
    CHECK(frob_dist(id.rotation, Mat2::identity()) < 1e-12);
    CHECK(frob_dist(id.positive_part, Mat2::identity()) < 1e-12);

    const Mat2 d = Mat2::diag(3.0, 0.5);
    const PolarFactors pf = polar_decompose(d);
    CHECK(frob_dist(pf.rotation, Mat2::identity()) < 1e-12);
    CHECK(frob_dist(pf.positive_part, d) < 1e-12);
}

TEST_CASE("polar_decompose rejects the zero matrix") {
    CHECK_THROWS_AS(polar_decompose(Mat2{}), NumericalError);
}

TEST_CASE("polar factors satisfy their invariants on random matrices") {
    std::mt19937_64 gen(11);
    for (int i = 0; i < 100; ++i) {
        const Mat2 m = random_mat2(gen);
        const PolarFactors pf = polar_decompose(m);
        // unitarity
        CHECK(frob_dist(pf.rotation * pf.rotation.adjoint(), Mat2::identity()) <
              1e-10);
        // Hermitian PSD
        CHECK(frob_dist(pf.positive_part, pf.positive_part.adjoint()) < 1e-10);
        CHECK(herm_eig(pf.positive_part).eig_lo >= -1e-12);
        // reconstruction, relative
        CHECK(frob_dist(pf.rotation * pf.positive_part, m) <
              1e-10 * std::max(1.0, m.frobenius_norm()));
    }
}

TEST_CASE("polar_decompose scales homogeneously in the positive part") {
    std::mt19937_64 gen(13);
    for (int i = 0; i < 30; ++i) {
        const Mat2 m = random_mat2(gen);
        const double c = std::exp(10.0 * (i / 30.0 - 0.5));
        const PolarFactors a = polar_decompose(m);
        const PolarFactors b = polar_decompose(m * c);
        CHECK(frob_dist(a.rotation, b.rotation) < 1e-10);
        CHECK(frob_dist(a.positive_part * c, b.positive_part) <
              1e-10 * c * std::max(1.0, a.positive_part.frobenius_norm()));
    }
}

TEST_CASE("angle_between on anchor pairs") {
    const BlochVector zp{1.0, 0.0, 0.0};
    const BlochVector zm{1.0, kPi, 0.3};
    const BlochVector xp{1.0, kPi / 2.0, 0.0};
    const BlochVector yp{1.0, kPi / 2.0, kPi / 2.0};
    CHECK(angle_between(zp, zp) == doctest::Approx(0.0));
    CHECK(angle_between(zp, zm) == doctest::Approx(kPi));
    CHECK(angle_between(xp, yp) == doctest::Approx(kPi / 2.0));
}

TEST_CASE("angle_between is symmetric and obeys the triangle inequality") {
    std::mt19937_64 gen(17);
    for (int i = 0; i < 200; ++i) {
        const BlochVector a = test_helpers::random_direction(gen);
        const BlochVector b = test_helpers::random_direction(gen);
        const BlochVector c = test_helpers::random_direction(gen);
        CHECK(angle_between(a, b) == doctest::Approx(angle_between(b, a)));
        CHECK(angle_between(a, c) <=
              angle_between(a, b) + angle_between(b, c) + 1e-12);
    }
}
