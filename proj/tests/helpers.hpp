#pragma once

#include <random>

#include "weakprobe/mat2.hpp"
#include "weakprobe/qubit.hpp"

namespace test_helpers {

using weakprobe::cplx;
using weakprobe::Mat2;
using weakprobe::Vec2;

inline double frob_dist(const Mat2& a, const Mat2& b) {
    return (a - b).frobenius_norm();
}

inline cplx random_cplx(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    return {d(gen), d(gen)};
}

inline Mat2 random_mat2(std::mt19937_64& gen) {
    return {random_cplx(gen), random_cplx(gen), random_cplx(gen),
            random_cplx(gen)};
}

inline Vec2 random_unit_vec(std::mt19937_64& gen) {
    Vec2 v{random_cplx(gen), random_cplx(gen)};
    while (v.norm() < 1e-3) v = {random_cplx(gen), random_cplx(gen)};
    return v.normalized();
}

inline weakprobe::BlochVector random_direction(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double z = 2.0 * u01(gen) - 1.0;
    const double phi = weakprobe::wrap_phi(2.0 * weakprobe::kPi * u01(gen));
    return {1.0, std::acos(z), phi};
}

} // namespace test_helpers
