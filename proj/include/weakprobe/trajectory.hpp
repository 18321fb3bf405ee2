#pragma once

#include <cstdint>
#include <vector>

#include "weakprobe/detector.hpp"
#include "weakprobe/mat2.hpp"
#include "weakprobe/qubit.hpp"
#include "weakprobe/rng.hpp"

namespace weakprobe {

// Accumulated product of step operators, kept in the Frobenius-norm
// window [0.5, 2] with the extracted scale tracked in log space.
// matrix * exp(log_scale) is the true product; N ~ 1e5 step chains
// underflow double precision without the split.
struct ScaledPropagator {
    Mat2 matrix = Mat2::identity();
    double log_scale = 0.0;

    void absorb(const Mat2& op) {
        matrix = op * matrix;
        const double n = matrix.frobenius_norm();
        if (n < 0.5 || n > 2.0) {
            matrix = matrix * (1.0 / n);
            log_scale += std::log(n);
        }
    }
};

struct TrajectoryResult {
    std::vector<std::uint32_t> record; // bin index per step
    ScaledPropagator propagator;
    DensityMatrix final_rho;
    std::uint64_t master_seed;
    std::uint64_t stream_index;
};

// Exact exponential exp(-i H delta_t) = diag(e^{+iE dt/2}, e^{-iE dt/2}).
// Requires E*delta_t <= 0.1 (the short-step regime the model assumes).
Mat2 hamiltonian_step(const QubitParams& qp, double delta_t);

// One step: sample k from the current state, apply kraus[k] * U_H,
// renormalize, absorb the operator into the accumulator.
std::size_t step(DensityMatrix& state, ScaledPropagator& acc, const BinSet& bins,
                 const Mat2& u_h, Rng& rng);

TrajectoryResult run_trajectory(const DensityMatrix& initial, double duration,
                                const BinSet& bins, const QubitParams& qp,
                                double delta_t, std::uint64_t master_seed,
                                std::uint64_t stream_index = 0);

} // namespace weakprobe
