#pragma once

#include <cstdint>
#include <vector>

#include "weakprobe/detector.hpp"
#include "weakprobe/qubit.hpp"

namespace weakprobe {

struct TomographyEstimate {
    BlochVector bloch;       // r in [0, 1]
    double residual;         // cost at the minimizer
    std::size_t n_runs;      // directions actually used
    double moment_condition; // lambda_min(sum n n^T) / n_runs
};

struct DirectionSet {
    std::vector<BlochVector> directions;
    std::size_t excluded = 0; // zero-fidelity runs dropped
};

// Run n_runs trajectories with streams (master_seed, j), analyze each and
// collect the inferred pre-measurement directions. Degenerate runs are
// counted and excluded.
DirectionSet collect_directions(const DensityMatrix& initial, std::size_t n_runs,
                                double duration, const BinSet& bins,
                                const QubitParams& qp, double delta_t,
                                std::uint64_t master_seed, int workers = 1);

// sum_j [1 - r cos Omega((theta,phi),(theta_j,phi_j))]^2
double cost(double r, double theta, double phi,
            const std::vector<BlochVector>& directions);

// Closed-form minimizer of the cost: quadratic in v = r*n, solved as
// A v = b with A = sum n_j n_j^T, b = sum n_j, projected onto the unit
// ball along the boundary when the unconstrained solution leaves it.
TomographyEstimate reconstruct(const std::vector<BlochVector>& directions);

DensityMatrix density_from_bloch(const TomographyEstimate& est);

// Warning threshold for clustered measurement bases.
constexpr double kMomentConditionWarning = 0.02;

} // namespace weakprobe
