#pragma once

#include <vector>

#include "weakprobe/mat2.hpp"
#include "weakprobe/qubit.hpp"
#include "weakprobe/rng.hpp"

namespace weakprobe {

// Per-step QPC current model: Gaussian histograms for the two charge
// states, discretized into bins of width delta_i.
struct DetectorParams {
    double mean_L, mean_R;       // per-step mean currents
    double sigma;                // per-step standard deviation
    double bin_width;            // delta I
    double delta_t;              // step duration
    double bin_range_sigmas = 6; // histogram half-width beyond the means

    void validate() const;
};

// Discretized outcome model. Immutable after construction.
struct BinSet {
    std::vector<double> bin_centers;
    std::vector<double> mass_L, mass_R; // renormalized to sum exactly 1
    std::vector<Mat2> kraus;            // energy eigenbasis, real symmetric
    std::vector<double> cdf_L, cdf_R;   // prefix sums for sampling
    ChargeStates cs;

    std::size_t size() const { return bin_centers.size(); }
};

// Coupling strength g = E tau_m / (2 pi) and the derived measurement time.
struct CouplingSpec {
    double g;
    double tau_m;
};

BinSet build_bins(const DetectorParams& dp, const QubitParams& qp);

// Choose detector means for a requested dimensionless coupling g:
// tau_m = 2 pi g / E and |mean_R - mean_L| = 2 sigma sqrt(delta_t / tau_m),
// placed symmetrically about zero.
DetectorParams calibrate(double g, double energy_splitting, double delta_t,
                         double sigma);

inline double measurement_time(const DetectorParams& dp) {
    const double di = dp.mean_R - dp.mean_L;
    return 4.0 * dp.sigma * dp.sigma * dp.delta_t / (di * di);
}

// p[k] = mass_L[k] <L|rho|L> + mass_R[k] <R|rho|R>
std::vector<double> outcome_distribution(const BinSet& bins,
                                         const DensityMatrix& rho);

// Inverse-CDF draw on a single uniform variate.
std::size_t sample_bin(const BinSet& bins, const DensityMatrix& rho, Rng& rng);

// <L|rho|L> for the bin set's charge states.
double population_L(const BinSet& bins, const DensityMatrix& rho);

} // namespace weakprobe
