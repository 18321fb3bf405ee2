#include "weakprobe/detector.hpp"

#include <algorithm>
#include <cmath>

namespace weakprobe {

void DetectorParams::validate() const {
    if (!(sigma > 0.0)) throw ConfigError("detector: sigma must be > 0");
    if (!(bin_width > 0.0)) throw ConfigError("detector: bin width must be > 0");
    if (!(delta_t > 0.0)) throw ConfigError("detector: delta_t must be > 0");
    if (!(bin_range_sigmas > 0.0))
        throw ConfigError("detector: bin_range_sigmas must be > 0");
}

namespace {

double gaussian_cdf(double x, double mean, double sigma) {
    return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0)));
}

void renormalize(std::vector<double>& mass) {
    double sum = 0.0;
    for (double m : mass) sum += m;
    for (double& m : mass) m /= sum;
}

} // namespace

BinSet build_bins(const DetectorParams& dp, const QubitParams& qp) {
    dp.validate();
    const double lo =
        std::min(dp.mean_L, dp.mean_R) - dp.bin_range_sigmas * dp.sigma;
    const double hi =
        std::max(dp.mean_L, dp.mean_R) + dp.bin_range_sigmas * dp.sigma;
    const std::size_t n =
        static_cast<std::size_t>(std::ceil((hi - lo) / dp.bin_width - 1e-9));
    if (n < 8)
        throw ConfigError("build_bins: fewer than 8 bins, discretization too coarse");

    BinSet bins;
    bins.cs = charge_states(qp);
    bins.bin_centers.resize(n);
    bins.mass_L.resize(n);
    bins.mass_R.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double left = lo + static_cast<double>(k) * dp.bin_width;
        const double right = left + dp.bin_width;
        bins.bin_centers[k] = 0.5 * (left + right);
        bins.mass_L[k] = gaussian_cdf(right, dp.mean_L, dp.sigma) -
                         gaussian_cdf(left, dp.mean_L, dp.sigma);
        bins.mass_R[k] = gaussian_cdf(right, dp.mean_R, dp.sigma) -
                         gaussian_cdf(left, dp.mean_R, dp.sigma);
    }
    // Truncated-tail correction: makes POVM completeness exact.
    renormalize(bins.mass_L);
    renormalize(bins.mass_R);

    const Mat2 proj_L = Mat2::outer(bins.cs.state_L, bins.cs.state_L);
    const Mat2 proj_R = Mat2::outer(bins.cs.state_R, bins.cs.state_R);
    bins.kraus.resize(n);
    bins.cdf_L.resize(n);
    bins.cdf_R.resize(n);
    double acc_L = 0.0, acc_R = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        bins.kraus[k] = proj_L * std::sqrt(bins.mass_L[k]) +
                        proj_R * std::sqrt(bins.mass_R[k]);
        acc_L += bins.mass_L[k];
        acc_R += bins.mass_R[k];
        bins.cdf_L[k] = acc_L;
        bins.cdf_R[k] = acc_R;
    }
    bins.cdf_L[n - 1] = 1.0;
    bins.cdf_R[n - 1] = 1.0;
    return bins;
}

DetectorParams calibrate(double g, double energy_splitting, double delta_t,
                         double sigma) {
    if (!(g > 0.0) || !(energy_splitting > 0.0) || !(delta_t > 0.0) ||
        !(sigma > 0.0))
        throw ConfigError("calibrate: all inputs must be > 0");
    const double tau_m = 2.0 * kPi * g / energy_splitting;
    const double delta_i = 2.0 * sigma * std::sqrt(delta_t / tau_m);
    DetectorParams dp;
    dp.mean_L = -0.5 * delta_i;
    dp.mean_R = 0.5 * delta_i;
    dp.sigma = sigma;
    dp.bin_width = sigma / 10.0;
    dp.delta_t = delta_t;
    if (delta_i > 2.0 * dp.bin_range_sigmas * sigma)
        throw ConfigError("calibrate: separation exceeds histogram support; "
                          "coupling too strong for this delta_t");
    return dp;
}

double population_L(const BinSet& bins, const DensityMatrix& rho) {
    const Vec2& L = bins.cs.state_L;
    return (inner(L, rho.m * L)).real();
}

std::vector<double> outcome_distribution(const BinSet& bins,
                                         const DensityMatrix& rho) {
    const double p_L = population_L(bins, rho);
    const double p_R = 1.0 - p_L;
    std::vector<double> p(bins.size());
    for (std::size_t k = 0; k < bins.size(); ++k)
        p[k] = p_L * bins.mass_L[k] + p_R * bins.mass_R[k];
    return p;
}

std::size_t sample_bin(const BinSet& bins, const DensityMatrix& rho, Rng& rng) {
    const double p_L = population_L(bins, rho);
    const double p_R = 1.0 - p_L;
    const double u = rng.uniform();
    // Invert the mixture CDF p_L*cdf_L + p_R*cdf_R by bisection.
    std::size_t lo = 0, hi = bins.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const double c = p_L * bins.cdf_L[mid] + p_R * bins.cdf_R[mid];
        if (c <= u)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

} // namespace weakprobe
