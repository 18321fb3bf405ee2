#include "weakprobe/trajectory.hpp"

#include <cmath>

namespace weakprobe {

Mat2 hamiltonian_step(const QubitParams& qp, double delta_t) {
    if (delta_t < 0.0) throw ConfigError("hamiltonian_step: negative delta_t");
    const double e_dt = qp.energy_splitting * delta_t;
    if (e_dt > 0.1)
        throw ConfigError("hamiltonian_step: E*delta_t > 0.1 violates the "
                          "short-step assumption");
    return Mat2::diag(std::polar(1.0, 0.5 * e_dt), std::polar(1.0, -0.5 * e_dt));
}

std::size_t step(DensityMatrix& state, ScaledPropagator& acc, const BinSet& bins,
                 const Mat2& u_h, Rng& rng) {
    const std::size_t k = sample_bin(bins, state, rng);
    const Mat2 op = bins.kraus[k] * u_h;
    Mat2 next = op * state.m * op.adjoint();
    const double tr = next.trace().real();
    if (tr < 1e-300)
        throw NumericalError("step: numerically dead branch (vanishing trace)");
    state.m = next * (1.0 / tr);
    acc.absorb(op);
    return k;
}

TrajectoryResult run_trajectory(const DensityMatrix& initial, double duration,
                                const BinSet& bins, const QubitParams& qp,
                                double delta_t, std::uint64_t master_seed,
                                std::uint64_t stream_index) {
    const double steps_f = duration / delta_t;
    const auto n_steps = static_cast<std::size_t>(std::llround(steps_f));
    if (n_steps < 1 || std::abs(steps_f - static_cast<double>(n_steps)) > 1e-6)
        throw ConfigError("run_trajectory: duration must be an integer number "
                          "of steps, at least one");

    TrajectoryResult res;
    res.master_seed = master_seed;
    res.stream_index = stream_index;
    res.record.reserve(n_steps);
    res.final_rho = initial;

    Rng rng = Rng::stream(master_seed, stream_index);
    const Mat2 u_h = hamiltonian_step(qp, delta_t);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const std::size_t k = step(res.final_rho, res.propagator, bins, u_h, rng);
        res.record.push_back(static_cast<std::uint32_t>(k));
    }
    return res;
}

} // namespace weakprobe
