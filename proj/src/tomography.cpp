#include "weakprobe/tomography.hpp"

#include <cmath>
#include <thread>

#include <Eigen/Dense>

#include "weakprobe/analysis.hpp"
#include "weakprobe/trajectory.hpp"

namespace weakprobe {

DirectionSet collect_directions(const DensityMatrix& initial, std::size_t n_runs,
                                double duration, const BinSet& bins,
                                const QubitParams& qp, double delta_t,
                                std::uint64_t master_seed, int workers) {
    if (n_runs < 1) throw ConfigError("collect_directions: n_runs must be >= 1");

    struct Slot {
        BlochVector dir{0, 0, 0};
        bool ok = false;
    };
    std::vector<Slot> slots(n_runs);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            TrajectoryResult tr = run_trajectory(initial, duration, bins, qp,
                                                 delta_t, master_seed, j);
            MeasurementOutcome out = analyze(tr.propagator);
            if (out.degenerate) continue;
            slots[j].dir = result_direction(out);
            slots[j].ok = true;
        }
    };

    if (workers <= 1 || n_runs < 2) {
        work(0, n_runs);
    } else {
        const std::size_t w = std::min<std::size_t>(workers, n_runs);
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_runs + w - 1) / w;
        for (std::size_t i = 0; i < w; ++i)
            pool.emplace_back(work, i * chunk, std::min(n_runs, (i + 1) * chunk));
        for (auto& t : pool) t.join();
    }

    DirectionSet ds;
    ds.directions.reserve(n_runs);
    for (const Slot& s : slots) {
        if (s.ok)
            ds.directions.push_back(s.dir);
        else
            ++ds.excluded;
    }
    if (ds.directions.empty())
        throw NumericalError("collect_directions: all runs degenerate, "
                             "reconstruction impossible");
    return ds;
}

double cost(double r, double theta, double phi,
            const std::vector<BlochVector>& directions) {
    const Dir3 n = dir_from_angles(theta, phi);
    double t = 0.0;
    for (const BlochVector& d : directions) {
        const Dir3 nj = dir_from_bloch(d);
        const double term = 1.0 - r * (n.x * nj.x + n.y * nj.y + n.z * nj.z);
        t += term * term;
    }
    return t;
}

namespace {

BlochVector bloch_from_cartesian(const Eigen::Vector3d& v) {
    const double r = v.norm();
    if (r < 1e-15) return {0.0, 0.0, 0.0};
    const double theta = std::acos(std::max(-1.0, std::min(1.0, v.z() / r)));
    const double phi = (std::abs(v.x()) < 1e-15 && std::abs(v.y()) < 1e-15)
                           ? 0.0
                           : wrap_phi(std::atan2(v.y(), v.x()));
    return {std::min(r, 1.0), theta, phi};
}

} // namespace

TomographyEstimate reconstruct(const std::vector<BlochVector>& directions) {
    if (directions.empty())
        throw NumericalError("reconstruct: no directions");

    const std::size_t n = directions.size();
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const BlochVector& d : directions) {
        const Dir3 nd = dir_from_bloch(d);
        const Eigen::Vector3d nj(nd.x, nd.y, nd.z);
        a += nj * nj.transpose();
        b += nj;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a);
    const Eigen::Vector3d lam = es.eigenvalues(); // ascending

    // Unconstrained minimizer: minimum-norm least-squares solution of
    // A v = b; a large residual means b lies outside range(A).
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix3d> cod(a);
    Eigen::Vector3d v = cod.solve(b);
    if ((a * v - b).norm() > 1e-8 * b.norm() + 1e-12)
        throw NumericalError("reconstruct: direction moment matrix singular "
                             "with inconsistent data (bases clustered)");

    if (v.squaredNorm() > 1.0 && v.squaredNorm() < 1.0 + 1e-9) {
        // Barely outside the ball: projecting is exact to the excess, while
        // the shifted solve below would amplify rounding noise when A is
        // nearly singular and mu has to be tiny.
        v.normalize();
    } else if (v.squaredNorm() > 1.0) {
        // Boundary solve: (A + mu I) v = b with mu >= 0 chosen so |v| = 1.
        auto v_of = [&](double mu) -> Eigen::Vector3d {
            return (a + mu * Eigen::Matrix3d::Identity()).ldlt().solve(b);
        };
        double mu_lo = 0.0, mu_hi = std::max(1.0, b.norm());
        while (v_of(mu_hi).squaredNorm() > 1.0) mu_hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (mu_lo + mu_hi);
            (v_of(mid).squaredNorm() > 1.0 ? mu_lo : mu_hi) = mid;
        }
        v = v_of(0.5 * (mu_lo + mu_hi));
        v.normalize();
    }

    TomographyEstimate est;
    est.bloch = bloch_from_cartesian(v);
    est.residual = cost(est.bloch.r, est.bloch.theta, est.bloch.phi, directions);
    est.n_runs = n;
    est.moment_condition = lam(0) / static_cast<double>(n);
    return est;
}

DensityMatrix density_from_bloch(const TomographyEstimate& est) {
    if (est.bloch.r > 1.0 + 1e-12)
        throw ConfigError("density_from_bloch: r > 1");
    return density_from_direction(est.bloch.r, dir_from_bloch(est.bloch));
}

} // namespace weakprobe
