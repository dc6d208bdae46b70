#pragma once

#include "kinb/collision.hpp"

#include <functional>
#include <optional>

namespace kinb {

struct RunConfig {
    GridSpec grid;
    InitialDatum datum;
    CrossSection cs;
    AngularQuadrature quad;
    double dt = 1e-3;
    double t_end = 1.0;
    std::vector<double> snapshots{0.0, 1.0};

    void validate() const;
    long steps() const;
    // step index of each snapshot time
    std::vector<long> snapshot_steps() const;
};

struct Monitor {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    std::optional<double> entropy;
    double sup_ratio = 0.0;
    double tail = 0.0;
};

struct Trajectory {
    std::vector<SpectralState> snapshots;
    std::vector<Monitor> monitors;
};

// One classical RK4 step; throws NumericalError past the loss-rate guard or on blow-up.
SpectralState step(const SpectralState& s, const AngularRule& rule, double dt);
SpectralState step(const SpectralState& s, const CrossSection& cs, const AngularQuadrature& quad, double dt);

Monitor monitor(const SpectralState& s);

using SnapshotObserver = std::function<void(const SpectralState&, const Monitor&)>;
Trajectory run(const RunConfig& config, const SnapshotObserver& observer = {});

struct MomentReport {
    double dm0 = 0.0;           // max |dm0/dt|
    double m2_deviation = 0.0;  // max |dm2/dt| / m2
    std::optional<double> m4_deviation; // max relative error against the closed system
};

// Closed moment system coefficients, integrated over the truncated kernel support.
double kac_m4_coefficient(const CrossSection& cs, double theta_min);
double isotropic_m4_coefficient(const CrossSection& cs, double theta_min);

MomentReport moment_oracle_check(const Trajectory& traj, const CrossSection& cs, const AngularQuadrature& quad);

} // namespace kinb
