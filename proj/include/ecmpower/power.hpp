#pragma once

#include <vector>

#include "ecmpower/scaling.hpp"

namespace ecmpower {

/// Phenomenological chip power model
///   W(f, t) = W0 + (W1 f + W2 f^2) t
/// with per-core dynamic coefficients; chip-level w1, w2 are t * W1, t * W2.
struct PowerParameters {
    double w0_watts = 0.0;
    double w1_watts_per_ghz = 0.0;   // per core
    double w2_watts_per_ghz2 = 0.0;  // per core
};

struct ClampedFrequency {
    double frequency_ghz = 0.0;
    bool clamped = false;
    bool unbounded = false;  // W2 == 0: no finite optimum
};

struct SurfacePoint {
    double frequency_ghz = 0.0;
    int cores = 0;
    double power_watts = 0.0;
    double performance = 0.0;     // work metric/s
    double energy_joules = 0.0;
    double cost_joule_seconds = 0.0;
};

struct EnergyAnalysis {
    std::vector<SurfacePoint> surface;
    SurfacePoint argmin_energy;
    std::vector<std::pair<double, double>> t_s_per_frequency;  // (f, t_s)
    std::vector<std::pair<int, ClampedFrequency>> f_opt_per_cores;
};

/// W(f, t); t must lie in [1, cores_limit] when cores_limit > 0.
double power_watts(const PowerParameters& params, double frequency_ghz, double t,
                   int cores_limit = 0);

/// Energy to solution for `work` work-metric units:
///   E = W(f, t) / min((1 + dnu) t P0, Pmax) * work
double energy_to_solution(const PowerParameters& params, double p0, double pmax,
                          double f0_ghz, double frequency_ghz, double t, double work = 1.0);

/// Below-saturation energy-optimal frequency sqrt(W0 / (W2 t)), clamped to
/// [fmin, fmax] with a flag when outside.
ClampedFrequency optimal_frequency(const PowerParameters& params, double t,
                                   double fmin_ghz, double fmax_ghz);

/// Closed-form E(f_opt) = (f0/P0)(2 sqrt(W0 W2 / t) + W1), per unit work.
double energy_at_fopt(const PowerParameters& params, double p0, double f0_ghz, double t);

/// Closed-form P(f_opt) = (P0/f0) sqrt(W0 t / W2).
double performance_at_fopt(const PowerParameters& params, double p0, double f0_ghz,
                           double t);

/// Energy-delay cost C = E / P, in joule-seconds per unit work squared.
double cost_energy_delay(const PowerParameters& params, double p0, double pmax,
                         double f0_ghz, double frequency_ghz, double t);

/// Full (f, t) tabulation of power, performance, energy, and cost; the
/// scaling model carries P0 (at f0), Pmax, and the core count.
EnergyAnalysis energy_surface(const PowerParameters& params, const ScalingModel& scaling,
                              double f0_ghz, const std::vector<double>& frequency_grid,
                              int t_min, int t_max, double work = 1.0);

}  // namespace ecmpower
