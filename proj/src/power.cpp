#include "ecmpower/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ecmpower {

double power_watts(const PowerParameters& params, double frequency_ghz, double t,
                   int cores_limit) {
    if (t < 0.0)
        throw std::invalid_argument("core count must be non-negative");
    if (cores_limit > 0 && t > static_cast<double>(cores_limit))
        throw std::invalid_argument("core count exceeds the machine");
    return params.w0_watts +
           (params.w1_watts_per_ghz * frequency_ghz +
            params.w2_watts_per_ghz2 * frequency_ghz * frequency_ghz) *
               t;
}

namespace {

double saturated_performance(double p0, double pmax, double f0_ghz, double frequency_ghz,
                             double t) {
    double delta_nu = frequency_ghz / f0_ghz - 1.0;
    return std::min((1.0 + delta_nu) * t * p0, pmax);
}

}  // namespace

double energy_to_solution(const PowerParameters& params, double p0, double pmax,
                          double f0_ghz, double frequency_ghz, double t, double work) {
    if (p0 <= 0.0 || f0_ghz <= 0.0 || frequency_ghz <= 0.0 || t < 1.0 || work <= 0.0)
        throw std::invalid_argument("energy_to_solution requires positive inputs");
    double perf = saturated_performance(p0, pmax, f0_ghz, frequency_ghz, t);
    return power_watts(params, frequency_ghz, t) / perf * work;
}

ClampedFrequency optimal_frequency(const PowerParameters& params, double t,
                                   double fmin_ghz, double fmax_ghz) {
    if (t < 1.0)
        throw std::invalid_argument("core count must be at least 1");
    ClampedFrequency result;
    if (params.w2_watts_per_ghz2 <= 0.0) {
        result.frequency_ghz = fmax_ghz;
        result.clamped = true;
        result.unbounded = true;
        return result;
    }
    double f = std::sqrt(params.w0_watts / (params.w2_watts_per_ghz2 * t));
    result.frequency_ghz = f;
    if (f < fmin_ghz) {
        result.frequency_ghz = fmin_ghz;
        result.clamped = true;
    } else if (f > fmax_ghz) {
        result.frequency_ghz = fmax_ghz;
        result.clamped = true;
    }
    return result;
}

double energy_at_fopt(const PowerParameters& params, double p0, double f0_ghz, double t) {
    return f0_ghz / p0 *
           (2.0 * std::sqrt(params.w0_watts * params.w2_watts_per_ghz2 / t) +
            params.w1_watts_per_ghz);
}

double performance_at_fopt(const PowerParameters& params, double p0, double f0_ghz,
                           double t) {
    return p0 / f0_ghz * std::sqrt(params.w0_watts * t / params.w2_watts_per_ghz2);
}

double cost_energy_delay(const PowerParameters& params, double p0, double pmax,
                         double f0_ghz, double frequency_ghz, double t) {
    double perf = saturated_performance(p0, pmax, f0_ghz, frequency_ghz, t);
    return energy_to_solution(params, p0, pmax, f0_ghz, frequency_ghz, t) / perf;
}

EnergyAnalysis energy_surface(const PowerParameters& params, const ScalingModel& scaling,
                              double f0_ghz, const std::vector<double>& frequency_grid,
                              int t_min, int t_max, double work) {
    if (frequency_grid.empty())
        throw std::invalid_argument("frequency grid must not be empty");
    if (t_min < 1 || t_max < t_min)
        throw std::invalid_argument("invalid core range");

    std::vector<double> grid = frequency_grid;
    std::sort(grid.begin(), grid.end());

    EnergyAnalysis analysis;
    double best_energy = std::numeric_limits<double>::infinity();
    for (double f : grid) {
        double delta_nu = f / f0_ghz - 1.0;
        analysis.t_s_per_frequency.emplace_back(
            f, scaling.pmax / ((1.0 + delta_nu) * scaling.p0));
        for (int t = t_min; t <= t_max; ++t) {
            SurfacePoint p;
            p.frequency_ghz = f;
            p.cores = t;
            p.power_watts = power_watts(params, f, t);
            p.performance = saturated_performance(scaling.p0, scaling.pmax, f0_ghz, f, t);
            p.energy_joules = p.power_watts / p.performance * work;
            p.cost_joule_seconds = p.energy_joules / p.performance;
            analysis.surface.push_back(p);
            if (p.energy_joules < best_energy) {
                best_energy = p.energy_joules;
                analysis.argmin_energy = p;
            }
        }
    }
    for (int t = t_min; t <= t_max; ++t)
        analysis.f_opt_per_cores.emplace_back(
            t, optimal_frequency(params, t, grid.front(), grid.back()));
    return analysis;
}

}  // namespace ecmpower
