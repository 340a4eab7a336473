#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ecmpower/ecm.hpp"
#include "ecmpower/kernel.hpp"
#include "ecmpower/machine.hpp"

namespace ecmpower {

/// Multicore scaling with bandwidth saturation:
///   P(t) = min((1 + delta_nu) * t * p0, pmax)
/// p0 is the single-core rate at the base frequency; delta_nu = f/f0 - 1.
/// pmax may be infinity for a code without a shared bottleneck.
struct ScalingModel {
    double p0 = 0.0;
    double pmax = 0.0;
    int cores = 1;
    double delta_nu = 0.0;

    double performance(double t) const;
};

struct SaturationPoint {
    double t_continuous = 0.0;
    int cores = 1;  // ceil(t_continuous), clamped to [1, Nc]
};

std::vector<std::pair<int, double>> scaling_curve(const ScalingModel& model);

SaturationPoint saturation_point(const ScalingModel& model);

/// Roofline bound min(peak flops, bandwidth / code balance), in GF/s.
double roofline_gflops(const KernelDescription& kernel, const MachineDescription& machine,
                       double frequency_ghz, int cores);

/// Builds the scaling model for a kernel from its ECM prediction at the
/// given frequency: p0 from the prediction total under the chosen
/// hypothesis (in mega-work-items/s), pmax from the bandwidth cap.
ScalingModel build_scaling_model(const KernelDescription& kernel,
                                 const MachineDescription& machine,
                                 const std::string& dataset_level, double frequency_ghz,
                                 Hypothesis hypothesis);

}  // namespace ecmpower
