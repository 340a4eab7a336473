#include "ecmpower/scaling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ecmpower {

double ScalingModel::performance(double t) const {
    return std::min((1.0 + delta_nu) * t * p0, pmax);
}

std::vector<std::pair<int, double>> scaling_curve(const ScalingModel& model) {
    if (model.p0 <= 0.0 || model.pmax <= 0.0)
        throw std::invalid_argument("P0 and Pmax must be positive");
    std::vector<std::pair<int, double>> curve;
    for (int t = 1; t <= model.cores; ++t)
        curve.emplace_back(t, model.performance(t));
    return curve;
}

SaturationPoint saturation_point(const ScalingModel& model) {
    if (model.p0 <= 0.0 || model.pmax <= 0.0)
        throw std::invalid_argument("P0 and Pmax must be positive");
    SaturationPoint sp;
    sp.t_continuous = model.pmax / ((1.0 + model.delta_nu) * model.p0);
    double t = std::ceil(sp.t_continuous);
    t = std::max(1.0, std::min(t, static_cast<double>(model.cores)));
    sp.cores = static_cast<int>(t);
    return sp;
}

double roofline_gflops(const KernelDescription& kernel, const MachineDescription& machine,
                       double frequency_ghz, int cores) {
    double balance = code_balance(kernel);  // throws on zero-flop kernels
    double bandwidth = kernel.effective_bandwidth(machine, frequency_ghz);
    double peak = machine.peak_gflops(frequency_ghz, cores);
    return std::min(peak, bandwidth / balance);
}

ScalingModel build_scaling_model(const KernelDescription& kernel,
                                 const MachineDescription& machine,
                                 const std::string& dataset_level, double frequency_ghz,
                                 Hypothesis hypothesis) {
    auto prediction = predict(kernel, machine, dataset_level, frequency_ghz);
    auto perf = to_performance(prediction, kernel, frequency_ghz, hypothesis);

    ScalingModel model;
    model.cores = machine.cores;
    model.delta_nu = frequency_ghz / machine.base_frequency_ghz - 1.0;
    // p0 is defined at the base frequency; performance below saturation is
    // linear in clock speed with zero intercept.
    model.p0 = perf.rate / (1.0 + model.delta_nu);
    if (prediction.memory_bytes_per_unit > 0.0) {
        double bandwidth = kernel.effective_bandwidth(machine, frequency_ghz);
        double items_per_unit =
            kernel.unit_of_work / kernel.work_metric.iterations_per_work_item;
        model.pmax = bandwidth * 1.0e3 * items_per_unit / prediction.memory_bytes_per_unit;
    } else {
        // Cache-resident data: every resource scales with cores.
        model.pmax = std::numeric_limits<double>::infinity();
    }
    return model;
}

}  // namespace ecmpower
