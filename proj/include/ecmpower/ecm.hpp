#pragma once

#include <string>
#include <vector>

#include "ecmpower/kernel.hpp"
#include "ecmpower/machine.hpp"

namespace ecmpower {

/// One block of the ECM timeline: the in-core part or one inter-level
/// transfer, with the set of hierarchy endpoints it keeps busy.
/// Contributions may overlap only if their resource sets are disjoint.
struct Contribution {
    std::string label;   // core, L1-L2, L2-L3, L3-Mem
    double cycles = 0.0; // per unit of work
    std::vector<std::string> resources;
};

enum class Hypothesis { no_overlap, single_ported, full_overlap };

struct EcmPrediction {
    std::vector<Contribution> contributions;
    double total_no_overlap = 0.0;
    double total_single_ported = 0.0;
    double total_full_overlap = 0.0;
    // Start times per contribution under each hypothesis.
    std::vector<double> starts_no_overlap;
    std::vector<double> starts_single_ported;
    std::vector<double> starts_full;
    double memory_bytes_per_unit = 0.0;
    double frequency_ghz = 0.0;
    bool frequency_out_of_range = false;

    double total(Hypothesis h) const;
};

struct Schedule {
    double makespan = 0.0;
    std::vector<double> start_times;
};

struct Performance {
    double bits_per_cycle = 0.0;
    double bandwidth_gbs = 0.0;
    double rate = 0.0;  // in the kernel's work metric (base units/s * 1e9)
    std::string rate_label;
};

/// Full single-core ECM prediction per unit of work under the three
/// overlap hypotheses.
EcmPrediction predict(const KernelDescription& kernel, const MachineDescription& machine,
                      const std::string& dataset_level, double frequency_ghz);

/// Minimum makespan over non-preemptive schedules in which two
/// contributions may run concurrently iff their resource sets are
/// disjoint. Exact (branch-and-bound over orderings) up to
/// kExactScheduleLimit contributions; longest-first list scheduling
/// beyond that.
Schedule schedule_min_makespan(const std::vector<Contribution>& contributions);

inline constexpr std::size_t kExactScheduleLimit = 12;

/// Bandwidth and work-metric rate implied by a prediction total.
Performance to_performance(const EcmPrediction& prediction, const KernelDescription& kernel,
                           double frequency_ghz, Hypothesis hypothesis = Hypothesis::no_overlap);

/// Report rounding: cycles are kept fractional internally and rounded
/// half-up for display.
double round_cycles(double cycles);

}  // namespace ecmpower
