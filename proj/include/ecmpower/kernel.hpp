#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecmpower/machine.hpp"

namespace ecmpower {

enum class StreamKind { load, store, update };

/// One group of identical data streams touched per scalar iteration.
/// A regular store implies a write-allocate line load plus an evict at
/// every level below L1; nontemporal stores skip the write-allocate.
/// An update is a read-modify-write in place: one load, one evict.
struct StreamSpec {
    std::string name;
    StreamKind kind = StreamKind::load;
    int count = 1;
    double bytes_per_iteration = 8.0;
    bool nontemporal = false;
};

/// In-core cycle cost per unit of work: either counted from the machine's
/// load/store port widths or supplied externally (e.g. from a static
/// analyzer); supplied values carry free-text provenance.
struct CoreCycleSpec {
    bool counted = true;
    double supplied_cycles = 0.0;
    std::string provenance;
};

struct WorkMetric {
    std::string label = "it/s";
    double iterations_per_work_item = 1.0;
};

struct KernelDescription {
    std::string name;
    int unit_of_work = 8;  // scalar iterations per modeled unit
    std::vector<StreamSpec> streams;
    double flops_per_iteration = 0.0;
    CoreCycleSpec core_cycles;
    bool core_overlappable = false;
    // Optional per-kernel bandwidth cap; overrides the machine value.
    std::optional<double> memory_bandwidth_override_gbs;
    std::optional<BandwidthTable> memory_bandwidth_override_table;
    WorkMetric work_metric;
    std::string comment;

    /// Bandwidth that applies to this kernel on this machine at f.
    double effective_bandwidth(const MachineDescription& machine,
                               double frequency_ghz) const;
};

/// Line traffic across one boundary between adjacent hierarchy levels,
/// per unit of work.
struct BoundaryTraffic {
    std::string label;    // e.g. "L1-L2"
    double lines_in = 0;  // loads + write-allocates
    double lines_out = 0; // evicts
    double total_lines() const { return lines_in + lines_out; }
};

/// In-core cycles per unit of work.
double core_cycles(const KernelDescription& kernel, const MachineDescription& machine);

/// Cache-line transfers per boundary from L1-L2 down to the boundary that
/// reaches dataset_level ("L2", "L3", or "memory"); boundaries below the
/// dataset carry zero. dataset_level "L1" yields an empty traffic pattern
/// on all boundaries.
std::vector<BoundaryTraffic> data_volumes(const KernelDescription& kernel,
                                          const MachineDescription& machine,
                                          const std::string& dataset_level);

/// Memory traffic in bytes per scalar iteration, including write-allocates.
double traffic_bytes_per_iteration(const KernelDescription& kernel);

/// Code balance B_c in bytes per flop.
double code_balance(const KernelDescription& kernel);

/// Pairing checks (stream volumes must be whole cache lines, counted mode
/// needs streams). Empty list means valid.
std::vector<std::string> validate_pairing(const KernelDescription& kernel,
                                          const MachineDescription& machine);

}  // namespace ecmpower
