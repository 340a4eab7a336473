#include "ecmpower/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace ecmpower {

double KernelDescription::effective_bandwidth(const MachineDescription& machine,
                                              double frequency_ghz) const {
    if (memory_bandwidth_override_table && !memory_bandwidth_override_table->empty())
        return memory_bandwidth_override_table->lookup(frequency_ghz);
    if (memory_bandwidth_override_gbs)
        return *memory_bandwidth_override_gbs;
    return machine.bandwidth_at(frequency_ghz);
}

double core_cycles(const KernelDescription& kernel, const MachineDescription& machine) {
    if (!kernel.core_cycles.counted)
        return kernel.core_cycles.supplied_cycles;
    if (kernel.streams.empty())
        throw std::invalid_argument("counted core cycles require at least one stream");

    double load_bytes = 0.0;
    double store_bytes = 0.0;
    for (const auto& s : kernel.streams) {
        double bytes = s.count * s.bytes_per_iteration * kernel.unit_of_work;
        switch (s.kind) {
            case StreamKind::load: load_bytes += bytes; break;
            case StreamKind::store: store_bytes += bytes; break;
            case StreamKind::update:
                load_bytes += bytes;
                store_bytes += bytes;
                break;
        }
    }
    // Loads and stores issue concurrently; each port demand rounds up to
    // whole cycles before taking the max.
    double load_cy = std::ceil(load_bytes / machine.load_width_bytes_per_cycle);
    double store_cy = std::ceil(store_bytes / machine.store_width_bytes_per_cycle);
    return std::max(load_cy, store_cy);
}

namespace {

// Inbound/outbound line counts per unit of work crossing any boundary
// below L1, following the write-allocate and update rules.
void lines_per_boundary(const KernelDescription& kernel, double line_size,
                        double& lines_in, double& lines_out) {
    lines_in = 0.0;
    lines_out = 0.0;
    for (const auto& s : kernel.streams) {
        double lines = s.count * s.bytes_per_iteration * kernel.unit_of_work / line_size;
        switch (s.kind) {
            case StreamKind::load:
                lines_in += lines;
                break;
            case StreamKind::store:
                if (!s.nontemporal)
                    lines_in += lines;  // write-allocate
                lines_out += lines;     // evict
                break;
            case StreamKind::update:
                lines_in += lines;
                lines_out += lines;
                break;
        }
    }
}

}  // namespace

std::vector<BoundaryTraffic> data_volumes(const KernelDescription& kernel,
                                          const MachineDescription& machine,
                                          const std::string& dataset_level) {
    const auto& levels = machine.cache_levels;

    // Boundary i connects levels[i] and levels[i+1]; the last boundary
    // connects the outermost cache to memory.
    std::size_t active_boundaries = 0;
    if (dataset_level == "memory") {
        active_boundaries = levels.size();
    } else {
        bool found = false;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (levels[i].name == dataset_level) {
                active_boundaries = i;
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("unknown dataset level: " + dataset_level);
    }

    double lines_in = 0.0, lines_out = 0.0;
    lines_per_boundary(kernel, levels.front().line_size_bytes, lines_in, lines_out);

    std::vector<BoundaryTraffic> result;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        BoundaryTraffic b;
        b.label = (i + 1 < levels.size()) ? levels[i].name + "-" + levels[i + 1].name
                                          : levels[i].name + "-Mem";
        if (i < active_boundaries) {
            b.lines_in = lines_in;
            b.lines_out = lines_out;
        }
        result.push_back(b);
    }
    return result;
}

double traffic_bytes_per_iteration(const KernelDescription& kernel) {
    double bytes = 0.0;
    for (const auto& s : kernel.streams) {
        double b = s.count * s.bytes_per_iteration;
        switch (s.kind) {
            case StreamKind::load: bytes += b; break;
            case StreamKind::store: bytes += s.nontemporal ? b : 2.0 * b; break;
            case StreamKind::update: bytes += 2.0 * b; break;
        }
    }
    return bytes;
}

double code_balance(const KernelDescription& kernel) {
    if (kernel.flops_per_iteration <= 0.0)
        throw std::invalid_argument("code balance undefined for a kernel without flops");
    return traffic_bytes_per_iteration(kernel) / kernel.flops_per_iteration;
}

std::vector<std::string> validate_pairing(const KernelDescription& kernel,
                                          const MachineDescription& machine) {
    std::vector<std::string> violations;
    if (kernel.unit_of_work < 1)
        violations.push_back("unit_of_work: must be at least 1");
    if (kernel.core_cycles.counted && kernel.streams.empty())
        violations.push_back("streams: counted core cycles require at least one stream");
    if (!kernel.core_cycles.counted && kernel.core_cycles.supplied_cycles <= 0.0)
        violations.push_back("core_cycles: supplied value must be positive");
    double line = machine.cache_levels.empty() ? 64.0
                                               : machine.cache_levels.front().line_size_bytes;
    for (const auto& s : kernel.streams) {
        if (s.count < 1)
            violations.push_back("stream " + s.name + ": count must be at least 1");
        if (s.bytes_per_iteration <= 0.0)
            violations.push_back("stream " + s.name + ": bytes_per_iteration must be positive");
        if (s.nontemporal && s.kind != StreamKind::store)
            violations.push_back("stream " + s.name + ": nontemporal applies to stores only");
        double bytes = s.bytes_per_iteration * kernel.unit_of_work;
        if (std::fmod(bytes, line) != 0.0)
            violations.push_back("stream " + s.name +
                                 ": unit of work is not a whole number of cache lines");
    }
    return violations;
}

}  // namespace ecmpower
