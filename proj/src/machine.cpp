#include "ecmpower/machine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ecmpower {

double BandwidthTable::lookup(double frequency_ghz) const {
    if (entries.empty())
        throw std::invalid_argument("bandwidth table is empty");
    double result = entries.front().second;
    for (const auto& [f, bw] : entries) {
        if (f <= frequency_ghz)
            result = bw;
        else
            break;
    }
    return result;
}

void BandwidthTable::insert(double frequency_ghz, double bandwidth_gbs) {
    entries.emplace_back(frequency_ghz, bandwidth_gbs);
    std::sort(entries.begin(), entries.end());
}

double MachineDescription::bandwidth_at(double frequency_ghz) const {
    if (bandwidth_table && !bandwidth_table->empty())
        return bandwidth_table->lookup(frequency_ghz);
    return memory_bandwidth_gbs;
}

double MachineDescription::peak_gflops(double frequency_ghz, int active_cores) const {
    return frequency_ghz * flops_per_cycle_per_core * static_cast<double>(active_cores);
}

const CacheLevel* MachineDescription::find_level(const std::string& level_name) const {
    for (const auto& level : cache_levels)
        if (level.name == level_name)
            return &level;
    return nullptr;
}

double effective_bits_per_cycle(double bandwidth_gbs, double frequency_ghz) {
    if (bandwidth_gbs <= 0.0)
        throw std::invalid_argument("bandwidth must be positive");
    if (frequency_ghz <= 0.0)
        throw std::invalid_argument("frequency must be positive");
    return bandwidth_gbs * 8.0 / frequency_ghz;
}

double machine_balance(const MachineDescription& machine, double frequency_ghz) {
    if (frequency_ghz <= 0.0)
        throw std::invalid_argument("frequency must be positive");
    return machine.bandwidth_at(frequency_ghz) /
           (frequency_ghz * machine.flops_per_cycle_per_core);
}

namespace {

bool is_power_of_two(double x) {
    if (x <= 0.0 || x != std::floor(x))
        return false;
    auto n = static_cast<unsigned long long>(x);
    return (n & (n - 1)) == 0;
}

}  // namespace

std::vector<std::string> validate_machine(const MachineDescription& machine) {
    std::vector<std::string> violations;
    if (machine.name.empty())
        violations.push_back("name: must not be empty");
    if (machine.cores < 1)
        violations.push_back("cores: must be at least 1");
    if (machine.memory_bandwidth_gbs <= 0.0)
        violations.push_back("memory_bandwidth: must be positive");
    if (machine.min_frequency_ghz > machine.max_frequency_ghz)
        violations.push_back("frequency_range: lower bound exceeds upper bound");
    if (machine.base_frequency_ghz < machine.min_frequency_ghz ||
        machine.base_frequency_ghz > machine.max_frequency_ghz)
        violations.push_back("base_frequency: outside frequency_range");
    if (machine.flops_per_cycle_per_core <= 0.0)
        violations.push_back("flops_per_cycle_per_core: must be positive");
    if (machine.load_width_bytes_per_cycle <= 0.0)
        violations.push_back("load_width: must be positive");
    if (machine.store_width_bytes_per_cycle <= 0.0)
        violations.push_back("store_width: must be positive");
    if (machine.cache_levels.empty())
        violations.push_back("cache_levels: at least one level required");
    for (const auto& level : machine.cache_levels) {
        if (!is_power_of_two(level.line_size_bytes))
            violations.push_back(level.name + ".line_size: must be a positive power of two");
        if (level.bus_width_bytes_per_cycle <= 0.0)
            violations.push_back(level.name + ".bus_width: must be positive");
    }
    if (machine.bandwidth_table) {
        for (const auto& [f, bw] : machine.bandwidth_table->entries) {
            if (f <= 0.0 || bw <= 0.0)
                violations.push_back("bandwidth_table: entries must be positive");
        }
    }
    return violations;
}

MachineDescription sandy_bridge_ep() {
    MachineDescription m;
    m.name = "sandy-bridge-ep";
    m.cores = 8;
    m.base_frequency_ghz = 2.7;
    m.min_frequency_ghz = 1.2;
    m.max_frequency_ghz = 2.7;
    m.memory_bandwidth_gbs = 36.0;
    m.flops_per_cycle_per_core = 8.0;  // 4-wide DP add + 4-wide DP mult
    m.load_width_bytes_per_cycle = 32.0;
    m.store_width_bytes_per_cycle = 16.0;
    m.cache_levels = {
        {"L1", 64.0, 32.0, Duplex::half, true},    // register port, load width
        {"L2", 64.0, 32.0, Duplex::half, true},    // 256 bit/cy toward L1
        {"L3", 64.0, 32.0, Duplex::half, true},    // 256 bit/cy toward L2
    };
    return m;
}

}  // namespace ecmpower
