#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ecmpower {

enum class Duplex { half, full };

/// One level of the cache hierarchy, ordered from L1 outward.
/// bus_width_bytes_per_cycle is the width of the bus toward the next level
/// closer to the registers (L2's bus feeds L1, and so on).
struct CacheLevel {
    std::string name;
    double line_size_bytes = 64.0;
    double bus_width_bytes_per_cycle = 0.0;
    Duplex duplex = Duplex::half;
    bool single_ported = true;
};

/// Step-function map from clock frequency to saturated bandwidth.
/// Lookup picks the nearest entry at or below the requested frequency;
/// below the lowest entry the lowest entry applies. No interpolation.
struct BandwidthTable {
    // (frequency GHz, bandwidth GB/s), kept sorted by frequency.
    std::vector<std::pair<double, double>> entries;

    double lookup(double frequency_ghz) const;
    bool empty() const { return entries.empty(); }
    void insert(double frequency_ghz, double bandwidth_gbs);
};

struct MachineDescription {
    std::string name;
    int cores = 0;
    double base_frequency_ghz = 0.0;
    double min_frequency_ghz = 0.0;
    double max_frequency_ghz = 0.0;
    std::vector<CacheLevel> cache_levels;  // L1 first
    double memory_bandwidth_gbs = 0.0;     // saturated, whole chip (STREAM)
    std::optional<BandwidthTable> bandwidth_table;
    double flops_per_cycle_per_core = 0.0;
    double load_width_bytes_per_cycle = 0.0;   // into L1
    double store_width_bytes_per_cycle = 0.0;  // out of L1

    /// Chip bandwidth at a given clock: table lookup when present,
    /// otherwise the frequency-independent STREAM value.
    double bandwidth_at(double frequency_ghz) const;

    /// Peak floating-point rate in GF/s at the given operating point.
    double peak_gflops(double frequency_ghz, int active_cores) const;

    const CacheLevel* find_level(const std::string& name) const;
};

/// Converts a chip bandwidth into an effective per-cycle transfer width.
/// GB/s means 1e9 bytes per second.
double effective_bits_per_cycle(double bandwidth_gbs, double frequency_ghz);

/// Single-core machine balance in bytes per flop.
double machine_balance(const MachineDescription& machine, double frequency_ghz);

/// Returns one human-readable message per violated invariant; empty means valid.
std::vector<std::string> validate_machine(const MachineDescription& machine);

/// The bundled Sandy Bridge EP (Xeon E5-2680) description.
MachineDescription sandy_bridge_ep();

}  // namespace ecmpower
