#include "ecmpower/ecm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ecmpower {

double EcmPrediction::total(Hypothesis h) const {
    switch (h) {
        case Hypothesis::no_overlap: return total_no_overlap;
        case Hypothesis::single_ported: return total_single_ported;
        case Hypothesis::full_overlap: return total_full_overlap;
    }
    return total_no_overlap;
}

double round_cycles(double cycles) {
    return std::floor(cycles + 0.5);
}

namespace {

struct Job {
    double duration;
    std::uint32_t mask;  // resource occupancy bits
};

bool conflicts(std::uint32_t a, std::uint32_t b) { return (a & b) != 0; }

// Earliest start for a job of the given mask/duration against already
// placed intervals. Candidate starts are 0 and the finish times of
// placed jobs; optimal schedules for a regular objective need nothing else.
double earliest_start(const std::vector<double>& starts, const std::vector<double>& ends,
                      const std::vector<std::uint32_t>& masks, double duration,
                      std::uint32_t mask) {
    std::vector<double> candidates{0.0};
    candidates.insert(candidates.end(), ends.begin(), ends.end());
    std::sort(candidates.begin(), candidates.end());
    for (double s : candidates) {
        bool ok = true;
        for (std::size_t k = 0; k < starts.size(); ++k) {
            if (conflicts(mask, masks[k]) && s < ends[k] && starts[k] < s + duration) {
                ok = false;
                break;
            }
        }
        if (ok)
            return s;
    }
    return 0.0;  // unreachable: the max finish time always works
}

// Branch-and-bound over job orderings with earliest-feasible placement.
struct ExactScheduler {
    const std::vector<Job>& jobs;
    double best = 0.0;
    std::vector<double> best_starts;
    double static_lower_bound = 0.0;

    std::vector<double> starts, ends;
    std::vector<std::uint32_t> masks;
    std::vector<std::size_t> order;
    std::vector<bool> used;

    explicit ExactScheduler(const std::vector<Job>& j) : jobs(j) {
        best = std::numeric_limits<double>::infinity();
        for (std::uint32_t bit = 0; bit < 32; ++bit) {
            double load = 0.0;
            for (const auto& job : jobs)
                if (job.mask & (1u << bit))
                    load += job.duration;
            static_lower_bound = std::max(static_lower_bound, load);
        }
        for (const auto& job : jobs)
            static_lower_bound = std::max(static_lower_bound, job.duration);
        used.assign(jobs.size(), false);
    }

    void dfs(double makespan) {
        if (makespan >= best)
            return;
        if (order.size() == jobs.size()) {
            best = makespan;
            best_starts.assign(jobs.size(), 0.0);
            for (std::size_t k = 0; k < order.size(); ++k)
                best_starts[order[k]] = starts[k];
            return;
        }
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (used[j])
                continue;
            double s = earliest_start(starts, ends, masks, jobs[j].duration, jobs[j].mask);
            used[j] = true;
            order.push_back(j);
            starts.push_back(s);
            ends.push_back(s + jobs[j].duration);
            masks.push_back(jobs[j].mask);
            dfs(std::max(makespan, s + jobs[j].duration));
            masks.pop_back();
            ends.pop_back();
            starts.pop_back();
            order.pop_back();
            used[j] = false;
            if (best <= static_lower_bound)
                return;  // provably optimal already
        }
    }
};

Schedule list_schedule_longest_first(const std::vector<Job>& jobs) {
    std::vector<std::size_t> idx(jobs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return jobs[a].duration > jobs[b].duration; });
    std::vector<double> starts, ends;
    std::vector<std::uint32_t> masks;
    Schedule result;
    result.start_times.assign(jobs.size(), 0.0);
    for (std::size_t j : idx) {
        double s = earliest_start(starts, ends, masks, jobs[j].duration, jobs[j].mask);
        starts.push_back(s);
        ends.push_back(s + jobs[j].duration);
        masks.push_back(jobs[j].mask);
        result.start_times[j] = s;
        result.makespan = std::max(result.makespan, s + jobs[j].duration);
    }
    return result;
}

std::vector<Job> to_jobs(const std::vector<Contribution>& contributions) {
    std::map<std::string, std::uint32_t> bits;
    std::vector<Job> jobs;
    for (const auto& c : contributions) {
        if (c.cycles < 0.0)
            throw std::invalid_argument("contribution " + c.label + " has negative cycles");
        std::uint32_t mask = 0;
        for (const auto& r : c.resources) {
            auto [it, inserted] = bits.emplace(r, static_cast<std::uint32_t>(bits.size()));
            if (it->second >= 32)
                throw std::invalid_argument("too many distinct resources");
            mask |= 1u << it->second;
        }
        jobs.push_back({c.cycles, mask});
    }
    return jobs;
}

}  // namespace

Schedule schedule_min_makespan(const std::vector<Contribution>& contributions) {
    auto jobs = to_jobs(contributions);
    if (jobs.empty())
        return {};
    if (jobs.size() > kExactScheduleLimit)
        return list_schedule_longest_first(jobs);
    ExactScheduler solver(jobs);
    solver.dfs(0.0);
    return {solver.best, solver.best_starts};
}

EcmPrediction predict(const KernelDescription& kernel, const MachineDescription& machine,
                      const std::string& dataset_level, double frequency_ghz) {
    if (frequency_ghz <= 0.0)
        throw std::invalid_argument("frequency must be positive");
    if (auto violations = validate_pairing(kernel, machine); !violations.empty())
        throw std::invalid_argument("invalid kernel/machine pairing: " + violations.front());

    EcmPrediction pred;
    pred.frequency_ghz = frequency_ghz;
    pred.frequency_out_of_range = frequency_ghz < machine.min_frequency_ghz ||
                                  frequency_ghz > machine.max_frequency_ghz;

    Contribution core;
    core.label = "core";
    core.cycles = core_cycles(kernel, machine);
    if (!kernel.core_overlappable)
        core.resources = {machine.cache_levels.front().name};
    pred.contributions.push_back(core);

    auto volumes = data_volumes(kernel, machine, dataset_level);
    const auto& levels = machine.cache_levels;
    for (std::size_t i = 0; i < volumes.size(); ++i) {
        const auto& v = volumes[i];
        if (v.total_lines() == 0.0)
            continue;
        Contribution c;
        c.label = v.label;
        bool memory_boundary = (i + 1 == levels.size());
        if (memory_boundary) {
            double bytes = v.total_lines() * levels[i].line_size_bytes;
            double bandwidth = kernel.effective_bandwidth(machine, frequency_ghz);
            c.cycles = bytes * 8.0 / effective_bits_per_cycle(bandwidth, frequency_ghz);
            c.resources = {levels[i].name, "Mem"};
            pred.memory_bytes_per_unit = bytes;
        } else {
            const auto& upper = levels[i + 1];
            double per_line = std::ceil(levels[i].line_size_bytes /
                                        upper.bus_width_bytes_per_cycle);
            double lines = upper.duplex == Duplex::full
                               ? std::max(v.lines_in, v.lines_out)
                               : v.total_lines();
            c.cycles = lines * per_line;
            c.resources = {levels[i].name, upper.name};
        }
        pred.contributions.push_back(c);
    }

    // No overlap: plain serialization in hierarchy order.
    double cursor = 0.0;
    for (const auto& c : pred.contributions) {
        pred.starts_no_overlap.push_back(cursor);
        cursor += c.cycles;
    }
    pred.total_no_overlap = cursor;

    // Single-ported caches: minimum-makespan schedule under resource conflicts.
    auto schedule = schedule_min_makespan(pred.contributions);
    pred.total_single_ported = schedule.makespan;
    pred.starts_single_ported = schedule.start_times;

    // Full overlap beyond L2. The single-ported L1 still serializes the
    // core part with L1-L2 refills unless the kernel hides them.
    pred.starts_full.assign(pred.contributions.size(), 0.0);
    double l1_bound = 0.0;
    double total_full = 0.0;
    for (std::size_t i = 0; i < pred.contributions.size(); ++i) {
        const auto& c = pred.contributions[i];
        bool in_l1_chain = (c.label == "core" && !kernel.core_overlappable) ||
                           (i > 0 && pred.contributions[i].label ==
                                         levels[0].name + "-" + (levels.size() > 1 ? levels[1].name : "Mem"));
        if (in_l1_chain) {
            pred.starts_full[i] = l1_bound;
            l1_bound += c.cycles;
        } else {
            total_full = std::max(total_full, c.cycles);
        }
    }
    pred.total_full_overlap = std::max(l1_bound, total_full);

    return pred;
}

Performance to_performance(const EcmPrediction& prediction, const KernelDescription& kernel,
                           double frequency_ghz, Hypothesis hypothesis) {
    Performance perf;
    double cycles = prediction.total(hypothesis);
    if (cycles <= 0.0)
        return perf;
    perf.bits_per_cycle = prediction.memory_bytes_per_unit * 8.0 / cycles;
    perf.bandwidth_gbs = perf.bits_per_cycle * frequency_ghz / 8.0;
    // Rate in mega-work-items per second; f GHz is 1e9 cy/s.
    double items_per_unit = kernel.unit_of_work / kernel.work_metric.iterations_per_work_item;
    perf.rate = items_per_unit * frequency_ghz * 1.0e3 / cycles;
    perf.rate_label = kernel.work_metric.label;
    return perf;
}

}  // namespace ecmpower
