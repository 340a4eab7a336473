#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecmpower/ecm.hpp"
#include "ecmpower/fit.hpp"
#include "ecmpower/io.hpp"
#include "ecmpower/kernel.hpp"
#include "ecmpower/machine.hpp"
#include "ecmpower/power.hpp"
#include "ecmpower/scaling.hpp"

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitModelError = 3;

using namespace ecmpower;

struct Options {
    std::string machine_path;
    std::string kernel_path;
    std::string level = "memory";
    std::optional<double> freq;
    std::string freq_grid;  // lo:hi:step
    std::string core_range; // lo:hi
    std::string params_path;
    std::string measurements_path;
    std::string out_dir;
    std::string format = "table";
};

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0 ||
        hi < lo)
        throw std::invalid_argument("--freq-grid expects lo:hi:step");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double f = lo + i * step;
        if (f > hi + 1e-9)
            break;
        grid.push_back(std::min(f, hi));
    }
    return grid;
}

std::pair<int, int> parse_core_range(const std::string& spec, int default_hi) {
    if (spec.empty())
        return {1, default_hi};
    int lo = 0, hi = 0;
    char c = 0;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c >> hi) || c != ':' || lo < 1 || hi < lo)
        throw std::invalid_argument("--cores expects lo:hi");
    return {lo, hi};
}

void write_output(const Options& opt, const std::string& name, const std::string& content) {
    if (opt.out_dir.empty()) {
        if (opt.format != "table")
            std::cout << content;
        return;
    }
    std::filesystem::create_directories(opt.out_dir);
    auto path = std::filesystem::path(opt.out_dir) / name;
    std::ofstream out(path);
    out << content;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

Hypothesis scaling_hypothesis(const KernelDescription& kernel) {
    // Kernels whose core time hides the data delays scale from the
    // full-overlap total; load/store-bound ones from the no-overlap total.
    return kernel.core_overlappable ? Hypothesis::full_overlap : Hypothesis::no_overlap;
}

int cmd_predict(const Options& opt) {
    auto machine = load_machine(opt.machine_path);
    auto kernel = load_kernel(opt.kernel_path);
    double freq = opt.freq.value_or(machine.base_frequency_ghz);

    auto pred = predict(kernel, machine, opt.level, freq);
    auto perf = to_performance(pred, kernel, freq, Hypothesis::no_overlap);

    if (opt.format != "csv") {
        std::cout << "ECM prediction: " << kernel.name << " on " << machine.name << " ("
                  << opt.level << " data, " << freq << " GHz)\n";
        if (pred.frequency_out_of_range)
            std::cout << "warning: frequency outside the machine's range\n";
        std::cout << "  contributions [cy per unit of work]:\n";
        for (const auto& c : pred.contributions)
            std::cout << "    " << std::setw(8) << std::left << c.label << ' '
                      << round_cycles(c.cycles) << " cy\n";
        std::cout << "  totals: no-overlap " << round_cycles(pred.total_no_overlap)
                  << " cy, single-ported " << round_cycles(pred.total_single_ported)
                  << " cy, full-overlap " << round_cycles(pred.total_full_overlap)
                  << " cy\n";
        double hidden = pred.total_no_overlap - pred.total_full_overlap;
        if (kernel.core_overlappable)
            std::cout << "  hidden data delays under full overlap: " << round_cycles(hidden)
                      << " cy\n";
        if (pred.memory_bytes_per_unit > 0.0) {
            std::cout << std::fixed << std::setprecision(2);
            std::cout << "  memory traffic: " << pred.memory_bytes_per_unit
                      << " bytes per unit of work\n";
            std::cout << "  no-overlap bandwidth: " << perf.bits_per_cycle << " bits/cy = "
                      << perf.bandwidth_gbs << " GB/s\n";
            std::cout << "  no-overlap rate: " << perf.rate << ' ' << perf.rate_label
                      << '\n';
            std::cout.unsetf(std::ios::fixed);
        }
    }
    write_output(opt, kernel.name + "-timeline.csv", ecm_timeline_csv(pred));
    return 0;
}

int cmd_scale(const Options& opt) {
    auto machine = load_machine(opt.machine_path);
    auto kernel = load_kernel(opt.kernel_path);
    double freq = opt.freq.value_or(machine.base_frequency_ghz);

    auto model = build_scaling_model(kernel, machine, opt.level, freq,
                                     scaling_hypothesis(kernel));
    auto [lo, hi] = parse_core_range(opt.core_range, machine.cores);
    model.cores = hi;

    double roofline_rate = std::numeric_limits<double>::quiet_NaN();
    double roofline_gf = std::numeric_limits<double>::quiet_NaN();
    if (kernel.flops_per_iteration > 0.0) {
        roofline_gf = roofline_gflops(kernel, machine, freq, hi);
        double flops_per_item =
            kernel.flops_per_iteration * kernel.work_metric.iterations_per_work_item;
        roofline_rate = roofline_gf * 1.0e3 / flops_per_item;
    }

    auto curve = scaling_curve(model);
    curve.erase(curve.begin(), curve.begin() + (lo - 1));

    if (opt.format != "csv") {
        std::cout << "Scaling: " << kernel.name << " on " << machine.name << " at " << freq
                  << " GHz\n";
        if (std::isfinite(model.pmax)) {
            auto sat = saturation_point(model);
            std::cout << std::fixed << std::setprecision(2);
            std::cout << "  saturation point t_s = " << sat.t_continuous << " -> "
                      << sat.cores << " cores\n";
            std::cout << "  Pmax = " << model.pmax << ' ' << kernel.work_metric.label
                      << '\n';
            std::cout.unsetf(std::ios::fixed);
        } else {
            std::cout << "  no shared bottleneck: scales to all cores\n";
        }
        if (std::isfinite(roofline_gf)) {
            std::cout << std::fixed << std::setprecision(2);
            std::cout << "  roofline bound at " << hi << " cores: " << roofline_gf
                      << " GF/s = " << roofline_rate << ' ' << kernel.work_metric.label
                      << '\n';
            std::cout.unsetf(std::ios::fixed);
        }
        std::cout << std::fixed << std::setprecision(1);
        for (const auto& [t, p] : curve)
            std::cout << "    t=" << t << "  " << p << ' ' << kernel.work_metric.label
                      << '\n';
        std::cout.unsetf(std::ios::fixed);
    }
    write_output(opt, kernel.name + "-scaling.csv", scaling_csv(curve, roofline_rate));
    return 0;
}

int cmd_energy(const Options& opt) {
    auto machine = load_machine(opt.machine_path);
    auto kernel = load_kernel(opt.kernel_path);
    if (opt.params_path.empty())
        throw ParseError("", 0, "--params is required for energy");
    auto params = load_power_parameters(opt.params_path);

    double f0 = machine.base_frequency_ghz;
    auto model = build_scaling_model(kernel, machine, opt.level, f0,
                                     scaling_hypothesis(kernel));
    std::vector<double> grid;
    if (!opt.freq_grid.empty())
        grid = parse_grid(opt.freq_grid);
    else if (opt.freq)
        grid = {*opt.freq};
    else
        grid = parse_grid(std::to_string(machine.min_frequency_ghz) + ":" +
                          std::to_string(machine.max_frequency_ghz) + ":0.1");
    auto [lo, hi] = parse_core_range(opt.core_range, machine.cores);

    auto analysis = energy_surface(params, model, f0, grid, lo, hi);

    if (opt.format != "csv") {
        std::cout << "Energy analysis: " << kernel.name << " on " << machine.name
                  << " (chip package power only; DRAM excluded)\n";
        std::cout << std::fixed << std::setprecision(3);
        std::cout << "  saturation point per frequency:\n";
        for (const auto& [f, ts] : analysis.t_s_per_frequency)
            std::cout << "    f=" << f << " GHz: t_s=" << ts << '\n';
        std::cout << "  optimal frequency per core count (sub-saturation):\n";
        for (const auto& [t, fo] : analysis.f_opt_per_cores) {
            std::cout << "    t=" << t << ": f_opt=" << fo.frequency_ghz << " GHz";
            if (fo.unbounded)
                std::cout << " (no finite optimum: W2=0)";
            else if (fo.clamped)
                std::cout << " (clamped to grid range)";
            std::cout << '\n';
        }
        const auto& am = analysis.argmin_energy;
        std::cout << "  minimum energy: E=" << am.energy_joules << " J per unit work at f="
                  << am.frequency_ghz << " GHz, t=" << am.cores << '\n';
        bool saturates_on_chip = false;
        for (const auto& [f, ts] : analysis.t_s_per_frequency)
            saturates_on_chip |= ts <= machine.cores;
        if (saturates_on_chip)
            std::cout << "  verdict: saturating kernel; clock race to idle does not apply"
                      << " beyond t_s. Use all cores at the lowest frequency whose"
                      << " saturation point reaches the chip.\n";
        else
            std::cout << "  verdict: sub-saturation everywhere; race to idle pays off"
                      << " for f below f_opt.\n";
        std::cout.unsetf(std::ios::fixed);
    }
    write_output(opt, kernel.name + "-energy.csv", energy_surface_csv(analysis));
    return 0;
}

int cmd_fit(const Options& opt) {
    if (opt.measurements_path.empty())
        throw ParseError("", 0, "--measurements is required for fit");
    auto series = load_measurements(opt.measurements_path);

    // Frequency sweep: the subset at the largest core count with multiple
    // frequencies. Core sweep: the subset at the most frequent frequency.
    int max_cores = 0;
    for (const auto& p : series.points)
        max_cores = std::max(max_cores, p.cores);
    MeasurementSeries freq_series;
    for (const auto& p : series.points)
        if (p.cores == max_cores)
            freq_series.points.push_back(p);

    auto quad = fit_quadratic_in_frequency(freq_series);
    auto params = decompose_per_core(quad.w0, quad.w1, quad.w2, quad.cores);

    std::ostringstream report;
    report << std::fixed << std::setprecision(4);
    report << "Quadratic fit W(f) = W0 + w1 f + w2 f^2 at t=" << quad.cores << ":\n";
    report << "  W0 = " << quad.w0 << " W (se " << quad.se_w0 << ")\n";
    report << "  w1 = " << quad.w1 << " W/GHz (se " << quad.se_w1 << ")\n";
    report << "  w2 = " << quad.w2 << " W/GHz^2 (se " << quad.se_w2 << ")\n";
    report << "  residual RMS = " << quad.residual_rms << " W\n";
    report << "Per-core parameters at t=" << quad.cores << ": W1 = "
           << params.w1_watts_per_ghz << " W/GHz, W2 = " << params.w2_watts_per_ghz2
           << " W/GHz^2\n";

    // Optional core-count extrapolation when the file carries a core sweep.
    std::map<double, int> freq_core_counts;
    for (const auto& p : series.points)
        ++freq_core_counts[p.frequency_ghz];
    for (const auto& [f, n] : freq_core_counts) {
        MeasurementSeries core_series;
        std::set<int> cores_seen;
        for (const auto& p : series.points)
            if (p.frequency_ghz == f) {
                core_series.points.push_back(p);
                cores_seen.insert(p.cores);
            }
        if (cores_seen.size() < 2)
            continue;
        auto lin = fit_linear_in_cores(core_series);
        report << "Linear fit W(t) at f=" << f << " GHz: W0 = " << lin.w0
               << " W, slope = " << lin.watts_per_core << " W/core (residual RMS "
               << lin.residual_rms << " W)\n";
        auto rec = reconcile_baseline(quad, lin);
        if (rec.flagged)
            report << "note: W0 from the frequency fit (" << rec.w0_from_frequency
                   << " W) and from the core extrapolation (" << rec.w0_from_cores
                   << " W) differ by " << rec.relative_spread * 100.0 << "%\n";
        break;
    }

    std::cout << report.str();
    std::string payload = format_power_parameters(params);
    if (!opt.out_dir.empty())
        write_output(opt, "power-parameters", payload);
    else
        std::cout << payload;
    return 0;
}

int cmd_report(const Options& opt) {
    int rc = cmd_predict(opt);
    if (rc == 0)
        rc = cmd_scale(opt);
    if (rc == 0 && !opt.params_path.empty())
        rc = cmd_energy(opt);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ECM performance and multicore power/energy modeling"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* cmd, bool needs_kernel) {
        cmd->add_option("--machine", opt.machine_path, "machine description file")
            ->required();
        auto* k = cmd->add_option("--kernel", opt.kernel_path, "kernel description file");
        if (needs_kernel)
            k->required();
        cmd->add_option("--level", opt.level, "dataset level (L1, L2, L3, memory)");
        cmd->add_option("--freq", opt.freq, "clock frequency in GHz");
        cmd->add_option("--freq-grid", opt.freq_grid, "frequency grid lo:hi:step in GHz");
        cmd->add_option("--cores", opt.core_range, "core range lo:hi");
        cmd->add_option("--params", opt.params_path, "power parameters file");
        cmd->add_option("--out", opt.out_dir, "output directory for CSV files");
        cmd->add_option("--format", opt.format, "table, csv, or both")
            ->check(CLI::IsMember({"table", "csv", "both"}));
    };

    auto* predict_cmd = app.add_subcommand("predict", "single-core ECM prediction");
    add_common(predict_cmd, true);
    auto* scale_cmd = app.add_subcommand("scale", "multicore scaling and roofline");
    add_common(scale_cmd, true);
    auto* energy_cmd = app.add_subcommand("energy", "energy surface and recommendations");
    add_common(energy_cmd, true);
    auto* fit_cmd = app.add_subcommand("fit", "least-squares power-model fit");
    fit_cmd->add_option("--measurements", opt.measurements_path, "measurement CSV")
        ->required();
    fit_cmd->add_option("--out", opt.out_dir, "output directory");
    auto* report_cmd = app.add_subcommand("report", "predict + scale + energy in one run");
    add_common(report_cmd, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (predict_cmd->parsed())
            return cmd_predict(opt);
        if (scale_cmd->parsed())
            return cmd_scale(opt);
        if (energy_cmd->parsed())
            return cmd_energy(opt);
        if (fit_cmd->parsed())
            return cmd_fit(opt);
        if (report_cmd->parsed())
            return cmd_report(opt);
    } catch (const ecmpower::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitModelError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return 0;
}
