#pragma once

#include <istream>
#include <stdexcept>
#include <string>

#include "ecmpower/ecm.hpp"
#include "ecmpower/fit.hpp"
#include "ecmpower/kernel.hpp"
#include "ecmpower/machine.hpp"
#include "ecmpower/power.hpp"

namespace ecmpower {

/// Input-file error; carries the file name and 1-based line number.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& file, int line, const std::string& message);
    const std::string& file() const { return file_; }
    int line() const { return line_; }

  private:
    std::string file_;
    int line_;
};

// Structured key-value documents ([machine] / [cache], [kernel] / [stream],
// [power] sections). Unknown keys are rejected with an error naming the key.
MachineDescription load_machine(const std::string& path);
MachineDescription parse_machine(std::istream& in, const std::string& path);

KernelDescription load_kernel(const std::string& path);
KernelDescription parse_kernel(std::istream& in, const std::string& path);

PowerParameters load_power_parameters(const std::string& path);
PowerParameters parse_power_parameters(std::istream& in, const std::string& path);
std::string format_power_parameters(const PowerParameters& params);

// Measurement CSV: header frequency_ghz,cores,power_w[,performance];
// '#' starts a comment line.
MeasurementSeries load_measurements(const std::string& path);
MeasurementSeries parse_measurements(std::istream& in, const std::string& path);

// Machine-readable emissions. Deterministic: identical inputs yield
// byte-identical output.
std::string ecm_timeline_csv(const EcmPrediction& prediction);
std::string scaling_csv(const std::vector<std::pair<int, double>>& curve,
                        double roofline_bound);
std::string energy_surface_csv(const EnergyAnalysis& analysis);

}  // namespace ecmpower
