#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecmpower/power.hpp"

namespace ecmpower {

struct MeasurementPoint {
    double frequency_ghz = 0.0;
    int cores = 0;
    double power_watts = 0.0;
    std::optional<double> performance;
};

struct MeasurementSeries {
    std::vector<MeasurementPoint> points;
    std::string code_name;
    bool smt = false;
    std::string notes;
};

/// W(f) = W0 + w1 f + w2 f^2 at a fixed core count (chip-level coefficients).
struct QuadraticFit {
    double w0 = 0.0, w1 = 0.0, w2 = 0.0;
    double se_w0 = 0.0, se_w1 = 0.0, se_w2 = 0.0;
    double residual_rms = 0.0;
    int cores = 0;  // the fixed core count of the series
};

/// W(t) = W0 + c t at a fixed frequency.
struct LinearFit {
    double w0 = 0.0;
    double watts_per_core = 0.0;
    double se_w0 = 0.0, se_slope = 0.0;
    double residual_rms = 0.0;
};

QuadraticFit fit_quadratic_in_frequency(const MeasurementSeries& series);

/// For saturating codes restrict to the pre-saturation points via max_cores.
LinearFit fit_linear_in_cores(const MeasurementSeries& series,
                              std::optional<int> max_cores = std::nullopt);

/// Splits chip-level w1, w2 into per-core coefficients at core count t.
PowerParameters decompose_per_core(double w0_chip, double w1_chip, double w2_chip, int t);

/// When both extrapolation paths are available, reports the spread between
/// the frequency-based and core-count-based W0 estimates.
struct BaselineReconciliation {
    double w0_from_frequency = 0.0;
    double w0_from_cores = 0.0;
    double relative_spread = 0.0;
    bool flagged = false;  // spread beyond 15%
};

BaselineReconciliation reconcile_baseline(const QuadraticFit& quadratic,
                                          const LinearFit& linear);

}  // namespace ecmpower
