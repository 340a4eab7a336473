#include "ecmpower/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ecmpower {

namespace {

// Gaussian elimination with partial pivoting; the normal-equation systems
// here are at most 3x3 and well conditioned on realistic frequency grids.
template <std::size_t N>
std::array<double, N> solve(std::array<std::array<double, N>, N> a,
                            std::array<double, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col]))
                pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-300)
            throw std::invalid_argument("rank-deficient fit design");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = 0; r < N; ++r) {
            if (r == col)
                continue;
            double factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c < N; ++c)
                a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = 0; i < N; ++i)
        x[i] = b[i] / a[i][i];
    return x;
}

template <std::size_t N>
std::array<std::array<double, N>, N> invert(std::array<std::array<double, N>, N> a) {
    std::array<std::array<double, N>, N> inv{};
    for (std::size_t j = 0; j < N; ++j) {
        std::array<double, N> e{};
        e[j] = 1.0;
        auto col = solve(a, e);
        for (std::size_t i = 0; i < N; ++i)
            inv[i][j] = col[i];
    }
    return inv;
}

// Ordinary least squares for y ~ polynomial basis of x given per-point rows.
template <std::size_t P>
struct OlsResult {
    std::array<double, P> coeffs{};
    std::array<double, P> std_errors{};
    double residual_rms = 0.0;
};

template <std::size_t P>
OlsResult<P> ols(const std::vector<std::array<double, P>>& rows,
                 const std::vector<double>& y) {
    std::array<std::array<double, P>, P> xtx{};
    std::array<double, P> xty{};
    for (std::size_t n = 0; n < rows.size(); ++n) {
        for (std::size_t i = 0; i < P; ++i) {
            xty[i] += rows[n][i] * y[n];
            for (std::size_t j = 0; j < P; ++j)
                xtx[i][j] += rows[n][i] * rows[n][j];
        }
    }
    OlsResult<P> result;
    result.coeffs = solve(xtx, xty);

    double rss = 0.0;
    for (std::size_t n = 0; n < rows.size(); ++n) {
        double fitted = 0.0;
        for (std::size_t i = 0; i < P; ++i)
            fitted += rows[n][i] * result.coeffs[i];
        rss += (y[n] - fitted) * (y[n] - fitted);
    }
    result.residual_rms = std::sqrt(rss / static_cast<double>(rows.size()));
    if (rows.size() > P) {
        double sigma2 = rss / static_cast<double>(rows.size() - P);
        auto cov = invert(xtx);
        for (std::size_t i = 0; i < P; ++i)
            result.std_errors[i] = std::sqrt(std::max(0.0, sigma2 * cov[i][i]));
    }
    return result;
}

}  // namespace

QuadraticFit fit_quadratic_in_frequency(const MeasurementSeries& series) {
    std::set<double> freqs;
    std::set<int> cores;
    for (const auto& p : series.points) {
        if (p.power_watts <= 0.0)
            throw std::invalid_argument("all powers must be positive");
        freqs.insert(p.frequency_ghz);
        cores.insert(p.cores);
    }
    if (freqs.size() < 3)
        throw std::invalid_argument(
            "quadratic fit requires at least 3 distinct frequencies");
    if (cores.size() != 1)
        throw std::invalid_argument("quadratic fit requires a single core count");

    std::vector<std::array<double, 3>> rows;
    std::vector<double> y;
    for (const auto& p : series.points) {
        rows.push_back({1.0, p.frequency_ghz, p.frequency_ghz * p.frequency_ghz});
        y.push_back(p.power_watts);
    }
    auto r = ols<3>(rows, y);
    QuadraticFit fit;
    fit.w0 = r.coeffs[0];
    fit.w1 = r.coeffs[1];
    fit.w2 = r.coeffs[2];
    fit.se_w0 = r.std_errors[0];
    fit.se_w1 = r.std_errors[1];
    fit.se_w2 = r.std_errors[2];
    fit.residual_rms = r.residual_rms;
    fit.cores = *cores.begin();
    return fit;
}

LinearFit fit_linear_in_cores(const MeasurementSeries& series,
                              std::optional<int> max_cores) {
    std::vector<std::array<double, 2>> rows;
    std::vector<double> y;
    std::set<int> cores;
    for (const auto& p : series.points) {
        if (p.power_watts <= 0.0)
            throw std::invalid_argument("all powers must be positive");
        if (max_cores && p.cores > *max_cores)
            continue;
        rows.push_back({1.0, static_cast<double>(p.cores)});
        y.push_back(p.power_watts);
        cores.insert(p.cores);
    }
    if (cores.size() < 2)
        throw std::invalid_argument(
            "linear fit requires at least 2 distinct core counts after restriction");

    auto r = ols<2>(rows, y);
    LinearFit fit;
    fit.w0 = r.coeffs[0];
    fit.watts_per_core = r.coeffs[1];
    fit.se_w0 = r.std_errors[0];
    fit.se_slope = r.std_errors[1];
    fit.residual_rms = r.residual_rms;
    return fit;
}

PowerParameters decompose_per_core(double w0_chip, double w1_chip, double w2_chip, int t) {
    if (t < 1)
        throw std::invalid_argument("core count must be at least 1");
    return {w0_chip, w1_chip / static_cast<double>(t), w2_chip / static_cast<double>(t)};
}

BaselineReconciliation reconcile_baseline(const QuadraticFit& quadratic,
                                          const LinearFit& linear) {
    BaselineReconciliation rec;
    rec.w0_from_frequency = quadratic.w0;
    rec.w0_from_cores = linear.w0;
    double scale = std::max(std::fabs(quadratic.w0), std::fabs(linear.w0));
    rec.relative_spread =
        scale > 0.0 ? std::fabs(quadratic.w0 - linear.w0) / scale : 0.0;
    rec.flagged = rec.relative_spread > 0.15;
    return rec;
}

}  // namespace ecmpower
