#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace roduq {

// Error hierarchy. Config and geometry problems are reported as distinct
// types so the CLI can map them to exit codes.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct config_error : error {
    using error::error;
};
struct geometry_error : error {
    using error::error;
};
struct mesh_error : error {
    using error::error;
};
struct sampling_error : error {
    using error::error;
};
struct solver_error : error {
    using error::error;
};

// Ordinary least squares y = slope*x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;  // OLS standard error of the slope
    double residual_rms = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Fit err = a * v^t on log-log axes. Non-positive entries are excluded;
// their indices are reported so callers can diagnose noise-floor points.
struct PowerFit {
    double prefactor = 0.0;  // a
    double exponent = 0.0;   // t
    double exponent_stderr = 0.0;
    std::vector<std::size_t> excluded;
};

PowerFit fit_power_law(std::span<const double> v, std::span<const double> err);

// FNV-1a over raw bytes; used for cheap identity checks of sampled paths.
std::uint64_t hash_bytes(const void* data, std::size_t n);
std::uint64_t hash_doubles(std::span<const double> v);

// Young's modulus of an isotropic material,
// a = mu (3 lambda + 2 mu) / (lambda + mu).
inline double young_modulus(double mu, double lambda) {
    return mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu);
}

// Inverse of young_modulus at fixed mu; valid whenever 2 mu <= a < 3 mu,
// which holds for any isotropic pair with lambda >= 0.
inline double lambda_from_young(double a, double mu) {
    return mu * (2.0 * mu - a) / (a - 3.0 * mu);
}

// Runs body(i) for i in [0, n) on up to `workers` threads. Work items are
// independent; callers must write results into per-index slots and reduce
// in index order afterwards so results do not depend on the worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& body);

}  // namespace roduq
