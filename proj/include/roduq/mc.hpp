#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roduq/homog.hpp"
#include "roduq/rod1d.hpp"
#include "roduq/rod3d.hpp"

namespace roduq {

enum class Fidelity { rod1d, rod3d };

struct SampleRecord {
    std::uint64_t sample_index = 0;
    std::uint64_t seed = 0;
    Fidelity fidelity = Fidelity::rod1d;
    double h = 0.0;      // 0 for the 1D surrogate
    double eps = 0.0;
    EnergyReport report;
    std::uint64_t phi_hash = 0;
    bool failed = false;
    std::string failure;
};

struct EnsembleSetup {
    CrossSection section;          // with mesh when 3D is involved
    MaterialSpec material;
    double sigma1 = 0.3;
    double sigma2 = 0.3;
    double eps = 0.05;
    double clip = 0.0;             // c_S; <= 0 disables
    RodBC bc;
    int n_elements = 200;          // 1D grid; equals n_layers when coupled
    int n_layers = 0;              // 3D axial elements (0: reuse n_elements)
    double h = 0.1;                // 3D thickness
    int workers = 1;

    int layers() const { return n_layers > 0 ? n_layers : n_elements; }
};

enum class EnsembleModel { rod1d, rod3d, both_coupled };

struct EnsembleTable {
    std::vector<SampleRecord> records;       // fixed sample order
    std::vector<SampleRecord> records_3d;    // filled for both_coupled
    int n_failures = 0;

    std::vector<double> values(Fidelity f = Fidelity::rod1d) const;
};

// Runs M samples with seeds derived from (seed_base, m). Failures are
// recorded and tolerated up to 5% of the ensemble.
EnsembleTable run_ensemble(EnsembleModel model, int n_samples,
                           std::uint64_t seed_base, const EnsembleSetup& setup);

struct McSummary {
    int n = 0;
    double mean = 0.0;
    double variance = 0.0;           // unbiased (n-1)
    std::vector<double> ecdf;        // sorted values
    std::optional<double> l2_error_vs_ref;
    std::uint64_t seed_base = 0;
};

McSummary fluctuation_stats(std::span<const double> values,
                            std::optional<double> reference = std::nullopt);

// |mean(E_3d) - mean(E_1d)|; the ensembles need not be coupled.
double systematic_error(std::span<const double> values_3d,
                        std::span<const double> values_1d);

// Multi-fidelity estimator: the 1D ensemble shifted by the coupled-pair
// mean gap. Mean and variance accessors are defined through the stored 1D
// values so the shift identities hold exactly.
struct MultiFidelityEstimate {
    std::vector<double> values_1d;
    double delta = 0.0;
    int n_high = 0;

    double mean() const;
    double variance() const;
    std::vector<double> shifted_values() const;
};

MultiFidelityEstimate multifidelity(std::span<const double> table_1d,
                                    std::span<const double> coupled_3d,
                                    std::span<const double> coupled_1d);

struct TrendPoint {
    double h = 0.0;
    double sys_error = 0.0;
    int n_samples = 0;
    bool excluded = false;
};

struct TrendReport {
    std::vector<TrendPoint> points;
    double fit_a = 0.0;
    double fit_t = 0.0;
};

// Coupled ensembles per h; OLS fit of log(sys_error) against log(h).
TrendReport h_sweep(std::span<const double> h_grid, int n_samples,
                    std::uint64_t seed_base, const EnsembleSetup& setup);

}  // namespace roduq
