#include "roduq/mc.hpp"

#include <algorithm>
#include <cmath>

namespace roduq {

std::vector<double> EnsembleTable::values(Fidelity f) const {
    const auto& src = (f == Fidelity::rod3d && !records_3d.empty()) ? records_3d : records;
    std::vector<double> v;
    v.reserve(src.size());
    for (const auto& r : src)
        if (!r.failed && r.fidelity == f) v.push_back(r.report.value);
    return v;
}

EnsembleTable run_ensemble(EnsembleModel model, int n_samples,
                           std::uint64_t seed_base, const EnsembleSetup& setup) {
    if (n_samples < 1) throw std::invalid_argument("run_ensemble: need M >= 1");
    const bool needs_3d = model != EnsembleModel::rod1d;
    const bool needs_1d = model != EnsembleModel::rod3d;
    if (needs_3d && !setup.section.mesh)
        throw config_error("run_ensemble: 3D model requires a meshed section");
    if (model == EnsembleModel::both_coupled && setup.layers() != setup.n_elements)
        throw config_error(
            "run_ensemble: coupled fidelities share the field sample; "
            "n_layers must equal n_elements");

    const int n_grid = needs_1d ? setup.n_elements : setup.layers();
    const FieldSampler sampler(midpoint_grid(setup.bc.L, n_grid), setup.sigma1,
                               setup.sigma2, setup.eps, setup.material);
    PrismMesh prism;
    if (needs_3d) prism = build_prism_mesh(*setup.section.mesh, setup.layers(), setup.bc.L);

    EnsembleTable table;
    table.records.resize(static_cast<std::size_t>(n_samples));
    if (model == EnsembleModel::both_coupled)
        table.records_3d.resize(static_cast<std::size_t>(n_samples));

    parallel_for(n_samples, setup.workers, [&](int m) {
        const auto idx = static_cast<std::size_t>(m);
        FieldSample s = sampler.sample(seed_base, static_cast<std::uint64_t>(m));
        if (setup.clip > 0.0) s = enforce_smallness(std::move(s), setup.clip);

        auto base_record = [&](Fidelity f) {
            SampleRecord rec;
            rec.sample_index = static_cast<std::uint64_t>(m);
            rec.seed = seed_base;
            rec.fidelity = f;
            rec.eps = setup.eps;
            rec.h = f == Fidelity::rod3d ? setup.h : 0.0;
            rec.phi_hash = s.phi_hash();
            return rec;
        };

        if (needs_1d) {
            SampleRecord rec = base_record(Fidelity::rod1d);
            try {
                rec.report =
                    effective_modulus_1d(setup.section, s, setup.bc, setup.n_elements)
                        .report;
            } catch (const std::exception& ex) {
                rec.failed = true;
                rec.failure = ex.what();
            }
            table.records[idx] = rec;
        }
        if (needs_3d) {
            SampleRecord rec = base_record(Fidelity::rod3d);
            try {
                rec.report = effective_modulus_3d(prism, s, setup.bc, setup.h).report;
            } catch (const std::exception& ex) {
                rec.failed = true;
                rec.failure = ex.what();
            }
            (model == EnsembleModel::both_coupled ? table.records_3d : table.records)[idx] =
                rec;
        }
    });

    for (const auto& r : table.records) table.n_failures += r.failed ? 1 : 0;
    for (const auto& r : table.records_3d) table.n_failures += r.failed ? 1 : 0;
    const int evaluations =
        n_samples * (model == EnsembleModel::both_coupled ? 2 : 1);
    if (table.n_failures * 20 > evaluations)
        throw error("run_ensemble: more than 5% of the samples failed");
    return table;
}

McSummary fluctuation_stats(std::span<const double> values,
                            std::optional<double> reference) {
    if (values.empty()) throw std::invalid_argument("fluctuation_stats: empty table");
    McSummary s;
    s.n = static_cast<int>(values.size());
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.mean = sum / s.n;
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = s.n > 1 ? ss / (s.n - 1) : 0.0;
    s.ecdf.assign(values.begin(), values.end());
    std::sort(s.ecdf.begin(), s.ecdf.end());
    if (reference) {
        double acc = 0.0;
        for (const double v : values) acc += (v - *reference) * (v - *reference);
        s.l2_error_vs_ref = std::sqrt(acc / s.n);
    }
    return s;
}

double systematic_error(std::span<const double> values_3d,
                        std::span<const double> values_1d) {
    const McSummary a = fluctuation_stats(values_3d);
    const McSummary b = fluctuation_stats(values_1d);
    return std::abs(a.mean - b.mean);
}

double MultiFidelityEstimate::mean() const {
    return fluctuation_stats(values_1d).mean + delta;
}

double MultiFidelityEstimate::variance() const {
    return fluctuation_stats(values_1d).variance;
}

std::vector<double> MultiFidelityEstimate::shifted_values() const {
    std::vector<double> out = values_1d;
    for (double& v : out) v += delta;
    return out;
}

MultiFidelityEstimate multifidelity(std::span<const double> table_1d,
                                    std::span<const double> coupled_3d,
                                    std::span<const double> coupled_1d) {
    if (coupled_3d.empty() || coupled_3d.size() != coupled_1d.size())
        throw std::invalid_argument("multifidelity: invalid coupled pairs");
    if (table_1d.empty())
        throw std::invalid_argument("multifidelity: empty 1D ensemble");
    MultiFidelityEstimate est;
    est.values_1d.assign(table_1d.begin(), table_1d.end());
    est.n_high = static_cast<int>(coupled_3d.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < coupled_3d.size(); ++i)
        acc += coupled_3d[i] - coupled_1d[i];
    est.delta = acc / est.n_high;
    return est;
}

TrendReport h_sweep(std::span<const double> h_grid, int n_samples,
                    std::uint64_t seed_base, const EnsembleSetup& setup) {
    if (h_grid.size() < 3)
        throw config_error("h_sweep: need at least three h values");
    TrendReport report;
    for (const double h : h_grid) {
        EnsembleSetup per_h = setup;
        per_h.h = h;
        const EnsembleTable table =
            run_ensemble(EnsembleModel::both_coupled, n_samples, seed_base, per_h);
        TrendPoint point;
        point.h = h;
        point.n_samples = n_samples;
        point.sys_error = systematic_error(table.values(Fidelity::rod3d),
                                           table.values(Fidelity::rod1d));
        point.excluded = !(point.sys_error > 0.0);
        report.points.push_back(point);
    }
    std::vector<double> hs, errs;
    for (const auto& p : report.points)
        if (!p.excluded) {
            hs.push_back(p.h);
            errs.push_back(p.sys_error);
        }
    if (hs.size() >= 2) {
        const PowerFit fit = fit_power_law(hs, errs);
        report.fit_a = fit.prefactor;
        report.fit_t = fit.exponent;
    }
    return report;
}

}  // namespace roduq
