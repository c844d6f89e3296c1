// Command-line front end: dispatches the experiments described by a plain
// text config file and writes CSV artifacts plus a reproducibility manifest.

#include <CLI11.hpp>
#include <iostream>

#include "roduq/config.hpp"
#include "roduq/csv.hpp"

namespace {

using namespace roduq;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string seed;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "experiment config file")
        ->required();
    cmd->add_option("--set", args.overrides,
                    "override a config entry (section.key=value)");
    cmd->add_option("-o,--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "seed base override");
    cmd->add_option("--workers", args.workers, "worker threads");
}

Config load_config(const CommonArgs& args) {
    Config cfg = Config::parse_file(args.config_path);
    for (const auto& o : args.overrides) cfg.apply_override(o);
    if (!args.out_dir.empty()) cfg.apply_override("output.dir=" + args.out_dir);
    if (!args.seed.empty()) cfg.apply_override("mc.seed=" + args.seed);
    if (args.workers > 0)
        cfg.apply_override("mc.workers=" + std::to_string(args.workers));
    return cfg;
}

const std::vector<std::string> kEnergyHeader = {
    "experiment", "sample_id", "seed", "fidelity", "h",       "eps",     "E",
    "E_stretch",  "E_twist",   "E_bend2", "E_bend3", "iters", "residual"};

void write_energy_row(CsvWriter& csv, const Experiment& e, const SampleRecord& rec) {
    const std::vector<std::string> fields = {
        e.name, std::to_string(rec.sample_index), std::to_string(rec.seed),
        rec.fidelity == Fidelity::rod3d ? "3d" : "1d"};
    const std::vector<double> values = {
        rec.h,
        rec.eps,
        rec.report.value,
        rec.report.stretch,
        rec.report.twist,
        rec.report.bend2,
        rec.report.bend3,
        static_cast<double>(rec.report.solve_iters),
        rec.report.residual};
    csv.row(fields, values);
}

void write_ensemble(const Experiment& e, const EnsembleTable& table) {
    CsvWriter csv(e.out_dir / "energies.csv", kEnergyHeader);
    for (const auto& rec : table.records)
        if (!rec.failed) write_energy_row(csv, e, rec);
    for (const auto& rec : table.records_3d)
        if (!rec.failed) write_energy_row(csv, e, rec);
}

void write_summary(const Experiment& e, const McSummary& s, const std::string& name) {
    {
        const std::vector<std::string> header = {"n", "mean", "variance",
                                                 "l2_error_vs_ref", "seed_base"};
        CsvWriter csv(e.out_dir / (name + "_summary.csv"), header);
        csv.row(std::vector<double>{
            static_cast<double>(s.n), s.mean, s.variance,
            s.l2_error_vs_ref.value_or(std::numeric_limits<double>::quiet_NaN()),
            static_cast<double>(e.seed_base)});
    }
    const std::vector<std::string> header = {"value", "F"};
    CsvWriter csv(e.out_dir / (name + "_ecdf.csv"), header);
    for (std::size_t i = 0; i < s.ecdf.size(); ++i)
        csv.row(std::vector<double>{s.ecdf[i],
                                    static_cast<double>(i + 1) / s.ecdf.size()});
}

FieldSample single_sample(const Experiment& e, int n_grid) {
    const FieldSampler sampler(midpoint_grid(e.setup.bc.L, n_grid), e.setup.sigma1,
                               e.setup.sigma2, e.setup.eps, e.setup.material);
    FieldSample s = sampler.sample(e.seed_base, 0);
    if (e.setup.clip > 0.0) s = enforce_smallness(std::move(s), e.setup.clip);
    return s;
}

void export_fields(const Experiment& e, const FieldSample& s) {
    const std::vector<std::string> header = {"t", "phi1", "phi2", "mu", "lambda"};
    CsvWriter csv(e.out_dir / "fields.csv", header);
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        csv.row(std::vector<double>{s.grid[i], s.phi1[i], s.phi2[i], s.mu[i],
                                    s.lambda[i]});
}

void export_section_mesh(const Experiment& e) {
    if (!e.setup.section.mesh) return;
    const TriMesh& mesh = *e.setup.section.mesh;
    {
        const std::vector<std::string> header = {"node", "x2", "x3"};
        CsvWriter csv(e.out_dir / "section_nodes.csv", header);
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
            csv.row(std::vector<double>{static_cast<double>(i), mesh.nodes[i].x(),
                                        mesh.nodes[i].y()});
    }
    const std::vector<std::string> header = {"triangle", "n0", "n1", "n2"};
    CsvWriter csv(e.out_dir / "section_elements.csv", header);
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i)
        csv.row(std::vector<double>{
            static_cast<double>(i), static_cast<double>(mesh.triangles[i][0]),
            static_cast<double>(mesh.triangles[i][1]),
            static_cast<double>(mesh.triangles[i][2])});
}

int cmd_solve1d(const Config& cfg, const std::string& cmdline, bool fields_out) {
    Experiment e = resolve_experiment(cfg, "solve1d");
    apply_mesh_moments(e, false);
    write_manifest(e, cfg, cmdline);
    const FieldSample s = single_sample(e, e.setup.n_elements);
    const Rod1DResult result =
        effective_modulus_1d(e.setup.section, s, e.setup.bc, e.setup.n_elements);
    if (result.eps_under_resolved)
        std::cerr << "warning: correlation length under-resolved (eps < 4L/N)\n";

    {
        const std::vector<std::string> header = {"x1", "u_bar", "r1", "r2", "r3"};
        CsvWriter csv(e.out_dir / "solution.csv", header);
        for (std::size_t i = 0; i < result.state.grid.size(); ++i)
            csv.row(std::vector<double>{result.state.grid[i], result.state.u_bar[i],
                                        result.state.r[i](0), result.state.r[i](1),
                                        result.state.r[i](2)});
    }
    CsvWriter csv(e.out_dir / "energies.csv", kEnergyHeader);
    SampleRecord rec;
    rec.seed = e.seed_base;
    rec.eps = e.setup.eps;
    rec.report = result.report;
    write_energy_row(csv, e, rec);
    if (fields_out) export_fields(e, s);
    return 0;
}

int cmd_solve3d(const Config& cfg, const std::string& cmdline, bool mesh_out) {
    Experiment e = resolve_experiment(cfg, "solve3d");
    apply_mesh_moments(e, true);
    write_manifest(e, cfg, cmdline);
    const int layers = e.setup.layers();
    const FieldSample s = single_sample(e, layers);
    const PrismMesh mesh =
        build_prism_mesh(*e.setup.section.mesh, layers, e.setup.bc.L);
    const Rod3DResult result = effective_modulus_3d(mesh, s, e.setup.bc, e.setup.h);

    CsvWriter csv(e.out_dir / "energies.csv", kEnergyHeader);
    SampleRecord rec;
    rec.seed = e.seed_base;
    rec.eps = e.setup.eps;
    rec.h = e.setup.h;
    rec.fidelity = Fidelity::rod3d;
    rec.report = result.report;
    write_energy_row(csv, e, rec);

    if (mesh_out) {
        export_section_mesh(e);
        const std::vector<std::string> header = {"node", "x1", "x2", "x3",
                                                 "u1",   "u2", "u3"};
        CsvWriter disp(e.out_dir / "displacement.csv", header);
        for (int layer = 0; layer <= mesh.n_layers; ++layer)
            for (int sn = 0; sn < mesh.n_section_nodes(); ++sn) {
                const int node = mesh.node_index(layer, sn);
                const auto& u = result.displacement.u[node];
                disp.row(std::vector<double>{
                    static_cast<double>(node), mesh.layer_x1(layer),
                    mesh.section.nodes[sn].x(), mesh.section.nodes[sn].y(), u(0),
                    u(1), u(2)});
            }
    }
    return 0;
}

int cmd_proxy(const Config& cfg, const std::string& cmdline) {
    Experiment e = resolve_experiment(cfg, "proxy");
    apply_mesh_moments(e, false);
    write_manifest(e, cfg, cmdline);
    const HomogenizedCoefficients coeffs = homogenized_coefficients_for_model(
        e.setup.section, e.setup.material, e.setup.eps, e.seed_base ^ 0xA0C0FFEEull);
    const double closed = e0_closed_form(e.setup.section, coeffs, e.setup.bc);
    const EnergyReport system =
        e0_system_solve(e.setup.section, coeffs, e.setup.bc, e.setup.n_elements);

    const std::vector<std::string> header = {"method", "E", "a_hom", "mu_hom"};
    CsvWriter csv(e.out_dir / "proxy.csv", header);
    csv.row(std::vector<std::string>{"closed_form"},
            std::vector<double>{closed, coeffs.a_hom, coeffs.mu_hom});
    csv.row(std::vector<std::string>{"system_solve"},
            std::vector<double>{system.value, coeffs.a_hom, coeffs.mu_hom});
    std::cout << "E0 closed form  = " << format_double(closed) << '\n'
              << "E0 system solve = " << format_double(system.value) << '\n';
    return 0;
}

int cmd_mc(const Config& cfg, const std::string& cmdline, const std::string& model) {
    Experiment e = resolve_experiment(cfg, "mc");
    EnsembleModel m = EnsembleModel::rod1d;
    if (model == "3d")
        m = EnsembleModel::rod3d;
    else if (model == "both")
        m = EnsembleModel::both_coupled;
    apply_mesh_moments(e, m != EnsembleModel::rod1d);
    write_manifest(e, cfg, cmdline);
    const EnsembleTable table = run_ensemble(m, e.mc_samples, e.seed_base, e.setup);
    write_ensemble(e, table);
    if (m != EnsembleModel::rod3d)
        write_summary(e, fluctuation_stats(table.values(Fidelity::rod1d)), "mc_1d");
    if (m != EnsembleModel::rod1d)
        write_summary(e, fluctuation_stats(table.values(Fidelity::rod3d)), "mc_3d");
    return 0;
}

int cmd_rate_sweep(const Config& cfg, const std::string& cmdline) {
    Experiment e = resolve_experiment(cfg, "rate_sweep");
    apply_mesh_moments(e, false);
    if (e.eps_list.empty()) throw config_error("rate-sweep requires sweep.eps_list");
    write_manifest(e, cfg, cmdline);
    RateSetup setup{e.setup.section, e.setup.material, e.setup.sigma1,
                    e.setup.sigma2,  e.setup.clip,     e.setup.bc,
                    e.setup.n_elements};
    const RateReport report =
        rate_sweep(setup, e.eps_list, e.mc_samples, e.seed_base, e.setup.workers);
    {
        const std::vector<std::string> header = {"eps", "l2_error", "n_samples"};
        CsvWriter csv(e.out_dir / "rates.csv", header);
        for (const auto& p : report.points)
            if (!p.excluded)
                csv.row(std::vector<double>{p.eps, p.l2_error,
                                            static_cast<double>(p.n_samples)});
    }
    const std::vector<std::string> header = {"slope", "intercept", "slope_stderr",
                                             "e0"};
    CsvWriter csv(e.out_dir / "rate_fit.csv", header);
    csv.row(std::vector<double>{report.slope, report.intercept, report.slope_stderr,
                                report.e0});
    std::cout << "fitted slope = " << format_double(report.slope) << '\n';
    return 0;
}

int cmd_h_sweep(const Config& cfg, const std::string& cmdline) {
    Experiment e = resolve_experiment(cfg, "h_sweep");
    apply_mesh_moments(e, true);
    if (e.h_list.empty()) throw config_error("h-sweep requires discretization.h_list");
    write_manifest(e, cfg, cmdline);
    const TrendReport report =
        h_sweep(e.h_list, e.mc_samples, e.seed_base, e.setup);
    const std::vector<std::string> header = {"h", "sys_error", "fit_a", "fit_t"};
    CsvWriter csv(e.out_dir / "trends.csv", header);
    for (const auto& p : report.points)
        if (!p.excluded)
            csv.row(std::vector<double>{p.h, p.sys_error, report.fit_a,
                                        report.fit_t});
    std::cout << "fitted exponent t = " << format_double(report.fit_t) << '\n';
    return 0;
}

int cmd_multifidelity(const Config& cfg, const std::string& cmdline) {
    Experiment e = resolve_experiment(cfg, "multifidelity");
    apply_mesh_moments(e, true);
    write_manifest(e, cfg, cmdline);
    // Large 1D ensemble plus a few coupled pairs on a disjoint seed range.
    const EnsembleTable table_1d =
        run_ensemble(EnsembleModel::rod1d, e.mc_samples, e.seed_base, e.setup);
    const EnsembleTable coupled = run_ensemble(
        EnsembleModel::both_coupled, e.n_high, e.seed_base ^ 0x517CC1B7ull, e.setup);
    const MultiFidelityEstimate est =
        multifidelity(table_1d.values(Fidelity::rod1d),
                      coupled.values(Fidelity::rod3d), coupled.values(Fidelity::rod1d));
    write_ensemble(e, table_1d);
    {
        const std::vector<std::string> header = {"sample_id", "E_shifted"};
        CsvWriter csv(e.out_dir / "mf_values.csv", header);
        const auto shifted = est.shifted_values();
        for (std::size_t i = 0; i < shifted.size(); ++i)
            csv.row(std::vector<double>{static_cast<double>(i), shifted[i]});
    }
    const std::vector<std::string> header = {"delta", "n_high", "mean", "variance"};
    CsvWriter csv(e.out_dir / "mf_summary.csv", header);
    csv.row(std::vector<double>{est.delta, static_cast<double>(est.n_high),
                                est.mean(), est.variance()});
    std::cout << "delta = " << format_double(est.delta) << '\n';
    return 0;
}

int cmd_section_info(const Config& cfg, const std::string& cmdline, bool mesh_out) {
    Experiment e = resolve_experiment(cfg, "section_info");
    write_manifest(e, cfg, cmdline);
    const CrossSection& s = e.setup.section;
    const std::vector<std::string> header = {"area", "I2", "I3", "J", "triangles"};
    CsvWriter csv(e.out_dir / "section.csv", header);
    csv.row(std::vector<double>{
        s.area, s.I2, s.I3, s.J,
        static_cast<double>(s.mesh ? s.mesh->triangles.size() : 0)});
    std::cout << "area = " << format_double(s.area) << "\nI2   = " << format_double(s.I2)
              << "\nI3   = " << format_double(s.I3) << "\nJ    = " << format_double(s.J)
              << '\n';
    if (mesh_out) export_section_mesh(e);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"effective elastic moduli of randomly perturbed rods"};
    app.require_subcommand(1);

    CommonArgs args;
    bool export_fields_flag = false, export_mesh_flag = false;
    std::string mc_model = "1d";

    auto* solve1d = app.add_subcommand("solve1d", "single 1D surrogate solve");
    add_common(solve1d, args);
    solve1d->add_flag("--export-fields", export_fields_flag, "write field sample CSV");

    auto* solve3d = app.add_subcommand("solve3d", "single 3D reference solve");
    add_common(solve3d, args);
    solve3d->add_flag("--export-mesh", export_mesh_flag,
                      "write mesh and displacement CSVs");

    auto* proxy = app.add_subcommand("proxy", "deterministic proxy E0");
    add_common(proxy, args);

    auto* mc = app.add_subcommand("mc", "Monte Carlo ensemble");
    add_common(mc, args);
    mc->add_option("--model", mc_model, "1d | 3d | both")->default_str("1d");

    auto* rate = app.add_subcommand("rate-sweep", "L2 error vs eps with rate fit");
    add_common(rate, args);

    auto* hsweep = app.add_subcommand("h-sweep", "systematic error vs h with fit");
    add_common(hsweep, args);

    auto* mf = app.add_subcommand("multifidelity", "shifted 1D ensemble estimator");
    add_common(mf, args);

    auto* section = app.add_subcommand("section-info", "cross-section properties");
    add_common(section, args);
    section->add_flag("--export-mesh", export_mesh_flag, "write section mesh CSVs");

    CLI11_PARSE(app, argc, argv);

    std::string cmdline;
    for (int i = 0; i < argc; ++i) cmdline += std::string(i ? " " : "") + argv[i];

    try {
        const Config cfg = load_config(args);
        if (solve1d->parsed()) return cmd_solve1d(cfg, cmdline, export_fields_flag);
        if (solve3d->parsed()) return cmd_solve3d(cfg, cmdline, export_mesh_flag);
        if (proxy->parsed()) return cmd_proxy(cfg, cmdline);
        if (mc->parsed()) return cmd_mc(cfg, cmdline, mc_model);
        if (rate->parsed()) return cmd_rate_sweep(cfg, cmdline);
        if (hsweep->parsed()) return cmd_h_sweep(cfg, cmdline);
        if (mf->parsed()) return cmd_multifidelity(cfg, cmdline);
        if (section->parsed()) return cmd_section_info(cfg, cmdline, export_mesh_flag);
    } catch (const config_error& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
