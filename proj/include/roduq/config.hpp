#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roduq/mc.hpp"

namespace roduq {

// Sectioned key/value configuration. Keys are addressed as
// "section.key"; values are scalars, comma-separated arrays, or
// semicolon-separated coordinate pairs.
class Config {
public:
    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(const std::string& text);

    // Overrides of the form "section.key=value" (CLI flags win).
    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int_or(const std::string& key, int fallback) const;
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_list(const std::string& key) const;

    // Serialization of the resolved configuration for the run manifest.
    std::string dump() const;

private:
    std::map<std::string, std::string> entries_;
};

// Fully resolved experiment description built from a Config.
struct Experiment {
    std::string name;
    EnsembleSetup setup;
    std::vector<double> eps_list;
    std::vector<double> h_list;
    int mc_samples = 100;
    std::uint64_t seed_base = 1;
    int n_high = 8;
    std::string mesh_moments = "auto";  // auto | true | false
    std::filesystem::path out_dir;
};

Experiment resolve_experiment(const Config& config, const std::string& name);

// Replaces the analytic section moments by mesh-integrated ones when the
// experiment couples 1D and 3D fidelities (mode "auto") or always ("true").
void apply_mesh_moments(Experiment& experiment, bool involves_3d);

// Writes the resolved config and seed data; a run is reproducible from its
// manifest alone.
void write_manifest(const Experiment& experiment, const Config& config,
                    const std::string& command);

}  // namespace roduq
