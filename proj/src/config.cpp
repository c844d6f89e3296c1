#include "roduq/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace roduq {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("config line " + std::to_string(line_no) +
                                   ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("config line " + std::to_string(line_no) + ": empty key");
        cfg.entries_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw config_error("override must have the form section.key=value: " + assignment);
    entries_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw config_error("missing config key: " + key);
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error("config key " + key + " is not a number: " + v);
    }
}

double Config::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int_or(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = get_double(key);
    return static_cast<int>(v);
}

std::uint64_t Config::get_u64_or(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw config_error("config key " + key + " is not an integer: " + v);
    }
}

std::vector<double> Config::get_list(const std::string& key) const {
    const std::string v = get(key);
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw config_error("config key " + key + " has a non-numeric entry: " + item);
        }
    }
    return out;
}

std::string Config::dump() const {
    std::ostringstream out;
    for (const auto& [key, value] : entries_) out << key << " = " << value << '\n';
    return out.str();
}

namespace {

CrossSection resolve_section(const Config& cfg) {
    const std::string kind = cfg.get_or("section.kind", "disc");
    if (kind == "disc") {
        const double radius = cfg.get_double_or("section.radius", 0.696);
        const int rings = cfg.get_int_or("section.mesh_rings", 8);
        return make_disc_meshed(radius, rings);
    }
    if (kind == "polygon") {
        const std::string verts = cfg.get("section.vertices");
        std::vector<Eigen::Vector2d> pts;
        std::istringstream in(verts);
        std::string pair;
        while (std::getline(in, pair, ';')) {
            std::istringstream ps(pair);
            double x = 0, y = 0;
            if (!(ps >> x >> y))
                throw config_error("section.vertices: expected 'x y; x y; ...'");
            pts.emplace_back(x, y);
        }
        const double target_h = cfg.get_double_or("section.target_h", 0.1);
        return make_polygon_section(pts, target_h);
    }
    throw config_error("section.kind must be disc or polygon");
}

MaterialSpec resolve_material(const Config& cfg) {
    MaterialSpec m;
    const std::string model = cfg.get_or("material.model", "deterministic");
    if (model == "deterministic")
        m.model = MaterialModel::deterministic;
    else if (model == "lognormal")
        m.model = MaterialModel::lognormal_transform;
    else if (model == "paper_literal")
        m.model = MaterialModel::paper_literal;
    else
        throw config_error("material.model must be deterministic, lognormal or paper_literal");
    m.mu0 = cfg.get_double_or("material.mu", 30.8);
    m.lambda0 = cfg.get_double_or("material.lambda", 66.6);
    m.sigma_mu = cfg.get_double_or("material.sigma_mu", 0.0);
    m.sigma_lambda = cfg.get_double_or("material.sigma_lambda", 0.0);
    m.lambda_ratio = cfg.get_double_or("material.lambda_ratio", 2.16);
    m.floor_frac = cfg.get_double_or("material.floor_frac", 0.1);
    return m;
}

RodBC resolve_bc(const Config& cfg) {
    RodBC bc;
    bc.L = cfg.get_double_or("bc.L", 1.0);
    bc.t(0) = cfg.get_double_or("bc.t1", bc.L);
    bc.t(1) = cfg.get_double_or("bc.t2", 0.0);
    bc.t(2) = cfg.get_double_or("bc.t3", 0.0);
    bc.k0 = cfg.get_double_or("bc.k0", 0.0);
    bc.kL = cfg.get_double_or("bc.kL", 0.0);
    auto matrix2 = [&](const std::string& key) {
        Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
        if (cfg.has(key)) {
            const auto v = cfg.get_list(key);
            if (v.size() != 4)
                throw config_error(key + " must hold four row-major entries");
            m << v[0], v[1], v[2], v[3];
        }
        return m;
    };
    bc.A0 = matrix2("bc.A0");
    bc.AL = matrix2("bc.AL");
    return bc;
}

}  // namespace

Experiment resolve_experiment(const Config& cfg, const std::string& name) {
    Experiment e;
    e.name = name;
    e.setup.section = resolve_section(cfg);
    e.setup.material = resolve_material(cfg);
    e.setup.sigma1 = cfg.get_double_or("perturbation.sigma1", 0.3);
    e.setup.sigma2 = cfg.get_double_or("perturbation.sigma2", 0.3);
    e.setup.eps = cfg.get_double_or("perturbation.eps", 0.05);
    e.setup.clip = cfg.get_double_or("perturbation.clip", 0.0);
    e.setup.bc = resolve_bc(cfg);
    e.setup.n_elements = cfg.get_int_or("discretization.n_elements", 200);
    e.setup.n_layers = cfg.get_int_or("discretization.n_layers", 0);
    e.setup.h = cfg.get_double_or("discretization.h", 0.1);
    e.setup.workers = cfg.get_int_or("mc.workers", 1);
    e.mc_samples = cfg.get_int_or("mc.samples", 100);
    e.seed_base = cfg.get_u64_or("mc.seed", 1);
    e.n_high = cfg.get_int_or("mc.n_high", 8);
    if (cfg.has("sweep.eps_list")) e.eps_list = cfg.get_list("sweep.eps_list");
    if (cfg.has("discretization.h_list"))
        e.h_list = cfg.get_list("discretization.h_list");
    e.mesh_moments = cfg.get_or("section.use_mesh_moments", "auto");
    if (e.mesh_moments != "auto" && e.mesh_moments != "true" &&
        e.mesh_moments != "false")
        throw config_error("section.use_mesh_moments must be auto, true or false");

    std::string out = cfg.get_or("output.dir", "");
    if (out.empty()) {
        const char* env = std::getenv("RODUQ_OUT_DIR");
        out = env ? env : "out";
    }
    e.out_dir = std::filesystem::path(out) / name;
    return e;
}

void apply_mesh_moments(Experiment& experiment, bool involves_3d) {
    const bool apply = experiment.mesh_moments == "true" ||
                       (experiment.mesh_moments == "auto" && involves_3d);
    if (apply && experiment.setup.section.mesh)
        experiment.setup.section = with_mesh_moments(experiment.setup.section);
}

void write_manifest(const Experiment& experiment, const Config& config,
                    const std::string& command) {
    std::filesystem::create_directories(experiment.out_dir);
    std::ofstream out(experiment.out_dir / "manifest.txt");
    if (!out) throw error("cannot write manifest in " + experiment.out_dir.string());
    out << "command = " << command << '\n';
    out << "seed_base = " << experiment.seed_base << '\n';
    out << "resolved config:\n" << config.dump();
}

}  // namespace roduq
