#include <metamd/grid_config.hpp>

#include <metamd/errors.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>

namespace metamd {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key))
            throw ValidationError(where + ": unknown key '" + key + "'");
}

template <std::size_t N>
void apply_method_list(const json& list, std::array<bool, N>& flags,
                       const char* (*name_of)(std::size_t), const std::string& where) {
    flags.fill(false);
    for (const auto& item : list) {
        const std::string name = item.get<std::string>();
        bool found = false;
        for (std::size_t i = 0; i < N; ++i) {
            if (name == name_of(i)) {
                flags[i] = true;
                found = true;
                break;
            }
        }
        if (!found) throw ValidationError(where + ": unknown method '" + name + "'");
    }
}

}  // namespace

GridConfig read_grid_config(std::istream& in, const std::string& source_name) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(source_name + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError(source_name + ": config must be an object");
    check_keys(j,
               {"K", "size_patterns", "q", "sigma2", "tau2", "mu", "reps", "seed",
                "level", "methods", "output"},
               source_name);
    for (const char* required : {"K", "size_patterns", "q", "sigma2", "tau2", "reps", "seed"})
        if (!j.contains(required))
            throw ValidationError(source_name + ": missing key '" + std::string(required) + "'");

    GridConfig cfg;
    try {
        cfg.k_values = j.at("K").get<std::vector<std::size_t>>();
        for (const auto& p : j.at("size_patterns")) {
            check_keys(p, {"name", "sizes"}, source_name + ": size_patterns");
            SizePattern pat;
            pat.name = p.at("name").get<std::string>();
            pat.sizes = p.at("sizes").get<std::vector<std::size_t>>();
            cfg.size_patterns.push_back(std::move(pat));
        }
        cfg.q_values = j.at("q").get<std::vector<double>>();
        for (const auto& pair : j.at("sigma2")) {
            if (!pair.is_array() || pair.size() != 2)
                throw ValidationError(source_name + ": sigma2 entries must be [sigma2_c, sigma2_t]");
            cfg.sigma2_pairs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
        cfg.tau2_values = j.at("tau2").get<std::vector<double>>();
        cfg.mu = j.value("mu", 0.0);
        cfg.reps = j.at("reps").get<std::size_t>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.level = j.value("level", 0.95);
        cfg.output = j.value("output", std::string{});
        if (j.contains("methods")) {
            const json& m = j.at("methods");
            check_keys(m, {"tau2_point", "tau2_interval", "mu_point", "mu_interval"},
                       source_name + ": methods");
            if (m.contains("tau2_point"))
                apply_method_list(m.at("tau2_point"), cfg.methods.tau2_point,
                                  tau2_point_name, source_name);
            if (m.contains("tau2_interval"))
                apply_method_list(m.at("tau2_interval"), cfg.methods.tau2_interval,
                                  tau2_interval_name, source_name);
            if (m.contains("mu_point"))
                apply_method_list(m.at("mu_point"), cfg.methods.mu_point, mu_point_name,
                                  source_name);
            if (m.contains("mu_interval"))
                apply_method_list(m.at("mu_interval"), cfg.methods.mu_interval,
                                  mu_interval_name, source_name);
        }
    } catch (const json::exception& e) {
        throw ValidationError(source_name + ": " + e.what());
    }
    if (!(cfg.level > 0.0 && cfg.level < 1.0))
        throw ValidationError(source_name + ": level must be in (0,1)");
    if (cfg.reps == 0) throw ValidationError(source_name + ": reps must be > 0");
    return cfg;
}

GridConfig read_grid_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    return read_grid_config(in, path);
}

}  // namespace metamd
