#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "arraymem/cli.hpp"
#include "arraymem/error.hpp"
#include "arraymem/types.hpp"

namespace arraymem {

namespace {

using nlohmann::json;

const std::set<std::string> kCommands = {"efficiency", "scan-waist", "optimal-waist", "holes",
                                         "disorder",   "finite-time", "isotropic",    "validate"};

class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) {
        for (const auto& [key, _] : obj_.items()) {
            bool known = false;
            for (const char* k : keys) known = known || key == k;
            if (!known) throw ConfigError(at(key), "unknown key");
        }
    }

    void get(const char* key, int& target) const {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
            target = v->get<int>();
        }
    }
    void get(const char* key, std::uint64_t& target) const {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
                throw ConfigError(at(key), "expected a non-negative integer");
            target = v->get<std::uint64_t>();
        }
    }
    void get(const char* key, double& target) const {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw ConfigError(at(key), "expected a number");
            target = v->get<double>();
        }
    }
    void get(const char* key, bool& target) const {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
            target = v->get<bool>();
        }
    }
    void get(const char* key, std::string& target) const {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(at(key), "expected a string");
            target = v->get<std::string>();
        }
    }
    template <typename T>
    void get(const char* key, std::vector<T>& target) const {
        if (const json* v = find(key)) {
            if (!v->is_array()) throw ConfigError(at(key), "expected an array");
            std::vector<T> out;
            for (std::size_t k = 0; k < v->size(); ++k) {
                const json& item = (*v)[k];
                const bool ok = std::is_integral_v<T> ? item.is_number_integer() : item.is_number();
                if (!ok) throw ConfigError(at(key) + "[" + std::to_string(k) + "]", "expected a number");
                out.push_back(item.get<T>());
            }
            target = std::move(out);
        }
    }

    const json* find(const char* key) const {
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }
    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& obj_;
    std::string path_;
};

void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) throw ConfigError(path, message);
}

} // namespace

RunConfig config_from_json(const json& j, RunConfig c) {
    Reader root(j, "");
    root.allow({"command", "geometry", "mode", "study", "output", "tolerances"});
    root.get("command", c.command);
    if (const json* g = root.find("geometry")) {
        Reader r(*g, "geometry");
        r.allow({"N", "d", "model", "holes", "sigma"});
        r.get("N", c.geometry.N);
        r.get("d", c.geometry.d);
        r.get("model", c.geometry.model);
        r.get("holes", c.geometry.holes);
        r.get("sigma", c.geometry.sigma);
    }
    if (const json* m = root.find("mode")) {
        Reader r(*m, "mode");
        r.allow({"w0", "two_sided", "optimize_waist"});
        r.get("w0", c.mode.w0);
        r.get("two_sided", c.mode.two_sided);
        r.get("optimize_waist", c.mode.optimize_waist);
    }
    if (const json* s = root.find("study")) {
        Reader r(*s, "study");
        r.allow({"w0_list", "w0_min", "w0_max", "w0_steps", "hole_counts", "samples", "seed", "sizes", "sigma_over_d",
                 "Td", "Td_list", "contraction", "workers", "allow_large"});
        r.get("w0_list", c.study.w0_list);
        r.get("w0_min", c.study.w0_min);
        r.get("w0_max", c.study.w0_max);
        r.get("w0_steps", c.study.w0_steps);
        r.get("hole_counts", c.study.hole_counts);
        r.get("samples", c.study.samples);
        r.get("seed", c.study.seed);
        r.get("sizes", c.study.sizes);
        r.get("sigma_over_d", c.study.sigma_over_d);
        r.get("Td", c.study.Td);
        r.get("Td_list", c.study.Td_list);
        r.get("contraction", c.study.contraction);
        r.get("workers", c.study.workers);
        r.get("allow_large", c.study.allow_large);
    }
    if (const json* o = root.find("output")) {
        Reader r(*o, "output");
        r.allow({"directory", "write_files"});
        r.get("directory", c.output.directory);
        r.get("write_files", c.output.write_files);
    }
    if (const json* t = root.find("tolerances")) {
        Reader r(*t, "tolerances");
        r.allow({"quadrature", "waist", "fit_clip_fraction"});
        r.get("quadrature", c.tolerances.quadrature);
        r.get("waist", c.tolerances.waist);
        r.get("fit_clip_fraction", c.tolerances.fit_clip_fraction);
    }
    return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j, std::move(base));
}

void to_json(json& j, const RunConfig& c) {
    j = {{"command", c.command},
         {"geometry",
          {{"N", c.geometry.N},
           {"d", c.geometry.d},
           {"model", c.geometry.model},
           {"holes", c.geometry.holes},
           {"sigma", c.geometry.sigma}}},
         {"mode", {{"w0", c.mode.w0}, {"two_sided", c.mode.two_sided}, {"optimize_waist", c.mode.optimize_waist}}},
         {"study",
          {{"w0_list", c.study.w0_list},
           {"w0_min", c.study.w0_min},
           {"w0_max", c.study.w0_max},
           {"w0_steps", c.study.w0_steps},
           {"hole_counts", c.study.hole_counts},
           {"samples", c.study.samples},
           {"seed", c.study.seed},
           {"sizes", c.study.sizes},
           {"sigma_over_d", c.study.sigma_over_d},
           {"Td", c.study.Td},
           {"Td_list", c.study.Td_list},
           {"contraction", c.study.contraction},
           {"workers", c.study.workers},
           {"allow_large", c.study.allow_large}}},
         {"output", {{"directory", c.output.directory}, {"write_files", c.output.write_files}}},
         {"tolerances",
          {{"quadrature", c.tolerances.quadrature},
           {"waist", c.tolerances.waist},
           {"fit_clip_fraction", c.tolerances.fit_clip_fraction}}}};
}

void validate(const RunConfig& c) {
    require(kCommands.count(c.command) == 1, "command", "unknown command '" + c.command + "'");
    const bool iso = c.geometry.model == "isotropic";
    require(iso || c.geometry.model == "two-level", "geometry.model", "must be 'two-level' or 'isotropic'");
    require(c.geometry.N >= 1, "geometry.N", "must be at least 1");
    const int cap = iso ? 14 : 30;
    require(c.study.allow_large || c.geometry.N <= cap, "geometry.N",
            "exceeds the default cap of " + std::to_string(cap) + " (set study.allow_large)");
    require(c.geometry.d > 0.0 && std::isfinite(c.geometry.d), "geometry.d", "must be positive");
    require(c.geometry.sigma >= 0.0, "geometry.sigma", "must be non-negative");
    for (int h : c.geometry.holes)
        require(h >= 0 && h < c.geometry.N * c.geometry.N, "geometry.holes", "site index out of range");
    require(c.mode.w0 > 0.0 && std::isfinite(c.mode.w0), "mode.w0", "must be positive");
    for (double w : c.study.w0_list) require(w > 0.0, "study.w0_list", "waists must be positive");
    require(c.study.w0_min > 0.0 && c.study.w0_max > c.study.w0_min, "study.w0_max", "need 0 < w0_min < w0_max");
    require(c.study.w0_steps >= 2, "study.w0_steps", "must be at least 2");
    require(c.study.samples >= 1, "study.samples", "must be at least 1");
    for (int h : c.study.hole_counts)
        require(h >= 0 && 5 * h <= c.geometry.N * c.geometry.N, "study.hole_counts",
                "hole counts must lie in [0, 20% of the sites]");
    for (int n : c.study.sizes) {
        require(n >= 2, "study.sizes", "sizes must be at least 2");
        require(c.study.allow_large || n <= (c.command == "isotropic" ? 14 : 30), "study.sizes",
                "size exceeds the default cap (set study.allow_large)");
    }
    for (double s : c.study.sigma_over_d) require(s >= 0.0, "study.sigma_over_d", "must be non-negative");
    require(c.study.Td > 0.0, "study.Td", "must be positive");
    for (double t : c.study.Td_list) require(t > 0.0, "study.Td_list", "windows must be positive");
    require(c.study.contraction == "full" || c.study.contraction == "x-only", "study.contraction",
            "must be 'full' or 'x-only'");
    require(c.study.workers >= 0, "study.workers", "must be non-negative");
    require(c.tolerances.quadrature > 0.0 && c.tolerances.quadrature <= 1e-6, "tolerances.quadrature",
            "must lie in (0, 1e-6]");
    require(c.tolerances.waist > 0.0, "tolerances.waist", "must be positive");
    require(c.tolerances.fit_clip_fraction > 0.0 && c.tolerances.fit_clip_fraction < 1.0,
            "tolerances.fit_clip_fraction", "must lie in (0, 1)");
    require(!c.output.directory.empty(), "output.directory", "must not be empty");
}

} // namespace arraymem
