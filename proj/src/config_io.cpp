// SPDX-License-Identifier: Apache-2.0
#include "fpm/config_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fpm/errors.hpp"
#include "fpm/scenarios.hpp"

namespace fpm {

double ScenarioConfig::theta_rad() const {
    return theta_deg * std::acos(-1.0) / 180.0;
}

int ScenarioConfig::material_iters_for(double phase_ratio) const {
    if (material_smooth_iters > 0) return material_smooth_iters;
    return phase_ratio >= 100.0 ? 10 : 3;
}

std::vector<std::string> ScenarioConfig::validate() const {
    std::vector<std::string> bad;
    auto req = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };

    req(std::isfinite(domain.xmin) && std::isfinite(domain.xmax) &&
            std::isfinite(domain.ymin) && std::isfinite(domain.ymax),
        "domain bounds must be finite");
    req(domain.xmax > domain.xmin, "domain.xmax must exceed domain.xmin");
    req(domain.ymax > domain.ymin, "domain.ymax must exceed domain.ymin");

    req(h > 0.0 && std::isfinite(h), "numerics.h must be positive");
    if (h > 0.0 && domain.xmax > domain.xmin && domain.ymax > domain.ymin) {
        req(domain.width() >= 3.0 * h && domain.height() >= 3.0 * h,
            "domain must span at least 3h in each direction");
    }
    req(spacing_factor >= 1.0, "numerics.spacing_factor must be at least 1");
    req(dt > 0.0 && std::isfinite(dt), "numerics.dt must be positive");
    req(t_end >= 0.0 && std::isfinite(t_end), "numerics.t_end must be nonnegative");
    req(alpha > 0.0, "numerics.alpha must be positive");
    req(beta > 0.0, "numerics.beta must be positive");
    req(eps_solver > 0.0, "numerics.eps_solver must be positive");
    req(max_sweeps >= 1, "numerics.max_sweeps must be at least 1");
    req(color_smooth_iters >= 1, "numerics.color_smooth_iters must be at least 1");
    req(material_smooth_iters >= 0, "numerics.material_smooth_iters must be nonnegative");
    req(vel_blend >= 0.0 && vel_blend < 1.0, "numerics.vel_blend must lie in [0, 1)");

    req(rho_liquid > 0.0, "fluids.rho_liquid must be positive");
    req(rho_gas > 0.0, "fluids.rho_gas must be positive");
    req(mu_liquid > 0.0, "fluids.mu_liquid must be positive");
    req(mu_gas > 0.0, "fluids.mu_gas must be positive");
    req(sigma >= 0.0, "fluids.sigma must be nonnegative");
    req(theta_deg > 0.0 && theta_deg < 180.0,
        "fluids.theta_deg must lie strictly between 0 and 180");
    req(std::isfinite(gravity.x) && std::isfinite(gravity.y),
        "fluids.gravity must be finite");

    switch (phase.shape) {
        case PhaseShape::Uniform:
            break;
        case PhaseShape::HalfPlane:
            req(std::isfinite(phase.y_fill), "phase.y_fill must be finite");
            break;
        case PhaseShape::Rectangle:
            req(phase.box.xmax > phase.box.xmin && phase.box.ymax > phase.box.ymin,
                "phase box must have positive extent");
            break;
        case PhaseShape::Semicircle:
            req(phase.radius > 0.0, "phase.radius must be positive");
            break;
    }

    req(merge_factor >= 0.0 && merge_factor <= 0.5,
        "management.merge_factor must lie in [0, 0.5]");
    req(output_interval > 0.0, "output.interval must be positive");
    return bad;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Key/value store built by the line scanner. Values keep their source
// line for error messages.
struct KvStore {
    std::map<std::string, std::pair<std::string, int>> kv;
    std::vector<std::string> errors;
    std::vector<std::string> defaulted;

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    void mark_consumed(const std::string& key) { consumed_.push_back(key); }

    double number(const std::string& key, double fallback, bool required) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required)
                errors.push_back("missing required key '" + key + "'");
            else
                defaulted.push_back(key);
            return fallback;
        }
        mark_consumed(key);
        const std::string& raw = it->second.first;
        double value = fallback;
        const char* first = raw.data();
        const char* last = raw.data() + raw.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            errors.push_back("line " + std::to_string(it->second.second) + ": key '" +
                             key + "' has non-numeric value '" + raw + "'");
            return fallback;
        }
        return value;
    }

    int integer(const std::string& key, int fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            defaulted.push_back(key);
            return fallback;
        }
        mark_consumed(key);
        const std::string& raw = it->second.first;
        int value = fallback;
        auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
        if (ec != std::errc() || ptr != raw.data() + raw.size()) {
            errors.push_back("line " + std::to_string(it->second.second) + ": key '" +
                             key + "' has non-integer value '" + raw + "'");
            return fallback;
        }
        return value;
    }

    bool boolean(const std::string& key, bool fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            defaulted.push_back(key);
            return fallback;
        }
        mark_consumed(key);
        const std::string& raw = it->second.first;
        if (raw == "true") return true;
        if (raw == "false") return false;
        errors.push_back("line " + std::to_string(it->second.second) + ": key '" + key +
                         "' expects true or false, got '" + raw + "'");
        return fallback;
    }

    std::string text(const std::string& key, const std::string& fallback, bool required) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            if (required)
                errors.push_back("missing required key '" + key + "'");
            else
                defaulted.push_back(key);
            return fallback;
        }
        mark_consumed(key);
        return it->second.first;
    }

    void flag_unconsumed() {
        for (const auto& [key, val] : kv) {
            bool seen = false;
            for (const auto& c : consumed_)
                if (c == key) seen = true;
            if (!seen)
                errors.push_back("line " + std::to_string(val.second) +
                                 ": unknown key '" + key + "'");
        }
    }

  private:
    std::vector<std::string> consumed_;
};

KvStore scan_lines(const std::string& text) {
    KvStore store;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                store.errors.push_back("line " + std::to_string(lineno) +
                                       ": malformed section header '" + line + "'");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            store.errors.push_back("line " + std::to_string(lineno) +
                                   ": expected 'key = value', got '" + line + "'");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            store.errors.push_back("line " + std::to_string(lineno) +
                                   ": empty key or value in '" + line + "'");
            continue;
        }
        std::string full = section.empty() ? key : section + "." + key;
        if (store.kv.count(full)) {
            store.errors.push_back("line " + std::to_string(lineno) +
                                   ": duplicate key '" + full + "'");
            continue;
        }
        store.kv[full] = {value, lineno};
    }
    return store;
}

const char* shape_name(PhaseShape s) {
    switch (s) {
        case PhaseShape::Uniform: return "uniform";
        case PhaseShape::HalfPlane: return "halfplane";
        case PhaseShape::Rectangle: return "rectangle";
        case PhaseShape::Semicircle: return "semicircle";
    }
    return "uniform";
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ConfigParseResult parse_config(const std::string& text) {
    KvStore s = scan_lines(text);
    ScenarioConfig c;
    ScenarioConfig defaults;

    c.name = s.text("name", "custom", false);

    c.domain.xmin = s.number("domain.xmin", 0.0, true);
    c.domain.xmax = s.number("domain.xmax", 0.0, true);
    c.domain.ymin = s.number("domain.ymin", 0.0, true);
    c.domain.ymax = s.number("domain.ymax", 0.0, true);

    std::string shape = s.text("phase.shape", "uniform", true);
    if (shape == "uniform") {
        c.phase.shape = PhaseShape::Uniform;
    } else if (shape == "halfplane") {
        c.phase.shape = PhaseShape::HalfPlane;
        c.phase.y_fill = s.number("phase.y_fill", 0.0, true);
    } else if (shape == "rectangle") {
        c.phase.shape = PhaseShape::Rectangle;
        c.phase.box.xmin = s.number("phase.box_xmin", 0.0, true);
        c.phase.box.xmax = s.number("phase.box_xmax", 0.0, true);
        c.phase.box.ymin = s.number("phase.box_ymin", 0.0, true);
        c.phase.box.ymax = s.number("phase.box_ymax", 0.0, true);
    } else if (shape == "semicircle") {
        c.phase.shape = PhaseShape::Semicircle;
        c.phase.center.x = s.number("phase.center_x", 0.0, true);
        c.phase.center.y = s.number("phase.center_y", 0.0, true);
        c.phase.radius = s.number("phase.radius", 0.0, true);
    } else if (!shape.empty()) {
        s.errors.push_back("phase.shape must be one of uniform, halfplane, rectangle, "
                           "semicircle; got '" + shape + "'");
    }

    c.rho_liquid = s.number("fluids.rho_liquid", 0.0, true);
    c.mu_liquid = s.number("fluids.mu_liquid", 0.0, true);
    c.rho_gas = s.number("fluids.rho_gas", 0.0, true);
    c.mu_gas = s.number("fluids.mu_gas", 0.0, true);
    c.sigma = s.number("fluids.sigma", 0.0, true);
    c.theta_deg = s.number("fluids.theta_deg", 90.0, true);
    c.gravity.x = s.number("fluids.gravity_x", 0.0, false);
    c.gravity.y = s.number("fluids.gravity_y", 0.0, false);

    c.h = s.number("numerics.h", 0.0, true);
    c.t_end = s.number("numerics.t_end", 0.0, true);
    c.spacing_factor = s.number("numerics.spacing_factor", defaults.spacing_factor, false);
    c.dt = s.number("numerics.dt", defaults.dt, false);
    c.alpha = s.number("numerics.alpha", defaults.alpha, false);
    c.beta = s.number("numerics.beta", defaults.beta, false);
    c.eps_solver = s.number("numerics.eps_solver", defaults.eps_solver, false);
    c.max_sweeps = s.integer("numerics.max_sweeps", defaults.max_sweeps);
    c.color_smooth_iters = s.integer("numerics.color_smooth_iters", defaults.color_smooth_iters);
    c.material_smooth_iters =
        s.integer("numerics.material_smooth_iters", defaults.material_smooth_iters);
    c.vel_blend = s.number("numerics.vel_blend", defaults.vel_blend, false);
    c.smoothed_density_in_momentum = s.boolean("numerics.smoothed_density_in_momentum",
                                               defaults.smoothed_density_in_momentum);

    std::string advect = s.text("numerics.advect_with", "current", false);
    if (advect == "current") {
        c.advect_with = AdvectWith::CurrentVelocity;
    } else if (advect == "corrected") {
        c.advect_with = AdvectWith::CorrectedVelocity;
    } else {
        s.errors.push_back("numerics.advect_with must be 'current' or 'corrected', got '" +
                           advect + "'");
    }

    c.management = s.boolean("management.enabled", defaults.management);
    c.merge_factor = s.number("management.merge_factor", defaults.merge_factor, false);
    c.output_interval = s.number("output.interval", defaults.output_interval, false);

    s.flag_unconsumed();

    for (const auto& v : c.validate()) s.errors.push_back(v);

    if (!s.errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : s.errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }

    ConfigParseResult result;
    result.config = c;
    result.defaulted_keys = s.defaulted;
    return result;
}

ConfigParseResult load_config(const std::string& source) {
    if (is_builtin_scenario(source)) {
        ConfigParseResult r;
        r.config = builtin_scenario(source);
        return r;
    }
    std::ifstream in(source);
    if (!in) {
        std::string msg = "'" + source + "' is neither a builtin scenario nor a readable file";
        msg += "\nbuiltin scenarios:";
        for (const auto& n : builtin_scenario_names()) msg += "\n  " + n;
        throw ConfigError(msg);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string emit_config(const ScenarioConfig& c) {
    std::ostringstream out;
    out << "name = " << c.name << "\n\n";

    out << "[domain]\n";
    out << "xmin = " << fmt(c.domain.xmin) << "\n";
    out << "xmax = " << fmt(c.domain.xmax) << "\n";
    out << "ymin = " << fmt(c.domain.ymin) << "\n";
    out << "ymax = " << fmt(c.domain.ymax) << "\n\n";

    out << "[phase]\n";
    out << "shape = " << shape_name(c.phase.shape) << "\n";
    switch (c.phase.shape) {
        case PhaseShape::Uniform:
            break;
        case PhaseShape::HalfPlane:
            out << "y_fill = " << fmt(c.phase.y_fill) << "\n";
            break;
        case PhaseShape::Rectangle:
            out << "box_xmin = " << fmt(c.phase.box.xmin) << "\n";
            out << "box_xmax = " << fmt(c.phase.box.xmax) << "\n";
            out << "box_ymin = " << fmt(c.phase.box.ymin) << "\n";
            out << "box_ymax = " << fmt(c.phase.box.ymax) << "\n";
            break;
        case PhaseShape::Semicircle:
            out << "center_x = " << fmt(c.phase.center.x) << "\n";
            out << "center_y = " << fmt(c.phase.center.y) << "\n";
            out << "radius = " << fmt(c.phase.radius) << "\n";
            break;
    }
    out << "\n[fluids]\n";
    out << "rho_liquid = " << fmt(c.rho_liquid) << "\n";
    out << "mu_liquid = " << fmt(c.mu_liquid) << "\n";
    out << "rho_gas = " << fmt(c.rho_gas) << "\n";
    out << "mu_gas = " << fmt(c.mu_gas) << "\n";
    out << "sigma = " << fmt(c.sigma) << "\n";
    out << "theta_deg = " << fmt(c.theta_deg) << "\n";
    out << "gravity_x = " << fmt(c.gravity.x) << "\n";
    out << "gravity_y = " << fmt(c.gravity.y) << "\n";

    out << "\n[numerics]\n";
    out << "h = " << fmt(c.h) << "\n";
    out << "spacing_factor = " << fmt(c.spacing_factor) << "\n";
    out << "dt = " << fmt(c.dt) << "\n";
    out << "t_end = " << fmt(c.t_end) << "\n";
    out << "alpha = " << fmt(c.alpha) << "\n";
    out << "beta = " << fmt(c.beta) << "\n";
    out << "eps_solver = " << fmt(c.eps_solver) << "\n";
    out << "max_sweeps = " << c.max_sweeps << "\n";
    out << "color_smooth_iters = " << c.color_smooth_iters << "\n";
    out << "material_smooth_iters = " << c.material_smooth_iters << "\n";
    out << "vel_blend = " << fmt(c.vel_blend) << "\n";
    out << "advect_with = "
        << (c.advect_with == AdvectWith::CurrentVelocity ? "current" : "corrected") << "\n";
    out << "smoothed_density_in_momentum = "
        << (c.smoothed_density_in_momentum ? "true" : "false") << "\n";

    out << "\n[management]\n";
    out << "enabled = " << (c.management ? "true" : "false") << "\n";
    out << "merge_factor = " << fmt(c.merge_factor) << "\n";

    out << "\n[output]\n";
    out << "interval = " << fmt(c.output_interval) << "\n";
    return out.str();
}

}  // namespace fpm
