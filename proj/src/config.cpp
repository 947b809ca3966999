#include "opweight/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "opweight/error.hpp"

namespace opweight {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw config_error("config line " + std::to_string(line) + ": " + what);
}

std::variant<double, std::string> scalar(const std::string& raw, std::size_t line) {
    const std::string s = trim(raw);
    if (s.empty()) fail(line, "missing value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
        return s.substr(1, s.size() - 2);
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        fail(line, "cannot parse value '" + s + "'");
    }
    if (used != s.size()) fail(line, "cannot parse value '" + s + "'");
    return v;
}

ConfigValue parse_value(const std::string& raw, std::size_t line) {
    const std::string s = trim(raw);
    if (s == "true") return {true};
    if (s == "false") return {false};
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') fail(line, "arrays must close on the same line");
        ConfigValue::Array items;
        const std::string body = trim(s.substr(1, s.size() - 2));
        if (body.empty()) return {items};
        std::string cur;
        bool quoted = false;
        for (char c : body) {
            if (c == '"') quoted = !quoted;
            if (c == ',' && !quoted) {
                items.push_back(scalar(cur, line));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!trim(cur).empty()) items.push_back(scalar(cur, line));
        return {items};
    }
    const auto v = scalar(s, line);
    if (std::holds_alternative<double>(v)) return {std::get<double>(v)};
    return {std::get<std::string>(v)};
}

double as_number(const ConfigValue& v, const std::string& key) {
    if (!std::holds_alternative<double>(v.value)) throw config_error("'" + key + "' must be a number");
    return std::get<double>(v.value);
}

std::size_t as_count(const ConfigValue& v, const std::string& key) {
    const double x = as_number(v, key);
    if (x < 0.0 || x != std::floor(x) || x > 1e15) throw config_error("'" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(x);
}

std::string as_string(const ConfigValue& v, const std::string& key) {
    if (!std::holds_alternative<std::string>(v.value)) throw config_error("'" + key + "' must be a string");
    return std::get<std::string>(v.value);
}

const ConfigValue::Array& as_array(const ConfigValue& v, const std::string& key) {
    if (!std::holds_alternative<ConfigValue::Array>(v.value)) throw config_error("'" + key + "' must be an array");
    return std::get<ConfigValue::Array>(v.value);
}

std::vector<double> as_numbers(const ConfigValue& v, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : as_array(v, key)) {
        if (!std::holds_alternative<double>(item)) throw config_error("'" + key + "' must hold numbers");
        out.push_back(std::get<double>(item));
    }
    return out;
}

std::vector<std::size_t> as_counts(const ConfigValue& v, const std::string& key) {
    std::vector<std::size_t> out;
    for (double x : as_numbers(v, key)) {
        if (x < 0.0 || x != std::floor(x)) throw config_error("'" + key + "' must hold non-negative integers");
        out.push_back(static_cast<std::size_t>(x));
    }
    return out;
}

PauliLabel as_label(const std::string& s, const std::string& key) {
    try {
        return parse_pauli_label(s);
    } catch (const Error&) {
        throw config_error("'" + key + "' must be one of x, y, z");
    }
}

std::string number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

ConfigTable parse_config(const std::string& text) {
    ConfigTable table;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) fail(line, "empty section name");
            table[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) fail(line, "empty key");
        if (table[section].count(key)) fail(line, "duplicate key '" + key + "'");
        table[section][key] = parse_value(s.substr(eq + 1), line);
    }
    return table;
}

ConfigTable load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot read config file " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

RunConfig apply_config(const ConfigTable& table, RunConfig cfg) {
    for (const auto& [section, entries] : table) {
        for (const auto& [key, v] : entries) {
            const std::string name = section + "." + key;
            if (section == "model") {
                if (key == "J") cfg.model.J = as_number(v, name);
                else if (key == "g") cfg.model.g = as_number(v, name);
                else if (key == "h") cfg.model.h = as_number(v, name);
                else if (key == "L") cfg.model.L = as_count(v, name);
                else throw config_error("unknown key " + name);
            } else if (section == "evolution") {
                if (key == "dt") cfg.evolution.dt = as_number(v, name);
                else if (key == "t_max") cfg.evolution.t_max = as_number(v, name);
                else if (key == "chi_max") cfg.evolution.trunc.chi_max = as_count(v, name);
                else if (key == "lambda2_cutoff") cfg.evolution.trunc.lambda2_cutoff = as_number(v, name);
                else if (key == "hard_cap") cfg.evolution.trunc.hard_cap = as_count(v, name);
                else throw config_error("unknown key " + name);
            } else if (section == "initial") {
                if (key == "theta_deg") cfg.theta_deg = as_number(v, name);
                else if (key == "phi_deg") cfg.phi_deg = as_number(v, name);
                else if (key == "operator") cfg.op = as_label(as_string(v, name), name);
                else if (key == "site") cfg.site = as_count(v, name);
                else throw config_error("unknown key " + name);
            } else if (section == "analysis") {
                if (key == "omega_max") cfg.omega_max = as_count(v, name);
                else if (key == "omega_star") cfg.omega_star = as_counts(v, name);
                else if (key == "omega_perp") cfg.omega_perp = as_counts(v, name);
                else if (key == "t_window") {
                    const auto w = as_numbers(v, name);
                    if (w.size() != 2) throw config_error(name + " must be [t_lo, t_hi]");
                    cfg.t_lo = w[0];
                    cfg.t_hi = w[1];
                } else throw config_error("unknown key " + name);
            } else if (section == "output") {
                if (key == "dir") cfg.out_dir = as_string(v, name);
                else if (key == "stride") cfg.stride = as_count(v, name);
                else if (key == "checkpoint_every") cfg.checkpoint_every = as_count(v, name);
                else throw config_error("unknown key " + name);
            } else if (section == "tempmap") {
                if (key == "dtheta_deg") cfg.dtheta_deg = as_number(v, name);
                else if (key == "dphi_deg") cfg.dphi_deg = as_number(v, name);
                else if (key == "boundary") cfg.thermal_boundary = parse_boundary(as_string(v, name));
                else throw config_error("unknown key " + name);
            } else if (section == "sweep") {
                if (key == "theta_deg") cfg.sweep_theta_deg = as_numbers(v, name);
                else if (key == "phi_deg") cfg.sweep_phi_deg = as_numbers(v, name);
                else if (key == "operators") {
                    cfg.sweep_operators.clear();
                    for (const auto& item : as_array(v, name)) {
                        if (!std::holds_alternative<std::string>(item)) throw config_error(name + " must hold strings");
                        cfg.sweep_operators.push_back(as_label(std::get<std::string>(item), name));
                    }
                } else if (key == "ed_sites") cfg.ed_sites = as_count(v, name);
                else if (key == "jobs") cfg.jobs = as_count(v, name);
                else throw config_error("unknown key " + name);
            } else {
                throw config_error("unknown section [" + section + "]");
            }
        }
    }
    return cfg;
}

Boundary parse_boundary(const std::string& text) {
    if (text == "open") return Boundary::open;
    if (text == "periodic") return Boundary::periodic;
    throw config_error("boundary must be \"open\" or \"periodic\", got '" + text + "'");
}

std::vector<std::size_t> RunConfig::resolved_omega_star() const {
    if (!omega_star.empty()) return omega_star;
    return {std::min<std::size_t>(12, resolved_omega_max())};
}

void RunConfig::validate() const {
    if (model.L < 2) throw config_error("model.L must be at least 2");
    if (!(evolution.dt > 0.0)) throw config_error("evolution.dt must be positive");
    if (!(evolution.t_max >= 0.0)) throw config_error("evolution.t_max must be non-negative");
    if (evolution.trunc.lambda2_cutoff < 0.0) throw config_error("evolution.lambda2_cutoff must be non-negative");
    if (theta_deg < 0.0 || theta_deg > 180.0) throw config_error("initial.theta_deg must lie in [0, 180]");
    if (phi_deg < 0.0 || phi_deg >= 360.0) throw config_error("initial.phi_deg must lie in [0, 360)");
    if (resolved_site() < 1 || resolved_site() > model.L) throw config_error("initial.site out of range");
    if (resolved_omega_max() > model.L) throw config_error("analysis.omega_max exceeds model.L");
    for (std::size_t w : resolved_omega_star()) {
        if (w < 1 || w > resolved_omega_max()) throw config_error("analysis.omega_star must lie in [1, omega_max]");
    }
    if (stride < 1) throw config_error("output.stride must be at least 1");
    if (checkpoint_every % stride != 0) throw config_error("output.checkpoint_every must be a multiple of output.stride");
    if (jobs < 1) throw config_error("jobs must be at least 1");
    for (double p : sweep_phi_deg) {
        if (p < 0.0 || p >= 360.0) throw config_error("sweep.phi_deg entries must lie in [0, 360)");
    }
    for (double t : sweep_theta_deg) {
        if (t < 0.0 || t > 180.0) throw config_error("sweep.theta_deg entries must lie in [0, 180]");
    }
}

std::string RunConfig::canonical() const {
    std::ostringstream s;
    s << "J=" << number(model.J) << ";g=" << number(model.g) << ";h=" << number(model.h) << ";L=" << model.L
      << ";dt=" << number(evolution.dt) << ";t_max=" << number(evolution.t_max)
      << ";chi_max=" << evolution.trunc.chi_max << ";cutoff=" << number(evolution.trunc.lambda2_cutoff)
      << ";hard_cap=" << evolution.trunc.hard_cap << ";theta=" << number(theta_deg) << ";phi=" << number(phi_deg)
      << ";op=" << to_char(op) << ";site=" << resolved_site() << ";omega_max=" << resolved_omega_max()
      << ";omega_star=";
    for (std::size_t w : resolved_omega_star()) s << w << ',';
    s << ";window=" << number(t_lo) << ',' << number(resolved_t_hi()) << ";omega_perp=";
    for (std::size_t w : omega_perp) s << w << ',';
    s << ";stride=" << stride << ";dtheta=" << number(dtheta_deg) << ";dphi=" << number(dphi_deg)
      << ";sweep_theta=";
    for (double t : sweep_theta_deg) s << number(t) << ',';
    s << ";sweep_phi=";
    for (double p : sweep_phi_deg) s << number(p) << ',';
    s << ";sweep_ops=";
    for (PauliLabel l : sweep_operators) s << to_char(l);
    s << ";ed_sites=" << ed_sites << ";boundary=" << (thermal_boundary == Boundary::open ? "open" : "periodic");
    return s.str();
}

std::string RunConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace opweight
