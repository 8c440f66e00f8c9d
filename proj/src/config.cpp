#include "tfred/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tfred {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("bad number for " + what + ": '" + t + "'");
    return v;
}

std::uint64_t to_uint(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("bad integer for " + what + ": '" + t + "'");
    return v;
}

bool to_bool(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    throw ConfigError("bad boolean for " + what + ": '" + t + "'");
}

}  // namespace

std::pair<std::string, double> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected name=value, got '" + text + "'");
    std::string name = trim(text.substr(0, eq));
    if (name.empty()) throw ConfigError("empty parameter name in '" + text + "'");
    return {name, to_double(text.substr(eq + 1), name)};
}

std::vector<double> parse_eps_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item, "eps"));
    if (out.empty()) throw ConfigError("empty eps list");
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0)) throw ConfigError("eps values must be positive");
        if (i && !(out[i] < out[i - 1])) throw ConfigError("eps list must be strictly decreasing");
    }
    return out;
}

std::string write_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[run]\n";
    os << "system = " << c.system << '\n';
    os << "seed = " << c.seed << '\n';
    os << "out = " << c.out_dir << '\n';
    os << "force = " << (c.force ? "true" : "false") << '\n';
    os << "\n[params]\n";
    for (const auto& [k, v] : c.overrides) os << k << " = " << num(v) << '\n';
    os << "\n[sweep]\n";
    os << "eps = ";
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) os << (i ? ", " : "") << num(c.eps_list[i]);
    os << '\n';
    os << "tau0 = " << num(c.tau0) << '\n';
    os << "T = " << num(c.T) << '\n';
    os << "grid = " << c.grid << '\n';
    os << "record_timing = " << (c.record_timing ? "true" : "false") << '\n';
    os << "\n[tolerances]\n";
    os << "rtol = " << num(c.rtol) << '\n';
    os << "atol = " << num(c.atol) << '\n';
    os << "samples = " << c.samples << '\n';
    return os.str();
}

RunConfig read_config(const std::string& text) {
    RunConfig c;
    c.eps_list.clear();
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(t.substr(1, t.size() - 2));
            if (section != "run" && section != "params" && section != "sweep" && section != "tolerances")
                throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
        auto unknown = [&] {
            return ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "' in [" + section + "]");
        };
        if (section == "run") {
            if (key == "system") c.system = val;
            else if (key == "seed") c.seed = to_uint(val, key);
            else if (key == "out") c.out_dir = val;
            else if (key == "force") c.force = to_bool(val, key);
            else throw unknown();
        } else if (section == "params") {
            c.overrides[key] = to_double(val, key);
        } else if (section == "sweep") {
            if (key == "eps") c.eps_list = parse_eps_list(val);
            else if (key == "tau0") c.tau0 = to_double(val, key);
            else if (key == "T") c.T = to_double(val, key);
            else if (key == "grid") c.grid = to_uint(val, key);
            else if (key == "record_timing") c.record_timing = to_bool(val, key);
            else throw unknown();
        } else if (section == "tolerances") {
            if (key == "rtol") c.rtol = to_double(val, key);
            else if (key == "atol") c.atol = to_double(val, key);
            else if (key == "samples") c.samples = to_uint(val, key);
            else throw unknown();
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        }
    }
    if (c.eps_list.empty()) c.eps_list = RunConfig{}.eps_list;
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return read_config(ss.str());
}

}  // namespace tfred
