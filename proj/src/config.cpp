#include "bmera/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bmera::config {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"run", {"d", "m", "n", "seed", "independent_boundaries"}},
        {"check", {"tolerance", "tensors"}},
        {"spectrum", {"dump_maps", "twopoint"}},
        {"operator", {"type", "pauli", "index", "opseed"}},
        {"profile", {"k_lo", "k_hi"}},
        {"correlator", {"m_lo", "m_hi"}},
        {"energy", {"tau", "model", "g", "jcoup"}},
        {"optimize",
         {"sweeps", "tol_energy", "which", "tau", "weight", "warm", "epsilon", "hat_depth",
          "checkpoint", "resume"}},
        {"exact", {"n", "tolerance"}},
    };
    return s;
}

std::int64_t to_int(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        fail(Errc::InvalidConfig, "config: integer expected for " + key);
    }
}

double to_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        fail(Errc::InvalidConfig, "config: number expected for " + key);
    }
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(Errc::InvalidConfig, "config: boolean expected for " + key);
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    cfg.hash = fnv1a(text);
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hashpos = line.find_first_of("#;");
        if (hashpos != std::string::npos) line = line.substr(0, hashpos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(Errc::InvalidConfig, "config: malformed section at line " +
                                              std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section))
                fail(Errc::InvalidConfig, "config: unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(Errc::InvalidConfig, "config: expected key = value at line " +
                                          std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty()) fail(Errc::InvalidConfig, "config: key outside any section: " + key);
        if (!schema().at(section).count(key))
            fail(Errc::InvalidConfig, "config: unknown key " + key + " in [" + section + "]");

        if (section == "run") {
            if (key == "d") cfg.mera.d = to_int(val, key);
            else if (key == "m") cfg.mera.m = to_int(val, key);
            else if (key == "n") cfg.mera.n = static_cast<int>(to_int(val, key));
            else if (key == "seed") cfg.mera.seed = static_cast<std::uint64_t>(to_int(val, key));
            else if (key == "independent_boundaries")
                cfg.mera.independent_boundaries = to_bool(val, key);
        } else if (section == "check") {
            if (key == "tolerance") cfg.check_tolerance = to_double(val, key);
            else if (key == "tensors") cfg.tensors_path = val;
        } else if (section == "spectrum") {
            if (key == "dump_maps") cfg.dump_maps = to_bool(val, key);
            else if (key == "twopoint") cfg.twopoint = to_bool(val, key);
        } else if (section == "operator") {
            if (key == "type") cfg.op_type = val;
            else if (key == "pauli") cfg.op_pauli = val;
            else if (key == "index") cfg.op_index = static_cast<int>(to_int(val, key));
            else if (key == "opseed") cfg.op_seed = static_cast<std::uint64_t>(to_int(val, key));
        } else if (section == "profile") {
            if (key == "k_lo") cfg.k_lo = static_cast<int>(to_int(val, key));
            else if (key == "k_hi") cfg.k_hi = static_cast<int>(to_int(val, key));
        } else if (section == "correlator") {
            if (key == "m_lo") cfg.m_lo = static_cast<int>(to_int(val, key));
            else if (key == "m_hi") cfg.m_hi = static_cast<int>(to_int(val, key));
        } else if (section == "energy") {
            if (key == "tau") cfg.tau = static_cast<int>(to_int(val, key));
            else if (key == "model") cfg.model = val;
            else if (key == "g") cfg.g = to_double(val, key);
            else if (key == "jcoup") cfg.jcoup = to_double(val, key);
        } else if (section == "optimize") {
            if (key == "sweeps") cfg.sweeps = static_cast<int>(to_int(val, key));
            else if (key == "tol_energy") cfg.tol_energy = to_double(val, key);
            else if (key == "which") cfg.which = val;
            else if (key == "tau") cfg.opt_tau = static_cast<int>(to_int(val, key));
            else if (key == "weight") cfg.weight = to_double(val, key);
            else if (key == "warm") cfg.warm = to_bool(val, key);
            else if (key == "epsilon") cfg.epsilon = to_double(val, key);
            else if (key == "hat_depth") cfg.hat_depth = static_cast<int>(to_int(val, key));
            else if (key == "checkpoint") cfg.checkpoint = val;
            else if (key == "resume") cfg.resume = val;
        } else if (section == "exact") {
            if (key == "n") cfg.exact_n = static_cast<int>(to_int(val, key));
            else if (key == "tolerance") cfg.exact_tolerance = to_double(val, key);
        }
    }
    if (cfg.op_type != "identity" && cfg.op_type != "pauli" && cfg.op_type != "scaling" &&
        cfg.op_type != "random_hermitian")
        fail(Errc::InvalidConfig, "config: unknown operator type " + cfg.op_type);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(Errc::IoError, "cannot open config: " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace bmera::config
