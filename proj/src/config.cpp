#include "qucl/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "qucl/report.hpp"

namespace qucl {

namespace {

const std::vector<std::string> kFieldKeys{"field", "degree", "direction", "value"};
const std::vector<std::string> kEnsembleKeys{"ensemble", "members", "c", "terms", "sample"};

std::vector<std::string> join(std::initializer_list<std::vector<std::string>> parts) {
    std::vector<std::string> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end());
    return out;
}

const std::map<std::string, std::vector<std::string>>& key_table() {
    static const std::map<std::string, std::vector<std::string>> table{
        {"solve", join({{"boundary", "direction", "index"}})},
        {"constants", join({{"r", "kappa_w"}})},
        {"three-ball", join({kEnsembleKeys, {"center", "r", "regime"}})},
        {"caccioppoli", join({kEnsembleKeys, {"center", "inner", "outer", "form"}})},
        {"doubling", join({kFieldKeys, {"center", "r", "rhos"}})},
        {"frequency", join({kFieldKeys, {"center", "r_min", "r_max", "ratio", "rho"}})},
        {"vanishing", join({kFieldKeys, {"center", "r_min"}})},
        {"global-uc", join({kFieldKeys, {"omega_center", "omega_radius", "radii", "geometry", "rho_bar"}})},
        {"cauchy", join({kEnsembleKeys, {"axis", "side", "patch_center", "half_widths", "lambda"}})},
        {"carleman", join({{"norm", "weight", "inner", "outer", "points", "tau_min", "tau_max", "taus", "predicted",
                            "tolerance", "radius", "lambda", "shift"}})},
        {"cover", join({{"erosion", "eps"}})},
        {"chain", join({kFieldKeys, {"from", "to", "r", "instances"}})},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string vec_text(const Vec& v) { return format_number(v[0]) + " " + format_number(v[1]) + " " + format_number(v[2]); }

// Section -> key -> (value, line). Keys are kept in a map so lookups and duplicate checks are simple.
using Entries = std::map<std::string, std::pair<std::string, int>>;

struct Section {
    std::string name;
    int line = 0;
    Entries entries;
};

class Reader {
public:
    Reader(const Section& s, std::set<std::string> allowed) : s_(s), allowed_(std::move(allowed)) {
        for (const auto& [k, v] : s.entries)
            if (!allowed_.count(k))
                throw ConfigError("line " + std::to_string(v.second) + ": unknown key '" + k + "' in [" + s.name + "]");
    }

    template <class F>
    void get(const std::string& key, F&& assign) const {
        const auto it = s_.entries.find(key);
        if (it == s_.entries.end()) return;
        try {
            assign(it->second.first);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(it->second.second) + ": [" + s_.name + "] " + key + ": " +
                              e.what());
        }
    }

private:
    const Section& s_;
    std::set<std::string> allowed_;
};

long parse_long(const std::string& text) {
    const std::string t = trim(text);
    long v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) throw ConfigError("expected an integer, got '" + text + "'");
    return v;
}

std::string parse_choice(const std::string& text, std::initializer_list<const char*> options) {
    const std::string t = trim(text);
    for (const char* o : options)
        if (t == o) return t;
    std::string all;
    for (const char* o : options) all += std::string(all.empty() ? "" : "|") + o;
    throw ConfigError("expected one of " + all + ", got '" + t + "'");
}

}  // namespace

double parse_number(const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "infinity") return kInf;
    if (t == "-inf") return -kInf;
    double v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size())
        throw ConfigError("expected a number, got '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text) {
    std::string t = text;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream is(t);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_number(tok));
    return out;
}

Vec parse_vec(const std::string& text) {
    const auto v = parse_list(text);
    if (v.size() != 3) throw ConfigError("expected three numbers, got '" + text + "'");
    return {v[0], v[1], v[2]};
}

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds = [] {
        std::vector<std::string> k;
        for (const auto& [name, keys] : key_table()) k.push_back(name);
        return k;
    }();
    return kinds;
}

const std::vector<std::string>& experiment_keys(const std::string& kind) {
    const auto it = key_table().find(kind);
    if (it == key_table().end()) throw ConfigError("unknown experiment kind '" + kind + "'");
    return it->second;
}

bool RunConfig::operator==(const RunConfig& o) const {
    // Canonical text is a complete encoding of every field.
    return serialize_config(*this) == serialize_config(o);
}

RunConfig parse_config(const std::string& text) {
    std::vector<Section> sections;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    std::set<std::string> seen;
    while (std::getline(is, raw)) {
        ++line;
        std::string l = raw;
        const auto hash = l.find_first_of("#;");
        if (hash != std::string::npos) l = l.substr(0, hash);
        l = trim(l);
        if (l.empty()) continue;
        if (l.front() == '[') {
            if (l.back() != ']') throw ConfigError("line " + std::to_string(line) + ": malformed section header");
            const std::string name = trim(l.substr(1, l.size() - 2));
            if (name.empty()) throw ConfigError("line " + std::to_string(line) + ": empty section name");
            if (!seen.insert(name).second)
                throw ConfigError("line " + std::to_string(line) + ": duplicate section [" + name + "]");
            sections.push_back({name, line, {}});
            continue;
        }
        const auto eq = l.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        if (sections.empty()) throw ConfigError("line " + std::to_string(line) + ": key outside any section");
        const std::string key = trim(l.substr(0, eq));
        const std::string value = trim(l.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
        if (!sections.back().entries.emplace(key, std::make_pair(value, line)).second)
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }

    RunConfig c;
    auto number = [](double& dst) { return [&dst](const std::string& v) { dst = parse_number(v); }; };
    auto vec = [](Vec& dst) { return [&dst](const std::string& v) { dst = parse_vec(v); }; };
    for (const auto& s : sections) {
        if (s.name == "run") {
            Reader r(s, {"seed", "workers", "out", "mode"});
            r.get("seed", [&](const std::string& v) {
                const long x = parse_long(v);
                if (x < 0) throw ConfigError("seed must be nonnegative");
                c.seed = static_cast<std::uint64_t>(x);
            });
            r.get("workers", [&](const std::string& v) {
                c.workers = static_cast<int>(parse_long(v));
                if (c.workers < 0) throw ConfigError("workers must be nonnegative");
            });
            r.get("out", [&](const std::string& v) {
                if (v.empty()) throw ConfigError("empty output directory");
                c.out = v;
            });
            r.get("mode", [&](const std::string& v) { c.mode = parse_choice(v, {"fit", "explicit"}); });
        } else if (s.name == "domain") {
            Reader r(s, {"lengths", "origin", "h"});
            r.get("lengths", vec(c.lengths));
            r.get("origin", vec(c.origin));
            r.get("h", number(c.h));
            if (!(c.h > 0.0)) throw ConfigError("[domain] h must be positive");
        } else if (s.name == "potential") {
            Reader r(s, {"kind", "value", "high", "sub_lo", "sub_hi", "center", "power", "s"});
            r.get("kind", [&](const std::string& v) {
                c.potential = parse_choice(v, {"constant", "two_level", "radial_power"});
            });
            r.get("value", number(c.value));
            r.get("high", number(c.high));
            r.get("sub_lo", vec(c.sub_lo));
            r.get("sub_hi", vec(c.sub_hi));
            r.get("center", vec(c.center));
            r.get("power", number(c.power));
            r.get("s", number(c.s));
        } else if (s.name == "drift") {
            Reader r(s, {"kind", "value", "m"});
            r.get("kind", [&](const std::string& v) { c.drift = parse_choice(v, {"none", "constant"}); });
            r.get("value", vec(c.drift_value));
            r.get("m", number(c.m));
        } else if (s.name == "solver") {
            Reader r(s, {"tol", "max_iterations"});
            r.get("tol", number(c.tol));
            r.get("max_iterations", [&](const std::string& v) { c.max_iterations = parse_long(v); });
        } else if (s.name == "constants") {
            auto& u = c.universal;
            Reader r(s, {"k", "c", "c1", "cbar", "chat", "frak_c", "vartheta", "alpha", "frak_t", "sin_theta",
                         "cauchy_c", "sigma"});
            r.get("k", number(u.k));
            r.get("c", number(u.c));
            r.get("c1", number(u.c1));
            r.get("cbar", number(u.cbar));
            r.get("chat", number(u.chat));
            r.get("frak_c", number(u.frak_c));
            r.get("vartheta", number(u.vartheta));
            r.get("alpha", number(u.alpha));
            r.get("frak_t", number(u.frak_t));
            r.get("sin_theta", number(u.sin_theta));
            r.get("cauchy_c", number(u.cauchy_c));
            r.get("sigma", number(c.sigma));
            if (!(u.alpha > 0.0 && u.alpha < 1.0)) throw ConfigError("[constants] alpha must lie in (0, 1)");
        } else if (s.name == "quadrature") {
            Reader r(s, {"radial", "polar", "azimuth", "box_order", "box_split"});
            auto integer = [](int& dst) {
                return [&dst](const std::string& v) {
                    dst = static_cast<int>(parse_long(v));
                    if (dst <= 0) throw ConfigError("must be positive");
                };
            };
            r.get("radial", integer(c.quadrature.radial));
            r.get("polar", integer(c.quadrature.polar));
            r.get("azimuth", integer(c.quadrature.azimuth));
            r.get("box_order", integer(c.quadrature.box_order));
            r.get("box_split", integer(c.quadrature.box_split));
        } else if (s.name.rfind("experiment.", 0) == 0) {
            ExperimentConfig e;
            e.name = s.name.substr(11);
            if (e.name.empty() || e.name.find_first_of("/\\ ") != std::string::npos)
                throw ConfigError("line " + std::to_string(s.line) + ": bad experiment name '" + e.name + "'");
            const auto kind = s.entries.find("kind");
            if (kind == s.entries.end())
                throw ConfigError("line " + std::to_string(s.line) + ": [" + s.name + "] needs a kind");
            e.kind = kind->second.first;
            try {
                experiment_keys(e.kind);
            } catch (const ConfigError& err) {
                throw ConfigError("line " + std::to_string(kind->second.second) + ": " + err.what());
            }
            const auto& keys = experiment_keys(e.kind);
            for (const auto& [k, v] : s.entries) {
                if (k == "kind") continue;
                if (!std::binary_search(keys.begin(), keys.end(), k))
                    throw ConfigError("line " + std::to_string(v.second) + ": unknown key '" + k + "' for " + e.kind);
                e.params[k] = v.first;
            }
            c.experiments.push_back(std::move(e));
        } else {
            throw ConfigError("line " + std::to_string(s.line) + ": unknown section [" + s.name + "]");
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c, bool runtime) {
    std::ostringstream os;
    const auto& u = c.universal;
    os << "[run]\n"
       << "seed = " << c.seed << '\n';
    if (runtime) os << "workers = " << c.workers << '\n'
                    << "out = " << c.out << '\n';
    os << "mode = " << c.mode << "\n\n"
       << "[domain]\n"
       << "lengths = " << vec_text(c.lengths) << '\n'
       << "origin = " << vec_text(c.origin) << '\n'
       << "h = " << format_number(c.h) << "\n\n"
       << "[potential]\n"
       << "kind = " << c.potential << '\n'
       << "value = " << format_number(c.value) << '\n'
       << "high = " << format_number(c.high) << '\n'
       << "sub_lo = " << vec_text(c.sub_lo) << '\n'
       << "sub_hi = " << vec_text(c.sub_hi) << '\n'
       << "center = " << vec_text(c.center) << '\n'
       << "power = " << format_number(c.power) << '\n'
       << "s = " << format_number(c.s) << "\n\n"
       << "[drift]\n"
       << "kind = " << c.drift << '\n'
       << "value = " << vec_text(c.drift_value) << '\n'
       << "m = " << format_number(c.m) << "\n\n"
       << "[solver]\n"
       << "tol = " << format_number(c.tol) << '\n'
       << "max_iterations = " << c.max_iterations << "\n\n"
       << "[constants]\n"
       << "k = " << format_number(u.k) << '\n'
       << "c = " << format_number(u.c) << '\n'
       << "c1 = " << format_number(u.c1) << '\n'
       << "cbar = " << format_number(u.cbar) << '\n'
       << "chat = " << format_number(u.chat) << '\n'
       << "frak_c = " << format_number(u.frak_c) << '\n'
       << "vartheta = " << format_number(u.vartheta) << '\n'
       << "alpha = " << format_number(u.alpha) << '\n'
       << "frak_t = " << format_number(u.frak_t) << '\n'
       << "sin_theta = " << format_number(u.sin_theta) << '\n'
       << "cauchy_c = " << format_number(u.cauchy_c) << '\n'
       << "sigma = " << format_number(c.sigma) << "\n\n"
       << "[quadrature]\n"
       << "radial = " << c.quadrature.radial << '\n'
       << "polar = " << c.quadrature.polar << '\n'
       << "azimuth = " << c.quadrature.azimuth << '\n'
       << "box_order = " << c.quadrature.box_order << '\n'
       << "box_split = " << c.quadrature.box_split << '\n';
    for (const auto& e : c.experiments) {
        os << "\n[experiment." << e.name << "]\n"
           << "kind = " << e.kind << '\n';
        for (const auto& [k, v] : e.params) os << k << " = " << v << '\n';
    }
    return os.str();
}

namespace {

template <class T, class F>
T param(const ExperimentConfig& e, const std::string& key, T fallback, F&& parse) {
    const auto it = e.params.find(key);
    if (it == e.params.end()) return fallback;
    try {
        return parse(it->second);
    } catch (const ConfigError& err) {
        throw ConfigError("[experiment." + e.name + "] " + key + ": " + err.what());
    }
}

}  // namespace

double param_number(const ExperimentConfig& e, const std::string& key, double fallback) {
    return param(e, key, fallback, parse_number);
}

long param_integer(const ExperimentConfig& e, const std::string& key, long fallback) {
    return param(e, key, fallback, parse_long);
}

std::string param_text(const ExperimentConfig& e, const std::string& key, const std::string& fallback) {
    return param(e, key, fallback, [](const std::string& v) { return trim(v); });
}

Vec param_vec(const ExperimentConfig& e, const std::string& key, const Vec& fallback) {
    return param(e, key, fallback, parse_vec);
}

std::vector<double> param_list(const ExperimentConfig& e, const std::string& key, const std::vector<double>& fallback) {
    return param(e, key, fallback, [](const std::string& v) {
        auto l = parse_list(v);
        if (l.empty()) throw ConfigError("empty list");
        return l;
    });
}

}  // namespace qucl
