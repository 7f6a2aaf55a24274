#include "hegsim_app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "hegsim_app/table.hpp"

namespace hegsim::app {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool parse_number(const std::string& text, double& out, bool& integer) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc() || res.ptr != last) return false;
    integer = text.find_first_of(".eE") == std::string::npos;
    return std::isfinite(out);
}

std::string join(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s + "]";
}

enum class Kind { number, integer, text, list, optional_number };

struct KeySpec {
    std::string name;  // section.key
    Kind kind;
    std::function<void(RunConfig&, const ConfigValue&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ConfigError(where + ": " + msg);
}

double as_number(const ConfigValue& v, const std::string& where, const std::string& key) {
    if (const auto* d = std::get_if<double>(&v.data)) return *d;
    fail(where, "key '" + key + "' expects a number");
}

std::int64_t as_integer(const ConfigValue& v, const std::string& where, const std::string& key) {
    const auto* d = std::get_if<double>(&v.data);
    if (!d || !v.integer || std::abs(*d) > 9.0e15) fail(where, "key '" + key + "' expects an integer");
    return static_cast<std::int64_t>(*d);
}

std::string as_text(const ConfigValue& v, const std::string& where, const std::string& key) {
    if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
    if (const auto* d = std::get_if<double>(&v.data); d && v.integer) {
        return std::to_string(static_cast<std::int64_t>(*d));
    }
    fail(where, "key '" + key + "' expects a string");
}

std::vector<double> as_list(const ConfigValue& v, const std::string& where, const std::string& key) {
    if (const auto* l = std::get_if<std::vector<double>>(&v.data)) return *l;
    if (const auto* d = std::get_if<double>(&v.data)) return {*d};
    fail(where, "key '" + key + "' expects a list of numbers");
}

// Range checks shared by every numeric key.
enum class Range { any, positive, non_negative, unit, at_least_one };

void check_range(double x, Range r, const std::string& where, const std::string& key) {
    const bool ok = r == Range::any || (r == Range::positive && x > 0.0) ||
                    (r == Range::non_negative && x >= 0.0) ||
                    (r == Range::unit && x > 0.0 && x <= 1.0) || (r == Range::at_least_one && x >= 1.0);
    if (!ok) {
        static const char* names[] = {"", "> 0", ">= 0", "in (0, 1]", ">= 1"};
        fail(where, "key '" + key + "' must be " + names[static_cast<int>(r)] + ", got " + format_number(x));
    }
}

template <typename Member>
KeySpec number_key(std::string name, Member member, Range range) {
    return KeySpec{name, Kind::number,
                   [=](RunConfig& c, const ConfigValue& v, const std::string& where) {
                       const double x = as_number(v, where, name);
                       check_range(x, range, where, name);
                       member(c) = x;
                   },
                   [=](const RunConfig& c) { return format_number(member(const_cast<RunConfig&>(c))); }};
}

template <typename Member>
KeySpec integer_key(std::string name, Member member, std::int64_t min_value) {
    return KeySpec{name, Kind::integer,
                   [=](RunConfig& c, const ConfigValue& v, const std::string& where) {
                       const std::int64_t x = as_integer(v, where, name);
                       if (x < min_value) {
                           fail(where, "key '" + name + "' must be >= " + std::to_string(min_value));
                       }
                       member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(x);
                   },
                   [=](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); }};
}

template <typename Member>
KeySpec list_key(std::string name, Member member, Range range) {
    return KeySpec{name, Kind::list,
                   [=](RunConfig& c, const ConfigValue& v, const std::string& where) {
                       std::vector<double> xs = as_list(v, where, name);
                       if (xs.empty()) fail(where, "key '" + name + "' must not be empty");
                       for (double x : xs) check_range(x, range, where, name);
                       member(c) = std::move(xs);
                   },
                   [=](const RunConfig& c) { return join(member(const_cast<RunConfig&>(c))); }};
}

template <typename Member, typename Check>
KeySpec text_key(std::string name, Member member, Check check) {
    return KeySpec{name, Kind::text,
                   [=](RunConfig& c, const ConfigValue& v, const std::string& where) {
                       std::string s = as_text(v, where, name);
                       check(s, where);
                       member(c) = std::move(s);
                   },
                   [=](const RunConfig& c) { return member(const_cast<RunConfig&>(c)); }};
}

const std::vector<KeySpec>& registry() {
    static const std::vector<KeySpec> keys = [] {
        std::vector<KeySpec> k;
        k.push_back(text_key("cavity.preset", [](RunConfig& c) -> auto& { return c.cavity.preset; },
                             [](const std::string& s, const std::string& where) {
                                 if (!s.empty() && !find_preset(s)) fail(where, "unknown cavity preset '" + s + "'");
                             }));
        k.push_back(number_key("cavity.g_mhz", [](RunConfig& c) -> auto& { return c.cavity.g_mhz; }, Range::positive));
        k.push_back(number_key("cavity.gamma_mhz", [](RunConfig& c) -> auto& { return c.cavity.gamma_mhz; }, Range::positive));
        k.push_back(number_key("cavity.kappa_in_mhz", [](RunConfig& c) -> auto& { return c.cavity.kappa_in_mhz; }, Range::positive));

        k.push_back(KeySpec{"pulse.xi_trunc", Kind::number,
                            [](RunConfig& c, const ConfigValue& v, const std::string& where) {
                                const double x = as_number(v, where, "pulse.xi_trunc");
                                if (!(x >= 2.0)) fail(where, "key 'pulse.xi_trunc' must be >= 2");
                                c.pulse.xi_trunc = x;
                            },
                            [](const RunConfig& c) { return format_number(c.pulse.xi_trunc); }});
        k.push_back(number_key("pulse.xi_sep", [](RunConfig& c) -> auto& { return c.pulse.xi_sep; }, Range::positive));
        k.push_back(list_key("pulse.kappa_ex_mhz", [](RunConfig& c) -> auto& { return c.pulse.kappa_ex_mhz; }, Range::positive));
        k.push_back(integer_key("pulse.grid_points", [](RunConfig& c) -> auto& { return c.pulse.grid_points; }, 256));

        k.push_back(integer_key("mux.n_atoms", [](RunConfig& c) -> auto& { return c.mux.n_atoms; }, 1));
        k.push_back(KeySpec{"mux.n_list", Kind::list,
                            [](RunConfig& c, const ConfigValue& v, const std::string& where) {
                                std::vector<double> ns = as_list(v, where, "mux.n_list");
                                for (double x : ns) {
                                    if (!(x >= 1.0) || x != std::floor(x)) {
                                        fail(where, "key 'mux.n_list' expects integers >= 1");
                                    }
                                }
                                c.mux.n_list = std::move(ns);
                            },
                            [](const RunConfig& c) { return join(c.mux.n_list); }});
        k.push_back(KeySpec{"mux.p_trial", Kind::optional_number,
                            [](RunConfig& c, const ConfigValue& v, const std::string& where) {
                                const double x = as_number(v, where, "mux.p_trial");
                                check_range(x, Range::unit, where, "mux.p_trial");
                                c.mux.p_trial = x;
                            },
                            [](const RunConfig& c) {
                                return c.mux.p_trial ? format_number(*c.mux.p_trial) : std::string("derived");
                            }});
        k.push_back(number_key("mux.dt_us", [](RunConfig& c) -> auto& { return c.mux.dt_us; }, Range::positive));
        k.push_back(number_key("mux.t_init_us", [](RunConfig& c) -> auto& { return c.mux.t_init_us; }, Range::positive));
        k.push_back(number_key("mux.t_move_us", [](RunConfig& c) -> auto& { return c.mux.t_move_us; }, Range::positive));
        k.push_back(KeySpec{"mux.zones", Kind::integer,
                            [](RunConfig& c, const ConfigValue& v, const std::string& where) {
                                const std::int64_t z = as_integer(v, where, "mux.zones");
                                if (z != 1 && z != 2) fail(where, "key 'mux.zones' must be 1 or 2");
                                c.mux.zones = z;
                            },
                            [](const RunConfig& c) { return std::to_string(c.mux.zones); }});
        k.push_back(integer_key("mux.m_max", [](RunConfig& c) -> auto& { return c.mux.m_max; }, 1));

        k.push_back(list_key("waveguide.L_mm", [](RunConfig& c) -> auto& { return c.waveguide.L_mm; }, Range::positive));
        k.push_back(list_key("waveguide.L_m_mm", [](RunConfig& c) -> auto& { return c.waveguide.L_m_mm; }, Range::non_negative));
        k.push_back(number_key("waveguide.wavelength_nm", [](RunConfig& c) -> auto& { return c.waveguide.wavelength_nm; }, Range::positive));
        k.push_back(number_key("waveguide.n_eff", [](RunConfig& c) -> auto& { return c.waveguide.n_eff; }, Range::at_least_one));
        k.push_back(list_key("waveguide.loss_db_per_m", [](RunConfig& c) -> auto& { return c.waveguide.loss_db_per_m; }, Range::non_negative));
        k.push_back(number_key("waveguide.g0_mhz", [](RunConfig& c) -> auto& { return c.waveguide.g0_mhz; }, Range::positive));
        k.push_back(number_key("waveguide.kappa_fbg0_mhz", [](RunConfig& c) -> auto& { return c.waveguide.kappa_fbg0_mhz; }, Range::non_negative));
        k.push_back(number_key("waveguide.L0_mm", [](RunConfig& c) -> auto& { return c.waveguide.L0_mm; }, Range::positive));

        k.push_back(KeySpec{"sim.seed", Kind::integer,
                            [](RunConfig& c, const ConfigValue& v, const std::string& where) {
                                const std::int64_t s = as_integer(v, where, "sim.seed");
                                if (s < 0) fail(where, "key 'sim.seed' must be >= 0");
                                c.sim.seed = static_cast<std::uint64_t>(s);
                            },
                            [](const RunConfig& c) { return std::to_string(c.sim.seed); }});
        k.push_back(integer_key("sim.replications", [](RunConfig& c) -> auto& { return c.sim.replications; }, 2));
        k.push_back(number_key("sim.eta_link", [](RunConfig& c) -> auto& { return c.sim.eta_link; }, Range::unit));
        k.push_back(number_key("sim.eta_det", [](RunConfig& c) -> auto& { return c.sim.eta_det; }, Range::unit));
        k.push_back(integer_key("sim.n_channels", [](RunConfig& c) -> auto& { return c.sim.n_channels; }, 1));
        k.push_back(number_key("sim.t_herald_us", [](RunConfig& c) -> auto& { return c.sim.t_herald_us; }, Range::non_negative));
        k.push_back(text_key("sim.policy", [](RunConfig& c) -> auto& { return c.sim.policy; },
                             [](const std::string& s, const std::string& where) {
                                 if (s != "pipelined" && s != "blocking") {
                                     fail(where, "key 'sim.policy' must be \"pipelined\" or \"blocking\"");
                                 }
                             }));
        k.push_back(text_key("sim.m", [](RunConfig& c) -> auto& { return c.sim.m; },
                             [](const std::string& s, const std::string& where) {
                                 if (s == "auto") return;
                                 int m = 0;
                                 const auto res = std::from_chars(s.data(), s.data() + s.size(), m);
                                 if (res.ec != std::errc() || res.ptr != s.data() + s.size() || m < 1) {
                                     fail(where, "key 'sim.m' must be \"auto\" or an integer >= 1");
                                 }
                             }));
        k.push_back(number_key("sim.max_time_ms", [](RunConfig& c) -> auto& { return c.sim.max_time_ms; }, Range::positive));
        k.push_back(integer_key("sim.target_pairs", [](RunConfig& c) -> auto& { return c.sim.target_pairs; }, 0));
        k.push_back(KeySpec{"sim.latency_k", Kind::list,
                            [](RunConfig& c, const ConfigValue& v, const std::string& where) {
                                std::vector<double> ks = as_list(v, where, "sim.latency_k");
                                for (double x : ks) {
                                    if (!(x >= 0.0) || x != std::floor(x)) {
                                        fail(where, "key 'sim.latency_k' expects non-negative integers");
                                    }
                                }
                                c.sim.latency_k = std::move(ks);
                            },
                            [](const RunConfig& c) { return join(c.sim.latency_k); }});

        k.push_back(list_key("heg.kappa_in_over_g", [](RunConfig& c) -> auto& { return c.heg.kappa_in_over_g; }, Range::positive));
        k.push_back(integer_key("heg.tau_points", [](RunConfig& c) -> auto& { return c.heg.tau_points; }, 1));
        k.push_back(integer_key("heg.kappa_ex_points", [](RunConfig& c) -> auto& { return c.heg.kappa_ex_points; }, 1));

        k.push_back(list_key("budget.n", [](RunConfig& c) -> auto& { return c.budget.n; }, Range::non_negative));
        k.push_back(number_key("budget.bell_rate_hz", [](RunConfig& c) -> auto& { return c.budget.bell_rate_hz; }, Range::positive));
        k.push_back(number_key("budget.transport_coeff_us", [](RunConfig& c) -> auto& { return c.budget.transport_coeff_us; }, Range::positive));
        k.push_back(number_key("budget.t_meas_us", [](RunConfig& c) -> auto& { return c.budget.t_meas_us; }, Range::positive));
        return k;
    }();
    return keys;
}

const KeySpec* find_key(const std::string& dotted) {
    for (const auto& k : registry()) {
        if (k.name == dotted) return &k;
    }
    return nullptr;
}

}  // namespace

ConfigValue parse_value(const std::string& raw, bool allow_bare) {
    const std::string text = trim(raw);
    ConfigValue v;
    if (text.empty()) throw ConfigError("missing value");
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') throw ConfigError("unterminated string " + text);
        const std::string body = text.substr(1, text.size() - 2);
        if (body.find('"') != std::string::npos) throw ConfigError("unexpected quote in " + text);
        v.data = body;
        return v;
    }
    if (text == "true" || text == "false") {
        v.data = text == "true";
        return v;
    }
    if (text.front() == '[') {
        if (text.back() != ']') throw ConfigError("unterminated list " + text);
        std::vector<double> items;
        std::stringstream ss(text.substr(1, text.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) {
                if (ss.eof()) break;  // trailing comma
                throw ConfigError("empty list element in " + text);
            }
            double x = 0.0;
            bool integer = false;
            if (!parse_number(item, x, integer)) throw ConfigError("invalid number '" + item + "' in list");
            items.push_back(x);
        }
        v.data = std::move(items);
        return v;
    }
    double x = 0.0;
    bool integer = false;
    if (parse_number(text, x, integer)) {
        v.data = x;
        v.integer = integer;
        return v;
    }
    if (allow_bare) {
        v.data = text;
        return v;
    }
    throw ConfigError("invalid value '" + text + "'");
}

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.heg.kappa_in_over_g = log_space(1e-2, 1e1, 13);
    c.waveguide.L_mm = {1.1, 1.25, 1.5, 2.0, 3.0, 5.0, 7.5, 10.0, 15.0, 20.0};
    return c;
}

void RunConfig::set(const std::string& dotted_key, const ConfigValue& value, const std::string& where) {
    const KeySpec* spec = find_key(dotted_key);
    if (!spec) {
        const auto dot = dotted_key.find('.');
        fail(where, "unknown key '" + dotted_key.substr(dot + 1) + "' in section [" +
                        dotted_key.substr(0, dot) + "]");
    }
    spec->set(*this, value, where);
    explicit_keys.insert(dotted_key);
}

void RunConfig::finalize_file_config(const std::string& path) {
    const bool preset = !cavity.preset.empty();
    for (const char* key : {"g_mhz", "gamma_mhz", "kappa_in_mhz"}) {
        const std::string dotted = std::string("cavity.") + key;
        const bool from_preset = preset && dotted != "cavity.kappa_in_mhz";
        if (!explicit_keys.count(dotted) && !from_preset) {
            throw ConfigError(path + ": missing required key '" + key + "' in section [cavity]");
        }
    }
    if (preset) {
        const auto p = *find_preset(cavity.preset);
        if (!explicit_keys.count("cavity.g_mhz")) cavity.g_mhz = to_mhz_over_2pi(p.g);
        if (!explicit_keys.count("cavity.gamma_mhz")) cavity.gamma_mhz = to_mhz_over_2pi(p.gamma);
        if (!explicit_keys.count("waveguide.wavelength_nm")) waveguide.wavelength_nm = p.wavelength_m * 1e9;
    }
    if (!explicit_keys.count("mux.p_trial")) mux.p_trial.reset();
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig cfg = RunConfig::defaults();
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::set<std::string> sections_seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail(where, "malformed section header");
            section = trim(body.substr(1, body.size() - 2));
            static const std::set<std::string> known{"cavity", "pulse", "mux", "waveguide", "sim", "heg", "budget"};
            if (!known.count(section)) fail(where, "unknown section [" + section + "]");
            if (!sections_seen.insert(section).second) fail(where, "duplicate section [" + section + "]");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail(where, "expected key = value");
        const std::string key = trim(body.substr(0, eq));
        if (section.empty()) fail(where, "key '" + key + "' outside of any section");
        const std::string dotted = section + "." + key;
        if (cfg.explicit_keys.count(dotted)) fail(where, "duplicate key '" + key + "' in section [" + section + "]");
        ConfigValue value;
        try {
            value = parse_value(body.substr(eq + 1));
        } catch (const ConfigError& e) {
            fail(where, e.what());
        }
        cfg.set(dotted, value, where);
    }
    cfg.finalize_file_config(source);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

bool is_known_key(const std::string& dotted_key) { return find_key(dotted_key) != nullptr; }

std::vector<std::pair<std::string, std::string>> RunConfig::dump() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : registry()) out.emplace_back(k.name, k.get(*this));
    return out;
}

CavityParams RunConfig::cavity_params() const {
    return CavityParams::from_mhz(cavity.g_mhz, cavity.kappa_in_mhz, 0.0, cavity.gamma_mhz);
}

PulseSpec RunConfig::pulse_spec(double tau) const {
    return PulseSpec{tau, pulse.xi_trunc, static_cast<std::size_t>(pulse.grid_points)};
}

MuxScenario RunConfig::mux_scenario(double p_trial) const {
    MuxScenario s;
    s.n_atoms = static_cast<std::size_t>(mux.n_atoms);
    s.p_trial = p_trial;
    s.dt = mux.dt_us * 1e-6;
    s.t_init = mux.t_init_us * 1e-6;
    s.t_move = mux.t_move_us * 1e-6;
    s.zones = static_cast<int>(mux.zones);
    return s;
}

HegOptions RunConfig::heg_options(unsigned jobs) const {
    HegOptions o;
    o.tau_points = static_cast<std::size_t>(heg.tau_points);
    o.kappa_ex_points = static_cast<std::size_t>(heg.kappa_ex_points);
    o.xi_sep = pulse.xi_sep;
    o.trunc_xi = pulse.xi_trunc;
    o.final_grid_points = static_cast<std::size_t>(pulse.grid_points);
    o.search_grid_points = std::min<std::size_t>(1024, o.final_grid_points);
    o.jobs = jobs;
    return o;
}

WaveguideSpec RunConfig::waveguide_spec() const {
    WaveguideSpec w;
    w.mirror_overhead = waveguide.L_m_mm.front() * 1e-3;
    w.wavelength = waveguide.wavelength_nm * 1e-9;
    w.n_eff = waveguide.n_eff;
    w.anchor.length = waveguide.L0_mm * 1e-3;
    w.anchor.g = mhz_over_2pi(waveguide.g0_mhz);
    w.anchor.kappa_fbg = mhz_over_2pi(waveguide.kappa_fbg0_mhz);
    return w;
}

SimConfig RunConfig::sim_config(double p_trial, unsigned jobs) const {
    SimConfig s;
    s.mux = mux_scenario(p_trial);
    s.eta_link = sim.eta_link;
    s.eta_det = sim.eta_det;
    s.p_e = std::min(1.0, std::sqrt(2.0 * p_trial));
    if (2.0 * p_trial > 1.0) {
        const double eta = sim.eta_link * sim.eta_det;
        s.p_trial_override = eta * eta * p_trial;
    }
    s.n_channels = static_cast<std::size_t>(sim.n_channels);
    s.t_herald = sim.t_herald_us * 1e-6;
    s.policy = herald_policy_from_string(sim.policy);
    if (sim.m != "auto") s.fixed_m = std::stoi(sim.m);
    s.m_max = static_cast<int>(mux.m_max);
    s.seed = sim.seed;
    s.replications = static_cast<std::size_t>(sim.replications);
    s.stop.max_time = sim.max_time_ms * 1e-3;
    s.stop.target_pairs = static_cast<std::uint64_t>(sim.target_pairs);
    s.jobs = jobs;
    return s;
}

}  // namespace hegsim::app
