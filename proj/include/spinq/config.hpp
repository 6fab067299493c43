#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "spinq/angle.hpp"
#include "spinq/noise.hpp"
#include "spinq/pulse.hpp"
#include "spinq/qubit.hpp"
#include "spinq/synthesis.hpp"

namespace spinq {

using json = nlohmann::json;

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* qubit_preset_name = "paper-2018";
inline constexpr const char* noise_preset_name = "paper-tab5";

inline Axis parse_gate(std::string_view g) {
    if (g == "rx" || g == "x") return Axis::x;
    if (g == "rz" || g == "z") return Axis::z;
    throw ConfigError("unknown gate '" + std::string(g) + "' (expected rx or rz)");
}

inline std::string gate_name(Axis a) { return a == Axis::x ? "rx" : "rz"; }

/// Channels addressed by a noise key such as "sigma_Delta_Ez_eV"; empty result for "sigma_t_s".
inline std::vector<Channel> noise_key_channels(QubitType q, const std::string& key) {
    if (key == "sigma_t_s") return {};
    if (q == QubitType::hq && key == "sigma_J_eV")
        return {Channel::exchange1, Channel::exchange2, Channel::exchange_prime};
    for (Channel c : channels_for(q))
        if (key == "sigma_" + std::string(symbol(q, c)) + "_" + std::string(unit_suffix(c))) return {c};
    throw ConfigError("unknown noise parameter '" + key + "' for qubit " + std::string(to_string(q)));
}

/// Sets a noise parameter given in its native unit (Hz, eV or s).
inline void apply_noise_key(QubitType q, NoiseSpec& n, const std::string& key, double native) {
    if (!std::isfinite(native) || native < 0.0) throw ConfigError(key + " must be a finite value >= 0");
    const auto chans = noise_key_channels(q, key);
    if (chans.empty()) n.sigma_t = native;
    for (Channel c : chans) n.sigma.set(c, to_internal(c, native));
}

inline double need_number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ConfigError(what + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(what + " must be finite");
    return x;
}

/// Applies one qubit-parameter override (native units) to a spec.
inline void apply_qubit_key(QubitSpec& s, const std::string& key, const json& v) {
    const std::string what = std::string(to_string(s.type)) + "." + key;
    if (key == "subspace") {
        if (s.type != QubitType::dq) throw ConfigError("subspace only applies to the dq qubit");
        if (v == "down") s.dq_subspace = NuclearSubspace::down;
        else if (v == "up") s.dq_subspace = NuclearSubspace::up;
        else throw ConfigError(what + " must be \"down\" or \"up\"");
        return;
    }
    const double x = need_number(v, what);
    if (key == "B0_tesla") {
        if (x < 0) throw ConfigError(what + " must be >= 0");
        s.B0_tesla = x;
    } else if (key == "g_e") {
        s.g_e = x;
    } else if (key == "gamma_n_over_2pi_Hz_per_T") {
        s.gamma_n_over_2pi = x;
    } else if (key == "A_hyperfine_eV") {
        s.A_hyperfine = ev_to_rad_per_s(x);
    } else if (s.type == QubitType::hq && key == "Jmax_eV") {
        const double jmax = ev_to_rad_per_s(x);
        s.amplitudes.set(Channel::exchange1, jmax);
        s.amplitudes.set(Channel::exchange2, jmax);
        s.amplitudes.set(Channel::exchange_prime, jmax / 2);
    } else {
        for (Channel c : channels_for(s.type)) {
            if (s.type == QubitType::hq) break;
            if (key == std::string(symbol(s.type, c)) + "_" + std::string(unit_suffix(c))) {
                s.amplitudes.set(c, to_internal(c, x));
                return;
            }
        }
        throw ConfigError("unknown parameter '" + key + "' for qubit " + std::string(to_string(s.type)));
    }
}

/// One sweep axis as written in the config: a noise key and native-unit values.
struct GridConfig {
    std::string param;
    std::vector<double> values;
};

struct SweepConfig {
    QubitType qubit = QubitType::sq;
    Axis axis = Axis::x;
    std::string angle = "pi/2";
    std::vector<GridConfig> grids;
};

struct CompareConfig {
    std::vector<QubitType> qubits{all_qubit_types.begin(), all_qubit_types.end()};
    std::vector<Axis> gates{Axis::x, Axis::z};
    std::string angle = "pi/2";
    std::vector<double> sigma_t = log_grid(1e-11, 1e-6, 20);
};

/**
 * @brief Everything a CLI run depends on.
 *
 * Presets are fixed tables; the config only stores explicit overrides on top
 * of them. `to_json()` gives the canonical form that is echoed into outputs,
 * and `from_json(to_json())` reproduces the same run.
 */
struct RunConfig {
    std::string preset = qubit_preset_name;
    std::string noise_preset = noise_preset_name;
    json qubit_overrides = json::object();
    json noise_overrides = json::object();
    SynthOptions synth;
    std::optional<SweepConfig> sweep;
    CompareConfig compare;
    std::uint64_t n_samples = 2000;
    std::uint64_t seed = 2018;
    std::string output_path;

    QubitSpec qubit(QubitType q) const {
        QubitSpec s;
        if (preset == qubit_preset_name) s = paper_2018_qubit(q);
        else if (preset == "none") s.type = q;
        else throw ConfigError("unknown qubit preset '" + preset + "'");
        const std::string name{to_string(q)};
        if (qubit_overrides.contains(name))
            for (const auto& [k, v] : qubit_overrides.at(name).items()) apply_qubit_key(s, k, v);
        try {
            validate(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        return s;
    }

    NoiseSpec noise(QubitType q) const {
        NoiseSpec n;
        if (noise_preset == noise_preset_name) n = paper_tab5_noise(q);
        else if (noise_preset != "none") throw ConfigError("unknown noise preset '" + noise_preset + "'");
        const std::string name{to_string(q)};
        if (noise_overrides.contains(name))
            for (const auto& [k, v] : noise_overrides.at(name).items())
                apply_noise_key(q, n, k, need_number(v, "noise." + name + "." + k));
        return n;
    }

    json to_json() const {
        json j;
        j["preset"] = preset;
        j["noise_preset"] = noise_preset;
        j["qubits"] = qubit_overrides;
        j["noise"] = noise_overrides;
        j["synth"] = {{"physical_exchange_step", synth.physical_exchange_step}};
        if (sweep) {
            json g = json::array();
            for (const auto& d : sweep->grids) g.push_back({{"param", d.param}, {"values", d.values}});
            j["sweep"] = {{"qubit", to_string(sweep->qubit)},
                          {"gate", gate_name(sweep->axis)},
                          {"angle", sweep->angle},
                          {"grids", g}};
        }
        json qs = json::array(), gs = json::array();
        for (auto q : compare.qubits) qs.push_back(to_string(q));
        for (auto a : compare.gates) gs.push_back(gate_name(a));
        j["compare"] = {{"qubits", qs}, {"gates", gs}, {"angle", compare.angle}, {"sigma_t_s", compare.sigma_t}};
        j["n_samples"] = n_samples;
        j["seed"] = seed;
        j["output"] = {{"path", output_path}};
        return j;
    }

    static RunConfig from_json(const json& j);

    /// Validates every section eagerly so errors surface before any work starts.
    void check() const {
        for (auto q : all_qubit_types) {
            (void)qubit(q);
            noise(q).validate();
        }
        if (sweep) {
            (void)parse_angle(sweep->angle);
            for (const auto& g : sweep->grids) {
                (void)noise_key_channels(sweep->qubit, g.param);
                if (g.values.empty()) throw ConfigError("sweep grid '" + g.param + "' is empty");
                for (double v : g.values)
                    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("sweep grid values must be >= 0");
            }
        }
        (void)parse_angle(compare.angle);
        if (compare.sigma_t.empty()) throw ConfigError("compare.sigma_t_s is empty");
        for (double v : compare.sigma_t)
            if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("compare.sigma_t_s values must be >= 0");
        if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
    }
};

namespace detail {

/// A grid written either as an explicit list or as {"log": [lo, hi, n]} / {"linear": [lo, hi, n]}.
inline std::vector<double> parse_values(const json& v, const std::string& what) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& x : v) out.push_back(need_number(x, what));
        return out;
    }
    if (v.is_object() && v.size() == 1) {
        const auto& [kind, arg] = *v.items().begin();
        if (!arg.is_array() || arg.size() != 3) throw ConfigError(what + ": expected [lo, hi, n]");
        const double lo = need_number(arg[0], what), hi = need_number(arg[1], what);
        const double n = need_number(arg[2], what);
        if (n < 1 || n != std::floor(n)) throw ConfigError(what + ": point count must be a positive integer");
        if (kind == "log") {
            if (!(lo > 0 && hi >= lo)) throw ConfigError(what + ": log grid needs 0 < lo <= hi");
            return log_grid(lo, hi, static_cast<std::size_t>(n));
        }
        if (kind == "linear") {
            const auto k = static_cast<std::size_t>(n);
            for (std::size_t i = 0; i < k; ++i) out.push_back(k == 1 ? lo : lo + (hi - lo) * i / (k - 1));
            return out;
        }
    }
    throw ConfigError(what + ": expected a list or {\"log\": [lo, hi, n]}");
}

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

inline std::uint64_t need_count(const json& v, const std::string& what) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(what + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

} // namespace detail

inline RunConfig RunConfig::from_json(const json& j) {
    detail::check_keys(j, {"preset", "noise_preset", "qubits", "noise", "synth", "sweep", "compare", "n_samples", "seed", "output"},
                       "config");
    RunConfig c;
    try {
        if (j.contains("preset")) c.preset = j.at("preset").get<std::string>();
        if (j.contains("noise_preset")) c.noise_preset = j.at("noise_preset").get<std::string>();
        for (const char* section : {"qubits", "noise"}) {
            if (!j.contains(section)) continue;
            const json& sec = j.at(section);
            if (!sec.is_object()) throw ConfigError(std::string(section) + " must be an object");
            for (const auto& [name, params] : sec.items()) {
                try {
                    (void)parse_qubit_type(name);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
                if (!params.is_object()) throw ConfigError(std::string(section) + "." + name + " must be an object");
            }
            (std::string(section) == "qubits" ? c.qubit_overrides : c.noise_overrides) = sec;
        }
        if (j.contains("synth")) {
            detail::check_keys(j.at("synth"), {"physical_exchange_step"}, "synth");
            if (j.at("synth").contains("physical_exchange_step"))
                c.synth.physical_exchange_step = j.at("synth").at("physical_exchange_step").get<bool>();
        }
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            detail::check_keys(s, {"qubit", "gate", "angle", "grids"}, "sweep");
            SweepConfig sc;
            try {
                sc.qubit = parse_qubit_type(s.value("qubit", std::string("sq")));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            sc.axis = parse_gate(s.value("gate", std::string("rx")));
            sc.angle = s.value("angle", std::string("pi/2"));
            if (s.contains("grids")) {
                const json& g = s.at("grids");
                if (!g.is_array()) throw ConfigError("sweep.grids must be a list");
                for (const auto& dim : g) {
                    detail::check_keys(dim, {"param", "values", "log", "linear"}, "sweep.grids[]");
                    GridConfig gc;
                    gc.param = dim.at("param").get<std::string>();
                    json spec = json::object();
                    for (const char* k : {"values", "log", "linear"})
                        if (dim.contains(k)) spec = std::string(k) == "values" ? dim.at(k) : json{{k, dim.at(k)}};
                    gc.values = detail::parse_values(spec, "sweep grid " + gc.param);
                    sc.grids.push_back(std::move(gc));
                }
            }
            c.sweep = std::move(sc);
        }
        if (j.contains("compare")) {
            const json& s = j.at("compare");
            detail::check_keys(s, {"qubits", "gates", "angle", "sigma_t_s"}, "compare");
            if (s.contains("qubits")) {
                c.compare.qubits.clear();
                for (const auto& q : s.at("qubits")) {
                    try {
                        c.compare.qubits.push_back(parse_qubit_type(q.get<std::string>()));
                    } catch (const std::invalid_argument& e) {
                        throw ConfigError(e.what());
                    }
                }
            }
            if (s.contains("gates")) {
                c.compare.gates.clear();
                for (const auto& g : s.at("gates")) c.compare.gates.push_back(parse_gate(g.get<std::string>()));
            }
            c.compare.angle = s.value("angle", c.compare.angle);
            if (s.contains("sigma_t_s")) c.compare.sigma_t = detail::parse_values(s.at("sigma_t_s"), "compare.sigma_t_s");
        }
        if (j.contains("n_samples")) c.n_samples = detail::need_count(j.at("n_samples"), "n_samples");
        if (j.contains("seed")) c.seed = detail::need_count(j.at("seed"), "seed");
        if (j.contains("output")) {
            detail::check_keys(j.at("output"), {"path"}, "output");
            c.output_path = j.at("output").value("path", std::string());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    c.check();
    return c;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return RunConfig::from_json(j);
}

} // namespace spinq
