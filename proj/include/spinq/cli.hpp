#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spinq/angle.hpp"
#include "spinq/config.hpp"
#include "spinq/noise.hpp"
#include "spinq/report.hpp"
#include "spinq/synthesis.hpp"

namespace spinq::cli {

inline constexpr const char* tool_version = "spinq 1.0.0";

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_verification = 3,
    exit_io = 4,
};

/// Parsed command line; everything optional falls back to the config file or its defaults.
struct Options {
    std::optional<std::string> qubit, gate, angle, preset, config_path, out;
    std::optional<std::uint64_t> samples, seed;
    std::optional<double> sigma_t;
    bool physical = false;
    unsigned threads = 0; // 0 = hardware concurrency; never affects results
};

class VerificationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline QubitType qubit_from(const std::string& s) {
    try {
        return parse_qubit_type(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline double angle_from(const std::string& s) {
    try {
        return parse_angle(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

/// Config file (or defaults) with the flags folded in, so the echo fully describes the run.
inline RunConfig resolve(const Options& o) {
    RunConfig c = o.config_path ? load_config_file(*o.config_path) : RunConfig{};
    if (o.preset) c.preset = *o.preset;
    if (o.samples) c.n_samples = *o.samples;
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.output_path = *o.out;
    if (o.physical) c.synth.physical_exchange_step = true;
    return c;
}

inline PulseSequence synthesize_checked(const RunConfig& c, QubitType q, Axis axis, double angle) {
    PulseSequence seq;
    try {
        seq = synthesize(c.qubit(q), axis, angle, c.synth);
    } catch (const SynthesisError& e) {
        throw VerificationFailure(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto v = verify_sequence(seq);
    if (!v.pass)
        throw VerificationFailure(std::string(to_string(q)) + " " + gate_name(axis) + ": synthesized sequence misses the target (1-F = " +
                                  fmt9(v.infidelity) + ")");
    return seq;
}

inline std::string curve_name(const PulseSequence& s) {
    return std::string(to_string(s.qubit.type)) + " " + gate_name(s.target.axis);
}

inline void sequence_metadata(std::vector<std::pair<std::string, std::string>>& meta, const PulseSequence& s) {
    const std::string n = curve_name(s);
    meta.emplace_back("gate time " + n, fmt9(s.total_time()) + " s, t_min " + fmt9(s.min_step_time()) + " s");
    meta.emplace_back("verification " + n, "1-F = " + fmt9(verify_sequence(s).infidelity));
    if (!s.provenance.empty()) meta.emplace_back("provenance " + n, s.provenance);
    for (const auto& w : s.warnings) meta.emplace_back("warning " + n, w);
}

inline std::vector<std::pair<std::string, std::string>> base_metadata(const RunConfig& c) {
    return {{"tool", tool_version}, {"config", c.to_json().dump()}, {"seed", std::to_string(c.seed)}};
}

/// Writes to the configured path, or to `out` when the path is empty.
inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw OutputError("cannot open output file '" + path + "'");
    f << text;
    f.close();
    if (!f) throw OutputError("failed writing output file '" + path + "'");
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const VerificationFailure& e) {
        err << "error: " << e.what() << '\n';
        return exit_verification;
    } catch (const OutputError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

inline std::vector<SweepDimension> dimensions_of(const SweepConfig& s) {
    std::vector<SweepDimension> dims;
    for (const auto& g : s.grids) {
        SweepDimension d;
        d.channels = noise_key_channels(s.qubit, g.param);
        for (double v : g.values) d.values.push_back(d.channels.empty() ? v : to_internal(d.channels.front(), v));
        dims.push_back(std::move(d));
    }
    return dims;
}

inline int run_sweep(const RunConfig& c, unsigned threads, std::ostream& out) {
    c.check();
    const SweepConfig& s = *c.sweep;
    const PulseSequence seq = synthesize_checked(c, s.qubit, s.axis, detail::angle_from(s.angle));
    const auto noise_points = expand_grid(c.noise(s.qubit), dimensions_of(s));
    const auto points = run_points(seq, noise_points, c.n_samples, c.seed, 0, threads);

    auto meta = base_metadata(c);
    sequence_metadata(meta, seq);
    std::ostringstream csv;
    write_csv(csv, meta, rows_from(seq, points));
    emit(csv.str(), c.output_path, out);
    return exit_ok;
}

} // namespace detail

/// Prints the step schedule for one gate and verifies it. Exit 3 when verification fails.
inline int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (!o.qubit || !o.gate) throw ConfigError("synth needs --qubit and --gate");
        RunConfig c = detail::resolve(o);
        const QubitType q = detail::qubit_from(*o.qubit);
        const Axis axis = parse_gate(*o.gate);
        const std::string angle_text = o.angle.value_or("pi/2");
        const QubitSpec spec = c.qubit(q);

        PulseSequence seq;
        try {
            seq = synthesize(spec, axis, detail::angle_from(angle_text), c.synth);
        } catch (const SynthesisError& e) {
            throw VerificationFailure(e.what());
        }
        const auto v = verify_sequence(seq);

        std::ostringstream os;
        os << "# tool: " << tool_version << '\n';
        os << "# config: " << c.to_json().dump() << '\n';
        os << "qubit " << to_string(q) << ", gate " << gate_name(axis) << "(" << angle_text << "), angle "
           << fmt9(seq.target.angle) << " rad\n";
        os << "step,label";
        for (Channel ch : channels_for(q)) os << ',' << symbol(q, ch) << '_' << unit_suffix(ch);
        os << ",duration_ns\n";
        for (std::size_t i = 0; i < seq.steps.size(); ++i) {
            const auto& st = seq.steps[i];
            os << i + 1 << ',' << st.label;
            for (Channel ch : channels_for(q)) os << ',' << fmt9(to_native(ch, st.controls.get_or(ch, 0.0)));
            os << ',' << fmt9(st.duration * 1e9) << '\n';
        }
        os << "total_ns," << fmt9(seq.total_time() * 1e9) << '\n';
        os << "t_min_ns," << fmt9(seq.min_step_time() * 1e9) << '\n';
        if (!seq.provenance.empty()) os << "provenance: " << seq.provenance << '\n';
        for (const auto& w : seq.warnings) os << "warning: " << w << '\n';
        os << "verification: F = " << fmt9(v.fidelity) << ", 1-F = " << fmt9(v.infidelity) << ", "
           << (v.pass ? "PASS" : "FAIL") << '\n';
        detail::emit(os.str(), c.output_path, out);
        if (!v.pass) {
            err << "error: verification failed (1-F = " << fmt9(v.infidelity) << ")\n";
            return int(exit_verification);
        }
        return int(exit_ok);
    });
}

/// Single-point Monte Carlo estimate. Written as a grid-less sweep so the echoed config reruns it.
inline int cmd_fidelity(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        RunConfig c = detail::resolve(o);
        SweepConfig s = c.sweep.value_or(SweepConfig{});
        if (!c.sweep && (!o.qubit || !o.gate)) throw ConfigError("fidelity needs --qubit and --gate (or a sweep section)");
        if (o.qubit) s.qubit = detail::qubit_from(*o.qubit);
        if (o.gate) s.axis = parse_gate(*o.gate);
        if (o.angle) s.angle = *o.angle;
        s.grids.clear();
        if (o.sigma_t) {
            if (!(*o.sigma_t >= 0.0)) throw ConfigError("--sigma-t must be >= 0");
            c.noise_overrides[std::string(to_string(s.qubit))]["sigma_t_s"] = *o.sigma_t;
        }
        c.sweep = s;
        return detail::run_sweep(c, o.threads, out);
    });
}

/// Grid sweep from the config's sweep section. Flags override its qubit, gate and angle.
inline int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        RunConfig c = detail::resolve(o);
        if (!c.sweep) throw ConfigError("sweep needs a config with a \"sweep\" section");
        if (o.qubit) c.sweep->qubit = detail::qubit_from(*o.qubit);
        if (o.gate) c.sweep->axis = parse_gate(*o.gate);
        if (o.angle) c.sweep->angle = *o.angle;
        return detail::run_sweep(c, o.threads, out);
    });
}

/// sigma_t curves for every configured qubit and gate at the preset amplitude sigmas.
inline int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        RunConfig c = detail::resolve(o);
        if (o.qubit) c.compare.qubits = {detail::qubit_from(*o.qubit)};
        if (o.gate) c.compare.gates = {parse_gate(*o.gate)};
        if (o.angle) c.compare.angle = *o.angle;
        c.check();
        const double angle = detail::angle_from(c.compare.angle);

        auto meta = detail::base_metadata(c);
        std::vector<ResultRow> rows;
        std::uint64_t first = 0;
        for (QubitType q : c.compare.qubits) {
            const NoiseSpec base = c.noise(q);
            for (Axis a : c.compare.gates) {
                const PulseSequence seq = detail::synthesize_checked(c, q, a, angle);
                std::vector<NoiseSpec> pts;
                for (double st : c.compare.sigma_t) {
                    NoiseSpec n = base;
                    n.sigma_t = st;
                    pts.push_back(n);
                }
                const auto res = run_points(seq, pts, c.n_samples, c.seed, first, o.threads);
                first += pts.size();
                detail::sequence_metadata(meta, seq);
                const auto r = rows_from(seq, res);
                rows.insert(rows.end(), r.begin(), r.end());
            }
        }
        std::ostringstream csv;
        write_csv(csv, meta, rows);
        detail::emit(csv.str(), c.output_path, out);
        return int(exit_ok);
    });
}

} // namespace spinq::cli
