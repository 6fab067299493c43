#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "spinq/constants.hpp"
#include "spinq/pulse.hpp"
#include "spinq/qubit.hpp"
#include "spinq/su2.hpp"

namespace spinq {

/// Raised when no step schedule reproducing the target rotation could be found.
class SynthesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double verification_tolerance = 1e-9;
inline constexpr double minimum_pulse_time = 100e-12;

struct SynthOptions {
    /// Keep the static gradient (STQ) / hyperfine (SDQ) term switched on during the exchange step
    /// instead of neglecting it. Exposes the approximation error of the two-step formulas.
    bool physical_exchange_step = false;
};

/// Reduces an angle to [0, 2pi).
inline double normalize_angle(double a) {
    if (!std::isfinite(a)) throw std::invalid_argument("rotation angle must be finite");
    double r = std::fmod(a, two_pi);
    if (r < 0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

struct Verification {
    double fidelity = 0.0;
    double infidelity = 1.0;
    bool pass = false;
};

/// Propagates the nominal schedule and compares it with the target rotation.
inline Verification verify_sequence(const PulseSequence& seq) {
    Verification v;
    v.infidelity = gate_infidelity(target_unitary(seq.target), propagate(seq));
    v.fidelity = 1.0 - v.infidelity;
    v.pass = v.infidelity <= verification_tolerance;
    return v;
}

namespace detail {

inline std::string format_ns(double seconds) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g ns", seconds * 1e9);
    return buf;
}

/// Step with every channel of the qubit set: listed ones to the given value, the rest to 0.
inline PulseStep make_step(const QubitSpec& spec, std::initializer_list<std::pair<Channel, double>> on,
                           double duration, std::string label) {
    PulseStep s;
    for (Channel c : channels_for(spec.type)) s.controls.set(c, 0.0);
    for (auto [c, v] : on) s.controls.set(c, v);
    s.duration = duration;
    s.label = std::move(label);
    return s;
}

inline PulseSequence start(const QubitSpec& spec, QubitType expected, Axis axis, double angle) {
    if (spec.type != expected)
        throw std::invalid_argument("synthesis routine for " + std::string(to_string(expected)) +
                                    " called with a " + std::string(to_string(spec.type)) + " spec");
    validate(spec);
    PulseSequence seq;
    seq.qubit = spec;
    seq.target = {axis, normalize_angle(angle)};
    return seq;
}

inline void check_durations(PulseSequence& seq) {
    for (const auto& s : seq.steps) {
        if (!(s.duration >= 0.0) || !std::isfinite(s.duration))
            throw SynthesisError("synthesized a negative or non-finite step time for '" + s.label + "'");
        bool driven = false;
        for (Channel c : channels_for(seq.qubit.type)) driven = driven || s.controls.get_or(c, 0.0) != 0.0;
        if (driven && s.duration > 0.0 && s.duration < minimum_pulse_time)
            seq.warnings.push_back("step '" + s.label + "' lasts " + format_ns(s.duration) +
                                   ", below the 100 ps minimum pulse time");
    }
}

/// Shared by SQ and DQ: one resonant-drive or one detuned-precession step.
inline PulseSequence synth_rotating_frame(const QubitSpec& spec, QubitType type, Axis axis, double angle) {
    PulseSequence seq = start(spec, type, axis, angle);
    const double theta = seq.target.angle;
    const std::string det = std::string(symbol(type, Channel::detuning));
    if (axis == Axis::z) {
        const double dw = spec.amplitudes.get(Channel::detuning);
        seq.steps.push_back(make_step(spec, {{Channel::detuning, dw}}, theta / dw, det + " on"));
    } else {
        const double om = spec.amplitudes.get(Channel::drive);
        seq.steps.push_back(make_step(spec, {{Channel::drive, om}}, theta / om, "Omega_x on"));
    }
    seq.provenance = "single-step closed form";
    check_durations(seq);
    return seq;
}

/**
 * Shared by STQ and SDQ. The effective model is alpha0 = k0 J, alphaz = kz J,
 * alphax = kx X with X the gradient (STQ) or hyperfine (SDQ) channel.
 */
inline PulseSequence synth_two_step(const QubitSpec& spec, QubitType type, Channel x_channel, double x_scale,
                                    double j_scale, Axis axis, double angle, const SynthOptions& opt) {
    PulseSequence seq = start(spec, type, axis, angle);
    const double theta = seq.target.angle;
    const double xs = spec.amplitudes.get(x_channel);
    const double J = spec.amplitudes.get(Channel::exchange);
    // h / E  ->  2 pi / omega, with the Hamiltonian scale factors of each channel.
    const double x_period = two_pi / (x_scale * xs);
    const double j_period = two_pi / (j_scale * J);
    const std::string x_label = std::string(symbol(type, x_channel)) + " on";
    if (axis == Axis::z) {
        constexpr int n = 1;
        const double t_x = 0.5 * n * x_period;
        const double t_j = (-theta / two_pi + n) * j_period;
        seq.steps.push_back(make_step(spec, {{x_channel, xs}}, t_x, x_label));
        seq.steps.push_back(
            make_step(spec, {{Channel::exchange, J}, {x_channel, opt.physical_exchange_step ? xs : 0.0}}, t_j, "J on"));
    } else {
        constexpr int n = 0;
        const double t_x = (theta / (2 * two_pi) + n) * x_period;
        seq.steps.push_back(make_step(spec, {{x_channel, xs}}, t_x, x_label));
    }
    seq.provenance = opt.physical_exchange_step ? "two-step closed form, static term kept during J step"
                                                : "two-step closed form";
    check_durations(seq);
    return seq;
}

/// Minimizes infidelity along one step time, returning every minimum that verifies.
template <class Build>
std::vector<double> passing_minima(Build&& build, double lo, double hi, int grid) {
    auto f = [&](double t) { return verify_sequence(build(t)).infidelity; };
    std::vector<double> xs(grid + 1), fs(grid + 1);
    for (int i = 0; i <= grid; ++i) {
        xs[i] = lo + (hi - lo) * i / grid;
        fs[i] = f(xs[i]);
    }
    std::vector<double> found;
    for (int i = 1; i < grid; ++i) {
        if (!(fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1])) continue;
        // Brent's tolerance has an absolute part, so search in units of the bracket width.
        const double scale = hi - lo;
        auto g = [&](double u) { return f(lo + u * scale); };
        const auto [u, v] = boost::math::tools::brent_find_minima(g, (xs[i - 1] - lo) / scale, (xs[i + 1] - lo) / scale,
                                                                  std::numeric_limits<double>::digits / 2);
        const double t = lo + u * scale;
        if (v <= verification_tolerance && t >= minimum_pulse_time) found.push_back(t);
    }
    return found;
}

} // namespace detail

inline PulseSequence synth_sq(const QubitSpec& spec, Axis axis, double angle) {
    return detail::synth_rotating_frame(spec, QubitType::sq, axis, angle);
}

inline PulseSequence synth_dq(const QubitSpec& spec, Axis axis, double angle) {
    PulseSequence seq = detail::synth_rotating_frame(spec, QubitType::dq, axis, angle);
    if (spec.dq_subspace == NuclearSubspace::up) {
        // Same algebra with omega_34 in place of omega_12.
        for (auto& s : seq.steps)
            if (s.label.starts_with("delta_omega_12")) s.label = "delta_omega_34 on";
        seq.provenance += ", nuclear-up subspace";
    }
    return seq;
}

inline PulseSequence synth_stq(const QubitSpec& spec, Axis axis, double angle, const SynthOptions& opt = {}) {
    // alphax = Delta E_z, alphaz = -J/2: a 2 pi gradient precession needs h/(2 dEz), a J phase h/J.
    return detail::synth_two_step(spec, QubitType::stq, Channel::gradient, 1.0, 1.0, axis, angle, opt);
}

inline PulseSequence synth_sdq(const QubitSpec& spec, Axis axis, double angle, const SynthOptions& opt = {}) {
    return detail::synth_two_step(spec, QubitType::sdq, Channel::hyperfine, 1.0 / 16, 1.0 / 4, axis, angle, opt);
}

/**
 * @brief Hybrid-qubit sequences from J1/J2 exchange pulses with J' held at its amplitude (Jmax/2).
 *
 * The closed-form step times are tried first over the small ambiguity space
 * (sign of the B term and step order for Rz; integer n and step order for Rx),
 * keeping the first candidate that verifies. When none does, the J1/J2 time of
 * Rz (or the J2 time of Rx) is refined by a 1-D search seeded at the formula
 * value and the J' time is kept as given. The choice is written to
 * `provenance`.
 */
inline PulseSequence synth_hq(const QubitSpec& spec, Axis axis, double angle) {
    PulseSequence base = detail::start(spec, QubitType::hq, axis, angle);
    const double theta = base.target.angle;
    const double jmax = spec.amplitudes.get(Channel::exchange1);
    const double j2amp = spec.amplitudes.get(Channel::exchange2);
    const double jp = spec.amplitudes.get(Channel::exchange_prime);
    const double ez = joule_to_rad_per_s(zeeman_energy(spec.g_e, spec.B0_tesla));
    const double A = ez / 2 + jmax / 8;
    const double B = -ez + jmax / 4;
    const double C = ez + 0.75 * jmax;
    const double unit = two_pi / jmax; // h / Jmax

    auto j1_step = [&](double t) {
        return detail::make_step(spec, {{Channel::exchange1, jmax}, {Channel::exchange_prime, jp}}, t, "J1 on");
    };
    auto j2_step = [&](double t) {
        return detail::make_step(spec, {{Channel::exchange2, j2amp}, {Channel::exchange_prime, jp}}, t, "J2 on");
    };
    auto wait_step = [&](double t) {
        return detail::make_step(spec, {{Channel::exchange_prime, jp}}, t, "wait");
    };
    auto finish = [&](std::vector<PulseStep> steps, std::string provenance) {
        PulseSequence seq = base;
        seq.steps = std::move(steps);
        seq.provenance = std::move(provenance);
        return seq;
    };

    // Operator products are written right to left, so "product order" plays the rightmost factor first.
    const char* order_name[2] = {"product order", "reversed order"};
    PulseSequence chosen;
    bool have = false;

    if (axis == Axis::z) {
        const double t_wait = (2.0 - theta / std::numbers::pi) * unit;
        const int formula_sign = (2 * std::numbers::pi / 3 - theta) > 0 ? 1 : ((2 * std::numbers::pi / 3 - theta) < 0 ? -1 : 0);
        auto build = [&](double t1, int order) {
            std::vector<PulseStep> st = order == 0 ? std::vector{j2_step(t1), wait_step(t_wait), j1_step(t1)}
                                                   : std::vector{j1_step(t1), wait_step(t_wait), j2_step(t1)};
            return st;
        };
        std::vector<int> signs{formula_sign};
        if (formula_sign != 0) signs.push_back(-formula_sign);
        double seed = -1.0;
        for (int sgn : signs) {
            const double t1 = (theta / std::numbers::pi * A + sgn * B) / C * unit;
            if (!(t1 >= 0.0)) continue;
            seed = std::max(seed, t1);
            for (int order = 0; order < 2 && !have; ++order) {
                PulseSequence cand = finish(build(t1, order), "");
                if (verify_sequence(cand).pass) {
                    cand.provenance = std::string("hq rz closed form: sign ") + (sgn == formula_sign ? "from the formula" : "flipped") +
                                      ", " + order_name[order];
                    chosen = std::move(cand);
                    have = true;
                }
            }
            if (have) break;
        }
        if (!have) {
            if (seed <= 0.0) seed = unit;
            const double hi = 3.0 * std::max(seed, unit);
            for (int order = 0; order < 2 && !have; ++order) {
                auto seq_of = [&](double t) { return finish(build(t, order), ""); };
                auto roots = detail::passing_minima(seq_of, 0.0, hi, 3000);
                if (roots.empty()) continue;
                double best = roots.front();
                for (double r : roots)
                    if (std::abs(r - seed) < std::abs(best - seed)) best = r;
                chosen = seq_of(best);
                chosen.provenance = "hq rz search: t_J1 = t_J2 refined from " + detail::format_ns(seed) + " to " +
                                    detail::format_ns(best) + ", t_J' from the formula, " + order_name[order];
                have = true;
            }
        }
    } else {
        const double x = theta / two_pi / std::sqrt(3.0);
        const int n_formula = static_cast<int>(std::ceil(C / jmax * x));
        auto times = [&](int n) { return std::pair{(n / C - x / jmax) * two_pi, (n / C + x / jmax) * two_pi}; };
        auto build = [&](double t1, double t2, int order) {
            return order == 0 ? std::vector{j2_step(t2), j1_step(t1)} : std::vector{j1_step(t1), j2_step(t2)};
        };
        for (int n : {n_formula, n_formula - 1, n_formula + 1}) {
            if (n < 0) continue;
            const auto [t1, t2] = times(n);
            if (!(t1 >= 0.0 && t2 >= 0.0)) continue;
            for (int order = 0; order < 2 && !have; ++order) {
                PulseSequence cand = finish(build(t1, t2, order), "");
                if (verify_sequence(cand).pass) {
                    cand.provenance = "hq rx closed form: n = " + std::to_string(n) +
                                      (n == n_formula ? " (ceiling)" : " (ceiling shifted)") + ", " +
                                      order_name[order];
                    chosen = std::move(cand);
                    have = true;
                }
            }
            if (have) break;
        }
        if (!have) {
            const auto [t1, t2] = times(n_formula);
            const double seed = std::max(t2, unit);
            for (int order = 0; order < 2 && !have; ++order) {
                auto seq_of = [&](double t) { return finish(build(t1, t, order), ""); };
                auto roots = detail::passing_minima(seq_of, 0.0, 3.0 * seed, 3000);
                if (roots.empty()) continue;
                double best = roots.front();
                for (double r : roots)
                    if (std::abs(r - t2) < std::abs(best - t2)) best = r;
                chosen = seq_of(best);
                chosen.provenance = "hq rx search: t_J2 refined from " + detail::format_ns(t2) + " to " +
                                    detail::format_ns(best) + ", " + order_name[order];
                have = true;
            }
        }
    }
    if (!have) throw SynthesisError("hq: no step schedule reproduces the target rotation");
    detail::check_durations(chosen);
    return chosen;
}

inline PulseSequence synthesize(const QubitSpec& spec, Axis axis, double angle, const SynthOptions& opt = {}) {
    switch (spec.type) {
        case QubitType::sq: return synth_sq(spec, axis, angle);
        case QubitType::stq: return synth_stq(spec, axis, angle, opt);
        case QubitType::hq: return synth_hq(spec, axis, angle);
        case QubitType::dq: return synth_dq(spec, axis, angle);
        case QubitType::sdq: return synth_sdq(spec, axis, angle, opt);
    }
    throw std::invalid_argument("unknown qubit type");
}

} // namespace spinq
