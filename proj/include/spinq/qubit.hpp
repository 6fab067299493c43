#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "spinq/constants.hpp"
#include "spinq/su2.hpp"

namespace spinq {

enum class QubitType { sq, stq, hq, dq, sdq };

inline constexpr std::array<QubitType, 5> all_qubit_types{QubitType::sq, QubitType::stq, QubitType::hq,
                                                          QubitType::dq, QubitType::sdq};

inline std::string_view to_string(QubitType q) {
    switch (q) {
        case QubitType::sq: return "sq";
        case QubitType::stq: return "stq";
        case QubitType::hq: return "hq";
        case QubitType::dq: return "dq";
        case QubitType::sdq: return "sdq";
    }
    return "?";
}

inline QubitType parse_qubit_type(std::string_view s) {
    for (auto q : all_qubit_types)
        if (to_string(q) == s) return q;
    throw std::invalid_argument("unknown qubit type '" + std::string(s) + "'");
}

/// External control knobs. Which ones apply depends on the qubit type.
enum class Channel : std::uint8_t {
    detuning,       // SQ: delta omega_z, DQ: delta omega_12 (drive detuning)
    drive,          // SQ/DQ: Omega_x (ESR drive amplitude)
    exchange,       // STQ/SDQ: J
    gradient,       // STQ: Delta E_z
    exchange1,      // HQ: J1
    exchange2,      // HQ: J2
    exchange_prime, // HQ: J'
    hyperfine,      // SDQ: A
};

inline constexpr std::size_t channel_count = 8;

inline constexpr std::array<Channel, channel_count> all_channels{
    Channel::detuning,  Channel::drive,     Channel::exchange,       Channel::gradient,
    Channel::exchange1, Channel::exchange2, Channel::exchange_prime, Channel::hyperfine};

enum class ChannelUnit { hertz, electronvolt };

inline constexpr ChannelUnit unit_of(Channel c) {
    return (c == Channel::detuning || c == Channel::drive) ? ChannelUnit::hertz : ChannelUnit::electronvolt;
}

/// Generic channel name, used for CSV columns.
inline std::string_view to_string(Channel c) {
    switch (c) {
        case Channel::detuning: return "detuning";
        case Channel::drive: return "drive";
        case Channel::exchange: return "exchange";
        case Channel::gradient: return "gradient";
        case Channel::exchange1: return "J1";
        case Channel::exchange2: return "J2";
        case Channel::exchange_prime: return "Jprime";
        case Channel::hyperfine: return "hyperfine";
    }
    return "?";
}

/// Physical symbol of a channel for a given qubit, used in config keys and printouts.
inline std::string_view symbol(QubitType q, Channel c) {
    switch (c) {
        case Channel::detuning: return q == QubitType::dq ? "delta_omega_12" : "delta_omega_z";
        case Channel::drive: return "Omega_x";
        case Channel::exchange: return "J";
        case Channel::gradient: return "Delta_Ez";
        case Channel::exchange1: return "J1";
        case Channel::exchange2: return "J2";
        case Channel::exchange_prime: return "Jprime";
        case Channel::hyperfine: return "A";
    }
    return "?";
}

inline std::string_view unit_suffix(Channel c) { return unit_of(c) == ChannelUnit::hertz ? "Hz" : "eV"; }

/// Control channels that appear in the effective Hamiltonian of each qubit type.
inline std::span<const Channel> channels_for(QubitType q) {
    static constexpr std::array<Channel, 2> sq{Channel::detuning, Channel::drive};
    static constexpr std::array<Channel, 2> stq{Channel::exchange, Channel::gradient};
    static constexpr std::array<Channel, 3> hq{Channel::exchange1, Channel::exchange2, Channel::exchange_prime};
    static constexpr std::array<Channel, 2> sdq{Channel::exchange, Channel::hyperfine};
    switch (q) {
        case QubitType::sq:
        case QubitType::dq: return sq;
        case QubitType::stq: return stq;
        case QubitType::hq: return hq;
        case QubitType::sdq: return sdq;
    }
    return {};
}

inline bool channel_valid_for(QubitType q, Channel c) {
    for (auto x : channels_for(q))
        if (x == c) return true;
    return false;
}

/// Convert a value in the channel's native unit (Hz or eV) to rad/s, and back.
inline double to_internal(Channel c, double native) {
    return unit_of(c) == ChannelUnit::hertz ? hz_to_rad_per_s(native) : ev_to_rad_per_s(native);
}

inline double to_native(Channel c, double omega) {
    return unit_of(c) == ChannelUnit::hertz ? rad_per_s_to_hz(omega) : rad_per_s_to_ev(omega);
}

/// Sparse channel -> value map (rad/s), fixed storage.
class ControlValues {
public:
    ControlValues() = default;
    ControlValues(std::initializer_list<std::pair<Channel, double>> init) {
        for (auto [c, v] : init) set(c, v);
    }

    void set(Channel c, double v) {
        values_[index(c)] = v;
        mask_ |= bit(c);
    }
    bool has(Channel c) const { return (mask_ & bit(c)) != 0; }
    double get(Channel c) const {
        if (!has(c)) throw std::invalid_argument("control channel '" + std::string(to_string(c)) + "' not set");
        return values_[index(c)];
    }
    double get_or(Channel c, double fallback) const { return has(c) ? values_[index(c)] : fallback; }

    /// Adds `delta` to a channel, treating an unset channel as 0.
    void add(Channel c, double delta) { set(c, get_or(c, 0.0) + delta); }

    friend bool operator==(const ControlValues&, const ControlValues&) = default;

private:
    static constexpr std::size_t index(Channel c) { return static_cast<std::size_t>(c); }
    static constexpr std::uint32_t bit(Channel c) { return 1u << index(c); }

    std::array<double, channel_count> values_{};
    std::uint32_t mask_ = 0;
};

/// Which nuclear-spin projection the donor-qubit ESR transition addresses.
enum class NuclearSubspace { down, up };

struct QubitSpec {
    QubitType type = QubitType::sq;
    double B0_tesla = 0.0;
    /// Pulse ("on") amplitude of each control channel, rad/s.
    ControlValues amplitudes;
    double g_e = 2.0;
    /// Nuclear gyromagnetic ratio / 2pi in Hz/T; only enters the SDQ identity term.
    std::optional<double> gamma_n_over_2pi;
    /// Donor hyperfine constant, rad/s.
    std::optional<double> A_hyperfine;
    NuclearSubspace dq_subspace = NuclearSubspace::down;
};

/// Throws std::invalid_argument unless every channel of the qubit has a positive, finite amplitude.
inline void validate(const QubitSpec& spec) {
    if (!(spec.B0_tesla >= 0.0) || !std::isfinite(spec.B0_tesla))
        throw std::invalid_argument("B0 must be a finite non-negative field");
    for (Channel c : channels_for(spec.type)) {
        if (!spec.amplitudes.has(c))
            throw std::invalid_argument("qubit " + std::string(to_string(spec.type)) + ": missing amplitude for " +
                                        std::string(symbol(spec.type, c)));
        const double v = spec.amplitudes.get(c);
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("qubit " + std::string(to_string(spec.type)) + ": amplitude of " +
                                        std::string(symbol(spec.type, c)) + " must be positive");
    }
    for (Channel c : all_channels)
        if (spec.amplitudes.has(c) && !channel_valid_for(spec.type, c))
            throw std::invalid_argument("qubit " + std::string(to_string(spec.type)) + ": channel " +
                                        std::string(to_string(c)) + " does not apply");
}

/// g mu_B B0, joules.
inline double zeeman_energy(double g_e, double B0_tesla) { return g_e * PhysicalConstants::mu_B * B0_tesla; }

inline double hq_jmax(const QubitSpec& spec) { return spec.amplitudes.get(Channel::exchange1); }

/**
 * @brief Effective 2x2 Hamiltonian coefficients (rad/s) for the given control values.
 *
 * Every channel of the qubit type must be present in `controls`; channels that
 * do not belong to the type are rejected.
 */
inline HamiltonianCoeffs build_coeffs(const QubitSpec& spec, const ControlValues& controls) {
    for (Channel c : all_channels)
        if (controls.has(c) && !channel_valid_for(spec.type, c))
            throw std::invalid_argument("channel " + std::string(to_string(c)) + " is not a control of qubit " +
                                        std::string(to_string(spec.type)));
    auto need = [&](Channel c) {
        if (!controls.has(c))
            throw std::invalid_argument("missing control " + std::string(symbol(spec.type, c)) + " for qubit " +
                                        std::string(to_string(spec.type)));
        return controls.get(c);
    };

    HamiltonianCoeffs h;
    switch (spec.type) {
        case QubitType::sq:
        case QubitType::dq:
            h.alphaz = need(Channel::detuning) / 2;
            h.alphax = need(Channel::drive) / 2;
            break;
        case QubitType::stq: {
            const double J = need(Channel::exchange);
            h.alphaz = -J / 2;
            h.alphax = need(Channel::gradient);
            h.alpha0 = -J / 4;
            break;
        }
        case QubitType::hq: {
            const double j1 = need(Channel::exchange1);
            const double j2 = need(Channel::exchange2);
            const double jp = need(Channel::exchange_prime);
            const double ez = joule_to_rad_per_s(zeeman_energy(spec.g_e, spec.B0_tesla));
            h.alphaz = -jp / 2 + (j1 + j2) / 4;
            h.alphax = -std::sqrt(3.0) / 4 * (j1 - j2);
            h.alpha0 = -ez / 2 - (jp + j1 + j2) / 4;
            break;
        }
        case QubitType::sdq: {
            const double J = need(Channel::exchange);
            h.alphaz = -J / 8;
            h.alphax = need(Channel::hyperfine) / 16;
            // The nuclear Zeeman term only shifts the global phase; it is left out when gamma_n is not configured.
            const double nuclear = spec.gamma_n_over_2pi ? two_pi * *spec.gamma_n_over_2pi * spec.B0_tesla : 0.0;
            h.alpha0 = nuclear / 4 - J / 16;
            break;
        }
    }
    return h;
}

struct DonorTransitions {
    double omega12 = 0.0; // nuclear spin down
    double omega34 = 0.0; // nuclear spin up
    /// False when gamma_e B0 < 10 A, where the high-field reduction is questionable.
    bool high_field = true;
};

/**
 * ESR transition frequencies of an I = 1/2 donor in the high-field limit.
 * Inputs in rad/s/T (gyromagnetic ratios), tesla and rad/s (hyperfine A).
 */
inline DonorTransitions donor_transition_frequencies(double gamma_e, double gamma_n, double B0_tesla, double A) {
    if (!(B0_tesla >= 0.0)) throw std::invalid_argument("donor_transition_frequencies: negative B0");
    const double delta_minus = 0.5 * (gamma_e - gamma_n) * B0_tesla;
    const double delta_plus = 0.5 * (gamma_e + gamma_n) * B0_tesla;
    const double a = A / 4;
    const double root = std::sqrt(delta_plus * delta_plus + 4 * a * a);
    DonorTransitions out;
    out.omega12 = delta_minus + root - 2 * a;
    out.omega34 = delta_minus + root + 2 * a;
    out.high_field = gamma_e * B0_tesla >= 10.0 * std::abs(A);
    return out;
}

/// Drive detuning seen by the selected donor subspace, omega_sub - omega_drive (rad/s).
inline double dq_detuning(const DonorTransitions& tr, double omega_drive, NuclearSubspace sub) {
    return (sub == NuclearSubspace::down ? tr.omega12 : tr.omega34) - omega_drive;
}

/// Exchange from the generalized Hubbard model. Any consistent energy unit.
inline double exchange_from_hubbard(double t_tun, double J_t, double U, double U_prime, double delta_eps,
                                    double J_e) {
    const double denom = U - U_prime - std::abs(delta_eps);
    if (!(denom > 0.0)) throw std::invalid_argument("exchange_from_hubbard: U - U' - |delta eps| must be positive");
    const double dt = t_tun - J_t;
    return 4 * dt * dt / denom - 2 * J_e;
}

/// Literature parameter set used as the "paper-2018" preset.
inline QubitSpec paper_2018_qubit(QubitType q) {
    QubitSpec s;
    s.type = q;
    switch (q) {
        case QubitType::sq:
            s.B0_tesla = 1.2;
            s.amplitudes.set(Channel::drive, hz_to_rad_per_s(5e6));
            s.amplitudes.set(Channel::detuning, hz_to_rad_per_s(20e6));
            break;
        case QubitType::stq:
            s.B0_tesla = 0.03;
            s.amplitudes.set(Channel::gradient, ev_to_rad_per_s(32e-9));
            s.amplitudes.set(Channel::exchange, ev_to_rad_per_s(700e-9));
            break;
        case QubitType::hq: {
            s.B0_tesla = 0.03;
            const double jmax = ev_to_rad_per_s(1e-6);
            s.amplitudes.set(Channel::exchange1, jmax);
            s.amplitudes.set(Channel::exchange2, jmax);
            s.amplitudes.set(Channel::exchange_prime, jmax / 2);
            break;
        }
        case QubitType::dq:
            s.B0_tesla = 1.5;
            s.amplitudes.set(Channel::drive, hz_to_rad_per_s(500e3));
            s.amplitudes.set(Channel::detuning, hz_to_rad_per_s(2e6));
            break;
        case QubitType::sdq:
            s.B0_tesla = 0.3;
            s.amplitudes.set(Channel::hyperfine, ev_to_rad_per_s(400e-9));
            s.amplitudes.set(Channel::exchange, ev_to_rad_per_s(100e-9));
            break;
    }
    return s;
}

} // namespace spinq
