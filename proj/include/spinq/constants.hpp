#pragma once

#include <numbers>

namespace spinq {

/// CODATA exact (SI 2019) values, plus the 2018 recommended Bohr magneton.
struct PhysicalConstants {
    static constexpr double h = 6.62607015e-34;              // J s
    static constexpr double hbar = h / (2.0 * std::numbers::pi); // J s
    static constexpr double eV = 1.602176634e-19;            // J
    static constexpr double mu_B = 9.2740100783e-24;         // J/T
};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Internally every control value is an angular frequency (rad/s), i.e. E/hbar.
// The helpers below convert at the I/O boundary.

constexpr double ev_to_rad_per_s(double energy_ev) {
    return energy_ev * PhysicalConstants::eV / PhysicalConstants::hbar;
}

constexpr double rad_per_s_to_ev(double omega) {
    return omega * PhysicalConstants::hbar / PhysicalConstants::eV;
}

constexpr double joule_to_rad_per_s(double energy_j) { return energy_j / PhysicalConstants::hbar; }

/// Frequencies quoted in Hz are ordinary frequencies, omega / 2pi.
constexpr double hz_to_rad_per_s(double f) { return two_pi * f; }

constexpr double rad_per_s_to_hz(double omega) { return omega / two_pi; }

} // namespace spinq
