#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace spinq {

using complex = std::complex<double>;

/// Coefficients of H/hbar = alpha0 I + alphax sigma_x + alphaz sigma_z, in rad/s.
struct HamiltonianCoeffs {
    double alpha0 = 0.0;
    double alphax = 0.0;
    double alphaz = 0.0;

    bool finite() const {
        return std::isfinite(alpha0) && std::isfinite(alphax) && std::isfinite(alphaz);
    }
};

class Unitary2;
Unitary2 rotation_z(double theta);
Unitary2 rotation_x(double phi);
Unitary2 expm_su2(const HamiltonianCoeffs& h, double t);

/**
 * @brief 2x2 unitary matrix, row-major.
 *
 * Instances only come out of rotations, exponentials of Hermitian
 * generators, products, adjoints and global phases, so unitarity holds up to
 * rounding without ever being re-checked.
 */
class Unitary2 {
public:
    Unitary2() : m_{complex{1.0}, complex{0.0}, complex{0.0}, complex{1.0}} {}

    static Unitary2 identity() { return {}; }

    complex operator()(int row, int col) const { return m_[2 * row + col]; }

    Unitary2 adjoint() const {
        return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
    }

    Unitary2 with_global_phase(double chi) const {
        const complex p = std::polar(1.0, chi);
        return {p * m_[0], p * m_[1], p * m_[2], p * m_[3]};
    }

    complex trace() const { return m_[0] + m_[3]; }

    friend Unitary2 operator*(const Unitary2& a, const Unitary2& b) {
        return {a.m_[0] * b.m_[0] + a.m_[1] * b.m_[2], a.m_[0] * b.m_[1] + a.m_[1] * b.m_[3],
                a.m_[2] * b.m_[0] + a.m_[3] * b.m_[2], a.m_[2] * b.m_[1] + a.m_[3] * b.m_[3]};
    }

    Unitary2& operator*=(const Unitary2& rhs) { return *this = *this * rhs; }

    friend bool operator==(const Unitary2&, const Unitary2&) = default;

    /// Largest entrywise modulus of (a - b).
    friend double max_abs_diff(const Unitary2& a, const Unitary2& b) {
        double d = 0.0;
        for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(a.m_[k] - b.m_[k]));
        return d;
    }

    /// max |U^dagger U - I| entrywise.
    double unitarity_error() const { return max_abs_diff(adjoint() * *this, identity()); }

private:
    Unitary2(complex u00, complex u01, complex u10, complex u11) : m_{u00, u01, u10, u11} {}

    friend Unitary2 rotation_z(double);
    friend Unitary2 rotation_x(double);
    friend Unitary2 expm_su2(const HamiltonianCoeffs&, double);

    std::array<complex, 4> m_;
};

/// diag(e^{-i theta/2}, e^{+i theta/2})
inline Unitary2 rotation_z(double theta) {
    return {std::polar(1.0, -theta / 2), complex{0.0}, complex{0.0}, std::polar(1.0, theta / 2)};
}

/// [[cos(phi/2), -i sin(phi/2)], [-i sin(phi/2), cos(phi/2)]]
inline Unitary2 rotation_x(double phi) {
    const double c = std::cos(phi / 2);
    const complex s{0.0, -std::sin(phi / 2)};
    return {complex{c}, s, s, complex{c}};
}

/**
 * @brief exp(-i (alpha0 I + alphax sigma_x + alphaz sigma_z) t) in closed form.
 *
 * e^{-i alpha0 t} (cos(r t) I - i sin(r t)/r (alphax sigma_x + alphaz sigma_z)),
 * r = sqrt(alphax^2 + alphaz^2). At r = 0 the sin(r t)/r factor is t.
 */
inline Unitary2 expm_su2(const HamiltonianCoeffs& h, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("expm_su2: duration must be non-negative");
    const double r = std::hypot(h.alphax, h.alphaz);
    const double c = std::cos(r * t);
    const double sinc = r > 0.0 ? std::sin(r * t) / r : t;
    const complex phase = std::polar(1.0, -h.alpha0 * t);
    const complex diag_up = phase * complex{c, -sinc * h.alphaz};
    const complex diag_dn = phase * complex{c, sinc * h.alphaz};
    const complex off = phase * complex{0.0, -sinc * h.alphax};
    return {diag_up, off, off, diag_dn};
}

/**
 * Entanglement fidelity of a disturbed single-qubit gate against the ideal
 * one, |tr(U_i^dagger U_d)|^2 / 4. Equal to 1 iff the two gates differ by a
 * global phase.
 */
inline double entanglement_fidelity(const Unitary2& ideal, const Unitary2& disturbed) {
    const double f = std::norm((ideal.adjoint() * disturbed).trace()) / 4.0;
    return std::clamp(f, 0.0, 1.0);
}

/**
 * 1 - F written as a sum of squares of W = U_i^dagger U_d,
 * |w00 - w11|^2 / 4 + (|w01|^2 + |w10|^2) / 2, which keeps full relative
 * precision for tiny infidelities. Identical inputs give exactly 0.
 */
inline double gate_infidelity(const Unitary2& ideal, const Unitary2& disturbed) {
    if (ideal == disturbed) return 0.0;
    const Unitary2 w = ideal.adjoint() * disturbed;
    const double v = std::norm(w(0, 0) - w(1, 1)) / 4.0 + (std::norm(w(0, 1)) + std::norm(w(1, 0))) / 2.0;
    return std::clamp(v, 0.0, 1.0);
}

} // namespace spinq
