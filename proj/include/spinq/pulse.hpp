#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "spinq/qubit.hpp"
#include "spinq/su2.hpp"

namespace spinq {

enum class Axis { x, z };

inline std::string_view to_string(Axis a) { return a == Axis::x ? "x" : "z"; }

struct Target {
    Axis axis = Axis::z;
    double angle = 0.0; // radians, in [0, 2pi) once normalized
};

inline Unitary2 target_unitary(const Target& t) {
    return t.axis == Axis::x ? rotation_x(t.angle) : rotation_z(t.angle);
}

/// One piecewise-constant control interval.
struct PulseStep {
    ControlValues controls; // rad/s
    double duration = 0.0;  // s
    std::string label;
};

/// Ordered schedule, steps[0] first in time.
struct PulseSequence {
    std::vector<PulseStep> steps;
    QubitSpec qubit;
    Target target;
    /// How the step times were obtained (formula branch, search result, ...).
    std::string provenance;
    std::vector<std::string> warnings;

    double total_time() const {
        double t = 0.0;
        for (const auto& s : steps) t += s.duration;
        return t;
    }

    /// Shortest non-zero step; 0 for an empty or all-zero sequence.
    double min_step_time() const {
        double t = std::numeric_limits<double>::infinity();
        for (const auto& s : steps)
            if (s.duration > 0.0) t = std::min(t, s.duration);
        return std::isfinite(t) ? t : 0.0;
    }
};

/// Time-ordered product of step propagators; later steps multiply on the left.
inline Unitary2 propagate(const PulseSequence& seq) {
    Unitary2 u;
    for (const auto& step : seq.steps) u = expm_su2(build_coeffs(seq.qubit, step.controls), step.duration) * u;
    return u;
}

/// Plays `second` after `first`. Both must drive the same qubit.
inline PulseSequence concatenate(const PulseSequence& first, const PulseSequence& second) {
    PulseSequence out = first;
    out.steps.insert(out.steps.end(), second.steps.begin(), second.steps.end());
    out.provenance.clear();
    out.warnings.insert(out.warnings.end(), second.warnings.begin(), second.warnings.end());
    return out;
}

} // namespace spinq
