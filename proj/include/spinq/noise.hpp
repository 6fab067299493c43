#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "spinq/pulse.hpp"
#include "spinq/qubit.hpp"
#include "spinq/su2.hpp"
#include "spinq/synthesis.hpp"

namespace spinq {

/// Zero-mean Gaussian quasi-static control errors. Channel sigmas in rad/s, timing sigma in s.
struct NoiseSpec {
    ControlValues sigma;
    double sigma_t = 0.0;

    double channel_sigma(Channel c) const { return sigma.get_or(c, 0.0); }

    bool is_zero() const {
        if (sigma_t != 0.0) return false;
        for (Channel c : all_channels)
            if (channel_sigma(c) != 0.0) return false;
        return true;
    }

    void validate() const {
        if (!(sigma_t >= 0.0) || !std::isfinite(sigma_t)) throw std::invalid_argument("sigma_t must be >= 0");
        for (Channel c : all_channels) {
            const double s = channel_sigma(c);
            if (!(s >= 0.0) || !std::isfinite(s))
                throw std::invalid_argument("sigma of " + std::string(to_string(c)) + " must be >= 0");
        }
    }
};

/// Literature amplitude errors ("paper-tab5" preset); sigma_t is left at 0.
inline NoiseSpec paper_tab5_noise(QubitType q) {
    NoiseSpec n;
    switch (q) {
        case QubitType::sq:
            n.sigma.set(Channel::detuning, hz_to_rad_per_s(20.0));
            n.sigma.set(Channel::drive, hz_to_rad_per_s(0.25e6));
            break;
        case QubitType::stq:
            n.sigma.set(Channel::gradient, ev_to_rad_per_s(4e-9));
            n.sigma.set(Channel::exchange, ev_to_rad_per_s(1e-9));
            break;
        case QubitType::hq:
            // One sigma_J for the exchange controls; every exchange channel gets its own draw.
            for (Channel c : channels_for(q)) n.sigma.set(c, ev_to_rad_per_s(1e-9));
            break;
        case QubitType::dq:
            n.sigma.set(Channel::detuning, hz_to_rad_per_s(100.0));
            n.sigma.set(Channel::drive, hz_to_rad_per_s(25e3));
            break;
        case QubitType::sdq:
            n.sigma.set(Channel::exchange, ev_to_rad_per_s(4e-9));
            n.sigma.set(Channel::hyperfine, ev_to_rad_per_s(2.5e-9));
            break;
    }
    return n;
}

struct FidelityEstimate {
    double mean_infidelity = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of grid point `index` under `base_seed`.
inline std::uint64_t point_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(splitmix64(base_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/**
 * @brief One noise realization of a schedule.
 *
 * Each control channel of the qubit gets a single offset, added to its
 * nominal value in every step (including steps where it is nominally off).
 * Every step then gets its own timing offset; durations are clamped at 0.
 * The number of draws does not depend on which sigmas are zero.
 */
template <class Rng>
PulseSequence disturb(const PulseSequence& seq, const NoiseSpec& noise, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    PulseSequence out = seq;
    for (Channel c : channels_for(seq.qubit.type)) {
        const double delta = noise.channel_sigma(c) * normal(rng);
        for (auto& step : out.steps) step.controls.add(c, delta);
    }
    for (auto& step : out.steps) step.duration = std::max(0.0, step.duration + noise.sigma_t * normal(rng));
    return out;
}

/// Monte Carlo mean of 1 - F over independent realizations, reference = nominal propagation.
inline FidelityEstimate estimate_infidelity(const PulseSequence& seq, const NoiseSpec& noise, std::uint64_t n_samples,
                                            std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("estimate_infidelity: n_samples must be >= 1");
    noise.validate();
    std::mt19937_64 rng(seed);
    const Unitary2 ideal = propagate(seq);
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t k = 0; k < n_samples; ++k) {
        const double x = gate_infidelity(ideal, propagate(disturb(seq, noise, rng)));
        const double d = x - mean;
        mean += d / static_cast<double>(k + 1);
        m2 += d * (x - mean);
    }
    FidelityEstimate e;
    e.mean_infidelity = std::clamp(mean, 0.0, 1.0);
    e.std_error = n_samples > 1 ? std::sqrt(m2 / static_cast<double>(n_samples - 1) / static_cast<double>(n_samples)) : 0.0;
    e.n_samples = n_samples;
    e.seed = seed;
    return e;
}

/// One axis of a sweep grid, rad/s (or s). No channels means the timing sigma; several channels share one value.
struct SweepDimension {
    std::vector<Channel> channels;
    std::vector<double> values;
};

struct SweepSpec {
    QubitSpec qubit;
    Target target;
    SynthOptions synth;
    NoiseSpec base_noise;
    std::vector<SweepDimension> grids;
    std::uint64_t n_samples = 2000;
    std::uint64_t base_seed = 0;
    /// Offset of this sweep's first point in the seed index space.
    std::uint64_t first_index = 0;
};

struct SweepPoint {
    std::uint64_t index = 0;
    NoiseSpec noise;
    FidelityEstimate estimate;
};

/// Cartesian product of the grids; the last dimension varies fastest.
inline std::vector<NoiseSpec> expand_grid(const NoiseSpec& base, const std::vector<SweepDimension>& grids) {
    std::vector<NoiseSpec> out{base};
    for (const auto& dim : grids) {
        if (dim.values.empty()) throw std::invalid_argument("sweep grid dimension is empty");
        std::vector<NoiseSpec> next;
        next.reserve(out.size() * dim.values.size());
        for (const auto& n : out)
            for (double v : dim.values) {
                if (!(v >= 0.0)) throw std::invalid_argument("sweep grid values must be >= 0");
                NoiseSpec m = n;
                if (dim.channels.empty()) m.sigma_t = v;
                for (Channel c : dim.channels) m.sigma.set(c, v);
                next.push_back(m);
            }
        out = std::move(next);
    }
    return out;
}

/**
 * Evaluates every noise point on its own RNG stream. Results are ordered by
 * point index and do not depend on `threads` (0 = hardware concurrency).
 */
inline std::vector<SweepPoint> run_points(const PulseSequence& seq, const std::vector<NoiseSpec>& points,
                                          std::uint64_t n_samples, std::uint64_t base_seed, std::uint64_t first_index,
                                          unsigned threads = 0) {
    std::vector<SweepPoint> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].validate();
        out[i].index = first_index + i;
        out[i].noise = points[i];
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t i; (i = next.fetch_add(1)) < out.size();)
                out[i].estimate = estimate_infidelity(seq, out[i].noise, n_samples, point_seed(base_seed, out[i].index));
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = out.size();
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, out.size())));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

inline std::vector<SweepPoint> sweep(const SweepSpec& spec, unsigned threads = 0) {
    const PulseSequence seq = synthesize(spec.qubit, spec.target.axis, spec.target.angle, spec.synth);
    return run_points(seq, expand_grid(spec.base_noise, spec.grids), spec.n_samples, spec.base_seed, spec.first_index,
                      threads);
}

/// n log-spaced values from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi >= lo) || n == 0) throw std::invalid_argument("log_grid: need 0 < lo <= hi and n >= 1");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

} // namespace spinq
