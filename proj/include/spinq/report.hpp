#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "spinq/noise.hpp"
#include "spinq/pulse.hpp"
#include "spinq/qubit.hpp"

namespace spinq {

/// 9 significant digits, the CSV float format.
inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// Sigma columns in CSV order; native units.
inline constexpr std::array<Channel, channel_count> csv_sigma_channels{
    Channel::detuning,  Channel::drive,     Channel::exchange,       Channel::gradient,
    Channel::exchange1, Channel::exchange2, Channel::exchange_prime, Channel::hyperfine};

struct ResultRow {
    QubitType qubit = QubitType::sq;
    Axis axis = Axis::x;
    double angle = 0.0;
    NoiseSpec noise;
    FidelityEstimate estimate;
    double total_gate_time = 0.0;
    double t_min = 0.0;
};

inline std::string csv_header() {
    std::string h = "qubit,gate,axis,angle_rad,sigma_t_s";
    for (Channel c : csv_sigma_channels) h += ",sigma_" + std::string(to_string(c)) + "_" + std::string(unit_suffix(c));
    h += ",n_samples,mean_infidelity,std_error,seed,total_gate_time_s,t_min_s";
    return h;
}

inline std::string csv_row(const ResultRow& r) {
    std::string s = std::string(to_string(r.qubit)) + "," + (r.axis == Axis::x ? "rx" : "rz") + "," +
                    std::string(to_string(r.axis)) + "," + fmt9(r.angle) + "," + fmt9(r.noise.sigma_t);
    for (Channel c : csv_sigma_channels) s += "," + fmt9(to_native(c, r.noise.channel_sigma(c)));
    s += "," + std::to_string(r.estimate.n_samples) + "," + fmt9(r.estimate.mean_infidelity) + "," +
         fmt9(r.estimate.std_error) + "," + std::to_string(r.estimate.seed) + "," + fmt9(r.total_gate_time) + "," +
         fmt9(r.t_min);
    return s;
}

inline std::vector<ResultRow> rows_from(const PulseSequence& seq, const std::vector<SweepPoint>& points) {
    std::vector<ResultRow> rows;
    rows.reserve(points.size());
    for (const auto& p : points)
        rows.push_back({seq.qubit.type, seq.target.axis, seq.target.angle, p.noise, p.estimate, seq.total_time(),
                        seq.min_step_time()});
    return rows;
}

/// `#`-prefixed metadata lines; multi-line values get one prefix per line.
inline void write_metadata(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& meta) {
    for (const auto& [k, v] : meta) {
        std::size_t pos = 0;
        do {
            const auto nl = v.find('\n', pos);
            os << "# " << k << ": " << v.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos) << '\n';
            pos = nl == std::string::npos ? nl : nl + 1;
        } while (pos != std::string::npos);
    }
}

inline void write_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& meta,
                      const std::vector<ResultRow>& rows) {
    write_metadata(os, meta);
    os << csv_header() << '\n';
    for (const auto& r : rows) os << csv_row(r) << '\n';
}

} // namespace spinq
