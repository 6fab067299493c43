#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "spinq/cli.hpp"

using namespace spinq;
namespace fs = std::filesystem;

namespace {

struct Csv {
    std::vector<std::string> meta;
    std::map<std::string, std::size_t> col;
    std::vector<std::vector<std::string>> rows;

    double num(std::size_t r, const std::string& c) const { return std::stod(rows.at(r).at(col.at(c))); }
};

std::vector<std::string> split(const std::string& s, char d) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, d);) out.push_back(f);
    return out;
}

Csv parse_csv(const std::string& text) {
    Csv c;
    bool header = false;
    for (const auto& line : split(text, '\n')) {
        if (line.starts_with("#")) {
            c.meta.push_back(line);
        } else if (!header) {
            const auto h = split(line, ',');
            for (std::size_t i = 0; i < h.size(); ++i) c.col[h[i]] = i;
            header = true;
        } else if (!line.empty()) {
            c.rows.push_back(split(line, ','));
        }
    }
    return c;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("spinq_test_" + std::to_string(std::rand()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string& name, const std::string& text) const {
        const auto p = path / name;
        std::ofstream(p) << text;
        return p.string();
    }
};

struct Run {
    int code;
    std::string out, err;
};

template <class Cmd>
Run run(Cmd cmd, const cli::Options& o) {
    std::ostringstream out, err;
    const int code = cmd(o, out, err);
    return {code, out.str(), err.str()};
}

cli::Options with(std::string qubit, std::string gate, std::string angle = "pi/2") {
    cli::Options o;
    o.qubit = std::move(qubit);
    o.gate = std::move(gate);
    o.angle = std::move(angle);
    return o;
}

} // namespace

TEST(Synth, StqRzRows) {
    auto o = with("stq", "rz");
    o.preset = "paper-2018";
    const auto r = run(cli::cmd_synth, o);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(",64.6"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find(",4.43"), std::string::npos);
    EXPECT_NE(r.out.find("total_ns,69.05"), std::string::npos);
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(Synth, ZeroAngleSingleRow) {
    const auto r = run(cli::cmd_synth, with("sq", "rx", "0"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\n1,Omega_x on,0,5000000,0\n"), std::string::npos) << r.out;
    EXPECT_EQ(r.out.find("\n2,"), std::string::npos);
    EXPECT_NE(r.out.find("F = 1,"), std::string::npos);
}

TEST(Synth, HybridRecordsResolution) {
    const auto r = run(cli::cmd_synth, with("hq", "rx"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\n2,"), std::string::npos);
    EXPECT_NE(r.out.find("provenance: hq rx"), std::string::npos);
    EXPECT_NE(r.out.find("total_ns,"), std::string::npos);
}

TEST(Synth, UsageAndConfigErrors) {
    cli::Options o;
    EXPECT_EQ(run(cli::cmd_synth, o).code, cli::exit_config);
    EXPECT_EQ(run(cli::cmd_synth, with("xq", "rx")).code, cli::exit_config);
    EXPECT_EQ(run(cli::cmd_synth, with("sq", "ry")).code, cli::exit_config);
    EXPECT_EQ(run(cli::cmd_synth, with("sq", "rx", "pi/0")).code, cli::exit_config);
    auto p = with("sq", "rx");
    p.preset = "paper-1999";
    EXPECT_EQ(run(cli::cmd_synth, p).code, cli::exit_config);
}

TEST(Synth, PresetNoneNeedsExplicitParameters) {
    TempDir d;
    auto o = with("sq", "rz");
    o.preset = "none";
    EXPECT_EQ(run(cli::cmd_synth, o).code, cli::exit_config);
    o.config_path = d.write("c.json", R"({"qubits": {"sq": {"B0_tesla": 1.0, "Omega_x_Hz": 1e6, "delta_omega_z_Hz": 1e6}}})");
    const auto r = run(cli::cmd_synth, o);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(",250\n"), std::string::npos) << r.out;
}

TEST(Config, UnknownKeysRejected) {
    TempDir d;
    auto o = with("sq", "rx");
    o.config_path = d.write("a.json", R"({"qbits": {}})");
    EXPECT_EQ(run(cli::cmd_synth, o).code, cli::exit_config);
    o.config_path = d.write("b.json", R"({"noise": {"sq": {"sigma_J_eV": 1e-9}}})");
    EXPECT_EQ(run(cli::cmd_synth, o).code, cli::exit_config);
    o.config_path = d.write("c.json", "{not json");
    EXPECT_EQ(run(cli::cmd_synth, o).code, cli::exit_config);
    o.config_path = (d.path / "missing.json").string();
    EXPECT_EQ(run(cli::cmd_synth, o).code, cli::exit_config);
}

TEST(Config, CanonicalEchoIsIdempotent) {
    const std::string src = R"({"preset": "paper-2018", "qubits": {"hq": {"Jmax_eV": 2e-6}},
        "noise": {"hq": {"sigma_J_eV": 2e-9}}, "sweep": {"qubit": "hq", "gate": "rz", "angle": "pi/4",
        "grids": [{"param": "sigma_t_s", "log": [1e-11, 1e-9, 3]}]}, "seed": 3})";
    const auto c = RunConfig::from_json(json::parse(src));
    const auto again = RunConfig::from_json(c.to_json());
    EXPECT_EQ(c.to_json().dump(), again.to_json().dump());
    EXPECT_NEAR(again.qubit(QubitType::hq).amplitudes.get(Channel::exchange_prime), ev_to_rad_per_s(1e-6), 1.0);
    EXPECT_NEAR(again.noise(QubitType::hq).channel_sigma(Channel::exchange2), ev_to_rad_per_s(2e-9), 1e-3);
}

TEST(Sweep, ZeroSigmaSinglePoint) {
    TempDir d;
    cli::Options o;
    o.config_path = d.write("z.json", R"({"noise_preset": "none", "n_samples": 50,
        "sweep": {"qubit": "sq", "gate": "rx", "grids": [{"param": "sigma_t_s", "values": [0]}]}})");
    const auto r = run(cli::cmd_sweep, o);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = parse_csv(r.out);
    ASSERT_EQ(csv.rows.size(), 1u);
    EXPECT_EQ(csv.num(0, "mean_infidelity"), 0.0);
    EXPECT_EQ(csv.num(0, "n_samples"), 50.0);
}

TEST(Sweep, StqGridCoversRequestedRanges) {
    TempDir d;
    cli::Options o;
    o.samples = 20;
    o.config_path = d.write("s.json", R"({"noise": {"stq": {"sigma_J_eV": 0}},
        "sweep": {"qubit": "stq", "gate": "rx", "grids": [
            {"param": "sigma_Delta_Ez_eV", "log": [1e-11, 1e-8, 4]},
            {"param": "sigma_t_s", "log": [1e-11, 1e-6, 6]}]}})");
    const auto r = run(cli::cmd_sweep, o);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = parse_csv(r.out);
    ASSERT_EQ(csv.rows.size(), 24u);
    EXPECT_DOUBLE_EQ(csv.num(0, "sigma_gradient_eV"), 1e-11);
    EXPECT_DOUBLE_EQ(csv.num(23, "sigma_gradient_eV"), 1e-8);
    EXPECT_DOUBLE_EQ(csv.num(0, "sigma_t_s"), 1e-11);
    EXPECT_DOUBLE_EQ(csv.num(5, "sigma_t_s"), 1e-6);
    for (std::size_t i = 0; i < csv.rows.size(); ++i) EXPECT_EQ(csv.num(i, "sigma_exchange_eV"), 0.0);
}

TEST(Sweep, DeterministicAndThreadIndependent) {
    TempDir d;
    cli::Options o;
    o.samples = 100;
    o.config_path = d.write("d.json", R"({"sweep": {"qubit": "sdq", "gate": "rz",
        "grids": [{"param": "sigma_t_s", "log": [1e-11, 1e-6, 8]}]}})");
    o.threads = 1;
    const auto a = run(cli::cmd_sweep, o);
    o.threads = 5;
    const auto b = run(cli::cmd_sweep, o);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(parse_csv(a.out).rows.size(), 8u);
}

TEST(Sweep, EchoedConfigReproducesOutput) {
    TempDir d;
    cli::Options o;
    o.samples = 64;
    o.seed = 12345;
    o.config_path = d.write("e.json", R"({"sweep": {"qubit": "hq", "gate": "rx", "angle": "3pi/4",
        "grids": [{"param": "sigma_J_eV", "values": [1e-10, 1e-9]}, {"param": "sigma_t_s", "values": [1e-10]}]}})");
    const auto a = run(cli::cmd_sweep, o);
    ASSERT_EQ(a.code, 0) << a.err;
    std::string echoed;
    for (const auto& m : parse_csv(a.out).meta)
        if (m.starts_with("# config: ")) echoed = m.substr(10);
    ASSERT_FALSE(echoed.empty());
    cli::Options again;
    again.config_path = d.write("echo.json", echoed);
    const auto b = run(cli::cmd_sweep, again);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("# provenance hq rx: "), std::string::npos);
}

TEST(Sweep, MissingSectionIsConfigError) {
    EXPECT_EQ(run(cli::cmd_sweep, cli::Options{}).code, cli::exit_config);
}

TEST(Fidelity, SinglePointRow) {
    auto o = with("stq", "rz");
    o.sigma_t = 1e-9;
    o.samples = 200;
    const auto r = run(cli::cmd_fidelity, o);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = parse_csv(r.out);
    ASSERT_EQ(csv.rows.size(), 1u);
    EXPECT_EQ(csv.num(0, "sigma_t_s"), 1e-9);
    EXPECT_NEAR(csv.num(0, "sigma_gradient_eV"), 4e-9, 1e-17);
    EXPECT_GT(csv.num(0, "mean_infidelity"), 0.0);
    EXPECT_NEAR(csv.num(0, "total_gate_time_s"), 69.05e-9, 0.5e-9);
}

TEST(Output, UnwritablePathIsIoError) {
    auto o = with("sq", "rx");
    o.out = "/nonexistent-dir/x/y.csv";
    o.samples = 5;
    EXPECT_EQ(run(cli::cmd_fidelity, o).code, cli::exit_io);
}

TEST(Output, WritesFile) {
    TempDir d;
    auto o = with("dq", "rz");
    o.samples = 5;
    o.out = (d.path / "f.csv").string();
    const auto r = run(cli::cmd_fidelity, o);
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(*o.out);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(parse_csv(ss.str()).rows.size(), 1u);
}

TEST(Compare, DonorMinimumStepTimes) {
    TempDir d;
    cli::Options o;
    o.samples = 10;
    o.config_path = d.write("c.json", R"({"compare": {"qubits": ["dq"], "sigma_t_s": [1e-9]}})");
    const auto r = run(cli::cmd_compare, o);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = parse_csv(r.out);
    ASSERT_EQ(csv.rows.size(), 2u);
    EXPECT_EQ(csv.rows[0][csv.col.at("gate")], "rx");
    EXPECT_NEAR(csv.num(0, "t_min_s"), 500e-9, 1e-15);
    EXPECT_NEAR(csv.num(1, "t_min_s"), 125e-9, 1e-15);
}

TEST(Compare, ZeroSigmasGiveZeroEverywhere) {
    TempDir d;
    cli::Options o;
    o.samples = 20;
    o.config_path = d.write("z.json", R"({"noise_preset": "none", "compare": {"sigma_t_s": [0]}})");
    const auto csv = parse_csv(run(cli::cmd_compare, o).out);
    ASSERT_EQ(csv.rows.size(), 10u);
    for (std::size_t i = 0; i < csv.rows.size(); ++i) EXPECT_EQ(csv.num(i, "mean_infidelity"), 0.0);
}

TEST(Compare, DefaultGridShape) {
    cli::Options o;
    o.samples = 2;
    const auto r = run(cli::cmd_compare, o);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = parse_csv(r.out);
    EXPECT_EQ(csv.rows.size(), 5u * 2u * 20u);
    std::vector<std::string> expect{"qubit", "gate", "axis", "angle_rad", "sigma_t_s", "sigma_detuning_Hz",
                                    "sigma_drive_Hz", "sigma_exchange_eV", "sigma_gradient_eV", "sigma_J1_eV",
                                    "sigma_J2_eV", "sigma_Jprime_eV", "sigma_hyperfine_eV", "n_samples",
                                    "mean_infidelity", "std_error", "seed", "total_gate_time_s", "t_min_s"};
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_EQ(csv.col.at(expect[i]), i) << expect[i];
}

TEST(Binary, ExitCodes) {
    const std::string exe = SPINQ_CLI_PATH;
    auto code = [&](const std::string& args) {
        const int s = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(code("synth --qubit stq --gate rz --angle pi/2 --preset paper-2018"), 0);
    EXPECT_EQ(code("synth --qubit xq --gate rz"), 2);
    EXPECT_EQ(code("bogus"), 2);
    EXPECT_EQ(code("--help"), 0);
    EXPECT_EQ(code("fidelity --qubit sq --gate rx --samples 3 --out /nonexistent-dir/q.csv"), 4);
}
