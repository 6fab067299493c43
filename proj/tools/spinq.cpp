#include <iostream>

#include "CLI11.hpp"
#include "spinq/cli.hpp"

int main(int argc, char** argv) {
    namespace sc = spinq::cli;
    CLI::App app{"Pulse synthesis and Monte Carlo gate fidelity for silicon spin qubits"};
    app.set_version_flag("--version", sc::tool_version);
    app.require_subcommand(1);

    sc::Options o;
    auto common = [&](CLI::App* cmd) {
        cmd->add_option("--qubit", o.qubit, "sq | stq | hq | dq | sdq");
        cmd->add_option("--gate", o.gate, "rx | rz");
        cmd->add_option("--angle", o.angle, "rotation angle, e.g. pi/2, 3pi/4 or radians");
        cmd->add_option("--preset", o.preset, "qubit parameter preset (paper-2018 | none)");
        cmd->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
        cmd->add_option("--out", o.out, "output file (default: stdout)");
        cmd->add_flag("--physical", o.physical, "keep the static STQ/SDQ term on during exchange steps");
    };
    auto mc = [&](CLI::App* cmd) {
        cmd->add_option("--samples", o.samples, "Monte Carlo realizations per grid point")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", o.seed, "base seed");
        cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    };

    auto* synth = app.add_subcommand("synth", "print and verify the pulse sequence of one gate");
    common(synth);
    auto* fidelity = app.add_subcommand("fidelity", "Monte Carlo infidelity of one gate at one noise point");
    common(fidelity);
    mc(fidelity);
    fidelity->add_option("--sigma-t", o.sigma_t, "timing error standard deviation in s");
    auto* sweep = app.add_subcommand("sweep", "infidelity over the noise grid of a config file");
    common(sweep);
    mc(sweep);
    auto* compare = app.add_subcommand("compare", "sigma_t curves of all qubits and gates");
    common(compare);
    mc(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sc::exit_config;
    }

    if (synth->parsed()) return sc::cmd_synth(o, std::cout, std::cerr);
    if (fidelity->parsed()) return sc::cmd_fidelity(o, std::cout, std::cerr);
    if (sweep->parsed()) return sc::cmd_sweep(o, std::cout, std::cerr);
    return sc::cmd_compare(o, std::cout, std::cerr);
}
