// qdgain command-line front end.
//
//   qdgain transmission --config run.ini [--out FILE] [--format csv|json] [--threads K]
//   qdgain spectrum     --config run.ini ...
//   qdgain sweep        --config run.ini ...
//   qdgain figure fig2  [--out FILE] ...
//   qdgain selfcheck

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qdgain/figures.hpp"
#include "qdgain/output.hpp"
#include "qdgain/selfcheck.hpp"
#include "qdgain/sweep.hpp"

namespace {

struct OutputOptions {
    std::string path;
    std::string format = "csv";
    unsigned threads = qdgain::default_threads();
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    cmd->add_option("--out", o.path, "Output file (default: standard output)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

void emit(const qdgain::Dataset& d, const OutputOptions& o) {
    // Serialize fully before touching the destination, so a failure leaves no partial file.
    std::ostringstream buffer;
    qdgain::write_dataset(buffer, d, qdgain::parse_format(o.format));
    if (o.path.empty()) {
        std::cout << buffer.str();
        return;
    }
    std::ofstream out(o.path, std::ios::binary);
    if (!out) throw qdgain::Error("cannot open output file '" + o.path + "'");
    out << buffer.str();
    if (!out.flush()) throw qdgain::Error("failed writing '" + o.path + "'");
}

qdgain::Dataset run_default(const qdgain::RunConfig& c, unsigned threads) {
    return c.axes.empty() ? qdgain::run_transmission(c, threads) : qdgain::run_sweep(c, threads);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon gain of quantum-dot gain media coupled to a microwave cavity"};
    app.set_version_flag("--version", QDGAIN_VERSION);
    app.require_subcommand(1);

    OutputOptions out;
    std::string config_path;
    auto* transmission = app.add_subcommand("transmission", "Transmission, phase and spectrum over the [grid]");
    auto* spectrum = app.add_subcommand("spectrum", "Emission spectrum over the [grid]");
    auto* sweep = app.add_subcommand("sweep", "Cartesian sweep over the [sweep] axes");
    for (auto* cmd : {transmission, spectrum, sweep}) {
        cmd->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
        add_output_options(cmd, out);
    }

    std::string figure_name;
    auto* figure = app.add_subcommand("figure", "Reproduce a shipped figure dataset");
    figure->add_option("name", figure_name, "Figure name")->required();
    add_output_options(figure, out);

    auto* selfcheck = app.add_subcommand("selfcheck", "Run the invariant checks and print a report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (selfcheck->parsed()) {
            const qdgain::SelfCheckReport report = qdgain::run_selfcheck();
            qdgain::write_report(std::cout, report);
            return report.passed() ? 0 : 1;
        }
        if (figure->parsed()) {
            emit(run_default(qdgain::figure_config(figure_name), out.threads), out);
            return 0;
        }
        const qdgain::RunConfig config = qdgain::load_config(config_path);
        if (transmission->parsed()) emit(qdgain::run_transmission(config, out.threads), out);
        else if (spectrum->parsed()) emit(qdgain::run_spectrum(config, out.threads), out);
        else emit(qdgain::run_sweep(config, out.threads), out);
        return 0;
    } catch (const qdgain::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
