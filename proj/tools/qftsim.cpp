// qftsim: scenario runner for the fermion/antifermion/boson mode simulator.
// Links only against the C API.

#include "qftion/qftion.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

namespace {

unsigned sweep_threads()
{
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("SIM_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) n = static_cast<unsigned>(cap);
    }
    return n;
}

int report_error(qft_status status)
{
    std::fprintf(stderr, "error: %s\n", qft_last_error());
    return static_cast<int>(status);
}

qft_scenario* load(const std::string& path, qft_status& status)
{
    qft_scenario* s = nullptr;
    status = qft_scenario_load(path.c_str(), &s);
    if (status == QFT_OK) {
        const std::string warnings = qft_scenario_warnings(s);
        if (!warnings.empty()) std::fprintf(stderr, "warning: %s", warnings.c_str());
    }
    return s;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulator for interacting fermion, antifermion and boson field modes"};
    app.require_subcommand(1);
    std::string out_dir;
    app.add_option("--out", out_dir, "Directory for CSV output (overrides [run] output location)");
    app.set_version_flag("--version", qft_version());

    std::string file;
    auto* run = app.add_subcommand("run", "Run a scenario and write its CSV time series");
    run->add_option("file", file, "Scenario file")->required();
    run->add_option("--out", out_dir, "Directory for CSV output");

    std::string key, values;
    auto* sweep = app.add_subcommand("sweep", "Run a scenario for several values of one coupling");
    sweep->add_option("file", file, "Scenario file")->required();
    sweep->add_option("--key", key, "[couplings] entry to vary")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--out", out_dir, "Directory for CSV output");

    auto* verify = app.add_subcommand("verify", "Run the certification suite for a scenario");
    verify->add_option("file", file, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(QFT_ERR_PARSE);
    }

    qft_status status = QFT_OK;
    qft_scenario* scenario = load(file, status);
    if (status != QFT_OK) return report_error(status);

    const char* dir = out_dir.empty() ? nullptr : out_dir.c_str();
    if (*run) {
        char path[4096];
        status = qft_scenario_run(scenario, dir, path, sizeof path);
        if (status == QFT_OK) std::printf("wrote %s\n", path);
    } else if (*sweep) {
        qft_report* report = nullptr;
        status = qft_scenario_sweep(scenario, key.c_str(), values.c_str(), dir, sweep_threads(), &report);
        if (report) std::fputs(qft_report_text(report), stdout);
        qft_report_free(report);
    } else {
        qft_report* report = nullptr;
        status = qft_scenario_verify(scenario, &report);
        if (report) std::fputs(qft_report_text(report), stdout);
        qft_report_free(report);
    }
    qft_scenario_free(scenario);
    if (status != QFT_OK) return report_error(status);
    return 0;
}
