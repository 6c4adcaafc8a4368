#pragma once

// Scenario files, the runs they describe, CSV output, parameter sweeps and
// the per-scenario certification suite.
//
// Scenario files are line-oriented key = value text grouped in sections:
//
//   [couplings]   g1 g2 sigma_t T delta omega0 k0
//   [initial]     state (vac | f | fbar | pair), boson_n
//   [integration] dt t_end n_max n_max_cap method (magnus4 | midpoint)
//   [run]         mode (field | ion | ion-spectator | dyson | multimode),
//                 target, target_n, output, rotating_only, normal_ordering,
//                 spectator_sign
//   [packets]     fermion = p, sigma_p, x0   (repeatable)
//                 antifermion = p, sigma_p, x0   (repeatable)
//                 boson = k, omega   (repeatable, multimode only)
//                 g = bare coupling
//
// '#' and ';' start comments. Unknown sections or keys are parse errors.

#include "qftion/evolve.hpp"
#include "qftion/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qftion {

enum class RunMode { field, ion, ion_spectator, dyson, multimode };

struct Scenario {
    CouplingProfile profile;
    Sector initial = Sector::vac;
    int boson_n = 0;
    Sector target = Sector::vac;
    int target_n = 0;

    IntegratorConfig integration;
    int n_max = 8;
    int n_max_cap = 64;

    RunMode mode = RunMode::field;
    std::string output;
    bool rotating_only = false;
    bool normal_ordering = false;
    int spectator_sign = 1;

    std::vector<WavePacket> packets;
    std::vector<BosonMode> bosons;
    std::optional<double> bare_g;
    // Residual of the packet reduction when the profile came from [packets].
    std::optional<double> fit_residual;

    std::filesystem::path source;
    std::vector<std::string> warnings;

    FieldScenario field(int n_max) const;
    MultimodeScenario multimode(int n_max) const;

    // Physical checks shared by load and sweep; throws ValidationError.
    void validate() const;
};

// Throws ParseError (syntax, unknown or malformed keys) or ValidationError.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& source = {});
Scenario load_scenario(const std::filesystem::path& path);

// Sets one [couplings] entry; throws ValidationError for other keys.
void set_coupling(Scenario& s, const std::string& key, double value);

struct RunResult {
    TimeSeries series;
    int n_max = 0;
};

// Executes the scenario's mode. Truncation failures after the adaptive cap
// propagate as TruncationError.
RunResult run_scenario(const Scenario& s);

// Fixed 17-significant-digit, locale-independent formatting.
std::string format_number(double v);
void write_csv(std::ostream& out, const TimeSeries& series);

// Where `run` writes its CSV: [run] output (or <scenario stem>.csv), placed
// in out_dir when one is given.
std::filesystem::path output_path(const Scenario& s, const std::filesystem::path& out_dir);

struct SweepEntry {
    std::string value_text;
    double value = 0.0;
    std::filesystem::path csv;
    int status = 0; // 0 ok, else the run exit code
    std::string message;
    double peak_mean_n = 0.0;
    double min_survival = 0.0;
};

struct SweepResult {
    std::vector<SweepEntry> entries; // in the order of the requested values
    std::filesystem::path summary;
};

// Runs one scenario per value concurrently on up to `threads` workers.
// Failures are recorded per entry and do not stop the sweep.
SweepResult sweep_scenario(const Scenario& s, const std::string& key,
                           const std::vector<std::string>& values,
                           const std::filesystem::path& out_dir, unsigned threads);

struct CheckResult {
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool pass() const;
    std::string text() const;
};

VerifyReport verify_scenario(const Scenario& s);

// Status codes shared by the C API and the CLI.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int parse = 2;
inline constexpr int validation = 3;
inline constexpr int truncation = 4;
inline constexpr int verify = 5;
inline constexpr int io = 6;
} // namespace exit_code

} // namespace qftion

namespace qftion {

// Maps the in-flight exception to an exit code and message. Call from a catch block.
int status_for_current_exception(std::string& message);

} // namespace qftion
