// Acceptance criteria: one PASS/FAIL line each, nonzero exit if any fails.

#include "oracle.hpp"
#include "qftion/dyson.hpp"
#include "qftion/error.hpp"
#include "qftion/ion.hpp"
#include "qftion/scenario.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace qftion;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "acceptance.ini");
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

TimeSeries run_field(const FieldScenario& s, const FockState& init, double t_end,
                     double truncation_threshold = 1e-6) {
    const FieldModel model(s);
    IntegratorConfig cfg;
    cfg.t_end = t_end;
    cfg.truncation_threshold = truncation_threshold;
    return propagate([&](double t) { return model.hamiltonian(t); }, s.basis.layout(),
                     s.basis.basis_vector(init), s.basis.index(init), cfg);
}

double series_gap(const TimeSeries& a, const TimeSeries& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        worst = std::max(worst, std::abs(a.survival[k] - b.survival[k]));
        worst = std::max(worst, std::abs(a.mean_boson[k] - b.mean_boson[k]));
        for (int p = 0; p < 4; ++p)
            worst = std::max(worst, std::abs(a.populations[p][k] - b.populations[p][k]));
    }
    return worst;
}

FieldScenario pulse_scenario(double g1, double g2, double sigma_t, int n_max) {
    FieldScenario s;
    s.profile.g1 = g1;
    s.profile.g2 = g2;
    s.profile.sigma_t = sigma_t;
    s.profile.T = 30.0;
    s.basis = FockBasis(n_max);
    return s;
}

Outcome self_interaction() {
    double worst_error = 0.0, worst_revival = 1.0, worst_time = 0.0;
    for (double g1 : {0.01, 0.05, 0.1, 0.15}) {
        const auto start = std::chrono::steady_clock::now();
        Scenario s = parse("[couplings]\ng2 = 0\n[initial]\nstate = f\n[integration]\n"
                           "t_end = 18.849555921538759\n");
        set_coupling(s, "g1", g1);
        const TimeSeries ts = run_scenario(s).series;
        worst_time = std::max(worst_time, seconds_since(start));
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const OracleValues o = driven_oscillator_oracle(g1, 1.0, ts.times[k]);
            const double mean = std::pow(4.0 * g1, 2) * std::pow(std::sin(ts.times[k] / 2.0), 2);
            worst_error = std::max(worst_error, std::abs(ts.mean_boson[k] - mean));
            worst_error = std::max(worst_error, std::abs(ts.survival[k] - std::exp(-mean)));
            worst_error = std::max(worst_error, std::abs(o.mean_boson - mean));
            if (std::abs(ts.times[k] - 2.0 * pi) < 1e-9)
                worst_revival = std::min(worst_revival, ts.survival[k]);
        }
    }
    return {worst_error < 1e-4 && worst_revival > 1.0 - 1e-6 && worst_time < 10.0,
            fmt("max error %.2e, survival at 2pi %.12f, slowest %.2f s", worst_error,
                worst_revival, worst_time)};
}

Outcome antifermion_darkness() {
    const TimeSeries ts = run_scenario(parse("[couplings]\ng1 = 0.15\ng2 = 0\n[initial]\n"
                                             "state = fbar\n[integration]\n"
                                             "t_end = 18.849555921538759\n"))
                              .series;
    double lowest = 1.0;
    for (double p : ts.survival) lowest = std::min(lowest, p);
    return {lowest >= 1.0 - 1e-10, fmt("min survival 1 - %.2e", 1.0 - lowest)};
}

Outcome ion_encoding() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double identity = 0.0, dynamics = 0.0;
    for (int k = 0; k < 20; ++k) {
        FieldScenario s;
        s.profile.g1 = u(rng);
        s.profile.g2 = 2.0 * u(rng);
        s.profile.sigma_t = 0.5 + 5.0 * u(rng);
        s.profile.T = 1.0 + 40.0 * u(rng);
        s.profile.delta = u(rng) - 0.5;
        s.profile.omega0 = 0.5 + u(rng);
        s.basis = FockBasis(1 + static_cast<int>(8 * u(rng)));
        const FieldModel field(s);
        const IonModel ion(s, false);
        const CMatrix v = encoding_isometry(s.basis);
        for (int j = 0; j < 100; ++j) {
            const double t = 60.0 * u(rng);
            identity = std::max(identity, max_abs(v * field.hamiltonian(t) * v.adjoint() -
                                                  ion.hamiltonian(t)));
        }
    }
    for (const FieldScenario& s : {pulse_scenario(0.01, 0.21, 3.0, 8), pulse_scenario(0.15, 0.0, 3.0, 8)}) {
        const FieldModel field(s);
        const IonModel ion(s, false);
        IntegratorConfig cfg;
        cfg.t_end = 30.0;
        for (const FockState init : {FockState{1, 1, 0}, FockState{1, 0, 0}}) {
            const TimeSeries a =
                propagate([&](double t) { return field.hamiltonian(t); }, s.basis.layout(),
                          s.basis.basis_vector(init), s.basis.index(init), cfg);
            const CVector psi = encoding_isometry(s.basis) * s.basis.basis_vector(init);
            const int level = 1 + init.n_b + 2 * init.n_d;
            const TimeSeries b =
                propagate([&](double t) { return ion.hamiltonian(t); }, ion.basis().layout(),
                          psi, ion.basis().index(level, 0, init.n), cfg);
            dynamics = std::max(dynamics, series_gap(a, b));
        }
    }
    const double elapsed = seconds_since(start);
    return {identity < 1e-12 && dynamics < 1e-10 && elapsed < 5.0,
            fmt("identity %.2e, dynamics %.2e, %.2f s", identity, dynamics, elapsed)};
}

Outcome spectator() {
    std::vector<double> grid;
    for (int k = 1; k <= 1000; ++k) grid.push_back(30.0 * k / 1000.0);
    const SpectatorReport r = spectator_equivalence(pulse_scenario(0.01, 0.21, 3.0, 8), grid, {1, 1, 0});
    return {r.max_discrepancy < 1e-8 && r.max_leakage < 1e-12,
            fmt("discrepancy %.2e, leakage %.2e", r.max_discrepancy, r.max_leakage)};
}

Outcome perturbative_annihilation() {
    const FieldScenario s = pulse_scenario(0.0, 0.01, 3.0, 4);
    CVector psi;
    const FieldModel model(s);
    IntegratorConfig cfg;
    cfg.t_end = 30.0;
    propagate([&](double t) { return model.hamiltonian(t); }, s.basis.layout(),
              s.basis.basis_vector({1, 1, 0}), s.basis.index({1, 1, 0}), cfg, &psi);
    const double exact = std::norm(psi(static_cast<Eigen::Index>(s.basis.index({0, 0, 1}))));
    const double area = std::pow(0.01 * std::sqrt(2.0 * pi) * 3.0, 2);
    const double dyson =
        std::norm(dyson_amplitude(s.basis.index({1, 1, 0}), s.basis.index({0, 0, 1}), s, 1, 30.0));
    const double r1 = std::abs(exact - area) / area;
    const double r2 = std::abs(exact - dyson) / dyson;
    return {r1 < 0.05 && r2 < 0.05,
            fmt("exact %.6e, pulse area %.6e, order-1 %.6e", exact, area, dyson)};
}

Outcome rabi_transfer() {
    const TimeSeries ts = run_field(pulse_scenario(0.01, 0.21, 3.0, 8), {1, 1, 0}, 30.0);
    double best_survival = 1.0, best_mean = 0.0;
    bool hit = false;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (ts.times[k] >= 30.0) continue;
        best_survival = std::min(best_survival, ts.survival[k]);
        best_mean = std::max(best_mean, ts.mean_boson[k]);
        hit = hit || (ts.survival[k] < 0.05 && ts.mean_boson[k] > 0.9);
    }
    return {hit, fmt("min survival %.4f, max mean_n %.4f", best_survival, best_mean)};
}

Outcome nonperturbative() {
    std::ifstream in(fs::path(QFTION_SCENARIO_DIR) / "strong.ini");
    const Scenario sc = parse_scenario(in, "strong.ini");
    const RunResult r = run_scenario(sc);
    double peak = 0.0;
    for (double m : r.series.mean_boson) peak = std::max(peak, m);
    const FieldScenario base = pulse_scenario(0.1, 1.0, 4.0, r.n_max);
    FieldScenario wider = base;
    wider.basis = FockBasis(r.n_max + 4);
    const double gap = series_gap(run_field(base, {1, 1, 0}, 30.0, 1.0),
                                  run_field(wider, {1, 1, 0}, 30.0, 1.0));
    return {peak > 1.0 && gap < 1e-3,
            fmt("peak mean_n %.4f, n_max %.0f vs +4 gap %.2e", peak, r.n_max, gap)};
}

Outcome gaussian_machinery() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> c(-5.0, 5.0), w(0.3, 3.0), q(-3.0, 3.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double a = c(rng), s1 = w(rng), b = c(rng), s2 = w(rng), qq = q(rng);
        worst = std::max(worst, std::abs(gaussian_overlap(a, s1, b, s2, qq) -
                                         oracle::overlap(a, s1, b, s2, qq)));
    }
    const double s = 3.0 * std::sqrt(2.0);
    const WavePacket f(1.0, 1.0 / s, -15.0, Species::fermion);
    const WavePacket fb(-1.0, 1.0 / s, 15.0, Species::antifermion);
    const EffectiveFit fit = fit_effective_params(f, fb, 0.0, 2.0, 0.21);
    const bool recovered = fit.residual < 1e-4 && std::abs(fit.profile.g2 - 0.21) < 1e-9 &&
                           std::abs(fit.profile.sigma_t - s / std::sqrt(2.0)) < 1e-6 &&
                           std::abs(fit.profile.T - 2.0 * fit.collision_time) < 1e-9 &&
                           std::abs(fit.collision_time - 15.0) < 1e-6 &&
                           fit.profile.delta == f.frequency() + fb.frequency() - 2.0;
    return {worst < 1e-8 && recovered,
            fmt("overlap error %.2e, fit residual %.2e, sigma_t %.8f", worst, fit.residual,
                fit.profile.sigma_t)};
}

Outcome many_mode() {
    const auto dim = manymode_dimension(10, 5);
    MultimodeScenario m;
    m.packets = {WavePacket(1.0, 0.2, -10.0, Species::fermion),
                 WavePacket(-1.0, 0.2, 10.0, Species::antifermion)};
    m.bosons = {BosonMode{0.0, 1.0, 6}, BosonMode{0.05, 1.1, 6}};
    m.bare_g = 0.3;
    const MultimodeModel model(m);
    const CMatrix P = model.parity();
    double herm = 0.0, parity = 0.0;
    for (int k = 0; k <= 40; ++k) {
        const CMatrix h = model.hamiltonian(0.5 * k);
        herm = std::max(herm, max_abs(h - h.adjoint()));
        parity = std::max(parity, max_abs(h * P - P * h));
    }
    const MultimodeBasis basis = model.basis();
    const std::size_t init = basis.index({1, 1}, {0, 0});
    CVector psi0 = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    psi0(static_cast<Eigen::Index>(init)) = 1.0;
    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    cfg.truncation_threshold = 1.0;
    const TimeSeries ts =
        propagate([&](double t) { return model.hamiltonian(t); }, basis.layout(), psi0, init, cfg);
    double drift = 0.0, moved = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        drift = std::max(drift, ts.norm_error[k]);
        moved = std::max(moved, 1.0 - ts.survival[k]);
    }
    const bool ok = dim && *dim == 10000000000ULL && herm == 0.0 && parity == 0.0 &&
                    drift < 1e-9 && moved > 1e-3;
    return {ok, fmt("dimension %.0f, parity %.1e, norm drift %.2e", dim ? double(*dim) : 0.0,
                    parity, drift)};
}

int qftsim(const std::string& args) {
    const std::string cmd = std::string(QFTION_QFTSIM) + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    std::random_device rd;
    const fs::path dir = fs::temp_directory_path() / ("qftion_accept_" + std::to_string(rd()));
    int compared = 0, mismatched = 0;
    for (const auto& entry : fs::directory_iterator(QFTION_SCENARIO_DIR)) {
        if (entry.path().extension() != ".ini") continue;
        const std::string file = entry.path().string();
        const int first = qftsim("run " + file + " --out " + (dir / "a").string());
        const int second = qftsim("run " + file + " --out " + (dir / "b").string());
        const fs::path csv = entry.path().stem().string() + ".csv";
        ++compared;
        if (first != second) ++mismatched;
        else if (first == 0 && slurp(dir / "a" / csv) != slurp(dir / "b" / csv)) ++mismatched;
    }
    fs::remove_all(dir);
    return {compared > 0 && mismatched == 0,
            fmt("%.0f scenarios, %.0f differing", compared, mismatched)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"self-interaction matches the driven-oscillator oracle", self_interaction},
        {"antifermion is dark without pair coupling", antifermion_darkness},
        {"ion encoding identity and dynamics", ion_encoding},
        {"spectator construction", spectator},
        {"perturbative pair annihilation", perturbative_annihilation},
        {"pair annihilates into one boson", rabi_transfer},
        {"nonperturbative boson creation, truncation converged", nonperturbative},
        {"gaussian overlap and effective parameter fit", gaussian_machinery},
        {"many-mode dimension and structure", many_mode},
        {"repeated runs give byte-identical CSV", determinism},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s  %2d  %s  (%s)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
