#include "qftion/dyson.hpp"
#include "qftion/error.hpp"
#include "qftion/ion.hpp"
#include "qftion/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

namespace qftion {

namespace {

FockState fock_state(Sector sector, int n)
{
    const int code = static_cast<int>(sector);
    return {code & 1, (code >> 1) & 1, n};
}

// Hadamard on the spectator qubit: columns are |+>, |->.
CMatrix spectator_hadamard(const IonBasis& basis)
{
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    CMatrix w = CMatrix::Zero(dim, dim);
    const double c = std::sqrt(0.5);
    for (int level = 1; level <= 4; ++level)
        for (int n = 0; n <= basis.n_max(); ++n) {
            const auto i0 = static_cast<Eigen::Index>(basis.index(level, 0, n));
            const auto i1 = static_cast<Eigen::Index>(basis.index(level, 1, n));
            w(i0, i0) = c;
            w(i0, i1) = c;
            w(i1, i0) = c;
            w(i1, i1) = -c;
        }
    return w;
}

Problem field_problem(const Scenario& s, int n_max)
{
    auto model = std::make_shared<const FieldModel>(s.field(n_max));
    const FockBasis& basis = model->scenario().basis;
    Problem p;
    p.hamiltonian = [model](double t) { return model->hamiltonian(t); };
    p.layout = basis.layout();
    p.psi0 = basis.basis_vector(fock_state(s.initial, s.boson_n));
    p.target = basis.index(fock_state(s.target, s.target_n));
    return p;
}

Problem ion_problem(const Scenario& s, int n_max)
{
    const FieldScenario fs = s.field(n_max);
    auto model = std::make_shared<const IonModel>(fs, false);
    const CMatrix v = encoding_isometry(fs.basis);
    Problem p;
    p.hamiltonian = [model](double t) { return model->hamiltonian(t); };
    p.layout = model->basis().layout();
    p.psi0 = v * fs.basis.basis_vector(fock_state(s.initial, s.boson_n));
    const FockState tgt = fock_state(s.target, s.target_n);
    p.target = model->basis().index(1 + tgt.n_b + 2 * tgt.n_d, 0, tgt.n);
    return p;
}

Problem spectator_problem(const Scenario& s, int n_max)
{
    const FieldScenario fs = s.field(n_max);
    auto model = std::make_shared<const IonModel>(fs, true);
    const IonBasis& basis = model->basis();
    auto w = std::make_shared<const CMatrix>(spectator_hadamard(basis));
    const int qubit = s.spectator_sign > 0 ? 0 : 1;
    const FockState init = fock_state(s.initial, s.boson_n);
    const FockState tgt = fock_state(s.target, s.target_n);
    // The field-to-ion signs of V are +1, so the encoded initial state is a basis vector.
    Problem p;
    p.hamiltonian = [model, w](double t) { return CMatrix(*w * model->hamiltonian(t) * *w); };
    p.layout = basis.layout();
    p.psi0 = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    p.psi0(static_cast<Eigen::Index>(basis.index(1 + init.n_b + 2 * init.n_d, qubit, init.n))) = 1.0;
    p.target = basis.index(1 + tgt.n_b + 2 * tgt.n_d, qubit, tgt.n);
    return p;
}

std::vector<int> multimode_occupations(const std::vector<WavePacket>& packets, Sector sector)
{
    std::vector<int> occ(packets.size(), 0);
    const bool want_f = sector == Sector::f || sector == Sector::pair;
    const bool want_fbar = sector == Sector::fbar || sector == Sector::pair;
    bool placed_f = false, placed_fbar = false;
    for (std::size_t i = 0; i < packets.size(); ++i) {
        if (packets[i].species() == Species::fermion && want_f && !placed_f) {
            occ[i] = 1;
            placed_f = true;
        } else if (packets[i].species() == Species::antifermion && want_fbar && !placed_fbar) {
            occ[i] = 1;
            placed_fbar = true;
        }
    }
    return occ;
}

Problem multimode_problem(const Scenario& s, int n_max)
{
    auto model = std::make_shared<const MultimodeModel>(s.multimode(n_max));
    const MultimodeBasis& basis = model->basis();
    std::vector<int> bosons(basis.boson_modes(), 0);
    Problem p;
    p.hamiltonian = [model](double t) { return model->hamiltonian(t); };
    p.sparse_hamiltonian = [model](double t) { return model->sparse_hamiltonian(t); };
    p.layout = basis.layout();
    bosons[0] = s.boson_n;
    p.psi0 = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    p.psi0(static_cast<Eigen::Index>(basis.index(multimode_occupations(s.packets, s.initial), bosons))) = 1.0;
    bosons[0] = s.target_n;
    p.target = basis.index(multimode_occupations(s.packets, s.target), bosons);
    return p;
}

TimeSeries propagate_problem(const Problem& p, const IntegratorConfig& cfg)
{
    if (p.sparse_hamiltonian)
        return propagate(Propagator(p.sparse_hamiltonian, cfg.method), p.layout, p.psi0, p.target,
                         cfg);
    return propagate(p.hamiltonian, p.layout, p.psi0, p.target, cfg);
}

std::function<Problem(int)> problem_builder(const Scenario& s)
{
    switch (s.mode) {
    case RunMode::ion:
        return [&s](int n) { return ion_problem(s, n); };
    case RunMode::ion_spectator:
        return [&s](int n) { return spectator_problem(s, n); };
    case RunMode::multimode:
        return [&s](int n) { return multimode_problem(s, n); };
    default:
        return [&s](int n) { return field_problem(s, n); };
    }
}

double reference_frequency(const Scenario& s)
{
    if (s.mode != RunMode::multimode) return s.profile.omega0;
    double w = 0.0;
    for (const auto& b : s.bosons) w = std::max(w, b.omega);
    return w;
}

TimeSeries dyson_series(const Scenario& s)
{
    const FieldScenario fs = s.field(s.n_max);
    const FieldModel model(fs);
    const int n = std::max(1, s.integration.steps());
    const std::size_t initial = fs.basis.index(fock_state(s.initial, s.boson_n));
    const std::size_t target = fs.basis.index(fock_state(s.target, s.target_n));
    const DysonSeries series(model, initial, s.integration.t_end, n);
    const BasisLayout layout = fs.basis.layout();
    TimeSeries out;
    for (int k = 0; k <= n; ++k) {
        const CVector amp = series.amplitudes(max_dyson_order, k);
        out.push(k == n ? s.integration.t_end : series.node_time(k), observables(amp, layout, target));
    }
    return out;
}

} // namespace

RunResult run_scenario(const Scenario& s)
{
    s.validate();
    s.integration.validate(reference_frequency(s));
    if (s.mode == RunMode::dyson) return {dyson_series(s), s.n_max};
    AdaptiveResult r = propagate_adaptive(problem_builder(s), s.n_max, s.n_max_cap, s.integration);
    return {std::move(r.series), r.n_max};
}

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const TimeSeries& series)
{
    out << "t,survival,mean_n,pop_vac,pop_f,pop_fbar,pop_pair,norm_error\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        out << format_number(series.times[k]) << ',' << format_number(series.survival[k]) << ','
            << format_number(series.mean_boson[k]);
        for (std::size_t p = 0; p < 4; ++p) out << ',' << format_number(series.populations[p][k]);
        out << ',' << format_number(series.norm_error[k]) << '\n';
    }
}

std::filesystem::path output_path(const Scenario& s, const std::filesystem::path& out_dir)
{
    std::filesystem::path p;
    if (!s.output.empty()) p = s.output;
    else p = (s.source.empty() ? std::filesystem::path("scenario") : s.source.stem()).string() + ".csv";
    if (!out_dir.empty()) return out_dir / p.filename();
    return p;
}

int status_for_current_exception(std::string& message)
{
    try {
        throw;
    } catch (const ParseError& e) {
        message = e.what();
        return exit_code::parse;
    } catch (const TruncationError& e) {
        message = e.what();
        return exit_code::truncation;
    } catch (const ValidationError& e) {
        message = e.what();
        return exit_code::validation;
    } catch (const DomainError& e) {
        message = e.what();
        return exit_code::validation;
    } catch (const ReductionError& e) {
        message = e.what();
        return exit_code::validation;
    } catch (const DimensionCapError& e) {
        message = e.what();
        return exit_code::validation;
    } catch (const std::ios_base::failure& e) {
        message = e.what();
        return exit_code::io;
    } catch (const std::exception& e) {
        message = e.what();
        return exit_code::internal;
    } catch (...) {
        message = "unknown error";
        return exit_code::internal;
    }
}

namespace {

void write_file(const std::filesystem::path& path, const TimeSeries& series)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    write_csv(out, series);
    if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

} // namespace

SweepResult sweep_scenario(const Scenario& base, const std::string& key,
                           const std::vector<std::string>& values,
                           const std::filesystem::path& out_dir, unsigned threads)
{
    {
        Scenario probe = base;
        set_coupling(probe, key, base.profile.g1); // rejects unknown keys up front
    }
    const std::string stem = base.source.empty() ? "scenario" : base.source.stem().string();
    const std::filesystem::path dir =
        out_dir.empty() ? std::filesystem::path(base.output).parent_path() : out_dir;

    SweepResult result;
    result.entries.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        result.entries[i].value_text = values[i];
        result.entries[i].csv = dir / (stem + "_" + key + "_" + values[i] + ".csv");
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            SweepEntry& e = result.entries[i];
            try {
                char* end = nullptr;
                e.value = std::strtod(e.value_text.c_str(), &end);
                if (e.value_text.empty() || *end != '\0')
                    throw ValidationError("sweep value '" + e.value_text + "' is not a number");
                Scenario s = base;
                set_coupling(s, key, e.value);
                const RunResult r = run_scenario(s);
                write_file(e.csv, r.series);
                const auto& mean = r.series.mean_boson;
                const auto& surv = r.series.survival;
                e.peak_mean_n = *std::max_element(mean.begin(), mean.end());
                e.min_survival = *std::min_element(surv.begin(), surv.end());
            } catch (...) {
                e.status = status_for_current_exception(e.message);
            }
        }
    };
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(threads == 0 ? 1u : threads, static_cast<unsigned>(values.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
    }

    result.summary = dir / (stem + "_sweep_" + key + ".csv");
    if (result.summary.has_parent_path()) std::filesystem::create_directories(result.summary.parent_path());
    std::ofstream out(result.summary, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + result.summary.string());
    out << "value,peak_mean_n,min_survival\n";
    for (const SweepEntry& e : result.entries) {
        out << e.value_text << ',';
        if (e.status == 0) out << format_number(e.peak_mean_n) << ',' << format_number(e.min_survival);
        else out << "nan,nan";
        out << '\n';
    }
    return result;
}

bool VerifyReport::pass() const
{
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass || c.skipped; });
}

std::string VerifyReport::text() const
{
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL") << "  " << c.name;
        if (!c.detail.empty()) out << "  (" << c.detail << ")";
        out << '\n';
    }
    out << (pass() ? "all checks passed" : "verification failed") << '\n';
    return out.str();
}

namespace {

std::string sci(double v)
{
    std::ostringstream o;
    o.precision(3);
    o << std::scientific << v;
    return o.str();
}

double series_distance(const TimeSeries& coarse, const TimeSeries& fine)
{
    // fine has exactly twice as many steps.
    double d = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        const Observables a = coarse.at(k);
        const Observables b = fine.at(2 * k);
        d = std::max({d, std::abs(a.survival - b.survival), std::abs(a.mean_boson - b.mean_boson)});
        for (std::size_t p = 0; p < 4; ++p) d = std::max(d, std::abs(a.populations[p] - b.populations[p]));
    }
    return d;
}

template <class F>
CheckResult guarded(const std::string& name, F&& f)
{
    CheckResult c;
    c.name = name;
    try {
        f(c);
    } catch (...) {
        std::string message;
        status_for_current_exception(message);
        c.pass = false;
        c.detail = message;
    }
    return c;
}

std::vector<std::pair<std::size_t, std::size_t>> dyson_pairs(const FieldScenario& fs, FockState init)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const std::size_t i = fs.basis.index(init);
    for (std::size_t f = 0; f < fs.basis.dimension(); ++f)
        if (fs.basis.state(f).n <= init.n + max_dyson_order) pairs.emplace_back(i, f);
    return pairs;
}

} // namespace

VerifyReport verify_scenario(const Scenario& s)
{
    VerifyReport report;
    s.validate();
    const double omega = reference_frequency(s);

    // Truncation headroom, also fixing the n_max used by the other checks.
    int n_max = s.n_max;
    IntegratorConfig cfg = s.integration;
    report.checks.push_back(guarded("truncation headroom", [&](CheckResult& c) {
        const AdaptiveResult r = propagate_adaptive(problem_builder(s), s.n_max, s.n_max_cap, cfg);
        n_max = r.n_max;
        const auto& top = r.series.top_level_population;
        const double worst = *std::max_element(top.begin(), top.end());
        c.pass = worst <= cfg.truncation_threshold;
        c.detail = "n_max " + std::to_string(n_max) + ", max top-level population " + sci(worst);
    }));

    report.checks.push_back(guarded("dt-halving convergence", [&](CheckResult& c) {
        const double bound = 2.0 * std::numbers::pi / (100.0 * omega);
        if (cfg.dt > bound * (1.0 + 1e-12)) {
            c.pass = false;
            c.detail = "dt " + sci(cfg.dt) + " exceeds 2 pi/(100 omega0) = " + sci(bound);
            return;
        }
        IntegratorConfig coarse = cfg;
        coarse.truncation_threshold = 1.0;
        const int steps = coarse.steps();
        coarse.dt = steps > 0 ? coarse.t_end / steps : coarse.dt;
        IntegratorConfig fine = coarse;
        fine.dt = 0.5 * coarse.dt;
        const Problem p = problem_builder(s)(n_max);
        const TimeSeries a = propagate_problem(p, coarse);
        const TimeSeries b = propagate_problem(p, fine);
        const double d = series_distance(a, b);
        c.pass = d < 1e-8;
        c.detail = "max observable change " + sci(d);
    }));

    if (s.mode == RunMode::multimode) {
        report.checks.push_back(guarded("multimode structure", [&](CheckResult& c) {
            const MultimodeModel model(s.multimode(n_max));
            const CMatrix parity = model.parity();
            double herm = 0.0, comm = 0.0;
            for (int k = 0; k <= 20; ++k) {
                const CMatrix h = model.hamiltonian(cfg.t_end * k / 20.0);
                herm = std::max(herm, (h - h.adjoint()).cwiseAbs().maxCoeff());
                comm = std::max(comm, (h * parity - parity * h).cwiseAbs().maxCoeff());
            }
            c.pass = herm == 0.0 && comm == 0.0;
            c.detail = "hermiticity defect " + sci(herm) + ", parity commutator " + sci(comm);
        }));
        report.checks.push_back(guarded("norm preservation", [&](CheckResult& c) {
            const Problem p = multimode_problem(s, n_max);
            IntegratorConfig run = cfg;
            run.truncation_threshold = 1.0;
            const TimeSeries ts = propagate_problem(p, run);
            const double drift = *std::max_element(ts.norm_error.begin(), ts.norm_error.end());
            c.pass = drift < 1e-9;
            c.detail = "max norm drift " + sci(drift);
        }));
        return report;
    }

    const FieldScenario fs = s.field(n_max);
    const FockState init = fock_state(s.initial, s.boson_n);

    report.checks.push_back(guarded("ion encoding identity", [&](CheckResult& c) {
        const FieldModel field(fs);
        const IonModel ion(fs, false);
        const CMatrix v = encoding_isometry(fs.basis);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double t = cfg.t_end * (k + 0.5) / 100.0;
            worst = std::max(worst, (v * field.hamiltonian(t) * v.adjoint() - ion.hamiltonian(t))
                                        .cwiseAbs()
                                        .maxCoeff());
        }
        c.pass = worst < 1e-12;
        c.detail = "max |V H_field V^dag - H_ion| " + sci(worst);
    }));

    report.checks.push_back(guarded("spectator equivalence", [&](CheckResult& c) {
        std::vector<double> grid;
        for (int k = 1; k <= 300; ++k) grid.push_back(cfg.t_end * k / 300.0);
        const SpectatorReport r =
            spectator_equivalence(fs, grid, init, s.spectator_sign, cfg.dt, cfg.method);
        c.pass = r.pass;
        c.detail = "discrepancy " + sci(r.max_discrepancy) + ", leakage " + sci(r.max_leakage) +
                   "; " + r.annotation;
    }));

    report.checks.push_back(guarded("dyson residuals", [&](CheckResult& c) {
        const double g = std::max(s.profile.g1, s.profile.g2);
        if (g > 0.05 * s.profile.omega0) {
            c.skipped = true;
            c.detail = "nonperturbative regime (g = " + format_number(g) + " omega0 > 0.05 omega0)";
            return;
        }
        FieldScenario dfs = fs;
        if (init.n + max_dyson_order > dfs.basis.n_max()) dfs.basis = FockBasis(init.n + max_dyson_order);
        const DysonReport r = dyson_vs_exact_report(dfs, dyson_pairs(dfs, init), cfg.t_end, cfg);
        double worst = 0.0;
        for (const auto& row : r.rows) worst = std::max(worst, row.abs_error);
        c.pass = !r.any_flagged();
        c.detail = "max |P_dyson - P_exact| " + sci(worst) + " vs threshold " + sci(r.threshold);
    }));

    return report;
}

} // namespace qftion
