#include "qftion/dyson.hpp"

#include "qftion/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qftion {

namespace {

const cplx minus_i{0.0, -1.0};

void check_truncation(const FieldScenario& s, std::size_t initial, int order)
{
    if (order < 0 || order > max_dyson_order)
        throw DomainError("Dyson order " + std::to_string(order) + " unsupported (0..2)");
    const FockState st = s.basis.state(initial);
    if (st.n + order > s.basis.n_max())
        throw DomainError("boson truncation too small for the requested Dyson order");
}

} // namespace

DysonSeries::DysonSeries(const FieldModel& model, std::size_t initial, double t_end, int intervals)
    : model_(&model), initial_(initial), intervals_(intervals)
{
    if (intervals < 1) throw DomainError("Dyson grid needs at least one interval");
    if (!(t_end >= 0.0)) throw DomainError("t_end must be >= 0");
    step_ = t_end / intervals;

    const auto& vertices = model.vertices();
    const CouplingProfile& prof = model.scenario().profile;
    const FockBasis& basis = model.scenario().basis;
    const CVector psi0 = basis.basis_vector(basis.state(initial));
    const std::size_t fine = 2 * static_cast<std::size_t>(intervals) + 1;
    const double half = 0.5 * step_;

    // Coefficients at nodes and midpoints, u_j = j h / 2.
    std::vector<std::vector<cplx>> coeff(vertices.size(), std::vector<cplx>(fine));
    for (std::size_t v = 0; v < vertices.size(); ++v)
        for (std::size_t j = 0; j < fine; ++j) coeff[v][j] = vertices[v].coefficient(prof, j * half);

    // Cumulative first-order integrals on the fine grid: Simpson to nodes, the
    // three-point quadratic rule to midpoints.
    std::vector<std::vector<cplx>> cumulative(vertices.size(), std::vector<cplx>(fine));
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        const auto& f = coeff[v];
        auto& c = cumulative[v];
        for (int k = 0; k < intervals; ++k) {
            const std::size_t j = 2 * static_cast<std::size_t>(k);
            c[j + 1] = c[j] + half / 12.0 * (5.0 * f[j] + 8.0 * f[j + 1] - f[j + 2]);
            c[j + 2] = c[j] + step_ / 6.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
        }
    }

    for (std::size_t v = 0; v < vertices.size(); ++v) {
        first_state_.push_back(vertices[v].op * psi0);
        std::vector<cplx> nodes(static_cast<std::size_t>(intervals) + 1);
        for (int k = 0; k <= intervals; ++k) nodes[k] = cumulative[v][2 * static_cast<std::size_t>(k)];
        first_.push_back(std::move(nodes));
    }

    for (std::size_t w = 0; w < vertices.size(); ++w)
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            CVector state = vertices[w].op * first_state_[v];
            if (state.cwiseAbs().maxCoeff() == 0.0) continue;
            Pair p{w, v, std::vector<cplx>(static_cast<std::size_t>(intervals) + 1), std::move(state)};
            for (int k = 0; k < intervals; ++k) {
                const std::size_t j = 2 * static_cast<std::size_t>(k);
                auto g = [&](std::size_t m) { return coeff[w][m] * cumulative[v][m]; };
                p.integral[k + 1] = p.integral[k] + step_ / 6.0 * (g(j) + 4.0 * g(j + 1) + g(j + 2));
            }
            second_.push_back(std::move(p));
        }
}

CVector DysonSeries::order_amplitudes(int order, int k) const
{
    if (k < 0 || k > intervals_) throw DomainError("Dyson node out of range");
    const FockBasis& basis = model_->scenario().basis;
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    CVector out = CVector::Zero(dim);
    switch (order) {
    case 0:
        out(static_cast<Eigen::Index>(initial_)) = 1.0;
        break;
    case 1:
        for (std::size_t v = 0; v < first_.size(); ++v) out += minus_i * first_[v][k] * first_state_[v];
        break;
    case 2:
        for (const Pair& p : second_) out += minus_i * minus_i * p.integral[k] * p.state;
        break;
    default:
        throw DomainError("Dyson order " + std::to_string(order) + " unsupported (0..2)");
    }
    return out;
}

CVector DysonSeries::amplitudes(int order, int k) const
{
    CVector out = order_amplitudes(0, k);
    for (int n = 1; n <= order; ++n) out += order_amplitudes(n, k);
    return out;
}

std::vector<DysonTerm> DysonSeries::terms(std::size_t final_state, int order) const
{
    const auto& vertices = model_->vertices();
    const auto f = static_cast<Eigen::Index>(final_state);
    std::vector<DysonTerm> out;
    if (order == 0) {
        if (final_state == initial_) out.push_back({0, {}, "1", cplx{1.0, 0.0}});
    } else if (order == 1) {
        for (std::size_t v = 0; v < first_.size(); ++v) {
            const cplx m = first_state_[v](f);
            if (m != cplx{}) out.push_back({1, {v}, vertices[v].label, minus_i * m * first_[v].back()});
        }
    } else if (order == 2) {
        for (const Pair& p : second_) {
            const cplx m = p.state(f);
            if (m == cplx{}) continue;
            out.push_back({2, {p.v, p.w}, vertices[p.w].label + " . " + vertices[p.v].label,
                           minus_i * minus_i * m * p.integral.back()});
        }
    } else {
        throw DomainError("Dyson order " + std::to_string(order) + " unsupported (0..2)");
    }
    return out;
}

namespace {

// Doubles the grid until the summed amplitude settles.
template <class Eval>
auto converge(const DysonOptions& opts, Eval eval)
{
    int n = std::max(2, opts.base_intervals);
    auto [value, result] = eval(n);
    for (int d = 0; d < opts.max_doublings; ++d) {
        n *= 2;
        auto [next_value, next_result] = eval(n);
        const double change = std::abs(next_value - value);
        value = next_value;
        result = std::move(next_result);
        if (change < opts.tolerance) break;
    }
    return result;
}

} // namespace

cplx dyson_amplitude(std::size_t initial, std::size_t final_state, const FieldScenario& s,
                     int order, double t_end, const DysonOptions& opts)
{
    check_truncation(s, initial, order);
    (void)s.basis.state(final_state);
    const FieldModel model(s);
    return converge(opts, [&](int n) {
        const DysonSeries series(model, initial, t_end, n);
        const cplx a = series.amplitudes(order, n)(static_cast<Eigen::Index>(final_state));
        return std::pair{a, a};
    });
}

std::vector<DysonTerm> dyson_terms(std::size_t initial, std::size_t final_state,
                                   const FieldScenario& s, int order, double t_end,
                                   const DysonOptions& opts)
{
    check_truncation(s, initial, order);
    (void)s.basis.state(final_state);
    const FieldModel model(s);
    return converge(opts, [&](int n) {
        const DysonSeries series(model, initial, t_end, n);
        auto terms = series.terms(final_state, order);
        cplx total{};
        for (const auto& t : terms) total += t.amplitude;
        return std::pair{total, std::move(terms)};
    });
}

bool DysonReport::any_flagged() const
{
    return std::any_of(rows.begin(), rows.end(), [](const DysonComparison& r) { return r.flagged; });
}

DysonReport dyson_vs_exact_report(const FieldScenario& s,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                  double t_end, const IntegratorConfig& cfg)
{
    const CouplingProfile& p = s.profile;
    const double g = std::max(p.g1, p.g2) / p.omega0;
    DysonReport report;
    report.threshold = 10.0 * g * g * g;
    report.weak_regime = std::max(p.g1, p.g2) <= 0.05 * p.omega0;

    const FieldModel model(s);
    const BasisLayout layout = s.basis.layout();
    IntegratorConfig run = cfg;
    run.t_end = t_end;
    // Exact reference tolerates whatever truncation the caller picked.
    run.truncation_threshold = 1.0;

    std::map<std::size_t, CVector> exact_states;
    for (const auto& [i, f] : pairs) {
        check_truncation(s, i, max_dyson_order);
        if (exact_states.count(i)) continue;
        CVector out;
        propagate([&](double t) { return model.hamiltonian(t); }, layout,
                  s.basis.basis_vector(s.basis.state(i)), i, run, &out);
        exact_states.emplace(i, std::move(out));
    }

    for (const auto& [i, f] : pairs) {
        DysonComparison row;
        row.initial = i;
        row.final_state = f;
        row.perturbative = std::norm(dyson_amplitude(i, f, s, max_dyson_order, t_end));
        row.exact = std::norm(exact_states.at(i)(static_cast<Eigen::Index>(f)));
        row.abs_error = std::abs(row.perturbative - row.exact);
        row.rel_error = row.exact > 0.0 ? row.abs_error / row.exact : row.abs_error;
        row.flagged = row.abs_error > report.threshold;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace qftion
