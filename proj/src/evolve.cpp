#include "qftion/evolve.hpp"

#include "qftion/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace qftion {

TruncationError::TruncationError(double time, double population)
    : Error("boson truncation insufficient: top-level population " + std::to_string(population) +
            " at t = " + std::to_string(time)),
      time_(time), population_(population)
{
}

void IntegratorConfig::validate(double omega0) const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
    if (!(omega0 > 0.0)) throw ValidationError("omega0 must be positive");
    const double bound = 2.0 * std::numbers::pi / (100.0 * omega0);
    if (dt > bound * (1.0 + 1e-12))
        throw ValidationError("dt = " + std::to_string(dt) + " exceeds 2 pi / (100 omega0) = " +
                              std::to_string(bound));
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be >= 0");
}

int IntegratorConfig::steps() const
{
    if (t_end == 0.0) return 0;
    const double ratio = t_end / dt;
    const double nearest = std::round(ratio);
    const double n = std::abs(ratio - nearest) < 1e-9 ? nearest : std::ceil(ratio);
    return static_cast<int>(std::max(1.0, n));
}

Observables observables(const CVector& psi, const BasisLayout& layout, std::size_t target)
{
    if (static_cast<std::size_t>(psi.size()) != layout.dimension())
        throw DomainError("state dimension does not match basis layout");
    if (target >= layout.dimension()) throw DomainError("survival target out of range");
    Observables o;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < layout.dimension(); ++i) {
        const double p = std::norm(psi(static_cast<Eigen::Index>(i)));
        norm2 += p;
        o.mean_boson += p * layout.bosons[i];
        o.populations[static_cast<std::size_t>(layout.sector[i])] += p;
        if (layout.top_level[i]) o.top_level_population += p;
    }
    o.survival = std::norm(psi(static_cast<Eigen::Index>(target)));
    o.norm_error = std::abs(std::sqrt(norm2) - 1.0);
    return o;
}

void TimeSeries::push(double t, const Observables& o)
{
    times.push_back(t);
    survival.push_back(o.survival);
    mean_boson.push_back(o.mean_boson);
    for (std::size_t s = 0; s < 4; ++s) populations[s].push_back(o.populations[s]);
    norm_error.push_back(o.norm_error);
    top_level_population.push_back(o.top_level_population);
}

Observables TimeSeries::at(std::size_t k) const
{
    Observables o;
    o.survival = survival.at(k);
    o.mean_boson = mean_boson.at(k);
    for (std::size_t s = 0; s < 4; ++s) o.populations[s] = populations[s].at(k);
    o.norm_error = norm_error.at(k);
    o.top_level_population = top_level_population.at(k);
    return o;
}

namespace {

using Group = std::vector<Eigen::Index>;

// Connected components of the union of the nonzero patterns of a and b.
std::vector<Group> components(const CMatrix& a, const CMatrix* b)
{
    const Eigen::Index n = a.rows();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i) {
            const bool linked = a(i, j) != cplx{} || a(j, i) != cplx{} ||
                                (b && ((*b)(i, j) != cplx{} || (*b)(j, i) != cplx{}));
            if (linked) parent[find(i)] = find(j);
        }

    std::vector<Group> groups;
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<Eigen::Index>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(i);
    }
    return groups;
}

CMatrix gather(const CMatrix& m, const Group& g)
{
    const auto k = static_cast<Eigen::Index>(g.size());
    CMatrix out(k, k);
    for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index r = 0; r < k; ++r) out(r, c) = m(g[r], g[c]);
    return out;
}

// psi <- exp(-i G) psi on the coordinates of one block, G Hermitian.
void apply_exponential(const CMatrix& generator, const Group& g, CVector& psi)
{
    const auto k = static_cast<Eigen::Index>(g.size());
    if (k == 1) {
        const double x = generator(0, 0).real();
        psi(g.front()) *= cplx{std::cos(x), -std::sin(x)};
        return;
    }
    CVector sub(k);
    for (Eigen::Index r = 0; r < k; ++r) sub(r) = psi(g[r]);
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(generator);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    CVector coeff = eig.eigenvectors().adjoint() * sub;
    for (Eigen::Index r = 0; r < k; ++r) coeff(r) *= cplx{std::cos(lambda(r)), -std::sin(lambda(r))};
    sub = eig.eigenvectors() * coeff;
    for (Eigen::Index r = 0; r < k; ++r) psi(g[r]) = sub(r);
}

// Blocks up to this size are exponentiated by eigendecomposition; larger
// states use a Taylor series on the sparse generator action.
constexpr Eigen::Index dense_limit = 64;

double column_norm(const SparseOp& m)
{
    double best = 0.0;
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
        double sum = 0.0;
        for (SparseOp::InnerIterator it(m, c); it; ++it) sum += std::abs(it.value());
        best = std::max(best, sum);
    }
    return best;
}

// psi <- exp(-i G) psi for a Hermitian G known through its action, with
// ||G|| <= bound. Terms are summed until they drop below double precision.
template <class Action>
void apply_taylor(const Action& generator, double bound, CVector& psi)
{
    const int pieces = std::max(1, static_cast<int>(std::ceil(bound / 0.5)));
    const cplx factor{0.0, -1.0 / pieces};
    for (int p = 0; p < pieces; ++p) {
        CVector term = psi;
        CVector sum = psi;
        const double scale = psi.norm();
        for (int k = 1; k <= 40; ++k) {
            term = (factor / double(k)) * generator(term);
            sum += term;
            if (term.norm() <= 1e-17 * scale) break;
        }
        psi = sum;
    }
}

} // namespace

Propagator::Propagator(HamiltonianFn hamiltonian, Method method)
    : hamiltonian_(std::move(hamiltonian)), method_(method)
{
}

Propagator::Propagator(SparseHamiltonianFn hamiltonian, Method method)
    : sparse_(std::move(hamiltonian)), method_(method)
{
}

void Propagator::step(CVector& psi, double t, double h) const
{
    if (sparse_ || psi.size() > dense_limit)
        step_sparse(psi, t, h);
    else
        step_dense(psi, t, h);
}

void Propagator::step_dense(CVector& psi, double t, double h) const
{
    if (method_ == Method::midpoint_exponential) {
        const CMatrix mid = hamiltonian_(t + 0.5 * h);
        for (const Group& g : components(mid, nullptr)) {
            const CMatrix block = h * gather(mid, g);
            apply_exponential(0.5 * (block + block.adjoint()), g, psi);
        }
        return;
    }
    const double offset = std::sqrt(3.0) / 6.0;
    const CMatrix h1 = hamiltonian_(t + (0.5 - offset) * h);
    const CMatrix h2 = hamiltonian_(t + (0.5 + offset) * h);
    const cplx weight{0.0, std::sqrt(3.0) * h * h / 12.0};
    // The commutator cannot couple different components of the joint pattern.
    for (const Group& g : components(h1, &h2)) {
        const CMatrix a = gather(h1, g);
        const CMatrix b = gather(h2, g);
        const CMatrix generator = 0.5 * h * (a + b) - weight * (b * a - a * b);
        apply_exponential(0.5 * (generator + generator.adjoint()), g, psi);
    }
}

void Propagator::step_sparse(CVector& psi, double t, double h) const
{
    auto at = [&](double s) -> SparseOp {
        if (sparse_) return sparse_(s);
        return hamiltonian_(s).sparseView();
    };
    if (method_ == Method::midpoint_exponential) {
        const SparseOp mid = at(t + 0.5 * h);
        apply_taylor([&](const CVector& v) -> CVector { return h * (mid * v); },
                     h * column_norm(mid), psi);
        return;
    }
    const double offset = std::sqrt(3.0) / 6.0;
    const SparseOp a = at(t + (0.5 - offset) * h);
    const SparseOp b = at(t + (0.5 + offset) * h);
    const cplx weight{0.0, std::sqrt(3.0) * h * h / 12.0};
    const double na = column_norm(a);
    const double nb = column_norm(b);
    apply_taylor(
        [&](const CVector& v) -> CVector {
            const CVector av = a * v;
            const CVector bv = b * v;
            return 0.5 * h * (av + bv) - weight * (b * av - a * bv);
        },
        0.5 * h * (na + nb) + 2.0 * std::abs(weight) * na * nb, psi);
}

void Propagator::advance(CVector& psi, double t0, double t1, double max_dt) const
{
    if (t1 <= t0) return;
    const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / max_dt - 1e-9)));
    const double h = (t1 - t0) / n;
    for (int k = 0; k < n; ++k) step(psi, t0 + k * h, h);
}

TimeSeries propagate(const HamiltonianFn& hamiltonian, const BasisLayout& layout,
                     const CVector& psi0, std::size_t target, const IntegratorConfig& cfg,
                     CVector* final_state)
{
    return propagate(Propagator(hamiltonian, cfg.method), layout, psi0, target, cfg, final_state);
}

TimeSeries propagate(const Propagator& prop, const BasisLayout& layout, const CVector& psi0,
                     std::size_t target, const IntegratorConfig& cfg, CVector* final_state)
{
    if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
    if (static_cast<std::size_t>(psi0.size()) != layout.dimension())
        throw DomainError("initial state dimension does not match basis");
    if (std::abs(psi0.norm() - 1.0) > 1e-9) throw DomainError("initial state is not normalized");

    const int n = cfg.steps();
    const double h = n > 0 ? cfg.t_end / n : 0.0;

    TimeSeries series;
    CVector psi = psi0;
    auto record = [&](double t) {
        const Observables o = observables(psi, layout, target);
        if (o.top_level_population > cfg.truncation_threshold)
            throw TruncationError(t, o.top_level_population);
        series.push(t, o);
    };
    record(0.0);
    for (int k = 0; k < n; ++k) {
        const double t = k * h;
        prop.step(psi, t, h);
        record(k + 1 == n ? cfg.t_end : (k + 1) * h);
    }
    if (final_state) *final_state = psi;
    return series;
}

AdaptiveResult propagate_adaptive(const std::function<Problem(int)>& build, int start,
                                  int n_max_cap, const IntegratorConfig& cfg)
{
    if (start < 1) throw DomainError("starting truncation must be >= 1");
    for (int n_max = start;; n_max *= 2) {
        n_max = std::min(n_max, n_max_cap);
        const Problem problem = build(n_max);
        const Propagator prop = problem.sparse_hamiltonian
                                    ? Propagator(problem.sparse_hamiltonian, cfg.method)
                                    : Propagator(problem.hamiltonian, cfg.method);
        try {
            return {propagate(prop, problem.layout, problem.psi0, problem.target, cfg), n_max};
        } catch (const TruncationError&) {
            if (n_max >= n_max_cap) throw;
        }
    }
}

OracleValues driven_oscillator_oracle(double g1, double omega0, double t)
{
    if (!(omega0 > 0.0)) throw DomainError("omega0 must be positive");
    const double amp = 4.0 * g1 / omega0 * std::sin(0.5 * omega0 * t);
    OracleValues v;
    v.mean_boson = amp * amp;
    v.survival = std::exp(-v.mean_boson);
    return v;
}

} // namespace qftion
