#include "qftion/ion.hpp"

#include "qftion/error.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace qftion {

namespace {

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// |row><col| on the four internal levels (1-based labels).
CMatrix level_op(int row, int col)
{
    CMatrix m = CMatrix::Zero(4, 4);
    m(row - 1, col - 1) = 1.0;
    return m;
}

CMatrix qubit_factor(bool spectator, bool sigma_x)
{
    if (!spectator) return CMatrix::Identity(1, 1);
    CMatrix q = CMatrix::Identity(2, 2);
    if (sigma_x) q << 0.0, 1.0, 1.0, 0.0;
    return q;
}

CMatrix embed(const CMatrix& level, const CMatrix& qubit, const CMatrix& phonon)
{
    return Eigen::kroneckerProduct(level, Eigen::kroneckerProduct(qubit, phonon).eval()).eval();
}

} // namespace

IonBasis::IonBasis(int n_max, bool spectator) : n_max_(n_max), spectator_(spectator)
{
    if (n_max < 0) throw DomainError("n_max must be >= 0");
    if (dimension() > dimension_cap) throw DimensionCapError("ion basis exceeds dimension cap");
}

std::size_t IonBasis::index(int level, int qubit, int n) const
{
    if (level < 1 || level > 4 || qubit < 0 || static_cast<std::size_t>(qubit) >= qubit_states() ||
        n < 0 || n > n_max_)
        throw DomainError("ion state outside basis");
    return ((static_cast<std::size_t>(level - 1) * qubit_states()) + static_cast<std::size_t>(qubit)) *
               levels() +
           static_cast<std::size_t>(n);
}

BasisLayout IonBasis::layout() const
{
    BasisLayout out;
    for (int level = 1; level <= 4; ++level)
        for (std::size_t q = 0; q < qubit_states(); ++q)
            for (int n = 0; n <= n_max_; ++n) {
                out.sector.push_back(static_cast<Sector>(level - 1));
                out.bosons.push_back(n);
                out.top_level.push_back(n == n_max_);
            }
    return out;
}

CMatrix encoding_isometry(const FockBasis& basis)
{
    const IonBasis ion(basis.n_max(), false);
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    CMatrix v = CMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const FockState s = basis.state(i);
        const int level = 1 + s.n_b + 2 * s.n_d;
        v(static_cast<Eigen::Index>(ion.index(level, 0, s.n)), static_cast<Eigen::Index>(i)) = 1.0;
    }
    return v;
}

IonModel::IonModel(FieldScenario scenario, bool spectator_explicit)
    : scenario_(std::move(scenario)), basis_(scenario_.basis.n_max(), spectator_explicit)
{
    scenario_.profile.validate();
    const CMatrix a = boson_annihilator(scenario_.basis.n_max());
    const CMatrix id_q = qubit_factor(spectator_explicit, false);
    red_ = to_sparse(embed(level_op(4, 1), id_q, a));
    blue_ = to_sparse(embed(level_op(1, 4), id_q, a));
    level_ = to_sparse(embed(-(level_op(3, 3) - level_op(2, 2)), id_q, a));
    drive_ = to_sparse(embed(CMatrix::Identity(4, 4), qubit_factor(spectator_explicit, true), a));
}

CMatrix IonModel::hamiltonian(double t) const
{
    const CouplingProfile& p = scenario_.profile;
    const double gt = p.pair_window(t);
    const auto dim = static_cast<Eigen::Index>(basis_.dimension());
    // Each line is Y + Y^dag; accumulate the Y parts.
    CMatrix y = CMatrix::Zero(dim, dim);
    if (gt != 0.0) {
        y += -gt * expi(p.delta * t) * red_;
        if (!scenario_.rotating_only)
            y += -gt * expi(-(2.0 * p.omega0 + p.delta) * t) * blue_;
    }
    if (p.g1 != 0.0) {
        const cplx phase = expi(-p.omega0 * t);
        y += p.g1 * phase * level_;
        if (!scenario_.normal_ordering) y += p.g1 * phase * drive_;
    }
    return y + y.adjoint();
}

CMatrix IonModel::spectator_sigma_x() const
{
    if (!basis_.spectator()) throw DomainError("ion basis has no spectator qubit");
    const auto levels = static_cast<Eigen::Index>(basis_.levels());
    return embed(CMatrix::Identity(4, 4), qubit_factor(true, true), CMatrix::Identity(levels, levels));
}

CMatrix hamiltonian_ion(const FieldScenario& s, double t, bool spectator_explicit)
{
    return IonModel(s, spectator_explicit).hamiltonian(t);
}

CMatrix sideband_generator()
{
    const cplx minus_i{0.0, -1.0};
    return minus_i * (level_op(3, 2) - level_op(2, 3));
}

CMatrix carrier_rotation()
{
    // exp(-i (pi/4) sigma_x) on the (|2>, |3>) pair.
    CMatrix r = CMatrix::Identity(4, 4);
    const double c = std::sqrt(0.5);
    r(1, 1) = c;
    r(2, 2) = c;
    r(1, 2) = cplx{0.0, -c};
    r(2, 1) = cplx{0.0, -c};
    return r;
}

namespace {

// Components of psi along the spectator state (|0> + sign |1>)/sqrt 2 and its complement.
void split_spectator(const IonBasis& explicit_basis, const CVector& psi, int sign, CVector& kept,
                     double& leaked)
{
    const IonBasis implicit_basis(explicit_basis.n_max(), false);
    kept = CVector::Zero(static_cast<Eigen::Index>(implicit_basis.dimension()));
    leaked = 0.0;
    const double c = std::sqrt(0.5);
    for (int level = 1; level <= 4; ++level)
        for (int n = 0; n <= explicit_basis.n_max(); ++n) {
            const cplx z0 = psi(static_cast<Eigen::Index>(explicit_basis.index(level, 0, n)));
            const cplx z1 = psi(static_cast<Eigen::Index>(explicit_basis.index(level, 1, n)));
            kept(static_cast<Eigen::Index>(implicit_basis.index(level, 0, n))) = c * (z0 + double(sign) * z1);
            leaked += std::norm(c * (z0 - double(sign) * z1));
        }
}

} // namespace

SpectatorReport spectator_equivalence(const FieldScenario& s, const std::vector<double>& t_grid,
                                      const FockState& initial, int sign, double max_dt,
                                      Method method)
{
    if (sign != 1 && sign != -1) throw DomainError("spectator sign must be +1 or -1");
    SpectatorReport report;
    report.sign = sign;

    const IonModel explicit_model(s, true);
    const IonModel implicit_model(s, false);
    const IonBasis& xb = explicit_model.basis();
    const IonBasis& ib = implicit_model.basis();
    const BasisLayout layout = ib.layout();

    // With sign -1 the reference is the f <-> fbar relabelled problem.
    const FockState reference_initial =
        sign > 0 ? initial : FockState{initial.n_d, initial.n_b, initial.n};
    const CMatrix v = encoding_isometry(s.basis);
    const CVector psi_field = s.basis.basis_vector(initial);
    const CVector psi_ion = v * psi_field;
    CVector ref = v * s.basis.basis_vector(reference_initial);

    CVector psi = CVector::Zero(static_cast<Eigen::Index>(xb.dimension()));
    const double c = std::sqrt(0.5);
    for (int level = 1; level <= 4; ++level)
        for (int n = 0; n <= xb.n_max(); ++n) {
            const cplx z = psi_ion(static_cast<Eigen::Index>(ib.index(level, 0, n)));
            psi(static_cast<Eigen::Index>(xb.index(level, 0, n))) = c * z;
            psi(static_cast<Eigen::Index>(xb.index(level, 1, n))) = double(sign) * c * z;
        }

    auto target_of = [&](const FockState& st) {
        return ib.index(1 + st.n_b + 2 * st.n_d, 0, st.n);
    };
    const std::size_t target = target_of(initial);
    const std::size_t ref_target = target_of(reference_initial);

    const CMatrix sx = explicit_model.spectator_sigma_x();
    report.exact_commutation = true;
    const Propagator explicit_prop([&](double t) { return explicit_model.hamiltonian(t); }, method);
    const Propagator implicit_prop([&](double t) { return implicit_model.hamiltonian(t); }, method);

    double t_prev = 0.0;
    for (double t : t_grid) {
        if (t < t_prev) throw DomainError("t_grid must be non-decreasing and start at t >= 0");
        explicit_prop.advance(psi, t_prev, t, max_dt);
        implicit_prop.advance(ref, t_prev, t, max_dt);
        t_prev = t;

        const CMatrix h = explicit_model.hamiltonian(t);
        if ((h * sx - sx * h).cwiseAbs().maxCoeff() != 0.0) report.exact_commutation = false;

        CVector kept;
        double leaked = 0.0;
        split_spectator(xb, psi, sign, kept, leaked);
        report.max_leakage = std::max(report.max_leakage, leaked);

        Observables a = observables(kept, layout, target);
        const Observables b = observables(ref, layout, ref_target);
        if (sign < 0) std::swap(a.populations[1], a.populations[2]);
        double d = std::max(std::abs(a.survival - b.survival), std::abs(a.mean_boson - b.mean_boson));
        for (std::size_t k = 0; k < 4; ++k)
            d = std::max(d, std::abs(a.populations[k] - b.populations[k]));
        report.max_discrepancy = std::max(report.max_discrepancy, d);
    }

    if (report.max_leakage > 1e-12)
        throw EncodingError("spectator left its sigma_x eigenspace: leakage " +
                            std::to_string(report.max_leakage));
    report.pass = report.exact_commutation && report.max_discrepancy < 1e-8;
    report.annotation = sign > 0 ? "sigma_x = +1: identity drive reproduced"
                                 : "sigma_x = -1: drive sign flipped; matched under f <-> fbar relabelling";
    return report;
}

} // namespace qftion
