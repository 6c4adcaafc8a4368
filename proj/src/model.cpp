#include "qftion/model.hpp"

#include "qftion/error.hpp"

#include <algorithm>
#include <cmath>

namespace qftion {

namespace {

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

} // namespace

cplx Vertex::coefficient(const CouplingProfile& p, double t) const
{
    cplx c;
    switch (kind) {
    case Kind::self:
        c = p.g1 * expi(-p.omega0 * t);
        break;
    case Kind::pair:
        c = p.pair_window(t) * expi(p.delta * t);
        break;
    case Kind::pair_counter:
        c = p.pair_window(t) * expi(-(2.0 * p.omega0 + p.delta) * t);
        break;
    }
    return conjugate ? std::conj(c) : c;
}

FieldModel::FieldModel(FieldScenario scenario)
    : scenario_(std::move(scenario)), ladders_(ladder_operators(scenario_.basis))
{
    scenario_.profile.validate();
    const auto& L = ladders_;
    const CMatrix dd = scenario_.normal_ordering ? CMatrix(-(L.d_in_dag * L.d_in))
                                                 : CMatrix(L.d_in * L.d_in_dag);

    std::vector<Vertex> forward;
    forward.push_back({"b+ b a", Vertex::Kind::self, false, L.b_in_dag * L.b_in * L.a});
    forward.push_back({scenario_.normal_ordering ? "-d+ d a" : "d d+ a", Vertex::Kind::self,
                       false, dd * L.a});
    forward.push_back({"b+ d+ a", Vertex::Kind::pair, false, L.b_in_dag * L.d_in_dag * L.a});
    if (!scenario_.rotating_only)
        forward.push_back({"d b a", Vertex::Kind::pair_counter, false, L.d_in * L.b_in * L.a});

    vertices_ = forward;
    for (const Vertex& v : forward) forward_ops_.push_back(to_sparse(v.op));
    for (const Vertex& v : forward)
        vertices_.push_back({"(" + v.label + ")+", v.kind, true, v.op.adjoint()});
}

CMatrix FieldModel::hamiltonian(double t) const
{
    const auto dim = static_cast<Eigen::Index>(scenario_.basis.dimension());
    CMatrix x = CMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < forward_ops_.size(); ++k) {
        const cplx c = vertices_[k].coefficient(scenario_.profile, t);
        if (c != cplx{}) x += c * forward_ops_[k];
    }
    return x + x.adjoint();
}

CMatrix hamiltonian_field(const FieldScenario& s, double t) { return FieldModel(s).hamiltonian(t); }

MultimodeBasis MultimodeScenario::basis() const
{
    std::vector<Species> species;
    for (const auto& p : packets) species.push_back(p.species());
    std::vector<int> n_max;
    for (const auto& b : bosons) n_max.push_back(b.n_max);
    return MultimodeBasis(std::move(species), std::move(n_max));
}

MultimodeModel::MultimodeModel(MultimodeScenario scenario)
    : scenario_(std::move(scenario)), basis_(scenario_.basis())
{
    if (!std::isfinite(scenario_.bare_g)) throw ValidationError("bare coupling must be finite");
    for (const auto& b : scenario_.bosons)
        if (!(b.omega > 0.0)) throw ValidationError("boson frequencies must be positive");

    const std::size_t nf = basis_.fermion_modes();
    for (std::size_t i = 0; i < nf; ++i) {
        CMatrix c = basis_.fermion_annihilator(i);
        theta_.push_back(scenario_.packets[i].species() == Species::fermion ? c
                                                                            : CMatrix(c.adjoint()));
    }
    for (std::size_t l = 0; l < basis_.boson_modes(); ++l)
        boson_.push_back(basis_.boson_annihilator(l));
    std::vector<SparseOp> ops;
    for (std::size_t l = 0; l < boson_.size(); ++l)
        for (std::size_t i = 0; i < nf; ++i)
            for (std::size_t j = 0; j < nf; ++j)
                ops.push_back(to_sparse(theta_[i].adjoint() * theta_[j] * boson_[l]));

    const auto dim = static_cast<Eigen::Index>(basis_.dimension());
    std::vector<Eigen::Triplet<cplx>> entries;
    for (const SparseOp& op : ops)
        for (Eigen::Index c = 0; c < op.outerSize(); ++c)
            for (SparseOp::InnerIterator it(op, c); it; ++it) {
                entries.emplace_back(it.row(), it.col(), cplx{1.0});
                entries.emplace_back(it.col(), it.row(), cplx{1.0});
            }
    pattern_.resize(dim, dim);
    pattern_.setFromTriplets(entries.begin(), entries.end());
    pattern_.makeCompressed();

    auto slot = [&](Eigen::Index r, Eigen::Index c) {
        const auto* begin = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[c];
        const auto* end = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[c + 1];
        return static_cast<Eigen::Index>(std::lower_bound(begin, end, static_cast<SparseOp::StorageIndex>(r)) - pattern_.innerIndexPtr());
    };
    for (const SparseOp& op : ops) {
        Scatter s;
        for (Eigen::Index c = 0; c < op.outerSize(); ++c)
            for (SparseOp::InnerIterator it(op, c); it; ++it) {
                s.forward.emplace_back(slot(it.row(), it.col()), it.value());
                s.conjugate.emplace_back(slot(it.col(), it.row()), std::conj(it.value()));
            }
        products_.push_back(std::move(s));
    }
}

CMatrix MultimodeModel::parity() const
{
    const auto dim = static_cast<Eigen::Index>(basis_.dimension());
    CMatrix p = CMatrix::Identity(dim, dim);
    for (std::size_t m = 0; m < basis_.fermion_modes(); ++m) {
        const CMatrix c = basis_.fermion_annihilator(m);
        p = p * (CMatrix::Identity(dim, dim) - 2.0 * c.adjoint() * c);
    }
    return p;
}

CMatrix MultimodeModel::hamiltonian(double t) const { return CMatrix(sparse_hamiltonian(t)); }

SparseOp MultimodeModel::sparse_hamiltonian(double t) const
{
    SparseOp x = pattern_;
    cplx* values = x.valuePtr();
    std::fill(values, values + x.nonZeros(), cplx{});
    const std::size_t nf = basis_.fermion_modes();
    const auto& packets = scenario_.packets;
    for (std::size_t l = 0; l < scenario_.bosons.size(); ++l) {
        const BosonMode& mode = scenario_.bosons[l];
        for (std::size_t i = 0; i < nf; ++i)
            for (std::size_t j = 0; j < nf; ++j) {
                const cplx f = coupling_functional(packets[i], packets[j], mode.k, mode.omega,
                                                   scenario_.bare_g, t);
                if (f == cplx{}) continue;
                const Scatter& s = products_[(l * nf + i) * nf + j];
                for (const auto& [k, v] : s.forward) values[k] += f * v;
                for (const auto& [k, v] : s.conjugate) values[k] += std::conj(f) * v;
            }
    }
    return x;
}

CMatrix hamiltonian_multimode(const MultimodeScenario& s, double t)
{
    return MultimodeModel(s).hamiltonian(t);
}

} // namespace qftion
