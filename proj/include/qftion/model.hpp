#pragma once

// Time-dependent interaction-picture Hamiltonians: the reduced three-mode
// model and its many-mode generalization.

#include "qftion/fock.hpp"
#include "qftion/modes.hpp"

#include <string>
#include <vector>

namespace qftion {

struct FieldScenario {
    CouplingProfile profile;
    FockBasis basis{8};
    // Drop the counter-rotating d b a pair monomial (and its conjugate).
    bool rotating_only = false;
    // Replace d d^dag by -d^dag d in the self-interaction.
    bool normal_ordering = false;
};

// One monomial of the three-mode Hamiltonian: coefficient(t) * op.
struct Vertex {
    enum class Kind { self, pair, pair_counter };

    std::string label;
    Kind kind;
    bool conjugate; // the Hermitian-conjugate partner
    CMatrix op;

    cplx coefficient(const CouplingProfile& p, double t) const;
};

// Precomputed operator content of a FieldScenario.
class FieldModel {
public:
    explicit FieldModel(FieldScenario scenario);

    const FieldScenario& scenario() const noexcept { return scenario_; }
    const LadderOperators& ladders() const noexcept { return ladders_; }
    // The eight monomials: four forward terms followed by their conjugates.
    // With rotating_only the counter-rotating pair is omitted.
    const std::vector<Vertex>& vertices() const noexcept { return vertices_; }

    // H(t) = X(t) + X(t)^dag with X the forward monomials.
    CMatrix hamiltonian(double t) const;

private:
    FieldScenario scenario_;
    LadderOperators ladders_;
    std::vector<Vertex> vertices_;
    std::vector<SparseOp> forward_ops_;
};

CMatrix hamiltonian_field(const FieldScenario& s, double t);

struct BosonMode {
    double k = 0.0;
    double omega = 1.0;
    int n_max = 8;
};

struct MultimodeScenario {
    std::vector<WavePacket> packets;
    std::vector<BosonMode> bosons;
    double bare_g = 0.0;

    MultimodeBasis basis() const;
};

class MultimodeModel {
public:
    explicit MultimodeModel(MultimodeScenario scenario);

    const MultimodeScenario& scenario() const noexcept { return scenario_; }
    const MultimodeBasis& basis() const noexcept { return basis_; }

    // theta_i = b_i for fermion packets and d_i^dag for antifermion packets.
    const CMatrix& theta(std::size_t i) const { return theta_.at(i); }
    const CMatrix& boson(std::size_t l) const { return boson_.at(l); }
    CMatrix parity() const;

    CMatrix hamiltonian(double t) const;
    SparseOp sparse_hamiltonian(double t) const;

private:
    MultimodeScenario scenario_;
    MultimodeBasis basis_;
    std::vector<CMatrix> theta_;
    std::vector<CMatrix> boson_;
    // theta_i^dag theta_j a_l, flattened as (l * n_f + i) * n_f + j, stored as
    // (slot, value) pairs into the shared pattern of H, once for the product
    // and once for its conjugate.
    struct Scatter {
        std::vector<std::pair<Eigen::Index, cplx>> forward, conjugate;
    };
    std::vector<Scatter> products_;
    SparseOp pattern_;
};

CMatrix hamiltonian_multimode(const MultimodeScenario& s, double t);

} // namespace qftion
