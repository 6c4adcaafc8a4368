#pragma once

// Trapped-ion encoding of the three-mode model: four internal levels of the
// first ion carry the fermion/antifermion occupations, the centre-of-mass
// phonon carries the boson, and an optional second ion (the spectator qubit)
// realizes the identity-proportional displacement through sigma_x.

#include "qftion/evolve.hpp"
#include "qftion/model.hpp"

#include <string>
#include <vector>

namespace qftion {

// Levels |1>..|4> are stored as 0..3. Ordering: ((level * q) + qubit) * (n_max + 1) + n
// with q = 2 when the spectator qubit is present and 1 otherwise.
class IonBasis {
public:
    IonBasis(int n_max, bool spectator);

    int n_max() const noexcept { return n_max_; }
    bool spectator() const noexcept { return spectator_; }
    std::size_t levels() const noexcept { return static_cast<std::size_t>(n_max_) + 1; }
    std::size_t qubit_states() const noexcept { return spectator_ ? 2 : 1; }
    std::size_t dimension() const noexcept { return 4 * qubit_states() * levels(); }

    // level in 1..4, qubit in {0,1} (must be 0 without spectator).
    std::size_t index(int level, int qubit, int n) const;
    // Sector by level: |1> vac, |2> f, |3> fbar, |4> pair.
    BasisLayout layout() const;

private:
    int n_max_;
    bool spectator_;
};

// Permutation V taking field basis state (n_b, n_d, n) to ion level
// |1 + n_b + 2 n_d> with the same phonon number. Since d^dag|0> = -e(0,1) and
// b^dag d^dag|0> = -e(1,1) in the field basis, V maps the physical states
// |0> -> |1>, |f> -> |2>, |fbar> -> -|3>, |f fbar> -> -|4>.
CMatrix encoding_isometry(const FockBasis& basis);

// Four-line ion Hamiltonian: detuned red sideband on |4>-|1>, detuned blue
// sideband on the same pair, the level-conditioned drive on |2>,|3>, and the
// identity drive (g1 sigma_x on the spectator when spectator_explicit).
CMatrix hamiltonian_ion(const FieldScenario& s, double t, bool spectator_explicit);

// Precomputed form for repeated evaluation.
class IonModel {
public:
    IonModel(FieldScenario scenario, bool spectator_explicit);

    const IonBasis& basis() const noexcept { return basis_; }
    CMatrix hamiltonian(double t) const;
    // sigma_x on the spectator qubit (identity elsewhere). Requires spectator.
    CMatrix spectator_sigma_x() const;

private:
    FieldScenario scenario_;
    IonBasis basis_;
    SparseOp red_;   // |4><1| a
    SparseOp blue_;  // |1><4| a
    SparseOp level_; // -(|3><3| - |2><2|) a
    SparseOp drive_; // I a, or sigma_x a with the spectator
};

// Generator (|3><2| - |2><3|)/i produced on |2>,|3> by the red and blue sidebands.
CMatrix sideband_generator();
// Carrier rotation on |2>,|3> taking the sideband generator to |3><3| - |2><2|.
CMatrix carrier_rotation();

struct SpectatorReport {
    bool pass = false;
    int sign = 1;
    double max_discrepancy = 0.0; // over sector populations, survival and <a^dag a>
    double max_leakage = 0.0;     // population outside the prepared sigma_x eigenspace
    bool exact_commutation = false;
    std::string annotation;
};

// Evolves V psi0 (x) |sigma_x = sign> under the spectator-explicit Hamiltonian
// and psi0 under the implicit one, comparing phase-free observables on t_grid.
// With sign = -1 the displacement flips; the implicit reference then runs the
// f <-> fbar relabelled problem, to which the flipped one is unitarily equivalent.
// Throws EncodingError when leakage exceeds 1e-12.
SpectatorReport spectator_equivalence(const FieldScenario& s, const std::vector<double>& t_grid,
                                      const FockState& initial, int sign = 1,
                                      double max_dt = 2.0 * std::numbers::pi / 1000.0,
                                      Method method = Method::magnus4);

} // namespace qftion
