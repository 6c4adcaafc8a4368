#pragma once

// Truncated Fock spaces: the three-mode basis (fermion, antifermion, boson)
// and the general many-mode product basis.

#include "qftion/modes.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace qftion {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseOp = Eigen::SparseMatrix<std::complex<double>>;

// Sparse copy of a dense operator, used for fast repeated assembly.
SparseOp to_sparse(const CMatrix& m);

// Largest total dimension any basis may have.
inline constexpr std::size_t dimension_cap = std::size_t{1} << 16;

// Fermionic sector of a basis state, used for population bookkeeping.
enum class Sector : std::uint8_t { vac = 0, f = 1, fbar = 2, pair = 3 };

// Per-index classification that observables need, independent of how a
// particular basis orders its states.
struct BasisLayout {
    std::vector<Sector> sector;
    std::vector<int> bosons;     // total boson number
    std::vector<bool> top_level; // some boson mode sits at its truncation level

    std::size_t dimension() const noexcept { return sector.size(); }
};

struct FockState {
    int n_b = 0; // fermion occupation
    int n_d = 0; // antifermion occupation
    int n = 0;   // boson number

    friend bool operator==(const FockState&, const FockState&) = default;
};

// Ordering: index = ((n_b * 2) + n_d) * (n_max + 1) + n.
class FockBasis {
public:
    explicit FockBasis(int n_max);

    int n_max() const noexcept { return n_max_; }
    std::size_t dimension() const noexcept { return 4 * levels(); }
    std::size_t levels() const noexcept { return static_cast<std::size_t>(n_max_) + 1; }

    std::size_t index(const FockState& s) const;
    FockState state(std::size_t index) const;
    BasisLayout layout() const;

    // Unit vector of a basis state.
    CVector basis_vector(const FockState& s) const;

private:
    int n_max_;
};

FockBasis build_basis(int n_max);

struct LadderOperators {
    CMatrix a, a_dag;
    CMatrix b_in, b_in_dag;
    CMatrix d_in, d_in_dag;
};

// Jordan-Wigner ladder operators on the product basis: b^dag = I x sigma+,
// d^dag = sigma+ x sigma_z (sigma_z = +1 on an occupied fermion mode), each
// tensored with the boson identity; a is the truncated annihilator.
LadderOperators ladder_operators(const FockBasis& basis);

// Fermion-number parity (1 - 2 b^dag b)(1 - 2 d^dag d).
CMatrix parity_operator(const FockBasis& basis);

// Truncated boson annihilator on levels 0..n_max.
CMatrix boson_annihilator(int n_max);

// Dimension (2 * phonons_per_ion)^n_ions of a register of two-level ions each
// with its own phonon ladder. Empty when the value exceeds 2^63.
std::optional<std::uint64_t> manymode_dimension(int n_ions, int phonons_per_ion);

// Product basis of n_f fermionic modes (mode 0 most significant, occupations
// 0/1) followed by n_b truncated boson modes.
class MultimodeBasis {
public:
    MultimodeBasis(std::vector<Species> fermion_species, std::vector<int> boson_n_max);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t fermion_modes() const noexcept { return species_.size(); }
    std::size_t boson_modes() const noexcept { return boson_n_max_.size(); }
    const std::vector<Species>& species() const noexcept { return species_; }
    const std::vector<int>& boson_n_max() const noexcept { return boson_n_max_; }

    std::size_t index(const std::vector<int>& occupations, const std::vector<int>& bosons) const;
    void decode(std::size_t index, std::vector<int>& occupations, std::vector<int>& bosons) const;

    // c_j with the Jordan-Wigner string prod_{m<j} sigma_z^(m), sigma_z = 2 n_m - 1.
    CMatrix fermion_annihilator(std::size_t mode) const;
    CMatrix boson_annihilator(std::size_t mode) const;

    // Sector: vac if no mode occupied, f if only fermion-species modes are,
    // fbar if only antifermion-species modes are, pair otherwise.
    BasisLayout layout() const;

private:
    std::vector<Species> species_;
    std::vector<int> boson_n_max_;
    std::size_t boson_block_ = 1;
    std::size_t dimension_ = 0;
};

} // namespace qftion
