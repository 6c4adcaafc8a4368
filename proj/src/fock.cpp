#include "qftion/fock.hpp"

#include "qftion/error.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <limits>
#include <string>

namespace qftion {

namespace {

// Fermionic factor index 2 n_b + n_d.
constexpr int fermion_index(int n_b, int n_d) { return 2 * n_b + n_d; }

CMatrix fermion_b_dag()
{
    CMatrix m = CMatrix::Zero(4, 4);
    for (int n_d = 0; n_d < 2; ++n_d) m(fermion_index(1, n_d), fermion_index(0, n_d)) = 1.0;
    return m;
}

CMatrix fermion_d_dag()
{
    CMatrix m = CMatrix::Zero(4, 4);
    for (int n_b = 0; n_b < 2; ++n_b)
        m(fermion_index(n_b, 1), fermion_index(n_b, 0)) = static_cast<double>(2 * n_b - 1);
    return m;
}

} // namespace

FockBasis::FockBasis(int n_max) : n_max_(n_max)
{
    if (n_max < 0) throw DomainError("n_max must be >= 0");
    if (4 * (static_cast<std::size_t>(n_max) + 1) > dimension_cap)
        throw DimensionCapError("Fock basis dimension exceeds cap of 2^16");
}

std::size_t FockBasis::index(const FockState& s) const
{
    if (s.n_b < 0 || s.n_b > 1 || s.n_d < 0 || s.n_d > 1 || s.n < 0 || s.n > n_max_)
        throw DomainError("Fock state outside the truncated basis");
    return static_cast<std::size_t>(fermion_index(s.n_b, s.n_d)) * levels() +
           static_cast<std::size_t>(s.n);
}

FockState FockBasis::state(std::size_t index) const
{
    if (index >= dimension()) throw DomainError("basis index out of range");
    const auto f = static_cast<int>(index / levels());
    return {f / 2, f % 2, static_cast<int>(index % levels())};
}

BasisLayout FockBasis::layout() const
{
    BasisLayout out;
    for (std::size_t i = 0; i < dimension(); ++i) {
        const FockState s = state(i);
        out.sector.push_back(static_cast<Sector>(s.n_b + 2 * s.n_d));
        out.bosons.push_back(s.n);
        out.top_level.push_back(s.n == n_max_);
    }
    return out;
}

CVector FockBasis::basis_vector(const FockState& s) const
{
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dimension()));
    v(static_cast<Eigen::Index>(index(s))) = 1.0;
    return v;
}

SparseOp to_sparse(const CMatrix& m) { return m.sparseView(); }

FockBasis build_basis(int n_max) { return FockBasis(n_max); }

CMatrix boson_annihilator(int n_max)
{
    CMatrix a = CMatrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

LadderOperators ladder_operators(const FockBasis& basis)
{
    const auto levels = static_cast<Eigen::Index>(basis.levels());
    const CMatrix boson_id = CMatrix::Identity(levels, levels);
    const CMatrix fermion_id = CMatrix::Identity(4, 4);

    LadderOperators ops;
    ops.a = Eigen::kroneckerProduct(fermion_id, boson_annihilator(basis.n_max()));
    ops.a_dag = ops.a.adjoint();
    ops.b_in_dag = Eigen::kroneckerProduct(fermion_b_dag(), boson_id);
    ops.b_in = ops.b_in_dag.adjoint();
    ops.d_in_dag = Eigen::kroneckerProduct(fermion_d_dag(), boson_id);
    ops.d_in = ops.d_in_dag.adjoint();
    return ops;
}

CMatrix parity_operator(const FockBasis& basis)
{
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    CMatrix p = CMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const FockState s = basis.state(static_cast<std::size_t>(i));
        p(i, i) = ((s.n_b + s.n_d) % 2 == 0) ? 1.0 : -1.0;
    }
    return p;
}

std::optional<std::uint64_t> manymode_dimension(int n_ions, int phonons_per_ion)
{
    if (n_ions < 1 || phonons_per_ion < 1)
        throw DomainError("manymode_dimension needs n_ions >= 1 and phonons_per_ion >= 1");
    constexpr std::uint64_t limit = std::uint64_t{1} << 63;
    const std::uint64_t per_ion = 2 * static_cast<std::uint64_t>(phonons_per_ion);
    std::uint64_t result = 1;
    for (int i = 0; i < n_ions; ++i) {
        if (result > limit / per_ion) return std::nullopt;
        result *= per_ion;
    }
    return result;
}

MultimodeBasis::MultimodeBasis(std::vector<Species> fermion_species, std::vector<int> boson_n_max)
    : species_(std::move(fermion_species)), boson_n_max_(std::move(boson_n_max))
{
    if (species_.empty()) throw DomainError("multimode basis needs at least one fermionic mode");
    if (boson_n_max_.empty()) throw DomainError("multimode basis needs at least one boson mode");
    if (species_.size() > 16) throw DimensionCapError("too many fermionic modes");

    double total = std::ldexp(1.0, static_cast<int>(species_.size()));
    for (int n : boson_n_max_) {
        if (n < 0) throw DomainError("boson truncation must be >= 0");
        boson_block_ *= static_cast<std::size_t>(n) + 1;
        total *= n + 1.0;
    }
    if (total > static_cast<double>(dimension_cap))
        throw DimensionCapError("multimode dimension " + std::to_string(total) +
                                " exceeds cap of 2^16");
    dimension_ = (std::size_t{1} << species_.size()) * boson_block_;
}

std::size_t MultimodeBasis::index(const std::vector<int>& occupations,
                                  const std::vector<int>& bosons) const
{
    if (occupations.size() != species_.size() || bosons.size() != boson_n_max_.size())
        throw DomainError("multimode state has the wrong number of modes");
    std::size_t f = 0;
    for (int occ : occupations) {
        if (occ != 0 && occ != 1) throw DomainError("fermion occupation must be 0 or 1");
        f = 2 * f + static_cast<std::size_t>(occ);
    }
    std::size_t b = 0;
    for (std::size_t l = 0; l < bosons.size(); ++l) {
        if (bosons[l] < 0 || bosons[l] > boson_n_max_[l])
            throw DomainError("boson number outside truncation");
        b = b * (static_cast<std::size_t>(boson_n_max_[l]) + 1) + static_cast<std::size_t>(bosons[l]);
    }
    return f * boson_block_ + b;
}

void MultimodeBasis::decode(std::size_t index, std::vector<int>& occupations,
                            std::vector<int>& bosons) const
{
    if (index >= dimension_) throw DomainError("basis index out of range");
    std::size_t f = index / boson_block_;
    std::size_t b = index % boson_block_;
    occupations.assign(species_.size(), 0);
    bosons.assign(boson_n_max_.size(), 0);
    for (std::size_t m = species_.size(); m-- > 0;) {
        occupations[m] = static_cast<int>(f % 2);
        f /= 2;
    }
    for (std::size_t l = boson_n_max_.size(); l-- > 0;) {
        const auto levels = static_cast<std::size_t>(boson_n_max_[l]) + 1;
        bosons[l] = static_cast<int>(b % levels);
        b /= levels;
    }
}

CMatrix MultimodeBasis::fermion_annihilator(std::size_t mode) const
{
    if (mode >= species_.size()) throw DomainError("fermion mode out of range");
    const auto dim = static_cast<Eigen::Index>(dimension_);
    CMatrix c = CMatrix::Zero(dim, dim);
    std::vector<int> occ, bos;
    for (std::size_t col = 0; col < dimension_; ++col) {
        decode(col, occ, bos);
        if (occ[mode] == 0) continue;
        double sign = 1.0;
        for (std::size_t m = 0; m < mode; ++m) sign *= 2.0 * occ[m] - 1.0;
        occ[mode] = 0;
        c(static_cast<Eigen::Index>(index(occ, bos)), static_cast<Eigen::Index>(col)) = sign;
    }
    return c;
}

CMatrix MultimodeBasis::boson_annihilator(std::size_t mode) const
{
    if (mode >= boson_n_max_.size()) throw DomainError("boson mode out of range");
    const auto dim = static_cast<Eigen::Index>(dimension_);
    CMatrix a = CMatrix::Zero(dim, dim);
    std::vector<int> occ, bos;
    for (std::size_t col = 0; col < dimension_; ++col) {
        decode(col, occ, bos);
        const int n = bos[mode];
        if (n == 0) continue;
        bos[mode] = n - 1;
        a(static_cast<Eigen::Index>(index(occ, bos)), static_cast<Eigen::Index>(col)) =
            std::sqrt(static_cast<double>(n));
    }
    return a;
}

BasisLayout MultimodeBasis::layout() const
{
    BasisLayout out;
    std::vector<int> occ, bos;
    for (std::size_t i = 0; i < dimension_; ++i) {
        decode(i, occ, bos);
        bool any_f = false, any_fbar = false;
        for (std::size_t m = 0; m < occ.size(); ++m) {
            if (!occ[m]) continue;
            (species_[m] == Species::fermion ? any_f : any_fbar) = true;
        }
        out.sector.push_back(static_cast<Sector>((any_f ? 1 : 0) + (any_fbar ? 2 : 0)));
        int total = 0;
        bool top = false;
        for (std::size_t l = 0; l < bos.size(); ++l) {
            total += bos[l];
            top = top || bos[l] == boson_n_max_[l];
        }
        out.bosons.push_back(total);
        out.top_level.push_back(top);
    }
    return out;
}

} // namespace qftion
