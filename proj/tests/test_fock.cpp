#include "qftion/error.hpp"
#include "qftion/fock.hpp"

#include <doctest.h>

#include <random>

using namespace qftion;

namespace {

CMatrix anticomm(const CMatrix& x, const CMatrix& y) { return x * y + y * x; }
CMatrix comm(const CMatrix& x, const CMatrix& y) { return x * y - y * x; }

bool exactly(const CMatrix& x, const CMatrix& y) { return (x - y).cwiseAbs().maxCoeff() == 0.0; }

} // namespace

TEST_CASE("basis dimensions and ordering") {
    CHECK(build_basis(0).dimension() == 4);
    CHECK(build_basis(5).dimension() == 24);
    const FockBasis b(5);
    CHECK(b.index({1, 1, 2}) == 20);
    CHECK(b.index({0, 0, 0}) == 0);
    for (std::size_t i = 0; i < b.dimension(); ++i) CHECK(b.index(b.state(i)) == i);
    CHECK_THROWS(b.index({0, 0, 6}));
    CHECK_THROWS(b.index({2, 0, 0}));
    CHECK_THROWS(FockBasis(-1));

    const BasisLayout l = b.layout();
    CHECK(l.sector[b.index({0, 0, 3})] == Sector::vac);
    CHECK(l.sector[b.index({1, 0, 3})] == Sector::f);
    CHECK(l.sector[b.index({0, 1, 3})] == Sector::fbar);
    CHECK(l.sector[b.index({1, 1, 3})] == Sector::pair);
    CHECK(l.bosons[b.index({1, 1, 3})] == 3);
    CHECK(l.top_level[b.index({0, 1, 5})]);
    CHECK_FALSE(l.top_level[b.index({0, 1, 4})]);
}

TEST_CASE("ladder operator algebra is exact") {
    for (int n_max : {0, 1, 4}) {
        const FockBasis basis(n_max);
        const LadderOperators L = ladder_operators(basis);
        const CMatrix id = CMatrix::Identity(basis.dimension(), basis.dimension());
        const CMatrix zero = CMatrix::Zero(basis.dimension(), basis.dimension());

        CHECK(exactly(anticomm(L.b_in, L.b_in_dag), id));
        CHECK(exactly(anticomm(L.d_in, L.d_in_dag), id));
        CHECK(exactly(anticomm(L.b_in, L.d_in), zero));
        CHECK(exactly(anticomm(L.b_in, L.d_in_dag), zero));
        CHECK(exactly(anticomm(L.b_in_dag, L.d_in_dag), zero));
        CHECK(exactly(L.b_in * L.b_in, zero));
        CHECK(exactly(comm(L.a, L.b_in), zero));
        CHECK(exactly(comm(L.a, L.d_in_dag), zero));
        CHECK(exactly(L.a_dag, L.a.adjoint()));
        CHECK(exactly(L.b_in_dag, L.b_in.adjoint()));
        CHECK(exactly(L.d_in_dag, L.d_in.adjoint()));

        const CMatrix number = L.a_dag * L.a;
        for (std::size_t i = 0; i < basis.dimension(); ++i) {
            CHECK(std::abs(number(i, i) - cplx(basis.state(i).n, 0.0)) < 1e-14);
        }
        CHECK(exactly(CMatrix(number.diagonal().asDiagonal()), number));

        const CMatrix P = parity_operator(basis);
        CHECK(exactly(comm(P, L.b_in_dag * L.b_in), zero));
        CHECK(exactly(comm(P, L.d_in_dag * L.d_in), zero));
        CHECK(exactly(anticomm(P, L.b_in), zero));
        CHECK(exactly(anticomm(P, L.d_in), zero));
        CHECK(exactly(P * P, id));
    }
}

TEST_CASE("pair state sign") {
    const FockBasis basis(2);
    const LadderOperators L = ladder_operators(basis);
    const CVector vac = basis.basis_vector({0, 0, 0});
    const CVector pair = L.b_in_dag * L.d_in_dag * vac;
    CHECK(pair == -basis.basis_vector({1, 1, 0}));
    CHECK(L.b_in_dag * vac == basis.basis_vector({1, 0, 0}));
    CHECK(L.d_in_dag * vac == -basis.basis_vector({0, 1, 0}));
}

TEST_CASE("boson annihilator") {
    const CMatrix a = boson_annihilator(3);
    CHECK(a.rows() == 4);
    CHECK(a(0, 1) == cplx(1.0, 0.0));
    CHECK(a(1, 2) == cplx(std::sqrt(2.0), 0.0));
    CHECK(a(2, 3) == cplx(std::sqrt(3.0), 0.0));
    CHECK(a.cwiseAbs().sum() == doctest::Approx(1.0 + std::sqrt(2.0) + std::sqrt(3.0)));
}

TEST_CASE("many-mode dimension") {
    CHECK(manymode_dimension(10, 5).value() == 10000000000ULL);
    CHECK(manymode_dimension(1, 1).value() == 2);
    CHECK(manymode_dimension(2, 3).value() == 36);
    CHECK(manymode_dimension(63, 1).value() == (std::uint64_t{1} << 63));
    CHECK_FALSE(manymode_dimension(64, 1).has_value());
    CHECK_FALSE(manymode_dimension(40, 5).has_value());
    CHECK_THROWS_AS(manymode_dimension(0, 5), DomainError);
    CHECK_THROWS_AS(manymode_dimension(3, 0), DomainError);
}

TEST_CASE("many-mode basis algebra") {
    const MultimodeBasis basis({Species::fermion, Species::antifermion, Species::fermion}, {2, 1});
    CHECK(basis.dimension() == 8 * 3 * 2);
    const std::size_t d = basis.dimension();
    const CMatrix id = CMatrix::Identity(d, d);
    const CMatrix zero = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const CMatrix ci = basis.fermion_annihilator(i);
            const CMatrix cj = basis.fermion_annihilator(j);
            CHECK(exactly(anticomm(ci, cj.adjoint()), i == j ? id : zero));
            CHECK(exactly(anticomm(ci, cj), zero));
        }
        for (std::size_t l = 0; l < 2; ++l) {
            CHECK(exactly(comm(basis.fermion_annihilator(i), basis.boson_annihilator(l)), zero));
        }
    }
    CHECK(exactly(comm(basis.boson_annihilator(0), basis.boson_annihilator(1)), zero));

    std::vector<int> occ, bos;
    for (std::size_t k = 0; k < d; ++k) {
        basis.decode(k, occ, bos);
        CHECK(basis.index(occ, bos) == k);
    }
    CHECK(basis.index({1, 0, 0}, {0, 0}) == 4 * 6);

    const BasisLayout l = basis.layout();
    CHECK(l.sector[basis.index({0, 0, 0}, {1, 0})] == Sector::vac);
    CHECK(l.sector[basis.index({1, 0, 1}, {0, 0})] == Sector::f);
    CHECK(l.sector[basis.index({0, 1, 0}, {0, 0})] == Sector::fbar);
    CHECK(l.sector[basis.index({0, 1, 1}, {0, 0})] == Sector::pair);
    CHECK(l.bosons[basis.index({0, 0, 0}, {2, 1})] == 3);
    CHECK(l.top_level[basis.index({0, 0, 0}, {0, 1})]);
    CHECK_FALSE(l.top_level[basis.index({0, 0, 0}, {1, 0})]);
}

TEST_CASE("many-mode dimension cap") {
    std::vector<Species> many(14, Species::fermion);
    CHECK_THROWS_AS(MultimodeBasis(many, {4}), DimensionCapError);
    CHECK_THROWS_AS(MultimodeBasis({}, {4}), DomainError);
    CHECK_THROWS_AS(MultimodeBasis({Species::fermion}, {}), DomainError);
}
