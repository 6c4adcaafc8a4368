#pragma once

// Schroedinger evolution under time-dependent Hermitian Hamiltonians, phase-free
// observables, and the closed-form driven-oscillator solution.

#include "qftion/fock.hpp"

#include <array>
#include <functional>
#include <numbers>
#include <vector>

namespace qftion {

using HamiltonianFn = std::function<CMatrix(double)>;
using SparseHamiltonianFn = std::function<SparseOp(double)>;

enum class Method {
    midpoint_exponential, // exp(-i H(t + dt/2) dt), second order
    magnus4,              // two-point Gauss-Legendre Magnus, fourth order
};

struct IntegratorConfig {
    double dt = 2.0 * std::numbers::pi / 1000.0;
    double t_end = 0.0;
    Method method = Method::magnus4;
    // Largest tolerated population on the top boson level.
    double truncation_threshold = 1e-6;

    // dt <= 2 pi / (100 omega0), t_end >= 0.
    void validate(double omega0) const;
    int steps() const;
};

struct Observables {
    double survival = 0.0;
    double mean_boson = 0.0;
    std::array<double, 4> populations{}; // vac, f, fbar, pair
    double norm_error = 0.0;
    double top_level_population = 0.0;
};

Observables observables(const CVector& psi, const BasisLayout& layout, std::size_t target);

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> survival;
    std::vector<double> mean_boson;
    std::array<std::vector<double>, 4> populations;
    std::vector<double> norm_error;
    std::vector<double> top_level_population;

    void push(double t, const Observables& o);
    std::size_t size() const noexcept { return times.size(); }
    Observables at(std::size_t k) const;
};

// Applies unitary steps of an exactly Hermitian effective generator. Small
// states diagonalize the generator block by block over its connected
// components; large ones sum its Taylor series to double precision.
class Propagator {
public:
    Propagator(HamiltonianFn hamiltonian, Method method);
    // Always takes the Taylor path; suited to large, sparse Hamiltonians.
    Propagator(SparseHamiltonianFn hamiltonian, Method method);

    // One step of length h starting at t.
    void step(CVector& psi, double t, double h) const;
    // Equal substeps of length <= max_dt from t0 to t1.
    void advance(CVector& psi, double t0, double t1, double max_dt) const;

private:
    void step_dense(CVector& psi, double t, double h) const;
    void step_sparse(CVector& psi, double t, double h) const;

    HamiltonianFn hamiltonian_;
    SparseHamiltonianFn sparse_;
    Method method_;
};

// Samples observables at t = 0, h, 2h, ..., t_end. Throws TruncationError
// when the top boson level population exceeds cfg.truncation_threshold.
TimeSeries propagate(const HamiltonianFn& hamiltonian, const BasisLayout& layout,
                     const CVector& psi0, std::size_t target, const IntegratorConfig& cfg,
                     CVector* final_state = nullptr);
// Same, with a prepared propagator; cfg.method is ignored.
TimeSeries propagate(const Propagator& propagator, const BasisLayout& layout,
                     const CVector& psi0, std::size_t target, const IntegratorConfig& cfg,
                     CVector* final_state = nullptr);

// A propagation problem built for a given boson truncation.
struct Problem {
    HamiltonianFn hamiltonian;
    // Optional sparse form of the same Hamiltonian, preferred for propagation.
    SparseHamiltonianFn sparse_hamiltonian;
    BasisLayout layout;
    CVector psi0;
    std::size_t target = 0;
};

struct AdaptiveResult {
    TimeSeries series;
    int n_max = 0;
};

// Runs at n_max = start, doubling after every TruncationError until n_max_cap
// is exceeded, after which the last TruncationError propagates.
AdaptiveResult propagate_adaptive(const std::function<Problem(int)>& build, int start,
                                  int n_max_cap, const IntegratorConfig& cfg);

struct OracleValues {
    double mean_boson = 0.0;
    double survival = 1.0;
};

// Single fermion with g2 = 0: the boson sees the drive 2 g1 (a e^{-i w t} + h.c.)
// and ends in the coherent state alpha = -(2 g1 / w)(e^{i w t} - 1).
OracleValues driven_oscillator_oracle(double g1, double omega0, double t);

} // namespace qftion
