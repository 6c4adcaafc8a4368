#pragma once

// Finite-mode time-ordered perturbation series (orders 0-2) of the three-mode
// model, built from the same monomials as FieldModel.

#include "qftion/evolve.hpp"
#include "qftion/model.hpp"

#include <string>
#include <vector>

namespace qftion {

inline constexpr int max_dyson_order = 2;

struct DysonTerm {
    int order = 0;
    // Vertex indices into FieldModel::vertices(), earliest first.
    std::vector<std::size_t> vertices;
    std::string label;
    cplx amplitude;
};

struct DysonOptions {
    int base_intervals = 400;
    // Stop doubling the quadrature grid once the amplitude moves less than this.
    double tolerance = 1e-12;
    int max_doublings = 8;
};

// All order-0..2 amplitudes out of one initial state, on a uniform grid of
// `intervals` Simpson panels over [0, t_end].
class DysonSeries {
public:
    DysonSeries(const FieldModel& model, std::size_t initial, double t_end, int intervals);

    int intervals() const noexcept { return intervals_; }
    double node_time(int k) const noexcept { return k * step_; }

    // Contribution of exactly `order` at grid node k.
    CVector order_amplitudes(int order, int k) const;
    // Sum of orders 0..order at grid node k.
    CVector amplitudes(int order, int k) const;
    // Per-vertex-string breakdown at the final node.
    std::vector<DysonTerm> terms(std::size_t final_state, int order) const;

private:
    const FieldModel* model_;
    std::size_t initial_;
    int intervals_;
    double step_;
    // order-1: per vertex v, cumulative integral at nodes and the state O_v|i>.
    std::vector<std::vector<cplx>> first_;
    std::vector<CVector> first_state_;
    // order-2: per nonvanishing (w, v), cumulative nested integral and O_w O_v|i>.
    struct Pair {
        std::size_t w, v;
        std::vector<cplx> integral;
        CVector state;
    };
    std::vector<Pair> second_;
};

// Amplitude <final| U(t_end) |initial> through the given order, with the
// quadrature grid doubled until converged to opts.tolerance. Throws DomainError
// for order outside 0..2 or when the truncation cannot hold `order` extra bosons.
cplx dyson_amplitude(std::size_t initial, std::size_t final_state, const FieldScenario& s,
                     int order, double t_end, const DysonOptions& opts = {});

std::vector<DysonTerm> dyson_terms(std::size_t initial, std::size_t final_state,
                                   const FieldScenario& s, int order, double t_end,
                                   const DysonOptions& opts = {});

struct DysonComparison {
    std::size_t initial = 0;
    std::size_t final_state = 0;
    double perturbative = 0.0; // |order <= 2 amplitude|^2
    double exact = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    bool flagged = false;
};

struct DysonReport {
    double threshold = 0.0; // 10 (g / omega0)^3, g = max(g1, g2)
    bool weak_regime = true; // couplings <= 0.05 omega0
    std::vector<DysonComparison> rows;

    bool any_flagged() const;
};

DysonReport dyson_vs_exact_report(const FieldScenario& s,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                  double t_end, const IntegratorConfig& cfg = {});

} // namespace qftion
