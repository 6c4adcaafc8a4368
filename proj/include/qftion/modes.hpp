#pragma once

// Incoming wavepacket modes and the coupling functionals built from their
// spacetime envelopes. Units: omega0 sets the energy scale, hbar = c = 1.

#include <complex>
#include <string>
#include <vector>

namespace qftion {

using cplx = std::complex<double>;

enum class Species { fermion, antifermion };

// Gaussian momentum-space envelope of one incoming mode,
//   G(p) = (pi sigma_p^2)^(-1/4) exp(-(p - p0)^2 / (2 sigma_p^2)) exp(-i (p - p0) x0).
// The envelope travels at the speed of light in the direction of sign(p0).
class WavePacket {
public:
    // Throws DomainError unless sigma_p > 0 and |p0| >= min_momentum_ratio * sigma_p.
    WavePacket(double center_momentum, double momentum_width, double center_position,
               Species species);

    static constexpr double min_momentum_ratio = 4.0;

    double center_momentum() const noexcept { return p0_; }
    double momentum_width() const noexcept { return sigma_p_; }
    double center_position() const noexcept { return x0_; }
    Species species() const noexcept { return species_; }

    // Spatial width s = 1 / sigma_p of the envelope.
    double spatial_width() const noexcept { return 1.0 / sigma_p_; }
    // Ultrarelativistic frequency omega = |p0|.
    double frequency() const noexcept;
    // +1 right-moving, -1 left-moving.
    int direction() const noexcept { return p0_ > 0.0 ? 1 : -1; }
    // +1 for a fermion (psi carries b e^{i(px - wt)}), -1 for an antifermion.
    int charge_sign() const noexcept { return species_ == Species::fermion ? 1 : -1; }

    double center_at(double t) const noexcept { return x0_ + direction() * t; }

    // |G(p)|, the magnitude of the momentum amplitude.
    double momentum_amplitude(double p) const noexcept;
    // Spacetime envelope G~(x, t) (real in this convention; see envelope()).
    double envelope(double x, double t) const noexcept;

private:
    double p0_;
    double sigma_p_;
    double x0_;
    Species species_;
};

// Effective parameters of the reduced three-mode Hamiltonian.
struct CouplingProfile {
    double g1 = 0.0;
    double g2 = 0.0;
    double sigma_t = 1.0;
    double T = 1.0;
    double delta = 0.0;
    double omega0 = 1.0;
    double k0 = 0.0;

    // Throws ValidationError on negative couplings or non-positive scales.
    void validate() const;
    // The reduction assumes a slow massive boson, |k0| << omega0.
    bool slow_boson_warning() const noexcept { return std::abs(k0) > 0.1 * omega0; }
    // g2 exp(-(t - T/2)^2 / (2 sigma_t^2))
    double pair_window(double t) const noexcept;
};

// Integral of psi1*(x) psi2(x) e^{iqx} for normalized real Gaussian amplitudes
// centered at a and b with widths s1 and s2.
cplx gaussian_overlap(double a, double s1, double b, double s2, double q);

// Self-interaction functional F^{ii}(t) scaled by the bare coupling g.
cplx coupling_self(const WavePacket& packet, double k0, double omega0, double g, double t);

// Pair functional F^{f fbar}(t). Requires counter-propagating packets.
cplx coupling_pair(const WavePacket& packet_f, const WavePacket& packet_fbar, double k0,
                   double omega0, double g, double t);

// General functional F^{ij}(t) for the operator product theta_i^dag theta_j a,
// with theta = b for fermions and d^dag for antifermions. Reduces to
// coupling_self for i == j and to coupling_pair for (fermion, antifermion).
cplx coupling_functional(const WavePacket& i, const WavePacket& j, double k, double omega,
                         double g, double t);

struct EffectiveFit {
    CouplingProfile profile;
    double residual = 0.0;
    double collision_time = 0.0;
};

// Reduces a counter-propagating packet pair to the effective profile.
// Throws ReductionError when the reduced form misfits the functionals by more
// than max_residual (relative to the peak pair coupling).
EffectiveFit fit_effective_params(const WavePacket& packet_f, const WavePacket& packet_fbar,
                                  double k0, double omega0, double g,
                                  double max_residual = 1e-4);

} // namespace qftion
