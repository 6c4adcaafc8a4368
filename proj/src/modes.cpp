#include "qftion/modes.hpp"

#include "qftion/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace qftion {

namespace {

constexpr double pi = std::numbers::pi;

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

} // namespace

WavePacket::WavePacket(double center_momentum, double momentum_width, double center_position,
                       Species species)
    : p0_(center_momentum), sigma_p_(momentum_width), x0_(center_position), species_(species)
{
    if (!(sigma_p_ > 0.0) || !std::isfinite(sigma_p_))
        throw DomainError("wavepacket momentum width must be positive");
    if (!std::isfinite(p0_) || !std::isfinite(x0_))
        throw DomainError("wavepacket center must be finite");
    if (std::abs(p0_) < min_momentum_ratio * sigma_p_)
        throw DomainError("wavepacket |p| must be at least 4 sigma_p for the single-branch "
                          "ultrarelativistic envelope");
}

double WavePacket::frequency() const noexcept { return std::abs(p0_); }

double WavePacket::momentum_amplitude(double p) const noexcept
{
    const double u = (p - p0_) / sigma_p_;
    return std::pow(pi * sigma_p_ * sigma_p_, -0.25) * std::exp(-0.5 * u * u);
}

double WavePacket::envelope(double x, double t) const noexcept
{
    // The envelope is the Fourier transform of G taken on the branch omega = sign(p0) p,
    // a normalized Gaussian of width 1/sigma_p translating rigidly at unit speed.
    const double s = spatial_width();
    const double u = (x - center_at(t)) / s;
    return std::pow(pi * s * s, -0.25) * std::exp(-0.5 * u * u);
}

void CouplingProfile::validate() const
{
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(g1) || !finite(g2) || !finite(sigma_t) || !finite(T) || !finite(delta) ||
        !finite(omega0) || !finite(k0))
        throw ValidationError("coupling profile values must be finite");
    if (g1 < 0.0) throw ValidationError("g1 must be >= 0");
    if (g2 < 0.0) throw ValidationError("g2 must be >= 0");
    if (sigma_t <= 0.0) throw ValidationError("sigma_t must be > 0");
    if (T <= 0.0) throw ValidationError("T must be > 0");
    if (omega0 <= 0.0) throw ValidationError("omega0 must be > 0");
}

double CouplingProfile::pair_window(double t) const noexcept
{
    const double u = t - 0.5 * T;
    return g2 * std::exp(-u * u / (2.0 * sigma_t * sigma_t));
}

cplx gaussian_overlap(double a, double s1, double b, double s2, double q)
{
    if (!(s1 > 0.0) || !(s2 > 0.0)) throw DomainError("gaussian_overlap widths must be positive");
    const double v1 = s1 * s1;
    const double v2 = s2 * s2;
    const double sum = v1 + v2;
    const double d = a - b;
    const double mean = (a * v2 + b * v1) / sum;
    const double magnitude = std::sqrt(2.0 * s1 * s2 / sum) *
                             std::exp(-d * d / (2.0 * sum) - q * q * v1 * v2 / (2.0 * sum));
    return magnitude * expi(q * mean);
}

cplx coupling_functional(const WavePacket& i, const WavePacket& j, double k, double omega,
                         double g, double t)
{
    // theta_i^dag theta_j a picks up conj(G~_i e^{i s_i (p_i x - w_i t)}) G~_j e^{i s_j (p_j x - w_j t)}
    // times the boson plane wave e^{i(kx - omega t)}.
    const int si = i.charge_sign();
    const int sj = j.charge_sign();
    const double q = k - si * i.center_momentum() + sj * j.center_momentum();
    const double freq = si * i.frequency() - sj * j.frequency() - omega;
    const cplx spatial =
        gaussian_overlap(i.center_at(t), i.spatial_width(), j.center_at(t), j.spatial_width(), q);
    return g * spatial * expi(freq * t);
}

cplx coupling_self(const WavePacket& packet, double k0, double omega0, double g, double t)
{
    return coupling_functional(packet, packet, k0, omega0, g, t);
}

cplx coupling_pair(const WavePacket& packet_f, const WavePacket& packet_fbar, double k0,
                   double omega0, double g, double t)
{
    if (packet_f.species() != Species::fermion || packet_fbar.species() != Species::antifermion)
        throw DomainError("coupling_pair expects a fermion packet and an antifermion packet");
    if (packet_f.direction() == packet_fbar.direction())
        throw DomainError("coupling_pair requires counter-propagating packets");
    return coupling_functional(packet_f, packet_fbar, k0, omega0, g, t);
}

EffectiveFit fit_effective_params(const WavePacket& packet_f, const WavePacket& packet_fbar,
                                  double k0, double omega0, double g, double max_residual)
{
    if (!(omega0 > 0.0)) throw DomainError("omega0 must be positive");
    if (packet_f.direction() == packet_fbar.direction())
        throw DomainError("fit_effective_params requires counter-propagating packets");
    if (packet_f.direction() < 0)
        throw DomainError("the fermion packet must be the right-moving one");

    EffectiveFit fit;
    CouplingProfile& prof = fit.profile;
    prof.omega0 = omega0;
    prof.k0 = k0;
    prof.delta = packet_f.frequency() + packet_fbar.frequency() - omega0;

    // Centers meet where x0_f + t = x0_fbar - t.
    const double t_guess = 0.5 * (packet_fbar.center_position() - packet_f.center_position());
    if (!(t_guess > 0.0))
        throw ReductionError("packets never collide at positive time (already separating)");
    const double s1 = packet_f.spatial_width();
    const double s2 = packet_fbar.spatial_width();
    const double width_guess = 0.5 * std::sqrt(s1 * s1 + s2 * s2);

    const double g1_f = std::abs(coupling_self(packet_f, k0, omega0, g, 0.0));
    const double g1_fbar = std::abs(coupling_self(packet_fbar, k0, omega0, g, 0.0));
    prof.g1 = 0.5 * (g1_f + g1_fbar);

    if (g == 0.0) {
        prof.g1 = 0.0;
        prof.g2 = 0.0;
        prof.sigma_t = width_guess;
        prof.T = 2.0 * t_guess;
        fit.collision_time = t_guess;
        return fit;
    }

    // Least-squares quadratic in (t - t_guess) through log|F_pair|.
    constexpr int samples = 41;
    const double span = 3.0 * width_guess;
    Eigen::MatrixXd design(samples, 3);
    Eigen::VectorXd rhs(samples);
    std::vector<double> ts(samples);
    for (int n = 0; n < samples; ++n) {
        const double u = -span + 2.0 * span * n / (samples - 1);
        ts[n] = t_guess + u;
        design(n, 0) = 1.0;
        design(n, 1) = u;
        design(n, 2) = u * u;
        rhs(n) = std::log(std::abs(coupling_pair(packet_f, packet_fbar, k0, omega0, g, ts[n])));
    }
    const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
    if (!(c(2) < 0.0)) throw ReductionError("pair coupling is not a temporal Gaussian window");

    const double u_peak = -c(1) / (2.0 * c(2));
    fit.collision_time = t_guess + u_peak;
    prof.sigma_t = std::sqrt(-1.0 / (2.0 * c(2)));
    prof.T = 2.0 * fit.collision_time;
    prof.g2 = std::exp(c(0) - c(1) * c(1) / (4.0 * c(2)));

    // Compare against the reduced form g2 w(t) e^{i(delta t + phi)} over the window.
    const cplx at_peak = coupling_pair(packet_f, packet_fbar, k0, omega0, g, fit.collision_time);
    const double phi = std::arg(at_peak) - prof.delta * fit.collision_time;
    double residual = std::abs(g1_f - g1_fbar) / std::max(prof.g1, 1e-300);
    for (double t : ts) {
        const cplx exact = coupling_pair(packet_f, packet_fbar, k0, omega0, g, t);
        const cplx reduced = prof.pair_window(t) * expi(prof.delta * t + phi);
        residual = std::max(residual, std::abs(exact - reduced) / prof.g2);
    }
    fit.residual = residual;
    if (residual > max_residual)
        throw ReductionError("effective-parameter reduction residual " + std::to_string(residual) +
                             " exceeds tolerance");
    if (!(prof.T > 0.0)) throw ReductionError("fitted collision time is not positive");
    return fit;
}

} // namespace qftion
