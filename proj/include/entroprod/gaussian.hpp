// gaussian.hpp — Lyapunov dynamics, Gaussian entropy production, Wigner rates and squeezed baths
#pragma once

#include <string>
#include <vector>

#include "entroprod/core.hpp"

namespace entroprod::gaussian {

// Quadrature ordering (q_1, p_1, q_2, p_2, ...), a = (q + i p) / sqrt(2),
// vacuum covariance I/2.
RMat symplectic_form(int modes);
RVec default_parity(int dim);  // +1 on q, -1 on p

// dx = -A x dt + B dW, D = B B^T / 2.
struct GaussianModel {
    RMat A, D;
    RVec E_parity;  // diagonal of E

    int dim() const { return static_cast<int>(A.rows()); }
    // A_irr = (A + E A E) / 2
    RMat A_irr() const;
    RMat A_rev() const;
    bool stable() const;
    void validate() const;
};

GaussianModel make_model(RMat A, RMat D, RVec parity = RVec());

struct GaussianState {
    RVec mean;
    RMat cov;
    bool quantum = true;  // enforce cov + i Omega / 2 >= 0

    int dim() const { return static_cast<int>(cov.rows()); }
    void validate(double tol = 1e-10) const;
};

GaussianState thermal_state(int modes, double nbar);
// One mode with <q^2> = (n + 1/2)(cosh 2r - cos(theta) sinh 2r): the Gibbs-like
// state exp(-beta (cosh 2r H + sinh 2r A)) / Z for H = omega (a^dagger a + 1/2),
// A = (omega / 2)(e^{i theta} a^dagger^2 + e^{-i theta} a^2).
RMat squeezed_thermal_cov(double nbar, double r, double theta);

// Unique solution of A X + X A^T = 2 D; throws std::invalid_argument when A is not stable.
RMat lyapunov_steady(const RMat& A, const RMat& D);

// Exact flow of the first and second moments.
GaussianState propagate(const GaussianModel& m, const GaussianState& s0, double t);

struct PiPhi {
    double sigma_dot = 0.0;
    double phi = 0.0;
    double dS_dt = 0.0;  // d/dt (1/2) ln det cov
};

// Entropy production and flux for linear Langevin dynamics. A singular D is
// handled with the Moore-Penrose inverse; throws std::invalid_argument when
// A_irr has a component outside the range of D.
PiPhi pi_phi(const GaussianModel& m, const GaussianState& s);

// Exact Shannon entropy of the Wigner function: (1/2) ln det cov + n ln(2 pi e).
double wigner_entropy(const GaussianState& s);
// (1/2) ln det cov. With vacuum covariance I/2 this is the operator Renyi-2
// entropy minus n ln 2.
double renyi2(const GaussianState& s);
// von Neumann entropy from the symplectic spectrum.
double von_neumann_entropy(const GaussianState& s);
RVec symplectic_eigenvalues(const RMat& cov);

// H = omega (a^dagger a + 1/2) with thermal damping at rate gamma and occupation nbar.
GaussianModel thermal_damping_model(double omega, double gamma, double nbar);

struct SingleModeRates {
    double sigma_dot = 0.0;  // Wigner entropy production
    double phi = 0.0;        // gamma (<a^dagger a> - n) / (n + 1/2)
    double Q_dot = 0.0;      // heat into the bath, omega gamma (<a^dagger a> - n)
    double dS_dt = 0.0;
    double mean_n = 0.0;
};

SingleModeRates single_mode_rates(double gamma, double nbar, double omega, const GaussianState& s);
// omega (n + 1/2), the scale that replaces T in the Wigner flux.
double wigner_temperature(double omega, double nbar);
double bose_occupation(double omega, double T);

struct TwoModeNessSpec {
    double omega_a = 1.0, omega_b = 1.0;
    double g_ab = 0.0;
    double kappa_a = 1.0, gamma_b = 1.0;
    double n_Tb = 0.0;

    void validate() const;
};

// Coupling g_ab (a + a^dagger)(b + b^dagger); amplitude damping kappa_a on a
// (vacuum bath) and gamma_b on b (occupation n_Tb).
GaussianModel two_mode_model(const TwoModeNessSpec& s);
// sqrt((kappa_a^2 + omega_a^2) omega_b / (4 omega_a))
double critical_coupling(const TwoModeNessSpec& s);
// Exact instability threshold of two_mode_model; tends to critical_coupling as gamma_b -> 0.
double stability_boundary(const TwoModeNessSpec& s);

struct TwoModeNess {
    RMat cov;
    double n_a = 0.0, n_b = 0.0;
    double Pi = 0.0, mu_a = 0.0, mu_b = 0.0;
    double Pi_general = 0.0;  // pi_phi at the steady state
};

TwoModeNess two_mode_ness(const TwoModeNessSpec& s);
std::string to_csv_ness(const std::vector<double>& g_ab, const std::vector<TwoModeNess>& rows);

// System mode a and bath mode b at common frequency omega, interaction
// V = g (e^{i phi} a^dagger b + e^{-i phi} b^dagger a) for time t, bath in the
// squeezed Gibbs state with (beta, r, theta). Asymmetry is conserved only for
// phi = pi/2 mod pi.
struct SqueezedScenario {
    double omega = 1.0;
    double beta = 1.0;
    double r = 0.0;
    double theta = 0.0;
    double g_t = 0.0;
    double phi = 1.5707963267948966;
    int fock_cut = 20;
};

struct SqueezedSigma {
    double sigma_affinity = 0.0;  // dS_S - beta (cosh 2r dH_S + sinh 2r dA_S)
    double sigma_relent = 0.0;    // S(rho_S || rho*) - S(rho_S' || rho*)
    double sigma_bath = 0.0;      // dS_S + beta (cosh 2r dQ_E + sinh 2r dA_E)
    double sigma_info = 0.0;      // I(S':E') + S(rho_E' || rho_E)
    double dS_S = 0.0, dH_S = 0.0, dA_S = 0.0, dQ_E = 0.0, dA_E = 0.0;
    double quanta_change = 0.0;     // |d<a^dagger a + b^dagger b>|
    double asymmetry_change = 0.0;  // |d<aa + bb>|
};

// Throws std::invalid_argument when V fails to conserve quanta or asymmetry.
void validate_conservation(const SqueezedScenario& sc, double tol = 1e-10);
// Truncated Fock evaluation; rho_S is a fock_cut x fock_cut density matrix.
SqueezedSigma squeezed_sigma(const SqueezedScenario& sc, const Mat& rho_S);
// Exact covariance propagation for a zero-mean Gaussian system state.
SqueezedSigma squeezed_sigma(const SqueezedScenario& sc, const GaussianState& s);
// Fock-space squeezed Gibbs state exp(-beta (cosh 2r H + sinh 2r A)) / Z.
Mat squeezed_gibbs_fock(double omega, double beta, double r, double theta, int cut);

}  // namespace entroprod::gaussian
