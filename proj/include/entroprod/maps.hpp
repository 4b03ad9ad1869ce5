// maps.hpp — single system+environment unitary episodes and their entropy bookkeeping
#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "entroprod/core.hpp"

namespace entroprod::maps {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// rho_SE' = U (rho_S (x) rho_E) U^dagger with S occupying the leading factors.
struct Episode {
    Mat H_S, H_E, U, rho_S, rho_E;
    Dims dims_S, dims_E;

    int d_S() const { return static_cast<int>(rho_S.rows()); }
    int d_E() const { return static_cast<int>(rho_E.rows()); }
    Dims dims() const;
    std::vector<int> s_factors() const;
    std::vector<int> e_factors() const;
    void validate(double tol = core::kStateTol) const;
};

Episode make_episode(Mat H_S, Mat H_E, Mat U, Mat rho_S, Mat rho_E, Dims dims_S = {}, Dims dims_E = {});

struct Evolved {
    Mat rho_SE, rho_S, rho_E;
};

Evolved evolve(const Episode& ep);

// Every field is in nats or energy units (hbar = k_B = 1). Quantities that a
// given route does not define are NaN.
struct EntropyBalance {
    double sigma = kNaN;       // I_SE + D_env
    double sigma_flux = kNaN;  // dS_S + Phi
    double phi = kNaN;
    double dS_S = kNaN;
    double dS_E = kNaN;
    double I_SE = kNaN;
    double D_env = kNaN;
    double Q_E = kNaN;
    double dH_S = kNaN;
    double W = kNaN;
    double dF = kNaN;
    double sigma_heat = kNaN;  // dS_S + sum beta_i Q_i
    double sigma_work = kNaN;  // beta (W - dF)
    double total_correlations = kNaN;
    double sigma_parts = kNaN;  // total correlations + sum_i S(rho_Ei' || rho_Ei)
    std::vector<double> Q_parts;
};

nlohmann::json to_json(const EntropyBalance& b);

EntropyBalance balance(const Episode& ep);
EntropyBalance thermal_balance(const Episode& ep, double beta, double tol = core::kStateTol);

struct BathPart {
    std::vector<int> factors;  // indices into Episode::dims_E
    Mat H;
    double beta;
};

EntropyBalance multibath_balance(const Episode& ep, const std::vector<BathPart>& parts, double tol = core::kStateTol);

struct ConservationCheck {
    bool conserving;
    double residual;
};

ConservationCheck is_strict_energy_conserving(const Mat& U, const Mat& H_S, const Mat& H_E, double tol = 1e-9);

double fixed_point_sigma(const Mat& rho_S, const Mat& rho_S_after, const Mat& rho_star);

struct OutcomeRecord {
    double p;
    Mat rho_S_k;
    Mat rho_E_k;
    double sigma_k;
    double phi_k;
};

struct ConditionalBalance {
    double sigma;
    double sigma_c;
    double chi_M;
    double phi;
    double phi_c;
    double backaction;  // trace distance between sum_k p_k rho_E|k and rho_E'
    bool backaction_free;
    std::vector<OutcomeRecord> outcomes;
    std::vector<std::string> warnings;
};

ConditionalBalance conditional_balance(const Episode& ep, const std::vector<Mat>& kraus_E, double tol = 1e-9);

// Energy-resolved heat statistics of the environment.
struct HeatDistribution {
    std::vector<double> values;
    std::vector<double> probs;
    double mean() const;
    double exp_average(double eta) const;  // <exp(-eta Q)>
};

HeatDistribution heat_distribution(const Episode& ep);
Mat landauer_M(const Episode& ep);

struct LandauerOptions {
    std::function<double(double)> heat_capacity;  // C_E(T); empty disables the bound
    std::vector<double> etas;
    bool require_finite_d = false;
};

struct EtaBound {
    double eta;
    double theta;  // ln <exp(-eta Q)>
    double bound;  // lower bound for eta > 0, upper bound for eta < 0
    bool satisfied;
};

struct LandauerReport {
    double T = kNaN;
    double Q_E = kNaN;
    double dS_S = kNaN;
    double basic = kNaN;
    double finite_d = kNaN;
    double heat_capacity = kNaN;
    double B_Q = kNaN;
    double exp_heat = kNaN;  // Tr[M rho_S]
    bool basic_ok = false;
    bool finite_d_ok = false;
    bool heat_capacity_ok = false;
    bool B_Q_ok = false;
    bool finite_d_tighter = false;
    bool heat_capacity_tightest = false;
    std::vector<EtaBound> eta_bounds;
};

LandauerReport landauer_report(const Episode& ep, double beta, const LandauerOptions& opt = {});

// Q(S^{-1}(-dS)) for a heat-capacity function C at initial temperature T.
double heat_capacity_bound(const std::function<double(double)>& C, double T, double dS);
// Canonical heat capacity var_T(H)/T^2 of a finite spectrum.
std::function<double(double)> canonical_heat_capacity(const Mat& H);
// Adaptive Simpson quadrature with relative tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-8);

struct CorrelatedHeat {
    double Q_B;
    double dI;
    double lhs;  // (beta_B - beta_A) Q_B
    double rhs;  // Delta I
    bool bound_ok;
};

CorrelatedHeat correlated_heat_flow(const Mat& rho_AB, const Mat& H_A, const Mat& H_B, const Mat& U, double beta_A,
                                    double beta_B, double tol = 1e-9);

struct TwoQubitCorrelated {
    Mat rho_AB, H_A, H_B, U;
    double f_A, f_B;
};

// Two qubits with H = Omega |e><e|, thermal marginals plus coherence
// alpha e^{i theta}|g,e><e,g| + h.c., and the partial swap exp(-i g t G).
TwoQubitCorrelated two_qubit_correlated(double Omega, double T_A, double T_B, double alpha, double theta, double phi,
                                        double g, double t);
double two_qubit_heat_closed_form(double Omega, double T_A, double T_B, double alpha, double theta, double phi, double g,
                                  double t);

Mat mean_force(const Mat& H_tot, int d_S, int d_E, const Mat& H_E, double beta);

struct StrongCouplingPoint {
    double t;
    Mat rho_SE;
    Mat H_tot;
};

struct StrongCouplingSigma {
    std::vector<double> t;
    std::vector<double> sigma_work;    // beta (W - dF)
    std::vector<double> sigma_relent;  // delta S(t) - delta S(0)
    std::vector<double> W;
    std::vector<double> dF;
};

StrongCouplingSigma strong_coupling_sigma(const std::vector<StrongCouplingPoint>& traj, int d_S, int d_E,
                                          const Mat& H_E, double beta);

// Central differences in the interior, one-sided at the ends.
std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& y);

struct BlpWitness {
    std::vector<double> D;
    std::vector<double> rate;
    double max_rate;
    bool nonmarkovian;
};

BlpWitness blp_witness(const std::vector<double>& t, const std::vector<Mat>& rho1, const std::vector<Mat>& rho2,
                       double tol = 1e-9);

struct MazzolaTerms {
    std::vector<double> D, rate, E, C;
    bool bound_ok;
    double worst_slack;  // min over interior points of (E+C)/2 + 10 dt - dD/dt
};

MazzolaTerms mazzola_terms(const std::vector<double>& t, const std::vector<Mat>& rho1_SE,
                           const std::vector<Mat>& rho2_SE, const Mat& H, int d_S, int d_E);

// Random unitary commuting with H_S (x) 1 + 1 (x) H_E: Haar within each
// degenerate eigenspace of the total Hamiltonian.
Mat random_conserving_unitary(const Mat& H_S, const Mat& H_E, std::mt19937_64& rng);

}  // namespace entroprod::maps
