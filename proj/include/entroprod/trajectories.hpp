// trajectories.hpp — two-point measurement ensembles, fluctuation theorems and quench statistics
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "entroprod/core.hpp"
#include "entroprod/maps.hpp"

namespace entroprod::trajectories {

struct Trajectory {
    std::vector<int> outcome;  // (n, nu, m, mu) or protocol-specific tuple
    double p_forward = 0.0;
    double p_backward = 0.0;
    double sigma = 0.0;
};

enum class BackwardChoice { BathReset, CorrelationsDestroyed, PostMeasurementState, BothReset };

const char* to_string(BackwardChoice c);
BackwardChoice backward_choice_from_string(const std::string& s);

// Eigenbases used by the two measurements. Columns are sorted by decreasing
// eigenvalue; ties keep the order returned by the Hermitian eigensolver.
struct TpmBases {
    RVec p, q;         // initial spectra of rho_S, rho_E
    Mat n_vecs, nu_vecs;
    RVec p1, q1;       // final spectra of rho_S', rho_E'
    Mat m_vecs, mu_vecs;
};

struct PathEnsemble {
    std::vector<Trajectory> paths;
    TpmBases bases;
    bool has_backward = false;
    int infinite_sigma = 0;  // paths with P_F > 0 and P_B = 0

    double total_forward() const;
    double mean_sigma() const;
    double exp_minus_sigma() const;  // <exp(-sigma)> over paths with P_F > 0
};

inline constexpr int kMaxEnumerationDim = 64;

TpmBases tpm_bases(const maps::Episode& ep);
PathEnsemble tpm_ensemble(const maps::Episode& ep);
PathEnsemble backward_ensemble(const maps::Episode& ep, BackwardChoice choice);
// ln P_F / P_B per trajectory; +inf where P_B vanishes with P_F > 0.
std::vector<double> stochastic_sigma(const PathEnsemble& fwd, const PathEnsemble& bwd);

// Relative entropy of coherence of rho in the orthonormal basis given by the columns of B.
double coherence_in_basis(const Mat& rho, const Mat& B);

struct ScalarDistribution {
    std::vector<double> values;
    std::vector<double> probs;

    double total() const;
    double mean() const;
    double variance() const;
    double moment(int k) const;
    double exp_average(double eta) const;  // <exp(-eta x)>
    // Pools values closer than tol into their probability-weighted mean.
    static ScalarDistribution from_pairs(std::vector<std::pair<double, double>> pairs, double tol = 1e-12);
};

std::string to_csv(const ScalarDistribution& d);

struct WorkStatistics {
    ScalarDistribution forward;   // P_F(W)
    ScalarDistribution backward;  // P_B(W') for the reversed protocol
    double dF = 0.0;
    double mean_work = 0.0;
    double lag = 0.0;             // S(rho' || rho_f^th)
    double sigma_mean = 0.0;      // beta (<W> - dF)
    double jarzynski = 0.0;       // <exp(-beta W)>
    double crooks_max_residual = 0.0;
    bool crooks_ok = false;
};

WorkStatistics work_distribution(const Mat& H_i, const Mat& H_f, const Mat& V, double beta);

struct CgfCurve {
    std::vector<double> lambda;
    std::vector<double> K;               // primary route
    std::vector<double> K_alt;           // independent route
    double kappa[4] = {0.0, 0.0, 0.0, 0.0};
    double max_route_gap = 0.0;
};

std::string to_csv(const CgfCurve& c);

// K(lambda) = ln <exp(-lambda sigma)> for the two-point work protocol. K is
// the trace formula, K_alt the sum over the distribution; kappa are the
// exact cumulants of sigma.
CgfCurve cgf(const Mat& H_i, const Mat& H_f, const Mat& V, double beta, const std::vector<double>& grid);
// (lambda - 1) S_lambda(rho_f^th || rho') evaluated at each grid point.
std::vector<double> cgf_renyi(const Mat& H_i, const Mat& H_f, const Mat& V, double beta,
                              const std::vector<double>& grid);
// Relative entropy variance Tr rho'(ln rho' - ln rho_f)^2 - S(rho'||rho_f)^2.
double relative_entropy_variance(const Mat& rho, const Mat& sigma);

// Gauss-Legendre nodes and weights on [0, 1].
struct Quadrature {
    std::vector<double> x, w;
};
Quadrature gauss_legendre01(int n);

// cov^y(A, A) = Tr[A rho^y A rho^{1-y}] - Tr(A rho)^2 and the Wigner-Yanase-Dyson skew information.
double y_covariance(const Mat& rho, const Mat& A, double y);
double skew_information(const Mat& rho, const Mat& A, double y);

struct QuenchReport {
    double sigma_exact = 0.0;         // S(rho_i || rho_f)
    double sigma_second_order = 0.0;  // (beta^2/2) int_0^1 cov^y(dH, dH) dy
    double y_cov_integral = 0.0;
    double variance_term = 0.0;       // (beta^2/2) var(dH)
    double Q_skew = 0.0;              // (beta^2/2) int_0^1 I_y(rho_i, H_f) dy
    double var_sigma = 0.0;           // beta^2 var(dH)
    double identity_residual = 0.0;   // sigma_second_order - (variance_term - Q_skew)
    double fdr_residual = 0.0;        // sigma_second_order - (var_sigma/2 - Q_skew)
    double kappa3 = 0.0;
    double kappa4 = 0.0;
    bool commuting = false;
    std::vector<std::string> warnings;
};

QuenchReport quench_report(const std::function<Mat(double)>& H, double lambda0, double dlambda, double beta);

// Second-order CGF -(beta^2/2) int_0^lambda dx int_x^{1-x} dy cov^y(dH, dH)
// by a 32 x 32 tensor Gauss-Legendre rule.
CgfCurve quench_cgf(const Mat& H_i, const Mat& H_f, double beta, const std::vector<double>& grid);

struct CorrelatedTpm {
    std::vector<Trajectory> paths;  // outcome (nA, nB, mA, mB); sigma = (beta_B - beta_A) q_B - dI
    std::vector<double> q_B;
    std::vector<double> dI;
    double mean_q_B = 0.0;
    double dephased_heat = 0.0;     // Tr H_B [U D(rho) U^dagger - D(rho)]
    double unitary_heat = 0.0;      // Tr H_B [U rho U^dagger - rho]
    double mean_dI = 0.0;
    double ft_average = 0.0;        // <exp(-sigma)>
    double ft_max_ratio_residual = 0.0;
    bool bound_ok = false;
};

CorrelatedTpm correlated_tpm(const Mat& rho_AB, const Mat& H_A, const Mat& H_B, const Mat& U, double beta_A,
                             double beta_B, double tol = 1e-9);

struct AugmentedTpm {
    std::vector<Trajectory> paths;  // outcome (s, nA, nB, mA, mB)
    std::vector<double> q_B;
    double total = 0.0;
    double mean_q_B = 0.0;
};

AugmentedTpm augmented_tpm(const Mat& rho_AB, const Mat& U, const Mat& H_A, const Mat& H_B);

struct MeasurementRun {
    bool sampled = false;
    std::uint64_t seed = 0;
    std::vector<Trajectory> paths;  // outcome (k0, ..., kn); empty in sampled mode
    std::vector<double> sample_sigma;
    RVec p0, pn;
    RMat M;                         // p(k_n) = M p(k_0)
    double doubly_stochastic_residual = 0.0;
    double mean_sigma = 0.0;
    double exp_minus_sigma = 0.0;
    double std_error_mean = 0.0;
    double std_error_exp = 0.0;
    double shannon_difference = 0.0;  // S(p(k_n)) - S(p(k_0))
};

inline constexpr double kMaxEnumeratedTrajectories = 1e6;

// bases[j] holds the measurement basis at step j as columns; unitaries[j]
// acts between measurements j and j+1.
MeasurementRun measurement_trajectories(const CVec& psi0, const std::vector<Mat>& bases,
                                        const std::vector<Mat>& unitaries, std::uint64_t seed = 0x5eed,
                                        int samples = 200000);

struct ConvolvedDistribution {
    double delta = 0.0;
    std::vector<double> grid;    // 4096 cell centres
    std::vector<double> mass;    // probability per cell
    std::vector<double> attenuation;
    ScalarDistribution ideal;

    double density(double w) const;
    double mean() const;
    double variance() const;
};

inline constexpr int kConvolutionGrid = 4096;

ConvolvedDistribution weight_convolve(const ScalarDistribution& ideal, double delta,
                                      const std::vector<double>& gaps = {});

}  // namespace entroprod::trajectories
