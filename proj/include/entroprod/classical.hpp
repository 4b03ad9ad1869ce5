// classical.hpp — Pauli master equations, Schnakenberg entropy production, FCS, Glauber-Ising and Fokker-Planck
#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <vector>

#include "entroprod/core.hpp"

namespace entroprod::classical {

using SpRMat = Eigen::SparseMatrix<double>;

// W(i, j) is the rate j -> i; the diagonal holds minus the column sums.
// Optional per-reservoir parts sum to W.
class RateMatrix {
public:
    RateMatrix() = default;
    // Off-diagonal rates; the diagonal of `rates` is ignored.
    explicit RateMatrix(const RMat& rates);
    explicit RateMatrix(const std::vector<RMat>& parts);

    const RMat& W() const { return w_; }
    const std::vector<RMat>& parts() const { return parts_; }
    int dim() const { return static_cast<int>(w_.rows()); }

private:
    RMat w_;
    std::vector<RMat> parts_;
};

// Generator with the diagonal set to minus the off-diagonal column sums.
RMat generator(const RMat& rates);
// Throws std::invalid_argument unless off-diagonals are >= 0 and columns sum to 0.
void validate_generator(const RMat& W, double tol = 1e-10);
void validate_probability(const RVec& p, double tol = 1e-12);

RVec evolve(const RMat& W, const RVec& p0, double t);
// Unique normalized null vector of W; throws when the kernel is not one dimensional.
RVec steady_state(const RMat& W);

struct Schnakenberg {
    double sigma_dot = 0.0;
    double phi_dot = 0.0;
    double dS_dt = 0.0;  // -sum_i (W p)_i ln p_i
    RMat J;              // J_ij = W_ij p_j - W_ji p_i
    RMat X;              // ln(W_ij p_j / W_ji p_i)
};

// A state with p_i = 0 and nonzero inflow gives sigma_dot = dS_dt = +inf.
Schnakenberg schnakenberg(const RMat& W, const RVec& p);

struct MultibathSigma {
    double sigma_correct = 0.0;
    double sigma_lumped = 0.0;
    std::vector<double> phi_per_bath;  // 1/2 sum J^a ln(W^a_ij / W^a_ji)
};

MultibathSigma multibath_sigma(const std::vector<RMat>& parts, const RVec& p);

// d/dt S(p || q) along the Pauli flow: sum_i (W p)_i ln(p_i / q_i).
double kl_rate(const RMat& W, const RVec& p, const RVec& q);

// Counted current: transition j -> i through bath a adds increments[a](i, j).
struct FcsOptions {
    double h = 1e-4;
    double gap_tol = 1e-10;
    double current_tol = 1e-9;  // |mean| below this counts as zero current
};

struct FcsResult {
    double mean = 0.0;
    double variance = 0.0;
    double sigma_dot = 0.0;     // multibath_sigma at the steady state
    double tur_lhs = 0.0;       // variance / mean^2, +inf at zero current
    double tur_rhs = 0.0;       // 2 / sigma_dot
    bool tur_holds = true;
    double theta_at_zero = 0.0;
    RVec p_ss;
};

// Tilted generator: counted off-diagonals multiplied by exp(chi * increment).
RMat tilted_generator(const std::vector<RMat>& parts, const std::vector<RMat>& increments, double chi);
// Dominant eigenvalue of the tilted generator, tracked by continuity from chi = 0.
double scgf(const std::vector<RMat>& parts, const std::vector<RMat>& increments, double chi);
std::vector<double> scgf(const std::vector<RMat>& parts, const std::vector<RMat>& increments,
                         const std::vector<double>& chi_grid);
// Central differences at step h and h/2 combined by one Richardson step (error O(h^4)).
FcsResult fcs(const std::vector<RMat>& parts, const std::vector<RMat>& increments,
              const FcsOptions& opt = {});

struct OnsagerResult {
    double value = 0.0;
    bool psd = true;
    double min_eigenvalue = 0.0;
};

OnsagerResult onsager_sigma(const RMat& L, const RVec& x);

// Two-level system with gap eps coupled to baths with rates
// W^a(1 <- 0) = gamma_a f_a, W^a(0 <- 1) = gamma_a (1 - f_a), f_a = 1 / (e^{beta_a eps} + 1).
std::vector<RMat> two_level_baths(double eps, const std::vector<double>& betas, const std::vector<double>& gammas);
// Heat into bath a per transition: E_j - E_i.
std::vector<RMat> heat_increments(const RVec& energies, int baths, int counted_bath);

inline constexpr int kMaxGlauberSites = 16;

struct GlauberSpec {
    int n_sites = 4;
    double J = 1.0;
    double gamma = 1.0;
    std::vector<double> beta;  // per site; a single entry applies to all sites
    std::vector<double> mu;    // per site; empty means zero
    std::vector<std::vector<int>> neighbors;

    void validate() const;
};

// Periodic Lx x Ly lattice; neighbor lists keep repeated entries when a
// direction wraps onto the same site.
std::vector<std::vector<int>> periodic_square_lattice(int lx, int ly);
// odd_value where x + y is odd, even_value elsewhere (site index y * lx + x).
std::vector<double> checkerboard(int lx, int ly, double odd_value, double even_value);

struct GlauberResult {
    SpRMat W;                          // state bit i set means sigma_i = -1
    std::vector<int> reservoir_of_site;  // sites with equal (beta_i, mu_i) share a reservoir
    RVec p_ss;
    double sigma_dot = 0.0;            // per-reservoir Schnakenberg sum
    double sigma_lumped = 0.0;
    double magnetization = 0.0;  // <sum_i sigma_i> / N
};

// w_i = (gamma / 2) (1 - sigma_i tanh(beta_i (J sum_delta sigma_{i+delta} + mu_i / 2)))
GlauberResult glauber_ising(const GlauberSpec& spec);
// Dense per-reservoir generators, for n_sites <= 10.
std::vector<RMat> glauber_parts(const GlauberSpec& spec);

struct FokkerPlanckSpec {
    std::function<double(double)> V;
    double T = 1.0;
    double x_min = -5.0, x_max = 5.0;
    int n = 1024;

    void validate() const;
};

struct FokkerPlanckResult {
    RVec x;
    double dx = 0.0;
    RVec P_th;
    std::vector<double> t;
    std::vector<RVec> P;
    std::vector<double> sigma_current;  // (1/D) sum dx J^2 / P on cell faces
    std::vector<double> sigma_kl;       // -d/dt S(P || P_th)
    std::vector<double> mass;
    double floored_mass = 0.0;          // total mass removed by the 1e-300 floor
};

// Cell-centred grid on [x_min, x_max], reflecting walls, Scharfetter-Gummel
// (Chang-Cooper) face fluxes; exact propagation through the spectrum of the
// symmetrized generator.
FokkerPlanckResult fokker_planck_1d(const FokkerPlanckSpec& spec, const RVec& P0, const std::vector<double>& times);
// Sampled initial density normalized on the grid.
RVec sample_density(const FokkerPlanckSpec& spec, const std::function<double(double)>& f);

std::string to_csv_sigma_T(const std::vector<double>& T, const std::vector<double>& sigma);
std::string to_csv_sigma_t(const FokkerPlanckResult& r);
std::string to_csv_cumulants(const std::vector<double>& parameter, const std::vector<FcsResult>& rows);

}  // namespace entroprod::classical
