// lindblad.hpp — Lindblad generators, integration, steady states, gaps and Spohn rates
#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <vector>

#include "entroprod/core.hpp"

namespace entroprod::lindblad {

using SpMat = Eigen::SparseMatrix<cplx>;

inline constexpr int kMaxDim = 128;
inline constexpr int kMaxSpectrumDim = 40;     // dense Liouvillian eigensolve
inline constexpr int kDenseUniquenessDim = 24; // explicit null-space count below this size
inline constexpr int kDefaultFockCut = 40;

struct Jump {
    Mat L;
    double rate = 1.0;
};

// d rho/dt = -i[H(t), rho] + sum_k rate_k D[L_k] rho
struct LindbladModel {
    Mat H;
    std::vector<Jump> jumps;
    std::function<Mat(double)> H_of_t;  // overrides H when set

    int dim() const { return static_cast<int>(H.rows()); }
    Mat hamiltonian(double t) const;
    bool time_dependent() const { return static_cast<bool>(H_of_t); }
    void validate() const;
    Mat dissipator(const Mat& rho) const;
    Mat apply(const Mat& rho, double t = 0.0) const;
    // Upper bound on the generator norm at time t.
    double norm_bound(double t = 0.0) const;
};

// Column-stacking vectorization, vec(A X B) = (B^T (x) A) vec(X).
Mat build(const LindbladModel& m);
SpMat build_sparse(const LindbladModel& m);
// max |vec(I)^dagger L|: zero for a trace-preserving generator.
double trace_preservation_residual(const Mat& superop);
// Liouvillian eigenvalues sorted by decreasing real part.
std::vector<cplx> spectrum(const LindbladModel& m);

struct Trajectory {
    std::vector<double> t;
    std::vector<Mat> rho;
    double max_trace_drift = 0.0;  // before renormalization, per step
    double min_eigenvalue = 0.0;   // over output states
    long substeps = 0;
    std::vector<std::string> warnings;
};

// Fixed-step RK4 with step <= min(max_step, 0.1 / ||L||); throws std::runtime_error on blow-up.
Trajectory integrate(const LindbladModel& m, const Mat& rho0, const std::vector<double>& t_grid,
                     double max_step = 0.0);
// exp(L t) vec(rho0) for a time-independent generator.
Mat propagate_expm(const LindbladModel& m, const Mat& rho0, double t);

struct SteadyState {
    Mat rho;
    double residual = 0.0;  // ||L rho||_max
};

// Throws std::runtime_error when the null space is degenerate.
SteadyState steady_state(const LindbladModel& m);
// min over nonzero eigenvalues of -Re(lambda), clamped at 0.
double gap(const LindbladModel& m);

LindbladModel kerr_model(double Delta, double U, double eps, double kappa, int N_scale = 1,
                         int fock_cut = kDefaultFockCut);

struct TruncationCheck {
    double mean_n = 0.0;
    double tail = 0.0;  // sum_{n > cut - 5} p_n
    bool ok = false;
};

TruncationCheck check_fock_truncation(const Mat& rho);
// Throws std::runtime_error when mean_n >= cut / 2 or tail >= 1e-8.
void require_fock_truncation(const Mat& rho);

struct SpinOperators {
    Mat Sx, Sy, Sz, Sp, Sm;  // basis m = -S, ..., S
};

SpinOperators spin_operators(double S);
LindbladModel macrospin_model(double h, double kappa, double S);

struct SqueezedParameters {
    double N = 0.0;
    cplx M = 0.0;
};

// N + 1/2 = (n + 1/2) cosh 2r, M = (n + 1/2) e^{i theta} sinh 2r
SqueezedParameters squeezed_parameters(double nbar, double r, double theta);
// Four-term squeezed-bath generator with H = omega_s a^dagger a, written in
// diagonal jump form; throws std::invalid_argument when |M|^2 > N(N+1).
LindbladModel squeezed_dissipator(double gamma, double nbar, double r, double theta, double omega_s,
                                  int fock_cut = kDefaultFockCut);
LindbladModel squeezed_dissipator(double gamma, const SqueezedParameters& p, double omega_s,
                                  int fock_cut = kDefaultFockCut);

struct SpohnRates {
    std::vector<double> t;
    std::vector<double> Q_dot;        // -Tr H D(rho), heat into the bath
    std::vector<double> W_dot;        // Tr (dH/dt) rho
    std::vector<double> sigma_dot;    // -Tr D(rho) (ln rho - ln rho_th)
    std::vector<double> relent;       // S(rho || rho_th(t))
    std::vector<double> entropy;      // S(rho)
    std::vector<double> energy;       // Tr H rho
    std::vector<double> sigma_dot_fd; // dS/dt by finite differences + beta Q_dot
    std::vector<double> first_law_residual;  // dU/dt - (W_dot - Q_dot), finite differences
    double fixed_point_residual = 0.0;
};

// Throws std::invalid_argument when the dissipator does not fix the
// instantaneous Gibbs state to 1e-8.
SpohnRates spohn_rates(const LindbladModel& m, double beta, const Trajectory& traj,
                       const std::function<Mat(double)>& dH_dt = {});

std::string to_csv_sweep(const std::vector<double>& parameter, const std::vector<double>& gap,
                         const std::vector<double>& order_parameter, const std::vector<double>& n_a);

}  // namespace entroprod::lindblad
