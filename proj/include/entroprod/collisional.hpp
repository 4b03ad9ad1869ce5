// collisional.hpp — stroboscopic collisional models, their continuous limit and stroke-based engines
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "entroprod/core.hpp"
#include "entroprod/maps.hpp"

namespace entroprod::collisional {

inline constexpr double kNaN = maps::kNaN;
inline constexpr int kMaxCollisionDim = 256;  // d_S * d_A
inline constexpr int kMaxLimitCycles = 100000;
inline constexpr double kLimitCycleTol = 1e-12;
inline constexpr double kSolverAgreement = 1e-8;

// Ancilla acting on the leading system factor: U_SA on S (x) A.
struct Ancilla {
    Mat rho_A, H_A, U_SA;
    double beta = kNaN;  // set when rho_A is meant to be thermal
};

// Stroke n collides with alphabet[n % size], then applies system_unitaries[n % size]
// and relabels H_S^n -> H_S^{n+1} from the cyclic schedule. An empty unitary list
// is the instantaneous-stroke simplification (identity with Hamiltonian relabeling).
struct CollisionSpec {
    int d_S = 0;
    std::vector<Ancilla> alphabet;
    std::vector<Mat> H_S_schedule;
    std::vector<Mat> system_unitaries;
    double tau = 1.0;
    Mat rho_S0;

    int period() const;
    const Mat& H_S(int n) const;
    Mat system_unitary(int n) const;
    const Ancilla& ancilla(int n) const;
    void validate() const;
};

// Q_A is positive into the ancilla and W positive into the system, so the
// stroke-wise first law reads dH_S = W_u + W_onoff - Q_A.
struct StrokeRecord {
    int stroke = 0;
    double t = 0.0;
    double Q_A = 0.0;
    double dH_S = 0.0;
    double W_onoff = 0.0;
    double W_u = 0.0;
    double dS_S = 0.0;
    double sigma_general = 0.0;           // I(S:A) + S(rho_A' || rho_A)
    double sigma_thermal = kNaN;          // dS_S + beta Q_A
    double sigma_fixedpoint = kNaN;       // S(rho || rho_th) - S(E(rho) || rho_th)
    double first_law_residual = 0.0;
    bool thermal_ancilla = false;
    bool thermal_operation = false;
};

struct CollisionRun {
    std::vector<Mat> states;  // rho_S^0 ... rho_S^N
    std::vector<StrokeRecord> records;
};

// Post-collision state Tr_A U_SA (rho (x) rho_A) U_SA^dagger.
Mat collide(const Ancilla& a, const Mat& rho_S);
// One full stroke n: collision followed by the system unitary.
Mat stroke(const CollisionSpec& spec, int n, const Mat& rho_S);

CollisionRun run(const CollisionSpec& spec, int n_strokes);
std::string to_csv(const std::vector<StrokeRecord>& records);

struct LimitCycle {
    Mat rho;              // power-iteration fixed point
    Mat rho_eigen;        // eigenvector of the composite channel at eigenvalue 1
    int cycles = 0;
    double residual = 0.0;        // ||Phi(rho) - rho||_1 / 2
    double solver_gap = 0.0;      // trace distance between the two routes
    double subleading = 0.0;      // largest channel eigenvalue modulus below the fixed one
};

// Fixed point of a channel on d x d matrices. Throws std::runtime_error when
// the power iteration does not settle within the cap or the routes disagree.
LimitCycle channel_fixed_point(const std::function<Mat(const Mat&)>& phi, int d, const Mat& rho0);
LimitCycle limit_cycle(const CollisionSpec& spec);

// V = sum_k g_k (L_k^dagger (x) A_k + L_k (x) A_k^dagger)
struct CouplingTerm {
    Mat L, A;
    double g = 1.0;
};

struct ContinuousLimit {
    Mat superop;              // standard-form dissipator on vec(rho_S)
    Mat superop_raw;          // -1/2 Tr_A [V, [V, . (x) rho_A]]
    std::vector<double> gamma_minus;  // coefficient of D[L_k]: g_k^2 <A_k A_k^dagger>
    std::vector<double> gamma_plus;   // coefficient of D[L_k^dagger]: g_k^2 <A_k^dagger A_k>
    std::vector<double> omega;        // [H_A, A_k] = -omega_k A_k, NaN if not an eigenoperator
    std::vector<double> ratio;        // gamma_minus / gamma_plus
    std::vector<double> ratio_expected;  // exp(beta omega_k) when the ancilla is thermal
    double lamb_shift = 0.0;
    double route_gap = 0.0;
    bool detailed_balance = false;
};

Mat coupling_operator(const std::vector<CouplingTerm>& terms, int d_A);
// Throws std::invalid_argument when ||Tr_A(V rho_A)|| exceeds tol.
Mat double_commutator_dissipator(const Mat& V, const Mat& rho_A, int d_S, double tol = 1e-10);
ContinuousLimit continuous_limit(const std::vector<CouplingTerm>& terms, const Mat& rho_A, const Mat& H_A = {},
                                 double beta = kNaN, double tol = 1e-10);
// (Tr_A[e^{-i sqrt(tau) V} (rho (x) rho_A) e^{i sqrt(tau) V}] - rho) / tau
Mat finite_tau_increment(const Mat& V, const Mat& rho_A, const Mat& rho_S, double tau);
Mat apply_superop(const Mat& superop, const Mat& rho);

struct PreferredStroke {
    RMat M;                // M(i|j), column stochastic
    Mat coherence_factor;  // c_ij multiplying rho_ij; diagonal entries are 1
    double coherence_mixing = 0.0;  // largest coherence transfer between distinct (i, j) pairs
    RVec p_before, p_after, p_thermal;
    double sigma = 0.0;
    double sigma_cl = 0.0;
    double sigma_qu = 0.0;
    double stochastic_residual = 0.0;
    double detailed_balance_residual = 0.0;
    double max_coherence_modulus = 0.0;  // max |c_ij| over i != j
    double coherence_l1 = 0.0;           // sum_{i != j} |rho_ij| before the stroke
};

struct PreferredBasisRun {
    Mat basis;  // common eigenbasis of the schedule, columns
    std::vector<PreferredStroke> strokes;
    std::vector<RVec> chain_populations;  // p^{n+1} = M_n p^n
    std::vector<RVec> quantum_populations;
    double population_gap = 0.0;
};

PreferredBasisRun preferred_basis(const CollisionSpec& spec, int n_strokes, double tol = 1e-9);

struct SwapEngineSpec {
    double eps_a = 1.0, eps_b = 0.5;
    double T_a = 1.0, T_b = 0.5;
};

enum class SwapRegime { Refrigerator, Engine, HeatPump, Carnot };
const char* to_string(SwapRegime r);

// Heat is positive into the working fluid; W + Q_a + Q_b = 0.
struct SwapEngineResult {
    double f_a = 0.0, f_b = 0.0;
    double W = 0.0, Q_a = 0.0, Q_b = 0.0;
    double sigma = 0.0;
    SwapRegime regime = SwapRegime::Carnot;
    double figure_of_merit = kNaN;  // COP, eta or COP_h
    double sigma_min = kNaN;         // heat pump only
    double sigma_excess = kNaN;
};

SwapEngineResult swap_engine(const SwapEngineSpec& spec);
// Full SWAP and complete thermalization carried out on the 4 x 4 state.
SwapEngineResult swap_engine_simulated(const SwapEngineSpec& spec);

struct FourStrokeSpec {
    Mat V1, V2, U_SH, U_SC;
    Mat rho_H, rho_C;
    Mat H_S, H_H, H_C;  // optional, for energetics
    double beta_H = kNaN, beta_C = kNaN;
};

struct FourStrokeResult {
    Mat rho_S, rho_S_end;
    bool at_limit_cycle = false;
    double sigma_H = 0.0, sigma_C = 0.0, sigma = 0.0;
    double sigma_H_trace = 0.0, sigma_C_trace = 0.0;  // entropy-change route
    double phi_H = 0.0, phi_C = 0.0;
    double dS_S = 0.0;
    double Q_H = kNaN, Q_C = kNaN, W = kNaN;  // Q into the bath
    double sigma_clausius = kNaN;              // dS_S + beta_H Q_H + beta_C Q_C
};

Mat four_stroke_map(const FourStrokeSpec& spec, const Mat& rho_S);
FourStrokeResult four_stroke_cycle(const FourStrokeSpec& spec, const Mat& rho_S);
FourStrokeResult four_stroke(const FourStrokeSpec& spec);

}  // namespace entroprod::collisional
