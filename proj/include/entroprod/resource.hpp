// resource.hpp — thermo-majorization, Renyi second laws, coherence constraints and work bounds
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "entroprod/core.hpp"

namespace entroprod::resource {

// Diagonal state: level energies E and populations p.
struct EnergyPopulations {
    RVec E, p;

    int dim() const { return static_cast<int>(E.size()); }
    void validate(double tol = 1e-12) const;
};

// Indices sorted by p_i e^{beta E_i}, descending; ties by ascending E, then index.
std::vector<int> beta_order(const EnergyPopulations& pop, double beta);

// Breakpoints (x, y) starting at (0, 0); y is 1 for x beyond the last breakpoint.
struct ThermoMajCurve {
    std::vector<double> x, y;

    double y_at(double xq) const;
    bool concave(double tol = 1e-12) const;
};

ThermoMajCurve curve(const EnergyPopulations& pop, double beta);
std::string to_csv(const ThermoMajCurve& c);

enum class Verdict { Yes, No, Incomparable };
const char* to_string(Verdict v);

struct MajorizationVerdict {
    Verdict verdict = Verdict::Incomparable;
    bool first_over_second = false;
    bool second_over_first = false;
    double min_gap = 0.0;  // min over breakpoints of curve1 - curve2
    double max_gap = 0.0;
};

nlohmann::json to_json(const MajorizationVerdict& v);

// Yes: p1 thermo-majorizes p2. No: p2 strictly majorizes p1. Incomparable: curves cross.
MajorizationVerdict thermo_majorizes(const EnergyPopulations& p1, const EnergyPopulations& p2, double beta,
                                     double tol = 1e-12);

struct GammaEmbedding {
    RVec gamma;                   // length D
    std::vector<long> k;          // thermal weights k_i / D, sum k_i = D
    double rounding_error = 0.0;  // max_i |k_i / D - p_i^th|
};

// Largest-remainder rounding of the thermal weights; throws std::invalid_argument
// when a weight rounds to zero or the rounding error exceeds max_error.
GammaEmbedding gamma_embed(const EnergyPopulations& pop, double beta, long D = 10000, double max_error = 1.0);
// Embedding with externally fixed weights k_i.
RVec gamma_embed(const RVec& p, const std::vector<long>& k);
bool majorizes(const RVec& g1, const RVec& g2, double tol = 1e-12);

std::vector<double> default_alpha_grid();

struct SecondLaws {
    std::vector<double> alpha;
    std::vector<double> sigma;  // S_a(p1 || p_th) - S_a(p2 || p_th)
    bool allowed = true;
};

// Throws std::invalid_argument unless the grid contains 0, 1/2, 1, 2 and infinity.
SecondLaws renyi_second_laws(const RVec& p1, const RVec& p2, double beta, const RVec& E,
                             const std::vector<double>& alpha = default_alpha_grid());
// F_a = F_th + T S_a(p || p_th)
double free_energy(const RVec& p, double beta, const RVec& E, double alpha);

struct CoherenceLaws {
    std::vector<double> alpha;
    std::vector<double> before, after;  // S_a(rho || Delta_H(rho))
    bool allowed = true;
};

CoherenceLaws coherence_second_laws(const Mat& rho1, const Mat& rho2, const Mat& H,
                                    const std::vector<double>& alpha = default_alpha_grid());

// T S_0(p || p_th), support p_i > 1e-12. Discontinuous as a population tends to 0.
double work_extraction(const RVec& p, double beta, const RVec& E);
// T S_inf(p || p_th) = T ln max_i p_i / p_i^th
double work_of_formation(const RVec& p, double beta, const RVec& E);

// S(rho1 || rho_th) / S(rho2 || rho_th); throws when rho2 is thermal.
double interconversion_rate(const Mat& rho1, const Mat& rho2, double beta, const Mat& H);

struct WorkBounds {
    std::vector<double> eta;
    std::vector<double> Phi;    // -(eta / beta) S_{1 - eta/beta}(rho' || rho'_th) - eta dF
    std::vector<double> bound;  // T S_{1 - eta/beta} + dF; lower bound on <W> for eta >= 0, upper for eta <= 0
    std::vector<bool> bound_holds;
    double W_ext = 0.0, W_irr = 0.0, W_form = 0.0;
    bool sandwich = false;  // W_ext <= W_irr <= W_form
};

// rho' after a work protocol started at the Gibbs state, H' the final
// Hamiltonian, dF the equilibrium free-energy change and mean_work = <W>.
// The grid must satisfy eta <= beta.
WorkBounds work_bounds(const Mat& rho_prime, const Mat& H_prime, double beta, double dF, double mean_work,
                       const std::vector<double>& eta);

// Gibbs-stochastic 2 x 2 matrix G with G p_th = p_th and G p1 = p2, when one exists.
std::optional<RMat> gibbs_stochastic_2x2(const RVec& p1, const RVec& p2, const RVec& p_th, double tol = 1e-12);

}  // namespace entroprod::resource
