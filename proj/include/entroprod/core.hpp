// core.hpp — dense complex linear algebra, states and the entropy/divergence family
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace entroprod {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Dims = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace core {

inline constexpr double kStateTol = 1e-9;
inline constexpr double kEigFloor = 1e-12;
inline constexpr double kSupportOverlap = 1e-8;

int dims_product(const Dims& d);

// Operator with its tensor-factor structure.
struct Operator {
    Mat m;
    Dims dims;
};

// Validated density operator. Construction throws std::invalid_argument when
// the matrix is not Hermitian, not unit trace, or has eigenvalues below -tol.
class DensityOperator {
public:
    DensityOperator() = default;
    DensityOperator(Mat m, Dims dims, double tol = kStateTol);
    explicit DensityOperator(Mat m, double tol = kStateTol);
    const Mat& matrix() const { return m_; }
    const Dims& dims() const { return dims_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    Mat m_;
    Dims dims_;
};

class HermitianOperator {
public:
    HermitianOperator() = default;
    HermitianOperator(Mat m, Dims dims, double tol = kStateTol);
    explicit HermitianOperator(Mat m, double tol = kStateTol);
    const Mat& matrix() const { return m_; }
    const Dims& dims() const { return dims_; }

private:
    Mat m_;
    Dims dims_;
};

class UnitaryOperator {
public:
    UnitaryOperator() = default;
    UnitaryOperator(Mat m, Dims dims, double tol = kStateTol);
    explicit UnitaryOperator(Mat m, double tol = kStateTol);
    const Mat& matrix() const { return m_; }
    const Dims& dims() const { return dims_; }

private:
    Mat m_;
    Dims dims_;
};

void check_density(const Mat& rho, double tol = kStateTol);
void check_hermitian(const Mat& h, double tol = kStateTol);
void check_unitary(const Mat& u, double tol = kStateTol);

// Eigendecomposition of the Hermitian part, ascending eigenvalues.
struct Eigh {
    RVec values;
    Mat vectors;
};
Eigh eigh(const Mat& h);

// Eigenvalues of a general complex matrix (LAPACK zgeev), unsorted.
CVec general_eigenvalues(const Mat& a);

// f applied to the spectrum of a Hermitian matrix.
Mat herm_fun(const Mat& h, const std::function<double(double)>& f);

// Spectrum of a density matrix with the [-1e-12, 0] floor applied.
RVec clamped_spectrum(const Mat& rho);

Mat kron(const Mat& a, const Mat& b);
Mat kron(const std::vector<Mat>& ops);
Operator tensor(const std::vector<Operator>& ops);
Mat identity(int d);
Mat commutator(const Mat& a, const Mat& b);

Mat partial_trace(const Mat& rho, const Dims& dims, const std::vector<int>& keep);
// Reorders tensor factors: output factor k is input factor perm[k].
Mat permute_factors(const Mat& op, const Dims& dims, const std::vector<int>& perm);

double von_neumann_entropy(const Mat& rho);
double shannon_entropy(const RVec& p);
double relative_entropy(const Mat& rho, const Mat& sigma);
double kl_divergence(const RVec& p, const RVec& q);
double mutual_information(const Mat& rho, const Dims& dims, const std::vector<int>& part_a);
double mutual_information_relent(const Mat& rho, const Dims& dims, const std::vector<int>& part_a);
double renyi_divergence(const Mat& rho, const Mat& sigma, double alpha);
double renyi_divergence(const RVec& p, const RVec& q, double alpha);

Mat thermal_state(const Mat& h, double beta);
RVec thermal_populations(const RVec& energies, double beta);
double free_energy(const Mat& h, double beta);

double trace_norm(const Mat& a);
double trace_distance(const Mat& a, const Mat& b);
double operator_norm(const Mat& a);

Mat dephase(const Mat& rho, const Mat& h);
double relative_entropy_of_coherence(const Mat& rho, const Mat& h);
// Projectors onto the eigenspaces of h, grouped within 1e-9 * ||h||.
std::vector<Mat> eigenprojectors(const Mat& h);

double expect(const Mat& op, const Mat& rho);

// Random instances for tests and verification suites.
Mat random_unitary(int d, std::mt19937_64& rng);
Mat random_density(int d, std::mt19937_64& rng, int rank = -1);
Mat random_hermitian(int d, std::mt19937_64& rng);
Mat expm_hermitian(const Mat& h, cplx factor);

// Column-stacking vectorization: vec(A X B) = (B^T (x) A) vec(X).
CVec vec(const Mat& x);
Mat unvec(const CVec& v, int d);
Mat sprepost(const Mat& a, const Mat& b);  // X -> A X B
Mat superop_of(const std::function<Mat(const Mat&)>& f, int d);
// D[L] X = L X L^dagger - {L^dagger L, X}/2
Mat dissipator(const Mat& L);
Mat hamiltonian_superop(const Mat& h);  // X -> -i[H, X]

// Pauli and ladder helpers.
Mat sigma_x();
Mat sigma_y();
Mat sigma_z();
Mat sigma_minus();
Mat destroy(int cut);

nlohmann::json to_json(const Mat& m, const Dims& dims);
Mat matrix_from_json(const nlohmann::json& j, Dims* dims = nullptr);

}  // namespace core
}  // namespace entroprod
