// gaussian.cpp — Lyapunov dynamics, Gaussian entropy production, Wigner rates and squeezed baths
#include "entroprod/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace entroprod::gaussian {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

RMat sym(const RMat& m) { return 0.5 * (m + m.transpose()); }

double scale_of(const RMat& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

RMat pinv(const RMat& m) { return m.completeOrthogonalDecomposition().pseudoInverse(); }

// Entropy of one symplectic eigenvalue (vacuum at 1/2).
double g_entropy(double nu) {
    const double up = nu + 0.5, down = nu - 0.5;
    if (down <= 1e-14) return up > 0.0 ? up * std::log(up) : 0.0;
    return up * std::log(up) - down * std::log(down);
}

// Symplectic matrix of the passive mode transformation a_i -> sum_j u_ij a_j.
RMat passive_symplectic(const Mat& u) {
    const int n = static_cast<int>(u.rows());
    RMat s = RMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            s(2 * i, 2 * j) = u(i, j).real();
            s(2 * i, 2 * j + 1) = -u(i, j).imag();
            s(2 * i + 1, 2 * j) = u(i, j).imag();
            s(2 * i + 1, 2 * j + 1) = u(i, j).real();
        }
    return s;
}

// Quadratic form G with beta (cosh 2r H + sinh 2r A) = X^T G X / 2 + const.
RMat gibbs_form(double omega, double beta, double r, double theta) {
    const double c = std::cosh(2 * r), s = std::sinh(2 * r);
    RMat g(2, 2);
    g << c + s * std::cos(theta), s * std::sin(theta), s * std::sin(theta), c - s * std::cos(theta);
    return beta * omega * g;
}

double energy_of(const RMat& cov, double omega) { return 0.5 * omega * (cov(0, 0) + cov(1, 1)); }

double asymmetry_of(const RMat& cov, double omega, double theta) {
    return 0.5 * omega * (std::cos(theta) * (cov(0, 0) - cov(1, 1)) + 2.0 * std::sin(theta) * cov(0, 1));
}

cplx aa_of(const RMat& cov) { return 0.5 * cplx(cov(0, 0) - cov(1, 1), 2.0 * cov(0, 1)); }

double entropy_of(const RMat& cov) {
    RVec nu = symplectic_eigenvalues(cov);
    double s = 0.0;
    for (int k = 0; k < nu.size(); ++k) s += g_entropy(nu(k));
    return s;
}

// S(rho || sigma) for zero-mean Gaussians with sigma = exp(-X^T G X / 2) / Z.
double gaussian_relent(const RMat& cov, const RMat& cov_sigma, const RMat& g) {
    return -entropy_of(cov) + entropy_of(cov_sigma) + 0.5 * (g * (cov - cov_sigma)).trace();
}

struct ModeOps {
    Mat a, b, H_S, A_S, H_E, A_E;
};

ModeOps mode_ops(double omega, double theta, int cut) {
    Mat a1 = core::destroy(cut), id = core::identity(cut);
    ModeOps o;
    o.a = core::kron(a1, id);
    o.b = core::kron(id, a1);
    const cplx e = std::exp(cplx(0, theta));
    auto energy = [&](const Mat& x) { return Mat(omega * (x.adjoint() * x + 0.5 * core::identity(cut * cut))); };
    auto asym = [&](const Mat& x) {
        Mat xd = x.adjoint();
        return Mat(0.5 * omega * (e * xd * xd + std::conj(e) * x * x));
    };
    o.H_S = energy(o.a);
    o.A_S = asym(o.a);
    o.H_E = energy(o.b);
    o.A_E = asym(o.b);
    return o;
}

Mat interaction(const Mat& a, const Mat& b, double phi) {
    const cplx e = std::exp(cplx(0, phi));
    return e * a.adjoint() * b + std::conj(e) * b.adjoint() * a;
}

}  // namespace

RMat symplectic_form(int modes) {
    RMat w = RMat::Zero(2 * modes, 2 * modes);
    for (int i = 0; i < modes; ++i) {
        w(2 * i, 2 * i + 1) = 1.0;
        w(2 * i + 1, 2 * i) = -1.0;
    }
    return w;
}

RVec default_parity(int dim) {
    RVec e(dim);
    for (int i = 0; i < dim; ++i) e(i) = i % 2 == 0 ? 1.0 : -1.0;
    return e;
}

RMat GaussianModel::A_irr() const {
    RMat e = E_parity.asDiagonal();
    return 0.5 * (A + e * A * e);
}

RMat GaussianModel::A_rev() const { return A - A_irr(); }

bool GaussianModel::stable() const {
    Eigen::EigenSolver<RMat> es(A, false);
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i).real() <= 0.0) return false;
    return true;
}

void GaussianModel::validate() const {
    const int n = dim();
    if (n == 0 || A.cols() != n || D.rows() != n || D.cols() != n || E_parity.size() != n)
        throw std::invalid_argument("gaussian model: inconsistent dimensions");
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_of(D))
        throw std::invalid_argument("gaussian model: D is not symmetric");
    Eigen::SelfAdjointEigenSolver<RMat> es(sym(D));
    if (es.eigenvalues().minCoeff() < -1e-12 * scale_of(D))
        throw std::invalid_argument("gaussian model: D is not positive semidefinite");
    for (int i = 0; i < n; ++i)
        if (std::abs(std::abs(E_parity(i)) - 1.0) > 0.0)
            throw std::invalid_argument("gaussian model: parity entries must be +1 or -1");
}

GaussianModel make_model(RMat A, RMat D, RVec parity) {
    GaussianModel m;
    m.E_parity = parity.size() == 0 ? default_parity(static_cast<int>(A.rows())) : std::move(parity);
    m.A = std::move(A);
    m.D = std::move(D);
    m.validate();
    return m;
}

void GaussianState::validate(double tol) const {
    const int n = dim();
    if (n == 0 || cov.cols() != n || mean.size() != n)
        throw std::invalid_argument("gaussian state: inconsistent dimensions");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > tol * scale_of(cov))
        throw std::invalid_argument("gaussian state: covariance is not symmetric");
    if (quantum) {
        if (n % 2 != 0) throw std::invalid_argument("gaussian state: quantum covariance needs even dimension");
        Mat c = sym(cov).cast<cplx>() + cplx(0, 0.5) * symplectic_form(n / 2).cast<cplx>();
        Eigen::SelfAdjointEigenSolver<Mat> es(c);
        if (es.eigenvalues().minCoeff() < -tol * scale_of(cov))
            throw std::invalid_argument("gaussian state: covariance violates the uncertainty principle");
    } else {
        Eigen::SelfAdjointEigenSolver<RMat> es(sym(cov));
        if (es.eigenvalues().minCoeff() < -tol * scale_of(cov))
            throw std::invalid_argument("gaussian state: covariance is not positive semidefinite");
    }
}

GaussianState thermal_state(int modes, double nbar) {
    if (nbar < 0.0) throw std::invalid_argument("thermal_state: negative occupation");
    GaussianState s;
    s.mean = RVec::Zero(2 * modes);
    s.cov = (nbar + 0.5) * RMat::Identity(2 * modes, 2 * modes);
    return s;
}

RMat squeezed_thermal_cov(double nbar, double r, double theta) {
    const double c = std::cosh(2 * r), s = std::sinh(2 * r);
    RMat cov(2, 2);
    cov << c - s * std::cos(theta), -s * std::sin(theta), -s * std::sin(theta), c + s * std::cos(theta);
    return (nbar + 0.5) * cov;
}

RMat lyapunov_steady(const RMat& A, const RMat& D) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || D.rows() != n || D.cols() != n)
        throw std::invalid_argument("lyapunov_steady: inconsistent dimensions");
    GaussianModel probe;
    probe.A = A;
    if (!probe.stable()) throw std::invalid_argument("lyapunov_steady: drift matrix is not stable");
    RMat id = RMat::Identity(n, n);
    RMat K = Eigen::kroneckerProduct(id, A).eval() + Eigen::kroneckerProduct(A, id).eval();
    RVec rhs = Eigen::Map<const RVec>(RMat(2.0 * D).data(), n * n);
    RVec x = K.partialPivLu().solve(rhs);
    RMat theta = sym(Eigen::Map<RMat>(x.data(), n, n));
    const double res = (A * theta + theta * A.transpose() - 2.0 * D).cwiseAbs().maxCoeff();
    if (!std::isfinite(res) || res > 1e-10 * scale_of(A) * scale_of(theta))
        throw std::runtime_error("lyapunov_steady: residual " + fmt(res) + " above tolerance");
    return theta;
}

GaussianState propagate(const GaussianModel& m, const GaussianState& s0, double t) {
    m.validate();
    s0.validate();
    if (s0.dim() != m.dim()) throw std::invalid_argument("propagate: dimension mismatch");
    RMat ss = lyapunov_steady(m.A, m.D);
    RMat e = RMat(-m.A * t).exp();
    GaussianState s = s0;
    s.mean = e * s0.mean;
    s.cov = sym(ss + e * (s0.cov - ss) * e.transpose());
    return s;
}

PiPhi pi_phi(const GaussianModel& m, const GaussianState& s) {
    m.validate();
    if (s.dim() != m.dim()) throw std::invalid_argument("pi_phi: dimension mismatch");
    const int n = m.dim();
    RMat Ai = m.A_irr();
    RMat Dinv = pinv(m.D);
    const double leak = ((RMat::Identity(n, n) - m.D * Dinv) * Ai).cwiseAbs().maxCoeff();
    if (leak > 1e-10 * scale_of(Ai))
        throw std::invalid_argument("pi_phi: irreversible drift lies outside the range of D");
    Eigen::LLT<RMat> llt(sym(s.cov));
    if (llt.info() != Eigen::Success) throw std::invalid_argument("pi_phi: covariance is not positive definite");
    RMat theta_inv = llt.solve(RMat::Identity(n, n));
    RVec drift = Ai * s.mean;
    const double mean_term = drift.dot(Dinv * drift);
    const double flux_term = (Ai.transpose() * Dinv * Ai * s.cov - Ai).trace();
    PiPhi r;
    r.sigma_dot = (m.D * theta_inv - Ai).trace() + mean_term + flux_term;
    r.phi = flux_term + mean_term;
    r.dS_dt = -m.A.trace() + (theta_inv * m.D).trace();
    return r;
}

RVec symplectic_eigenvalues(const RMat& cov) {
    const int n = static_cast<int>(cov.rows()) / 2;
    Eigen::EigenSolver<RMat> es(symplectic_form(n) * cov, false);
    std::vector<double> v;
    for (int i = 0; i < es.eigenvalues().size(); ++i) v.push_back(std::abs(es.eigenvalues()(i).imag()));
    std::sort(v.begin(), v.end());
    RVec out(n);
    for (int k = 0; k < n; ++k) out(k) = 0.5 * (v[2 * k] + v[2 * k + 1]);
    return out;
}

double wigner_entropy(const GaussianState& s) {
    return renyi2(s) + 0.5 * s.dim() * std::log(2.0 * std::numbers::pi * std::numbers::e);
}

double renyi2(const GaussianState& s) {
    const double det = s.cov.determinant();
    if (!(det > 0.0)) throw std::invalid_argument("renyi2: covariance is not positive definite");
    return 0.5 * std::log(det);
}

double von_neumann_entropy(const GaussianState& s) {
    s.validate();
    return entropy_of(s.cov);
}

GaussianModel thermal_damping_model(double omega, double gamma, double nbar) {
    if (gamma <= 0.0 || nbar < 0.0) throw std::invalid_argument("thermal_damping_model: invalid rate or occupation");
    RMat A(2, 2);
    A << 0.5 * gamma, -omega, omega, 0.5 * gamma;
    return make_model(A, 0.5 * gamma * (nbar + 0.5) * RMat::Identity(2, 2));
}

SingleModeRates single_mode_rates(double gamma, double nbar, double omega, const GaussianState& s) {
    s.validate();
    if (s.dim() != 2) throw std::invalid_argument("single_mode_rates: state must be a single mode");
    if (gamma <= 0.0 || nbar < 0.0) throw std::invalid_argument("single_mode_rates: invalid rate or occupation");
    SingleModeRates r;
    r.mean_n = 0.5 * (s.cov.trace() + s.mean.squaredNorm() - 1.0);
    r.phi = gamma * (r.mean_n - nbar) / (nbar + 0.5);
    r.Q_dot = omega * gamma * (r.mean_n - nbar);
    r.dS_dt = -gamma + 0.5 * gamma * (nbar + 0.5) * s.cov.inverse().trace();
    r.sigma_dot = r.phi + r.dS_dt;
    return r;
}

double wigner_temperature(double omega, double nbar) { return omega * (nbar + 0.5); }

double bose_occupation(double omega, double T) { return 1.0 / std::expm1(omega / T); }

void TwoModeNessSpec::validate() const {
    if (!(omega_a > 0.0 && omega_b > 0.0 && kappa_a > 0.0 && gamma_b > 0.0 && n_Tb >= 0.0))
        throw std::invalid_argument("two-mode spec: frequencies and rates must be positive, n_Tb >= 0");
}

GaussianModel two_mode_model(const TwoModeNessSpec& s) {
    s.validate();
    const double g2 = 2.0 * s.g_ab;
    RMat A(4, 4);
    A << s.kappa_a, -s.omega_a, 0, 0,
         s.omega_a, s.kappa_a, g2, 0,
         0, 0, s.gamma_b, -s.omega_b,
         g2, 0, s.omega_b, s.gamma_b;
    RVec d(4);
    d << 0.5 * s.kappa_a, 0.5 * s.kappa_a, s.gamma_b * (s.n_Tb + 0.5), s.gamma_b * (s.n_Tb + 0.5);
    return make_model(A, d.asDiagonal());
}

double critical_coupling(const TwoModeNessSpec& s) {
    return std::sqrt((s.kappa_a * s.kappa_a + s.omega_a * s.omega_a) * s.omega_b / (4.0 * s.omega_a));
}

double stability_boundary(const TwoModeNessSpec& s) {
    return std::sqrt((s.kappa_a * s.kappa_a + s.omega_a * s.omega_a) * (s.gamma_b * s.gamma_b + s.omega_b * s.omega_b) /
                     (4.0 * s.omega_a * s.omega_b));
}

TwoModeNess two_mode_ness(const TwoModeNessSpec& s) {
    GaussianModel m = two_mode_model(s);
    if (!m.stable())
        throw std::invalid_argument("two_mode_ness: unstable for g_ab = " + fmt(s.g_ab) + " (boundary " +
                                    fmt(stability_boundary(s)) + ")");
    TwoModeNess r;
    r.cov = lyapunov_steady(m.A, m.D);
    r.n_a = 0.5 * (r.cov(0, 0) + r.cov(1, 1) - 1.0);
    r.n_b = 0.5 * (r.cov(2, 2) + r.cov(3, 3) - 1.0);
    r.mu_a = 4.0 * s.kappa_a * r.n_a;
    r.mu_b = 2.0 * s.gamma_b * ((r.n_b + 0.5) / (s.n_Tb + 0.5) - 1.0);
    r.Pi = r.mu_a + r.mu_b;
    GaussianState st;
    st.mean = RVec::Zero(4);
    st.cov = r.cov;
    r.Pi_general = pi_phi(m, st).sigma_dot;
    return r;
}

std::string to_csv_ness(const std::vector<double>& g_ab, const std::vector<TwoModeNess>& rows) {
    if (g_ab.size() != rows.size()) throw std::invalid_argument("to_csv_ness: length mismatch");
    std::string out = "g_ab,n_a,n_b,Pi,mu_a,mu_b\n";
    for (size_t i = 0; i < rows.size(); ++i)
        out += fmt(g_ab[i]) + "," + fmt(rows[i].n_a) + "," + fmt(rows[i].n_b) + "," + fmt(rows[i].Pi) + "," +
               fmt(rows[i].mu_a) + "," + fmt(rows[i].mu_b) + "\n";
    return out;
}

void validate_conservation(const SqueezedScenario& sc, double tol) {
    const int cut = 8;
    ModeOps o = mode_ops(sc.omega, sc.theta, cut);
    Mat V = interaction(o.a, o.b, sc.phi);
    Mat quanta = o.a.adjoint() * o.a + o.b.adjoint() * o.b;
    Mat pairs = o.a * o.a + o.b * o.b;
    // Compress to levels whose commutators do not touch the truncation edge.
    std::vector<int> keep;
    for (int na = 0; na < cut; ++na)
        for (int nb = 0; nb < cut; ++nb)
            if (na < cut - 3 && nb < cut - 3) keep.push_back(na * cut + nb);
    auto interior = [&](const Mat& m) {
        double worst = 0.0;
        for (int i : keep)
            for (int j : keep) worst = std::max(worst, std::abs(m(i, j)));
        return worst;
    };
    if (interior(core::commutator(V, quanta)) > tol)
        throw std::invalid_argument("squeezed_sigma: interaction does not conserve the number of quanta");
    if (interior(core::commutator(V, pairs)) > tol)
        throw std::invalid_argument("squeezed_sigma: interaction does not conserve asymmetry (phi = " + fmt(sc.phi) +
                                    ")");
}

namespace {

// cosh 2r H + sinh 2r A on one truncated mode.
Mat gibbs_generator(double omega, double r, double theta, int cut) {
    Mat a = core::destroy(cut), ad = a.adjoint();
    const cplx e = std::exp(cplx(0, theta));
    Mat H = omega * (ad * a + 0.5 * core::identity(cut));
    Mat A = 0.5 * omega * (e * ad * ad + std::conj(e) * a * a);
    return std::cosh(2 * r) * H + std::sinh(2 * r) * A;
}

double log_partition(const Mat& K, double beta) {
    core::Eigh eh = core::eigh(K);
    const double e0 = eh.values(0);
    double z = 0.0;
    for (int i = 0; i < eh.values.size(); ++i) z += std::exp(-beta * (eh.values(i) - e0));
    return std::log(z) - beta * e0;
}

// S(rho || exp(-beta K) / Z) using the exact logarithm of the Gibbs state.
double gibbs_relent(const Mat& rho, const Mat& K, double beta, double log_z) {
    return -core::von_neumann_entropy(rho) + beta * core::expect(K, rho) + log_z;
}

}  // namespace

Mat squeezed_gibbs_fock(double omega, double beta, double r, double theta, int cut) {
    core::Eigh eh = core::eigh(gibbs_generator(omega, r, theta, cut));
    const double e0 = eh.values(0);
    RVec w(cut);
    for (int i = 0; i < cut; ++i) w(i) = std::exp(-beta * (eh.values(i) - e0));
    Mat rho = eh.vectors * (w / w.sum()).cast<cplx>().asDiagonal() * eh.vectors.adjoint();
    return 0.5 * (rho + rho.adjoint());
}

SqueezedSigma squeezed_sigma(const SqueezedScenario& sc, const Mat& rho_S) {
    validate_conservation(sc);
    const int cut = sc.fock_cut;
    if (rho_S.rows() != cut) throw std::invalid_argument("squeezed_sigma: rho_S must be fock_cut x fock_cut");
    core::check_density(rho_S);
    ModeOps o = mode_ops(sc.omega, sc.theta, cut);
    Mat V = interaction(o.a, o.b, sc.phi);
    Mat U = core::expm_hermitian(V, cplx(0, -sc.g_t));
    Mat rho_E = squeezed_gibbs_fock(sc.omega, sc.beta, sc.r, sc.theta, cut);
    Mat rho0 = core::kron(rho_S, rho_E);
    Mat rho1 = U * rho0 * U.adjoint();
    rho1 = 0.5 * (rho1 + rho1.adjoint());
    const Dims dims{cut, cut};
    Mat s1 = core::partial_trace(rho1, dims, {0});
    Mat e1 = core::partial_trace(rho1, dims, {1});
    const double c = std::cosh(2 * sc.r), s = std::sinh(2 * sc.r);
    auto delta = [&](const Mat& op) { return core::expect(op, rho1) - core::expect(op, rho0); };

    SqueezedSigma out;
    out.dS_S = core::von_neumann_entropy(s1) - core::von_neumann_entropy(rho_S);
    out.dH_S = delta(o.H_S);
    out.dA_S = delta(o.A_S);
    out.dQ_E = delta(o.H_E);
    out.dA_E = delta(o.A_E);
    out.sigma_affinity = out.dS_S - sc.beta * (c * out.dH_S + s * out.dA_S);
    Mat K = gibbs_generator(sc.omega, sc.r, sc.theta, cut);
    const double log_z = log_partition(K, sc.beta);
    out.sigma_relent = gibbs_relent(rho_S, K, sc.beta, log_z) - gibbs_relent(s1, K, sc.beta, log_z);
    out.sigma_bath = out.dS_S + sc.beta * (c * out.dQ_E + s * out.dA_E);
    out.sigma_info = core::mutual_information(rho1, dims, {0}) + gibbs_relent(e1, K, sc.beta, log_z);
    Mat quanta = o.a.adjoint() * o.a + o.b.adjoint() * o.b;
    Mat pairs = o.a * o.a + o.b * o.b;
    out.quanta_change = std::abs(delta(quanta));
    out.asymmetry_change = std::abs((pairs * rho1).trace() - (pairs * rho0).trace());
    return out;
}

SqueezedSigma squeezed_sigma(const SqueezedScenario& sc, const GaussianState& st) {
    validate_conservation(sc);
    st.validate();
    if (st.dim() != 2 || st.mean.cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("squeezed_sigma: system must be a zero-mean single-mode Gaussian");
    const double nbar = 1.0 / std::expm1(sc.beta * sc.omega);
    RMat cov_E = squeezed_thermal_cov(nbar, sc.r, sc.theta);
    RMat cov0 = RMat::Zero(4, 4);
    cov0.topLeftCorner(2, 2) = st.cov;
    cov0.bottomRightCorner(2, 2) = cov_E;
    const double cg = std::cos(sc.g_t), sg = std::sin(sc.g_t);
    Mat u(2, 2);
    u << cg, cplx(0, -1) * std::exp(cplx(0, sc.phi)) * sg, cplx(0, -1) * std::exp(cplx(0, -sc.phi)) * sg, cg;
    RMat S = passive_symplectic(u);
    RMat cov1 = sym(S * cov0 * S.transpose());
    RMat s1 = cov1.topLeftCorner(2, 2), e1 = cov1.bottomRightCorner(2, 2);
    const double c = std::cosh(2 * sc.r), s = std::sinh(2 * sc.r);

    SqueezedSigma out;
    out.dS_S = entropy_of(s1) - entropy_of(st.cov);
    out.dH_S = energy_of(s1, sc.omega) - energy_of(st.cov, sc.omega);
    out.dA_S = asymmetry_of(s1, sc.omega, sc.theta) - asymmetry_of(st.cov, sc.omega, sc.theta);
    out.dQ_E = energy_of(e1, sc.omega) - energy_of(cov_E, sc.omega);
    out.dA_E = asymmetry_of(e1, sc.omega, sc.theta) - asymmetry_of(cov_E, sc.omega, sc.theta);
    out.sigma_affinity = out.dS_S - sc.beta * (c * out.dH_S + s * out.dA_S);
    RMat G = gibbs_form(sc.omega, sc.beta, sc.r, sc.theta);
    out.sigma_relent = gaussian_relent(st.cov, cov_E, G) - gaussian_relent(s1, cov_E, G);
    out.sigma_bath = out.dS_S + sc.beta * (c * out.dQ_E + s * out.dA_E);
    const double mutual = entropy_of(s1) + entropy_of(e1) - entropy_of(cov1);
    out.sigma_info = mutual + gaussian_relent(e1, cov_E, G);
    out.quanta_change = std::abs(0.5 * (cov1.trace() - cov0.trace()));
    out.asymmetry_change = std::abs(aa_of(s1) + aa_of(e1) - aa_of(st.cov) - aa_of(cov_E));
    return out;
}

}  // namespace entroprod::gaussian
