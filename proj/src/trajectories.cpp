// trajectories.cpp — two-point measurement ensembles, fluctuation theorems and quench statistics
#include "entroprod/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

namespace entroprod::trajectories {

using namespace entroprod::core;
using maps::Episode;

namespace {

// Eigendecomposition with decreasing eigenvalues.
Eigh eigh_desc(const Mat& h) {
    Eigh e = eigh(h);
    const int n = static_cast<int>(e.values.size());
    Eigh out{RVec(n), Mat(n, n)};
    for (int i = 0; i < n; ++i) {
        out.values(i) = e.values(n - 1 - i);
        out.vectors.col(i) = e.vectors.col(n - 1 - i);
    }
    return out;
}

RVec probs_in_basis(const Mat& rho, const Mat& B) {
    Mat r = B.adjoint() * rho * B;
    RVec p(r.rows());
    for (int i = 0; i < r.rows(); ++i) p(i) = std::max(0.0, std::real(r(i, i)));
    return p;
}

RMat transition_matrix(const Mat& final_basis, const Mat& U, const Mat& initial_basis) {
    Mat a = final_basis.adjoint() * U * initial_basis;
    return a.cwiseAbs2();
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

double log_ratio(double a, double b) {
    if (b <= 0.0) return kInf;
    return std::log(a / b);
}

void require_thermal_marginal(const Mat& rho, const Mat& H, double beta, double tol, const char* who) {
    if (trace_distance(rho, thermal_state(H, beta)) > tol)
        throw std::invalid_argument(std::string(who) + ": marginal is not thermal at the given beta");
}

}  // namespace

const char* to_string(BackwardChoice c) {
    switch (c) {
        case BackwardChoice::BathReset: return "BathReset";
        case BackwardChoice::CorrelationsDestroyed: return "CorrelationsDestroyed";
        case BackwardChoice::PostMeasurementState: return "PostMeasurementState";
        case BackwardChoice::BothReset: return "BothReset";
    }
    return "?";
}

BackwardChoice backward_choice_from_string(const std::string& s) {
    for (auto c : {BackwardChoice::BathReset, BackwardChoice::CorrelationsDestroyed,
                   BackwardChoice::PostMeasurementState, BackwardChoice::BothReset})
        if (s == to_string(c)) return c;
    throw std::invalid_argument("unknown backward choice: " + s);
}

double PathEnsemble::total_forward() const {
    double s = 0.0;
    for (const auto& p : paths) s += p.p_forward;
    return s;
}

double PathEnsemble::mean_sigma() const {
    double s = 0.0;
    for (const auto& p : paths)
        if (p.p_forward > 0.0) s += p.p_forward * p.sigma;
    return s;
}

double PathEnsemble::exp_minus_sigma() const {
    double s = 0.0;
    for (const auto& p : paths)
        if (p.p_forward > 0.0 && !std::isinf(p.sigma)) s += p.p_forward * std::exp(-p.sigma);
    return s;
}

TpmBases tpm_bases(const Episode& ep) {
    maps::Evolved ev = maps::evolve(ep);
    TpmBases b;
    Eigh s = eigh_desc(ep.rho_S), e = eigh_desc(ep.rho_E);
    Eigh s1 = eigh_desc(ev.rho_S), e1 = eigh_desc(ev.rho_E);
    b.p = s.values.cwiseMax(0.0);
    b.q = e.values.cwiseMax(0.0);
    b.p1 = s1.values.cwiseMax(0.0);
    b.q1 = e1.values.cwiseMax(0.0);
    b.n_vecs = s.vectors;
    b.nu_vecs = e.vectors;
    b.m_vecs = s1.vectors;
    b.mu_vecs = e1.vectors;
    return b;
}

PathEnsemble tpm_ensemble(const Episode& ep) {
    const int dS = ep.d_S(), dE = ep.d_E();
    if (dS * dE > kMaxEnumerationDim)
        throw std::invalid_argument("tpm_ensemble: total dimension exceeds the enumeration cap of 64");
    PathEnsemble ens;
    ens.bases = tpm_bases(ep);
    const auto& b = ens.bases;
    RMat T = transition_matrix(kron(b.m_vecs, b.mu_vecs), ep.U, kron(b.n_vecs, b.nu_vecs));
    ens.paths.reserve(static_cast<size_t>(dS * dE) * dS * dE);
    for (int n = 0; n < dS; ++n)
        for (int nu = 0; nu < dE; ++nu)
            for (int m = 0; m < dS; ++m)
                for (int mu = 0; mu < dE; ++mu) {
                    Trajectory t;
                    t.outcome = {n, nu, m, mu};
                    t.p_forward = T(m * dE + mu, n * dE + nu) * b.p(n) * b.q(nu);
                    ens.paths.push_back(std::move(t));
                }
    return ens;
}

PathEnsemble backward_ensemble(const Episode& ep, BackwardChoice choice) {
    PathEnsemble ens = tpm_ensemble(ep);
    const auto& b = ens.bases;
    const int dS = ep.d_S(), dE = ep.d_E();
    maps::Evolved ev = maps::evolve(ep);
    Mat final_basis = kron(b.m_vecs, b.mu_vecs);
    RMat T = transition_matrix(final_basis, ep.U, kron(b.n_vecs, b.nu_vecs));
    RVec tilde(dS * dE);
    switch (choice) {
        case BackwardChoice::BathReset: {
            RVec qe = probs_in_basis(ep.rho_E, b.mu_vecs);
            for (int m = 0; m < dS; ++m)
                for (int mu = 0; mu < dE; ++mu) tilde(m * dE + mu) = b.p1(m) * qe(mu);
            break;
        }
        case BackwardChoice::CorrelationsDestroyed:
            for (int m = 0; m < dS; ++m)
                for (int mu = 0; mu < dE; ++mu) tilde(m * dE + mu) = b.p1(m) * b.q1(mu);
            break;
        case BackwardChoice::PostMeasurementState:
            tilde = probs_in_basis(ev.rho_SE, final_basis);
            break;
        case BackwardChoice::BothReset: {
            RVec ps = probs_in_basis(ep.rho_S, b.m_vecs), qe = probs_in_basis(ep.rho_E, b.mu_vecs);
            for (int m = 0; m < dS; ++m)
                for (int mu = 0; mu < dE; ++mu) tilde(m * dE + mu) = ps(m) * qe(mu);
            break;
        }
    }
    ens.has_backward = true;
    for (auto& t : ens.paths) {
        const int n = t.outcome[0], nu = t.outcome[1], m = t.outcome[2], mu = t.outcome[3];
        const double r = tilde(m * dE + mu);
        t.p_backward = T(m * dE + mu, n * dE + nu) * r;
        const double init = b.p(n) * b.q(nu);
        if (t.p_forward > 0.0) {
            t.sigma = log_ratio(init, r);
            if (std::isinf(t.sigma)) ++ens.infinite_sigma;
        } else {
            t.sigma = (init > 0.0 && r > 0.0) ? std::log(init / r) : 0.0;
        }
    }
    return ens;
}

std::vector<double> stochastic_sigma(const PathEnsemble& fwd, const PathEnsemble& bwd) {
    if (!bwd.has_backward || fwd.paths.size() != bwd.paths.size())
        throw std::invalid_argument("stochastic_sigma: ensembles are not matched");
    std::vector<double> out(fwd.paths.size());
    for (size_t i = 0; i < out.size(); ++i) {
        if (fwd.paths[i].outcome != bwd.paths[i].outcome)
            throw std::invalid_argument("stochastic_sigma: ensembles are not matched");
        const double pf = fwd.paths[i].p_forward, pb = bwd.paths[i].p_backward;
        if (pf > 0.0) out[i] = log_ratio(pf, pb);
        else out[i] = bwd.paths[i].sigma;
    }
    return out;
}

double coherence_in_basis(const Mat& rho, const Mat& B) {
    return shannon_entropy(probs_in_basis(rho, B)) - von_neumann_entropy(rho);
}

double ScalarDistribution::total() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
}

double ScalarDistribution::moment(int k) const {
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) s += probs[i] * std::pow(values[i], k);
    return s;
}

double ScalarDistribution::mean() const { return moment(1); }

double ScalarDistribution::variance() const {
    const double m = mean();
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) s += probs[i] * (values[i] - m) * (values[i] - m);
    return s;
}

double ScalarDistribution::exp_average(double eta) const {
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) s += probs[i] * std::exp(-eta * values[i]);
    return s;
}

ScalarDistribution ScalarDistribution::from_pairs(std::vector<std::pair<double, double>> pairs, double tol) {
    std::sort(pairs.begin(), pairs.end());
    ScalarDistribution d;
    double wsum = 0.0;
    for (const auto& [v, p] : pairs) {
        if (p <= 0.0) continue;
        if (!d.values.empty() && std::abs(v - d.values.back()) <= tol * std::max(1.0, std::abs(v))) {
            double& last = d.values.back();
            last = (last * wsum + v * p) / (wsum + p);
            wsum += p;
            d.probs.back() += p;
        } else {
            d.values.push_back(v);
            d.probs.push_back(p);
            wsum = p;
        }
    }
    return d;
}

std::string to_csv(const ScalarDistribution& d) {
    std::string s = "value,probability\n";
    for (size_t i = 0; i < d.values.size(); ++i) s += fmt(d.values[i]) + "," + fmt(d.probs[i]) + "\n";
    return s;
}

std::string to_csv(const CgfCurve& c) {
    std::string s = "lambda,K\n";
    for (size_t i = 0; i < c.lambda.size(); ++i) s += fmt(c.lambda[i]) + "," + fmt(c.K[i]) + "\n";
    return s;
}

WorkStatistics work_distribution(const Mat& H_i, const Mat& H_f, const Mat& V, double beta) {
    if (H_i.rows() != H_f.rows() || V.rows() != H_i.rows())
        throw std::invalid_argument("work_distribution: dimension mismatch");
    check_unitary(V);
    Eigh ei = eigh(H_i), ef = eigh(H_f);
    RVec pi = thermal_populations(ei.values, beta), pf = thermal_populations(ef.values, beta);
    RMat T = transition_matrix(ef.vectors, V, ei.vectors);  // T(m, n) = |<m_f|V|n_i>|^2
    const int d = static_cast<int>(H_i.rows());
    std::vector<std::pair<double, double>> fw, bw;
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) {
            const double w = ef.values(m) - ei.values(n);
            fw.emplace_back(w, T(m, n) * pi(n));
            bw.emplace_back(-w, T(m, n) * pf(m));
        }
    WorkStatistics ws;
    ws.forward = ScalarDistribution::from_pairs(fw);
    ws.backward = ScalarDistribution::from_pairs(bw);
    ws.dF = free_energy(H_f, beta) - free_energy(H_i, beta);
    Mat rho_i = thermal_state(H_i, beta);
    Mat rho1 = V * rho_i * V.adjoint();
    ws.mean_work = expect(H_f, rho1) - expect(H_i, rho_i);
    ws.lag = relative_entropy(rho1, thermal_state(H_f, beta));
    ws.sigma_mean = beta * (ws.forward.mean() - ws.dF);
    ws.jarzynski = ws.forward.exp_average(beta);
    const double scale = std::max(1.0, ef.values.cwiseAbs().maxCoeff() + ei.values.cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (size_t i = 0; i < ws.forward.values.size(); ++i) {
        const double w = ws.forward.values[i];
        auto it = std::find_if(ws.backward.values.begin(), ws.backward.values.end(),
                               [&](double x) { return std::abs(x + w) <= 1e-10 * scale; });
        if (it == ws.backward.values.end()) continue;
        const double pb = ws.backward.probs[it - ws.backward.values.begin()];
        if (ws.forward.probs[i] < 1e-300 || pb < 1e-300) continue;
        worst = std::max(worst, std::abs(std::log(ws.forward.probs[i] / pb) - beta * (w - ws.dF)));
    }
    ws.crooks_max_residual = worst;
    ws.crooks_ok = worst <= 1e-9;
    return ws;
}

CgfCurve cgf(const Mat& H_i, const Mat& H_f, const Mat& V, double beta, const std::vector<double>& grid) {
    WorkStatistics ws = work_distribution(H_i, H_f, V, beta);
    const double Fi = free_energy(H_i, beta), Ff = free_energy(H_f, beta);
    const int d = static_cast<int>(H_i.rows());
    Mat rho_i = thermal_state(H_i, beta);
    std::vector<std::pair<double, double>> sig;
    for (size_t k = 0; k < ws.forward.values.size(); ++k)
        sig.emplace_back(beta * (ws.forward.values[k] - ws.dF), ws.forward.probs[k]);
    ScalarDistribution s = ScalarDistribution::from_pairs(sig);
    CgfCurve c;
    for (double lam : grid) {
        Mat a = expm_hermitian(H_f - Ff * identity(d), cplx(-beta * lam, 0.0));
        Mat b = expm_hermitian(H_i - Fi * identity(d), cplx(beta * lam, 0.0));
        double tr = std::real((V.adjoint() * a * V * b * rho_i).trace());
        c.lambda.push_back(lam);
        c.K.push_back(std::log(tr));
        c.K_alt.push_back(std::log(s.exp_average(lam)));
        c.max_route_gap = std::max(c.max_route_gap, std::abs(c.K.back() - c.K_alt.back()));
    }
    const double m = s.mean();
    double mu2 = 0.0, mu3 = 0.0, mu4 = 0.0;
    for (size_t i = 0; i < s.values.size(); ++i) {
        const double x = s.values[i] - m;
        mu2 += s.probs[i] * x * x;
        mu3 += s.probs[i] * x * x * x;
        mu4 += s.probs[i] * x * x * x * x;
    }
    c.kappa[0] = m;
    c.kappa[1] = mu2;
    c.kappa[2] = mu3;
    c.kappa[3] = mu4 - 3.0 * mu2 * mu2;
    return c;
}

std::vector<double> cgf_renyi(const Mat& H_i, const Mat& H_f, const Mat& V, double beta,
                              const std::vector<double>& grid) {
    Mat rho1 = V * thermal_state(H_i, beta) * V.adjoint();
    Mat rho_f = thermal_state(H_f, beta);
    std::vector<double> out;
    for (double lam : grid) {
        if (lam == 1.0) {
            out.push_back(0.0);
            continue;
        }
        if (lam > 0.0) {
            out.push_back((lam - 1.0) * renyi_divergence(rho_f, rho1, lam));
            continue;
        }
        Mat a = herm_fun(rho_f, [lam](double x) { return std::pow(std::max(x, 0.0), lam); });
        Mat b = herm_fun(rho1, [lam](double x) { return std::pow(std::max(x, 0.0), 1.0 - lam); });
        out.push_back(std::log(std::real((a * b).trace())));
    }
    return out;
}

double relative_entropy_variance(const Mat& rho, const Mat& sigma) {
    auto safe_log = [](double x) {
        if (x <= 0.0) throw std::invalid_argument("relative_entropy_variance: sigma must be full rank");
        return std::log(x);
    };
    Mat L = herm_fun(rho, [](double x) { return x > 1e-300 ? std::log(x) : 0.0; }) - herm_fun(sigma, safe_log);
    const double D = relative_entropy(rho, sigma);
    return std::real((rho * L * L).trace()) - D * D;
}

Quadrature gauss_legendre01(int n) {
    Quadrature q;
    q.x.resize(n);
    q.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        q.x[i] = 0.5 * (1.0 - z);
        q.w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return q;
}

double y_covariance(const Mat& rho, const Mat& A, double y) {
    Mat ry = herm_fun(rho, [y](double x) { return std::pow(std::max(x, 0.0), y); });
    Mat r1y = herm_fun(rho, [y](double x) { return std::pow(std::max(x, 0.0), 1.0 - y); });
    const double m = expect(A, rho);
    return std::real((A * ry * A * r1y).trace()) - m * m;
}

double skew_information(const Mat& rho, const Mat& A, double y) {
    Mat ry = herm_fun(rho, [y](double x) { return std::pow(std::max(x, 0.0), y); });
    Mat r1y = herm_fun(rho, [y](double x) { return std::pow(std::max(x, 0.0), 1.0 - y); });
    return -0.5 * std::real((commutator(ry, A) * commutator(r1y, A)).trace());
}

namespace {

// cov^y(A, A) in the eigenbasis of rho: sum_ij |A_ij|^2 p_j^y p_i^{1-y} - <A>^2.
struct YCov {
    RVec p;
    RMat a2;
    double mean;

    YCov(const Mat& rho, const Mat& A) {
        Eigh e = eigh(rho);
        p = e.values.cwiseMax(1e-300);
        Mat a = e.vectors.adjoint() * A * e.vectors;
        a2 = a.cwiseAbs2();
        mean = 0.0;
        for (int i = 0; i < p.size(); ++i) mean += p(i) * std::real(a(i, i));
    }
    double operator()(double y) const {
        double s = 0.0;
        for (int i = 0; i < p.size(); ++i)
            for (int j = 0; j < p.size(); ++j) s += a2(i, j) * std::pow(p(j), y) * std::pow(p(i), 1.0 - y);
        return s - mean * mean;
    }
    double kappa3() const {
        double s = 0.0;
        for (int i = 0; i < p.size(); ++i)
            for (int j = 0; j < p.size(); ++j) s += a2(i, j) * p(i) * std::log(p(i) / p(j));
        return s;
    }
    double kappa4() const {
        double s = 0.0;
        for (int i = 0; i < p.size(); ++i)
            for (int j = 0; j < p.size(); ++j) {
                double l = std::log(p(i) / p(j));
                s += a2(i, j) * p(i) * l * l;
            }
        return s;
    }
};

}  // namespace

QuenchReport quench_report(const std::function<Mat(double)>& H, double lambda0, double dlambda, double beta) {
    QuenchReport r;
    const Mat Hi = H(lambda0), Hf = H(lambda0 + dlambda);
    const Mat dH = Hf - Hi;
    const double scale = std::max(1.0, operator_norm(Hi));
    r.commuting = operator_norm(commutator(Hi, dH)) <= 1e-12 * scale * std::max(1.0, operator_norm(dH));
    if (dlambda == 0.0) return r;
    const Mat rho_i = thermal_state(Hi, beta), rho_f = thermal_state(Hf, beta);
    r.sigma_exact = relative_entropy(rho_i, rho_f);
    Quadrature q = gauss_legendre01(32);
    YCov cov(rho_i, dH);
    double yint = 0.0, qint = 0.0;
    for (size_t k = 0; k < q.x.size(); ++k) {
        yint += q.w[k] * y_covariance(rho_i, dH, q.x[k]);
        qint += q.w[k] * skew_information(rho_i, Hf, q.x[k]);
    }
    const double b2 = beta * beta;
    const double var = expect(dH * dH, rho_i) - std::pow(expect(dH, rho_i), 2);
    r.y_cov_integral = yint;
    r.sigma_second_order = 0.5 * b2 * yint;
    r.variance_term = 0.5 * b2 * var;
    r.Q_skew = 0.5 * b2 * qint;
    r.var_sigma = b2 * var;
    r.identity_residual = r.sigma_second_order - (r.variance_term - r.Q_skew);
    r.fdr_residual = r.sigma_second_order - (0.5 * r.var_sigma - r.Q_skew);
    r.kappa3 = b2 * cov.kappa3();
    r.kappa4 = b2 * cov.kappa4();
    if (std::abs(r.sigma_exact - r.sigma_second_order) > 0.05 * r.sigma_exact)
        r.warnings.push_back("second-order expansion differs from S(rho_i||rho_f) by more than 5%; reduce dlambda");
    return r;
}

CgfCurve quench_cgf(const Mat& H_i, const Mat& H_f, double beta, const std::vector<double>& grid) {
    const Mat rho_i = thermal_state(H_i, beta);
    YCov cov(rho_i, H_f - H_i);
    Quadrature q = gauss_legendre01(32);
    const double b2 = beta * beta;
    CgfCurve c;
    for (double lam : grid) {
        double outer = 0.0;
        for (size_t a = 0; a < q.x.size(); ++a) {
            const double x = lam * q.x[a], len = 1.0 - 2.0 * x;
            double inner = 0.0;
            for (size_t b = 0; b < q.x.size(); ++b) inner += q.w[b] * cov(x + len * q.x[b]);
            outer += q.w[a] * len * inner;
        }
        c.lambda.push_back(lam);
        c.K.push_back(-0.5 * b2 * lam * outer);
    }
    c.K_alt = cgf(H_i, H_f, identity(static_cast<int>(H_i.rows())), beta, grid).K;
    for (size_t i = 0; i < c.K.size(); ++i) c.max_route_gap = std::max(c.max_route_gap, std::abs(c.K[i] - c.K_alt[i]));
    double yint = 0.0;
    for (size_t k = 0; k < q.x.size(); ++k) yint += q.w[k] * cov(q.x[k]);
    c.kappa[0] = 0.5 * b2 * yint;
    c.kappa[1] = 0.5 * b2 * (cov(0.0) + cov(1.0));
    c.kappa[2] = b2 * cov.kappa3();
    c.kappa[3] = b2 * cov.kappa4();
    return c;
}

CorrelatedTpm correlated_tpm(const Mat& rho_AB, const Mat& H_A, const Mat& H_B, const Mat& U, double beta_A,
                             double beta_B, double tol) {
    const int dA = static_cast<int>(H_A.rows()), dB = static_cast<int>(H_B.rows());
    if (rho_AB.rows() != dA * dB || U.rows() != dA * dB) throw std::invalid_argument("correlated_tpm: dimension mismatch");
    check_density(rho_AB, tol);
    const Dims d{dA, dB};
    require_thermal_marginal(partial_trace(rho_AB, d, {0}), H_A, beta_A, tol, "correlated_tpm");
    require_thermal_marginal(partial_trace(rho_AB, d, {1}), H_B, beta_B, tol, "correlated_tpm");
    if (!maps::is_strict_energy_conserving(U, H_A, H_B).conserving)
        throw std::invalid_argument("correlated_tpm: U is not strictly energy conserving");

    Eigh ea = eigh(H_A), eb = eigh(H_B);
    Mat basis = kron(ea.vectors, eb.vectors);
    RVec p = probs_in_basis(rho_AB, basis);
    RVec pA = RVec::Zero(dA), pB = RVec::Zero(dB);
    for (int a = 0; a < dA; ++a)
        for (int b = 0; b < dB; ++b) {
            pA(a) += p(a * dB + b);
            pB(b) += p(a * dB + b);
        }
    auto stoch_mi = [&](int a, int b) {
        const double j = p(a * dB + b);
        return j > 0.0 ? std::log(j / (pA(a) * pB(b))) : -kInf;
    };
    RMat T = transition_matrix(basis, U, basis);
    CorrelatedTpm out;
    double worst = 0.0;
    for (int na = 0; na < dA; ++na)
        for (int nb = 0; nb < dB; ++nb)
            for (int ma = 0; ma < dA; ++ma)
                for (int mb = 0; mb < dB; ++mb) {
                    const int n = na * dB + nb, m = ma * dB + mb;
                    const double P = T(m, n) * p(n);
                    if (P <= 0.0) continue;
                    Trajectory t;
                    t.outcome = {na, nb, ma, mb};
                    t.p_forward = P;
                    t.p_backward = T(m, n) * p(m);
                    const double q = eb.values(mb) - eb.values(nb);
                    const double dI = stoch_mi(ma, mb) - stoch_mi(na, nb);
                    t.sigma = (beta_B - beta_A) * q - dI;
                    if (t.p_backward > 0.0) worst = std::max(worst, std::abs(std::log(P / t.p_backward) - t.sigma));
                    out.mean_q_B += P * q;
                    if (!std::isinf(dI)) out.mean_dI += P * dI;
                    if (!std::isinf(t.sigma)) out.ft_average += P * std::exp(-t.sigma);
                    out.q_B.push_back(q);
                    out.dI.push_back(dI);
                    out.paths.push_back(std::move(t));
                }
    Mat dephased = basis * p.cast<cplx>().asDiagonal() * basis.adjoint();
    Mat hb = kron(identity(dA), H_B);
    out.dephased_heat = expect(hb, U * dephased * U.adjoint() - dephased);
    out.unitary_heat = expect(hb, U * rho_AB * U.adjoint() - rho_AB);
    out.ft_max_ratio_residual = worst;
    out.bound_ok = (beta_B - beta_A) * out.mean_q_B >= out.mean_dI - 1e-10;
    return out;
}

AugmentedTpm augmented_tpm(const Mat& rho_AB, const Mat& U, const Mat& H_A, const Mat& H_B) {
    const int dA = static_cast<int>(H_A.rows()), dB = static_cast<int>(H_B.rows());
    if (rho_AB.rows() != dA * dB || U.rows() != dA * dB) throw std::invalid_argument("augmented_tpm: dimension mismatch");
    check_density(rho_AB);
    Eigh es = eigh(rho_AB);
    Eigh ea = eigh(H_A), eb = eigh(H_B);
    Mat basis = kron(ea.vectors, eb.vectors);
    RMat after = transition_matrix(basis, U, es.vectors);  // |<m|U|s>|^2
    RMat before = (basis.adjoint() * es.vectors).cwiseAbs2();  // |<n|s>|^2
    AugmentedTpm out;
    const int D = dA * dB;
    for (int s = 0; s < D; ++s) {
        const double ps = std::max(es.values(s), 0.0);
        if (ps == 0.0) continue;
        for (int n = 0; n < D; ++n) {
            if (before(n, s) == 0.0) continue;
            for (int m = 0; m < D; ++m) {
                const double P = after(m, s) * ps * before(n, s);
                if (P <= 0.0) continue;
                Trajectory t;
                t.outcome = {s, n / dB, n % dB, m / dB, m % dB};
                t.p_forward = P;
                const double q = eb.values(m % dB) - eb.values(n % dB);
                out.total += P;
                out.mean_q_B += P * q;
                out.q_B.push_back(q);
                out.paths.push_back(std::move(t));
            }
        }
    }
    return out;
}

MeasurementRun measurement_trajectories(const CVec& psi0, const std::vector<Mat>& bases,
                                        const std::vector<Mat>& unitaries, std::uint64_t seed, int samples) {
    if (bases.empty()) throw std::invalid_argument("measurement_trajectories: no measurement bases");
    if (unitaries.size() + 1 != bases.size())
        throw std::invalid_argument("measurement_trajectories: need one unitary between consecutive measurements");
    const int d = static_cast<int>(psi0.size());
    if (std::abs(psi0.norm() - 1.0) > 1e-9) throw std::invalid_argument("measurement_trajectories: psi0 not normalized");
    for (const Mat& b : bases) {
        if (b.rows() != d || b.cols() != d) throw std::invalid_argument("measurement_trajectories: basis size mismatch");
        if ((b.adjoint() * b - identity(d)).cwiseAbs().maxCoeff() > 1e-9)
            throw std::invalid_argument("measurement_trajectories: basis is not orthonormal");
    }
    for (const Mat& u : unitaries) check_unitary(u);

    MeasurementRun run;
    run.seed = seed;
    run.p0 = (bases[0].adjoint() * psi0).cwiseAbs2();
    std::vector<RMat> T;
    run.M = RMat::Identity(d, d);
    for (size_t j = 0; j < unitaries.size(); ++j) {
        T.push_back(transition_matrix(bases[j + 1], unitaries[j], bases[j]));
        run.M = T.back() * run.M;
    }
    run.pn = run.M * run.p0;
    run.doubly_stochastic_residual = std::max((run.M.colwise().sum().array() - 1.0).abs().maxCoeff(),
                                              (run.M.rowwise().sum().array() - 1.0).abs().maxCoeff());
    run.shannon_difference = shannon_entropy(run.pn) - shannon_entropy(run.p0);
    const size_t steps = bases.size();
    auto sigma_of = [&](int k0, int kn) { return std::log(run.p0(k0) / run.pn(kn)); };

    if (std::pow(static_cast<double>(d), static_cast<double>(steps)) <= kMaxEnumeratedTrajectories) {
        std::vector<int> ks(steps, 0);
        while (true) {
            double P = run.p0(ks[0]);
            for (size_t j = 1; j < steps && P > 0.0; ++j) P *= T[j - 1](ks[j], ks[j - 1]);
            if (P > 0.0) {
                Trajectory t;
                t.outcome = ks;
                t.p_forward = P;
                t.p_backward = P * run.pn(ks.back()) / run.p0(ks[0]);
                t.sigma = sigma_of(ks[0], ks.back());
                run.mean_sigma += P * t.sigma;
                run.exp_minus_sigma += P * std::exp(-t.sigma);
                run.paths.push_back(std::move(t));
            }
            size_t j = steps;
            while (j > 0 && ++ks[j - 1] == d) ks[--j] = 0;
            if (j == 0) break;
        }
        return run;
    }

    run.sampled = true;
    std::mt19937_64 rng(seed);
    auto draw = [&](const RVec& w) {
        std::discrete_distribution<int> dist(w.data(), w.data() + w.size());
        return dist(rng);
    };
    double s1 = 0.0, s2 = 0.0, e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < samples; ++i) {
        int k0 = draw(run.p0), k = k0;
        for (size_t j = 0; j + 1 < steps; ++j) k = draw(T[j].col(k));
        const double s = sigma_of(k0, k), e = std::exp(-s);
        run.sample_sigma.push_back(s);
        s1 += s;
        s2 += s * s;
        e1 += e;
        e2 += e * e;
    }
    const double n = samples;
    run.mean_sigma = s1 / n;
    run.exp_minus_sigma = e1 / n;
    run.std_error_mean = std::sqrt(std::max(0.0, s2 / n - run.mean_sigma * run.mean_sigma) / n);
    run.std_error_exp = std::sqrt(std::max(0.0, e2 / n - run.exp_minus_sigma * run.exp_minus_sigma) / n);
    return run;
}

double ConvolvedDistribution::density(double w) const {
    double s = 0.0;
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * delta * delta);
    for (size_t j = 0; j < ideal.values.size(); ++j) {
        const double x = w - ideal.values[j];
        s += ideal.probs[j] * norm * std::exp(-x * x / (2.0 * delta * delta));
    }
    return s;
}

double ConvolvedDistribution::mean() const {
    double s = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) s += mass[i] * grid[i];
    return s;
}

double ConvolvedDistribution::variance() const {
    const double m = mean(), h = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
    double s = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) s += mass[i] * (grid[i] - m) * (grid[i] - m);
    return s - h * h / 12.0;  // Sheppard correction for binning
}

ConvolvedDistribution weight_convolve(const ScalarDistribution& ideal, double delta, const std::vector<double>& gaps) {
    if (!(delta > 0.0)) throw std::invalid_argument("weight_convolve: delta must be positive");
    if (ideal.values.empty()) throw std::invalid_argument("weight_convolve: empty distribution");
    ConvolvedDistribution c;
    c.delta = delta;
    c.ideal = ideal;
    const auto [mn, mx] = std::minmax_element(ideal.values.begin(), ideal.values.end());
    const double lo = *mn - 6.0 * delta, hi = *mx + 6.0 * delta;
    const double h = (hi - lo) / kConvolutionGrid;
    c.grid.resize(kConvolutionGrid);
    c.mass.assign(kConvolutionGrid, 0.0);
    const double s2 = delta * std::sqrt(2.0);
    for (int i = 0; i < kConvolutionGrid; ++i) {
        const double a = lo + i * h, b = a + h;
        c.grid[i] = a + 0.5 * h;
        for (size_t j = 0; j < ideal.values.size(); ++j)
            c.mass[i] += ideal.probs[j] * 0.5 *
                         (std::erf((b - ideal.values[j]) / s2) - std::erf((a - ideal.values[j]) / s2));
    }
    for (double g : gaps) c.attenuation.push_back(std::exp(-g * g / (8.0 * delta * delta)));
    return c;
}

}  // namespace entroprod::trajectories
