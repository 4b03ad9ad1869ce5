// maps.cpp — episode evolution, entropy balances, Landauer bounds and witnesses
#include "entroprod/maps.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace entroprod::maps {

using namespace entroprod::core;

namespace {

void require_thermal(const Mat& rho, const Mat& H, double beta, double tol, const char* who) {
    double d = trace_distance(rho, thermal_state(H, beta));
    if (d > tol)
        throw std::invalid_argument(std::string(who) + ": state is not thermal at the given beta (trace distance " +
                                    std::to_string(d) + ")");
}

// Tr[(rho - rho') ln sigma] restricted to the support of sigma.
double log_trace(const Mat& x, const Mat& sigma) {
    Eigh e = eigh(sigma);
    double s = 0.0;
    for (int i = 0; i < e.values.size(); ++i) {
        if (e.values(i) <= 1e-14) continue;
        s += std::real((e.vectors.col(i).adjoint() * x * e.vectors.col(i))(0, 0)) * std::log(e.values(i));
    }
    return s;
}

Mat kron_id_left(int d, const Mat& b) { return kron(identity(d), b); }

}  // namespace

Dims Episode::dims() const {
    Dims d = dims_S;
    d.insert(d.end(), dims_E.begin(), dims_E.end());
    return d;
}

std::vector<int> Episode::s_factors() const {
    std::vector<int> v(dims_S.size());
    std::iota(v.begin(), v.end(), 0);
    return v;
}

std::vector<int> Episode::e_factors() const {
    std::vector<int> v(dims_E.size());
    std::iota(v.begin(), v.end(), static_cast<int>(dims_S.size()));
    return v;
}

void Episode::validate(double tol) const {
    check_density(rho_S, tol);
    check_density(rho_E, tol);
    check_hermitian(H_S, tol);
    check_hermitian(H_E, tol);
    check_unitary(U, tol);
    if (H_S.rows() != rho_S.rows()) throw std::invalid_argument("episode: H_S and rho_S dimensions differ");
    if (H_E.rows() != rho_E.rows()) throw std::invalid_argument("episode: H_E and rho_E dimensions differ");
    if (U.rows() != rho_S.rows() * rho_E.rows())
        throw std::invalid_argument("episode: U dimension must equal dim(rho_S) * dim(rho_E)");
    if (dims_product(dims_S) != d_S() || dims_product(dims_E) != d_E())
        throw std::invalid_argument("episode: factor dims inconsistent with matrices");
}

Episode make_episode(Mat H_S, Mat H_E, Mat U, Mat rho_S, Mat rho_E, Dims dims_S, Dims dims_E) {
    Episode ep;
    if (dims_S.empty()) dims_S = {static_cast<int>(rho_S.rows())};
    if (dims_E.empty()) dims_E = {static_cast<int>(rho_E.rows())};
    ep.H_S = std::move(H_S);
    ep.H_E = std::move(H_E);
    ep.U = std::move(U);
    ep.rho_S = std::move(rho_S);
    ep.rho_E = std::move(rho_E);
    ep.dims_S = std::move(dims_S);
    ep.dims_E = std::move(dims_E);
    ep.validate();
    return ep;
}

Evolved evolve(const Episode& ep) {
    if (ep.U.rows() != ep.d_S() * ep.d_E()) throw std::invalid_argument("evolve: dimension mismatch");
    Evolved out;
    out.rho_SE = ep.U * kron(ep.rho_S, ep.rho_E) * ep.U.adjoint();
    out.rho_SE = 0.5 * (out.rho_SE + out.rho_SE.adjoint());
    const Dims d = ep.dims();
    out.rho_S = partial_trace(out.rho_SE, d, ep.s_factors());
    out.rho_E = partial_trace(out.rho_SE, d, ep.e_factors());
    return out;
}

nlohmann::json to_json(const EntropyBalance& b) {
    auto num = [](double x) -> nlohmann::json {
        if (std::isnan(x)) return nullptr;
        if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
        return x;
    };
    nlohmann::json j;
    j["Sigma"] = num(b.sigma);
    j["Sigma_flux"] = num(b.sigma_flux);
    j["Phi"] = num(b.phi);
    j["dS_S"] = num(b.dS_S);
    j["dS_E"] = num(b.dS_E);
    j["I_SE"] = num(b.I_SE);
    j["D_env"] = num(b.D_env);
    j["Q_E"] = num(b.Q_E);
    j["dH_S"] = num(b.dH_S);
    j["W"] = num(b.W);
    j["dF"] = num(b.dF);
    j["Sigma_heat"] = num(b.sigma_heat);
    j["Sigma_work"] = num(b.sigma_work);
    j["total_correlations"] = num(b.total_correlations);
    j["Sigma_parts"] = num(b.sigma_parts);
    j["Q_parts"] = b.Q_parts;
    return j;
}

EntropyBalance balance(const Episode& ep) {
    Evolved ev = evolve(ep);
    EntropyBalance b;
    const double sS = von_neumann_entropy(ep.rho_S), sE = von_neumann_entropy(ep.rho_E);
    const double sS1 = von_neumann_entropy(ev.rho_S), sE1 = von_neumann_entropy(ev.rho_E);
    const double sSE1 = von_neumann_entropy(ev.rho_SE);
    b.dS_S = sS1 - sS;
    b.dS_E = sE1 - sE;
    b.I_SE = sS1 + sE1 - sSE1;
    if (std::abs(b.I_SE - (b.dS_S + b.dS_E)) > 1e-8 * std::max(1.0, std::abs(b.I_SE)))
        throw std::runtime_error("balance: joint entropy not conserved by U");
    b.D_env = relative_entropy(ev.rho_E, ep.rho_E);
    if (std::isinf(b.D_env)) {
        b.sigma = kInf;
        b.phi = kInf;
        b.sigma_flux = kInf;
        return b;
    }
    b.sigma = b.I_SE + b.D_env;
    b.phi = log_trace(ep.rho_E - ev.rho_E, ep.rho_E);
    b.sigma_flux = b.dS_S + b.phi;
    return b;
}

EntropyBalance thermal_balance(const Episode& ep, double beta, double tol) {
    require_thermal(ep.rho_E, ep.H_E, beta, tol, "thermal_balance");
    EntropyBalance b = balance(ep);
    Evolved ev = evolve(ep);
    b.Q_E = expect(ep.H_E, ev.rho_E - ep.rho_E);
    b.dH_S = expect(ep.H_S, ev.rho_S - ep.rho_S);
    b.W = b.dH_S + b.Q_E;
    b.Q_parts = {b.Q_E};
    b.sigma_heat = b.dS_S + beta * b.Q_E;
    if (beta > 0.0) {
        const double T = 1.0 / beta;
        auto F = [&](const Mat& r) { return expect(ep.H_S, r) - T * von_neumann_entropy(r); };
        b.dF = F(ev.rho_S) - F(ep.rho_S);
        b.sigma_work = beta * (b.W - b.dF);
    }
    return b;
}

EntropyBalance multibath_balance(const Episode& ep, const std::vector<BathPart>& parts, double tol) {
    if (parts.empty()) throw std::invalid_argument("multibath_balance: no bath parts");
    const int nE = static_cast<int>(ep.dims_E.size());
    std::vector<int> seen(nE, 0), order;
    std::vector<std::vector<int>> sorted_parts;
    for (const auto& p : parts) {
        std::vector<int> f = p.factors;
        std::sort(f.begin(), f.end());
        for (int k : f) {
            if (k < 0 || k >= nE) throw std::invalid_argument("multibath_balance: factor index out of range");
            if (seen[k]++) throw std::invalid_argument("multibath_balance: bath parts overlap");
            order.push_back(k);
        }
        sorted_parts.push_back(f);
    }
    for (int k = 0; k < nE; ++k)
        if (!seen[k]) throw std::invalid_argument("multibath_balance: bath parts do not cover the environment");

    Evolved ev = evolve(ep);
    std::vector<Mat> marg, marg1;
    for (size_t i = 0; i < parts.size(); ++i) {
        Mat m = partial_trace(ep.rho_E, ep.dims_E, sorted_parts[i]);
        if (parts[i].H.rows() != m.rows()) throw std::invalid_argument("multibath_balance: bath Hamiltonian size mismatch");
        require_thermal(m, parts[i].H, parts[i].beta, tol, "multibath_balance");
        marg.push_back(m);
        marg1.push_back(partial_trace(ev.rho_E, ep.dims_E, sorted_parts[i]));
    }
    std::vector<int> perm(nE);
    for (int j = 0; j < nE; ++j) perm[order[j]] = j;
    Dims ordered_dims;
    for (int k : order) ordered_dims.push_back(ep.dims_E[k]);
    Mat product = permute_factors(kron(marg), ordered_dims, perm);
    if (trace_distance(product, ep.rho_E) > tol)
        throw std::invalid_argument("multibath_balance: environment is not a product over bath parts");

    EntropyBalance b = balance(ep);
    b.Q_parts.clear();
    double flux = 0.0, tc = von_neumann_entropy(ev.rho_S) - von_neumann_entropy(ev.rho_SE), drift = 0.0;
    for (size_t i = 0; i < parts.size(); ++i) {
        double q = expect(parts[i].H, marg1[i] - marg[i]);
        b.Q_parts.push_back(q);
        flux += parts[i].beta * q;
        tc += von_neumann_entropy(marg1[i]);
        drift += relative_entropy(marg1[i], marg[i]);
    }
    b.Q_E = std::accumulate(b.Q_parts.begin(), b.Q_parts.end(), 0.0);
    b.dH_S = expect(ep.H_S, ev.rho_S - ep.rho_S);
    b.W = b.dH_S + b.Q_E;
    b.sigma_heat = b.dS_S + flux;
    b.total_correlations = tc;
    b.sigma_parts = tc + drift;
    return b;
}

ConservationCheck is_strict_energy_conserving(const Mat& U, const Mat& H_S, const Mat& H_E, double tol) {
    const int dS = static_cast<int>(H_S.rows()), dE = static_cast<int>(H_E.rows());
    if (U.rows() != dS * dE) throw std::invalid_argument("is_strict_energy_conserving: dimension mismatch");
    Mat H = kron(H_S, identity(dE)) + kron(identity(dS), H_E);
    double r = operator_norm(commutator(U, H));
    return {r <= tol * (operator_norm(H_S) + operator_norm(H_E)), r};
}

double fixed_point_sigma(const Mat& rho_S, const Mat& rho_S_after, const Mat& rho_star) {
    double a = relative_entropy(rho_S, rho_star);
    double b = relative_entropy(rho_S_after, rho_star);
    if (std::isinf(a) && std::isinf(b)) return kNaN;
    return a - b;
}

ConditionalBalance conditional_balance(const Episode& ep, const std::vector<Mat>& kraus_E, double tol) {
    if (kraus_E.empty()) throw std::invalid_argument("conditional_balance: empty Kraus set");
    const int dS = ep.d_S(), dE = ep.d_E();
    Mat completeness = Mat::Zero(dE, dE);
    for (const Mat& m : kraus_E) {
        if (m.rows() != dE || m.cols() != dE) throw std::invalid_argument("conditional_balance: Kraus operator size mismatch");
        completeness += m.adjoint() * m;
    }
    if ((completeness - identity(dE)).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("conditional_balance: Kraus operators are not complete");

    Evolved ev = evolve(ep);
    EntropyBalance b = balance(ep);
    ConditionalBalance out;
    out.sigma = b.sigma;
    out.phi = b.phi;
    const double sS = von_neumann_entropy(ep.rho_S), sE = von_neumann_entropy(ep.rho_E);
    const Dims d = ep.dims();
    Mat tilde = Mat::Zero(dE, dE);
    double holevo_avg = 0.0, sigma_c = 0.0, phi_c = 0.0;
    for (const Mat& m : kraus_E) {
        Mat k = kron(identity(dS), m);
        Mat rk = k * ev.rho_SE * k.adjoint();
        double p = std::real(rk.trace());
        if (p < 1e-15) continue;
        OutcomeRecord rec;
        rec.p = p;
        rec.rho_S_k = partial_trace(rk, d, ep.s_factors()) / p;
        rec.rho_E_k = m * ev.rho_E * m.adjoint() / p;
        rec.phi_k = von_neumann_entropy(rec.rho_E_k) - sE + relative_entropy(rec.rho_E_k, ep.rho_E);
        rec.sigma_k = von_neumann_entropy(rec.rho_S_k) - sS + rec.phi_k;
        tilde += p * rec.rho_E_k;
        holevo_avg += p * von_neumann_entropy(rec.rho_S_k);
        sigma_c += p * rec.sigma_k;
        phi_c += p * rec.phi_k;
        out.outcomes.push_back(std::move(rec));
    }
    out.chi_M = von_neumann_entropy(ev.rho_S) - holevo_avg;
    out.sigma_c = sigma_c;
    out.phi_c = phi_c;
    out.backaction = trace_distance(tilde, ev.rho_E);
    out.backaction_free = out.backaction <= tol;
    if (!out.backaction_free) {
        out.warnings.push_back("measurement back-action on rho_E' (trace distance " + std::to_string(out.backaction) +
                               "); Phi_c differs from Phi");
        out.phi_c = log_trace(ep.rho_E - tilde, ep.rho_E);
    }
    return out;
}

double HeatDistribution::mean() const {
    double m = 0.0;
    for (size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
    return m;
}

double HeatDistribution::exp_average(double eta) const {
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) s += probs[i] * std::exp(-eta * values[i]);
    return s;
}

HeatDistribution heat_distribution(const Episode& ep) {
    const int dS = ep.d_S(), dE = ep.d_E();
    Eigh es = eigh(ep.rho_S);
    Eigh eh = eigh(ep.H_E);
    Mat basis = kron(es.vectors, eh.vectors);
    Mat B = basis.adjoint() * ep.U * basis;
    RVec q(dE);
    for (int m = 0; m < dE; ++m) q(m) = std::real((eh.vectors.col(m).adjoint() * ep.rho_E * eh.vectors.col(m))(0, 0));
    const double scale = std::max(1.0, eh.values.cwiseAbs().maxCoeff());
    std::map<double, double> acc;
    std::vector<std::pair<double, double>> raw;
    for (int j = 0; j < dS; ++j) {
        double lam = std::max(es.values(j), 0.0);
        if (lam == 0.0) continue;
        for (int k = 0; k < dS; ++k)
            for (int m = 0; m < dE; ++m) {
                if (q(m) <= 0.0) continue;
                for (int n = 0; n < dE; ++n) {
                    double w = lam * std::norm(B(k * dE + n, j * dE + m)) * q(m);
                    if (w == 0.0) continue;
                    raw.emplace_back(eh.values(n) - eh.values(m), w);
                }
            }
    }
    std::sort(raw.begin(), raw.end());
    HeatDistribution out;
    for (const auto& [v, w] : raw) {
        if (!out.values.empty() && std::abs(v - out.values.back()) <= 1e-12 * scale) {
            out.probs.back() += w;
        } else {
            out.values.push_back(v);
            out.probs.push_back(w);
        }
    }
    return out;
}

Mat landauer_M(const Episode& ep) {
    Mat x = ep.U.adjoint() * kron_id_left(ep.d_S(), ep.rho_E) * ep.U;
    return partial_trace(x, ep.dims(), ep.s_factors());
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    struct Rec {
        const std::function<double(double)>& f;
        double run(double a, double b, double fa, double fm, double fb, double whole, double eps, int depth) const {
            double m = 0.5 * (a + b);
            double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            double flm = f(lm), frm = f(rm);
            double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
            return run(a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) + run(m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
        }
    } rec{f};
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Coarse pass fixes the absolute scale for the relative tolerance.
    double coarse = rec.run(a, b, fa, fm, fb, whole, 1e-4 * std::max(std::abs(whole), 1e-300), 12);
    double eps = rel_tol * std::max(std::abs(coarse), 1e-300);
    return rec.run(a, b, fa, fm, fb, whole, eps, 48);
}

double heat_capacity_bound(const std::function<double(double)>& C, double T, double dS) {
    if (!(T > 0.0)) throw std::invalid_argument("heat_capacity_bound: temperature must be positive");
    const double target = -dS;
    if (target == 0.0) return 0.0;
    auto entropy = [&](double a, double b) { return adaptive_simpson([&](double x) { return C(x) / x; }, a, b, 1e-8); };
    // Walk geometric segments away from T until one brackets the target.
    double start = T, acc_s = 0.0, acc_q = 0.0, end = T, seg = 0.0;
    bool found = false;
    for (int k = 0; k < 200; ++k) {
        end = target > 0.0 ? 2.0 * start : 0.5 * start;
        seg = entropy(start, end);
        if ((target > 0.0 && acc_s + seg >= target) || (target < 0.0 && acc_s + seg <= target)) {
            found = true;
            break;
        }
        acc_s += seg;
        acc_q += adaptive_simpson(C, start, end, 1e-8);
        start = end;
        if (target < 0.0 && start < 1e-12 * T) return acc_q;
    }
    if (!found) throw std::runtime_error("heat_capacity_bound: entropy target unreachable");
    double lo = std::min(start, end), hi = std::max(start, end);
    while (hi - lo > 1e-12 * hi) {
        double mid = 0.5 * (lo + hi);
        double s = acc_s + entropy(start, mid);
        bool below = target > 0.0 ? s < target : s > target;
        if (below == (target > 0.0)) lo = mid;
        else hi = mid;
    }
    return acc_q + adaptive_simpson(C, start, 0.5 * (lo + hi), 1e-8);
}

std::function<double(double)> canonical_heat_capacity(const Mat& H) {
    RVec e = eigh(H).values;
    return [e](double T) {
        RVec p = thermal_populations(e, 1.0 / T);
        double m1 = p.dot(e);
        double m2 = p.dot(e.cwiseProduct(e));
        return (m2 - m1 * m1) / (T * T);
    };
}

LandauerReport landauer_report(const Episode& ep, double beta, const LandauerOptions& opt) {
    if (!(beta > 0.0)) throw std::invalid_argument("landauer_report: beta must be positive");
    EntropyBalance b = thermal_balance(ep, beta);
    LandauerReport r;
    r.T = 1.0 / beta;
    r.Q_E = b.Q_E;
    r.dS_S = b.dS_S;
    const double slack = 1e-10 * std::max(1.0, std::abs(r.Q_E));
    r.basic = -r.T * r.dS_S;
    r.basic_ok = r.Q_E >= r.basic - slack;
    if (r.dS_S < 0.0) {
        const int dE = ep.d_E();
        double corr = 0.0;
        if (dE > 1) {
            double l = std::log(static_cast<double>(dE - 1));
            corr = 2.0 * r.T * r.dS_S * r.dS_S / (4.0 + l * l);
        }
        r.finite_d = r.basic + corr;
        r.finite_d_ok = r.Q_E >= r.finite_d - slack;
        r.finite_d_tighter = r.finite_d >= r.basic;
    } else if (opt.require_finite_d) {
        throw std::invalid_argument("landauer_report: finite-dimension bound requires dS_S < 0");
    }
    if (opt.heat_capacity) {
        r.heat_capacity = heat_capacity_bound(opt.heat_capacity, r.T, r.dS_S);
        r.heat_capacity_ok = r.Q_E >= r.heat_capacity - 1e-7 * std::max(1.0, std::abs(r.Q_E));
        double best = std::isnan(r.finite_d) ? r.basic : std::max(r.basic, r.finite_d);
        r.heat_capacity_tightest = r.heat_capacity >= best - 1e-7 * std::max(1.0, std::abs(best));
    }
    r.exp_heat = std::real((landauer_M(ep) * ep.rho_S).trace());
    r.B_Q = -r.T * std::log(r.exp_heat);
    r.B_Q_ok = r.B_Q <= r.Q_E + slack;
    if (!opt.etas.empty()) {
        HeatDistribution hd = heat_distribution(ep);
        const double mean = hd.mean();
        for (double eta : opt.etas) {
            if (eta == 0.0) continue;
            EtaBound e;
            e.eta = eta;
            e.theta = std::log(hd.exp_average(eta));
            if (eta > 0.0) {
                e.bound = -e.theta / eta;
                e.satisfied = mean >= e.bound - slack;
            } else {
                e.bound = e.theta / std::abs(eta);
                e.satisfied = mean <= e.bound + slack;
            }
            r.eta_bounds.push_back(e);
        }
    }
    return r;
}

CorrelatedHeat correlated_heat_flow(const Mat& rho_AB, const Mat& H_A, const Mat& H_B, const Mat& U, double beta_A,
                                    double beta_B, double tol) {
    const int dA = static_cast<int>(H_A.rows()), dB = static_cast<int>(H_B.rows());
    check_density(rho_AB, tol);
    if (rho_AB.rows() != dA * dB) throw std::invalid_argument("correlated_heat_flow: dimension mismatch");
    const Dims d{dA, dB};
    Mat rA = partial_trace(rho_AB, d, {0}), rB = partial_trace(rho_AB, d, {1});
    require_thermal(rA, H_A, beta_A, tol, "correlated_heat_flow (A marginal)");
    require_thermal(rB, H_B, beta_B, tol, "correlated_heat_flow (B marginal)");
    auto cons = is_strict_energy_conserving(U, H_A, H_B, 1e-9);
    if (!cons.conserving) throw std::invalid_argument("correlated_heat_flow: U is not strictly energy conserving");
    Mat r1 = U * rho_AB * U.adjoint();
    Mat rB1 = partial_trace(r1, d, {1});
    CorrelatedHeat out;
    out.Q_B = expect(H_B, rB1 - rB);
    out.dI = mutual_information(r1, d, {0}) - mutual_information(rho_AB, d, {0});
    out.lhs = (beta_B - beta_A) * out.Q_B;
    out.rhs = out.dI;
    out.bound_ok = out.lhs >= out.rhs - 1e-10;
    return out;
}

TwoQubitCorrelated two_qubit_correlated(double Omega, double T_A, double T_B, double alpha, double theta, double phi,
                                        double g, double t) {
    TwoQubitCorrelated s;
    s.f_A = 1.0 / (std::exp(Omega / T_A) + 1.0);
    s.f_B = 1.0 / (std::exp(Omega / T_B) + 1.0);
    s.H_A = Mat::Zero(2, 2);
    s.H_A(1, 1) = Omega;
    s.H_B = s.H_A;
    Mat rA = Mat::Zero(2, 2), rB = Mat::Zero(2, 2);
    rA(0, 0) = 1.0 - s.f_A;
    rA(1, 1) = s.f_A;
    rB(0, 0) = 1.0 - s.f_B;
    rB(1, 1) = s.f_B;
    const cplx i(0.0, 1.0);
    Mat chi = Mat::Zero(4, 4);
    chi(1, 2) = alpha * std::exp(i * theta);  // |g,e><e,g|
    chi(2, 1) = alpha * std::exp(-i * theta);
    s.rho_AB = kron(rA, rB) + chi;
    Mat G = Mat::Zero(4, 4);
    G(1, 2) = std::exp(i * phi);
    G(2, 1) = std::exp(-i * phi);
    s.U = expm_hermitian(G, cplx(0.0, -g * t));
    return s;
}

double two_qubit_heat_closed_form(double Omega, double T_A, double T_B, double alpha, double theta, double phi, double g,
                                  double t) {
    const double fA = 1.0 / (std::exp(Omega / T_A) + 1.0), fB = 1.0 / (std::exp(Omega / T_B) + 1.0);
    return Omega * std::sin(g * t) * ((fA - fB) * std::sin(g * t) - 2.0 * alpha * std::sin(theta - phi) * std::cos(g * t));
}

Mat mean_force(const Mat& H_tot, int d_S, int d_E, const Mat& H_E, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("mean_force: beta must be positive");
    if (H_tot.rows() != d_S * d_E || H_E.rows() != d_E) throw std::invalid_argument("mean_force: dimension mismatch");
    Eigh et = eigh(H_tot), ee = eigh(H_E);
    const double c = et.values.minCoeff(), cE = ee.values.minCoeff();
    RVec w = (-(beta) * (et.values.array() - c)).exp().matrix();
    Mat gibbs = et.vectors * w.cast<cplx>().asDiagonal() * et.vectors.adjoint();
    Mat x = partial_trace(gibbs, {d_S, d_E}, {0});
    double zE = (-(beta) * (ee.values.array() - cE)).exp().sum();
    Mat logx = herm_fun(x, [](double v) {
        if (v <= 0.0) throw std::runtime_error("mean_force: reduced Gibbs operator is singular");
        return std::log(v);
    });
    return -logx / beta + (c - cE + std::log(zE) / beta) * identity(d_S);
}

StrongCouplingSigma strong_coupling_sigma(const std::vector<StrongCouplingPoint>& traj, int d_S, int d_E,
                                          const Mat& H_E, double beta) {
    if (traj.empty()) throw std::invalid_argument("strong_coupling_sigma: empty trajectory");
    const Dims d{d_S, d_E};
    StrongCouplingSigma out;
    double E0 = 0.0, F0 = 0.0, dS0 = 0.0;
    for (size_t i = 0; i < traj.size(); ++i) {
        const auto& pt = traj[i];
        Mat rS = partial_trace(pt.rho_SE, d, {0});
        Mat hmf = mean_force(pt.H_tot, d_S, d_E, H_E, beta);
        Mat piSE = thermal_state(pt.H_tot, beta);
        Mat piS = partial_trace(piSE, d, {0});
        double E = expect(pt.H_tot, pt.rho_SE);
        double F = expect(hmf, rS) - von_neumann_entropy(rS) / beta;
        double dS = relative_entropy(pt.rho_SE, piSE) - relative_entropy(rS, piS);
        if (i == 0) {
            E0 = E;
            F0 = F;
            dS0 = dS;
        }
        out.t.push_back(pt.t);
        out.W.push_back(E - E0);
        out.dF.push_back(F - F0);
        out.sigma_work.push_back(beta * ((E - E0) - (F - F0)));
        out.sigma_relent.push_back(dS - dS0);
    }
    return out;
}

std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& y) {
    const size_t n = t.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("time_derivative: need at least 3 synchronized points");
    std::vector<double> d(n);
    d[0] = (y[1] - y[0]) / (t[1] - t[0]);
    d[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
    for (size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
    return d;
}

BlpWitness blp_witness(const std::vector<double>& t, const std::vector<Mat>& rho1, const std::vector<Mat>& rho2,
                       double tol) {
    if (t.size() < 3) throw std::invalid_argument("blp_witness: fewer than 3 time points");
    if (rho1.size() != t.size() || rho2.size() != t.size())
        throw std::invalid_argument("blp_witness: trajectories not synchronized with the time grid");
    BlpWitness out;
    for (size_t i = 0; i < t.size(); ++i) out.D.push_back(trace_distance(rho1[i], rho2[i]));
    out.rate = time_derivative(t, out.D);
    out.max_rate = *std::max_element(out.rate.begin(), out.rate.end());
    out.nonmarkovian = out.max_rate > tol;
    return out;
}

MazzolaTerms mazzola_terms(const std::vector<double>& t, const std::vector<Mat>& rho1_SE,
                           const std::vector<Mat>& rho2_SE, const Mat& H, int d_S, int d_E) {
    if (t.size() < 3) throw std::invalid_argument("mazzola_terms: fewer than 3 time points");
    if (rho1_SE.size() != t.size() || rho2_SE.size() != t.size())
        throw std::invalid_argument("mazzola_terms: trajectories not synchronized with the time grid");
    const Dims d{d_S, d_E};
    MazzolaTerms out;
    for (size_t i = 0; i < t.size(); ++i) {
        Mat s1 = partial_trace(rho1_SE[i], d, {0}), s2 = partial_trace(rho2_SE[i], d, {0});
        Mat e1 = partial_trace(rho1_SE[i], d, {1}), e2 = partial_trace(rho2_SE[i], d, {1});
        Mat de = e1 - e2;
        double E1 = trace_norm(partial_trace(commutator(H, kron(s1, de)), d, {0}));
        double E2 = trace_norm(partial_trace(commutator(H, kron(s2, de)), d, {0}));
        Mat dchi = (rho1_SE[i] - kron(s1, e1)) - (rho2_SE[i] - kron(s2, e2));
        out.E.push_back(std::min(E1, E2));
        out.C.push_back(trace_norm(partial_trace(commutator(H, dchi), d, {0})));
        out.D.push_back(trace_distance(s1, s2));
    }
    out.rate = time_derivative(t, out.D);
    out.bound_ok = true;
    out.worst_slack = kInf;
    for (size_t i = 1; i + 1 < t.size(); ++i) {
        double dt = std::max(t[i + 1] - t[i], t[i] - t[i - 1]);
        double slack = 0.5 * (out.E[i] + out.C[i]) + 10.0 * dt - out.rate[i];
        out.worst_slack = std::min(out.worst_slack, slack);
        if (slack < 0.0) out.bound_ok = false;
    }
    return out;
}

Mat random_conserving_unitary(const Mat& H_S, const Mat& H_E, std::mt19937_64& rng) {
    const int dS = static_cast<int>(H_S.rows()), dE = static_cast<int>(H_E.rows());
    Mat H = kron(H_S, identity(dE)) + kron(identity(dS), H_E);
    Eigh e = eigh(H);
    const double tol = 1e-9 * std::max(1.0, operator_norm(H));
    const int n = static_cast<int>(e.values.size());
    Mat U = Mat::Zero(n, n);
    int i = 0;
    while (i < n) {
        int j = i + 1;
        while (j < n && e.values(j) - e.values(j - 1) <= tol) ++j;
        Mat V = e.vectors.middleCols(i, j - i);
        U += V * random_unitary(j - i, rng) * V.adjoint();
        i = j;
    }
    return U;
}

}  // namespace entroprod::maps
