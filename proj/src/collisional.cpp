// collisional.cpp — stroboscopic collisional models, their continuous limit and stroke-based engines
#include "entroprod/collisional.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace entroprod::collisional {

using namespace entroprod::core;

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

Mat zero_or(const Mat& h, int d) { return h.size() == 0 ? Mat(Mat::Zero(d, d)) : h; }

bool is_thermal(const Mat& rho, const Mat& H, double beta) {
    if (!std::isfinite(beta) || H.size() == 0) return false;
    return trace_distance(rho, thermal_state(H, beta)) <= kStateTol;
}

// Relative entropy of coherence in the basis given by the columns of B.
double coherence(const Mat& rho, const Mat& B) {
    Mat r = B.adjoint() * rho * B;
    return shannon_entropy(r.diagonal().real()) - von_neumann_entropy(rho);
}

Mat post_collision(const Mat& U, const Mat& rho_S, const Mat& rho_A) {
    const int dS = static_cast<int>(rho_S.rows()), dA = static_cast<int>(rho_A.rows());
    Mat r = U * kron(rho_S, rho_A) * U.adjoint();
    return partial_trace(r, {dS, dA}, {0});
}

}  // namespace

int CollisionSpec::period() const {
    auto len = [](size_t n) { return static_cast<int>(std::max<size_t>(n, 1)); };
    int p = std::lcm(len(alphabet.size()), len(H_S_schedule.size()));
    return std::lcm(p, len(system_unitaries.size()));
}

const Mat& CollisionSpec::H_S(int n) const { return H_S_schedule[n % H_S_schedule.size()]; }

Mat CollisionSpec::system_unitary(int n) const {
    if (system_unitaries.empty()) return identity(d_S);
    return system_unitaries[n % system_unitaries.size()];
}

const Ancilla& CollisionSpec::ancilla(int n) const { return alphabet[n % alphabet.size()]; }

void CollisionSpec::validate() const {
    if (d_S < 1) throw std::invalid_argument("CollisionSpec: system dimension must be positive");
    if (alphabet.empty()) throw std::invalid_argument("CollisionSpec: ancilla alphabet is empty");
    if (H_S_schedule.empty()) throw std::invalid_argument("CollisionSpec: empty Hamiltonian schedule");
    for (const Ancilla& a : alphabet) {
        const int dA = static_cast<int>(a.rho_A.rows());
        if (d_S * dA > kMaxCollisionDim)
            throw std::invalid_argument("CollisionSpec: d_S * d_A exceeds " + std::to_string(kMaxCollisionDim));
        check_density(a.rho_A);
        if (a.H_A.rows() != dA) throw std::invalid_argument("CollisionSpec: H_A does not match rho_A");
        check_hermitian(a.H_A);
        if (a.U_SA.rows() != d_S * dA || a.U_SA.cols() != d_S * dA)
            throw std::invalid_argument("CollisionSpec: U_SA does not act on S (x) A");
        check_unitary(a.U_SA);
    }
    for (const Mat& h : H_S_schedule) {
        if (h.rows() != d_S) throw std::invalid_argument("CollisionSpec: H_S has the wrong dimension");
        check_hermitian(h);
    }
    for (const Mat& u : system_unitaries) {
        if (u.rows() != d_S) throw std::invalid_argument("CollisionSpec: system unitary has the wrong dimension");
        check_unitary(u);
    }
    if (rho_S0.size() != 0) {
        if (rho_S0.rows() != d_S) throw std::invalid_argument("CollisionSpec: rho_S0 has the wrong dimension");
        check_density(rho_S0);
    }
}

Mat collide(const Ancilla& a, const Mat& rho_S) { return post_collision(a.U_SA, rho_S, a.rho_A); }

Mat stroke(const CollisionSpec& spec, int n, const Mat& rho_S) {
    Mat u = spec.system_unitary(n);
    return u * collide(spec.ancilla(n), rho_S) * u.adjoint();
}

CollisionRun run(const CollisionSpec& spec, int n_strokes) {
    if (n_strokes < 1) throw std::invalid_argument("run: n_strokes must be at least 1");
    spec.validate();
    CollisionRun out;
    Mat rho = spec.rho_S0.size() ? spec.rho_S0 : Mat(identity(spec.d_S) / static_cast<double>(spec.d_S));
    out.states.push_back(rho);
    for (int n = 0; n < n_strokes; ++n) {
        const Ancilla& a = spec.ancilla(n);
        const Mat& H = spec.H_S(n);
        const Mat& H1 = spec.H_S(n + 1);
        maps::Episode ep = maps::make_episode(H, a.H_A, a.U_SA, rho, a.rho_A);
        maps::Evolved ev = maps::evolve(ep);
        maps::EntropyBalance b = maps::balance(ep);
        Mat u = spec.system_unitary(n);
        Mat next = hermitize(u * ev.rho_S * u.adjoint());

        StrokeRecord r;
        r.stroke = n;
        r.t = (n + 1) * spec.tau;
        r.Q_A = expect(a.H_A, ev.rho_E - a.rho_A);
        r.dH_S = expect(H1, next) - expect(H, rho);
        r.W_onoff = expect(H, ev.rho_S - rho) + r.Q_A;
        r.W_u = expect(H1, next) - expect(H, ev.rho_S);
        r.first_law_residual = r.dH_S - (r.W_u + r.W_onoff - r.Q_A);
        r.dS_S = b.dS_S;
        r.sigma_general = b.sigma;
        r.thermal_ancilla = is_thermal(a.rho_A, a.H_A, a.beta);
        if (r.thermal_ancilla) {
            r.sigma_thermal = b.dS_S + a.beta * r.Q_A;
            r.thermal_operation = maps::is_strict_energy_conserving(a.U_SA, H, a.H_A).conserving;
            if (r.thermal_operation)
                r.sigma_fixedpoint = maps::fixed_point_sigma(rho, ev.rho_S, thermal_state(H, a.beta));
        }
        out.records.push_back(r);
        rho = next;
        out.states.push_back(rho);
    }
    return out;
}

std::string to_csv(const std::vector<StrokeRecord>& records) {
    std::string s = "stroke,Q_A,W_u,W_onoff,Sigma_g,Sigma_t,Sigma_f\n";
    for (const StrokeRecord& r : records)
        s += std::to_string(r.stroke) + "," + fmt(r.Q_A) + "," + fmt(r.W_u) + "," + fmt(r.W_onoff) + "," +
             fmt(r.sigma_general) + "," + fmt(r.sigma_thermal) + "," + fmt(r.sigma_fixedpoint) + "\n";
    return s;
}

LimitCycle channel_fixed_point(const std::function<Mat(const Mat&)>& phi, int d, const Mat& rho0) {
    LimitCycle lc;
    Mat rho = rho0;
    bool settled = false;
    for (int c = 1; c <= kMaxLimitCycles; ++c) {
        Mat next = hermitize(phi(rho));
        next /= next.trace().real();
        double step = trace_distance(next, rho);
        rho = next;
        lc.cycles = c;
        if (step <= kLimitCycleTol) {
            settled = true;
            break;
        }
    }
    if (!settled)
        throw std::runtime_error("limit_cycle: power iteration did not converge within " +
                                 std::to_string(kMaxLimitCycles) + " cycles");
    lc.rho = rho;
    lc.residual = trace_distance(hermitize(phi(rho)), rho);

    Mat S = superop_of(phi, d);
    Eigen::ComplexEigenSolver<Mat> es(S);
    int idx = -1, near_one = 0;
    double best = kInf;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double dist = std::abs(es.eigenvalues()(i) - 1.0);
        if (dist < kSolverAgreement) ++near_one;
        if (dist < best) best = dist, idx = i;
    }
    if (near_one != 1)
        throw std::runtime_error("limit_cycle: fixed space of the composite channel is degenerate");
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (i != idx) lc.subleading = std::max(lc.subleading, std::abs(es.eigenvalues()(i)));
    Mat r = unvec(es.eigenvectors().col(idx), d);
    r /= r.trace();
    lc.rho_eigen = hermitize(r);
    lc.solver_gap = trace_distance(lc.rho, lc.rho_eigen);
    if (lc.solver_gap > kSolverAgreement)
        throw std::runtime_error("limit_cycle: power iteration and eigenvector routes disagree");
    return lc;
}

LimitCycle limit_cycle(const CollisionSpec& spec) {
    spec.validate();
    const int P = spec.period();
    auto phi = [&](const Mat& rho) {
        Mat r = rho;
        for (int n = 0; n < P; ++n) r = stroke(spec, n, r);
        return r;
    };
    Mat rho0 = spec.rho_S0;
    if (rho0.size() == 0) {
        rho0 = Mat::Zero(spec.d_S, spec.d_S);
        rho0(0, 0) = 1.0;
    }
    return channel_fixed_point(phi, spec.d_S, rho0);
}

Mat coupling_operator(const std::vector<CouplingTerm>& terms, int d_A) {
    if (terms.empty()) throw std::invalid_argument("coupling_operator: no terms");
    const int dS = static_cast<int>(terms[0].L.rows());
    Mat V = Mat::Zero(dS * d_A, dS * d_A);
    for (const CouplingTerm& t : terms) {
        if (t.L.rows() != dS || t.A.rows() != d_A)
            throw std::invalid_argument("coupling_operator: inconsistent term dimensions");
        V += t.g * (kron(Mat(t.L.adjoint()), t.A) + kron(t.L, Mat(t.A.adjoint())));
    }
    return V;
}

Mat double_commutator_dissipator(const Mat& V, const Mat& rho_A, int d_S, double tol) {
    const int dA = static_cast<int>(rho_A.rows());
    if (V.rows() != d_S * dA) throw std::invalid_argument("double_commutator_dissipator: dimension mismatch");
    Mat shift = partial_trace(Mat(V * kron(identity(d_S), rho_A)), {d_S, dA}, {0});
    if (operator_norm(shift) > tol)
        throw std::invalid_argument("double_commutator_dissipator: Tr_A(V rho_A) is nonzero (Lamb shift)");
    return superop_of(
        [&](const Mat& x) {
            Mat big = kron(x, rho_A);
            Mat c = commutator(V, commutator(V, big));
            return Mat(-0.5 * partial_trace(c, {d_S, dA}, {0}));
        },
        d_S);
}

ContinuousLimit continuous_limit(const std::vector<CouplingTerm>& terms, const Mat& rho_A, const Mat& H_A,
                                 double beta, double tol) {
    if (terms.empty()) throw std::invalid_argument("continuous_limit: no coupling terms");
    check_density(rho_A);
    const int dA = static_cast<int>(rho_A.rows());
    const int dS = static_cast<int>(terms[0].L.rows());
    Mat V = coupling_operator(terms, dA);

    ContinuousLimit cl;
    Mat shift = partial_trace(Mat(V * kron(identity(dS), rho_A)), {dS, dA}, {0});
    cl.lamb_shift = operator_norm(shift);
    cl.superop_raw = double_commutator_dissipator(V, rho_A, dS, tol);

    auto avg = [&](const Mat& x) { return (x * rho_A).trace(); };
    for (size_t k = 0; k < terms.size(); ++k)
        for (size_t q = 0; q < terms.size(); ++q) {
            double cross = std::abs(avg(terms[k].A * terms[q].A));
            if (k != q)
                cross = std::max({cross, std::abs(avg(terms[k].A.adjoint() * terms[q].A)),
                                  std::abs(avg(terms[k].A * terms[q].A.adjoint()))});
            if (cross > tol)
                throw std::invalid_argument("continuous_limit: ancilla correlations break the standard form");
        }

    const bool thermal = is_thermal(rho_A, H_A, beta);
    cl.superop = Mat::Zero(dS * dS, dS * dS);
    cl.detailed_balance = thermal;
    for (const CouplingTerm& t : terms) {
        double gm = t.g * t.g * avg(t.A * t.A.adjoint()).real();
        double gp = t.g * t.g * avg(t.A.adjoint() * t.A).real();
        cl.superop += gm * dissipator(t.L) + gp * dissipator(Mat(t.L.adjoint()));
        cl.gamma_minus.push_back(gm);
        cl.gamma_plus.push_back(gp);
        cl.ratio.push_back(gp > 0.0 ? gm / gp : kInf);
        double w = kNaN;
        if (H_A.size() != 0) {
            Mat c = commutator(H_A, t.A);
            double na = (t.A.adjoint() * t.A).trace().real();
            if (na > 0.0) {
                double cand = -(t.A.adjoint() * c).trace().real() / na;
                if (operator_norm(c + cand * t.A) <= 1e-9 * (1.0 + operator_norm(H_A)) * operator_norm(t.A))
                    w = cand;
            }
        }
        cl.omega.push_back(w);
        double expected = thermal && std::isfinite(w) ? std::exp(beta * w) : kNaN;
        cl.ratio_expected.push_back(expected);
        if (!std::isfinite(expected) || std::abs(cl.ratio.back() - expected) > 1e-9 * expected)
            cl.detailed_balance = false;
    }
    cl.route_gap = (cl.superop - cl.superop_raw).cwiseAbs().maxCoeff();
    return cl;
}

Mat finite_tau_increment(const Mat& V, const Mat& rho_A, const Mat& rho_S, double tau) {
    Mat U = expm_hermitian(V, cplx(0, -std::sqrt(tau)));
    return (post_collision(U, rho_S, rho_A) - rho_S) / tau;
}

Mat apply_superop(const Mat& superop, const Mat& rho) {
    return unvec(superop * vec(rho), static_cast<int>(rho.rows()));
}

PreferredBasisRun preferred_basis(const CollisionSpec& spec, int n_strokes, double tol) {
    if (n_strokes < 1) throw std::invalid_argument("preferred_basis: n_strokes must be at least 1");
    spec.validate();
    const int d = spec.d_S;

    Mat combo = Mat::Zero(d, d);
    for (size_t k = 0; k < spec.H_S_schedule.size(); ++k)
        combo += (1.0 + 0.6180339887498949 * static_cast<double>(k)) * spec.H_S_schedule[k];
    PreferredBasisRun out;
    out.basis = eigh(combo).vectors;
    const Mat& B = out.basis;
    auto offdiag = [](const Mat& m) {
        Mat o = m;
        o.diagonal().setZero();
        return o.cwiseAbs().maxCoeff();
    };
    for (const Mat& h : spec.H_S_schedule)
        if (offdiag(B.adjoint() * h * B) > tol * (1.0 + operator_norm(h)))
            throw std::invalid_argument("preferred_basis: Hamiltonian schedule does not commute");
    for (const Mat& u : spec.system_unitaries)
        if (offdiag(B.adjoint() * u * B) > tol)
            throw std::invalid_argument("preferred_basis: system unitary mixes the energy basis");

    Mat rho = spec.rho_S0.size() ? spec.rho_S0 : Mat(identity(d) / static_cast<double>(d));
    RVec chain = (B.adjoint() * rho * B).diagonal().real();
    out.chain_populations.push_back(chain);
    out.quantum_populations.push_back(chain);
    for (int n = 0; n < n_strokes; ++n) {
        const Ancilla& a = spec.ancilla(n);
        const Mat& H = spec.H_S(n);
        if (!is_thermal(a.rho_A, a.H_A, a.beta))
            throw std::invalid_argument("preferred_basis: ancilla is not thermal");
        if (!maps::is_strict_energy_conserving(a.U_SA, H, a.H_A).conserving)
            throw std::invalid_argument("preferred_basis: stroke is not a thermal operation");
        const int dA = static_cast<int>(a.rho_A.rows());
        Eigh ea = eigh(a.rho_A);
        Mat F = kron(B, ea.vectors);
        Mat W = F.adjoint() * a.U_SA * F;
        const RVec& q = ea.values;
        auto w = [&](int i, int mu, int j, int nu) { return W(i * dA + mu, j * dA + nu); };

        PreferredStroke ps;
        ps.M = RMat::Zero(d, d);
        ps.coherence_factor = Mat::Zero(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int mu = 0; mu < dA; ++mu)
                    for (int nu = 0; nu < dA; ++nu) {
                        ps.M(i, j) += q(nu) * std::norm(w(i, mu, j, nu));
                        ps.coherence_factor(i, j) += q(nu) * w(i, mu, i, nu) * std::conj(w(j, mu, j, nu));
                    }
        // Transfer T_{ij,kl} from coherences rho_kl into any other element.
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l) {
                        if (k == l || (i == k && j == l)) continue;
                        cplx t = 0.0;
                        for (int mu = 0; mu < dA; ++mu)
                            for (int nu = 0; nu < dA; ++nu) t += q(nu) * w(i, mu, k, nu) * std::conj(w(j, mu, l, nu));
                        ps.coherence_mixing = std::max(ps.coherence_mixing, std::abs(t));
                    }

        Mat r = B.adjoint() * rho * B;
        ps.p_before = r.diagonal().real();
        RVec energies = (B.adjoint() * H * B).diagonal().real();
        ps.p_thermal = thermal_populations(energies, a.beta);
        Mat rho_c = hermitize(collide(a, rho));
        ps.p_after = (B.adjoint() * rho_c * B).diagonal().real();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j) {
                    ps.coherence_l1 += std::abs(r(i, j));
                    ps.max_coherence_modulus = std::max(ps.max_coherence_modulus, std::abs(ps.coherence_factor(i, j)));
                }
        for (int j = 0; j < d; ++j) ps.stochastic_residual = std::max(ps.stochastic_residual, std::abs(ps.M.col(j).sum() - 1.0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                ps.detailed_balance_residual =
                    std::max(ps.detailed_balance_residual,
                             std::abs(ps.M(i, j) * ps.p_thermal(j) - ps.M(j, i) * ps.p_thermal(i)));
        ps.sigma = maps::fixed_point_sigma(rho, rho_c, thermal_state(H, a.beta));
        ps.sigma_cl = kl_divergence(ps.p_before, ps.p_thermal) - kl_divergence(ps.p_after, ps.p_thermal);
        ps.sigma_qu = coherence(rho, B) - coherence(rho_c, B);

        Mat u = spec.system_unitary(n);
        rho = hermitize(u * rho_c * u.adjoint());
        chain = ps.M * chain;
        RVec qp = (B.adjoint() * rho * B).diagonal().real();
        out.population_gap = std::max(out.population_gap, (chain - qp).cwiseAbs().maxCoeff());
        out.chain_populations.push_back(chain);
        out.quantum_populations.push_back(qp);
        out.strokes.push_back(ps);
    }
    return out;
}

const char* to_string(SwapRegime r) {
    switch (r) {
        case SwapRegime::Refrigerator: return "refrigerator";
        case SwapRegime::Engine: return "engine";
        case SwapRegime::HeatPump: return "heat_pump";
        case SwapRegime::Carnot: return "carnot";
    }
    return "unknown";
}

namespace {

void check_swap(const SwapEngineSpec& s) {
    if (!(s.eps_a > 0 && s.eps_b > 0 && s.T_a > 0 && s.T_b > 0))
        throw std::invalid_argument("swap_engine: gaps and temperatures must be positive");
}

double fermi(double eps, double T) { return 1.0 / (std::exp(eps / T) + 1.0); }

// Regime and figure of merit from the gap and temperature ratios, with the
// hotter qubit labelled h.
void classify(const SwapEngineSpec& s, SwapEngineResult& r) {
    const bool a_hot = s.T_a >= s.T_b;
    const double eh = a_hot ? s.eps_a : s.eps_b, ec = a_hot ? s.eps_b : s.eps_a;
    const double Th = a_hot ? s.T_a : s.T_b, Tc = a_hot ? s.T_b : s.T_a;
    const double Qh = a_hot ? r.Q_a : r.Q_b, Qc = a_hot ? r.Q_b : r.Q_a;
    const double re = ec / eh, rt = Tc / Th;
    if (std::abs(re - rt) <= 1e-12 * std::max(re, rt)) {
        r.regime = SwapRegime::Carnot;
    } else if (re < rt) {
        r.regime = SwapRegime::Refrigerator;
        r.figure_of_merit = std::abs(Qc) / r.W;
    } else if (re <= 1.0) {
        r.regime = SwapRegime::Engine;
        r.figure_of_merit = Qh != 0.0 ? std::abs(r.W) / Qh : kNaN;
    } else {
        r.regime = SwapRegime::HeatPump;
        r.figure_of_merit = Qh / r.W;
        r.sigma_min = (1.0 / Tc - 1.0 / Th) * Qh;
        r.sigma_excess = r.sigma - r.sigma_min;
    }
}

}  // namespace

SwapEngineResult swap_engine(const SwapEngineSpec& s) {
    check_swap(s);
    SwapEngineResult r;
    r.f_a = fermi(s.eps_a, s.T_a);
    r.f_b = fermi(s.eps_b, s.T_b);
    const double df = r.f_a - r.f_b;
    r.W = -(s.eps_a - s.eps_b) * df;
    r.Q_a = s.eps_a * df;
    r.Q_b = -s.eps_b * df;
    r.sigma = -(s.eps_a / s.T_a - s.eps_b / s.T_b) * df;
    classify(s, r);
    if (r.regime == SwapRegime::Carnot) return r;
    // Closed-form figures of merit with the hotter qubit labelled h.
    const bool a_hot = s.T_a >= s.T_b;
    const double eh = a_hot ? s.eps_a : s.eps_b, ec = a_hot ? s.eps_b : s.eps_a;
    if (r.regime == SwapRegime::Refrigerator) r.figure_of_merit = ec / (eh - ec);
    if (r.regime == SwapRegime::Engine) r.figure_of_merit = 1.0 - ec / eh;
    if (r.regime == SwapRegime::HeatPump) r.figure_of_merit = eh / (ec - eh);
    return r;
}

SwapEngineResult swap_engine_simulated(const SwapEngineSpec& s) {
    check_swap(s);
    Mat Ha = Mat::Zero(2, 2), Hb = Mat::Zero(2, 2);
    Ha(1, 1) = s.eps_a;
    Hb(1, 1) = s.eps_b;
    Mat tha = thermal_state(Ha, 1.0 / s.T_a), thb = thermal_state(Hb, 1.0 / s.T_b);
    Mat swap = Mat::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) swap(j * 2 + i, i * 2 + j) = 1.0;
    Mat H = kron(Ha, identity(2)) + kron(identity(2), Hb);
    Mat rho0 = kron(tha, thb);
    Mat rho1 = swap * rho0 * swap.adjoint();
    Mat ra = partial_trace(rho1, {2, 2}, {0}), rb = partial_trace(rho1, {2, 2}, {1});

    SwapEngineResult r;
    r.f_a = tha(1, 1).real();
    r.f_b = thb(1, 1).real();
    r.W = expect(H, rho1 - rho0);
    r.Q_a = expect(Ha, tha - ra);
    r.Q_b = expect(Hb, thb - rb);
    r.sigma = relative_entropy(ra, tha) + relative_entropy(rb, thb);
    classify(s, r);
    return r;
}

Mat four_stroke_map(const FourStrokeSpec& s, const Mat& rho_S) {
    Mat r1 = s.V1 * rho_S * s.V1.adjoint();
    Mat r2 = post_collision(s.U_SH, r1, s.rho_H);
    Mat r3 = s.V2 * r2 * s.V2.adjoint();
    return post_collision(s.U_SC, r3, s.rho_C);
}

FourStrokeResult four_stroke_cycle(const FourStrokeSpec& s, const Mat& rho_S) {
    const int d = static_cast<int>(rho_S.rows());
    const int dH = static_cast<int>(s.rho_H.rows()), dC = static_cast<int>(s.rho_C.rows());
    if (d * std::max(dH, dC) > kMaxCollisionDim) throw std::invalid_argument("four_stroke: dimension cap exceeded");
    if (s.V1.rows() != d || s.V2.rows() != d || s.U_SH.rows() != d * dH || s.U_SC.rows() != d * dC)
        throw std::invalid_argument("four_stroke: unitaries are not dimension consistent");
    check_unitary(s.V1);
    check_unitary(s.V2);
    check_unitary(s.U_SH);
    check_unitary(s.U_SC);

    const Mat HS = zero_or(s.H_S, d), HH = zero_or(s.H_H, dH), HC = zero_or(s.H_C, dC);
    FourStrokeResult out;
    out.rho_S = rho_S;
    Mat r1 = hermitize(s.V1 * rho_S * s.V1.adjoint());
    maps::Episode eh = maps::make_episode(HS, HH, s.U_SH, r1, s.rho_H);
    maps::Evolved vh = maps::evolve(eh);
    maps::EntropyBalance bh = maps::balance(eh);
    Mat r3 = hermitize(s.V2 * vh.rho_S * s.V2.adjoint());
    maps::Episode ec = maps::make_episode(HS, HC, s.U_SC, r3, s.rho_C);
    maps::Evolved vc = maps::evolve(ec);
    maps::EntropyBalance bc = maps::balance(ec);
    out.rho_S_end = vc.rho_S;

    out.sigma_H = bh.sigma;
    out.sigma_C = bc.sigma;
    out.sigma_H_trace = bh.sigma_flux;
    out.sigma_C_trace = bc.sigma_flux;
    out.sigma = out.sigma_H + out.sigma_C;
    out.phi_H = bh.phi;
    out.phi_C = bc.phi;
    out.dS_S = von_neumann_entropy(vc.rho_S) - von_neumann_entropy(rho_S);
    if (s.H_H.size() && s.H_C.size()) {
        out.Q_H = expect(s.H_H, vh.rho_E - s.rho_H);
        out.Q_C = expect(s.H_C, vc.rho_E - s.rho_C);
        if (s.H_S.size()) out.W = expect(s.H_S, vc.rho_S - rho_S) + out.Q_H + out.Q_C;
        if (std::isfinite(s.beta_H) && std::isfinite(s.beta_C))
            out.sigma_clausius = out.dS_S + s.beta_H * out.Q_H + s.beta_C * out.Q_C;
    }
    return out;
}

FourStrokeResult four_stroke(const FourStrokeSpec& s) {
    const int d = static_cast<int>(s.V1.rows());
    Mat rho0 = Mat::Zero(d, d);
    rho0(0, 0) = 1.0;
    LimitCycle lc = channel_fixed_point([&](const Mat& r) { return four_stroke_map(s, r); }, d, rho0);
    FourStrokeResult out = four_stroke_cycle(s, lc.rho);
    out.at_limit_cycle = true;
    return out;
}

}  // namespace entroprod::collisional
