// lindblad.cpp — Lindblad generators, integration, steady states, gaps and Spohn rates
#include "entroprod/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "entroprod/maps.hpp"

namespace entroprod::lindblad {

using namespace entroprod::core;

namespace {

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

SpMat sparse(const Mat& m) { return m.sparseView(); }

SpMat sparse_identity(int d) {
    SpMat id(d, d);
    id.setIdentity();
    return id;
}

// X -> A X B
SpMat sparse_sprepost(const SpMat& a, const SpMat& b) {
    SpMat bt = b.transpose();
    return Eigen::kroneckerProduct(bt, a).eval();
}

// Five-point central differences where the grid is locally uniform, second
// order elsewhere.
std::vector<double> derivative(const std::vector<double>& t, const std::vector<double>& y) {
    std::vector<double> d = maps::time_derivative(t, y);
    const size_t n = t.size();
    for (size_t k = 2; k + 2 < n; ++k) {
        const double h = t[k + 1] - t[k];
        bool uniform = true;
        for (size_t j = k - 2; j < k + 2; ++j)
            if (std::abs((t[j + 1] - t[j]) - h) > 1e-9 * h) uniform = false;
        if (uniform) d[k] = (y[k - 2] - 8.0 * y[k - 1] + 8.0 * y[k + 1] - y[k + 2]) / (12.0 * h);
    }
    return d;
}

}  // namespace

Mat LindbladModel::hamiltonian(double t) const { return H_of_t ? H_of_t(t) : H; }

void LindbladModel::validate() const {
    const int d = dim();
    if (d < 1) throw std::invalid_argument("LindbladModel: empty Hamiltonian");
    if (d > kMaxDim) throw std::invalid_argument("LindbladModel: dimension exceeds " + std::to_string(kMaxDim));
    check_hermitian(H);
    for (const Jump& j : jumps) {
        if (j.L.rows() != d || j.L.cols() != d) throw std::invalid_argument("LindbladModel: jump operator dimension");
        if (!(j.rate >= 0.0)) throw std::invalid_argument("LindbladModel: negative rate");
    }
}

Mat LindbladModel::dissipator(const Mat& rho) const {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const Jump& j : jumps) {
        Mat ld = j.L.adjoint() * j.L;
        out += j.rate * (j.L * rho * j.L.adjoint() - 0.5 * (ld * rho + rho * ld));
    }
    return out;
}

Mat LindbladModel::apply(const Mat& rho, double t) const {
    Mat h = hamiltonian(t);
    return cplx(0, -1) * (h * rho - rho * h) + dissipator(rho);
}

double LindbladModel::norm_bound(double t) const {
    double b = 2.0 * operator_norm(hamiltonian(t));
    for (const Jump& j : jumps) {
        double n = operator_norm(j.L);
        b += 2.0 * j.rate * n * n;
    }
    return b;
}

Mat build(const LindbladModel& m) {
    m.validate();
    Mat s = hamiltonian_superop(m.H);
    for (const Jump& j : m.jumps) s += j.rate * core::dissipator(j.L);
    return s;
}

SpMat build_sparse(const LindbladModel& m) {
    m.validate();
    const int d = m.dim();
    SpMat id = sparse_identity(d);
    SpMat h = sparse(m.H);
    SpMat s = cplx(0, -1) * (sparse_sprepost(h, id) - sparse_sprepost(id, h));
    for (const Jump& j : m.jumps) {
        SpMat L = sparse(j.L), Ld = sparse(Mat(j.L.adjoint())), LdL = sparse(Mat(j.L.adjoint() * j.L));
        s += j.rate * (sparse_sprepost(L, Ld) - 0.5 * sparse_sprepost(LdL, id) - 0.5 * sparse_sprepost(id, LdL));
    }
    s.makeCompressed();
    return s;
}

double trace_preservation_residual(const Mat& superop) {
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(superop.rows()))));
    CVec id = vec(identity(d));
    return (id.adjoint() * superop).cwiseAbs().maxCoeff();
}

std::vector<cplx> spectrum(const LindbladModel& m) {
    if (m.dim() > kMaxSpectrumDim)
        throw std::invalid_argument("spectrum: dense eigensolve limited to d <= " + std::to_string(kMaxSpectrumDim));
    CVec w = general_eigenvalues(build(m));
    std::vector<cplx> ev(w.data(), w.data() + w.size());
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
    return ev;
}

Trajectory integrate(const LindbladModel& m, const Mat& rho0, const std::vector<double>& t_grid, double max_step) {
    m.validate();
    check_density(rho0);
    if (rho0.rows() != m.dim()) throw std::invalid_argument("integrate: state dimension mismatch");
    if (t_grid.empty()) throw std::invalid_argument("integrate: empty time grid");
    for (size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("integrate: time grid must increase");

    Trajectory tr;
    Mat rho = rho0;
    auto record = [&](double t) {
        tr.t.push_back(t);
        tr.rho.push_back(rho);
        tr.min_eigenvalue = std::min(tr.min_eigenvalue, eigh(rho).values(0));
    };
    record(t_grid[0]);
    for (size_t k = 1; k < t_grid.size(); ++k) {
        double t = t_grid[k - 1];
        const double span = t_grid[k] - t;
        double h_max = 0.1 / std::max(m.norm_bound(t), 1e-300);
        if (max_step > 0.0) h_max = std::min(h_max, max_step);
        const long n = std::max<long>(1, static_cast<long>(std::ceil(span / h_max)));
        const double h = span / static_cast<double>(n);
        for (long s = 0; s < n; ++s) {
            Mat k1 = m.apply(rho, t);
            Mat k2 = m.apply(rho + 0.5 * h * k1, t + 0.5 * h);
            Mat k3 = m.apply(rho + 0.5 * h * k2, t + 0.5 * h);
            Mat k4 = m.apply(rho + h * k3, t + h);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            if (!rho.allFinite() || rho.norm() > 1e3)
                throw std::runtime_error("integrate: step instability (state norm blow-up)");
            cplx tr_rho = rho.trace();
            tr.max_trace_drift = std::max(tr.max_trace_drift, std::abs(tr_rho - 1.0));
            rho = hermitize(rho / tr_rho);
            ++tr.substeps;
        }
        record(t_grid[k]);
    }
    if (tr.min_eigenvalue < -1e-8)
        tr.warnings.push_back("positivity drift: minimum eigenvalue " + fmt(tr.min_eigenvalue));
    return tr;
}

Mat propagate_expm(const LindbladModel& m, const Mat& rho0, double t) {
    if (m.time_dependent()) throw std::invalid_argument("propagate_expm: generator must be time independent");
    Mat s = build(m) * cplx(t, 0.0);
    Mat e = s.exp();
    return unvec(e * vec(rho0), m.dim());
}

SteadyState steady_state(const LindbladModel& m) {
    m.validate();
    const int d = m.dim();
    const double scale = std::max(1.0, m.norm_bound());
    if (d <= kDenseUniquenessDim) {
        CVec w = general_eigenvalues(build(m));
        int zeros = 0;
        for (int i = 0; i < w.size(); ++i)
            if (std::abs(w(i)) < 1e-8 * scale) ++zeros;
        if (zeros != 1) throw std::runtime_error("steady_state: degenerate steady space");
    }
    SpMat s = build_sparse(m);
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int k = 0; k < s.outerSize(); ++k)
        for (SpMat::InnerIterator it(s, k); it; ++it)
            if (it.row() != 0) trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int i = 0; i < d; ++i) trip.emplace_back(0, i + d * i, 1.0);
    SpMat a(d * d, d * d);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    Eigen::SparseLU<SpMat> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("steady_state: degenerate steady space");
    CVec b = CVec::Zero(d * d);
    b(0) = 1.0;
    CVec x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite())
        throw std::runtime_error("steady_state: degenerate steady space");
    SteadyState out;
    out.rho = hermitize(unvec(x, d));
    out.rho /= out.rho.trace().real();
    out.residual = (s * vec(out.rho)).cwiseAbs().maxCoeff();
    if (out.residual > 1e-8 * scale || eigh(out.rho).values(0) < -1e-8)
        throw std::runtime_error("steady_state: degenerate or ill-conditioned steady space");
    return out;
}

double gap(const LindbladModel& m) {
    std::vector<cplx> ev = spectrum(m);
    size_t zero = 0;
    for (size_t i = 1; i < ev.size(); ++i)
        if (std::abs(ev[i]) < std::abs(ev[zero])) zero = i;
    double g = kInf;
    for (size_t i = 0; i < ev.size(); ++i)
        if (i != zero) g = std::min(g, -ev[i].real());
    return std::max(0.0, g);
}

LindbladModel kerr_model(double Delta, double U, double eps, double kappa, int N_scale, int fock_cut) {
    if (N_scale < 1) throw std::invalid_argument("kerr_model: N_scale must be positive");
    if (fock_cut < 6) throw std::invalid_argument("kerr_model: Fock cut too small");
    const double u = U / N_scale, e = eps * std::sqrt(static_cast<double>(N_scale));
    Mat a = destroy(fock_cut), ad = a.adjoint();
    LindbladModel m;
    m.H = Delta * ad * a + 0.5 * u * ad * ad * a * a + cplx(0, e) * (ad - a);
    m.H = hermitize(m.H);
    m.jumps = {{a, kappa}};
    return m;
}

TruncationCheck check_fock_truncation(const Mat& rho) {
    const int cut = static_cast<int>(rho.rows());
    TruncationCheck c;
    for (int n = 0; n < cut; ++n) {
        double p = rho(n, n).real();
        c.mean_n += n * p;
        if (n > cut - 5) c.tail += p;
    }
    c.ok = c.mean_n < 0.5 * cut && c.tail < 1e-8;
    return c;
}

void require_fock_truncation(const Mat& rho) {
    TruncationCheck c = check_fock_truncation(rho);
    if (!c.ok)
        throw std::runtime_error("Fock truncation violated: <n> = " + fmt(c.mean_n) + ", tail = " + fmt(c.tail));
}

SpinOperators spin_operators(double S) {
    const double two_s = 2.0 * S;
    if (!(S > 0.0) || std::abs(two_s - std::round(two_s)) > 1e-12)
        throw std::invalid_argument("spin_operators: 2S must be a positive integer");
    const int d = static_cast<int>(std::lround(two_s)) + 1;
    SpinOperators o;
    o.Sp = Mat::Zero(d, d);
    o.Sz = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        double mk = -S + k;
        o.Sz(k, k) = mk;
        if (k + 1 < d) o.Sp(k + 1, k) = std::sqrt(S * (S + 1.0) - mk * (mk + 1.0));
    }
    o.Sm = o.Sp.adjoint();
    o.Sx = 0.5 * (o.Sp + o.Sm);
    o.Sy = cplx(0, -0.5) * (o.Sp - o.Sm);
    return o;
}

LindbladModel macrospin_model(double h, double kappa, double S) {
    SpinOperators o = spin_operators(S);
    LindbladModel m;
    m.H = h * o.Sx;
    m.jumps = {{o.Sm, 2.0 * kappa / S}};
    return m;
}

SqueezedParameters squeezed_parameters(double nbar, double r, double theta) {
    if (nbar < 0.0) throw std::invalid_argument("squeezed_parameters: negative occupation");
    SqueezedParameters p;
    p.N = (nbar + 0.5) * std::cosh(2.0 * r) - 0.5;
    p.M = (nbar + 0.5) * std::polar(1.0, theta) * std::sinh(2.0 * r);
    return p;
}

LindbladModel squeezed_dissipator(double gamma, const SqueezedParameters& p, double omega_s, int fock_cut) {
    if (gamma < 0.0) throw std::invalid_argument("squeezed_dissipator: negative damping rate");
    const double lhs = std::norm(p.M), rhs = p.N * (p.N + 1.0);
    if (p.N < 0.0 || lhs > rhs + 1e-12 * std::max(1.0, rhs))
        throw std::invalid_argument("squeezed_dissipator: unphysical bath, |M|^2 > N(N+1)");
    // Kossakowski matrix in the (a, a^dagger) basis.
    Mat c(2, 2);
    c << p.N + 1.0, -std::conj(p.M), -p.M, p.N;
    Eigh e = eigh(c);
    Mat a = destroy(fock_cut), ad = a.adjoint();
    LindbladModel m;
    m.H = omega_s * ad * a;
    for (int l = 0; l < 2; ++l) {
        double rate = gamma * std::max(0.0, e.values(l));
        if (rate == 0.0) continue;
        m.jumps.push_back({e.vectors(0, l) * a + e.vectors(1, l) * ad, rate});
    }
    return m;
}

LindbladModel squeezed_dissipator(double gamma, double nbar, double r, double theta, double omega_s, int fock_cut) {
    return squeezed_dissipator(gamma, squeezed_parameters(nbar, r, theta), omega_s, fock_cut);
}

SpohnRates spohn_rates(const LindbladModel& m, double beta, const Trajectory& traj,
                       const std::function<Mat(double)>& dH_dt) {
    m.validate();
    SpohnRates out;
    const double fd = 1e-6;
    for (size_t k = 0; k < traj.t.size(); ++k) {
        const double t = traj.t[k];
        const Mat& rho = traj.rho[k];
        Mat H = m.hamiltonian(t);
        Mat th = thermal_state(H, beta);
        double fp = m.dissipator(th).cwiseAbs().maxCoeff();
        out.fixed_point_residual = std::max(out.fixed_point_residual, fp);
        if (fp > 1e-8)
            throw std::invalid_argument("spohn_rates: dissipator does not fix the instantaneous Gibbs state");
        Mat Drho = m.dissipator(rho);
        Mat dH = dH_dt ? dH_dt(t)
                       : (m.time_dependent() ? Mat((m.hamiltonian(t + fd) - m.hamiltonian(t - fd)) / (2.0 * fd))
                                             : Mat(Mat::Zero(H.rows(), H.cols())));
        out.t.push_back(t);
        out.Q_dot.push_back(-expect(H, Drho));
        out.W_dot.push_back(expect(dH, rho));
        out.energy.push_back(expect(H, rho));
        out.entropy.push_back(von_neumann_entropy(rho));
        out.relent.push_back(relative_entropy(rho, th));

        Eigh e = eigh(rho);
        Mat x = e.vectors.adjoint() * Drho * e.vectors;
        Mat log_th = herm_fun(th, [](double v) { return std::log(v); });
        double s = expect(log_th, Drho);  // Tr D(rho) ln rho_th
        for (int i = 0; i < e.values.size(); ++i) {
            double xi = x(i, i).real(), pi = e.values(i);
            if (pi <= 1e-14) {
                if (xi > 1e-14) s = kInf;
                continue;
            }
            if (std::isfinite(s)) s -= xi * std::log(pi);
        }
        out.sigma_dot.push_back(s);
    }
    if (out.t.size() >= 2) {
        std::vector<double> dS = derivative(out.t, out.entropy);
        std::vector<double> dU = derivative(out.t, out.energy);
        for (size_t k = 0; k < out.t.size(); ++k) {
            out.sigma_dot_fd.push_back(dS[k] + beta * out.Q_dot[k]);
            out.first_law_residual.push_back(dU[k] - (out.W_dot[k] - out.Q_dot[k]));
        }
    }
    return out;
}

std::string to_csv_sweep(const std::vector<double>& parameter, const std::vector<double>& gap,
                         const std::vector<double>& order_parameter, const std::vector<double>& n_a) {
    std::string s = "parameter,gap,order_parameter,n_a\n";
    for (size_t i = 0; i < parameter.size(); ++i)
        s += fmt(parameter[i]) + "," + fmt(gap[i]) + "," + fmt(order_parameter[i]) + "," + fmt(n_a[i]) + "\n";
    return s;
}

}  // namespace entroprod::lindblad
