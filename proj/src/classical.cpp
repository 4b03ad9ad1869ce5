// classical.cpp — Pauli master equations, Schnakenberg entropy production, FCS, Glauber-Ising and Fokker-Planck
#include "entroprod/classical.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace entroprod::classical {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double scale_of(const RMat& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

// (a - b) ln(a / b) for one ordered pair of fluxes.
double pair_sigma(double a, double b) {
    if (a == 0.0 && b == 0.0) return 0.0;
    if (a == 0.0 || b == 0.0) return kInf;
    return (a - b) * std::log(a / b);
}

void check_microreversible(const RMat& W, const char* who) {
    const int d = static_cast<int>(W.rows());
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if ((W(i, j) > 0.0) != (W(j, i) > 0.0))
                throw std::invalid_argument(std::string(who) + ": one-way transition between states " +
                                            std::to_string(i) + " and " + std::to_string(j));
}

void check_parts(const std::vector<RMat>& parts, const char* who) {
    if (parts.empty()) throw std::invalid_argument(std::string(who) + ": empty reservoir list");
    for (const auto& w : parts) {
        if (w.rows() != parts.front().rows() || w.cols() != parts.front().cols())
            throw std::invalid_argument(std::string(who) + ": reservoir dimensions differ");
        validate_generator(w);
    }
}

RMat sum_parts(const std::vector<RMat>& parts) {
    RMat w = RMat::Zero(parts.front().rows(), parts.front().cols());
    for (const auto& p : parts) w += p;
    return w;
}

// Scharfetter-Gummel weight z / (e^{z/2} - e^{-z/2}).
double sg_sym(double z) {
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 24.0;
    return 0.5 * z / std::sinh(0.5 * z);
}

double bernoulli(double z) {
    if (std::abs(z) < 1e-12) return 1.0 - 0.5 * z;
    return z / std::expm1(z);
}

}  // namespace

RMat generator(const RMat& rates) {
    if (rates.rows() != rates.cols()) throw std::invalid_argument("generator: rate matrix must be square");
    RMat w = rates;
    w.diagonal().setZero();
    for (int j = 0; j < w.cols(); ++j) w(j, j) = -w.col(j).sum();
    return w;
}

void validate_generator(const RMat& W, double tol) {
    if (W.rows() != W.cols() || W.rows() == 0) throw std::invalid_argument("rate matrix must be square and nonempty");
    if (!W.allFinite()) throw std::invalid_argument("rate matrix has non-finite entries");
    const double s = scale_of(W);
    for (int j = 0; j < W.cols(); ++j) {
        for (int i = 0; i < W.rows(); ++i)
            if (i != j && W(i, j) < 0.0)
                throw std::invalid_argument("rate matrix: negative rate " + std::to_string(j) + " -> " +
                                            std::to_string(i));
        if (std::abs(W.col(j).sum()) > tol * s)
            throw std::invalid_argument("rate matrix: column " + std::to_string(j) +
                                        " does not sum to zero (W(i, j) is the rate j -> i)");
    }
}

void validate_probability(const RVec& p, double tol) {
    if (p.size() == 0 || !p.allFinite()) throw std::invalid_argument("probability vector is empty or non-finite");
    if (p.minCoeff() < -tol) throw std::invalid_argument("probability vector has negative entries");
    if (std::abs(p.sum() - 1.0) > tol) throw std::invalid_argument("probability vector does not sum to 1");
}

RateMatrix::RateMatrix(const RMat& rates) : w_(generator(rates)) { validate_generator(w_); }

RateMatrix::RateMatrix(const std::vector<RMat>& parts) {
    if (parts.empty()) throw std::invalid_argument("RateMatrix: empty reservoir list");
    for (const auto& r : parts) {
        if (r.rows() != parts.front().rows() || r.cols() != parts.front().cols())
            throw std::invalid_argument("RateMatrix: reservoir dimensions differ");
        parts_.push_back(generator(r));
        validate_generator(parts_.back());
    }
    w_ = sum_parts(parts_);
}

RVec evolve(const RMat& W, const RVec& p0, double t) {
    validate_generator(W);
    validate_probability(p0);
    if (p0.size() != W.rows()) throw std::invalid_argument("evolve: dimension mismatch");
    if (t < 0.0) throw std::invalid_argument("evolve: negative time");
    RMat wt = W * t;
    RMat prop = wt.exp();
    RVec p = prop * p0;
    if (p.minCoeff() < -1e-12) throw std::runtime_error("evolve: negative probability beyond -1e-12");
    return p.cwiseMax(0.0);
}

RVec steady_state(const RMat& W) {
    validate_generator(W);
    Eigen::JacobiSVD<RMat> svd(W, Eigen::ComputeFullV);
    const RVec& s = svd.singularValues();
    const int d = static_cast<int>(W.rows());
    const double thresh = 1e-12 * scale_of(W) * d;
    if (d > 1 && s(d - 2) <= thresh) throw std::invalid_argument("steady_state: kernel is not one dimensional");
    RVec p = svd.matrixV().col(d - 1);
    p /= p.sum();
    if (p.minCoeff() < -1e-10) throw std::runtime_error("steady_state: null vector is not a probability");
    p = p.cwiseMax(0.0);
    return p / p.sum();
}

Schnakenberg schnakenberg(const RMat& W, const RVec& p) {
    validate_generator(W);
    validate_probability(p);
    if (p.size() != W.rows()) throw std::invalid_argument("schnakenberg: dimension mismatch");
    check_microreversible(W, "schnakenberg");
    const int d = static_cast<int>(W.rows());
    Schnakenberg r;
    r.J = RMat::Zero(d, d);
    r.X = RMat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i == j || W(i, j) == 0.0) continue;
            const double a = W(i, j) * p(j), b = W(j, i) * p(i);
            r.J(i, j) = a - b;
            if (a == 0.0 && b == 0.0) continue;
            r.X(i, j) = (a == 0.0) ? -kInf : (b == 0.0 ? kInf : std::log(a / b));
            if (j > i) {
                r.sigma_dot += pair_sigma(a, b);
                r.phi_dot += (a - b) * std::log(W(i, j) / W(j, i));
            }
        }
    }
    const RVec pdot = W * p;
    for (int i = 0; i < d; ++i) {
        if (p(i) > 0.0)
            r.dS_dt -= pdot(i) * std::log(p(i));
        else if (pdot(i) > 0.0)
            r.dS_dt = kInf;
    }
    return r;
}

MultibathSigma multibath_sigma(const std::vector<RMat>& parts, const RVec& p) {
    check_parts(parts, "multibath_sigma");
    validate_probability(p);
    if (p.size() != parts.front().rows()) throw std::invalid_argument("multibath_sigma: dimension mismatch");
    const int d = static_cast<int>(p.size());
    MultibathSigma r;
    for (const auto& w : parts) {
        check_microreversible(w, "multibath_sigma");
        double phi = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                if (w(i, j) == 0.0) continue;
                const double a = w(i, j) * p(j), b = w(j, i) * p(i);
                r.sigma_correct += pair_sigma(a, b);
                phi += (a - b) * std::log(w(i, j) / w(j, i));
            }
        r.phi_per_bath.push_back(phi);
    }
    r.sigma_lumped = schnakenberg(sum_parts(parts), p).sigma_dot;
    return r;
}

double kl_rate(const RMat& W, const RVec& p, const RVec& q) {
    const RVec pdot = W * p;
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p(i) > 0.0) {
            s += pdot(i) * std::log(p(i) / q(i));
        } else if (pdot(i) != 0.0) {
            return pdot(i) > 0.0 ? -kInf : kInf;
        }
    }
    return s;
}

RMat tilted_generator(const std::vector<RMat>& parts, const std::vector<RMat>& increments, double chi) {
    check_parts(parts, "tilted_generator");
    if (increments.size() != parts.size()) throw std::invalid_argument("tilted_generator: one increment matrix per reservoir");
    const int d = static_cast<int>(parts.front().rows());
    RMat L = RMat::Zero(d, d);
    for (std::size_t a = 0; a < parts.size(); ++a) {
        if (increments[a].rows() != d || increments[a].cols() != d)
            throw std::invalid_argument("tilted_generator: increment dimension mismatch");
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i)
                L(i, j) += (i == j) ? parts[a](i, j) : parts[a](i, j) * std::exp(chi * increments[a](i, j));
    }
    return L;
}

namespace {

Eigen::VectorXcd spectrum(const RMat& L) {
    Eigen::EigenSolver<RMat> es(L, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("scgf: eigenvalue solver failed");
    return es.eigenvalues();
}

double dominant_at_zero(const RMat& L, double gap_tol) {
    auto ev = spectrum(L);
    std::vector<double> re(ev.size());
    for (int k = 0; k < ev.size(); ++k) re[k] = ev(k).real();
    std::sort(re.rbegin(), re.rend());
    if (re.size() > 1 && re[0] - re[1] < gap_tol) throw std::invalid_argument("fcs: non-unique dominant eigenvalue");
    return re[0];
}

double closest(const RMat& L, double target) {
    auto ev = spectrum(L);
    double best = ev(0).real(), dist = kInf;
    for (int k = 0; k < ev.size(); ++k) {
        const double dd = std::abs(ev(k) - cplx(target, 0.0));
        if (dd < dist) {
            dist = dd;
            best = ev(k).real();
        }
    }
    return best;
}

// Follows the eigenvalue from chi = 0 to chi in steps no larger than 0.05.
double track(const std::vector<RMat>& parts, const std::vector<RMat>& inc, double chi, double gap_tol) {
    double theta = dominant_at_zero(tilted_generator(parts, inc, 0.0), gap_tol);
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(chi) / 0.05)));
    for (int s = 1; s <= steps; ++s) theta = closest(tilted_generator(parts, inc, chi * s / steps), theta);
    return theta;
}

}  // namespace

double scgf(const std::vector<RMat>& parts, const std::vector<RMat>& increments, double chi) {
    return track(parts, increments, chi, 1e-10);
}

std::vector<double> scgf(const std::vector<RMat>& parts, const std::vector<RMat>& increments,
                         const std::vector<double>& chi_grid) {
    std::vector<double> out;
    out.reserve(chi_grid.size());
    for (double c : chi_grid) out.push_back(scgf(parts, increments, c));
    return out;
}

FcsResult fcs(const std::vector<RMat>& parts, const std::vector<RMat>& increments, const FcsOptions& opt) {
    if (!(opt.h > 0.0)) throw std::invalid_argument("fcs: step must be positive");
    FcsResult r;
    r.theta_at_zero = track(parts, increments, 0.0, opt.gap_tol);
    auto th = [&](double c) { return track(parts, increments, c, opt.gap_tol); };
    const double h = opt.h, h2 = 0.5 * opt.h;
    const double tp = th(h), tm = th(-h), tp2 = th(h2), tm2 = th(-h2), t0 = r.theta_at_zero;
    const double d1 = (tp - tm) / (2 * h), d1h = (tp2 - tm2) / (2 * h2);
    const double d2 = (tp - 2 * t0 + tm) / (h * h), d2h = (tp2 - 2 * t0 + tm2) / (h2 * h2);
    r.mean = (4 * d1h - d1) / 3;
    r.variance = (4 * d2h - d2) / 3;
    r.p_ss = steady_state(sum_parts(parts));
    r.sigma_dot = multibath_sigma(parts, r.p_ss).sigma_correct;
    r.tur_lhs = (std::abs(r.mean) <= opt.current_tol) ? kInf : r.variance / (r.mean * r.mean);
    r.tur_rhs = (r.sigma_dot == 0.0) ? kInf : 2.0 / r.sigma_dot;
    r.tur_holds = std::isinf(r.tur_lhs) || r.tur_lhs >= r.tur_rhs - 1e-8;
    return r;
}

OnsagerResult onsager_sigma(const RMat& L, const RVec& x) {
    if (L.rows() != L.cols() || L.rows() != x.size()) throw std::invalid_argument("onsager_sigma: dimension mismatch");
    const RMat s = 0.5 * (L + L.transpose());
    OnsagerResult r;
    r.value = x.dot(s * x);
    if (s.rows() > 0) {
        Eigen::SelfAdjointEigenSolver<RMat> es(s, Eigen::EigenvaluesOnly);
        r.min_eigenvalue = es.eigenvalues()(0);
        r.psd = r.min_eigenvalue >= -1e-12 * scale_of(s);
    }
    return r;
}

std::vector<RMat> two_level_baths(double eps, const std::vector<double>& betas, const std::vector<double>& gammas) {
    if (betas.size() != gammas.size() || betas.empty())
        throw std::invalid_argument("two_level_baths: one gamma per beta");
    std::vector<RMat> parts;
    for (std::size_t a = 0; a < betas.size(); ++a) {
        if (!(gammas[a] > 0.0)) throw std::invalid_argument("two_level_baths: gamma must be positive");
        const double f = 1.0 / (std::exp(betas[a] * eps) + 1.0);
        RMat r = RMat::Zero(2, 2);
        r(1, 0) = gammas[a] * f;
        r(0, 1) = gammas[a] * (1.0 - f);
        parts.push_back(generator(r));
    }
    return parts;
}

std::vector<RMat> heat_increments(const RVec& energies, int baths, int counted_bath) {
    if (counted_bath < 0 || counted_bath >= baths) throw std::invalid_argument("heat_increments: bath index out of range");
    const int d = static_cast<int>(energies.size());
    std::vector<RMat> inc(baths, RMat::Zero(d, d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) inc[counted_bath](i, j) = energies(j) - energies(i);
    return inc;
}

void GlauberSpec::validate() const {
    if (n_sites < 1 || n_sites > kMaxGlauberSites)
        throw std::invalid_argument("glauber_ising: n_sites must be in [1, " + std::to_string(kMaxGlauberSites) + "]");
    if (!(gamma > 0.0) || !std::isfinite(J)) throw std::invalid_argument("glauber_ising: gamma must be positive, J finite");
    if (beta.size() != 1 && static_cast<int>(beta.size()) != n_sites)
        throw std::invalid_argument("glauber_ising: beta needs 1 or n_sites entries");
    for (double b : beta)
        if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("glauber_ising: beta must be finite and >= 0");
    if (!mu.empty() && mu.size() != 1 && static_cast<int>(mu.size()) != n_sites)
        throw std::invalid_argument("glauber_ising: mu needs 0, 1 or n_sites entries");
    if (static_cast<int>(neighbors.size()) != n_sites)
        throw std::invalid_argument("glauber_ising: one neighbor list per site");
    for (int i = 0; i < n_sites; ++i)
        for (int k : neighbors[i])
            if (k < 0 || k >= n_sites || k == i) throw std::invalid_argument("glauber_ising: bad neighbor index");
}

std::vector<std::vector<int>> periodic_square_lattice(int lx, int ly) {
    if (lx < 1 || ly < 1) throw std::invalid_argument("periodic_square_lattice: sizes must be positive");
    std::vector<std::vector<int>> nb(lx * ly);
    auto idx = [&](int x, int y) { return ((y + ly) % ly) * lx + (x + lx) % lx; };
    for (int y = 0; y < ly; ++y)
        for (int x = 0; x < lx; ++x) {
            auto& v = nb[idx(x, y)];
            if (lx > 1) {
                v.push_back(idx(x + 1, y));
                v.push_back(idx(x - 1, y));
            }
            if (ly > 1) {
                v.push_back(idx(x, y + 1));
                v.push_back(idx(x, y - 1));
            }
        }
    return nb;
}

std::vector<double> checkerboard(int lx, int ly, double odd_value, double even_value) {
    std::vector<double> v(lx * ly);
    for (int y = 0; y < ly; ++y)
        for (int x = 0; x < lx; ++x) v[y * lx + x] = ((x + y) % 2) ? odd_value : even_value;
    return v;
}

namespace {

struct GlauberRates {
    int n;
    std::vector<double> beta, mu;
    const GlauberSpec& s;

    explicit GlauberRates(const GlauberSpec& spec) : n(spec.n_sites), s(spec) {
        beta = spec.beta.size() == 1 ? std::vector<double>(n, spec.beta[0]) : spec.beta;
        if (spec.mu.empty())
            mu.assign(n, 0.0);
        else
            mu = spec.mu.size() == 1 ? std::vector<double>(n, spec.mu[0]) : spec.mu;
    }

    static int spin(std::uint32_t state, int i) { return ((state >> i) & 1u) ? -1 : 1; }

    double rate(std::uint32_t state, int i) const {
        double field = 0.0;
        for (int k : s.neighbors[i]) field += spin(state, k);
        field = s.J * field + 0.5 * mu[i];
        return 0.5 * s.gamma * (1.0 - spin(state, i) * std::tanh(beta[i] * field));
    }

    std::vector<int> reservoirs() const {
        std::map<std::pair<double, double>, int> ids;
        std::vector<int> out(n);
        for (int i = 0; i < n; ++i) {
            auto it = ids.emplace(std::make_pair(beta[i], mu[i]), static_cast<int>(ids.size())).first;
            out[i] = it->second;
        }
        return out;
    }
};

}  // namespace

GlauberResult glauber_ising(const GlauberSpec& spec) {
    spec.validate();
    const GlauberRates g(spec);
    const int n = spec.n_sites;
    const std::uint32_t d = 1u << n;
    GlauberResult r;
    r.reservoir_of_site = g.reservoirs();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(d) * (n + 1));
    for (std::uint32_t s = 0; s < d; ++s) {
        double out = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = g.rate(s, i);
            out += w;
            trip.emplace_back(static_cast<int>(s ^ (1u << i)), static_cast<int>(s), w);
        }
        trip.emplace_back(static_cast<int>(s), static_cast<int>(s), -out);
    }
    r.W.resize(d, d);
    r.W.setFromTriplets(trip.begin(), trip.end());
    trip = {};

    // Replace the last balance equation by normalization.
    SpRMat A = r.W;
    for (std::uint32_t c = 0; c < d; ++c)
        for (SpRMat::InnerIterator it(A, c); it; ++it)
            if (it.row() == static_cast<int>(d) - 1) it.valueRef() = 0.0;
    std::vector<Eigen::Triplet<double>> ones;
    ones.reserve(d);
    for (std::uint32_t c = 0; c < d; ++c) ones.emplace_back(static_cast<int>(d) - 1, static_cast<int>(c), 1.0);
    SpRMat N(d, d);
    N.setFromTriplets(ones.begin(), ones.end());
    A += N;
    A.prune(0.0);
    A.makeCompressed();
    Eigen::SparseLU<SpRMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw std::runtime_error("glauber_ising: steady-state factorization failed");
    RVec rhs = RVec::Zero(d);
    rhs(d - 1) = 1.0;
    r.p_ss = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !r.p_ss.allFinite()) throw std::runtime_error("glauber_ising: steady-state solve failed");
    if (r.p_ss.minCoeff() < -1e-10) throw std::runtime_error("glauber_ising: steady state has negative entries");
    r.p_ss = r.p_ss.cwiseMax(0.0);
    r.p_ss /= r.p_ss.sum();
    if ((r.W * r.p_ss).cwiseAbs().maxCoeff() > 1e-10 * spec.gamma * n)
        throw std::runtime_error("glauber_ising: steady-state residual too large");

    // Per-reservoir sum: every flip pair belongs to the reservoir of its site.
    std::vector<double> per_res(*std::max_element(r.reservoir_of_site.begin(), r.reservoir_of_site.end()) + 1, 0.0);
    for (std::uint32_t s = 0; s < d; ++s)
        for (int i = 0; i < n; ++i) {
            const std::uint32_t t = s ^ (1u << i);
            if (t < s) continue;
            per_res[r.reservoir_of_site[i]] += pair_sigma(g.rate(s, i) * r.p_ss(s), g.rate(t, i) * r.p_ss(t));
        }
    for (double v : per_res) r.sigma_dot += v;

    // Lumped: pairs read off the summed generator.
    for (int c = 0; c < r.W.outerSize(); ++c)
        for (SpRMat::InnerIterator it(r.W, c); it; ++it) {
            const int i = static_cast<int>(it.row()), j = c;
            if (i >= j) continue;
            r.sigma_lumped += pair_sigma(it.value() * r.p_ss(j), r.W.coeff(j, i) * r.p_ss(i));
        }

    for (std::uint32_t s = 0; s < d; ++s) {
        int m = 0;
        for (int i = 0; i < n; ++i) m += GlauberRates::spin(s, i);
        r.magnetization += r.p_ss(s) * m;
    }
    r.magnetization /= n;
    return r;
}

std::vector<RMat> glauber_parts(const GlauberSpec& spec) {
    spec.validate();
    if (spec.n_sites > 10) throw std::invalid_argument("glauber_parts: dense form limited to 10 sites");
    const GlauberRates g(spec);
    const auto res = g.reservoirs();
    const int d = 1 << spec.n_sites;
    std::vector<RMat> parts(*std::max_element(res.begin(), res.end()) + 1, RMat::Zero(d, d));
    for (int s = 0; s < d; ++s)
        for (int i = 0; i < spec.n_sites; ++i) parts[res[i]](s ^ (1 << i), s) += g.rate(static_cast<std::uint32_t>(s), i);
    for (auto& p : parts) p = generator(p);
    return parts;
}

void FokkerPlanckSpec::validate() const {
    if (!V) throw std::invalid_argument("fokker_planck_1d: potential missing");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("fokker_planck_1d: T must be positive");
    if (!(x_max > x_min)) throw std::invalid_argument("fokker_planck_1d: empty interval");
    if (n < 8) throw std::invalid_argument("fokker_planck_1d: at least 8 grid points");
}

RVec sample_density(const FokkerPlanckSpec& spec, const std::function<double(double)>& f) {
    spec.validate();
    const double dx = (spec.x_max - spec.x_min) / spec.n;
    RVec p(spec.n);
    for (int k = 0; k < spec.n; ++k) p(k) = f(spec.x_min + (k + 0.5) * dx);
    if (p.minCoeff() < 0.0 || !(p.sum() > 0.0)) throw std::invalid_argument("sample_density: density must be nonnegative");
    return p / (p.sum() * dx);
}

FokkerPlanckResult fokker_planck_1d(const FokkerPlanckSpec& spec, const RVec& P0, const std::vector<double>& times) {
    spec.validate();
    const int n = spec.n;
    if (P0.size() != n) throw std::invalid_argument("fokker_planck_1d: P0 size differs from grid");
    FokkerPlanckResult r;
    r.dx = (spec.x_max - spec.x_min) / n;
    const double dx = r.dx, D = spec.T;
    if (!P0.allFinite() || P0.minCoeff() < 0.0 || std::abs(P0.sum() * dx - 1.0) > 1e-10)
        throw std::invalid_argument("fokker_planck_1d: P0 must be a nonnegative density normalized on the grid");

    r.x.resize(n);
    RVec v(n);
    for (int k = 0; k < n; ++k) {
        r.x(k) = spec.x_min + (k + 0.5) * dx;
        v(k) = spec.V(r.x(k)) / spec.T;
    }
    if (!v.allFinite()) throw std::invalid_argument("fokker_planck_1d: potential is not finite on the grid");
    if (v.maxCoeff() - v.minCoeff() > 1400.0)
        throw std::invalid_argument("fokker_planck_1d: potential range too large for the symmetrized propagator");

    // ln of the discrete Gibbs density.
    const double vmin = v.minCoeff();
    RVec lp = (-(v.array() - vmin)).matrix();
    const double lz = std::log(lp.array().exp().sum() * dx);
    lp.array() -= lz;
    r.P_th = lp.array().exp().matrix();

    // Face coefficients: J_{k+1/2} = a_k P_k - c_k P_{k+1} (already divided by dx).
    RVec a(n - 1), c(n - 1), off(n - 1);
    for (int k = 0; k + 1 < n; ++k) {
        const double z = v(k + 1) - v(k);
        a(k) = D / dx * bernoulli(z);
        c(k) = D / dx * bernoulli(-z);
        off(k) = D / (dx * dx) * sg_sym(z);
    }
    RVec diag = RVec::Zero(n);
    for (int k = 0; k + 1 < n; ++k) {
        diag(k) -= a(k) / dx;
        diag(k + 1) -= c(k) / dx;
    }
    Eigen::SelfAdjointEigenSolver<RMat> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw std::runtime_error("fokker_planck_1d: eigensolver failed");
    const RVec& lam = es.eigenvalues();
    const RMat& U = es.eigenvectors();
    const RVec half = (0.5 * lp.array()).exp().matrix();
    const RVec y = U.transpose() * (P0.array() / half.array()).matrix();

    auto flux = [&](const RVec& P) {
        RVec J(n - 1);
        for (int k = 0; k + 1 < n; ++k) J(k) = a(k) * P(k) - c(k) * P(k + 1);
        return J;
    };
    auto pdot = [&](const RVec& P) {
        const RVec J = flux(P);
        RVec d = RVec::Zero(n);
        for (int k = 0; k + 1 < n; ++k) {
            d(k) -= J(k) / dx;
            d(k + 1) += J(k) / dx;
        }
        return d;
    };

    constexpr double kFloor = 1e-300;
    for (double t : times) {
        if (t < 0.0) throw std::invalid_argument("fokker_planck_1d: negative time");
        RVec P = (U * (lam.array() * t).exp().matrix().cwiseProduct(y)).cwiseProduct(half);
        for (int k = 0; k < n; ++k)
            if (P(k) < kFloor) {
                r.floored_mass += std::abs(kFloor - P(k)) * dx;
                P(k) = kFloor;
            }
        const RVec J = flux(P);
        double sc = 0.0;
        for (int k = 0; k + 1 < n; ++k) sc += dx * J(k) * J(k) / (0.5 * (P(k) + P(k + 1)));
        const RVec dP = pdot(P);
        double skl = 0.0;
        for (int k = 0; k < n; ++k) skl -= dx * dP(k) * (std::log(P(k)) - lp(k));
        r.t.push_back(t);
        r.P.push_back(P);
        r.sigma_current.push_back(sc / D);
        r.sigma_kl.push_back(skl);
        r.mass.push_back(P.sum() * dx);
    }
    return r;
}

std::string to_csv_sigma_T(const std::vector<double>& T, const std::vector<double>& sigma) {
    if (T.size() != sigma.size()) throw std::invalid_argument("to_csv_sigma_T: length mismatch");
    std::ostringstream os;
    os << "T,sigma_dot\n";
    for (std::size_t k = 0; k < T.size(); ++k) os << fmt(T[k]) << ',' << fmt(sigma[k]) << '\n';
    return os.str();
}

std::string to_csv_sigma_t(const FokkerPlanckResult& r) {
    std::ostringstream os;
    os << "t,sigma_current,sigma_kl,mass\n";
    for (std::size_t k = 0; k < r.t.size(); ++k)
        os << fmt(r.t[k]) << ',' << fmt(r.sigma_current[k]) << ',' << fmt(r.sigma_kl[k]) << ',' << fmt(r.mass[k]) << '\n';
    return os.str();
}

std::string to_csv_cumulants(const std::vector<double>& parameter, const std::vector<FcsResult>& rows) {
    if (parameter.size() != rows.size()) throw std::invalid_argument("to_csv_cumulants: length mismatch");
    std::ostringstream os;
    os << "parameter,mean,variance,sigma_dot,tur_lhs,tur_rhs,tur_holds\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& f = rows[k];
        os << fmt(parameter[k]) << ',' << fmt(f.mean) << ',' << fmt(f.variance) << ',' << fmt(f.sigma_dot) << ','
           << fmt(f.tur_lhs) << ',' << fmt(f.tur_rhs) << ',' << (f.tur_holds ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace entroprod::classical
