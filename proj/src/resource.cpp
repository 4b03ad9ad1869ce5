// resource.cpp — thermo-majorization, Renyi second laws, coherence constraints and work bounds
#include "entroprod/resource.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace entroprod::resource {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void check_beta(double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and >= 0");
}

void check_grid(const std::vector<double>& alpha) {
    for (double a : alpha)
        if (!(a >= 0.0)) throw std::invalid_argument("alpha grid: values must be >= 0");
    for (double req : {0.0, 0.5, 1.0, 2.0, kInf})
        if (std::find(alpha.begin(), alpha.end(), req) == alpha.end())
            throw std::invalid_argument("alpha grid must include 0, 1/2, 1, 2 and infinity");
}

RVec probability_of(const RVec& p, const RVec& E) {
    EnergyPopulations pop{E, p};
    pop.validate();
    return p;
}

}  // namespace

void EnergyPopulations::validate(double tol) const {
    if (E.size() == 0 || E.size() != p.size()) throw std::invalid_argument("EnergyPopulations: sizes differ or empty");
    if (!E.allFinite() || !p.allFinite()) throw std::invalid_argument("EnergyPopulations: non-finite entries");
    if (p.minCoeff() < -tol) throw std::invalid_argument("EnergyPopulations: negative population");
    if (std::abs(p.sum() - 1.0) > tol) throw std::invalid_argument("EnergyPopulations: populations do not sum to 1");
}

std::vector<int> beta_order(const EnergyPopulations& pop, double beta) {
    pop.validate();
    check_beta(beta);
    const int d = pop.dim();
    std::vector<double> key(d);
    for (int i = 0; i < d; ++i) key[i] = pop.p(i) > 0.0 ? std::log(pop.p(i)) + beta * pop.E(i) : -kInf;
    std::vector<int> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (key[a] != key[b]) return key[a] > key[b];
        if (pop.E(a) != pop.E(b)) return pop.E(a) < pop.E(b);
        return a < b;
    });
    return idx;
}

double ThermoMajCurve::y_at(double xq) const {
    if (xq <= 0.0) return 0.0;
    if (xq >= x.back()) return 1.0;
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t k = static_cast<std::size_t>(it - x.begin());
    const double x0 = x[k - 1], x1 = x[k];
    return y[k - 1] + (y[k] - y[k - 1]) * (xq - x0) / (x1 - x0);
}

bool ThermoMajCurve::concave(double tol) const {
    double prev = kInf;
    for (std::size_t k = 1; k < x.size(); ++k) {
        const double s = (y[k] - y[k - 1]) / (x[k] - x[k - 1]);
        if (s > prev + tol * std::max(1.0, std::abs(prev))) return false;
        prev = s;
    }
    return true;
}

ThermoMajCurve curve(const EnergyPopulations& pop, double beta) {
    const auto order = beta_order(pop, beta);
    ThermoMajCurve c;
    c.x.push_back(0.0);
    c.y.push_back(0.0);
    double xs = 0.0, ys = 0.0;
    for (int i : order) {
        xs += std::exp(-beta * pop.E(i));
        ys += pop.p(i);
        c.x.push_back(xs);
        c.y.push_back(std::min(ys, 1.0));
    }
    c.y.back() = 1.0;
    return c;
}

std::string to_csv(const ThermoMajCurve& c) {
    std::ostringstream os;
    os << "x,y\n";
    for (std::size_t k = 0; k < c.x.size(); ++k) os << fmt(c.x[k]) << ',' << fmt(c.y[k]) << '\n';
    return os.str();
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "Yes";
        case Verdict::No: return "No";
        case Verdict::Incomparable: return "Incomparable";
    }
    return "?";
}

nlohmann::json to_json(const MajorizationVerdict& v) {
    return {{"verdict", to_string(v.verdict)},
            {"first_over_second", v.first_over_second},
            {"second_over_first", v.second_over_first},
            {"min_gap", v.min_gap},
            {"max_gap", v.max_gap}};
}

MajorizationVerdict thermo_majorizes(const EnergyPopulations& p1, const EnergyPopulations& p2, double beta,
                                     double tol) {
    const auto c1 = curve(p1, beta), c2 = curve(p2, beta);
    std::vector<double> xs = c1.x;
    xs.insert(xs.end(), c2.x.begin(), c2.x.end());
    MajorizationVerdict v;
    v.min_gap = kInf;
    v.max_gap = -kInf;
    for (double xq : xs) {
        const double g = c1.y_at(xq) - c2.y_at(xq);
        v.min_gap = std::min(v.min_gap, g);
        v.max_gap = std::max(v.max_gap, g);
    }
    v.first_over_second = v.min_gap >= -tol;
    v.second_over_first = v.max_gap <= tol;
    if (v.first_over_second)
        v.verdict = Verdict::Yes;
    else if (v.second_over_first)
        v.verdict = Verdict::No;
    else
        v.verdict = Verdict::Incomparable;
    return v;
}

GammaEmbedding gamma_embed(const EnergyPopulations& pop, double beta, long D, double max_error) {
    pop.validate();
    check_beta(beta);
    if (D < pop.dim()) throw std::invalid_argument("gamma_embed: D smaller than the dimension");
    const RVec pth = core::thermal_populations(pop.E, beta);
    const int d = pop.dim();
    GammaEmbedding g;
    g.k.resize(d);
    std::vector<double> frac(d);
    long used = 0;
    for (int i = 0; i < d; ++i) {
        const double t = pth(i) * static_cast<double>(D);
        g.k[i] = static_cast<long>(std::floor(t));
        frac[i] = t - static_cast<double>(g.k[i]);
        used += g.k[i];
    }
    std::vector<int> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return frac[a] > frac[b]; });
    for (long r = 0; r < D - used; ++r) ++g.k[idx[r % d]];
    for (int i = 0; i < d; ++i) {
        if (g.k[i] == 0) throw std::invalid_argument("gamma_embed: D too small, a thermal weight rounds to zero");
        g.rounding_error = std::max(g.rounding_error, std::abs(static_cast<double>(g.k[i]) / D - pth(i)));
    }
    if (g.rounding_error > max_error)
        throw std::invalid_argument("gamma_embed: D too small for the requested accuracy");
    g.gamma = gamma_embed(pop.p, g.k);
    return g;
}

RVec gamma_embed(const RVec& p, const std::vector<long>& k) {
    if (static_cast<std::size_t>(p.size()) != k.size()) throw std::invalid_argument("gamma_embed: size mismatch");
    const long D = std::accumulate(k.begin(), k.end(), 0L);
    RVec g(D);
    long pos = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] <= 0) throw std::invalid_argument("gamma_embed: weights must be positive");
        for (long r = 0; r < k[i]; ++r) g(pos++) = p(static_cast<int>(i)) / static_cast<double>(k[i]);
    }
    return g;
}

bool majorizes(const RVec& g1, const RVec& g2, double tol) {
    if (g1.size() != g2.size()) throw std::invalid_argument("majorizes: size mismatch");
    std::vector<double> a(g1.data(), g1.data() + g1.size()), b(g2.data(), g2.data() + g2.size());
    std::sort(a.rbegin(), a.rend());
    std::sort(b.rbegin(), b.rend());
    double sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sa += a[k];
        sb += b[k];
        if (sa < sb - tol) return false;
    }
    return true;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> g{0.0};
    for (int k = 1; k <= 40; ++k) g.push_back(0.1 * k);
    for (double a : {5.0, 7.5, 10.0, 20.0, 50.0}) g.push_back(a);
    g.push_back(kInf);
    return g;
}

SecondLaws renyi_second_laws(const RVec& p1, const RVec& p2, double beta, const RVec& E,
                             const std::vector<double>& alpha) {
    probability_of(p1, E);
    probability_of(p2, E);
    check_beta(beta);
    check_grid(alpha);
    const RVec pth = core::thermal_populations(E, beta);
    SecondLaws r;
    r.alpha = alpha;
    for (double a : alpha) {
        const double s = core::renyi_divergence(p1, pth, a) - core::renyi_divergence(p2, pth, a);
        r.sigma.push_back(s);
        if (s < -1e-12) r.allowed = false;
    }
    return r;
}

double free_energy(const RVec& p, double beta, const RVec& E, double alpha) {
    probability_of(p, E);
    if (!(beta > 0.0)) throw std::invalid_argument("free_energy: beta must be positive");
    const double F_th = -std::log((-beta * E.array()).exp().sum()) / beta;
    return F_th + core::renyi_divergence(p, core::thermal_populations(E, beta), alpha) / beta;
}

CoherenceLaws coherence_second_laws(const Mat& rho1, const Mat& rho2, const Mat& H, const std::vector<double>& alpha) {
    core::check_density(rho1);
    core::check_density(rho2);
    core::check_hermitian(H);
    check_grid(alpha);
    const Mat d1 = core::dephase(rho1, H), d2 = core::dephase(rho2, H);
    CoherenceLaws r;
    r.alpha = alpha;
    for (double a : alpha) {
        const double b = std::max(0.0, core::renyi_divergence(rho1, d1, a));
        const double f = std::max(0.0, core::renyi_divergence(rho2, d2, a));
        r.before.push_back(b);
        r.after.push_back(f);
        if (f > b + 1e-12) r.allowed = false;
    }
    return r;
}

double work_extraction(const RVec& p, double beta, const RVec& E) {
    probability_of(p, E);
    if (!(beta > 0.0)) throw std::invalid_argument("work_extraction: beta must be positive");
    return core::renyi_divergence(p, core::thermal_populations(E, beta), 0.0) / beta;
}

double work_of_formation(const RVec& p, double beta, const RVec& E) {
    probability_of(p, E);
    if (!(beta > 0.0)) throw std::invalid_argument("work_of_formation: beta must be positive");
    return core::renyi_divergence(p, core::thermal_populations(E, beta), kInf) / beta;
}

double interconversion_rate(const Mat& rho1, const Mat& rho2, double beta, const Mat& H) {
    const Mat th = core::thermal_state(H, beta);
    const double den = core::relative_entropy(rho2, th);
    if (den < 1e-14) throw std::invalid_argument("interconversion_rate: rho2 is the thermal state");
    return core::relative_entropy(rho1, th) / den;
}

WorkBounds work_bounds(const Mat& rho_prime, const Mat& H_prime, double beta, double dF, double mean_work,
                       const std::vector<double>& eta) {
    core::check_density(rho_prime);
    if (!(beta > 0.0)) throw std::invalid_argument("work_bounds: beta must be positive");
    const Mat th = core::thermal_state(H_prime, beta);
    const double T = 1.0 / beta;
    WorkBounds r;
    r.W_irr = mean_work - dF;
    r.W_ext = T * core::renyi_divergence(rho_prime, th, 0.0);
    r.W_form = T * core::renyi_divergence(rho_prime, th, kInf);
    const double tol = 1e-10 * std::max(1.0, std::abs(mean_work));
    r.sandwich = r.W_ext <= r.W_irr + tol && r.W_irr <= r.W_form + tol;
    for (double e : eta) {
        if (e > beta) throw std::invalid_argument("work_bounds: eta must not exceed beta");
        const double a = 1.0 - e / beta;
        const double S = core::renyi_divergence(rho_prime, th, a);
        r.eta.push_back(e);
        r.Phi.push_back(e == 0.0 ? 0.0 : -(e / beta) * S - e * dF);
        const double b = T * S + dF;
        r.bound.push_back(b);
        r.bound_holds.push_back(e >= 0.0 ? mean_work >= b - tol : mean_work <= b + tol);
    }
    return r;
}

std::optional<RMat> gibbs_stochastic_2x2(const RVec& p1, const RVec& p2, const RVec& p_th, double tol) {
    if (p1.size() != 2 || p2.size() != 2 || p_th.size() != 2)
        throw std::invalid_argument("gibbs_stochastic_2x2: two-level vectors required");
    if (!(p_th.minCoeff() > 0.0)) throw std::invalid_argument("gibbs_stochastic_2x2: thermal weights must be positive");
    // G = [[1 - a, b], [a, 1 - b]] with a p_th0 = b p_th1.
    const double r = p_th(0) / p_th(1);
    const double a_max = std::min(1.0, 1.0 / r);
    const double c = p1(0) - p1(1) * r;
    const double target = p1(0) - p2(0);
    double a;
    if (std::abs(c) <= tol) {
        if (std::abs(target) > tol) return std::nullopt;
        a = 0.0;
    } else {
        a = target / c;
    }
    if (a < -tol || a > a_max + tol) return std::nullopt;
    a = std::clamp(a, 0.0, a_max);
    RMat G(2, 2);
    G << 1.0 - a, a * r, a, 1.0 - a * r;
    return G;
}

}  // namespace entroprod::resource
