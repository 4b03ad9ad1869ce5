#include <doctest.h>

#include <cmath>
#include <random>

#include "entroprod/resource.hpp"
#include "entroprod/trajectories.hpp"

using namespace entroprod;
using namespace entroprod::resource;

namespace {

RVec rvec(std::initializer_list<double> v) {
    RVec r(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) r(i++) = x;
    return r;
}

RVec random_probability(int d, std::mt19937_64& rng) {
    std::exponential_distribution<double> ex(1.0);
    RVec p(d);
    for (int i = 0; i < d; ++i) p(i) = ex(rng);
    return p / p.sum();
}

// Direct partial-sum majorization of d-dimensional vectors.
bool plain_majorizes(RVec a, RVec b) {
    std::sort(a.data(), a.data() + a.size(), std::greater<>());
    std::sort(b.data(), b.data() + b.size(), std::greater<>());
    double sa = 0, sb = 0;
    for (int i = 0; i < a.size(); ++i) {
        sa += a(i);
        sb += b(i);
        if (sa < sb - 1e-12) return false;
    }
    return true;
}

Mat qubit_h(double eps, double theta) {
    return 0.5 * eps * (std::cos(theta) * core::sigma_z() + std::sin(theta) * core::sigma_x());
}

}  // namespace

TEST_SUITE("resource") {

TEST_CASE("beta ordering and curves") {
    const RVec E = rvec({0.0, 1.0, 2.5});
    const double beta = 0.8;
    const RVec pth = core::thermal_populations(E, beta);
    const auto c = curve({E, pth}, beta);
    const double Z = (-beta * E.array()).exp().sum();
    CHECK(c.x.back() == doctest::Approx(Z));
    for (std::size_t k = 0; k < c.x.size(); ++k) CHECK(std::abs(c.y[k] - c.x[k] / Z) < 1e-14);

    const RVec p = rvec({0.2, 0.5, 0.3});
    const auto order0 = beta_order({E, p}, 0.0);
    CHECK(order0 == std::vector<int>{1, 2, 0});
    const auto c0 = curve({E, p}, 0.0);
    CHECK(c0.y[1] == doctest::Approx(0.5));
    CHECK(c0.y[2] == doctest::Approx(0.8));

    const auto single = curve({rvec({0.7}), rvec({1.0})}, 2.0);
    CHECK(single.x.size() == 2);
    CHECK(single.x[1] == doctest::Approx(std::exp(-1.4)));
    CHECK(single.y[1] == 1.0);

    std::mt19937_64 rng(4);
    for (int n = 0; n < 50; ++n) CHECK(curve({E, random_probability(3, rng)}, beta).concave());

    // Ties: relabelling tied levels leaves the curve unchanged.
    const RVec Ed = rvec({0.0, 1.0, 1.0}), pd = rvec({0.2, 0.4, 0.4});
    const RVec Ed2 = rvec({1.0, 0.0, 1.0}), pd2 = rvec({0.4, 0.2, 0.4});
    CHECK(beta_order({Ed, pd}, 1.0) == std::vector<int>{1, 2, 0});
    CHECK(beta_order({Ed2, pd2}, 1.0) == std::vector<int>{0, 2, 1});
    const auto a = curve({Ed, pd}, 1.0), b = curve({Ed2, pd2}, 1.0);
    for (std::size_t k = 0; k < a.x.size(); ++k) {
        CHECK(std::abs(a.x[k] - b.x[k]) < 1e-15);
        CHECK(std::abs(a.y[k] - b.y[k]) < 1e-15);
    }
    CHECK(to_csv(a).rfind("x,y\n", 0) == 0);
}

TEST_CASE("thermo-majorization verdicts") {
    const RVec E = rvec({0.0, 1.0, 2.0});
    const double beta = 1.0;
    std::mt19937_64 rng(8);
    const EnergyPopulations th{E, core::thermal_populations(E, beta)};
    for (int n = 0; n < 30; ++n) {
        const EnergyPopulations p{E, random_probability(3, rng)};
        CHECK(thermo_majorizes(p, p, beta).verdict == Verdict::Yes);
        CHECK(thermo_majorizes(p, th, beta).verdict == Verdict::Yes);
        CHECK(thermo_majorizes(th, p, beta).verdict != Verdict::Incomparable);
    }
    // Breakpoints (e^-1, 1/2), (1 + e^-1, 1) against (e^-2, 0.2), (1 + e^-2, 1): the curves cross.
    const EnergyPopulations p1{E, rvec({0.5, 0.5, 0.0})}, p2{E, rvec({0.8, 0.0, 0.2})};
    const auto v = thermo_majorizes(p1, p2, beta);
    CHECK(v.verdict == Verdict::Incomparable);
    CHECK(v.min_gap == doctest::Approx(0.5 * (1.0 + std::exp(-2.0) - std::exp(-1.0)) - 0.5));
    CHECK(v.max_gap == doctest::Approx(0.5 - 0.2 - 0.8 * (std::exp(-1.0) - std::exp(-2.0))));
    CHECK(v.max_gap > 0.1);
    CHECK(thermo_majorizes(p2, p1, beta).verdict == Verdict::Incomparable);
    CHECK(to_json(v)["verdict"] == "Incomparable");

    const EnergyPopulations ground{E, rvec({1.0, 0.0, 0.0})};
    CHECK(thermo_majorizes(th, ground, beta).verdict == Verdict::No);

    // Transitivity on sampled triples.
    int chains = 0;
    for (int n = 0; n < 300; ++n) {
        const EnergyPopulations a{E, random_probability(3, rng)}, b{E, random_probability(3, rng)},
            c{E, random_probability(3, rng)};
        if (thermo_majorizes(a, b, beta).first_over_second && thermo_majorizes(b, c, beta).first_over_second) {
            ++chains;
            CHECK(thermo_majorizes(a, c, beta).first_over_second);
        }
    }
    CHECK(chains > 10);

    // beta = 0 reduces to plain majorization.
    for (int n = 0; n < 100; ++n) {
        const RVec a = random_probability(4, rng), b = random_probability(4, rng);
        const RVec E4 = rvec({0.0, 0.3, 1.0, 1.7});
        CHECK(thermo_majorizes({E4, a}, {E4, b}, 0.0).first_over_second == plain_majorizes(a, b));
    }
}

TEST_CASE("gamma embedding") {
    const RVec E = rvec({0.0, 0.9});
    const double beta = 1.0;
    const RVec pth = core::thermal_populations(E, beta);
    const auto g = gamma_embed({E, pth}, beta);
    CHECK(g.gamma.size() == 10000);
    CHECK(g.rounding_error <= 0.5 / 10000 + 1e-15);
    CHECK((g.gamma.array() - g.gamma.mean()).abs().maxCoeff() < 0.5 / 10000 / (pth.minCoeff() * 10000) + 1e-12);
    CHECK(std::abs(g.gamma.sum() - 1.0) < 1e-12);

    const RVec p = rvec({0.3, 0.7});
    CHECK((gamma_embed(p, std::vector<long>{1, 1}) - p).norm() == 0.0);

    CHECK_THROWS_AS(gamma_embed({rvec({0.0, 30.0}), rvec({0.5, 0.5})}, 1.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(gamma_embed({E, pth}, beta, 10, 1e-6), std::invalid_argument);

    // With exact rational weights the two verdicts coincide.
    std::mt19937_64 rng(21);
    const std::vector<long> k{3, 1};
    const RVec Eq = rvec({0.0, std::log(3.0)});
    for (int n = 0; n < 100; ++n) {
        const RVec a = random_probability(2, rng), b = random_probability(2, rng);
        CHECK(majorizes(gamma_embed(a, k), gamma_embed(b, k)) == thermo_majorizes({Eq, a}, {Eq, b}, 1.0).first_over_second);
    }
    int agree = 0;
    for (int n = 0; n < 50; ++n) {
        const RVec a = random_probability(2, rng), b = random_probability(2, rng);
        const bool emb = majorizes(gamma_embed({E, a}, beta).gamma, gamma_embed({E, b}, beta).gamma, 1e-10);
        agree += emb == thermo_majorizes({E, a}, {E, b}, beta).first_over_second;
    }
    CHECK(agree == 50);
}

TEST_CASE("renyi second laws and free energies") {
    const RVec E = rvec({0.0, 1.0});
    const double beta = 1.0;
    const RVec pth = core::thermal_populations(E, beta);
    std::mt19937_64 rng(6);
    const RVec p = random_probability(2, rng);

    const auto same = renyi_second_laws(p, p, beta, E);
    CHECK(same.allowed);
    for (double s : same.sigma) CHECK(s == 0.0);
    CHECK(renyi_second_laws(p, pth, beta, E).allowed);

    // Passes at alpha = 1, fails at alpha = infinity.
    const RVec ground = rvec({1.0, 0.0}), flat = rvec({0.5, 0.5});
    const auto r = renyi_second_laws(ground, flat, beta, E);
    CHECK_FALSE(r.allowed);
    for (std::size_t i = 0; i < r.alpha.size(); ++i) {
        if (r.alpha[i] == 1.0) CHECK(r.sigma[i] > 0.1);
        if (std::isinf(r.alpha[i])) CHECK(r.sigma[i] == doctest::Approx(-std::log(pth(0)) - std::log(0.5 / pth(1))));
    }
    CHECK(thermo_majorizes({E, ground}, {E, flat}, beta).verdict != Verdict::Yes);

    CHECK_THROWS_AS(renyi_second_laws(p, p, beta, E, {0.0, 1.0}), std::invalid_argument);

    const double F_th = -std::log(1.0 + std::exp(-1.0));
    CHECK(free_energy(pth, beta, E, 2.0) == doctest::Approx(F_th));
    CHECK(free_energy(p, beta, E, 1.0) == doctest::Approx(F_th + core::kl_divergence(p, pth)));

    // S_alpha nondecreasing in alpha.
    const auto grid = default_alpha_grid();
    for (int n = 0; n < 100; ++n) {
        const int d = 2 + n % 4;
        const RVec a = random_probability(d, rng), b = random_probability(d, rng);
        double prev = -kInf;
        for (double al : grid) {
            const double s = core::renyi_divergence(a, b, al);
            CHECK(s >= prev - 1e-12);
            prev = s;
        }
    }
}

TEST_CASE("coherence second laws") {
    const Mat H = core::sigma_z();
    Mat inc1 = Mat::Zero(2, 2), inc2 = Mat::Zero(2, 2);
    inc1(0, 0) = 0.3;
    inc1(1, 1) = 0.7;
    inc2(0, 0) = 0.9;
    inc2(1, 1) = 0.1;
    const auto a = coherence_second_laws(inc1, inc2, H);
    CHECK(a.allowed);
    for (double v : a.before) CHECK(std::abs(v) < 1e-12);

    CVec plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const Mat rho = 0.8 * plus * plus.adjoint() + 0.2 * inc1;
    const auto c = coherence_second_laws(rho, inc1, H);
    CHECK(c.allowed);
    for (std::size_t i = 0; i < c.alpha.size(); ++i)
        if (c.alpha[i] == 1.0) CHECK(c.before[i] == doctest::Approx(core::relative_entropy_of_coherence(rho, H)).epsilon(1e-10));

    // A Hadamard rotation is not time-translation covariant and creates coherence.
    Mat had(2, 2);
    had << 1, 1, 1, -1;
    had /= std::sqrt(2.0);
    Mat ground = Mat::Zero(2, 2);
    ground(0, 0) = 1.0;
    CHECK_FALSE(coherence_second_laws(ground, had * ground * had.adjoint(), H).allowed);
}

TEST_CASE("work extraction, formation and interconversion") {
    const RVec E = rvec({0.0, 0.7, 1.5});
    const double beta = 1.2, T = 1.0 / beta;
    const RVec pth = core::thermal_populations(E, beta);
    CHECK(std::abs(work_extraction(pth, beta, E)) < 1e-14);
    CHECK(std::abs(work_of_formation(pth, beta, E)) < 1e-14);

    const RVec gap = rvec({0.4, 0.0, 0.6});
    CHECK(work_extraction(gap, beta, E) == doctest::Approx(-T * std::log(pth(0) + pth(2))));
    const RVec tiny = rvec({0.4, 1e-6, 0.6 - 1e-6});
    CHECK(std::abs(work_extraction(tiny, beta, E)) < 1e-14);
    const RVec below = rvec({0.4, 1e-13, 0.6 - 1e-13});
    CHECK(work_extraction(below, beta, E) == doctest::Approx(-T * std::log(pth(0) + pth(2))));

    std::mt19937_64 rng(13);
    for (int n = 0; n < 30; ++n) {
        const RVec p = random_probability(3, rng);
        CHECK(work_of_formation(p, beta, E) >= work_extraction(p, beta, E));
    }

    const double eps = 1.0, b1 = 1.0;
    const RVec E2 = rvec({0.0, eps});
    const RVec excited = rvec({0.0, 1.0});
    CHECK(work_of_formation(excited, b1, E2) == doctest::Approx(1.3132616875182228).epsilon(1e-13));
    CHECK(work_of_formation(excited, b1, E2) == doctest::Approx(eps + std::log(1.0 + std::exp(-eps))));

    Mat H = Mat::Zero(2, 2);
    H(1, 1) = eps;
    Mat g = Mat::Zero(2, 2), e = Mat::Zero(2, 2);
    g(0, 0) = 1.0;
    e(1, 1) = 1.0;
    CHECK(interconversion_rate(e, g, b1, H) == doctest::Approx(4.192219284529739).epsilon(1e-12));
    CHECK(interconversion_rate(g, g, b1, H) == doctest::Approx(1.0));
    CHECK(std::abs(interconversion_rate(core::thermal_state(H, b1), g, b1, H)) < 1e-12);
    CHECK_THROWS_AS(interconversion_rate(g, core::thermal_state(H, b1), b1, H), std::invalid_argument);
}

TEST_CASE("work bounds: sudden quench sandwich and CGF identity") {
    const double beta = 0.9;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.3, 2.0), ang(0.2, 1.4);
    std::vector<double> eta{-3.0, -1.0, -0.2, -1e-6, 0.0, 1e-6, 0.3, 0.6, beta};
    for (int n = 0; n < 20; ++n) {
        const Mat Hi = qubit_h(u(rng), 0.0), Hf = qubit_h(u(rng), ang(rng));
        const Mat rho = core::thermal_state(Hi, beta);
        const Mat V = core::identity(2);
        const double dF = core::free_energy(Hf, beta) - core::free_energy(Hi, beta);
        const double W = core::expect(Hf - Hi, rho);
        const auto wb = work_bounds(rho, Hf, beta, dF, W, eta);
        CHECK(wb.sandwich);
        CHECK(wb.W_ext < wb.W_irr);
        CHECK(wb.W_irr < wb.W_form);
        for (bool h : wb.bound_holds) CHECK(h);
        // Dual route: Phi from the two-point work distribution.
        const auto ws = trajectories::work_distribution(Hi, Hf, V, beta);
        for (std::size_t i = 0; i < eta.size(); ++i)
            CHECK(std::abs(wb.Phi[i] - std::log(ws.forward.exp_average(eta[i]))) < 1e-10);
        // eta -> 0 from either side: bound -> <W>.
        CHECK(std::abs(wb.bound[3] - W) < 1e-5);
        CHECK(std::abs(wb.bound[5] - W) < 1e-5);
    }

    // Reversible: thermal at H' with H' = H.
    const Mat H = qubit_h(1.0, 0.0);
    const auto rev = work_bounds(core::thermal_state(H, beta), H, beta, 0.0, 0.0, {0.0});
    CHECK(std::abs(rev.W_ext) < 1e-12);
    CHECK(std::abs(rev.W_irr) < 1e-12);
    CHECK(std::abs(rev.W_form) < 1e-12);
    CHECK_THROWS_AS(work_bounds(core::thermal_state(H, beta), H, beta, 0.0, 0.0, {2.0}), std::invalid_argument);
}

TEST_CASE("d = 2 Gibbs-stochastic feasibility agrees with thermo-majorization") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.1, 2.5);
    int yes = 0;
    for (int n = 0; n < 100; ++n) {
        const RVec E = rvec({0.0, u(rng)});
        const double beta = u(rng);
        const RVec pth = core::thermal_populations(E, beta);
        const RVec a = random_probability(2, rng), b = random_probability(2, rng);
        const auto G = gibbs_stochastic_2x2(a, b, pth, 1e-12);
        const bool tm = thermo_majorizes({E, a}, {E, b}, beta).first_over_second;
        CHECK(G.has_value() == tm);
        if (G) {
            ++yes;
            CHECK(((*G) * pth - pth).norm() < 1e-12);
            CHECK(((*G) * a - b).norm() < 1e-12);
            CHECK(G->minCoeff() >= 0.0);
            CHECK((G->colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
        }
    }
    CHECK(yes > 10);
}

}  // TEST_SUITE
