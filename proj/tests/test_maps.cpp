#include <doctest.h>

#include <cmath>

#include "entroprod/maps.hpp"

using namespace entroprod;
using namespace entroprod::core;
using namespace entroprod::maps;

namespace {

Mat diag(std::initializer_list<double> v) {
    Mat m = Mat::Zero(static_cast<int>(v.size()), static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) m(i, i) = x, ++i;
    return m;
}

Mat qubit_h(double gap) { return diag({0.0, gap}); }

Mat swap2() {
    Mat s = Mat::Zero(4, 4);
    s(0, 0) = s(3, 3) = 1.0;
    s(1, 2) = s(2, 1) = 1.0;
    return s;
}

// exp(-i g t (|01><10| + |10><01|)) on two qubits.
Mat partial_swap(double gt) {
    Mat G = Mat::Zero(4, 4);
    G(1, 2) = G(2, 1) = 1.0;
    return expm_hermitian(G, cplx(0.0, -gt));
}

Episode random_thermal_episode(std::mt19937_64& rng, int dS, int dE, double beta) {
    Mat hS = random_hermitian(dS, rng), hE = random_hermitian(dE, rng);
    return make_episode(hS, hE, random_unitary(dS * dE, rng), random_density(dS, rng), thermal_state(hE, beta));
}

}  // namespace

TEST_SUITE("maps") {

TEST_CASE("identity evolution produces nothing") {
    std::mt19937_64 rng(1);
    Mat hS = random_hermitian(2, rng), hE = random_hermitian(3, rng);
    Episode ep = make_episode(hS, hE, identity(6), random_density(2, rng), thermal_state(hE, 0.7));
    EntropyBalance b = thermal_balance(ep, 0.7);
    CHECK(std::abs(b.sigma) < 1e-12);
    CHECK(std::abs(b.I_SE) < 1e-12);
    CHECK(std::abs(b.D_env) < 1e-12);
    CHECK(std::abs(b.Q_E) < 1e-12);
    CHECK(std::abs(b.W) < 1e-12);
}

TEST_CASE("swap exchanges the marginals") {
    Episode ep = make_episode(qubit_h(1.0), qubit_h(1.0), swap2(), diag({0.8, 0.2}), diag({0.6, 0.4}));
    Evolved ev = evolve(ep);
    CHECK((ev.rho_S - ep.rho_E).norm() < 1e-14);
    CHECK((ev.rho_E - ep.rho_S).norm() < 1e-14);
    EntropyBalance b = balance(ep);
    CHECK(std::abs(b.I_SE) < 1e-12);
    CHECK(b.sigma == doctest::Approx(0.09151622184943578).epsilon(1e-12));
    CHECK(b.sigma_flux == doctest::Approx(b.sigma).epsilon(1e-12));
}

TEST_CASE("entropy production routes agree on random episodes") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        int dS = 2 + trial % 2, dE = 2 + (trial / 2) % 3;
        std::uniform_real_distribution<double> ub(0.1, 3.0);
        double beta = ub(rng);
        Episode ep = random_thermal_episode(rng, dS, dE, beta);
        EntropyBalance b = thermal_balance(ep, beta);
        CHECK(b.sigma >= -1e-12);
        CHECK(b.sigma == doctest::Approx(b.sigma_flux).epsilon(1e-10));
        CHECK(b.sigma == doctest::Approx(b.sigma_heat).epsilon(1e-10));
        CHECK(b.sigma == doctest::Approx(b.sigma_work).epsilon(1e-10));
        CHECK(b.I_SE == doctest::Approx(b.dS_S + b.dS_E).epsilon(1e-10));
        Evolved ev = evolve(ep);
        CHECK(von_neumann_entropy(ev.rho_SE) ==
              doctest::Approx(von_neumann_entropy(ep.rho_S) + von_neumann_entropy(ep.rho_E)).epsilon(1e-10));
    }
}

TEST_CASE("rank-deficient environment gives infinite production") {
    Mat rhoE = diag({1.0, 0.0});
    Episode ep = make_episode(qubit_h(1.0), qubit_h(1.0), swap2(), diag({0.5, 0.5}), rhoE);
    EntropyBalance b = balance(ep);
    CHECK(std::isinf(b.sigma));
    CHECK(b.I_SE == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("invalid episodes are rejected") {
    CHECK_THROWS_AS(make_episode(qubit_h(1.0), qubit_h(1.0), 2.0 * identity(4), diag({0.5, 0.5}), diag({0.5, 0.5})),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_episode(qubit_h(1.0), qubit_h(1.0), identity(4), diag({0.7, 0.5}), diag({0.5, 0.5})),
                    std::invalid_argument);
    Episode ep = make_episode(qubit_h(1.0), qubit_h(1.0), identity(4), diag({0.5, 0.5}), diag({0.5, 0.5}));
    CHECK_THROWS_AS(thermal_balance(ep, 1.0), std::invalid_argument);
}

TEST_CASE("multi-bath balance") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Mat hS = random_hermitian(2, rng), h1 = random_hermitian(2, rng), h2 = random_hermitian(3, rng);
        double b1 = 0.4 + 0.1 * trial, b2 = 2.0 - 0.1 * trial;
        Mat rhoE = kron(thermal_state(h1, b1), thermal_state(h2, b2));
        Episode ep = make_episode(hS, kron(h1, identity(3)) + kron(identity(2), h2), random_unitary(12, rng),
                                  random_density(2, rng), rhoE, {2}, {2, 3});
        // Parts listed out of order exercise the factor permutation.
        EntropyBalance b = multibath_balance(ep, {{{1}, h2, b2}, {{0}, h1, b1}});
        CHECK(b.sigma == doctest::Approx(b.sigma_heat).epsilon(1e-10));
        CHECK(b.sigma == doctest::Approx(b.sigma_parts).epsilon(1e-10));
        CHECK(b.total_correlations >= b.I_SE - 1e-12);
        REQUIRE(b.Q_parts.size() == 2);
    }
    Mat h = qubit_h(1.0);
    Episode bad = make_episode(h, kron(h, identity(2)) + kron(identity(2), h), identity(8), diag({0.5, 0.5}),
                               random_density(4, rng), {2}, {2, 2});
    CHECK_THROWS_AS(multibath_balance(bad, {{{0}, h, 1.0}, {{1}, h, 1.0}}), std::invalid_argument);
}

TEST_CASE("strict energy conservation") {
    CHECK(is_strict_energy_conserving(partial_swap(0.7), qubit_h(1.0), qubit_h(1.0)).conserving);
    CHECK_FALSE(is_strict_energy_conserving(partial_swap(0.7), qubit_h(1.0), qubit_h(1.3)).conserving);
    std::mt19937_64 rng(3);
    Mat hS = diag({0.0, 1.0, 2.0}), hE = diag({0.0, 1.0});
    Mat u = random_conserving_unitary(hS, hE, rng);
    check_unitary(u);
    CHECK(is_strict_energy_conserving(u, hS, hE).conserving);
}

TEST_CASE("fixed point contraction") {
    std::mt19937_64 rng(9);
    Mat hS = random_hermitian(2, rng);
    Mat star = thermal_state(hS, 1.0);
    Mat rho = random_density(2, rng);
    CHECK(fixed_point_sigma(rho, rho, star) == doctest::Approx(0.0));
    CHECK(fixed_point_sigma(rho, star, star) == doctest::Approx(relative_entropy(rho, star)));
}

TEST_CASE("conditional production without back-action") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        Episode ep = random_thermal_episode(rng, 2, 3, 0.9);
        Evolved ev = evolve(ep);
        Eigh e = eigh(ev.rho_E);
        std::vector<Mat> kraus;
        for (int k = 0; k < 3; ++k) kraus.push_back(e.vectors.col(k) * e.vectors.col(k).adjoint());
        ConditionalBalance c = conditional_balance(ep, kraus);
        CHECK(c.backaction_free);
        CHECK(c.warnings.empty());
        CHECK(c.sigma_c == doctest::Approx(c.sigma - c.chi_M).epsilon(1e-9));
        CHECK(c.phi_c == doctest::Approx(c.phi).epsilon(1e-9));
        EntropyBalance b = balance(ep);
        CHECK(c.sigma_c >= b.D_env - 1e-10);
        CHECK(c.sigma_c <= c.sigma + 1e-10);
    }
}

TEST_CASE("conditional production flags back-action") {
    std::mt19937_64 rng(22);
    Episode ep = random_thermal_episode(rng, 2, 2, 0.9);
    Mat plus = Mat::Constant(2, 2, 0.5), minus = identity(2) - plus;
    ConditionalBalance c = conditional_balance(ep, {plus, minus});
    CHECK_FALSE(c.backaction_free);
    CHECK_FALSE(c.warnings.empty());
    CHECK_THROWS_AS(conditional_balance(ep, {plus}), std::invalid_argument);
}

TEST_CASE("heat distribution matches the mean heat and the M operator") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 15; ++trial) {
        double beta = 0.3 + 0.2 * trial;
        Episode ep = random_thermal_episode(rng, 2, 3, beta);
        HeatDistribution hd = heat_distribution(ep);
        double total = 0.0;
        for (double p : hd.probs) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        EntropyBalance b = thermal_balance(ep, beta);
        CHECK(hd.mean() == doctest::Approx(b.Q_E).epsilon(1e-10));
        double m = std::real((landauer_M(ep) * ep.rho_S).trace());
        CHECK(hd.exp_average(beta) == doctest::Approx(m).epsilon(1e-10));
    }
}

TEST_CASE("Landauer bounds hold and order correctly") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        double beta = 0.5 + 0.1 * trial;
        Mat hE = qubit_h(0.5 + 0.05 * trial);
        Mat hS = qubit_h(1.0);
        Episode ep = make_episode(hS, hE, random_unitary(4, rng), random_density(2, rng), thermal_state(hE, beta));
        LandauerOptions opt;
        opt.heat_capacity = canonical_heat_capacity(hE);
        opt.etas = {0.5 * beta, beta, 2.0 * beta, -beta};
        LandauerReport r = landauer_report(ep, beta, opt);
        CHECK(r.basic_ok);
        CHECK(r.B_Q_ok);
        CHECK(r.heat_capacity_ok);
        if (r.dS_S < 0.0) {
            CHECK(r.finite_d_ok);
            CHECK(r.finite_d_tighter);
        }
        for (const auto& e : r.eta_bounds) CHECK(e.satisfied);
    }
}

TEST_CASE("heat-capacity bound closed form") {
    const double a = 0.7, T = 1.3;
    auto C = [a](double x) { return a * x; };
    CHECK(heat_capacity_bound(C, T, -0.4) == doctest::Approx(0.6342857142857141).epsilon(1e-8));
    CHECK(heat_capacity_bound(C, T, 0.0) == 0.0);
    // Entropy increase maps to a lower final temperature.
    double Tp = T - 0.3 / a;
    CHECK(heat_capacity_bound(C, T, 0.3) == doctest::Approx(a * (Tp * Tp - T * T) / 2).epsilon(1e-8));
    // Bounded total entropy capacity: target below S(0+) clamps.
    CHECK(heat_capacity_bound(C, T, 5.0) == doctest::Approx(-a * T * T / 2).epsilon(1e-6));
    auto Cq = canonical_heat_capacity(qubit_h(1.0));
    CHECK_THROWS_AS(heat_capacity_bound(Cq, 1.0, -10.0), std::runtime_error);
    CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-9));
}

TEST_CASE("finite-d bound requires entropy decrease when requested") {
    Mat h = qubit_h(1.0);
    Episode ep = make_episode(h, h, identity(4), diag({0.5, 0.5}), thermal_state(h, 1.0));
    LandauerOptions opt;
    opt.require_finite_d = true;
    CHECK_THROWS_AS(landauer_report(ep, 1.0, opt), std::invalid_argument);
}

TEST_CASE("correlated heat flow: closed form and bound") {
    const double Omega = 1.0, TA = 2.0, TB = 0.5;
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI), gt(0.0, 3.0);
    const double fA = 1.0 / (std::exp(Omega / TA) + 1.0), fB = 1.0 / (std::exp(Omega / TB) + 1.0);
    const double amax = std::sqrt(fA * (1 - fB) * fB * (1 - fA));
    for (int trial = 0; trial < 40; ++trial) {
        double alpha = amax * (trial % 5) / 5.0, theta = ang(rng), phi = ang(rng), t = gt(rng);
        TwoQubitCorrelated s = two_qubit_correlated(Omega, TA, TB, alpha, theta, phi, 1.0, t);
        CorrelatedHeat h = correlated_heat_flow(s.rho_AB, s.H_A, s.H_B, s.U, 1.0 / TA, 1.0 / TB);
        CHECK(h.Q_B == doctest::Approx(two_qubit_heat_closed_form(Omega, TA, TB, alpha, theta, phi, 1.0, t)).epsilon(1e-10));
        CHECK(h.bound_ok);
    }
    // Product initial state: heat flows from hot A into cold B.
    TwoQubitCorrelated s = two_qubit_correlated(Omega, TA, TB, 0.0, 0.0, 0.0, 1.0, 0.8);
    CHECK(correlated_heat_flow(s.rho_AB, s.H_A, s.H_B, s.U, 1.0 / TA, 1.0 / TB).Q_B > 0.0);
    // Strong enough correlations reverse the flow.
    s = two_qubit_correlated(Omega, TA, TB, amax, M_PI / 2, 0.0, 1.0, 0.3);
    CHECK(correlated_heat_flow(s.rho_AB, s.H_A, s.H_B, s.U, 1.0 / TA, 1.0 / TB).Q_B < 0.0);
}

TEST_CASE("mean force Hamiltonian") {
    std::mt19937_64 rng(61);
    Mat hS = random_hermitian(2, rng), hE = random_hermitian(3, rng);
    Mat H0 = kron(hS, identity(3)) + kron(identity(2), hE);
    CHECK((mean_force(H0, 2, 3, hE, 1.3) - hS).norm() < 1e-10);
    Mat V = 0.4 * random_hermitian(6, rng);
    Mat hmf = mean_force(H0 + V, 2, 3, hE, 1.3);
    Mat piS = partial_trace(thermal_state(H0 + V, 1.3), {2, 3}, {0});
    CHECK((thermal_state(hmf, 1.3) - piS).norm() < 1e-10);
    // Large energies do not overflow.
    CHECK((mean_force(H0 + 800.0 * identity(6), 2, 3, hE, 5.0) - hS - 800.0 * identity(2)).norm() < 1e-7);
}

TEST_CASE("strong-coupling routes agree") {
    std::mt19937_64 rng(71);
    Mat hS = random_hermitian(2, rng), hE = random_hermitian(2, rng), V = 0.5 * random_hermitian(4, rng);
    Mat H = kron(hS, identity(2)) + kron(identity(2), hE) + V;
    const double beta = 0.8;
    Mat rho0 = kron(random_density(2, rng), thermal_state(hE, beta));
    std::vector<StrongCouplingPoint> traj;
    for (int k = 0; k < 8; ++k) {
        double t = 0.25 * k;
        Mat u = expm_hermitian(H, cplx(0.0, -t));
        // A sudden quench of the coupling half way through.
        Mat Ht = k < 4 ? H : H + 0.3 * V;
        Mat r = u * rho0 * u.adjoint();
        traj.push_back({t, r, Ht});
    }
    StrongCouplingSigma s = strong_coupling_sigma(traj, 2, 2, hE, beta);
    for (size_t i = 0; i < s.t.size(); ++i) CHECK(s.sigma_work[i] == doctest::Approx(s.sigma_relent[i]).epsilon(1e-9));
    CHECK(s.W[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(s.W[5]) > 1e-6);
}

TEST_CASE("BLP witness and Mazzola bound on an exchange model") {
    Mat hS = qubit_h(1.0), hE = qubit_h(1.0);
    Mat G = Mat::Zero(4, 4);
    G(1, 2) = G(2, 1) = 0.6;
    Mat H = kron(hS, identity(2)) + kron(identity(2), hE) + G;
    Mat rhoE = thermal_state(hE, 1.0);
    Mat r1 = kron(diag({1.0, 0.0}), rhoE), r2 = kron(diag({0.0, 1.0}), rhoE);
    std::vector<double> t;
    std::vector<Mat> s1, s2, j1, j2;
    for (int k = 0; k <= 200; ++k) {
        double tk = 0.05 * k;
        Mat u = expm_hermitian(H, cplx(0.0, -tk));
        Mat a = u * r1 * u.adjoint(), b = u * r2 * u.adjoint();
        t.push_back(tk);
        j1.push_back(a);
        j2.push_back(b);
        s1.push_back(partial_trace(a, {2, 2}, {0}));
        s2.push_back(partial_trace(b, {2, 2}, {0}));
    }
    BlpWitness w = blp_witness(t, s1, s2);
    CHECK(w.nonmarkovian);
    CHECK(w.max_rate > 0.1);
    MazzolaTerms m = mazzola_terms(t, j1, j2, H, 2, 2);
    CHECK(m.bound_ok);
    CHECK(m.worst_slack >= 0.0);
    CHECK_THROWS_AS(blp_witness({0.0, 1.0}, {s1[0], s1[1]}, {s2[0], s2[1]}), std::invalid_argument);
}

TEST_CASE("balance serializes to json") {
    Episode ep = make_episode(qubit_h(1.0), qubit_h(1.0), swap2(), diag({0.8, 0.2}), thermal_state(qubit_h(1.0), 1.0));
    nlohmann::json j = to_json(thermal_balance(ep, 1.0));
    CHECK(j["Sigma"].is_number());
    CHECK(j["total_correlations"].is_null());
}

}
