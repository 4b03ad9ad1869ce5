#include <doctest.h>

#include <cmath>

#include "entroprod/collisional.hpp"

using namespace entroprod;
using namespace entroprod::core;
using namespace entroprod::collisional;

namespace {

Mat diag(std::initializer_list<double> v) {
    Mat m = Mat::Zero(static_cast<int>(v.size()), static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) m(i, i) = x, ++i;
    return m;
}

Mat qubit_h(double gap) { return diag({0.0, gap}); }

// exp(-i theta (|01><10| + |10><01|)) on two qubits.
Mat partial_swap(double theta) {
    Mat G = Mat::Zero(4, 4);
    G(1, 2) = G(2, 1) = 1.0;
    return expm_hermitian(G, cplx(0.0, -theta));
}

Ancilla thermal_qubit(double gap, double beta, double theta) {
    return {thermal_state(qubit_h(gap), beta), qubit_h(gap), partial_swap(theta), beta};
}

Mat coherent_qubit() {
    Mat r(2, 2);
    r << 0.7, cplx(0.3, 0.2), cplx(0.3, -0.2), 0.3;
    return r;
}

Mat qutrit_h() { return diag({0.0, 1.0, 2.5}); }

Mat qutrit_swap() {
    Mat s = Mat::Zero(9, 9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s(j * 3 + i, i * 3 + j) = 1.0;
    return s;
}

FourStrokeSpec qutrit_engine() {
    Mat X(3, 3), Y(3, 3);
    X << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    Y << 0, cplx(0, -1), 0, cplx(0, 1), 0, cplx(0, -1), 0, cplx(0, 1), 0;
    FourStrokeSpec s;
    s.V1 = expm_hermitian(X, cplx(0, -0.9));
    s.V2 = expm_hermitian(Y, cplx(0, -0.5));
    s.U_SH = expm_hermitian(qutrit_swap(), cplx(0, -0.7));
    s.U_SC = expm_hermitian(qutrit_swap(), cplx(0, -1.1));
    s.rho_H = thermal_state(qutrit_h(), 0.4);
    s.rho_C = thermal_state(qutrit_h(), 3.0);
    s.H_S = s.H_H = s.H_C = qutrit_h();
    s.beta_H = 0.4;
    s.beta_C = 3.0;
    return s;
}

}  // namespace

TEST_SUITE("collisional") {

TEST_CASE("identity collisions leave every record at zero") {
    CollisionSpec spec;
    spec.d_S = 2;
    spec.alphabet = {{thermal_state(qubit_h(1.0), 0.5), qubit_h(1.0), identity(4), 0.5}};
    spec.H_S_schedule = {qubit_h(1.0)};
    spec.rho_S0 = coherent_qubit();
    CollisionRun r = run(spec, 5);
    for (const StrokeRecord& s : r.records) {
        CHECK(std::abs(s.Q_A) < 1e-14);
        CHECK(std::abs(s.W_u) < 1e-14);
        CHECK(std::abs(s.W_onoff) < 1e-14);
        CHECK(std::abs(s.sigma_general) < 1e-12);
        CHECK(std::abs(s.sigma_thermal) < 1e-12);
        CHECK(std::abs(s.sigma_fixedpoint) < 1e-12);
    }
}

TEST_CASE("thermal-operation strokes agree across the three entropy production tiers") {
    CollisionSpec spec;
    spec.d_S = 2;
    spec.alphabet = {thermal_qubit(1.0, 0.8, 0.6), thermal_qubit(1.0, 0.2, 1.1)};
    spec.H_S_schedule = {qubit_h(1.0)};
    spec.system_unitaries = {expm_hermitian(sigma_x(), cplx(0, -0.3))};
    spec.rho_S0 = coherent_qubit();
    CollisionRun r = run(spec, 12);
    REQUIRE(r.records.size() == 12);
    REQUIRE(r.states.size() == 13);
    for (const StrokeRecord& s : r.records) {
        CHECK(s.thermal_ancilla);
        CHECK(s.thermal_operation);
        CHECK(std::abs(s.first_law_residual) < 1e-10);
        CHECK(std::abs(s.sigma_general - s.sigma_thermal) < 1e-10);
        CHECK(std::abs(s.sigma_general - s.sigma_fixedpoint) < 1e-10);
        CHECK(s.sigma_general > -1e-12);
    }
}

TEST_CASE("first law and tier availability on generic strokes") {
    std::mt19937_64 rng(11);
    CollisionSpec spec;
    spec.d_S = 2;
    Mat hA = random_hermitian(3, rng);
    spec.alphabet = {{random_density(3, rng), hA, random_unitary(6, rng)},
                     {thermal_state(hA, 1.3), hA, random_unitary(6, rng), 1.3}};
    spec.H_S_schedule = {random_hermitian(2, rng), random_hermitian(2, rng), random_hermitian(2, rng)};
    spec.system_unitaries = {random_unitary(2, rng)};
    spec.rho_S0 = random_density(2, rng);
    CollisionRun r = run(spec, 9);
    for (const StrokeRecord& s : r.records) {
        CHECK(std::abs(s.first_law_residual) < 1e-10);
        CHECK(std::abs(s.dH_S - (s.W_u + s.W_onoff - s.Q_A)) < 1e-10);
        CHECK(s.sigma_general > -1e-12);
        if (s.stroke % 2 == 0) {
            CHECK_FALSE(s.thermal_ancilla);
            CHECK(std::isnan(s.sigma_thermal));
        } else {
            CHECK(s.thermal_ancilla);
            CHECK_FALSE(s.thermal_operation);
            CHECK(std::isnan(s.sigma_fixedpoint));
            CHECK(std::abs(s.sigma_general - s.sigma_thermal) < 1e-10);
        }
    }
}

TEST_CASE("identical thermal ancillas drive the system to the thermal state") {
    CollisionSpec spec;
    spec.d_S = 2;
    spec.alphabet = {thermal_qubit(1.0, 0.8, 0.5)};
    spec.H_S_schedule = {qubit_h(1.0)};
    spec.rho_S0 = coherent_qubit();
    CollisionRun r = run(spec, 400);
    Mat target = thermal_state(qubit_h(1.0), 0.8);
    double prev = kInf;
    bool monotone = true;
    for (size_t n = 50; n < r.states.size(); ++n) {
        double d = trace_distance(r.states[n], target);
        if (d > prev + 1e-15) monotone = false;
        prev = d;
    }
    CHECK(monotone);
    CHECK(prev < 1e-9);
}

TEST_CASE("state validation and dimension cap") {
    CollisionSpec spec;
    spec.d_S = 2;
    spec.H_S_schedule = {qubit_h(1.0)};
    CHECK_THROWS_AS(run(spec, 1), std::invalid_argument);
    spec.alphabet = {{thermal_state(qubit_h(1.0), 1.0), qubit_h(1.0), identity(6), 1.0}};
    CHECK_THROWS_AS(run(spec, 1), std::invalid_argument);
    spec.alphabet = {thermal_qubit(1.0, 1.0, 0.3)};
    CHECK_THROWS_AS(run(spec, 0), std::invalid_argument);
    CollisionSpec big;
    big.d_S = 16;
    big.H_S_schedule = {identity(16)};
    big.alphabet = {{identity(17) / 17.0, identity(17), identity(16 * 17)}};
    CHECK_THROWS_AS(run(big, 1), std::invalid_argument);
}

TEST_CASE("csv stream columns") {
    CollisionSpec spec;
    spec.d_S = 2;
    spec.alphabet = {thermal_qubit(1.0, 0.8, 0.6)};
    spec.H_S_schedule = {qubit_h(1.0)};
    std::string csv = to_csv(run(spec, 3).records);
    CHECK(csv.rfind("stroke,Q_A,W_u,W_onoff,Sigma_g,Sigma_t,Sigma_f\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("limit cycle of a single thermal ancilla is the thermal state") {
    CollisionSpec spec;
    spec.d_S = 2;
    spec.alphabet = {thermal_qubit(1.0, 1.7, 0.8)};
    spec.H_S_schedule = {qubit_h(1.0)};
    LimitCycle lc = limit_cycle(spec);
    CHECK(trace_distance(lc.rho, thermal_state(qubit_h(1.0), 1.7)) < 1e-10);
    CHECK(lc.solver_gap < 1e-8);
    CHECK(lc.subleading < 1.0);
}

TEST_CASE("two-temperature alphabet reaches a non-thermal limit cycle") {
    CollisionSpec spec;
    spec.d_S = 2;
    spec.alphabet = {thermal_qubit(1.0, 2.0, 0.4), thermal_qubit(1.0, 0.3, 0.4)};
    spec.H_S_schedule = {qubit_h(1.0)};
    LimitCycle lc = limit_cycle(spec);
    CHECK(lc.rho(1, 1).real() == doctest::Approx(0.28494750781335842).epsilon(1e-9));
    CHECK(lc.solver_gap < 1e-8);
    CHECK(trace_distance(lc.rho, thermal_state(qubit_h(1.0), 2.0)) > 1e-2);
    CHECK(trace_distance(lc.rho, thermal_state(qubit_h(1.0), 0.3)) > 1e-2);
    Mat again = stroke(spec, 1, stroke(spec, 0, lc.rho));
    CHECK(trace_distance(again, lc.rho) < 1e-10);
    CHECK(trace_distance(again, lc.rho_eigen) < 1e-8);
}

TEST_CASE("unitary-only alphabet never settles") {
    CollisionSpec spec;
    spec.d_S = 2;
    Mat u = kron(expm_hermitian(sigma_x(), cplx(0, -0.3)), identity(2));
    spec.alphabet = {{identity(2) / 2.0, qubit_h(1.0), u}};
    spec.H_S_schedule = {qubit_h(1.0)};
    CHECK_THROWS_AS(limit_cycle(spec), std::runtime_error);
}

TEST_CASE("continuous limit rates obey detailed balance for a thermal exchange ancilla") {
    const double Omega = 1.3, beta = 0.9;
    Mat hA = qubit_h(Omega);
    std::vector<CouplingTerm> terms{{sigma_minus(), sigma_minus(), 0.7}};
    ContinuousLimit cl = continuous_limit(terms, thermal_state(hA, beta), hA, beta);
    double f = 1.0 / (std::exp(beta * Omega) + 1.0);
    CHECK(cl.gamma_minus[0] == doctest::Approx(0.49 * (1.0 - f)).epsilon(1e-13));
    CHECK(cl.gamma_plus[0] == doctest::Approx(0.49 * f).epsilon(1e-13));
    CHECK(cl.ratio[0] == doctest::Approx((1.0 - f) / f).epsilon(1e-12));
    CHECK(cl.ratio[0] == doctest::Approx(std::exp(beta * Omega)).epsilon(1e-12));
    CHECK(cl.omega[0] == doctest::Approx(Omega).epsilon(1e-12));
    CHECK(cl.detailed_balance);
    CHECK(cl.route_gap < 1e-13);
    CHECK(cl.lamb_shift < 1e-15);

    ContinuousLimit mixed = continuous_limit(terms, identity(2) / 2.0);
    CHECK(mixed.gamma_minus[0] == doctest::Approx(mixed.gamma_plus[0]).epsilon(1e-14));
    CHECK(mixed.route_gap < 1e-13);
}

TEST_CASE("nonzero Lamb shift is rejected") {
    Mat rhoA = coherent_qubit();
    std::vector<CouplingTerm> terms{{sigma_minus(), sigma_minus(), 1.0}};
    CHECK_THROWS_AS(continuous_limit(terms, rhoA), std::invalid_argument);
    CHECK_THROWS_AS(double_commutator_dissipator(coupling_operator(terms, 2), rhoA, 2), std::invalid_argument);
}

TEST_CASE("dissipator matches one collision with sqrt(tau) scaling") {
    const double beta = 0.6;
    Mat hA = qubit_h(1.0), rhoA = thermal_state(hA, beta);
    std::vector<CouplingTerm> terms{{sigma_minus(), sigma_minus(), 0.8}};
    ContinuousLimit cl = continuous_limit(terms, rhoA, hA, beta);
    Mat V = coupling_operator(terms, 2);
    Mat rho = coherent_qubit();
    Mat exact = apply_superop(cl.superop, rho);
    double e1 = (finite_tau_increment(V, rhoA, rho, 1e-2) - exact).norm();
    double e2 = (finite_tau_increment(V, rhoA, rho, 5e-3) - exact).norm();
    CHECK(e1 < 1e-2);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(2e-2));
    Mat extrap = 2.0 * finite_tau_increment(V, rhoA, rho, 5e-3) - finite_tau_increment(V, rhoA, rho, 1e-2);
    CHECK((extrap - exact).norm() < 1e-5);
}

TEST_CASE("preferred basis: Markov chain, coherence damping and entropy split") {
    CollisionSpec spec;
    spec.d_S = 2;
    spec.alphabet = {thermal_qubit(1.0, 0.8, 0.6), thermal_qubit(1.5, 0.8, 0.9)};
    spec.H_S_schedule = {qubit_h(1.0), qubit_h(1.5)};
    spec.rho_S0 = coherent_qubit();
    PreferredBasisRun pb = preferred_basis(spec, 10);
    CHECK(pb.population_gap < 1e-10);
    double prev = kInf;
    for (const PreferredStroke& s : pb.strokes) {
        CHECK(s.stochastic_residual < 1e-12);
        CHECK(s.detailed_balance_residual < 1e-12);
        CHECK(s.max_coherence_modulus <= 1.0 + 1e-12);
        CHECK(s.coherence_mixing < 1e-12);
        CHECK(std::abs(s.sigma - s.sigma_cl - s.sigma_qu) < 1e-10);
        CHECK(s.sigma_cl > -1e-10);
        CHECK(s.sigma_qu > 0.0);
        CHECK(s.coherence_l1 < prev);
        prev = s.coherence_l1;
    }

    spec.rho_S0 = diag({0.1, 0.9});
    PreferredBasisRun pd = preferred_basis(spec, 6);
    for (const PreferredStroke& s : pd.strokes) {
        CHECK(std::abs(s.sigma_qu) < 1e-12);
        CHECK(std::abs(s.sigma - s.sigma_cl) < 1e-10);
    }
}

TEST_CASE("preferred basis requires a commuting schedule and thermal operations") {
    CollisionSpec spec;
    spec.d_S = 2;
    spec.alphabet = {thermal_qubit(1.0, 0.8, 0.6)};
    spec.H_S_schedule = {qubit_h(1.0), sigma_x()};
    CHECK_THROWS_AS(preferred_basis(spec, 2), std::invalid_argument);
    spec.H_S_schedule = {qubit_h(2.0)};
    CHECK_THROWS_AS(preferred_basis(spec, 2), std::invalid_argument);
}

TEST_CASE("swap engine closed forms") {
    SwapEngineResult c = swap_engine({1.0, 0.5, 1.0, 0.5});
    CHECK(c.regime == SwapRegime::Carnot);
    CHECK(std::abs(c.W) < 1e-15);
    CHECK(std::abs(c.Q_a) < 1e-15);
    CHECK(std::abs(c.Q_b) < 1e-15);
    CHECK(std::abs(c.sigma) < 1e-15);

    SwapEngineResult e = swap_engine({1.0, 0.5, 1.0, 0.25});
    CHECK(e.regime == SwapRegime::Engine);
    CHECK(e.figure_of_merit == doctest::Approx(0.5).epsilon(1e-15));

    SwapEngineResult g = swap_engine({1.0, 0.7, 1.0, 0.5});
    CHECK(g.regime == SwapRegime::Engine);
    CHECK(g.W == doctest::Approx(-0.021337592978573058).epsilon(1e-12));
    CHECK(g.Q_a == doctest::Approx(0.071125309928576852).epsilon(1e-12));
    CHECK(g.sigma == doctest::Approx(0.028450123971430735).epsilon(1e-12));
    CHECK(std::abs(g.W + g.Q_a + g.Q_b) < 1e-15);

    SwapEngineResult f = swap_engine({1.0, 0.3, 1.0, 0.5});
    CHECK(f.regime == SwapRegime::Refrigerator);
    CHECK(f.figure_of_merit == doctest::Approx(0.3 / 0.7).epsilon(1e-12));
    CHECK(f.W > 0.0);
    CHECK(f.Q_b > 0.0);

    SwapEngineResult h = swap_engine({1.0, 1.4, 1.0, 0.5});
    CHECK(h.regime == SwapRegime::HeatPump);
    CHECK(h.figure_of_merit == doctest::Approx(1.0 / 0.4).epsilon(1e-12));
    CHECK(h.sigma_excess > 0.0);
    CHECK(h.figure_of_merit == doctest::Approx(2.0 * h.Q_a / h.sigma_excess).epsilon(1e-10));

    CHECK_THROWS_AS(swap_engine({-1.0, 0.5, 1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("swap engine closed forms match the two-qubit simulation") {
    for (double eb : {0.2, 0.5, 0.7, 1.0, 1.6})
        for (double Tb : {0.3, 0.5, 1.7}) {
            SwapEngineSpec s{1.0, eb, 1.0, Tb};
            SwapEngineResult a = swap_engine(s), b = swap_engine_simulated(s);
            CHECK(std::abs(a.W - b.W) < 1e-12);
            CHECK(std::abs(a.Q_a - b.Q_a) < 1e-12);
            CHECK(std::abs(a.Q_b - b.Q_b) < 1e-12);
            CHECK(std::abs(a.sigma - b.sigma) < 1e-12);
            CHECK(a.regime == b.regime);
            if (std::isfinite(a.figure_of_merit) && std::abs(b.W) > 1e-9)
                CHECK(a.figure_of_merit == doctest::Approx(b.figure_of_merit).epsilon(1e-9));
        }
}

TEST_CASE("swap engine entropy production is non-negative on a grid") {
    int negatives = 0;
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            double re = 0.05 + 2.0 * i / 49.0, rt = 0.02 + 0.97 * j / 49.0;
            if (swap_engine({1.0, re, 1.0, rt}).sigma < -1e-15) ++negatives;
        }
    CHECK(negatives == 0);
}

TEST_CASE("four-stroke engine with identity unitaries does nothing") {
    FourStrokeSpec s = qutrit_engine();
    s.V1 = s.V2 = identity(3);
    s.U_SH = s.U_SC = identity(9);
    FourStrokeResult r = four_stroke_cycle(s, thermal_state(qutrit_h(), 1.0));
    CHECK(std::abs(r.sigma) < 1e-12);
    CHECK(std::abs(r.phi_H) < 1e-12);
    CHECK(std::abs(r.phi_C) < 1e-12);
    CHECK(std::abs(r.dS_S) < 1e-12);
}

TEST_CASE("four-stroke entropy production with thermal baths away from the limit cycle") {
    FourStrokeSpec s = qutrit_engine();
    std::mt19937_64 rng(5);
    FourStrokeResult r = four_stroke_cycle(s, random_density(3, rng));
    CHECK(std::abs(r.sigma - (r.dS_S + r.phi_H + r.phi_C)) < 1e-10);
    CHECK(std::abs(r.sigma - r.sigma_clausius) < 1e-10);
    CHECK(std::abs(r.sigma_H - r.sigma_H_trace) < 1e-10);
    CHECK(std::abs(r.sigma_C - r.sigma_C_trace) < 1e-10);
    CHECK(std::abs(r.dS_S) > 1e-3);
}

TEST_CASE("four-stroke qutrit engine at its limit cycle") {
    FourStrokeResult r = four_stroke(qutrit_engine());
    CHECK(r.at_limit_cycle);
    CHECK(std::abs(r.dS_S) < 1e-10);
    CHECK(std::abs(r.sigma - (r.phi_H + r.phi_C)) < 1e-10);
    CHECK(std::abs(r.sigma_H - r.phi_H) > 1e-3);
    CHECK(r.sigma_H == doctest::Approx(0.36942585800998295).epsilon(1e-8));
    CHECK(r.phi_H == doctest::Approx(0.020988252262215366).epsilon(1e-8));
    CHECK(r.sigma_C == doctest::Approx(2.0224091786277594).epsilon(1e-8));
    CHECK(r.phi_C == doctest::Approx(2.3708467843755363).epsilon(1e-8));
}

TEST_CASE("four-stroke with non-thermal baths keeps the flux decomposition") {
    std::mt19937_64 rng(9);
    FourStrokeSpec s;
    s.V1 = random_unitary(2, rng);
    s.V2 = random_unitary(2, rng);
    s.U_SH = random_unitary(6, rng);
    s.U_SC = random_unitary(4, rng);
    s.rho_H = random_density(3, rng);
    s.rho_C = random_density(2, rng);
    FourStrokeResult r = four_stroke(s);
    CHECK(std::abs(r.sigma - (r.dS_S + r.phi_H + r.phi_C)) < 1e-10);
    CHECK(r.sigma_H > -1e-12);
    CHECK(r.sigma_C > -1e-12);
    CHECK(std::isnan(r.sigma_clausius));
}

}  // TEST_SUITE
