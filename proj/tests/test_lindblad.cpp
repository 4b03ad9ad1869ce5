#include <doctest.h>

#include <cmath>

#include "entroprod/lindblad.hpp"

using namespace entroprod;
using namespace entroprod::core;
using namespace entroprod::lindblad;

namespace {

Mat qubit_h(double gap) {
    Mat h = Mat::Zero(2, 2);
    h(1, 1) = gap;
    return h;
}

LindbladModel thermal_qubit(double omega, double gamma, double beta) {
    const double nbar = 1.0 / (std::exp(beta * omega) - 1.0);
    LindbladModel m;
    m.H = qubit_h(omega);
    m.jumps = {{sigma_minus(), gamma * (nbar + 1.0)}, {Mat(sigma_minus().adjoint()), gamma * nbar}};
    return m;
}

Mat coherent_qubit() {
    Mat r(2, 2);
    r << 0.35, cplx(0.2, -0.25), cplx(0.2, 0.25), 0.65;
    return r;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_SUITE("lindblad") {

TEST_CASE("unitary generator has a purely imaginary spectrum") {
    std::mt19937_64 rng(3);
    LindbladModel m;
    m.H = random_hermitian(4, rng);
    for (cplx l : spectrum(m)) CHECK(std::abs(l.real()) < 1e-12);
    CHECK(trace_preservation_residual(build(m)) < 1e-12);
}

TEST_CASE("qubit decay spectrum") {
    const double Omega = 1.7, gamma = 0.4;
    LindbladModel m;
    m.H = qubit_h(Omega);
    m.jumps = {{sigma_minus(), gamma}};
    std::vector<cplx> ev = spectrum(m);
    REQUIRE(ev.size() == 4);
    CHECK(std::abs(ev[0]) < 1e-12);
    CHECK(std::abs(ev[1].real() + gamma / 2) < 1e-12);
    CHECK(std::abs(ev[2].real() + gamma / 2) < 1e-12);
    CHECK(std::abs(std::abs(ev[1].imag()) - Omega) < 1e-12);
    CHECK(std::abs(ev[1].imag() + ev[2].imag()) < 1e-12);
    CHECK(std::abs(ev[3] + gamma) < 1e-12);
    CHECK(gap(m) == doctest::Approx(gamma / 2).epsilon(1e-12));
}

TEST_CASE("sparse and dense generators agree and preserve trace") {
    std::mt19937_64 rng(4);
    LindbladModel m;
    m.H = random_hermitian(5, rng);
    m.jumps = {{random_hermitian(5, rng) + cplx(0, 1) * random_hermitian(5, rng), 0.3},
               {random_hermitian(5, rng), 1.1}};
    Mat dense = build(m);
    Mat sp = Mat(build_sparse(m));
    CHECK((dense - sp).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(trace_preservation_residual(dense) < 1e-12);
    Mat rho = random_density(5, rng);
    CHECK((unvec(dense * vec(rho), 5) - m.apply(rho)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("model validation") {
    LindbladModel m;
    m.H = qubit_h(1.0);
    m.jumps = {{sigma_minus(), -0.1}};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.jumps = {{identity(3), 0.1}};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    LindbladModel big;
    big.H = identity(kMaxDim + 1);
    CHECK_THROWS_AS(build(big), std::invalid_argument);
}

TEST_CASE("zero generator leaves the state constant") {
    LindbladModel m;
    m.H = Mat::Zero(2, 2);
    Trajectory tr = integrate(m, coherent_qubit(), {0.0, 0.5, 1.0});
    for (const Mat& r : tr.rho) CHECK((r - coherent_qubit()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(integrate(m, coherent_qubit(), {0.0, 1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("thermal qubit relaxes with the analytic two-level solution") {
    const double omega = 1.2, gamma = 0.5, beta = 0.8;
    LindbladModel m = thermal_qubit(omega, gamma, beta);
    const double nbar = 1.0 / (std::exp(beta * omega) - 1.0);
    const double G = gamma * (2 * nbar + 1), f = nbar / (2 * nbar + 1);
    Mat rho0 = coherent_qubit();
    std::vector<double> grid = linspace(0.0, 4.0, 21);
    Trajectory tr = integrate(m, rho0, grid);
    CHECK(tr.max_trace_drift < 1e-10);
    CHECK(tr.min_eigenvalue > -1e-12);
    for (size_t k = 0; k < grid.size(); ++k) {
        double t = grid[k];
        double pe = f + (rho0(1, 1).real() - f) * std::exp(-G * t);
        cplx c = rho0(1, 0) * std::exp(cplx(-G / 2, -omega) * t);
        CHECK(std::abs(tr.rho[k](1, 1).real() - pe) < 1e-8);
        CHECK(std::abs(tr.rho[k](1, 0) - c) < 1e-8);
    }
    CHECK((propagate_expm(m, rho0, 1.0) - tr.rho[5]).cwiseAbs().maxCoeff() < 1e-8);
    SteadyState ss = steady_state(m);
    CHECK(trace_distance(ss.rho, thermal_state(m.H, beta)) < 1e-10);
    CHECK(ss.residual < 1e-10);
}

TEST_CASE("degenerate steady space is an error") {
    LindbladModel m;
    m.H = qubit_h(1.0);
    m.jumps = {{sigma_z(), 0.5}};
    CHECK_THROWS_AS(steady_state(m), std::runtime_error);
}

TEST_CASE("Kerr model: vacuum without drive and truncation convergence") {
    SteadyState vac = steady_state(kerr_model(-2.0, 1.0, 0.0, 0.5, 1, 10));
    CHECK(std::abs(vac.rho(0, 0) - 1.0) < 1e-10);

    SteadyState a = steady_state(kerr_model(-2.0, 1.0, 1.0, 0.5, 1, 24));
    SteadyState b = steady_state(kerr_model(-2.0, 1.0, 1.0, 0.5, 1, 32));
    require_fock_truncation(a.rho);
    CHECK(check_fock_truncation(a.rho).mean_n == doctest::Approx(check_fock_truncation(b.rho).mean_n).epsilon(1e-6));
    CHECK(a.residual < 1e-10);
    CHECK_THROWS_AS(require_fock_truncation(steady_state(kerr_model(-2.0, 1.0, 2.0, 0.5, 1, 8)).rho),
                    std::runtime_error);
}

TEST_CASE("Kerr photon number steepens with N and the gap dips in the bistable window") {
    std::vector<double> eps = linspace(0.5, 1.3, 9);
    double slope[2] = {0.0, 0.0};
    int idx = 0;
    for (int N : {1, 3}) {
        int cut = N == 1 ? 24 : 40;
        double prev = 0.0;
        for (size_t i = 0; i < eps.size(); ++i) {
            SteadyState s = steady_state(kerr_model(-2.0, 1.0, eps[i], 0.5, N, cut));
            require_fock_truncation(s.rho);
            double n = check_fock_truncation(s.rho).mean_n / N;
            if (i > 0) slope[idx] = std::max(slope[idx], (n - prev) / (eps[i] - eps[i - 1]));
            prev = n;
        }
        ++idx;
    }
    CHECK(slope[1] > slope[0]);

    double g_low = gap(kerr_model(-2.0, 1.0, 0.4, 0.5, 1, 24));
    double g_high = gap(kerr_model(-2.0, 1.0, 2.0, 0.5, 1, 24));
    double g_mid = std::min(gap(kerr_model(-2.0, 1.0, 0.8, 0.5, 1, 24)), gap(kerr_model(-2.0, 1.0, 0.9, 0.5, 1, 24)));
    CHECK(g_mid < 0.5 * std::min(g_low, g_high));
}

TEST_CASE("spin operators") {
    for (double S : {0.5, 1.0, 2.0, 3.5}) {
        SpinOperators o = spin_operators(S);
        CHECK((commutator(o.Sx, o.Sy) - cplx(0, 1) * o.Sz).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((commutator(o.Sy, o.Sz) - cplx(0, 1) * o.Sx).cwiseAbs().maxCoeff() < 1e-12);
        Mat cas = o.Sx * o.Sx + o.Sy * o.Sy + o.Sz * o.Sz;
        CHECK((cas - S * (S + 1) * identity(o.Sz.rows())).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(spin_operators(0.3), std::invalid_argument);
}

TEST_CASE("macrospin steady state and order parameter") {
    SteadyState s0 = steady_state(macrospin_model(0.0, 1.0, 2.0));
    SpinOperators o = spin_operators(2.0);
    CHECK(expect(o.Sz, s0.rho) == doctest::Approx(-2.0).epsilon(1e-10));

    double prev = -kInf;
    for (double h : linspace(0.0, 5.0, 11)) {
        double sz = expect(o.Sz, steady_state(macrospin_model(h, 1.0, 2.0)).rho);
        CHECK(sz < 0.0);
        CHECK(sz > prev);
        prev = sz;
        if (h < 2.0) CHECK(sz < -0.4 * 2.0);
    }
    CHECK(prev > -0.05 * 2.0);
}

TEST_CASE("macrospin gap closes above the critical field") {
    std::vector<double> hs = linspace(0.0, 5.0, 11);
    std::vector<double> g4, g2;
    for (double h : hs) {
        g4.push_back(gap(macrospin_model(h, 1.0, 4.0)));
        g2.push_back(gap(macrospin_model(h, 1.0, 2.0)));
    }
    double largest_drop = 0.0, h_of_drop = 0.0;
    for (size_t i = 1; i < hs.size(); ++i) {
        CHECK(g4[i] <= g4[i - 1] + 1e-12);
        if (g4[i - 1] - g4[i] > largest_drop) largest_drop = g4[i - 1] - g4[i], h_of_drop = hs[i];
        if (hs[i] > 2.0) CHECK(g4[i] < g2[i]);
    }
    CHECK(h_of_drop <= 2.0);
    CHECK(g4.back() < 0.2 * g4.front());
}

TEST_CASE("squeezed dissipator reduces to the thermal one at r = 0") {
    const double nbar = 0.4, gamma = 0.7;
    LindbladModel sq = squeezed_dissipator(gamma, nbar, 0.0, 0.3, 0.0, 12);
    Mat a = destroy(12);
    LindbladModel th;
    th.H = Mat::Zero(12, 12);
    th.jumps = {{a, gamma * (nbar + 1)}, {Mat(a.adjoint()), gamma * nbar}};
    CHECK((build(sq) - build(th)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("squeezed steady-state second moments") {
    const double nbar = 0.3, r = 0.4, theta = 0.7;
    SqueezedParameters p = squeezed_parameters(nbar, r, theta);
    SteadyState s = steady_state(squeezed_dissipator(1.0, p, 0.0));
    require_fock_truncation(s.rho);
    Mat a = destroy(kDefaultFockCut);
    CHECK(expect(Mat(a.adjoint() * a), s.rho) == doctest::Approx(p.N).epsilon(1e-7));
    cplx aa = (a * a * s.rho).trace();
    CHECK(std::abs(aa - p.M) < 1e-7);
    CHECK(p.N + 0.5 == doctest::Approx((nbar + 0.5) * std::cosh(2 * r)).epsilon(1e-15));
}

TEST_CASE("squeezed physicality boundary") {
    const double N = 0.5;
    SqueezedParameters edge{N, std::polar(std::sqrt(N * (N + 1)), 0.4)};
    CHECK_NOTHROW(squeezed_dissipator(1.0, edge, 0.0, 10));
    SqueezedParameters beyond{N, std::polar(std::sqrt(N * (N + 1)) * (1 + 1e-6), 0.4)};
    CHECK_THROWS_AS(squeezed_dissipator(1.0, beyond, 0.0, 10), std::invalid_argument);
}

TEST_CASE("Spohn rates vanish at the Gibbs state of a static model") {
    LindbladModel m = thermal_qubit(1.0, 0.5, 0.9);
    Trajectory tr = integrate(m, thermal_state(m.H, 0.9), linspace(0.0, 1.0, 6));
    SpohnRates sr = spohn_rates(m, 0.9, tr);
    for (size_t k = 0; k < sr.t.size(); ++k) {
        CHECK(std::abs(sr.Q_dot[k]) < 1e-12);
        CHECK(std::abs(sr.W_dot[k]) < 1e-15);
        CHECK(std::abs(sr.sigma_dot[k]) < 1e-12);
    }
    CHECK_THROWS_AS(spohn_rates(m, 0.3, tr), std::invalid_argument);
}

TEST_CASE("Spohn rate for qubit relaxation from the excited state") {
    const double omega = 1.0, gamma = 0.6, beta = 1.1;
    LindbladModel m = thermal_qubit(omega, gamma, beta);
    const double nbar = 1.0 / (std::exp(beta * omega) - 1.0);
    const double G = gamma * (2 * nbar + 1), f = nbar / (2 * nbar + 1);
    Mat rho0 = Mat::Zero(2, 2);
    rho0(1, 1) = 1.0;
    std::vector<double> grid = linspace(0.0, 12.0, 1201);
    Trajectory tr = integrate(m, rho0, grid);
    SpohnRates sr = spohn_rates(m, beta, tr);
    CHECK(std::isinf(sr.sigma_dot[0]));
    double integral = 0.0;
    for (size_t k = 1; k < grid.size(); ++k) {
        double t = grid[k];
        double pe = f + (1 - f) * std::exp(-G * t), dpe = -G * (1 - f) * std::exp(-G * t);
        double exact = -dpe * std::log(pe * (1 - f) / ((1 - pe) * f));
        CHECK(sr.sigma_dot[k] >= 0.0);
        CHECK(sr.sigma_dot[k] == doctest::Approx(exact).epsilon(1e-6));
    }
    const double h = grid[1] - grid[0];
    for (size_t k = 10; k + 2 < grid.size(); k += 2)
        integral += h / 3 * (sr.sigma_dot[k] + 4 * sr.sigma_dot[k + 1] + sr.sigma_dot[k + 2]);
    CHECK(integral == doctest::Approx(sr.relent[10] - sr.relent.back()).epsilon(1e-5));
    CHECK(sr.relent[0] == doctest::Approx(-std::log(f)).epsilon(1e-12));
    CHECK(sr.relent.back() < 1e-6);
    for (size_t k = 20; k + 2 < grid.size(); ++k)
        CHECK(std::abs(sr.sigma_dot_fd[k] - sr.sigma_dot[k]) < 1e-5 * (1.0 + sr.sigma_dot[k]));
}

TEST_CASE("first law with a driven Hamiltonian and a conserving dissipator") {
    LindbladModel m;
    m.H = qubit_h(1.0);
    m.H_of_t = [](double t) { return Mat(qubit_h(1.0 + 0.3 * std::sin(t)) + 0.2 * std::cos(2 * t) * sigma_x()); };
    m.jumps = {{sigma_minus(), 0.4}, {Mat(sigma_minus().adjoint()), 0.4}, {sigma_z(), 0.1}};
    auto dH = [](double t) { return Mat(qubit_h(0.3 * std::cos(t)) - 0.4 * std::sin(2 * t) * sigma_x()); };
    std::vector<double> grid = linspace(0.0, 3.0, 301);
    Trajectory tr = integrate(m, coherent_qubit(), grid);
    SpohnRates sr = spohn_rates(m, 0.0, tr, dH);
    SpohnRates sr_fd = spohn_rates(m, 0.0, tr);
    for (size_t k = 2; k + 2 < grid.size(); ++k) {
        CHECK(std::abs(sr.first_law_residual[k]) < 1e-8);
        CHECK(std::abs(sr.W_dot[k] - sr_fd.W_dot[k]) < 1e-8);
        CHECK(sr.sigma_dot[k] >= -1e-8);
    }
}

TEST_CASE("Spohn positivity for random single-bath thermal models") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const double beta = 0.5 + trial * 0.3;
        Mat H = random_hermitian(3, rng);
        Eigh e = eigh(H);
        LindbladModel m;
        m.H = H;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                Mat L = e.vectors.col(i) * e.vectors.col(j).adjoint();
                double w = e.values(j) - e.values(i);
                double rate = 0.3 * (1 + i + j) * (w > 0 ? 1.0 : std::exp(beta * w));
                m.jumps.push_back({L, rate});
            }
        Trajectory tr = integrate(m, random_density(3, rng), linspace(0.0, 5.0, 51));
        SpohnRates sr = spohn_rates(m, beta, tr);
        for (double s : sr.sigma_dot) CHECK(s >= -1e-8);
    }
}

TEST_CASE("sweep csv header") {
    std::string s = to_csv_sweep({0.1}, {0.2}, {0.3}, {0.4});
    CHECK(s.rfind("parameter,gap,order_parameter,n_a\n", 0) == 0);
}

}  // TEST_SUITE
