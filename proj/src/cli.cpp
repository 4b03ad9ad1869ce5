// cli.cpp — scenario configuration, dispatch, sweeps and table output
#include "entroprod/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "entroprod/classical.hpp"
#include "entroprod/collisional.hpp"
#include "entroprod/core.hpp"
#include "entroprod/gaussian.hpp"
#include "entroprod/lindblad.hpp"
#include "entroprod/maps.hpp"
#include "entroprod/resource.hpp"
#include "entroprod/trajectories.hpp"
#include "entroprod/verify.hpp"

namespace entroprod::cli {

using nlohmann::json;

ValidationError::ValidationError(std::string field, const std::string& reason)
    : std::runtime_error(field + ": " + reason), field_(std::move(field)) {}

namespace {

enum class Type { Number, Integer, Boolean, String, Matrix, Vector };

const char* type_name(Type t) {
    switch (t) {
        case Type::Number: return "a number";
        case Type::Integer: return "an integer";
        case Type::Boolean: return "a boolean";
        case Type::String: return "a string";
        case Type::Matrix: return "a matrix ({\"re\": [[...]], \"im\": [[...]]} or nested real arrays)";
        case Type::Vector: return "an array of numbers";
    }
    return "";
}

struct Field {
    std::string name;
    Type type;
    bool required = false;
};

Mat parse_matrix(const json& j) {
    if (j.is_array()) {
        json wrapped = {{"re", j}};
        return core::matrix_from_json(wrapped);
    }
    return core::matrix_from_json(j);
}

bool type_matches(const json& v, Type t) {
    switch (t) {
        case Type::Number: return v.is_number();
        case Type::Integer: return v.is_number_integer();
        case Type::Boolean: return v.is_boolean();
        case Type::String: return v.is_string();
        case Type::Vector:
            return v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
        case Type::Matrix:
            try {
                parse_matrix(v);
                return true;
            } catch (const std::exception&) {
                return false;
            }
    }
    return false;
}

// Validated parameter mapping.
class Params {
public:
    explicit Params(json j) : j_(std::move(j)) {}

    bool has(const std::string& k) const { return j_.contains(k); }
    double num(const std::string& k) const { return at(k).get<double>(); }
    double num(const std::string& k, double def) const { return has(k) ? num(k) : def; }
    int integer(const std::string& k, int def) const { return has(k) ? at(k).get<int>() : def; }
    bool boolean(const std::string& k, bool def) const { return has(k) ? at(k).get<bool>() : def; }
    std::string str(const std::string& k, const std::string& def) const { return has(k) ? at(k).get<std::string>() : def; }
    Mat matrix(const std::string& k) const { return parse_matrix(at(k)); }
    RVec vec(const std::string& k) const {
        std::vector<double> v = at(k).get<std::vector<double>>();
        return Eigen::Map<RVec>(v.data(), static_cast<int>(v.size()));
    }
    void set(const std::string& k, double v) { j_[k] = v; }
    const json& raw() const { return j_; }

private:
    const json& at(const std::string& k) const {
        if (!j_.contains(k)) throw ValidationError("parameters." + k, "required field missing");
        return j_.at(k);
    }
    json j_;
};

ValidationError bad(const std::string& k, const std::string& reason) { return ValidationError("parameters." + k, reason); }

void positive(const Params& p, const std::string& k) {
    if (p.has(k) && !(p.num(k) > 0.0)) throw bad(k, "must be positive");
}

void nonnegative(const Params& p, const std::string& k) {
    if (p.has(k) && !(p.num(k) >= 0.0)) throw bad(k, "must be non-negative");
}

using Row = std::vector<json>;

struct Scenario {
    std::vector<Field> fields;
    std::function<void(const Params&)> check;
    std::function<Table(const Params&, std::mt19937_64&)> eval;
};

Table single_row(std::vector<std::string> cols, Row row) { return {std::move(cols), {std::move(row)}}; }

// Episode inputs: either the five matrices or random dimensions.
const std::vector<Field> kEpisodeFields = {
    {"H_S", Type::Matrix}, {"H_E", Type::Matrix}, {"U", Type::Matrix}, {"rho_S", Type::Matrix},
    {"rho_E", Type::Matrix}, {"d_S", Type::Integer}, {"d_E", Type::Integer},
};
const char* kEpisodeMatrices[] = {"H_S", "H_E", "U", "rho_S", "rho_E"};

void check_episode(const Params& p) {
    int given = 0;
    for (const char* k : kEpisodeMatrices) given += p.has(k);
    if (given != 0 && given != 5) {
        for (const char* k : kEpisodeMatrices)
            if (!p.has(k)) throw bad(k, "required when any episode matrix is given");
    }
    if (given == 5 && (p.has("d_S") || p.has("d_E"))) throw bad(p.has("d_S") ? "d_S" : "d_E", "conflicts with explicit matrices");
    for (const char* k : {"d_S", "d_E"})
        if (p.has(k) && (p.integer(k, 2) < 2 || p.integer(k, 2) > 4)) throw bad(k, "must be between 2 and 4");
    positive(p, "beta");
}

// Random episodes draw a thermal environment when beta is given.
maps::Episode episode_from(const Params& p, std::mt19937_64& rng) {
    if (p.has("H_S"))
        return maps::make_episode(p.matrix("H_S"), p.matrix("H_E"), p.matrix("U"), p.matrix("rho_S"), p.matrix("rho_E"));
    const int dS = p.integer("d_S", 2), dE = p.integer("d_E", 2);
    Mat hS = core::random_hermitian(dS, rng), hE = core::random_hermitian(dE, rng);
    Mat U = core::random_unitary(dS * dE, rng);
    Mat rhoS = core::random_density(dS, rng);
    Mat rhoE = p.has("beta") ? core::thermal_state(hE, p.num("beta")) : core::random_density(dE, rng);
    return maps::make_episode(hS, hE, U, rhoS, rhoE);
}

std::vector<Field> with(std::vector<Field> base, std::initializer_list<Field> extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
}

Mat qubit_family(double l) { return core::sigma_z() + l * core::sigma_x(); }

const std::map<std::string, Scenario>& registry() {
    static const std::map<std::string, Scenario> r = [] {
        std::map<std::string, Scenario> m;

        m["episode.balance"] = {
            with(kEpisodeFields, {{"beta", Type::Number, true}}), check_episode,
            [](const Params& p, std::mt19937_64& rng) {
                const maps::EntropyBalance b = maps::thermal_balance(episode_from(p, rng), p.num("beta"));
                return single_row({"sigma", "sigma_flux", "sigma_heat", "sigma_work", "I_SE", "D_env", "dS_S", "Q_E", "W", "dF"},
                                  {b.sigma, b.sigma_flux, b.sigma_heat, b.sigma_work, b.I_SE, b.D_env, b.dS_S, b.Q_E, b.W, b.dF});
            }};

        m["episode.landauer"] = {
            with(kEpisodeFields, {{"beta", Type::Number, true}}), check_episode,
            [](const Params& p, std::mt19937_64& rng) {
                const maps::Episode ep = episode_from(p, rng);
                maps::LandauerOptions opt;
                opt.heat_capacity = maps::canonical_heat_capacity(ep.H_E);
                const maps::LandauerReport r = maps::landauer_report(ep, p.num("beta"), opt);
                return single_row({"T", "Q_E", "dS_S", "basic", "finite_d", "heat_capacity", "B_Q", "basic_ok", "B_Q_ok",
                                   "heat_capacity_ok"},
                                  {r.T, r.Q_E, r.dS_S, r.basic, r.finite_d, r.heat_capacity, r.B_Q, r.basic_ok, r.B_Q_ok,
                                   r.heat_capacity_ok});
            }};

        m["trajectories.backward"] = {
            with(kEpisodeFields, {{"beta", Type::Number}, {"choice", Type::String}}),
            [](const Params& p) {
                check_episode(p);
                if (p.has("choice")) {
                    try {
                        trajectories::backward_choice_from_string(p.str("choice", ""));
                    } catch (const std::invalid_argument&) {
                        throw bad("choice", "must be BathReset, CorrelationsDestroyed, PostMeasurementState or BothReset");
                    }
                }
            },
            [](const Params& p, std::mt19937_64& rng) {
                const maps::Episode ep = episode_from(p, rng);
                std::vector<std::string> names = {"BathReset", "CorrelationsDestroyed", "PostMeasurementState", "BothReset"};
                if (p.has("choice")) names = {p.str("choice", "")};
                Table t{{"choice", "mean_sigma", "exp_minus_sigma", "infinite_paths"}, {}};
                for (const auto& n : names) {
                    const auto e = trajectories::backward_ensemble(ep, trajectories::backward_choice_from_string(n));
                    t.rows.push_back({n, e.mean_sigma(), e.exp_minus_sigma(), e.infinite_sigma});
                }
                return t;
            }};

        m["trajectories.work_distribution"] = {
            {{"H_i", Type::Matrix, true}, {"H_f", Type::Matrix, true}, {"V", Type::Matrix}, {"beta", Type::Number, true}},
            [](const Params& p) { positive(p, "beta"); },
            [](const Params& p, std::mt19937_64&) {
                const Mat Hi = p.matrix("H_i");
                const Mat V = p.has("V") ? p.matrix("V") : core::identity(static_cast<int>(Hi.rows()));
                const auto ws = trajectories::work_distribution(Hi, p.matrix("H_f"), V, p.num("beta"));
                Table t{{"W", "P_forward"}, {}};
                for (size_t i = 0; i < ws.forward.values.size(); ++i) t.rows.push_back({ws.forward.values[i], ws.forward.probs[i]});
                return t;
            }};

        m["trajectories.quench"] = {
            {{"lambda0", Type::Number, true}, {"dlambda", Type::Number, true}, {"beta", Type::Number, true}},
            [](const Params& p) { positive(p, "beta"); },
            [](const Params& p, std::mt19937_64&) {
                const auto r = trajectories::quench_report(qubit_family, p.num("lambda0"), p.num("dlambda"), p.num("beta"));
                return single_row({"sigma_exact", "sigma_second_order", "var_sigma", "Q_skew", "kappa3", "kappa4", "commuting"},
                                  {r.sigma_exact, r.sigma_second_order, r.var_sigma, r.Q_skew, r.kappa3, r.kappa4, r.commuting});
            }};

        m["trajectories.quench_cgf"] = {
            {{"lambda0", Type::Number, true}, {"dlambda", Type::Number, true}, {"beta", Type::Number, true},
             {"points", Type::Integer}},
            [](const Params& p) {
                positive(p, "beta");
                if (p.integer("points", 21) < 2) throw bad("points", "must be at least 2");
            },
            [](const Params& p, std::mt19937_64&) {
                const int n = p.integer("points", 21);
                std::vector<double> grid;
                for (int i = 0; i < n; ++i) grid.push_back(static_cast<double>(i) / (n - 1));
                const double l0 = p.num("lambda0");
                const auto c = trajectories::quench_cgf(qubit_family(l0), qubit_family(l0 + p.num("dlambda")), p.num("beta"), grid);
                Table t{{"lambda", "K"}, {}};
                for (size_t i = 0; i < grid.size(); ++i) t.rows.push_back({c.lambda[i], c.K[i]});
                return t;
            }};

        m["collisional.swap_engine"] = {
            {{"eps_a", Type::Number}, {"eps_b", Type::Number}, {"ratio", Type::Number}, {"T_a", Type::Number, true},
             {"T_b", Type::Number, true}, {"simulated", Type::Boolean}},
            [](const Params& p) {
                if (p.has("eps_b") == p.has("ratio")) throw bad("ratio", "exactly one of ratio and eps_b is required");
                for (const char* k : {"eps_a", "eps_b", "ratio", "T_a", "T_b"}) positive(p, k);
            },
            [](const Params& p, std::mt19937_64&) {
                const double ea = p.num("eps_a", 1.0);
                const double eb = p.has("ratio") ? p.num("ratio") * ea : p.num("eps_b");
                const collisional::SwapEngineSpec s{ea, eb, p.num("T_a"), p.num("T_b")};
                const auto r = p.boolean("simulated", false) ? collisional::swap_engine_simulated(s) : collisional::swap_engine(s);
                return single_row({"ratio", "W", "Qa", "Qb", "Sigma", "regime"},
                                  {eb / ea, r.W, r.Q_a, r.Q_b, r.sigma, collisional::to_string(r.regime)});
            }};

        m["lindblad.kerr"] = {
            {{"Delta", Type::Number, true}, {"U", Type::Number, true}, {"eps", Type::Number, true},
             {"kappa", Type::Number, true}, {"N", Type::Integer}, {"fock_cut", Type::Integer}},
            [](const Params& p) {
                positive(p, "kappa");
                if (p.integer("N", 1) < 1) throw bad("N", "must be positive");
                if (p.integer("fock_cut", 30) < 6 || p.integer("fock_cut", 30) > 60) throw bad("fock_cut", "must be between 6 and 60");
            },
            [](const Params& p, std::mt19937_64&) {
                const int N = p.integer("N", 1);
                const auto model = lindblad::kerr_model(p.num("Delta"), p.num("U"), p.num("eps"), p.num("kappa"), N,
                                                        p.integer("fock_cut", 30));
                const auto ss = lindblad::steady_state(model);
                const auto tc = lindblad::check_fock_truncation(ss.rho);
                return single_row({"gap", "n_per_N", "truncation_ok"}, {lindblad::gap(model), tc.mean_n / N, tc.ok});
            }};

        m["lindblad.macrospin"] = {
            {{"h", Type::Number, true}, {"kappa", Type::Number, true}, {"S", Type::Number, true}},
            [](const Params& p) {
                positive(p, "kappa");
                positive(p, "S");
            },
            [](const Params& p, std::mt19937_64&) {
                const auto model = lindblad::macrospin_model(p.num("h"), p.num("kappa"), p.num("S"));
                const auto o = lindblad::spin_operators(p.num("S"));
                const double sz = core::expect(o.Sz, lindblad::steady_state(model).rho);
                return single_row({"gap", "Sz"}, {lindblad::gap(model), sz});
            }};

        m["gaussian.two_mode_ness"] = {
            {{"omega_a", Type::Number, true}, {"omega_b", Type::Number, true}, {"g_ab", Type::Number, true},
             {"kappa_a", Type::Number, true}, {"gamma_b", Type::Number, true}, {"n_Tb", Type::Number, true}},
            [](const Params& p) {
                for (const char* k : {"omega_a", "omega_b", "kappa_a", "gamma_b"}) positive(p, k);
                nonnegative(p, "n_Tb");
            },
            [](const Params& p, std::mt19937_64&) {
                gaussian::TwoModeNessSpec s;
                s.omega_a = p.num("omega_a");
                s.omega_b = p.num("omega_b");
                s.g_ab = p.num("g_ab");
                s.kappa_a = p.num("kappa_a");
                s.gamma_b = p.num("gamma_b");
                s.n_Tb = p.num("n_Tb");
                const auto r = gaussian::two_mode_ness(s);
                return single_row({"n_a", "n_b", "Pi", "mu_a", "mu_b", "Pi_general"}, {r.n_a, r.n_b, r.Pi, r.mu_a, r.mu_b, r.Pi_general});
            }};

        m["gaussian.squeezed_bath"] = {
            {{"omega", Type::Number}, {"beta", Type::Number, true}, {"r", Type::Number, true}, {"theta", Type::Number},
             {"g_t", Type::Number, true}, {"n_S", Type::Number, true}},
            [](const Params& p) {
                positive(p, "beta");
                positive(p, "omega");
                nonnegative(p, "r");
                nonnegative(p, "n_S");
            },
            [](const Params& p, std::mt19937_64&) {
                gaussian::SqueezedScenario sc;
                sc.omega = p.num("omega", 1.0);
                sc.beta = p.num("beta");
                sc.r = p.num("r");
                sc.theta = p.num("theta", 0.0);
                sc.g_t = p.num("g_t");
                const auto s = gaussian::squeezed_sigma(sc, gaussian::thermal_state(1, p.num("n_S")));
                return single_row({"sigma_affinity", "sigma_relent", "sigma_bath", "sigma_info", "dS_S", "dH_S", "dA_S"},
                                  {s.sigma_affinity, s.sigma_relent, s.sigma_bath, s.sigma_info, s.dS_S, s.dH_S, s.dA_S});
            }};

        m["classical.glauber"] = {
            {{"lx", Type::Integer, true}, {"ly", Type::Integer, true}, {"J", Type::Number}, {"gamma", Type::Number},
             {"beta", Type::Number, true}, {"beta_even", Type::Number}, {"mu", Type::Number}, {"mu_even", Type::Number}},
            [](const Params& p) {
                const int n = p.integer("lx", 0) * p.integer("ly", 0);
                if (p.integer("lx", 0) < 1 || p.integer("ly", 0) < 1) throw bad("lx", "lattice sides must be positive");
                if (n > classical::kMaxGlauberSites) throw bad("lx", "lattice exceeds the site limit");
                positive(p, "beta");
                positive(p, "beta_even");
                positive(p, "gamma");
            },
            [](const Params& p, std::mt19937_64&) {
                const int lx = p.integer("lx", 2), ly = p.integer("ly", 2);
                classical::GlauberSpec s;
                s.n_sites = lx * ly;
                s.J = p.num("J", 1.0);
                s.gamma = p.num("gamma", 1.0);
                s.neighbors = classical::periodic_square_lattice(lx, ly);
                s.beta = classical::checkerboard(lx, ly, p.num("beta"), p.num("beta_even", p.num("beta")));
                s.mu = classical::checkerboard(lx, ly, p.num("mu", 0.0), p.num("mu_even", p.num("mu", 0.0)));
                const auto r = classical::glauber_ising(s);
                return single_row({"sigma_dot", "sigma_lumped", "magnetization"}, {r.sigma_dot, r.sigma_lumped, r.magnetization});
            }};

        m["classical.two_level_fcs"] = {
            {{"eps", Type::Number, true}, {"beta_hot", Type::Number, true}, {"beta_cold", Type::Number, true},
             {"gamma_hot", Type::Number}, {"gamma_cold", Type::Number}},
            [](const Params& p) {
                for (const char* k : {"eps", "beta_hot", "beta_cold", "gamma_hot", "gamma_cold"}) positive(p, k);
            },
            [](const Params& p, std::mt19937_64&) {
                const double eps = p.num("eps");
                const auto parts = classical::two_level_baths(
                    eps, {p.num("beta_hot"), p.num("beta_cold")}, {p.num("gamma_hot", 1.0), p.num("gamma_cold", 1.0)});
                RVec E(2);
                E << 0.0, eps;
                const auto f = classical::fcs(parts, classical::heat_increments(E, 2, 1));
                return single_row({"mean", "variance", "sigma_dot", "tur_lhs", "tur_rhs", "tur_holds"},
                                  {f.mean, f.variance, f.sigma_dot, f.tur_lhs, f.tur_rhs, f.tur_holds});
            }};

        auto check_pops = [](const Params& p, std::initializer_list<const char*> keys) {
            positive(p, "beta");
            const RVec E = p.vec("E");
            for (const char* k : keys) {
                const RVec v = p.vec(k);
                if (v.size() != E.size()) throw bad(k, "length must match E");
                if (v.minCoeff() < 0.0 || std::abs(v.sum() - 1.0) > 1e-9) throw bad(k, "must be a probability vector");
            }
        };

        m["resource.thermo_majorization"] = {
            {{"E", Type::Vector, true}, {"p1", Type::Vector, true}, {"p2", Type::Vector, true}, {"beta", Type::Number, true}},
            [check_pops](const Params& p) { check_pops(p, {"p1", "p2"}); },
            [](const Params& p, std::mt19937_64&) {
                const RVec E = p.vec("E");
                const auto v = resource::thermo_majorizes({E, p.vec("p1")}, {E, p.vec("p2")}, p.num("beta"));
                return single_row({"verdict", "min_gap", "max_gap"}, {resource::to_string(v.verdict), v.min_gap, v.max_gap});
            }};

        m["resource.curve"] = {
            {{"E", Type::Vector, true}, {"p", Type::Vector, true}, {"beta", Type::Number, true}},
            [check_pops](const Params& p) { check_pops(p, {"p"}); },
            [](const Params& p, std::mt19937_64&) {
                const auto c = resource::curve({p.vec("E"), p.vec("p")}, p.num("beta"));
                Table t{{"x", "y"}, {}};
                for (size_t i = 0; i < c.x.size(); ++i) t.rows.push_back({c.x[i], c.y[i]});
                return t;
            }};

        m["resource.second_laws"] = {
            {{"E", Type::Vector, true}, {"p1", Type::Vector, true}, {"p2", Type::Vector, true}, {"beta", Type::Number, true}},
            [check_pops](const Params& p) { check_pops(p, {"p1", "p2"}); },
            [](const Params& p, std::mt19937_64&) {
                const auto s = resource::renyi_second_laws(p.vec("p1"), p.vec("p2"), p.num("beta"), p.vec("E"));
                Table t{{"alpha", "sigma", "allowed"}, {}};
                for (size_t i = 0; i < s.alpha.size(); ++i)
                    t.rows.push_back({std::isinf(s.alpha[i]) ? json("inf") : json(s.alpha[i]), s.sigma[i], s.sigma[i] >= 0.0});
                return t;
            }};
        return m;
    }();
    return r;
}

const std::set<std::string> kKinds = {"episode", "trajectories", "collisional", "lindblad", "gaussian", "classical", "resource"};
const std::set<std::string> kTopLevel = {"schema", "description", "kind", "quantity", "parameters", "sweep", "seed", "output"};

struct Plan {
    std::string kind;
    std::vector<std::string> quantities;
    json parameters = json::object();
    std::string sweep_parameter;
    std::vector<double> grid;
    std::uint64_t seed = 0;
    std::string path, format;
};

const Scenario& scenario(const std::string& kind, const std::string& q) { return registry().at(kind + "." + q); }

Plan validate(const json& c) {
    if (!c.is_object()) throw ValidationError("config", "must be a JSON object");
    for (const auto& [k, v] : c.items())
        if (!kTopLevel.count(k)) throw ValidationError(k, "unknown field");
    if (c.contains("schema") && c.at("schema") != "v1") throw ValidationError("schema", "unsupported version (expected \"v1\")");

    Plan plan;
    if (!c.contains("kind")) throw ValidationError("kind", "required field missing");
    if (!c.at("kind").is_string() || !kKinds.count(c.at("kind").get<std::string>()))
        throw ValidationError("kind", "must be one of episode, trajectories, collisional, lindblad, gaussian, classical, resource");
    plan.kind = c.at("kind");

    if (!c.contains("quantity")) throw ValidationError("quantity", "required field missing");
    const json& q = c.at("quantity");
    if (q.is_string()) plan.quantities = {q.get<std::string>()};
    else if (q.is_array() && !q.empty() && std::all_of(q.begin(), q.end(), [](const json& x) { return x.is_string(); }))
        plan.quantities = q.get<std::vector<std::string>>();
    else throw ValidationError("quantity", "must be a string or a nonempty array of strings");
    for (const auto& name : plan.quantities) {
        if (!registry().count(plan.kind + "." + name)) {
            std::string known;
            for (const auto& [k, v] : registry())
                if (k.rfind(plan.kind + ".", 0) == 0) known += (known.empty() ? "" : ", ") + k.substr(plan.kind.size() + 1);
            throw ValidationError("quantity", "unknown quantity '" + name + "' for kind " + plan.kind + " (known: " + known + ")");
        }
    }
    if (std::set<std::string>(plan.quantities.begin(), plan.quantities.end()).size() != plan.quantities.size())
        throw ValidationError("quantity", "duplicate quantity");

    if (c.contains("parameters")) {
        if (!c.at("parameters").is_object()) throw ValidationError("parameters", "must be an object");
        plan.parameters = c.at("parameters");
    }

    if (c.contains("sweep")) {
        const json& s = c.at("sweep");
        if (!s.is_object()) throw ValidationError("sweep", "must be an object");
        for (const auto& [k, v] : s.items())
            if (k != "parameter" && k != "grid") throw ValidationError("sweep." + k, "unknown field");
        if (!s.contains("parameter") || !s.at("parameter").is_string())
            throw ValidationError("sweep.parameter", "required string field");
        if (!s.contains("grid") || !s.at("grid").is_array()) throw ValidationError("sweep.grid", "required array field");
        if (s.at("grid").empty()) throw ValidationError("sweep.grid", "must be nonempty");
        for (const auto& g : s.at("grid"))
            if (!g.is_number()) throw ValidationError("sweep.grid", "must contain only numbers");
        plan.sweep_parameter = s.at("parameter");
        plan.grid = s.at("grid").get<std::vector<double>>();
        if (plan.parameters.contains(plan.sweep_parameter))
            throw ValidationError("sweep.parameter", "'" + plan.sweep_parameter + "' is also fixed in parameters");
    }

    if (c.contains("seed")) {
        if (!c.at("seed").is_number_unsigned()) throw ValidationError("seed", "must be a non-negative integer");
        plan.seed = c.at("seed").get<std::uint64_t>();
    }

    plan.format = "csv";
    if (c.contains("output")) {
        const json& o = c.at("output");
        if (!o.is_object()) throw ValidationError("output", "must be an object");
        for (const auto& [k, v] : o.items())
            if (k != "path" && k != "format") throw ValidationError("output." + k, "unknown field");
        if (o.contains("format")) {
            if (o.at("format") != "csv" && o.at("format") != "json") throw ValidationError("output.format", "must be csv or json");
            plan.format = o.at("format");
        }
        if (o.contains("path")) {
            if (!o.at("path").is_string() || o.at("path").get<std::string>().empty())
                throw ValidationError("output.path", "must be a nonempty string");
            plan.path = o.at("path");
            if (std::filesystem::path(plan.path).is_absolute()) throw ValidationError("output.path", "must be relative to --out");
            if (!o.contains("format") && std::filesystem::path(plan.path).extension() == ".json") plan.format = "json";
        }
    }

    for (const auto& name : plan.quantities) {
        const Scenario& sc = scenario(plan.kind, name);
        std::map<std::string, const Field*> fields;
        for (const auto& f : sc.fields) fields[f.name] = &f;
        for (const auto& [k, v] : plan.parameters.items()) {
            auto it = fields.find(k);
            if (it == fields.end()) throw ValidationError("parameters." + k, "unknown parameter for " + plan.kind + "." + name);
            if (!type_matches(v, it->second->type)) throw ValidationError("parameters." + k, std::string("must be ") + type_name(it->second->type));
        }
        if (!plan.sweep_parameter.empty()) {
            auto it = fields.find(plan.sweep_parameter);
            if (it == fields.end() || it->second->type != Type::Number)
                throw ValidationError("sweep.parameter", "'" + plan.sweep_parameter + "' is not a numeric parameter of " + plan.kind + "." + name);
        }
        for (const auto& f : sc.fields)
            if (f.required && !plan.parameters.contains(f.name) && f.name != plan.sweep_parameter)
                throw ValidationError("parameters." + f.name, "required field missing");
        // Cross-field checks at every grid point.
        const std::vector<double> points = plan.grid.empty() ? std::vector<double>{0.0} : plan.grid;
        for (double g : points) {
            Params p(plan.parameters);
            if (!plan.sweep_parameter.empty()) p.set(plan.sweep_parameter, g);
            if (sc.check) sc.check(p);
        }
    }
    return plan;
}

// Appends the sweep column unless the scenario already reports it first.
Table evaluate_quantity(const Plan& plan, const std::string& name, int jobs) {
    const Scenario& sc = scenario(plan.kind, name);
    const bool sweeping = !plan.sweep_parameter.empty();
    const size_t n = sweeping ? plan.grid.size() : 1;
    std::vector<Table> parts(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                Params p(plan.parameters);
                if (sweeping) p.set(plan.sweep_parameter, plan.grid[i]);
                // Every grid point sees the same random draw.
                std::mt19937_64 rng(plan.seed);
                parts[i] = sc.eval(p, rng);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int threads = static_cast<int>(std::min<size_t>(std::max(1, jobs), n));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (size_t i = 0; i < n; ++i)
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                const std::string where =
                    sweeping ? " at " + plan.sweep_parameter + " = " + format_double(plan.grid[i]) : std::string();
                if (dynamic_cast<const ValidationError*>(&e)) throw;
                if (dynamic_cast<const std::invalid_argument*>(&e))
                    throw std::invalid_argument(plan.kind + "." + name + where + ": " + e.what());
                throw std::runtime_error(plan.kind + "." + name + where + ": " + e.what());
            }
        }

    Table out;
    out.columns = parts[0].columns;
    const bool prepend = sweeping && (out.columns.empty() || out.columns[0] != plan.sweep_parameter);
    if (prepend) out.columns.insert(out.columns.begin(), plan.sweep_parameter);
    for (size_t i = 0; i < n; ++i)
        for (auto& row : parts[i].rows) {
            if (prepend) row.insert(row.begin(), plan.grid[i]);
            out.rows.push_back(std::move(row));
        }
    return out;
}

std::string output_path(const Plan& plan, const std::string& quantity) {
    const std::string ext = "." + plan.format;
    if (plan.path.empty()) return plan.kind + "_" + quantity + ext;
    if (plan.quantities.size() == 1) return plan.path;
    std::filesystem::path p(plan.path);
    return (p.parent_path() / (p.stem().string() + "." + quantity + p.extension().string())).string();
}

std::string cell(const json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number()) return v.dump();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.get<std::string>();
}

}  // namespace

std::vector<std::string> quantity_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
}

std::string config_hash(const json& config) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : config.dump()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string render_csv(const Table& t, const std::string& provenance) {
    std::string s = "# " + provenance + "\n";
    for (size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + cell(row[i]);
        s += "\n";
    }
    return s;
}

std::string render_json(const Table& t, const json& provenance) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& v : row) r.push_back(v.is_number_float() && !std::isfinite(v.get<double>()) ? json(cell(v)) : v);
        rows.push_back(r);
    }
    return json{{"provenance", provenance}, {"columns", t.columns}, {"rows", rows}}.dump(2) + "\n";
}

std::vector<Output> evaluate(const json& config, int jobs) {
    const Plan plan = validate(config);
    const std::string hash = config_hash(config);
    std::vector<Output> out;
    for (const auto& q : plan.quantities) {
        const Table t = evaluate_quantity(plan, q, jobs);
        Output o{q, output_path(plan, q), {}};
        if (plan.format == "csv") {
            o.content = render_csv(t, "entroprod schema=v1 kind=" + plan.kind + " quantity=" + q + " config_hash=" + hash +
                                          " seed=" + std::to_string(plan.seed));
        } else {
            o.content = render_json(t, {{"schema", "v1"}, {"kind", plan.kind}, {"quantity", q}, {"config_hash", hash},
                                        {"seed", plan.seed}});
        }
        out.push_back(std::move(o));
    }
    return out;
}

int run(const std::filesystem::path& config_path, const RunOptions& opt, std::ostream& out, std::ostream& err) {
    json config;
    {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            err << "error: config: cannot read " << config_path.string() << "\n";
            return kExitValidation;
        }
        try {
            config = json::parse(in);
        } catch (const json::parse_error& e) {
            err << "error: config: invalid JSON: " << e.what() << "\n";
            return kExitValidation;
        }
    }
    if (opt.jobs < 1) {
        err << "error: --jobs: must be positive\n";
        return kExitValidation;
    }
    std::vector<Output> outputs;
    try {
        outputs = evaluate(config, opt.jobs);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    for (const auto& o : outputs) {
        const std::filesystem::path target = opt.out_dir / o.path;
        std::error_code ec;
        if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path(), ec);
        std::ofstream f(target, std::ios::binary | std::ios::trunc);
        f << o.content;
        f.close();
        if (!f) {
            err << "error: cannot write " << target.string() << "\n";
            return kExitFailure;
        }
        out << "wrote " << target.string() << "\n";
    }
    return kExitOk;
}

int verify(const std::string& suite, std::ostream& out, std::ostream& err) {
    std::vector<verify::Criterion> results;
    try {
        results = verify::run_suite(suite);
    } catch (const std::invalid_argument& e) {
        std::string names;
        for (const auto& s : verify::suite_names()) names += (names.empty() ? "" : ", ") + s;
        err << "error: " << e.what() << " (known: " << names << ")\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    int failed = 0, known = 0;
    for (const auto& c : results) {
        out << "[" << c.id << "] " << c.name << "\n";
        for (const auto& k : c.checks) {
            out << "  " << (k.pass ? "PASS" : "FAIL") << " " << k.name << ": " << k.detail
                << (!k.pass && k.known_conflict ? " [known conflict]" : "") << "\n";
            if (!k.pass) (k.known_conflict ? known : failed) += 1;
        }
    }
    out << failed << " failures";
    if (known) out << ", " << known << " known conflicts";
    out << "\n";
    return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace entroprod::cli
