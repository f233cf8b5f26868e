// hhlab: command-line front end for the Hardy-Henon laboratory.
//
// Exit status: 0 all certificates pass, 1 a certificate failed or a numerical
// routine gave up, 2 invalid flags or configuration (error JSON on stderr).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hhlab/hhlab.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hhlab;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Output {
    std::string flag;

    fs::path dir() const {
        if (!flag.empty()) return flag;
        if (const char* env = std::getenv("HHLAB_OUTPUT_DIR"); env && *env) return env;
        return ".";
    }
    fs::path file(const std::string& name) const {
        const fs::path d = dir();
        fs::create_directories(d);
        return d / name;
    }
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << std::setprecision(17);
    return os;
}

void emit_json(const Output& out, const std::string& name, const json& j) {
    auto os = open_out(out.file(name));
    os << j.dump(2) << '\n';
    std::cout << j.dump(2) << '\n';
}

json to_json(const Certificate& c) {
    return {{"name", c.name}, {"tag", c.tag}, {"ok", c.ok}, {"value", c.value}, {"bound", c.bound}};
}

json to_json(const std::vector<Certificate>& cs) {
    json arr = json::array();
    for (const auto& c : cs) arr.push_back(to_json(c));
    return arr;
}

json to_json(const HardyHenonParams& p) {
    return {{"n", p.n}, {"m", p.m}, {"a", p.a}, {"p", p.p}, {"t", p.t}, {"regime", to_string(p.regime())}};
}

int status_of(const std::vector<Certificate>& cs) {
    for (const auto& c : cs)
        if (!c.ok) return 1;
    return 0;
}

std::string param_label(const std::string& field, const HardyHenonParams& p) {
    std::ostringstream os;
    os << field << " n=" << p.n << " m=" << p.m << " a=" << p.a << " p=" << p.p << " t=" << p.t;
    return os.str();
}

void add_params(CLI::App* cmd, HardyHenonParams& p, bool with_a, bool with_t) {
    cmd->add_option("--n", p.n, "dimension")->capture_default_str();
    cmd->add_option("--m", p.m, "operator half-order")->capture_default_str();
    if (with_a) cmd->add_option("--a", p.a, "Hardy exponent")->capture_default_str();
    cmd->add_option("--p", p.p, "nonlinearity exponent")->capture_default_str();
    if (with_t) cmd->add_option("--t", p.t, "forcing offset")->capture_default_str();
}

std::vector<double> parse_axis(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    try {
        if (parts.size() == 1) return {std::stod(parts[0])};
        if (parts.size() == 3) {
            const long count = std::stol(parts[2]);
            if (count < 0) throw ConfigError("axis count must be >= 0");
            return linspace(std::stod(parts[0]), std::stod(parts[1]), static_cast<std::size_t>(count));
        }
    } catch (const std::invalid_argument&) {
    } catch (const std::out_of_range&) {
    }
    throw ConfigError("axis '" + text + "' must be 'value' or 'lo:hi:count'");
}

// ---------------------------------------------------------------- commands

struct SelftestOpts {
    std::size_t samples = 20;
    std::uint64_t seed = 20261015;
    int budget = 400;
};

int run_selftest(const SelftestOpts& o, const Output& out) {
    if (o.budget < 1) throw ConfigError("--budget must be positive");
    json consts = json::array();
    double const_err = 0.0;
    const double pi = std::numbers::pi;
    const std::vector<std::tuple<double, int, double>> table = {
        {2.0, 4, 1.0 / (4 * pi * pi)},
        {4.0, 5, 1.0 / (16 * pi * pi)},
        {2.0, 6, std::tgamma(2.0) / (4 * std::pow(pi, 3.0))},
        {2.0, 8, std::tgamma(3.0) / (4 * std::pow(pi, 4.0))},
    };
    for (const auto& [alpha, n, expected] : table) {
        const double v = riesz_constant(alpha, n);
        const double err = std::abs(v - expected);
        const_err = std::max(const_err, err);
        consts.push_back({{"alpha", alpha}, {"n", n}, {"value", v}, {"expected", expected}, {"abs_err", err}});
    }

    auto csv = open_out(out.file("compositions.csv"));
    csv << "alpha1,alpha2,n,distance,lhs,rhs,gap\n";
    json comps = json::array();
    double worst = 0.0;
    for (const auto& s : random_compose_samples(o.seed, o.samples)) {
        const ComposeResult r = riesz_compose_check(s.alpha1, s.alpha2, s.x, s.z, s.n, o.budget);
        const double gap = std::abs(r.lhs / r.rhs - 1.0);
        const double d = detail::distance(s.x, s.z);
        worst = std::max(worst, gap);
        csv << s.alpha1 << ',' << s.alpha2 << ',' << s.n << ',' << d << ',' << r.lhs << ',' << r.rhs << ',' << gap
            << '\n';
        comps.push_back({{"alpha1", s.alpha1}, {"alpha2", s.alpha2}, {"n", s.n}, {"distance", d}, {"lhs", r.lhs},
                         {"rhs", r.rhs}, {"gap", gap}});
    }
    const std::vector<Certificate> certs = {
        {"riesz_constants", "eq:2c1", const_err < 1e-12, const_err, 1e-12},
        {"composition", "eq:2c26", worst < 1e-2, worst, 1e-2},
    };
    json j = {{"command", "kernels-selftest"}, {"seed", o.seed}, {"constants", consts},
              {"compositions", comps},         {"max_gap", worst},  {"certificates", to_json(certs)}};
    emit_json(out, "kernels_selftest.json", j);
    return status_of(certs);
}

struct LadderOpts {
    HardyHenonParams params{4, 2, 0.0, 2.0, 0.0};
    double M = 0.0;
    double l0 = 0.0;  // 0 selects the divergence threshold
    double alpha0 = 0.0;
    int steps = 40;
};

int run_ladder(LadderOpts o, const Output& out) {
    o.params.validate();
    if (o.steps < 0) throw ConfigError("--steps must be >= 0");
    if (o.l0 < 0.0) throw ConfigError("--l0 must be positive");
    const double alpha0 = o.alpha0 > 0.0 ? o.alpha0 : default_alpha0(o.params);
    const double log_threshold = log_divergence_threshold(o.params, o.M, alpha0);
    const double log_l0 = o.l0 > 0.0 ? std::log(o.l0) : log_threshold;
    LadderState s0 = LadderState::initial(o.params, 1.0, o.M, alpha0);
    s0.log_l = log_l0;

    const auto rows = ladder_table(s0, o.steps);
    std::ostringstream csv;
    csv << std::setprecision(17) << "k,log_l,alpha\n";
    const double p = o.params.p;
    const double slope = o.params.n / (p - 1.0) * std::log(2.0 * p);
    bool growth = true, exponents = true;
    double worst_gap = 0.0;
    for (const auto& row : rows) {
        csv << row.k << ',' << row.log_l << ',' << row.alpha << '\n';
        const LadderClosedForm cf = ladder_closed_form(row.k, s0);
        // judged on the closed form: the recurrence amplifies rounding by p^k
        if (cf.log_exact < slope * row.k - 1e-9 * std::max(1.0, std::abs(cf.log_exact))) growth = false;
        if (row.k <= 12)
            worst_gap = std::max(worst_gap, std::abs(cf.log_exact - row.log_l) / std::max(1.0, std::abs(row.log_l)));
        LadderState probe = s0;
        probe.alpha = row.alpha;
        if (!probe.exponent_inequality_holds()) exponents = false;
    }
    std::cout << csv.str();
    auto f = open_out(out.file("ladder.csv"));
    f << csv.str();

    std::vector<Certificate> certs = {
        {"closed_form", "eq:2-38", worst_gap < 1e-9, worst_gap, 1e-9},
        {"exponent_inequality", "eq:2-35", exponents, 0.0, 0.0},
    };
    if (log_l0 >= log_threshold) certs.push_back({"threshold_growth", "eq:2-40", growth, ladder_closed_form(o.steps, s0).log_exact, slope * o.steps});
    json j = {{"command", "ladder"},
              {"params", to_json(o.params)},
              {"M", o.M},
              {"alpha0", alpha0},
              {"log_l0", log_l0},
              {"log_threshold", log_threshold},
              {"threshold", std::exp(log_threshold)},
              {"certificates", to_json(certs)}};
    auto jf = open_out(out.file("ladder.json"));
    jf << j.dump(2) << '\n';
    return status_of(certs);
}

struct SolveOpts {
    HardyHenonParams params{4, 2, 0.0, 2.0, 0.0};
    double R = 1.0;
    SolverConfig cfg;
    double eig_tol = 1e-10;
};

int run_solve(const SolveOpts& o, const Output& out) {
    const NavierProblem problem{o.params, o.R};
    problem.validate();
    if (o.cfg.nodes < RadialGrid::min_nodes) throw ConfigError("--nodes must be >= 32");
    if (!(o.cfg.tol > 0.0) || !(o.eig_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (2 * problem.m() < problem.n()) throw ConfigError("solve needs 2m >= n");

    NavierSolution sol = solve_positive(problem, o.cfg);
    const EigenPair eig = first_eigenpair(problem, sol.u().grid(), o.eig_tol);
    add_energy_certificate(sol, eig, problem);
    const EnergyBound e = energy_bound_check(sol, eig, problem);

    auto csv = open_out(out.file("solution.csv"));
    write_csv(csv, sol.u(), param_label("u", o.params) + " R=" + std::to_string(o.R));
    json j = {{"command", "solve"},
              {"params", to_json(o.params)},
              {"R", o.R},
              {"nodes", o.cfg.nodes},
              {"lambda1", eig.lambda1},
              {"sup_norm", sol.sup_norm},
              {"rho", rho_radius(problem)},
              {"residual", sol.residual},
              {"energy_ratio", e.lhs / e.rhs},
              {"bisection_steps", sol.bisection_steps},
              {"certificates", to_json(sol.certificates)}};
    emit_json(out, "solve.json", j);
    return status_of(sol.certificates);
}

struct EigenOpts {
    HardyHenonParams params{4, 2, 0.0, 2.0, 0.0};
    double R = 1.0;
    std::size_t nodes = 512;
    double tol = 1e-10;
};

int run_eigen(const EigenOpts& o, const Output& out) {
    const NavierProblem problem{o.params, o.R};
    problem.validate();
    if (o.nodes < RadialGrid::min_nodes) throw ConfigError("--nodes must be >= 32");
    if (!(o.tol > 0.0)) throw ConfigError("--tol must be positive");
    const EigenPair eig = first_eigenpair(problem, o.nodes, o.tol);
    const double oracle = navier_eigenvalue_oracle(problem.n(), problem.m(), o.R);
    const double gap = std::abs(eig.lambda1 / oracle - 1.0);
    const std::vector<Certificate> certs = {
        {"eigen_residual", "lemma:3.1", eig.residual < o.tol, eig.residual, o.tol},
        {"bessel_oracle", "lemma:3.1", gap < 2e-3, gap, 2e-3},
    };
    auto csv = open_out(out.file("eigenfunction.csv"));
    write_csv(csv, eig.phi, "phi n=" + std::to_string(o.params.n) + " m=" + std::to_string(o.params.m));
    json j = {{"command", "eigen"},       {"n", o.params.n},       {"m", o.params.m},
              {"R", o.R},                 {"nodes", o.nodes},      {"lambda1", eig.lambda1},
              {"oracle", oracle},         {"rel_gap", gap},        {"residual", eig.residual},
              {"iterations", eig.iterations}, {"certificates", to_json(certs)}};
    emit_json(out, "eigen.json", j);
    return status_of(certs);
}

struct ShootOpts {
    HardyHenonParams params{4, 2, 0.0, 2.0, 0.0};
    std::vector<double> init;
    double r_max = 50.0;
    ShootConfig cfg;
    bool trace = false;
};

int run_shoot(ShootOpts o, const Output& out) {
    o.params.validate();
    if (o.init.size() != static_cast<std::size_t>(o.params.m))
        throw ConfigError("--init needs exactly m = " + std::to_string(o.params.m) + " values");
    o.cfg.record_trace = o.trace;
    const ShootingOutcome res = shoot(o.init, o.params, o.r_max, o.cfg);
    if (o.trace) {
        auto csv = open_out(out.file("trace.csv"));
        csv << 'r';
        for (int i = 0; i < o.params.m; ++i) csv << ",u" << i;
        csv << '\n';
        for (const auto& tp : res.trace) {
            csv << tp.r;
            for (double v : tp.layers) csv << ',' << v;
            csv << '\n';
        }
    }
    json j = {{"command", "shoot"},
              {"params", to_json(o.params)},
              {"init", o.init},
              {"kind", to_string(res.kind)},
              {"layer", res.layer},
              {"r_star", res.r_star},
              {"r_max", res.r_max},
              {"final_state", res.final_state}};
    emit_json(out, "shoot.json", j);
    return 0;
}

struct ScanOpts {
    HardyHenonParams params{4, 2, 0.0, 2.0, 0.0};
    std::vector<std::string> axes;
    double r_max = 50.0;
    ShootConfig cfg;
    unsigned workers = 0;
    bool stability = false;
};

int run_scan(ScanOpts o, const Output& out) {
    o.params.validate();
    std::vector<std::vector<double>> axes;
    for (const auto& a : o.axes) axes.push_back(parse_axis(a));
    if (axes.size() != static_cast<std::size_t>(o.params.m))
        throw ConfigError("--axis must be given m = " + std::to_string(o.params.m) + " times");
    if (!(o.r_max > 0.0)) throw ConfigError("--r-max must be positive");
    const unsigned workers = o.workers ? o.workers : std::max(1u, std::thread::hardware_concurrency());

    const ScanResult res = scan(axes, o.params, o.r_max, o.cfg, workers);
    auto csv = open_out(out.file("scan.csv"));
    for (int i = 0; i < o.params.m; ++i) csv << "u" << i << "_0,";
    csv << "kind,layer,r_star\n";
    for (const auto& c : res.cells) {
        for (double v : c.init) csv << v << ',';
        if (c.outcome) csv << to_string(c.outcome->kind) << ',' << c.outcome->layer << ',' << c.outcome->r_star << '\n';
        else csv << "failed,-1,nan\n";
    }

    std::vector<Certificate> certs;
    if (o.params.regime() != OrderRegime::subcritical)
        certs.push_back({"liouville_scan", "thm:1.1", res.tally.all_positive_survivors() == 0,
                         static_cast<double>(res.tally.all_positive_survivors()), 0.0});
    if (o.stability) {
        const ScanResult half = scan(axes, o.params, o.r_max, o.cfg.halved(), workers);
        std::size_t flips = 0;
        for (std::size_t i = 0; i < res.cells.size(); ++i) {
            const auto& a = res.cells[i].outcome;
            const auto& b = half.cells[i].outcome;
            if (a.has_value() != b.has_value() || (a && (a->kind != b->kind || a->layer != b->layer))) ++flips;
        }
        certs.push_back({"tolerance_stability", "thm:1.1", flips == 0, static_cast<double>(flips), 0.0});
    }
    json j = {{"command", "scan"},
              {"params", to_json(o.params)},
              {"r_max", o.r_max},
              {"cells", res.cells.size()},
              {"tally",
               {{"blow_up", res.tally.blow_up},
                {"sign_loss", res.tally.sign_loss},
                {"survived", res.tally.survived},
                {"failed", res.tally.failed}}},
              {"certificates", to_json(certs)}};
    emit_json(out, "scan.json", j);
    return status_of(certs);
}

struct SingularOpts {
    HardyHenonParams params{4, 2, 0.0, 2.0, 0.0};
    double lo = 0.5, hi = 2.0, h = 5e-3;
    int order = 6;
};

int run_singular(SingularOpts o, const Output& out) {
    o.params.validate();
    if (o.order != 2 && o.order != 4 && o.order != 6) throw ConfigError("--order must be 2, 4 or 6");
    const auto sol = singular_solution(o.params);
    json j = {{"command", "singular"}, {"params", to_json(o.params)}, {"exists", sol.has_value()}};
    std::vector<Certificate> certs;
    if (sol) {
        const ProfileResidual res = singular_residual(o.params, o.lo, o.hi, o.h, o.order);
        const double bound = 1e-5 * std::pow(sol->C, o.params.p);
        certs.push_back({"singular_residual", "rem:1.2", res.sup_abs < bound, res.sup_abs, bound});
        j["sigma"] = sol->sigma;
        j["C"] = sol->C;
        j["residual_abs"] = res.sup_abs;
        j["residual_rel"] = res.sup_rel;
        auto csv = open_out(out.file("singular.csv"));
        const auto count = static_cast<std::size_t>(std::llround((o.hi - o.lo) / o.h)) + 1;
        const RadialGrid grid = RadialGrid::uniform(o.lo, o.hi, std::max<std::size_t>(count, RadialGrid::min_nodes));
        write_csv(csv, RadialField::sample(grid, [&](double r) { return sol->C * std::pow(r, -sol->sigma); }),
                  param_label("u", o.params));
    } else {
        j["sigma"] = o.params.scaling_exponent();
        j["C"] = nullptr;
    }
    j["certificates"] = to_json(certs);
    emit_json(out, "singular.json", j);
    return status_of(certs);
}

// Fixed battery of quick checks with a readable table.
int run_report(const Output& out) {
    std::vector<Certificate> certs;
    const double pi = std::numbers::pi;
    {
        const double err = std::max(std::abs(riesz_constant(2, 4) - 1 / (4 * pi * pi)),
                                    std::abs(riesz_constant(4, 5) - 1 / (16 * pi * pi)));
        certs.push_back({"riesz_constants", "eq:2c1", err < 1e-12, err, 1e-12});
        double worst = 0.0;
        for (const auto& s : random_compose_samples(20261015, 6)) {
            const auto r = riesz_compose_check(s.alpha1, s.alpha2, s.x, s.z, s.n);
            worst = std::max(worst, std::abs(r.lhs / r.rhs - 1));
        }
        certs.push_back({"composition", "eq:2c26", worst < 1e-2, worst, 1e-2});
    }
    {
        const HardyHenonParams p{4, 2, 0, 2, 0};
        const double thr = divergence_threshold(p, 0.0);
        certs.push_back({"divergence_threshold", "eq:2-29", std::abs(thr / 16777216.0 - 1) < 1e-12, thr, 16777216.0});
        const auto rows = ladder_table(LadderState::initial(p, thr, 0.0), 40);
        const double need = 40 * 4.0 * std::log(4.0);
        certs.push_back({"threshold_growth", "eq:2-40", rows.back().log_l >= need - 1e-9, rows.back().log_l, need});
        const RadialGrid g = RadialGrid::uniform(0, 1, 257);
        const RadialField u = poisson_solve_ball(RadialField::sample(g, [](double r) { return r * r; }), 1.0, 4);
        const double c = u[0];
        certs.push_back({"monomial_coefficient", "eq:2-31", std::abs(c - monomial_poisson_coefficient(2, 4)) < 1e-6,
                         c, monomial_poisson_coefficient(2, 4)});
    }
    {
        const HardyHenonParams p{4, 2, 0, 2, 0};
        const auto res = singular_residual(p, 0.5, 2.0, 5e-3, 6);
        const double bound = 1e-5 * 192.0 * 192.0;
        certs.push_back({"singular_residual", "rem:1.2", res.sup_abs < bound, res.sup_abs, bound});
    }
    const NavierProblem problem{{4, 2, 0, 2, 0}, 1.0};
    {
        const EigenPair eig = first_eigenpair(problem, 512);
        const double oracle = navier_eigenvalue_oracle(4, 2, 1.0);
        const double gap = std::abs(eig.lambda1 / oracle - 1);
        certs.push_back({"bessel_oracle", "lemma:3.1", gap < 2e-3, gap, 2e-3});
        NavierSolution sol = solve_positive(problem);
        const EigenPair eig513 = first_eigenpair(problem, sol.u().grid());
        add_energy_certificate(sol, eig513, problem);
        certs.insert(certs.end(), sol.certificates.begin(), sol.certificates.end());
        const RadialField h = torsion_function(problem, RadialGrid::uniform(0, 1, 257));
        const TorsionBound tb = torsion_bound_check(h, problem);
        certs.push_back({"torsion_bound", "eq:4-9", tb.ok, tb.sup, tb.bound});
    }
    {
        const ScanResult res = scan({linspace(0.1, 10, 11), linspace(-10, 10, 11)}, {4, 2, 0, 2, 0}, 50.0, {},
                                    std::max(1u, std::thread::hardware_concurrency()));
        certs.push_back({"liouville_scan", "thm:1.1", res.tally.all_positive_survivors() == 0,
                         static_cast<double>(res.tally.all_positive_survivors()), 0.0});
        const RadialGrid g = RadialGrid::uniform(0, 200, 20001);
        const RadialField f = bubble_oracle(4, g).map([](double v) { return v * v * v; });
        const RepresentationCheck rc = representation_check(f, 4);
        const double err = std::abs(rc.potential_at_0 - 2 * std::sqrt(2.0));
        certs.push_back({"representation", "eq:2c6", err < 1e-3 && !rc.truncation_dominated, err, 1e-3});
    }

    std::cout << std::left << std::setw(24) << "check" << std::setw(12) << "tag" << std::setw(16) << "value"
              << std::setw(16) << "bound"
              << "status\n";
    for (const auto& c : certs)
        std::cout << std::setw(24) << c.name << std::setw(12) << c.tag << std::setw(16) << std::setprecision(6)
                  << c.value << std::setw(16) << c.bound << (c.ok ? "pass" : "FAIL") << '\n';
    auto jf = open_out(out.file("report.json"));
    jf << json{{"command", "report"}, {"certificates", to_json(certs)}}.dump(2) << '\n';
    return status_of(certs);
}

void error_json(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for critical and super-critical order Hardy-Henon equations"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file with one [section] per subcommand; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    Output out;
    app.add_option("--out", out.flag, "output directory (default: $HHLAB_OUTPUT_DIR or .)");

    std::function<int()> action;

    SelftestOpts st;
    auto* c_self = app.add_subcommand("kernels-selftest", "Riesz constants and random composition checks");
    c_self->add_option("--samples", st.samples)->capture_default_str();
    c_self->add_option("--seed", st.seed)->capture_default_str();
    c_self->add_option("--budget", st.budget, "adaptive quadrature panel cap")->capture_default_str();
    c_self->callback([&] { action = [&] { return run_selftest(st, out); }; });

    LadderOpts lo;
    auto* c_ladder = app.add_subcommand("ladder", "blow-up ladder table as CSV (k, log l_k, alpha_k)");
    add_params(c_ladder, lo.params, true, false);
    c_ladder->add_option("--M", lo.M, "re-centering path length")->capture_default_str();
    c_ladder->add_option("--l0", lo.l0, "initial amplitude (default: divergence threshold)");
    c_ladder->add_option("--alpha0", lo.alpha0, "initial exponent (default: max(1, 2n/p))");
    c_ladder->add_option("--steps", lo.steps)->capture_default_str();
    c_ladder->callback([&] { action = [&] { return run_ladder(lo, out); }; });

    SolveOpts so;
    auto* c_solve = app.add_subcommand("solve", "positive Navier solution on a ball");
    add_params(c_solve, so.params, false, true);
    c_solve->add_option("--R", so.R, "ball radius")->capture_default_str();
    c_solve->add_option("--nodes", so.cfg.nodes)->capture_default_str();
    c_solve->add_option("--tol", so.cfg.tol, "fixed-point residual tolerance")->capture_default_str();
    c_solve->add_option("--inner-tol", so.cfg.inner_tol)->capture_default_str();
    c_solve->add_option("--eig-tol", so.eig_tol)->capture_default_str();
    c_solve->callback([&] { action = [&] { return run_solve(so, out); }; });

    EigenOpts eo;
    auto* c_eig = app.add_subcommand("eigen", "first Navier eigenpair with Bessel-zero oracle");
    c_eig->add_option("--n", eo.params.n)->capture_default_str();
    c_eig->add_option("--m", eo.params.m)->capture_default_str();
    c_eig->add_option("--R", eo.R)->capture_default_str();
    c_eig->add_option("--nodes", eo.nodes)->capture_default_str();
    c_eig->add_option("--tol", eo.tol)->capture_default_str();
    c_eig->callback([&] { action = [&] { return run_eigen(eo, out); }; });

    ShootOpts sh;
    auto* c_shoot = app.add_subcommand("shoot", "classify one radial trajectory");
    add_params(c_shoot, sh.params, true, true);
    c_shoot->add_option("--init", sh.init, "u_i(0) for i < m, comma separated")->delimiter(',')->required();
    c_shoot->add_option("--r-max", sh.r_max)->capture_default_str();
    c_shoot->add_option("--rtol", sh.cfg.rtol)->capture_default_str();
    c_shoot->add_option("--atol", sh.cfg.atol)->capture_default_str();
    c_shoot->add_option("--blowup", sh.cfg.blowup_threshold)->capture_default_str();
    c_shoot->add_option("--sign-tol", sh.cfg.sign_tolerance)->capture_default_str();
    c_shoot->add_flag("--trace", sh.trace, "write trace.csv");
    c_shoot->callback([&] { action = [&] { return run_shoot(sh, out); }; });

    ScanOpts sc;
    auto* c_scan = app.add_subcommand("scan", "classification atlas over origin data");
    add_params(c_scan, sc.params, true, true);
    c_scan->add_option("--axis", sc.axes, "one per layer: value or lo:hi:count")->required();
    c_scan->add_option("--r-max", sc.r_max)->capture_default_str();
    c_scan->add_option("--rtol", sc.cfg.rtol)->capture_default_str();
    c_scan->add_option("--atol", sc.cfg.atol)->capture_default_str();
    c_scan->add_option("--workers", sc.workers, "0 = hardware threads")->capture_default_str();
    c_scan->add_flag("--stability", sc.stability, "rerun with halved tolerances and compare");
    c_scan->callback([&] { action = [&] { return run_scan(sc, out); }; });

    SingularOpts sg;
    auto* c_sing = app.add_subcommand("singular", "singular solution C r^-sigma and its residual");
    add_params(c_sing, sg.params, true, false);
    c_sing->add_option("--lo", sg.lo)->capture_default_str();
    c_sing->add_option("--hi", sg.hi)->capture_default_str();
    c_sing->add_option("--step", sg.h, "grid spacing")->capture_default_str();
    c_sing->add_option("--order", sg.order, "finite-difference order (2, 4, 6)")->capture_default_str();
    c_sing->callback([&] { action = [&] { return run_singular(sg, out); }; });

    auto* c_report = app.add_subcommand("report", "summary table of all checks with equation tags");
    c_report->callback([&] { action = [&] { return run_report(out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_json("config", e.what());
        return 2;
    }

    try {
        return action();
    } catch (const ConfigError& e) {
        error_json("config", e.what());
        return 2;
    } catch (const DomainError& e) {
        error_json("config", e.what());
        return 2;
    } catch (const Error& e) {
        error_json(e.kind(), e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        error_json("io", e.what());
        return 2;
    }
}
