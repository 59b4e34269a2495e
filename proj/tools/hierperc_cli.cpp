// Command-line front end: sampling dumps, estimator runs, beta sweeps,
// renormalization checks, oracle runs, schedule printing, and fit reports.
// Exit codes: 0 success, 1 check failure, 2 usage error, 3 resource refusal.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hierperc/clusters.hpp"
#include "hierperc/estimators.hpp"
#include "hierperc/oracle.hpp"
#include "hierperc/renorm.hpp"
#include "hierperc/sampler.hpp"

using nlohmann::json;
using namespace hierperc;

namespace {

struct CommonArgs {
    int d = 1;
    int L = 2;
    double alpha = 1.0;
    double beta = 1.0;
    double p = 1.0;
    int n = 1;
    std::uint64_t trials = 10000;
    std::uint64_t max_trials = 100000;
    double target_se = 0.01;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    int n_cap = 12;
    double lambda = 0.5;
    int k = 1;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--d", a.d, "dimension");
    cmd->add_option("--L", a.L, "side length");
    cmd->add_option("--alpha", a.alpha, "decay exponent");
    cmd->add_option("--beta", a.beta, "edge strength");
    cmd->add_option("--p", a.p, "site density");
    cmd->add_option("--n", a.n, "scale (Lambda_n)");
    cmd->add_option("--trials", a.trials, "trial count");
    cmd->add_option("--max-trials", a.max_trials, "hard trial cap");
    cmd->add_option("--target-se", a.target_se, "target relative standard error");
    cmd->add_option("--seed", a.seed, "master seed");
    cmd->add_option("--out", a.out, "output file (default stdout)");
    cmd->add_option("--format", a.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--n-cap", a.n_cap, "scale search cap");
    cmd->add_option("--lambda", a.lambda, "density threshold for Psi");
    cmd->add_option("--k", a.k, "block level / zoom depth");
    cmd->add_option("--threads", a.threads, "worker threads");
}

Params make_params(const CommonArgs& a) {
    return Params(a.d, a.L, a.alpha, a.beta, a.p);
}

EstimatorOptions make_opts(const CommonArgs& a) {
    EstimatorOptions o;
    o.min_trials = std::min<std::uint64_t>(a.trials, a.max_trials);
    o.max_trials = std::max(a.trials, a.max_trials);
    o.target_rel_se = a.target_se;
    o.threads = a.threads;
    return o;
}

void emit(const CommonArgs& a, const std::string& text) {
    if (a.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream f(a.out, std::ios::binary);
        f << text;
        if (!text.empty() && text.back() != '\n') f << '\n';
    }
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json params_json(const Params& p) {
    return {{"d", p.d}, {"L", p.L}, {"alpha", p.alpha}, {"beta", p.beta}, {"p", p.p}};
}

// Timing is deliberately left out: output must be byte-identical across
// repeated runs and thread counts.
json report_json(const EstimateReport& r) {
    return {{"estimate", r.estimate}, {"se", r.se}, {"trials", r.trials},
            {"seed", r.seed},         {"n", r.n},   {"params", params_json(r.params)}};
}

std::string base64_encode(const std::vector<std::uint8_t>& data) {
    static const char* tbl =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    for (std::size_t i = 0; i < data.size(); i += 3) {
        std::uint32_t v = data[i] << 16;
        if (i + 1 < data.size()) v |= data[i + 1] << 8;
        if (i + 2 < data.size()) v |= data[i + 2];
        out += tbl[(v >> 18) & 63];
        out += tbl[(v >> 12) & 63];
        out += i + 1 < data.size() ? tbl[(v >> 6) & 63] : '=';
        out += i + 2 < data.size() ? tbl[v & 63] : '=';
    }
    return out;
}

// Grid spec "start:stop:scale:count" with scale in {log, lin}.
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 4) throw usage_error("grid: expected start:stop:scale:count");
    const double start = std::stod(parts[0]);
    const double stop = std::stod(parts[1]);
    const bool log_scale = parts[2] == "log";
    if (!log_scale && parts[2] != "lin") throw usage_error("grid: scale must be log or lin");
    const int count = std::stoi(parts[3]);
    if (count < 1 || start <= 0.0 || stop < start)
        throw usage_error("grid: need 0 < start <= stop and count >= 1");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out.push_back(log_scale ? start * std::pow(stop / start, t)
                                : start + t * (stop - start));
    }
    return out;
}

int run_sample(const CommonArgs& a) {
    const Params params = make_params(a);
    const MixedConfig mc = sample_mixed(params, a.n, SeedSpec{a.seed});
    json edges = json::array();
    for (const Edge& e : mc.omega.all_edges()) edges.push_back({e.first, e.second});
    json j{{"params", params_json(params)}, {"n", a.n}, {"seed", a.seed},
           {"edges", edges}};
    bool all_ones = true;
    for (auto v : mc.eta)
        if (!v) all_ones = false;
    if (all_ones) {
        j["eta"] = "all-ones";
    } else {
        std::vector<std::uint8_t> bits((mc.eta.size() + 7) / 8, 0);
        for (std::size_t i = 0; i < mc.eta.size(); ++i)
            if (mc.eta[i]) bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
        j["eta"] = base64_encode(bits);
    }
    emit(a, j.dump(2));
    return 0;
}

int run_chi(const CommonArgs& a) {
    const auto rep = chi_hat(make_params(a), a.n, SeedSpec{a.seed}, make_opts(a));
    emit(a, report_json(rep).dump(2));
    return 0;
}

int run_kmax(const CommonArgs& a) {
    const Params params = make_params(a);
    const Lattice lat(params, a.n);
    std::map<std::uint64_t, std::uint64_t> hist;
    for (std::uint64_t t = 0; t < a.trials; ++t) {
        const MixedConfig mc =
            sample_mixed(params, a.n, SeedSpec{a.seed}.with(StreamPurpose::generic, t));
        hist[kmax(lat, mc, {a.k, 0}).size]++;
    }
    if (a.format == "csv") {
        std::ostringstream os;
        os << "size,count\n";
        for (const auto& [size, count] : hist) os << size << "," << count << "\n";
        emit(a, os.str());
    } else {
        json j{{"params", params_json(params)}, {"n", a.n}, {"k", a.k},
               {"trials", a.trials}, {"seed", a.seed}};
        json h = json::object();
        for (const auto& [size, count] : hist) h[std::to_string(size)] = count;
        j["histogram"] = h;
        emit(a, j.dump(2));
    }
    return 0;
}

int run_phi(const CommonArgs& a) {
    const auto rep = phi_hat(make_params(a), a.n, SeedSpec{a.seed}, make_opts(a));
    emit(a, report_json(rep).dump(2));
    return 0;
}

int run_xi(const CommonArgs& a) {
    const auto res =
        correlation_length(make_params(a), a.n_cap, SeedSpec{a.seed}, make_opts(a));
    json scales = json::array();
    for (const auto& r : res.phi_by_scale) scales.push_back(report_json(r));
    const char* status = res.status == XiStatus::ok ? "ok"
                         : res.status == XiStatus::indeterminate ? "indeterminate"
                                                                 : "exceeds_cap";
    json j{{"status", status}, {"n_of_beta", res.n_of_beta}, {"xi", res.xi},
           {"phi_by_scale", scales}};
    emit(a, j.dump(2));
    return res.status == XiStatus::ok ? 0 : 1;
}

int run_sweep(const CommonArgs& a, const std::string& grid, bool fixed_n) {
    const std::vector<double> betas = parse_grid(grid);
    std::ostringstream os;
    os << "beta,n,trials,chi_hat,se,phi_hat,n_of_beta,seed\n";
    for (double beta : betas) {
        CommonArgs b = a;
        b.beta = beta;
        const Params params = make_params(b);
        int n = a.n;
        int n_of_beta = -1;
        if (!fixed_n) {
            const auto xi = correlation_length(params, a.n_cap, SeedSpec{a.seed},
                                               make_opts(a));
            n_of_beta = xi.n_of_beta;
            n = std::max(1, xi.n_of_beta);
        }
        const auto chi = chi_hat(params, n, SeedSpec{a.seed}, make_opts(a));
        const auto phi = phi_hat(params, n, SeedSpec{a.seed}, make_opts(a));
        os << fmt17(beta) << "," << n << "," << chi.trials << ","
           << fmt17(chi.estimate) << "," << fmt17(chi.se) << ","
           << fmt17(phi.estimate) << "," << n_of_beta << "," << a.seed << "\n";
    }
    emit(a, os.str());
    return 0;
}

std::vector<FitPoint> read_sweep_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw usage_error("fit: cannot open input file");
    std::string line;
    std::getline(f, line);  // header
    std::vector<FitPoint> points;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 5) throw usage_error("fit: malformed sweep row");
        points.push_back({std::stod(cells[0]), std::stod(cells[3]),
                          std::stod(cells[4])});
    }
    return points;
}

int run_fit(const CommonArgs& a, const std::string& mode, const std::string& in) {
    const auto points = read_sweep_csv(in);
    json j{{"mode", mode}, {"points", points.size()}};
    if (mode == "power") {
        const auto f = fit_power_law(points);
        j["slope"] = f.slope;
        j["intercept"] = f.intercept;
        j["slope_ci"] = f.slope_ci;
        j["r_squared"] = f.r_squared;
    } else {
        const auto f = fit_double_exp(points);
        j["slope"] = f.slope;
        j["intercept"] = f.intercept;
        j["slope_ci"] = f.slope_ci;
        j["convexity_consistent"] = f.convexity_consistent;
        j["slope_positive"] = f.slope_positive;
        j["double_exponential"] = f.double_exponential();
        json d2 = json::array();
        for (const auto& d : f.second_differences)
            d2.push_back({{"value", d.value}, {"sigma", d.sigma}});
        j["second_differences"] = d2;
    }
    emit(a, j.dump(2));
    return 0;
}

int run_oracle(const CommonArgs& a) {
    const Params params = make_params(a);
    const Oracle oracle(params, a.n, a.p < 1.0);
    const Lattice lat(params, a.n);
    const auto probs = oracle.connection_probs();
    // By symmetry the connection probability depends on x only through its
    // distance class; report the per-class value.
    std::map<int, double> by_class;
    for (std::uint64_t x = 0; x < probs.size(); ++x) {
        const int c = lat.distance_class(0, x);
        if (!by_class.count(c)) by_class[c] = probs[x];
    }
    json conn = json::object();
    for (const auto& [c, v] : by_class) conn[std::to_string(c)] = v;
    json law = json::object();
    for (const auto& [size, prob] : oracle.kmax_law())
        law[std::to_string(size)] = prob;
    json j{{"params", params_json(params)}, {"n", a.n},
           {"chi_exact", oracle.chi_exact()}, {"conn_probs", conn},
           {"kmax_law", law}};
    emit(a, j.dump(2));
    return 0;
}

int run_renorm_check(const CommonArgs& a, const std::string& which) {
    const Params params = make_params(a);
    json tests = json::array();
    bool all_pass = true;
    if (which == "all" || which == "marginal") {
        double worst = 0.0;
        for (int k = 1; k <= 12; ++k)
            worst = std::max(worst, phi_marginal_identity(params, k));
        const bool pass = worst <= 1e-12;
        all_pass &= pass;
        tests.push_back({{"test", "phi_marginal_identity"},
                         {"params", params_json(params)},
                         {"statistic", worst},
                         {"threshold", 1e-12},
                         {"pass", pass}});
    }
    if (which == "all" || which == "psi") {
        std::uint64_t violations = 0, pairs = 0;
        bool volume_ok = true;
        const int n = std::max(1, a.n - a.k);
        for (std::uint64_t t = 0; t < a.trials; ++t) {
            const MixedConfig mc = sample_mixed(
                params, n + a.k, SeedSpec{a.seed}.with(StreamPurpose::generic, t));
            const auto rep = check_psi_connectivity(params, mc, a.lambda, a.k, n);
            violations += rep.violations.size();
            pairs += rep.pairs_checked;
            volume_ok &= rep.volume_inequality_ok;
        }
        const bool pass = violations == 0 && volume_ok;
        all_pass &= pass;
        tests.push_back({{"test", "psi_connectivity"},
                         {"params", params_json(params)},
                         {"statistic", violations},
                         {"pairs_checked", pairs},
                         {"threshold", 0},
                         {"pass", pass}});
    }
    if (which == "all" || which == "domination") {
        const auto rep = check_domination(params, a.lambda, a.k, a.n,
                                          std::max<std::uint64_t>(a.trials, 1000),
                                          SeedSpec{a.seed});
        all_pass &= rep.ok();
        tests.push_back({{"test", "domination"},
                         {"params", params_json(params)},
                         {"statistic", rep.eta_marginal - rep.p_prime},
                         {"threshold", 4.0 * rep.eta_sigma},
                         {"pass", rep.ok()}});
    }
    emit(a, json{{"tests", tests}, {"pass", all_pass}}.dump(2));
    return all_pass ? 0 : 1;
}

int run_induction_check(const CommonArgs& a, double eps, bool base_case) {
    const Params params = make_params(a);
    json j;
    bool pass = true;
    if (base_case) {
        const auto rep = base_case_events(params, SeedSpec{a.seed}, make_opts(a));
        j = {{"params", params_json(params)},
             {"delta", rep.delta},
             {"n0", rep.n0},
             {"prob_a1", rep.prob_a1},
             {"prob_a2", rep.prob_a2},
             {"prob_a3", rep.prob_a3},
             {"prob_a4", rep.prob_a4},
             {"prob_all", rep.prob_all},
             {"prob_kmax", rep.prob_kmax},
             {"a3_a4_applicable", rep.a3_a4_applicable},
             {"trials", rep.trials}};
    } else {
        const auto rep = check_induction(params, a.n, eps, SeedSpec{a.seed},
                                         make_opts(a));
        pass = rep.implication_ok;
        j = {{"params", params_json(params)},
             {"n", a.n},
             {"eps", eps},
             {"premise_prob", rep.premise_prob},
             {"premise_se", rep.premise_se},
             {"conclusion_prob", rep.conclusion_prob},
             {"conclusion_se", rep.conclusion_se},
             {"premise_holds", rep.premise_holds},
             {"implication_ok", rep.implication_ok}};
    }
    emit(a, j.dump(2));
    return pass ? 0 : 1;
}

int run_schedule(const CommonArgs& a, std::optional<int> k0_override) {
    const Params params = make_params(a);
    const RGSchedule sch = schedule(params, k0_override);
    json j{{"params", params_json(params)}, {"marginal", sch.marginal}};
    if (sch.marginal) {
        j["delta"] = sch.delta;
        j["n0"] = sch.n0;
        j["ell"] = sch.ell_marginal;
        j["delta_r"] = sch.delta_r;
        j["n_r"] = sch.n_r;
        j["beta_r"] = sch.beta_r;
    } else {
        j["k0"] = sch.k0;
        j["k"] = sch.k;
        j["ell"] = sch.ell;
    }
    emit(a, j.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-range percolation on the hierarchical lattice"};
    app.require_subcommand(1);

    CommonArgs a;
    std::string grid, fit_mode = "power", fit_in, renorm_which = "all";
    double eps = 0.25;
    bool base_case = false;
    int k0_override = -1;

    auto* c_sample = app.add_subcommand("sample", "dump one configuration");
    add_common(c_sample, a);
    auto* c_chi = app.add_subcommand("chi", "susceptibility estimate");
    add_common(c_chi, a);
    auto* c_kmax = app.add_subcommand("kmax", "maximal block cluster histogram");
    add_common(c_kmax, a);
    auto* c_phi = app.add_subcommand("phi", "finite-volume phi estimate");
    add_common(c_phi, a);
    auto* c_xi = app.add_subcommand("xi", "correlation length search");
    add_common(c_xi, a);
    auto* c_sweep = app.add_subcommand("sweep", "beta sweep to CSV");
    add_common(c_sweep, a);
    c_sweep->add_option("--beta-grid", grid, "start:stop:scale:count")->required();
    bool fixed_n = false;
    c_sweep->add_flag("--fixed-n", fixed_n, "use --n instead of n(beta)");
    auto* c_fit = app.add_subcommand("fit", "fit a sweep CSV");
    add_common(c_fit, a);
    c_fit->add_option("--mode", fit_mode, "power or doubleexp")
        ->check(CLI::IsMember({"power", "doubleexp"}));
    c_fit->add_option("--in", fit_in, "sweep CSV input")->required();
    auto* c_oracle = app.add_subcommand("oracle", "exact enumeration");
    add_common(c_oracle, a);
    auto* c_renorm = app.add_subcommand("renorm-check", "renormalization checks");
    add_common(c_renorm, a);
    c_renorm->add_option("--check", renorm_which, "all|marginal|psi|domination")
        ->check(CLI::IsMember({"all", "marginal", "psi", "domination"}));
    auto* c_induction = app.add_subcommand("induction-check", "scale-doubling checks");
    add_common(c_induction, a);
    c_induction->add_option("--eps", eps, "epsilon for the induction event");
    c_induction->add_flag("--base-case", base_case, "measure base-case events");
    auto* c_schedule = app.add_subcommand("schedule", "print the parameter schedule");
    add_common(c_schedule, a);
    c_schedule->add_option("--k0", k0_override, "override k0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (*c_sample) return run_sample(a);
        if (*c_chi) return run_chi(a);
        if (*c_kmax) return run_kmax(a);
        if (*c_phi) return run_phi(a);
        if (*c_xi) return run_xi(a);
        if (*c_sweep) return run_sweep(a, grid, fixed_n);
        if (*c_fit) return run_fit(a, fit_mode, fit_in);
        if (*c_oracle) return run_oracle(a);
        if (*c_renorm) return run_renorm_check(a, renorm_which);
        if (*c_induction)
            return run_induction_check(a, eps, base_case);
        if (*c_schedule)
            return run_schedule(a, k0_override >= 0 ? std::optional<int>(k0_override)
                                                    : std::nullopt);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "resource guard: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
