// brentlab: command-line front end for the binary-gcd laboratory.
//
// Exit codes: 0 success, 2 usage or argument error, 3 a verification or
// acceptance check failed, 4 an iterative solve did not converge,
// 1 unexpected error.

#include "brentlab/acceptance.hpp"
#include "brentlab/constants.hpp"
#include "brentlab/density.hpp"
#include "brentlab/dirichlet.hpp"
#include "brentlab/ensembles.hpp"
#include "brentlab/gcd.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using nlohmann::ordered_json;
using namespace brentlab;

constexpr const char* csv_magic = "#brentlab-v1\n";

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

unsigned long long ull(std::uint64_t v) { return static_cast<unsigned long long>(v); }

Ensemble parse_ensemble(const std::string& s) {
    if (s == "1" || s == "odd-coprime") return Ensemble::OddCoprime;
    if (s == "2" || s == "odd") return Ensemble::Odd;
    if (s == "3" || s == "coprime") return Ensemble::Coprime;
    if (s == "4" || s == "all") return Ensemble::All;
    throw std::invalid_argument("unknown ensemble '" + s +
                                "' (expected odd-coprime|odd|coprime|all or 1..4)");
}

/// S, T, E select the built-in costs; anything else is read as a table file.
const CostFunction& resolve_cost(const std::string& sel, std::optional<CostFunction>& storage) {
    if (sel == "S") return CostFunction::subtractions();
    if (sel == "T") return CostFunction::divisions();
    if (sel == "E") return CostFunction::exchanges();
    std::ifstream in(sel);
    if (!in)
        throw std::invalid_argument("cost selector '" + sel +
                                    "' is neither S|T|E nor a readable table file");
    std::ostringstream text;
    text << in.rdbuf();
    storage.emplace(CostFunction::from_table(text.str(), "table"));
    return *storage;
}

void write_text(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::fputs(content.c_str(), stdout);
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
}

std::string stats_csv_header() {
    return std::string(csv_magic) +
           "ensemble,n,count,ratio,cost,mean,mean_over_logn,second_moment\n";
}

std::string census_row(const CensusResult& c) {
    std::ostringstream row;
    row << ensemble_name(c.ensemble) << ',' << c.n << ',' << c.count << ',' << num(c.ratio)
        << ",,,,\n";
    return row.str();
}

std::string stats_row(const EnsembleStats& s) {
    const double ratio = double(s.count) / (double(s.n) * double(s.n));
    std::ostringstream row;
    row << ensemble_name(s.ensemble) << ',' << s.n << ',' << s.count << ',' << num(ratio) << ','
        << s.cost_name << ',' << num(s.mean()) << ',' << num(s.mean_over_log_n()) << ','
        << num(s.second_moment()) << '\n';
    return row.str();
}

ordered_json grid_json(const GridSpec& g) {
    ordered_json j;
    j["geometric"] = g.geometric;
    j["uniform"] = g.uniform;
    j["x_min"] = g.x_min;
    return j;
}

void print_json(const ordered_json& j, const std::string& path) {
    write_text(path, j.dump(2) + "\n");
}

// --- subcommand bodies ------------------------------------------------------

int run_census(const std::string& ensemble, const std::vector<std::uint64_t>& ns, bool csv,
               unsigned threads) {
    const Ensemble e = parse_ensemble(ensemble);
    std::string out;
    if (csv)
        out += stats_csv_header();
    for (const std::uint64_t n : ns) {
        const CensusResult c = ensemble_census(e, n, threads);
        if (csv) {
            out += census_row(c);
        } else {
            char line[160];
            std::snprintf(line, sizeof line, "ensemble=%s n=%llu count=%llu ratio=%s\n",
                          ensemble_name(c.ensemble), ull(c.n), ull(c.count), num(c.ratio).c_str());
            out += line;
        }
    }
    std::fputs(out.c_str(), stdout);
    return 0;
}

int run_stats(const std::string& ensemble, const std::vector<std::uint64_t>& ns,
              const std::string& cost_sel, bool csv, bool fit, std::uint64_t samples,
              std::uint64_t seed, unsigned threads) {
    const Ensemble e = parse_ensemble(ensemble);
    std::optional<CostFunction> storage;
    const CostFunction& c = resolve_cost(cost_sel, storage);

    if (samples > 0) {
        for (const std::uint64_t n : ns) {
            const SampleStats s = sample_mean_cost(e, n, c, samples, seed, threads);
            std::printf("ensemble=%s n=%llu samples=%llu seed=%llu cost=%s mean=%s se=%s "
                        "second_moment=%s\n",
                        ensemble_name(e), ull(n), ull(s.stats.count), ull(s.seed),
                        s.stats.cost_name.c_str(), num(s.stats.mean()).c_str(),
                        num(s.standard_error).c_str(), num(s.stats.second_moment()).c_str());
        }
        return 0;
    }

    std::string out;
    if (csv)
        out += stats_csv_header();
    std::vector<std::pair<double, double>> points;
    for (const std::uint64_t n : ns) {
        const EnsembleStats s = mean_cost(e, n, c, threads);
        points.emplace_back(std::log(double(n)), s.mean());
        if (csv) {
            out += stats_row(s);
        } else {
            char line[256];
            std::snprintf(line, sizeof line,
                          "ensemble=%s n=%llu count=%llu cost=%s mean=%s mean_over_logn=%s "
                          "second_moment=%s\n",
                          ensemble_name(s.ensemble), ull(s.n), ull(s.count), s.cost_name.c_str(),
                          num(s.mean()).c_str(), num(s.mean_over_log_n()).c_str(),
                          num(s.second_moment()).c_str());
            out += line;
        }
    }
    if (fit) {
        const SlopeFit f = fit_line(points);
        char line[256];
        std::snprintf(line, sizeof line, "#fit ensemble=%s cost=%s slope=%s intercept=%s "
                                         "rms_residual=%s\n",
                      ensemble_name(e), c.name().c_str(), num(f.slope).c_str(),
                      num(f.intercept).c_str(), num(f.rms_residual).c_str());
        out += line;
    }
    std::fputs(out.c_str(), stdout);
    return 0;
}

int run_density(const GridSpec& spec, const SolveOptions& opt, const std::string& csv_path,
                const std::string& json_path) {
    const XiSolution xs = solve_xi(spec, opt);
    const FSolution fs = solve_F(spec, opt);

    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << csv_magic << "x,F,xi\n";
        for (const double x : xs.xi.nodes())
            csv << num(x) << ',' << num(fs.F(x)) << ',' << num(xs.xi(x)) << '\n';
        write_text(csv_path, csv.str());
    }

    ordered_json j;
    j["grid"] = grid_json(spec);
    ordered_json jx;
    jx["alpha"] = xs.xi.alpha();
    jx["xi_at_one"] = xs.xi.xi_at_one();
    jx["iterations"] = xs.iterations;
    jx["final_delta"] = xs.final_delta;
    jx["theta_hat"] = xs.theta_hat;
    j["xi"] = jx;
    ordered_json jf;
    jf["F_at_one"] = fs.F.values().back();
    jf["iterations"] = fs.iterations;
    jf["final_delta"] = fs.final_delta;
    jf["theta_hat"] = fs.theta_hat;
    jf["derivative_at_one"] = fs.derivative_at_one;
    j["F"] = jf;
    print_json(j, json_path);
    return 0;
}

int run_constants(const GridSpec& spec, const SolveOptions& opt, const std::string& json_path) {
    const XiSolution xs = solve_xi(spec, opt);
    const FSolution fs = solve_F(spec, opt);
    const ConstantsReport r = compute_constants(xs.xi, fs.F);

    ordered_json j;
    j["grid"] = grid_json(spec);
    j["xi_at_one"] = r.xi_at_one;
    j["alpha"] = r.alpha;
    ordered_json jl;
    jl["via_branch_split"] = r.lambda_s.via_branch_split;
    jl["via_kernel"] = r.lambda_s.via_kernel;
    jl["via_log1m"] = r.lambda_s.via_log1m;
    jl["reference"] = r.lambda_s.reference;
    j["lambda_s"] = jl;
    ordered_json jm;
    jm["subtractions"] = r.mu_subtractions;
    jm["divisions"] = r.mu_divisions;
    jm["exchanges"] = r.mu_exchanges;
    j["mu"] = jm;
    ordered_json jb;
    jb["beta"] = r.beta.beta;
    jb["beta_tilde"] = r.beta.beta_tilde;
    jb["beta_knuth"] = r.beta.beta_knuth;
    j["beta"] = jb;
    ordered_json je;
    je["from_branch_sum"] = r.exchange.from_branch_sum;
    je["from_interval_masses"] = r.exchange.from_interval_masses;
    je["factor_vs_subtractions"] = r.exchange.factor_vs_subtractions;
    j["exchange"] = je;
    ordered_json jr;
    jr["one"] = r.residual_one;
    jr["two_log1p"] = r.residual_two_log;
    jr["log"] = r.residual_log;
    j["stationarity_residuals"] = jr;
    print_json(j, json_path);
    return 0;
}

int run_verify_theta(unsigned n_max, std::uint64_t v_max, const std::string& cost_sel,
                     const std::string& json_path) {
    std::optional<CostFunction> storage;
    const CostFunction& c = resolve_cost(cost_sel, storage);
    const ThetaReport tr = verify_theta(n_max, v_max, c);

    ordered_json j;
    j["n_max"] = tr.n_max;
    j["v_max"] = tr.v_max;
    j["cost"] = c.name();
    j["ok"] = tr.ok;
    ordered_json levels = ordered_json::array();
    for (const ThetaLevel& l : tr.levels) {
        ordered_json jl;
        jl["n"] = l.n;
        jl["word_pairs"] = l.word_pairs;
        jl["trace_pairs"] = l.trace_pairs;
        jl["match"] = l.match;
        levels.push_back(jl);
    }
    j["levels"] = levels;
    j["mismatches"] = tr.mismatches;
    print_json(j, json_path);
    return tr.ok ? 0 : 3;
}

int run_dirichlet(double s, unsigned p, const std::string& family, std::uint64_t v_max,
                  const std::string& cost_sel, bool convolution, const std::string& json_path,
                  unsigned threads) {
    std::optional<CostFunction> storage;
    const CostFunction& c = resolve_cost(cost_sel, storage);

    ordered_json q;
    q["s"] = s;
    q["p"] = p;
    q["v_max"] = v_max;
    q["cost"] = c.name();

    if (convolution) {
        const ConvolutionCheck cv = verify_convolution(s, p, c, v_max, threads);
        ordered_json j;
        j["query"] = q;
        j["odd_side"] = cv.odd_side;
        j["coprime_side"] = cv.coprime_side;
        j["gap"] = cv.odd_side - cv.coprime_side;
        j["allowance"] = cv.allowance;
        j["ok"] = cv.ok;
        print_json(j, json_path);
        return cv.ok ? 0 : 3;
    }

    const Ensemble fam = parse_ensemble(family);
    q["family"] = ensemble_name(fam);
    const DirichletSum ds = series_truncated(s, p, fam, c, v_max, threads);
    ordered_json j;
    j["query"] = q;
    j["value"] = ds.value;
    j["tail_bound"] = ds.tail_bound;
    int rc = 0;
    if (p == 0) {
        const NumTheoryCheck chk = verify_numthy(s, fam, v_max, threads);
        j["closed_form"] = chk.closed_form;
        j["residual"] = chk.residual;
        j["ok"] = chk.ok;
        rc = chk.ok ? 0 : 3;
    }
    print_json(j, json_path);
    return rc;
}

int run_trace(std::uint64_t u, std::uint64_t v, const std::string& cost_sel, bool dump) {
    std::optional<CostFunction> storage;
    const CostFunction& c = resolve_cost(cost_sel, storage);

    const Trace t = binary_gcd_trace(u, v);
    const ReducedPair rp = reduce_to_odd(u, v);
    std::printf("input: u=%llu v=%llu\n", ull(u), ull(v));
    std::printf("reduced: u=%llu v=%llu shared_power=%u\n", ull(rp.pair.u), ull(rp.pair.v),
                rp.shared_exponent);
    std::printf("trace: %s\n", to_string(t).c_str());
    if (dump) {
        OddPair p = rp.pair;
        std::size_t i = 1;
        while (p.u != p.v) {
            const auto [next, rec] = binary_step(p);
            std::printf("  step %zu: (%llu,%llu) -[k=%u %s]-> (%llu,%llu)\n", i++, ull(p.u),
                        ull(p.v), rec.k,
                        rec.branch == Branch::Exchange ? "exchange" : "no-exchange", ull(next.u),
                        ull(next.v));
            p = next;
        }
    }
    std::printf("gcd: %llu\n", ull(t.gcd));
    std::printf("subtractions: %llu\ndivisions: %llu\nexchanges: %llu\n", ull(t.subtractions()),
                ull(t.divisions()), ull(t.exchanges()));
    std::printf("cost[%s]: %s\n", c.name().c_str(), num(total_cost(t, c)).c_str());
    return 0;
}

int run_report(unsigned threads) {
    const std::vector<CriterionOutcome> rows = run_acceptance(threads);
    std::size_t passed = 0;
    for (const CriterionOutcome& r : rows) {
        std::printf("[%s] criterion %d: %s: %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.title.c_str(), r.detail.c_str(), r.seconds);
        std::fflush(stdout);
        passed += r.pass;
    }
    std::printf("report: %zu/%zu criteria passed\n", passed, rows.size());
    return passed == rows.size() ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"brentlab: exact statistics of the binary gcd, its invariant density, and the "
                 "analytic constants they share"};
    app.require_subcommand(1);

    unsigned threads = 0;
    app.add_option("--threads", threads,
                   "worker threads (0 = BRENTLAB_THREADS or hardware count)")
        ->capture_default_str();

    // census
    auto* census = app.add_subcommand("census", "exact pair counts of an ensemble");
    census->fallthrough();
    std::string census_ensemble;
    std::vector<std::uint64_t> census_ns;
    bool census_csv = false;
    census->add_option("--ensemble", census_ensemble, "odd-coprime|odd|coprime|all or 1..4")
        ->required();
    census->add_option("-n,--n", census_ns, "upper bound(s) n")->required();
    census->add_flag("--csv", census_csv, "emit #brentlab-v1 CSV");

    // stats
    auto* stats = app.add_subcommand("stats", "exact or sampled mean cost over an ensemble");
    stats->fallthrough();
    std::string stats_ensemble, stats_cost = "S";
    std::vector<std::uint64_t> stats_ns;
    bool stats_csv = false, stats_fit = false;
    std::uint64_t stats_samples = 0, stats_seed = 1;
    stats->add_option("--ensemble", stats_ensemble, "odd-coprime|odd|coprime|all or 1..4")
        ->required();
    stats->add_option("-n,--n", stats_ns, "upper bound(s) n")->required();
    stats->add_option("--cost", stats_cost, "S|T|E or a cost-table file")
        ->capture_default_str();
    auto* csv_flag = stats->add_flag("--csv", stats_csv, "emit #brentlab-v1 CSV");
    auto* fit_flag =
        stats->add_flag("--fit", stats_fit, "least-squares fit of mean against ln n (needs >= 3 n)");
    auto* samples_opt = stats->add_option(
        "--samples", stats_samples, "Monte Carlo sample count (0 = exact enumeration)");
    stats->add_option("--seed", stats_seed, "sampling seed")->capture_default_str();
    samples_opt->excludes(csv_flag);
    samples_opt->excludes(fit_flag);

    // shared grid/solver options for density and constants
    GridSpec spec;
    SolveOptions sopt;
    const auto add_grid_options = [&](CLI::App* cmd) {
        cmd->add_option("--geometric", spec.geometric, "geometric grid nodes")
            ->capture_default_str();
        cmd->add_option("--uniform", spec.uniform, "uniform grid nodes")->capture_default_str();
        cmd->add_option("--x-min", spec.x_min, "left end of the grid")->capture_default_str();
        cmd->add_option("--tolerance", sopt.tolerance, "fixed-point sup-norm tolerance")
            ->capture_default_str();
        cmd->add_option("--max-iterations", sopt.max_iterations, "iteration cap")
            ->capture_default_str();
    };

    // density
    auto* density = app.add_subcommand(
        "density", "solve the invariant density xi and the distribution F on a grid");
    density->fallthrough();
    std::string density_csv, density_json = "-";
    add_grid_options(density);
    density->add_option("--csv", density_csv, "write x,F,xi table to this file ('-' = stdout)");
    density->add_option("--json", density_json, "write the solve summary here ('-' = stdout)")
        ->capture_default_str();

    // constants
    auto* constants = app.add_subcommand(
        "constants", "solve the densities and report the analytic constants");
    constants->fallthrough();
    std::string constants_json = "-";
    add_grid_options(constants);
    constants->add_option("--json", constants_json, "output file ('-' = stdout)")
        ->capture_default_str();

    // verify-theta
    auto* vtheta = app.add_subcommand(
        "verify-theta", "cross-check branch-word enumeration against direct traces");
    vtheta->fallthrough();
    unsigned vt_n = 6;
    std::uint64_t vt_vmax = 500;
    std::string vt_cost = "S", vt_json = "-";
    vtheta->add_option("-n,--n-max", vt_n, "maximum word length")->capture_default_str();
    vtheta->add_option("--v-max", vt_vmax, "denominator bound")->capture_default_str();
    vtheta->add_option("--cost", vt_cost, "S|T|E or a cost-table file")->capture_default_str();
    vtheta->add_option("--json", vt_json, "output file ('-' = stdout)")->capture_default_str();

    // dirichlet
    auto* dirichlet = app.add_subcommand(
        "dirichlet", "truncated cost Dirichlet series with tail bounds and closed-form checks");
    dirichlet->fallthrough();
    double di_s = 0.0;
    unsigned di_p = 0;
    std::string di_family = "odd", di_cost = "S", di_json = "-";
    std::uint64_t di_vmax = 99999;
    bool di_conv = false;
    dirichlet->add_option("-s,--s", di_s, "exponent s > 1")->required();
    dirichlet->add_option("-p,--power", di_p, "cost power (0 = pair counting)")
        ->capture_default_str();
    dirichlet->add_option("--family", di_family, "odd|odd-coprime")->capture_default_str();
    dirichlet->add_option("--v-max", di_vmax, "truncation bound on v")->capture_default_str();
    dirichlet->add_option("--cost", di_cost, "S|T|E or a cost-table file")->capture_default_str();
    dirichlet->add_flag("--convolution", di_conv,
                        "check the gcd-convolution identity between the odd and coprime series");
    dirichlet->add_option("--json", di_json, "output file ('-' = stdout)")->capture_default_str();

    // trace
    auto* trace = app.add_subcommand("trace", "trace the binary gcd on one pair");
    trace->fallthrough();
    std::uint64_t tr_u = 0, tr_v = 0;
    std::string tr_cost = "S";
    bool tr_dump = false;
    trace->add_option("u", tr_u, "first input (>= 1)")->required();
    trace->add_option("v", tr_v, "second input (>= 1)")->required();
    trace->add_option("--cost", tr_cost, "S|T|E or a cost-table file")->capture_default_str();
    trace->add_flag("--dump-trace", tr_dump, "print every intermediate pair");

    // report
    auto* report = app.add_subcommand("report", "run the acceptance criteria and report pass/fail");
    report->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(census))
            return run_census(census_ensemble, census_ns, census_csv, threads);
        if (app.got_subcommand(stats))
            return run_stats(stats_ensemble, stats_ns, stats_cost, stats_csv, stats_fit,
                             stats_samples, stats_seed, threads);
        if (app.got_subcommand(density))
            return run_density(spec, sopt, density_csv, density_json);
        if (app.got_subcommand(constants))
            return run_constants(spec, sopt, constants_json);
        if (app.got_subcommand(vtheta))
            return run_verify_theta(vt_n, vt_vmax, vt_cost, vt_json);
        if (app.got_subcommand(dirichlet))
            return run_dirichlet(di_s, di_p, di_family, di_vmax, di_cost, di_conv, di_json,
                                 threads);
        if (app.got_subcommand(trace))
            return run_trace(tr_u, tr_v, tr_cost, tr_dump);
        if (app.got_subcommand(report))
            return run_report(threads);
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
