#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

using nlohmann::json;

struct RunResult {
    int code;
    std::string out; ///< stdout and stderr combined
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    const std::string capture = "cli_capture.txt";
    const std::string cmd =
        std::string("\"") + BRENTLAB_CLI_PATH + "\" " + args + " > " + capture + " 2>&1";
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    const int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return {code, slurp(capture)};
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("census -n 10").code == 2);             // missing --ensemble
    CHECK(run_cli("census --ensemble odd").code == 2);    // missing -n
    CHECK(run_cli("stats --ensemble nope -n 5").code == 2);
    CHECK(run_cli("stats --ensemble odd -n 5 --samples 10 --csv").code == 2);
    CHECK(run_cli("trace 3").code == 2);
    CHECK(run_cli("trace 0 5").code == 2);
    CHECK(run_cli("trace 3 5 --cost no_such_file.txt").code == 2);
    CHECK(run_cli("dirichlet -s 0.5").code == 2);
    CHECK(run_cli("dirichlet -s 2 --family all").code == 2);
    CHECK(run_cli("dirichlet -s 1.01 -p 8 --v-max 5").code == 2);

    const RunResult help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(contains(help.out, "census"));
    CHECK(contains(help.out, "dirichlet"));
    CHECK(contains(help.out, "report"));
}

TEST_CASE("trace prints the branch word, the gcd, and the step counts") {
    const RunResult r = run_cli("trace 3 5");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "trace: (1,1);(2,1)"));
    CHECK(contains(r.out, "gcd: 1"));
    CHECK(contains(r.out, "subtractions: 2"));
    CHECK(contains(r.out, "exchanges: 1"));
    CHECK(contains(r.out, "cost[S]: 2"));

    const RunResult shifted = run_cli("trace 12 40 --dump-trace");
    CHECK(shifted.code == 0);
    CHECK(contains(shifted.out, "reduced: u=3 v=5 shared_power=2"));
    CHECK(contains(shifted.out, "trace: (1,1);(2,1)"));
    CHECK(contains(shifted.out, "step 1: (3,5) -[k=1 exchange]-> (1,3)"));
    CHECK(contains(shifted.out, "step 2: (1,3) -[k=1 no-exchange]-> (1,1)"));
    CHECK(contains(shifted.out, "gcd: 4"));

    const RunResult divs = run_cli("trace 1 9 --cost T");
    CHECK(divs.code == 0);
    CHECK(contains(divs.out, "trace: (2,3)"));
    CHECK(contains(divs.out, "cost[T]: 3"));

    const RunResult equal = run_cli("trace 7 7");
    CHECK(equal.code == 0);
    CHECK(contains(equal.out, "gcd: 7"));
    CHECK(contains(equal.out, "subtractions: 0"));
}

TEST_CASE("trace accepts a tabulated cost file") {
    {
        std::ofstream table("cli_cost_table.txt");
        table << "# cost-table C=5 extend=const\n1 1 5\n2 1 2\n";
    }
    const RunResult r = run_cli("trace 3 5 --cost cli_cost_table.txt");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "cost[table]: 7")); // exchange step costs 5, final step 2
}

TEST_CASE("census reports exact counts in text and CSV form") {
    const RunResult text = run_cli("census --ensemble 1 -n 100");
    CHECK(text.code == 0);
    CHECK(contains(text.out, "ensemble=odd-coprime n=100 count=1003"));

    const RunResult threaded = run_cli("census --ensemble all -n 1000 --threads 2");
    CHECK(threaded.code == 0);
    CHECK(contains(threaded.out, "count=499500"));

    const RunResult csv = run_cli("census --ensemble odd -n 10 -n 100 --csv");
    CHECK(csv.code == 0);
    const auto lines = lines_of(csv.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "#brentlab-v1");
    CHECK(lines[1] == "ensemble,n,count,ratio,cost,mean,mean_over_logn,second_moment");
    CHECK(contains(lines[2], "odd,10,10,0.10000000000000001,,,,"));
    CHECK(contains(lines[3], "odd,100,1225,0.122"));
}

TEST_CASE("stats reproduces the exact means of the small odd ensemble") {
    const RunResult s = run_cli("stats --ensemble odd -n 5 --cost S --csv");
    CHECK(s.code == 0);
    CHECK(contains(s.out, "ensemble,n,count,ratio,cost,mean,mean_over_logn,second_moment"));
    CHECK(contains(s.out, "odd,5,3,0.1"));
    CHECK(contains(s.out, ",S,1.3333333333333333,"));

    const RunResult t = run_cli("stats --ensemble odd -n 5 --cost T");
    CHECK(t.code == 0);
    CHECK(contains(t.out, "mean=1.6666666666666667"));

    const RunResult e = run_cli("stats --ensemble odd -n 5 --cost E");
    CHECK(e.code == 0);
    CHECK(contains(e.out, "mean=0.33333333333333331"));
}

TEST_CASE("stats fits a slope over a ladder and samples with a seed") {
    const RunResult fit = run_cli("stats --ensemble odd -n 64 -n 128 -n 256 --fit");
    CHECK(fit.code == 0);
    CHECK(contains(fit.out, "#fit ensemble=odd cost=S slope="));

    const RunResult mc = run_cli("stats --ensemble all -n 4096 --samples 4000 --seed 9");
    CHECK(mc.code == 0);
    CHECK(contains(mc.out, "seed=9"));
    CHECK(contains(mc.out, "se="));

    const RunResult mc2 = run_cli("stats --ensemble all -n 4096 --samples 4000 --seed 9");
    CHECK(mc2.out == mc.out); // sampling is deterministic in the seed
}

TEST_CASE("density solves on a small grid and writes the table and the summary") {
    const RunResult r = run_cli("density --geometric 48 --uniform 48 --x-min 1e-13 "
                                "--csv cli_density.csv");
    CHECK(r.code == 0);

    const json j = json::parse(r.out);
    CHECK(j["grid"]["geometric"] == 48);
    CHECK(j["grid"]["uniform"] == 48);
    const double alpha = j["xi"]["alpha"];
    const double xi1 = j["xi"]["xi_at_one"];
    CHECK(alpha > 0.55);
    CHECK(alpha < 0.65);
    CHECK(xi1 > 0.35);
    CHECK(xi1 < 0.45);
    CHECK(double(j["xi"]["theta_hat"]) > 0.0);
    CHECK(double(j["xi"]["theta_hat"]) < 1.0);
    CHECK(double(j["F"]["F_at_one"]) == 1.0);
    CHECK(double(j["F"]["theta_hat"]) > 0.0);
    CHECK(double(j["F"]["theta_hat"]) < 1.0);

    const auto lines = lines_of(slurp("cli_density.csv"));
    REQUIRE(lines.size() == 98); // marker + header + 96 nodes
    CHECK(lines[0] == "#brentlab-v1");
    CHECK(lines[1] == "x,F,xi");
    CHECK(lines[2].rfind("1e-13,", 0) == 0);
    CHECK(lines[97].rfind("1,1,0.", 0) == 0); // F(1) = 1 exactly, xi(1) near 0.4
}

TEST_CASE("constants emits the full report as JSON") {
    const RunResult r = run_cli("constants --geometric 64 --uniform 64 --x-min 1e-13");
    CHECK(r.code == 0);

    const json j = json::parse(r.out);
    const double alpha = j["alpha"];
    const double mu_s = j["mu"]["subtractions"];
    const double mu_t = j["mu"]["divisions"];
    const double beta_tilde = j["beta"]["beta_tilde"];
    const double factor = j["exchange"]["factor_vs_subtractions"];
    CHECK(alpha > 0.58);
    CHECK(alpha < 0.61);
    CHECK(mu_s > 1.00);
    CHECK(mu_s < 1.04);
    CHECK(mu_t == doctest::Approx(2.0 * mu_s).epsilon(1e-10));
    CHECK(beta_tilde > 0.97);
    CHECK(beta_tilde < 0.99);
    CHECK(factor > 0.5);
    CHECK(factor < 0.6);
    const double lam_ref = j["lambda_s"]["reference"];
    const double lam_log1m = j["lambda_s"]["via_log1m"];
    CHECK(lam_log1m == doctest::Approx(lam_ref).epsilon(2e-3));
    CHECK(std::abs(double(j["stationarity_residuals"]["one"])) < 1e-4);
}

TEST_CASE("dirichlet checks the counting series against its closed form") {
    const RunResult odd = run_cli("dirichlet -s 2 --family odd --v-max 999");
    CHECK(odd.code == 0);
    const json j = json::parse(odd.out);
    CHECK(j["ok"] == true);
    const double value = j["value"];
    const double closed = j["closed_form"];
    const double residual = j["residual"];
    const double tail = j["tail_bound"];
    CHECK(value > 0.0185);
    CHECK(value < 0.0186);
    CHECK(closed == doctest::Approx(0.018560879330226472589).epsilon(1e-12));
    CHECK(residual >= -1e-12);
    CHECK(residual <= tail + 1e-12);

    const RunResult cop = run_cli("dirichlet -s 1.5 --family odd-coprime --v-max 4999");
    CHECK(cop.code == 0);
    CHECK(json::parse(cop.out)["ok"] == true);

    const RunResult weighted = run_cli("dirichlet -s 1.5 -p 1 --cost T --v-max 2001");
    CHECK(weighted.code == 0);
    const json w = json::parse(weighted.out);
    CHECK(double(w["value"]) > 0.0);
    CHECK(double(w["tail_bound"]) > 0.0);
    CHECK_FALSE(w.contains("ok")); // nothing to verify at p >= 1 without the identity

    const RunResult conv = run_cli("dirichlet -s 1.5 -p 0 --v-max 1501 --convolution");
    CHECK(conv.code == 0);
    const json cv = json::parse(conv.out);
    CHECK(cv["ok"] == true);
    CHECK(std::abs(double(cv["gap"])) <= double(cv["allowance"]));
}

TEST_CASE("verify-theta agrees with direct traces on a small range") {
    const RunResult r = run_cli("verify-theta -n 4 --v-max 300");
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["ok"] == true);
    CHECK(j["cost"] == "S");
    REQUIRE(j["levels"].size() == 5); // word lengths 0 through 4
    for (const auto& level : j["levels"]) {
        CHECK(level["match"] == true);
        CHECK(level["word_pairs"] == level["trace_pairs"]);
    }
    CHECK(j["mismatches"].empty());
}
