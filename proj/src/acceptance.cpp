#include "brentlab/acceptance.hpp"

#include "brentlab/constants.hpp"
#include "brentlab/density.hpp"
#include "brentlab/dirichlet.hpp"
#include "brentlab/ensembles.hpp"
#include "brentlab/gcd.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>

namespace brentlab {

namespace {

constexpr double xi1_ref = 0.3979226811883166440767071611426549823098;
constexpr double mu_s_ref = 1.018501215761436717;
constexpr double mu_t_ref = 2.037002431522873434;
constexpr double inv_pi_sq = 0.10132118364233777144;

using Clock = std::chrono::steady_clock;

double lap(Clock::time_point& mark) {
    const Clock::time_point now = Clock::now();
    const double dt = std::chrono::duration<double>(now - mark).count();
    mark = now;
    return dt;
}

std::string text(const char* fmt, ...) {
    char buf[768];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

double rel_err(double value, double target) {
    return std::abs(value - target) / std::abs(target);
}

/// Largest pairwise relative spread of a handful of values.
double spread(std::initializer_list<double> values) {
    double lo = *values.begin();
    double hi = lo;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return (hi - lo) / std::abs(hi);
}

} // namespace

std::vector<CriterionOutcome> run_acceptance(unsigned threads) {
    std::vector<CriterionOutcome> out;
    Clock::time_point mark = Clock::now();

    // 1. Default-grid density solve: accuracy and budget.
    const XiSolution xs = solve_xi();
    {
        const double dt = lap(mark);
        const double rel = rel_err(xs.xi.xi_at_one(), xi1_ref);
        const bool pass = rel <= 5e-6 && dt < 120.0;
        out.push_back({1, "density solve accuracy and budget", pass,
                       text("xi(1) = %.17g, rel err %.3g (tol 5e-6), %u iterations, "
                            "theta_hat %.3f, %.2fs (limit 120s)",
                            xs.xi.xi_at_one(), rel, xs.iterations, xs.theta_hat, dt),
                       dt});
    }

    // 2. The distribution's derivative reproduces the density.
    const FSolution fs = solve_F();
    {
        const double h = 1e-6;
        double worst = 0.0;
        for (double x : {0.25, 0.5, 0.75}) {
            const double d = (fs.F(x + h) - fs.F(x - h)) / (2.0 * h);
            worst = std::max(worst, rel_err(d, xs.xi(x)));
        }
        const double d1 = (fs.F(1.0) - fs.F(1.0 - h)) / h;
        worst = std::max(worst, rel_err(d1, xs.xi(1.0)));
        const double dt = lap(mark);
        const bool pass = worst <= 1e-4;
        out.push_back({2, "distribution derivative matches the density", pass,
                       text("worst rel err %.3g at x in {1/4, 1/2, 3/4, 1} (tol 1e-4), "
                            "interpolant slope at 1 off by %.3g",
                            worst, rel_err(fs.derivative_at_one, xs.xi.xi_at_one())),
                       dt});
    }

    // 3. Step-constant routes agree; exchange-constant forms agree.
    const ExchangeConstant exch = exchange_constant(xs.xi);
    {
        const LambdaS l = lambda_s_three_ways(xs.xi);
        const double lam_spread = spread(
            {l.via_branch_split, l.via_kernel, l.via_log1m, l.reference});
        const double exch_gap =
            std::abs(exch.from_branch_sum - exch.from_interval_masses);
        const double dt = lap(mark);
        const bool pass = lam_spread <= 1e-5 && exch_gap <= 1e-8;
        out.push_back({3, "step-constant routes agree", pass,
                       text("lambda_s route spread %.3g (tol 1e-5) around %.12g; "
                            "exchange forms differ by %.3g (tol 1e-8)",
                            lam_spread, l.via_log1m, exch_gap),
                       dt});
    }

    // 4. Reciprocal-throughput identity across four routes.
    {
        const BetaConstants b = beta_constants(fs.F, xs.xi);
        const double mu_s = mu_of_cost(xs.xi, CostFunction::subtractions());
        const double sp = spread(
            {1.0 / b.beta, 1.0 / b.beta_tilde, 1.0 / b.beta_knuth, mu_s});
        const double dt = lap(mark);
        const bool pass = sp <= 1e-5;
        out.push_back({4, "reciprocal throughput identity", pass,
                       text("spread of {1/beta, 1/beta~, 1/beta_K, mu} = %.3g "
                            "(tol 1e-5), mu = %.12g",
                            sp, mu_s),
                       dt});
    }

    // 5. Exact-enumeration ladder: mean-cost slopes against the constants,
    //    plus concentration of the second moment.
    {
        const std::vector<std::uint64_t> ladder = {1u << 10, 1u << 11, 1u << 12,
                                                   1u << 13, 1u << 14, 1u << 15};
        std::vector<SweepResult> sweeps;
        sweeps.reserve(ladder.size());
        for (std::uint64_t n : ladder)
            sweeps.push_back(ensemble_sweep(n, threads));

        auto slope_of = [&](Ensemble e, int cost_idx) {
            std::vector<std::pair<double, double>> pts;
            for (const SweepResult& s : sweeps) {
                const EnsembleStats& st =
                    s.stats[static_cast<int>(e) - 1][cost_idx];
                pts.emplace_back(std::log(static_cast<double>(s.n)), st.mean());
            }
            return fit_line(pts).slope;
        };

        const double s2 = slope_of(Ensemble::Odd, 0);
        const double t2 = slope_of(Ensemble::Odd, 1);
        const double e2 = slope_of(Ensemble::Odd, 2);
        const double s1 = slope_of(Ensemble::OddCoprime, 0);
        const double s3 = slope_of(Ensemble::Coprime, 0);
        const double s4 = slope_of(Ensemble::All, 0);

        bool pass = rel_err(s2, mu_s_ref) <= 0.02 &&
                    rel_err(t2, mu_t_ref) <= 0.02 &&
                    rel_err(e2, exch.from_branch_sum) <= 0.03 &&
                    rel_err(s1, mu_s_ref) <= 0.03 &&
                    rel_err(s3, mu_s_ref) <= 0.03 &&
                    rel_err(s4, mu_s_ref) <= 0.03;

        // Concentration: E[c^2]/E[c]^2 of the subtraction count over odd
        // pairs falls monotonically along the ladder into [1, 1.10].
        double prev = 1e9;
        double last = 0.0;
        bool concentrated = true;
        for (std::size_t i = 0; i < sweeps.size(); ++i) {
            const EnsembleStats& st =
                sweeps[i].stats[static_cast<int>(Ensemble::Odd) - 1][0];
            const double ratio = st.second_moment() / (st.mean() * st.mean());
            concentrated = concentrated && ratio < prev;
            if (ladder[i] >= (1u << 13))
                concentrated = concentrated && ratio >= 1.0 && ratio <= 1.10;
            prev = ratio;
            last = ratio;
        }
        pass = pass && concentrated;

        const double dt = lap(mark);
        pass = pass && dt < 300.0;
        out.push_back(
            {5, "ladder slopes match the constants", pass,
             text("slopes S %.5f (ref %.5f, tol 2%%), T %.5f (ref %.5f, 2%%), "
                  "E %.5f (ref %.5f, 3%%); families S %.5f/%.5f/%.5f (3%%); "
                  "second-moment ratio ends at %.4f %s; %.1fs (limit 300s)",
                  s2, mu_s_ref, t2, mu_t_ref, e2, exch.from_branch_sum, s1, s3,
                  s4, last, concentrated ? "monotone into [1,1.10]" : "NOT monotone",
                  dt),
             dt});
    }

    // 6. Census densities at n = 1e5.
    {
        const CensusResult c1 = ensemble_census(Ensemble::OddCoprime, 100000, threads);
        const CensusResult c2 = ensemble_census(Ensemble::Odd, 100000, threads);
        const double r1 = rel_err(c1.ratio, inv_pi_sq);
        const double r2 = rel_err(c2.ratio, 0.125);
        const double dt = lap(mark);
        const bool pass = r1 <= 0.005 && r2 <= 0.005;
        out.push_back({6, "pair-count densities at n = 1e5", pass,
                       text("odd-coprime ratio %.10f vs 1/pi^2 (rel %.3g, tol 0.5%%); "
                            "odd ratio %.10f vs 1/8 (rel %.3g, tol 0.5%%)",
                            c1.ratio, r1, c2.ratio, r2),
                       dt});
    }

    // 7. Branch words reproduce the traces, with exact determinants.
    {
        const ThetaReport tr = verify_theta(6, 500, CostFunction::subtractions());
        bool levels_ok = tr.ok && tr.mismatches.empty();
        std::uint64_t words = 0;
        for (const ThetaLevel& lv : tr.levels) {
            levels_ok = levels_ok && lv.match && lv.word_pairs == lv.trace_pairs;
            words += lv.word_pairs;
        }
        const double dt = lap(mark);
        out.push_back({7, "branch words reproduce the traces", levels_ok,
                       text("levels 0..6 below v = 500: %llu pairs matched "
                            "per level, %zu mismatches",
                            static_cast<unsigned long long>(words),
                            tr.mismatches.size()),
                       dt});
    }

    // 8. Dirichlet truncations against closed forms; convolution identity.
    {
        bool pass = true;
        double worst_ratio = 0.0;
        for (double s : {1.5, 2.0})
            for (Ensemble family : {Ensemble::OddCoprime, Ensemble::Odd}) {
                const NumTheoryCheck nt = verify_numthy(s, family, 1000000, threads);
                pass = pass && nt.ok;
                if (nt.tail_bound > 0.0)
                    worst_ratio = std::max(worst_ratio, nt.residual / nt.tail_bound);
            }
        const ConvolutionCheck c0 =
            verify_convolution(1.5, 0, CostFunction::subtractions(), 20001, threads);
        const ConvolutionCheck c1 =
            verify_convolution(1.5, 1, CostFunction::subtractions(), 20001, threads);
        pass = pass && c0.ok && c1.ok;
        const double dt = lap(mark);
        out.push_back({8, "series truncations and convolution identity", pass,
                       text("residual/tail worst %.3f over s in {1.5, 2} at v <= 1e6; "
                            "convolution gaps %.3g (p=0), %.3g (p=1) within %.3g/%.3g",
                            worst_ratio, std::abs(c0.odd_side - c0.coprime_side),
                            std::abs(c1.odd_side - c1.coprime_side), c0.allowance,
                            c1.allowance),
                       dt});
    }

    // 9. Structural property bundle.
    {
        bool pass = true;
        std::string notes;

        // Mass preservation of one operator application on the uniform start.
        {
            const GridSpec spec{};
            const std::size_t nodes = spec.geometric + spec.uniform;
            const SingularDensity uniform(spec, 0.0, std::vector<double>(nodes, 1.0));
            const TransferResult t = apply_transfer(uniform);
            const SingularDensity mapped(spec, t.alpha, t.chi);
            const double drift = std::abs(total_mass(mapped) - total_mass(uniform));
            pass = pass && drift <= 1e-8;
            notes += text("mass drift %.3g (tol 1e-8); ", drift);
        }

        // Distribution shape: starts at 0, ends exactly at 1, nondecreasing.
        {
            const std::vector<double>& v = fs.F.values();
            bool shape = v.front() >= 0.0 && v.back() == 1.0;
            for (std::size_t i = 1; i < v.size(); ++i)
                shape = shape && v[i] >= v[i - 1];
            pass = pass && shape;
            notes += text("F shape %s; ", shape ? "ok" : "violated");
        }

        // Density positivity across the grid.
        {
            bool positive = true;
            for (double x : xs.xi.nodes())
                positive = positive && xs.xi(x) > 0.0;
            pass = pass && positive;
            notes += text("xi positivity %s; ", positive ? "ok" : "violated");
        }

        // Contraction estimates sit strictly inside (0, 1).
        {
            const bool contr = xs.theta_hat > 0.0 && xs.theta_hat < 1.0 &&
                               fs.theta_hat > 0.0 && fs.theta_hat < 1.0;
            pass = pass && contr;
            notes += text("theta_hat %.3f/%.3f; ", xs.theta_hat, fs.theta_hat);
        }

        // Singularity coefficient identity on the default grid.
        {
            const double gap = std::abs(xs.xi.alpha() - 1.5 * xs.xi.xi_at_one());
            pass = pass && gap <= 1e-11;
            notes += text("alpha identity gap %.3g (tol 1e-11); ", gap);
        }

        // Mean-cost linearity in the cost table.
        {
            const CostFunction combo = CostFunction::from_table(
                "# cost-table C=5 extend=const\n"
                "1 1 5\n"
                "2 1 2\n");
            const double direct = mu_of_cost(xs.xi, combo);
            const double mixed = 2.0 * mu_of_cost(xs.xi, CostFunction::subtractions()) +
                                 3.0 * mu_of_cost(xs.xi, CostFunction::exchanges());
            const double gap = std::abs(direct - mixed);
            pass = pass && gap <= 1e-12;
            notes += text("mu linearity gap %.3g (tol 1e-12); ", gap);
        }

        // The divide-free gcd agrees with the library gcd.
        {
            bool same = true;
            for (std::uint64_t u = 1; u <= 256 && same; ++u)
                for (std::uint64_t v = u; v <= 256 && same; ++v)
                    same = binary_gcd(u, v) == std::gcd(u, v);
            pass = pass && same;
            notes += text("gcd oracle %s", same ? "ok" : "violated");
        }

        const double dt = lap(mark);
        out.push_back({9, "structural property bundle", pass, notes, dt});
    }

    return out;
}

} // namespace brentlab
