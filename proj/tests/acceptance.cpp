// Acceptance gate: ten go/no-go checks of the numerical contracts, each with
// its own runtime budget. Prints one PASS/FAIL line per criterion and exits
// with the number of failures.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kobmetric/chains.hpp"
#include "kobmetric/dbar.hpp"
#include "kobmetric/harness.hpp"
#include "kobmetric/invariants.hpp"
#include "kobmetric/metrics.hpp"
#include "kobmetric/serialize.hpp"

using namespace kobmetric;

namespace {

double urand(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

cplx crand(std::mt19937_64& g) { return cplx(2.0 * urand(g) - 1.0, 2.0 * urand(g) - 1.0); }

Point random_interior(const DomainSpec& domain, std::mt19937_64& g, double cap) {
    const int n = domain.dimension();
    for (;;) {
        Point z(n);
        for (cplx& c : z) c = crand(g);
        if (domain.gauge(z) <= cap) return z;
    }
}

Direction random_direction(int n, std::mt19937_64& g) {
    for (;;) {
        Direction d(n);
        for (cplx& c : d) c = crand(g);
        const double nn = euclid_norm(d);
        if (nn > 0.1) return scaled(d, 1.0 / nn);
    }
}

double ball_distance(const Point& P, const Point& Q) {
    const double num = (1.0 - norm_sq(P)) * (1.0 - norm_sq(Q));
    const double den = std::norm(cplx(1.0, 0.0) - hermitian_dot(Q, P));
    const double t2 = std::max(0.0, 1.0 - num / den);
    return std::atanh(std::sqrt(t2));
}

struct Criterion {
    std::string label;
    double seconds_budget;
    std::function<bool(std::string&)> run;
};

// --- 1: ball exactness -------------------------------------------------------

bool ball_exactness(std::string& note) {
    double worst = 0.0;
    for (int n : {2, 3}) {
        const DomainSpec ball = DomainSpec::ball(n);
        std::mt19937_64 g(1000 + static_cast<std::uint64_t>(n));
        for (int q = 0; q < 20; ++q) {
            MetricQuery query{random_interior(ball, g, 0.7), random_direction(n, g)};
            const double exact = kobayashi_exact_model(ball, query).value;
            OptimizerBudget budget;
            budget.seed = derive_seed(1, static_cast<std::uint64_t>(20 * n + q));
            const double up = kobayashi_upper(ball, query, budget).value;
            const double low = caratheodory_lower(ball, query, budget).value;
            worst = std::max({worst, std::abs(up / exact - 1.0), std::abs(low / exact - 1.0)});
        }
    }
    note = "worst relative deviation " + format_number(worst);
    return worst <= 0.02;
}

// --- 2: ball quotient --------------------------------------------------------

bool ball_quotient(std::string& note) {
    const DomainSpec ball = DomainSpec::ball(2);
    std::mt19937_64 g(2002);
    double worst = 0.0;
    bool witnesses = true;
    for (int q = 0; q < 10; ++q) {
        OptimizerBudget budget;
        budget.seed = derive_seed(2, static_cast<std::uint64_t>(q));
        const VolumeInvariantEstimate est =
            quotient_upper(ball, random_interior(ball, g, 0.8), budget);
        worst = std::max(worst, est.m_upper);
        witnesses = witnesses && est.exact && est.c_witness.family == "ball-automorphism";
    }
    note = "max quotient bound " + format_number(worst);
    return witnesses && worst <= 1.0 + 1e-6;
}

// --- 3: egg center defect ----------------------------------------------------

bool egg_center(std::string& note) {
    const double pinned = 1.2408065;  // diagonal brute-force oracle, frozen
    const VolumeInvariantEstimate est = circular_center_exact(DomainSpec::egg({1, 2}));
    note = "M(0) = " + format_number(est.m_upper);
    return est.m_upper >= 1.05 && std::abs(est.m_upper / pinned - 1.0) <= 0.005 && est.exact;
}

// --- 4: thin-neck sweep ------------------------------------------------------

bool lempert_sweep(std::string& note) {
    double prev = -1.0;
    double gap9 = -1.0;
    for (int k = 2; k <= 12; ++k) {
        const double eps = std::pow(2.0, -k);
        const LempertLowerBound lower = lempert_lower_bound(eps);
        OptimizerBudget budget;
        budget.seed = derive_seed(4, static_cast<std::uint64_t>(k));
        const auto leg = one_disc_distance_upper(DomainSpec::lempert(eps), Point{cplx(1), cplx(0)},
                                                 Point{cplx(0), cplx(1)}, budget);
        if (!leg) {
            note = "no feasible disc at k = " + std::to_string(k);
            return false;
        }
        if (lower.distance_lower > leg->distance_upper + 1e-12) {
            note = "bracket inverted at k = " + std::to_string(k);
            return false;
        }
        if (lower.distance_lower <= prev) {
            note = "lower bound not strictly increasing at k = " + std::to_string(k);
            return false;
        }
        prev = lower.distance_lower;
        if (k == 9) gap9 = std::abs(lower.distance_lower - std::atanh(0.5));
    }
    note = "k=9 identity gap " + format_number(gap9);
    return gap9 <= 1e-12;
}

// --- 5: anisotropy ratio -----------------------------------------------------

bool anisotropy(std::string& note) {
    double worst = 0.0;
    for (double N : {4.0, 16.0}) {
        const DomainSpec sb = DomainSpec::stretched_ball(N);
        OptimizerBudget budget;
        budget.seed = derive_seed(5, static_cast<std::uint64_t>(N));
        const Point center{cplx(0), cplx(0)};
        const double f1 =
            kobayashi_upper(sb, MetricQuery{center, Direction{cplx(1), cplx(0)}}, budget).value;
        const double f2 =
            kobayashi_upper(sb, MetricQuery{center, Direction{cplx(0), cplx(1)}}, budget).value;
        worst = std::max(worst, std::abs(f1 / f2 / N - 1.0));
    }
    note = "worst ratio deviation " + format_number(worst);
    return worst <= 0.02;
}

// --- 6: egg two-sided comparability ------------------------------------------

bool egg_comparability(std::string& note) {
    const DomainSpec egg = DomainSpec::egg({1, 2});
    double lo = 1e9, hi = 0.0;
    std::vector<double> alphas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99};
    int index = 0;
    for (double alpha : alphas) {
        const Point P{cplx(alpha), cplx(0)};
        for (const Direction& xi : {Direction{cplx(1), cplx(0)}, Direction{cplx(0), cplx(1)}}) {
            OptimizerBudget budget;
            budget.seed = derive_seed(6, static_cast<std::uint64_t>(index++));
            const MetricQuery q{P, xi};
            const double up = kobayashi_upper(egg, q, budget).value;
            const double low = caratheodory_lower(egg, q, budget).value;
            const double ratio = up / low;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    note = "ratio range [" + format_number(lo) + ", " + format_number(hi) + "]";
    return lo >= 1.0 - 1e-9 && hi <= 3.0;
}

// --- 7: chain collapse -------------------------------------------------------

bool chain_collapse(std::string& note) {
    const DomainSpec ball = DomainSpec::ball(2);
    std::mt19937_64 g(2024);
    double worst = 0.0;
    for (int instance = 0; instance < 5; ++instance) {
        Point P = random_interior(ball, g, 0.75);
        Point Q = random_interior(ball, g, 0.75);
        while (euclid_norm(subtracted(Q, P)) < 0.3) Q = random_interior(ball, g, 0.75);
        OptimizerBudget budget;
        budget.seed = derive_seed(7, static_cast<std::uint64_t>(instance));
        const ChainPath chain = chain_distance_upper(ball, P, Q, 4, budget);
        const ChainPath shortened = shorten_chain(ball, chain, 0.35, 0.3, budget);
        if (shortened.legs.size() != 1) {
            note = "instance " + std::to_string(instance) + " kept " +
                   std::to_string(shortened.legs.size()) + " legs";
            return false;
        }
        const double ref = ball_distance(P, Q);
        worst = std::max(worst, std::abs(shortened.total / ref - 1.0));
    }
    note = "worst relative gap " + format_number(worst);
    return worst <= 0.01;
}

// --- 8: dbar solver ----------------------------------------------------------

bool dbar_solver(std::string& note) {
    const auto psi = [](cplx z) { return z + 0.5 * z * z; };
    const cplx rot(0.0, 1.0);
    const CutoffSpec gamma = build_cutoff(cplx(0), 0.25);

    double res256 = 0.0, res512 = 0.0;
    for (int n : {256, 512}) {
        const GridSpec grid = GridSpec::centered(cplx(0), 1.0, n);
        const GridField tau = correction_rhs(psi, rot, gamma, grid);
        const double res = dbar_residual(cauchy_solve(tau), tau);
        (n == 256 ? res256 : res512) = res;
    }
    if (res256 > 0.02) {
        note = "residual at 256^2 is " + format_number(res256);
        return false;
    }
    if (res512 > 0.375 * res256) {  // quadratic halving within a factor 1.5
        note = "residual ratio " + format_number(res512 / res256) + " exceeds 0.375";
        return false;
    }

    const CorrectionScalingReport moving = correction_scaling_experiment(
        GridSpec::centered(cplx(0), 1.0, 768), psi, rot, {0.2, 0.1, 0.05});
    if (moving.fitted_slope < 1.0) {
        note = "fitted slope " + format_number(moving.fitted_slope) + " below 1";
        return false;
    }

    const CorrectionScalingReport frozen = correction_scaling_experiment(
        GridSpec::centered(cplx(0), 1.0, 256), psi, cplx(1.0, 0.0), {0.4, 0.3, 0.2});
    for (const CorrectionScalingRow& row : frozen.rows)
        if (row.sup_u != 0.0) {
            note = "identity rotation leaked a correction";
            return false;
        }
    if (frozen.fitted_slope != 0.0) {
        note = "identity rotation produced a slope";
        return false;
    }
    note = "residuals " + format_number(res256) + " -> " + format_number(res512) + ", slope " +
           format_number(moving.fitted_slope);
    return true;
}

// --- 9: averaging operator ---------------------------------------------------

bool averaging(std::string& note) {
    std::mt19937_64 g(909);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        PolyMap2 map;
        for (int j = 0; j < 2; ++j) {
            map.coefficients[j].assign(6, std::vector<cplx>(6));
            for (auto& row : map.coefficients[j])
                for (cplx& c : row) c = crand(g);
            map.coefficients[j][0][0] = 0.0;  // fixes the origin
        }
        const std::array<cplx, 2> avg = circular_average(map);
        worst = std::max({worst, std::abs(avg[0] - map.coefficients[0][1][0]),
                          std::abs(avg[1] - map.coefficients[1][0][1])});
    }
    note = "worst extraction error " + format_number(worst);
    return worst <= 1e-10;
}

// --- 10: determinism ---------------------------------------------------------

bool determinism(std::string& note) {
    const ExperimentKind kinds[] = {
        ExperimentKind::BallValidation, ExperimentKind::EggReport,
        ExperimentKind::LempertSweep,   ExperimentKind::Anisotropy,
        ExperimentKind::QuotientScan,   ExperimentKind::ChainDemo,
        ExperimentKind::DbarScaling,    ExperimentKind::StabilitySweep,
    };
    for (ExperimentKind kind : kinds) {
        ExperimentConfig config;
        config.experiment = kind;
        config.budget.max_iterations = 200;
        config.budget.restarts = 3;
        config.budget.degree = 8;
        config.seed = 7;
        const ExperimentResult first = run_experiment(config);
        const ExperimentResult second = run_experiment(config);
        if (to_csv(first.table) != to_csv(second.table) ||
            to_json(first.table) != to_json(second.table)) {
            note = std::string("experiment ") + experiment_name(kind) + " not reproducible";
            return false;
        }
        if (first.failures != second.failures) {
            note = std::string("experiment ") + experiment_name(kind) + " failure count drifted";
            return false;
        }
    }
    note = "all 8 experiments byte-identical across repeated runs";
    return true;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"ball exactness: upper and lower metric engines within 2% at 40 seeded queries", 60.0,
         ball_exactness},
        {"ball quotient bound <= 1 + 1e-6 at 10 random points, automorphism witnesses", 30.0,
         ball_quotient},
        {"egg center defect M(0) >= 1.05, within 0.5% of the pinned oracle", 120.0, egg_center},
        {"thin-neck sweep k = 2..12: bracket order, strict growth, k = 9 identity", 600.0,
         lempert_sweep},
        {"stretched-ball anisotropy ratio equals N within 2% for N in {4, 16}", 30.0, anisotropy},
        {"egg comparability: upper/lower ratio in [1 - 1e-9, 3] on both directions", 300.0,
         egg_comparability},
        {"chain collapse: 5 seeded 4-leg chains shorten to one leg within 1%", 300.0,
         chain_collapse},
        {"dbar solver: 2% residual, quadratic halving, slope >= 1, exact identity zero", 120.0,
         dbar_solver},
        {"circular average matches symbolic extraction on 20 random maps to 1e-10", 5.0,
         averaging},
        {"determinism: byte-identical reports for every experiment at a fixed seed", 900.0,
         determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& c = criteria[i];
        std::string note;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = c.run(note);
        } catch (const std::exception& err) {
            ok = false;
            note = std::string("exception: ") + err.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > c.seconds_budget) {
            ok = false;
            note += (note.empty() ? "" : "; ") + std::string("over time budget");
        }
        if (!ok) ++failures;
        std::printf("[%s] %2zu. %s  (%.1fs / %.0fs)%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                    c.label.c_str(), elapsed, c.seconds_budget, note.empty() ? "" : " -- ",
                    note.c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
                criteria.size());
    return failures;
}
