#include "kobmetric/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kobmetric/chains.hpp"
#include "kobmetric/dbar.hpp"
#include "kobmetric/invariants.hpp"
#include "kobmetric/metrics.hpp"
#include "rng_util.hpp"

namespace kobmetric {

namespace {

constexpr const char* kNames[] = {"ball-validation", "egg-report",   "lempert-sweep",
                                  "anisotropy",      "quotient-scan", "chain-demo",
                                  "dbar-scaling",    "stability-sweep"};

void push_row(ReportTable& table, std::vector<Cell> cells) {
    if (cells.size() != table.columns.size()) {
        throw std::logic_error("push_row: width mismatch");
    }
    ResultRow row;
    row.cells = std::move(cells);
    table.rows.push_back(std::move(row));
}

std::string bound_kind_name(BoundKind kind) {
    switch (kind) {
        case BoundKind::Upper: return "upper";
        case BoundKind::Lower: return "lower";
        case BoundKind::Exact: return "exact";
    }
    return "unknown";
}

OptimizerBudget row_budget(const ExperimentConfig& config, std::uint64_t row) {
    OptimizerBudget budget = config.budget;
    budget.seed = derive_seed(config.seed, row);
    return budget;
}

// Uniform-ish random interior point with Minkowski gauge at most `cap`:
// random direction by a complex-gaussian draw, radius by the 2n-dimensional
// volume rule.
Point random_interior(std::mt19937_64& rng, const DomainSpec& domain, double cap) {
    const int n = domain.dimension();
    for (;;) {
        Point g = detail::gaussian_point(rng, n);
        const double mu = domain.gauge(g);
        if (!(mu > 1e-12)) continue;
        const double t = cap * std::pow(detail::uniform01(rng), 1.0 / (2.0 * n));
        return scaled(g, t / mu);
    }
}

Direction random_direction(std::mt19937_64& rng, int n) {
    for (;;) {
        Direction d = detail::gaussian_point(rng, n);
        const double norm = euclid_norm(d);
        if (norm > 1e-9) return scaled(d, 1.0 / norm);
    }
}

// Ball distance artanh |phi_P(Q)| via the automorphism-invariance closed form
// 1 - |phi_P(Q)|^2 = (1-|P|^2)(1-|Q|^2) / |1 - <Q,P>|^2.
double ball_distance(const Point& P, const Point& Q) {
    const double num = (1.0 - norm_sq(P)) * (1.0 - norm_sq(Q));
    const double den = std::norm(cplx(1.0, 0.0) - hermitian_dot(Q, P));
    const double m = std::sqrt(std::max(0.0, 1.0 - num / den));
    return std::atanh(std::min(m, 1.0 - 1e-16));
}

const DomainSpec& require_kind(const ExperimentConfig& config, const DomainSpec& fallback,
                               std::initializer_list<DomainKind> allowed, const char* what) {
    const DomainSpec& domain = config.domain ? *config.domain : fallback;
    if (std::find(allowed.begin(), allowed.end(), domain.kind()) == allowed.end()) {
        throw std::invalid_argument(std::string(what) + ": domain kind " +
                                    kind_name(domain.kind()) + " is not supported here");
    }
    return domain;
}

// ---------------------------------------------------------------- experiments

void run_ball_validation(const ExperimentConfig& config, ReportTable& table, int& failures) {
    table.columns = {"row",       "quantity",  "method", "bound_kind", "value",
                     "reference", "rel_error", "pass",   "status"};
    static const DomainSpec fallback = DomainSpec::ball(2);
    const DomainSpec& domain = require_kind(config, fallback, {DomainKind::Ball}, kNames[0]);

    double row_index = 0.0;
    for (int i = 0; i < 10; ++i) {
        const OptimizerBudget budget = row_budget(config, static_cast<std::uint64_t>(i));
        std::mt19937_64 rng(budget.seed);
        const Point z = random_interior(rng, domain, 0.7);
        const Direction xi = random_direction(rng, domain.dimension());
        const MetricQuery q{z, xi};
        const double exact = kobayashi_exact_model(domain, q).value;
        try {
            const MetricBound up = kobayashi_upper(domain, q, budget);
            const double rel = (up.value - exact) / exact;
            push_row(table, {row_index, "kobayashi", up.method, bound_kind_name(up.kind), up.value,
                             exact, rel, std::abs(rel) <= 0.02 ? 1.0 : 0.0, "ok"});
        } catch (const std::exception& err) {
            ++failures;
            push_row(table, {row_index, "kobayashi", "", "upper", 0.0, exact, 0.0, 0.0,
                             std::string("error: ") + err.what()});
        }
        row_index += 1.0;
        try {
            const MetricBound low = caratheodory_lower(domain, q, budget);
            const double rel = (low.value - exact) / exact;
            push_row(table, {row_index, "caratheodory", low.method, bound_kind_name(low.kind),
                             low.value, exact, rel, std::abs(rel) <= 0.02 ? 1.0 : 0.0, "ok"});
        } catch (const std::exception& err) {
            ++failures;
            push_row(table, {row_index, "caratheodory", "", "lower", 0.0, exact, 0.0, 0.0,
                             std::string("error: ") + err.what()});
        }
        row_index += 1.0;
    }
    for (int i = 10; i < 12; ++i) {
        const OptimizerBudget budget = row_budget(config, static_cast<std::uint64_t>(i));
        std::mt19937_64 rng(budget.seed);
        const Point z = random_interior(rng, domain, 0.7);
        try {
            const VolumeInvariantEstimate est = quotient_upper(domain, z, budget);
            push_row(table, {row_index, "quotient", est.method, "upper", est.m_upper, 1.0,
                             est.m_upper - 1.0, est.m_upper <= 1.0 + 1e-6 ? 1.0 : 0.0, "ok"});
        } catch (const std::exception& err) {
            ++failures;
            push_row(table, {row_index, "quotient", "", "upper", 0.0, 1.0, 0.0, 0.0,
                             std::string("error: ") + err.what()});
        }
        row_index += 1.0;
    }
}

void run_egg_report(const ExperimentConfig& config, ReportTable& table, int& failures) {
    table.columns = {"record", "alpha",  "direction",  "upper", "lower",
                     "ratio",  "method", "bound_kind", "pass",  "status"};
    static const DomainSpec fallback = DomainSpec::egg({1, 2});
    const DomainSpec& domain = require_kind(config, fallback, {DomainKind::Egg}, kNames[1]);
    if (domain.dimension() != 2) {
        throw std::invalid_argument("egg-report: needs a two-dimensional egg");
    }

    try {
        const VolumeInvariantEstimate center = circular_center_exact(domain);
        push_row(table, {"center-invariant", 0.0, "", center.m_upper, center.m_lower,
                         center.m_upper, center.method, "two-sided",
                         center.m_upper + 1e-12 >= center.m_lower ? 1.0 : 0.0, "ok"});
    } catch (const std::exception& err) {
        ++failures;
        push_row(table, {"center-invariant", 0.0, "", 0.0, 0.0, 0.0, "", "two-sided", 0.0,
                         std::string("error: ") + err.what()});
    }

    std::uint64_t row = 1;
    for (int ia = 0; ia <= 10; ++ia) {
        const double alpha = ia == 10 ? 0.99 : 0.1 * ia;
        for (int dir = 0; dir < 2; ++dir) {
            const std::string name = dir == 0 ? "normal" : "tangential";
            const OptimizerBudget budget = row_budget(config, row++);
            const Point z{cplx(alpha, 0.0), cplx(0.0, 0.0)};
            const Direction xi =
                dir == 0 ? Direction{1.0, 0.0} : Direction{cplx(0.0, 0.0), cplx(1.0, 0.0)};
            try {
                const MetricBound up = kobayashi_upper(domain, {z, xi}, budget);
                const MetricBound low = caratheodory_lower(domain, {z, xi}, budget);
                const double ratio = up.value / low.value;
                push_row(table,
                         {"direction-ratio", alpha, name, up.value, low.value, ratio,
                          up.method + "/" + low.method, "two-sided",
                          ratio >= 1.0 - 1e-9 && ratio <= 3.0 ? 1.0 : 0.0, "ok"});
            } catch (const std::exception& err) {
                ++failures;
                push_row(table, {"direction-ratio", alpha, name, 0.0, 0.0, 0.0, "", "two-sided",
                                 0.0, std::string("error: ") + err.what()});
            }
        }
    }
}

void run_lempert_sweep(const ExperimentConfig& config, ReportTable& table, int& failures) {
    table.columns = {"k",    "epsilon", "r_min",  "lower",      "upper", "node",
                     "degree", "gap",   "method", "bound_kind", "pass",  "status"};
    if (config.domain && config.domain->kind() != DomainKind::Lempert) {
        throw std::invalid_argument("lempert-sweep: domain must be the lempert kind");
    }
    const Point P{cplx(1.0, 0.0), cplx(0.0, 0.0)};
    const Point Q{cplx(0.0, 0.0), cplx(1.0, 0.0)};
    for (int k = 2; k <= 12; ++k) {
        const double eps = std::ldexp(1.0, -k);
        const OptimizerBudget budget = row_budget(config, static_cast<std::uint64_t>(k));
        try {
            const DomainSpec domain = DomainSpec::lempert(eps);
            const LempertLowerBound lower = lempert_lower_bound(eps);
            const auto upper = one_disc_distance_upper(domain, P, Q, budget);
            if (!upper) throw std::runtime_error("no feasible one-disc witness");
            push_row(table,
                     {static_cast<double>(k), eps, lower.r_min, lower.distance_lower,
                      upper->distance_upper, upper->node.parameter.real(),
                      static_cast<double>(upper->disc.degree()),
                      upper->distance_upper - lower.distance_lower, "harnack/outer-construction",
                      "two-sided",
                      lower.distance_lower <= upper->distance_upper + 1e-12 ? 1.0 : 0.0, "ok"});
        } catch (const std::exception& err) {
            ++failures;
            push_row(table, {static_cast<double>(k), eps, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, "",
                             "two-sided", 0.0, std::string("error: ") + err.what()});
        }
    }
}

void run_anisotropy(const ExperimentConfig& config, ReportTable& table, int& failures) {
    table.columns = {"record", "value", "reference", "rel_error",
                     "method", "bound_kind", "pass",  "status"};
    static const DomainSpec fallback = DomainSpec::stretched_ball(4.0);
    const DomainSpec& domain =
        require_kind(config, fallback, {DomainKind::StretchedBall}, kNames[3]);
    const double N = domain.stretch();
    const Point center{cplx(0.0, 0.0), cplx(0.0, 0.0)};
    const Direction e1{cplx(1.0, 0.0), cplx(0.0, 0.0)};
    const Direction e2{cplx(0.0, 0.0), cplx(1.0, 0.0)};
    double v1 = 0.0, v2 = 0.0;
    bool have = true;
    for (int dir = 0; dir < 2; ++dir) {
        const OptimizerBudget budget = row_budget(config, static_cast<std::uint64_t>(dir));
        const MetricQuery q{center, dir == 0 ? e1 : e2};
        const double exact = dir == 0 ? 1.0 : 1.0 / N;
        try {
            const MetricBound up = kobayashi_upper(domain, q, budget);
            (dir == 0 ? v1 : v2) = up.value;
            const double rel = (up.value - exact) / exact;
            push_row(table, {dir == 0 ? "metric-e1" : "metric-e2", up.value, exact, rel, up.method,
                             bound_kind_name(up.kind), std::abs(rel) <= 0.02 ? 1.0 : 0.0, "ok"});
        } catch (const std::exception& err) {
            ++failures;
            have = false;
            push_row(table, {dir == 0 ? "metric-e1" : "metric-e2", 0.0, exact, 0.0, "", "upper",
                             0.0, std::string("error: ") + err.what()});
        }
    }
    if (have && v2 > 0.0) {
        const double ratio = v1 / v2;
        const double rel = (ratio - N) / N;
        push_row(table, {"ratio", ratio, N, rel, "kobayashi-upper-quotient", "estimate",
                         std::abs(rel) <= 0.02 ? 1.0 : 0.0, "ok"});
    } else {
        ++failures;
        push_row(table, {"ratio", 0.0, N, 0.0, "", "estimate", 0.0, "error: missing metric rows"});
    }
}

void run_quotient_scan(const ExperimentConfig& config, ReportTable& table, int& failures) {
    table.columns = {"eps",    "c_lower",    "k_upper", "m_upper", "m_lower",
                     "method", "bound_kind", "pass",    "status"};
    static const DomainSpec fallback = DomainSpec::egg({1, 2});
    const DomainSpec& domain = require_kind(
        config, fallback, {DomainKind::Ball, DomainKind::Egg, DomainKind::StretchedBall},
        kNames[4]);

    // A boundary point with positive-definite Levi form; for the egg that is
    // an axis point whose complementary exponents are all 1.
    Point boundary(domain.dimension(), cplx(0.0, 0.0));
    if (domain.kind() == DomainKind::Egg) {
        const auto& m = domain.exponents();
        int axis = static_cast<int>(std::max_element(m.begin(), m.end()) - m.begin());
        for (int j = 0; j < static_cast<int>(m.size()); ++j) {
            if (j != axis && m[j] != 1) {
                throw std::invalid_argument(
                    "quotient-scan: no strongly pseudoconvex axis point on this egg");
            }
        }
        boundary[axis] = 1.0;
    } else {
        boundary[0] = 1.0;
    }

    const double ladder[] = {0.5, 0.3, 0.2, 0.1, 0.05, 0.02};
    std::uint64_t row = 0;
    for (double eps : ladder) {
        const OptimizerBudget budget = row_budget(config, row++);
        try {
            const Point z = domain.normal_ray_point(boundary, eps);
            const VolumeInvariantEstimate est = quotient_upper(domain, z, budget);
            push_row(table, {eps, est.c_lower, est.k_upper, est.m_upper, est.m_lower, est.method,
                             "upper", est.m_upper + 1e-12 >= 1.0 ? 1.0 : 0.0, "ok"});
        } catch (const std::exception& err) {
            ++failures;
            push_row(table, {eps, 0.0, 0.0, 0.0, 0.0, "", "upper", 0.0,
                             std::string("error: ") + err.what()});
        }
    }
}

void run_chain_demo(const ExperimentConfig& config, ReportTable& table, int& failures) {
    table.columns = {"instance", "stage",  "legs",       "total", "reference",
                     "rel_excess", "method", "bound_kind", "pass",  "status"};
    static const DomainSpec fallback = DomainSpec::ball(2);
    const DomainSpec& domain = require_kind(
        config, fallback,
        {DomainKind::Ball, DomainKind::Polydisc, DomainKind::Egg, DomainKind::StretchedBall},
        kNames[5]);

    for (int instance = 0; instance < 3; ++instance) {
        const OptimizerBudget budget = row_budget(config, static_cast<std::uint64_t>(instance));
        std::mt19937_64 rng(budget.seed);
        try {
            std::vector<Point> waypoints;
            for (int j = 0; j < 5; ++j) waypoints.push_back(random_interior(rng, domain, 0.75));
            ChainPath chain;
            chain.waypoints = waypoints;
            for (int j = 0; j < 4; ++j) {
                auto leg = one_disc_distance_upper(domain, waypoints[j], waypoints[j + 1], budget);
                if (!leg) throw std::runtime_error("no feasible leg disc");
                chain.total += leg->distance_upper;
                chain.legs.push_back(std::move(*leg));
            }
            const double reference = domain.kind() == DomainKind::Ball
                                         ? ball_distance(waypoints.front(), waypoints.back())
                                         : 0.0;
            push_row(table, {static_cast<double>(instance), "initial",
                             static_cast<double>(chain.legs.size()), chain.total, reference, 0.0,
                             "one-disc-legs", "upper", 1.0, "ok"});
            const ChainPath shortened =
                shorten_chain(domain, chain, domain.diameter() / 8.0, 0.5, budget);
            const double excess =
                reference > 0.0 ? (shortened.total - reference) / reference : 0.0;
            const bool pass = shortened.total <= chain.total + 1e-9 &&
                              (reference == 0.0 || std::abs(excess) <= 0.01);
            push_row(table, {static_cast<double>(instance), "shortened",
                             static_cast<double>(shortened.legs.size()), shortened.total,
                             reference, excess, "merge-and-reoptimize", "upper", pass ? 1.0 : 0.0,
                             "ok"});
        } catch (const std::exception& err) {
            ++failures;
            push_row(table, {static_cast<double>(instance), "error", 0.0, 0.0, 0.0, 0.0, "",
                             "upper", 0.0, std::string("error: ") + err.what()});
        }
    }
}

void run_dbar_scaling(const ExperimentConfig& config, ReportTable& table, int& failures) {
    table.columns = {"record", "r",      "sup_u",      "sup_grad_u", "residual",
                     "slope",  "method", "bound_kind", "pass",       "status"};
    if (config.domain) {
        throw std::invalid_argument("dbar-scaling: runs on a fixed planar slice, no domain");
    }
    (void)config;
    try {
        const GridSpec grid = GridSpec::centered(0.0, 1.0, 768);
        const auto psi = [](cplx z) { return z + 0.5 * z * z; };
        const CorrectionScalingReport report =
            correction_scaling_experiment(grid, psi, cplx(0.0, 1.0), {0.2, 0.1, 0.05});
        for (const CorrectionScalingRow& row : report.rows) {
            push_row(table, {"sample", row.r, row.sup_u, row.sup_grad_u, row.residual, 0.0,
                             "cauchy-transform", "estimate", 1.0, "ok"});
        }
        push_row(table, {"fit", 0.0, 0.0, 0.0, 0.0, report.fitted_slope, "log-log-least-squares",
                         "estimate", report.fitted_slope >= 1.0 ? 1.0 : 0.0, "ok"});
    } catch (const std::exception& err) {
        ++failures;
        push_row(table, {"error", 0.0, 0.0, 0.0, 0.0, 0.0, "", "estimate", 0.0,
                         std::string("error: ") + err.what()});
    }
}

void run_stability_sweep(const ExperimentConfig& config, ReportTable& table, int& failures) {
    table.columns = {"record",  "N",         "point",  "c_lower",    "k_upper", "m_upper",
                     "m_target", "deviation", "method", "bound_kind", "pass",    "status"};
    static const DomainSpec fallback = DomainSpec::stretched_ball(4.0);
    const DomainSpec& domain =
        require_kind(config, fallback, {DomainKind::StretchedBall}, kNames[7]);
    const double N = domain.stretch();
    const double squeeze = std::min(1.0, N);
    const std::vector<Point> points = {
        Point{cplx(0.35, 0.0), cplx(0.25, 0.0) * squeeze},
        Point{cplx(0.1, 0.2), cplx(-0.3, 0.1) * squeeze},
    };

    std::uint64_t row = 0;
    for (std::size_t p = 0; p < points.size(); ++p) {
        double m_target = 0.0;
        bool have_target = false;
        try {
            const VolumeInvariantEstimate target =
                quotient_upper(domain, points[p], row_budget(config, row));
            m_target = target.m_upper;
            have_target = true;
            push_row(table, {"target", N, static_cast<double>(p), target.c_lower, target.k_upper,
                             target.m_upper, m_target, 0.0, target.method, "upper",
                             target.m_upper + 1e-12 >= 1.0 ? 1.0 : 0.0, "ok"});
        } catch (const std::exception& err) {
            ++failures;
            push_row(table, {"target", N, static_cast<double>(p), 0.0, 0.0, 0.0, 0.0, 0.0, "",
                             "upper", 0.0, std::string("error: ") + err.what()});
        }
        ++row;
        for (int j = 0; j <= 4; ++j) {
            const double Nj = N * (1.0 + std::ldexp(1.0, -j));
            try {
                const DomainSpec perturbed = DomainSpec::stretched_ball(Nj);
                const VolumeInvariantEstimate est =
                    quotient_upper(perturbed, points[p], row_budget(config, row));
                const double deviation = have_target ? std::abs(est.m_upper - m_target) : 0.0;
                push_row(table, {"perturbed", Nj, static_cast<double>(p), est.c_lower, est.k_upper,
                                 est.m_upper, m_target, deviation, est.method, "upper",
                                 est.m_upper + 1e-12 >= 1.0 ? 1.0 : 0.0, "ok"});
            } catch (const std::exception& err) {
                ++failures;
                push_row(table, {"perturbed", Nj, static_cast<double>(p), 0.0, 0.0, 0.0, m_target,
                                 0.0, "", "upper", 0.0, std::string("error: ") + err.what()});
            }
            ++row;
        }
    }
}

}  // namespace

const char* experiment_name(ExperimentKind kind) { return kNames[static_cast<int>(kind)]; }

std::optional<ExperimentKind> experiment_from_name(const std::string& name) {
    for (int i = 0; i < 8; ++i) {
        if (name == kNames[i]) return static_cast<ExperimentKind>(i);
    }
    return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult result;
    switch (config.experiment) {
        case ExperimentKind::BallValidation:
            run_ball_validation(config, result.table, result.failures);
            break;
        case ExperimentKind::EggReport:
            run_egg_report(config, result.table, result.failures);
            break;
        case ExperimentKind::LempertSweep:
            run_lempert_sweep(config, result.table, result.failures);
            break;
        case ExperimentKind::Anisotropy:
            run_anisotropy(config, result.table, result.failures);
            break;
        case ExperimentKind::QuotientScan:
            run_quotient_scan(config, result.table, result.failures);
            break;
        case ExperimentKind::ChainDemo:
            run_chain_demo(config, result.table, result.failures);
            break;
        case ExperimentKind::DbarScaling:
            run_dbar_scaling(config, result.table, result.failures);
            break;
        case ExperimentKind::StabilitySweep:
            run_stability_sweep(config, result.table, result.failures);
            break;
    }
    // Defensive sweep: the writers reject non-finite cells, so a sub-run that
    // produced one is converted into a recorded error here instead.
    for (ResultRow& row : result.table.rows) {
        bool bad = false;
        for (Cell& cell : row.cells) {
            if (double* value = std::get_if<double>(&cell); value && !std::isfinite(*value)) {
                *value = 0.0;
                bad = true;
            }
        }
        if (bad) {
            ++result.failures;
            row.cells.back() = std::string("error: non-finite value");
        }
    }
    return result;
}

void emit_report(const ReportTable& table, const ExperimentConfig& config) {
    const std::string text =
        config.format == ReportFormat::Csv ? to_csv(table) : to_json(table);
    const std::filesystem::path path(config.output_path);
    if (path.empty()) throw std::invalid_argument("emit_report: empty output path");
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot open " + config.output_path);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("emit_report: write failed for " + config.output_path);
}

}  // namespace kobmetric
