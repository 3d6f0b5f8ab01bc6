#include "dcfl/cli/selftest.hpp"

#include "dcfl/data/blobs.hpp"
#include "dcfl/data/partition.hpp"
#include "dcfl/diffusion/ddpm.hpp"
#include "dcfl/diffusion/schedule.hpp"
#include "dcfl/flcore/penalties.hpp"
#include "dcfl/flcore/theorem.hpp"
#include "dcfl/models/batch.hpp"
#include "dcfl/models/denoiser.hpp"
#include "dcfl/models/mlp.hpp"
#include "dcfl/numkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

namespace dcfl::cli {

namespace {

constexpr int kGradPoints = 20;
constexpr double kGradTolerance = 1e-4;
constexpr double kFdStep = 1e-5;

using numkit::RngStream;

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

std::vector<double> random_vector(std::size_t n, RngStream& rng, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * rng.normal();
    return v;
}

std::vector<data::Example> random_examples(int n, int d, int classes, int domains, RngStream& rng) {
    std::vector<data::Example> out;
    for (int i = 0; i < n; ++i) {
        out.push_back({random_vector(static_cast<std::size_t>(d), rng),
                       static_cast<int>(rng.below(static_cast<std::uint64_t>(classes))),
                       static_cast<int>(rng.below(static_cast<std::uint64_t>(domains)))});
    }
    return out;
}

// Runs `points` gradient comparisons; `point` returns (analytic, numeric).
SuiteResult gradient_suite(const std::string& name, int points,
                           const std::function<std::pair<std::vector<double>, std::vector<double>>(RngStream&)>& point,
                           RngStream rng) {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        auto point_rng = rng.split(static_cast<std::uint64_t>(i));
        const auto [analytic, numeric] = point(point_rng);
        worst = std::max(worst, numkit::relative_error(analytic, numeric));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d points, max rel err %.2e", points, worst);
    return {name, worst < kGradTolerance, buf};
}

SuiteResult theorem_suite(RngStream rng) {
    const auto report = flcore::theorem1_check(1000, 10, rng);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d trials, %d violations, min slack %.3e", report.trials, report.violations,
                  report.min_slack);
    return {"theorem1", report.violations == 0, buf};
}

SuiteResult classifier_suite(RngStream rng, bool corrupt) {
    return gradient_suite("grad_classifier", kGradPoints, [corrupt](RngStream& r) {
        const models::MlpShape shape{3, 5, 4};
        auto params = models::init_mlp(shape, r);
        for (auto& w : params.flat()) w += 0.3 * r.normal();
        const auto batch = models::make_batch(random_examples(6, 3, 4, 1, r));
        auto analytic = models::mlp_loss_grad(params, batch).grad;
        if (corrupt) analytic[0] += 1.0;
        const auto numeric = numkit::finite_diff_grad(
            [&](std::span<const double> w) {
                return models::mlp_loss_grad(models::MlpParams(shape, {w.begin(), w.end()}), batch).loss;
            },
            params.flat(), kFdStep);
        return std::pair{analytic, numeric};
    }, rng);
}

SuiteResult diffusion_suite(RngStream rng) {
    return gradient_suite("grad_diffusion", kGradPoints, [](RngStream& r) {
        const models::DenoiserShape shape{2, 8, 4, 4, 3, 2, 10};
        const auto schedule = diffusion::make_linear_schedule(10);
        auto params = models::init_denoiser(shape, r);
        for (auto& w : params.flat()) w += 0.1 * r.normal();
        const auto batch = models::make_batch(random_examples(5, 2, 3, 2, r));
        std::vector<int> steps;
        for (int i = 0; i < 5; ++i) steps.push_back(1 + static_cast<int>(r.below(10)));
        numkit::Matrix noise(5, 2);
        for (int i = 0; i < noise.size(); ++i) noise.data()[i] = r.normal();
        const auto analytic = diffusion::diffusion_loss_grad_fixed(params, batch, steps, noise, schedule).grad;
        const auto numeric = numkit::finite_diff_grad(
            [&](std::span<const double> w) {
                return diffusion::diffusion_loss_grad_fixed(models::DenoiserParams(shape, {w.begin(), w.end()}), batch,
                                                            steps, noise, schedule)
                    .loss;
            },
            params.flat(), kFdStep);
        return std::pair{analytic, numeric};
    }, rng);
}

SuiteResult penalty_suite(RngStream rng) {
    return gradient_suite("grad_penalties", kGradPoints, [](RngStream& r) {
        const models::MlpShape shape{3, 4, 3};
        const auto n = shape.flat_size();
        const auto theta = random_vector(n, r);
        const auto anchor = random_vector(n, r);
        auto fisher = random_vector(n, r);
        for (auto& f : fisher) f = f * f;
        const double mu = 0.5 + r.uniform();
        const double lambda = 0.5 + r.uniform();
        auto teacher = models::init_mlp(shape, r);
        for (auto& w : teacher.flat()) w += 0.3 * r.normal();
        const auto batch = models::make_batch(random_examples(6, 3, 3, 1, r));

        // Sum of the three penalties, compared as one gradient.
        auto total = [&](std::span<const double> w, std::vector<double>* grad) {
            std::vector<double> g(n, 0.0);
            double v = flcore::add_prox_penalty(w, anchor, mu, g);
            v += flcore::add_ewc_penalty(w, anchor, fisher, lambda, g);
            const auto lwf = flcore::lwf_penalty_grad(models::MlpParams(shape, {w.begin(), w.end()}), teacher, batch, lambda);
            v += lwf.loss;
            for (std::size_t i = 0; i < n; ++i) g[i] += lwf.grad[i];
            if (grad) *grad = std::move(g);
            return v;
        };
        std::vector<double> analytic;
        total(theta, &analytic);
        const auto numeric = numkit::finite_diff_grad([&](std::span<const double> w) { return total(w, nullptr); },
                                                      theta, kFdStep);
        return std::pair{analytic, numeric};
    }, rng);
}

// Relative deviation of a Monte-Carlo moment from its target.
double rel_dev(double got, double want) { return std::abs(got - want) / std::abs(want); }

SuiteResult forward_suite(RngStream rng) {
    constexpr int kDraws = 10000;
    constexpr double kTol = 0.05;
    const std::vector<double> x0{2.0, -3.0};
    double worst = 0.0;

    auto moments = [&](const std::function<std::vector<double>(RngStream&)>& draw, double mean_scale, double var,
                       RngStream r) {
        std::vector<double> sum(x0.size(), 0.0);
        std::vector<double> sq(x0.size(), 0.0);
        for (int i = 0; i < kDraws; ++i) {
            const auto x = draw(r);
            for (std::size_t j = 0; j < x.size(); ++j) {
                sum[j] += x[j];
                sq[j] += x[j] * x[j];
            }
        }
        for (std::size_t j = 0; j < x0.size(); ++j) {
            const double m = sum[j] / kDraws;
            const double v = sq[j] / kDraws - m * m;
            worst = std::max({worst, rel_dev(m, mean_scale * x0[j]), rel_dev(v, var)});
        }
    };

    const auto schedule = diffusion::make_linear_schedule();
    std::uint64_t key = 0;
    for (int n : {1, 50, 200}) {
        moments([&](RngStream& r) {
            const auto eps = random_vector(x0.size(), r);
            return diffusion::forward_sample(x0, n, eps, schedule);
        }, std::sqrt(schedule.alpha_bar(n)), 1.0 - schedule.alpha_bar(n), rng.split(key++));
    }

    // Five single-step kernels composed against the closed-form marginal.
    const auto short_schedule = diffusion::make_linear_schedule(5);
    moments([&](RngStream& r) {
        auto x = x0;
        for (int n = 1; n <= 5; ++n) {
            for (auto& xi : x) xi = std::sqrt(short_schedule.alpha(n)) * xi + std::sqrt(short_schedule.beta(n)) * r.normal();
        }
        return x;
    }, std::sqrt(short_schedule.alpha_bar(5)), 1.0 - short_schedule.alpha_bar(5), rng.split(key++));

    return {"forward_moments", worst < kTol, fmt("max rel dev %.3f (tol %.2f)", worst, kTol)};
}

SuiteResult partition_suite(RngStream rng) {
    constexpr int kConfigs = 60;
    int checked = 0;
    std::string first_problem;
    for (int i = 0; i < kConfigs; ++i) {
        auto r = rng.split(static_cast<std::uint64_t>(i));
        const int classes = 2 + static_cast<int>(r.below(9));
        const int domains = 2 + static_cast<int>(r.below(3));
        const int clients = 1 + static_cast<int>(r.below(6));
        const int cps = 1 + static_cast<int>(r.below(static_cast<std::uint64_t>(classes)));
        const int sessions = 1 + static_cast<int>(r.below(static_cast<std::uint64_t>(classes / cps)));
        data::BlobSpec spec{classes, domains, 4 * clients * sessions + static_cast<int>(r.below(7)), 2, 4.0, 1.0};
        auto data_rng = r.split(1);
        const auto ds = data::make_blobs(spec, data_rng);
        for (int scen = 0; scen < 3; ++scen) {
            auto part_rng = r.split(10 + static_cast<std::uint64_t>(scen));
            data::ClientSchedule sched;
            if (scen == 0) sched = data::partition_class_inc_iid(ds, clients, sessions, cps, part_rng);
            if (scen == 1) sched = data::partition_class_inc_noniid(ds, clients, sessions, cps, part_rng);
            if (scen == 2) sched = data::partition_domain_inc(ds, clients, part_rng);
            const auto problems = data::partition_violations(sched, ds, cps);
            if (!problems.empty() && first_problem.empty()) first_problem = problems.front();
            ++checked;
        }
    }
    if (!first_problem.empty()) return {"partition", false, first_problem};
    return {"partition", true, std::to_string(checked) + " schedules"};
}

} // namespace

std::vector<SuiteResult> run_selftest_suites(const SelftestOptions& options) {
    const RngStream root(options.seed);
    std::vector<SuiteResult> out;
    out.push_back(theorem_suite(root.split(1)));
    out.push_back(classifier_suite(root.split(2), options.corrupt_gradient));
    out.push_back(diffusion_suite(root.split(3)));
    out.push_back(penalty_suite(root.split(4)));
    out.push_back(forward_suite(root.split(5)));
    out.push_back(partition_suite(root.split(6)));
    return out;
}

bool print_selftest_table(const std::vector<SuiteResult>& results, std::ostream& out) {
    bool all = true;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-18s %-6s %s\n", "suite", "status", "detail");
    out << buf;
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%-18s %-6s %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
        out << buf;
        all = all && r.passed;
    }
    return all;
}

} // namespace dcfl::cli
