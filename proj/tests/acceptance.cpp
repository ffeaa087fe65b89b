// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria use fixed seeds so reruns are bit-reproducible.
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "resistnet/analysis.hpp"
#include "resistnet/experiments.hpp"
#include "resistnet/graph.hpp"
#include "resistnet/instances.hpp"
#include "resistnet/learning.hpp"
#include "resistnet/random.hpp"
#include "resistnet/solver.hpp"
#include "resistnet/verify.hpp"

using namespace resistnet;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool passed,
            const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", passed ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str());
    if (!passed) ++failures;
}

CircuitGraph reference_crossbar() { return CircuitGraph::crossbar(40, 30); }

constexpr double kEps = 0.1;
constexpr std::uint64_t kSeed = 0;

TrainingSample reference_sample(std::uint64_t seed) {
    const CircuitGraph graph = reference_crossbar();
    Rng rng(Rng::derive_seed(seed, 0));
    return feasible_sample(
        graph, hidden_network_conductances(graph.num_branches(), kEps, rng, 10.0),
        kEps, ramp_inputs(40));
}

void criterion_bound() {
    const double k = lipschitz_bound_K(reference_crossbar(), ramp_inputs(40), kEps);
    const double two_over_k = 2.0 / k;
    const double reference = 8.9564e-11;
    const double rel = std::abs(two_over_k - reference) / reference;
    report(1, "theoretical bound", rel <= 1e-4,
           "2/K = " + format_float(two_over_k) +
               ", relative error = " + format_float(rel));
}

void criterion_convergence() {
    const CircuitGraph graph = reference_crossbar();
    const TrainingSample sample = reference_sample(kSeed);
    const ConductanceVector g0 =
        ConductanceVector::uniform(graph.num_branches(), 2.0, kEps);
    bool all_converged = true;
    long t_for_0007 = -1;
    std::string detail;
    for (double gamma : {0.001, 0.004, 0.007, 0.010, 0.013}) {
        LearningConfig config;
        config.gamma = gamma;
        config.epsilon = kEps;
        config.max_iterations = 200;
        config.stop_tolerance = 1e-6;
        const RunTrace trace = run_contrastive_learning(graph, g0, sample, config);
        const long t_conv = trace.status == RunStatus::Converged
                                ? trace.records.back().t
                                : -1;
        if (t_conv < 0) all_converged = false;
        if (gamma == 0.007) t_for_0007 = t_conv;
        detail += "gamma=" + std::to_string(gamma).substr(0, 5) + " t=" +
                  std::to_string(t_conv) + " ";
    }
    const bool passed =
        all_converged && t_for_0007 >= 0 && t_for_0007 <= 20;
    report(2, "convergence regime", passed, detail);
}

void criterion_size_sweep() {
    const std::vector<int> sides = {10, 15, 20, 25};
    std::vector<double> errors_at_10, bounds;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        const int side = sides[i];
        const CircuitGraph graph = CircuitGraph::crossbar(side, side);
        const Eigen::VectorXd p_in = ramp_inputs(side);
        Rng rng(Rng::derive_seed(kSeed, i));
        const TrainingSample sample = feasible_sample(
            graph,
            hidden_network_conductances(graph.num_branches(), kEps, rng, 10.0),
            kEps, p_in);
        LearningConfig config;
        config.gamma = 0.02;
        config.epsilon = kEps;
        config.max_iterations = 10;
        config.stop_tolerance = 0.0;
        const RunTrace trace = run_contrastive_learning(
            graph, ConductanceVector::uniform(graph.num_branches(), 2.0, kEps),
            sample, config);
        errors_at_10.push_back(trace.records.back().error);
        bounds.push_back(2.0 / lipschitz_bound_K(graph, p_in, kEps));
    }
    bool errors_decreasing = true, bounds_decreasing = true;
    std::string detail = "error@10:";
    for (std::size_t i = 0; i < errors_at_10.size(); ++i) {
        detail += " " + format_float(errors_at_10[i]);
        if (i > 0 && errors_at_10[i] >= errors_at_10[i - 1]) {
            errors_decreasing = false;
        }
        if (i > 0 && bounds[i] >= bounds[i - 1]) bounds_decreasing = false;
    }
    detail += "; 2/K:";
    for (double b : bounds) detail += " " + format_float(b);
    report(3, "size-sweep trends", errors_decreasing && bounds_decreasing,
           detail);
}

void criterion_stochastic() {
    const CircuitGraph graph = reference_crossbar();
    int successes = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng target_rng(Rng::derive_seed(seed, 0));
        const Eigen::VectorXd hidden = hidden_network_conductances(
            graph.num_branches(), kEps, target_rng, 10.0);
        Rng input_rng(Rng::derive_seed(seed, 1));
        TrainingSet samples;
        for (int j = 0; j < 100; ++j) {
            Eigen::VectorXd p_in(40);
            for (Eigen::Index k = 0; k < 40; ++k) {
                p_in[k] = input_rng.uniform(-5.0, 5.0);
            }
            samples.push_back(feasible_sample(graph, hidden, kEps, p_in));
        }
        LearningConfig config;
        config.schedule = StepSchedule::power(10.0, 1.0);
        config.epsilon = kEps;
        config.max_iterations = 1000;
        config.stop_tolerance = 0.0;
        config.rng_seed = Rng::derive_seed(seed, 2);
        const RunTrace trace = run_stochastic_cl(
            graph, ConductanceVector::uniform(graph.num_branches(), 2.0, kEps),
            samples, config);
        const double initial = trace.records.front().error;
        const double final_error = trace.records.back().error;
        const bool ok = trace.status != RunStatus::Error &&
                        final_error <= 0.01 * initial;
        if (ok) ++successes;
        detail += format_float(final_error / initial) + " ";
    }
    report(4, "stochastic convergence", successes >= 9,
           std::to_string(successes) + "/10 seeds; final/initial: " + detail);
}

void criterion_jacobian() {
    const SuiteResult suite = verify_jacobian(Rng::derive_seed(kSeed, 10), 50);
    report(5, "jacobian oracle", suite.passed, suite.detail);
}

void criterion_row_stochastic() {
    const SuiteResult suite =
        verify_row_stochastic(Rng::derive_seed(kSeed, 11), 100);
    report(6, "row-stochastic io map", suite.passed, suite.detail);
}

void criterion_lipschitz() {
    const TrainingSample sample = reference_sample(kSeed);
    try {
        const LipschitzDiagnostics diag = check_lipschitz_cocoercive(
            reference_crossbar(), sample, kEps, 10000,
            Rng::derive_seed(kSeed, 12));
        report(7, "lipschitz and cocoercivity", true,
               "10000 pairs, worst_ratio=" +
                   format_float(diag.worst_lipschitz_ratio) + ", worst_slack=" +
                   format_float(diag.worst_cocoercivity_slack));
    } catch (const PropertyViolationError& e) {
        report(7, "lipschitz and cocoercivity", false, e.what());
    }
}

void criterion_residual() {
    const SuiteResult suite =
        verify_residual_monotonicity(Rng::derive_seed(kSeed, 13), 20, 500);
    report(8, "fixed-point residual monotonicity", suite.passed, suite.detail);
}

void criterion_minimum_power() {
    const SuiteResult suite =
        verify_minimum_power(Rng::derive_seed(kSeed, 14), 50, 100);
    report(9, "minimum-power principle", suite.passed, suite.detail);
}

void criterion_determinism() {
    ExperimentSpec sweep;
    sweep.kind = ExperimentKind::StepSizeSweep;
    sweep.n_in = 6;
    sweep.n_out = 5;
    sweep.gammas = {0.004, 0.01};
    sweep.iterations = 15;
    sweep.seed = 21;
    ExperimentSpec stochastic;
    stochastic.kind = ExperimentKind::Stochastic;
    stochastic.n_in = 5;
    stochastic.n_out = 4;
    stochastic.input_kind = "uniform";
    stochastic.num_samples = 10;
    stochastic.iterations = 50;
    stochastic.seed = 22;
    bool identical = true;
    for (const ExperimentSpec& spec : {sweep, stochastic}) {
        const ExperimentResult a = run_experiment(spec, 2);
        const ExperimentResult b = run_experiment(spec, 2);
        if (a.artifacts.size() != b.artifacts.size()) {
            identical = false;
            continue;
        }
        for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
            if (a.artifacts[i].content != b.artifacts[i].content) {
                identical = false;
            }
        }
    }
    report(10, "determinism", identical,
           identical ? "repeated runs produce byte-identical artifacts"
                     : "artifact mismatch between repeated runs");
}

}  // namespace

int main() {
    criterion_bound();
    criterion_convergence();
    criterion_size_sweep();
    criterion_stochastic();
    criterion_jacobian();
    criterion_row_stochastic();
    criterion_lipschitz();
    criterion_residual();
    criterion_minimum_power();
    criterion_determinism();
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
