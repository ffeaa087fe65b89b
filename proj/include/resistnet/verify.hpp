#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "resistnet/analysis.hpp"
#include "resistnet/common.hpp"
#include "resistnet/instances.hpp"
#include "resistnet/learning.hpp"
#include "resistnet/random.hpp"
#include "resistnet/solver.hpp"

namespace resistnet {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// All iterates of a learning run must lie in C_eps.
inline bool check_feasible(const std::vector<Eigen::VectorXd>& iterates,
                           double epsilon) {
    for (const Eigen::VectorXd& g : iterates) {
        if (g.size() == 0 || g.minCoeff() < epsilon) return false;
    }
    return !iterates.empty();
}

namespace detail {

inline CircuitGraph small_instance(Rng& rng) {
    const int n = 5 + static_cast<int>(rng.uniform_index(5));  // 5..9 nodes
    return random_connected_graph(n, 0.6, rng);
}

}  // namespace detail

/// Jacobian structure: closed form vs central differences, symmetry, and
/// positive semidefiniteness, over seeded random connected graphs.
inline SuiteResult verify_jacobian(std::uint64_t seed, int instances = 50) {
    Rng rng(seed);
    double worst_fd = 0.0, worst_sym = 0.0, worst_eig = 0.0;
    for (int i = 0; i < instances; ++i) {
        const CircuitGraph graph = detail::small_instance(rng);
        const double eps = 0.1;
        const Eigen::VectorXd g =
            random_conductances(graph.num_branches(), 2.0 * eps, rng);
        Eigen::VectorXd p_in(graph.num_inputs());
        for (Eigen::Index k = 0; k < p_in.size(); ++k) {
            p_in[k] = rng.uniform(-1.0, 1.0);
        }
        const TrainingSample sample = feasible_sample(
            graph, hidden_network_conductances(graph.num_branches(), eps, rng),
            eps, p_in);
        const JacobianReport report =
            jacobian_report(graph, ConductanceVector(g, eps), sample, 1e-6);
        worst_fd = std::max(worst_fd, report.fd_defect);
        worst_sym = std::max(worst_sym, report.symmetry_defect);
        worst_eig = std::min(worst_eig, report.min_eigenvalue);
    }
    SuiteResult result;
    result.name = "jacobian";
    result.passed = worst_fd <= 1e-5 && worst_sym <= 1e-12 && worst_eig >= -1e-10;
    result.detail = "fd_defect=" + format_float(worst_fd) +
                    " symmetry_defect=" + format_float(worst_sym) +
                    " min_eigenvalue=" + format_float(worst_eig);
    return result;
}

/// The input-to-output map must be row-stochastic with entries in [0, 1].
inline SuiteResult verify_row_stochastic(std::uint64_t seed,
                                         int instances = 100) {
    Rng rng(seed);
    double worst_row = 0.0, worst_entry_low = 0.0, worst_entry_high = 0.0;
    for (int i = 0; i < instances; ++i) {
        const CircuitGraph graph = detail::small_instance(rng);
        const double eps = 0.1;
        const Eigen::VectorXd g =
            random_conductances(graph.num_branches(), eps, rng);
        const Eigen::MatrixXd m =
            io_map_matrix(graph, ConductanceVector(g, eps));
        worst_row = std::max(
            worst_row,
            (m.rowwise().sum().array() - 1.0).abs().maxCoeff());
        worst_entry_low = std::min(worst_entry_low, m.minCoeff());
        worst_entry_high = std::max(worst_entry_high, m.maxCoeff());
    }
    SuiteResult result;
    result.name = "row-stochastic";
    result.passed = worst_row <= 1e-10 && worst_entry_low >= -1e-12 &&
                    worst_entry_high <= 1.0 + 1e-12;
    result.detail = "row_sum_defect=" + format_float(worst_row) +
                    " min_entry=" + format_float(worst_entry_low) +
                    " max_entry=" + format_float(worst_entry_high);
    return result;
}

inline SuiteResult verify_lipschitz(std::uint64_t seed, long trials = 500) {
    SuiteResult result;
    result.name = "lipschitz-cocoercivity";
    const CircuitGraph graph = CircuitGraph::crossbar(8, 6);
    const double eps = 0.1;
    Rng rng(seed);
    const TrainingSample sample = feasible_sample(
        graph, hidden_network_conductances(graph.num_branches(), eps, rng), eps,
        ramp_inputs(graph.num_inputs()));
    try {
        const LipschitzDiagnostics diag = check_lipschitz_cocoercive(
            graph, sample, eps, trials, Rng::derive_seed(seed, 1));
        result.passed = true;
        result.detail =
            "worst_ratio=" + format_float(diag.worst_lipschitz_ratio) +
            " worst_slack=" + format_float(diag.worst_cocoercivity_slack);
    } catch (const PropertyViolationError& e) {
        result.passed = false;
        result.detail = e.what();
    }
    return result;
}

/// Krasnosel'skii-Mann residual monotonicity: with gamma = 1/K the
/// fixed-point residual ||g^{t+1} - g^t|| must be nonincreasing.
inline SuiteResult verify_residual_monotonicity(std::uint64_t seed,
                                                int instances = 20,
                                                long iterations = 200) {
    Rng rng(seed);
    double worst_increase = 0.0;
    for (int i = 0; i < instances; ++i) {
        const CircuitGraph graph = detail::small_instance(rng);
        const double eps = 0.1;
        const TrainingSample sample = feasible_sample(
            graph, hidden_network_conductances(graph.num_branches(), eps, rng),
            eps, ramp_inputs(graph.num_inputs()));
        LearningConfig config;
        config.epsilon = eps;
        config.gamma = 1.0 / lipschitz_bound_K(graph, sample.p_in, eps);
        config.max_iterations = iterations;
        config.stop_tolerance = 0.0;
        const RunTrace trace = run_contrastive_learning(
            graph, ConductanceVector::uniform(graph.num_branches(), 2.0, eps),
            sample, config);
        for (std::size_t t = 1; t + 1 < trace.records.size(); ++t) {
            worst_increase =
                std::max(worst_increase, trace.records[t].residual -
                                             trace.records[t - 1].residual);
        }
    }
    SuiteResult result;
    result.name = "residual-monotonicity";
    result.passed = worst_increase <= 1e-12;
    result.detail = "worst_residual_increase=" + format_float(worst_increase);
    return result;
}

/// Minimum-power principle: the free-state output potentials minimize the
/// total dissipated power over perturbations of p_O.
inline SuiteResult verify_minimum_power(std::uint64_t seed, int instances = 50,
                                        int perturbations = 100) {
    Rng rng(seed);
    double worst_gap = 0.0;
    for (int i = 0; i < instances; ++i) {
        const int n = 4 + static_cast<int>(rng.uniform_index(9));  // 4..12 nodes
        const CircuitGraph graph = random_connected_graph(n, 0.6, rng);
        const double eps = 0.1;
        const ConductanceVector g(
            random_conductances(graph.num_branches(), eps, rng), eps);
        Eigen::VectorXd p_in(graph.num_inputs());
        for (Eigen::Index k = 0; k < p_in.size(); ++k) {
            p_in[k] = rng.uniform(-2.0, 2.0);
        }
        const Eigen::VectorXd p_out = solve_output_potentials(graph, g, p_in);
        const double base_power =
            total_power(g, clamped_voltages(graph, p_in, p_out));
        for (int j = 0; j < perturbations; ++j) {
            Eigen::VectorXd delta(p_out.size());
            for (Eigen::Index k = 0; k < delta.size(); ++k) {
                delta[k] = rng.uniform(-1.0, 1.0);
            }
            delta *= 0.1 / delta.norm();
            const double perturbed_power =
                total_power(g, clamped_voltages(graph, p_in, p_out + delta));
            worst_gap = std::max(worst_gap, base_power - perturbed_power);
        }
    }
    SuiteResult result;
    result.name = "minimum-power";
    result.passed = worst_gap <= 1e-12;
    result.detail = "worst_power_gap=" + format_float(worst_gap);
    return result;
}

/// Every iterate of a learning run stays in C_eps.
inline SuiteResult verify_feasibility(std::uint64_t seed, int instances = 10) {
    Rng rng(seed);
    bool all_feasible = true;
    for (int i = 0; i < instances; ++i) {
        const CircuitGraph graph = detail::small_instance(rng);
        const double eps = 0.1;
        const TrainingSample sample = feasible_sample(
            graph, hidden_network_conductances(graph.num_branches(), eps, rng),
            eps, ramp_inputs(graph.num_inputs()));
        ConductanceVector g =
            ConductanceVector::uniform(graph.num_branches(), 2.0, eps);
        std::vector<Eigen::VectorXd> iterates{g.values()};
        for (int t = 0; t < 50; ++t) {
            g = cl_step(graph, g, sample, 0.05);
            iterates.push_back(g.values());
        }
        all_feasible = all_feasible && check_feasible(iterates, eps);
    }
    SuiteResult result;
    result.name = "feasibility";
    result.passed = all_feasible;
    result.detail = all_feasible ? "all iterates in C_eps"
                                 : "iterate left C_eps";
    return result;
}

/// Path independence of the line integral of h: certificate for the
/// existence of the convex potential.
inline SuiteResult verify_path_independence(std::uint64_t seed,
                                            int instances = 5) {
    Rng rng(seed);
    double worst_gap = 0.0;
    for (int i = 0; i < instances; ++i) {
        const CircuitGraph graph = detail::small_instance(rng);
        const double eps = 0.1;
        const TrainingSample sample = feasible_sample(
            graph, hidden_network_conductances(graph.num_branches(), eps, rng),
            eps, ramp_inputs(graph.num_inputs()));
        const Eigen::Index b = graph.num_branches();
        const Eigen::VectorXd g_a = random_conductances(b, eps, rng, 5.0);
        const Eigen::VectorXd g_b = random_conductances(b, eps, rng, 5.0);
        const Eigen::VectorXd g_mid = random_conductances(b, eps, rng, 5.0);
        const double direct =
            path_integral_h(graph, sample, eps, {g_a, g_b}, 512);
        const double detour =
            path_integral_h(graph, sample, eps, {g_a, g_mid, g_b}, 512);
        worst_gap = std::max(worst_gap, std::abs(direct - detour));
    }
    SuiteResult result;
    result.name = "path-independence";
    result.passed = worst_gap <= 1e-6;
    result.detail = "worst_integral_gap=" + format_float(worst_gap);
    return result;
}

inline std::vector<SuiteResult> run_verification(std::uint64_t seed) {
    std::vector<SuiteResult> results;
    results.push_back(verify_jacobian(Rng::derive_seed(seed, 10)));
    results.push_back(verify_row_stochastic(Rng::derive_seed(seed, 11)));
    results.push_back(verify_lipschitz(Rng::derive_seed(seed, 12)));
    results.push_back(verify_residual_monotonicity(Rng::derive_seed(seed, 13)));
    results.push_back(verify_minimum_power(Rng::derive_seed(seed, 14)));
    results.push_back(verify_feasibility(Rng::derive_seed(seed, 15)));
    results.push_back(verify_path_independence(Rng::derive_seed(seed, 16)));
    return results;
}

inline void write_suite_csv(std::ostream& out,
                            const std::vector<SuiteResult>& results) {
    out << "suite,passed,detail\n";
    for (const SuiteResult& r : results) {
        out << r.name << ',' << (r.passed ? 1 : 0) << ",\"" << r.detail << "\"\n";
    }
}

}  // namespace resistnet
