#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "resistnet/common.hpp"
#include "resistnet/graph.hpp"
#include "resistnet/random.hpp"
#include "resistnet/solver.hpp"

namespace resistnet {

/// Erdos-Renyi graph with a random input/output split, rejection-sampled
/// until connected. Used by the verification suites and tests.
inline CircuitGraph random_connected_graph(int num_nodes, double edge_prob,
                                           Rng& rng) {
    if (num_nodes < 2) {
        throw InvalidArgumentError("need at least two nodes for a partition");
    }
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<Branch> branches;
        for (int k = 0; k < num_nodes; ++k) {
            for (int l = k + 1; l < num_nodes; ++l) {
                if (rng.uniform01() < edge_prob) branches.push_back({k, l});
            }
        }
        std::vector<int> nodes(num_nodes);
        std::iota(nodes.begin(), nodes.end(), 0);
        // Fisher-Yates with the deterministic index sampler.
        for (int k = num_nodes - 1; k > 0; --k) {
            const int j = static_cast<int>(rng.uniform_index(k + 1));
            std::swap(nodes[k], nodes[j]);
        }
        const int n_in = 1 + static_cast<int>(rng.uniform_index(num_nodes - 1));
        std::vector<int> inputs(nodes.begin(), nodes.begin() + n_in);
        std::vector<int> outputs(nodes.begin() + n_in, nodes.end());
        CircuitGraph graph(num_nodes, std::move(branches), std::move(inputs),
                           std::move(outputs));
        if (graph.is_connected()) return graph;
    }
    throw InvalidArgumentError(
        "failed to sample a connected graph; edge probability too low");
}

/// Per-branch conductances log-uniform in [eps, high].
inline Eigen::VectorXd random_conductances(Eigen::Index num_branches, double eps,
                                           Rng& rng, double high = 10.0) {
    Eigen::VectorXd g(num_branches);
    for (Eigen::Index k = 0; k < num_branches; ++k) {
        g[k] = rng.log_uniform(eps, high);
    }
    return g;
}

/// Hidden target-network conductances, uniform on (eps, high]. Matches the
/// experimental setup: sampling the realizing network guarantees a feasible
/// target inside C_eps.
inline Eigen::VectorXd hidden_network_conductances(Eigen::Index num_branches,
                                                   double eps, Rng& rng,
                                                   double high = 10.0) {
    Eigen::VectorXd g(num_branches);
    for (Eigen::Index k = 0; k < num_branches; ++k) {
        g[k] = rng.uniform_open_low(eps, high);
    }
    return g;
}

/// Feasible training sample: the desired outputs are produced by solving a
/// hidden realizing network, so a conductance vector achieving them exists
/// in C_eps by construction.
inline TrainingSample feasible_sample(const CircuitGraph& graph,
                                      const Eigen::VectorXd& hidden_g,
                                      double eps, const Eigen::VectorXd& p_in) {
    TrainingSample sample;
    sample.p_in = p_in;
    sample.p_out_desired =
        solve_output_potentials(graph, ConductanceVector(hidden_g, eps), p_in);
    return sample;
}

/// Input potential ramp (1, 2, ..., N_I) used by the deterministic
/// experiments.
inline Eigen::VectorXd ramp_inputs(int n_in) {
    return Eigen::VectorXd::LinSpaced(n_in, 1.0, static_cast<double>(n_in));
}

}  // namespace resistnet
