#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "resistnet/common.hpp"

namespace resistnet {

/// Oriented resistor branch between two distinct nodes (0-based indices).
struct Branch {
    int from = 0;
    int to = 0;
};

/// Immutable circuit topology: a connected-or-not undirected multigraph with
/// an input/output partition of its nodes. Node indices are 0-based in code;
/// the plain-text file format and CLI output are 1-based.
///
/// Duplicate parallel branches are allowed (each is a distinct resistor);
/// self loops are not.
class CircuitGraph {
public:
    CircuitGraph(int num_nodes, std::vector<Branch> branches,
                 std::vector<int> input_nodes, std::vector<int> output_nodes)
        : num_nodes_(num_nodes),
          branches_(std::move(branches)),
          input_nodes_(std::move(input_nodes)),
          output_nodes_(std::move(output_nodes)) {
        validate();
    }

    /// Complete bipartite graph between n_in input nodes and n_out output
    /// nodes. Input nodes come first, branches are oriented input -> output
    /// and ordered row-major over (input, output) pairs.
    static CircuitGraph crossbar(int n_in, int n_out) {
        if (n_in < 1 || n_out < 1) {
            throw InvalidArgumentError("crossbar: both sides must have at least one node");
        }
        std::vector<Branch> branches;
        branches.reserve(static_cast<std::size_t>(n_in) * n_out);
        for (int i = 0; i < n_in; ++i) {
            for (int o = 0; o < n_out; ++o) {
                branches.push_back({i, n_in + o});
            }
        }
        std::vector<int> inputs(n_in), outputs(n_out);
        for (int i = 0; i < n_in; ++i) inputs[i] = i;
        for (int o = 0; o < n_out; ++o) outputs[o] = n_in + o;
        return CircuitGraph(n_in + n_out, std::move(branches), std::move(inputs),
                            std::move(outputs));
    }

    int num_nodes() const { return num_nodes_; }
    int num_branches() const { return static_cast<int>(branches_.size()); }
    int num_inputs() const { return static_cast<int>(input_nodes_.size()); }
    int num_outputs() const { return static_cast<int>(output_nodes_.size()); }
    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<int>& input_nodes() const { return input_nodes_; }
    const std::vector<int>& output_nodes() const { return output_nodes_; }

    /// Full incidence matrix D (N x B): column for branch (k, l) is e_k - e_l.
    Eigen::MatrixXd incidence_matrix() const {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(num_nodes_, num_branches());
        for (int b = 0; b < num_branches(); ++b) {
            d(branches_[b].from, b) = 1.0;
            d(branches_[b].to, b) = -1.0;
        }
        return d;
    }

    /// Rows of D restricted to the input nodes, in declared order (D_I).
    Eigen::MatrixXd input_incidence() const { return rows_of(input_nodes_); }

    /// Rows of D restricted to the output nodes, in declared order (D_O).
    Eigen::MatrixXd output_incidence() const { return rows_of(output_nodes_); }

    /// True iff the underlying undirected graph is connected. A single node
    /// without branches counts as connected.
    bool is_connected() const {
        if (num_nodes_ <= 1) return true;
        std::vector<std::vector<int>> adj(num_nodes_);
        for (const Branch& b : branches_) {
            adj[b.from].push_back(b.to);
            adj[b.to].push_back(b.from);
        }
        std::vector<char> seen(num_nodes_, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int w : adj[u]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == num_nodes_;
    }

private:
    Eigen::MatrixXd rows_of(const std::vector<int>& nodes) const {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<int>(nodes.size()),
                                                  num_branches());
        for (int r = 0; r < static_cast<int>(nodes.size()); ++r) {
            const int node = nodes[r];
            for (int b = 0; b < num_branches(); ++b) {
                if (branches_[b].from == node) d(r, b) = 1.0;
                if (branches_[b].to == node) d(r, b) = -1.0;
            }
        }
        return d;
    }

    void validate() const {
        if (num_nodes_ < 1) {
            throw MalformedGraphError("graph must have at least one node");
        }
        for (const Branch& b : branches_) {
            if (b.from < 0 || b.from >= num_nodes_ || b.to < 0 || b.to >= num_nodes_) {
                throw MalformedGraphError("branch endpoint out of range");
            }
            if (b.from == b.to) {
                throw MalformedGraphError("self loops are not allowed");
            }
        }
        if (input_nodes_.empty() || output_nodes_.empty()) {
            throw InvalidPartitionError("input and output node sets must be nonempty");
        }
        std::vector<char> role(num_nodes_, 0);  // 0 unassigned, 1 input, 2 output
        for (int n : input_nodes_) {
            if (n < 0 || n >= num_nodes_) {
                throw InvalidPartitionError("input node index out of range");
            }
            if (role[n] != 0) throw InvalidPartitionError("duplicate input node");
            role[n] = 1;
        }
        for (int n : output_nodes_) {
            if (n < 0 || n >= num_nodes_) {
                throw InvalidPartitionError("output node index out of range");
            }
            if (role[n] != 0) {
                throw InvalidPartitionError(
                    "node assigned to both input and output sets, or duplicated");
            }
            role[n] = 2;
        }
        for (int n = 0; n < num_nodes_; ++n) {
            if (role[n] == 0) {
                throw InvalidPartitionError(
                    "every node must be either an input or an output node");
            }
        }
    }

    int num_nodes_;
    std::vector<Branch> branches_;
    std::vector<int> input_nodes_;
    std::vector<int> output_nodes_;
};

// Free-function forms matching the rest of the library's call style.
inline Eigen::MatrixXd incidence_matrix(const CircuitGraph& graph) {
    return graph.incidence_matrix();
}

inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> partition_incidence(
    const CircuitGraph& graph) {
    return {graph.input_incidence(), graph.output_incidence()};
}

inline CircuitGraph make_crossbar(int n_in, int n_out) {
    return CircuitGraph::crossbar(n_in, n_out);
}

inline bool is_connected(const CircuitGraph& graph) { return graph.is_connected(); }

/// Plain-text graph format:
///   nodes N inputs N_I outputs N_O
///   k l          (one line per branch, 1-based node indices)
/// Input nodes are 1..N_I, output nodes N_I+1..N by convention.
inline CircuitGraph read_graph(std::istream& in) {
    std::string word;
    int n = 0, n_in = 0, n_out = 0;
    if (!(in >> word) || word != "nodes" || !(in >> n) || !(in >> word) ||
        word != "inputs" || !(in >> n_in) || !(in >> word) || word != "outputs" ||
        !(in >> n_out)) {
        throw MalformedGraphError(
            "expected header 'nodes N inputs N_I outputs N_O'");
    }
    if (n_in + n_out != n) {
        throw InvalidPartitionError("inputs + outputs must equal nodes");
    }
    std::vector<Branch> branches;
    int k = 0, l = 0;
    while (in >> k >> l) {
        branches.push_back({k - 1, l - 1});
    }
    if (!in.eof() && in.fail()) {
        throw MalformedGraphError("malformed branch line in graph file");
    }
    std::vector<int> inputs(n_in), outputs(n_out);
    for (int i = 0; i < n_in; ++i) inputs[i] = i;
    for (int o = 0; o < n_out; ++o) outputs[o] = n_in + o;
    return CircuitGraph(n, std::move(branches), std::move(inputs), std::move(outputs));
}

inline void write_graph(std::ostream& out, const CircuitGraph& graph) {
    out << "nodes " << graph.num_nodes() << " inputs " << graph.num_inputs()
        << " outputs " << graph.num_outputs() << "\n";
    for (const Branch& b : graph.branches()) {
        out << b.from + 1 << " " << b.to + 1 << "\n";
    }
}

inline CircuitGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open graph file: " + path);
    return read_graph(in);
}

}  // namespace resistnet
