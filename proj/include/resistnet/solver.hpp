#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "resistnet/common.hpp"
#include "resistnet/graph.hpp"

namespace resistnet {

// Relative residual tolerance for the output-node solve. Tight enough that
// solver error never masks the algorithmic properties under test.
inline constexpr double kSolveTolerance = 1e-10;

/// Per-branch conductances constrained to the box C_eps = {g : g_k >= eps}.
class ConductanceVector {
public:
    ConductanceVector(Eigen::VectorXd g, double epsilon)
        : g_(std::move(g)), epsilon_(epsilon) {
        if (epsilon_ <= 0.0) {
            throw InvalidArgumentError("conductance floor epsilon must be positive");
        }
        for (Eigen::Index k = 0; k < g_.size(); ++k) {
            if (!(g_[k] >= epsilon_)) {
                throw InvalidArgumentError(
                    "conductance below the floor epsilon at branch " +
                    std::to_string(k));
            }
        }
    }

    static ConductanceVector uniform(Eigen::Index num_branches, double value,
                                     double epsilon) {
        return ConductanceVector(Eigen::VectorXd::Constant(num_branches, value),
                                 epsilon);
    }

    const Eigen::VectorXd& values() const { return g_; }
    double epsilon() const { return epsilon_; }
    Eigen::Index size() const { return g_.size(); }
    double operator[](Eigen::Index k) const { return g_[k]; }

private:
    Eigen::VectorXd g_;
    double epsilon_;
};

/// One training pair: imposed input potentials and desired output potentials.
struct TrainingSample {
    Eigen::VectorXd p_in;          // length N_I, volts
    Eigen::VectorXd p_out_desired; // length N_O, volts
};

using TrainingSet = std::vector<TrainingSample>;

/// Solved free-state quantities for one (g, p_I).
struct NetworkState {
    Eigen::VectorXd p_out;   // output potentials, volts
    Eigen::VectorXd v;       // branch voltages, volts
    Eigen::VectorXd current; // branch currents i = G v, amperes
    double power = 0.0;      // total dissipated power v^T G v, watts
};

/// Solves the circuit physics for a fixed topology. Caches the incidence
/// blocks, and the Cholesky factorization of D_O G D_O^T per conductance
/// vector, so that repeated solves against many input vectors are cheap.
///
/// All methods are const after set_conductances; distinct instances may be
/// used concurrently.
class NetworkSolver {
public:
    explicit NetworkSolver(const CircuitGraph& graph)
        : d_in_(graph.input_incidence()),
          d_out_(graph.output_incidence()),
          connected_(graph.is_connected()) {}

    const Eigen::MatrixXd& input_incidence() const { return d_in_; }
    const Eigen::MatrixXd& output_incidence() const { return d_out_; }

    void set_conductances(const ConductanceVector& g) {
        if (g.size() != d_in_.cols()) {
            throw ShapeError("conductance vector length does not match branch count");
        }
        if (!connected_) {
            throw SingularLaplacianError(
                "D_O G D_O^T is singular: the circuit graph is disconnected");
        }
        g_ = g.values();
        // D_O G D_O^T assembled as (D_O * diag(g)) * D_O^T.
        laplacian_oo_ = (d_out_ * g_.asDiagonal()) * d_out_.transpose();
        factorization_.compute(laplacian_oo_);
    }

    /// Free-state output potentials: solve (D_O G D_O^T) p_O = -D_O G D_I^T p_I.
    Eigen::VectorXd output_potentials(const Eigen::VectorXd& p_in) const {
        check_input(p_in);
        const Eigen::VectorXd rhs =
            -d_out_ * g_.cwiseProduct(d_in_.transpose() * p_in);
        const Eigen::VectorXd p_out = factorization_.solve(rhs);
        const double residual = (laplacian_oo_ * p_out - rhs).norm();
        if (!(residual <= kSolveTolerance * (1.0 + rhs.norm()))) {
            throw SingularLaplacianError(
                "output-node solve residual " + format_float(residual) +
                " exceeds tolerance; D_O G D_O^T is singular or ill-conditioned");
        }
        return p_out;
    }

    /// Free-state branch voltages v = D_I^T p_I + D_O^T p_O(g).
    Eigen::VectorXd branch_voltages(const Eigen::VectorXd& p_in) const {
        return d_in_.transpose() * p_in +
               d_out_.transpose() * output_potentials(p_in);
    }

    /// Clamped-state branch voltages v^D = D_I^T p_I + D_O^T p_O^D;
    /// independent of the conductances.
    Eigen::VectorXd clamped_voltages(const Eigen::VectorXd& p_in,
                                     const Eigen::VectorXd& p_out_desired) const {
        check_input(p_in);
        if (p_out_desired.size() != d_out_.rows()) {
            throw ShapeError("desired output potential vector has wrong length");
        }
        return d_in_.transpose() * p_in + d_out_.transpose() * p_out_desired;
    }

    NetworkState solve(const Eigen::VectorXd& p_in) const {
        NetworkState state;
        state.p_out = output_potentials(p_in);
        state.v = d_in_.transpose() * p_in + d_out_.transpose() * state.p_out;
        state.current = g_.cwiseProduct(state.v);
        state.power = state.v.dot(state.current);
        return state;
    }

private:
    void check_input(const Eigen::VectorXd& p_in) const {
        if (p_in.size() != d_in_.rows()) {
            throw ShapeError("input potential vector has wrong length");
        }
        if (g_.size() == 0 && d_in_.cols() != 0) {
            throw InvalidArgumentError("set_conductances must be called first");
        }
    }

    Eigen::MatrixXd d_in_, d_out_;
    bool connected_;
    Eigen::VectorXd g_;
    Eigen::MatrixXd laplacian_oo_;
    Eigen::LDLT<Eigen::MatrixXd> factorization_;
};

inline Eigen::VectorXd solve_output_potentials(const CircuitGraph& graph,
                                               const ConductanceVector& g,
                                               const Eigen::VectorXd& p_in) {
    NetworkSolver solver(graph);
    solver.set_conductances(g);
    return solver.output_potentials(p_in);
}

inline Eigen::VectorXd branch_voltages(const CircuitGraph& graph,
                                       const ConductanceVector& g,
                                       const Eigen::VectorXd& p_in) {
    NetworkSolver solver(graph);
    solver.set_conductances(g);
    return solver.branch_voltages(p_in);
}

inline Eigen::VectorXd clamped_voltages(const CircuitGraph& graph,
                                        const Eigen::VectorXd& p_in,
                                        const Eigen::VectorXd& p_out_desired) {
    if (p_in.size() != graph.num_inputs() ||
        p_out_desired.size() != graph.num_outputs()) {
        throw ShapeError("potential vector lengths do not match the partition");
    }
    return graph.input_incidence().transpose() * p_in +
           graph.output_incidence().transpose() * p_out_desired;
}

inline Eigen::VectorXd clamped_voltages(const CircuitGraph& graph,
                                        const TrainingSample& sample) {
    return clamped_voltages(graph, sample.p_in, sample.p_out_desired);
}

/// Total dissipated power sum_k g_k v_k^2.
inline double total_power(const ConductanceVector& g, const Eigen::VectorXd& v) {
    if (v.size() != g.size()) {
        throw ShapeError("voltage vector length does not match conductance vector");
    }
    return v.dot(g.values().cwiseProduct(v));
}

/// Input nodal currents j_I = D_I G v. Not needed by the learning
/// iterations; exposed for completeness.
inline Eigen::VectorXd input_currents(const CircuitGraph& graph,
                                      const ConductanceVector& g,
                                      const Eigen::VectorXd& v) {
    if (v.size() != g.size() || v.size() != graph.num_branches()) {
        throw ShapeError("voltage vector length does not match branch count");
    }
    return graph.input_incidence() * g.values().cwiseProduct(v);
}

inline NetworkState solve_network(const CircuitGraph& graph,
                                  const ConductanceVector& g,
                                  const Eigen::VectorXd& p_in) {
    NetworkSolver solver(graph);
    solver.set_conductances(g);
    return solver.solve(p_in);
}

}  // namespace resistnet
