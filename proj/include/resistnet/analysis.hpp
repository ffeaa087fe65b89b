#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "resistnet/common.hpp"
#include "resistnet/graph.hpp"
#include "resistnet/learning.hpp"
#include "resistnet/random.hpp"
#include "resistnet/solver.hpp"

namespace resistnet {

/// W(g) = D_O^T (D_O G D_O^T)^{-1} D_O. Symmetric positive semidefinite,
/// with lambda_max(W(g)) <= 1/eps on C_eps.
inline Eigen::MatrixXd w_matrix(const CircuitGraph& graph,
                                const ConductanceVector& g) {
    if (!graph.is_connected()) {
        throw SingularLaplacianError(
            "D_O G D_O^T is singular: the circuit graph is disconnected");
    }
    const Eigen::MatrixXd d_out = graph.output_incidence();
    const Eigen::MatrixXd lap_oo =
        (d_out * g.values().asDiagonal()) * d_out.transpose();
    return d_out.transpose() * lap_oo.ldlt().solve(d_out);
}

/// Closed-form Jacobian of h: J(g) = 2 diag(v(g)) W(g) diag(v(g)).
inline Eigen::MatrixXd jacobian_closed_form(const CircuitGraph& graph,
                                            const ConductanceVector& g,
                                            const TrainingSample& sample) {
    const Eigen::VectorXd v = branch_voltages(graph, g, sample.p_in);
    return 2.0 * v.asDiagonal() * w_matrix(graph, g) * v.asDiagonal();
}

/// Independent oracle for the Jacobian: central differences of h, column k
/// is (h(g + step e_k) - h(g - step e_k)) / (2 step). Requires g to sit
/// inside C_eps by a margin larger than the step.
inline Eigen::MatrixXd jacobian_finite_difference(const CircuitGraph& graph,
                                                  const ConductanceVector& g,
                                                  const TrainingSample& sample,
                                                  double step = 1e-6) {
    if (step <= 0.0) {
        throw InvalidArgumentError("finite-difference step must be positive");
    }
    const Eigen::Index b = g.size();
    if ((g.values().array() - g.epsilon()).minCoeff() <= step) {
        throw InvalidArgumentError(
            "conductances must be interior to C_eps by more than the step");
    }
    Eigen::MatrixXd jac(b, b);
    Eigen::VectorXd perturbed = g.values();
    for (Eigen::Index k = 0; k < b; ++k) {
        perturbed[k] = g.values()[k] + step;
        const Eigen::VectorXd h_plus = surrogate_gradient_h(
            graph, ConductanceVector(perturbed, g.epsilon()), sample);
        perturbed[k] = g.values()[k] - step;
        const Eigen::VectorXd h_minus = surrogate_gradient_h(
            graph, ConductanceVector(perturbed, g.epsilon()), sample);
        perturbed[k] = g.values()[k];
        jac.col(k) = (h_plus - h_minus) / (2.0 * step);
    }
    return jac;
}

struct JacobianReport {
    Eigen::MatrixXd jacobian;
    double symmetry_defect = 0.0;  // ||J - J^T||
    double min_eigenvalue = 0.0;   // smallest eigenvalue of (J + J^T)/2
    double fd_defect = 0.0;        // max-entry difference to the FD oracle
};

inline JacobianReport jacobian_report(const CircuitGraph& graph,
                                      const ConductanceVector& g,
                                      const TrainingSample& sample,
                                      double fd_step = 1e-6) {
    JacobianReport report;
    report.jacobian = jacobian_closed_form(graph, g, sample);
    report.symmetry_defect =
        (report.jacobian - report.jacobian.transpose()).norm();
    // Eigenvalues of the symmetrized matrix, robust to 1e-13-level asymmetry.
    const Eigen::MatrixXd sym =
        0.5 * (report.jacobian + report.jacobian.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    report.min_eigenvalue = eig.eigenvalues().minCoeff();
    const Eigen::MatrixXd fd =
        jacobian_finite_difference(graph, g, sample, fd_step);
    report.fd_defect = (report.jacobian - fd).cwiseAbs().maxCoeff();
    return report;
}

/// The full (non-distributed) gradient of Q:
///   grad Q(g) = h(g) + 2 v(g) .* (W(g) G v(g)),
/// assembled from the closed-form partial derivative of v. This is the
/// baseline update that would require global information at every branch.
inline Eigen::VectorXd full_gradient_q(const CircuitGraph& graph,
                                       const ConductanceVector& g,
                                       const TrainingSample& sample) {
    const Eigen::VectorXd v = branch_voltages(graph, g, sample.p_in);
    const Eigen::VectorXd vd = clamped_voltages(graph, sample);
    const Eigen::MatrixXd w = w_matrix(graph, g);
    const Eigen::VectorXd h = vd.cwiseProduct(vd) - v.cwiseProduct(v);
    return h + 2.0 * v.cwiseProduct(w * g.values().cwiseProduct(v));
}

/// The input-to-output potential map M(g) = -(D_O G D_O^T)^{-1} D_O G D_I^T,
/// so that p_O(g) = M(g) p_I. Row-stochastic with entries in [0, 1].
inline Eigen::MatrixXd io_map_matrix(const CircuitGraph& graph,
                                     const ConductanceVector& g) {
    if (!graph.is_connected()) {
        throw SingularLaplacianError(
            "D_O G D_O^T is singular: the circuit graph is disconnected");
    }
    const Eigen::MatrixXd d_in = graph.input_incidence();
    const Eigen::MatrixXd d_out = graph.output_incidence();
    const Eigen::MatrixXd lap_oo =
        (d_out * g.values().asDiagonal()) * d_out.transpose();
    const Eigen::MatrixXd rhs =
        -(d_out * g.values().asDiagonal()) * d_in.transpose();
    return lap_oo.ldlt().solve(rhs);
}

struct LipschitzTrial {
    double lipschitz_ratio = 0.0;     // ||h(g)-h(g')|| / (K ||g-g'||)
    double cocoercivity_slack = 0.0;  // <dh, dg> - (1/K)||dh||^2
};

struct LipschitzDiagnostics {
    std::vector<LipschitzTrial> trials;
    double bound_k = 0.0;
    double worst_lipschitz_ratio = 0.0;
    double worst_cocoercivity_slack = 0.0;

    /// CSV export: `trial,lipschitz_ratio,cocoercivity_slack` plus a summary.
    void write_csv(std::ostream& out) const {
        out << "trial,lipschitz_ratio,cocoercivity_slack\n";
        for (std::size_t i = 0; i < trials.size(); ++i) {
            out << i << ',' << format_float(trials[i].lipschitz_ratio) << ','
                << format_float(trials[i].cocoercivity_slack) << '\n';
        }
        out << "# K = " << format_float(bound_k)
            << " worst_lipschitz_ratio = " << format_float(worst_lipschitz_ratio)
            << " worst_cocoercivity_slack = "
            << format_float(worst_cocoercivity_slack) << '\n';
    }
};

/// Samples pairs g, g' in C_eps (log-uniform in [eps, 1e3 eps] per branch)
/// and checks the Lipschitz bound ||h(g) - h(g')|| <= K ||g - g'|| together
/// with (1/K)-cocoercivity. Throws PropertyViolationError with the witness
/// on the first violated pair.
inline LipschitzDiagnostics check_lipschitz_cocoercive(
    const CircuitGraph& graph, const TrainingSample& sample, double epsilon,
    long trials, std::uint64_t rng_seed) {
    if (trials < 1) {
        throw InvalidArgumentError("trial count must be at least 1");
    }
    LipschitzDiagnostics diag;
    diag.bound_k = lipschitz_bound_K(graph, sample.p_in, epsilon);
    diag.trials.reserve(static_cast<std::size_t>(trials));
    diag.worst_cocoercivity_slack = std::numeric_limits<double>::infinity();

    NetworkSolver solver(graph);
    const Eigen::VectorXd vd = clamped_voltages(graph, sample);
    const Eigen::VectorXd vd_sq = vd.cwiseProduct(vd);
    const auto h_of = [&](const Eigen::VectorXd& g) -> Eigen::VectorXd {
        solver.set_conductances(ConductanceVector(g, epsilon));
        const Eigen::VectorXd v = solver.branch_voltages(sample.p_in);
        return vd_sq - v.cwiseProduct(v);
    };

    Rng rng(rng_seed);
    const Eigen::Index b = graph.num_branches();
    Eigen::VectorXd g1(b), g2(b);
    for (long trial = 0; trial < trials; ++trial) {
        for (Eigen::Index k = 0; k < b; ++k) {
            g1[k] = rng.log_uniform(epsilon, 1e3 * epsilon);
        }
        for (Eigen::Index k = 0; k < b; ++k) {
            g2[k] = rng.log_uniform(epsilon, 1e3 * epsilon);
        }
        const Eigen::VectorXd dh = h_of(g1) - h_of(g2);
        const Eigen::VectorXd dg = g1 - g2;
        const double dh_norm = dh.norm();
        const double dg_norm = dg.norm();

        LipschitzTrial record;
        record.lipschitz_ratio =
            dg_norm > 0.0 ? dh_norm / (diag.bound_k * dg_norm) : 0.0;
        record.cocoercivity_slack =
            dh.dot(dg) - dh_norm * dh_norm / diag.bound_k;
        diag.trials.push_back(record);
        diag.worst_lipschitz_ratio =
            std::max(diag.worst_lipschitz_ratio, record.lipschitz_ratio);
        diag.worst_cocoercivity_slack =
            std::min(diag.worst_cocoercivity_slack, record.cocoercivity_slack);

        const double scale = dh_norm * dg_norm + dh_norm * dh_norm / diag.bound_k;
        if (record.lipschitz_ratio > 1.0 ||
            record.cocoercivity_slack < -1e-12 * (1.0 + scale)) {
            throw PropertyViolationError(
                "Lipschitz/cocoercivity violation at trial " +
                std::to_string(trial) +
                ": ratio = " + format_float(record.lipschitz_ratio) +
                ", slack = " + format_float(record.cocoercivity_slack));
        }
    }
    return diag;
}

/// Line integral of h along the polyline through the given waypoints,
/// composite Simpson per leg. Used as a path-independence certificate for
/// the existence of the convex potential (symmetric Jacobian implies a
/// conservative field).
inline double path_integral_h(const CircuitGraph& graph,
                              const TrainingSample& sample, double epsilon,
                              const std::vector<Eigen::VectorXd>& waypoints,
                              int segments_per_leg = 256) {
    if (waypoints.size() < 2) {
        throw InvalidArgumentError("need at least two waypoints");
    }
    if (segments_per_leg < 1 || segments_per_leg % 2 != 0) {
        throw InvalidArgumentError("segments_per_leg must be a positive even number");
    }
    NetworkSolver solver(graph);
    const Eigen::VectorXd vd = clamped_voltages(graph, sample);
    const Eigen::VectorXd vd_sq = vd.cwiseProduct(vd);
    const auto h_of = [&](const Eigen::VectorXd& g) -> Eigen::VectorXd {
        solver.set_conductances(ConductanceVector(g, epsilon));
        const Eigen::VectorXd v = solver.branch_voltages(sample.p_in);
        return vd_sq - v.cwiseProduct(v);
    };

    double integral = 0.0;
    for (std::size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
        const Eigen::VectorXd& a = waypoints[leg];
        const Eigen::VectorXd& c = waypoints[leg + 1];
        const Eigen::VectorXd dir = c - a;
        const double dt = 1.0 / segments_per_leg;
        double leg_integral = 0.0;
        for (int s = 0; s <= segments_per_leg; ++s) {
            const double t = s * dt;
            const double f = h_of(a + t * dir).dot(dir);
            const double weight =
                (s == 0 || s == segments_per_leg) ? 1.0 : (s % 2 == 1 ? 4.0 : 2.0);
            leg_integral += weight * f;
        }
        integral += leg_integral * dt / 3.0;
    }
    return integral;
}

}  // namespace resistnet
