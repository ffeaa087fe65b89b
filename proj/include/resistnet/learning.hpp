#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "resistnet/common.hpp"
#include "resistnet/graph.hpp"
#include "resistnet/random.hpp"
#include "resistnet/solver.hpp"

namespace resistnet {

/// Euclidean projection onto C_eps: the box is separable, so the projection
/// is the elementwise clamp max(g_k, eps). Idempotent.
inline ConductanceVector project_c_eps(const Eigen::VectorXd& g, double epsilon) {
    if (epsilon <= 0.0) {
        throw InvalidArgumentError("epsilon must be positive");
    }
    return ConductanceVector(g.cwiseMax(epsilon), epsilon);
}

/// The distributed surrogate gradient h(g) = (v^D)^2 - (v(g))^2, elementwise.
/// Equals the partial gradient of the surrogate cost with the dependence of
/// v on g frozen.
inline Eigen::VectorXd surrogate_gradient_h(const CircuitGraph& graph,
                                            const ConductanceVector& g,
                                            const TrainingSample& sample) {
    const Eigen::VectorXd v = branch_voltages(graph, g, sample.p_in);
    const Eigen::VectorXd vd = clamped_voltages(graph, sample);
    return vd.cwiseProduct(vd) - v.cwiseProduct(v);
}

/// Learning cost Q(g) = (v^D)^T G v^D - v(g)^T G v(g): the power dissipated
/// in the clamped state minus the power in the free state. Nonnegative, and
/// zero exactly when p_O(g) = p_O^D.
inline double cost_q(const CircuitGraph& graph, const ConductanceVector& g,
                     const TrainingSample& sample) {
    const Eigen::VectorXd v = branch_voltages(graph, g, sample.p_in);
    const Eigen::VectorXd vd = clamped_voltages(graph, sample);
    return total_power(g, vd) - total_power(g, v);
}

/// One Contrastive Learning update: T(g) = P_{C_eps}(g - gamma * h(g)).
inline ConductanceVector cl_step(const CircuitGraph& graph,
                                 const ConductanceVector& g,
                                 const TrainingSample& sample, double gamma) {
    if (gamma <= 0.0) {
        throw InvalidArgumentError("step size gamma must be positive");
    }
    const Eigen::VectorXd h = surrogate_gradient_h(graph, g, sample);
    return project_c_eps(g.values() - gamma * h, g.epsilon());
}

/// Theoretical Lipschitz constant of h on C_eps:
///   K = (2/eps) (||D_I|| + sqrt(N_I N_O) ||D_O||)^2 ||p_I||^2,
/// with spectral norms. Convergence is guaranteed for gamma in (0, 2/K).
inline double lipschitz_bound_K(const CircuitGraph& graph,
                                const Eigen::VectorXd& p_in, double epsilon) {
    if (epsilon <= 0.0) {
        throw InvalidArgumentError("epsilon must be positive");
    }
    if (p_in.size() != graph.num_inputs()) {
        throw ShapeError("input potential vector has wrong length");
    }
    const auto spectral_norm = [](const Eigen::MatrixXd& m) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m * m.transpose());
        return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
    };
    const double norm_di = spectral_norm(graph.input_incidence());
    const double norm_do = spectral_norm(graph.output_incidence());
    const double n_io = static_cast<double>(graph.num_inputs()) *
                        static_cast<double>(graph.num_outputs());
    const double base = norm_di + std::sqrt(n_io) * norm_do;
    return 2.0 / epsilon * base * base * p_in.squaredNorm();
}

/// Step-size schedule gamma_t, either constant or from the power family
/// a/(1+t)^p.
class StepSchedule {
public:
    enum class Kind { Constant, Power };

    static StepSchedule constant(double gamma) {
        StepSchedule s;
        s.kind_ = Kind::Constant;
        s.a_ = gamma;
        return s;
    }

    /// gamma_t = a / (1 + t)^p.
    static StepSchedule power(double a, double p) {
        StepSchedule s;
        s.kind_ = Kind::Power;
        s.a_ = a;
        s.p_ = p;
        return s;
    }

    double at(long t) const {
        if (kind_ == Kind::Constant) return a_;
        return a_ / std::pow(1.0 + static_cast<double>(t), p_);
    }

    Kind kind() const { return kind_; }
    double scale() const { return a_; }
    double exponent() const { return p_; }

private:
    Kind kind_ = Kind::Constant;
    double a_ = 0.0;
    double p_ = 0.0;
};

struct ScheduleDiagnostics {
    bool positive = false;
    bool nonincreasing = false;
    /// Whether sum_t gamma_t diverges / sum_t gamma_t^2 converges, decided
    /// symbolically for the built-in families. Finite horizons cannot verify
    /// the infinite-sum conditions numerically, so these never hard-fail.
    bool sum_diverges = false;
    bool sum_sq_finite = false;
    std::vector<std::string> warnings;

    bool admissible() const {
        return positive && nonincreasing && sum_diverges && sum_sq_finite;
    }
};

inline ScheduleDiagnostics validate_schedule(const StepSchedule& schedule,
                                             long horizon) {
    ScheduleDiagnostics diag;
    diag.positive = true;
    diag.nonincreasing = true;
    double prev = schedule.at(0);
    for (long t = 0; t < horizon; ++t) {
        const double gamma = schedule.at(t);
        if (!(gamma > 0.0)) diag.positive = false;
        if (gamma > prev) diag.nonincreasing = false;
        prev = gamma;
    }
    if (!diag.positive) diag.warnings.push_back("schedule is not strictly positive");
    if (!diag.nonincreasing) diag.warnings.push_back("schedule is not nonincreasing");
    // Symbolic conditions for gamma_t = a/(1+t)^p: the step sum diverges iff
    // p <= 1, the squared sum converges iff p > 1/2.
    const double p = schedule.kind() == StepSchedule::Kind::Constant
                         ? 0.0
                         : schedule.exponent();
    diag.sum_diverges = p <= 1.0;
    diag.sum_sq_finite = p > 0.5;
    if (!diag.sum_diverges) {
        diag.warnings.push_back("sum of step sizes is finite (p > 1)");
    }
    if (!diag.sum_sq_finite) {
        diag.warnings.push_back(
            "sum of squared step sizes diverges (p <= 1/2); constant schedules "
            "fall in this class");
    }
    return diag;
}

enum class RunStatus { Converged, MaxIterations, Error };

inline const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Converged: return "converged";
        case RunStatus::MaxIterations: return "max-iterations";
        case RunStatus::Error: return "error";
    }
    return "unknown";
}

struct TraceRecord {
    long t = 0;
    double error = 0.0;     // ||p_O(g^t) - p_O^D|| (mean over samples in
                            // stochastic mode)
    double residual = 0.0;  // ||g^{t+1} - g^t|| of the step taken at t
    double gamma = 0.0;     // step size used at t (0 for the final record)
    long sample_index = -1; // sample drawn at t; -1 in deterministic mode
};

/// Per-iteration record of a learning run.
struct RunTrace {
    std::vector<TraceRecord> records;
    RunStatus status = RunStatus::Error;
    Eigen::VectorXd final_g;
    std::string message;

    /// CSV export: header `t,error,residual,gamma,sample_index`, floats with
    /// 17 significant digits, sample_index empty in deterministic mode.
    void write_csv(std::ostream& out) const {
        out << "t,error,residual,gamma,sample_index\n";
        for (const TraceRecord& r : records) {
            out << r.t << ',' << format_float(r.error) << ','
                << format_float(r.residual) << ',' << format_float(r.gamma) << ',';
            if (r.sample_index >= 0) out << r.sample_index;
            out << '\n';
        }
    }
};

struct LearningConfig {
    double gamma = 0.0;  // deterministic drivers
    StepSchedule schedule = StepSchedule::constant(0.0);  // stochastic driver
    double epsilon = 0.0;
    long max_iterations = 1000;
    double stop_tolerance = 1e-10;
    std::uint64_t rng_seed = 0;
    /// Stochastic mode: record the full-dataset mean error each iteration
    /// (n solves per iteration). Disable for large n.
    bool record_mean_error = true;
};

namespace detail {

inline void check_config_common(const LearningConfig& config) {
    if (config.epsilon <= 0.0) {
        throw InvalidArgumentError("config.epsilon must be positive");
    }
    if (config.max_iterations < 1) {
        throw InvalidArgumentError("config.max_iterations must be at least 1");
    }
    if (config.stop_tolerance < 0.0) {
        throw InvalidArgumentError("config.stop_tolerance must be nonnegative");
    }
}

/// Shared deterministic loop: `direction` computes the (averaged) surrogate
/// gradient at the current conductances.
template <typename DirectionFn, typename ErrorFn>
RunTrace iterate(NetworkSolver& solver, Eigen::VectorXd g, double epsilon,
                 double gamma, long max_iterations, double stop_tolerance,
                 DirectionFn&& direction, ErrorFn&& error_fn) {
    RunTrace trace;
    trace.records.reserve(static_cast<std::size_t>(max_iterations) + 1);
    try {
        for (long t = 0;; ++t) {
            solver.set_conductances(ConductanceVector(g, epsilon));
            const double err = error_fn(solver);
            if (err <= stop_tolerance) {
                trace.records.push_back({t, err, 0.0, 0.0, -1});
                trace.status = RunStatus::Converged;
                break;
            }
            if (t == max_iterations) {
                trace.records.push_back({t, err, 0.0, 0.0, -1});
                trace.status = RunStatus::MaxIterations;
                break;
            }
            const Eigen::VectorXd h = direction(solver);
            const Eigen::VectorXd g_next = (g - gamma * h).cwiseMax(epsilon);
            trace.records.push_back({t, err, (g_next - g).norm(), gamma, -1});
            g = g_next;
        }
    } catch (const Error& e) {
        trace.status = RunStatus::Error;
        trace.message = e.what();
    }
    trace.final_g = g;
    return trace;
}

}  // namespace detail

/// Algorithm 1: the deterministic fixed-point iteration g^{t+1} = T(g^t)
/// for a single training sample. Stops when ||p_O(g^t) - p_O^D|| drops to
/// stop_tolerance or the iteration budget is exhausted.
inline RunTrace run_contrastive_learning(const CircuitGraph& graph,
                                         const ConductanceVector& g0,
                                         const TrainingSample& sample,
                                         const LearningConfig& config) {
    detail::check_config_common(config);
    if (config.gamma <= 0.0) {
        throw InvalidArgumentError("config.gamma must be positive");
    }
    NetworkSolver solver(graph);
    const Eigen::VectorXd vd = clamped_voltages(graph, sample);
    const Eigen::VectorXd vd_sq = vd.cwiseProduct(vd);
    return detail::iterate(
        solver, g0.values(), config.epsilon, config.gamma, config.max_iterations,
        config.stop_tolerance,
        [&](const NetworkSolver& s) -> Eigen::VectorXd {
            const Eigen::VectorXd v = s.branch_voltages(sample.p_in);
            return vd_sq - v.cwiseProduct(v);
        },
        [&](const NetworkSolver& s) {
            return (s.output_potentials(sample.p_in) - sample.p_out_desired).norm();
        });
}

/// Deterministic multi-sample mode: the direction is the mean of the
/// per-sample surrogate gradients, the stopping error the mean output error.
inline RunTrace run_batch_cl(const CircuitGraph& graph,
                             const ConductanceVector& g0,
                             const TrainingSet& samples,
                             const LearningConfig& config) {
    detail::check_config_common(config);
    if (config.gamma <= 0.0) {
        throw InvalidArgumentError("config.gamma must be positive");
    }
    if (samples.empty()) {
        throw InvalidArgumentError("training set must be nonempty");
    }
    NetworkSolver solver(graph);
    std::vector<Eigen::VectorXd> vd_sq;
    vd_sq.reserve(samples.size());
    for (const TrainingSample& s : samples) {
        const Eigen::VectorXd vd = clamped_voltages(graph, s);
        vd_sq.push_back(vd.cwiseProduct(vd));
    }
    const double n = static_cast<double>(samples.size());
    return detail::iterate(
        solver, g0.values(), config.epsilon, config.gamma, config.max_iterations,
        config.stop_tolerance,
        [&](const NetworkSolver& s) -> Eigen::VectorXd {
            Eigen::VectorXd h = Eigen::VectorXd::Zero(graph.num_branches());
            for (std::size_t l = 0; l < samples.size(); ++l) {
                const Eigen::VectorXd v = s.branch_voltages(samples[l].p_in);
                h += vd_sq[l] - v.cwiseProduct(v);
            }
            return h / n;
        },
        [&](const NetworkSolver& s) {
            double err = 0.0;
            for (const TrainingSample& sample : samples) {
                err += (s.output_potentials(sample.p_in) - sample.p_out_desired)
                           .norm();
            }
            return err / n;
        });
}

/// Algorithm 2: at each step draw a sample index uniformly at random
/// (with replacement) and apply the projected update with step gamma_t.
/// The trace records the full-dataset mean error when enabled.
inline RunTrace run_stochastic_cl(const CircuitGraph& graph,
                                  const ConductanceVector& g0,
                                  const TrainingSet& samples,
                                  const LearningConfig& config) {
    detail::check_config_common(config);
    if (samples.empty()) {
        throw InvalidArgumentError("training set must be nonempty");
    }
    const ScheduleDiagnostics sched =
        validate_schedule(config.schedule, config.max_iterations);
    if (!sched.positive || !sched.nonincreasing) {
        throw InvalidArgumentError(
            "stochastic schedule must be positive and nonincreasing");
    }

    NetworkSolver solver(graph);
    std::vector<Eigen::VectorXd> vd_sq;
    vd_sq.reserve(samples.size());
    for (const TrainingSample& s : samples) {
        const Eigen::VectorXd vd = clamped_voltages(graph, s);
        vd_sq.push_back(vd.cwiseProduct(vd));
    }
    Rng rng(config.rng_seed);
    const double n = static_cast<double>(samples.size());

    RunTrace trace;
    trace.records.reserve(static_cast<std::size_t>(config.max_iterations) + 1);
    Eigen::VectorXd g = g0.values();
    try {
        for (long t = 0;; ++t) {
            solver.set_conductances(ConductanceVector(g, config.epsilon));
            double err = 0.0;
            if (config.record_mean_error || config.stop_tolerance > 0.0) {
                for (const TrainingSample& sample : samples) {
                    err += (solver.output_potentials(sample.p_in) -
                            sample.p_out_desired)
                               .norm();
                }
                err /= n;
            }
            if (config.record_mean_error && err <= config.stop_tolerance) {
                trace.records.push_back({t, err, 0.0, 0.0, -1});
                trace.status = RunStatus::Converged;
                break;
            }
            if (t == config.max_iterations) {
                trace.records.push_back({t, err, 0.0, 0.0, -1});
                trace.status = RunStatus::MaxIterations;
                break;
            }
            const long l = static_cast<long>(
                rng.uniform_index(static_cast<std::uint64_t>(samples.size())));
            const double gamma = config.schedule.at(t);
            const Eigen::VectorXd v = solver.branch_voltages(samples[l].p_in);
            const Eigen::VectorXd h = vd_sq[l] - v.cwiseProduct(v);
            const Eigen::VectorXd g_next = (g - gamma * h).cwiseMax(config.epsilon);
            trace.records.push_back({t, err, (g_next - g).norm(), gamma, l});
            g = g_next;
        }
    } catch (const Error& e) {
        trace.status = RunStatus::Error;
        trace.message = e.what();
    }
    trace.final_g = g;
    return trace;
}

}  // namespace resistnet
