#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "resistnet/common.hpp"
#include "resistnet/graph.hpp"
#include "resistnet/instances.hpp"
#include "resistnet/learning.hpp"
#include "resistnet/random.hpp"
#include "resistnet/solver.hpp"
#include "resistnet/verify.hpp"

namespace resistnet {

enum class ExperimentKind { StepSizeSweep, SizeSweep, Stochastic, Verify };

/// Parsed experiment description. Mirrors the plain-text config format:
/// one `key = value` per line, a `[experiment]` section header, `#` comments.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Verify;
    int n_in = 0;
    int n_out = 0;
    std::optional<std::string> graph_file;
    double epsilon = 0.1;
    std::vector<double> gammas;            // step-size sweep
    double gamma = 0.0;                    // size sweep
    double schedule_a = 10.0;              // stochastic: gamma_t = a/(1+t)^p
    double schedule_p = 1.0;
    long iterations = 20;
    std::vector<long> branch_counts;       // size sweep
    double target_low = 0.0;               // hidden-network conductance range
    double target_high = 10.0;
    std::string input_kind = "ramp";       // ramp | uniform
    double input_low = -5.0;
    double input_high = 5.0;
    int num_samples = 100;                 // stochastic
    std::uint64_t seed = 0;
    std::uint64_t source_hash = 0;         // FNV-1a of the config text
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for key '" + key + "': " + value);
    }
}

inline long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for key '" + key + "': " + value);
    }
}

}  // namespace detail

inline ExperimentSpec parse_spec(const std::string& text) {
    ExperimentSpec spec;
    spec.source_hash = detail::fnv1a(text);
    bool in_section = false;
    bool kind_set = false;
    std::stringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        if (trimmed == "[experiment]") {
            in_section = true;
            continue;
        }
        if (trimmed.front() == '[') {
            throw ConfigError("unknown section at line " + std::to_string(line_no) +
                              ": " + trimmed);
        }
        if (!in_section) {
            throw ConfigError("key outside the [experiment] section at line " +
                              std::to_string(line_no));
        }
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value' at line " +
                              std::to_string(line_no));
        }
        const std::string key = detail::trim(trimmed.substr(0, eq));
        const std::string value = detail::trim(trimmed.substr(eq + 1));
        if (key == "kind") {
            kind_set = true;
            if (value == "step-size-sweep") spec.kind = ExperimentKind::StepSizeSweep;
            else if (value == "size-sweep") spec.kind = ExperimentKind::SizeSweep;
            else if (value == "stochastic") spec.kind = ExperimentKind::Stochastic;
            else if (value == "verify") spec.kind = ExperimentKind::Verify;
            else throw ConfigError("unknown experiment kind: " + value);
        } else if (key == "n_in") {
            spec.n_in = static_cast<int>(detail::parse_long(key, value));
        } else if (key == "n_out") {
            spec.n_out = static_cast<int>(detail::parse_long(key, value));
        } else if (key == "graph") {
            spec.graph_file = value;
        } else if (key == "epsilon") {
            spec.epsilon = detail::parse_double(key, value);
        } else if (key == "gammas") {
            spec.gammas.clear();
            for (const std::string& part : detail::split_commas(value)) {
                spec.gammas.push_back(detail::parse_double(key, part));
            }
        } else if (key == "gamma") {
            spec.gamma = detail::parse_double(key, value);
        } else if (key == "schedule_a") {
            spec.schedule_a = detail::parse_double(key, value);
        } else if (key == "schedule_p") {
            spec.schedule_p = detail::parse_double(key, value);
        } else if (key == "iterations") {
            spec.iterations = detail::parse_long(key, value);
        } else if (key == "branch_counts") {
            spec.branch_counts.clear();
            for (const std::string& part : detail::split_commas(value)) {
                spec.branch_counts.push_back(detail::parse_long(key, part));
            }
        } else if (key == "target_low") {
            spec.target_low = detail::parse_double(key, value);
        } else if (key == "target_high") {
            spec.target_high = detail::parse_double(key, value);
        } else if (key == "input") {
            if (value != "ramp" && value != "uniform") {
                throw ConfigError("input must be 'ramp' or 'uniform', got " + value);
            }
            spec.input_kind = value;
        } else if (key == "input_low") {
            spec.input_low = detail::parse_double(key, value);
        } else if (key == "input_high") {
            spec.input_high = detail::parse_double(key, value);
        } else if (key == "num_samples") {
            spec.num_samples = static_cast<int>(detail::parse_long(key, value));
        } else if (key == "seed") {
            spec.seed = static_cast<std::uint64_t>(detail::parse_long(key, value));
        } else {
            throw ConfigError("unknown key at line " + std::to_string(line_no) +
                              ": " + key);
        }
    }
    if (!kind_set) throw ConfigError("missing 'kind' in [experiment] section");
    if (spec.epsilon <= 0.0) throw ConfigError("epsilon must be positive");
    if (spec.iterations < 1) throw ConfigError("iterations must be at least 1");
    return spec;
}

inline ExperimentSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_spec(buffer.str());
}

/// Named CSV artifact with its full contents; callers decide where to write.
struct Artifact {
    std::string filename;
    std::string content;
};

struct ExperimentResult {
    std::vector<Artifact> artifacts;
    bool success = true;
    std::string summary;
};

namespace detail {

inline std::string provenance(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "# resistnet " << kVersion << " spec_hash="
        << std::hex << spec.source_hash << std::dec << " seed=" << spec.seed
        << "\n";
    return out.str();
}

inline CircuitGraph spec_graph(const ExperimentSpec& spec) {
    if (spec.graph_file) return read_graph_file(*spec.graph_file);
    if (spec.n_in < 1 || spec.n_out < 1) {
        throw ConfigError("n_in and n_out must be at least 1 (or give a graph file)");
    }
    return CircuitGraph::crossbar(spec.n_in, spec.n_out);
}

/// Hidden-network target conductances: uniform on (max(target_low, eps),
/// target_high], so that the realizing network lies in C_eps and the sampled
/// target is feasible.
inline Eigen::VectorXd spec_hidden_network(const ExperimentSpec& spec,
                                           Eigen::Index num_branches, Rng& rng) {
    const double low = std::max(spec.target_low, spec.epsilon);
    if (!(spec.target_high > low)) {
        throw ConfigError("target_high must exceed max(target_low, epsilon)");
    }
    Eigen::VectorXd g(num_branches);
    for (Eigen::Index k = 0; k < num_branches; ++k) {
        g[k] = rng.uniform_open_low(low, spec.target_high);
    }
    return g;
}

inline std::string gamma_label(double gamma) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", gamma);
    return buf;
}

/// Error column per iteration; traces that converge early are padded with
/// their final error so the sweep columns stay rectangular.
inline std::vector<double> error_column(const RunTrace& trace, long rows) {
    std::vector<double> column;
    column.reserve(rows);
    for (long t = 0; t < rows; ++t) {
        const std::size_t idx =
            std::min<std::size_t>(t, trace.records.size() - 1);
        column.push_back(trace.records[idx].error);
    }
    return column;
}

}  // namespace detail

/// Step-size sweep: one hidden target instance, Algorithm 1 from g0 = 2 S
/// for each gamma; curves in one CSV column per gamma, 2/K in the header.
inline ExperimentResult experiment_step_size_sweep(const ExperimentSpec& spec,
                                                   int threads = 1) {
    if (spec.gammas.empty()) throw ConfigError("gammas must be nonempty");
    for (double gamma : spec.gammas) {
        if (!(gamma > 0.0)) throw ConfigError("all step sizes must be positive");
    }
    const CircuitGraph graph = detail::spec_graph(spec);
    const Eigen::VectorXd p_in = ramp_inputs(graph.num_inputs());
    Rng target_rng(Rng::derive_seed(spec.seed, 0));
    const TrainingSample sample = feasible_sample(
        graph,
        detail::spec_hidden_network(spec, graph.num_branches(), target_rng),
        spec.epsilon, p_in);
    const double k_bound = lipschitz_bound_K(graph, p_in, spec.epsilon);

    const auto run_one = [&](double gamma) {
        LearningConfig config;
        config.gamma = gamma;
        config.epsilon = spec.epsilon;
        config.max_iterations = spec.iterations;
        config.stop_tolerance = 0.0;
        return run_contrastive_learning(
            graph,
            ConductanceVector::uniform(graph.num_branches(), 2.0, spec.epsilon),
            sample, config);
    };

    std::vector<RunTrace> traces(spec.gammas.size());
    if (threads > 1) {
        std::vector<std::future<RunTrace>> futures;
        for (double gamma : spec.gammas) {
            futures.push_back(
                std::async(std::launch::async, run_one, gamma));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) {
            traces[i] = futures[i].get();
        }
    } else {
        for (std::size_t i = 0; i < spec.gammas.size(); ++i) {
            traces[i] = run_one(spec.gammas[i]);
        }
    }

    const long rows = spec.iterations + 1;
    std::ostringstream csv;
    csv << detail::provenance(spec);
    csv << "# two_over_K=" << format_float(2.0 / k_bound) << "\n";
    csv << "t";
    for (double gamma : spec.gammas) {
        csv << ",gamma_" << detail::gamma_label(gamma);
    }
    csv << "\n";
    std::vector<std::vector<double>> columns;
    for (const RunTrace& trace : traces) {
        columns.push_back(detail::error_column(trace, rows));
    }
    for (long t = 0; t < rows; ++t) {
        csv << t;
        for (const auto& column : columns) {
            csv << ',' << format_float(column[t]);
        }
        csv << "\n";
    }
    ExperimentResult result;
    result.artifacts.push_back({"step_size_sweep.csv", csv.str()});
    result.summary = "two_over_K=" + format_float(2.0 / k_bound);
    return result;
}

/// Size sweep: square crossbars with the configured branch counts, fixed
/// gamma; error curves plus 2/K versus branch count.
inline ExperimentResult experiment_size_sweep(const ExperimentSpec& spec,
                                              int threads = 1) {
    if (spec.branch_counts.empty()) {
        throw ConfigError("branch_counts must be nonempty");
    }
    if (!(spec.gamma > 0.0)) throw ConfigError("gamma must be positive");
    std::vector<int> sides;
    for (long b : spec.branch_counts) {
        const int side = static_cast<int>(std::llround(std::sqrt(
            static_cast<double>(b))));
        if (static_cast<long>(side) * side != b) {
            throw ConfigError("branch count " + std::to_string(b) +
                              " is not a perfect square");
        }
        sides.push_back(side);
    }

    struct SizeRun {
        RunTrace trace;
        double two_over_k = 0.0;
    };
    const auto run_one = [&](std::size_t index) {
        const int side = sides[index];
        const CircuitGraph graph = CircuitGraph::crossbar(side, side);
        const Eigen::VectorXd p_in = ramp_inputs(side);
        Rng target_rng(Rng::derive_seed(spec.seed, index));
        const TrainingSample sample = feasible_sample(
            graph,
            detail::spec_hidden_network(spec, graph.num_branches(), target_rng),
            spec.epsilon, p_in);
        LearningConfig config;
        config.gamma = spec.gamma;
        config.epsilon = spec.epsilon;
        config.max_iterations = spec.iterations;
        config.stop_tolerance = 0.0;
        SizeRun run;
        run.trace = run_contrastive_learning(
            graph,
            ConductanceVector::uniform(graph.num_branches(), 2.0, spec.epsilon),
            sample, config);
        run.two_over_k = 2.0 / lipschitz_bound_K(graph, p_in, spec.epsilon);
        return run;
    };

    std::vector<SizeRun> runs(sides.size());
    if (threads > 1) {
        std::vector<std::future<SizeRun>> futures;
        for (std::size_t i = 0; i < sides.size(); ++i) {
            futures.push_back(std::async(std::launch::async, run_one, i));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) {
            runs[i] = futures[i].get();
        }
    } else {
        for (std::size_t i = 0; i < sides.size(); ++i) runs[i] = run_one(i);
    }

    const long rows = spec.iterations + 1;
    std::ostringstream errors_csv;
    errors_csv << detail::provenance(spec);
    errors_csv << "t";
    for (long b : spec.branch_counts) errors_csv << ",B" << b;
    errors_csv << "\n";
    std::vector<std::vector<double>> columns;
    for (const SizeRun& run : runs) {
        columns.push_back(detail::error_column(run.trace, rows));
    }
    for (long t = 0; t < rows; ++t) {
        errors_csv << t;
        for (const auto& column : columns) {
            errors_csv << ',' << format_float(column[t]);
        }
        errors_csv << "\n";
    }

    std::ostringstream bound_csv;
    bound_csv << detail::provenance(spec);
    bound_csv << "branches,two_over_K\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        bound_csv << spec.branch_counts[i] << ','
                  << format_float(runs[i].two_over_k) << "\n";
    }

    ExperimentResult result;
    result.artifacts.push_back({"size_sweep_error.csv", errors_csv.str()});
    result.artifacts.push_back({"size_sweep_bound.csv", bound_csv.str()});
    return result;
}

/// Stochastic Contrastive Learning with the power schedule a/(1+t)^p over a
/// sampled training set; mean error per iteration.
inline ExperimentResult experiment_stochastic(const ExperimentSpec& spec) {
    if (spec.num_samples < 1) throw ConfigError("num_samples must be at least 1");
    const CircuitGraph graph = detail::spec_graph(spec);
    Rng target_rng(Rng::derive_seed(spec.seed, 0));
    const Eigen::VectorXd hidden =
        detail::spec_hidden_network(spec, graph.num_branches(), target_rng);

    Rng input_rng(Rng::derive_seed(spec.seed, 1));
    TrainingSet samples;
    samples.reserve(spec.num_samples);
    for (int j = 0; j < spec.num_samples; ++j) {
        Eigen::VectorXd p_in(graph.num_inputs());
        if (spec.input_kind == "ramp") {
            p_in = ramp_inputs(graph.num_inputs());
        } else {
            for (Eigen::Index k = 0; k < p_in.size(); ++k) {
                p_in[k] = input_rng.uniform(spec.input_low, spec.input_high);
            }
        }
        samples.push_back(feasible_sample(graph, hidden, spec.epsilon, p_in));
    }

    LearningConfig config;
    config.schedule = StepSchedule::power(spec.schedule_a, spec.schedule_p);
    config.epsilon = spec.epsilon;
    config.max_iterations = spec.iterations;
    config.stop_tolerance = 0.0;
    config.rng_seed = Rng::derive_seed(spec.seed, 2);
    const RunTrace trace = run_stochastic_cl(
        graph,
        ConductanceVector::uniform(graph.num_branches(), 2.0, spec.epsilon),
        samples, config);

    std::ostringstream csv;
    csv << detail::provenance(spec);
    csv << "t,mean_error\n";
    for (const TraceRecord& r : trace.records) {
        csv << r.t << ',' << format_float(r.error) << "\n";
    }
    ExperimentResult result;
    result.artifacts.push_back({"stochastic.csv", csv.str()});
    result.success = trace.status != RunStatus::Error;
    if (!result.success) result.summary = trace.message;
    return result;
}

/// Verification suites over seeded random instances.
inline ExperimentResult experiment_verify(const ExperimentSpec& spec) {
    const std::vector<SuiteResult> suites = run_verification(spec.seed);
    std::ostringstream csv;
    csv << detail::provenance(spec);
    std::ostringstream body;
    write_suite_csv(body, suites);
    csv << body.str();
    ExperimentResult result;
    result.artifacts.push_back({"verify.csv", csv.str()});
    for (const SuiteResult& suite : suites) {
        if (!suite.passed) {
            result.success = false;
            result.summary += suite.name + " failed: " + suite.detail + "\n";
        }
    }
    return result;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       int threads = 1) {
    switch (spec.kind) {
        case ExperimentKind::StepSizeSweep:
            return experiment_step_size_sweep(spec, threads);
        case ExperimentKind::SizeSweep:
            return experiment_size_sweep(spec, threads);
        case ExperimentKind::Stochastic:
            return experiment_stochastic(spec);
        case ExperimentKind::Verify:
            return experiment_verify(spec);
    }
    throw ConfigError("unreachable experiment kind");
}

}  // namespace resistnet
