// Command-line harness for the resistor-network contrastive learning library:
// experiment runner, verification suites, and the theoretical step-size bound.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "resistnet/experiments.hpp"
#include "resistnet/graph.hpp"
#include "resistnet/learning.hpp"
#include "resistnet/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // property or convergence failure
constexpr int kExitConfig = 2;   // configuration error

void write_artifacts(const std::string& out_dir,
                     const std::vector<resistnet::Artifact>& artifacts) {
    std::filesystem::create_directories(out_dir);
    for (const resistnet::Artifact& artifact : artifacts) {
        const std::filesystem::path path =
            std::filesystem::path(out_dir) / artifact.filename;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw resistnet::ConfigError("cannot write artifact: " + path.string());
        }
        out << artifact.content;
        std::cout << "wrote " << path.string() << "\n";
    }
}

Eigen::VectorXd read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw resistnet::ConfigError("cannot open vector file: " + path);
    std::vector<double> values;
    double x = 0.0;
    while (in >> x) values.push_back(x);
    if (!in.eof()) throw resistnet::ConfigError("malformed number in " + path);
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) {
        v[static_cast<Eigen::Index>(k)] = values[k];
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resistnet: contrastive learning on linear resistor networks"};
    app.require_subcommand(1);

    // run
    std::string spec_path;
    std::string out_dir = ".";
    std::int64_t seed_override = -1;
    int threads = 1;
    CLI::App* run = app.add_subcommand("run", "run an experiment spec file");
    run->add_option("spec", spec_path, "experiment spec file")->required();
    run->add_option("--out", out_dir, "output directory for CSV artifacts");
    run->add_option("--seed", seed_override, "override the spec's seed");
    run->add_option("--threads", threads, "parallel workers for sweeps");

    // verify
    std::uint64_t verify_seed = 42;
    std::string verify_out;
    CLI::App* verify = app.add_subcommand("verify", "run the property suites");
    verify->add_option("--seed", verify_seed, "seed for the random instances");
    verify->add_option("--out", verify_out, "also write verify.csv to this directory");

    // bound
    std::string graph_path, pin_path;
    double eps = 0.0;
    CLI::App* bound = app.add_subcommand(
        "bound", "print the Lipschitz constant K and the step-size bound 2/K");
    bound->add_option("--graph", graph_path, "graph file")->required();
    bound->add_option("--eps", eps, "conductance floor epsilon")->required();
    bound->add_option("--pin", pin_path, "input potential file, one value per line")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            resistnet::ExperimentSpec spec = resistnet::parse_spec_file(spec_path);
            if (seed_override >= 0) {
                spec.seed = static_cast<std::uint64_t>(seed_override);
            }
            const resistnet::ExperimentResult result =
                resistnet::run_experiment(spec, threads);
            write_artifacts(out_dir, result.artifacts);
            if (!result.summary.empty()) std::cout << result.summary << "\n";
            return result.success ? kExitOk : kExitFailure;
        }
        if (verify->parsed()) {
            const std::vector<resistnet::SuiteResult> suites =
                resistnet::run_verification(verify_seed);
            bool all_passed = true;
            for (const resistnet::SuiteResult& suite : suites) {
                std::cout << (suite.passed ? "[PASS] " : "[FAIL] ") << suite.name
                          << ": " << suite.detail << "\n";
                all_passed = all_passed && suite.passed;
            }
            if (!verify_out.empty()) {
                std::ostringstream csv;
                resistnet::write_suite_csv(csv, suites);
                write_artifacts(verify_out, {{"verify.csv", csv.str()}});
            }
            return all_passed ? kExitOk : kExitFailure;
        }
        if (bound->parsed()) {
            const resistnet::CircuitGraph graph =
                resistnet::read_graph_file(graph_path);
            const Eigen::VectorXd p_in = read_vector_file(pin_path);
            const double k = resistnet::lipschitz_bound_K(graph, p_in, eps);
            std::cout << "K = " << resistnet::format_float(k) << "\n"
                      << "2/K = " << resistnet::format_float(2.0 / k) << "\n";
            return kExitOk;
        }
    } catch (const resistnet::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const resistnet::PropertyViolationError& e) {
        std::cerr << "property violation: " << e.what() << "\n";
        return kExitFailure;
    } catch (const resistnet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitConfig;
}
