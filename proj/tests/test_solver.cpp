#include <doctest.h>

#include <Eigen/Dense>

#include "resistnet/graph.hpp"
#include "resistnet/instances.hpp"
#include "resistnet/random.hpp"
#include "resistnet/solver.hpp"

using namespace resistnet;

namespace {

// Voltage divider: path 1-2-3 with node 2 the output.
CircuitGraph divider() { return CircuitGraph(3, {{0, 1}, {1, 2}}, {0, 2}, {1}); }

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

// Independent route for v(g) from the rewritten identity
// v = (I - D_O^T (D_O G D_O^T)^{-1} D_O G) D_I^T p_I.
Eigen::VectorXd branch_voltages_oracle(const CircuitGraph& graph,
                                       const ConductanceVector& g,
                                       const Eigen::VectorXd& p_in) {
    const Eigen::MatrixXd d_in = graph.input_incidence();
    const Eigen::MatrixXd d_out = graph.output_incidence();
    const Eigen::MatrixXd gd = g.values().asDiagonal();
    const Eigen::MatrixXd lap_oo = d_out * gd * d_out.transpose();
    const Eigen::Index b = graph.num_branches();
    const Eigen::MatrixXd proj =
        Eigen::MatrixXd::Identity(b, b) -
        d_out.transpose() * lap_oo.inverse() * d_out * gd;
    return proj * d_in.transpose() * p_in;
}

}  // namespace

TEST_CASE("conductance vector validation") {
    CHECK_THROWS_AS(ConductanceVector(vec2(0.05, 1.0), 0.1), InvalidArgumentError);
    CHECK_THROWS_AS(ConductanceVector(vec2(1.0, 1.0), 0.0), InvalidArgumentError);
    ConductanceVector ok(vec2(0.1, 1.0), 0.1);
    CHECK(ok.epsilon() == 0.1);
}

TEST_CASE("symmetric divider splits the input in half") {
    const Eigen::VectorXd p_out = solve_output_potentials(
        divider(), ConductanceVector(vec2(1.0, 1.0), 0.1), vec2(1.0, 0.0));
    CHECK(p_out.size() == 1);
    CHECK(p_out[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("asymmetric divider follows the closed-form weights") {
    // p_O = (g1 p1 + g2 p3) / (g1 + g2)
    const Eigen::VectorXd p_out = solve_output_potentials(
        divider(), ConductanceVector(vec2(2.0, 1.0), 0.1), vec2(1.0, 0.0));
    CHECK(p_out[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("single input-output branch carries no current") {
    CircuitGraph g(2, {{0, 1}}, {0}, {1});
    const Eigen::VectorXd p_out = solve_output_potentials(
        g, ConductanceVector(vec1(3.7), 0.1), vec1(3.0));
    CHECK(p_out[0] == doctest::Approx(3.0).epsilon(1e-12));
    const Eigen::VectorXd v =
        branch_voltages(g, ConductanceVector(vec1(3.7), 0.1), vec1(3.0));
    CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("divider branch voltages") {
    const Eigen::VectorXd v_even = branch_voltages(
        divider(), ConductanceVector(vec2(1.0, 1.0), 0.1), vec2(1.0, 0.0));
    CHECK(v_even[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v_even[1] == doctest::Approx(0.5).epsilon(1e-12));

    const Eigen::VectorXd v_skew = branch_voltages(
        divider(), ConductanceVector(vec2(2.0, 1.0), 0.1), vec2(1.0, 0.0));
    CHECK(v_skew[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(v_skew[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("clamped voltages") {
    const Eigen::VectorXd vd =
        clamped_voltages(divider(), vec2(1.0, 0.0), vec1(2.0 / 3.0));
    CHECK(vd[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(vd[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // Clamping to the free-state solution reproduces the free-state voltages.
    ConductanceVector g(vec2(1.7, 0.3), 0.1);
    const Eigen::VectorXd p_out =
        solve_output_potentials(divider(), g, vec2(1.0, 0.0));
    const Eigen::VectorXd v = branch_voltages(divider(), g, vec2(1.0, 0.0));
    const Eigen::VectorXd vd2 = clamped_voltages(divider(), vec2(1.0, 0.0), p_out);
    CHECK((v - vd2).norm() == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(clamped_voltages(divider(), vec2(0.0, 0.0), vec1(0.0)).norm() == 0.0);
}

TEST_CASE("clamped voltages shape errors") {
    CHECK_THROWS_AS(clamped_voltages(divider(), vec1(1.0), vec1(0.0)), ShapeError);
    CHECK_THROWS_AS(clamped_voltages(divider(), vec2(1.0, 0.0), vec2(0.0, 0.0)),
                    ShapeError);
}

TEST_CASE("total power") {
    ConductanceVector g(vec2(1.0, 1.0), 0.1);
    CHECK(total_power(g, vec2(0.5, 0.5)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(total_power(g, vec2(0.0, 0.0)) == 0.0);
    CHECK(total_power(g, vec2(1.0, 1.0)) ==
          doctest::Approx(4.0 * total_power(g, vec2(0.5, 0.5))).epsilon(1e-15));
    CHECK_THROWS_AS(total_power(g, vec1(1.0)), ShapeError);
}

TEST_CASE("network state satisfies Ohm's law and KCL at the outputs") {
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        const CircuitGraph graph = random_connected_graph(6, 0.6, rng);
        const ConductanceVector g(
            random_conductances(graph.num_branches(), 0.1, rng), 0.1);
        Eigen::VectorXd p_in(graph.num_inputs());
        for (Eigen::Index k = 0; k < p_in.size(); ++k) {
            p_in[k] = rng.uniform(-1.0, 1.0);
        }
        const NetworkState state = solve_network(graph, g, p_in);
        CHECK((state.current - g.values().cwiseProduct(state.v)).norm() == 0.0);
        const double kcl =
            (graph.output_incidence() * state.current).cwiseAbs().maxCoeff();
        CHECK(kcl <= 1e-10 * (1.0 + state.current.norm()));
        CHECK(state.power >= 0.0);
        CHECK(state.power ==
              doctest::Approx(total_power(g, state.v)).epsilon(1e-12));
    }
}

TEST_CASE("disconnected graphs raise a singular-laplacian error") {
    CircuitGraph disjoint(4, {{0, 1}, {2, 3}}, {0, 2}, {1, 3});
    CHECK_THROWS_AS(
        solve_output_potentials(disjoint,
                                ConductanceVector(vec2(1.0, 1.0), 0.1),
                                vec2(1.0, 0.0)),
        SingularLaplacianError);
}

TEST_CASE("input dimension mismatch raises a shape error") {
    CHECK_THROWS_AS(
        solve_output_potentials(divider(), ConductanceVector(vec2(1.0, 1.0), 0.1),
                                vec1(1.0)),
        ShapeError);
}

TEST_CASE("free state minimizes the total power") {
    Rng rng(17);
    for (int i = 0; i < 20; ++i) {
        const int n = 4 + static_cast<int>(rng.uniform_index(9));
        const CircuitGraph graph = random_connected_graph(n, 0.6, rng);
        const ConductanceVector g(
            random_conductances(graph.num_branches(), 0.1, rng), 0.1);
        Eigen::VectorXd p_in(graph.num_inputs());
        for (Eigen::Index k = 0; k < p_in.size(); ++k) {
            p_in[k] = rng.uniform(-2.0, 2.0);
        }
        const Eigen::VectorXd p_out = solve_output_potentials(graph, g, p_in);
        const double base = total_power(g, clamped_voltages(graph, p_in, p_out));
        for (int j = 0; j < 100; ++j) {
            Eigen::VectorXd delta(p_out.size());
            for (Eigen::Index k = 0; k < delta.size(); ++k) {
                delta[k] = rng.uniform(-1.0, 1.0);
            }
            delta *= 0.1 / delta.norm();
            const double perturbed =
                total_power(g, clamped_voltages(graph, p_in, p_out + delta));
            CHECK(base <= perturbed + 1e-12);
        }
    }
}

TEST_CASE("branch voltages are invariant under conductance scaling") {
    Rng rng(23);
    const CircuitGraph graph = random_connected_graph(7, 0.6, rng);
    const Eigen::VectorXd g = random_conductances(graph.num_branches(), 0.1, rng);
    Eigen::VectorXd p_in(graph.num_inputs());
    for (Eigen::Index k = 0; k < p_in.size(); ++k) p_in[k] = rng.uniform(-1, 1);
    const Eigen::VectorXd v1 =
        branch_voltages(graph, ConductanceVector(g, 0.1), p_in);
    const Eigen::VectorXd v2 =
        branch_voltages(graph, ConductanceVector(5.0 * g, 0.1), p_in);
    CHECK((v1 - v2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("output potentials interpolate the input range") {
    Rng rng(29);
    for (int i = 0; i < 20; ++i) {
        const CircuitGraph graph = random_connected_graph(8, 0.6, rng);
        const ConductanceVector g(
            random_conductances(graph.num_branches(), 0.1, rng), 0.1);
        Eigen::VectorXd p_in(graph.num_inputs());
        for (Eigen::Index k = 0; k < p_in.size(); ++k) {
            p_in[k] = rng.uniform(-3.0, 3.0);
        }
        const Eigen::VectorXd p_out = solve_output_potentials(graph, g, p_in);
        CHECK(p_out.minCoeff() >= p_in.minCoeff() - 1e-10);
        CHECK(p_out.maxCoeff() <= p_in.maxCoeff() + 1e-10);
    }
}

TEST_CASE("the two formulas for v(g) agree") {
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
        const CircuitGraph graph = random_connected_graph(7, 0.7, rng);
        const ConductanceVector g(
            random_conductances(graph.num_branches(), 0.1, rng), 0.1);
        Eigen::VectorXd p_in(graph.num_inputs());
        for (Eigen::Index k = 0; k < p_in.size(); ++k) {
            p_in[k] = rng.uniform(-1.0, 1.0);
        }
        const Eigen::VectorXd v = branch_voltages(graph, g, p_in);
        const Eigen::VectorXd v_oracle = branch_voltages_oracle(graph, g, p_in);
        CHECK((v - v_oracle).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("input currents balance the output currents") {
    Rng rng(37);
    const CircuitGraph graph = random_connected_graph(6, 0.7, rng);
    const ConductanceVector g(
        random_conductances(graph.num_branches(), 0.1, rng), 0.1);
    Eigen::VectorXd p_in(graph.num_inputs());
    for (Eigen::Index k = 0; k < p_in.size(); ++k) p_in[k] = rng.uniform(-1, 1);
    const NetworkState state = solve_network(graph, g, p_in);
    const Eigen::VectorXd j_in = input_currents(graph, g, state.v);
    // All current enters and leaves through the input nodes.
    CHECK(std::abs(j_in.sum()) <= 1e-10 * (1.0 + state.current.norm()));
}
