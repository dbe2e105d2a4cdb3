#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mirrorsim/analyses.hpp"
#include "mirrorsim/solver.hpp"

using namespace mirrorsim;

namespace {

Circuit corpus(const std::string& name) {
    std::ifstream in(std::string(MIRRORSIM_CORPUS_DIR) + "/" + name);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return load_circuit(ss.str());
}

const char* kDiode =
    "diode-connected transistor\n"
    ".model N NPN(IS=1e-14 BF=100)\n"
    "Vcc vcc 0 DC 10\n"
    "R1 vcc ref 9.3k\n"
    "Q1 ref ref 0 N\n"
    ".op\n";

// Root of (vcc - v)/r = is*(exp(v/vt)-1)*(1+1/bf) + gmin*v by bisection.
double diode_oracle(double vcc, double r, double is, double bf, double gmin) {
    double lo = 0.0, hi = vcc;
    for (int i = 0; i < 200; ++i) {
        const double v = 0.5 * (lo + hi);
        const double f = (vcc - v) / r - is * std::expm1(v / kThermalVoltage) * (1 + 1 / bf) - gmin * v;
        (f > 0 ? lo : hi) = v;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("divider stamps and solution") {
    const auto c = load_circuit("divider\nV1 a 0 DC 10\nR1 a b 1k\nR2 b 0 3k\n.op\n");
    Solver solver(c);
    CHECK(solver.unknown_count(false) == 3);
    const auto sys = solver.assemble(solver.zero_solution());
    const auto a = *c.find_node("a") - 1, b = *c.find_node("b") - 1;
    CHECK(sys.matrix(a, a) == doctest::Approx(1e-3));
    CHECK(sys.matrix(a, b) == doctest::Approx(-1e-3));
    CHECK(sys.matrix(b, a) == doctest::Approx(-1e-3));
    CHECK(sys.matrix(b, b) == doctest::Approx(1e-3 + 1.0 / 3e3));
    CHECK(std::abs(sys.matrix(a, 2)) == 1.0);
    CHECK(sys.matrix(2, a) == sys.matrix(a, 2));
    CHECK(std::abs(sys.rhs[2]) == 10.0);

    const auto s = solve_operating_point(c);
    REQUIRE(s.converged);
    CHECK(s.node_voltages[*c.find_node("b")] == doctest::Approx(7.5));
    const auto cur = solver.currents(s);
    CHECK(std::abs(cur[0].branch()) == doctest::Approx(2.5e-3));
    CHECK(cur[1].branch() == doctest::Approx(2.5e-3));
}

TEST_CASE("current source into a resistor") {
    const auto c = load_circuit("isrc\nI1 0 a DC 2m\nR1 a 0 500\n.op\n");
    const auto s = solve_operating_point(c);
    CHECK(std::abs(s.node_voltages[1]) == doctest::Approx(1.0));
}

TEST_CASE("diode-connected transistor matches a bisection oracle") {
    const auto c = load_circuit(kDiode);
    const auto s = solve_operating_point(c);
    REQUIRE(s.converged);
    const double v = diode_oracle(10.0, 9.3e3, 1e-14, 100.0, 1e-12);
    CHECK(std::abs(s.node_voltages[*c.find_node("ref")] - v) < 1e-6);
}

TEST_CASE("Newton converges quadratically near the solution") {
    const auto s = solve_operating_point(load_circuit(kDiode));
    REQUIRE(s.converged);
    REQUIRE(s.step_norms.size() >= 3);
    const auto n = s.step_norms.size();
    CHECK(s.step_norms[n - 1] <= s.step_norms[n - 2] / 10.0);
}

TEST_CASE("gmin stepping reaches the same operating point") {
    for (const char* name : {"basic_cm.cir", "widlar.cir", "widlar_mem.cir"}) {
        CAPTURE(name);
        const auto c = corpus(name);
        Solver solver(c);
        const auto direct = solver.solve_op();
        const auto stepped = solver.gmin_stepping();
        REQUIRE(direct.converged);
        REQUIRE(stepped.converged);
        CHECK(stepped.continuation >= 1);
        for (std::size_t k = 0; k < c.node_count(); ++k) {
            CHECK(std::abs(direct.node_voltages[k] - stepped.node_voltages[k]) < 1e-5);
        }
    }
}

TEST_CASE("continuation takes over when plain Newton is starved") {
    // Shrink the iteration budget until direct Newton fails from the zero
    // guess; gmin or source stepping must still land on the same point.
    const auto c = corpus("widlar.cir");
    const auto reference = solve_operating_point(c);
    bool exercised = false;
    for (int budget = 2; budget < 100 && !exercised; ++budget) {
        Tolerances tight;
        tight.max_iter = budget;
        Solver solver(c, tight);
        if (solver.newton_solve(solver.zero_solution()).converged) break;
        Solution s;
        try {
            s = solver.solve_op();
        } catch (const ConvergenceError&) {
            continue;
        }
        exercised = true;
        CAPTURE(budget);
        CHECK(s.continuation >= 1);
        for (std::size_t k = 0; k < c.node_count(); ++k) {
            CHECK(std::abs(reference.node_voltages[k] - s.node_voltages[k]) < 1e-4);
        }
    }
    CHECK(exercised);
}

TEST_CASE("floating island reports the offending node") {
    const auto c = load_circuit("island\nV1 a 0 DC 1\nR1 a 0 1k\nR2 b c 1k\nR3 c b 1k\n.op\n");
    try {
        solve_operating_point(c);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        const std::string what = e.what();
        CHECK((what.find("node 'b'") != std::string::npos || what.find("node 'c'") != std::string::npos));
    }
}

TEST_CASE("KCL holds at every corpus operating point") {
    for (const char* name : {"basic_cm.cir", "widlar.cir", "widlar_mem.cir", "memristor_sine.cir"}) {
        CAPTURE(name);
        const auto c = corpus(name);
        Solver solver(c);
        const auto s = solver.solve_op();
        REQUIRE(s.converged);
        CHECK(solver.kcl_violation(s) < 1.0);
    }
}

TEST_CASE("Tellegen: terminal powers sum to zero") {
    for (const char* name : {"basic_cm.cir", "widlar.cir", "widlar_mem.cir"}) {
        CAPTURE(name);
        const auto c = corpus(name);
        Solver solver(c);
        const auto s = solver.solve_op();
        const auto cur = solver.currents(s);
        double sum = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < c.components.size(); ++i) {
            for (std::size_t t = 0; t < c.components[i].nodes.size(); ++t) {
                const double p = s.node_voltages[c.components[i].nodes[t]] * cur[i].terminal[t];
                sum += p;
                scale += std::abs(p);
            }
        }
        CHECK(std::abs(sum) < 1e-9 * scale);
    }
}

TEST_CASE("solutions are bitwise reproducible") {
    const auto c = corpus("widlar_mem.cir");
    const auto a = solve_operating_point(c);
    const auto b = solve_operating_point(c);
    CHECK(a.node_voltages == b.node_voltages);
    CHECK(a.branch_currents == b.branch_currents);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("memristor is a fixed conductance at DC") {
    const auto c = load_circuit(".\n.model MJ MEMR(XINIT=0.25)\nV1 a 0 DC 2\nM1 a 0 MJ\n.op\n");
    Solver solver(c);
    const auto s = solver.solve_op();
    const double m = 100.0 * 0.25 + 16e3 * 0.75;
    CHECK(solver.currents(s)[1].branch() == doctest::Approx(2.0 / m));
    CHECK(s.mem_states[0] == 0.25);
}
