#include <doctest.h>

#include <fstream>
#include <sstream>

#include "stormuc/milp.hpp"

using namespace stormuc;

namespace {

std::string slurp(const std::string& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

MilpProblem one_var() {
    MilpProblem P;
    P.name = "ONE";
    P.add_var("x", VarKind::Continuous, 0, 4, 2);
    P.add_row("c1", {{0, 1}}, Sense::GE, 1);
    return P;
}

MilpProblem knapsack() {
    MilpProblem P;
    P.name = "KNAP";
    P.add_var("a", VarKind::Binary, 0, 1, -6);
    P.add_var("b", VarKind::Binary, 0, 1, -10);
    P.add_var("c", VarKind::Binary, 0, 1, -12);
    P.add_row("cap", {{0, 1}, {1, 2}, {2, 3}}, Sense::LE, 5);
    return P;
}

}  // namespace

TEST_CASE("golden files are byte identical") {
    CHECK(mps_string(one_var()) == slurp(std::string(STORMUC_GOLDEN_DIR) + "/one_var.mps"));
    CHECK(mps_string(knapsack()) == slurp(std::string(STORMUC_GOLDEN_DIR) + "/knapsack.mps"));
}

TEST_CASE("round trip preserves the problem") {
    MilpProblem P = knapsack();
    P.add_var("free", VarKind::Continuous, -kInf, kInf, 0.125);
    P.add_var("neg", VarKind::Continuous, -2.5, 7, 0);
    P.add_var("fixed", VarKind::Continuous, 3, 3, 1);
    P.add_var("mi", VarKind::Continuous, -kInf, 0, 1);
    P.add_row("e", {{3, 1}, {4, -1.0 / 3}}, Sense::EQ, 0.1);
    P.add_row("g", {{5, 1}, {6, 2}}, Sense::GE, -4);
    P.objective_offset = 12.5;
    const std::string text = mps_string(P);
    MilpProblem Q = parse_mps(text);
    CHECK(mps_string(Q) == text);
    REQUIRE(Q.vars.size() == P.vars.size());
    for (std::size_t j = 0; j < P.vars.size(); ++j) {
        CHECK(Q.vars[j].kind == P.vars[j].kind);
        CHECK(Q.vars[j].lb == P.vars[j].lb);
        CHECK(Q.vars[j].ub == P.vars[j].ub);
        CHECK(Q.objective[j] == P.objective[j]);
    }
    CHECK(Q.objective_offset == 12.5);
    // 12-character fields: -1/3 keeps 9 significant digits
    CHECK(Q.rows[1].coeffs[1].second == doctest::Approx(-1.0 / 3).epsilon(1e-8));
    auto a = solve_milp(P), b = solve_milp(Q);
    CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-9));
}

TEST_CASE("exported knapsack solves to the enumerated optimum") {
    auto Q = parse_mps(slurp(std::string(STORMUC_GOLDEN_DIR) + "/knapsack.mps"));
    auto r = solve_milp(Q);
    REQUIRE(r.status == MipStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-22));
}

TEST_CASE("long names are mangled and tabulated") {
    MilpProblem P;
    P.add_var("P[G1,0,0]", VarKind::Continuous, 0, 10, 1);
    P.add_var("short", VarKind::Continuous, 0, 10, 1);
    P.add_var("has space", VarKind::Continuous, 0, 10, 1);
    P.add_row("balance_row_long", {{0, 1}, {1, 1}, {2, 1}}, Sense::GE, 3);
    P.add_row("OBJ", {{0, 1}}, Sense::LE, 9);
    MpsNameTable t;
    const std::string text = mps_string(P, &t);
    REQUIRE(t.columns.size() == 2);
    CHECK(t.columns[0] == std::pair<std::string, std::string>{"C0000000", "P[G1,0,0]"});
    CHECK(t.columns[1] == std::pair<std::string, std::string>{"C0000002", "has space"});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].second == "balance_row_long");
    CHECK(text.find("OBJ_ROW") != std::string::npos);
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        CHECK(l.find('\t') == std::string::npos);
        CHECK(l.size() <= 61);
    }
    std::remove("mangled.mps.names");
    auto t2 = export_mps(P, "mangled.mps");
    CHECK(slurp("mangled.mps") == text);
    CHECK(slurp("mangled.mps.names") == t2.to_text());
    CHECK(t2.to_text().find("col C0000000 P[G1,0,0]") != std::string::npos);
}

TEST_CASE("unwritable path raises") {
    CHECK_THROWS(export_mps(one_var(), "/no/such/dir/x.mps"));
}

TEST_CASE("numbers keep full precision") {
    MilpProblem P;
    P.add_var("x", VarKind::Continuous, 0, 1.0 / 3, 0.1);
    P.add_row("r", {{0, 1e-7}}, Sense::LE, 123456.789);
    auto Q = parse_mps(mps_string(P));
    CHECK(Q.vars[0].ub == doctest::Approx(1.0 / 3).epsilon(1e-10));
    CHECK(Q.objective[0] == 0.1);
    CHECK(Q.rows[0].coeffs[0].second == 1e-7);
    CHECK(Q.rows[0].rhs == 123456.789);
}
