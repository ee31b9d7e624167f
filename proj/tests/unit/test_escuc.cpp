#include <doctest.h>

#include <cmath>

#include "stormuc/escuc.hpp"
#include "support/oracles.hpp"

using namespace stormuc;

namespace {

GridNetwork grid6() { return load_network(std::string(STORMUC_DATA_DIR) + "/grid6.json"); }

GenUnit unit(const std::string& id, const std::string& bus, double pmin, double pmax, std::vector<CostSegment> curve) {
    GenUnit u;
    u.id = id;
    u.bus = bus;
    u.p_min = pmin;
    u.p_max = pmax;
    u.ramp_up = u.ramp_down = pmax;
    u.delta_adjust = pmax;
    u.cost_curve = std::move(curve);
    u.initial_on_hours = 1;
    u.initial_power = pmin;
    return u;
}

// every case-study component on a two-bus toy network
GridNetwork case_study_network() {
    GridNetwork n;
    n.horizon = 3;
    n.buses = {{"A", 100, 0, 0}, {"B", 100, 10, 0}};
    n.units = {unit("Unit 1", "A", 0, 50, {{50, 1}}), unit("Unit 15", "B", 0, 50, {{50, 1}})};
    for (int k : {1, 17, 18, 20, 30, 7, 8, 13, 16, 22, 60, 48, 47, 44, 57, 45})
        n.lines.push_back({"Line " + std::to_string(k), "A", "B", 0.1, 100});
    n.loads = {{0, 0, 0}, {10, 10, 10}};
    n.reserve = {0, 0, 0};
    return n;
}

std::map<std::string, ClassLabel> case_study_classes() {
    std::map<std::string, ClassLabel> m;
    for (auto id : {"Line 1", "Line 17", "Line 18", "Line 20", "Line 30"}) m[id] = ClassLabel::Outage;
    for (auto id : {"Line 7", "Line 8", "Line 13", "Line 16", "Line 22", "Unit 1"}) m[id] = ClassLabel::Uncertain;
    for (auto id : {"Line 60", "Line 48", "Line 47", "Line 44", "Line 57", "Line 45", "Unit 15"}) m[id] = ClassLabel::Operational;
    return m;
}

std::map<std::string, ClassLabel> grid6_classes() {
    return {{"L7", ClassLabel::Outage}, {"L2", ClassLabel::Uncertain}, {"G2", ClassLabel::Uncertain}, {"L5", ClassLabel::Uncertain}};
}

MipOptions tight() {
    MipOptions o;
    o.gap_target = 1e-9;
    return o;
}

}  // namespace

TEST_CASE("scenario counts for the case-study classes") {
    auto n = case_study_network();
    auto c = case_study_classes();
    auto one = build_scenarios(c, Policy::one_per_scenario(), n);
    CHECK(one.size() == 7);
    for (std::size_t s = 1; s < one.size(); ++s) {
        CHECK(one.scenarios[s].out.size() == 6);
        for (auto id : {"Line 1", "Line 17", "Line 18", "Line 20", "Line 30"})
            CHECK(std::count(one.scenarios[s].out.begin(), one.scenarios[s].out.end(), id) == 1);
    }
    auto oo = build_scenarios(c, Policy::outage_only(), n);
    REQUIRE(oo.size() == 2);
    CHECK(oo.scenarios[1].out.size() == 5);
    auto all = build_scenarios(c, Policy::all_uncertain(), n);
    REQUIRE(all.size() == 2);
    CHECK(all.scenarios[1].out.size() == 11);
    CHECK(build_scenarios(c, Policy::subsets(2), n).size() == 16);
    CHECK(build_scenarios(c, Policy::subsets(6), n).size() == 2);
    CHECK_THROWS(build_scenarios(c, Policy::subsets(7), n));
    for (const auto& set : {one, oo, all}) {
        set.validate(n);
        for (std::size_t i = 0; i < n.units.size(); ++i)
            for (int t = 0; t < n.horizon; ++t) CHECK(set.scenarios[0].ux[i][t] == 1);
    }
    // the unit goes out only in its own scenario
    const auto u1 = n.unit_index("Unit 1");
    int hits = 0;
    for (std::size_t s = 1; s < one.size(); ++s) hits += one.scenarios[s].ux[u1][0] == 0;
    CHECK(hits == 1);
}

TEST_CASE("scenario construction edge cases") {
    auto n = case_study_network();
    auto c = case_study_classes();
    c["Line 999"] = ClassLabel::Outage;
    try {
        build_scenarios(c, Policy::outage_only(), n);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("unknown component") != std::string::npos);
    }
    std::map<std::string, ClassLabel> only_out{{"Line 1", ClassLabel::Outage}};
    auto fb = build_scenarios(only_out, Policy::one_per_scenario(), n);
    CHECK(fb.size() == 2);
    CHECK_FALSE(fb.warnings.empty());
    std::map<std::string, ClassLabel> none{{"Line 1", ClassLabel::Operational}};
    auto b = build_scenarios(none, Policy::outage_only(), n);
    CHECK(b.size() == 1);
    CHECK_FALSE(b.warnings.empty());

    ScenarioOptions w;
    w.window_start = 1;
    w.window_end = 2;
    w.probability_weights = true;
    auto win = build_scenarios(case_study_classes(), Policy::one_per_scenario(), n, w);
    const auto l1 = n.line_index("Line 1");
    CHECK(win.scenarios[1].uy[l1] == std::vector<int>{1, 0, 1});
    CHECK(win.scenarios[3].weight == doctest::Approx(1.0 / 6));
    CHECK(win.scenarios[0].weight == 1.0);
    w.window_end = 9;
    CHECK_THROWS(build_scenarios(case_study_classes(), Policy::outage_only(), n, w));
}

TEST_CASE("policy names") {
    for (auto p : {Policy::outage_only(), Policy::all_uncertain(), Policy::one_per_scenario(), Policy::subsets(3)}) {
        auto q = parse_policy(p.name());
        CHECK(q.kind == p.kind);
        CHECK(q.name() == p.name());
    }
    CHECK(parse_policy("subsets:4").k == 4);
    CHECK_THROWS(parse_policy("subsets:0"));
    CHECK_THROWS(parse_policy("subsets:x"));
    CHECK_THROWS(parse_policy("everything"));
}

TEST_CASE("scenario text round trip") {
    auto n = case_study_network();
    ScenarioOptions w;
    w.window_start = 1;
    w.probability_weights = true;
    auto a = build_scenarios(case_study_classes(), Policy::subsets(2), n, w);
    auto text = scenarios_to_text(a);
    auto b = scenarios_from_text(text, n);
    REQUIRE(b.size() == a.size());
    for (std::size_t s = 0; s < a.size(); ++s) {
        CHECK(b.scenarios[s].ux == a.scenarios[s].ux);
        CHECK(b.scenarios[s].uy == a.scenarios[s].uy);
        CHECK(b.scenarios[s].weight == a.scenarios[s].weight);
    }
    CHECK(scenarios_to_text(b) == text);
    CHECK_THROWS(scenarios_from_text("scenarios 1 horizon 3\nscenario 0 weight 1\n  Nope 000\n", n));
    CHECK_THROWS(scenarios_from_text("scenarios 2 horizon 3\nscenario 0 weight 1\n", n));
}

TEST_CASE("one bus, one unit, one period") {
    GridNetwork n;
    n.horizon = 1;
    n.buses = {{"B", 1000, 0, 0}};
    n.units = {unit("G", "B", 0, 100, {{100, 2}})};
    n.loads = {{50}};
    n.reserve = {0};
    auto run = solve_schedule(n, base_only(n), tight());
    CHECK(run.solution.commitment == std::vector<std::vector<int>>{{1}});
    CHECK(run.solution.dispatch[0][0][0] == doctest::Approx(50));
    CHECK(run.mip.objective == doctest::Approx(n.units[0].energy_cost(50)));
    CHECK(run.report.clean());
}

TEST_CASE("isolated load is curtailed in the contingency") {
    GridNetwork n;
    n.horizon = 2;
    n.buses = {{"A", 1000, 0, 0}, {"B", 700, 1, 0}};
    n.units = {unit("G", "A", 0, 100, {{100, 2}})};
    n.lines = {{"L", "A", "B", 0.1, 100}};
    n.loads = {{0, 0}, {30, 40}};
    n.reserve = {0, 0};
    auto sc = build_scenarios({{"L", ClassLabel::Outage}}, Policy::outage_only(), n);
    auto run = solve_schedule(n, sc, tight());
    const auto& sol = run.solution;
    CHECK(sol.curtailment[1][0][1] == doctest::Approx(30));
    CHECK(sol.curtailment[1][1][1] == doctest::Approx(40));
    CHECK(sol.curtailment_by_scenario[0] == 0.0);
    CHECK(sol.unserved_cost == doctest::Approx(70 * 700));
    CHECK(sol.flows[0][0][1] == 0.0);
    CHECK(sol.flows[0][0][0] == doctest::Approx(30));  // from A to B
    CHECK(run.report.clean());
    CHECK(run.problem.index_map.count(col_name("LC", "B", 0, 0)) == 0);
}

TEST_CASE("plain commitment oracle on a single bus") {
    GridNetwork n;
    n.horizon = 4;
    n.buses = {{"B", 1000, 0, 0}};
    auto a = unit("A", "B", 40, 120, {{80, 10}, {120, 14}});
    a.no_load_cost = 60;
    a.min_up = 2;
    a.min_down = 2;
    a.initial_on_hours = 3;
    a.initial_power = 60;
    auto b = unit("C", "B", 20, 90, {{90, 18}});
    b.startup_cost = 150;
    b.shutdown_cost = 10;
    b.min_up = 2;
    b.initial_on_hours = 0;
    b.initial_off_hours = 2;
    b.initial_power = 0;
    auto c = unit("D", "B", 10, 60, {{30, 25}, {60, 30}});
    c.startup_cost = 40;
    c.no_load_cost = 20;
    c.initial_on_hours = 1;
    c.initial_power = 10;
    n.units = {a, b, c};
    n.loads = {{90, 150, 200, 110}};
    n.reserve = {10, 15, 20, 10};
    n.validate();
    auto oracle = oracle::plain_uc(n);
    auto run = solve_schedule(n, base_only(n), tight());
    REQUIRE(std::isfinite(oracle.objective));
    CHECK(run.mip.objective == doctest::Approx(oracle.objective).epsilon(1e-7));
    CHECK(run.report.clean());
}

TEST_CASE("MILP matches commitment enumeration on the six-bus case") {
    auto n = grid6();
    for (auto p : {Policy::outage_only(), Policy::one_per_scenario()}) {
        auto sc = build_scenarios(grid6_classes(), p, n);
        auto e = oracle::enumerate_escuc(n, sc);
        auto run = solve_schedule(n, sc);
        CAPTURE(p.name());
        CHECK(e.candidates < e.total);
        REQUIRE(std::isfinite(e.objective));
        CHECK(run.mip.objective >= e.objective - 1e-6 * std::abs(e.objective));
        CHECK(run.mip.objective <= e.objective * (1 + 1e-4) + 1e-6);
        CHECK(run.report.clean());
    }
}

TEST_CASE("adding scenarios never lowers the cost") {
    auto n = grid6();
    auto base = solve_schedule(n, base_only(n)).mip.objective;
    auto oo = build_scenarios(grid6_classes(), Policy::outage_only(), n);
    auto one = build_scenarios(grid6_classes(), Policy::one_per_scenario(), n);
    auto both = oo;
    for (std::size_t s = 1; s < one.size(); ++s) {
        both.scenarios.push_back(one.scenarios[s]);
        both.scenarios.back().id = static_cast<int>(both.scenarios.size()) - 1;
    }
    auto r_oo = solve_schedule(n, oo, tight());
    auto r_both = solve_schedule(n, both);
    CHECK(base <= r_oo.mip.objective * (1 + 1e-4));
    CHECK(r_oo.mip.objective <= r_both.mip.objective * (1 + 1e-4));
    // outage-only costs no curtailment here and the line carries nothing
    const auto l7 = n.line_index("L7");
    for (int t = 0; t < n.horizon; ++t) CHECK(r_oo.solution.flows[l7][t][1] == 0.0);
    CHECK(r_oo.solution.total_curtailment() == doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("checker catches injected faults") {
    auto n = grid6();
    auto sc = build_scenarios(grid6_classes(), Policy::outage_only(), n);
    auto run = solve_schedule(n, sc, tight());
    REQUIRE(run.report.clean());
    CHECK(run.report.families.size() == 13);

    auto s = run.solution;
    const auto g3 = n.unit_index("G3");
    s.dispatch[g3][2][0] = std::min(s.dispatch[g3][2][0], 60.0) + 1.0;
    auto rep = check_solution(n, sc, s);
    auto bal = rep.in_family("balance");
    REQUIRE(bal.size() == 1);
    CHECK(bal[0].component == "B6");
    CHECK(bal[0].t == 2);
    CHECK(bal[0].s == 0);
    CHECK(bal[0].amount == doctest::Approx(1.0));

    s = run.solution;
    s.commitment[g3] = {0, 1, 0, 0};
    rep = check_solution(n, sc, s);
    auto up = rep.in_family("min_up");
    REQUIRE_FALSE(up.empty());
    CHECK(up[0].component == "G3");

    s = run.solution;
    const auto l1 = n.line_index("L1");
    s.flows[l1][0][0] += 500;
    rep = check_solution(n, sc, s);
    CHECK_FALSE(rep.in_family("flow_limit").empty());
    CHECK_FALSE(rep.in_family("dc_flow").empty());
    CHECK(rep.to_csv().rfind("family,", 0) == 0);
    CHECK(rep.to_text().find("flow_limit") != std::string::npos);
}

TEST_CASE("extraction guards") {
    auto n = grid6();
    auto sc = build_scenarios(grid6_classes(), Policy::outage_only(), n);
    auto run = solve_schedule(n, sc);
    CHECK_THROWS_AS(extract_solution(n, sc, run.problem, run.mip.values, run.mip.objective + 1000), ExtractionError);
    auto shorter = run.mip.values;
    shorter.pop_back();
    CHECK_THROWS_AS(extract_solution(n, sc, run.problem, shorter, run.mip.objective), ExtractionError);

    const auto& sol = run.solution;
    CHECK(sol.commitment.size() == 3);
    CHECK(sol.commitment[0].size() == 4);
    CHECK(sol.dispatch[0][0].size() == 2);
    CHECK(sol.flows.size() == 7);
    CHECK(sol.angles.size() == 6);
    CHECK(sol.curtailment_by_scenario.size() == 2);
    for (int t = 0; t < n.horizon; ++t) {
        double cap = 0;
        for (std::size_t i = 0; i < n.units.size(); ++i) cap += sol.commitment[i][t] * n.units[i].p_max;
        CHECK(cap >= n.total_load(t) + n.reserve[t] - 1e-6);
        CHECK(sol.angles[0][t][0] == 0.0);
    }
    CHECK(solution_to_csv(n, sc, sol).rfind("kind,component,t,s,value\n", 0) == 0);
}

TEST_CASE("formulation details") {
    auto n = grid6();
    const auto& l = n.lines[n.line_index("L7")];
    CHECK(line_big_m(n, l) == doctest::Approx(100 * M_PI / 0.2 + 80));
    BuildOptions o;
    o.big_m["L7"] = 500;
    CHECK(line_big_m(n, l, o) == 500);
    auto sc = build_scenarios(grid6_classes(), Policy::outage_only(), n);
    auto P = build_milp(n, sc);
    CHECK(P.name == "ESCUC");
    CHECK(P.num_binaries() == 3 * 3 * 4);
    CHECK(P.index_map.count(col_name("F", "G1", 0, 2)) == 1);
    CHECK(P.index_map.count(col_name("LC", "B3", 3, 1)) == 1);
    CHECK(P.vars[P.col(col_name("PL", "L7", 0, 1))].ub == 0.0);
    auto Q = parse_mps(mps_string(P));
    auto a = solve_lp(P), b = solve_lp(Q);
    REQUIRE(a.status == LpStatus::Optimal);
    CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-9));
}

TEST_CASE("a tripped unit is exempt from its ramp and redispatch limits") {
    // G1 carries at least p_min = 50 > its band of 40 and starts at 120 > its ramp of 90
    auto n = grid6();
    auto sc = build_scenarios({{"G1", ClassLabel::Uncertain}, {"L7", ClassLabel::Outage}}, Policy::one_per_scenario(), n);
    REQUIRE(sc.size() == 2);
    auto run = solve_schedule(n, sc);
    CHECK(run.report.clean());
    const auto g1 = n.unit_index("G1");
    for (int t = 0; t < n.horizon; ++t) {
        CHECK(run.solution.commitment[g1][t] == 1);
        CHECK(run.solution.dispatch[g1][t][1] == 0.0);
    }
    CHECK(run.solution.curtailment_by_scenario[1] > 0);
    auto e = oracle::enumerate_escuc(n, sc);
    CHECK(run.mip.objective == doctest::Approx(e.objective).epsilon(1e-4));
}

TEST_CASE("a unit stranded without load is taken out") {
    auto n = grid6();
    auto sc = build_scenarios({{"L1", ClassLabel::Outage}, {"L2", ClassLabel::Outage}}, Policy::outage_only(), n);
    const auto g1 = n.unit_index("G1");
    CHECK(sc.scenarios[1].ux[g1] == std::vector<int>(4, 0));
    CHECK(sc.scenarios[0].ux[g1] == std::vector<int>(4, 1));
    CHECK(sc.warnings.size() == 4);
    auto run = solve_schedule(n, sc);
    CHECK(run.report.clean());
    // a window keeps the unit in outside it
    ScenarioOptions w;
    w.window_start = 2;
    auto part = build_scenarios({{"L1", ClassLabel::Outage}, {"L2", ClassLabel::Outage}}, Policy::outage_only(), n, w);
    CHECK(part.scenarios[1].ux[g1] == std::vector<int>{1, 1, 0, 0});
}
