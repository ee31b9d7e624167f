#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stormuc/grid.hpp"
#include "stormuc/milp.hpp"
#include "stormuc/multiclass.hpp"

namespace stormuc {

enum class PolicyKind { OutageOnly, AllUncertainOut, OnePerScenario, UncertainSubsets };

struct Policy {
    PolicyKind kind = PolicyKind::OutageOnly;
    int k = 1;  // subset size for UncertainSubsets

    static Policy outage_only() { return {PolicyKind::OutageOnly, 0}; }
    static Policy all_uncertain() { return {PolicyKind::AllUncertainOut, 0}; }
    static Policy one_per_scenario() { return {PolicyKind::OnePerScenario, 1}; }
    static Policy subsets(int k) { return {PolicyKind::UncertainSubsets, k}; }
    // outage-only | all-uncertain | one-per-scenario | subsets:k
    std::string name() const;
};

Policy parse_policy(const std::string& s);

struct Scenario {
    int id = 0;
    std::vector<std::vector<int>> ux;  // [unit][t], 0 = on outage
    std::vector<std::vector<int>> uy;  // [line][t]
    double weight = 1.0;
    std::vector<std::string> out;      // components taken out, for reporting
};

struct ScenarioSet {
    int horizon = 0;
    std::vector<std::string> unit_ids, line_ids;
    std::vector<Scenario> scenarios;  // [0] is the base case
    std::vector<std::string> warnings;

    std::size_t size() const { return scenarios.size(); }
    std::size_t contingencies() const { return scenarios.empty() ? 0 : scenarios.size() - 1; }
    // Throws std::invalid_argument on shape or base-case violations, or ids not matching net.
    void validate(const GridNetwork& net) const;
};

struct ScenarioOptions {
    int window_start = 0;
    int window_end = -1;             // exclusive; -1 = horizon
    bool probability_weights = false;  // weight 1/K instead of 1
};

// classes: component id -> label. Components of the network missing from the map
// are treated as Operational; ids not in the network are an error.
ScenarioSet build_scenarios(const std::map<std::string, ClassLabel>& classes, const Policy& policy, const GridNetwork& net,
                            const ScenarioOptions& opt = {});
ScenarioSet base_only(const GridNetwork& net);

// Text form: header line, then per scenario "scenario <id> weight <w>" followed by
// "  <component> <per-period 0/1 string>" for every component out in some period.
std::string scenarios_to_text(const ScenarioSet& set);
ScenarioSet scenarios_from_text(const std::string& text, const GridNetwork& net);

struct BuildOptions {
    double angle_span = 3.14159265358979323846;  // rad; theta in [-span/2, span/2]
    std::map<std::string, double> big_m;         // per-line override
};

// Column names: I[u,t] v[u,t] w[u,t] P[u,t,s] F[u,t,k] PL[l,t,s] TH[b,t,s] LC[b,t,s]
std::string col_name(const char* sym, const std::string& id, int t);
std::string col_name(const char* sym, const std::string& id, int t, int s);

MilpProblem build_milp(const GridNetwork& net, const ScenarioSet& scenarios, const BuildOptions& opt = {});
double line_big_m(const GridNetwork& net, const Line& line, const BuildOptions& opt = {});

struct ScheduleSolution {
    std::vector<std::vector<int>> commitment;  // [unit][t]
    std::vector<std::vector<int>> startup, shutdown;
    std::vector<std::vector<std::vector<double>>> dispatch;     // [unit][t][s]
    std::vector<std::vector<std::vector<double>>> flows;        // [line][t][s]
    std::vector<std::vector<std::vector<double>>> angles;       // [bus][t][s]
    std::vector<std::vector<std::vector<double>>> curtailment;  // [bus][t][s], MWh
    std::vector<double> curtailment_by_scenario;                // [s]
    std::vector<std::vector<int>> t_on, t_off;                  // hours on/off at the end of t
    double operation_cost = 0.0;
    double unserved_cost = 0.0;

    double total_cost() const { return operation_cost + unserved_cost; }
    double total_curtailment() const;
    // mean over contingency scenarios (0 when there are none)
    double mean_contingency_curtailment() const;
};

class ExtractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ScheduleSolution extract_solution(const GridNetwork& net, const ScenarioSet& scenarios, const MilpProblem& problem,
                                  const std::vector<double>& values, double solver_objective);

// Cost of a schedule, from the network data only.
void recompute_costs(const GridNetwork& net, const ScenarioSet& scenarios, ScheduleSolution& sol);

struct Violation {
    std::string family;
    std::string component;  // bus, unit or line id ("" for system-wide rows)
    int t = -1, s = -1;
    double amount = 0.0;
};

struct ViolationReport {
    double tolerance = 1e-6;
    std::vector<std::string> families;     // every family checked, in order
    std::map<std::string, double> max_by_family;
    std::vector<Violation> violations;     // entries above tolerance

    bool clean() const { return violations.empty(); }
    double max_violation() const;
    std::vector<Violation> in_family(const std::string& family) const;
    std::string to_text() const;
    std::string to_csv() const;
};

ViolationReport check_solution(const GridNetwork& net, const ScenarioSet& scenarios, const ScheduleSolution& sol,
                               double tolerance = 1e-6, const BuildOptions& opt = {});

// Build, solve and extract in one go.
struct ScheduleRun {
    MilpProblem problem;
    MipResult mip;
    ScheduleSolution solution;
    ViolationReport report;
};

ScheduleRun solve_schedule(const GridNetwork& net, const ScenarioSet& scenarios, const MipOptions& mip = {},
                           const BuildOptions& opt = {});

std::string solution_to_csv(const GridNetwork& net, const ScenarioSet& scenarios, const ScheduleSolution& sol);

}  // namespace stormuc
