#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stormuc {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Sense { LE, EQ, GE };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lb = 0.0, ub = kInf;
};

struct Constraint {
    std::string name;
    std::vector<std::pair<int, double>> coeffs;  // (column, value), columns unique
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

struct MilpProblem {
    std::string name = "PROBLEM";
    std::vector<Variable> vars;
    std::vector<Constraint> rows;
    std::vector<double> objective;  // per column
    double objective_offset = 0.0;
    std::map<std::string, int> index_map;

    int add_var(const std::string& name, VarKind kind, double lb, double ub, double cost = 0.0);
    int add_row(const std::string& name, std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs);
    int col(const std::string& name) const;
    std::size_t num_binaries() const;

    double evaluate_objective(const std::vector<double>& x) const;
    // max violation over rows and bounds
    double max_violation(const std::vector<double>& x) const;
    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
    std::vector<double> dual_values;  // per row
    std::vector<double> reduced_costs;
    long iterations = 0;
    long degenerate_pivots = 0;
    long bland_pivots = 0;
};

struct LpOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-9;
    double pivot_tol = 1e-9;
    int refactor_interval = 50;
    long max_iterations = 200000;
    int degenerate_before_bland = 50;
    bool presolve = true;
};

class LpNumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

LpSolution solve_lp(const MilpProblem& problem, const LpOptions& opt = {});
// Same problem with column bounds replaced (used by branch and bound).
LpSolution solve_lp(const MilpProblem& problem, const std::vector<double>& lb, const std::vector<double>& ub,
                    const LpOptions& opt = {});

enum class MipStatus { Optimal, Feasible, Infeasible, LimitReached };

struct MipOptions {
    double gap_target = 1e-4;
    long node_limit = 200000;
    double time_limit = 600.0;  // seconds
    double int_tol = 1e-6;
    std::size_t open_node_threshold = 20000;  // dive depth-first beyond this many open nodes
    std::ostream* log = nullptr;
    LpOptions lp;
};

struct MipResult {
    MipStatus status = MipStatus::Infeasible;
    std::vector<double> values;
    double objective = kInf;
    double best_bound = -kInf;
    double gap = kInf;
    long nodes_explored = 0;
    long lp_iterations = 0;
    bool has_incumbent() const { return !values.empty(); }
};

MipResult solve_milp(const MilpProblem& problem, const MipOptions& opt = {});

const char* to_string(LpStatus s);
const char* to_string(MipStatus s);

// Fixed-format MPS. Names longer than 8 characters, or containing blanks,
// are replaced by mangled names; the table maps mangled -> original.
struct MpsNameTable {
    std::vector<std::pair<std::string, std::string>> rows;
    std::vector<std::pair<std::string, std::string>> columns;
    std::string to_text() const;
};

std::string mps_string(const MilpProblem& problem, MpsNameTable* table = nullptr);
MpsNameTable export_mps(const MilpProblem& problem, const std::string& path);
// Reader for the writer's own output (fixed format, the subset the writer emits).
MilpProblem parse_mps(const std::string& text);

}  // namespace stormuc
