#include "stormuc/milp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace stormuc {

int MilpProblem::add_var(const std::string& n, VarKind kind, double lb, double ub, double cost) {
    if (index_map.count(n)) throw std::invalid_argument("duplicate variable name '" + n + "'");
    if (kind == VarKind::Binary) {
        lb = std::max(lb, 0.0);
        ub = std::min(ub, 1.0);
    }
    if (lb > ub) throw std::invalid_argument("variable '" + n + "': lb > ub");
    int j = static_cast<int>(vars.size());
    vars.push_back({n, kind, lb, ub});
    objective.push_back(cost);
    index_map[n] = j;
    return j;
}

int MilpProblem::add_row(const std::string& n, std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs) {
    std::sort(coeffs.begin(), coeffs.end());
    std::vector<std::pair<int, double>> merged;
    for (auto [j, a] : coeffs) {
        if (j < 0 || j >= static_cast<int>(vars.size())) throw std::invalid_argument("row '" + n + "' references unknown column");
        if (!merged.empty() && merged.back().first == j) merged.back().second += a;
        else merged.push_back({j, a});
    }
    std::erase_if(merged, [](const auto& p) { return p.second == 0.0; });
    rows.push_back({n, std::move(merged), sense, rhs});
    return static_cast<int>(rows.size()) - 1;
}

int MilpProblem::col(const std::string& n) const {
    auto it = index_map.find(n);
    if (it == index_map.end()) throw std::out_of_range("unknown column '" + n + "'");
    return it->second;
}

std::size_t MilpProblem::num_binaries() const {
    return static_cast<std::size_t>(std::count_if(vars.begin(), vars.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

double MilpProblem::evaluate_objective(const std::vector<double>& x) const {
    double z = objective_offset;
    for (std::size_t j = 0; j < vars.size(); ++j) z += objective[j] * x[j];
    return z;
}

double MilpProblem::max_violation(const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        v = std::max(v, vars[j].lb - x[j]);
        v = std::max(v, x[j] - vars[j].ub);
    }
    for (const auto& r : rows) {
        double act = 0.0;
        for (auto [j, a] : r.coeffs) act += a * x[j];
        if (r.sense != Sense::GE) v = std::max(v, act - r.rhs);
        if (r.sense != Sense::LE) v = std::max(v, r.rhs - act);
    }
    return v;
}

void MilpProblem::validate() const {
    if (objective.size() != vars.size()) throw std::invalid_argument("objective length != column count");
    for (const auto& v : vars) {
        if (v.lb > v.ub) throw std::invalid_argument("column '" + v.name + "' has lb > ub");
        if (std::isnan(v.lb) || std::isnan(v.ub)) throw std::invalid_argument("column '" + v.name + "' has NaN bound");
    }
    for (const auto& r : rows) {
        std::set<int> seen;
        for (auto [j, a] : r.coeffs) {
            if (j < 0 || j >= static_cast<int>(vars.size())) throw std::invalid_argument("row '" + r.name + "' references unknown column");
            if (!seen.insert(j).second) throw std::invalid_argument("row '" + r.name + "' repeats a column");
            if (!std::isfinite(a)) throw std::invalid_argument("row '" + r.name + "' has a non-finite coefficient");
        }
        if (!std::isfinite(r.rhs)) throw std::invalid_argument("row '" + r.name + "' has a non-finite rhs");
    }
}

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "Optimal";
        case LpStatus::Infeasible: return "Infeasible";
        case LpStatus::Unbounded: return "Unbounded";
    }
    return "?";
}

const char* to_string(MipStatus s) {
    switch (s) {
        case MipStatus::Optimal: return "Optimal";
        case MipStatus::Feasible: return "Feasible";
        case MipStatus::Infeasible: return "Infeasible";
        case MipStatus::LimitReached: return "LimitReached";
    }
    return "?";
}

}  // namespace stormuc
