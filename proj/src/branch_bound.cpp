#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "stormuc/milp.hpp"

namespace stormuc {

namespace {

struct Node {
    long id = 0;
    int depth = 0;
    double bound = -kInf;
    std::vector<double> lb, ub;
    std::vector<double> x;
};

// most fractional binary; ties -> lowest column index
int branching_column(const MilpProblem& P, const std::vector<double>& x, double int_tol) {
    int best = -1;
    double best_frac = int_tol;
    for (std::size_t j = 0; j < P.vars.size(); ++j) {
        if (P.vars[j].kind != VarKind::Binary) continue;
        const double f = std::abs(x[j] - std::round(x[j]));
        if (f > best_frac) {
            best_frac = f;
            best = static_cast<int>(j);
        }
    }
    return best;
}

double rel_gap(double inc, double bound) {
    if (!std::isfinite(inc)) return kInf;
    return std::max(0.0, (inc - bound) / std::max(1.0, std::abs(inc)));
}

}  // namespace

MipResult solve_milp(const MilpProblem& P, const MipOptions& opt) {
    P.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    MipResult res;
    std::vector<Node> open;
    long next_id = 0;

    auto evaluate = [&](Node& node) -> bool {
        LpSolution s = solve_lp(P, node.lb, node.ub, opt.lp);
        res.lp_iterations += s.iterations;
        if (s.status == LpStatus::Unbounded) throw LpNumericalError("LP relaxation unbounded; MILP needs bounded columns");
        if (s.status != LpStatus::Optimal) return false;
        node.bound = s.objective;
        node.x = std::move(s.values);
        return true;
    };

    // Fix binaries to their rounded values and re-solve so the incumbent's
    // continuous part is exactly consistent with an integral commitment.
    auto try_incumbent = [&](const Node& node) {
        std::vector<double> lb = node.lb, ub = node.ub;
        for (std::size_t j = 0; j < P.vars.size(); ++j) {
            if (P.vars[j].kind != VarKind::Binary) continue;
            lb[j] = ub[j] = std::round(node.x[j]);
        }
        LpSolution s = solve_lp(P, lb, ub, opt.lp);
        res.lp_iterations += s.iterations;
        if (s.status != LpStatus::Optimal) return;
        if (s.objective < res.objective) {
            res.objective = s.objective;
            res.values = std::move(s.values);
        }
    };

    auto log = [&](const char* tag, const Node& n) {
        if (!opt.log) return;
        *opt.log << std::setw(6) << tag << std::setw(8) << res.nodes_explored << std::setw(6) << n.depth << std::setw(18)
                 << std::setprecision(10) << n.bound << std::setw(18) << res.objective << std::setw(8) << open.size()
                 << "\n";
    };
    if (opt.log) *opt.log << "  kind    node depth             bound         incumbent    open\n";

    Node root;
    root.id = next_id++;
    for (const auto& v : P.vars) {
        root.lb.push_back(v.lb);
        root.ub.push_back(v.ub);
    }
    if (!evaluate(root)) {
        res.status = MipStatus::Infeasible;
        return res;
    }
    res.best_bound = root.bound;
    log("root", root);
    open.push_back(std::move(root));

    bool limit = false;
    while (!open.empty()) {
        // best-first by bound (ties: older node), depth-first once the open list is large
        std::size_t pick = 0;
        const bool dive = open.size() > opt.open_node_threshold;
        for (std::size_t k = 1; k < open.size(); ++k) {
            const Node& a = open[k];
            const Node& b = open[pick];
            bool better = dive ? (a.depth > b.depth || (a.depth == b.depth && a.id < b.id))
                               : (a.bound < b.bound || (a.bound == b.bound && a.id < b.id));
            if (better) pick = k;
        }
        double lowest = open[0].bound;
        for (const auto& n : open) lowest = std::min(lowest, n.bound);
        res.best_bound = std::min(lowest, res.objective);
        if (rel_gap(res.objective, lowest) <= opt.gap_target) break;

        Node node = std::move(open[pick]);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
        if (node.bound >= res.objective) continue;

        const int j = branching_column(P, node.x, opt.int_tol);
        if (j < 0) {
            try_incumbent(node);
            log("int", node);
            continue;
        }
        if (res.nodes_explored >= opt.node_limit || elapsed() > opt.time_limit) {
            open.push_back(std::move(node));
            limit = true;
            break;
        }
        for (int side = 0; side < 2; ++side) {
            Node child;
            child.id = next_id++;
            child.depth = node.depth + 1;
            child.lb = node.lb;
            child.ub = node.ub;
            if (side == 0) child.ub[j] = 0.0;
            else child.lb[j] = 1.0;
            ++res.nodes_explored;
            if (!evaluate(child)) continue;
            if (child.bound >= res.objective) continue;
            open.push_back(std::move(child));
        }
        log("branch", node);
    }

    double lowest = res.objective;
    for (const auto& n : open) lowest = std::min(lowest, n.bound);
    res.best_bound = lowest;
    res.gap = rel_gap(res.objective, res.best_bound);
    if (!res.has_incumbent()) {
        res.status = limit ? MipStatus::LimitReached : MipStatus::Infeasible;
        res.gap = kInf;
    } else if (limit) {
        res.status = MipStatus::LimitReached;
    } else {
        res.status = res.gap <= opt.gap_target ? MipStatus::Optimal : MipStatus::Feasible;
    }
    if (opt.log)
        *opt.log << "status " << to_string(res.status) << " objective " << std::setprecision(12) << res.objective << " bound "
                 << res.best_bound << " gap " << res.gap << " nodes " << res.nodes_explored << "\n";
    return res;
}

}  // namespace stormuc
