#pragma once
// Brute-force reference solutions. Nothing here calls the code under test
// except where noted (the commitment oracle reuses solve_lp for the
// continuous part once every binary is fixed).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "stormuc/escuc.hpp"
#include "stormuc/grid.hpp"
#include "stormuc/milp.hpp"

namespace oracle {

// min c.x over {x : A x <= b, x >= 0} in 2-D by enumerating intersections of every pair of boundary lines.
struct Vertex2 {
    double x = 0, y = 0, obj = std::numeric_limits<double>::infinity();
};

inline Vertex2 lp2_vertex_enumeration(const std::vector<std::array<double, 3>>& rows, double cx, double cy) {
    std::vector<std::array<double, 3>> planes = rows;  // a x + b y <= r
    planes.push_back({-1, 0, 0});
    planes.push_back({0, -1, 0});
    Vertex2 best;
    for (std::size_t i = 0; i < planes.size(); ++i)
        for (std::size_t j = i + 1; j < planes.size(); ++j) {
            const auto& p = planes[i];
            const auto& q = planes[j];
            const double det = p[0] * q[1] - p[1] * q[0];
            if (std::abs(det) < 1e-12) continue;
            const double x = (p[2] * q[1] - p[1] * q[2]) / det;
            const double y = (p[0] * q[2] - p[2] * q[0]) / det;
            bool ok = true;
            for (const auto& r : planes) ok = ok && r[0] * x + r[1] * y <= r[2] + 1e-9;
            if (ok && cx * x + cy * y < best.obj) best = {x, y, cx * x + cy * y};
        }
    return best;
}

// Exhaustive 0/1 search for a pure-binary problem with <= rows.
struct BinaryBest {
    double obj = std::numeric_limits<double>::infinity();
    std::vector<int> x;
};

inline BinaryBest enumerate_binary(const stormuc::MilpProblem& P) {
    const std::size_t n = P.vars.size();
    BinaryBest best;
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = (mask >> j) & 1u;
        if (P.max_violation(x) > 1e-9) continue;
        const double z = P.evaluate_objective(x);
        if (z < best.obj) {
            best.obj = z;
            best.x.assign(x.begin(), x.end());
        }
    }
    return best;
}

// ---- unit commitment ----

using Commitment = std::vector<std::vector<int>>;  // [unit][t]

// Min up/down directly from run lengths, including the hours before the horizon.
inline bool respects_min_times(const stormuc::GenUnit& u, const std::vector<int>& c) {
    const int T = static_cast<int>(c.size());
    int state = u.initially_on() ? 1 : 0;
    int run = u.initially_on() ? u.initial_on_hours : u.initial_off_hours;
    for (int t = 0; t < T; ++t) {
        if (c[t] == state) {
            ++run;
            continue;
        }
        if (run < (state ? u.min_up : u.min_down)) return false;
        state = c[t];
        run = 1;
    }
    return true;
}

inline bool meets_reserve(const stormuc::GridNetwork& net, const Commitment& c) {
    for (int t = 0; t < net.horizon; ++t) {
        double cap = 0;
        for (std::size_t i = 0; i < net.units.size(); ++i) cap += net.units[i].p_max * c[i][t];
        if (cap < net.total_load(t) + net.reserve[t] - 1e-9) return false;
    }
    return true;
}

// Every per-unit schedule that passes the run-length test, cross product over units.
inline std::vector<Commitment> feasible_commitments(const stormuc::GridNetwork& net) {
    const int T = net.horizon;
    std::vector<std::vector<std::vector<int>>> per_unit;
    for (const auto& u : net.units) {
        std::vector<std::vector<int>> ok;
        for (int mask = 0; mask < (1 << T); ++mask) {
            std::vector<int> c(T);
            for (int t = 0; t < T; ++t) c[t] = (mask >> t) & 1;
            if (respects_min_times(u, c)) ok.push_back(c);
        }
        per_unit.push_back(ok);
    }
    std::vector<Commitment> out;
    Commitment cur(net.units.size());
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == net.units.size()) {
            if (meets_reserve(net, cur)) out.push_back(cur);
            return;
        }
        for (const auto& c : per_unit[i]) {
            cur[i] = c;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

struct CommitmentOracle {
    double objective = std::numeric_limits<double>::infinity();
    Commitment best;
    std::size_t candidates = 0;  // after run-length and reserve pruning
    std::size_t total = 0;       // 2^(units * T)
    std::size_t lp_feasible = 0;
};

// Fix I, v, w from each candidate commitment and solve the remaining LP.
inline CommitmentOracle enumerate_escuc(const stormuc::GridNetwork& net, const stormuc::ScenarioSet& set) {
    using namespace stormuc;
    const MilpProblem P = build_milp(net, set);
    CommitmentOracle res;
    res.total = std::size_t{1} << (net.units.size() * net.horizon);
    const auto cands = feasible_commitments(net);
    res.candidates = cands.size();
    for (const auto& c : cands) {
        std::vector<double> lb, ub;
        for (const auto& v : P.vars) {
            lb.push_back(v.lb);
            ub.push_back(v.ub);
        }
        bool bounds_ok = true;
        for (std::size_t i = 0; i < net.units.size(); ++i) {
            const GenUnit& u = net.units[i];
            int prev = u.initially_on() ? 1 : 0;
            for (int t = 0; t < net.horizon; ++t) {
                const int on = c[i][t];
                const std::pair<const char*, int> fix[] = {{"I", on}, {"v", on && !prev}, {"w", !on && prev}};
                for (auto [sym, val] : fix) {
                    const int j = P.col(col_name(sym, u.id, t));
                    if (val < P.vars[j].lb || val > P.vars[j].ub) bounds_ok = false;
                    lb[j] = ub[j] = val;
                }
                prev = on;
            }
        }
        if (!bounds_ok) continue;
        const LpSolution s = solve_lp(P, lb, ub);
        if (s.status != LpStatus::Optimal) continue;
        ++res.lp_feasible;
        if (s.objective < res.objective) {
            res.objective = s.objective;
            res.best = c;
        }
    }
    return res;
}

// Single-bus UC with no ramps or network: each period is an economic dispatch
// solved greedily over the convex cost segments, no LP involved.
inline double dispatch_cost(const stormuc::GridNetwork& net, const Commitment& c, int t, double load) {
    double cost = 0, left = load;
    struct Seg {
        double width, marg;
    };
    std::vector<Seg> segs;
    for (std::size_t i = 0; i < net.units.size(); ++i) {
        if (!c[i][t]) continue;
        const auto& u = net.units[i];
        // p_min is forced; the remainder of the curve is offered segment by segment
        cost += u.energy_cost(u.p_min);
        left -= u.p_min;
        double prev = 0;
        for (const auto& s : u.cost_curve) {
            const double lo = std::max(prev, u.p_min), hi = std::min(s.breakpoint_mw, u.p_max);
            if (hi > lo) segs.push_back({hi - lo, s.marginal});
            prev = s.breakpoint_mw;
        }
    }
    if (left < -1e-9) return std::numeric_limits<double>::infinity();
    std::stable_sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.marg < b.marg; });
    for (const auto& s : segs) {
        const double take = std::min(s.width, left);
        cost += take * s.marg;
        left -= take;
    }
    return left > 1e-9 ? std::numeric_limits<double>::infinity() : cost;
}

struct PlainUc {
    double objective = std::numeric_limits<double>::infinity();
    Commitment best;
};

inline PlainUc plain_uc(const stormuc::GridNetwork& net) {
    PlainUc res;
    for (const auto& c : feasible_commitments(net)) {
        double z = 0;
        for (std::size_t i = 0; i < net.units.size(); ++i) {
            int prev = net.units[i].initially_on() ? 1 : 0;
            for (int t = 0; t < net.horizon; ++t) {
                if (c[i][t] && !prev) z += net.units[i].startup_cost;
                if (!c[i][t] && prev) z += net.units[i].shutdown_cost;
                prev = c[i][t];
            }
        }
        for (int t = 0; t < net.horizon && std::isfinite(z); ++t) z += dispatch_cost(net, c, t, net.total_load(t));
        if (z < res.objective) {
            res.objective = z;
            res.best = c;
        }
    }
    return res;
}

}  // namespace oracle
