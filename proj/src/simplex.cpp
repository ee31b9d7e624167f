// Bounded-variable revised simplex, two phases, dense LU of the basis with
// product-form eta updates between refactorizations.
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "stormuc/milp.hpp"

namespace stormuc {

namespace {

struct Reduced {
    int n = 0, m = 0;
    std::vector<int> col_of;  // reduced column -> original
    std::vector<int> row_of;  // reduced row -> original
    std::vector<double> lb, ub, cost;
    std::vector<int> start, idx;  // CSC with reduced row indices
    std::vector<double> val;
    std::vector<double> rlo, rhi;  // row activity bounds
};

struct Presolve {
    std::vector<double> lb, ub;
    std::vector<int> lb_src, ub_src;  // singleton row that set the bound, -1 if none
    std::vector<char> row_dropped;
    std::vector<double> row_shift;  // contribution of fixed columns
    bool infeasible = false;
    std::string why;
};

bool fixed(double l, double u) { return l == u; }

Presolve presolve(const MilpProblem& P, const std::vector<double>& lb0, const std::vector<double>& ub0, const LpOptions& opt) {
    Presolve ps;
    ps.lb = lb0;
    ps.ub = ub0;
    const std::size_t nr = P.rows.size();
    ps.lb_src.assign(lb0.size(), -1);
    ps.ub_src.assign(lb0.size(), -1);
    ps.row_dropped.assign(nr, 0);
    ps.row_shift.assign(nr, 0.0);
    for (std::size_t j = 0; j < lb0.size(); ++j) {
        if (ps.lb[j] > ps.ub[j]) {
            ps.infeasible = true;
            ps.why = "column '" + P.vars[j].name + "' has empty bounds";
            return ps;
        }
    }
    if (!opt.presolve) return ps;
    const double tol = opt.feas_tol;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < nr; ++i) {
            if (ps.row_dropped[i]) continue;
            const auto& r = P.rows[i];
            int free_col = -1, nfree = 0;
            double a_free = 0.0, shift = 0.0;
            for (auto [j, a] : r.coeffs) {
                if (fixed(ps.lb[j], ps.ub[j])) shift += a * ps.lb[j];
                else { ++nfree; free_col = j; a_free = a; }
            }
            const double rest = r.rhs - shift;
            if (nfree == 0) {
                bool ok = (r.sense == Sense::LE && rest >= -tol) || (r.sense == Sense::GE && rest <= tol) ||
                          (r.sense == Sense::EQ && std::abs(rest) <= tol);
                if (!ok) {
                    ps.infeasible = true;
                    ps.why = "row '" + r.name + "' violated by fixed columns";
                    return ps;
                }
                ps.row_dropped[i] = 1;
                changed = true;
                continue;
            }
            if (nfree != 1) continue;
            const int j = free_col;
            const double v = rest / a_free;
            bool upper = (r.sense == Sense::LE) == (a_free > 0);
            if (r.sense == Sense::EQ || upper) {
                if (v < ps.ub[j]) { ps.ub[j] = v; ps.ub_src[j] = static_cast<int>(i); }
            }
            if (r.sense == Sense::EQ || !upper) {
                if (v > ps.lb[j]) { ps.lb[j] = v; ps.lb_src[j] = static_cast<int>(i); }
            }
            if (ps.lb[j] > ps.ub[j]) {
                if (ps.lb[j] - ps.ub[j] > tol * std::max(1.0, std::abs(v))) {
                    ps.infeasible = true;
                    ps.why = "bounds of column '" + P.vars[j].name + "' cross after row '" + r.name + "'";
                    return ps;
                }
                // snap within tolerance onto the bound from the original bounds, if any
                double snap = (ps.lb_src[j] == static_cast<int>(i)) ? ps.ub[j] : ps.lb[j];
                ps.lb[j] = ps.ub[j] = snap;
            }
            ps.row_dropped[i] = 1;
            changed = true;
        }
    }
    return ps;
}

class Simplex {
public:
    Simplex(const Reduced& R, const LpOptions& opt) : R_(R), opt_(opt) {}

    LpStatus run(std::vector<double>& xs, std::vector<double>& y, long& iters, long& degen, long& bland) {
        setup();
        // phase 1
        if (n_art_ > 0) {
            std::vector<double> c1(N_, 0.0);
            for (int k = first_art_; k < N_; ++k) c1[k] = 1.0;
            LpStatus s = iterate(c1);
            if (s == LpStatus::Unbounded) throw LpNumericalError("phase 1 reported unbounded");
            double infeas = 0.0;
            for (int k = first_art_; k < N_; ++k) infeas += x_[k];
            if (infeas > 10.0 * opt_.feas_tol * std::max(1.0, 1e-3 * scale_)) {
                finish(xs, y, iters, degen, bland);
                return LpStatus::Infeasible;
            }
            for (int k = first_art_; k < N_; ++k) {
                hi_[k] = 0.0;
                if (pos_[k] < 0) x_[k] = 0.0;
            }
            drive_out_artificials();
        }
        std::vector<double> c2(N_, 0.0);
        for (int j = 0; j < R_.n; ++j) c2[j] = R_.cost[j];
        LpStatus s = iterate(c2);
        finish(xs, y, iters, degen, bland);
        y = y_;
        return s;
    }

private:
    const Reduced& R_;
    LpOptions opt_;
    int m_ = 0, N_ = 0, first_art_ = 0, n_art_ = 0;
    std::vector<double> lo_, hi_, x_, y_;
    std::vector<int> head_, pos_;
    std::vector<int> art_row_;
    std::vector<double> art_sign_;
    Eigen::MatrixXd B_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    std::vector<std::pair<int, Eigen::VectorXd>> etas_;
    long iters_ = 0, degen_ = 0, bland_ = 0;
    double scale_ = 1.0;

    // column k of [A  -I  art]
    template <class F>
    void for_col(int k, F&& f) const {
        if (k < R_.n) {
            for (int p = R_.start[k]; p < R_.start[k + 1]; ++p) f(R_.idx[p], R_.val[p]);
        } else if (k < first_art_) {
            f(k - R_.n, -1.0);
        } else {
            f(art_row_[k - first_art_], art_sign_[k - first_art_]);
        }
    }

    double dot_col(int k, const Eigen::VectorXd& v) const {
        double s = 0.0;
        for_col(k, [&](int i, double a) { s += a * v[i]; });
        return s;
    }

    void setup() {
        m_ = R_.m;
        const int n = R_.n;
        first_art_ = n + m_;
        lo_.assign(first_art_, 0.0);
        hi_.assign(first_art_, 0.0);
        x_.assign(first_art_, 0.0);
        for (int j = 0; j < n; ++j) {
            lo_[j] = R_.lb[j];
            hi_[j] = R_.ub[j];
            x_[j] = std::isfinite(lo_[j]) ? lo_[j] : (std::isfinite(hi_[j]) ? hi_[j] : 0.0);
            scale_ = std::max(scale_, std::abs(x_[j]));
        }
        std::vector<double> act(m_, 0.0);
        for (int j = 0; j < n; ++j)
            for (int p = R_.start[j]; p < R_.start[j + 1]; ++p) act[R_.idx[p]] += R_.val[p] * x_[j];
        head_.assign(m_, -1);
        for (int i = 0; i < m_; ++i) {
            const int s = n + i;
            lo_[s] = R_.rlo[i];
            hi_[s] = R_.rhi[i];
            scale_ = std::max(scale_, std::abs(act[i]));
            if (act[i] >= lo_[s] - opt_.feas_tol && act[i] <= hi_[s] + opt_.feas_tol) {
                x_[s] = act[i];
                head_[i] = s;
            } else {
                const double beta = act[i] < lo_[s] ? lo_[s] : hi_[s];
                x_[s] = beta;
                art_row_.push_back(i);
                art_sign_.push_back(beta > act[i] ? 1.0 : -1.0);
                lo_.push_back(0.0);
                hi_.push_back(kInf);
                x_.push_back(std::abs(beta - act[i]));
                head_[i] = first_art_ + static_cast<int>(art_row_.size()) - 1;
            }
        }
        n_art_ = static_cast<int>(art_row_.size());
        N_ = first_art_ + n_art_;
        pos_.assign(N_, -1);
        for (int i = 0; i < m_; ++i) pos_[head_[i]] = i;
        refactor();
    }

    void refactor() {
        etas_.clear();
        if (m_ == 0) return;
        B_.setZero(m_, m_);
        for (int i = 0; i < m_; ++i) for_col(head_[i], [&](int r, double a) { B_(r, i) = a; });
        lu_.compute(B_);
        const auto d = lu_.matrixLU().diagonal().cwiseAbs();
        if (d.minCoeff() < 1e-11 * std::max(1.0, d.maxCoeff())) {
            std::ostringstream os;
            os << "singular basis at iteration " << iters_ << " (min pivot " << d.minCoeff() << ", m=" << m_ << ")";
            throw LpNumericalError(os.str());
        }
        // x_B = -B^{-1} N x_N  (all row right-hand sides are zero)
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
        for (int k = 0; k < N_; ++k) {
            if (pos_[k] >= 0 || x_[k] == 0.0) continue;
            const double xk = x_[k];
            for_col(k, [&](int r, double a) { rhs[r] -= a * xk; });
        }
        Eigen::VectorXd xb = lu_.solve(rhs);
        for (int i = 0; i < m_; ++i) x_[head_[i]] = xb[i];
    }

    Eigen::VectorXd ftran(Eigen::VectorXd v) const {
        v = lu_.solve(v);
        for (const auto& [r, a] : etas_) {
            const double vr = v[r] / a[r];
            v -= vr * a;
            v[r] = vr;
        }
        return v;
    }

    Eigen::VectorXd btran(Eigen::VectorXd w) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            const auto& [r, a] = *it;
            const double s = w.dot(a) - a[r] * w[r];
            w[r] = (w[r] - s) / a[r];
        }
        return lu_.transpose().solve(w);
    }

    Eigen::VectorXd column(int k) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
        for_col(k, [&](int r, double a) { v[r] = a; });
        return v;
    }

    void pivot_in(int q, int r, const Eigen::VectorXd& alpha) {
        const int leaving = head_[r];
        pos_[leaving] = -1;
        head_[r] = q;
        pos_[q] = r;
        etas_.emplace_back(r, alpha);
        if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) refactor();
    }

    void compute_duals(const std::vector<double>& c) {
        if (m_ == 0) { y_.clear(); return; }
        Eigen::VectorXd cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = c[head_[i]];
        Eigen::VectorXd y = btran(cb);
        y_.assign(y.data(), y.data() + m_);
    }

    LpStatus iterate(const std::vector<double>& c) {
        int degenerate_run = 0;
        int verify_rounds = 0;
        double cscale = 1.0;
        for (double v : c) cscale = std::max(cscale, std::abs(v));
        const double dtol = opt_.opt_tol * cscale;
        Eigen::VectorXd yv;
        while (true) {
            if (iters_ >= opt_.max_iterations) {
                std::ostringstream os;
                os << "iteration limit " << opt_.max_iterations << " reached (m=" << m_ << ", etas=" << etas_.size() << ")";
                throw LpNumericalError(os.str());
            }
            compute_duals(c);
            yv = m_ ? Eigen::Map<Eigen::VectorXd>(y_.data(), m_) : Eigen::VectorXd();
            const bool bland = degenerate_run >= opt_.degenerate_before_bland;
            int q = -1, dir = 0;
            double best = 0.0;
            for (int k = 0; k < N_; ++k) {
                if (pos_[k] >= 0 || lo_[k] == hi_[k]) continue;
                const double d = c[k] - (m_ ? dot_col(k, yv) : 0.0);
                const bool can_up = x_[k] < hi_[k] && (d < -dtol);
                const bool can_down = x_[k] > lo_[k] && (d > dtol);
                if (!can_up && !can_down) continue;
                if (bland) { q = k; dir = can_up ? 1 : -1; break; }
                if (std::abs(d) > best) { best = std::abs(d); q = k; dir = can_up ? 1 : -1; }
            }
            if (q < 0) {
                // confirm on a fresh factorization before declaring optimality
                if (!etas_.empty() && verify_rounds < 3) {
                    refactor();
                    ++verify_rounds;
                    continue;
                }
                return LpStatus::Optimal;
            }
            Eigen::VectorXd alpha = m_ ? ftran(column(q)) : Eigen::VectorXd();
            // Harris two-pass ratio test
            const double tol = opt_.feas_tol;
            double tmax = kInf;
            for (int i = 0; i < m_; ++i) {
                const double delta = -dir * alpha[i];
                const int b = head_[i];
                if (delta < -opt_.pivot_tol && std::isfinite(lo_[b])) tmax = std::min(tmax, (x_[b] - lo_[b] + tol) / -delta);
                else if (delta > opt_.pivot_tol && std::isfinite(hi_[b])) tmax = std::min(tmax, (hi_[b] - x_[b] + tol) / delta);
            }
            int r = -1;
            double t = kInf, best_piv = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double delta = -dir * alpha[i];
                const int b = head_[i];
                double ti;
                if (delta < -opt_.pivot_tol && std::isfinite(lo_[b])) ti = (x_[b] - lo_[b]) / -delta;
                else if (delta > opt_.pivot_tol && std::isfinite(hi_[b])) ti = (hi_[b] - x_[b]) / delta;
                else continue;
                if (ti > tmax) continue;
                ti = std::max(ti, 0.0);
                const double piv = std::abs(delta);
                bool take;
                if (bland) take = r < 0 || head_[i] < head_[r];
                else take = piv > best_piv;
                if (take) { r = i; t = ti; best_piv = piv; }
            }
            const double span = hi_[q] - lo_[q];
            const bool flip = std::isfinite(span) && (r < 0 || span <= t);
            if (r < 0 && !flip) return LpStatus::Unbounded;
            if (flip) t = span;

            ++iters_;
            if (bland) ++bland_;
            if (t <= 1e-12) { ++degenerate_run; ++degen_; }
            else degenerate_run = 0;
            verify_rounds = 0;

            for (int i = 0; i < m_; ++i) x_[head_[i]] += -dir * alpha[i] * t;
            if (flip) {
                x_[q] = dir > 0 ? hi_[q] : lo_[q];
                continue;
            }
            x_[q] += dir * t;
            const int leaving = head_[r];
            const double delta_r = -dir * alpha[r];
            x_[leaving] = delta_r < 0 ? lo_[leaving] : hi_[leaving];
            pivot_in(q, r, alpha);
        }
    }

    // Degenerate pivots replacing zero-level artificials with real columns.
    void drive_out_artificials() {
        for (int r = 0; r < m_; ++r) {
            if (head_[r] < first_art_) continue;
            Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
            e[r] = 1.0;
            Eigen::VectorXd rho = btran(e);
            int best = -1;
            double best_abs = 1e-7;
            for (int k = 0; k < first_art_; ++k) {
                if (pos_[k] >= 0) continue;
                double a = std::abs(dot_col(k, rho));
                if (a > best_abs) { best_abs = a; best = k; }
            }
            if (best < 0) continue;
            Eigen::VectorXd alpha = ftran(column(best));
            const int art = head_[r];
            pivot_in(best, r, alpha);
            x_[art] = 0.0;
        }
        refactor();
    }

    void finish(std::vector<double>& xs, std::vector<double>& y, long& iters, long& degen, long& bland) {
        xs.assign(x_.begin(), x_.begin() + R_.n);
        y = y_;
        iters = iters_;
        degen = degen_;
        bland = bland_;
    }
};

}  // namespace

LpSolution solve_lp(const MilpProblem& P, const LpOptions& opt) {
    std::vector<double> lb, ub;
    for (const auto& v : P.vars) {
        lb.push_back(v.lb);
        ub.push_back(v.ub);
    }
    return solve_lp(P, lb, ub, opt);
}

LpSolution solve_lp(const MilpProblem& P, const std::vector<double>& lb0, const std::vector<double>& ub0, const LpOptions& opt) {
    const int n0 = static_cast<int>(P.vars.size());
    const int m0 = static_cast<int>(P.rows.size());
    LpSolution sol;
    sol.values.assign(n0, 0.0);
    sol.dual_values.assign(m0, 0.0);
    sol.reduced_costs.assign(n0, 0.0);

    Presolve ps = presolve(P, lb0, ub0, opt);
    if (ps.infeasible) {
        sol.status = LpStatus::Infeasible;
        return sol;
    }

    Reduced R;
    std::vector<int> red_col(n0, -1), red_row(m0, -1);
    for (int j = 0; j < n0; ++j) {
        if (fixed(ps.lb[j], ps.ub[j])) continue;
        red_col[j] = R.n++;
        R.col_of.push_back(j);
        R.lb.push_back(ps.lb[j]);
        R.ub.push_back(ps.ub[j]);
        R.cost.push_back(P.objective[j]);
    }
    std::vector<std::vector<std::pair<int, double>>> cols(R.n);
    for (int i = 0; i < m0; ++i) {
        if (ps.row_dropped[i]) continue;
        const auto& r = P.rows[i];
        const int ri = R.m++;
        red_row[i] = ri;
        R.row_of.push_back(i);
        double shift = 0.0;
        for (auto [j, a] : r.coeffs) {
            if (red_col[j] < 0) shift += a * ps.lb[j];
            else cols[red_col[j]].push_back({ri, a});
        }
        const double rhs = r.rhs - shift;
        R.rlo.push_back(r.sense == Sense::LE ? -kInf : rhs);
        R.rhi.push_back(r.sense == Sense::GE ? kInf : rhs);
    }
    R.start.push_back(0);
    for (int j = 0; j < R.n; ++j) {
        for (auto [i, a] : cols[j]) {
            R.idx.push_back(i);
            R.val.push_back(a);
        }
        R.start.push_back(static_cast<int>(R.idx.size()));
    }

    Simplex spx(R, opt);
    std::vector<double> xr, yr;
    sol.status = spx.run(xr, yr, sol.iterations, sol.degenerate_pivots, sol.bland_pivots);

    for (int j = 0; j < n0; ++j) sol.values[j] = red_col[j] >= 0 ? xr[red_col[j]] : ps.lb[j];
    if (sol.status != LpStatus::Optimal) return sol;
    for (int ri = 0; ri < R.m; ++ri) sol.dual_values[R.row_of[ri]] = yr.empty() ? 0.0 : yr[ri];

    // reduced costs over kept rows, then hand multipliers of bounds that
    // came from singleton rows back to those rows
    for (int j = 0; j < n0; ++j) sol.reduced_costs[j] = P.objective[j];
    for (int i = 0; i < m0; ++i) {
        if (red_row[i] < 0) continue;
        for (auto [j, a] : P.rows[i].coeffs) sol.reduced_costs[j] -= sol.dual_values[i] * a;
    }
    for (int j = 0; j < n0; ++j) {
        const double d = sol.reduced_costs[j];
        if (d == 0.0) continue;
        int src = -1;
        if (d > 0 && ps.lb_src[j] >= 0 && ps.lb[j] > lb0[j]) src = ps.lb_src[j];
        else if (d < 0 && ps.ub_src[j] >= 0 && ps.ub[j] < ub0[j]) src = ps.ub_src[j];
        if (src < 0) continue;
        double a = 0.0;
        for (auto [jj, aa] : P.rows[src].coeffs)
            if (jj == j) a = aa;
        sol.dual_values[src] += d / a;
        sol.reduced_costs[j] = 0.0;
    }
    sol.objective = P.evaluate_objective(sol.values);
    return sol;
}

}  // namespace stormuc
