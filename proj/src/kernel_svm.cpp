#include "stormuc/kernel_svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stormuc {

void KernelSpec::validate(bool allow_unresolved_gamma) const {
    if (kind == KernelKind::Polynomial && degree < 1)
        throw std::invalid_argument("polynomial kernel degree must be >= 1");
    if (kind == KernelKind::Gaussian) {
        if (gamma < 0.0 || !std::isfinite(gamma) || (gamma == 0.0 && !allow_unresolved_gamma))
            throw std::invalid_argument("gaussian kernel gamma must be > 0");
    }
}

KernelSpec KernelSpec::resolved(std::size_t features) const {
    KernelSpec out = *this;
    if (kind == KernelKind::Gaussian && gamma == 0.0) {
        if (features == 0) throw std::invalid_argument("cannot resolve gamma for zero features");
        out.gamma = 1.0 / static_cast<double>(features);
    }
    return out;
}

std::string KernelSpec::name() const {
    switch (kind) {
        case KernelKind::Linear: return "linear";
        case KernelKind::Polynomial: return "poly" + std::to_string(degree);
        case KernelKind::Gaussian: {
            if (gamma == 0.0) return "gaussian";
            std::ostringstream os;
            os << "gaussian:" << gamma;
            return os.str();
        }
    }
    return "?";
}

KernelSpec parse_kernel(const std::string& text) {
    if (text == "linear") return KernelSpec::linear();
    if (text == "quadratic") return KernelSpec::polynomial(2);
    if (text == "cubic") return KernelSpec::polynomial(3);
    if (text.rfind("poly", 0) == 0 && text.size() > 4) {
        int d = std::stoi(text.substr(4));
        KernelSpec k = KernelSpec::polynomial(d);
        k.validate();
        return k;
    }
    if (text == "gaussian" || text == "rbf") return KernelSpec::gaussian();
    if (text.rfind("gaussian:", 0) == 0) {
        KernelSpec k = KernelSpec::gaussian(std::stod(text.substr(9)));
        k.validate(false);
        return k;
    }
    throw std::invalid_argument("unknown kernel '" + text + "'");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("kernel_eval: dimension mismatch");
    double acc = 0.0;
    if (spec.kind == KernelKind::Gaussian) {
        if (!(spec.gamma > 0.0)) throw std::invalid_argument("kernel_eval: unresolved gaussian gamma");
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (!std::isfinite(a[k]) || !std::isfinite(b[k])) throw std::invalid_argument("kernel_eval: non-finite input");
            // (a-b)^2 == (b-a)^2 bitwise, so symmetry is exact
            double d = a[k] - b[k];
            acc += d * d;
        }
        return std::exp(-spec.gamma * acc);
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!std::isfinite(a[k]) || !std::isfinite(b[k])) throw std::invalid_argument("kernel_eval: non-finite input");
        acc += a[k] * b[k];
    }
    if (spec.kind == KernelKind::Linear) return acc;
    double r = 1.0;
    for (int k = 0; k < spec.degree; ++k) r *= acc;
    return r;
}

namespace {

struct Smo {
    std::size_t n;
    double c;
    const std::vector<int>& y;
    std::vector<double> K;  // n*n
    std::vector<double> alpha, grad;
    SmoOptions opt;
    long long steps = 0;

    Smo(std::size_t n_, double c_, const std::vector<int>& y_, std::vector<double> k_, const SmoOptions& o)
        : n(n_), c(c_), y(y_), K(std::move(k_)), alpha(n_, 0.0), grad(n_, -1.0), opt(o) {}

    double k(std::size_t i, std::size_t j) const { return K[i * n + j]; }
    bool in_up(std::size_t t) const { return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0); }
    bool in_low(std::size_t t) const { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c); }
    double v(std::size_t t) const { return -y[t] * grad[t]; }
    bool non_bound(std::size_t t) const { return alpha[t] > 0 && alpha[t] < c; }

    // m = max over I_up, M = min over I_low
    void extremes(double& m, std::size_t& iu, double& M, std::size_t& jl) const {
        m = -std::numeric_limits<double>::infinity();
        M = std::numeric_limits<double>::infinity();
        iu = jl = n;
        for (std::size_t t = 0; t < n; ++t) {
            double vt = v(t);
            if (in_up(t) && vt > m) { m = vt; iu = t; }
            if (in_low(t) && vt < M) { M = vt; jl = t; }
        }
    }

    // i from I_up, j from I_low; returns max |delta alpha|
    double step(std::size_t i, std::size_t j) {
        const double Qij = y[i] * y[j] * k(i, j);
        const double ai = alpha[i], aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = k(i, i) + k(j, j) + 2.0 * Qij;
            if (quad <= 0) quad = 1e-12;
            double delta = (-grad[i] - grad[j]) / quad;
            double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
            } else {
                if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
            }
            if (diff > 0) {
                if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
            } else {
                if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
            }
        } else {
            double quad = k(i, i) + k(j, j) - 2.0 * Qij;
            if (quad <= 0) quad = 1e-12;
            double delta = (grad[i] - grad[j]) / quad;
            double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
            } else {
                if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
            }
            if (sum > c) {
                if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
            } else {
                if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
            }
        }
        const double dai = alpha[i] - ai, daj = alpha[j] - aj;
        if (dai != 0.0 || daj != 0.0) {
            for (std::size_t t = 0; t < n; ++t)
                grad[t] += y[t] * (y[i] * k(i, t) * dai + y[j] * k(j, t) * daj);
        }
        ++steps;
        return std::max(std::abs(dai), std::abs(daj));
    }

    // Keerthi-style check of one sample against the current extreme pair.
    bool examine(std::size_t t) {
        double m, M;
        std::size_t iu, jl;
        extremes(m, iu, M, jl);
        const double tol = opt.kkt_tolerance;
        double moved = 0.0;
        if (in_up(t) && jl < n && v(t) > M + tol && t != jl) {
            moved = step(t, jl);
        } else if (in_low(t) && iu < n && v(t) < m - tol && t != iu) {
            moved = step(iu, t);
        } else {
            return false;
        }
        return moved > opt.change_tolerance;
    }

    double gap() const {
        double m, M;
        std::size_t iu, jl;
        extremes(m, iu, M, jl);
        if (iu == n || jl == n) return 0.0;
        return m - M;
    }

    double objective() const {
        double lin = 0.0, quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lin += alpha[i];
            // grad = Q a - e  =>  a'Qa = a'(grad + e)
            quad += alpha[i] * (grad[i] + 1.0);
        }
        return lin - 0.5 * quad;
    }

    // Budget is counted in full-pass equivalents: every N examined samples
    // (or N pair steps in the final sweeps) is one pass.
    int run() {
        const long long budget = static_cast<long long>(opt.pass_factor) * static_cast<long long>(n) * static_cast<long long>(n);
        const std::size_t offset = n ? static_cast<std::size_t>(opt.seed % n) : 0;
        long long examined = 0;
        bool examine_all = true;
        while (examined < budget) {
            int changed = 0;
            for (std::size_t s = 0; s < n; ++s) {
                std::size_t t = (s + offset) % n;
                if (!examine_all && !non_bound(t)) continue;
                changed += examine(t) ? 1 : 0;
                ++examined;
            }
            if (examine_all) {
                if (changed == 0) {
                    if (gap() <= opt.kkt_tolerance) return passes_used(examined);
                    break;
                }
                examine_all = false;
            } else if (changed == 0) {
                examine_all = true;
            }
        }
        // Maximal-violating-pair sweeps finish whatever the pass loop left,
        // e.g. pairs whose steps are each below the change threshold.
        while (examined < budget) {
            double m, M;
            std::size_t iu, jl;
            extremes(m, iu, M, jl);
            if (iu == n || jl == n || m - M <= opt.kkt_tolerance) break;
            step(iu, jl);
            ++examined;
        }
        return passes_used(examined);
    }

    int passes_used(long long examined) const {
        return n ? static_cast<int>((examined + static_cast<long long>(n) - 1) / static_cast<long long>(n)) : 0;
    }
};

}  // namespace

BinarySvmModel train_binary(const std::vector<LabeledSample>& data, double c, const KernelSpec& spec_in,
                            const SmoOptions& opt, SmoDiagnostics* diag) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("train_binary: c must be > 0");
    if (data.empty()) throw std::invalid_argument("train_binary: empty dataset");
    const std::size_t n = data.size();
    const std::size_t F = data.front().x.size();
    bool pos = false, neg = false;
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (data[i].x.size() != F) throw std::invalid_argument("train_binary: inconsistent feature dimension");
        for (double v : data[i].x)
            if (!std::isfinite(v)) throw std::invalid_argument("train_binary: non-finite feature");
        if (data[i].y == 1) pos = true;
        else if (data[i].y == -1) neg = true;
        else throw std::invalid_argument("train_binary: labels must be +1 or -1");
        y[i] = data[i].y;
    }
    if (!pos || !neg) throw std::invalid_argument("train_binary: data must contain both labels");
    spec_in.validate();
    const KernelSpec spec = spec_in.resolved(F);

    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double v = kernel_eval(spec, data[i].x, data[j].x);
            K[i * n + j] = v;
            K[j * n + i] = v;
        }

    Smo smo(n, c, y, std::move(K), opt);
    int passes = smo.run();

    SmoDiagnostics d;
    d.passes = passes;
    d.steps = smo.steps;
    d.kkt_gap = smo.gap();
    d.dual_objective = smo.objective();
    if (diag) *diag = d;
    if (d.kkt_gap > opt.kkt_tolerance) {
        std::ostringstream os;
        os << "train_binary: no convergence after " << passes << " passes (kkt gap " << d.kkt_gap << ")";
        throw SvmTrainingError(os.str(), d);
    }

    double m, M;
    std::size_t iu, jl;
    smo.extremes(m, iu, M, jl);
    double bsum = 0.0;
    int nfree = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (smo.non_bound(t)) {
            bsum += smo.v(t);
            ++nfree;
        }
    }
    double bias;
    if (nfree > 0) bias = bsum / nfree;
    else if (iu < n && jl < n) bias = 0.5 * (m + M);
    else bias = iu < n ? m : M;

    BinarySvmModel model;
    model.kernel = spec;
    model.c = c;
    model.bias = bias;
    model.dim = F;
    for (std::size_t t = 0; t < n; ++t) {
        if (smo.alpha[t] > opt.alpha_epsilon) {
            model.support_vectors.push_back(data[t].x);
            model.alphas.push_back(smo.alpha[t] * y[t]);
        }
    }
    return model;
}

double decision_value(const BinarySvmModel& model, std::span<const double> x) {
    if (x.size() != model.dim) throw std::invalid_argument("decision_value: dimension mismatch");
    double f = 0.0;
    for (std::size_t k = 0; k < model.support_vectors.size(); ++k)
        f += model.alphas[k] * kernel_eval(model.kernel, model.support_vectors[k], x);
    return f + model.bias;
}

int predict_binary(const BinarySvmModel& model, std::span<const double> x) {
    return decision_value(model, x) >= 0.0 ? 1 : -1;
}

double dual_objective(const std::vector<LabeledSample>& data, const KernelSpec& spec_in, const std::vector<double>& alpha) {
    const KernelSpec spec = spec_in.resolved(data.empty() ? 0 : data.front().x.size());
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        lin += alpha[i];
        for (std::size_t j = 0; j < data.size(); ++j)
            quad += alpha[i] * alpha[j] * data[i].y * data[j].y * kernel_eval(spec, data[i].x, data[j].x);
    }
    return lin - 0.5 * quad;
}

}  // namespace stormuc
