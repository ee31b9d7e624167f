#include <doctest.h>

#include <cmath>
#include <random>

#include "stormuc/kernel_svm.hpp"

using namespace stormuc;

namespace {

using V = std::vector<double>;

double kv(const KernelSpec& k, V a, V b) { return kernel_eval(k, a, b); }

// f(x) for every training point
std::vector<double> margins(const BinarySvmModel& m, const std::vector<LabeledSample>& d) {
    std::vector<double> out;
    for (const auto& s : d) out.push_back(s.y * decision_value(m, s.x));
    return out;
}

// unsigned alpha per training sample, recovered by matching support vectors
std::vector<double> alpha_per_sample(const BinarySvmModel& m, const std::vector<LabeledSample>& d) {
    std::vector<double> a(d.size(), 0.0);
    std::vector<bool> used(m.support_vectors.size(), false);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t k = 0; k < m.support_vectors.size(); ++k)
            if (!used[k] && m.support_vectors[k] == d[i].x && (m.alphas[k] > 0) == (d[i].y > 0)) {
                a[i] = std::abs(m.alphas[k]);
                used[k] = true;
                break;
            }
    return a;
}

std::vector<LabeledSample> blobs(int n, std::uint64_t seed, double sep) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.15);
    std::vector<LabeledSample> d;
    for (int i = 0; i < n; ++i) {
        int y = i % 2 ? 1 : -1;
        d.push_back({{0.5 + y * sep + g(rng), 0.5 + g(rng)}, y});
    }
    return d;
}

}  // namespace

TEST_CASE("kernel values") {
    CHECK(kv(KernelSpec::polynomial(2), {1, 0}, {1, 0}) == 1.0);
    CHECK(kv(KernelSpec::polynomial(2), {1, 2}, {3, 1}) == 25.0);
    CHECK(kv(KernelSpec::gaussian(1.0), {0.3, 0.7}, {0.3, 0.7}) == 1.0);
    CHECK(kv(KernelSpec::linear(), {0, 0}, {0.4, -3}) == 0.0);
    CHECK(kv(KernelSpec::polynomial(3), {1, 1}, {1, 1}) == 8.0);  // unshifted (x.x')^d
    CHECK(kv(KernelSpec::gaussian(2.0), {0, 0}, {1, 0}) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("kernel errors") {
    CHECK_THROWS(kv(KernelSpec::linear(), {1, 2}, {1, 2, 3}));
    CHECK_THROWS(kv(KernelSpec::linear(), {NAN, 0}, {1, 0}));
    CHECK_THROWS(kv(KernelSpec::linear(), {INFINITY, 0}, {1, 0}));
    CHECK_THROWS(KernelSpec::polynomial(0).validate());
    CHECK_THROWS(KernelSpec::gaussian(-1.0).validate());
    CHECK_THROWS(parse_kernel("sigmoid"));
    CHECK(parse_kernel("quadratic") == KernelSpec::polynomial(2));
    CHECK(parse_kernel("cubic") == KernelSpec::polynomial(3));
    CHECK(parse_kernel("gaussian:0.5") == KernelSpec::gaussian(0.5));
    CHECK(KernelSpec::gaussian().resolved(2).gamma == 0.5);
}

TEST_CASE("kernel symmetry over random pairs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (const auto& k : {KernelSpec::linear(), KernelSpec::polynomial(2), KernelSpec::polynomial(3), KernelSpec::gaussian(0.7)})
        for (int i = 0; i < 200; ++i) {
            V a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
            CHECK(kv(k, a, b) == kv(k, b, a));
        }
}

TEST_CASE("two-point max margin matches analytic solution") {
    // w = (1,0), g = -1 for points 2 apart
    std::vector<LabeledSample> d{{{0, 0}, -1}, {{2, 0}, +1}};
    auto m = train_binary(d, 1e6, KernelSpec::linear());
    CHECK(std::abs(decision_value(m, V{1, 0})) <= 1e-4);
    CHECK(std::abs(decision_value(m, V{2, 0}) - 1.0) <= 1e-3);
    CHECK(std::abs(decision_value(m, V{0, 0}) + 1.0) <= 1e-3);
}

TEST_CASE("XOR with gaussian kernel matches brute-force dual") {
    std::vector<LabeledSample> d{{{0, 0}, +1}, {{1, 1}, +1}, {{0, 1}, -1}, {{1, 0}, -1}};
    const KernelSpec k = KernelSpec::gaussian(1.0);
    SmoDiagnostics diag;
    auto m = train_binary(d, 10.0, k, {}, &diag);
    for (const auto& s : d) CHECK(predict_binary(m, s.x) == s.y);

    // grid oracle over [0,10]^4 at resolution 0.01; the equality constraint
    // fixes a4 = a1 + a2 - a3, so three coordinates are enumerated
    double Q[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) Q[i][j] = d[i].y * d[j].y * kernel_eval(k, d[i].x, d[j].x);
    double best = -1e300;
    const int n = 1000;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int l = std::max(0, i + j - n); l <= std::min(n, i + j); ++l) {
                const double a[4] = {i * 0.01, j * 0.01, l * 0.01, (i + j - l) * 0.01};
                double w = a[0] + a[1] + a[2] + a[3];
                for (int p = 0; p < 4; ++p)
                    for (int q = 0; q < 4; ++q) w -= 0.5 * a[p] * a[q] * Q[p][q];
                best = std::max(best, w);
            }
    CHECK(diag.dual_objective == doctest::Approx(best).epsilon(1e-2));
    CHECK(diag.dual_objective >= best - 1e-9);  // grid points are feasible, so SMO can only be better
}

TEST_CASE("brute-force dual equivalence on small random sets") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto d = blobs(4, seed, 0.2);
        const double c = 2.0;
        const KernelSpec k = KernelSpec::linear();
        SmoDiagnostics diag;
        train_binary(d, c, k, {}, &diag);
        // exhaustive grid with the equality constraint solved for the last coordinate
        double best = -1e300;
        const int n = 100;
        const double h = c / n;
        const int yl = d[3].y;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                for (int l = 0; l <= n; ++l) {
                    std::vector<double> a{i * h, j * h, l * h, 0};
                    double s = 0;
                    for (int t = 0; t < 3; ++t) s += a[t] * d[t].y;
                    a[3] = -s * yl;
                    if (a[3] < -1e-12 || a[3] > c + 1e-12) continue;
                    best = std::max(best, dual_objective(d, k, a));
                }
        CHECK(diag.dual_objective == doctest::Approx(best).epsilon(1e-2));
    }
}

TEST_CASE("dual feasibility and KKT after training") {
    for (const auto& k : {KernelSpec::linear(), KernelSpec::polynomial(2), KernelSpec::gaussian()}) {
        auto d = blobs(60, 11, 0.1);
        const double c = 1.0;
        const SmoOptions opt;
        auto m = train_binary(d, c, k, opt);
        double sum = 0;
        for (double a : m.alphas) {
            CHECK(std::abs(a) <= c + 1e-12);
            CHECK(std::abs(a) > opt.alpha_epsilon);
            sum += a;
        }
        CHECK(std::abs(sum) <= 1e-6);
        auto a = alpha_per_sample(m, d);
        auto f = margins(m, d);
        const double tol = opt.kkt_tolerance;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (a[i] <= opt.alpha_epsilon) CHECK(f[i] >= 1 - tol - 1e-9);
            else if (a[i] >= c - 1e-8) CHECK(f[i] <= 1 + tol + 1e-9);
            else CHECK(std::abs(f[i] - 1) <= tol + 1e-9);
        }
    }
}

TEST_CASE("duplicated samples keep the equality constraint") {
    std::vector<LabeledSample> d{{{0.2, 0.3}, -1}, {{0.2, 0.3}, -1}, {{0.8, 0.6}, 1}, {{0.8, 0.6}, 1}};
    auto m = train_binary(d, 1.0, KernelSpec::linear());
    double s = 0;
    for (double a : m.alphas) s += a;
    CHECK(std::abs(s) <= 1e-6);
}

TEST_CASE("training errors") {
    std::vector<LabeledSample> one{{{0, 0}, 1}, {{1, 1}, 1}};
    CHECK_THROWS(train_binary(one, 1.0, KernelSpec::linear()));
    std::vector<LabeledSample> d{{{0, 0}, -1}, {{1, 1}, 1}};
    CHECK_THROWS(train_binary(d, 0.0, KernelSpec::linear()));
    CHECK_THROWS(train_binary(d, -1.0, KernelSpec::linear()));
    // one pass budget cannot converge a noisy set; the error carries diagnostics
    auto hard = blobs(80, 5, 0.0);
    SmoOptions tight;
    tight.pass_factor = 0;
    try {
        train_binary(hard, 10.0, KernelSpec::linear(), tight);
        FAIL("expected SvmTrainingError");
    } catch (const SvmTrainingError& e) {
        CHECK(e.diagnostics.kkt_gap > tight.kkt_tolerance);
    }
}

TEST_CASE("decision value basics") {
    BinarySvmModel m;
    m.bias = 0.37;
    m.dim = 2;
    CHECK(decision_value(m, V{0.1, 0.9}) == 0.37);
    CHECK_THROWS(decision_value(m, V{0.1}));
    auto d = blobs(40, 2, 0.2);
    auto t = train_binary(d, 1.0, KernelSpec::linear());
    CHECK_THROWS(decision_value(t, V{1, 2, 3}));
}

TEST_CASE("prediction sign and tie rule") {
    BinarySvmModel m;
    m.dim = 1;
    m.bias = 0.7;
    CHECK(predict_binary(m, V{0}) == 1);
    m.bias = -0.7;
    CHECK(predict_binary(m, V{0}) == -1);
    m.bias = 0.0;
    CHECK(predict_binary(m, V{0}) == 1);
}

TEST_CASE("free support vectors sit on the margin") {
    auto d = blobs(50, 8, 0.15);
    const double c = 5.0;
    auto m = train_binary(d, c, KernelSpec::polynomial(2));
    int checked = 0;
    for (std::size_t k = 0; k < m.support_vectors.size(); ++k) {
        const double a = std::abs(m.alphas[k]);
        if (a >= c - 1e-6) continue;
        const int y = m.alphas[k] > 0 ? 1 : -1;
        CHECK(std::abs(y * decision_value(m, m.support_vectors[k]) - 1.0) <= 1e-3 + 1e-9);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("scaling alphas and bias scales f and keeps the sign") {
    auto d = blobs(40, 9, 0.1);
    auto m = train_binary(d, 1.0, KernelSpec::gaussian());
    for (double lambda : {0.5, 3.0}) {
        BinarySvmModel s = m;
        for (double& a : s.alphas) a *= lambda;
        s.bias *= lambda;
        for (const auto& p : d) {
            CHECK(decision_value(s, p.x) == doctest::Approx(lambda * decision_value(m, p.x)));
            CHECK(predict_binary(s, p.x) == predict_binary(m, p.x));
        }
    }
}

TEST_CASE("training is deterministic for a fixed seed") {
    auto d = blobs(60, 4, 0.05);
    SmoOptions o;
    o.seed = 7;
    auto a = train_binary(d, 1.0, KernelSpec::linear(), o);
    auto b = train_binary(d, 1.0, KernelSpec::linear(), o);
    CHECK(a.alphas == b.alphas);
    CHECK(a.bias == b.bias);
    CHECK(a.support_vectors == b.support_vectors);
}
