#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stormuc {

enum class KernelKind { Linear, Polynomial, Gaussian };

struct KernelSpec {
    KernelKind kind = KernelKind::Linear;
    int degree = 1;
    // 0 means "resolve to 1/F at training time"
    double gamma = 0.0;

    static KernelSpec linear() { return {}; }
    static KernelSpec polynomial(int d) { return {KernelKind::Polynomial, d, 0.0}; }
    static KernelSpec gaussian(double g = 0.0) { return {KernelKind::Gaussian, 1, g}; }

    void validate(bool allow_unresolved_gamma = true) const;
    KernelSpec resolved(std::size_t features) const;
    std::string name() const;

    bool operator==(const KernelSpec&) const = default;
};

// Parses "linear", "poly2", "poly3", "quadratic", "cubic", "gaussian", "gaussian:0.5".
KernelSpec parse_kernel(const std::string& text);

// Gamma must already be resolved for Gaussian kernels.
double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

struct LabeledSample {
    std::vector<double> x;
    int y = 1;
};

struct BinarySvmModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> alphas;  // signed: alpha * y
    double bias = 0.0;
    KernelSpec kernel;
    double c = 1.0;
    std::size_t dim = 0;
};

struct SmoOptions {
    double kkt_tolerance = 1e-3;
    double alpha_epsilon = 1e-8;
    double change_tolerance = 1e-5;
    int pass_factor = 10;  // max full passes = pass_factor * N
    std::uint64_t seed = 0;
};

struct SmoDiagnostics {
    int passes = 0;
    long long steps = 0;
    double kkt_gap = 0.0;
    double dual_objective = 0.0;
};

class SvmTrainingError : public std::runtime_error {
public:
    SvmTrainingError(const std::string& what, SmoDiagnostics d) : std::runtime_error(what), diagnostics(d) {}
    SmoDiagnostics diagnostics;
};

BinarySvmModel train_binary(const std::vector<LabeledSample>& data, double c, const KernelSpec& spec,
                            const SmoOptions& opt = {}, SmoDiagnostics* diag = nullptr);

double decision_value(const BinarySvmModel& model, std::span<const double> x);
int predict_binary(const BinarySvmModel& model, std::span<const double> x);

// W(a) = sum a - 1/2 sum_ij a_i a_j y_i y_j K_ij, for unsigned a
double dual_objective(const std::vector<LabeledSample>& data, const KernelSpec& spec, const std::vector<double>& alpha);

}  // namespace stormuc
