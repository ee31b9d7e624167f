#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "stormuc/hurricane.hpp"
#include "stormuc/multiclass.hpp"

namespace stormuc {

struct FoldPlan {
    int q = 5;
    std::vector<int> assignment;  // sample index -> fold

    std::vector<std::size_t> fold_indices(int fold) const;
    std::vector<std::size_t> train_indices(int fold) const;
};

// Stratified by label; deterministic from seed.
FoldPlan k_fold_split(const std::vector<int>& labels, int q, std::uint64_t seed);
FoldPlan k_fold_split(std::size_t n, int q, std::uint64_t seed);

struct ConfusionMatrix3 {
    // rows actual, columns predicted, order Operational, Uncertain, Outage
    std::array<std::array<long, 3>, 3> counts{};

    long total() const;
    long row_sum(int r) const;
    double row_percent(int r, int c) const;
    double accuracy() const;
    std::string to_csv() const;
    std::string to_table() const;
};

ConfusionMatrix3 confusion(const std::vector<int>& actual, const std::vector<int>& predicted);

struct CvResult {
    double mean_accuracy = 0.0;  // percent, unweighted mean over folds
    std::vector<double> fold_accuracy;
    std::vector<int> predicted;  // out-of-fold prediction per sample
    ConfusionMatrix3 pooled;
};

CvResult cross_validate_detail(const std::vector<ClassSample>& data, int q, double c, const KernelSpec& spec,
                               std::uint64_t seed, const SmoOptions& opt = {});
double cross_validate(const std::vector<ClassSample>& data, int q, double c, const KernelSpec& spec, std::uint64_t seed);

struct SweepCell {
    KernelSpec kernel;
    double c = 1.0;
    double accuracy = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> grid;  // kernel-major, in the order requested

    double at(const KernelSpec& k, double c) const;
    std::string to_csv() const;
};

std::vector<double> default_c_list();
std::vector<KernelSpec> default_kernel_list();

SweepResult hyperparameter_sweep(const std::vector<ClassSample>& data, const std::vector<double>& c_list,
                                 const std::vector<KernelSpec>& kernels, int q, std::uint64_t seed, const SmoOptions& opt = {});

struct ComponentClass {
    std::string component_id;
    double distance = 0.0;  // normalized
    double wind = 0.0;      // normalized
    ClassLabel label = ClassLabel::Operational;
};

struct Maxima {
    double wind_mph = 200.0;
    double distance_km = 500.0;
};

std::vector<ComponentClass> classify_components(const std::vector<ComponentSite>& sites, const HurricaneForecast& forecast,
                                                const OvOModel& model, const Maxima& maxima);

// Already-normalized features (distance, wind) straight into the model.
ClassLabel classify_features(const OvOModel& model, double distance, double wind);

std::string component_classes_csv(const std::vector<ComponentClass>& rows);
std::vector<ComponentClass> read_component_classes_csv(const std::string& path);

}  // namespace stormuc
