#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stormuc/kernel_svm.hpp"

namespace stormuc {

enum class ClassLabel : int { Operational = 0, Uncertain = 1, Outage = 2 };

const char* label_name(ClassLabel c);
ClassLabel parse_label(const std::string& s);

struct ClassSample {
    std::vector<double> x;
    int label = 0;
};

struct PairModel {
    int first = 0;   // class id voted for on +1
    int second = 0;  // class id voted for on -1
    BinarySvmModel model;
};

struct OvOModel {
    std::vector<int> classes;  // order fixes the pair convention
    std::vector<PairModel> pairwise;
    KernelSpec kernel;
    double c = 1.0;
};

struct OvRModel {
    std::vector<int> classes;
    std::vector<BinarySvmModel> per_class;
    KernelSpec kernel;
    double c = 1.0;
};

struct VoteDetail {
    int winner = 0;
    std::vector<int> votes;          // indexed like model.classes
    std::vector<double> magnitude;   // summed |f| of classifiers that voted for the class
};

class MulticlassTrainingError : public std::runtime_error {
public:
    MulticlassTrainingError(const std::string& w, int a, int b) : std::runtime_error(w), first(a), second(b) {}
    int first, second;
};

// class_order defaults to the distinct labels in ascending order.
OvOModel train_one_vs_one(const std::vector<ClassSample>& data, double c, const KernelSpec& spec,
                          std::optional<std::vector<int>> class_order = std::nullopt, const SmoOptions& opt = {});
VoteDetail vote(const OvOModel& model, std::span<const double> x);
int predict_vote(const OvOModel& model, std::span<const double> x);

OvRModel train_one_vs_rest(const std::vector<ClassSample>& data, double c, const KernelSpec& spec,
                           std::optional<std::vector<int>> class_order = std::nullopt, const SmoOptions& opt = {});
int predict_margin(const OvRModel& model, std::span<const double> x);

std::string model_to_json(const OvOModel& model);
OvOModel model_from_json(const std::string& text);
void save_model(const OvOModel& model, const std::string& path);
OvOModel load_model(const std::string& path);

}  // namespace stormuc
