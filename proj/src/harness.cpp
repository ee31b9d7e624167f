#include "stormuc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace stormuc {

std::vector<std::size_t> FoldPlan::fold_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != fold) out.push_back(i);
    return out;
}

FoldPlan k_fold_split(const std::vector<int>& labels, int q, std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (q < 2) throw std::invalid_argument("k_fold_split: q must be >= 2");
    if (n < static_cast<std::size_t>(q)) throw std::invalid_argument("k_fold_split: fewer samples than folds");
    std::vector<int> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    FoldPlan plan;
    plan.q = q;
    plan.assignment.assign(n, -1);
    std::mt19937_64 rng(seed);
    // Deal each class round-robin, continuing where the previous class stopped,
    // so both per-class and total fold sizes stay within one of each other.
    std::size_t cursor = 0;
    for (int cls : classes) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (labels[i] == cls) idx.push_back(i);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i : idx) plan.assignment[i] = static_cast<int>(cursor++ % q);
    }
    return plan;
}

FoldPlan k_fold_split(std::size_t n, int q, std::uint64_t seed) { return k_fold_split(std::vector<int>(n, 0), q, seed); }

long ConfusionMatrix3::total() const {
    long t = 0;
    for (const auto& r : counts)
        for (long v : r) t += v;
    return t;
}

long ConfusionMatrix3::row_sum(int r) const { return counts[r][0] + counts[r][1] + counts[r][2]; }

double ConfusionMatrix3::row_percent(int r, int c) const {
    long s = row_sum(r);
    return s ? 100.0 * static_cast<double>(counts[r][c]) / static_cast<double>(s) : 0.0;
}

double ConfusionMatrix3::accuracy() const {
    long t = total();
    return t ? 100.0 * static_cast<double>(counts[0][0] + counts[1][1] + counts[2][2]) / static_cast<double>(t) : 0.0;
}

static const char* kNames[3] = {"Operational", "Uncertain", "Outage"};

std::string ConfusionMatrix3::to_csv() const {
    std::ostringstream os;
    os << "actual,predicted_operational,predicted_uncertain,predicted_outage\n";
    for (int r = 0; r < 3; ++r) os << kNames[r] << "," << counts[r][0] << "," << counts[r][1] << "," << counts[r][2] << "\n";
    return os.str();
}

std::string ConfusionMatrix3::to_table() const {
    std::ostringstream os;
    os << std::left << std::setw(12) << "actual" << std::right;
    for (auto n : kNames) os << std::setw(18) << n;
    os << "\n";
    for (int r = 0; r < 3; ++r) {
        os << std::left << std::setw(12) << kNames[r] << std::right;
        for (int c = 0; c < 3; ++c) {
            std::ostringstream cell;
            cell << counts[r][c] << " (" << std::fixed << std::setprecision(1) << row_percent(r, c) << "%)";
            os << std::setw(18) << cell.str();
        }
        os << "\n";
    }
    return os.str();
}

ConfusionMatrix3 confusion(const std::vector<int>& actual, const std::vector<int>& predicted) {
    if (actual.size() != predicted.size()) throw std::invalid_argument("confusion: length mismatch");
    ConfusionMatrix3 m;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] < 0 || actual[i] > 2 || predicted[i] < 0 || predicted[i] > 2)
            throw std::invalid_argument("confusion: labels must be 0..2");
        m.counts[actual[i]][predicted[i]] += 1;
    }
    return m;
}

CvResult cross_validate_detail(const std::vector<ClassSample>& data, int q, double c, const KernelSpec& spec,
                               std::uint64_t seed, const SmoOptions& opt) {
    std::vector<int> labels;
    for (const auto& s : data) labels.push_back(s.label);
    FoldPlan plan = k_fold_split(labels, q, seed);
    CvResult res;
    res.predicted.assign(data.size(), -1);
    for (int f = 0; f < q; ++f) {
        std::vector<ClassSample> train;
        for (std::size_t i : plan.train_indices(f)) train.push_back(data[i]);
        OvOModel model;
        try {
            model = train_one_vs_one(train, c, spec, std::nullopt, opt);
        } catch (const std::exception& e) {
            throw std::runtime_error("fold " + std::to_string(f) + ": " + e.what());
        }
        auto test = plan.fold_indices(f);
        long correct = 0;
        for (std::size_t i : test) {
            int p = predict_vote(model, data[i].x);
            res.predicted[i] = p;
            correct += p == data[i].label;
        }
        res.fold_accuracy.push_back(test.empty() ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(test.size()));
    }
    res.mean_accuracy = std::accumulate(res.fold_accuracy.begin(), res.fold_accuracy.end(), 0.0) / q;
    bool three = std::all_of(labels.begin(), labels.end(), [](int l) { return l >= 0 && l <= 2; });
    if (three) res.pooled = confusion(labels, res.predicted);
    return res;
}

double cross_validate(const std::vector<ClassSample>& data, int q, double c, const KernelSpec& spec, std::uint64_t seed) {
    return cross_validate_detail(data, q, c, spec, seed).mean_accuracy;
}

double SweepResult::at(const KernelSpec& k, double c) const {
    for (const auto& cell : grid)
        if (cell.kernel == k && cell.c == c) return cell.accuracy;
    throw std::out_of_range("sweep cell not found: " + k.name());
}

std::string SweepResult::to_csv() const {
    std::ostringstream os;
    os << "kernel,c,accuracy\n";
    for (const auto& cell : grid)
        os << cell.kernel.name() << "," << cell.c << "," << std::fixed << std::setprecision(4) << cell.accuracy << std::defaultfloat << "\n";
    return os.str();
}

std::vector<double> default_c_list() { return {0.1, 1.0, 10.0, 100.0}; }

std::vector<KernelSpec> default_kernel_list() {
    return {KernelSpec::linear(), KernelSpec::polynomial(2), KernelSpec::polynomial(3), KernelSpec::gaussian()};
}

SweepResult hyperparameter_sweep(const std::vector<ClassSample>& data, const std::vector<double>& c_list,
                                 const std::vector<KernelSpec>& kernels, int q, std::uint64_t seed, const SmoOptions& opt) {
    if (c_list.empty() || kernels.empty()) throw std::invalid_argument("hyperparameter_sweep: empty grid");
    SweepResult r;
    for (const auto& k : kernels)
        for (double c : c_list) r.grid.push_back({k, c, cross_validate_detail(data, q, c, k, seed, opt).mean_accuracy});
    return r;
}

ClassLabel classify_features(const OvOModel& model, double distance, double wind) {
    std::vector<double> x{wind, distance};
    return static_cast<ClassLabel>(predict_vote(model, x));
}

std::vector<ComponentClass> classify_components(const std::vector<ComponentSite>& sites, const HurricaneForecast& forecast,
                                                const OvOModel& model, const Maxima& maxima) {
    std::vector<ComponentClass> out;
    for (const auto& s : sites) {
        if (s.component_id.empty()) throw std::invalid_argument("classify_components: unnamed component");
        RawFeatures raw = component_features(s, forecast, maxima.distance_km);
        auto x = normalize_features(raw.wind_mph, raw.distance_km, maxima.wind_mph, maxima.distance_km);
        out.push_back({s.component_id, x[1], x[0], classify_features(model, x[1], x[0])});
    }
    return out;
}

std::string component_classes_csv(const std::vector<ComponentClass>& rows) {
    std::ostringstream os;
    os << "component,distance,wind,class\n";
    os << std::fixed << std::setprecision(6);
    for (const auto& r : rows) os << r.component_id << "," << r.distance << "," << r.wind << "," << label_name(r.label) << "\n";
    return os.str();
}

std::vector<ComponentClass> read_component_classes_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(f, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("component,distance,wind", 0) != 0) throw std::runtime_error(path + ": expected header 'component,distance,wind[,class]'");
    const bool has_class = line.find(",class") != std::string::npos;
    std::vector<ComponentClass> out;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string id, d, w, l;
        std::getline(ss, id, ',');
        std::getline(ss, d, ',');
        std::getline(ss, w, ',');
        if (has_class) std::getline(ss, l);
        try {
            ComponentClass c{id, std::stod(d), std::stod(w), ClassLabel::Operational};
            if (has_class) c.label = parse_label(l);
            out.push_back(c);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace stormuc
