#include "stormuc/multiclass.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace stormuc {

const char* label_name(ClassLabel c) {
    switch (c) {
        case ClassLabel::Operational: return "Operational";
        case ClassLabel::Uncertain: return "Uncertain";
        case ClassLabel::Outage: return "Outage";
    }
    return "?";
}

ClassLabel parse_label(const std::string& s) {
    std::string t;
    for (char ch : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (t == "operational" || t == "0") return ClassLabel::Operational;
    if (t == "uncertain" || t == "1") return ClassLabel::Uncertain;
    if (t == "outage" || t == "damaged" || t == "2") return ClassLabel::Outage;
    throw std::invalid_argument("unknown class label '" + s + "'");
}

namespace {

std::vector<int> resolve_order(const std::vector<ClassSample>& data, std::optional<std::vector<int>> order) {
    std::set<int> present;
    for (const auto& s : data) present.insert(s.label);
    if (!order) return {present.begin(), present.end()};
    std::set<int> given(order->begin(), order->end());
    if (given.size() != order->size()) throw std::invalid_argument("class order has duplicates");
    for (int p : present)
        if (!given.count(p)) throw std::invalid_argument("class order misses a present label");
    std::vector<int> out;
    for (int k : *order)
        if (present.count(k)) out.push_back(k);
    return out;
}

}  // namespace

OvOModel train_one_vs_one(const std::vector<ClassSample>& data, double c, const KernelSpec& spec,
                          std::optional<std::vector<int>> class_order, const SmoOptions& opt) {
    OvOModel model;
    model.classes = resolve_order(data, std::move(class_order));
    if (model.classes.size() < 2) throw std::invalid_argument("train_one_vs_one: need at least 2 classes");
    model.c = c;
    model.kernel = spec.resolved(data.front().x.size());
    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            const int ca = model.classes[a], cb = model.classes[b];
            std::vector<LabeledSample> sub;
            for (const auto& s : data) {
                if (s.label == ca) sub.push_back({s.x, 1});
                else if (s.label == cb) sub.push_back({s.x, -1});
            }
            try {
                model.pairwise.push_back({ca, cb, train_binary(sub, c, model.kernel, opt)});
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "pair (" << ca << "," << cb << "): " << e.what();
                throw MulticlassTrainingError(os.str(), ca, cb);
            }
        }
    }
    return model;
}

VoteDetail vote(const OvOModel& model, std::span<const double> x) {
    const std::size_t g = model.classes.size();
    VoteDetail d;
    d.votes.assign(g, 0);
    d.magnitude.assign(g, 0.0);
    auto index_of = [&](int cls) {
        return static_cast<std::size_t>(std::find(model.classes.begin(), model.classes.end(), cls) - model.classes.begin());
    };
    for (const auto& p : model.pairwise) {
        double f = decision_value(p.model, x);
        std::size_t k = index_of(f >= 0.0 ? p.first : p.second);
        d.votes[k] += 1;
        d.magnitude[k] += std::abs(f);
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < g; ++k) {
        if (d.votes[k] > d.votes[best] || (d.votes[k] == d.votes[best] && d.magnitude[k] > d.magnitude[best]))
            best = k;
    }
    d.winner = model.classes[best];
    return d;
}

int predict_vote(const OvOModel& model, std::span<const double> x) { return vote(model, x).winner; }

OvRModel train_one_vs_rest(const std::vector<ClassSample>& data, double c, const KernelSpec& spec,
                           std::optional<std::vector<int>> class_order, const SmoOptions& opt) {
    OvRModel model;
    model.classes = resolve_order(data, std::move(class_order));
    if (model.classes.size() < 2) throw std::invalid_argument("train_one_vs_rest: need at least 2 classes");
    model.c = c;
    model.kernel = spec.resolved(data.front().x.size());
    if (model.classes.size() == 2) {
        // the rest of class 0 is class 1; one classifier, mirrored for the second class
        std::vector<LabeledSample> sub;
        for (const auto& s : data) sub.push_back({s.x, s.label == model.classes[0] ? 1 : -1});
        BinarySvmModel m = train_binary(sub, c, model.kernel, opt);
        BinarySvmModel mirrored = m;
        for (double& a : mirrored.alphas) a = -a;
        mirrored.bias = -m.bias;
        model.per_class = {m, mirrored};
        return model;
    }
    for (int cls : model.classes) {
        std::vector<LabeledSample> sub;
        for (const auto& s : data) sub.push_back({s.x, s.label == cls ? 1 : -1});
        try {
            model.per_class.push_back(train_binary(sub, c, model.kernel, opt));
        } catch (const std::exception& e) {
            throw MulticlassTrainingError(std::string("class ") + std::to_string(cls) + ": " + e.what(), cls, -1);
        }
    }
    return model;
}

int predict_margin(const OvRModel& model, std::span<const double> x) {
    if (model.classes.size() == 2) {
        // keep the binary tie rule: f == 0 goes to the +1 side
        return decision_value(model.per_class[0], x) >= 0.0 ? model.classes[0] : model.classes[1];
    }
    std::size_t best = 0;
    double best_f = decision_value(model.per_class[0], x);
    for (std::size_t k = 1; k < model.per_class.size(); ++k) {
        double f = decision_value(model.per_class[k], x);
        if (f > best_f) { best_f = f; best = k; }
    }
    return model.classes[best];
}

namespace {

nlohmann::json kernel_json(const KernelSpec& k) {
    nlohmann::json j;
    j["kind"] = k.kind == KernelKind::Linear ? "linear" : k.kind == KernelKind::Polynomial ? "polynomial" : "gaussian";
    if (k.kind == KernelKind::Polynomial) j["degree"] = k.degree;
    if (k.kind == KernelKind::Gaussian) j["gamma"] = k.gamma;
    return j;
}

KernelSpec kernel_from(const nlohmann::json& j) {
    KernelSpec k;
    std::string kind = j.at("kind");
    if (kind == "linear") k = KernelSpec::linear();
    else if (kind == "polynomial") k = KernelSpec::polynomial(j.at("degree").get<int>());
    else if (kind == "gaussian") k = KernelSpec::gaussian(j.at("gamma").get<double>());
    else throw std::invalid_argument("unknown kernel kind '" + kind + "'");
    k.validate(false);
    return k;
}

}  // namespace

std::string model_to_json(const OvOModel& model) {
    nlohmann::json j;
    j["format"] = "stormuc-ovo-1";
    j["classes"] = model.classes;
    j["c"] = model.c;
    j["kernel"] = kernel_json(model.kernel);
    j["pairwise"] = nlohmann::json::array();
    for (const auto& p : model.pairwise) {
        nlohmann::json e;
        e["positive"] = p.first;
        e["negative"] = p.second;
        e["bias"] = p.model.bias;
        e["dim"] = p.model.dim;
        e["alphas"] = p.model.alphas;
        e["support_vectors"] = p.model.support_vectors;
        j["pairwise"].push_back(e);
    }
    // doubles are written in shortest round-trip form
    return j.dump(1);
}

OvOModel model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != "stormuc-ovo-1") throw std::invalid_argument("not an OvO model file");
    OvOModel m;
    m.classes = j.at("classes").get<std::vector<int>>();
    m.c = j.at("c").get<double>();
    m.kernel = kernel_from(j.at("kernel"));
    for (const auto& e : j.at("pairwise")) {
        PairModel p;
        p.first = e.at("positive");
        p.second = e.at("negative");
        p.model.bias = e.at("bias");
        p.model.dim = e.at("dim");
        p.model.alphas = e.at("alphas").get<std::vector<double>>();
        p.model.support_vectors = e.at("support_vectors").get<std::vector<std::vector<double>>>();
        p.model.kernel = m.kernel;
        p.model.c = m.c;
        if (p.model.alphas.size() != p.model.support_vectors.size())
            throw std::invalid_argument("model file: alpha / support vector count mismatch");
        m.pairwise.push_back(std::move(p));
    }
    const std::size_t g = m.classes.size();
    if (m.pairwise.size() != g * (g - 1) / 2) throw std::invalid_argument("model file: wrong number of pairwise classifiers");
    return m;
}

void save_model(const OvOModel& model, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << model_to_json(model) << "\n";
}

OvOModel load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace stormuc
