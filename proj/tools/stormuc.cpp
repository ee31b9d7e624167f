// stormuc: synthetic data -> SVM classifier -> component classes -> E-SCUC schedule -> case report
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "stormuc/config.hpp"
#include "stormuc/escuc.hpp"
#include "stormuc/harness.hpp"
#include "stormuc/hurricane.hpp"

namespace fs = std::filesystem;
using namespace stormuc;
using nlohmann::json;

namespace {

// exit codes
constexpr int kUsage = 2;      // bad flags / config
constexpr int kFailed = 1;     // computation error or missing input
constexpr int kViolated = 3;   // schedule not clean, or report ordering broken

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::optional<long> seed;
    std::optional<std::string> out, dataset, model, network, forecast, policy, export_mps, counts, classes, features;
    std::optional<std::string> kernel, kernels, c_list;
    std::optional<double> gap, c;
    std::optional<int> folds;
    bool verbose = false;
};

// flag wins over config file, config over default
struct Settings {
    Options flags;
    Config cfg;

    std::string str(const std::optional<std::string>& flag, const std::string& key, const std::string& fallback) const {
        if (flag) return *flag;
        return cfg.get_or(key, fallback);
    }
    std::optional<std::string> opt(const std::optional<std::string>& flag, const std::string& key) const {
        if (flag) return flag;
        return cfg.get(key);
    }
    long seed() const { return flags.seed ? *flags.seed : cfg.get_int("seed", 1); }
    fs::path out() const { return str(flags.out, "out", "out"); }
    fs::path artifact(const std::optional<std::string>& flag, const std::string& key, const std::string& name) const {
        auto v = opt(flag, key);
        return v ? fs::path(*v) : out() / name;
    }
};

const std::set<std::string> kConfigKeys = {
    "seed", "out", "dataset", "model", "network", "forecast", "policy", "gap", "export-mps", "counts", "classes",
    "features", "kernel", "kernels", "c", "c-list", "folds", "noise-sigma", "max-wind", "max-distance", "node-limit",
    "time-limit", "pass-factor", "probability-weights", "window-start", "window-end"};

void need(const fs::path& p, const std::string& upstream) {
    if (!fs::exists(p)) throw std::runtime_error("missing " + p.string() + ": run " + upstream + " first");
}

void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<double> doubles(const std::string& s, const std::string& what) {
    std::vector<double> v;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) v.push_back(parse_double(item, what));
    if (v.empty()) throw UsageError(what + ": empty list");
    return v;
}

// ---- subcommands ----

int cmd_generate(const Settings& S) {
    SyntheticSpec spec;
    spec.seed = static_cast<std::uint64_t>(S.seed());
    if (auto c = S.opt(S.flags.counts, "counts")) {
        auto n = parse_int_list(*c, "--counts");
        if (n.size() != 3) throw UsageError("--counts needs operational,uncertain,outage (3 integers)");
        spec.counts = {{ClassLabel::Operational, n[0]}, {ClassLabel::Uncertain, n[1]}, {ClassLabel::Outage, n[2]}};
    }
    spec.noise_sigma = S.cfg.get_double("noise-sigma", spec.noise_sigma);
    spec.max_wind_mph = S.cfg.get_double("max-wind", spec.max_wind_mph);
    spec.max_distance_km = S.cfg.get_double("max-distance", spec.max_distance_km);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const fs::path path = S.artifact(S.flags.dataset, "dataset", "dataset.csv");
    auto data = generate_dataset(spec);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_dataset_csv(data, path.string());
    std::array<int, 3> n{};
    for (const auto& s : data) ++n[static_cast<int>(s.label)];
    std::cout << "wrote " << data.size() << " rows to " << path.string() << " (Operational " << n[0] << ", Uncertain " << n[1]
              << ", Outage " << n[2] << ")\n";
    return 0;
}

SmoOptions smo_options(const Settings& S) {
    SmoOptions o;
    o.pass_factor = static_cast<int>(S.cfg.get_int("pass-factor", o.pass_factor));
    if (o.pass_factor < 1) throw UsageError("pass-factor must be >= 1");
    return o;
}

int cmd_train(const Settings& S) {
    const fs::path ds = S.artifact(S.flags.dataset, "dataset", "dataset.csv");
    const fs::path mp = S.artifact(S.flags.model, "model", "model.json");
    const KernelSpec k = parse_kernel(S.str(S.flags.kernel, "kernel", "linear"));
    const double c = S.flags.c ? *S.flags.c : S.cfg.get_double("c", 1.0);
    const int q = S.flags.folds ? *S.flags.folds : static_cast<int>(S.cfg.get_int("folds", 5));
    if (!(c > 0)) throw UsageError("--c must be > 0");
    if (q < 2) throw UsageError("--folds must be >= 2");
    need(ds, "generate");
    auto data = read_dataset_csv(ds.string());
    const SmoOptions smo = smo_options(S);
    auto cv = cross_validate_detail(data, q, c, k, static_cast<std::uint64_t>(S.seed()), smo);
    auto model = train_one_vs_one(data, c, k, std::nullopt, smo);
    if (mp.has_parent_path()) fs::create_directories(mp.parent_path());
    save_model(model, mp.string());
    std::cout << "kernel " << k.name() << " c " << c << ": " << q << "-fold accuracy " << std::fixed << std::setprecision(2)
              << cv.mean_accuracy << "%\n"
              << cv.pooled.to_table() << "model written to " << mp.string() << "\n";
    write_file(S.out() / "confusion.csv", cv.pooled.to_csv());
    return 0;
}

int cmd_sweep(const Settings& S) {
    const fs::path ds = S.artifact(S.flags.dataset, "dataset", "dataset.csv");
    std::vector<double> cs = default_c_list();
    if (auto v = S.opt(S.flags.c_list, "c-list")) cs = doubles(*v, "--c-list");
    std::vector<KernelSpec> ks = default_kernel_list();
    if (auto v = S.opt(S.flags.kernels, "kernels")) {
        ks.clear();
        std::stringstream ss(*v);
        for (std::string item; std::getline(ss, item, ',');) ks.push_back(parse_kernel(item));
    }
    const int q = S.flags.folds ? *S.flags.folds : static_cast<int>(S.cfg.get_int("folds", 5));
    if (q < 2) throw UsageError("--folds must be >= 2");
    need(ds, "generate");
    auto data = read_dataset_csv(ds.string());
    auto res = hyperparameter_sweep(data, cs, ks, q, static_cast<std::uint64_t>(S.seed()), smo_options(S));
    write_file(S.out() / "sweep.csv", res.to_csv());
    std::cout << std::left << std::setw(12) << "kernel";
    for (double c : cs) std::cout << std::right << std::setw(10) << c;
    std::cout << "\n" << std::fixed << std::setprecision(1);
    for (const auto& k : ks) {
        std::cout << std::left << std::setw(12) << k.name();
        for (double c : cs) std::cout << std::right << std::setw(10) << res.at(k, c);
        std::cout << "\n";
    }
    return 0;
}

int cmd_classify(const Settings& S) {
    const fs::path mp = S.artifact(S.flags.model, "model", "model.json");
    const fs::path dst = S.artifact(S.flags.classes, "classes", "classes.csv");
    auto features = S.opt(S.flags.features, "features");
    auto network = S.opt(S.flags.network, "network");
    auto forecast = S.opt(S.flags.forecast, "forecast");
    if (!features && !(network && forecast)) throw UsageError("classify needs --features, or --network with --forecast");
    need(mp, "train");
    auto model = load_model(mp.string());
    std::vector<ComponentClass> rows;
    if (features) {
        rows = read_component_classes_csv(*features);
        for (auto& r : rows) r.label = classify_features(model, r.distance, r.wind);
    } else {
        auto net = load_network(*network);
        auto fc = load_forecast(*forecast);
        std::vector<ComponentSite> sites;
        for (const auto& id : component_ids(net)) {
            auto [x, y] = component_location(net, id);
            sites.push_back({id, {x, y}});
        }
        Maxima mx{S.cfg.get_double("max-wind", 200.0), S.cfg.get_double("max-distance", 500.0)};
        rows = classify_components(sites, fc, model, mx);
    }
    write_file(dst, component_classes_csv(rows));
    std::array<int, 3> n{};
    for (const auto& r : rows) ++n[static_cast<int>(r.label)];
    std::cout << "classified " << rows.size() << " components (Operational " << n[0] << ", Uncertain " << n[1] << ", Outage "
              << n[2] << ") -> " << dst.string() << "\n";
    return 0;
}

std::string policy_tag(const Policy& p) {
    std::string s = p.name();
    std::replace(s.begin(), s.end(), ':', '-');
    return s;
}

int cmd_schedule(const Settings& S) {
    auto network = S.opt(S.flags.network, "network");
    if (!network) throw UsageError("schedule needs --network");
    Policy pol;
    try {
        pol = parse_policy(S.str(S.flags.policy, "policy", "outage-only"));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    MipOptions mo;
    mo.gap_target = S.flags.gap ? *S.flags.gap : S.cfg.get_double("gap", 1e-4);
    mo.node_limit = S.cfg.get_int("node-limit", mo.node_limit);
    mo.time_limit = S.cfg.get_double("time-limit", mo.time_limit);
    if (!(mo.gap_target >= 0)) throw UsageError("--gap must be >= 0");
    ScenarioOptions so;
    so.probability_weights = S.cfg.get_bool("probability-weights", false);
    so.window_start = static_cast<int>(S.cfg.get_int("window-start", 0));
    so.window_end = static_cast<int>(S.cfg.get_int("window-end", -1));
    const fs::path cls = S.artifact(S.flags.classes, "classes", "classes.csv");
    auto mps = S.opt(S.flags.export_mps, "export-mps");

    need(cls, "classify");
    auto net = load_network(*network);
    std::map<std::string, ClassLabel> classes;
    for (const auto& r : read_component_classes_csv(cls.string())) classes[r.component_id] = r.label;
    auto set = build_scenarios(classes, pol, net, so);
    for (const auto& w : set.warnings) std::cerr << "warning: " << w << "\n";
    const std::string tag = policy_tag(pol);
    write_file(S.out() / ("scenarios_" + tag + ".txt"), scenarios_to_text(set));

    if (S.flags.verbose) mo.log = &std::cerr;
    auto problem = build_milp(net, set);
    if (mps) {
        auto t = export_mps(problem, *mps);
        std::cout << "MPS written to " << *mps << " (" << t.rows.size() + t.columns.size() << " mangled names)\n";
    }
    auto mip = solve_milp(problem, mo);
    if (!mip.has_incumbent()) {
        std::cerr << "error: no feasible schedule (" << to_string(mip.status) << ")\n";
        return kFailed;
    }
    auto sol = extract_solution(net, set, problem, mip.values, mip.objective);
    auto rep = check_solution(net, set, sol);
    write_file(S.out() / ("schedule_" + tag + ".csv"), solution_to_csv(net, set, sol));
    write_file(S.out() / ("violations_" + tag + ".txt"), rep.to_text());
    write_file(S.out() / ("violations_" + tag + ".csv"), rep.to_csv());
    json summary = {{"policy", pol.name()},
                    {"network", net.name},
                    {"scenarios", set.size()},
                    {"status", to_string(mip.status)},
                    {"objective", mip.objective},
                    {"best_bound", mip.best_bound},
                    {"gap", mip.gap},
                    {"nodes", mip.nodes_explored},
                    {"operation_cost", sol.operation_cost},
                    {"unserved_cost", sol.unserved_cost},
                    {"total_cost", sol.total_cost()},
                    {"total_curtailment", sol.total_curtailment()},
                    {"mean_curtailment", sol.mean_contingency_curtailment()},
                    {"clean", rep.clean()},
                    {"max_violation", rep.max_violation()}};
    write_file(S.out() / ("summary_" + tag + ".json"), summary.dump(1) + "\n");
    std::cout << std::fixed << std::setprecision(2) << pol.name() << ": " << to_string(mip.status) << ", " << set.contingencies()
              << " contingency scenarios, cost " << sol.total_cost() << " (operation " << sol.operation_cost << ", unserved "
              << sol.unserved_cost << "), curtailment " << sol.total_curtailment() << " MWh, mean "
              << sol.mean_contingency_curtailment() << " MWh per contingency\n"
              << rep.to_text();
    return rep.clean() ? 0 : kViolated;
}

int cmd_report(const Settings& S) {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"Case 1", "outage-only"}, {"Case 2", "all-uncertain"}, {"Case 3", "one-per-scenario"}};
    std::vector<json> rows;
    for (const auto& [label, tag] : cases) {
        fs::path p = S.out() / ("summary_" + tag + ".json");
        need(p, "schedule --policy " + tag);
        rows.push_back(json::parse(read_file(p)));
    }
    std::ostringstream csv;
    csv << "case,policy,scenarios,operation_cost,unserved_cost,total_cost,total_curtailment,mean_curtailment\n"
        << std::setprecision(12);
    std::cout << std::left << std::setw(8) << "case" << std::setw(18) << "policy" << std::right << std::setw(10) << "scen"
              << std::setw(16) << "total cost" << std::setw(16) << "operation" << std::setw(14) << "curtail MWh" << std::setw(14)
              << "mean MWh" << "\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const json& r = rows[i];
        csv << cases[i].first << "," << cases[i].second << "," << r["scenarios"].get<int>() - 1 << "," << r["operation_cost"].get<double>()
            << "," << r["unserved_cost"].get<double>() << "," << r["total_cost"].get<double>() << ","
            << r["total_curtailment"].get<double>() << "," << r["mean_curtailment"].get<double>() << "\n";
        std::cout << std::left << std::setw(8) << cases[i].first << std::setw(18) << cases[i].second << std::right << std::setw(10)
                  << r["scenarios"].get<int>() - 1 << std::fixed << std::setprecision(2) << std::setw(16)
                  << r["total_cost"].get<double>() << std::setw(16) << r["operation_cost"].get<double>() << std::setw(14)
                  << r["total_curtailment"].get<double>() << std::setw(14) << r["mean_curtailment"].get<double>() << "\n";
    }
    write_file(S.out() / "report.csv", csv.str());
    const bool cost_ok = rows[0]["total_cost"].get<double>() <= rows[2]["total_cost"].get<double>() + 1e-9;
    const bool curt_ok = rows[2]["mean_curtailment"].get<double>() <= rows[1]["mean_curtailment"].get<double>() + 1e-9;
    std::cout << "cost(Case 1) <= cost(Case 3): " << (cost_ok ? "yes" : "NO") << "\n"
              << "curtailment(Case 3) <= curtailment(Case 2): " << (curt_ok ? "yes" : "NO") << "\n";
    return cost_ok && curt_ok ? 0 : kViolated;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stormuc: hurricane component classification and event-driven unit commitment"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "key-value config file (flags override it)");
    app.add_option("--seed", o.seed, "RNG seed");
    app.add_option("--out", o.out, "output directory (default: out)");
    app.add_flag("-v,--verbose", o.verbose, "solver log on stderr");

    auto* gen = app.add_subcommand("generate", "write a synthetic labelled dataset");
    gen->add_option("--dataset", o.dataset, "output CSV (default: <out>/dataset.csv)");
    gen->add_option("--counts", o.counts, "operational,uncertain,outage sample counts");

    auto* train = app.add_subcommand("train", "train the one-vs-one SVM and report CV accuracy");
    train->add_option("--dataset", o.dataset);
    train->add_option("--model", o.model, "model file (default: <out>/model.json)");
    train->add_option("--kernel", o.kernel, "linear | polyN | gaussian[:g]");
    train->add_option("--c", o.c, "soft-margin penalty");
    train->add_option("--folds", o.folds);

    auto* sweep = app.add_subcommand("sweep", "kernel x c accuracy grid");
    sweep->add_option("--dataset", o.dataset);
    sweep->add_option("--kernels", o.kernels, "comma list (default linear,poly2,poly3,gaussian)");
    sweep->add_option("--c-list", o.c_list, "comma list (default 0.1,1,10,100)");
    sweep->add_option("--folds", o.folds);

    auto* classify = app.add_subcommand("classify", "assign a class to every component");
    classify->add_option("--model", o.model);
    classify->add_option("--network", o.network);
    classify->add_option("--forecast", o.forecast);
    classify->add_option("--features", o.features, "component,distance,wind CSV (normalized) instead of geometry");
    classify->add_option("--classes", o.classes, "output CSV (default: <out>/classes.csv)");

    auto* schedule = app.add_subcommand("schedule", "build and solve the E-SCUC for one policy");
    schedule->add_option("--network", o.network);
    schedule->add_option("--classes", o.classes, "classes CSV (default: <out>/classes.csv)");
    schedule->add_option("--policy", o.policy, "outage-only | all-uncertain | one-per-scenario | subsets:k");
    schedule->add_option("--gap", o.gap, "relative MIP gap target");
    schedule->add_option("--export-mps", o.export_mps, "also write the MILP as fixed-format MPS");

    auto* report = app.add_subcommand("report", "compare Case 1/2/3 schedules found in <out>");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        Settings S{o, Config{}};
        if (!o.config.empty()) {
            S.cfg = Config::load(o.config);
            S.cfg.require_known(kConfigKeys);
        }
        if (*gen) return cmd_generate(S);
        if (*train) return cmd_train(S);
        if (*sweep) return cmd_sweep(S);
        if (*classify) return cmd_classify(S);
        if (*schedule) return cmd_schedule(S);
        if (*report) return cmd_report(S);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}
