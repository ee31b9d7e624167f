#include "stormuc/escuc.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace stormuc {

namespace {

std::string fmt(double v, int prec = 10) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

template <class T>
using Tensor3 = std::vector<std::vector<std::vector<T>>>;

template <class T>
Tensor3<T> tensor(std::size_t a, std::size_t b, std::size_t c) {
    return Tensor3<T>(a, std::vector<std::vector<T>>(b, std::vector<T>(c, T{})));
}

// periods at the start of the horizon the unit is forced to keep its initial state
int forced_initial(const GenUnit& u, int T) {
    int f = u.initially_on() ? u.min_up - u.initial_on_hours : u.min_down - u.initial_off_hours;
    return std::clamp(f, 0, T);
}

}  // namespace

// ---- policies and scenarios ----

std::string Policy::name() const {
    switch (kind) {
        case PolicyKind::OutageOnly: return "outage-only";
        case PolicyKind::AllUncertainOut: return "all-uncertain";
        case PolicyKind::OnePerScenario: return "one-per-scenario";
        case PolicyKind::UncertainSubsets: return "subsets:" + std::to_string(k);
    }
    return "?";
}

Policy parse_policy(const std::string& s) {
    if (s == "outage-only") return Policy::outage_only();
    if (s == "all-uncertain") return Policy::all_uncertain();
    if (s == "one-per-scenario") return Policy::one_per_scenario();
    if (s.rfind("subsets:", 0) == 0) {
        const std::string n = s.substr(8);
        if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("policy subsets:k needs a positive integer k, got '" + s + "'");
        int k = std::stoi(n);
        if (k < 1) throw std::invalid_argument("policy subsets:k needs k >= 1");
        return Policy::subsets(k);
    }
    throw std::invalid_argument("unknown policy '" + s + "' (outage-only|all-uncertain|one-per-scenario|subsets:k)");
}

void ScenarioSet::validate(const GridNetwork& net) const {
    if (horizon != net.horizon) throw std::invalid_argument("scenario horizon " + std::to_string(horizon) + " != network horizon");
    std::vector<std::string> uid, lid;
    for (const auto& u : net.units) uid.push_back(u.id);
    for (const auto& l : net.lines) lid.push_back(l.id);
    if (uid != unit_ids || lid != line_ids) throw std::invalid_argument("scenario set does not match the network's components");
    if (scenarios.empty()) throw std::invalid_argument("scenario set lacks the base scenario");
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const Scenario& sc = scenarios[s];
        if (sc.ux.size() != uid.size() || sc.uy.size() != lid.size())
            throw std::invalid_argument("scenario " + std::to_string(s) + ": state matrix shape mismatch");
        for (const auto* m : {&sc.ux, &sc.uy})
            for (const auto& row : *m) {
                if (row.size() != static_cast<std::size_t>(horizon))
                    throw std::invalid_argument("scenario " + std::to_string(s) + ": state row length != horizon");
                for (int v : row) {
                    if (v != 0 && v != 1) throw std::invalid_argument("scenario " + std::to_string(s) + ": states must be 0/1");
                    if (s == 0 && v != 1) throw std::invalid_argument("base scenario must have every component in service");
                }
            }
        if (!(sc.weight >= 0.0) || !std::isfinite(sc.weight)) throw std::invalid_argument("scenario weights must be finite and >= 0");
    }
    if (scenarios.size() > 1) {
        double w = 0.0;
        for (std::size_t s = 1; s < scenarios.size(); ++s) w += scenarios[s].weight;
        if (!(w > 0.0)) throw std::invalid_argument("contingency weights must have a positive sum");
    }
}

ScenarioSet base_only(const GridNetwork& net) {
    ScenarioSet set;
    set.horizon = net.horizon;
    for (const auto& u : net.units) set.unit_ids.push_back(u.id);
    for (const auto& l : net.lines) set.line_ids.push_back(l.id);
    Scenario base;
    base.id = 0;
    base.ux.assign(net.units.size(), std::vector<int>(net.horizon, 1));
    base.uy.assign(net.lines.size(), std::vector<int>(net.horizon, 1));
    set.scenarios.push_back(base);
    return set;
}

namespace {

// A unit whose bus ends up in an island with no load cannot deliver p_min
// anywhere, so it is taken out with the lines that stranded it.
void drop_stranded_units(const GridNetwork& net, ScenarioSet& set) {
    const std::size_t NB = net.buses.size();
    for (std::size_t s = 1; s < set.size(); ++s) {
        Scenario& sc = set.scenarios[s];
        for (int t = 0; t < net.horizon; ++t) {
            std::vector<std::size_t> root(NB);
            for (std::size_t b = 0; b < NB; ++b) root[b] = b;
            auto find = [&](std::size_t b) {
                while (root[b] != b) b = root[b] = root[root[b]];
                return b;
            };
            for (std::size_t l = 0; l < net.lines.size(); ++l)
                if (sc.uy[l][t]) root[find(net.bus_index(net.lines[l].from_bus))] = find(net.bus_index(net.lines[l].to_bus));
            std::vector<double> load(NB, 0.0);
            for (std::size_t b = 0; b < NB; ++b) load[find(b)] += net.loads[b][t];
            for (std::size_t i = 0; i < net.units.size(); ++i) {
                if (!sc.ux[i][t] || load[find(net.bus_index(net.units[i].bus))] > 0.0) continue;
                sc.ux[i][t] = 0;
                set.warnings.push_back("scenario " + std::to_string(s) + ", period " + std::to_string(t) + ": unit " +
                                       net.units[i].id + " is islanded without load and is taken out");
            }
        }
    }
}

}  // namespace

ScenarioSet build_scenarios(const std::map<std::string, ClassLabel>& classes, const Policy& policy, const GridNetwork& net,
                            const ScenarioOptions& opt) {
    if (classes.empty()) throw std::invalid_argument("build_scenarios: empty class map");
    const auto ids = component_ids(net);
    const std::set<std::string> known(ids.begin(), ids.end());
    for (const auto& [id, c] : classes)
        if (!known.count(id)) throw std::invalid_argument("scenario references unknown component '" + id + "'");
    const int T = net.horizon;
    const int ws = opt.window_start, we = opt.window_end < 0 ? T : opt.window_end;
    if (ws < 0 || we > T || ws >= we) throw std::invalid_argument("impact window must satisfy 0 <= start < end <= horizon");

    std::vector<std::string> outage, uncertain;  // network order
    for (const auto& id : ids) {
        auto it = classes.find(id);
        if (it == classes.end()) continue;
        if (it->second == ClassLabel::Outage) outage.push_back(id);
        if (it->second == ClassLabel::Uncertain) uncertain.push_back(id);
    }

    ScenarioSet set = base_only(net);
    auto add = [&](std::vector<std::string> out) {
        Scenario sc = set.scenarios[0];
        sc.id = static_cast<int>(set.scenarios.size());
        for (const auto& c : out) {
            auto& row = net.has_unit(c) ? sc.ux[net.unit_index(c)] : sc.uy[net.line_index(c)];
            for (int t = ws; t < we; ++t) row[t] = 0;
        }
        sc.out = std::move(out);
        set.scenarios.push_back(std::move(sc));
    };
    auto outage_only = [&] {
        if (outage.empty()) set.warnings.push_back("outage class is empty; only the base scenario is built");
        else add(outage);
    };

    switch (policy.kind) {
        case PolicyKind::OutageOnly: outage_only(); break;
        case PolicyKind::AllUncertainOut: {
            std::vector<std::string> all = outage;
            all.insert(all.end(), uncertain.begin(), uncertain.end());
            if (all.empty()) set.warnings.push_back("no outage or uncertain components; only the base scenario is built");
            else add(all);
            break;
        }
        case PolicyKind::OnePerScenario:
        case PolicyKind::UncertainSubsets: {
            const int k = policy.kind == PolicyKind::OnePerScenario ? 1 : policy.k;
            if (uncertain.empty()) {
                set.warnings.push_back("uncertain class is empty; falling back to the outage-only scenario");
                outage_only();
                break;
            }
            if (k < 1 || k > static_cast<int>(uncertain.size()))
                throw std::invalid_argument("subsets:k needs 1 <= k <= " + std::to_string(uncertain.size()));
            std::vector<int> pick(k);
            for (int i = 0; i < k; ++i) pick[i] = i;
            const int u = static_cast<int>(uncertain.size());
            while (true) {
                std::vector<std::string> out = outage;
                for (int i : pick) out.push_back(uncertain[i]);
                add(out);
                int i = k - 1;
                while (i >= 0 && pick[i] == u - k + i) --i;
                if (i < 0) break;
                ++pick[i];
                for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
            }
            break;
        }
    }
    drop_stranded_units(net, set);
    const std::size_t K = set.contingencies();
    if (opt.probability_weights && K > 0)
        for (std::size_t s = 1; s <= K; ++s) set.scenarios[s].weight = 1.0 / static_cast<double>(K);
    return set;
}

std::string scenarios_to_text(const ScenarioSet& set) {
    std::ostringstream os;
    os << "scenarios " << set.scenarios.size() << " horizon " << set.horizon << "\n";
    for (const auto& sc : set.scenarios) {
        os << "scenario " << sc.id << " weight " << std::setprecision(17) << sc.weight << "\n";
        auto emit = [&](const std::vector<std::string>& ids, const std::vector<std::vector<int>>& m) {
            for (std::size_t i = 0; i < ids.size(); ++i) {
                if (std::all_of(m[i].begin(), m[i].end(), [](int v) { return v == 1; })) continue;
                os << "  " << ids[i] << " ";
                for (int v : m[i]) os << v;
                os << "\n";
            }
        };
        emit(set.unit_ids, sc.ux);
        emit(set.line_ids, sc.uy);
    }
    return os.str();
}

ScenarioSet scenarios_from_text(const std::string& text, const GridNetwork& net) {
    ScenarioSet set = base_only(net);
    set.scenarios.clear();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::size_t declared = 0;
    auto fail = [&](const std::string& m) { throw std::invalid_argument("scenario text line " + std::to_string(lineno) + ": " + m); };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string w;
        if (!(ls >> w)) continue;
        if (w == "scenarios") {
            std::string h;
            int T = 0;
            if (!(ls >> declared >> h >> T) || h != "horizon") fail("bad header");
            if (T != net.horizon) fail("horizon does not match the network");
        } else if (w == "scenario") {
            Scenario sc = base_only(net).scenarios[0];
            std::string kw;
            if (!(ls >> sc.id >> kw >> sc.weight) || kw != "weight") fail("bad scenario line");
            set.scenarios.push_back(sc);
        } else {
            if (set.scenarios.empty()) fail("component line before any scenario");
            // ids may contain blanks; the state string is the last token
            const auto last = line.find_last_not_of(" \t\r");
            const auto cut = line.find_last_of(" \t", last);
            const std::string states = line.substr(cut + 1, last - cut);
            const auto first = line.find_first_not_of(" \t");
            const auto idend = line.find_last_not_of(" \t", cut);
            w = cut == std::string::npos || idend < first ? "" : line.substr(first, idend - first + 1);
            if (w.empty() || states.size() != static_cast<std::size_t>(net.horizon)) fail("bad state string for '" + w + "'");
            Scenario& sc = set.scenarios.back();
            std::vector<int>* row = nullptr;
            if (net.has_unit(w)) row = &sc.ux[net.unit_index(w)];
            else if (net.has_line(w)) row = &sc.uy[net.line_index(w)];
            else fail("scenario references unknown component '" + w + "'");
            for (int t = 0; t < net.horizon; ++t) {
                if (states[t] != '0' && states[t] != '1') fail("states must be 0/1");
                (*row)[t] = states[t] - '0';
            }
            sc.out.push_back(w);
        }
    }
    if (declared != set.scenarios.size()) throw std::invalid_argument("scenario text: header count does not match");
    set.validate(net);
    return set;
}

// ---- MILP ----

std::string col_name(const char* sym, const std::string& id, int t) { return std::string(sym) + "[" + id + "," + std::to_string(t) + "]"; }
std::string col_name(const char* sym, const std::string& id, int t, int s) {
    return std::string(sym) + "[" + id + "," + std::to_string(t) + "," + std::to_string(s) + "]";
}

double line_big_m(const GridNetwork& net, const Line& line, const BuildOptions& opt) {
    auto it = opt.big_m.find(line.id);
    if (it != opt.big_m.end()) return it->second;
    return net.base_mva * opt.angle_span / line.reactance + line.flow_limit;
}

MilpProblem build_milp(const GridNetwork& net, const ScenarioSet& sc, const BuildOptions& opt) {
    net.validate();
    sc.validate(net);
    const int T = net.horizon, S = static_cast<int>(sc.size());
    const std::size_t NU = net.units.size(), NL = net.lines.size(), NB = net.buses.size();
    for (const auto& u : net.units)
        if (u.p_min > u.p_max) throw std::invalid_argument("unit '" + u.id + "': p_min > p_max");

    MilpProblem P;
    P.name = "ESCUC";
    using Row = std::vector<std::pair<int, double>>;
    std::vector<std::vector<int>> I(NU, std::vector<int>(T)), V = I, W = I;
    auto Pc = tensor<int>(NU, T, S), PL = tensor<int>(NL, T, S), TH = tensor<int>(NB, T, S), LC = tensor<int>(NB, T, S);

    for (std::size_t i = 0; i < NU; ++i) {
        const GenUnit& u = net.units[i];
        const int forced = forced_initial(u, T);
        for (int t = 0; t < T; ++t) {
            double lo = 0, hi = 1;
            if (t < forced) lo = hi = u.initially_on() ? 1 : 0;
            I[i][t] = P.add_var(col_name("I", u.id, t), VarKind::Binary, lo, hi, u.no_load_cost);
        }
        for (int t = 0; t < T; ++t) V[i][t] = P.add_var(col_name("v", u.id, t), VarKind::Binary, 0, 1, u.startup_cost);
        for (int t = 0; t < T; ++t) W[i][t] = P.add_var(col_name("w", u.id, t), VarKind::Binary, 0, 1, u.shutdown_cost);
    }
    std::vector<std::vector<std::vector<int>>> F(NU, std::vector<std::vector<int>>(T));
    for (std::size_t i = 0; i < NU; ++i) {
        const GenUnit& u = net.units[i];
        for (int t = 0; t < T; ++t) {
            for (int s = 0; s < S; ++s) Pc[i][t][s] = P.add_var(col_name("P", u.id, t, s), VarKind::Continuous, 0, u.p_max);
            double prev = 0.0;
            for (std::size_t k = 0; k < u.cost_curve.size(); ++k) {
                const auto& seg = u.cost_curve[k];
                F[i][t].push_back(P.add_var(col_name("F", u.id, t, static_cast<int>(k)), VarKind::Continuous, 0,
                                            seg.breakpoint_mw - prev, seg.marginal));
                prev = seg.breakpoint_mw;
            }
        }
    }
    for (std::size_t l = 0; l < NL; ++l)
        for (int t = 0; t < T; ++t)
            for (int s = 0; s < S; ++s) {
                const double cap = sc.scenarios[s].uy[l][t] ? net.lines[l].flow_limit : 0.0;
                PL[l][t][s] = P.add_var(col_name("PL", net.lines[l].id, t, s), VarKind::Continuous, -cap, cap);
            }
    for (std::size_t b = 0; b < NB; ++b)
        for (int t = 0; t < T; ++t)
            for (int s = 0; s < S; ++s) {
                const double h = b == 0 ? 0.0 : opt.angle_span / 2;
                TH[b][t][s] = P.add_var(col_name("TH", net.buses[b].id, t, s), VarKind::Continuous, -h, h);
            }
    for (std::size_t b = 0; b < NB; ++b)
        for (int t = 0; t < T; ++t) {
            LC[b][t][0] = -1;  // no curtailment in the base case
            for (int s = 1; s < S; ++s)
                LC[b][t][s] = P.add_var(col_name("LC", net.buses[b].id, t, s), VarKind::Continuous, 0, net.loads[b][t],
                                        sc.scenarios[s].weight * net.buses[b].voll);
        }

    auto idx = [](const std::string& id, int t, int s = -1) {
        return "[" + id + "," + std::to_string(t) + (s >= 0 ? "," + std::to_string(s) : std::string()) + "]";
    };

    // commitment logic
    for (std::size_t i = 0; i < NU; ++i) {
        const GenUnit& u = net.units[i];
        for (int t = 0; t < T; ++t) {
            Row r{{V[i][t], 1.0}, {W[i][t], -1.0}, {I[i][t], -1.0}};
            double rhs = 0.0;
            if (t > 0) r.push_back({I[i][t - 1], 1.0});
            else rhs = u.initially_on() ? -1.0 : 0.0;
            P.add_row("trans" + idx(u.id, t), r, Sense::EQ, rhs);
            P.add_row("vw" + idx(u.id, t), {{V[i][t], 1.0}, {W[i][t], 1.0}}, Sense::LE, 1.0);
        }
        if (u.min_up > 1)
            for (int t = 0; t < T; ++t) {
                Row r{{I[i][t], -1.0}};
                for (int tau = std::max(0, t - u.min_up + 1); tau <= t; ++tau) r.push_back({V[i][tau], 1.0});
                P.add_row("mu" + idx(u.id, t), r, Sense::LE, 0.0);
            }
        if (u.min_down > 1)
            for (int t = 0; t < T; ++t) {
                Row r{{I[i][t], 1.0}};
                for (int tau = std::max(0, t - u.min_down + 1); tau <= t; ++tau) r.push_back({W[i][tau], 1.0});
                P.add_row("md" + idx(u.id, t), r, Sense::LE, 1.0);
            }
        for (int t = 0; t < T; ++t) {
            Row r{{Pc[i][t][0], 1.0}};
            for (int f : F[i][t]) r.push_back({f, -1.0});
            P.add_row("seg" + idx(u.id, t), r, Sense::EQ, 0.0);
        }
    }
    // reserve
    for (int t = 0; t < T; ++t) {
        Row r;
        for (std::size_t i = 0; i < NU; ++i) r.push_back({I[i][t], net.units[i].p_max});
        P.add_row("res[" + std::to_string(t) + "]", r, Sense::GE, net.total_load(t) + net.reserve[t]);
    }
    for (int s = 0; s < S; ++s) {
        const Scenario& scen = sc.scenarios[s];
        for (std::size_t i = 0; i < NU; ++i) {
            const GenUnit& u = net.units[i];
            for (int t = 0; t < T; ++t) {
                const double ux = scen.ux[i][t];
                P.add_row("caphi" + idx(u.id, t, s), {{Pc[i][t][s], 1.0}, {I[i][t], -u.p_max * ux}}, Sense::LE, 0.0);
                if (u.p_min * ux > 0)
                    P.add_row("caplo" + idx(u.id, t, s), {{Pc[i][t][s], 1.0}, {I[i][t], -u.p_min * ux}}, Sense::GE, 0.0);
                // ramp rows that cannot bind inside [0, p_max] are left out; a tripped
                // unit (out in this period or the one before) is exempt from ramps and the band
                const bool live = ux > 0 && (t == 0 || scen.ux[i][t - 1] > 0);
                if (live && t > 0) {
                    if (u.ramp_up < u.p_max)
                        P.add_row("ru" + idx(u.id, t, s), {{Pc[i][t][s], 1.0}, {Pc[i][t - 1][s], -1.0}}, Sense::LE, u.ramp_up);
                    if (u.ramp_down < u.p_max)
                        P.add_row("rd" + idx(u.id, t, s), {{Pc[i][t - 1][s], 1.0}, {Pc[i][t][s], -1.0}}, Sense::LE, u.ramp_down);
                } else if (live) {
                    if (u.ramp_up + u.initial_power < u.p_max)
                        P.add_row("ru" + idx(u.id, t, s), {{Pc[i][t][s], 1.0}}, Sense::LE, u.ramp_up + u.initial_power);
                    if (u.ramp_down < u.initial_power)
                        P.add_row("rd" + idx(u.id, t, s), {{Pc[i][t][s], -1.0}}, Sense::LE, u.ramp_down - u.initial_power);
                }
                if (s > 0 && ux > 0 && u.delta_adjust < u.p_max) {
                    P.add_row("dup" + idx(u.id, t, s), {{Pc[i][t][s], 1.0}, {Pc[i][t][0], -1.0}}, Sense::LE, u.delta_adjust);
                    P.add_row("ddn" + idx(u.id, t, s), {{Pc[i][t][0], 1.0}, {Pc[i][t][s], -1.0}}, Sense::LE, u.delta_adjust);
                }
            }
        }
        for (std::size_t b = 0; b < NB; ++b)
            for (int t = 0; t < T; ++t) {
                Row r;
                for (std::size_t i = 0; i < NU; ++i)
                    if (net.units[i].bus == net.buses[b].id) r.push_back({Pc[i][t][s], 1.0});
                for (std::size_t l = 0; l < NL; ++l) {
                    if (net.lines[l].from_bus == net.buses[b].id) r.push_back({PL[l][t][s], -1.0});
                    if (net.lines[l].to_bus == net.buses[b].id) r.push_back({PL[l][t][s], 1.0});
                }
                if (LC[b][t][s] >= 0) r.push_back({LC[b][t][s], 1.0});
                if (r.empty() && net.loads[b][t] == 0.0) continue;
                P.add_row("bal" + idx(net.buses[b].id, t, s), r, Sense::EQ, net.loads[b][t]);
            }
        for (std::size_t l = 0; l < NL; ++l) {
            const Line& ln = net.lines[l];
            const double B = net.base_mva / ln.reactance;
            const double M = line_big_m(net, ln, opt);
            const std::size_t f = net.bus_index(ln.from_bus), to = net.bus_index(ln.to_bus);
            for (int t = 0; t < T; ++t) {
                const int uy = scen.uy[l][t];
                if (!uy && !std::isfinite(M)) continue;
                const double slack = uy ? 0.0 : M;
                Row r{{PL[l][t][s], 1.0}, {TH[f][t][s], -B}, {TH[to][t][s], B}};
                P.add_row("dchi" + idx(ln.id, t, s), r, Sense::LE, slack);
                P.add_row("dclo" + idx(ln.id, t, s), r, Sense::GE, -slack);
            }
        }
    }
    P.validate();
    return P;
}

// ---- solutions ----

double ScheduleSolution::total_curtailment() const {
    double x = 0.0;
    for (double c : curtailment_by_scenario) x += c;
    return x;
}

double ScheduleSolution::mean_contingency_curtailment() const {
    if (curtailment_by_scenario.size() <= 1) return 0.0;
    return total_curtailment() / static_cast<double>(curtailment_by_scenario.size() - 1);
}

void recompute_costs(const GridNetwork& net, const ScenarioSet& sc, ScheduleSolution& sol) {
    const int T = net.horizon;
    double op = 0.0, un = 0.0;
    for (std::size_t i = 0; i < net.units.size(); ++i) {
        const GenUnit& u = net.units[i];
        int prev = u.initially_on() ? 1 : 0;
        for (int t = 0; t < T; ++t) {
            const int on = sol.commitment[i][t];
            if (on) op += u.energy_cost(sol.dispatch[i][t][0]);
            if (on && !prev) op += u.startup_cost;
            if (!on && prev) op += u.shutdown_cost;
            prev = on;
        }
    }
    sol.curtailment_by_scenario.assign(sc.size(), 0.0);
    for (std::size_t b = 0; b < net.buses.size(); ++b)
        for (int t = 0; t < T; ++t)
            for (std::size_t s = 0; s < sc.size(); ++s) {
                const double lc = sol.curtailment[b][t][s];
                sol.curtailment_by_scenario[s] += lc;
                if (s > 0) un += sc.scenarios[s].weight * net.buses[b].voll * lc;
            }
    sol.operation_cost = op;
    sol.unserved_cost = un;
}

ScheduleSolution extract_solution(const GridNetwork& net, const ScenarioSet& sc, const MilpProblem& problem,
                                  const std::vector<double>& x, double solver_objective) {
    if (x.size() != problem.vars.size())
        throw ExtractionError("solution has " + std::to_string(x.size()) + " values, problem has " +
                              std::to_string(problem.vars.size()) + " columns");
    const int T = net.horizon, S = static_cast<int>(sc.size());
    const std::size_t NU = net.units.size(), NL = net.lines.size(), NB = net.buses.size();
    auto get = [&](const std::string& name) {
        auto it = problem.index_map.find(name);
        if (it == problem.index_map.end()) throw ExtractionError("problem lacks column " + name);
        return x[it->second];
    };
    ScheduleSolution sol;
    sol.commitment.assign(NU, std::vector<int>(T));
    sol.startup = sol.shutdown = sol.t_on = sol.t_off = sol.commitment;
    sol.dispatch = tensor<double>(NU, T, S);
    sol.flows = tensor<double>(NL, T, S);
    sol.angles = tensor<double>(NB, T, S);
    sol.curtailment = tensor<double>(NB, T, S);
    for (std::size_t i = 0; i < NU; ++i) {
        const GenUnit& u = net.units[i];
        int prev = u.initially_on() ? 1 : 0;
        int on_h = u.initial_on_hours, off_h = u.initial_off_hours;
        for (int t = 0; t < T; ++t) {
            const int on = get(col_name("I", u.id, t)) > 0.5 ? 1 : 0;
            sol.commitment[i][t] = on;
            sol.startup[i][t] = on && !prev;
            sol.shutdown[i][t] = !on && prev;
            on_h = on ? on_h + 1 : 0;
            off_h = on ? 0 : off_h + 1;
            sol.t_on[i][t] = on_h;
            sol.t_off[i][t] = off_h;
            prev = on;
            for (int s = 0; s < S; ++s) sol.dispatch[i][t][s] = get(col_name("P", u.id, t, s));
        }
    }
    for (std::size_t l = 0; l < NL; ++l)
        for (int t = 0; t < T; ++t)
            for (int s = 0; s < S; ++s) sol.flows[l][t][s] = get(col_name("PL", net.lines[l].id, t, s));
    for (std::size_t b = 0; b < NB; ++b)
        for (int t = 0; t < T; ++t)
            for (int s = 0; s < S; ++s) {
                sol.angles[b][t][s] = get(col_name("TH", net.buses[b].id, t, s));
                if (s > 0) sol.curtailment[b][t][s] = get(col_name("LC", net.buses[b].id, t, s));
            }
    recompute_costs(net, sc, sol);
    const double total = sol.total_cost();
    const double rel = std::abs(total - solver_objective) / std::max(1.0, std::abs(solver_objective));
    if (rel > 1e-4)
        throw ExtractionError("recomputed cost " + fmt(total, 12) + " differs from solver objective " + fmt(solver_objective, 12) +
                              " (relative " + fmt(rel, 3) + ")");
    return sol;
}

// ---- independent checker ----

double ViolationReport::max_violation() const {
    double m = 0.0;
    for (const auto& [f, v] : max_by_family) m = std::max(m, v);
    return m;
}

std::vector<Violation> ViolationReport::in_family(const std::string& family) const {
    std::vector<Violation> out;
    for (const auto& v : violations)
        if (v.family == family) out.push_back(v);
    return out;
}

std::string ViolationReport::to_text() const {
    std::ostringstream os;
    os << std::left << std::setw(14) << "family" << std::right << std::setw(14) << "max" << std::setw(8) << "count" << "  worst\n";
    for (const auto& f : families) {
        const double m = max_by_family.count(f) ? max_by_family.at(f) : 0.0;
        const Violation* worst = nullptr;
        int count = 0;
        for (const auto& v : violations)
            if (v.family == f) {
                ++count;
                if (!worst || v.amount > worst->amount) worst = &v;
            }
        os << std::left << std::setw(14) << f << std::right << std::setw(14) << std::setprecision(6) << m << std::setw(8) << count;
        if (worst) os << "  " << worst->component << " t=" << worst->t << " s=" << worst->s;
        os << "\n";
    }
    os << (clean() ? "clean" : "VIOLATED") << " (tolerance " << tolerance << ")\n";
    return os.str();
}

std::string ViolationReport::to_csv() const {
    std::ostringstream os;
    os << "family,component,t,s,amount\n" << std::setprecision(12);
    for (const auto& v : violations) os << v.family << "," << v.component << "," << v.t << "," << v.s << "," << v.amount << "\n";
    return os.str();
}

ViolationReport check_solution(const GridNetwork& net, const ScenarioSet& sc, const ScheduleSolution& sol, double tol,
                               const BuildOptions& opt) {
    ViolationReport rep;
    rep.tolerance = tol;
    rep.families = {"shape", "balance", "capacity", "ramp_up", "ramp_down", "min_up", "min_down", "reserve",
                    "curtailment", "redispatch", "flow_limit", "dc_flow", "angle"};
    for (const auto& f : rep.families) rep.max_by_family[f] = 0.0;
    auto note = [&](const char* fam, const std::string& comp, int t, int s, double amount) {
        double& m = rep.max_by_family[fam];
        m = std::max(m, amount);
        if (amount > tol) rep.violations.push_back({fam, comp, t, s, amount});
    };

    const int T = net.horizon, S = static_cast<int>(sc.size());
    const std::size_t NU = net.units.size(), NL = net.lines.size(), NB = net.buses.size();
    auto shape3 = [&](const auto& x, std::size_t a) {
        if (x.size() != a) return false;
        for (const auto& r : x) {
            if (r.size() != static_cast<std::size_t>(T)) return false;
            for (const auto& c : r)
                if (c.size() != static_cast<std::size_t>(S)) return false;
        }
        return true;
    };
    bool ok = sol.commitment.size() == NU && shape3(sol.dispatch, NU) && shape3(sol.flows, NL) && shape3(sol.angles, NB) &&
              shape3(sol.curtailment, NB);
    for (const auto& r : sol.commitment) ok = ok && r.size() == static_cast<std::size_t>(T);
    if (!ok) {
        note("shape", "", -1, -1, 1.0);
        return rep;
    }

    for (int s = 0; s < S; ++s) {
        const Scenario& scen = sc.scenarios[s];
        for (std::size_t b = 0; b < NB; ++b)
            for (int t = 0; t < T; ++t) {
                double inj = sol.curtailment[b][t][s] - net.loads[b][t];
                for (std::size_t i = 0; i < NU; ++i)
                    if (net.units[i].bus == net.buses[b].id) inj += sol.dispatch[i][t][s];
                for (std::size_t l = 0; l < NL; ++l) {
                    if (net.lines[l].from_bus == net.buses[b].id) inj -= sol.flows[l][t][s];
                    if (net.lines[l].to_bus == net.buses[b].id) inj += sol.flows[l][t][s];
                }
                note("balance", net.buses[b].id, t, s, std::abs(inj));

                const double lc = sol.curtailment[b][t][s];
                double bad = std::max(-lc, lc - net.loads[b][t]);
                if (s == 0) bad = std::max(bad, std::abs(lc));
                note("curtailment", net.buses[b].id, t, s, std::max(0.0, bad));

                const double th = sol.angles[b][t][s];
                double ang = std::abs(th) - opt.angle_span / 2;
                if (b == 0) ang = std::abs(th);
                note("angle", net.buses[b].id, t, s, std::max(0.0, ang));
            }
        for (std::size_t i = 0; i < NU; ++i) {
            const GenUnit& u = net.units[i];
            for (int t = 0; t < T; ++t) {
                const double p = sol.dispatch[i][t][s];
                const double on = sol.commitment[i][t] * scen.ux[i][t];
                note("capacity", u.id, t, s, std::max({0.0, p - u.p_max * on, u.p_min * on - p}));
                const double prev = t == 0 ? u.initial_power : sol.dispatch[i][t - 1][s];
                const bool live = scen.ux[i][t] && (t == 0 || scen.ux[i][t - 1]);
                note("ramp_up", u.id, t, s, live ? std::max(0.0, p - prev - u.ramp_up) : 0.0);
                note("ramp_down", u.id, t, s, live ? std::max(0.0, prev - p - u.ramp_down) : 0.0);
                if (s > 0 && scen.ux[i][t])
                    note("redispatch", u.id, t, s, std::max(0.0, std::abs(p - sol.dispatch[i][t][0]) - u.delta_adjust));
            }
        }
        for (std::size_t l = 0; l < NL; ++l) {
            const Line& ln = net.lines[l];
            const double B = net.base_mva / ln.reactance;
            const std::size_t f = net.bus_index(ln.from_bus), to = net.bus_index(ln.to_bus);
            for (int t = 0; t < T; ++t) {
                const double pl = sol.flows[l][t][s];
                const int uy = scen.uy[l][t];
                note("flow_limit", ln.id, t, s, std::max(0.0, std::abs(pl) - uy * ln.flow_limit));
                const double mis = std::abs(pl - B * (sol.angles[f][t][s] - sol.angles[to][t][s]));
                if (uy) note("dc_flow", ln.id, t, s, mis);
                else note("dc_flow", ln.id, t, s, std::max(0.0, mis - line_big_m(net, ln, opt)));
            }
        }
    }

    // commitment-only families, evaluated from run lengths
    for (std::size_t i = 0; i < NU; ++i) {
        const GenUnit& u = net.units[i];
        const auto& c = sol.commitment[i];
        int prev = u.initially_on() ? 1 : 0;
        int run = u.initially_on() ? u.initial_on_hours : u.initial_off_hours;
        int start = -1;  // -1: the run began before the horizon
        auto close_run = [&](int end) {  // run of state prev over [start, end)
            const int need = prev ? u.min_up : u.min_down;
            if (run >= need) return;
            // a run cut by the horizon end is not short
            if (end == T) return;
            note(prev ? "min_up" : "min_down", u.id, std::max(start, 0), -1, static_cast<double>(need - run));
        };
        for (int t = 0; t < T; ++t) {
            const int on = c[t] ? 1 : 0;
            if (on == prev) {
                ++run;
                continue;
            }
            close_run(t);
            prev = on;
            run = 1;
            start = t;
        }
    }
    for (int t = 0; t < T; ++t) {
        double cap = 0.0;
        for (std::size_t i = 0; i < NU; ++i) cap += net.units[i].p_max * sol.commitment[i][t];
        note("reserve", "", t, -1, std::max(0.0, net.total_load(t) + net.reserve[t] - cap));
    }
    return rep;
}

ScheduleRun solve_schedule(const GridNetwork& net, const ScenarioSet& scenarios, const MipOptions& mip, const BuildOptions& opt) {
    ScheduleRun run;
    run.problem = build_milp(net, scenarios, opt);
    run.mip = solve_milp(run.problem, mip);
    if (!run.mip.has_incumbent())
        throw std::runtime_error(std::string("no feasible schedule (solver status ") + to_string(run.mip.status) + ")");
    run.solution = extract_solution(net, scenarios, run.problem, run.mip.values, run.mip.objective);
    run.report = check_solution(net, scenarios, run.solution, 1e-6, opt);
    return run;
}

std::string solution_to_csv(const GridNetwork& net, const ScenarioSet& sc, const ScheduleSolution& sol) {
    std::ostringstream os;
    os << "kind,component,t,s,value\n" << std::setprecision(12);
    const int T = net.horizon, S = static_cast<int>(sc.size());
    for (std::size_t i = 0; i < net.units.size(); ++i)
        for (int t = 0; t < T; ++t) os << "I," << net.units[i].id << "," << t << ",," << sol.commitment[i][t] << "\n";
    for (int s = 0; s < S; ++s) {
        for (std::size_t i = 0; i < net.units.size(); ++i)
            for (int t = 0; t < T; ++t) os << "P," << net.units[i].id << "," << t << "," << s << "," << sol.dispatch[i][t][s] << "\n";
        for (std::size_t l = 0; l < net.lines.size(); ++l)
            for (int t = 0; t < T; ++t) os << "PL," << net.lines[l].id << "," << t << "," << s << "," << sol.flows[l][t][s] << "\n";
        for (std::size_t b = 0; b < net.buses.size(); ++b)
            for (int t = 0; t < T; ++t) os << "TH," << net.buses[b].id << "," << t << "," << s << "," << sol.angles[b][t][s] << "\n";
        for (std::size_t b = 0; b < net.buses.size(); ++b)
            for (int t = 0; t < T; ++t) os << "LC," << net.buses[b].id << "," << t << "," << s << "," << sol.curtailment[b][t][s] << "\n";
    }
    return os.str();
}

}  // namespace stormuc
