#include "stormuc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace stormuc {

using nlohmann::json;

double GenUnit::energy_cost(double p) const {
    double cost = no_load_cost;
    double prev = 0.0;
    for (const auto& s : cost_curve) {
        double w = std::clamp(p - prev, 0.0, s.breakpoint_mw - prev);
        cost += s.marginal * w;
        prev = s.breakpoint_mw;
    }
    return cost;
}

namespace {

template <class T>
std::size_t find_index(const std::vector<T>& v, const std::string& id, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i].id == id) return i;
    throw NetworkError(std::string("unknown ") + what + " '" + id + "'");
}

}  // namespace

std::size_t GridNetwork::bus_index(const std::string& id) const { return find_index(buses, id, "bus"); }
std::size_t GridNetwork::unit_index(const std::string& id) const { return find_index(units, id, "unit"); }
std::size_t GridNetwork::line_index(const std::string& id) const { return find_index(lines, id, "line"); }

bool GridNetwork::has_unit(const std::string& id) const {
    return std::any_of(units.begin(), units.end(), [&](const GenUnit& u) { return u.id == id; });
}
bool GridNetwork::has_line(const std::string& id) const {
    return std::any_of(lines.begin(), lines.end(), [&](const Line& l) { return l.id == id; });
}

double GridNetwork::total_load(int t) const {
    double s = 0.0;
    for (const auto& row : loads) s += row.at(t);
    return s;
}

void GridNetwork::validate() const {
    if (horizon < 1) throw NetworkError("horizon must be >= 1");
    if (!(base_mva > 0.0)) throw NetworkError("base_mva must be > 0");
    if (buses.empty()) throw NetworkError("network has no buses");
    std::set<std::string> ids;
    for (const auto& b : buses) {
        if (!ids.insert(b.id).second) throw NetworkError("duplicate bus id '" + b.id + "'");
        if (!(b.voll >= 0.0)) throw NetworkError("bus '" + b.id + "': voll must be >= 0");
    }
    std::set<std::string> comp;
    for (const auto& u : units) {
        if (!comp.insert(u.id).second) throw NetworkError("duplicate component id '" + u.id + "'");
        if (!ids.count(u.bus)) throw NetworkError("unit '" + u.id + "': dangling bus reference '" + u.bus + "'");
        if (!(u.p_min >= 0.0 && u.p_min <= u.p_max)) throw NetworkError("unit '" + u.id + "': need 0 <= p_min <= p_max");
        if (u.ramp_up < 0 || u.ramp_down < 0) throw NetworkError("unit '" + u.id + "': ramps must be >= 0");
        if (u.min_up < 0 || u.min_down < 0) throw NetworkError("unit '" + u.id + "': min up/down must be >= 0");
        if (u.startup_cost < 0 || u.shutdown_cost < 0 || u.no_load_cost < 0) throw NetworkError("unit '" + u.id + "': costs must be >= 0");
        if (u.delta_adjust < 0) throw NetworkError("unit '" + u.id + "': delta_adjust must be >= 0");
        if (u.initial_on_hours < 0 || u.initial_off_hours < 0 || (u.initial_on_hours > 0) == (u.initial_off_hours > 0))
            throw NetworkError("unit '" + u.id + "': exactly one of initial_on_hours / initial_off_hours must be positive");
        if (u.initially_on() ? !(u.initial_power >= u.p_min - 1e-9 && u.initial_power <= u.p_max + 1e-9) : u.initial_power != 0.0)
            throw NetworkError("unit '" + u.id + "': initial_power inconsistent with initial state");
        if (u.cost_curve.empty()) throw NetworkError("unit '" + u.id + "': empty cost curve");
        double prev_bp = 0.0, prev_m = -1e300;
        for (const auto& s : u.cost_curve) {
            if (!(s.breakpoint_mw > prev_bp)) throw NetworkError("unit '" + u.id + "': cost breakpoints must increase");
            if (s.marginal < prev_m) throw NetworkError("unit '" + u.id + "': nonconvex cost curve (marginal cost decreases)");
            if (s.marginal < 0) throw NetworkError("unit '" + u.id + "': negative marginal cost");
            prev_bp = s.breakpoint_mw;
            prev_m = s.marginal;
        }
        if (prev_bp < u.p_max - 1e-9) throw NetworkError("unit '" + u.id + "': cost curve must reach p_max");
    }
    for (const auto& l : lines) {
        if (!comp.insert(l.id).second) throw NetworkError("duplicate component id '" + l.id + "'");
        if (!ids.count(l.from_bus)) throw NetworkError("line '" + l.id + "': dangling bus reference '" + l.from_bus + "'");
        if (!ids.count(l.to_bus)) throw NetworkError("line '" + l.id + "': dangling bus reference '" + l.to_bus + "'");
        if (l.from_bus == l.to_bus) throw NetworkError("line '" + l.id + "': from_bus equals to_bus");
        if (!(l.reactance > 0.0)) throw NetworkError("line '" + l.id + "': reactance must be > 0");
        if (!(l.flow_limit > 0.0)) throw NetworkError("line '" + l.id + "': flow_limit must be > 0");
    }
    if (loads.size() != buses.size()) throw NetworkError("loads: one row per bus required");
    for (std::size_t b = 0; b < loads.size(); ++b) {
        if (loads[b].size() != static_cast<std::size_t>(horizon)) throw NetworkError("loads: bus '" + buses[b].id + "' row length != horizon");
        for (double d : loads[b])
            if (!(d >= 0.0)) throw NetworkError("loads: bus '" + buses[b].id + "' has a negative load");
    }
    if (reserve.size() != static_cast<std::size_t>(horizon)) throw NetworkError("reserve: length != horizon");
    for (double r : reserve)
        if (!(r >= 0.0)) throw NetworkError("reserve must be >= 0");
}

namespace {

int line_of_offset(const std::string& text, std::size_t off) {
    off = std::min(off, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(off), '\n'));
}

}  // namespace

GridNetwork network_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw NetworkError("parse error at line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
    }
    GridNetwork n;
    try {
        n.name = j.value("name", "");
        n.base_mva = j.value("base_mva", 100.0);
        n.horizon = j.at("horizon").get<int>();
        for (const auto& b : j.at("buses")) {
            Bus bus;
            bus.id = b.at("id");
            bus.voll = b.value("voll", 0.0);
            if (b.contains("xy")) {
                bus.x_km = b["xy"].at(0);
                bus.y_km = b["xy"].at(1);
            }
            n.buses.push_back(bus);
        }
        for (const auto& u : j.at("units")) {
            GenUnit g;
            g.id = u.at("id");
            g.bus = u.at("bus");
            g.p_min = u.at("p_min");
            g.p_max = u.at("p_max");
            g.ramp_up = u.at("ramp_up");
            g.ramp_down = u.at("ramp_down");
            g.min_up = u.value("min_up", 1);
            g.min_down = u.value("min_down", 1);
            g.no_load_cost = u.value("no_load_cost", 0.0);
            for (const auto& s : u.at("cost_curve")) g.cost_curve.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
            g.startup_cost = u.value("startup_cost", 0.0);
            g.shutdown_cost = u.value("shutdown_cost", 0.0);
            g.delta_adjust = u.at("delta_adjust");
            g.initial_on_hours = u.value("initial_on_hours", 0);
            g.initial_off_hours = u.value("initial_off_hours", 0);
            g.initial_power = u.value("initial_power", 0.0);
            n.units.push_back(g);
        }
        for (const auto& l : j.at("lines")) {
            Line line;
            line.id = l.at("id");
            line.from_bus = l.at("from");
            line.to_bus = l.at("to");
            line.reactance = l.at("reactance");
            line.flow_limit = l.at("flow_limit");
            n.lines.push_back(line);
        }
        const auto& loads = j.at("loads");
        n.loads.assign(n.buses.size(), std::vector<double>(n.horizon, 0.0));
        for (auto it = loads.begin(); it != loads.end(); ++it) {
            std::size_t b = n.bus_index(it.key());
            n.loads[b] = it.value().get<std::vector<double>>();
        }
        n.reserve = j.at("reserve").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw NetworkError(std::string("schema error: ") + e.what());
    }
    n.validate();
    return n;
}

std::string network_to_json(const GridNetwork& n) {
    json j;
    j["name"] = n.name;
    j["base_mva"] = n.base_mva;
    j["horizon"] = n.horizon;
    j["buses"] = json::array();
    for (const auto& b : n.buses) j["buses"].push_back({{"id", b.id}, {"voll", b.voll}, {"xy", {b.x_km, b.y_km}}});
    j["units"] = json::array();
    for (const auto& u : n.units) {
        json cc = json::array();
        for (const auto& s : u.cost_curve) cc.push_back({s.breakpoint_mw, s.marginal});
        j["units"].push_back({{"id", u.id}, {"bus", u.bus}, {"p_min", u.p_min}, {"p_max", u.p_max},
                              {"ramp_up", u.ramp_up}, {"ramp_down", u.ramp_down}, {"min_up", u.min_up},
                              {"min_down", u.min_down}, {"no_load_cost", u.no_load_cost}, {"cost_curve", cc},
                              {"startup_cost", u.startup_cost}, {"shutdown_cost", u.shutdown_cost},
                              {"delta_adjust", u.delta_adjust}, {"initial_on_hours", u.initial_on_hours},
                              {"initial_off_hours", u.initial_off_hours}, {"initial_power", u.initial_power}});
    }
    j["lines"] = json::array();
    for (const auto& l : n.lines)
        j["lines"].push_back({{"id", l.id}, {"from", l.from_bus}, {"to", l.to_bus}, {"reactance", l.reactance}, {"flow_limit", l.flow_limit}});
    j["loads"] = json::object();
    for (std::size_t b = 0; b < n.buses.size(); ++b) j["loads"][n.buses[b].id] = n.loads[b];
    j["reserve"] = n.reserve;
    return j.dump(1);
}

GridNetwork load_network(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw NetworkError("cannot read network file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return network_from_json(ss.str());
    } catch (const NetworkError& e) {
        throw NetworkError(path + ": " + e.what());
    }
}

void save_network(const GridNetwork& net, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw NetworkError("cannot write " + path);
    f << network_to_json(net) << "\n";
}

std::vector<std::pair<std::size_t, int>> incidence_row(const GridNetwork& net, const std::string& line_id) {
    const Line& l = net.lines.at(net.line_index(line_id));
    std::vector<std::pair<std::size_t, int>> row{{net.bus_index(l.from_bus), 1}, {net.bus_index(l.to_bus), -1}};
    std::sort(row.begin(), row.end());
    return row;
}

std::vector<int> incidence_dense(const GridNetwork& net, const std::string& line_id) {
    std::vector<int> v(net.buses.size(), 0);
    for (auto [b, a] : incidence_row(net, line_id)) v[b] = a;
    return v;
}

std::pair<double, double> component_location(const GridNetwork& net, const std::string& id) {
    if (net.has_unit(id)) {
        const Bus& b = net.buses[net.bus_index(net.units[net.unit_index(id)].bus)];
        return {b.x_km, b.y_km};
    }
    const Line& l = net.lines.at(net.line_index(id));
    const Bus& a = net.buses[net.bus_index(l.from_bus)];
    const Bus& b = net.buses[net.bus_index(l.to_bus)];
    return {0.5 * (a.x_km + b.x_km), 0.5 * (a.y_km + b.y_km)};
}

std::vector<std::string> component_ids(const GridNetwork& net) {
    std::vector<std::string> ids;
    for (const auto& u : net.units) ids.push_back(u.id);
    for (const auto& l : net.lines) ids.push_back(l.id);
    return ids;
}

}  // namespace stormuc
