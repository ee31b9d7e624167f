#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace stormuc {

struct Bus {
    std::string id;
    double voll = 0.0;  // $/MWh
    double x_km = 0.0, y_km = 0.0;
};

struct CostSegment {
    double breakpoint_mw = 0.0;  // upper end of the segment
    double marginal = 0.0;       // $/MWh
};

struct GenUnit {
    std::string id;
    std::string bus;
    double p_min = 0.0, p_max = 0.0;
    double ramp_up = 0.0, ramp_down = 0.0;
    int min_up = 1, min_down = 1;
    double no_load_cost = 0.0;  // $/h while committed
    std::vector<CostSegment> cost_curve;
    double startup_cost = 0.0, shutdown_cost = 0.0;
    double delta_adjust = 0.0;
    int initial_on_hours = 0, initial_off_hours = 0;
    double initial_power = 0.0;

    bool initially_on() const { return initial_on_hours > 0; }
    // Energy cost of output p while committed (no-load cost included).
    double energy_cost(double p) const;
};

struct Line {
    std::string id;
    std::string from_bus, to_bus;
    double reactance = 0.0;   // p.u.
    double flow_limit = 0.0;  // MW
};

struct GridNetwork {
    std::string name;
    double base_mva = 100.0;
    int horizon = 1;
    std::vector<Bus> buses;
    std::vector<GenUnit> units;
    std::vector<Line> lines;
    std::vector<std::vector<double>> loads;  // [bus][t], MW
    std::vector<double> reserve;             // [t], MW

    std::size_t bus_index(const std::string& id) const;
    std::size_t unit_index(const std::string& id) const;
    std::size_t line_index(const std::string& id) const;
    bool has_unit(const std::string& id) const;
    bool has_line(const std::string& id) const;
    double total_load(int t) const;

    // Throws NetworkError naming the first violated invariant.
    void validate() const;
};

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

GridNetwork network_from_json(const std::string& text);
std::string network_to_json(const GridNetwork& net);
GridNetwork load_network(const std::string& path);
void save_network(const GridNetwork& net, const std::string& path);

// +1 at from_bus, -1 at to_bus; sparse (bus index, coefficient)
std::vector<std::pair<std::size_t, int>> incidence_row(const GridNetwork& net, const std::string& line_id);
std::vector<int> incidence_dense(const GridNetwork& net, const std::string& line_id);

// Site of a component for hurricane geometry: unit -> its bus, line -> endpoint midpoint.
std::pair<double, double> component_location(const GridNetwork& net, const std::string& component_id);
std::vector<std::string> component_ids(const GridNetwork& net);

}  // namespace stormuc
