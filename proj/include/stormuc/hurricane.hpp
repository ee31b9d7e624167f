#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stormuc/multiclass.hpp"

namespace stormuc {

struct HurricaneCategory {
    int level = 1;
    double low_mph = 74, high_mph = 95;
};

// Saffir-Simpson one-minute sustained bands; category 5 capped at 200 mph.
HurricaneCategory saffir_simpson(int level);

struct CategoryMix {
    std::vector<int> levels;
    std::vector<double> weights;
};

struct ClassRegion {
    CategoryMix categories;
    double dist_lo = 0.0, dist_hi = 1.0;  // fraction of max distance
};

// Where each labelled class draws its features. A class lives mostly in its
// own region; a spill fraction is drawn from a neighbouring region instead.
struct SyntheticLayout {
    std::array<ClassRegion, 3> region;  // indexed by ClassLabel
    double spill_outage = 0.10;         // Outage samples drawn from the Uncertain region
    double spill_operational = 0.10;    // Operational samples drawn from the Uncertain region
    double spill_uncertain = 0.20;      // Uncertain samples, half from each outer region

    static SyntheticLayout standard();
};

struct SyntheticSpec {
    std::map<ClassLabel, int> counts{{ClassLabel::Outage, 300}, {ClassLabel::Operational, 300}, {ClassLabel::Uncertain, 150}};
    double noise_sigma = 0.05;
    double max_wind_mph = 200.0;
    double max_distance_km = 500.0;
    std::uint64_t seed = 1;
    SyntheticLayout layout = SyntheticLayout::standard();

    void validate() const;
};

using Rng = std::mt19937_64;

double sample_wind_speed(const HurricaneCategory& cat, Rng& rng, double max_wind_mph = 200.0, double sd_scale = 1.0);

std::vector<ClassSample> generate_dataset(const SyntheticSpec& spec);

std::array<double, 2> normalize_features(double wind_mph, double distance_km, double max_wind_mph, double max_distance_km);

struct Point {
    double x = 0, y = 0;
};

struct HurricaneForecast {
    std::vector<Point> track;
    std::vector<int> category_at_waypoint;
    std::vector<double> eye_wind_mph;

    void validate() const;
};

HurricaneForecast load_forecast(const std::string& path);
HurricaneForecast forecast_from_json(const std::string& text);

struct ComponentSite {
    std::string component_id;
    Point location;
};

struct RawFeatures {
    double wind_mph = 0, distance_km = 0;
    std::size_t nearest_waypoint = 0;
};

double point_segment_distance(Point p, Point a, Point b);
RawFeatures component_features(const ComponentSite& site, const HurricaneForecast& forecast, double max_distance_km = 500.0);

// wind,distance,label
void write_dataset_csv(const std::vector<ClassSample>& data, const std::string& path);
std::vector<ClassSample> read_dataset_csv(const std::string& path);

}  // namespace stormuc
