#include "stormuc/hurricane.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace stormuc {

HurricaneCategory saffir_simpson(int level) {
    switch (level) {
        case 1: return {1, 74, 95};
        case 2: return {2, 96, 110};
        case 3: return {3, 111, 129};
        case 4: return {4, 130, 156};
        case 5: return {5, 157, 200};
    }
    throw std::invalid_argument("hurricane category must be 1..5, got " + std::to_string(level));
}

SyntheticLayout SyntheticLayout::standard() {
    SyntheticLayout L;
    L.region[static_cast<int>(ClassLabel::Outage)] = {{{4, 5}, {1, 4}}, 0.0, 0.07};
    L.region[static_cast<int>(ClassLabel::Uncertain)] = {{{2, 3}, {1, 1}}, 0.387, 0.534};
    L.region[static_cast<int>(ClassLabel::Operational)] = {{{1}, {1}}, 0.835, 1.0};
    return L;
}

void SyntheticSpec::validate() const {
    for (ClassLabel c : {ClassLabel::Operational, ClassLabel::Uncertain, ClassLabel::Outage}) {
        auto it = counts.find(c);
        if (it == counts.end() || it->second <= 0)
            throw std::invalid_argument(std::string("synthetic count for ") + label_name(c) + " must be positive");
    }
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
    if (!(max_wind_mph > 0.0) || !(max_distance_km > 0.0)) throw std::invalid_argument("maxima must be positive");
    for (const auto& r : layout.region) {
        if (r.categories.levels.empty() || r.categories.levels.size() != r.categories.weights.size())
            throw std::invalid_argument("region category mix malformed");
        for (int l : r.categories.levels) saffir_simpson(l);
        if (!(r.dist_lo >= 0.0 && r.dist_lo <= r.dist_hi && r.dist_hi <= 1.0))
            throw std::invalid_argument("region distance range must lie in [0,1]");
    }
    for (double s : {layout.spill_outage, layout.spill_operational, layout.spill_uncertain})
        if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("spill fractions must lie in [0,1]");
}

double sample_wind_speed(const HurricaneCategory& cat, Rng& rng, double max_wind_mph, double sd_scale) {
    const double mid = 0.5 * (cat.low_mph + cat.high_mph);
    const double sd = 0.25 * (cat.high_mph - cat.low_mph) * sd_scale;
    if (sd <= 0.0) return std::clamp(mid, 0.0, max_wind_mph);
    std::normal_distribution<double> nd(mid, sd);
    return std::clamp(nd(rng), 0.0, max_wind_mph);
}

std::vector<ClassSample> generate_dataset(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, 1.0);
    const auto& L = spec.layout;
    std::vector<ClassSample> out;
    for (ClassLabel cls : {ClassLabel::Outage, ClassLabel::Operational, ClassLabel::Uncertain}) {
        const int n = spec.counts.at(cls);
        for (int k = 0; k < n; ++k) {
            ClassLabel src = cls;
            const double u = unit(rng);
            if (cls == ClassLabel::Uncertain) {
                if (u < 0.5 * L.spill_uncertain) src = ClassLabel::Operational;
                else if (u < L.spill_uncertain) src = ClassLabel::Outage;
            } else if (u < (cls == ClassLabel::Outage ? L.spill_outage : L.spill_operational)) {
                src = ClassLabel::Uncertain;
            }
            const ClassRegion& r = L.region[static_cast<int>(src)];
            std::discrete_distribution<int> pick(r.categories.weights.begin(), r.categories.weights.end());
            const HurricaneCategory cat = saffir_simpson(r.categories.levels[pick(rng)]);
            const double wind = sample_wind_speed(cat, rng, spec.max_wind_mph) / spec.max_wind_mph;
            const double dist = r.dist_lo + (r.dist_hi - r.dist_lo) * unit(rng);
            const double w = std::clamp(wind + spec.noise_sigma * jitter(rng), 0.0, 1.0);
            const double d = std::clamp(dist + spec.noise_sigma * jitter(rng), 0.0, 1.0);
            out.push_back({{w, d}, static_cast<int>(cls)});
        }
    }
    return out;
}

std::array<double, 2> normalize_features(double wind_mph, double distance_km, double max_wind_mph, double max_distance_km) {
    if (!(max_wind_mph > 0.0) || !(max_distance_km > 0.0)) throw std::invalid_argument("normalize_features: maxima must be positive");
    if (wind_mph < 0.0 || distance_km < 0.0) throw std::invalid_argument("normalize_features: negative raw value");
    return {std::clamp(wind_mph / max_wind_mph, 0.0, 1.0), std::clamp(distance_km / max_distance_km, 0.0, 1.0)};
}

void HurricaneForecast::validate() const {
    if (track.size() < 2) throw std::invalid_argument("forecast track needs at least 2 waypoints");
    if (category_at_waypoint.size() != track.size()) throw std::invalid_argument("forecast: one category per waypoint required");
    if (eye_wind_mph.size() != track.size()) throw std::invalid_argument("forecast: one eye wind per waypoint required");
    for (int c : category_at_waypoint) saffir_simpson(c);
    for (double w : eye_wind_mph)
        if (!(w >= 0.0)) throw std::invalid_argument("forecast: eye wind must be >= 0");
}

HurricaneForecast forecast_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    HurricaneForecast f;
    for (const auto& p : j.at("track")) f.track.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    f.category_at_waypoint = j.at("categories").get<std::vector<int>>();
    if (j.contains("eye_wind_mph")) {
        f.eye_wind_mph = j.at("eye_wind_mph").get<std::vector<double>>();
    } else {
        for (int c : f.category_at_waypoint) {
            HurricaneCategory cat = saffir_simpson(c);
            f.eye_wind_mph.push_back(0.5 * (cat.low_mph + cat.high_mph));
        }
    }
    f.validate();
    return f;
}

HurricaneForecast load_forecast(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read forecast " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return forecast_from_json(ss.str());
}

double point_segment_distance(Point p, Point a, Point b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

RawFeatures component_features(const ComponentSite& site, const HurricaneForecast& forecast, double max_distance_km) {
    if (forecast.track.empty()) throw std::invalid_argument("component_features: empty track");
    forecast.validate();
    RawFeatures r;
    r.distance_km = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < forecast.track.size(); ++k)
        r.distance_km = std::min(r.distance_km, point_segment_distance(site.location, forecast.track[k], forecast.track[k + 1]));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < forecast.track.size(); ++k) {
        double d = std::hypot(site.location.x - forecast.track[k].x, site.location.y - forecast.track[k].y);
        if (d < best) { best = d; r.nearest_waypoint = k; }
    }
    r.wind_mph = forecast.eye_wind_mph[r.nearest_waypoint] * std::max(0.0, 1.0 - r.distance_km / max_distance_km);
    return r;
}

void write_dataset_csv(const std::vector<ClassSample>& data, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "wind,distance,label\n";
    f.precision(17);
    for (const auto& s : data)
        f << s.x.at(0) << "," << s.x.at(1) << "," << label_name(static_cast<ClassLabel>(s.label)) << "\n";
}

std::vector<ClassSample> read_dataset_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "wind,distance,label") throw std::runtime_error(path + ": expected header 'wind,distance,label'");
    std::vector<ClassSample> out;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string w, d, l;
        if (!std::getline(ss, w, ',') || !std::getline(ss, d, ',') || !std::getline(ss, l))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 3 fields");
        try {
            out.push_back({{std::stod(w), std::stod(d)}, static_cast<int>(parse_label(l))});
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace stormuc
