#include "geoqa/eval/city.hpp"

#include "geoqa/error.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

namespace geoqa::eval {

namespace {

using nlohmann::json;

constexpr double kLatMin = 48.100, kLatMax = 48.190;
constexpr double kLonMin = 11.480, kLonMax = 11.650;
constexpr double kMPerDegLat = 110574.0;
constexpr double kMPerDegLon = 74347.0;  // 111320 * cos(48.145 deg)
constexpr double kPi = 3.14159265358979323846;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    // Own mapping so the city does not depend on the library's distributions.
    double u01() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * u01(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen() % n); }
    bool chance(double p) { return u01() < p; }
};

struct Weighted {
    const char* value;
    int weight;
};

const char* pick(Rng& rng, const std::vector<Weighted>& items) {
    int total = 0;
    for (const auto& w : items) {
        total += w.weight;
    }
    int r = static_cast<int>(rng.index(static_cast<std::size_t>(total)));
    for (const auto& w : items) {
        if (r < w.weight) {
            return w.value;
        }
        r -= w.weight;
    }
    return items.back().value;
}

json ring_json(const std::vector<std::pair<double, double>>& pts) {
    json ring = json::array();
    for (const auto& [lon, lat] : pts) {
        ring.push_back({lon, lat});
    }
    ring.push_back(ring.front());
    return ring;
}

json polygon(const std::vector<std::pair<double, double>>& pts) {
    return {{"type", "Polygon"}, {"coordinates", {ring_json(pts)}}};
}

json rect(double lon, double lat, double w_m, double h_m) {
    const double dx = w_m / 2 / kMPerDegLon, dy = h_m / 2 / kMPerDegLat;
    return polygon({{lon - dx, lat - dy}, {lon + dx, lat - dy}, {lon + dx, lat + dy}, {lon - dx, lat + dy}});
}

json point(double lon, double lat) { return {{"type", "Point"}, {"coordinates", {lon, lat}}}; }

json line(const std::vector<std::pair<double, double>>& pts) {
    json c = json::array();
    for (const auto& [lon, lat] : pts) {
        c.push_back({lon, lat});
    }
    return {{"type", "LineString"}, {"coordinates", c}};
}

// Star-shaped polygon; vertex radii in [0.7r, r].
json blob(Rng& rng, double lon, double lat, double r_m) {
    const std::size_t n = 5 + rng.index(4);
    const double phase = rng.uniform(0, 2 * kPi);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = phase + 2 * kPi * static_cast<double>(i) / static_cast<double>(n);
        const double r = r_m * rng.uniform(0.7, 1.0);
        pts.emplace_back(lon + r * std::cos(a) / kMPerDegLon, lat + r * std::sin(a) / kMPerDegLat);
    }
    return polygon(pts);
}

json feature(json geometry, json props) {
    return {{"type", "Feature"}, {"geometry", std::move(geometry)}, {"properties", std::move(props)}};
}

const std::vector<std::string> kStems = {
    "Linden", "Eichen", "Buchen", "Ahorn", "Birken", "Kastanien", "Tannen", "Ulmen", "Erlen", "Weiden",
    "Rosen", "Tulpen", "Nelken", "Flieder", "Holunder", "Schlehen", "Wacholder", "Efeu", "Mohn", "Lerchen",
    "Amsel", "Finken", "Meisen", "Falken", "Adler", "Sonnen", "Mond", "Stern", "Berg", "Tal",
    "Mühl", "Schloss", "Kloster", "Burg", "Moos", "Seerosen", "Bach", "Hirsch", "Fuchs", "Dachs"};

const std::vector<std::string> kSurnames = {"Huber", "Bauer", "Maier", "Wagner", "Gruber", "Hofmann", "Schmid",
                                            "Brandl", "Kellner", "Lechner", "Pichler", "Reiter", "Wimmer"};

class Names {
public:
    explicit Names(Rng& rng) : rng_(rng) {}

    void reserve(const std::string& n) { used_.insert(n); }

    std::string make(const std::string& category) {
        const std::string& s = kStems[rng_.index(kStems.size())];
        const std::string& p = kSurnames[rng_.index(kSurnames.size())];
        static const std::map<std::string, std::string> suffix = {
            {"park", "park"},          {"grass", "wiese"},        {"meadow", "anger"},     {"forest", "forst"},
            {"farmland", "feld"},      {"farmyard", "hof"},       {"cemetery", "friedhof"}, {"allotments", "gärten"},
            {"recreation ground", "sportplatz"}, {"primary", "straße"}, {"secondary", "straße"},
            {"tertiary", "straße"},    {"residential", "straße"}, {"footway", "weg"},      {"cycleway", "radweg"},
            {"bus stop", "straße"},    {"attraction", "brunnen"}};
        std::string base;
        if (auto it = suffix.find(category); it != suffix.end()) {
            base = s + it->second;
        } else if (category == "nature reserve") {
            base = "Naturschutzgebiet " + s + "au";
        } else if (category == "industrial") {
            base = "Gewerbegebiet " + s + "feld";
        } else if (category == "school") {
            base = s + "-Grundschule";
        } else if (category == "kindergarten") {
            base = "Kindergarten " + s + "nest";
        } else if (category == "church") {
            base = "St. " + s + "kirche";
        } else if (category == "university") {
            base = "Hochschule " + s + "tal";
        } else if (category == "restaurant") {
            base = "Gasthaus zum " + s;
        } else if (category == "cafe") {
            base = "Café " + s;
        } else if (category == "supermarket" || category == "retail") {
            base = s + " Markt";
        } else if (category == "greengrocer") {
            base = "Obst " + p;
        } else if (category == "clothes") {
            base = "Mode " + p;
        } else if (category == "pharmacy") {
            base = s + "-Apotheke";
        } else if (category == "bakery") {
            base = "Bäckerei " + p;
        } else {
            base = "Haus " + s;
        }
        std::string name = base;
        for (int k = 2; used_.count(name); ++k) {
            name = base + " " + std::to_string(k);
        }
        used_.insert(name);
        return name;
    }

private:
    Rng& rng_;
    std::set<std::string> used_;
};

struct Site {
    double lon, lat, r;
    std::string category;
};

}  // namespace

std::vector<CityLayer> generate_city(std::uint64_t seed) {
    Rng rng(seed);
    Names names(rng);
    long long next_id = 1000000;
    auto props = [&](const std::string& category, const std::string& name) {
        json p = {{"fclass", category}, {"osm_id", std::to_string(next_id++)}};
        if (!name.empty()) {
            p["name"] = name;
        }
        return p;
    };
    auto rand_lon = [&] { return rng.uniform(kLonMin, kLonMax); };
    auto rand_lat = [&] { return rng.uniform(kLatMin, kLatMax); };

    // --- soil: a 12 x 10 grid of description-only tiles.
    const std::vector<std::string> soils = {kLoamBraunerde,
                                            kLoamParabraunerde,
                                            "Vorherrschend Gley aus Sand",
                                            "Fast ausschließlich Pararendzina aus Kies",
                                            "Vorherrschend Niedermoor aus Torf",
                                            "Überwiegend Rendzina aus Schotter",
                                            "Fast ausschließlich Auengley aus Flusssand",
                                            "Vorherrschend Pseudogley aus Schluff"};
    json soil = json::array();
    const int cols = 12, rows = 10;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double x0 = kLonMin + (kLonMax - kLonMin) * c / cols, x1 = kLonMin + (kLonMax - kLonMin) * (c + 1) / cols;
            const double y0 = kLatMin + (kLatMax - kLatMin) * r / rows, y1 = kLatMin + (kLatMax - kLatMin) * (r + 1) / rows;
            soil.push_back(feature(polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}),
                                   {{"description", soils[rng.index(soils.size())]}}));
        }
    }

    // --- hand-placed named features.
    json area = json::array(), buildings = json::array(), points = json::array(), roads = json::array();
    std::vector<Site> sites;
    auto fixed_area = [&](const char* cat, const char* name, const char* id, double lon, double lat, double w, double h) {
        names.reserve(name);
        area.push_back(feature(rect(lon, lat, w, h), {{"fclass", cat}, {"name", name}, {"osm_id", id}}));
        sites.push_back({lon, lat, std::min(w, h) / 2, cat});
    };
    fixed_area("park", "Salinenhof", "17978461", 11.5600, 48.1450, 160, 140);
    fixed_area("park", "Maximiliansplatz", "144135886", 11.5710, 48.1420, 120, 220);
    fixed_area("park", "Alter Botanischer Garten", "20001", 11.5655, 48.1430, 180, 160);
    fixed_area("park", "Luitpoldpark", "20002", 11.5700, 48.1700, 600, 500);
    fixed_area("park", "Englischer Garten", "20003", 11.5950, 48.1580, 900, 2200);
    fixed_area("park", "Westpark", "20004", 11.5150, 48.1220, 900, 450);
    fixed_area("park", "Olympiapark", "20005", 11.5500, 48.1730, 1000, 800);
    fixed_area("park", "Hirschgarten", "20006", 11.5150, 48.1500, 700, 400);
    fixed_area("grass", "Theresienwiese", "20007", 11.5480, 48.1320, 600, 500);
    fixed_area("forest", "Forstenrieder Park", "20008", 11.4950, 48.1060, 900, 800);
    fixed_area("recreation ground", "Sportpark Maxvorstadt", "20009", 11.5520, 48.1530, 240, 200);

    auto fixed_building = [&](const char* cat, const char* name, const char* id, double lon, double lat, double w, double h) {
        names.reserve(name);
        buildings.push_back(feature(rect(lon, lat, w, h), {{"fclass", cat}, {"name", name}, {"osm_id", id}}));
    };
    fixed_building("building", "Krone-Villa", "153292452", 11.5611, 48.1461, 20, 18);
    fixed_building("building", "Physiotherapie Kinder und Erwachsene", "93216444", 11.5735, 48.1435, 25, 15);
    fixed_building("church", "Frauenkirche", "30001", 11.5736, 48.1386, 60, 100);
    fixed_building("university", "Technische Universität München", "30002", 11.5680, 48.1495, 200, 150);
    fixed_building("kindergarten", "Kindergarten Sportpark", "30003", 11.5522, 48.1531, 20, 20);

    names.reserve("Obst Huber");
    points.push_back(feature(point(11.5700, 48.1500), {{"fclass", "greengrocer"}, {"name", "Obst Huber"}, {"osm_id", "40001"}}));
    points.push_back(feature(point(11.57360, 48.13860), {{"fclass", "attraction"}, {"name", "Frauenkirche"}, {"osm_id", "40002"}}));

    auto fixed_road = [&](const char* cat, const char* name, const char* id, std::vector<std::pair<double, double>> pts) {
        names.reserve(name);
        roads.push_back(feature(line(pts), {{"fclass", cat}, {"name", name}, {"osm_id", id}}));
    };
    fixed_road("secondary", "Theresienstraße", "50001", {{11.5550, 48.1505}, {11.5700, 48.1502}, {11.5850, 48.1500}});
    fixed_road("primary", "Ludwigstraße", "50002", {{11.5800, 48.1430}, {11.5810, 48.1500}, {11.5820, 48.1560}});
    fixed_road("tertiary", "Westendstraße", "50003", {{11.5000, 48.1340}, {11.5200, 48.1355}, {11.5450, 48.1370}});
    fixed_road("primary", "Leopoldstraße", "50004", {{11.5830, 48.1560}, {11.5850, 48.1630}, {11.5870, 48.1700}});
    fixed_road("residential", "Arcisstraße", "50005", {{11.5680, 48.1420}, {11.5675, 48.1490}, {11.5670, 48.1560}});
    fixed_road("footway", "Theresienweg", "50006", {{11.5450, 48.1300}, {11.5510, 48.1340}});

    // --- random land use.
    const std::vector<Weighted> area_cats = {{"park", 60},       {"grass", 50},      {"meadow", 40},
                                             {"forest", 30},     {"farmland", 40},   {"farmyard", 20},
                                             {"recreation ground", 30}, {"cemetery", 15}, {"allotments", 25},
                                             {"nature reserve", 10}, {"industrial", 30}};
    const std::map<std::string, std::pair<double, double>> area_size = {
        {"park", {80, 350}},       {"grass", {40, 200}},      {"meadow", {60, 300}},   {"forest", {150, 600}},
        {"farmland", {200, 600}},  {"farmyard", {40, 120}},   {"recreation ground", {60, 200}},
        {"cemetery", {80, 250}},   {"allotments", {50, 150}}, {"nature reserve", {200, 700}},
        {"industrial", {100, 400}}};
    for (int i = 0; i < 350; ++i) {
        const std::string cat = pick(rng, area_cats);
        const auto [lo, hi] = area_size.at(cat);
        const double r = rng.uniform(lo, hi);
        const double lon = rand_lon(), lat = rand_lat();
        area.push_back(feature(blob(rng, lon, lat, r), props(cat, rng.chance(0.6) ? names.make(cat) : "")));
        sites.push_back({lon, lat, r * 0.7 * 0.8, cat});
    }

    // --- buildings, many placed inside land-use polygons.
    const std::vector<Weighted> bcats = {{"building", 420}, {"house", 160}, {"apartments", 90}, {"school", 35},
                                         {"kindergarten", 35}, {"church", 20}, {"retail", 30}, {"university", 10}};
    std::vector<std::pair<double, double>> building_centers;
    for (int i = 0; i < 800; ++i) {
        const std::string cat = pick(rng, bcats);
        const double w = rng.uniform(10, 40), h = rng.uniform(10, 40);
        double lon = rand_lon(), lat = rand_lat();
        const bool for_kids = cat == "school" || cat == "kindergarten";
        if (rng.chance(for_kids ? 0.7 : 0.4)) {
            // Inside a site large enough to hold it.
            for (int tries = 0; tries < 20; ++tries) {
                const Site& s = sites[rng.index(sites.size())];
                if (for_kids && s.category != "recreation ground" && s.category != "park") {
                    continue;
                }
                const double room = s.r - std::hypot(w, h) / 2;
                if (room < 10) {
                    continue;
                }
                const double a = rng.uniform(0, 2 * kPi), d = rng.uniform(0, room * 0.8);
                lon = s.lon + d * std::cos(a) / kMPerDegLon;
                lat = s.lat + d * std::sin(a) / kMPerDegLat;
                break;
            }
        }
        const bool named = rng.chance(cat == "building" || cat == "house" || cat == "apartments" ? 0.15 : 0.9);
        buildings.push_back(feature(rect(lon, lat, w, h), props(cat, named ? names.make(cat) : "")));
        building_centers.emplace_back(lon, lat);
    }

    // --- points of interest, some inside buildings.
    const std::vector<Weighted> pcats = {{"restaurant", 70}, {"cafe", 50},       {"supermarket", 30}, {"greengrocer", 15},
                                         {"clothes", 35},    {"pharmacy", 20},   {"bakery", 30},      {"bus stop", 60},
                                         {"attraction", 15}, {"bench", 30}};
    for (int i = 0; i < 355; ++i) {
        const std::string cat = pick(rng, pcats);
        double lon = rand_lon(), lat = rand_lat();
        if (cat != "bus stop" && cat != "bench" && rng.chance(0.4)) {
            std::tie(lon, lat) = building_centers[rng.index(building_centers.size())];
        }
        const bool named = rng.chance(cat == "bench" || cat == "bus stop" ? 0.3 : 0.7);
        points.push_back(feature(point(lon, lat), props(cat, named ? names.make(cat) : "")));
    }

    // --- roads as random walks.
    const std::vector<Weighted> rcats = {{"primary", 25},     {"secondary", 40}, {"tertiary", 50},
                                         {"residential", 150}, {"footway", 50},  {"cycleway", 25}};
    for (int i = 0; i < 340; ++i) {
        const std::string cat = pick(rng, rcats);
        std::vector<std::pair<double, double>> pts{{rand_lon(), rand_lat()}};
        double heading = rng.uniform(0, 2 * kPi);
        const std::size_t n = 2 + rng.index(4);
        for (std::size_t k = 1; k < n; ++k) {
            heading += rng.uniform(-0.6, 0.6);
            const double len = rng.uniform(150, 800);
            pts.emplace_back(pts.back().first + len * std::cos(heading) / kMPerDegLon,
                             pts.back().second + len * std::sin(heading) / kMPerDegLat);
        }
        const bool named = rng.chance(0.85);
        roads.push_back(feature(line(pts), props(cat, named ? names.make(cat) : "")));
    }

    auto fc = [](json features) { return json{{"type", "FeatureCollection"}, {"features", std::move(features)}}; };
    return {{"soil", "", fc(soil)},
            {"roads", "", fc(roads)},
            {"points", "", fc(points)},
            {"land", "area", fc(area)},
            {"buildings", "", fc(buildings)}};
}

void ingest_city(store::KnowledgeStore& store, const std::vector<CityLayer>& layers) {
    for (const auto& l : layers) {
        store.ingest_geojson(l.dataset, l.collection, l.table);
    }
}

void write_city(const std::vector<CityLayer>& layers, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json manifest = json::array();
    for (const auto& l : layers) {
        const std::string file = l.dataset + ".geojson";
        std::ofstream out(dir / file);
        if (!out) {
            throw Error(ErrorCode::Io, "cannot write " + (dir / file).string());
        }
        out << l.collection.dump() << "\n";
        manifest.push_back({{"dataset", l.dataset}, {"table", l.table}, {"file", file}});
    }
    std::ofstream m(dir / "manifest.json");
    m << manifest.dump(2) << "\n";
}

}  // namespace geoqa::eval
