#pragma once

// Small hand-built tables shared by the unit tests.

#include "geoqa/store/knowledge_store.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <vector>

namespace demo {

using geoqa::store::Embedder;
using geoqa::store::KnowledgeStore;
using geoqa::store::TrigramEmbedder;

inline nlohmann::json feature(nlohmann::json geometry, nlohmann::json props) {
    return {{"type", "Feature"}, {"geometry", std::move(geometry)}, {"properties", std::move(props)}};
}

inline nlohmann::json point(double lon, double lat) { return {{"type", "Point"}, {"coordinates", {lon, lat}}}; }

inline nlohmann::json square(double lon, double lat, double d) {
    return {{"type", "Polygon"},
            {"coordinates", {{{lon, lat}, {lon + d, lat}, {lon + d, lat + d}, {lon, lat + d}, {lon, lat}}}}};
}

inline nlohmann::json collection(std::vector<nlohmann::json> features) {
    return {{"type", "FeatureCollection"}, {"features", features}};
}

inline nlohmann::json land_doc() {
    return collection({
        feature(square(11.56, 48.145, 0.002), {{"fclass", "park"}, {"name", "Salinenhof"}, {"osm_id", "17978461"}}),
        feature(square(11.57, 48.142, 0.002), {{"fclass", "park"}, {"name", "Maximiliansplatz"}, {"osm_id", 144135886}}),
        feature(square(11.60, 48.20, 0.01), {{"fclass", "grass"}, {"name", "Theresienwiese"}, {"osm_id", "1"}}),
        feature(square(11.50, 48.10, 0.01), {{"fclass", "meadow"}, {"osm_id", "2"}}),
        feature(square(11.52, 48.12, 0.01), {{"fclass", "forest"}, {"name", "Forstenrieder Park"}, {"osm_id", "3"}}),
    });
}

inline nlohmann::json buildings_doc() {
    return collection({
        feature(square(11.561, 48.146, 0.0002), {{"fclass", "building"}, {"name", "Krone-Villa"}, {"osm_id", "153292452"}}),
        feature(square(11.58, 48.15, 0.0002),
                {{"fclass", "building"}, {"name", "Physiotherapie Kinder und Erwachsene"}, {"osm_id", "93216444"}}),
        feature(square(11.40, 48.30, 0.0002), {{"fclass", "building"}, {"osm_id", "5"}}),
    });
}

inline nlohmann::json roads_doc() {
    return collection({
        feature({{"type", "LineString"}, {"coordinates", {{11.55, 48.14}, {11.56, 48.15}}}},
                {{"fclass", "residential"}, {"name", "Theresienstraße"}, {"osm_id", "10"}}),
        feature({{"type", "LineString"}, {"coordinates", {{11.50, 48.14}, {11.51, 48.15}}}},
                {{"fclass", "footway"}, {"name", "Theresienweg"}, {"osm_id", "11"}}),
        feature({{"type", "LineString"}, {"coordinates", {{11.52, 48.14}, {11.53, 48.15}}}},
                {{"fclass", "primary"}, {"name", "Ludwigstraße"}, {"osm_id", "12"}}),
    });
}

inline nlohmann::json points_doc() {
    return collection({
        feature(point(11.57, 48.15), {{"fclass", "greengrocer"}, {"name", "Obst Huber"}, {"osm_id", "20"}}),
        feature(point(11.574, 48.138), {{"fclass", "attraction"}, {"name", "Frauenkirche"}, {"osm_id", "21"}}),
    });
}

inline nlohmann::json soil_doc() {
    return collection({
        feature(square(11.50, 48.10, 0.05), {{"description", "Fast ausschließlich Braunerde aus Lehm über Schotter"}}),
        feature(square(11.55, 48.10, 0.05), {{"description", "Vorherrschend Gley aus Sand"}}),
    });
}

inline std::shared_ptr<KnowledgeStore> demo_store(std::shared_ptr<Embedder> emb = std::make_shared<TrigramEmbedder>()) {
    auto s = std::make_shared<KnowledgeStore>(std::move(emb));
    s->ingest_geojson("soil", soil_doc());
    s->ingest_geojson("roads", roads_doc());
    s->ingest_geojson("points", points_doc());
    s->ingest_geojson("land", land_doc(), "area");
    s->ingest_geojson("buildings", buildings_doc());
    return s;
}

}  // namespace demo
