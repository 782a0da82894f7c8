#pragma once

#include "geoqa/store/knowledge_store.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace geoqa::eval {

/// One GeoJSON layer of the synthetic city, in ingestion order.
struct CityLayer {
    std::string dataset;
    std::string table;  // table override passed to ingest_geojson ("" = dataset)
    nlohmann::json collection;
};

inline constexpr std::uint64_t kDefaultCitySeed = 42;

/// Loam descriptions used by the farming example.
inline constexpr const char* kLoamBraunerde = "Fast ausschließlich Braunerde aus Lehm über Schotter";
inline constexpr const char* kLoamParabraunerde = "Vorherrschend Parabraunerde aus Lösslehm";

/// Deterministic Munich-like city of about 2,000 features: soil (German
/// descriptions, no category), roads, points, land (table "area") and
/// buildings, in that order. Hand-placed named features (Salinenhof,
/// Maximiliansplatz, Krone-Villa, Frauenkirche, Westendstraße, ...) sit at
/// fixed coordinates; the rest is drawn from `seed`.
std::vector<CityLayer> generate_city(std::uint64_t seed = kDefaultCitySeed);

void ingest_city(store::KnowledgeStore& store, const std::vector<CityLayer>& layers);

/// Writes <dataset>.geojson files plus manifest.json ([{dataset, table, file}]).
void write_city(const std::vector<CityLayer>& layers, const std::filesystem::path& dir);

}  // namespace geoqa::eval
