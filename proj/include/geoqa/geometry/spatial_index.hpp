#pragma once

#include "geoqa/geometry/bounding_box.hpp"
#include "geoqa/geometry/geo_set.hpp"

#include <cstddef>
#include <vector>

namespace geoqa {

/// Static Sort-Tile-Recursive packed R-tree over rectangles.
class StrTree {
public:
    explicit StrTree(const std::vector<BoundingBox>& boxes, std::size_t node_capacity = 10);

    /// Indices of every input box intersecting `box`, ascending.
    std::vector<std::size_t> query(const BoundingBox& box) const;

    std::size_t size() const noexcept { return size_; }
    std::size_t height() const noexcept { return levels_.size(); }

private:
    struct Node {
        BoundingBox box;
        std::size_t first = 0;  // item index at level 0, child offset above
        std::size_t count = 0;
    };

    void search(std::size_t level, std::size_t first, std::size_t count, const BoundingBox& box,
                std::vector<std::size_t>& out) const;

    std::vector<std::vector<Node>> levels_;
    std::size_t size_ = 0;
};

/// STR-tree whose leaf payload is a position in the GeoSet it was built from.
class SpatialIndex {
public:
    explicit SpatialIndex(const GeoSet& set);

    /// Positions whose geometry box intersects `box` (a superset of the
    /// geometries that touch it), ascending.
    std::vector<std::size_t> candidates(const BoundingBox& box) const { return tree_.query(box); }

    std::size_t size() const noexcept { return tree_.size(); }

private:
    StrTree tree_;
};

SpatialIndex build_index(const GeoSet& set);

}  // namespace geoqa
