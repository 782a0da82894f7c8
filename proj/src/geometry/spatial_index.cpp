#include "geoqa/geometry/spatial_index.hpp"

#include <algorithm>
#include <cmath>

namespace geoqa {

namespace {

std::vector<BoundingBox> boxes_of(const GeoSet& set) {
    std::vector<BoundingBox> out;
    out.reserve(set.size());
    for (const auto& e : set) {
        out.push_back(e.geometry.bbox());
    }
    return out;
}

double center_lon(const BoundingBox& b) { return 0.5 * (b.min_lon + b.max_lon); }
double center_lat(const BoundingBox& b) { return 0.5 * (b.min_lat + b.max_lat); }

}  // namespace

StrTree::StrTree(const std::vector<BoundingBox>& boxes, std::size_t node_capacity) : size_(boxes.size()) {
    if (boxes.empty()) {
        return;
    }
    const std::size_t cap = std::max<std::size_t>(node_capacity, 2);
    std::vector<Node> level;
    level.reserve(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        level.push_back({boxes[i], i, 1});
    }

    while (true) {
        // Tile: sort by x, cut into vertical slices, sort each slice by y.
        const std::size_t n = level.size();
        const auto parents = (n + cap - 1) / cap;
        const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(parents))));
        const std::size_t per_slice = slices * cap;
        std::stable_sort(level.begin(), level.end(),
                         [](const Node& a, const Node& b) { return center_lon(a.box) < center_lon(b.box); });
        for (std::size_t s = 0; s < n; s += per_slice) {
            auto end = level.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + per_slice));
            std::stable_sort(level.begin() + static_cast<std::ptrdiff_t>(s), end,
                             [](const Node& a, const Node& b) { return center_lat(a.box) < center_lat(b.box); });
        }
        levels_.push_back(std::move(level));
        const auto& lower = levels_.back();
        if (lower.size() <= cap) {
            break;
        }
        std::vector<Node> upper;
        upper.reserve(parents);
        for (std::size_t s = 0; s < lower.size(); s += per_slice) {
            const std::size_t slice_end = std::min(lower.size(), s + per_slice);
            for (std::size_t g = s; g < slice_end; g += cap) {
                Node parent{lower[g].box, g, std::min(cap, slice_end - g)};
                for (std::size_t k = g + 1; k < g + parent.count; ++k) {
                    parent.box = parent.box.merged(lower[k].box);
                }
                upper.push_back(parent);
            }
        }
        level = std::move(upper);
    }
}

void StrTree::search(std::size_t level, std::size_t first, std::size_t count, const BoundingBox& box,
                     std::vector<std::size_t>& out) const {
    const auto& nodes = levels_[level];
    for (std::size_t i = first; i < first + count; ++i) {
        const Node& node = nodes[i];
        if (!node.box.intersects(box)) {
            continue;
        }
        if (level == 0) {
            out.push_back(node.first);
        } else {
            search(level - 1, node.first, node.count, box, out);
        }
    }
}

std::vector<std::size_t> StrTree::query(const BoundingBox& box) const {
    std::vector<std::size_t> out;
    if (levels_.empty()) {
        return out;
    }
    search(levels_.size() - 1, 0, levels_.back().size(), box, out);
    std::sort(out.begin(), out.end());
    return out;
}

SpatialIndex::SpatialIndex(const GeoSet& set) : tree_(boxes_of(set)) {}

SpatialIndex build_index(const GeoSet& set) { return SpatialIndex(set); }

}  // namespace geoqa
