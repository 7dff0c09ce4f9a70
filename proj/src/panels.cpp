#include "gelmine/panels.hpp"

#include "gelmine/util.hpp"

#include <algorithm>
#include <tuple>

namespace gelmine {

void PanelParams::validate() const {
    if (seed_threshold <= 0.0 || expand_threshold <= 0.0) {
        throw ValidationError("panel thresholds must be positive");
    }
    if (expand_threshold > seed_threshold) {
        throw ValidationError("panels.expand_threshold must be <= panels.seed_threshold");
    }
    if (max_gap <= 0.0) throw ValidationError("panels.max_gap must be positive");
    if (label_near <= 0.0 || label_far <= 0.0 || label_near > label_far) {
        throw ValidationError("panel label distances must satisfy 0 < label_near <= label_far");
    }
}

bool text_between(const BoundingBox& a, const BoundingBox& b, std::span<const Segment> texts) {
    const bool sep_x = a.x1 <= b.x0 || b.x1 <= a.x0;
    const bool sep_y = a.y1 <= b.y0 || b.y1 <= a.y0;
    if (!sep_x && !sep_y) return false; // overlapping boxes have no band

    BoundingBox band;
    if (sep_x && !sep_y) {
        band.x0 = std::min(a.x1, b.x1);
        band.x1 = std::max(a.x0, b.x0);
        band.y0 = std::max(a.y0, b.y0);
        band.y1 = std::min(a.y1, b.y1);
    } else if (sep_y && !sep_x) {
        band.y0 = std::min(a.y1, b.y1);
        band.y1 = std::max(a.y0, b.y0);
        band.x0 = std::max(a.x0, b.x0);
        band.x1 = std::min(a.x1, b.x1);
    } else {
        // Separated on both axes: the corner rectangle between them.
        band.x0 = std::min(a.x1, b.x1);
        band.x1 = std::max(a.x0, b.x0);
        band.y0 = std::min(a.y1, b.y1);
        band.y1 = std::max(a.y0, b.y0);
    }
    if (band.x1 <= band.x0 || band.y1 <= band.y0) return false;

    for (const Segment& t : texts) {
        if (t.kind != SegmentKind::Text) continue;
        if (boxes_intersect(t.bbox, band)) return true;
    }
    return false;
}

std::vector<GelRegion> group_gel_segments(std::span<const Segment> segments,
                                          const std::map<int, double>& proba,
                                          const PanelParams& params) {
    params.validate();

    std::vector<const Segment*> candidates;
    for (const Segment& s : segments) {
        if (s.kind == SegmentKind::Text) continue;
        const auto it = proba.find(s.id);
        if (it == proba.end()) {
            throw ValidationError("no probability for graphic segment " + std::to_string(s.id));
        }
        if (it->second >= params.expand_threshold) candidates.push_back(&s);
    }

    // Union-find over the neighbor relation.
    const std::size_t n = candidates.size();
    std::vector<int> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    const auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (box_gap(candidates[i]->bbox, candidates[j]->bbox) > params.max_gap) continue;
            if (text_between(candidates[i]->bbox, candidates[j]->bbox, segments)) continue;
            parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }
    }

    std::map<int, std::vector<const Segment*>> components;
    for (std::size_t i = 0; i < n; ++i) {
        components[find(static_cast<int>(i))].push_back(candidates[i]);
    }

    std::vector<GelRegion> regions;
    for (const auto& [root, members] : components) {
        bool has_seed = false;
        for (const Segment* m : members) {
            if (proba.at(m->id) >= params.seed_threshold) {
                has_seed = true;
                break;
            }
        }
        if (!has_seed) continue;
        GelRegion region;
        region.bbox = members.front()->bbox;
        for (const Segment* m : members) {
            region.bbox = box_union(region.bbox, m->bbox);
            region.member_segment_ids.push_back(m->id);
            region.provenance[m->id] = proba.at(m->id) >= params.seed_threshold
                                           ? MemberProvenance::Seed
                                           : MemberProvenance::Expanded;
        }
        std::sort(region.member_segment_ids.begin(), region.member_segment_ids.end());
        regions.push_back(std::move(region));
    }
    std::sort(regions.begin(), regions.end(), [](const GelRegion& a, const GelRegion& b) {
        return std::tie(a.bbox.y0, a.bbox.x0, a.bbox.y1, a.bbox.x1) <
               std::tie(b.bbox.y0, b.bbox.x0, b.bbox.y1, b.bbox.x1);
    });
    for (std::size_t i = 0; i < regions.size(); ++i) regions[i].id = static_cast<int>(i);
    return regions;
}

std::vector<GelPanel> attach_labels(std::span<const GelRegion> regions,
                                    std::span<const Segment> texts, const PanelParams& params) {
    params.validate();
    std::vector<GelPanel> panels;
    std::map<int, std::size_t> panel_by_region_id;
    panels.reserve(regions.size());
    for (const GelRegion& r : regions) {
        GelPanel panel;
        panel.id = r.id;
        panel.region = r.bbox;
        panel.member_segment_ids = r.member_segment_ids;
        panel.provenance = r.provenance;
        panel_by_region_id[r.id] = panels.size();
        panels.push_back(std::move(panel));
    }

    for (const Segment& t : texts) {
        if (t.kind != SegmentKind::Text) continue;
        int best_region = -1;
        double best_gap = 0.0;
        for (const GelRegion& r : regions) {
            const double gap = box_gap(t.bbox, r.bbox);
            if (gap > params.label_near) continue;
            if (max_corner_distance(t.bbox, r.bbox) > params.label_far) continue;
            if (best_region < 0 || gap < best_gap ||
                (gap == best_gap && r.id < best_region)) {
                best_region = r.id;
                best_gap = gap;
            }
        }
        if (best_region >= 0) {
            panels[panel_by_region_id.at(best_region)].label_segment_ids.push_back(t.id);
        }
    }
    for (GelPanel& p : panels) {
        std::sort(p.label_segment_ids.begin(), p.label_segment_ids.end());
    }
    return panels;
}

} // namespace gelmine
