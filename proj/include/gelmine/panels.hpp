#pragma once

#include "gelmine/corpus.hpp"

#include <map>
#include <span>
#include <vector>

namespace gelmine {

struct PanelParams {
    double seed_threshold = 0.60;
    double expand_threshold = 0.15;
    double max_gap = 50.0;   // pixels between neighboring gel segments
    double label_near = 30.0;
    double label_far = 150.0;

    void validate() const;
};

enum class MemberProvenance { Seed, Expanded };

/// A contiguous gel region: connected high-recall segments around at least
/// one high-precision seed.
struct GelRegion {
    int id = 0;
    BoundingBox bbox; // exact bbox of the union of member bboxes
    std::vector<int> member_segment_ids; // sorted
    std::map<int, MemberProvenance> provenance;
};

struct GelPanel {
    int id = 0;
    BoundingBox region;
    std::vector<int> member_segment_ids; // sorted
    std::vector<int> label_segment_ids;  // sorted
    std::map<int, MemberProvenance> provenance;
};

/// Whether any Text segment overlaps (with positive area) the gap band
/// between the two boxes. Overlapping boxes have no band.
bool text_between(const BoundingBox& a, const BoundingBox& b, std::span<const Segment> texts);

/// Groups Graphic segments into gel regions: seeds are segments with
/// p >= seed_threshold; expansion walks segments with p >= expand_threshold
/// whose gap is at most max_gap and with no text segment in between.
/// Components without a seed are discarded. Regions come back sorted by
/// (y0, x0) with ids assigned in that order.
std::vector<GelRegion> group_gel_segments(std::span<const Segment> segments,
                                          const std::map<int, double>& proba,
                                          const PanelParams& params);

/// Attributes label text segments to regions: a text qualifies when its gap
/// to the region bbox is at most label_near and its farthest corner is at
/// most label_far away. A text qualifying for several regions goes to the
/// one with the smallest gap, ties to the smallest region id.
std::vector<GelPanel> attach_labels(std::span<const GelRegion> regions,
                                    std::span<const Segment> texts, const PanelParams& params);

} // namespace gelmine
