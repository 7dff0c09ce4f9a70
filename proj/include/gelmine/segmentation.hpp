#pragma once

#include "gelmine/corpus.hpp"

#include <vector>

namespace gelmine {

struct SegmentationParams {
    int binarize_threshold = 200;       // gray < threshold counts as foreground
    int min_area = 100;                 // component pixel count, not bbox area
    double rect_uniformity_sigma = 12.0;
    int rect_min_side = 20;
    double merge_iou = 0.5;

    void validate() const;
};

/// Dark connected components (8-connectivity) whose pixel count reaches
/// min_area. Ids follow the raster order of the component top-left corners.
std::vector<Segment> detect_components(const GrayImage& gray, const SegmentationParams& params);
std::vector<Segment> detect_components(const Image& image, const SegmentationParams& params);

/// Uniform axis-aligned rectangles that the component detector misses:
/// interior gray std-dev <= rect_uniformity_sigma, each side >=
/// rect_min_side, and interior mean differing from the surrounding 3-pixel
/// frame by at least 10 gray levels. Seeded on a 4x downsampled grid and
/// refined to pixel precision.
std::vector<Segment> detect_low_contrast_rectangles(const GrayImage& gray,
                                                    const SegmentationParams& params);
std::vector<Segment> detect_low_contrast_rectangles(const Image& image,
                                                    const SegmentationParams& params);

/// Union of both detector outputs with overlap resolution: of any two
/// segments with IoU >= merge_iou the larger-area one survives. Ids are
/// reassigned deterministically from 0.
std::vector<Segment> merge_segment_sets(const std::vector<Segment>& a,
                                        const std::vector<Segment>& b, double merge_iou);

} // namespace gelmine
