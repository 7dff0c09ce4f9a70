#pragma once

#include "gelmine/corpus.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace gelmine {

inline constexpr int kFeatureCount = 39;
inline constexpr int kFeatureSchemaVersion = 1;
inline constexpr int kHaralickLevels = 32;

/// Fixed 39-component descriptor of one segment. Layout:
///   [0]  rel_cx        segment center x / image width
///   [1]  rel_cy        segment center y / image height
///   [2]  rel_w         width / image width
///   [3]  rel_h         height / image height
///   [4]  abs_w         width in pixels
///   [5]  abs_h         height in pixels
///   [6..21]  hist      normalized 16-bin grayscale histogram
///   [22] mean_r  [23] mean_g  [24] mean_b   channel means / 255
///   [25..37] haralick  13 co-occurrence texture features
///   [38] char_count    recognized characters in/overlapping the segment
using FeatureVector = std::array<double, kFeatureCount>;

const std::vector<std::string>& feature_names();

/// Normalized 16-bin histogram of the gray values inside bbox
/// (bin = gray / 16, counts divided by bbox area).
std::array<double, 16> grayscale_histogram(const GrayImage& gray, const BoundingBox& bbox);

/// Haralick features f1..f13 of the bbox interior: gray values quantized to
/// `levels` equal-width bins, symmetric normalized co-occurrence matrices at
/// distance 1 for offsets (1,0), (1,1), (0,1), (-1,1), features computed per
/// offset and averaged. Logs are base 2 with 0*log0 = 0; the correlation of
/// a zero-variance region is 1. Offsets with no pixel pairs are skipped.
/// Requires bbox area >= 4.
std::array<double, 13> haralick_features(const GrayImage& gray, const BoundingBox& bbox,
                                         int levels = kHaralickLevels);

FeatureVector extract_features(const Image& image, const GrayImage& gray,
                               std::span<const Segment> all_segments, const Segment& segment);
FeatureVector extract_features(const Figure& figure, const Segment& segment);

/// Feature vectors for `segments`, parallel across segments.
std::vector<FeatureVector> extract_all_features(const Figure& figure,
                                                const std::vector<Segment>& segments,
                                                int workers = 1);

std::string feature_csv_header();
std::string feature_csv_row(const std::string& figure_id, int segment_id,
                            const FeatureVector& fv, const std::string& label);

} // namespace gelmine
