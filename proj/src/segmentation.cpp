#include "gelmine/segmentation.hpp"

#include "gelmine/util.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <tuple>

namespace gelmine {

void SegmentationParams::validate() const {
    if (binarize_threshold <= 0 || binarize_threshold > 255) {
        throw ValidationError("segmentation.binarize_threshold must be in (0, 255]");
    }
    if (min_area <= 0) throw ValidationError("segmentation.min_area must be positive");
    if (rect_uniformity_sigma <= 0) {
        throw ValidationError("segmentation.rect_uniformity_sigma must be positive");
    }
    if (rect_min_side <= 0) throw ValidationError("segmentation.rect_min_side must be positive");
    if (merge_iou <= 0.0 || merge_iou > 1.0) {
        throw ValidationError("segmentation.merge_iou must be in (0, 1]");
    }
}

namespace {

void sort_and_assign_ids(std::vector<Segment>& segments) {
    std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
        return std::tie(a.bbox.y0, a.bbox.x0, a.bbox.y1, a.bbox.x1) <
               std::tie(b.bbox.y0, b.bbox.x0, b.bbox.y1, b.bbox.x1);
    });
    for (std::size_t i = 0; i < segments.size(); ++i) segments[i].id = static_cast<int>(i);
}

} // namespace

std::vector<Segment> detect_components(const GrayImage& gray, const SegmentationParams& params) {
    params.validate();
    const int w = gray.width;
    const int h = gray.height;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> stack;
    std::vector<Segment> out;

    auto is_fg = [&](int x, int y) { return gray.at(x, y) < params.binarize_threshold; };

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t sidx = static_cast<std::size_t>(sy) * w + sx;
            if (visited[sidx] || !is_fg(sx, sy)) continue;
            // Flood fill one 8-connected component.
            BoundingBox bbox{sx, sy, sx + 1, sy + 1};
            long long area = 0;
            stack.clear();
            stack.push_back(static_cast<int>(sidx));
            visited[sidx] = 1;
            while (!stack.empty()) {
                const int idx = stack.back();
                stack.pop_back();
                const int x = idx % w;
                const int y = idx / w;
                ++area;
                bbox.x0 = std::min(bbox.x0, x);
                bbox.y0 = std::min(bbox.y0, y);
                bbox.x1 = std::max(bbox.x1, x + 1);
                bbox.y1 = std::max(bbox.y1, y + 1);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                        if (visited[nidx] || !is_fg(nx, ny)) continue;
                        visited[nidx] = 1;
                        stack.push_back(static_cast<int>(nidx));
                    }
                }
            }
            if (area >= params.min_area) {
                out.push_back(Segment::graphic(0, bbox));
            }
        }
    }
    sort_and_assign_ids(out);
    return out;
}

std::vector<Segment> detect_components(const Image& image, const SegmentationParams& params) {
    return detect_components(to_gray(image), params);
}

namespace {

/// Summed-area tables over gray values and their squares; lets any
/// rectangle's mean and std-dev be read in O(1).
struct GrayStats {
    int width = 0;
    int height = 0;
    std::vector<double> sum;
    std::vector<double> sumsq;

    explicit GrayStats(const GrayImage& g) : width(g.width), height(g.height) {
        const std::size_t stride = static_cast<std::size_t>(width) + 1;
        sum.assign(stride * (height + 1), 0.0);
        sumsq.assign(stride * (height + 1), 0.0);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double v = g.at(x, y);
                const std::size_t i = (static_cast<std::size_t>(y) + 1) * stride + x + 1;
                sum[i] = v + sum[i - 1] + sum[i - stride] - sum[i - stride - 1];
                sumsq[i] = v * v + sumsq[i - 1] + sumsq[i - stride] - sumsq[i - stride - 1];
            }
        }
    }

    double rect_sum(const std::vector<double>& t, int x0, int y0, int x1, int y1) const {
        const std::size_t stride = static_cast<std::size_t>(width) + 1;
        return t[static_cast<std::size_t>(y1) * stride + x1] -
               t[static_cast<std::size_t>(y0) * stride + x1] -
               t[static_cast<std::size_t>(y1) * stride + x0] +
               t[static_cast<std::size_t>(y0) * stride + x0];
    }

    double mean(const BoundingBox& b) const {
        return rect_sum(sum, b.x0, b.y0, b.x1, b.y1) / static_cast<double>(b.area());
    }

    double stddev(const BoundingBox& b) const {
        const double n = static_cast<double>(b.area());
        const double s = rect_sum(sum, b.x0, b.y0, b.x1, b.y1);
        const double sq = rect_sum(sumsq, b.x0, b.y0, b.x1, b.y1);
        const double var = std::max(0.0, sq / n - (s / n) * (s / n));
        return std::sqrt(var);
    }
};

GrayImage downsample4(const GrayImage& gray) {
    GrayImage ds;
    ds.width = std::max(1, gray.width / 4);
    ds.height = std::max(1, gray.height / 4);
    ds.value.resize(static_cast<std::size_t>(ds.width) * ds.height);
    for (int y = 0; y < ds.height; ++y) {
        for (int x = 0; x < ds.width; ++x) {
            int total = 0;
            int count = 0;
            for (int dy = 0; dy < 4; ++dy) {
                for (int dx = 0; dx < 4; ++dx) {
                    const int sx = x * 4 + dx;
                    const int sy = y * 4 + dy;
                    if (sx >= gray.width || sy >= gray.height) continue;
                    total += gray.at(sx, sy);
                    ++count;
                }
            }
            ds.value[static_cast<std::size_t>(y) * ds.width + x] =
                static_cast<std::uint8_t>(total / std::max(1, count));
        }
    }
    return ds;
}

/// Grows a rectangle from a seed cell, extending one row/column at a time
/// while the interior std-dev stays within bound.
BoundingBox grow_uniform_rect(const GrayStats& stats, int seed_x, int seed_y, double sigma) {
    BoundingBox box{seed_x, seed_y, seed_x + 1, seed_y + 1};
    bool grew = true;
    while (grew) {
        grew = false;
        const BoundingBox candidates[4] = {
            {box.x0 - 1, box.y0, box.x1, box.y1},
            {box.x0, box.y0, box.x1 + 1, box.y1},
            {box.x0, box.y0 - 1, box.x1, box.y1},
            {box.x0, box.y0, box.x1, box.y1 + 1},
        };
        for (const BoundingBox& c : candidates) {
            if (c.x0 < 0 || c.y0 < 0 || c.x1 > stats.width || c.y1 > stats.height) continue;
            if (stats.stddev(c) <= sigma) {
                box = c;
                grew = true;
            }
        }
    }
    return box;
}

/// Mean gray of the 3-pixel frame surrounding `box`, clipped to the image;
/// returns false when the frame is empty (box touches all borders).
bool frame_mean(const GrayStats& stats, const BoundingBox& box, double* mean) {
    const BoundingBox outer{std::max(0, box.x0 - 3), std::max(0, box.y0 - 3),
                            std::min(stats.width, box.x1 + 3), std::min(stats.height, box.y1 + 3)};
    const double outer_area = static_cast<double>(outer.area());
    const double inner_area = static_cast<double>(box.area());
    if (outer_area <= inner_area) return false;
    const double outer_sum = stats.rect_sum(stats.sum, outer.x0, outer.y0, outer.x1, outer.y1);
    const double inner_sum = stats.rect_sum(stats.sum, box.x0, box.y0, box.x1, box.y1);
    *mean = (outer_sum - inner_sum) / (outer_area - inner_area);
    return true;
}

} // namespace

std::vector<Segment> detect_low_contrast_rectangles(const GrayImage& gray,
                                                    const SegmentationParams& params) {
    params.validate();
    if (gray.width < params.rect_min_side || gray.height < params.rect_min_side) return {};

    const GrayImage ds = downsample4(gray);
    const GrayStats ds_stats(ds);
    const GrayStats full_stats(gray);

    const int ds_min_side = std::max(1, params.rect_min_side / 4 - 1);
    const int step = std::max(2, params.rect_min_side / 8);
    std::vector<std::uint8_t> covered(static_cast<std::size_t>(ds.width) * ds.height, 0);
    std::set<std::array<int, 4>> emitted;
    std::vector<Segment> out;

    for (int sy = step / 2; sy < ds.height; sy += step) {
        for (int sx = step / 2; sx < ds.width; sx += step) {
            if (covered[static_cast<std::size_t>(sy) * ds.width + sx]) continue;
            const BoundingBox ds_box =
                grow_uniform_rect(ds_stats, sx, sy, params.rect_uniformity_sigma);
            for (int y = ds_box.y0; y < ds_box.y1; ++y) {
                for (int x = ds_box.x0; x < ds_box.x1; ++x) {
                    covered[static_cast<std::size_t>(y) * ds.width + x] = 1;
                }
            }
            if (ds_box.width() < ds_min_side || ds_box.height() < ds_min_side) continue;

            // Refine each edge at full resolution: push outward while the
            // interior stays uniform, so a crisp boundary stops the edge
            // exactly on the rectangle.
            BoundingBox box{std::min(ds_box.x0 * 4, gray.width - 1),
                            std::min(ds_box.y0 * 4, gray.height - 1),
                            std::min(ds_box.x1 * 4, gray.width),
                            std::min(ds_box.y1 * 4, gray.height)};
            if (box.width() < 1 || box.height() < 1) continue;
            for (int pass = 0; pass < 8; ++pass) {
                bool changed = false;
                const BoundingBox grown[4] = {
                    {box.x0 - 1, box.y0, box.x1, box.y1},
                    {box.x0, box.y0, box.x1 + 1, box.y1},
                    {box.x0, box.y0 - 1, box.x1, box.y1},
                    {box.x0, box.y0, box.x1, box.y1 + 1},
                };
                for (const BoundingBox& c : grown) {
                    if (c.x0 < 0 || c.y0 < 0 || c.x1 > gray.width || c.y1 > gray.height) continue;
                    if (full_stats.stddev(c) <= params.rect_uniformity_sigma) {
                        box = c;
                        changed = true;
                    }
                }
                if (!changed) break;
            }

            if (box.width() < params.rect_min_side || box.height() < params.rect_min_side) continue;
            if (full_stats.stddev(box) > params.rect_uniformity_sigma) continue;
            double frame_gray = 0.0;
            if (!frame_mean(full_stats, box, &frame_gray)) continue;
            if (std::abs(full_stats.mean(box) - frame_gray) < 10.0) continue;
            if (!emitted.insert({box.x0, box.y0, box.x1, box.y1}).second) continue;
            out.push_back(Segment::graphic(0, box));
        }
    }

    // Nested or heavily overlapping detections from different seeds collapse
    // to the larger one.
    std::sort(out.begin(), out.end(), [](const Segment& a, const Segment& b) {
        return std::tie(a.bbox.y0, a.bbox.x0, a.bbox.y1, a.bbox.x1) <
               std::tie(b.bbox.y0, b.bbox.x0, b.bbox.y1, b.bbox.x1);
    });
    std::vector<Segment> kept;
    for (const Segment& s : out) {
        bool redundant = false;
        for (Segment& k : kept) {
            if (box_iou(s.bbox, k.bbox) >= 0.8) {
                if (s.bbox.area() > k.bbox.area()) k.bbox = s.bbox;
                redundant = true;
                break;
            }
        }
        if (!redundant) kept.push_back(s);
    }
    sort_and_assign_ids(kept);
    return kept;
}

std::vector<Segment> detect_low_contrast_rectangles(const Image& image,
                                                    const SegmentationParams& params) {
    return detect_low_contrast_rectangles(to_gray(image), params);
}

std::vector<Segment> merge_segment_sets(const std::vector<Segment>& a,
                                        const std::vector<Segment>& b, double merge_iou) {
    if (merge_iou <= 0.0 || merge_iou > 1.0) {
        throw ValidationError("merge_iou must be in (0, 1]");
    }
    struct Candidate {
        Segment segment;
        bool from_a;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(a.size() + b.size());
    for (const Segment& s : a) candidates.push_back({s, true});
    for (const Segment& s : b) candidates.push_back({s, false});
    // Greedy by descending area keeps the larger of any conflicting pair;
    // first-list origin breaks exact ties.
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.segment.bbox.area() != y.segment.bbox.area()) {
            return x.segment.bbox.area() > y.segment.bbox.area();
        }
        if (x.from_a != y.from_a) return x.from_a;
        const BoundingBox& bx = x.segment.bbox;
        const BoundingBox& by = y.segment.bbox;
        return std::tie(bx.y0, bx.x0, bx.y1, bx.x1) < std::tie(by.y0, by.x0, by.y1, by.x1);
    });
    std::vector<Segment> kept;
    for (const Candidate& c : candidates) {
        bool conflict = false;
        for (const Segment& k : kept) {
            if (box_iou(c.segment.bbox, k.bbox) >= merge_iou) {
                conflict = true;
                break;
            }
        }
        if (!conflict) kept.push_back(c.segment);
    }
    sort_and_assign_ids(kept);
    return kept;
}

} // namespace gelmine
