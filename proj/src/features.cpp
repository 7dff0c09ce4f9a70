#include "gelmine/features.hpp"

#include "gelmine/parallel.hpp"
#include "gelmine/util.hpp"

#include <cmath>
#include <sstream>

namespace gelmine {

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = {"rel_cx", "rel_cy", "rel_w", "rel_h", "abs_w", "abs_h"};
        for (int i = 0; i < 16; ++i) n.push_back("hist_" + std::to_string(i));
        n.insert(n.end(), {"mean_r", "mean_g", "mean_b"});
        n.insert(n.end(), {"h_asm", "h_contrast", "h_correlation", "h_variance", "h_idm",
                           "h_sum_avg", "h_sum_var", "h_sum_entropy", "h_entropy", "h_diff_var",
                           "h_diff_entropy", "h_imc1", "h_imc2"});
        n.push_back("char_count");
        return n;
    }();
    return names;
}

std::array<double, 16> grayscale_histogram(const GrayImage& gray, const BoundingBox& bbox) {
    if (!bbox.valid() || bbox.x1 > gray.width || bbox.y1 > gray.height) {
        throw ValidationError("histogram bbox out of image bounds");
    }
    std::array<double, 16> hist{};
    for (int y = bbox.y0; y < bbox.y1; ++y) {
        for (int x = bbox.x0; x < bbox.x1; ++x) {
            hist[gray.at(x, y) / 16] += 1.0;
        }
    }
    const double area = static_cast<double>(bbox.area());
    for (double& v : hist) v /= area;
    return hist;
}

namespace {

inline double log2_or_zero(double p) { return p > 0.0 ? std::log2(p) : 0.0; }

/// f1..f13 of one normalized symmetric co-occurrence matrix.
std::array<double, 13> haralick_of_glcm(const std::vector<double>& p, int levels) {
    const int L = levels;
    std::vector<double> px(L, 0.0);
    std::vector<double> p_sum(2 * L - 1, 0.0);  // p_{x+y}, index i+j
    std::vector<double> p_diff(L, 0.0);         // p_{x-y}, index |i-j|
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            const double v = p[static_cast<std::size_t>(i) * L + j];
            px[i] += v;
            p_sum[i + j] += v;
            p_diff[std::abs(i - j)] += v;
        }
    }
    double mean = 0.0;
    for (int i = 0; i < L; ++i) mean += i * px[i];
    double var = 0.0;
    for (int i = 0; i < L; ++i) var += (i - mean) * (i - mean) * px[i];

    double asm_ = 0.0, contrast = 0.0, idm = 0.0, entropy = 0.0, corr_num = 0.0, f4 = 0.0;
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            const double v = p[static_cast<std::size_t>(i) * L + j];
            asm_ += v * v;
            idm += v / (1.0 + (i - j) * (i - j));
            entropy -= v * log2_or_zero(v);
            corr_num += i * j * v;
            f4 += (i - mean) * (i - mean) * v;
        }
    }
    for (int k = 0; k < L; ++k) contrast += static_cast<double>(k) * k * p_diff[k];

    // Symmetric matrix: both marginals coincide, so correlation uses one
    // mean/variance pair. Zero variance (constant region) defines f3 = 1.
    const double correlation = var > 0.0 ? (corr_num - mean * mean) / var : 1.0;

    double sum_avg = 0.0;
    for (int k = 0; k < 2 * L - 1; ++k) sum_avg += k * p_sum[k];
    double sum_var = 0.0, sum_entropy = 0.0;
    for (int k = 0; k < 2 * L - 1; ++k) {
        sum_var += (k - sum_avg) * (k - sum_avg) * p_sum[k];
        sum_entropy -= p_sum[k] * log2_or_zero(p_sum[k]);
    }

    double diff_mean = 0.0;
    for (int k = 0; k < L; ++k) diff_mean += k * p_diff[k];
    double diff_var = 0.0, diff_entropy = 0.0;
    for (int k = 0; k < L; ++k) {
        diff_var += (k - diff_mean) * (k - diff_mean) * p_diff[k];
        diff_entropy -= p_diff[k] * log2_or_zero(p_diff[k]);
    }

    double hx = 0.0;
    for (int i = 0; i < L; ++i) hx -= px[i] * log2_or_zero(px[i]);
    double hxy1 = 0.0, hxy2 = 0.0;
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            const double q = px[i] * px[j];
            hxy1 -= p[static_cast<std::size_t>(i) * L + j] * log2_or_zero(q);
            hxy2 -= q * log2_or_zero(q);
        }
    }
    const double imc1 = hx > 0.0 ? (entropy - hxy1) / hx : 0.0;
    const double imc2 = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - entropy))));

    return {asm_,    contrast,    correlation, f4,       idm,       sum_avg,  sum_var,
            sum_entropy, entropy, diff_var,    diff_entropy, imc1,  imc2};
}

} // namespace

std::array<double, 13> haralick_features(const GrayImage& gray, const BoundingBox& bbox,
                                         int levels) {
    if (!bbox.valid() || bbox.x1 > gray.width || bbox.y1 > gray.height) {
        throw ValidationError("haralick bbox out of image bounds");
    }
    if (bbox.area() < 4) {
        throw ValidationError("haralick bbox area must be >= 4 (got " +
                              std::to_string(bbox.area()) + ")");
    }
    static constexpr int offsets[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};

    std::array<double, 13> averaged{};
    int used_offsets = 0;
    std::vector<double> glcm(static_cast<std::size_t>(levels) * levels);
    for (const auto& off : offsets) {
        std::fill(glcm.begin(), glcm.end(), 0.0);
        long long pairs = 0;
        for (int y = bbox.y0; y < bbox.y1; ++y) {
            for (int x = bbox.x0; x < bbox.x1; ++x) {
                const int nx = x + off[0];
                const int ny = y + off[1];
                if (nx < bbox.x0 || nx >= bbox.x1 || ny < bbox.y0 || ny >= bbox.y1) continue;
                const int gi = gray.at(x, y) * levels / 256;
                const int gj = gray.at(nx, ny) * levels / 256;
                glcm[static_cast<std::size_t>(gi) * levels + gj] += 1.0;
                glcm[static_cast<std::size_t>(gj) * levels + gi] += 1.0;
                ++pairs;
            }
        }
        if (pairs == 0) continue;
        const double norm = 2.0 * static_cast<double>(pairs);
        for (double& v : glcm) v /= norm;
        const std::array<double, 13> f = haralick_of_glcm(glcm, levels);
        for (int i = 0; i < 13; ++i) averaged[i] += f[i];
        ++used_offsets;
    }
    // bbox area >= 4 guarantees at least one offset has pairs.
    for (double& v : averaged) v /= static_cast<double>(used_offsets);
    return averaged;
}

FeatureVector extract_features(const Image& image, const GrayImage& gray,
                               std::span<const Segment> all_segments, const Segment& segment) {
    const BoundingBox& b = segment.bbox;
    if (!b.valid() || b.x1 > image.width || b.y1 > image.height) {
        throw ValidationError("segment " + std::to_string(segment.id) + " out of image bounds");
    }
    FeatureVector fv{};
    fv[0] = 0.5 * (b.x0 + b.x1) / image.width;
    fv[1] = 0.5 * (b.y0 + b.y1) / image.height;
    fv[2] = static_cast<double>(b.width()) / image.width;
    fv[3] = static_cast<double>(b.height()) / image.height;
    fv[4] = b.width();
    fv[5] = b.height();

    const std::array<double, 16> hist = grayscale_histogram(gray, b);
    for (int i = 0; i < 16; ++i) fv[6 + i] = hist[i];

    double mr = 0.0, mg = 0.0, mb = 0.0;
    for (int y = b.y0; y < b.y1; ++y) {
        for (int x = b.x0; x < b.x1; ++x) {
            const std::uint8_t* p = image.px(x, y);
            mr += p[0];
            mg += p[1];
            mb += p[2];
        }
    }
    const double scale = 1.0 / (255.0 * static_cast<double>(b.area()));
    fv[22] = mr * scale;
    fv[23] = mg * scale;
    fv[24] = mb * scale;

    const std::array<double, 13> har = haralick_features(gray, b);
    for (int i = 0; i < 13; ++i) fv[25 + i] = har[i];

    long long chars = 0;
    for (const Segment& other : all_segments) {
        if (other.kind != SegmentKind::Text) continue;
        if (boxes_intersect(other.bbox, b)) chars += other.char_count;
    }
    fv[38] = static_cast<double>(chars);
    return fv;
}

FeatureVector extract_features(const Figure& figure, const Segment& segment) {
    return extract_features(figure.image, to_gray(figure.image), figure.segments, segment);
}

std::vector<FeatureVector> extract_all_features(const Figure& figure,
                                                const std::vector<Segment>& segments,
                                                int workers) {
    const GrayImage gray = to_gray(figure.image);
    std::vector<FeatureVector> out(segments.size());
    parallel_for(segments.size(), workers, [&](std::size_t i) {
        out[i] = extract_features(figure.image, gray, figure.segments, segments[i]);
    });
    return out;
}

std::string feature_csv_header() {
    std::ostringstream ss;
    ss << "figure_id,segment_id";
    for (const std::string& n : feature_names()) ss << "," << n;
    ss << ",label";
    return ss.str();
}

std::string feature_csv_row(const std::string& figure_id, int segment_id, const FeatureVector& fv,
                            const std::string& label) {
    std::ostringstream ss;
    ss << figure_id << "," << segment_id;
    for (double v : fv) ss << "," << format_double(v);
    ss << "," << label;
    return ss.str();
}

} // namespace gelmine
