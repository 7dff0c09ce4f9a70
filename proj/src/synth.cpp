#include "gelmine/synth.hpp"

#include "gelmine/parallel.hpp"
#include "gelmine/rng.hpp"
#include "gelmine/util.hpp"
#include "synth_font.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace gelmine {

using nlohmann::json;
namespace font = synthfont;

const std::vector<std::string>& default_gene_symbols() {
    static const std::vector<std::string> symbols = {
        "LOX",   "MYC",    "TP53",  "GAPDH", "AKT1",  "EGFR",  "KRAS",  "BRCA1",
        "CDK2",  "STAT3",  "actin", "tubulin", "MAPK1", "JUN",  "FOS",   "p38",
        "ERK1",  "BCL2",   "CASP3", "NFKB1", "PTEN",  "RB1",   "SRC",   "ABL1",
        "HRAS",  "MDM2",   "ATM",   "CHEK1", "PARP1", "VEGFA", "TNF",   "IL6",
        "TGFB1", "SMAD4",  "NOTCH1", "GSK3B", "mTOR",  "HSP90", "CCND1", "CDH1"};
    return symbols;
}

const std::vector<std::string>& default_other_words() {
    static const std::vector<std::string> words = {
        "control", "treated", "lysate",  "total",  "input",  "blot",   "gel",
        "extract", "sample",  "hours",   "buffer", "wash",   "marker", "lane",
        "protein", "vector",  "mock",    "wild",   "mutant", "serum"};
    return words;
}

SynthSpec SynthSpec::defaults() {
    SynthSpec spec;
    spec.gene_symbols = default_gene_symbols();
    spec.other_words = default_other_words();
    return spec;
}

void SynthSpec::validate() const {
    if (n_figures < 0) throw ValidationError("synth.n_figures must be >= 0");
    if (first_index < 0) throw ValidationError("synth.first_index must be >= 0");
    if (min_width < 64 || min_height < 64 || min_width > max_width || min_height > max_height) {
        throw ValidationError("synth figure size range is invalid (min 64, min <= max)");
    }
    for (double p : {panel_probability, second_panel_probability, light_on_dark_probability,
                     blob_presence, ocr_noise_rate}) {
        if (p < 0.0 || p > 1.0) throw ValidationError("synth probabilities must be in [0, 1]");
    }
    if (min_rows < 1 || max_rows < min_rows || max_rows > 6) {
        throw ValidationError("synth panel rows must satisfy 1 <= min <= max <= 6");
    }
    if (min_lanes < 1 || max_lanes < min_lanes || max_lanes > 12) {
        throw ValidationError("synth panel lanes must satisfy 1 <= min <= max <= 12");
    }
    if (blob_strength < 0.0 || blob_jitter < 0.0) {
        throw ValidationError("synth blob parameters must be nonnegative");
    }
}

namespace {

constexpr int kTextScale = 2;
constexpr int kTickScale = 1;
constexpr std::uint8_t kInk = 25;

BoundingBox inflate(const BoundingBox& b, int m) {
    return BoundingBox{b.x0 - m, b.y0 - m, b.x1 + m, b.y1 + m};
}

struct FigureBuilder {
    const SynthSpec& spec;
    std::mt19937_64 rng;
    Image img;
    std::vector<Segment> segments;
    GroundTruth gt;
    std::vector<BoundingBox> occupied; // stored already inflated by the item margin
    int next_id = 0;
    int blob_count = 0;
    std::vector<std::pair<int, int>> blob_centers;

    FigureBuilder(const SynthSpec& s, std::uint64_t stream_seed, int w, int h)
        : spec(s), rng(stream_seed) {
        img = Image::filled(w, h, 255, 255, 255);
    }

    int add_graphic(const BoundingBox& b) {
        segments.push_back(Segment::graphic(next_id, b));
        return next_id++;
    }

    int add_text(const BoundingBox& b, std::string text) {
        segments.push_back(Segment::text_segment(next_id, b, std::move(text)));
        return next_id++;
    }

    /// Random-search placement; the stored box is inflated by `margin`.
    bool place(int w, int h, int margin, BoundingBox* out) {
        const int border = 8;
        if (w + 2 * border > img.width || h + 2 * border > img.height) return false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            const int x = rng_int(rng, border, img.width - border - w);
            const int y = rng_int(rng, border, img.height - border - h);
            const BoundingBox candidate{x, y, x + w, y + h};
            const BoundingBox test = inflate(candidate, margin);
            bool clear = true;
            for (const BoundingBox& o : occupied) {
                if (boxes_intersect(test, o)) {
                    clear = false;
                    break;
                }
            }
            if (clear) {
                occupied.push_back(test);
                *out = candidate;
                return true;
            }
        }
        return false;
    }

    void fill_rect(const BoundingBox& b, std::uint8_t r, std::uint8_t g, std::uint8_t bl) {
        for (int y = b.y0; y < b.y1; ++y) {
            for (int x = b.x0; x < b.x1; ++x) img.set(x, y, r, g, bl);
        }
    }

    std::string pick(const std::vector<std::string>& list) {
        return list[rng_below(rng, list.size())];
    }

    /// Cell-line style code like "C86" or "MB-23"; rejected if it collides
    /// with a gene symbol.
    std::string cell_code(int max_chars) {
        for (int attempt = 0; attempt < 8; ++attempt) {
            std::string code;
            const int letters = rng_int(rng, 1, 2);
            for (int i = 0; i < letters; ++i) {
                code.push_back(static_cast<char>('A' + rng_int(rng, 0, 25)));
            }
            if (max_chars >= 5 && rng_chance(rng, 0.3)) code.push_back('-');
            const int digits = rng_int(rng, 1, 2);
            for (int i = 0; i < digits; ++i) {
                code.push_back(static_cast<char>('0' + rng_int(rng, 0, 9)));
            }
            if (static_cast<int>(code.size()) > max_chars) continue;
            if (std::find(spec.gene_symbols.begin(), spec.gene_symbols.end(), code) ==
                spec.gene_symbols.end()) {
                return code;
            }
        }
        return "K" + std::to_string(rng_int(rng, 10, 99));
    }

    struct LabelChoice {
        std::string text;
        bool is_gene = false;
    };

    LabelChoice row_label_token() {
        const double u = rng_unit(rng);
        if (u < 0.60 && !spec.gene_symbols.empty()) {
            return {pick(spec.gene_symbols), true};
        }
        if (u < 0.75) {
            // Greek-prefixed protein form; the full hyphenated token is the
            // ground-truth gene token.
            static const std::vector<std::string> bases = {"actin", "tubulin"};
            static const std::vector<std::string> prefixes = {"β", "α", "γ"};
            return {prefixes[rng_below(rng, prefixes.size())] + "-" +
                        bases[rng_below(rng, bases.size())],
                    true};
        }
        return {pick(spec.other_words), false};
    }

    void render_panel(int rows, int lanes, bool* placed);
    void render_bar_chart();
    void render_line_graph();
    void render_photo();
    void render_icons();
    void render_caption();

    void apply_ocr_noise() {
        if (spec.ocr_noise_rate <= 0.0) return;
        static const std::map<char32_t, char32_t> confusions = {
            {U'O', U'0'}, {U'0', U'O'}, {U'l', U'1'}, {U'1', U'l'}, {U'I', U'l'},
            {U'S', U'5'}, {U'5', U'S'}, {U'B', U'8'}, {U'8', U'B'}, {U'Z', U'2'},
            {U'G', U'6'}, {U'g', U'q'}, {U'e', U'c'}, {U'a', U'o'}, {U'n', U'm'}};
        for (Segment& s : segments) {
            if (s.kind != SegmentKind::Text || s.text.empty()) continue;
            std::string mutated;
            for (char32_t cp : utf8_decode(s.text)) {
                if (rng_chance(rng, spec.ocr_noise_rate)) {
                    const auto it = confusions.find(cp);
                    utf8_append(mutated, it != confusions.end() ? it->second : U'#');
                } else {
                    utf8_append(mutated, cp);
                }
            }
            s.text = std::move(mutated);
            s.char_count = static_cast<int>(utf8_length(s.text));
        }
    }
};

void FigureBuilder::render_panel(int rows, int lanes, bool* placed) {
    *placed = false;

    const int lane_w = rng_int(rng, 24, 40);
    const int lane_gap = rng_int(rng, 5, 12);
    const int row_h = rng_int(rng, 38, 66);
    const int row_gap = rng_int(rng, 8, 24);
    const int pad = rng_int(rng, 6, 12);
    const int n_cond_rows = lanes >= 3 ? rng_int(rng, 0, 2) : 0;

    const int text_h = font::text_height(kTextScale);
    const int gel_w = 2 * pad + lanes * lane_w + (lanes - 1) * lane_gap;
    const int gel_h = rows * row_h + (rows - 1) * row_gap;
    const int label_reserve = 112;
    const int top_reserve = text_h + 18;
    const int bottom_reserve = n_cond_rows > 0 ? n_cond_rows * (text_h + 5) + 8 : 4;

    BoundingBox slot;
    if (!place(label_reserve + gel_w + 6, top_reserve + gel_h + bottom_reserve, 80, &slot)) {
        return;
    }
    const int gx = slot.x0 + label_reserve;
    const int gy = slot.y0 + top_reserve;

    const bool light_on_dark = rng_chance(rng, spec.light_on_dark_probability);
    int bg;
    int blob_delta;
    if (light_on_dark) {
        bg = rng_int(rng, 40, 65);
        blob_delta = rng_int(rng, 55, 130);
    } else {
        bg = rng_int(rng, 190, 215);
        // Backgrounds the binarizer treats as background need faint spots so
        // that the gel stays a uniform low-contrast rectangle.
        blob_delta = bg >= 200 ? rng_int(rng, 10, 16) : rng_int(rng, 50, 130);
    }

    PanelTruth panel;
    std::vector<BoundingBox> row_rects;

    for (int r = 0; r < rows; ++r) {
        const BoundingBox rect{gx, gy + r * (row_h + row_gap), gx + gel_w,
                               gy + r * (row_h + row_gap) + row_h};
        row_rects.push_back(rect);
        for (int y = rect.y0; y < rect.y1; ++y) {
            for (int x = rect.x0; x < rect.x1; ++x) {
                const int v = std::clamp(bg + rng_int(rng, -2, 2), 0, 255);
                img.set(x, y, static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v),
                        static_cast<std::uint8_t>(v));
            }
        }
        for (int lane = 0; lane < lanes; ++lane) {
            if (!rng_chance(rng, spec.blob_presence)) continue;
            const double jx = spec.blob_jitter * (2.0 * rng_unit(rng) - 1.0);
            const double jy = spec.blob_jitter * (2.0 * rng_unit(rng) - 1.0);
            const double cx = rect.x0 + pad + lane * (lane_w + lane_gap) + lane_w / 2.0 + jx;
            const double cy = rect.y0 + row_h * 0.55 + jy;
            const double rx = lane_w * (0.28 + 0.12 * rng_unit(rng));
            const double ry = row_h * (0.16 + 0.10 * rng_unit(rng));
            const double strength = (0.45 + 0.55 * rng_unit(rng)) * spec.blob_strength;
            const int x_lo = std::max(rect.x0 + 1, static_cast<int>(cx - 2.5 * rx));
            const int x_hi = std::min(rect.x1 - 1, static_cast<int>(cx + 2.5 * rx) + 1);
            const int y_lo = std::max(rect.y0 + 1, static_cast<int>(cy - 2.5 * ry));
            const int y_hi = std::min(rect.y1 - 1, static_cast<int>(cy + 2.5 * ry) + 1);
            for (int y = y_lo; y < y_hi; ++y) {
                for (int x = x_lo; x < x_hi; ++x) {
                    const double dx = (x - cx) / rx;
                    const double dy = (y - cy) / ry;
                    const double falloff = std::exp(-1.6 * (dx * dx + dy * dy));
                    const double shift = blob_delta * strength * falloff;
                    const int base = img.px(x, y)[0];
                    const int v = std::clamp(
                        static_cast<int>(std::lround(light_on_dark ? base + shift : base - shift)),
                        0, 255);
                    img.set(x, y, static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v),
                            static_cast<std::uint8_t>(v));
                }
            }
            ++blob_count;
            blob_centers.emplace_back(static_cast<int>(cx), static_cast<int>(cy));
        }

        const int gel_id = add_graphic(rect);
        gt.gel_segment_ids.insert(gel_id);
        panel.member_segment_ids.insert(gel_id);
    }

    // Row labels sit left of each row, right-aligned toward the gel.
    for (int r = 0; r < rows; ++r) {
        const LabelChoice choice = row_label_token();
        const int width = font::text_width(choice.text, kTextScale);
        const int x1 = gx - rng_int(rng, 6, 18);
        const int x0 = x1 - width;
        if (x0 < 2) continue;
        const int y = row_rects[static_cast<std::size_t>(r)].y0 + row_h / 2 - text_h / 2;
        const BoundingBox bbox = font::draw_text(img, x0, y, choice.text, kTextScale, kInk, kInk, kInk);
        const int id = add_text(bbox, choice.text);
        panel.label_segment_ids.insert(id);
        if (choice.is_gene) gt.gene_tokens.push_back({id, choice.text});
    }

    // Lane labels above the top row.
    for (int lane = 0; lane < lanes; ++lane) {
        if (!rng_chance(rng, /*label presence*/ 0.8)) continue;
        const int avail = lane_w + lane_gap - 2;
        const int max_chars = std::max(1, (avail + kTextScale) / (font::kAdvance * kTextScale));
        std::string text;
        bool is_gene = false;
        if (max_chars >= 3 && rng_chance(rng, 0.35)) {
            std::vector<std::string> fits;
            for (const std::string& s : spec.gene_symbols) {
                if (static_cast<int>(utf8_length(s)) <= max_chars) fits.push_back(s);
            }
            if (!fits.empty()) {
                text = fits[rng_below(rng, fits.size())];
                is_gene = true;
            }
        }
        if (text.empty() && max_chars >= 2 && rng_chance(rng, 0.7)) text = cell_code(max_chars);
        if (text.empty()) text = rng_chance(rng, 0.5) ? "+" : "-";
        const int width = font::text_width(text, kTextScale);
        const int cx = gx + pad + lane * (lane_w + lane_gap) + lane_w / 2;
        const int x0 = cx - width / 2;
        const int y = gy - rng_int(rng, 6, 14) - text_h;
        const BoundingBox bbox = font::draw_text(img, x0, y, text, kTextScale, kInk, kInk, kInk);
        const int id = add_text(bbox, text);
        panel.label_segment_ids.insert(id);
        if (is_gene) gt.gene_tokens.push_back({id, text});
    }

    // Condition rows under the bottom row: a name plus +/- marks per lane.
    const int gel_bottom = row_rects.back().y1;
    for (int k = 0; k < n_cond_rows; ++k) {
        const int y = gel_bottom + 5 + k * (text_h + 5);
        LabelChoice name = row_label_token();
        const int name_w = font::text_width(name.text, kTextScale);
        const int nx0 = gx - 8 - name_w;
        if (nx0 >= 2) {
            const BoundingBox bbox = font::draw_text(img, nx0, y, name.text, kTextScale, kInk, kInk, kInk);
            const int id = add_text(bbox, name.text);
            panel.label_segment_ids.insert(id);
            if (name.is_gene) gt.gene_tokens.push_back({id, name.text});
        }
        for (int lane = 0; lane < lanes; ++lane) {
            const std::string mark = rng_chance(rng, 0.5) ? "+" : "-";
            const int width = font::text_width(mark, kTextScale);
            const int cx = gx + pad + lane * (lane_w + lane_gap) + lane_w / 2;
            const BoundingBox bbox =
                font::draw_text(img, cx - width / 2, y, mark, kTextScale, kInk, kInk, kInk);
            const int id = add_text(bbox, mark);
            panel.label_segment_ids.insert(id);
        }
    }

    gt.panels.push_back(std::move(panel));
    *placed = true;
}

void FigureBuilder::render_bar_chart() {
    const int w = rng_int(rng, 150, 250);
    const int h = rng_int(rng, 110, 190);
    BoundingBox box;
    if (!place(w, h + 14, 24, &box)) return;
    box.y1 = box.y0 + h; // the extra rows hold the tick labels

    const std::uint8_t axis_gray = static_cast<std::uint8_t>(rng_int(rng, 20, 60));
    fill_rect({box.x0, box.y0, box.x0 + 2, box.y1}, axis_gray, axis_gray, axis_gray);
    fill_rect({box.x0, box.y1 - 2, box.x1, box.y1}, axis_gray, axis_gray, axis_gray);
    add_graphic(box);

    const int n = rng_int(rng, 5, 10);
    const int usable = w - 10;
    const int bw = std::clamp(usable / n - 4, 8, 40);
    const int tint_r = rng_int(rng, 20, 130);
    const int tint_g = rng_int(rng, 20, 130);
    const int tint_b = rng_int(rng, 20, 130);
    for (int i = 0; i < n; ++i) {
        const int bx = box.x0 + 6 + i * (bw + 4);
        if (bx + bw > box.x1 - 2) break;
        const int bh = std::max(20, static_cast<int>((0.25 + 0.65 * rng_unit(rng)) * (h - 14)));
        const BoundingBox bar{bx, box.y1 - 5 - bh, bx + bw, box.y1 - 5};
        const int shade = rng_int(rng, -15, 15);
        fill_rect(bar, static_cast<std::uint8_t>(std::clamp(tint_r + shade, 0, 255)),
                  static_cast<std::uint8_t>(std::clamp(tint_g + shade, 0, 255)),
                  static_cast<std::uint8_t>(std::clamp(tint_b + shade, 0, 255)));
        if (bar.area() >= 120) add_graphic(bar);
    }

    static const std::vector<std::string> ticks = {"0", "10", "25", "50", "100", "200"};
    const int n_ticks = rng_int(rng, 2, 3);
    for (int i = 0; i < n_ticks; ++i) {
        const std::string tick = ticks[rng_below(rng, ticks.size())];
        const int tx = box.x0 + 8 + i * (w / n_ticks);
        const BoundingBox bbox =
            font::draw_text(img, tx, box.y1 + 3, tick, kTickScale, kInk, kInk, kInk);
        add_text(bbox, tick);
    }
    if (rng_chance(rng, 0.7)) {
        const std::string title = pick(spec.other_words);
        const int width = font::text_width(title, kTextScale);
        const int tx = box.x0 + (w - width) / 2;
        const int ty = box.y0 - font::text_height(kTextScale) - 3;
        if (ty >= 2) {
            const BoundingBox bbox = font::draw_text(img, tx, ty, title, kTextScale, kInk, kInk, kInk);
            add_text(bbox, title);
        }
    }
}

void FigureBuilder::render_line_graph() {
    const int w = rng_int(rng, 160, 260);
    const int h = rng_int(rng, 120, 190);
    BoundingBox box;
    if (!place(w, h + 14, 24, &box)) return;
    box.y1 = box.y0 + h;

    const std::uint8_t axis_gray = static_cast<std::uint8_t>(rng_int(rng, 20, 60));
    fill_rect({box.x0, box.y0, box.x0 + 2, box.y1}, axis_gray, axis_gray, axis_gray);
    fill_rect({box.x0, box.y1 - 2, box.x1, box.y1}, axis_gray, axis_gray, axis_gray);
    add_graphic(box);

    const int n = rng_int(rng, 8, 14);
    std::vector<std::pair<int, int>> pts;
    for (int i = 0; i < n; ++i) {
        const int px = box.x0 + 8 + i * (w - 16) / n;
        const int py = rng_int(rng, box.y0 + 6, box.y1 - 9);
        pts.emplace_back(px, py);
    }
    const std::uint8_t line_gray = static_cast<std::uint8_t>(rng_int(rng, 20, 90));
    BoundingBox poly{pts[0].first, pts[0].second, pts[0].first + 2, pts[0].second + 2};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double len = std::max(std::abs(pts[i + 1].first - pts[i].first),
                                    std::abs(pts[i + 1].second - pts[i].second)) +
                           1.0;
        for (double t = 0; t <= 1.0; t += 0.5 / len) {
            const int x = static_cast<int>(std::lround(pts[i].first +
                                                       t * (pts[i + 1].first - pts[i].first)));
            const int y = static_cast<int>(std::lround(pts[i].second +
                                                       t * (pts[i + 1].second - pts[i].second)));
            fill_rect({x, y, x + 2, y + 2}, line_gray, line_gray, line_gray);
            poly = box_union(poly, {x, y, x + 2, y + 2});
        }
    }
    add_graphic(poly);

    if (rng_chance(rng, 0.6)) {
        const std::string tick = rng_chance(rng, 0.5) ? "0" : "24";
        const BoundingBox bbox =
            font::draw_text(img, box.x0 + 6, box.y1 + 3, tick, kTickScale, kInk, kInk, kInk);
        add_text(bbox, tick);
    }
}

void FigureBuilder::render_photo() {
    const int w = rng_int(rng, 100, 210);
    const int h = rng_int(rng, 90, 180);
    BoundingBox box;
    if (!place(w, h, 24, &box)) return;
    for (int y = box.y0; y < box.y1; ++y) {
        for (int x = box.x0; x < box.x1; ++x) {
            const std::uint8_t v = static_cast<std::uint8_t>(rng_int(rng, 25, 235));
            img.set(x, y, v, v, v);
        }
    }
    add_graphic(box);
}

void FigureBuilder::render_icons() {
    const int n = rng_int(rng, 2, 5);
    const int s = rng_int(rng, 22, 40);
    const int spacing = rng_int(rng, 12, 20);
    BoundingBox strip;
    if (!place(n * s + (n - 1) * spacing, s, 24, &strip)) return;
    for (int i = 0; i < n; ++i) {
        const int x0 = strip.x0 + i * (s + spacing);
        const BoundingBox icon{x0, strip.y0, x0 + s, strip.y0 + s};
        fill_rect(icon, static_cast<std::uint8_t>(rng_int(rng, 20, 150)),
                  static_cast<std::uint8_t>(rng_int(rng, 20, 150)),
                  static_cast<std::uint8_t>(rng_int(rng, 20, 150)));
        add_graphic(icon);
    }
}

void FigureBuilder::render_caption() {
    const int n_words = rng_int(rng, 2, 4);
    std::string phrase;
    for (int i = 0; i < n_words; ++i) {
        if (i) phrase += " ";
        phrase += pick(spec.other_words);
    }
    const int width = font::text_width(phrase, kTextScale);
    BoundingBox box;
    if (!place(width, font::text_height(kTextScale), 16, &box)) return;
    const BoundingBox bbox = font::draw_text(img, box.x0, box.y0, phrase, kTextScale, kInk, kInk, kInk);
    add_text(bbox, phrase);
}

std::string figure_id_for(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "fig%05d", index);
    return buf;
}

} // namespace

SynthFigure generate_figure(const SynthSpec& spec_in, int index) {
    SynthSpec spec = spec_in;
    if (spec.gene_symbols.empty()) spec.gene_symbols = default_gene_symbols();
    if (spec.other_words.empty()) spec.other_words = default_other_words();
    spec.validate();

    const std::uint64_t stream_seed =
        splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
    std::mt19937_64 size_rng(stream_seed);
    const int w = rng_int(size_rng, spec.min_width, spec.max_width);
    const int h = rng_int(size_rng, spec.min_height, spec.max_height);

    FigureBuilder builder(spec, splitmix64(stream_seed), w, h);
    builder.segments.reserve(64);

    int n_panels = 0;
    if (rng_chance(builder.rng, spec.panel_probability)) ++n_panels;
    if (rng_chance(builder.rng, spec.second_panel_probability)) ++n_panels;

    for (int p = 0; p < n_panels; ++p) {
        int rows = rng_int(builder.rng, spec.min_rows, spec.max_rows);
        int lanes = rng_int(builder.rng, spec.min_lanes, spec.max_lanes);
        bool placed = false;
        while (!placed) {
            builder.render_panel(rows, lanes, &placed);
            if (placed) break;
            // Shrink toward the minimal panel before giving up.
            if (lanes > spec.min_lanes) {
                --lanes;
            } else if (rows > spec.min_rows) {
                --rows;
            } else {
                break;
            }
        }
        if (!placed && p == 0) {
            throw ValidationError("figure " + figure_id_for(index) +
                                  " is too small for the requested panel layout");
        }
    }

    const int n_distractors = rng_int(builder.rng, 3, 5);
    for (int d = 0; d < n_distractors; ++d) {
        const double u = rng_unit(builder.rng);
        if (u < 0.35) {
            builder.render_bar_chart();
        } else if (u < 0.55) {
            builder.render_line_graph();
        } else if (u < 0.75) {
            builder.render_photo();
        } else {
            builder.render_icons();
        }
    }
    if (rng_chance(builder.rng, 0.5)) builder.render_caption();

    builder.apply_ocr_noise();

    SynthFigure result;
    result.figure.id = figure_id_for(index);
    result.figure.image = std::move(builder.img);
    result.figure.segments = std::move(builder.segments);
    result.figure.ground_truth = std::move(builder.gt);
    result.sidecar_json = sidecar_to_json(result.figure.segments, result.figure.ground_truth);
    result.blob_count = builder.blob_count;
    result.blob_centers = std::move(builder.blob_centers);
    return result;
}

SynthManifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir,
                              int workers) {
    spec.validate();
    std::filesystem::create_directories(out_dir);

    SynthManifest manifest;
    manifest.n_figures = spec.n_figures;
    manifest.first_index = spec.first_index;
    manifest.seed = spec.seed;
    manifest.figures.resize(static_cast<std::size_t>(spec.n_figures));

    std::vector<std::filesystem::path> written(static_cast<std::size_t>(spec.n_figures) * 2);
    try {
        parallel_for(static_cast<std::size_t>(spec.n_figures), workers, [&](std::size_t i) {
            const int index = spec.first_index + static_cast<int>(i);
            const SynthFigure synth = generate_figure(spec, index);

            const std::filesystem::path image_path = out_dir / (synth.figure.id + ".png");
            const std::filesystem::path sidecar_path =
                out_dir / (synth.figure.id + ".sidecar.json");
            save_png(image_path, synth.figure.image);
            written[2 * i] = image_path;
            atomic_write_file(sidecar_path, synth.sidecar_json);
            written[2 * i + 1] = sidecar_path;

            SynthFigureSummary& s = manifest.figures[i];
            s.id = synth.figure.id;
            s.width = synth.figure.image.width;
            s.height = synth.figure.image.height;
            s.segments = static_cast<int>(synth.figure.segments.size());
            for (const Segment& seg : synth.figure.segments) {
                (seg.kind == SegmentKind::Graphic ? s.graphic_segments : s.text_segments) += 1;
            }
            const GroundTruth& gt = *synth.figure.ground_truth;
            s.gel_segments = static_cast<int>(gt.gel_segment_ids.size());
            s.panels = static_cast<int>(gt.panels.size());
            s.gene_tokens = static_cast<int>(gt.gene_tokens.size());
            s.blobs = synth.blob_count;
        });
    } catch (...) {
        std::error_code ec;
        for (const std::filesystem::path& p : written) {
            if (!p.empty()) std::filesystem::remove(p, ec);
        }
        throw;
    }

    for (const SynthFigureSummary& s : manifest.figures) {
        manifest.total_segments += s.segments;
        manifest.total_gel_segments += s.gel_segments;
        manifest.total_panels += s.panels;
        manifest.total_gene_tokens += s.gene_tokens;
    }
    manifest.gel_segment_ratio =
        manifest.total_segments > 0
            ? static_cast<double>(manifest.total_gel_segments) / manifest.total_segments
            : 0.0;

    atomic_write_file(out_dir / "manifest.json", manifest_to_json(manifest));
    return manifest;
}

std::string manifest_to_json(const SynthManifest& manifest) {
    json root;
    root["version"] = 1;
    root["n_figures"] = manifest.n_figures;
    root["first_index"] = manifest.first_index;
    root["seed"] = manifest.seed;
    json figures = json::array();
    for (const SynthFigureSummary& s : manifest.figures) {
        figures.push_back({{"id", s.id},
                           {"width", s.width},
                           {"height", s.height},
                           {"segments", s.segments},
                           {"graphic_segments", s.graphic_segments},
                           {"text_segments", s.text_segments},
                           {"gel_segments", s.gel_segments},
                           {"panels", s.panels},
                           {"gene_tokens", s.gene_tokens},
                           {"blobs", s.blobs}});
    }
    root["figures"] = std::move(figures);
    root["totals"] = {{"segments", manifest.total_segments},
                      {"gel_segments", manifest.total_gel_segments},
                      {"panels", manifest.total_panels},
                      {"gene_tokens", manifest.total_gene_tokens}};
    root["gel_segment_ratio"] = manifest.gel_segment_ratio;
    return root.dump(2) + "\n";
}

} // namespace gelmine
