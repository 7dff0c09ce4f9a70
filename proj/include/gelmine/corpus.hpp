#pragma once

#include "gelmine/geometry.hpp"
#include "gelmine/image.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gelmine {

enum class SegmentKind { Graphic, Text };

/// An axis-aligned region of a figure. Text segments carry the recognized
/// characters supplied by the sidecar file; char_count is derived from them.
struct Segment {
    int id = 0;
    BoundingBox bbox;
    SegmentKind kind = SegmentKind::Graphic;
    std::string text;
    int char_count = 0;

    static Segment graphic(int id, BoundingBox bbox);
    static Segment text_segment(int id, BoundingBox bbox, std::string text);
};

struct PanelTruth {
    std::set<int> member_segment_ids;
    std::set<int> label_segment_ids;
};

struct GeneTokenTruth {
    int segment_id = 0;
    std::string token;
};

struct GroundTruth {
    std::set<int> gel_segment_ids;
    std::vector<PanelTruth> panels;
    std::vector<GeneTokenTruth> gene_tokens;
};

struct Figure {
    std::string id;
    Image image;
    std::vector<Segment> segments;
    std::optional<GroundTruth> ground_truth;

    const Segment* find_segment(int id) const;
    std::vector<const Segment*> text_segments() const;
    std::vector<const Segment*> graphic_segments() const;
    /// Largest segment id present, or -1 with no segments.
    int max_segment_id() const;
};

struct CorpusEntry {
    std::string id;
    std::filesystem::path image_path;
    std::filesystem::path sidecar_path; // empty when the figure has no sidecar
};

struct CorpusIndex {
    std::filesystem::path root;
    std::vector<CorpusEntry> entries; // sorted by id
};

struct SkippedEntry {
    std::string id;
    std::string reason;
};

struct CorpusLoadReport {
    std::vector<Figure> figures;
    std::vector<SkippedEntry> skipped;
};

/// Indexes every .png/.ppm under root (recursively). Figure ids are the
/// relative paths without extension; a `<id>.sidecar.json` next to an image
/// is attached to its entry.
CorpusIndex load_corpus(const std::filesystem::path& root);

/// Decodes one entry, attaching and validating its sidecar when present.
Figure load_figure(const CorpusEntry& entry);

/// Decodes every entry; entries that fail end up in `skipped` with a reason.
CorpusLoadReport load_figures(const CorpusIndex& index, int workers = 1);

/// Parses sidecar JSON and attaches segments plus optional ground truth,
/// validating geometry against the figure's dimensions.
void attach_sidecar(Figure& figure, const std::string& json_text);

std::string sidecar_to_json(const std::vector<Segment>& segments,
                            const std::optional<GroundTruth>& ground_truth);

} // namespace gelmine
