#include "gelmine/corpus.hpp"

#include "gelmine/parallel.hpp"
#include "gelmine/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>

namespace gelmine {

using nlohmann::json;

Segment Segment::graphic(int id, BoundingBox bbox) {
    Segment s;
    s.id = id;
    s.bbox = bbox;
    s.kind = SegmentKind::Graphic;
    return s;
}

Segment Segment::text_segment(int id, BoundingBox bbox, std::string text) {
    Segment s;
    s.id = id;
    s.bbox = bbox;
    s.kind = SegmentKind::Text;
    s.char_count = static_cast<int>(utf8_length(text));
    s.text = std::move(text);
    return s;
}

const Segment* Figure::find_segment(int id) const {
    for (const Segment& s : segments) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

std::vector<const Segment*> Figure::text_segments() const {
    std::vector<const Segment*> out;
    for (const Segment& s : segments) {
        if (s.kind == SegmentKind::Text) out.push_back(&s);
    }
    return out;
}

std::vector<const Segment*> Figure::graphic_segments() const {
    std::vector<const Segment*> out;
    for (const Segment& s : segments) {
        if (s.kind == SegmentKind::Graphic) out.push_back(&s);
    }
    return out;
}

int Figure::max_segment_id() const {
    int m = -1;
    for (const Segment& s : segments) m = std::max(m, s.id);
    return m;
}

namespace {

bool has_image_extension(const std::filesystem::path& p) {
    const std::string ext = p.extension().string();
    return ext == ".png" || ext == ".ppm";
}

} // namespace

CorpusIndex load_corpus(const std::filesystem::path& root) {
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec) || ec) {
        throw IoError("corpus root is not a readable directory: " + root.string());
    }
    CorpusIndex index;
    index.root = root;
    std::map<std::string, CorpusEntry> by_id;
    for (auto it = std::filesystem::recursive_directory_iterator(root, ec);
         it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) throw IoError("cannot traverse corpus directory: " + root.string());
        if (!it->is_regular_file()) continue;
        const std::filesystem::path& p = it->path();
        if (!has_image_extension(p)) continue;
        std::filesystem::path rel = std::filesystem::relative(p, root);
        rel.replace_extension();
        const std::string id = rel.generic_string();
        if (by_id.count(id)) {
            throw ValidationError("duplicate figure id (same stem with two image formats): " + id);
        }
        CorpusEntry entry;
        entry.id = id;
        entry.image_path = p;
        const std::filesystem::path sidecar =
            p.parent_path() / (p.stem().string() + ".sidecar.json");
        if (std::filesystem::is_regular_file(sidecar)) entry.sidecar_path = sidecar;
        by_id.emplace(id, std::move(entry));
    }
    for (auto& [id, entry] : by_id) index.entries.push_back(std::move(entry));
    return index;
}

Figure load_figure(const CorpusEntry& entry) {
    Figure figure;
    figure.id = entry.id;
    figure.image = load_image(entry.image_path);
    if (!figure.image.size_valid()) {
        throw IoError("decoded image has inconsistent dimensions: " + entry.image_path.string());
    }
    if (!entry.sidecar_path.empty()) {
        attach_sidecar(figure, read_text_file(entry.sidecar_path));
    }
    return figure;
}

CorpusLoadReport load_figures(const CorpusIndex& index, int workers) {
    struct Slot {
        std::optional<Figure> figure;
        std::string error;
    };
    std::vector<Slot> slots(index.entries.size());
    parallel_for(index.entries.size(), workers, [&](std::size_t i) {
        try {
            slots[i].figure = load_figure(index.entries[i]);
        } catch (const std::exception& e) {
            slots[i].error = e.what();
        }
    });
    CorpusLoadReport report;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].figure) {
            report.figures.push_back(std::move(*slots[i].figure));
        } else {
            report.skipped.push_back({index.entries[i].id, slots[i].error});
        }
    }
    return report;
}

namespace {

BoundingBox parse_bbox(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4) {
        throw ValidationError("sidecar bbox must be [x0,y0,x1,y1] for " + where);
    }
    return BoundingBox{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

void check_ids_exist(const Figure& figure, const std::set<int>& ids, const std::string& what) {
    for (int id : ids) {
        if (!figure.find_segment(id)) {
            throw ValidationError("ground truth " + what + " references unknown segment id " +
                                  std::to_string(id) + " in figure " + figure.id);
        }
    }
}

} // namespace

void attach_sidecar(Figure& figure, const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError("sidecar for figure " + figure.id + " is not valid JSON: " + e.what());
    }

    std::set<int> seen_ids;
    for (const json& js : root.value("segments", json::array())) {
        const int id = js.at("id").get<int>();
        if (!seen_ids.insert(id).second) {
            throw ValidationError("duplicate segment id " + std::to_string(id) + " in figure " +
                                  figure.id);
        }
        const BoundingBox bbox = parse_bbox(js.at("bbox"), "segment " + std::to_string(id));
        if (!bbox.valid() || bbox.x1 > figure.image.width || bbox.y1 > figure.image.height) {
            throw ValidationError("segment " + std::to_string(id) + " in figure " + figure.id +
                                  " is out of image bounds");
        }
        const std::string kind = js.at("kind").get<std::string>();
        if (kind == "graphic") {
            figure.segments.push_back(Segment::graphic(id, bbox));
        } else if (kind == "text") {
            figure.segments.push_back(
                Segment::text_segment(id, bbox, js.value("text", std::string())));
        } else {
            throw ValidationError("segment " + std::to_string(id) + " in figure " + figure.id +
                                  " has unknown kind '" + kind + "'");
        }
    }

    if (root.contains("ground_truth")) {
        const json& jg = root.at("ground_truth");
        GroundTruth gt;
        for (const json& v : jg.value("gel_segment_ids", json::array())) {
            gt.gel_segment_ids.insert(v.get<int>());
        }
        std::set<int> all_members;
        for (const json& jp : jg.value("panels", json::array())) {
            PanelTruth panel;
            for (const json& v : jp.at("member_segment_ids")) {
                const int id = v.get<int>();
                if (!all_members.insert(id).second) {
                    throw ValidationError("ground truth panels share member segment " +
                                          std::to_string(id) + " in figure " + figure.id);
                }
                panel.member_segment_ids.insert(id);
            }
            for (const json& v : jp.value("label_segment_ids", json::array())) {
                panel.label_segment_ids.insert(v.get<int>());
            }
            gt.panels.push_back(std::move(panel));
        }
        for (const json& jt : jg.value("gene_tokens", json::array())) {
            gt.gene_tokens.push_back({jt.at("segment_id").get<int>(),
                                      jt.at("token").get<std::string>()});
        }

        check_ids_exist(figure, gt.gel_segment_ids, "gel_segment_ids");
        for (const PanelTruth& p : gt.panels) {
            check_ids_exist(figure, p.member_segment_ids, "panel members");
            check_ids_exist(figure, p.label_segment_ids, "panel labels");
        }
        std::set<int> token_ids;
        for (const GeneTokenTruth& t : gt.gene_tokens) token_ids.insert(t.segment_id);
        check_ids_exist(figure, token_ids, "gene_tokens");

        figure.ground_truth = std::move(gt);
    }
}

std::string sidecar_to_json(const std::vector<Segment>& segments,
                            const std::optional<GroundTruth>& ground_truth) {
    json root;
    json jsegs = json::array();
    for (const Segment& s : segments) {
        json js;
        js["id"] = s.id;
        js["bbox"] = {s.bbox.x0, s.bbox.y0, s.bbox.x1, s.bbox.y1};
        js["kind"] = s.kind == SegmentKind::Graphic ? "graphic" : "text";
        if (s.kind == SegmentKind::Text) js["text"] = s.text;
        jsegs.push_back(std::move(js));
    }
    root["segments"] = std::move(jsegs);
    if (ground_truth) {
        json jg;
        jg["gel_segment_ids"] = ground_truth->gel_segment_ids;
        json jpanels = json::array();
        for (const PanelTruth& p : ground_truth->panels) {
            jpanels.push_back({{"member_segment_ids", p.member_segment_ids},
                               {"label_segment_ids", p.label_segment_ids}});
        }
        jg["panels"] = std::move(jpanels);
        json jtokens = json::array();
        for (const GeneTokenTruth& t : ground_truth->gene_tokens) {
            jtokens.push_back({{"segment_id", t.segment_id}, {"token", t.token}});
        }
        jg["gene_tokens"] = std::move(jtokens);
        root["ground_truth"] = std::move(jg);
    }
    return root.dump(2) + "\n";
}

} // namespace gelmine
