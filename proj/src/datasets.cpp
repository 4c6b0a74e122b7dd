#include "docdet/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "docdet/codec.hpp"
#include "docdet/errors.hpp"

namespace fs = std::filesystem;

namespace docdet {

namespace {

bool has_image_ext(const fs::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ".png" || e == ".jpg" || e == ".jpeg";
}

int vertices_in_frame(const geom::Quad& q, int w, int h) {
    int n = 0;
    for (int i = 0; i < 4; ++i)
        if (q[i].x >= 0.0 && q[i].x <= w && q[i].y >= 0.0 && q[i].y <= h) ++n;
    return n;
}

geom::TemplateSize midv_default_template(const std::string& doctype) {
    const bool passport = doctype.find("passport") != std::string::npos &&
                          doctype.find("passportcard") == std::string::npos;
    if (passport) return {1250, 880};
    if (doctype.find("_id_old") != std::string::npos) return {1050, 740};
    return {856, 540};
}

std::map<std::string, geom::TemplateSize> read_template_overrides(const fs::path& root) {
    std::map<std::string, geom::TemplateSize> out;
    std::ifstream f(root / "template_sizes.txt");
    if (!f) return out;
    std::string name;
    int w = 0, h = 0;
    while (f >> name >> w >> h) out[name] = {w, h};
    return out;
}

geom::Quad quad_from_json(const nlohmann::json& arr) {
    if (!arr.is_array() || arr.size() != 4) throw MalformedAnnotation("quad must have 4 vertices");
    geom::Quad q;
    for (int i = 0; i < 4; ++i) {
        const auto& v = arr[static_cast<size_t>(i)];
        if (!v.is_array() || v.size() != 2) throw MalformedAnnotation("vertex must be [x, y]");
        q[i] = {v[0].get<double>(), v[1].get<double>()};
    }
    return q;
}

}  // namespace

Dataset load_midv500(const std::string& root_str) {
    const fs::path root(root_str);
    if (!fs::is_directory(root)) throw Error("not a directory: " + root_str);

    Dataset ds;
    ds.id = "midv500";
    const auto overrides = read_template_overrides(root);

    std::vector<fs::path> doc_dirs;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory() && fs::is_directory(e.path() / "images")) doc_dirs.push_back(e.path());
    std::sort(doc_dirs.begin(), doc_dirs.end());

    for (const fs::path& doc_dir : doc_dirs) {
        const std::string doctype = doc_dir.filename().string();
        const auto ov = overrides.find(doctype);
        const geom::TemplateSize tmpl =
            ov != overrides.end() ? ov->second : midv_default_template(doctype);

        std::vector<fs::path> frames;
        for (const auto& e : fs::recursive_directory_iterator(doc_dir / "images"))
            if (e.is_regular_file() && has_image_ext(e.path())) frames.push_back(e.path());
        std::sort(frames.begin(), frames.end());

        for (const fs::path& frame : frames) {
            const fs::path clip = frame.parent_path().filename();
            const fs::path ann_path =
                doc_dir / "ground_truth" / clip / (frame.stem().string() + ".json");
            const std::string id = doctype + "/" + clip.string() + "/" + frame.stem().string();
            try {
                std::ifstream jf(ann_path);
                if (!jf) throw MissingAnnotation("no annotation for " + id);
                nlohmann::json j;
                try {
                    jf >> j;
                } catch (const nlohmann::json::exception& e) {
                    throw MalformedAnnotation(std::string("bad json: ") + e.what());
                }
                if (!j.contains("quad")) throw MalformedAnnotation("missing quad field");

                DatasetItem item;
                item.id = id;
                item.path = frame.string();
                item.ann.frame_id = id;
                item.ann.quad = quad_from_json(j["quad"]);
                item.ann.tmpl = tmpl;
                const ImageDims dims = peek_image_size(read_file_bytes(frame.string()));
                item.ann.frame_width = dims.width;
                item.ann.frame_height = dims.height;

                const int verts =
                    vertices_in_frame(item.ann.quad, dims.width, dims.height);
                item.subsets = {"all"};
                if (verts >= 3) item.subsets.push_back("3in");
                if (verts == 4) item.subsets.push_back("4in");
                ds.items.push_back(std::move(item));
            } catch (const Error& e) {
                ds.warnings.push_back(id + ": " + e.what());
            }
        }
    }
    return ds;
}

namespace {

// Minimal parser for the challenge ground-truth XML: <frame index="N">
// elements containing four named <point .../> corners.
std::map<int, geom::Quad> parse_smartdoc_xml(const std::string& text) {
    std::map<int, geom::Quad> out;
    size_t pos = 0;
    auto attr = [](const std::string& tag, const std::string& name) -> std::string {
        const std::string needle = name + "=\"";
        const size_t a = tag.find(needle);
        if (a == std::string::npos) throw MalformedAnnotation("missing attribute " + name);
        const size_t b = tag.find('"', a + needle.size());
        if (b == std::string::npos) throw MalformedAnnotation("unterminated attribute " + name);
        return tag.substr(a + needle.size(), b - a - needle.size());
    };
    while ((pos = text.find("<frame", pos)) != std::string::npos) {
        const size_t open_end = text.find('>', pos);
        if (open_end == std::string::npos) throw MalformedAnnotation("unterminated frame tag");
        const std::string open_tag = text.substr(pos, open_end - pos);
        const size_t close = text.find("</frame>", open_end);
        if (close == std::string::npos) throw MalformedAnnotation("missing </frame>");
        const std::string body = text.substr(open_end, close - open_end);
        const int index = std::stoi(attr(open_tag, "index"));

        bool rejected = false;
        if (open_tag.find("rejected=\"") != std::string::npos)
            rejected = attr(open_tag, "rejected") == "true";
        pos = close + 8;
        if (rejected) continue;

        geom::Quad q;
        bool seen[4] = {false, false, false, false};
        size_t p = 0, found = 0;
        while ((p = body.find("<point", p)) != std::string::npos) {
            const size_t e = body.find('>', p);
            if (e == std::string::npos) throw MalformedAnnotation("unterminated point tag");
            const std::string tag = body.substr(p, e - p);
            const std::string name = attr(tag, "n");
            const double x = std::stod(attr(tag, "x"));
            const double y = std::stod(attr(tag, "y"));
            int corner = -1;
            if (name == "tl") corner = 0;
            else if (name == "tr") corner = 1;
            else if (name == "br") corner = 2;
            else if (name == "bl") corner = 3;
            if (corner < 0) throw MalformedAnnotation("unknown corner name " + name);
            q[corner] = {x, y};
            seen[corner] = true;
            ++found;
            p = e;
        }
        if (found != 4 || !(seen[0] && seen[1] && seen[2] && seen[3]))
            throw MalformedAnnotation("frame needs exactly corners tl,tr,br,bl");
        out[index] = q;
    }
    return out;
}

int trailing_number(const std::string& stem) {
    int end = static_cast<int>(stem.size());
    while (end > 0 && !std::isdigit(static_cast<unsigned char>(stem[static_cast<size_t>(end - 1)])))
        --end;
    int begin = end;
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[static_cast<size_t>(begin - 1)])))
        --begin;
    if (begin == end) return -1;
    return std::stoi(stem.substr(static_cast<size_t>(begin), static_cast<size_t>(end - begin)));
}

}  // namespace

Dataset load_smartdoc(const std::string& root_str) {
    const fs::path root(root_str);
    if (!fs::is_directory(root)) throw Error("not a directory: " + root_str);

    Dataset ds;
    ds.id = "smartdoc";
    const geom::TemplateSize a4{840, 1188};  // 210x297 mm at 4 px/mm

    std::vector<fs::path> bg_dirs;
    for (const auto& e : fs::directory_iterator(root)) {
        if (!e.is_directory()) continue;
        const std::string name = e.path().filename().string();
        if (name.rfind("background", 0) != 0) continue;
        const int idx = trailing_number(name);
        if (idx < 1 || idx > 5) {
            ds.warnings.push_back(name + ": background index outside 1..5");
            continue;
        }
        bg_dirs.push_back(e.path());
    }
    std::sort(bg_dirs.begin(), bg_dirs.end());
    if (bg_dirs.empty()) throw Error("no background directories under " + root_str);

    for (const fs::path& bg : bg_dirs) {
        const std::string bg_name = bg.filename().string();
        std::vector<fs::path> clips;
        for (const auto& e : fs::directory_iterator(bg))
            if (e.is_directory()) clips.push_back(e.path());
        std::sort(clips.begin(), clips.end());

        for (const fs::path& clip : clips) {
            const std::string clip_name = clip.filename().string();
            fs::path xml_path = bg / (clip_name + ".gt.xml");
            if (!fs::exists(xml_path)) xml_path = clip / "gt.xml";
            std::map<int, geom::Quad> gt;
            try {
                if (!fs::exists(xml_path))
                    throw MissingAnnotation("no ground-truth xml for " + clip_name);
                std::ifstream xf(xml_path);
                std::ostringstream buf;
                buf << xf.rdbuf();
                gt = parse_smartdoc_xml(buf.str());
            } catch (const Error& e) {
                ds.warnings.push_back(bg_name + "/" + clip_name + ": " + e.what());
                continue;
            }

            std::vector<fs::path> frames;
            for (const auto& e : fs::directory_iterator(clip))
                if (e.is_regular_file() && has_image_ext(e.path())) frames.push_back(e.path());
            std::sort(frames.begin(), frames.end());

            for (const fs::path& frame : frames) {
                const std::string id = bg_name + "/" + clip_name + "/" + frame.stem().string();
                try {
                    const int index = trailing_number(frame.stem().string());
                    const auto it = index >= 0 ? gt.find(index) : gt.end();
                    if (it == gt.end()) throw MissingAnnotation("no annotation for frame");

                    DatasetItem item;
                    item.id = id;
                    item.path = frame.string();
                    item.ann.frame_id = id;
                    item.ann.quad = it->second;
                    item.ann.tmpl = a4;
                    const ImageDims dims = peek_image_size(read_file_bytes(frame.string()));
                    item.ann.frame_width = dims.width;
                    item.ann.frame_height = dims.height;
                    item.subsets = {"all", bg_name};
                    ds.items.push_back(std::move(item));
                } catch (const Error& e) {
                    ds.warnings.push_back(id + ": " + e.what());
                }
            }
        }
    }
    return ds;
}

}  // namespace docdet
