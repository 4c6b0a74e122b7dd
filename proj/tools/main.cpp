#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "docdet/calibration.hpp"
#include "docdet/codec.hpp"
#include "docdet/datasets.hpp"
#include "docdet/detector.hpp"
#include "docdet/errors.hpp"
#include "docdet/evaluation.hpp"
#include "docdet/synthetic.hpp"

using namespace docdet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;      // unreadable inputs, bad flags, empty datasets
constexpr int kExitDetection = 3;  // pipeline could not form a quadrilateral

struct ScoreFlags {
    std::string mode = "combined";
    std::optional<double> k;
    std::string calib_path;
    int n_top = 11;
};

void add_score_flags(CLI::App* cmd, ScoreFlags& flags) {
    cmd->add_option("--mode", flags.mode, "Ranking mode: contour or combined")
        ->check(CLI::IsMember({"contour", "combined"}));
    cmd->add_option("--k", flags.k, "Combination coefficient override");
    cmd->add_option("--calib", flags.calib_path, "Calibration file with k and n_top");
    cmd->add_option("--n-top", flags.n_top, "Alternatives re-ranked by the combined score")
        ->check(CLI::PositiveNumber);
}

DetectorConfig make_config(const ScoreFlags& flags) {
    DetectorConfig cfg;
    cfg.mode = flags.mode == "contour" ? DetectorConfig::Mode::contour
                                       : DetectorConfig::Mode::combined;
    cfg.n_top = flags.n_top;
    if (!flags.calib_path.empty()) {
        const CalibrationFile calib = load_calibration(flags.calib_path);
        cfg.k = calib.k;
        cfg.n_top = calib.n_top;
    }
    if (flags.k) cfg.k = *flags.k;  // explicit flag wins over the file
    return cfg;
}

void draw_segment(RgbImage& img, geom::Point a, geom::Point b) {
    const double len = std::max(geom::norm(b - a), 1.0);
    const int steps = static_cast<int>(len * 2.0) + 1;
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::lround(a.x + (b.x - a.x) * t - 0.5));
        const int y = static_cast<int>(std::lround(a.y + (b.y - a.y) * t - 0.5));
        for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
                const int px = x + dx, py = y + dy;
                if (px < 0 || py < 0 || px >= img.width || py >= img.height) continue;
                uint8_t* p = img.px(px, py);
                p[0] = 255;
                p[1] = 40;
                p[2] = 40;
            }
        }
    }
}

GrayImage map_to_gray(const EdgeMap& m) {
    GrayImage g;
    g.width = m.width;
    g.height = m.height;
    g.pixels.resize(m.values.size());
    float peak = 0.0f;
    for (float v : m.values) peak = std::max(peak, v);
    const float scale = peak > 0.0f ? 255.0f / peak : 0.0f;
    for (size_t i = 0; i < m.values.size(); ++i)
        g.pixels[i] = static_cast<uint8_t>(std::lround(m.values[i] * scale));
    return g;
}

GrayImage hough_to_gray(const HoughSpace& hs) {
    // Positive plane stacked above the negative one, normalized together.
    GrayImage g;
    g.width = hs.shifts;
    g.height = 2 * hs.padded;
    g.pixels.assign(static_cast<size_t>(g.width) * g.height, 0);
    double peak = 0.0;
    for (double v : hs.pos) peak = std::max(peak, v);
    for (double v : hs.neg) peak = std::max(peak, v);
    if (peak <= 0.0) return g;
    for (int t = 0; t < hs.padded; ++t)
        for (int s = 0; s < hs.shifts; ++s) {
            g.pixels[static_cast<size_t>(t) * g.width + s] =
                static_cast<uint8_t>(std::lround(255.0 * hs.pos_at(t, s) / peak));
            g.pixels[static_cast<size_t>(t + hs.padded) * g.width + s] =
                static_cast<uint8_t>(std::lround(255.0 * hs.neg_at(t, s) / peak));
        }
    return g;
}

void dump_debug(const std::string& dir, const RgbImage& image, const DetectorConfig& cfg) {
    std::filesystem::create_directories(dir);
    const WorkingImage wi = prepare_working(image);
    const DirectionalEdgeMaps raw = extract_directional_edges(wi.working_gray);
    const DirectionalEdgeMaps blurred = blur_along_gradient(raw, cfg.sigma_blur);
    save_bytes(dir + "/working_gray.png", encode_png(wi.working_gray));
    save_bytes(dir + "/edges_horizontal.png", encode_png(map_to_gray(raw.horizontal)));
    save_bytes(dir + "/edges_vertical.png", encode_png(map_to_gray(raw.vertical)));
    save_bytes(dir + "/blurred_horizontal.png", encode_png(map_to_gray(blurred.horizontal)));
    save_bytes(dir + "/blurred_vertical.png", encode_png(map_to_gray(blurred.vertical)));
    const int w = wi.working_gray.width, h = wi.working_gray.height;
    save_bytes(dir + "/hough_horizontal.png",
               encode_png(hough_to_gray(fht(blurred.horizontal, Orientation::horizontal, 0, 0, w, h))));
    const auto strips = split_vertical_strips(blurred.vertical);
    for (int i = 0; i < 3; ++i) {
        const auto& s = strips[static_cast<size_t>(i)];
        save_bytes(dir + "/hough_vertical_" + std::to_string(i) + ".png",
                   encode_png(hough_to_gray(fht(s.map, Orientation::vertical, s.offset, i, w, h))));
    }
}

std::string format_detection(const DetectionResult& res, const DetectorConfig& cfg) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    if (res.flags.failed) {
        os << "status failed\n";
        os << "reason not_enough_lines\n";
        return os.str();
    }
    os << "status ok\n";
    os << "mode " << (cfg.mode == DetectorConfig::Mode::contour ? "contour" : "combined") << "\n";
    os << "k " << cfg.k << "\n";
    os << "n_top " << cfg.n_top << "\n";
    os << "quad";
    for (int i = 0; i < 4; ++i) os << ' ' << res.best[i].x << ' ' << res.best[i].y;
    os << "\n";
    int rank = 0;
    for (const ScoredQuad& alt : res.alternatives) {
        os << "alt " << rank++ << " contour " << alt.contour << " contrast ";
        if (alt.contrast)
            os << *alt.contrast;
        else
            os << '-';
        os << " combined ";
        if (alt.combined)
            os << *alt.combined;
        else
            os << '-';
        os << " quad";
        for (int i = 0; i < 4; ++i) os << ' ' << alt.quad[i].x << ' ' << alt.quad[i].y;
        os << "\n";
    }
    os << "timing prepare_us " << res.timings.prepare_us << " edges_us " << res.timings.edges_us
       << " blur_us " << res.timings.blur_us << " hough_us " << res.timings.hough_us
       << " peaks_us " << res.timings.peaks_us << " candidates_us " << res.timings.candidates_us
       << " rerank_us " << res.timings.rerank_us << " total_us " << res.timings.total_us << "\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << text;
}

Dataset load_dataset(const std::string& kind, const std::string& root, int frames) {
    if (kind == "synthetic") {
        SyntheticOptions opt;
        if (frames > 0) {
            opt.frames = frames;
            opt.adversarial_from = frames * 3 / 4;
        }
        return make_synthetic_dataset(opt);
    }
    if (root.empty()) throw Error("--root is required for " + kind);
    if (kind == "midv500") return load_midv500(root);
    return load_smartdoc(root);
}

Dataset filter_subset(Dataset ds, const std::string& subset) {
    if (subset == "all") return ds;
    Dataset out;
    out.id = ds.id + ":" + subset;
    out.warnings = std::move(ds.warnings);
    for (DatasetItem& item : ds.items)
        if (std::find(item.subsets.begin(), item.subsets.end(), subset) != item.subsets.end())
            out.items.push_back(std::move(item));
    if (out.items.empty()) throw Error("subset '" + subset + "' matches no frames");
    return out;
}

int run_detect(const std::string& image_path, const ScoreFlags& flags, const std::string& out_path,
               const std::string& overlay_path, const std::string& debug_dir) {
    DetectorConfig cfg;
    try {
        cfg = make_config(flags);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    RgbImage image;
    try {
        image = load_image_file(image_path);
    } catch (const DecodeError& e) {
        std::cerr << "error: cannot read image: " << e.what() << "\n";
        return kExitUsage;
    }

    const DetectionResult res = detect(image, cfg);
    const std::string report = format_detection(res, cfg);
    std::cout << report;
    try {
        if (!out_path.empty()) write_text(out_path, report);
        if (!debug_dir.empty()) dump_debug(debug_dir, image, cfg);
        if (!overlay_path.empty() && !res.flags.failed) {
            RgbImage overlay = image;
            for (int i = 0; i < 4; ++i) draw_segment(overlay, res.best[i], res.best[(i + 1) % 4]);
            save_bytes(overlay_path, encode_png(overlay));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (res.flags.failed) {
        std::cerr << "error: no quadrilateral could be formed (not enough lines)\n";
        return kExitDetection;
    }
    return kExitOk;
}

int run_evaluate(const std::string& kind, const std::string& root, const std::string& subset,
                 const ScoreFlags& flags, int jobs, int frames, const std::string& report_path) {
    DetectorConfig cfg;
    Dataset ds;
    try {
        cfg = make_config(flags);
        ds = filter_subset(load_dataset(kind, root, frames), subset);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    for (const std::string& w : ds.warnings) std::cerr << "warning: " << w << "\n";

    const EvalReport report = evaluate(ds, cfg, jobs);
    const std::string text = format_report(report);
    if (!report_path.empty()) {
        try {
            write_text(report_path, text);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
        // With the per-frame records in a file, keep stdout to aggregates.
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line))
            if (line.rfind("subset ", 0) == 0) std::cout << line << "\n";
    } else {
        std::cout << text;
    }
    return kExitOk;
}

int run_calibrate(const std::string& kind, const std::string& root, const ScoreFlags& flags,
                  int jobs, int frames, const std::string& out_path) {
    DetectorConfig cfg;
    Dataset ds;
    try {
        cfg = make_config(flags);
        ds = load_dataset(kind, root, frames);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    for (const std::string& w : ds.warnings) std::cerr << "warning: " << w << "\n";
    if (ds.items.empty()) {
        std::cerr << "error: dataset is empty\n";
        return kExitUsage;
    }

    const std::vector<TrainingSample> samples = build_training_samples(ds, cfg, jobs);
    if (samples.empty()) {
        std::cerr << "error: no frame produced candidates\n";
        return kExitUsage;
    }
    const CalibrationResult result = optimize_k(samples);

    CalibrationFile file;
    file.k = result.k;
    file.n_top = cfg.n_top;
    file.count = result.count;
    file.dataset_id = ds.id;
    try {
        save_calibration(out_path, file);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::cout << "k " << result.k << "\n";
    std::cout << "count " << result.count << " of " << samples.size() << "\n";
    std::cout << "feasible " << (result.feasible ? 1 : 0) << "\n";
    std::cout << "written " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quadrilateral document detector"};
    app.require_subcommand(1);

    auto* detect_cmd = app.add_subcommand("detect", "Locate the document in one image");
    std::string image_path, out_path, overlay_path, debug_dir;
    ScoreFlags detect_flags;
    detect_cmd->add_option("--image", image_path, "PNG or JPEG input")->required();
    add_score_flags(detect_cmd, detect_flags);
    detect_cmd->add_option("--out", out_path, "Write the structured report to this file");
    detect_cmd->add_option("--overlay", overlay_path, "Write an overlay PNG of the winner");
    detect_cmd->add_option("--debug-dir", debug_dir, "Dump edge maps and Hough spaces here");

    auto* eval_cmd = app.add_subcommand("evaluate", "Run a dataset through the detector");
    std::string eval_kind, eval_root, eval_subset = "all", report_path;
    int jobs = 1, synth_frames = 0;
    ScoreFlags eval_flags;
    eval_cmd->add_option("--kind", eval_kind, "synthetic, midv500 or smartdoc")
        ->required()
        ->check(CLI::IsMember({"synthetic", "midv500", "smartdoc"}));
    eval_cmd->add_option("--root", eval_root, "Dataset root directory");
    eval_cmd->add_option("--subset", eval_subset,
                         "Frame subset (all; midv500: 3in/4in; smartdoc: background0N; "
                         "synthetic: plain/adversarial)");
    add_score_flags(eval_cmd, eval_flags);
    eval_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--frames", synth_frames, "Synthetic benchmark size override");
    eval_cmd->add_option("--report", report_path, "Write the full per-frame report here");

    auto* calib_cmd = app.add_subcommand("calibrate", "Optimize the combination coefficient");
    std::string calib_kind, calib_root, calib_out = "calibration.txt";
    int calib_jobs = 1, calib_frames = 0;
    ScoreFlags calib_flags;
    calib_cmd->add_option("--kind", calib_kind, "synthetic, midv500 or smartdoc")
        ->required()
        ->check(CLI::IsMember({"synthetic", "midv500", "smartdoc"}));
    calib_cmd->add_option("--root", calib_root, "Dataset root directory");
    add_score_flags(calib_cmd, calib_flags);
    calib_cmd->add_option("--jobs", calib_jobs, "Worker threads")->check(CLI::PositiveNumber);
    calib_cmd->add_option("--frames", calib_frames, "Synthetic benchmark size override");
    calib_cmd->add_option("--out", calib_out, "Calibration file to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (detect_cmd->parsed())
            return run_detect(image_path, detect_flags, out_path, overlay_path, debug_dir);
        if (eval_cmd->parsed())
            return run_evaluate(eval_kind, eval_root, eval_subset, eval_flags, jobs, synth_frames,
                                report_path);
        if (calib_cmd->parsed())
            return run_calibrate(calib_kind, calib_root, calib_flags, calib_jobs, calib_frames,
                                 calib_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
