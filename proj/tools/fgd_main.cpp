// fgd: unsupervised foreground discovery and teacher->student distillation CLI.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "fgd/config.hpp"
#include "fgd/ensemble.hpp"
#include "fgd/masksel.hpp"
#include "fgd/metrics.hpp"
#include "fgd/nn.hpp"
#include "fgd/pipeline.hpp"
#include "fgd/png_io.hpp"
#include "fgd/postproc.hpp"
#include "fgd/student.hpp"
#include "fgd/synthetic.hpp"
#include "fgd/videopca.hpp"

namespace fs = std::filesystem;
using namespace fgd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

Config load_config(const std::string& path) {
    return path.empty() ? Config() : Config::from_file(path);
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

void write_file(const fs::path& p, const std::string& text) {
    if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

std::vector<std::string> csv_rows(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::vector<std::string> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(line);
    return rows;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

videopca::VideoPCAConfig vpca_from(const Config& cfg) {
    videopca::VideoPCAConfig v;
    v.k = cfg.get_int("videopca.k", v.k);
    v.work_width = cfg.get_int("videopca.work_width", v.work_width);
    v.work_height = cfg.get_int("videopca.work_height", v.work_height);
    v.blur_sigma = cfg.get_double("videopca.blur_sigma", v.blur_sigma);
    v.error_threshold = cfg.get_double("videopca.error_threshold", v.error_threshold);
    v.center_sigma = cfg.get_double("videopca.center_sigma", v.center_sigma);
    v.bins_per_channel = cfg.get_int("videopca.bins_per_channel", v.bins_per_channel);
    v.use_grayscale = cfg.get_bool("videopca.use_grayscale", v.use_grayscale);
    v.use_center_prior = cfg.get_bool("videopca.use_center_prior", v.use_center_prior);
    return v;
}

int cmd_synth(const std::string& config_path, const std::string& out, std::uint64_t seed) {
    Config cfg = load_config(config_path);
    pipeline::SyntheticSpec spec;
    spec.shot_count = cfg.get_int("synth.shots", spec.shot_count);
    spec.frames_per_shot = cfg.get_int("synth.frames", spec.frames_per_shot);
    spec.frame_width = cfg.get_int("synth.width", spec.frame_width);
    spec.frame_height = cfg.get_int("synth.height", spec.frame_height);
    spec.object_min_size = cfg.get_int("synth.object_min", spec.object_min_size);
    spec.object_max_size = cfg.get_int("synth.object_max", spec.object_max_size);
    spec.max_speed = cfg.get_int("synth.max_speed", spec.max_speed);
    spec.seed = cfg.get_u64("synth.seed", seed);
    pipeline::generate_synthetic(spec, out);
    std::cout << "wrote " << spec.shot_count << " shots to " << out << "\n";
    return kExitOk;
}

int cmd_discover(const std::string& shot_dir, const std::string& config_path,
                 const std::string& out) {
    Config cfg = load_config(config_path);
    VideoShot shot = load_shot(shot_dir);
    auto result = videopca::discover(shot, vpca_from(cfg));

    auto pngs = list_pngs(shot_dir);
    std::string scores = "frame_id,mean_nonzero_score\n";
    for (std::size_t i = 0; i < result.masks.size(); ++i) {
        std::string stem = pngs[i].stem().string();
        write_png(fs::path(out) / (stem + ".png"), result.masks[i]);
        scores += stem + ',' + fmt("%.17g", masksel::mean_nonzero_score(result.masks[i])) + '\n';
    }
    write_file(fs::path(out) / "scores.csv", scores);
    for (int fi : result.fallback_frames)
        std::cerr << "degenerate color model on frame " << fi << ", used error mask\n";
    return kExitOk;
}

int cmd_select(const std::string& frames_dir, const std::string& masks_dir,
               const std::string& scores_csv, const std::string& evaluator_path,
               double keep, double tau, const std::string& out) {
    auto frame_pngs = list_pngs(frames_dir);
    std::string manifest = "frame_path,mask_path,score,producer\n";

    if (!scores_csv.empty()) {
        std::vector<ScoredMask> scored;
        std::map<std::string, fs::path> frame_by_stem;
        for (const auto& p : frame_pngs) frame_by_stem[p.stem().string()] = p;
        for (const auto& row : csv_rows(scores_csv)) {
            auto f = split(row, ',');
            if (f.size() != 2) throw std::runtime_error("bad scores row: " + row);
            scored.emplace_back(read_mask_png(fs::path(masks_dir) / (f[0] + ".png")),
                                std::stod(f[1]), "teacher", f[0]);
        }
        for (const auto& s : masksel::percentile_select(scored, keep)) {
            auto it = frame_by_stem.find(s.frame_id);
            if (it == frame_by_stem.end())
                throw std::runtime_error("no frame for mask " + s.frame_id);
            manifest += it->second.string() + ',' +
                        (fs::path(masks_dir) / (s.frame_id + ".png")).string() + ',' +
                        fmt("%.17g", s.score) + ",teacher\n";
        }
    } else {
        auto evaluator = masksel::Evaluator::load(evaluator_path);
        std::vector<Frame> frames;
        std::vector<std::vector<SoftMask>> masks;
        std::vector<fs::path> mask_paths;
        for (const auto& p : frame_pngs) {
            fs::path mp = fs::path(masks_dir) / (p.stem().string() + ".png");
            if (!fs::exists(mp)) continue;
            frames.push_back(read_frame_png(p));
            masks.push_back({read_mask_png(mp)});
            mask_paths.push_back(p);
        }
        for (const auto& sel : masksel::threshold_select(evaluator, frames, masks, tau)) {
            const fs::path& fp = mask_paths[sel.frame_index];
            manifest += fp.string() + ',' +
                        (fs::path(masks_dir) / (fp.stem().string() + ".png")).string() + ',' +
                        fmt("%.17g", sel.score) + ",evaluator\n";
        }
    }
    write_file(out, manifest);
    return kExitOk;
}

int cmd_train(const std::string& manifest, const std::string& arch_name,
              const std::string& config_path, std::uint64_t seed, const std::string& out,
              const std::string& trace) {
    Config cfg = load_config(config_path);
    student::TrainConfig tc;
    tc.lr = cfg.get_double("train.lr", tc.lr);
    tc.epochs = cfg.get_int("train.epochs", tc.epochs);
    tc.batch_size = cfg.get_int("train.batch", tc.batch_size);
    tc.augment = cfg.get_bool("train.augment", tc.augment);
    tc.crop_fraction = cfg.get_double("train.crop_fraction", tc.crop_fraction);
    tc.seed = seed;

    std::vector<student::TrainingPair> pairs;
    for (const auto& row : csv_rows(manifest)) {
        auto f = split(row, ',');
        if (f.size() != 4) throw std::runtime_error("bad manifest row: " + row);
        pairs.push_back({read_frame_png(f[0]), read_mask_png(f[1])});
    }
    auto result = student::train_student(student::StudentArch::from_name(arch_name), pairs, tc);
    nn::save_weights(result.net.net, out);

    std::string tr = "epoch,loss\n";
    for (std::size_t i = 0; i < result.epoch_loss.size(); ++i)
        tr += std::to_string(i + 1) + ',' + fmt("%.17g", result.epoch_loss[i]) + '\n';
    write_file(trace.empty() ? out + ".loss.csv" : trace, tr);
    std::cout << "final epoch loss " << fmt("%.6f", result.epoch_loss.back()) << "\n";
    return kExitOk;
}

student::StudentNet load_student(const std::string& weights, std::string arch_name) {
    if (arch_name.empty()) arch_name = fs::path(weights).stem().string();
    return {student::StudentArch::from_name(arch_name), nn::load_weights(weights)};
}

int cmd_predict(const std::string& weights, const std::string& arch_name,
                const std::string& frames_dir, const std::string& out) {
    auto net = load_student(weights, arch_name);
    for (const auto& p : list_pngs(frames_dir)) {
        Frame frame = read_frame_png(p);
        SoftMask mask = student::predict(net, frame);
        write_png(fs::path(out) / (p.stem().string() + ".png"),
                  resize_bilinear(mask, frame.width(), frame.height()));
    }
    return kExitOk;
}

int cmd_ensemble(const std::vector<std::string>& weights, const std::string& evaluator_path,
                 const std::string& frames_dir, double tau, const std::string& out) {
    std::vector<student::StudentNet> nets;
    for (const auto& w : weights) nets.push_back(load_student(w, ""));
    ensemble::StudentPool pool(std::move(nets));
    auto evaluator = masksel::Evaluator::load(evaluator_path);

    auto pngs = list_pngs(frames_dir);
    std::vector<Frame> frames;
    frames.reserve(pngs.size());
    for (const auto& p : pngs) frames.push_back(read_frame_png(p));

    const int grid = pool.common_grid();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::vector<SoftMask> on_grid;
        for (const auto& net : pool.members) {
            SoftMask m = student::predict(net, frames[i]);
            on_grid.push_back(m.width() == grid && m.height() == grid
                                  ? m
                                  : resize_bilinear(m, grid, grid));
        }
        write_png(fs::path(out) / "fused" / (pngs[i].stem().string() + ".png"),
                  ensemble::multi_net(on_grid));
    }

    auto entries = ensemble::generation_teacher(pool, frames, evaluator, tau);
    std::string manifest = "frame_path,mask_path,score,producer\n";
    for (const auto& e : entries) {
        const std::string name = pngs[e.frame_index].stem().string() + "__" +
                                 pool.members[e.member_index].arch.name() + ".png";
        write_png(fs::path(out) / "selected" / name, e.mask);
        manifest += pngs[e.frame_index].string() + ',' +
                    (fs::path(out) / "selected" / name).string() + ',' +
                    fmt("%.17g", e.score) + ',' + pool.members[e.member_index].arch.name() + '\n';
    }
    write_file(fs::path(out) / "manifest.csv", manifest);
    return kExitOk;
}

int cmd_boxes(const std::string& masks_dir, double threshold, double min_area,
              const std::string& out) {
    std::string text = "frame_id,x_min,y_min,x_max,y_max\n";
    for (const auto& p : list_pngs(masks_dir)) {
        SoftMask m = read_mask_png(p);
        auto box = postproc::primary_box(m, threshold, min_area, m.width(), m.height());
        if (!box) continue;
        text += p.stem().string() + ',' + std::to_string(box->x_min) + ',' +
                std::to_string(box->y_min) + ',' + std::to_string(box->x_max) + ',' +
                std::to_string(box->y_max) + '\n';
    }
    write_file(out, text);
    return kExitOk;
}

int cmd_evaluate(const std::string& pred_dir, const std::string& gt_root, double threshold,
                 double min_area, const std::string& out, const std::string& scores_csv,
                 const std::string& curve_out) {
    std::map<std::string, std::string> shot_class;
    fs::path classes = fs::path(gt_root) / "gt" / "classes.csv";
    if (fs::exists(classes))
        for (const auto& row : csv_rows(classes)) {
            auto f = split(row, ',');
            if (f.size() == 2) shot_class[f[0]] = f[1];
        }

    std::map<std::string, std::vector<metrics::EvalRecord>> by_class;
    std::map<std::string, std::array<double, 5>> sums;  // fbeta, p, j, mae, miou
    std::vector<fs::path> shot_dirs;
    for (const auto& e : fs::directory_iterator(pred_dir))
        if (e.is_directory()) shot_dirs.push_back(e.path());
    std::sort(shot_dirs.begin(), shot_dirs.end());
    if (shot_dirs.empty()) throw std::runtime_error("no shot directories under " + pred_dir);

    for (const auto& sd : shot_dirs) {
        std::string shot_id = sd.filename().string();
        std::string cls = shot_class.count(shot_id) ? shot_class[shot_id] : "all";
        auto gt_boxes = pipeline::load_gt_boxes(gt_root, shot_id);
        auto pngs = list_pngs(sd);
        for (std::size_t i = 0; i < pngs.size(); ++i) {
            SoftMask mask = read_mask_png(pngs[i]);
            std::string stem = pngs[i].stem().string();
            auto bit = gt_boxes.find(stem);
            std::vector<BoundingBox> boxes =
                bit == gt_boxes.end() ? std::vector<BoundingBox>{} : bit->second;
            auto gt_mask = pipeline::load_gt_mask(gt_root, shot_id, static_cast<int>(i));
            if (boxes.empty() && !gt_mask) continue;
            auto pbox =
                postproc::primary_box(mask, threshold, min_area, mask.width(), mask.height());
            if (gt_mask) {
                auto& s = sums[cls];
                s[0] += metrics::f_beta_max(mask, *gt_mask);
                auto pj = metrics::pj(postproc::binarize(mask, threshold), *gt_mask);
                s[1] += pj.p;
                s[2] += pj.j;
                s[3] += metrics::mae(mask, *gt_mask);
                s[4] += metrics::mean_iou(postproc::binarize(mask, 0.5), *gt_mask);
            }
            by_class[cls].emplace_back(shot_id + "/" + stem, pbox, mask, boxes, gt_mask);
        }
    }
    if (by_class.empty()) throw std::runtime_error("no evaluable frames found");

    std::string text = "class,corloc,f_beta,pj_p,pj_j,mae,mean_iou,frames\n";
    double avg[6] = {0, 0, 0, 0, 0, 0};
    for (const auto& [cls, records] : by_class) {
        double n = static_cast<double>(records.size());
        const auto& s = sums[cls];
        double vals[6] = {metrics::corloc(records), s[0] / n, s[1] / n,
                          s[2] / n,                 s[3] / n, s[4] / n};
        text += cls;
        for (double v : vals) text += ',' + fmt("%.6f", v);
        text += ',' + std::to_string(records.size()) + '\n';
        for (int k = 0; k < 6; ++k) avg[k] += vals[k];
    }
    text += "average";
    for (int k = 0; k < 6; ++k) text += ',' + fmt("%.6f", avg[k] / by_class.size());
    text += ',';
    std::size_t total = 0;
    for (const auto& [cls, records] : by_class) total += records.size();
    text += std::to_string(total) + '\n';
    write_file(out, text);
    std::cout << text;

    // Selection-purity curve: mean ground-truth IoU of the top-p% masks by
    // score, for p = 10..100, as a gnuplot-ready two-column file.
    if (!scores_csv.empty()) {
        std::map<std::string, double> score_by_id;
        for (const auto& row : csv_rows(scores_csv)) {
            auto f = split(row, ',');
            if (f.size() >= 2) score_by_id[f[0]] = std::stod(f[f.size() - 1]);
        }
        struct Item {
            double score;
            double iou;
        };
        std::vector<Item> items;
        for (const auto& [cls, records] : by_class) {
            for (const auto& r : records) {
                if (!r.gt_mask || !score_by_id.count(r.frame_id)) continue;
                items.push_back({score_by_id[r.frame_id],
                                 metrics::mean_iou(postproc::binarize(r.predicted_mask, 0.5),
                                                   *r.gt_mask)});
            }
        }
        std::sort(items.begin(), items.end(),
                  [](const Item& a, const Item& b) { return a.score > b.score; });
        std::string curve = "# percentile_kept  mean_iou\n";
        for (int p = 10; p <= 100; p += 10) {
            std::size_t n = std::max<std::size_t>(1, items.size() * p / 100);
            double acc = 0.0;
            for (std::size_t i = 0; i < n && i < items.size(); ++i) acc += items[i].iou;
            curve += std::to_string(p) + "  " + fmt("%.6f", acc / std::max<std::size_t>(n, 1)) + '\n';
        }
        write_file(curve_out.empty() ? out + ".curve.dat" : curve_out, curve);
    }
    return kExitOk;
}

int cmd_generation(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    Config cfg = load_config(config_path);
    auto result = pipeline::run_pipeline(cfg, out, seed);
    for (const auto& report : result.reports) {
        std::cout << "generation " << report.iteration << "\n";
        for (const auto& row : report.rows)
            std::cout << "  " << row.entry << " (" << row.kind << "): corloc "
                      << fmt("%.2f", row.corloc) << ", mean_iou " << fmt("%.4f", row.mean_iou)
                      << "\n";
    }
    std::cout << "artifacts under " << result.run_root.string() << "\n";

    // Generation-gain data (per-entry CorLoc across generations).
    if (result.reports.size() > 1) {
        std::string gain = "# entry";
        for (const auto& r : result.reports) gain += "  gen" + std::to_string(r.iteration);
        gain += '\n';
        for (const auto& row : result.reports.front().rows) {
            gain += row.entry;
            for (const auto& r : result.reports) {
                const auto* found = r.find(row.entry);
                gain += "  " + (found ? fmt("%.4f", found->corloc) : std::string("nan"));
            }
            gain += '\n';
        }
        write_file(result.run_root / "reports_gain.dat", gain);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unsupervised foreground discovery and distillation"};
    app.require_subcommand(1);

    std::string config_path, out, shot_dir, frames_dir, masks_dir, scores_csv, evaluator_path;
    std::string manifest, arch, trace, pred_dir, gt_root, curve_out;
    std::vector<std::string> weights;
    std::uint64_t seed = 0;
    double keep = 0.1, tau = 0.8, threshold = 0.5, min_area = 0.005;

    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--config", config_path);
    synth->add_option("--out", out)->required();
    synth->add_option("--seed", seed);

    auto* discover = app.add_subcommand("discover", "run the VideoPCA teacher on one shot");
    discover->add_option("--shot", shot_dir)->required();
    discover->add_option("--config", config_path);
    discover->add_option("--out", out)->required();

    auto* select = app.add_subcommand("select", "select training masks");
    select->add_option("--frames", frames_dir)->required();
    select->add_option("--masks", masks_dir)->required();
    select->add_option("--scores", scores_csv);
    select->add_option("--evaluator", evaluator_path);
    select->add_option("--keep", keep);
    select->add_option("--tau", tau);
    select->add_option("--out", out)->required();

    auto* train = app.add_subcommand("train", "train one student on a manifest");
    train->add_option("--manifest", manifest)->required();
    train->add_option("--arch", arch)->required();
    train->add_option("--config", config_path);
    train->add_option("--seed", seed);
    train->add_option("--out", out)->required();
    train->add_option("--trace", trace);

    auto* predict = app.add_subcommand("predict", "predict masks for a frame directory");
    predict->add_option("--weights", weights)->required()->expected(1);
    predict->add_option("--arch", arch);
    predict->add_option("--frames", frames_dir)->required();
    predict->add_option("--out", out)->required();

    auto* ens = app.add_subcommand("ensemble", "fuse student masks and emit a manifest");
    ens->add_option("--weights", weights)->required();
    ens->add_option("--evaluator", evaluator_path)->required();
    ens->add_option("--frames", frames_dir)->required();
    ens->add_option("--tau", tau);
    ens->add_option("--out", out)->required();

    auto* boxes = app.add_subcommand("boxes", "fit primary boxes for a mask directory");
    boxes->add_option("--masks", masks_dir)->required();
    boxes->add_option("--threshold", threshold);
    boxes->add_option("--min-area", min_area);
    boxes->add_option("--out", out)->required();

    auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
    evaluate->add_option("--pred", pred_dir)->required();
    evaluate->add_option("--gt", gt_root)->required();
    evaluate->add_option("--threshold", threshold);
    evaluate->add_option("--min-area", min_area);
    evaluate->add_option("--scores", scores_csv);
    evaluate->add_option("--curve-out", curve_out);
    evaluate->add_option("--out", out)->required();

    auto* generation = app.add_subcommand("generation", "run the full generational loop");
    generation->add_option("--config", config_path);
    generation->add_option("--seed", seed);
    generation->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (synth->parsed()) return cmd_synth(config_path, out, seed);
        if (discover->parsed()) return cmd_discover(shot_dir, config_path, out);
        if (select->parsed()) {
            if (scores_csv.empty() == evaluator_path.empty())
                throw ConfigError("select needs exactly one of --scores or --evaluator");
            return cmd_select(frames_dir, masks_dir, scores_csv, evaluator_path, keep, tau, out);
        }
        if (train->parsed()) return cmd_train(manifest, arch, config_path, seed, out, trace);
        if (predict->parsed()) return cmd_predict(weights[0], arch, frames_dir, out);
        if (ens->parsed()) return cmd_ensemble(weights, evaluator_path, frames_dir, tau, out);
        if (boxes->parsed()) return cmd_boxes(masks_dir, threshold, min_area, out);
        if (evaluate->parsed())
            return cmd_evaluate(pred_dir, gt_root, threshold, min_area, out, scores_csv,
                                curve_out);
        if (generation->parsed()) return cmd_generation(config_path, seed, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pipeline::StageError& e) {
        std::cerr << "stage failed: " << e.what() << "\n";
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    }
    return kExitOk;
}
