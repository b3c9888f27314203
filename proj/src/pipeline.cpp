#include "fgd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "fgd/ensemble.hpp"
#include "fgd/nn.hpp"
#include "fgd/png_io.hpp"
#include "fgd/postproc.hpp"

namespace fgd::pipeline {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool stage_done(const GenerationConfig& cfg, const char* stage) {
    return fs::exists(cfg.gen_dir() / "done" / (std::string(stage) + ".done"));
}

void mark_done(const GenerationConfig& cfg, const char* stage) {
    write_text(cfg.gen_dir() / "done" / (std::string(stage) + ".done"), "done\n");
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& label) {
    return seed ^ fnv1a64(label);
}

struct MaskRow {
    std::string frame_id;  // "shot/stem"
    std::string frame_path;
    std::string mask_path;
    double score;
    std::string producer;
};

void write_mask_rows(const fs::path& p, const std::vector<MaskRow>& rows) {
    std::string text = "frame_id,frame_path,mask_path,score,producer\n";
    for (const auto& r : rows) {
        text += r.frame_id + ',' + r.frame_path + ',' + r.mask_path + ',' +
                fmt("%.17g", r.score) + ',' + r.producer + '\n';
    }
    write_text(p, text);
}

std::vector<MaskRow> read_mask_rows(const fs::path& p) {
    std::istringstream in(read_text(p));
    std::string line;
    std::getline(in, line);  // header
    std::vector<MaskRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 5) throw std::runtime_error("bad row in " + p.string());
        rows.push_back({f[0], f[1], f[2], std::stod(f[3]), f[4]});
    }
    return rows;
}

struct FrameRef {
    std::string shot_id;
    std::string stem;
    fs::path path;
    int index_in_shot;
    const ShotEntry* shot;
};

std::vector<FrameRef> list_frames(const std::vector<ShotEntry>& shots, bool holdout) {
    std::vector<FrameRef> out;
    for (const auto& s : shots) {
        if (s.holdout != holdout) continue;
        auto pngs = list_pngs(s.dir);
        for (std::size_t i = 0; i < pngs.size(); ++i)
            out.push_back({s.id, pngs[i].stem().string(), pngs[i], static_cast<int>(i), &s});
    }
    return out;
}

std::vector<student::StudentNet> load_students(const GenerationConfig& cfg, int iter) {
    std::vector<student::StudentNet> nets;
    for (const auto& arch : cfg.archs) {
        fs::path p = cfg.gen_dir(iter) / "weights" / (arch.name() + ".fgdn");
        if (!fs::exists(p))
            throw PipelineStateError("missing student weights: " + p.string());
        nets.push_back({arch, nn::load_weights(p)});
    }
    return nets;
}

masksel::Evaluator load_evaluator(const GenerationConfig& cfg, int iter) {
    fs::path p = cfg.gen_dir(iter) / "weights" / "evaluator.fgdn";
    if (!fs::exists(p)) throw PipelineStateError("missing evaluator weights: " + p.string());
    return masksel::Evaluator::load(p, cfg.evaluator.input_size);
}

void write_trace(const fs::path& p, const std::vector<double>& losses) {
    std::string text = "epoch,loss\n";
    for (std::size_t i = 0; i < losses.size(); ++i)
        text += std::to_string(i + 1) + ',' + fmt("%.17g", losses[i]) + '\n';
    write_text(p, text);
}

// ---- stage: teacher --------------------------------------------------------

void stage_teacher(const GenerationConfig& cfg, const std::vector<ShotEntry>& shots) {
    std::vector<MaskRow> rows;
    fs::path masks_dir = cfg.gen_dir() / "masks";
    std::string log;

    if (cfg.iteration == 1) {
        for (const auto& s : shots) {
            if (s.holdout) continue;
            VideoShot shot = load_shot(s.dir);
            videopca::DiscoverResult res = videopca::discover(shot, cfg.vpca);
            auto pngs = list_pngs(s.dir);
            for (std::size_t i = 0; i < res.masks.size(); ++i) {
                std::string stem = pngs[i].stem().string();
                fs::path mp = masks_dir / s.id / (stem + ".png");
                write_png(mp, res.masks[i]);
                rows.push_back({s.id + "/" + stem, pngs[i].string(), mp.string(),
                                masksel::mean_nonzero_score(res.masks[i]), "videopca"});
            }
            for (int fi : res.fallback_frames)
                log += "degenerate color model, fell back to error mask: " + s.id + "/" +
                       std::to_string(fi) + "\n";
        }
    } else {
        auto pool = load_students(cfg, cfg.iteration - 1);
        auto prior_eval = load_evaluator(cfg, cfg.iteration - 1);
        for (const auto& s : shots) {
            if (s.holdout) continue;
            auto pngs = list_pngs(s.dir);
            for (const auto& png : pngs) {
                Frame frame = read_frame_png(png);
                std::string stem = png.stem().string();
                for (const auto& net : pool) {
                    SoftMask mask = student::predict(net, frame);
                    SoftMask full = resize_bilinear(mask, frame.width(), frame.height());
                    double score = prior_eval.score(frame, mask);
                    fs::path mp = masks_dir / s.id / (stem + "__" + net.arch.name() + ".png");
                    write_png(mp, full);
                    rows.push_back({s.id + "/" + stem, png.string(), mp.string(), score,
                                    net.arch.name()});
                }
            }
        }
    }
    write_mask_rows(cfg.gen_dir() / "masks" / "masks.csv", rows);
    if (!log.empty()) write_text(cfg.gen_dir() / "masks" / "teacher_log.txt", log);
}

// ---- stage: select ---------------------------------------------------------

void stage_select(const GenerationConfig& cfg) {
    auto rows = read_mask_rows(cfg.gen_dir() / "masks" / "masks.csv");
    std::vector<MaskRow> selected;

    if (cfg.selection.kind == masksel::SelectionPolicy::Kind::percentile) {
        std::vector<ScoredMask> scored;
        scored.reserve(rows.size());
        for (const auto& r : rows)
            scored.emplace_back(read_mask_png(r.mask_path), r.score, r.producer, r.frame_id);
        auto kept = masksel::percentile_select(scored, cfg.selection.percentile_keep);
        for (const auto& k : kept) {
            auto it = std::find_if(rows.begin(), rows.end(), [&](const MaskRow& r) {
                return r.frame_id == k.frame_id && r.producer == k.source;
            });
            selected.push_back(*it);
        }
    } else {
        for (const auto& r : rows)
            if (r.score >= cfg.selection.tau) selected.push_back(r);
        std::sort(selected.begin(), selected.end(), [](const MaskRow& a, const MaskRow& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
            return a.producer < b.producer;
        });
    }

    std::string text = "frame_path,mask_path,score,producer\n";
    for (const auto& r : selected)
        text += r.frame_path + ',' + r.mask_path + ',' + fmt("%.17g", r.score) + ',' +
                r.producer + '\n';
    write_text(cfg.gen_dir() / "manifests" / "train_manifest.csv", text);
}

// ---- stage: train ----------------------------------------------------------

std::vector<student::TrainingPair> load_manifest_pairs(const GenerationConfig& cfg) {
    std::istringstream in(read_text(cfg.gen_dir() / "manifests" / "train_manifest.csv"));
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<std::string, std::string>> paths;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 4) throw std::runtime_error("bad manifest row");
        paths.emplace_back(f[0], f[1]);
    }
    if (cfg.max_train_pairs > 0 && static_cast<int>(paths.size()) > cfg.max_train_pairs)
        paths.resize(cfg.max_train_pairs);  // manifest is already best-first
    std::vector<student::TrainingPair> pairs;
    pairs.reserve(paths.size());
    for (const auto& [fp, mp] : paths)
        pairs.push_back({read_frame_png(fp), read_mask_png(mp)});
    return pairs;
}

void stage_train(const GenerationConfig& cfg) {
    auto pairs = load_manifest_pairs(cfg);
    if (pairs.empty()) throw std::runtime_error("selection produced no training pairs");
    for (const auto& arch : cfg.archs) {
        student::TrainConfig tc = cfg.train;
        tc.seed = mix_seed(cfg.seed, "train/gen" + std::to_string(cfg.iteration));
        auto result = student::train_student(arch, pairs, tc);
        nn::save_weights(result.net.net, cfg.gen_dir() / "weights" / (arch.name() + ".fgdn"));
        write_trace(cfg.gen_dir() / "traces" / (arch.name() + "_loss.csv"), result.epoch_loss);
    }
}

// ---- stage: evaluator ------------------------------------------------------

void stage_evaluator(const GenerationConfig& cfg, const std::vector<ShotEntry>& shots) {
    auto students = load_students(cfg, cfg.iteration);
    ensemble::StudentPool pool(students);
    const int grid = pool.common_grid();

    auto train_frames = list_frames(shots, /*holdout=*/false);
    std::size_t want = train_frames.size();
    if (cfg.max_eval_pairs > 0) {
        want = (cfg.max_eval_pairs + cfg.archs.size() - 1) / cfg.archs.size();
        want = std::min(want, train_frames.size());
    }
    std::size_t stride = std::max<std::size_t>(1, train_frames.size() / std::max<std::size_t>(want, 1));

    std::vector<Frame> frames;
    std::vector<std::vector<SoftMask>> candidates;
    std::vector<std::optional<SoftMask>> products;
    for (std::size_t i = 0; i < train_frames.size() && frames.size() < want; i += stride) {
        Frame frame = read_frame_png(train_frames[i].path);
        std::vector<SoftMask> cands;
        std::vector<SoftMask> on_grid;
        for (const auto& net : pool.members) {
            SoftMask m = student::predict(net, frame);
            on_grid.push_back(m.width() == grid && m.height() == grid
                                  ? m
                                  : resize_bilinear(m, grid, grid));
            cands.push_back(std::move(m));
        }
        products.emplace_back(ensemble::multi_net(on_grid));
        candidates.push_back(std::move(cands));
        frames.push_back(std::move(frame));
    }

    auto pairs = masksel::make_eval_pairs(frames, candidates, products);
    masksel::EvaluatorConfig ec = cfg.evaluator;
    ec.seed = mix_seed(cfg.seed, "evaluator/gen" + std::to_string(cfg.iteration));
    auto result = masksel::train_evaluator(pairs, ec);
    result.evaluator.save(cfg.gen_dir() / "weights" / "evaluator.fgdn");
    write_trace(cfg.gen_dir() / "traces" / "evaluator_loss.csv", result.epoch_loss);
}

// ---- stage: report ---------------------------------------------------------

struct EntryAccum {
    std::string entry;
    std::string kind;
    std::vector<metrics::EvalRecord> records;
    double miou_sum = 0.0, fbeta_sum = 0.0, mae_sum = 0.0;
};

void accumulate(EntryAccum& acc, const std::string& frame_id, const SoftMask& mask,
                const Frame& frame, const std::vector<BoundingBox>& gt_boxes,
                const std::optional<BinaryMask>& gt_mask, const GenerationConfig& cfg) {
    auto box = postproc::primary_box(mask, cfg.box_threshold, cfg.min_area_fraction,
                                     frame.width(), frame.height());
    SoftMask full = (mask.width() == frame.width() && mask.height() == frame.height())
                        ? mask
                        : resize_bilinear(mask, frame.width(), frame.height());
    if (gt_mask.has_value()) {
        acc.miou_sum += metrics::mean_iou(postproc::binarize(full, 0.5), *gt_mask);
        acc.fbeta_sum += metrics::f_beta_max(full, *gt_mask);
        acc.mae_sum += metrics::mae(full, *gt_mask);
    }
    acc.records.emplace_back(frame_id, box, full, gt_boxes, gt_mask);
}

void stage_report(const GenerationConfig& cfg, const std::vector<ShotEntry>& shots) {
    auto students = load_students(cfg, cfg.iteration);
    ensemble::StudentPool pool(students);
    const int grid = pool.common_grid();
    auto evaluator = load_evaluator(cfg, cfg.iteration);

    std::optional<std::vector<student::StudentNet>> prior_pool;
    std::optional<masksel::Evaluator> prior_eval;
    if (cfg.iteration > 1) {
        prior_pool = load_students(cfg, cfg.iteration - 1);
        prior_eval = load_evaluator(cfg, cfg.iteration - 1);
    }

    std::vector<EntryAccum> accs;
    accs.push_back({"teacher", "teacher", {}, 0, 0, 0});
    for (const auto& arch : cfg.archs) accs.push_back({arch.name(), "student", {}, 0, 0, 0});
    accs.push_back({"multi_net", "ensemble", {}, 0, 0, 0});
    accs.push_back({"multiselect", "ensemble", {}, 0, 0, 0});

    int n_frames = 0;
    for (const auto& s : shots) {
        if (!s.holdout) continue;
        auto gt_boxes_by_stem = load_gt_boxes(s.root, s.id);
        auto pngs = list_pngs(s.dir);

        // Teacher masks for the whole shot come from VideoPCA at the first
        // generation and from the prior student pool afterwards.
        std::vector<SoftMask> teacher_masks;
        if (cfg.iteration == 1) {
            VideoShot shot = load_shot(s.dir);
            teacher_masks = videopca::discover(shot, cfg.vpca).masks;
        }

        for (std::size_t i = 0; i < pngs.size(); ++i) {
            Frame frame = read_frame_png(pngs[i]);
            std::string frame_id = s.id + "/" + pngs[i].stem().string();
            auto it = gt_boxes_by_stem.find(pngs[i].stem().string());
            std::vector<BoundingBox> gt_boxes =
                it == gt_boxes_by_stem.end() ? std::vector<BoundingBox>{} : it->second;
            auto gt_mask = load_gt_mask(s.root, s.id, static_cast<int>(i));
            if (gt_boxes.empty() && !gt_mask.has_value())
                throw std::runtime_error("no ground truth for " + frame_id);

            std::vector<SoftMask> cands;
            std::vector<SoftMask> on_grid;
            for (const auto& net : pool.members) {
                SoftMask m = student::predict(net, frame);
                on_grid.push_back(m.width() == grid && m.height() == grid
                                      ? m
                                      : resize_bilinear(m, grid, grid));
                cands.push_back(std::move(m));
            }

            SoftMask teacher_mask =
                cfg.iteration == 1
                    ? teacher_masks[i]
                    : [&] {
                          std::vector<SoftMask> prior_cands;
                          for (const auto& net : *prior_pool)
                              prior_cands.push_back(student::predict(net, frame));
                          return ensemble::multiselect_net(frame, prior_cands, *prior_eval);
                      }();

            accumulate(accs[0], frame_id, teacher_mask, frame, gt_boxes, gt_mask, cfg);
            for (std::size_t a = 0; a < cfg.archs.size(); ++a)
                accumulate(accs[1 + a], frame_id, cands[a], frame, gt_boxes, gt_mask, cfg);
            accumulate(accs[1 + cfg.archs.size()], frame_id, ensemble::multi_net(on_grid),
                       frame, gt_boxes, gt_mask, cfg);
            accumulate(accs[2 + cfg.archs.size()], frame_id,
                       ensemble::multiselect_net(frame, cands, evaluator), frame, gt_boxes,
                       gt_mask, cfg);
            ++n_frames;
        }
    }
    if (n_frames == 0) throw std::runtime_error("no held-out frames to report on");

    GenerationReport report;
    report.iteration = cfg.iteration;
    for (const auto& acc : accs) {
        ReportRow row;
        row.entry = acc.entry;
        row.kind = acc.kind;
        row.corloc = metrics::corloc(acc.records);
        row.mean_iou = acc.miou_sum / n_frames;
        row.f_beta = acc.fbeta_sum / n_frames;
        row.mae = acc.mae_sum / n_frames;
        row.frames = n_frames;
        report.rows.push_back(row);
    }
    write_text(cfg.gen_dir() / "reports" / "report.csv", report.to_csv());
}

}  // namespace

// ---- public API -------------------------------------------------------------

void GenerationConfig::validate() const {
    if (iteration < 1) throw std::invalid_argument("iteration must be >= 1");
    if (iteration == 1 && selection.kind != masksel::SelectionPolicy::Kind::percentile)
        throw std::invalid_argument("iteration 1 uses the percentile selection policy");
    if (archs.empty()) throw std::invalid_argument("at least one student architecture");
    if (base_roots.empty()) throw std::invalid_argument("at least one dataset root");
    if (run_root.empty()) throw std::invalid_argument("run_root must be set");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw std::invalid_argument("holdout_fraction must be in (0,1)");
    selection.validate();
    train.validate();
    vpca.validate();
}

fs::path GenerationConfig::gen_dir() const { return gen_dir(iteration); }

fs::path GenerationConfig::gen_dir(int iter) const {
    return run_root / ("gen" + std::to_string(iter));
}

const ReportRow* GenerationReport::find(const std::string& entry) const {
    for (const auto& r : rows)
        if (r.entry == entry) return &r;
    return nullptr;
}

std::string GenerationReport::to_csv() const {
    std::string text = "generation,entry,kind,corloc,mean_iou,f_beta,mae,frames\n";
    for (const auto& r : rows) {
        text += std::to_string(iteration) + ',' + r.entry + ',' + r.kind + ',' +
                fmt("%.6f", r.corloc) + ',' + fmt("%.6f", r.mean_iou) + ',' +
                fmt("%.6f", r.f_beta) + ',' + fmt("%.6f", r.mae) + ',' +
                std::to_string(r.frames) + '\n';
    }
    return text;
}

GenerationReport GenerationReport::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    GenerationReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 8) throw std::runtime_error("bad report row: " + line);
        report.iteration = std::stoi(f[0]);
        report.rows.push_back({f[1], f[2], std::stod(f[3]), std::stod(f[4]), std::stod(f[5]),
                               std::stod(f[6]), std::stoi(f[7])});
    }
    return report;
}

std::vector<ShotEntry> dataset_shots(const GenerationConfig& cfg) {
    std::vector<ShotEntry> out;
    auto add_root = [&](const fs::path& root, bool split) {
        fs::path shots_dir = root / "shots";
        if (!fs::is_directory(shots_dir))
            throw std::invalid_argument("dataset root has no shots/: " + root.string());
        std::vector<fs::path> dirs;
        for (const auto& e : fs::directory_iterator(shots_dir))
            if (e.is_directory()) dirs.push_back(e.path());
        std::sort(dirs.begin(), dirs.end());
        std::size_t n_holdout =
            split ? static_cast<std::size_t>(std::ceil(cfg.holdout_fraction * dirs.size())) : 0;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            bool holdout = split && i >= dirs.size() - n_holdout;
            out.push_back({dirs[i].filename().string(), dirs[i], root, holdout});
        }
    };
    for (const auto& r : cfg.base_roots) add_root(r, true);
    for (const auto& r : cfg.extension_roots) add_root(r, false);
    return out;
}

void run_stages(const GenerationConfig& cfg, Stage up_to) {
    cfg.validate();
    if (cfg.iteration > 1) {
        // Fail early if the previous generation is incomplete.
        try {
            load_students(cfg, cfg.iteration - 1);
            load_evaluator(cfg, cfg.iteration - 1);
        } catch (const PipelineStateError&) {
            throw;
        }
    }
    auto shots = dataset_shots(cfg);

    struct StageDef {
        Stage stage;
        const char* name;
        std::function<void()> fn;
    };
    std::vector<StageDef> defs = {
        {Stage::teacher, "teacher", [&] { stage_teacher(cfg, shots); }},
        {Stage::select, "select", [&] { stage_select(cfg); }},
        {Stage::train, "train", [&] { stage_train(cfg); }},
        {Stage::evaluator, "evaluator", [&] { stage_evaluator(cfg, shots); }},
        {Stage::report, "report", [&] { stage_report(cfg, shots); }},
    };
    for (const auto& def : defs) {
        if (!stage_done(cfg, def.name)) {
            try {
                def.fn();
            } catch (const PipelineStateError&) {
                throw;
            } catch (const std::exception& e) {
                throw StageError(def.name, e.what());
            }
            mark_done(cfg, def.name);
        }
        if (def.stage == up_to) break;
    }
}

GenerationReport run_generation(const GenerationConfig& cfg) {
    run_stages(cfg, Stage::report);
    return GenerationReport::from_csv(read_text(cfg.gen_dir() / "reports" / "report.csv"));
}

GenerationConfig extend_dataset(GenerationConfig cfg,
                                const std::vector<fs::path>& new_roots) {
    for (const auto& r : new_roots) {
        if (!fs::is_directory(r / "shots"))
            throw std::invalid_argument("dataset root missing or has no shots/: " + r.string());
        cfg.extension_roots.push_back(r);
    }
    return cfg;
}

std::map<std::string, std::vector<BoundingBox>> load_gt_boxes(const fs::path& root,
                                                              const std::string& shot_id) {
    fs::path p = root / "gt" / shot_id / "boxes.csv";
    std::map<std::string, std::vector<BoundingBox>> out;
    if (!fs::exists(p)) return out;
    std::istringstream in(read_text(p));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 5) throw std::runtime_error("bad boxes row in " + p.string());
        out[f[0]].push_back(
            BoundingBox(std::stoi(f[1]), std::stoi(f[2]), std::stoi(f[3]), std::stoi(f[4])));
    }
    return out;
}

std::optional<BinaryMask> load_gt_mask(const fs::path& root, const std::string& shot_id,
                                       int frame_index) {
    fs::path dir = root / "gt" / shot_id;
    if (!fs::is_directory(dir)) return std::nullopt;
    auto pngs = list_pngs(dir);
    if (frame_index < 0 || frame_index >= static_cast<int>(pngs.size())) return std::nullopt;
    SoftMask m = read_mask_png(pngs[frame_index]);
    return postproc::binarize(m, 0.5);
}

GenerationConfig generation_config_from(const Config& cfg, std::uint64_t seed) {
    GenerationConfig g;
    g.seed = seed;
    g.iteration = 1;
    g.selection.kind = masksel::SelectionPolicy::Kind::percentile;
    g.selection.percentile_keep = cfg.get_double("select.percentile", 0.1);
    g.selection.tau = cfg.get_double("select.tau", 0.8);

    for (const auto& name :
         cfg.get_list("student.archs", {"tiny_lowres", "tiny_fconv", "tiny_unet"}))
        g.archs.push_back(student::StudentArch::from_name(name));

    g.train.lr = cfg.get_double("train.lr", 0.001);
    g.train.epochs = cfg.get_int("train.epochs", 10);
    g.train.batch_size = cfg.get_int("train.batch", 8);
    g.train.augment = cfg.get_bool("train.augment", true);
    g.train.crop_fraction = cfg.get_double("train.crop_fraction", 0.8);
    g.max_train_pairs = cfg.get_int("train.max_pairs", 256);

    g.vpca.k = cfg.get_int("videopca.k", 8);
    g.vpca.work_width = cfg.get_int("videopca.work_width", 64);
    g.vpca.work_height = cfg.get_int("videopca.work_height", 64);
    g.vpca.blur_sigma = cfg.get_double("videopca.blur_sigma", 4.0);
    g.vpca.error_threshold = cfg.get_double("videopca.error_threshold", 0.5);
    g.vpca.center_sigma = cfg.get_double("videopca.center_sigma", 0.35);
    g.vpca.bins_per_channel = cfg.get_int("videopca.bins_per_channel", 8);
    g.vpca.use_grayscale = cfg.get_bool("videopca.use_grayscale", true);
    g.vpca.use_center_prior = cfg.get_bool("videopca.use_center_prior", true);

    g.evaluator.input_size = cfg.get_int("evaluator.input_size", 32);
    g.evaluator.lr = cfg.get_double("evaluator.lr", 0.001);
    g.evaluator.epochs = cfg.get_int("evaluator.epochs", 10);
    g.evaluator.batch_size = cfg.get_int("evaluator.batch", 16);
    g.max_eval_pairs = cfg.get_int("evaluator.max_pairs", 1024);

    g.box_threshold = cfg.get_double("eval.box_threshold", 0.5);
    g.min_area_fraction = cfg.get_double("eval.min_area_fraction", 0.005);
    g.holdout_fraction = cfg.get_double("holdout.fraction", 0.2);
    return g;
}

PipelineResult run_pipeline(const Config& file_cfg, const fs::path& out_dir,
                            std::uint64_t seed) {
    Config cfg = file_cfg;
    cfg.set("run.seed", std::to_string(seed));
    const int generations = cfg.get_int("run.generations", 2);
    if (generations < 1) throw ConfigError("run.generations must be >= 1");

    // Synthesize the base corpus (and one extension corpus per later
    // generation) unless explicit dataset roots are given.
    std::vector<fs::path> base_roots;
    std::vector<std::vector<fs::path>> ext_roots_per_gen(generations + 1);
    for (const auto& r : cfg.get_list("data.roots", {})) base_roots.push_back(r);

    SyntheticSpec spec;
    spec.shot_count = cfg.get_int("synth.shots", 40);
    spec.frames_per_shot = cfg.get_int("synth.frames", 30);
    spec.frame_width = cfg.get_int("synth.width", 64);
    spec.frame_height = cfg.get_int("synth.height", 64);
    spec.object_min_size = cfg.get_int("synth.object_min", 14);
    spec.object_max_size = cfg.get_int("synth.object_max", 20);
    spec.max_speed = cfg.get_int("synth.max_speed", 1);
    spec.seed = cfg.get_u64("synth.seed", seed * 0x9E3779B97F4A7C15ULL + 1);

    if (base_roots.empty()) {
        fs::path base = out_dir / "data" / "base";
        if (!fs::exists(base / "shots")) generate_synthetic(spec, base);
        base_roots.push_back(base);
    }
    const int ext_shots = cfg.get_int("run.extension_shots", 12);
    for (int gen = 2; gen <= generations; ++gen) {
        if (ext_shots <= 0) continue;
        fs::path ext = out_dir / "data" / ("ext" + std::to_string(gen - 1));
        if (!fs::exists(ext / "shots")) {
            SyntheticSpec espec = spec;
            espec.shot_count = ext_shots;
            espec.seed = spec.seed + 7919 * gen;
            generate_synthetic(espec, ext);
        }
        ext_roots_per_gen[gen].push_back(ext);
    }

    GenerationConfig gen_cfg = generation_config_from(cfg, seed);
    gen_cfg.base_roots = base_roots;
    gen_cfg.run_root = out_dir / "runs" / cfg.hash();

    PipelineResult result;
    result.run_root = gen_cfg.run_root;
    result.data_roots = base_roots;
    for (int gen = 1; gen <= generations; ++gen) {
        if (gen > 1) {
            gen_cfg = extend_dataset(gen_cfg, ext_roots_per_gen[gen]);
            gen_cfg.iteration = gen;
            gen_cfg.selection.kind = masksel::SelectionPolicy::Kind::threshold;
            for (const auto& r : ext_roots_per_gen[gen])
                result.data_roots.push_back(r);
        }
        result.reports.push_back(run_generation(gen_cfg));
    }
    return result;
}

}  // namespace fgd::pipeline
