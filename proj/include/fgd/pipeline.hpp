#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fgd/config.hpp"
#include "fgd/image.hpp"
#include "fgd/masksel.hpp"
#include "fgd/metrics.hpp"
#include "fgd/student.hpp"
#include "fgd/synthetic.hpp"
#include "fgd/videopca.hpp"

namespace fgd::pipeline {

/// A stage failed; carries the stage name for diagnostics and exit codes.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// Required on-disk state is missing (e.g. prior-generation weights).
class PipelineStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Stage { teacher, select, train, evaluator, report };

struct GenerationConfig {
    int iteration = 1;
    masksel::SelectionPolicy selection;
    std::vector<student::StudentArch> archs;
    student::TrainConfig train;
    videopca::VideoPCAConfig vpca;
    masksel::EvaluatorConfig evaluator;

    // Base roots get the per-root holdout split; extension roots train only.
    std::vector<std::filesystem::path> base_roots;
    std::vector<std::filesystem::path> extension_roots;

    std::filesystem::path run_root;
    std::uint64_t seed = 0;
    double box_threshold = 0.5;
    double min_area_fraction = 0.005;
    int max_train_pairs = 256;   // 0 = unlimited
    int max_eval_pairs = 1024;   // 0 = unlimited
    double holdout_fraction = 0.2;

    void validate() const;
    std::filesystem::path gen_dir() const;
    std::filesystem::path gen_dir(int iter) const;
};

struct ReportRow {
    std::string entry;
    std::string kind;  // teacher | student | ensemble
    double corloc = 0.0;
    double mean_iou = 0.0;
    double f_beta = 0.0;
    double mae = 0.0;
    int frames = 0;
};

struct GenerationReport {
    int iteration = 0;
    std::vector<ReportRow> rows;

    const ReportRow* find(const std::string& entry) const;
    std::string to_csv() const;
    static GenerationReport from_csv(const std::string& text);
};

struct ShotEntry {
    std::string id;
    std::filesystem::path dir;   // directory of frame PNGs
    std::filesystem::path root;  // dataset root that owns it
    bool holdout = false;
};

/// All shots of all roots, sorted per root; last holdout_fraction of each base
/// root (by id) is held out, extension roots are train-only.
std::vector<ShotEntry> dataset_shots(const GenerationConfig& cfg);

// Runs stages up to and including `up_to`; completed stages are no-ops
// (marker files under gen_dir/done). Stage failures surface as StageError.
void run_stages(const GenerationConfig& cfg, Stage up_to);

/// Full generation (all stages) returning the parsed held-out report.
GenerationReport run_generation(const GenerationConfig& cfg);

/// New config with extra train-only dataset roots appended; nothing on disk moves.
GenerationConfig extend_dataset(GenerationConfig cfg,
                                const std::vector<std::filesystem::path>& new_roots);

// Ground-truth access (evaluation only): boxes keyed by frame stem, and the
// binarized object mask aligned with the i-th frame of the shot.
std::map<std::string, std::vector<BoundingBox>> load_gt_boxes(
    const std::filesystem::path& root, const std::string& shot_id);
std::optional<BinaryMask> load_gt_mask(const std::filesystem::path& root,
                                       const std::string& shot_id, int frame_index);

struct PipelineResult {
    std::vector<GenerationReport> reports;
    std::filesystem::path run_root;
    std::vector<std::filesystem::path> data_roots;
};

/// First-generation config assembled from a key-value file (dataset roots unset).
GenerationConfig generation_config_from(const Config& cfg, std::uint64_t seed);

// The `generation` subcommand: synthesize the corpus when configured, then run
// the configured number of generations, extending the dataset in between.
PipelineResult run_pipeline(const Config& cfg, const std::filesystem::path& out_dir,
                            std::uint64_t seed);

}  // namespace fgd::pipeline
