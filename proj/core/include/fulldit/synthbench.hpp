#pragma once

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fulldit/geometry.hpp"
#include "fulldit/rng.hpp"
#include "fulldit/tensor.hpp"

namespace fulldit::synthbench {

// A fully labeled toy world: the depth plane paints the background, the
// camera pose places (and rolls) an identity-colored square with a white
// corner marker, and text names the color and motion. Every condition
// analytically determines pixels, so controllability is measurable without
// learned metrics.
struct ToyWorldSpec {
    size_t width = 32, height = 32, frames = 9;
    double square_side = 9.0;
    double anchor_depth = 4.0;          // world anchor P0 = (0,0,anchor_depth)
    double focal_scale = 1.0;           // fx = fy = focal_scale * width
    double marker_fraction = 0.34;      // corner marker size relative to side
    double square_depth = 0.9;          // depth value inside the square
    double max_speed_px = 2.0;          // per-frame center motion bound
    double plane_slope = 0.15;          // |a|,|b| bound for depth plane coeffs
    double plane_min = 0.2, plane_max = 0.5;  // plane offset c range

    std::vector<std::array<float, 3>> palette = {
        {0.90f, 0.12f, 0.12f}, {0.12f, 0.80f, 0.12f}, {0.15f, 0.15f, 0.90f},
        {0.85f, 0.80f, 0.10f}, {0.85f, 0.10f, 0.80f}, {0.10f, 0.80f, 0.85f},
    };

    void validate() const;
    double frame_diagonal() const;
};

// text token ids: 0 is the reserved null token
inline constexpr int32_t kNullToken = 0;
extern const std::vector<std::string> kColorWords;   // ids 1..6
extern const std::vector<std::string> kMotionWords;  // ids 7..12
int32_t color_token(size_t color_index);
int32_t motion_token(size_t motion_index);
size_t text_vocab_size();

enum class Motion { Static = 0, Left, Right, Up, Down, Spin };

struct ToyLabels {
    geometry::Trajectory trajectory;
    size_t color_index = 0;
    Motion motion = Motion::Static;
    double plane_a = 0.0, plane_b = 0.0, plane_c = 0.5;
    size_t n_identities = 1;
    bool raw_identity_ref = false;  // raw = square over the textured background
};

struct ToySample {
    Tensorf video;                          // [N,H,W,3]
    geometry::Trajectory trajectory;
    std::vector<Tensorf> identity_images;   // each [H,W,3]
    Tensorf depth;                          // [N,H,W,3], one channel replicated
    std::vector<int32_t> text_ids;          // color word, motion word
    std::vector<Eigen::Vector2d> centers;   // ground-truth square center (u,v)
    std::vector<double> orientations;       // ground-truth roll, radians
    ToyLabels labels;
};

// Random labels whose trajectory keeps the square inside the frame.
ToyLabels draw_labels(const ToyWorldSpec& spec, Rng& rng);

// Deterministic in (spec, labels). Throws OutOfFrame when the projected
// square center leaves the canvas.
ToySample render_sample(const ToyWorldSpec& spec, const ToyLabels& labels);

struct SquareEstimate {
    Eigen::Vector2d center;
    double orientation = 0.0;
    Eigen::Vector3d mean_color = Eigen::Vector3d::Zero();
    size_t pixels = 0;
};

// Palette-mask detection per frame: centroid of fill+marker pixels, marker
// direction for orientation, mean fill color. Throws NotFound when a frame
// has no palette-matching pixel.
std::vector<SquareEstimate> estimate_square(const Tensorf& video, const ToyWorldSpec& spec);

// screen-space camera adherence: (mean center distance px, mean angular error rad)
std::pair<double, double> eval_camera_toy(const Tensorf& gen_video, const ToySample& gt,
                                          const ToyWorldSpec& spec);

// cosine similarity of detected square colors mapped from [-1,1] to [0,1]
double eval_identity_toy(const Tensorf& gen_video, const Tensorf& ref_image,
                         const ToyWorldSpec& spec);

// MAE between generated background intensity and ground-truth depth over
// off-square pixels (gt square region excluded via its constant depth value)
double eval_depth_toy(const Tensorf& gen_video, const Tensorf& gt_depth,
                      const ToyWorldSpec& spec);

// smoothness = 1 - mean adjacent-frame absolute difference;
// dynamic = mean per-frame displacement of the estimated square center (px)
std::pair<double, double> eval_quality_toy(const Tensorf& gen_video, const ToyWorldSpec& spec);

struct ConditionSet {
    bool camera = false, identity = false, depth = false;
    std::string name() const;
};

// the seven FullBench categories in fixed order
const std::vector<ConditionSet>& bench_categories();

struct BenchCase {
    std::string id;
    size_t category = 0;
    ToySample sample;
};

struct BenchSuite {
    ToyWorldSpec spec;
    uint64_t seed = 0;
    size_t cases_per_category = 0;
    std::vector<BenchCase> cases;
};

BenchSuite build_bench(const ToyWorldSpec& spec, size_t cases_per_category, uint64_t seed);

// Case directory layout:
//   <dir>/<category>/<case-id>/{video.tnsr, depth.tnsr, identity-<j>.tnsr,
//                               camera.txt, text.json, meta.json}
void save_bench(const BenchSuite& suite, const std::filesystem::path& dir);
BenchSuite load_bench(const std::filesystem::path& dir);

// Produces a generated video for a case given the conditions its category
// provides. Seed is derived per case for determinism.
using Generator =
    std::function<Tensorf(const BenchCase&, const ConditionSet& provided, uint64_t seed)>;

// Returns the ground-truth render; the benchmark harness self-test.
Generator oracle_generator();

struct CaseScore {
    std::string id;
    std::map<std::string, double> metrics;
};

struct BenchReport {
    std::map<std::string, std::vector<CaseScore>> per_category;
    std::map<std::string, std::map<std::string, double>> category_means;
    std::map<std::string, double> overall_means;
    std::string to_json() const;
};

// Scores every case with the metrics applicable to its category's condition
// set plus the two quality proxies.
BenchReport run_bench(const BenchSuite& suite, const Generator& generate, uint64_t seed);

// Scores one generated video against one ground-truth case (used by
// cmd_eval and run_bench).
CaseScore score_case(const Tensorf& gen_video, const BenchCase& gt, const ConditionSet& provided,
                     const ToyWorldSpec& spec);

}  // namespace fulldit::synthbench
