#include "fulldit/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fulldit/errors.hpp"
#include "fulldit/io.hpp"
#include "fulldit/threads.hpp"

namespace fulldit::synthbench {

using json = nlohmann::json;

const std::vector<std::string> kColorWords = {"red", "green", "blue", "yellow", "magenta", "cyan"};
const std::vector<std::string> kMotionWords = {"static", "left", "right", "up", "down", "spin"};

int32_t color_token(size_t color_index) { return int32_t(1 + color_index); }
int32_t motion_token(size_t motion_index) {
    return int32_t(1 + kColorWords.size() + motion_index);
}
size_t text_vocab_size() { return 1 + kColorWords.size() + kMotionWords.size(); }

void ToyWorldSpec::validate() const {
    if (width < 8 || height < 8) throw InvalidConfig("toy frames must be at least 8x8");
    if (frames == 0) throw InvalidConfig("toy world needs at least one frame");
    if (!(square_side >= 3.0)) throw InvalidConfig("square side must be at least 3 px");
    if (palette.empty()) throw InvalidConfig("palette must not be empty");
    if (!(anchor_depth > 0.0)) throw InvalidConfig("anchor must sit in front of the camera");
    const double margin = square_side * 0.5 * std::sqrt(2.0) + 2.0;
    if (2.0 * margin >= double(std::min(width, height)))
        throw InvalidConfig("square cannot fit in the frame under rotation");
}

double ToyWorldSpec::frame_diagonal() const {
    return std::sqrt(double(width * width + height * height));
}

namespace {

geometry::CameraIntrinsics toy_intrinsics(const ToyWorldSpec& spec) {
    geometry::CameraIntrinsics k;
    k.width = spec.width;
    k.height = spec.height;
    k.fx = k.fy = spec.focal_scale * double(spec.width);
    k.cx = double(spec.width) * 0.5;
    k.cy = double(spec.height) * 0.5;
    return k;
}

Eigen::Matrix3d roll_rotation(double theta) {
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    r(0, 0) = std::cos(theta);
    r(0, 1) = -std::sin(theta);
    r(1, 0) = std::sin(theta);
    r(1, 1) = std::cos(theta);
    return r;
}

// projected square center under pose (perspective projection of the anchor)
Eigen::Vector2d project_anchor(const ToyWorldSpec& spec, const geometry::CameraIntrinsics& k,
                               const geometry::CameraPose& pose) {
    const Eigen::Vector3d p0(0.0, 0.0, spec.anchor_depth);
    const Eigen::Vector3d cam = pose.rotation * p0 + pose.translation;
    if (!(cam.z() > 1e-9)) throw OutOfFrame("anchor point behind the camera");
    return {k.fx * cam.x() / cam.z() + k.cx, k.fy * cam.y() / cam.z() + k.cy};
}

// in-image roll: angle of the world x-axis as seen by the camera
double pose_roll(const geometry::CameraPose& pose) {
    const Eigen::Vector3d x_axis = pose.rotation.col(0);
    return std::atan2(x_axis.y(), x_axis.x());
}

double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

float plane_value(const ToyWorldSpec& spec, const ToyLabels& labels, size_t x, size_t y) {
    const double xn = spec.width > 1 ? double(x) / double(spec.width - 1) : 0.0;
    const double yn = spec.height > 1 ? double(y) / double(spec.height - 1) : 0.0;
    const double v = labels.plane_a * xn + labels.plane_b * yn + labels.plane_c;
    return float(std::clamp(v, 0.0, 1.0));
}

// 0 = outside, 1 = fill, 2 = corner marker
int square_region(const ToyWorldSpec& spec, const Eigen::Vector2d& center, double theta,
                  double x, double y) {
    const double dx = x - center.x(), dy = y - center.y();
    const double cs = std::cos(-theta), sn = std::sin(-theta);
    const double lx = dx * cs - dy * sn;
    const double ly = dx * sn + dy * cs;
    const double half = spec.square_side * 0.5;
    if (std::abs(lx) > half || std::abs(ly) > half) return 0;
    const double marker = spec.square_side * spec.marker_fraction;
    if (lx >= half - marker && ly >= half - marker) return 2;
    return 1;
}

void draw_frame(Tensorf& video, size_t frame, const ToyWorldSpec& spec, const ToyLabels& labels,
                const Eigen::Vector2d& center, double theta) {
    const auto& color = spec.palette[labels.color_index % spec.palette.size()];
    for (size_t y = 0; y < spec.height; ++y) {
        for (size_t x = 0; x < spec.width; ++x) {
            const int region = square_region(spec, center, theta, double(x), double(y));
            float px[3];
            if (region == 0) {
                const float bg = plane_value(spec, labels, x, y);
                px[0] = px[1] = px[2] = bg;
            } else if (region == 1) {
                px[0] = color[0];
                px[1] = color[1];
                px[2] = color[2];
            } else {
                px[0] = px[1] = px[2] = 1.0f;
            }
            for (size_t c = 0; c < 3; ++c) video.at4(frame, y, x, c) = px[c];
        }
    }
}

}  // namespace

ToyLabels draw_labels(const ToyWorldSpec& spec, Rng& rng) {
    spec.validate();
    const auto k = toy_intrinsics(spec);
    const double z = spec.anchor_depth;

    ToyLabels labels;
    labels.color_index = size_t(rng.below(spec.palette.size()));
    labels.motion = Motion(rng.below(kMotionWords.size()));
    labels.plane_a = rng.uniform(-spec.plane_slope, spec.plane_slope);
    labels.plane_b = rng.uniform(-spec.plane_slope, spec.plane_slope);
    labels.plane_c = rng.uniform(spec.plane_min, spec.plane_max);
    labels.raw_identity_ref = rng.bernoulli(0.5);

    // center bounds: rotated square plus one pixel of slack
    const double margin = spec.square_side * 0.5 * std::sqrt(2.0) + 1.5;
    const double lo_u = margin, hi_u = double(spec.width) - 1.0 - margin;
    const double lo_v = margin, hi_v = double(spec.height) - 1.0 - margin;

    const double speed = rng.uniform(0.5 * spec.max_speed_px, spec.max_speed_px);
    const double travel = speed * double(spec.frames - 1);

    double u0 = rng.uniform(lo_u, hi_u), v0 = rng.uniform(lo_v, hi_v);
    double du = 0.0, dv = 0.0, droll = 0.0;
    switch (labels.motion) {
        case Motion::Static: break;
        case Motion::Left:
            u0 = rng.uniform(lo_u + travel, hi_u);
            du = -speed;
            break;
        case Motion::Right:
            u0 = rng.uniform(lo_u, hi_u - travel);
            du = speed;
            break;
        case Motion::Up:
            v0 = rng.uniform(lo_v + travel, hi_v);
            dv = -speed;
            break;
        case Motion::Down:
            v0 = rng.uniform(lo_v, hi_v - travel);
            dv = speed;
            break;
        case Motion::Spin:
            droll = rng.uniform(0.08, 0.22) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
            break;
    }
    const double roll0 = rng.uniform(-0.3, 0.3);

    labels.trajectory.frames.resize(spec.frames);
    for (size_t i = 0; i < spec.frames; ++i) {
        auto& f = labels.trajectory.frames[i];
        f.intrinsics = k;
        f.timestamp = double(i);
        const double roll = roll0 + droll * double(i);
        f.pose.rotation = roll_rotation(roll);
        // screen-space target center -> camera translation (roll leaves the
        // optical-axis anchor fixed, so u depends on T alone)
        const double u = u0 + du * double(i), v = v0 + dv * double(i);
        f.pose.translation =
            Eigen::Vector3d((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, 0.0);
    }
    return labels;
}

ToySample render_sample(const ToyWorldSpec& spec, const ToyLabels& labels) {
    spec.validate();
    labels.trajectory.validate();
    const size_t n = labels.trajectory.size();
    const auto k = toy_intrinsics(spec);

    ToySample sample;
    sample.labels = labels;
    sample.trajectory = labels.trajectory;
    sample.video = Tensorf({n, spec.height, spec.width, 3});
    sample.depth = Tensorf({n, spec.height, spec.width, 3});
    sample.centers.resize(n);
    sample.orientations.resize(n);

    for (size_t i = 0; i < n; ++i) {
        const auto& pose = labels.trajectory.frames[i].pose;
        const Eigen::Vector2d center = project_anchor(spec, k, pose);
        if (center.x() < 0.0 || center.x() >= double(spec.width) || center.y() < 0.0 ||
            center.y() >= double(spec.height))
            throw OutOfFrame("square center left the canvas at frame " + std::to_string(i));
        const double theta = pose_roll(pose);
        sample.centers[i] = center;
        sample.orientations[i] = theta;
        draw_frame(sample.video, i, spec, labels, center, theta);
        for (size_t y = 0; y < spec.height; ++y) {
            for (size_t x = 0; x < spec.width; ++x) {
                const bool on_square =
                    square_region(spec, center, theta, double(x), double(y)) != 0;
                const float d =
                    on_square ? float(spec.square_depth) : plane_value(spec, labels, x, y);
                for (size_t c = 0; c < 3; ++c) sample.depth.at4(i, y, x, c) = d;
            }
        }
    }

    // identity references: square at canvas center, no roll
    const Eigen::Vector2d ref_center(double(spec.width) * 0.5, double(spec.height) * 0.5);
    for (size_t j = 0; j < labels.n_identities; ++j) {
        Tensorf img({spec.height, spec.width, 3});
        for (size_t y = 0; y < spec.height; ++y) {
            for (size_t x = 0; x < spec.width; ++x) {
                const int region = square_region(spec, ref_center, 0.0, double(x), double(y));
                float px[3];
                if (region == 0) {
                    const float bg =
                        labels.raw_identity_ref ? plane_value(spec, labels, x, y) : 0.5f;
                    px[0] = px[1] = px[2] = bg;
                } else if (region == 1) {
                    const auto& color = spec.palette[labels.color_index % spec.palette.size()];
                    px[0] = color[0];
                    px[1] = color[1];
                    px[2] = color[2];
                } else {
                    px[0] = px[1] = px[2] = 1.0f;
                }
                for (size_t c = 0; c < 3; ++c) img.at3(y, x, c) = px[c];
            }
        }
        sample.identity_images.push_back(std::move(img));
    }

    sample.text_ids = {color_token(labels.color_index),
                       motion_token(size_t(labels.motion))};
    return sample;
}

std::vector<SquareEstimate> estimate_square(const Tensorf& video, const ToyWorldSpec& spec) {
    if (video.ndim() != 4 || video.dim(3) != 3)
        throw ShapeError("estimate_square expects [N,H,W,3]");
    const size_t n = video.dim(0), h = video.dim(1), w = video.dim(2);
    constexpr double kFillTol = 0.30;    // distance to a palette color
    constexpr float kMarkerMin = 0.85f;  // min channel value for marker pixels

    std::vector<SquareEstimate> out(n);
    for (size_t i = 0; i < n; ++i) {
        double cx = 0, cy = 0;
        size_t count = 0;
        Eigen::Vector3d color_sum = Eigen::Vector3d::Zero();
        size_t fill_count = 0;
        double mx = 0, my = 0;
        size_t marker_count = 0;
        for (size_t y = 0; y < h; ++y) {
            for (size_t x = 0; x < w; ++x) {
                const float r = video.at4(i, y, x, 0), g = video.at4(i, y, x, 1),
                            b = video.at4(i, y, x, 2);
                bool fill = false;
                for (const auto& pal : spec.palette) {
                    const double d2 = (r - pal[0]) * double(r - pal[0]) +
                                      (g - pal[1]) * double(g - pal[1]) +
                                      (b - pal[2]) * double(b - pal[2]);
                    if (d2 < kFillTol * kFillTol) {
                        fill = true;
                        break;
                    }
                }
                const bool marker = std::min({r, g, b}) > kMarkerMin;
                if (fill) {
                    color_sum += Eigen::Vector3d(r, g, b);
                    ++fill_count;
                }
                if (marker) {
                    mx += double(x);
                    my += double(y);
                    ++marker_count;
                }
                if (fill || marker) {
                    cx += double(x);
                    cy += double(y);
                    ++count;
                }
            }
        }
        if (fill_count == 0)
            throw NotFound("no palette-colored pixels in frame " + std::to_string(i));
        out[i].center = {cx / double(count), cy / double(count)};
        out[i].mean_color = color_sum / double(fill_count);
        out[i].pixels = fill_count;
        if (marker_count > 0) {
            const double dx = mx / double(marker_count) - out[i].center.x();
            const double dy = my / double(marker_count) - out[i].center.y();
            out[i].orientation = wrap_angle(std::atan2(dy, dx) - M_PI / 4.0);
        }
    }
    return out;
}

std::pair<double, double> eval_camera_toy(const Tensorf& gen_video, const ToySample& gt,
                                          const ToyWorldSpec& spec) {
    if (gen_video.dim(0) != gt.centers.size())
        throw ShapeError("frame count mismatch in eval_camera_toy");
    const auto est = estimate_square(gen_video, spec);
    double center_err = 0, orient_err = 0;
    for (size_t i = 0; i < est.size(); ++i) {
        center_err += (est[i].center - gt.centers[i]).norm();
        orient_err += std::abs(wrap_angle(est[i].orientation - gt.orientations[i]));
    }
    return {center_err / double(est.size()), orient_err / double(est.size())};
}

double eval_identity_toy(const Tensorf& gen_video, const Tensorf& ref_image,
                         const ToyWorldSpec& spec) {
    Tensorf ref_video({size_t(1), ref_image.dim(0), ref_image.dim(1), size_t(3)});
    std::copy(ref_image.raw().begin(), ref_image.raw().end(), ref_video.raw().begin());
    const auto ref_est = estimate_square(ref_video, spec);
    const auto gen_est = estimate_square(gen_video, spec);

    Eigen::Vector3d gen_color = Eigen::Vector3d::Zero();
    for (const auto& e : gen_est) gen_color += e.mean_color;
    gen_color /= double(gen_est.size());

    const double na = gen_color.norm(), nb = ref_est[0].mean_color.norm();
    if (na < 1e-12 || nb < 1e-12) return 0.5;
    const double cosine = gen_color.dot(ref_est[0].mean_color) / (na * nb);
    return 0.5 * (std::clamp(cosine, -1.0, 1.0) + 1.0);
}

double eval_depth_toy(const Tensorf& gen_video, const Tensorf& gt_depth,
                      const ToyWorldSpec& spec) {
    if (!gen_video.same_shape(gt_depth)) throw ShapeError("eval_depth_toy: shape mismatch");
    const size_t n = gen_video.dim(0), h = gen_video.dim(1), w = gen_video.dim(2);
    double sum = 0;
    size_t count = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t y = 0; y < h; ++y) {
            for (size_t x = 0; x < w; ++x) {
                const double d = gt_depth.at4(i, y, x, 0);
                if (std::abs(d - spec.square_depth) < 1e-6) continue;  // gt square region
                const double intensity = (gen_video.at4(i, y, x, 0) + gen_video.at4(i, y, x, 1) +
                                          gen_video.at4(i, y, x, 2)) /
                                         3.0;
                sum += std::abs(intensity - d);
                ++count;
            }
        }
    }
    if (count == 0) throw ShapeError("eval_depth_toy: no background pixels");
    return sum / double(count);
}

std::pair<double, double> eval_quality_toy(const Tensorf& gen_video, const ToyWorldSpec& spec) {
    const size_t n = gen_video.dim(0);
    if (n < 2) throw NeedTwoFrames("quality metrics need at least two frames");
    const size_t per_frame = gen_video.size() / n;
    double diff = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
        const float* a = gen_video.data() + i * per_frame;
        const float* b = gen_video.data() + (i + 1) * per_frame;
        double d = 0;
        for (size_t j = 0; j < per_frame; ++j) d += std::abs(double(b[j]) - double(a[j]));
        diff += d / double(per_frame);
    }
    const double smoothness = 1.0 - diff / double(n - 1);

    double dynamic = 0.0;
    try {
        const auto est = estimate_square(gen_video, spec);
        for (size_t i = 0; i + 1 < n; ++i) dynamic += (est[i + 1].center - est[i].center).norm();
        dynamic /= double(n - 1);
    } catch (const NotFound&) {
        dynamic = 0.0;  // nothing trackable
    }
    return {smoothness, dynamic};
}

std::string ConditionSet::name() const {
    std::string s;
    if (camera) s += "camera";
    if (identity) s += (s.empty() ? "" : "+") + std::string("identity");
    if (depth) s += (s.empty() ? "" : "+") + std::string("depth");
    return s.empty() ? "none" : s;
}

const std::vector<ConditionSet>& bench_categories() {
    static const std::vector<ConditionSet> cats = {
        {true, false, false},  {false, true, false}, {false, false, true},
        {true, true, false},   {true, false, true},  {false, true, true},
        {true, true, true},
    };
    return cats;
}

BenchSuite build_bench(const ToyWorldSpec& spec, size_t cases_per_category, uint64_t seed) {
    spec.validate();
    BenchSuite suite;
    suite.spec = spec;
    suite.seed = seed;
    suite.cases_per_category = cases_per_category;
    const auto& cats = bench_categories();
    for (size_t c = 0; c < cats.size(); ++c) {
        for (size_t i = 0; i < cases_per_category; ++i) {
            Rng rng(mix_seed(seed, c, i, 0xbe9c4));
            ToyLabels labels = draw_labels(spec, rng);
            if (cats[c].identity) labels.raw_identity_ref = (i % 2 == 1);
            BenchCase bc;
            bc.category = c;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "-%03zu", i);
            bc.id = cats[c].name() + buf;
            bc.sample = render_sample(spec, labels);
            suite.cases.push_back(std::move(bc));
        }
    }
    return suite;
}

namespace {

json meta_json(const BenchCase& bc, const ToyWorldSpec& spec) {
    json meta;
    meta["id"] = bc.id;
    meta["category"] = bench_categories()[bc.category].name();
    meta["width"] = spec.width;
    meta["height"] = spec.height;
    meta["frames"] = bc.sample.video.dim(0);
    meta["color_index"] = bc.sample.labels.color_index;
    meta["motion"] = kMotionWords[size_t(bc.sample.labels.motion)];
    meta["plane"] = {bc.sample.labels.plane_a, bc.sample.labels.plane_b,
                     bc.sample.labels.plane_c};
    meta["raw_identity_ref"] = bc.sample.labels.raw_identity_ref;
    json centers = json::array(), orients = json::array();
    for (size_t i = 0; i < bc.sample.centers.size(); ++i) {
        centers.push_back({bc.sample.centers[i].x(), bc.sample.centers[i].y()});
        orients.push_back(bc.sample.orientations[i]);
    }
    meta["centers"] = centers;
    meta["orientations"] = orients;
    return meta;
}

}  // namespace

void save_bench(const BenchSuite& suite, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    json root;
    root["seed"] = suite.seed;
    root["cases_per_category"] = suite.cases_per_category;
    root["spec"]["width"] = suite.spec.width;
    root["spec"]["height"] = suite.spec.height;
    root["spec"]["frames"] = suite.spec.frames;
    root["spec"]["square_side"] = suite.spec.square_side;
    root["spec"]["anchor_depth"] = suite.spec.anchor_depth;
    root["spec"]["focal_scale"] = suite.spec.focal_scale;
    root["spec"]["marker_fraction"] = suite.spec.marker_fraction;
    root["spec"]["square_depth"] = suite.spec.square_depth;
    root["spec"]["max_speed_px"] = suite.spec.max_speed_px;
    root["spec"]["plane_slope"] = suite.spec.plane_slope;
    root["spec"]["plane_min"] = suite.spec.plane_min;
    root["spec"]["plane_max"] = suite.spec.plane_max;
    write_text_file(dir / "suite.json", root.dump(2) + "\n");

    for (const auto& bc : suite.cases) {
        const fs::path case_dir = dir / bench_categories()[bc.category].name() / bc.id;
        fs::create_directories(case_dir);
        write_tnsr(case_dir / "video.tnsr", bc.sample.video);
        write_tnsr(case_dir / "depth.tnsr", bc.sample.depth);
        for (size_t j = 0; j < bc.sample.identity_images.size(); ++j)
            write_tnsr(case_dir / ("identity-" + std::to_string(j) + ".tnsr"),
                       bc.sample.identity_images[j]);
        write_text_file(case_dir / "camera.txt",
                        geometry::serialize_trajectory(bc.sample.trajectory, bc.id));
        json text;
        text["ids"] = bc.sample.text_ids;
        text["color"] = kColorWords[bc.sample.labels.color_index % kColorWords.size()];
        text["motion"] = kMotionWords[size_t(bc.sample.labels.motion)];
        write_text_file(case_dir / "text.json", text.dump(2) + "\n");
        write_text_file(case_dir / "meta.json", meta_json(bc, suite.spec).dump(2) + "\n");
    }
}

BenchSuite load_bench(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    const json root = json::parse(read_text_file(dir / "suite.json"));
    BenchSuite suite;
    suite.seed = root.at("seed").get<uint64_t>();
    suite.cases_per_category = root.at("cases_per_category").get<size_t>();
    const json& s = root.at("spec");
    suite.spec.width = s.at("width").get<size_t>();
    suite.spec.height = s.at("height").get<size_t>();
    suite.spec.frames = s.at("frames").get<size_t>();
    suite.spec.square_side = s.at("square_side").get<double>();
    suite.spec.anchor_depth = s.at("anchor_depth").get<double>();
    suite.spec.focal_scale = s.at("focal_scale").get<double>();
    suite.spec.marker_fraction = s.at("marker_fraction").get<double>();
    suite.spec.square_depth = s.at("square_depth").get<double>();
    suite.spec.max_speed_px = s.at("max_speed_px").get<double>();
    suite.spec.plane_slope = s.at("plane_slope").get<double>();
    suite.spec.plane_min = s.at("plane_min").get<double>();
    suite.spec.plane_max = s.at("plane_max").get<double>();
    // suites are deterministic in (spec, seed); rebuilding reproduces the
    // exact on-disk tensors
    return build_bench(suite.spec, suite.cases_per_category, suite.seed);
}

Generator oracle_generator() {
    return [](const BenchCase& bc, const ConditionSet&, uint64_t) { return bc.sample.video; };
}

CaseScore score_case(const Tensorf& gen_video, const BenchCase& gt, const ConditionSet& provided,
                     const ToyWorldSpec& spec) {
    CaseScore score;
    score.id = gt.id;
    // detection failures score at chance level rather than aborting the run
    if (provided.camera) {
        try {
            const auto [c, o] = eval_camera_toy(gen_video, gt.sample, spec);
            score.metrics["center_err"] = c;
            score.metrics["orient_err"] = o;
        } catch (const NotFound&) {
            score.metrics["center_err"] = spec.frame_diagonal();
            score.metrics["orient_err"] = M_PI;
        }
    }
    if (provided.identity) {
        try {
            score.metrics["identity_sim"] =
                eval_identity_toy(gen_video, gt.sample.identity_images.at(0), spec);
        } catch (const NotFound&) {
            score.metrics["identity_sim"] = 0.0;
        }
    }
    if (provided.depth)
        score.metrics["depth_mae"] = eval_depth_toy(gen_video, gt.sample.depth, spec);
    const auto [smooth, dyn] = eval_quality_toy(gen_video, spec);
    score.metrics["smoothness"] = smooth;
    score.metrics["dynamic"] = dyn;
    return score;
}

BenchReport run_bench(const BenchSuite& suite, const Generator& generate, uint64_t seed) {
    BenchReport report;
    std::vector<CaseScore> scores(suite.cases.size());
    parallel_for(suite.cases.size(), [&](size_t i) {
        const auto& bc = suite.cases[i];
        const ConditionSet& provided = bench_categories()[bc.category];
        const Tensorf gen = generate(bc, provided, mix_seed(seed, 0xca5e, i));
        scores[i] = score_case(gen, bc, provided, suite.spec);
    });

    for (size_t i = 0; i < suite.cases.size(); ++i) {
        const std::string cat = bench_categories()[suite.cases[i].category].name();
        report.per_category[cat].push_back(scores[i]);
    }
    std::map<std::string, std::pair<double, size_t>> overall;
    for (auto& [cat, rows] : report.per_category) {
        std::map<std::string, std::pair<double, size_t>> acc;
        for (const auto& row : rows)
            for (const auto& [k, v] : row.metrics) {
                acc[k].first += v;
                acc[k].second += 1;
                overall[k].first += v;
                overall[k].second += 1;
            }
        for (const auto& [k, p] : acc) report.category_means[cat][k] = p.first / double(p.second);
    }
    for (const auto& [k, p] : overall) report.overall_means[k] = p.first / double(p.second);
    return report;
}

std::string BenchReport::to_json() const {
    json root;
    for (const auto& [cat, rows] : per_category) {
        json cases = json::array();
        for (const auto& row : rows) {
            json r;
            r["id"] = row.id;
            for (const auto& [k, v] : row.metrics) r[k] = v;
            cases.push_back(r);
        }
        root["categories"][cat]["cases"] = cases;
        if (auto it = category_means.find(cat); it != category_means.end())
            for (const auto& [k, v] : it->second) root["categories"][cat]["means"][k] = v;
    }
    for (const auto& [k, v] : overall_means) root["overall"][k] = v;
    return root.dump(2) + "\n";
}

}  // namespace fulldit::synthbench
