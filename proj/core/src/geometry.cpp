#include "fulldit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fulldit/errors.hpp"

namespace fulldit::geometry {

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidPose("focal lengths must be positive");
    if (!(cx >= 0.0) || cx >= double(width) || !(cy >= 0.0) || cy >= double(height))
        throw InvalidPose("principal point outside the frame");
    if (width == 0 || height == 0) throw InvalidPose("zero frame size");
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
    Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
    k(0, 0) = fx;
    k(1, 1) = fy;
    k(0, 2) = cx;
    k(1, 2) = cy;
    return k;
}

void CameraPose::validate() const {
    if (!rotation.allFinite() || !translation.allFinite())
        throw InvalidPose("non-finite pose entries");
    const Eigen::Matrix3d gram = rotation.transpose() * rotation;
    if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6)
        throw InvalidPose("rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > 1e-6)
        throw InvalidPose("rotation determinant is not +1");
}

void Trajectory::validate() const {
    if (frames.empty()) throw EmptyTrajectory("trajectory has no frames");
    const size_t w = frames.front().intrinsics.width;
    const size_t h = frames.front().intrinsics.height;
    for (const auto& f : frames) {
        f.intrinsics.validate();
        f.pose.validate();
        if (f.intrinsics.width != w || f.intrinsics.height != h)
            throw InvalidPose("frames disagree on width/height");
    }
}

Eigen::Vector3d camera_center(const CameraPose& pose) {
    return -pose.rotation.transpose() * pose.translation;
}

PluckerFrame plucker_embedding(const CameraPose& pose, const CameraIntrinsics& intr) {
    const size_t h = intr.height, w = intr.width;
    const Eigen::Matrix3d k_inv = intr.matrix().inverse();
    const Eigen::Matrix3d rk_inv = pose.rotation * k_inv;
    const Eigen::Vector3d o = camera_center(pose);

    PluckerFrame out;
    out.grid = Tensord({h, w, 6});
    for (size_t v = 0; v < h; ++v) {
        for (size_t u = 0; u < w; ++u) {
            const Eigen::Vector3d raw =
                rk_inv * Eigen::Vector3d(double(u), double(v), 1.0) + pose.translation;
            const double norm = raw.norm();
            if (norm < 1e-12)
                throw DegenerateRay("zero-length ray at pixel (" + std::to_string(u) + "," +
                                    std::to_string(v) + ")");
            const Eigen::Vector3d d = raw / norm;
            const Eigen::Vector3d m = o.cross(d);
            double* cell = &out.grid.at3(v, u, 0);
            cell[0] = m.x();
            cell[1] = m.y();
            cell[2] = m.z();
            cell[3] = d.x();
            cell[4] = d.y();
            cell[5] = d.z();
        }
    }
    return out;
}

namespace {

bool looks_normalized(double fx, double fy, double cx, double cy) {
    return fx <= 2.0 && fy <= 2.0 && cx <= 1.0 && cy <= 1.0;
}

}  // namespace

Trajectory parse_trajectory(const std::string& text, const TrajectoryParseOptions& opts) {
    std::istringstream is(text);
    std::string line;
    size_t line_no = 0;
    Trajectory traj;

    bool saw_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!saw_header) {
            saw_header = true;  // identifier line, content is arbitrary
            continue;
        }
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

        std::istringstream fields(line);
        std::vector<double> vals;
        double v;
        while (fields >> v) vals.push_back(v);
        if (!fields.eof()) throw ParseError(line_no, "non-numeric field");
        if (vals.size() != 19)
            throw ParseError(line_no, "expected 19 fields, got " + std::to_string(vals.size()));

        TrajectoryFrame frame;
        frame.timestamp = vals[0];
        double fx = vals[1], fy = vals[2], cx = vals[3], cy = vals[4];
        const bool normalized =
            opts.unit == IntrinsicsUnit::Normalized ||
            (opts.unit == IntrinsicsUnit::Auto && looks_normalized(fx, fy, cx, cy));
        if (normalized) {
            if (opts.width == 0 || opts.height == 0)
                throw ParseError(line_no, "normalized intrinsics need a configured width/height");
            fx *= double(opts.width);
            cx *= double(opts.width);
            fy *= double(opts.height);
            cy *= double(opts.height);
        }
        frame.intrinsics.fx = fx;
        frame.intrinsics.fy = fy;
        frame.intrinsics.cx = cx;
        frame.intrinsics.cy = cy;
        frame.intrinsics.width = opts.width ? opts.width : size_t(std::lround(cx * 2.0));
        frame.intrinsics.height = opts.height ? opts.height : size_t(std::lround(cy * 2.0));
        if (frame.intrinsics.width == 0) frame.intrinsics.width = 1;
        if (frame.intrinsics.height == 0) frame.intrinsics.height = 1;

        // fields 5,6 are reserved zeros; 7..18 are row-major [R|T]
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) {
                const double e = vals[7 + size_t(r) * 4 + size_t(c)];
                if (c < 3)
                    frame.pose.rotation(r, c) = e;
                else
                    frame.pose.translation(r) = e;
            }
        }
        try {
            frame.pose.validate();
            frame.intrinsics.validate();
        } catch (const InvalidPose& e) {
            throw ParseError(line_no, e.what());
        }
        traj.frames.push_back(frame);
    }

    if (traj.frames.empty()) throw EmptyTrajectory("trajectory file has no frame lines");
    return traj;
}

std::string serialize_trajectory(const Trajectory& traj, const std::string& identifier) {
    traj.validate();
    std::string out = identifier + "\n";
    char buf[64];
    auto put = [&](double v, bool last) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out += buf;
        out += last ? '\n' : ' ';
    };
    for (const auto& f : traj.frames) {
        const double w = double(f.intrinsics.width), h = double(f.intrinsics.height);
        put(f.timestamp, false);
        put(f.intrinsics.fx / w, false);
        put(f.intrinsics.fy / h, false);
        put(f.intrinsics.cx / w, false);
        put(f.intrinsics.cy / h, false);
        put(0.0, false);
        put(0.0, false);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) {
                const double e = c < 3 ? f.pose.rotation(r, c) : f.pose.translation(r);
                put(e, r == 2 && c == 3);
            }
        }
    }
    return out;
}

namespace {

void check_lengths(const Trajectory& gen, const Trajectory& gt) {
    if (gen.size() != gt.size())
        throw LengthMismatch("trajectory lengths differ: " + std::to_string(gen.size()) + " vs " +
                             std::to_string(gt.size()));
    if (gen.frames.empty()) throw EmptyTrajectory("empty trajectory");
}

double path_length(const Trajectory& t) {
    double len = 0.0;
    for (size_t i = 1; i < t.size(); ++i)
        len += (t.frames[i].pose.translation - t.frames[i - 1].pose.translation).norm();
    return len;
}

std::vector<Eigen::Vector3d> normalized_translations(const Trajectory& t) {
    const double len = path_length(t);
    const double scale = len < 1e-9 ? 1.0 : 1.0 / len;
    std::vector<Eigen::Vector3d> out;
    out.reserve(t.size());
    for (const auto& f : t.frames) out.push_back(f.pose.translation * scale);
    return out;
}

}  // namespace

double rot_err(const Trajectory& gen, const Trajectory& gt) {
    check_lengths(gen, gt);
    double sum = 0.0;
    for (size_t i = 0; i < gen.size(); ++i) {
        const Eigen::Matrix3d rel =
            gen.frames[i].pose.rotation * gt.frames[i].pose.rotation.transpose();
        const double cosang = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
        sum += std::acos(cosang);
    }
    return sum / double(gen.size());
}

double trans_err(const Trajectory& gen, const Trajectory& gt) {
    check_lengths(gen, gt);
    const auto a = normalized_translations(gen);
    const auto b = normalized_translations(gt);
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).norm();
    return sum / double(a.size());
}

double cam_mc(const Trajectory& gen, const Trajectory& gt) {
    check_lengths(gen, gt);
    const auto a = normalized_translations(gen);
    const auto b = normalized_translations(gt);
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        Eigen::Matrix<double, 3, 4> ma, mb;
        ma.leftCols<3>() = gen.frames[i].pose.rotation;
        ma.col(3) = a[i];
        mb.leftCols<3>() = gt.frames[i].pose.rotation;
        mb.col(3) = b[i];
        sum += (ma - mb).norm();
    }
    return sum / double(a.size());
}

}  // namespace fulldit::geometry
