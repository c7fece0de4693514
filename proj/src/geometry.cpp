#include "rearrange/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rearrange {

OrientedBox::OrientedBox(const Vec3& center, const Mat3& rotation, const Vec3& half_extents)
    : center_(center), rotation_(rotation), half_extents_(half_extents) {
  if (!(half_extents.array() > 0.0).all()) {
    throw std::invalid_argument("OrientedBox: half extents must be positive");
  }
  const Mat3 gram = rotation.transpose() * rotation - Mat3::Identity();
  if (gram.cwiseAbs().maxCoeff() > 1e-9 || std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw std::invalid_argument("OrientedBox: rotation is not orthonormal with det +1");
  }
}

OrientedBox OrientedBox::axis_aligned(const Vec3& center, const Vec3& half_extents) {
  return OrientedBox(center, Mat3::Identity(), half_extents);
}

std::array<Vec3, 8> OrientedBox::corners() const {
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 local((i & 4) ? half_extents_.x() : -half_extents_.x(),
                     (i & 2) ? half_extents_.y() : -half_extents_.y(),
                     (i & 1) ? half_extents_.z() : -half_extents_.z());
    out[i] = center_ + rotation_ * local;
  }
  return out;
}

bool OrientedBox::contains(const Vec3& point, double tolerance) const {
  const Vec3 local = rotation_.transpose() * (point - center_);
  return (local.cwiseAbs().array() <= half_extents_.array() + tolerance).all();
}

void OrientedBox::world_bounds(Vec3& lo, Vec3& hi) const {
  const Vec3 reach = rotation_.cwiseAbs() * half_extents_;
  lo = center_ - reach;
  hi = center_ + reach;
}

OrientedBox OrientedBox::transformed(const Mat3& rotation, const Vec3& translation) const {
  return OrientedBox(rotation * center_ + translation, rotation * rotation_, half_extents_);
}

bool OrientedBox::operator==(const OrientedBox& other) const {
  return center_ == other.center_ && rotation_ == other.rotation_ &&
         half_extents_ == other.half_extents_;
}

double box_volume(const OrientedBox& box) {
  const Vec3& h = box.half_extents();
  return 8.0 * h.x() * h.y() * h.z();
}

namespace {

using Polygon = std::vector<Vec3>;

struct Plane {
  Vec3 normal;  // outward; the kept side is normal·x <= offset
  double offset;
};

// Faces wound counter-clockwise when seen from outside.
std::vector<Polygon> box_faces(const OrientedBox& box) {
  static constexpr int kFaces[6][4] = {
      {0, 1, 3, 2}, {4, 6, 7, 5},  // -x, +x
      {0, 4, 5, 1}, {2, 3, 7, 6},  // -y, +y
      {0, 2, 6, 4}, {1, 5, 7, 3},  // -z, +z
  };
  const auto c = box.corners();
  std::vector<Polygon> faces;
  faces.reserve(6);
  for (const auto& f : kFaces) {
    Polygon poly{c[f[0]], c[f[1]], c[f[2]], c[f[3]]};
    const Vec3 n = (poly[1] - poly[0]).cross(poly[2] - poly[0]);
    const Vec3 mid = (poly[0] + poly[2]) * 0.5;
    if (n.dot(mid - box.center()) < 0.0) std::reverse(poly.begin(), poly.end());
    faces.push_back(std::move(poly));
  }
  return faces;
}

std::array<Plane, 6> box_planes(const OrientedBox& box) {
  std::array<Plane, 6> planes;
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 dir = box.rotation().col(axis);
    const double h = box.half_extents()[axis];
    planes[2 * axis] = {dir, dir.dot(box.center()) + h};
    planes[2 * axis + 1] = {-dir, -dir.dot(box.center()) + h};
  }
  return planes;
}

void push_unique(Polygon& points, const Vec3& p) {
  for (const auto& q : points) {
    if ((q - p).squaredNorm() <= kPlaneTolerance * kPlaneTolerance) return;
  }
  points.push_back(p);
}

// Sutherland–Hodgman against one plane, for every face; the points lying on
// the plane are gathered into the cap polygon that closes the cut.
std::vector<Polygon> clip(const std::vector<Polygon>& faces, const Plane& plane) {
  bool any_outside = false;
  bool any_inside = false;
  for (const auto& face : faces) {
    for (const auto& p : face) {
      const double d = plane.normal.dot(p) - plane.offset;
      if (d > kPlaneTolerance) any_outside = true;
      if (d < -kPlaneTolerance) any_inside = true;
    }
  }
  if (!any_outside) return faces;
  if (!any_inside) return {};

  std::vector<Polygon> out;
  Polygon cap_points;
  out.reserve(faces.size() + 1);
  for (const auto& face : faces) {
    Polygon kept;
    const std::size_t n = face.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& p = face[i];
      const Vec3& q = face[(i + 1) % n];
      const double dp = plane.normal.dot(p) - plane.offset;
      const double dq = plane.normal.dot(q) - plane.offset;
      const bool p_in = dp <= kPlaneTolerance;
      const bool q_in = dq <= kPlaneTolerance;
      if (p_in) {
        kept.push_back(p);
        if (std::abs(dp) <= kPlaneTolerance) push_unique(cap_points, p);
      }
      if (p_in != q_in) {
        const double t = dp / (dp - dq);
        const Vec3 x = p + t * (q - p);
        kept.push_back(x);
        push_unique(cap_points, x);
      }
    }
    Polygon cleaned;
    for (const auto& v : kept) {
      if (cleaned.empty() || (cleaned.back() - v).squaredNorm() > kPlaneTolerance * kPlaneTolerance) {
        cleaned.push_back(v);
      }
    }
    while (cleaned.size() > 1 &&
           (cleaned.front() - cleaned.back()).squaredNorm() <= kPlaneTolerance * kPlaneTolerance) {
      cleaned.pop_back();
    }
    if (cleaned.size() >= 3) out.push_back(std::move(cleaned));
  }

  if (cap_points.size() >= 3 && !out.empty()) {
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : cap_points) centroid += p;
    centroid /= static_cast<double>(cap_points.size());
    const Vec3& n = plane.normal;
    const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 u = n.cross(helper).normalized();
    const Vec3 v = n.cross(u);
    std::vector<std::pair<double, Vec3>> ordered;
    ordered.reserve(cap_points.size());
    for (const auto& p : cap_points) {
      const Vec3 d = p - centroid;
      ordered.emplace_back(std::atan2(d.dot(v), d.dot(u)), p);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& lhs, const auto& rhs) { return lhs.first < rhs.first; });
    Polygon cap;
    cap.reserve(ordered.size());
    for (auto& [angle, p] : ordered) cap.push_back(p);
    out.push_back(std::move(cap));
  }
  return out;
}

double polyhedron_volume(const std::vector<Polygon>& faces) {
  if (faces.size() < 4) return 0.0;
  Vec3 ref = Vec3::Zero();
  std::size_t count = 0;
  for (const auto& f : faces) {
    for (const auto& p : f) {
      ref += p;
      ++count;
    }
  }
  ref /= static_cast<double>(count);
  double six_volume = 0.0;
  for (const auto& f : faces) {
    const Vec3 a = f[0] - ref;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
      six_volume += a.dot((f[i] - ref).cross(f[i + 1] - ref));
    }
  }
  return std::max(0.0, six_volume / 6.0);
}

// Strict weak ordering over the raw box data.
bool canonical_less(const OrientedBox& a, const OrientedBox& b) {
  std::array<double, 15> ka{}, kb{};
  auto fill = [](const OrientedBox& box, std::array<double, 15>& key) {
    for (int i = 0; i < 3; ++i) key[i] = box.center()[i];
    for (int i = 0; i < 9; ++i) key[3 + i] = box.rotation()(i / 3, i % 3);
    for (int i = 0; i < 3; ++i) key[12 + i] = box.half_extents()[i];
  };
  fill(a, ka);
  fill(b, kb);
  return std::lexicographical_compare(ka.begin(), ka.end(), kb.begin(), kb.end());
}

}  // namespace

double intersection_volume(const OrientedBox& a, const OrientedBox& b) {
  const double reach = a.bounding_radius() + b.bounding_radius();
  if ((a.center() - b.center()).squaredNorm() > reach * reach) return 0.0;
  if (a == b) return box_volume(a);

  const OrientedBox& subject = canonical_less(a, b) ? a : b;
  const OrientedBox& clipper = canonical_less(a, b) ? b : a;
  std::vector<Polygon> faces = box_faces(subject);
  for (const auto& plane : box_planes(clipper)) {
    faces = clip(faces, plane);
    if (faces.empty()) return 0.0;
  }
  return std::min(polyhedron_volume(faces), std::min(box_volume(a), box_volume(b)));
}

double iou(const OrientedBox& a, const OrientedBox& b) {
  if (a == b) return 1.0;
  const double inter = intersection_volume(a, b);
  if (inter <= 0.0) return 0.0;
  const double va = box_volume(a);
  const double vb = box_volume(b);
  const double uni = va + vb - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double min_corner_distance(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : ca) {
    for (const auto& q : cb) best = std::min(best, (p - q).squaredNorm());
  }
  return std::sqrt(best);
}

Mat3 yaw_rotation(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
}

}  // namespace rearrange
