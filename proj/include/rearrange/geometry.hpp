#pragma once

#include <array>
#include <Eigen/Dense>

namespace rearrange {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Membership tolerance for clipping planes (meters).
inline constexpr double kPlaneTolerance = 1e-9;

/// An oriented 3D box. Construction validates the rotation and extents, so
/// every live value is non-degenerate.
class OrientedBox {
 public:
  /// Throws std::invalid_argument if `rotation` is not a proper rotation
  /// (|RᵀR − I| entries > 1e-9, det ≠ +1) or any half extent is ≤ 0.
  OrientedBox(const Vec3& center, const Mat3& rotation, const Vec3& half_extents);

  static OrientedBox axis_aligned(const Vec3& center, const Vec3& half_extents);

  const Vec3& center() const { return center_; }
  const Mat3& rotation() const { return rotation_; }
  const Vec3& half_extents() const { return half_extents_; }

  /// Corners in canonical sign order (−−−, −−+, −+−, −++, +−−, +−+, ++−, +++)
  /// over the local (x, y, z) axes.
  std::array<Vec3, 8> corners() const;

  /// Inclusive containment test, used by the sampling oracle and placement.
  bool contains(const Vec3& point, double tolerance = 0.0) const;

  /// Radius of the circumscribed sphere.
  double bounding_radius() const { return half_extents_.norm(); }

  /// Axis-aligned bounds in world coordinates.
  void world_bounds(Vec3& lo, Vec3& hi) const;

  /// Same box rigidly moved: x ↦ R·x + t.
  OrientedBox transformed(const Mat3& rotation, const Vec3& translation) const;

  bool operator==(const OrientedBox& other) const;

 private:
  Vec3 center_;
  Mat3 rotation_;
  Vec3 half_extents_;
};

double box_volume(const OrientedBox& box);

/// Exact volume of the intersection of two oriented boxes.
double intersection_volume(const OrientedBox& a, const OrientedBox& b);

/// Exact intersection-over-union in [0, 1]. Symmetric in its arguments bit
/// for bit: the pair is put in a canonical order before clipping.
double iou(const OrientedBox& a, const OrientedBox& b);

/// Minimum Euclidean distance over the 8×8 corner pairs.
double min_corner_distance(const OrientedBox& a, const OrientedBox& b);

/// Rotation about +z by `yaw` radians.
Mat3 yaw_rotation(double yaw);

}  // namespace rearrange
