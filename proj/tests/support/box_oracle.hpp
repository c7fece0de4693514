#pragma once

// Sampling oracle for box overlap. Independent of the clipping path: it only
// uses point containment.

#include <algorithm>
#include <cstdint>
#include <random>

#include "rearrange/geometry.hpp"

namespace rearrange::testing {

inline double monte_carlo_iou(const OrientedBox& a, const OrientedBox& b, std::size_t samples,
                              std::uint64_t seed) {
  Vec3 alo, ahi, blo, bhi;
  a.world_bounds(alo, ahi);
  b.world_bounds(blo, bhi);
  const Vec3 lo = alo.cwiseMin(blo);
  const Vec3 hi = ahi.cwiseMax(bhi);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y()), uz(lo.z(), hi.z());
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec3 p(ux(gen), uy(gen), uz(gen));
    const bool in_a = a.contains(p);
    const bool in_b = b.contains(p);
    both += (in_a && in_b);
    either += (in_a || in_b);
  }
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

inline Mat3 random_rotation(std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(gen), n(gen), n(gen), n(gen));
  q.normalize();
  return q.toRotationMatrix();
}

inline OrientedBox random_box(std::mt19937_64& gen, double spread = 1.0) {
  std::uniform_real_distribution<double> ext(0.05, 1.0);
  std::uniform_real_distribution<double> pos(-spread, spread);
  return OrientedBox(Vec3(pos(gen), pos(gen), pos(gen)), random_rotation(gen),
                     Vec3(ext(gen), ext(gen), ext(gen)));
}

/// A second box placed near `a` so that pairs overlap often.
inline OrientedBox random_neighbour(std::mt19937_64& gen, const OrientedBox& a) {
  std::uniform_real_distribution<double> ext(0.05, 1.0);
  std::uniform_real_distribution<double> off(-1.0, 1.0);
  const Vec3 shift = Vec3(off(gen), off(gen), off(gen)).cwiseProduct(a.half_extents());
  return OrientedBox(a.center() + a.rotation() * shift, random_rotation(gen),
                     Vec3(ext(gen), ext(gen), ext(gen)));
}

}  // namespace rearrange::testing
