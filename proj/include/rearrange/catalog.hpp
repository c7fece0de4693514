#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rearrange/geometry.hpp"

namespace rearrange {

enum class Placement { kFloor, kSurface, kWallMounted };

std::string_view to_string(Placement placement);

struct ObjectClass {
  std::string name;
  bool openable = false;
  bool pickupable = false;
  bool fragile = false;
  Vec3 footprint = Vec3::Zero();  // default half extents, meters
  Placement placement = Placement::kSurface;

  /// Openable and not pickupable: compared by openness only.
  bool openness_tracked() const { return openable && !pickupable; }
  bool rearrangeable() const { return pickupable || openable; }
};

/// Malformed catalog text. `line()` is 1-based; 0 for whole-file problems.
class CatalogError : public std::runtime_error {
 public:
  CatalogError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::size_t kCatalogClassCount = 118;
inline constexpr std::size_t kCatalogPickupableCount = 62;
inline constexpr std::size_t kCatalogOpenableOnlyCount = 10;

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<ObjectClass> classes);

  const std::vector<ObjectClass>& classes() const { return classes_; }
  const ObjectClass& at(std::string_view name) const;
  const ObjectClass* find(std::string_view name) const;
  std::size_t size() const { return classes_.size(); }

  /// Alphabetical, as listed in the catalog file.
  std::vector<std::string> pickupable_names() const;
  std::vector<std::string> openable_only_names() const;

  /// FNV-1a of the text the catalog was parsed from, as 16 hex digits.
  const std::string& digest() const { return digest_; }
  void set_digest(std::string digest) { digest_ = std::move(digest); }

 private:
  std::vector<ObjectClass> classes_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::string digest_;
};

/// Parses the tab-separated catalog: name, openable, pickupable, fragile,
/// "fx,fy,fz" half extents, placement. Blank lines and lines starting with
/// '#' are skipped. Enforces the 118 / 62 / 10 class counts.
Catalog load_catalog(std::string_view text);

/// Text of data/catalog.tsv, embedded at build time.
std::string_view shipped_catalog_text();

/// Parsed once on first use.
const Catalog& shipped_catalog();

std::string fnv1a_hex(std::string_view bytes);

}  // namespace rearrange
