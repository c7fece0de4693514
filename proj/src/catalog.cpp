#include "rearrange/catalog.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>

namespace rearrange {

std::string_view to_string(Placement placement) {
  switch (placement) {
    case Placement::kFloor: return "floor";
    case Placement::kSurface: return "surface";
    case Placement::kWallMounted: return "wall-mounted";
  }
  return "surface";
}

CatalogError::CatalogError(std::size_t line, const std::string& message)
    : std::runtime_error(line == 0 ? "catalog: " + message
                                   : "catalog line " + std::to_string(line) + ": " + message),
      line_(line) {}

Catalog::Catalog(std::vector<ObjectClass> classes) : classes_(std::move(classes)) {
  for (std::size_t i = 0; i < classes_.size(); ++i) index_.emplace(classes_[i].name, i);
}

const ObjectClass* Catalog::find(std::string_view name) const {
  const auto it = index_.find(name);
  return it == index_.end() ? nullptr : &classes_[it->second];
}

const ObjectClass& Catalog::at(std::string_view name) const {
  const ObjectClass* cls = find(name);
  if (cls == nullptr) throw std::out_of_range("unknown object class: " + std::string(name));
  return *cls;
}

std::vector<std::string> Catalog::pickupable_names() const {
  std::vector<std::string> out;
  for (const auto& c : classes_) {
    if (c.pickupable) out.push_back(c.name);
  }
  return out;
}

std::vector<std::string> Catalog::openable_only_names() const {
  std::vector<std::string> out;
  for (const auto& c : classes_) {
    if (c.openness_tracked()) out.push_back(c.name);
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

bool parse_flag(std::string_view field, std::size_t line, const char* column) {
  if (field == "yes") return true;
  if (field == "no") return false;
  throw CatalogError(line, std::string(column) + " must be yes/no, got '" + std::string(field) + "'");
}

double parse_length(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !(value > 0.0)) {
    throw CatalogError(line, "footprint component '" + std::string(field) + "' is not a positive number");
  }
  return value;
}

}  // namespace

Catalog load_catalog(std::string_view text) {
  std::vector<ObjectClass> classes;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 6) {
      throw CatalogError(line_no, "expected 6 tab-separated fields, got " + std::to_string(fields.size()));
    }
    ObjectClass cls;
    cls.name = std::string(fields[0]);
    if (cls.name.empty()) throw CatalogError(line_no, "empty class name");
    cls.openable = parse_flag(fields[1], line_no, "openable");
    cls.pickupable = parse_flag(fields[2], line_no, "pickupable");
    cls.fragile = parse_flag(fields[3], line_no, "fragile");
    const auto dims = split(fields[4], ',');
    if (dims.size() != 3) throw CatalogError(line_no, "footprint must be three comma-separated lengths");
    cls.footprint = Vec3(parse_length(dims[0], line_no), parse_length(dims[1], line_no),
                         parse_length(dims[2], line_no));
    if (fields[5] == "floor") {
      cls.placement = Placement::kFloor;
    } else if (fields[5] == "surface") {
      cls.placement = Placement::kSurface;
    } else if (fields[5] == "wall-mounted") {
      cls.placement = Placement::kWallMounted;
    } else {
      throw CatalogError(line_no, "unknown placement '" + std::string(fields[5]) + "'");
    }
    for (const auto& existing : classes) {
      if (existing.name == cls.name) throw CatalogError(line_no, "duplicate class " + cls.name);
    }
    classes.push_back(std::move(cls));
  }

  std::size_t pickupable = 0, openable_only = 0;
  for (const auto& c : classes) {
    pickupable += c.pickupable;
    openable_only += c.openness_tracked();
  }
  if (classes.size() != kCatalogClassCount || pickupable != kCatalogPickupableCount ||
      openable_only != kCatalogOpenableOnlyCount) {
    throw CatalogError(0, "integrity check failed: " + std::to_string(classes.size()) + " classes, " +
                              std::to_string(pickupable) + " pickupable, " +
                              std::to_string(openable_only) + " openable-only (expected 118/62/10)");
  }
  Catalog catalog(std::move(classes));
  catalog.set_digest(fnv1a_hex(text));
  return catalog;
}

const Catalog& shipped_catalog() {
  static const Catalog catalog = load_catalog(shipped_catalog_text());
  return catalog;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rearrange
