#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rearrange/episode.hpp"

namespace rearrange {

inline constexpr int kDatasetFormatVersion = 1;

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Split { kTrain, kVal, kTest };
inline constexpr std::array<Split, 3> kSplits{Split::kTrain, Split::kVal, Split::kTest};

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct DatasetConfig {
  int rooms_per_category = 30;
  int episodes_per_room = 50;
  std::uint64_t master_seed = 0;

  bool operator==(const DatasetConfig&) const = default;
};

/// Rooms per category assigned to train, val, test. 30 rooms give 20/5/5;
/// smaller counts hold out max(1, n/6) rooms each for val and test when
/// n ≥ 3 and put everything in train otherwise.
std::array<int, 3> rooms_per_split(int rooms_per_category);

struct DatasetFile {
  int format_version = kDatasetFormatVersion;
  std::uint64_t master_seed = 0;
  std::string catalog_hash;
  DatasetConfig config;
  std::vector<std::shared_ptr<const RoomLayout>> rooms;
  std::map<Split, std::vector<std::shared_ptr<const RearrangementEpisode>>> splits;

  std::size_t split_size(Split s) const;
  std::size_t episode_count() const;
  /// nullptr when absent.
  std::shared_ptr<const RearrangementEpisode> find_episode(const std::string& id) const;

  bool operator==(const DatasetFile& other) const;
};

/// Room i (category-major) is seeded with derive_seed(master, {i}); its
/// episode k with derive_seed(master, {i, k + 1}).
std::uint64_t room_seed(std::uint64_t master, std::uint64_t room_index);
std::uint64_t episode_seed(std::uint64_t master, std::uint64_t room_index, std::uint64_t episode_index);

DatasetFile build_dataset(const DatasetConfig& config, const Catalog& catalog = shipped_catalog());

/// Canonical JSON text of the dataset.
std::string dataset_to_json(const DatasetFile& dataset);
/// Validates format_version and catalog_hash. Throws SchemaError (with a JSON
/// pointer) on schema violations and DatasetError on malformed JSON.
DatasetFile dataset_from_json(std::string_view text, const Catalog& catalog = shipped_catalog());

/// Writes gzip when the path ends in ".gz". Throws DatasetError on I/O failure.
void save_dataset(const DatasetFile& dataset, const std::filesystem::path& path);
DatasetFile load_dataset(const std::filesystem::path& path, const Catalog& catalog = shipped_catalog());

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace rearrange
