#include "rearrange/dataset.hpp"

#include <zlib.h>

#include <cstdio>

#include "rearrange/generator.hpp"
#include "rearrange/serialization.hpp"

namespace rearrange {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  for (Split s : kSplits) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown split: " + std::string(name));
}

std::array<int, 3> rooms_per_split(int n) {
  if (n < 3) return {n, 0, 0};
  const int held = std::max(1, n / 6);
  return {n - 2 * held, held, held};
}

std::size_t DatasetFile::split_size(Split s) const {
  const auto it = splits.find(s);
  return it == splits.end() ? 0 : it->second.size();
}

std::size_t DatasetFile::episode_count() const {
  std::size_t n = 0;
  for (const auto& [s, eps] : splits) n += eps.size();
  return n;
}

std::shared_ptr<const RearrangementEpisode> DatasetFile::find_episode(const std::string& id) const {
  for (const auto& [s, eps] : splits) {
    for (const auto& e : eps) {
      if (e->episode_id == id) return e;
    }
  }
  return nullptr;
}

bool DatasetFile::operator==(const DatasetFile& other) const {
  if (format_version != other.format_version || master_seed != other.master_seed ||
      catalog_hash != other.catalog_hash || config != other.config || rooms.size() != other.rooms.size()) {
    return false;
  }
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    if (!(*rooms[i] == *other.rooms[i])) return false;
  }
  for (Split s : kSplits) {
    if (split_size(s) != other.split_size(s)) return false;
    if (split_size(s) == 0) continue;
    const auto& a = splits.at(s);
    const auto& b = other.splits.at(s);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!(*a[i] == *b[i])) return false;
    }
  }
  return true;
}

std::uint64_t room_seed(std::uint64_t master, std::uint64_t room_index) { return derive_seed(master, {room_index}); }

std::uint64_t episode_seed(std::uint64_t master, std::uint64_t room_index, std::uint64_t episode_index) {
  return derive_seed(master, {room_index, episode_index + 1});
}

namespace {

std::string two_digits(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

std::string three_digits(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", v);
  return buf;
}

}  // namespace

DatasetFile build_dataset(const DatasetConfig& config, const Catalog& catalog) {
  if (config.rooms_per_category < 1 || config.episodes_per_room < 1) {
    throw std::invalid_argument("build_dataset: rooms_per_category and episodes_per_room must be positive");
  }
  DatasetFile ds;
  ds.master_seed = config.master_seed;
  ds.catalog_hash = catalog.digest();
  ds.config = config;
  for (Split s : kSplits) ds.splits[s];
  const auto per_split = rooms_per_split(config.rooms_per_category);
  std::uint64_t room_index = 0;
  for (RoomCategory category : kRoomCategories) {
    for (int k = 0; k < config.rooms_per_category; ++k, ++room_index) {
      const std::string room_id = std::string(to_string(category)) + "_" + two_digits(k);
      auto room = std::make_shared<const RoomLayout>(
          generate_room(room_seed(config.master_seed, room_index), category, catalog, room_id));
      ds.rooms.push_back(room);
      const Split split = k < per_split[0] ? Split::kTrain : (k < per_split[0] + per_split[1] ? Split::kVal : Split::kTest);
      const RoomContext context(room);
      for (int e = 0; e < config.episodes_per_room; ++e) {
        ds.splits[split].push_back(std::make_shared<const RearrangementEpisode>(generate_rearrangement(
            context, episode_seed(config.master_seed, room_index, e), room_id + "__" + three_digits(e))));
      }
    }
  }
  return ds;
}

std::string dataset_to_json(const DatasetFile& ds) {
  Json rooms = Json::array();
  for (const auto& r : ds.rooms) rooms.push_back(to_json(*r));
  Json splits = Json::object();
  for (Split s : kSplits) {
    Json eps = Json::array();
    if (ds.split_size(s)) {
      for (const auto& e : ds.splits.at(s)) eps.push_back(to_json(*e));
    }
    splits[std::string(to_string(s))] = std::move(eps);
  }
  const Json doc = {{"format_version", ds.format_version},
                    {"master_seed", ds.master_seed},
                    {"catalog_hash", ds.catalog_hash},
                    {"config",
                     {{"rooms_per_category", ds.config.rooms_per_category},
                      {"episodes_per_room", ds.config.episodes_per_room}}},
                    {"rooms", std::move(rooms)},
                    {"splits", std::move(splits)}};
  return canonical_dump(doc) + "\n";
}

DatasetFile dataset_from_json(std::string_view text, const Catalog& catalog) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DatasetError(std::string("dataset is not valid JSON: ") + e.what());
  }
  try {
    DatasetFile ds;
    if (!doc.is_object()) throw SchemaError("", "expected an object");
    const auto& fv = doc.at("format_version");
    if (!fv.is_number_integer() || fv.get<int>() != kDatasetFormatVersion) {
      throw SchemaError("/format_version", "unsupported format version " + fv.dump());
    }
    const auto& hash = doc.at("catalog_hash");
    if (!hash.is_string() || hash.get<std::string>() != catalog.digest()) {
      throw SchemaError("/catalog_hash", "dataset was built from a different catalog (" + hash.dump() + ")");
    }
    ds.catalog_hash = hash.get<std::string>();
    const auto& seed = doc.at("master_seed");
    if (!seed.is_number_integer()) throw SchemaError("/master_seed", "expected an unsigned integer");
    ds.master_seed = seed.get<std::uint64_t>();
    const auto& cfg = doc.at("config");
    ds.config.rooms_per_category = cfg.at("rooms_per_category").get<int>();
    ds.config.episodes_per_room = cfg.at("episodes_per_room").get<int>();
    ds.config.master_seed = ds.master_seed;

    std::map<std::string, std::shared_ptr<const RoomLayout>> by_id;
    const auto& rooms = doc.at("rooms");
    if (!rooms.is_array()) throw SchemaError("/rooms", "expected an array");
    for (std::size_t i = 0; i < rooms.size(); ++i) {
      auto room = std::make_shared<const RoomLayout>(room_from_json(rooms[i], catalog, "/rooms/" + std::to_string(i)));
      if (!by_id.emplace(room->room_id, room).second) {
        throw SchemaError("/rooms/" + std::to_string(i), "duplicate room id " + room->room_id);
      }
      ds.rooms.push_back(std::move(room));
    }
    const auto& splits = doc.at("splits");
    for (Split s : kSplits) {
      const std::string name(to_string(s));
      const std::string base = "/splits/" + name;
      const auto& eps = splits.at(name);
      if (!eps.is_array()) throw SchemaError(base, "expected an array");
      auto& out = ds.splits[s];
      for (std::size_t i = 0; i < eps.size(); ++i) {
        const std::string path = base + "/" + std::to_string(i);
        const auto rid = eps[i].find("room_id");
        if (rid == eps[i].end() || !rid->is_string()) throw SchemaError(path + "/room_id", "missing");
        const auto room = by_id.find(rid->get<std::string>());
        if (room == by_id.end()) throw SchemaError(path + "/room_id", "unknown room " + rid->dump());
        out.push_back(std::make_shared<const RearrangementEpisode>(
            episode_from_json(eps[i], room->second, catalog, path)));
      }
    }
    return ds;
  } catch (const Json::exception& e) {
    throw DatasetError(std::string("invalid dataset: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw DatasetError("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw DatasetError("cannot read " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.extension() == ".gz") {
    gzFile f = gzopen(path.c_str(), "wb6");
    if (f == nullptr) throw DatasetError("cannot write " + path.string());
    std::size_t off = 0;
    while (off < bytes.size()) {
      const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(bytes.size() - off, 1u << 20));
      if (gzwrite(f, bytes.data() + off, chunk) != static_cast<int>(chunk)) {
        gzclose(f);
        throw DatasetError("cannot write " + path.string());
      }
      off += chunk;
    }
    if (gzclose(f) != Z_OK) throw DatasetError("cannot write " + path.string());
    return;
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw DatasetError("cannot write " + path.string());
  const bool ok = std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size();
  if (std::fclose(f) != 0 || !ok) throw DatasetError("cannot write " + path.string());
}

void save_dataset(const DatasetFile& dataset, const std::filesystem::path& path) {
  write_file(path, dataset_to_json(dataset));
}

DatasetFile load_dataset(const std::filesystem::path& path, const Catalog& catalog) {
  return dataset_from_json(read_file(path), catalog);
}

}  // namespace rearrange
