#include "rearrange/serialization.hpp"

#include <cmath>

namespace rearrange {

namespace {

std::string child(const std::string& path, std::string_view key) {
  std::string out = path + "/";
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(child(path, key), "missing");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw SchemaError(path, "expected a boolean");
  return j.get<bool>();
}

std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& path, std::size_t size = 0) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  if (size && j.size() != size) throw SchemaError(path, "expected " + std::to_string(size) + " elements");
  return j;
}

double number_at(const Json& j, const char* key, const std::string& path) {
  return number(field(j, key, path), child(path, key));
}
int integer_at(const Json& j, const char* key, const std::string& path) {
  return integer(field(j, key, path), child(path, key));
}
bool boolean_at(const Json& j, const char* key, const std::string& path) {
  return boolean(field(j, key, path), child(path, key));
}
std::string string_at(const Json& j, const char* key, const std::string& path) {
  return string(field(j, key, path), child(path, key));
}

Json vec(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const Json& j, const std::string& path) {
  array(j, path, 3);
  return {number(j[0], child(path, 0)), number(j[1], child(path, 1)), number(j[2], child(path, 2))};
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> optional_number_from(const Json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  return number(j, path);
}

Json occupancy_rows(const LocalOccupancy& occ) {
  Json rows = Json::array();
  for (int r = 0; r < kLocalOccupancySpan; ++r) {
    std::string row;
    for (int c = 0; c < kLocalOccupancySpan; ++c) row += occ[r * kLocalOccupancySpan + c] ? '1' : '0';
    rows.push_back(row);
  }
  return rows;
}

LocalOccupancy occupancy_from(const Json& j, const std::string& path) {
  array(j, path, kLocalOccupancySpan);
  LocalOccupancy occ{};
  for (int r = 0; r < kLocalOccupancySpan; ++r) {
    const std::string row = string(j[r], child(path, r));
    if (row.size() != kLocalOccupancySpan || row.find_first_not_of("01") != std::string::npos) {
      throw SchemaError(child(path, r), "expected 7 characters of 0/1");
    }
    for (int c = 0; c < kLocalOccupancySpan; ++c) occ[r * kLocalOccupancySpan + c] = row[c] == '1';
  }
  return occ;
}

Json objects_json(const std::vector<ObjectState>& objects) {
  Json out = Json::object();
  for (const auto& o : objects) out[o.instance_id] = to_json(o);
  return out;
}

std::vector<ObjectState> objects_from(const Json& j, const Catalog& catalog, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  std::vector<ObjectState> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    out.push_back(object_from_json(it.value(), it.key(), catalog, child(path, it.key())));
  }
  return out;
}

std::vector<InstanceId> ids_from(const Json& j, const std::string& path) {
  array(j, path);
  std::vector<InstanceId> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string(j[i], child(path, i)));
  return out;
}

SceneState scene_from(const Json& j, const RearrangementEpisode& ep, const Catalog& catalog,
                      const std::string& path) {
  SceneState s;
  s.room = ep.room;
  s.agent = ep.start_agent;
  for (auto& o : objects_from(j, catalog, path)) s.objects.emplace(o.instance_id, std::move(o));
  return s;
}

Json scene_objects(const SceneState& s) {
  Json out = Json::object();
  for (const auto& [id, o] : s.objects) out[id] = to_json(o);
  return out;
}

}  // namespace

Json to_json(const Cell& cell) { return Json::array({cell.col, cell.row}); }

Json to_json(const AgentPose& agent) {
  return {{"cell", to_json(agent.cell)},
          {"yaw", agent.yaw},
          {"pitch", agent.pitch},
          {"standing", agent.standing},
          {"holding", agent.holding ? Json(*agent.holding) : Json(nullptr)}};
}

Json to_json(const ObjectState& o) {
  const auto& r = o.pose().rotation;
  return {{"class", o.cls->name},
          {"position", vec(o.pose().position)},
          {"rotation", Json::array({r[0], r[1], r[2], r[3]})},
          {"openness", optional_number(o.openness)},
          {"broken", o.broken},
          {"under_surface", o.under_surface}};
}

Json to_json(const RoomLayout& room) {
  std::string occ;
  occ.reserve(room.occupancy.size());
  for (auto v : room.occupancy) occ += v ? '1' : '0';
  Json surfaces = Json::array();
  for (const auto& s : room.surfaces) {
    surfaces.push_back({{"rect", Json::array({s.rect.x0, s.rect.y0, s.rect.x1, s.rect.y1})},
                        {"height", s.height},
                        {"owner", s.owner}});
  }
  return {{"room_id", room.room_id},
          {"category", std::string(to_string(room.category))},
          {"width", room.width},
          {"depth", room.depth},
          {"entry", to_json(room.entry)},
          {"occupancy", occ},
          {"surfaces", surfaces},
          {"static_objects", objects_json(room.static_objects)},
          {"objects", objects_json(room.objects)}};
}

Json to_json(const MetricsReport& m) {
  return {{"success", m.success},
          {"fixed_strict", m.fixed_strict},
          {"energy_remaining_prop", m.energy_remaining_prop},
          {"num_changed", m.num_changed},
          {"misplaced_start", m.misplaced_start},
          {"misplaced_end", m.misplaced_end},
          {"newly_misplaced", m.newly_misplaced}};
}

Json to_json(const VisibleEntry& e) {
  return {{"class", e.cls}, {"offset", vec(e.offset)}, {"openness", optional_number(e.openness)},
          {"distance", e.distance}};
}

Json to_json(const SceneView& view) {
  Json visible = Json::array();
  for (const auto& e : view.visible) visible.push_back(to_json(e));
  return {{"visible", visible}, {"local_occupancy", occupancy_rows(view.occupancy)}};
}

Json to_json(const Observation& o) {
  Json visible = Json::array();
  for (const auto& e : o.visible) visible.push_back(to_json(e));
  return {{"stage", std::string(to_string(o.stage))},
          {"position", Json::array({o.position_dx, o.position_dy})},
          {"yaw", o.yaw},
          {"pitch", o.pitch},
          {"standing", o.standing},
          {"holding", o.holding_class ? Json(*o.holding_class) : Json(nullptr)},
          {"visible", visible},
          {"local_occupancy", occupancy_rows(o.local_occupancy)},
          {"walkthrough_view", o.walkthrough_view ? to_json(*o.walkthrough_view) : Json(nullptr)},
          {"last_action_success", o.last_action_success}};
}

Json to_json(const RearrangementEpisode& ep) {
  return {{"episode_id", ep.episode_id},
          {"room_id", ep.room->room_id},
          {"seed", ep.seed},
          {"start_agent", to_json(ep.start_agent)},
          {"opened_sample", ep.opened_sample},
          {"moved_sample", ep.moved_sample},
          {"s0", scene_objects(ep.s0)},
          {"s_star", scene_objects(ep.s_star)}};
}

Cell cell_from_json(const Json& j, const std::string& path) {
  array(j, path, 2);
  return {integer(j[0], child(path, 0)), integer(j[1], child(path, 1))};
}

AgentPose agent_from_json(const Json& j, const std::string& path) {
  AgentPose a;
  a.cell = cell_from_json(field(j, "cell", path), child(path, "cell"));
  a.yaw = integer_at(j, "yaw", path);
  if (std::find(kYaws.begin(), kYaws.end(), a.yaw) == kYaws.end()) throw SchemaError(child(path, "yaw"), "bad yaw");
  a.pitch = integer_at(j, "pitch", path);
  if (std::find(kPitches.begin(), kPitches.end(), a.pitch) == kPitches.end()) {
    throw SchemaError(child(path, "pitch"), "bad pitch");
  }
  a.standing = boolean_at(j, "standing", path);
  const Json& h = field(j, "holding", path);
  if (!h.is_null()) a.holding = string(h, child(path, "holding"));
  return a;
}

ObjectState object_from_json(const Json& j, const std::string& id, const Catalog& catalog, const std::string& path) {
  const std::string name = string_at(j, "class", path);
  const ObjectClass* cls = catalog.find(name);
  if (cls == nullptr) throw SchemaError(child(path, "class"), "unknown class " + name);
  Pose pose;
  pose.position = vec_from(field(j, "position", path), child(path, "position"));
  const Json& rot = array(field(j, "rotation", path), child(path, "rotation"), 4);
  for (std::size_t i = 0; i < 4; ++i) pose.rotation[i] = number(rot[i], child(child(path, "rotation"), i));
  double qn = 0.0;
  for (double v : pose.rotation) qn += v * v;
  qn = std::sqrt(qn);
  if (!(std::abs(qn - 1.0) <= 1e-6)) throw SchemaError(child(path, "rotation"), "not a unit quaternion");
  const std::optional<double> openness =
      optional_number_from(field(j, "openness", path), child(path, "openness"));
  if (openness.has_value() != cls->openable) {
    throw SchemaError(child(path, "openness"), cls->openable ? "missing for openable class" : "set on non-openable class");
  }
  if (openness && (*openness < 0.0 || *openness > 1.0)) throw SchemaError(child(path, "openness"), "outside [0, 1]");
  ObjectState s;
  try {
    s = ObjectState::make(id, *cls, pose, openness);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(child(path, "rotation"), e.what());
  }
  s.broken = boolean_at(j, "broken", path);
  s.under_surface = boolean_at(j, "under_surface", path);
  return s;
}

RoomLayout room_from_json(const Json& j, const Catalog& catalog, const std::string& path) {
  RoomLayout room;
  room.room_id = string_at(j, "room_id", path);
  try {
    room.category = parse_room_category(string_at(j, "category", path));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(child(path, "category"), e.what());
  }
  room.width = integer_at(j, "width", path);
  room.depth = integer_at(j, "depth", path);
  room.entry = cell_from_json(field(j, "entry", path), child(path, "entry"));
  const std::string occ = string_at(j, "occupancy", path);
  if (room.width <= 0 || room.depth <= 0 || occ.size() != std::size_t(room.width) * room.depth ||
      occ.find_first_not_of("01") != std::string::npos) {
    throw SchemaError(child(path, "occupancy"), "does not match width × depth");
  }
  for (char c : occ) room.occupancy.push_back(c == '1' ? 1 : 0);
  const std::string spath = child(path, "surfaces");
  const Json& surfaces = array(field(j, "surfaces", path), spath);
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const std::string p = child(spath, i);
    const Json& r = array(field(surfaces[i], "rect", p), child(p, "rect"), 4);
    Surface s;
    s.rect = {number(r[0], p), number(r[1], p), number(r[2], p), number(r[3], p)};
    s.height = number_at(surfaces[i], "height", p);
    s.owner = string_at(surfaces[i], "owner", p);
    room.surfaces.push_back(std::move(s));
  }
  room.static_objects = objects_from(field(j, "static_objects", path), catalog, child(path, "static_objects"));
  room.objects = objects_from(field(j, "objects", path), catalog, child(path, "objects"));
  try {
    room.validate();
  } catch (const InvalidRoomError& e) {
    throw SchemaError(path, e.what());
  }
  return room;
}

MetricsReport metrics_from_json(const Json& j, const std::string& path) {
  MetricsReport m;
  m.success = integer_at(j, "success", path);
  m.fixed_strict = number_at(j, "fixed_strict", path);
  m.energy_remaining_prop = number_at(j, "energy_remaining_prop", path);
  m.num_changed = integer_at(j, "num_changed", path);
  m.misplaced_start = integer_at(j, "misplaced_start", path);
  m.misplaced_end = integer_at(j, "misplaced_end", path);
  m.newly_misplaced = integer_at(j, "newly_misplaced", path);
  return m;
}

namespace {

std::vector<VisibleEntry> visible_from(const Json& j, const std::string& path) {
  array(j, path);
  std::vector<VisibleEntry> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = child(path, i);
    VisibleEntry e;
    e.cls = string_at(j[i], "class", p);
    e.offset = vec_from(field(j[i], "offset", p), child(p, "offset"));
    e.openness = optional_number_from(field(j[i], "openness", p), child(p, "openness"));
    e.distance = number_at(j[i], "distance", p);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

Observation observation_from_json(const Json& j, const std::string& path) {
  Observation o;
  const std::string stage = string_at(j, "stage", path);
  if (stage == "walkthrough") o.stage = Stage::kWalkthrough;
  else if (stage == "unshuffle") o.stage = Stage::kUnshuffle;
  else throw SchemaError(child(path, "stage"), "unknown stage " + stage);
  const Json& pos = array(field(j, "position", path), child(path, "position"), 2);
  o.position_dx = number(pos[0], child(path, "position"));
  o.position_dy = number(pos[1], child(path, "position"));
  o.yaw = integer_at(j, "yaw", path);
  o.pitch = integer_at(j, "pitch", path);
  o.standing = boolean_at(j, "standing", path);
  const Json& h = field(j, "holding", path);
  if (!h.is_null()) o.holding_class = string(h, child(path, "holding"));
  o.visible = visible_from(field(j, "visible", path), child(path, "visible"));
  o.local_occupancy = occupancy_from(field(j, "local_occupancy", path), child(path, "local_occupancy"));
  const Json& w = field(j, "walkthrough_view", path);
  if (!w.is_null()) {
    const std::string wp = child(path, "walkthrough_view");
    SceneView v;
    v.visible = visible_from(field(w, "visible", wp), child(wp, "visible"));
    v.occupancy = occupancy_from(field(w, "local_occupancy", wp), child(wp, "local_occupancy"));
    o.walkthrough_view = std::move(v);
  }
  o.last_action_success = boolean_at(j, "last_action_success", path);
  return o;
}

RearrangementEpisode episode_from_json(const Json& j, std::shared_ptr<const RoomLayout> room, const Catalog& catalog,
                                       const std::string& path) {
  RearrangementEpisode ep;
  ep.episode_id = string_at(j, "episode_id", path);
  ep.room = std::move(room);
  const Json& seed = field(j, "seed", path);
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    throw SchemaError(child(path, "seed"), "expected an unsigned integer");
  }
  ep.seed = seed.get<std::uint64_t>();
  ep.start_agent = agent_from_json(field(j, "start_agent", path), child(path, "start_agent"));
  ep.opened_sample = ids_from(field(j, "opened_sample", path), child(path, "opened_sample"));
  ep.moved_sample = ids_from(field(j, "moved_sample", path), child(path, "moved_sample"));
  ep.s0 = scene_from(field(j, "s0", path), ep, catalog, child(path, "s0"));
  ep.s_star = scene_from(field(j, "s_star", path), ep, catalog, child(path, "s_star"));
  try {
    ep.validate();
  } catch (const InvalidEpisodeError& e) {
    throw SchemaError(path, e.what());
  }
  return ep;
}

}  // namespace rearrange
