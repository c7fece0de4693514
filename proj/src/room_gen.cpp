#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>

#include "rearrange/generator.hpp"

namespace rearrange {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kSurfaceLattice = 0.125;

struct Block {
  int c0 = 0, r0 = 0, w = 0, h = 0;
};

// Module-local frame: x along the wall, y from the wall into the room.
struct Frame {
  Vec3 anchor = Vec3::Zero();
  Vec3 ex = Vec3::UnitX();
  Vec3 ey = Vec3::UnitY();
  int quarter = 0;  // yaw in quarter turns, counter-clockwise

  Vec3 to_world(double lx, double ly, double z) const { return anchor + lx * ex + ly * ey + Vec3(0, 0, z); }
  double yaw() const { return quarter * kHalfPi; }
};

Frame frame_for(const Block& b, int quarter) {
  const double x0 = b.c0 * kCellSize, y0 = b.r0 * kCellSize;
  const double x1 = (b.c0 + b.w) * kCellSize, y1 = (b.r0 + b.h) * kCellSize;
  Frame f;
  f.quarter = quarter;
  switch (quarter) {
    case 0: f.anchor = {x0, y0, 0}; f.ex = {1, 0, 0}; f.ey = {0, 1, 0}; break;
    case 1: f.anchor = {x1, y0, 0}; f.ex = {0, 1, 0}; f.ey = {-1, 0, 0}; break;
    case 2: f.anchor = {x1, y1, 0}; f.ex = {-1, 0, 0}; f.ey = {0, -1, 0}; break;
    default: f.anchor = {x0, y1, 0}; f.ex = {0, -1, 0}; f.ey = {1, 0, 0}; break;
  }
  return f;
}

struct Slot {
  const char* cls;
  double lx, ly, z;
  bool essential;  // defines the module; always kept when viewable
};

struct ModuleSpec {
  const char* name;
  int along, deep;         // cells
  const char* furniture;   // static class, or nullptr
  bool surface;            // furniture top supports objects
  bool under_space;        // floor under the top holds objects
  std::vector<Slot> slots;
};

const ModuleSpec kCounter{"counter", 2, 2, "CounterTop", true, false,
                          {{"Cabinet", 0.25, 0.25, 0.28, false},
                           {"Drawer", 0.25, 0.25, 0.80, false},
                           {"Cabinet", 0.25, 0.24, 1.72, false}}};
const ModuleSpec kMicrowaveCounter{"microwave", 2, 2, "CounterTop", false, false,
                                   {{"Microwave", 0.25, 0.25, 1.04, true},
                                    {"Cabinet", 0.25, 0.25, 0.28, false},
                                    {"Drawer", 0.25, 0.25, 0.80, false}}};
const ModuleSpec kSinkCounter{"sink", 2, 2, "Sink", true, false,
                              {{"Cabinet", 0.25, 0.25, 0.28, false}, {"Drawer", 0.25, 0.25, 0.80, false}}};
const ModuleSpec kFridge{"fridge", 2, 2, nullptr, false, false, {{"Fridge", 0.25, 0.25, 0.90, true}}};
const ModuleSpec kToilet{"toilet", 2, 2, nullptr, false, false, {{"Toilet", 0.25, 0.25, 0.38, true}}};
const ModuleSpec kShower{"shower", 4, 4, nullptr, false, false, {{"ShowerDoor", 0.5, 0.98, 0.95, true}}};
const ModuleSpec kBathtub{"bathtub", 6, 3, "Bathtub", false, false, {{"ShowerCurtain", 0.75, 0.73, 1.2, true}}};
const ModuleSpec kHamper{"hamper", 2, 2, nullptr, false, false, {{"LaundryHamper", 0.25, 0.25, 0.30, true}}};
const ModuleSpec kSafe{"safe", 2, 2, nullptr, false, false, {{"Safe", 0.25, 0.25, 0.22, true}}};
const ModuleSpec kDresser{"dresser", 4, 2, "Dresser", true, false,
                          {{"Drawer", 0.25, 0.25, 0.2, false},
                           {"Drawer", 0.75, 0.25, 0.2, false},
                           {"Drawer", 0.25, 0.25, 0.5, false},
                           {"Drawer", 0.75, 0.25, 0.5, false},
                           {"Drawer", 0.25, 0.25, 0.8, false},
                           {"Drawer", 0.75, 0.25, 0.8, false}}};
const ModuleSpec kTvStand{"tvstand", 4, 2, "TVStand", true, false,
                          {{"Cabinet", 0.25, 0.25, 0.28, false}, {"Cabinet", 0.75, 0.25, 0.28, false}}};
const ModuleSpec kShelving{"shelving", 4, 2, "ShelvingUnit", true, false, {}};
const ModuleSpec kNightstand{"nightstand", 2, 2, "SideTable", true, false, {{"Drawer", 0.25, 0.25, 0.45, false}}};
const ModuleSpec kDesk{"desk", 4, 2, "Desk", true, true, {{"Drawer", 0.75, 0.25, 0.65, false}}};
const ModuleSpec kBed{"bed", 6, 8, "Bed", true, false, {}};
const ModuleSpec kSofa{"sofa", 8, 4, "Sofa", true, false, {}};
const ModuleSpec kDiningTable{"dining", 5, 4, "DiningTable", true, true, {}};
const ModuleSpec kCoffeeTable{"coffee", 4, 2, "CoffeeTable", true, true, {}};
const ModuleSpec kSideTable{"side", 2, 2, "SideTable", true, true, {}};

struct Weighted {
  const ModuleSpec* spec;
  int weight;
};

struct Recipe {
  std::vector<const ModuleSpec*> required;
  std::vector<Weighted> optional;
  std::vector<std::pair<const ModuleSpec*, double>> interior;  // with probability
  int max_blinds;
  std::vector<const char*> pool;  // pickupable classes
};

const Recipe& recipe(RoomCategory c) {
  static const Recipe kitchen{
      {&kFridge, &kCounter, &kCounter, &kMicrowaveCounter},
      {{&kCounter, 6}, {&kSinkCounter, 1}, {&kShelving, 1}},
      {{&kDiningTable, 0.7}},
      1,
      {"Apple", "AluminumFoil", "Bowl", "Bottle", "Bread", "ButterKnife", "CellPhone", "CreditCard", "Cup",
       "DishSponge", "Egg", "Fork", "Kettle", "Knife", "Ladle", "Lettuce", "Mug", "Pan", "PaperTowelRoll",
       "PepperShaker", "Plate", "Pot", "Potato", "SaltShaker", "SoapBottle", "Spatula", "Spoon", "Tomato",
       "WineBottle"}};
  static const Recipe living{
      {&kSofa, &kTvStand},
      {{&kDresser, 2}, {&kTvStand, 1}, {&kNightstand, 2}, {&kSafe, 1}, {&kShelving, 1}},
      {{&kCoffeeTable, 0.8}, {&kDiningTable, 0.4}, {&kSideTable, 0.5}},
      2,
      {"BasketBall", "Book", "Boots", "Bowl", "Box", "CD", "Candle", "CellPhone", "CreditCard", "Cup",
       "Dumbbell", "Footstool", "KeyChain", "Laptop", "Mug", "Newspaper", "Pen", "Pencil", "Pillow", "Plate",
       "RemoteControl", "Statue", "TableTopDecor", "TeddyBear", "TissueBox", "Vase", "Watch", "WateringCan"}};
  static const Recipe bathroom{
      {&kToilet, &kSinkCounter},
      {{&kSinkCounter, 2}, {&kCounter, 1}, {&kHamper, 1}},
      {},
      2,
      {"Book", "Bottle", "Box", "Boots", "Candle", "CellPhone", "Cloth", "CreditCard", "Cup", "DishSponge",
       "HandTowel", "KeyChain", "Mug", "Newspaper", "Pen", "Plunger", "ScrubBrush", "SoapBar", "SoapBottle",
       "SprayBottle", "Statue", "TableTopDecor", "TissueBox", "ToiletPaper", "Towel", "Vase", "Watch"}};
  static const Recipe bedroom{
      {&kBed, &kDresser},
      {{&kNightstand, 3}, {&kDesk, 2}, {&kHamper, 1}, {&kSafe, 1}, {&kDresser, 1}, {&kShelving, 1}},
      {{&kSideTable, 0.3}},
      2,
      {"AlarmClock", "BaseballBat", "BasketBall", "Book", "Boots", "Bottle", "Box", "CD", "CellPhone", "Cloth",
       "CreditCard", "Dumbbell", "KeyChain", "Laptop", "Mug", "Pen", "Pencil", "Pillow", "RemoteControl",
       "Statue", "TableTopDecor", "TeddyBear", "TennisRacket", "TissueBox", "Vase", "Watch"}};
  switch (c) {
    case RoomCategory::kKitchen: return kitchen;
    case RoomCategory::kLivingRoom: return living;
    case RoomCategory::kBathroom: return bathroom;
    case RoomCategory::kBedroom: return bedroom;
  }
  return kitchen;
}

bool has_under_space(std::string_view cls) {
  return cls == "DiningTable" || cls == "CoffeeTable" || cls == "Desk" || cls == "SideTable";
}

// Furniture volume that objects cannot enter: the whole box, or only the top
// slab for furniture with open space underneath.
OrientedBox solid_of(const ObjectState& s) {
  if (!has_under_space(s.cls->name)) return s.box();
  const Vec3& h = s.box().half_extents();
  const double top = s.box().center().z() + h.z();
  constexpr double kSlab = 0.03;
  Vec3 c = s.box().center();
  c.z() = top - kSlab;
  return OrientedBox(c, s.box().rotation(), Vec3(h.x(), h.y(), kSlab));
}

Pose yaw_pose(const Vec3& position, double yaw) {
  Pose p = Pose::from_yaw(position, yaw);
  for (auto& v : p.rotation) v = std::abs(v) < 1e-12 ? 0.0 : q9(v);
  for (int i = 0; i < 3; ++i) p.position[i] = q9(p.position[i]);
  return p;
}

struct Candidate {
  const ObjectClass* cls;
  Pose pose;
  bool essential;
};

class RoomBuilder {
 public:
  RoomBuilder(std::uint64_t seed, RoomCategory category, const Catalog& catalog, std::string room_id)
      : rng_(seed), catalog_(catalog), recipe_(recipe(category)) {
    room_.room_id = std::move(room_id);
    room_.category = category;
    room_.width = rng_.uniform_int(kMinRoomCells, kMaxRoomCells);
    room_.depth = rng_.uniform_int(kMinRoomCells, kMaxRoomCells);
    room_.occupancy.assign(std::size_t(room_.width) * room_.depth, 0);
    room_.entry = {room_.width / 2, 0};
  }

  RoomLayout build() {
    const int pickupable_target = kMinPickupable + rng_.binomial(16, 0.48125);
    const int openable_target = kMinOpenable + rng_.binomial(14, 0.4643);

    for (const ModuleSpec* spec : recipe_.required) place_wall_module(*spec);
    if (room_.category == RoomCategory::kBathroom) {
      place_wall_module(rng_.bernoulli(0.5) ? kShower : kBathtub);
    }
    for (const auto& [spec, p] : recipe_.interior) {
      if (rng_.bernoulli(p)) place_interior(*spec);
    }
    int total_weight = 0;
    for (const auto& w : recipe_.optional) total_weight += w.weight;
    for (int tries = 0; tries < 24 && candidate_pool_size() < static_cast<std::size_t>(openable_target + 4); ++tries) {
      int pick = rng_.uniform_int(0, total_weight - 1);
      for (const auto& w : recipe_.optional) {
        if ((pick -= w.weight) < 0) {
          place_wall_module(*w.spec);
          break;
        }
      }
    }
    add_blind_candidates();
    choose_openables(openable_target);
    place_pickupables(pickupable_target);
    std::sort(room_.static_objects.begin(), room_.static_objects.end(),
              [](const ObjectState& a, const ObjectState& b) { return a.instance_id < b.instance_id; });
    room_.validate();
    return std::move(room_);
  }

 private:
  bool in_entry_zone(Cell c) const {
    return c.row <= 2 && std::abs(c.col - room_.entry.col) <= 2;
  }

  bool block_free(const Block& b) const {
    if (b.c0 < 0 || b.r0 < 0 || b.c0 + b.w > room_.width || b.r0 + b.h > room_.depth) return false;
    for (int r = b.r0; r < b.r0 + b.h; ++r) {
      for (int c = b.c0; c < b.c0 + b.w; ++c) {
        if (room_.blocked({c, r}) || in_entry_zone({c, r})) return false;
      }
    }
    return true;
  }

  void mark(const Block& b, std::uint8_t v) {
    for (int r = b.r0; r < b.r0 + b.h; ++r) {
      for (int c = b.c0; c < b.c0 + b.w; ++c) room_.occupancy[room_.index({c, r})] = v;
    }
  }

  // Blocks `b` if every free cell stays connected to the entry.
  bool try_block(const Block& b) {
    mark(b, 1);
    const std::size_t free_cells = std::count(room_.occupancy.begin(), room_.occupancy.end(), 0);
    if (reachable_cells(room_).size() == free_cells) return true;
    mark(b, 0);
    return false;
  }

  bool place_wall_module(const ModuleSpec& spec) {
    for (int attempt = 0; attempt < 40; ++attempt) {
      const int wall = rng_.uniform_int(0, 3);
      const int length = (wall < 2) ? room_.width : room_.depth;
      if (length < spec.along) continue;
      const int s = rng_.uniform_int(0, length - spec.along);
      Block b;
      int quarter = 0;
      switch (wall) {
        case 0: b = {s, 0, spec.along, spec.deep}; quarter = 0; break;
        case 1: b = {s, room_.depth - spec.deep, spec.along, spec.deep}; quarter = 2; break;
        case 2: b = {0, s, spec.deep, spec.along}; quarter = 3; break;
        default: b = {room_.width - spec.deep, s, spec.deep, spec.along}; quarter = 1; break;
      }
      if (!block_free(b) || !try_block(b)) continue;
      install(spec, b, quarter);
      return true;
    }
    return false;
  }

  bool place_interior(const ModuleSpec& spec) {
    for (int attempt = 0; attempt < 40; ++attempt) {
      const int quarter = rng_.uniform_int(0, 3);
      const bool turned = quarter % 2 == 1;
      const int w = turned ? spec.deep : spec.along;
      const int h = turned ? spec.along : spec.deep;
      if (room_.width < w + 4 || room_.depth < h + 4) return false;
      const Block b{rng_.uniform_int(2, room_.width - w - 2), rng_.uniform_int(2, room_.depth - h - 2), w, h};
      // Keep a one-cell walkway around free-standing furniture.
      if (!block_free({b.c0 - 1, b.r0 - 1, b.w + 2, b.h + 2}) || !try_block(b)) continue;
      install(spec, b, quarter);
      return true;
    }
    return false;
  }

  void install(const ModuleSpec& spec, const Block& b, int quarter) {
    const Frame f = frame_for(b, quarter);
    const double along_m = spec.along * kCellSize, deep_m = spec.deep * kCellSize;
    if (spec.furniture != nullptr) {
      const ObjectClass& cls = catalog_.at(spec.furniture);
      const Pose pose = yaw_pose(f.to_world(along_m / 2, deep_m / 2, cls.footprint.z()), f.yaw());
      ObjectState s = ObjectState::make(cls.name + "_" + std::to_string(static_count_[cls.name]++), cls, pose);
      if (spec.surface) {
        Vec3 lo, hi;
        s.box().world_bounds(lo, hi);
        room_.surfaces.push_back({{q9(lo.x()), q9(lo.y()), q9(hi.x()), q9(hi.y())}, q9(hi.z()), cls.name});
      }
      room_.static_objects.push_back(std::move(s));
    }
    for (const Slot& slot : spec.slots) {
      const ObjectClass& cls = catalog_.at(slot.cls);
      candidates_.push_back({&cls, yaw_pose(f.to_world(slot.lx, slot.ly, slot.z), f.yaw()), slot.essential});
    }
  }

  std::size_t candidate_pool_size() const { return candidates_.size(); }

  void add_blind_candidates() {
    const int count = rng_.uniform_int(0, recipe_.max_blinds);
    const ObjectClass& cls = catalog_.at("Blinds");
    const double width = 2 * cls.footprint.x();
    const double depth = cls.footprint.y();
    for (int i = 0; i < count; ++i) {
      const int wall = rng_.uniform_int(1, 3);  // the south wall holds the entry
      const double length = (wall == 1 ? room_.width_m() : room_.depth_m());
      if (length < width + 0.5) continue;
      const double s = q9(rng_.uniform(0.25 + width / 2, length - 0.25 - width / 2));
      Vec3 pos;
      double yaw = 0;
      switch (wall) {
        case 1: pos = {s, room_.depth_m() - depth, 1.6}; yaw = 2 * kHalfPi; break;
        case 2: pos = {depth, s, 1.6}; yaw = 3 * kHalfPi; break;
        default: pos = {room_.width_m() - depth, s, 1.6}; yaw = kHalfPi; break;
      }
      candidates_.push_back({&cls, yaw_pose(pos, yaw), true});
    }
  }

  void choose_openables(int target) {
    const RoomContext ctx(std::make_shared<const RoomLayout>(room_));
    std::vector<std::size_t> essential, optional;
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      (candidates_[i].essential ? essential : optional).push_back(i);
    }
    rng_.shuffle(optional);
    std::vector<std::size_t> order = essential;
    order.insert(order.end(), optional.begin(), optional.end());
    std::vector<const ObjectState*> placed;
    std::deque<ObjectState> chosen;
    for (std::size_t i : order) {
      if (static_cast<int>(chosen.size()) >= target) break;
      const Candidate& c = candidates_[i];
      const std::string id = c.cls->name + "_" + std::to_string(instance_count_[c.cls->name]);
      ObjectState s = ObjectState::make(id, *c.cls, c.pose, 0.0);
      if (!ctx.viewable(s.box().center(), false) || overlaps_any(s.box(), placed)) continue;
      ++instance_count_[c.cls->name];
      chosen.push_back(std::move(s));
      placed.push_back(&chosen.back());
    }
    for (auto& s : chosen) room_.objects.push_back(std::move(s));
  }

  void place_pickupables(int target) {
    std::vector<const char*> pool = recipe_.pool;
    rng_.shuffle(pool);
    auto shared = std::make_shared<const RoomLayout>(room_);
    const RoomContext ctx(shared);
    std::deque<ObjectState> placed_states;
    std::vector<const ObjectState*> placed;
    for (const auto& o : room_.objects) placed.push_back(&o);
    int added = 0;
    for (const char* name : pool) {
      if (added >= target) break;
      const ObjectClass& cls = catalog_.at(name);
      const std::string id = cls.name + "_" + std::to_string(instance_count_[cls.name]);
      for (int attempt = 0; attempt < 60; ++attempt) {
        const PlacementSpot& spot = ctx.sample_spot(rng_, cls);
        const double yaw = rng_.uniform(0.0, 2.0 * std::numbers::pi);
        ObjectState s = ctx.place(id, cls, spot, yaw);
        if (!ctx.fits(s.box(), spot) || overlaps_any(s.box(), placed)) continue;
        if (!ctx.viewable(s.box().center(), s.under_surface)) continue;
        ++instance_count_[cls.name];
        placed_states.push_back(std::move(s));
        placed.push_back(&placed_states.back());
        ++added;
        break;
      }
    }
    if (added < kMinPickupable) {
      throw GenerationError("room " + room_.room_id + ": could only place " + std::to_string(added) +
                            " pickupable objects");
    }
    for (auto& s : placed_states) room_.objects.push_back(std::move(s));
    std::sort(room_.objects.begin(), room_.objects.end(),
              [](const ObjectState& a, const ObjectState& b) { return a.instance_id < b.instance_id; });
  }

  Rng rng_;
  const Catalog& catalog_;
  const Recipe& recipe_;
  RoomLayout room_;
  std::vector<Candidate> candidates_;
  std::map<std::string, int> static_count_;
  std::map<std::string, int> instance_count_;
};

}  // namespace

bool overlaps_any(const OrientedBox& box, const std::vector<const ObjectState*>& others) {
  return std::any_of(others.begin(), others.end(), [&](const ObjectState* o) {
    return intersection_volume(box, o->box()) > kOverlapEpsilon;
  });
}

RoomContext::RoomContext(std::shared_ptr<const RoomLayout> room, ViewConfig view)
    : room_(std::move(room)), view_(view), reachable_(reachable_cells(*room_)) {
  for (std::size_t i = 0; i < room_->surfaces.size(); ++i) {
    const Rect& r = room_->surfaces[i].rect;
    for (double y = r.y0 + kSurfaceLattice / 2; y < r.y1; y += kSurfaceLattice) {
      for (double x = r.x0 + kSurfaceLattice / 2; x < r.x1; x += kSurfaceLattice) {
        surface_spots_.push_back({Vec3(q9(x), q9(y), room_->surfaces[i].height), static_cast<int>(i), false});
      }
    }
  }
  for (const Cell& c : reachable_.cells()) {
    if (c == room_->entry) continue;
    floor_spots_.push_back({cell_center(c), -1, false});
  }
  for (const auto& s : room_->static_objects) {
    solids_.push_back(solid_of(s));
    if (!has_under_space(s.cls->name)) continue;
    Vec3 lo, hi;
    s.box().world_bounds(lo, hi);
    const Cell a = room_->cell_at(lo.x() + 1e-6, lo.y() + 1e-6);
    const Cell b = room_->cell_at(hi.x() - 1e-6, hi.y() - 1e-6);
    for (int row = a.row; row <= b.row; ++row) {
      for (int col = a.col; col <= b.col; ++col) under_spots_.push_back({cell_center({col, row}), -1, true});
    }
  }
}

bool RoomContext::viewable(const Vec3& p, bool under) const {
  const double r = view_.range + kCellSize;
  const RoomLayout& room = *room_;
  const int r0 = std::max(0, int(std::floor((p.y() - r) / kCellSize)));
  const int r1 = std::min(room.depth - 1, int(std::floor((p.y() + r) / kCellSize)));
  const int c0 = std::max(0, int(std::floor((p.x() - r) / kCellSize)));
  const int c1 = std::min(room.width - 1, int(std::floor((p.x() + r) / kCellSize)));
  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) {
      if (!reachable_.contains({col, row})) continue;
      for (int yaw : kYaws) {
        for (int pitch : kPitches) {
          for (bool standing : {true, false}) {
            if (in_view({{col, row}, yaw, pitch, standing, std::nullopt}, p, under, view_)) return true;
          }
        }
      }
    }
  }
  return false;
}

bool RoomContext::fits(const OrientedBox& box, const PlacementSpot& spot) const {
  Vec3 lo, hi;
  box.world_bounds(lo, hi);
  const Rect area = spot.surface >= 0 ? room_->surfaces[spot.surface].rect : room_->bounds();
  if (!area.contains(lo.x(), lo.y()) || !area.contains(hi.x(), hi.y())) return false;
  return std::none_of(solids_.begin(), solids_.end(),
                      [&](const OrientedBox& s) { return intersection_volume(box, s) > kOverlapEpsilon; });
}

const PlacementSpot& RoomContext::sample_spot(Rng& rng, const ObjectClass& cls) const {
  // Weights for surface, floor, under-table spots.
  double w[3] = {0.6, 0.3, 0.1};
  if (cls.placement == Placement::kFloor) w[0] = 0.1, w[1] = 0.7, w[2] = 0.2;
  const std::vector<PlacementSpot>* lists[3] = {&surface_spots_, &floor_spots_, &under_spots_};
  double total = 0;
  for (int i = 0; i < 3; ++i) {
    if (lists[i]->empty()) w[i] = 0;
    total += w[i];
  }
  if (total <= 0) throw GenerationError("room " + room_->room_id + " has no placement spots");
  double u = rng.uniform() * total;
  int k = 0;
  while (k < 2 && (u >= w[k] || w[k] == 0)) {
    u -= w[k];
    ++k;
  }
  if (w[k] == 0) k = w[0] > 0 ? 0 : (w[1] > 0 ? 1 : 2);
  return rng.pick(*lists[k]);
}

ObjectState RoomContext::place(const InstanceId& id, const ObjectClass& cls, const PlacementSpot& spot,
                               double yaw) const {
  Vec3 p = spot.base;
  p.z() += cls.footprint.z();
  ObjectState s = ObjectState::make(id, cls, yaw_pose(p, yaw));
  s.under_surface = spot.under_surface;
  return s;
}

RoomLayout generate_room(std::uint64_t seed, RoomCategory category, const Catalog& catalog, std::string room_id) {
  return RoomBuilder(seed, category, catalog, std::move(room_id)).build();
}

}  // namespace rearrange
