#include "rearrange/action.hpp"

#include <array>
#include <utility>

namespace rearrange {

namespace {

constexpr std::array<std::pair<ActionKind, std::string_view>, 14> kBaseNames{{
    {ActionKind::kMoveAhead, "MoveAhead"},
    {ActionKind::kMoveLeft, "MoveLeft"},
    {ActionKind::kMoveRight, "MoveRight"},
    {ActionKind::kMoveBack, "MoveBack"},
    {ActionKind::kRotateLeft, "RotateLeft"},
    {ActionKind::kRotateRight, "RotateRight"},
    {ActionKind::kLookUp, "LookUp"},
    {ActionKind::kLookDown, "LookDown"},
    {ActionKind::kStand, "Stand"},
    {ActionKind::kCrouch, "Crouch"},
    {ActionKind::kPickup, "Pickup"},
    {ActionKind::kOpen, "Open"},
    {ActionKind::kPlaceObject, "PlaceObject"},
    {ActionKind::kDone, "Done"},
}};

std::string_view base_name(ActionKind kind) {
  for (const auto& [k, n] : kBaseNames) {
    if (k == kind) return n;
  }
  return "Done";
}

Action with_target(ActionKind kind, std::string_view cls, const Catalog& catalog, std::string_view shown) {
  const ObjectClass* c = catalog.find(cls);
  const bool ok = c != nullptr && (kind == ActionKind::kPickup ? c->pickupable : c->openness_tracked());
  if (!ok) throw UnknownActionError("unknown action: " + std::string(shown));
  return {kind, std::string(cls)};
}

}  // namespace

std::string Action::name() const {
  std::string out(base_name(kind));
  out += target;
  return out;
}

Action parse_action(std::string_view name, const std::optional<std::string>& arg, const Catalog& catalog) {
  for (const auto& [kind, base] : kBaseNames) {
    const bool takes_target = kind == ActionKind::kPickup || kind == ActionKind::kOpen;
    if (name == base) {
      if (takes_target) {
        if (!arg) throw UnknownActionError(std::string(name) + " needs a class argument");
        return with_target(kind, *arg, catalog, std::string(name) + " " + *arg);
      }
      if (arg) throw UnknownActionError(std::string(name) + " takes no argument");
      return {kind, {}};
    }
    if (takes_target && !arg && name.size() > base.size() && name.substr(0, base.size()) == base) {
      return with_target(kind, name.substr(base.size()), catalog, name);
    }
  }
  throw UnknownActionError("unknown action: " + std::string(name));
}

std::vector<Action> all_actions(const Catalog& catalog) {
  std::vector<Action> out;
  for (int k = 0; k <= static_cast<int>(ActionKind::kCrouch); ++k) {
    out.push_back({static_cast<ActionKind>(k), {}});
  }
  for (const auto& n : catalog.pickupable_names()) out.push_back(Action::pickup(n));
  for (const auto& n : catalog.openable_only_names()) out.push_back(Action::open(n));
  out.push_back(Action::place());
  out.push_back(Action::done());
  return out;
}

}  // namespace rearrange
