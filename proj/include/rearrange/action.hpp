#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rearrange/catalog.hpp"

namespace rearrange {

enum class ActionKind {
  kMoveAhead,
  kMoveLeft,
  kMoveRight,
  kMoveBack,
  kRotateLeft,
  kRotateRight,
  kLookUp,
  kLookDown,
  kStand,
  kCrouch,
  kPickup,  // carries a pickupable class name
  kOpen,    // carries an openable, non-pickupable class name
  kPlaceObject,
  kDone,
};

struct Action {
  ActionKind kind = ActionKind::kDone;
  std::string target;

  static Action move_ahead() { return {ActionKind::kMoveAhead, {}}; }
  static Action pickup(std::string cls) { return {ActionKind::kPickup, std::move(cls)}; }
  static Action open(std::string cls) { return {ActionKind::kOpen, std::move(cls)}; }
  static Action place() { return {ActionKind::kPlaceObject, {}}; }
  static Action done() { return {ActionKind::kDone, {}}; }

  bool is_navigation() const { return kind <= ActionKind::kCrouch; }
  bool is_interaction() const {
    return kind == ActionKind::kPickup || kind == ActionKind::kOpen || kind == ActionKind::kPlaceObject;
  }

  /// Wire name, e.g. "MoveAhead", "PickupMug", "OpenFridge".
  std::string name() const;

  bool operator==(const Action&) const = default;
};

class UnknownActionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Accepts either a full name ("PickupMug") or a base name plus argument
/// ("Pickup", "Mug"). Throws UnknownActionError otherwise.
Action parse_action(std::string_view name, const std::optional<std::string>& arg, const Catalog& catalog);

/// The whole action space in canonical order: navigation, rotation, look,
/// stand/crouch, one Pickup per pickupable class, one Open per openable-only
/// class, PlaceObject, Done.
std::vector<Action> all_actions(const Catalog& catalog);

}  // namespace rearrange
