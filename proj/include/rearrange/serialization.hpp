#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rearrange/simulator.hpp"

namespace rearrange {

using Json = nlohmann::json;

/// Schema violation; the message starts with a JSON pointer to the offending value.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Sorted keys, no whitespace, floats printed with 9 significant digits.
std::string canonical_dump(const Json& value);

Json to_json(const Cell& cell);
Json to_json(const AgentPose& agent);
Json to_json(const ObjectState& object);
Json to_json(const RoomLayout& room);
Json to_json(const MetricsReport& metrics);
Json to_json(const Observation& observation);
Json to_json(const SceneView& view);
Json to_json(const VisibleEntry& entry);

/// Episode without its room; the room is referenced by id.
Json to_json(const RearrangementEpisode& episode);

Cell cell_from_json(const Json& j, const std::string& path);
AgentPose agent_from_json(const Json& j, const std::string& path);
ObjectState object_from_json(const Json& j, const std::string& id, const Catalog& catalog, const std::string& path);
RoomLayout room_from_json(const Json& j, const Catalog& catalog, const std::string& path);
MetricsReport metrics_from_json(const Json& j, const std::string& path);
Observation observation_from_json(const Json& j, const std::string& path);
RearrangementEpisode episode_from_json(const Json& j, std::shared_ptr<const RoomLayout> room, const Catalog& catalog,
                                       const std::string& path);

}  // namespace rearrange
