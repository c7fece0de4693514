#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rearrange/harness.hpp"

namespace py = pybind11;
using namespace rearrange;

namespace {

using DatasetPtr = std::shared_ptr<DatasetFile>;

EpisodeMode mode_of(const std::string& name) { return parse_episode_mode(name); }

py::dict run_summary(const DatasetPtr& ds, const std::string& split, const std::string& agent,
                     const std::string& mode, int limit, std::uint64_t seed) {
  RunOptions opts;
  opts.mode = mode_of(mode);
  opts.policy_seed = seed;
  const auto episodes = select_episodes(*ds, parse_split(split), limit);
  std::vector<ResultRow> rows;
  {
    py::gil_scoped_release release;
    auto a = make_agent(agent);
    rows = run_agent(episodes, *a, opts);
  }
  py::dict out;
  out["csv"] = to_csv(rows);
  out["summary"] = to_json(aggregate(rows)).dump();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Room rearrangement simulator core";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<DatasetError>(m, "DatasetError", PyExc_OSError);

  py::class_<DatasetFile, DatasetPtr>(m, "Dataset")
      .def_static(
          "generate",
          [](int rooms_per_category, int episodes_per_room, std::uint64_t seed) {
            py::gil_scoped_release release;
            return std::make_shared<DatasetFile>(
                build_dataset({rooms_per_category, episodes_per_room, seed}));
          },
          py::arg("rooms_per_category") = 30, py::arg("episodes_per_room") = 50, py::arg("seed") = 0)
      .def_static(
          "load", [](const std::string& path) { return std::make_shared<DatasetFile>(load_dataset(path)); },
          py::arg("path"))
      .def_static(
          "from_json", [](const std::string& text) { return std::make_shared<DatasetFile>(dataset_from_json(text)); },
          py::arg("text"))
      .def("save", [](const DatasetFile& ds, const std::string& path) { save_dataset(ds, path); }, py::arg("path"))
      .def("to_json", [](const DatasetFile& ds) { return dataset_to_json(ds); })
      .def_readonly("master_seed", &DatasetFile::master_seed)
      .def_readonly("catalog_hash", &DatasetFile::catalog_hash)
      .def_property_readonly("room_ids",
                             [](const DatasetFile& ds) {
                               std::vector<std::string> ids;
                               for (const auto& r : ds.rooms) ids.push_back(r->room_id);
                               return ids;
                             })
      .def(
          "episode_ids",
          [](const DatasetFile& ds, const std::string& split) {
            std::vector<std::string> ids;
            for (const auto& ep : ds.splits.at(parse_split(split))) ids.push_back(ep->episode_id);
            return ids;
          },
          py::arg("split"))
      .def("__len__", &DatasetFile::episode_count);

  py::class_<Session>(m, "Session")
      .def(py::init([](DatasetPtr ds, const std::string& mode, bool allow_expert) {
             ProtocolOptions opts;
             opts.default_mode = mode_of(mode);
             opts.allow_expert = allow_expert;
             return std::make_unique<Session>(std::move(ds), opts);
           }),
           py::arg("dataset"), py::arg("mode") = "two-phase", py::arg("allow_expert") = false)
      .def("handle", [](Session& s, const std::string& line) { return s.handle(line); }, py::arg("line"))
      .def_property_readonly("closed", &Session::closed);

  m.def("action_names", [] {
    std::vector<std::string> names;
    for (const auto& a : all_actions(shipped_catalog())) names.push_back(a.name());
    return names;
  });
  m.def("catalog_digest", [] { return shipped_catalog().digest(); });
  m.def(
      "box_iou",
      [](std::array<double, 3> ca, double yaw_a, std::array<double, 3> ha, std::array<double, 3> cb, double yaw_b,
         std::array<double, 3> hb) {
        const OrientedBox a(Vec3(ca[0], ca[1], ca[2]), yaw_rotation(yaw_a), Vec3(ha[0], ha[1], ha[2]));
        const OrientedBox b(Vec3(cb[0], cb[1], cb[2]), yaw_rotation(yaw_b), Vec3(hb[0], hb[1], hb[2]));
        return iou(a, b);
      },
      py::arg("center_a"), py::arg("yaw_a"), py::arg("half_a"), py::arg("center_b"), py::arg("yaw_b"),
      py::arg("half_b"), "IOU of two boxes rotated about +z.");
  m.def("run", &run_summary, py::arg("dataset"), py::arg("split") = "val", py::arg("agent") = "expert",
        py::arg("mode") = "two-phase", py::arg("limit") = 0, py::arg("seed") = 0,
        "Runs an in-process agent; returns {'csv': text, 'summary': json text}.");
  m.def("csv_summary", [](const std::string& csv) { return to_json(aggregate(parse_csv(csv))).dump(); },
        py::arg("csv"));
}
