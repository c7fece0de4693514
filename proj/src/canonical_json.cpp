#include <cmath>
#include <cstdio>
#include <cstring>

#include "rearrange/serialization.hpp"

namespace rearrange {

SchemaError::SchemaError(const std::string& path, const std::string& message)
    : std::runtime_error((path.empty() ? std::string("/") : path) + ": " + message), path_(path) {}

namespace {

void dump_float(double v, std::string& out) {
  if (!std::isfinite(v)) throw std::invalid_argument("canonical_dump: non-finite number");
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
  if (std::strpbrk(buf, ".eE") == nullptr) out += ".0";
}

void dump(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        dump(v[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: dump_float(v.get<double>(), out); break;
    default: out += v.dump(); break;
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  dump(value, out);
  return out;
}

}  // namespace rearrange
