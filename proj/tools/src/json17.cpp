#include "json17.hpp"

#include <cmath>
#include <cstdio>

#include "wate/errors.hpp"

namespace watecli {

std::string format17(double v) {
  if (!std::isfinite(v))
    throw wate::Error("refusing to serialize a non-finite number");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_value(const nlohmann::ordered_json& v, std::string& out,
                 int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, val] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        out += nlohmann::ordered_json(key).dump();  // escaped key
        out += ": ";
        write_value(val, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ",\n";
        out += pad_in;
        write_value(v[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::ordered_json::value_t::string:
      out += v.dump();  // nlohmann handles escaping
      return;
    case nlohmann::ordered_json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case nlohmann::ordered_json::value_t::number_integer:
      out += std::to_string(v.get<std::int64_t>());
      return;
    case nlohmann::ordered_json::value_t::number_unsigned:
      out += std::to_string(v.get<std::uint64_t>());
      return;
    case nlohmann::ordered_json::value_t::number_float:
      out += format17(v.get<double>());
      return;
    case nlohmann::ordered_json::value_t::null:
      out += "null";
      return;
    default:
      throw wate::Error("unsupported JSON value type in output");
  }
}

}  // namespace

std::string dump_json17(const nlohmann::ordered_json& value) {
  std::string out;
  write_value(value, out, 0);
  out += "\n";
  return out;
}

}  // namespace watecli
