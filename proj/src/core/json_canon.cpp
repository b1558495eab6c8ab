#include "core/json_canon.hpp"

#include <cmath>
#include <cstdio>

#include "core/errors.hpp"

namespace rad {
namespace {

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void append_value(std::string& out, const nlohmann::json& value) {
  switch (value.type()) {
    case nlohmann::json::value_t::null:
      out += "null";
      break;
    case nlohmann::json::value_t::boolean:
      out += value.get<bool>() ? "true" : "false";
      break;
    case nlohmann::json::value_t::number_integer:
      out += std::to_string(value.get<std::int64_t>());
      break;
    case nlohmann::json::value_t::number_unsigned:
      out += std::to_string(value.get<std::uint64_t>());
      break;
    case nlohmann::json::value_t::number_float: {
      const double x = value.get<double>();
      require(std::isfinite(x), Errc::non_finite_input,
              "canonical JSON cannot carry non-finite numbers");
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out += buf;
      break;
    }
    case nlohmann::json::value_t::string:
      append_escaped(out, value.get<std::string>());
      break;
    case nlohmann::json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ',';
        first = false;
        append_value(out, item);
      }
      out += ']';
      break;
    }
    case nlohmann::json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ',';
        first = false;
        append_escaped(out, it.key());
        out += ':';
        append_value(out, it.value());
      }
      out += '}';
      break;
    }
    default:
      fail(Errc::internal, "unsupported JSON value type");
  }
}

}  // namespace

std::string dump_canonical(const nlohmann::json& value) {
  std::string out;
  append_value(out, value);
  return out;
}

std::string canonical_hash(const nlohmann::json& value) {
  const std::string bytes = dump_canonical(value);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rad
