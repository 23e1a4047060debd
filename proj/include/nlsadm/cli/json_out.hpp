#pragma once

#include "nlsadm/types.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>

namespace nlsadm::cli {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump(const json& j, std::string& out, int indent, int depth) {
  const auto nl = [&](int d) {
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        nl(depth + 1);
        out += json(it.key()).dump();
        out += ": ";
        dump(it.value(), out, indent, depth + 1);
      }
      nl(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        nl(depth + 1);
        dump(v, out, indent, depth + 1);
      }
      nl(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Serialises with insertion-ordered keys and floats printed as %.17g.
inline std::string dump_json(const json& j, int indent = 2) {
  std::string out;
  detail::dump(j, out, indent, 0);
  out += '\n';
  return out;
}

inline json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace nlsadm::cli
