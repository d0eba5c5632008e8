#pragma once

#include <cstdio>
#include <string>

namespace topo1d {

/// Scientific notation with 17 significant digits; the only float format used in outputs.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace topo1d
