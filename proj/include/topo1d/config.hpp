#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "topo1d/chi.hpp"
#include "topo1d/phase_diagram.hpp"
#include "topo1d/structure.hpp"

namespace topo1d {

/// Wavenumbers in configs are k0/2pi; the accessors below return raw k0.
struct GridDef {
  double kmin{0.0}, kmax{4.0}, step{5e-4};
  std::vector<double> k0_grid() const;
};

struct ScanDef {
  double reMin{0.0}, reMax{4.0}, imMin{-0.5}, imMax{0.5};
  int nx{400}, ny{100};
  ScanRect rect() const;
};

struct PatternDef {
  double kmin{0.0}, kmax{4.0};
  std::optional<bool> lossy;  // default: true for cells with loss
  int bands{0};               // Zak phases for bands 1..bands; 0 = every band bounded in range
  int wilsonGrid{256};        // 0 disables the Wilson cross-check
};

struct EdgeDef {
  double kmin{0.0}, kmax{4.0};
  int samples{4001};  // rows of the chi crossing trace
};

struct StackDef {
  std::string left, right;
  int periodsLeft{10}, periodsRight{10};
  double ambientIndex{1.0};
};

struct NamedCell {
  std::string name;
  UnitCell cell;
};

struct RunConfig {
  std::string source;
  Polarization pol{Polarization::Epar};
  double delta{1e-8};
  double tolEdge{1e-9};
  double tolDegen{1e-9};
  double tolTransition{1e-6};
  std::vector<NamedCell> structures;  // in file order
  std::optional<StackDef> stack;
  GridDef grid;
  ScanDef scan;
  PatternDef pattern;
  EdgeDef edge;
  bool transmitPeaks{true};
  std::optional<SweepParams> phasediag;

  const UnitCell& structure(const std::string& name) const;
  StackConfig stack_config() const;
};

/// Line-oriented format: `# comment`, `[section]` or `[structure NAME]` headers and
/// `key = value` entries. Unknown sections and keys raise ConfigError with the line number.
RunConfig parse_config(std::istream& is, const std::string& source = "<input>");
RunConfig load_config(const std::string& path);

}  // namespace topo1d
