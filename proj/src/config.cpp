#include "topo1d/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "topo1d/errors.hpp"
#include "topo1d/scattering.hpp"

namespace topo1d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct Entry {
  std::string key, value;
  int line;
};

struct Section {
  std::string kind, name;
  int line;
  std::vector<Entry> entries;
};

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& src, const Entry& e) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::exception&) {
    fail(src, e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  }
  if (used != e.value.size() || !std::isfinite(v)) fail(src, e.line, "'" + e.key + "' expects a finite number");
  return v;
}

int to_int(const std::string& src, const Entry& e) {
  const double v = to_double(src, e);
  if (v != std::floor(v) || std::abs(v) > 1e9) fail(src, e.line, "'" + e.key + "' expects an integer");
  return static_cast<int>(v);
}

bool to_bool(const std::string& src, const Entry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  fail(src, e.line, "'" + e.key + "' expects true or false");
}

// Applies handlers by key; anything unhandled is an error.
using Handler = std::function<void(const Entry&)>;
void dispatch(const std::string& src, const Section& s, const std::map<std::string, Handler>& handlers,
              bool allowRepeat = false) {
  std::set<std::string> seen;
  for (const auto& e : s.entries) {
    const auto it = handlers.find(e.key);
    if (it == handlers.end()) fail(src, e.line, "unknown key '" + e.key + "' in [" + s.kind + "]");
    if (!allowRepeat && !seen.insert(e.key).second) fail(src, e.line, "duplicate key '" + e.key + "'");
    it->second(e);
  }
}

Layer parse_layer(const std::string& src, const Entry& e) {
  std::istringstream is(e.value);
  std::vector<double> v;
  std::string tok;
  while (is >> tok) v.push_back(to_double(src, {e.key, tok, e.line}));
  if (v.size() != 5) fail(src, e.line, "layer expects 5 numbers: eps_re eps_im mu_re mu_im width");
  return {cplx{v[0], v[1]}, cplx{v[2], v[3]}, v[4]};
}

NamedCell parse_structure(const std::string& src, const Section& s) {
  if (s.name.empty()) fail(src, s.line, "[structure] needs a name");
  std::vector<Layer> layers;
  std::string label = s.name;
  std::optional<Entry> origin;
  std::set<std::string> once;
  for (const auto& e : s.entries) {
    if (e.key == "layer") {
      layers.push_back(parse_layer(src, e));
      continue;
    }
    if (e.key != "label" && e.key != "origin")
      fail(src, e.line, "unknown key '" + e.key + "' in [structure " + s.name + "]");
    if (!once.insert(e.key).second) fail(src, e.line, "duplicate key '" + e.key + "'");
    if (e.key == "label") label = e.value;
    if (e.key == "origin") origin = e;
  }
  if (layers.empty()) fail(src, s.line, "structure '" + s.name + "' has no layers");
  std::optional<UnitCell> cell;
  try {
    cell.emplace(layers, label);
  } catch (const std::invalid_argument& ex) {
    fail(src, s.line, "structure '" + s.name + "': " + ex.what());
  }
  if (origin && origin->value != "raw") {
    double x0 = 0.0;
    if (origin->value == "symmetric" || origin->value == "symmetric-alt") {
      const auto origins = symmetric_origins(*cell);
      const std::size_t which = origin->value == "symmetric" ? 0 : 1;
      if (origins.size() <= which) fail(src, origin->line, "structure '" + s.name + "' has no such symmetric origin");
      x0 = origins[which];
    } else {
      x0 = to_double(src, *origin);
      if (!(x0 >= 0.0 && x0 < 1.0)) fail(src, origin->line, "origin must lie in [0, 1)");
    }
    cell = recenter(*cell, x0).with_label(label);
  }
  return {s.name, *cell};
}

}  // namespace

std::vector<double> GridDef::k0_grid() const {
  std::vector<double> g = uniform_grid(kmin * kTwoPi, kmax * kTwoPi, step * kTwoPi);
  // The origin is excluded: scattering needs k0 > 0 and k0 = 0 is a band edge.
  if (!g.empty() && g.front() <= 0.0) g.erase(g.begin());
  return g;
}

ScanRect ScanDef::rect() const { return {reMin * kTwoPi, reMax * kTwoPi, imMin * kTwoPi, imMax * kTwoPi}; }

const UnitCell& RunConfig::structure(const std::string& name) const {
  for (const auto& s : structures)
    if (s.name == name) return s.cell;
  throw ConfigError(source + ": unknown structure '" + name + "'");
}

StackConfig RunConfig::stack_config() const {
  if (!stack) throw ConfigError(source + ": this command needs a [stack] section");
  return StackConfig(structure(stack->left), structure(stack->right), stack->periodsLeft, stack->periodsRight,
                     stack->ambientIndex);
}

RunConfig parse_config(std::istream& is, const std::string& source) {
  std::vector<Section> sections;
  sections.push_back({"", "", 0, {}});  // entries before any header
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(source, line_no, "unterminated section header");
      std::istringstream hs(line.substr(1, line.size() - 2));
      Section s{"", "", line_no, {}};
      hs >> s.kind >> s.name;
      std::string extra;
      if (hs >> extra) fail(source, line_no, "malformed section header");
      sections.push_back(s);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(source, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(source, line_no, "empty key or value");
    sections.back().entries.push_back({key, value, line_no});
  }

  RunConfig cfg;
  cfg.source = source;
  std::set<std::string> singletons;
  for (const auto& s : sections) {
    if (s.kind.empty() && s.line == 0) {
      if (!s.entries.empty()) fail(source, s.entries.front().line, "entry outside any section");
      continue;
    }
    if (s.kind != "structure") {
      if (!s.name.empty()) fail(source, s.line, "section [" + s.kind + "] takes no name");
      if (!singletons.insert(s.kind).second) fail(source, s.line, "duplicate section [" + s.kind + "]");
    }
    auto num = [&](double& dst) { return [&, dst_ptr = &dst](const Entry& e) { *dst_ptr = to_double(source, e); }; };
    auto integer = [&](int& dst) { return [&, dst_ptr = &dst](const Entry& e) { *dst_ptr = to_int(source, e); }; };
    if (s.kind == "structure") {
      NamedCell nc = parse_structure(source, s);
      for (const auto& other : cfg.structures)
        if (other.name == nc.name) fail(source, s.line, "duplicate structure '" + nc.name + "'");
      cfg.structures.push_back(std::move(nc));
    } else if (s.kind == "options") {
      dispatch(source, s,
               {{"polarization",
                 [&](const Entry& e) {
                   try {
                     cfg.pol = polarization_from_string(e.value);
                   } catch (const std::invalid_argument& ex) {
                     fail(source, e.line, ex.what());
                   }
                 }},
                {"delta", num(cfg.delta)},
                {"tol_edge", num(cfg.tolEdge)},
                {"tol_degen", num(cfg.tolDegen)},
                {"tol_transition", num(cfg.tolTransition)}});
      if (!(cfg.delta > 0.0)) fail(source, s.line, "delta must be positive");
    } else if (s.kind == "stack") {
      StackDef st;
      dispatch(source, s,
               {{"left", [&](const Entry& e) { st.left = e.value; }},
                {"right", [&](const Entry& e) { st.right = e.value; }},
                {"periods_left", integer(st.periodsLeft)},
                {"periods_right", integer(st.periodsRight)},
                {"ambient_index", num(st.ambientIndex)}});
      if (st.left.empty() || st.right.empty()) fail(source, s.line, "[stack] needs left and right");
      if (st.periodsLeft < 0 || st.periodsRight < 0) fail(source, s.line, "period counts must be >= 0");
      if (!(st.ambientIndex > 0.0)) fail(source, s.line, "ambient_index must be positive");
      cfg.stack = st;
    } else if (s.kind == "grid") {
      dispatch(source, s, {{"kmin", num(cfg.grid.kmin)}, {"kmax", num(cfg.grid.kmax)}, {"step", num(cfg.grid.step)}});
      if (!(cfg.grid.step > 0.0) || !(cfg.grid.kmax > cfg.grid.kmin) || cfg.grid.kmin < 0.0)
        fail(source, s.line, "[grid] needs 0 <= kmin < kmax and step > 0");
    } else if (s.kind == "scan") {
      ScanDef& sc = cfg.scan;
      dispatch(source, s,
               {{"re_min", num(sc.reMin)},
                {"re_max", num(sc.reMax)},
                {"im_min", num(sc.imMin)},
                {"im_max", num(sc.imMax)},
                {"nx", integer(sc.nx)},
                {"ny", integer(sc.ny)}});
      if (sc.nx < 2 || sc.ny < 2 || !(sc.reMax > sc.reMin) || !(sc.imMax > sc.imMin))
        fail(source, s.line, "[scan] rectangle is empty or resolution below 2");
    } else if (s.kind == "pattern") {
      PatternDef& p = cfg.pattern;
      dispatch(source, s,
               {{"kmin", num(p.kmin)},
                {"kmax", num(p.kmax)},
                {"lossy", [&](const Entry& e) { p.lossy = to_bool(source, e); }},
                {"bands", integer(p.bands)},
                {"wilson_grid", integer(p.wilsonGrid)}});
      if (!(p.kmax > p.kmin) || p.kmin < 0.0) fail(source, s.line, "[pattern] needs 0 <= kmin < kmax");
      if (p.bands < 0 || (p.wilsonGrid != 0 && p.wilsonGrid < 64))
        fail(source, s.line, "[pattern] bands must be >= 0 and wilson_grid 0 or >= 64");
    } else if (s.kind == "edge") {
      dispatch(source, s, {{"kmin", num(cfg.edge.kmin)}, {"kmax", num(cfg.edge.kmax)}, {"samples", integer(cfg.edge.samples)}});
      if (!(cfg.edge.kmax > cfg.edge.kmin) || cfg.edge.samples < 2) fail(source, s.line, "[edge] range or samples invalid");
    } else if (s.kind == "transmit") {
      dispatch(source, s, {{"peaks", [&](const Entry& e) { cfg.transmitPeaks = to_bool(source, e); }}});
    } else if (s.kind == "phasediag") {
      SweepParams sp;
      double tmin = 2.4, tmax = 2.6;
      dispatch(source, s,
               {{"eps1_min", num(sp.eps1Min)},
                {"eps1_max", num(sp.eps1Max)},
                {"eps1_steps", integer(sp.eps1Steps)},
                {"h1_min", num(sp.h1Min)},
                {"h1_max", num(sp.h1Max)},
                {"h1_steps", integer(sp.h1Steps)},
                {"eps2", num(sp.eps2)},
                {"target_min", num(tmin)},
                {"target_max", num(tmax)},
                {"min_fraction", num(sp.minFraction)}});
      sp.targetMin = tmin * kTwoPi;
      sp.targetMax = tmax * kTwoPi;
      if (sp.eps1Steps < 2 || sp.h1Steps < 2) fail(source, s.line, "[phasediag] needs at least 2 steps per axis");
      if (!(sp.h1Min > 0.0) || !(sp.h1Max < 1.0) || sp.h1Max < sp.h1Min)
        fail(source, s.line, "[phasediag] h1 range must lie inside (0, 1)");
      if (!(tmax > tmin)) fail(source, s.line, "[phasediag] target interval is empty");
      cfg.phasediag = sp;
    } else {
      fail(source, s.line, "unknown section [" + s.kind + "]");
    }
  }
  if (cfg.phasediag) cfg.phasediag->pol = cfg.pol;
  if (cfg.stack) {
    cfg.structure(cfg.stack->left);
    cfg.structure(cfg.stack->right);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in, path);
}

}  // namespace topo1d
