// topo1d: command-line front end. Every subcommand reads one config file and writes
// CSV/JSON data files into the output directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "topo1d/chi.hpp"
#include "topo1d/config.hpp"
#include "topo1d/errors.hpp"
#include "topo1d/interface.hpp"
#include "topo1d/io.hpp"
#include "topo1d/monodromy.hpp"
#include "topo1d/parallel.hpp"
#include "topo1d/phase_diagram.hpp"
#include "topo1d/polezero.hpp"
#include "topo1d/scattering.hpp"

namespace fs = std::filesystem;
using namespace topo1d;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Context {
  RunConfig cfg;
  fs::path out;
};

std::ofstream open_out(const Context& ctx, const std::string& name) {
  std::ofstream os(ctx.out / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (ctx.out / name).string());
  std::cout << (ctx.out / name).string() << '\n';
  return os;
}

void require_structures(const RunConfig& cfg) {
  if (cfg.structures.empty()) throw ConfigError(cfg.source + ": no [structure] sections defined");
}

EdgeSearchOptions edge_options(const RunConfig& cfg) {
  EdgeSearchOptions o;
  o.tolTransition = cfg.tolTransition;
  return o;
}

json gap_json(const GapInfo& g) {
  return {{"order", g.order},
          {"lower", g.lower},
          {"upper", g.upper},
          {"lower_over_2pi", g.lower / kTwoPi},
          {"upper_over_2pi", g.upper / kTwoPi},
          {"width", g.width()},
          {"closed", g.closed},
          {"lower_kind", to_string(g.lowerKind)},
          {"upper_kind", to_string(g.upperKind)},
          {"index", g.index()}};
}

void cmd_band(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  require_structures(cfg);
  const auto grid = cfg.grid.k0_grid();
  for (const auto& s : cfg.structures) {
    {
      auto os = open_out(ctx, "band_" + s.name + ".csv");
      write_band_csv(os, band_structure(s.cell, cfg.pol, grid, cfg.tolEdge));
    }
    json gaps = json::array();
    for (const auto& g : gaps_in(s.cell.lossless_part(), cfg.pol, grid.front(), grid.back(), edge_options(cfg)))
      gaps.push_back(gap_json(g));
    auto os = open_out(ctx, "gaps_" + s.name + ".json");
    os << json{{"structure", s.name}, {"label", s.cell.label()}, {"polarization", to_string(cfg.pol)}, {"gaps", gaps}}
              .dump(2)
       << '\n';
  }
}

void cmd_chi(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  require_structures(cfg);
  const auto grid = cfg.grid.k0_grid();
  for (const auto& s : cfg.structures) {
    auto os = open_out(ctx, "chi_" + s.name + ".csv");
    os << "k0,status,chi_re,chi_im,abs_chi,sphere_x,sphere_y,sphere_z,pair_relation\n";
    for (double k : grid) {
      const ChiSample c = chi_continued(s.cell, k, cfg.pol, cfg.delta, cfg.tolDegen);
      const auto rel = chi_pair_relation_check(s.cell, cfg.pol, cplx{k, cfg.delta}, cfg.tolDegen);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      double re = nan, im = nan, mag = nan, sx = nan, sy = nan, sz = nan;
      if (c.chi) {
        mag = c.chi->magnitude();
        if (!c.chi->is_infinite()) {
          re = c.chi->value().real();
          im = c.chi->value().imag();
        }
        const auto p = c.chi->sphere();
        sx = p.x;
        sy = p.y;
        sz = p.z;
      }
      os << fmt(k) << ',' << to_string(c.status) << ',' << fmt(re) << ',' << fmt(im) << ',' << fmt(mag) << ','
         << fmt(sx) << ',' << fmt(sy) << ',' << fmt(sz) << ',' << fmt(rel ? *rel : nan) << '\n';
    }
  }
}

void cmd_scan(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  require_structures(cfg);
  for (const auto& s : cfg.structures) {
    const ChiScan scan = chi_scan(s.cell, cfg.pol, cfg.scan.rect(), cfg.scan.nx, cfg.scan.ny, cfg.tolDegen);
    {
      auto os = open_out(ctx, "scan_" + s.name + ".csv");
      write_scan_csv(os, scan);
    }
    auto os = open_out(ctx, "scan_" + s.name + ".bin");
    write_scan_binary(os, scan);
  }
}

void cmd_pattern(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  require_structures(cfg);
  const double kmin = cfg.pattern.kmin * kTwoPi, kmax = cfg.pattern.kmax * kTwoPi;
  for (const auto& s : cfg.structures) {
    const bool lossy = cfg.pattern.lossy.value_or(!s.cell.lossless());
    const PoleZeroPattern p = pattern(s.cell, cfg.pol, kmin, kmax, lossy, edge_options(cfg));
    {
      auto os = open_out(ctx, "pattern_" + s.name + ".json");
      write_pattern_json(os, p);
    }
    std::vector<ZakPhase> zak;
    std::vector<std::optional<WilsonResult>> wilson;
    const int last = cfg.pattern.bands > 0 ? cfg.pattern.bands : 1000000;
    for (int band = 1; band <= last; ++band) {
      if (!p.find(band - 1, false) || !p.find(band, true)) {
        if (cfg.pattern.bands > 0) throw NumericalError("pattern range does not bound band " + std::to_string(band));
        break;
      }
      zak.push_back(zak_from_pattern(p, band));
      std::optional<WilsonResult> w;
      if (cfg.pattern.wilsonGrid > 0 && s.cell.lossless()) {
        try {
          w = zak_wilson_oracle(s.cell, cfg.pol, band, cfg.pattern.wilsonGrid);
        } catch (const NumericalError&) {
          // closed gap next to this band: the Berry phase is not defined, column left empty
        }
      }
      wilson.push_back(w);
    }
    auto os = open_out(ctx, "zak_" + s.name + ".csv");
    write_zak_csv(os, zak, wilson);
  }
}

void cmd_edge(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const StackConfig st = cfg.stack_config();
  const double kmin = cfg.edge.kmin * kTwoPi, kmax = cfg.edge.kmax * kTwoPi;
  json gaps = json::array();
  for (const auto& g : common_gaps(st.cellA, st.cellB, cfg.pol, kmin, kmax, edge_options(cfg))) {
    const Interval gap = g.range;
    std::ostringstream modes;
    write_edge_reports_json(modes, edge_mode_search(st.cellA, st.cellB, cfg.pol, gap, cfg.delta));
    json pairings = json::array();
    if (st.cellA.lossless() && st.cellB.lossless()) {
      for (const auto& gp : gauge_pairings(st.cellA, st.cellB, cfg.pol, gap, cfg.delta)) {
        json ks = json::array();
        for (const auto& m : gp.modes) ks.push_back(m.k0star.real());
        pairings.push_back({{"origin_left", gp.originA}, {"origin_right", gp.originB}, {"k0star", ks}});
      }
    }
    gaps.push_back({{"gap", {gap.lo, gap.hi}},
                    {"gap_over_2pi", {gap.lo / kTwoPi, gap.hi / kTwoPi}},
                    {"order_left", g.orderA},
                    {"order_right", g.orderB},
                    {"modes", json::parse(modes.str())},
                    {"gauge_pairings", pairings}});
  }
  {
    auto os = open_out(ctx, "edge_report.json");
    os << json{{"left", cfg.stack->left}, {"right", cfg.stack->right}, {"polarization", to_string(cfg.pol)},
               {"common_gaps", gaps}}
              .dump(2)
       << '\n';
  }
  auto os = open_out(ctx, "chi_crossing.csv");
  write_crossing_csv(os, chi_crossing_trace(st.cellA, st.cellB, cfg.pol, kmin, kmax, cfg.edge.samples, cfg.delta));
}

void cmd_transmit(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const StackConfig st = cfg.stack_config();
  const auto grid = cfg.grid.k0_grid();
  const Spectrum s = transmission_spectrum(st, cfg.pol, grid);
  {
    auto os = open_out(ctx, "transmission.csv");
    write_spectrum_csv(os, s);
  }
  if (!cfg.transmitPeaks) return;
  std::vector<Interval> gaps;
  for (const auto& g : common_gaps(st.cellA, st.cellB, cfg.pol, grid.front(), grid.back(), edge_options(cfg)))
    gaps.push_back(g.range);
  auto os = open_out(ctx, "peaks.json");
  write_peaks_json(os, peak_detect(s, gaps));
  std::cerr << "max |det - 1| = " << fmt(s.maxDetDrift) << '\n';
}

void cmd_phasediag(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  SweepParams params = cfg.phasediag.value_or(SweepParams{});
  params.pol = cfg.pol;
  params.edge = edge_options(cfg);
  const PhaseGrid grid = sweep(params, [&](int row) {
    std::cerr << "phasediag: row " << row + 1 << '/' << params.h1Steps << '\n';
  });
  {
    auto os = open_out(ctx, "phase_diagram.csv");
    write_phase_csv(os, grid);
  }
  {
    auto os = open_out(ctx, "phase_diagram.pgm");
    write_phase_pgm(os, grid);
  }
  json checks = json::array();
  for (const auto& c : verify_boundaries(grid))
    checks.push_back({{"from", {grid.at(c.i1, c.j1).eps1, grid.at(c.i1, c.j1).h1}},
                      {"to", {grid.at(c.i2, c.j2).eps1, grid.at(c.i2, c.j2).h1}},
                      {"index_from", c.index1},
                      {"index_to", c.index2},
                      {"same_gap", c.sameGap},
                      {"colocated", c.colocated},
                      {"closing", {c.closingEps1, c.closingH1}},
                      {"closing_width", c.closingWidth}});
  auto os = open_out(ctx, "phase_boundaries.json");
  os << checks.dump(2) << '\n';
}

int report(const char* kind, const std::string& msg, int code) {
  std::cerr << json{{"error", kind}, {"message", msg}, {"exit_code", code}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological classification of 1D periodic wave media"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  int threads = 0;
  std::optional<double> delta;
  app.add_option("--config", config_path, "Run configuration file")->required();
  app.add_option("--out", out_dir, "Output directory (default: $TOPO1D_OUT or .)");
  app.add_option("--threads", threads, "Maximum OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--delta", delta, "Limiting-absorption offset, overrides the config");

  using Command = void (*)(const Context&);
  const std::pair<const char*, Command> commands[] = {
      {"band", cmd_band},       {"chi", cmd_chi},           {"scan", cmd_scan},         {"pattern", cmd_pattern},
      {"edge", cmd_edge},       {"transmit", cmd_transmit}, {"phasediag", cmd_phasediag}};
  const char* help[] = {"Band structure and gap table",        "chi along the real axis",
                        "|chi| over a complex k0 rectangle",   "Pole-zero pattern and Zak phases",
                        "Edge-mode prediction and chi crossing", "Transmission spectrum and in-gap peaks",
                        "Topological phase diagram"};
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return report("usage", e.what(), 2);
  }

  try {
    Context ctx{load_config(config_path), {}};
    if (delta) {
      if (!(*delta > 0.0)) throw ConfigError("--delta must be positive");
      ctx.cfg.delta = *delta;
    }
    if (out_dir.empty()) {
      const char* env = std::getenv("TOPO1D_OUT");
      out_dir = env && *env ? env : ".";
    }
    ctx.out = out_dir;
    fs::create_directories(ctx.out);
    set_max_threads(threads);
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) fn(ctx);
  } catch (const ConfigError& e) {
    return report("config", e.what(), 2);
  } catch (const std::invalid_argument& e) {
    return report("invalid_input", e.what(), 2);
  } catch (const NumericalError& e) {
    return report("numerical", e.what(), 3);
  } catch (const std::exception& e) {
    return report("internal", e.what(), 3);
  }
  return 0;
}
