// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include "trunclev/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "trunclev/json_writer.hpp"
#include "trunclev/parallel.hpp"
#include "trunclev/version.hpp"

namespace trunclev {

namespace {

void require_pos(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

}  // namespace

void Tolerances::validate() const {
  require_pos(newton_tol, "newton_tol");
  require_pos(bisect_tol, "bisect_tol");
  require_pos(violation_tol_rel, "violation_tol_rel");
  require_pos(image_tol, "image_tol");
  require_pos(regularity_tol, "regularity_tol");
  require_pos(curve_tol_rel, "curve_tol_rel");
  require_pos(mono_tol, "mono_tol");
  require_pos(tol_compare, "tol_compare");
  require_pos(sandwich_tol, "sandwich_tol");
  require_pos(psd_slack, "psd_slack");
  require_pos(degen_tol, "degen_tol");
}

void Budgets::validate() const {
  if (pair_samples < 1) throw std::invalid_argument("pair_samples must be >= 1");
  if (seg_samples < 3) throw std::invalid_argument("seg_samples must be >= 3");
  if (scan_samples < 2) throw std::invalid_argument("scan_samples must be >= 2");
  if (refine_iters < 1) throw std::invalid_argument("refine_iters must be >= 1");
  if (probe_levels < 1) throw std::invalid_argument("probe_levels must be >= 1");
  if (newton_max_iters < 1) throw std::invalid_argument("newton_max_iters must be >= 1");
  if (margin_cells < 1) throw std::invalid_argument("margin_cells must be >= 1");
  if (monotonicity_pairs < 1) throw std::invalid_argument("monotonicity_pairs must be >= 1");
}

void RunConfig::validate() const {
  window.validate();
  tol.validate();
  budget.validate();
  if (!(hess_eps >= 0.0)) throw std::invalid_argument("hess_eps must be >= 0");
  if (!(min_separation >= 0.0)) throw std::invalid_argument("min_separation must be >= 0");
  if (!(scan_level_margin >= 0.0)) throw std::invalid_argument("scan_level_margin must be >= 0");
  if (field_name == "poly" && poly.empty())
    throw std::invalid_argument("a poly field needs at least one monomial");
  if (bracket && !(bracket->first < bracket->second))
    throw std::invalid_argument("bracket must satisfy lo < hi");
}

FieldPtr make_field(const RunConfig& cfg) {
  if (cfg.field_name == "poly") return make_polynomial(cfg.poly);
  return make_builtin(cfg.field_name, cfg.field_params);
}

RunConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: document must be an object");

  RunConfig cfg;
  static const char* known[] = {
      "field", "window", "tolerances", "budgets", "seed", "hess_eps", "min_separation",
      "scan_level_margin", "levels", "bracket", "emit_timings", "workers", "json_path",
      "pgm_prefix", "svg_prefix"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&key](const char* k) { return key == k; }) == std::end(known))
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }

  if (j.contains("field")) {
    const auto& f = j.at("field");
    cfg.field_name = f.value("name", cfg.field_name);
    if (f.contains("params"))
      for (const auto& [k, v] : f.at("params").items())
        cfg.field_params[k] = v.get<double>();
    if (f.contains("monomials")) {
      for (const auto& t : f.at("monomials")) {
        if (!t.is_array() || t.size() != 3)
          throw std::invalid_argument("config: monomials entries must be [i, j, c]");
        cfg.poly.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<double>()});
      }
    }
  }
  if (j.contains("window")) {
    const auto& w = j.at("window");
    cfg.window.x_min = w.value("x_min", cfg.window.x_min);
    cfg.window.x_max = w.value("x_max", cfg.window.x_max);
    cfg.window.y_min = w.value("y_min", cfg.window.y_min);
    cfg.window.y_max = w.value("y_max", cfg.window.y_max);
    cfg.window.nx = w.value("nx", cfg.window.nx);
    cfg.window.ny = w.value("ny", cfg.window.ny);
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    auto& tol = cfg.tol;
    tol.newton_tol = t.value("newton_tol", tol.newton_tol);
    tol.bisect_tol = t.value("bisect_tol", tol.bisect_tol);
    tol.violation_tol_rel = t.value("violation_tol_rel", tol.violation_tol_rel);
    tol.image_tol = t.value("image_tol", tol.image_tol);
    tol.regularity_tol = t.value("regularity_tol", tol.regularity_tol);
    tol.curve_tol_rel = t.value("curve_tol_rel", tol.curve_tol_rel);
    tol.mono_tol = t.value("mono_tol", tol.mono_tol);
    tol.tol_compare = t.value("tol_compare", tol.tol_compare);
    tol.sandwich_tol = t.value("sandwich_tol", tol.sandwich_tol);
    tol.psd_slack = t.value("psd_slack", tol.psd_slack);
    tol.degen_tol = t.value("degen_tol", tol.degen_tol);
  }
  if (j.contains("budgets")) {
    const auto& b = j.at("budgets");
    auto& bud = cfg.budget;
    bud.pair_samples = b.value("pair_samples", bud.pair_samples);
    bud.seg_samples = b.value("seg_samples", bud.seg_samples);
    bud.scan_samples = b.value("scan_samples", bud.scan_samples);
    bud.refine_iters = b.value("refine_iters", bud.refine_iters);
    bud.probe_levels = b.value("probe_levels", bud.probe_levels);
    bud.newton_max_iters = b.value("newton_max_iters", bud.newton_max_iters);
    bud.margin_cells = b.value("margin_cells", bud.margin_cells);
    bud.monotonicity_pairs = b.value("monotonicity_pairs", bud.monotonicity_pairs);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.hess_eps = j.value("hess_eps", cfg.hess_eps);
  cfg.min_separation = j.value("min_separation", cfg.min_separation);
  cfg.scan_level_margin = j.value("scan_level_margin", cfg.scan_level_margin);
  if (j.contains("levels"))
    for (const auto& c : j.at("levels")) cfg.level_values.push_back(c.get<double>());
  if (j.contains("bracket")) {
    const auto& b = j.at("bracket");
    if (!b.is_array() || b.size() != 2)
      throw std::invalid_argument("config: bracket must be [lo, hi]");
    cfg.bracket = std::make_pair(b.at(0).get<double>(), b.at(1).get<double>());
  }
  cfg.emit_timings = j.value("emit_timings", cfg.emit_timings);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.json_path = j.value("json_path", cfg.json_path);
  cfg.pgm_prefix = j.value("pgm_prefix", cfg.pgm_prefix);
  cfg.svg_prefix = j.value("svg_prefix", cfg.svg_prefix);

  cfg.validate();
  return cfg;
}

namespace {

class StageClock {
 public:
  explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}

  template <typename Fn>
  auto time(const std::string& name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      sink_[name] = ms_since(t0);
    } else {
      auto out = fn();
      sink_[name] = ms_since(t0);
      return out;
    }
  }

 private:
  static double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
  std::map<std::string, double>& sink_;
};

void write_point(JsonWriter& w, Point2 p) {
  w.begin_array();
  w.value(p.x);
  w.value(p.y);
  w.end_array();
}

void write_verdict(JsonWriter& w, const VerdictEntry& v) {
  w.begin_object();
  w.key("applicable");
  w.value(v.applicable);
  w.key("pass");
  if (v.applicable)
    w.value(v.pass);
  else
    w.null();
  w.key("lhs");
  if (v.applicable)
    w.value(v.lhs);
  else
    w.null();
  w.key("rhs");
  if (v.applicable)
    w.value(v.rhs);
  else
    w.null();
  w.end_object();
}

}  // namespace

AnalysisReport run_analysis(const RunConfig& cfg) {
  cfg.validate();
  const FieldPtr field = make_field(cfg);
  const GridSpec& grid = cfg.window;
  const int workers = resolve_workers(cfg.workers);

  AnalysisReport rep;
  rep.config = cfg;
  StageClock clock(rep.timings_ms);

  // Hess+ region.
  const RegionMask hmask = clock.time("hess_mask", [&] {
    return hess_plus_mask(*field, grid, cfg.hess_eps, workers);
  });
  rep.hess.eps = cfg.hess_eps;
  rep.hess.true_cells = hmask.count_true();
  rep.hess.false_cells = hmask.cells.size() - rep.hess.true_cells;
  rep.hess.complement_empty = rep.hess.false_cells == 0;
  try {
    rep.hess.complement_bounded = complement_bounded(hmask, cfg.budget.margin_cells);
  } catch (const InconclusiveError&) {
    rep.hess.complement_bounded = std::nullopt;
  }
  if (!rep.hess.complement_empty) {
    clock.time("h_max", [&] {
      HMaxEstimate h = h_max(*field, hmask, cfg.budget.refine_iters);
      h.complement_bounded = rep.hess.complement_bounded.value_or(false);
      rep.hess.h = h;
    });
  }

  // Critical set.
  CriticalSearchOptions copts;
  copts.newton_tol = cfg.tol.newton_tol;
  copts.max_iters = cfg.budget.newton_max_iters;
  copts.degen_tol = cfg.tol.degen_tol;
  copts.workers = workers;
  rep.critical = clock.time("critical_set", [&] {
    return find_critical_points(*field, grid, cfg.tol.newton_tol, cfg.budget.newton_max_iters,
                                copts);
  });
  {
    const double mx = cfg.budget.margin_cells * grid.dx();
    const double my = cfg.budget.margin_cells * grid.dy();
    rep.critical_all_interior = !rep.critical.empty;
    for (const CriticalPoint& cp : rep.critical.points) {
      if (cp.location.x < grid.x_min + mx || cp.location.x > grid.x_max - mx ||
          cp.location.y < grid.y_min + my || cp.location.y > grid.y_max - my)
        rep.critical_all_interior = false;
    }
  }

  // Shared raster cache for the threshold probes.
  const FieldRaster raster = clock.time("field_raster", [&] {
    return FieldRaster::build(*field, grid, workers);
  });
  const double fmin = *std::min_element(raster.cell_values.begin(), raster.cell_values.end());
  const double fmax = *std::max_element(raster.cell_values.begin(), raster.cell_values.end());

  BisectOptions bopts;
  bopts.pair_samples = cfg.budget.pair_samples;
  bopts.seg_samples = cfg.budget.seg_samples;
  bopts.probe_levels = cfg.budget.probe_levels;
  bopts.probe.violation_tol_rel = cfg.tol.violation_tol_rel;
  bopts.probe.curve_tol_rel = cfg.tol.curve_tol_rel;
  bopts.probe.seed = cfg.seed;
  bopts.probe.workers = 1;  // probes are sequential by contract
  bopts.probe.cache = &raster;

  const double span = std::max(fmax - fmin, 1e-12);
  std::pair<double, double> bracket;
  if (cfg.bracket) {
    bracket = *cfg.bracket;
  } else {
    double anchor = fmin;
    if (rep.hess.h) anchor = std::max(anchor, rep.hess.h->value);
    if (!rep.critical.empty) anchor = std::max(anchor, rep.critical.nu_max);
    bracket = {fmin, anchor + 0.05 * span + 1e-9 * (1.0 + std::fabs(anchor))};
  }

  clock.time("thresholds", [&] {
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        rep.sql = estimate_sql(*field, bracket, grid, cfg.tol.bisect_tol, bopts);
        rep.scl = estimate_scl(*field, bracket, grid, cfg.tol.bisect_tol, bopts);
        rep.thresholds_available = true;
        rep.bracket_used = bracket;
        return;
      } catch (const BracketError&) {
        if (cfg.bracket) break;  // a user bracket is not widened silently
        if (bracket.second >= fmax + span) break;
        bracket.second = std::min(fmax + span, bracket.second + 0.5 * span);
      }
    }
    rep.thresholds_available = false;
  });

  if (rep.thresholds_available) {
    clock.time("monotonicity", [&] {
      rep.monotone = monotonicity_check(*field, rep.scl.hi, grid, cfg.budget.monotonicity_pairs,
                                        cfg.tol.mono_tol, cfg.seed, workers);
    });
  }

  // Paper-facing inequality verdicts.
  const bool bounded = rep.hess.complement_bounded.value_or(false);
  if (rep.hess.h && bounded) {
    rep.v_h_ge_nu.applicable = true;
    rep.v_h_ge_nu.lhs = rep.hess.h->value;
    rep.v_h_ge_nu.rhs = rep.critical.empty ? -std::numeric_limits<double>::infinity()
                                           : rep.critical.nu_max;
    rep.v_h_ge_nu.pass = rep.critical.empty ||
                         nu_vs_h_check(*rep.hess.h, rep.critical.nu_max, cfg.tol.tol_compare);
  }
  if (rep.thresholds_available) {
    rep.v_sql_le_scl.applicable = true;
    rep.v_sql_le_scl.lhs = rep.sql.hi;
    rep.v_sql_le_scl.rhs = rep.scl.hi + cfg.tol.bisect_tol;
    rep.v_sql_le_scl.pass = rep.sql.hi <= rep.scl.hi + cfg.tol.bisect_tol;
    if (rep.hess.h) {
      rep.v_sandwich.applicable = true;
      rep.v_sandwich.lhs = rep.scl.hi;
      rep.v_sandwich.rhs = std::max(rep.sql.hi, rep.hess.h->value) + cfg.tol.sandwich_tol;
      rep.v_sandwich.pass = rep.v_sandwich.lhs <= rep.v_sandwich.rhs;
    }
  }
  rep.all_inequalities_ok = (!rep.v_h_ge_nu.applicable || rep.v_h_ge_nu.pass) &&
                            (!rep.v_sql_le_scl.applicable || rep.v_sql_le_scl.pass) &&
                            (!rep.v_sandwich.applicable || rep.v_sandwich.pass);

  // Level classification table.
  std::vector<double> c_values = cfg.level_values;
  if (c_values.empty()) {
    const double lo = fmin + 0.05 * span;
    const double hi = rep.thresholds_available ? rep.scl.hi + 0.25 * span : fmax - 0.05 * span;
    for (int i = 0; i < 8; ++i) c_values.push_back(lo + (hi - lo) * i / 7.0);
  }
  CurveOptions curve_opts;
  curve_opts.curve_tol_rel = cfg.tol.curve_tol_rel;
  curve_opts.regularity_tol = cfg.tol.regularity_tol;
  curve_opts.workers = 1;
  clock.time("levels", [&] {
    rep.levels = classify_levels(*field, c_values, grid, curve_opts);
  });

  // Gradient injectivity on the overlevel of scl_hi, and valence bounds.
  if (rep.thresholds_available) {
    const double sep =
        cfg.min_separation > 0.0 ? cfg.min_separation : 4.0 * grid.cell_diag();
    rep.scan_level = rep.scl.hi + cfg.scan_level_margin * (1.0 + std::fabs(rep.scl.hi));
    RegionMask over;
    over.grid = grid;
    over.tag = PropertyTag::overlevel;
    over.cells.assign(raster.cell_values.size(), 0);
    for (std::size_t k = 0; k < raster.cell_values.size(); ++k)
      over.cells[k] = raster.cell_values[k] > rep.scan_level ? 1 : 0;
    ScanOptions sopts;
    sopts.seed = cfg.seed;
    sopts.workers = workers;
    if (over.count_true() > 0) {
      clock.time("injectivity", [&] {
        rep.injectivity = gradient_collision_scan(*field, over, cfg.budget.scan_samples,
                                                  cfg.tol.image_tol, sep, sopts);
      });
    }
    if (rep.hess.true_cells > 0) {
      clock.time("valence", [&] {
        rep.valence = valence_bounds(*field, hmask, rep.scl.hi, rep.critical,
                                     cfg.budget.scan_samples, cfg.tol.image_tol, sep, sopts);
      });
    }
  }

  // Outputs.
  if (!cfg.pgm_prefix.empty()) write_mask_pgm(hmask, cfg.pgm_prefix + "_hess_plus.pgm");
  if (!cfg.svg_prefix.empty()) {
    std::vector<LevelCurve> curves;
    for (double c : c_values) curves.push_back(level_curve(*field, c, grid, curve_opts));
    write_level_curves_svg(curves, grid, cfg.svg_prefix + "_levels.svg");
  }
  if (!cfg.json_path.empty()) {
    std::ofstream out(cfg.json_path);
    if (!out) throw std::runtime_error("run_analysis: cannot open " + cfg.json_path);
    out << rep.to_json() << "\n";
  }
  return rep;
}

LevelThresholdReport AnalysisReport::threshold_report() const {
  LevelThresholdReport r;
  r.sql_bracket = {sql.lo, sql.hi};
  r.scl_bracket = {scl.lo, scl.hi};
  r.sql_at_or_below_lo = sql.at_or_below_lo;
  r.scl_at_or_below_lo = scl.at_or_below_lo;
  r.available = thresholds_available;
  r.h_max_defined = hess.h.has_value();
  r.h_max = hess.h ? hess.h->value : 0.0;
  r.nu_max_defined = !critical.empty;
  r.nu_max = critical.nu_max;
  r.inequalities_ok = all_inequalities_ok;
  r.window = config.window;
  return r;
}

std::string AnalysisReport::to_json() const {
  JsonWriter w;
  w.begin_object();
  w.key("schema_version");
  w.value(kReportSchemaVersion);
  w.key("library_version");
  w.value(kLibraryVersion);

  w.key("field");
  w.begin_object();
  w.key("name");
  w.value(config.field_name);
  w.key("params");
  w.begin_object();
  for (const auto& [k, v] : config.field_params) {
    w.key(k);
    w.value(v);
  }
  w.end_object();
  if (!config.poly.empty()) {
    w.key("monomials");
    w.begin_array();
    for (const Monomial& m : config.poly) {
      w.begin_array();
      w.value(m.i);
      w.value(m.j);
      w.value(m.c);
      w.end_array();
    }
    w.end_array();
  }
  w.end_object();

  w.key("window");
  w.begin_object();
  w.key("x_min"); w.value(config.window.x_min);
  w.key("x_max"); w.value(config.window.x_max);
  w.key("y_min"); w.value(config.window.y_min);
  w.key("y_max"); w.value(config.window.y_max);
  w.key("nx"); w.value(config.window.nx);
  w.key("ny"); w.value(config.window.ny);
  w.end_object();

  w.key("seed");
  w.value(static_cast<long long>(config.seed));

  w.key("tolerances");
  w.begin_object();
  w.key("newton_tol"); w.value(config.tol.newton_tol);
  w.key("bisect_tol"); w.value(config.tol.bisect_tol);
  w.key("violation_tol_rel"); w.value(config.tol.violation_tol_rel);
  w.key("image_tol"); w.value(config.tol.image_tol);
  w.key("regularity_tol"); w.value(config.tol.regularity_tol);
  w.key("curve_tol_rel"); w.value(config.tol.curve_tol_rel);
  w.key("mono_tol"); w.value(config.tol.mono_tol);
  w.key("tol_compare"); w.value(config.tol.tol_compare);
  w.key("sandwich_tol"); w.value(config.tol.sandwich_tol);
  w.key("psd_slack"); w.value(config.tol.psd_slack);
  w.key("degen_tol"); w.value(config.tol.degen_tol);
  w.end_object();

  w.key("budgets");
  w.begin_object();
  w.key("pair_samples"); w.value(config.budget.pair_samples);
  w.key("seg_samples"); w.value(config.budget.seg_samples);
  w.key("scan_samples"); w.value(config.budget.scan_samples);
  w.key("refine_iters"); w.value(config.budget.refine_iters);
  w.key("probe_levels"); w.value(config.budget.probe_levels);
  w.key("newton_max_iters"); w.value(config.budget.newton_max_iters);
  w.key("margin_cells"); w.value(config.budget.margin_cells);
  w.key("monotonicity_pairs"); w.value(config.budget.monotonicity_pairs);
  w.end_object();

  w.key("hess_region");
  w.begin_object();
  w.key("eps"); w.value(hess.eps);
  w.key("true_cells"); w.value(hess.true_cells);
  w.key("false_cells"); w.value(hess.false_cells);
  w.key("complement_empty"); w.value(hess.complement_empty);
  w.key("complement_bounded");
  if (hess.complement_bounded)
    w.value(*hess.complement_bounded);
  else
    w.null();
  w.key("window_relative");
  w.value(true);
  w.key("h_max");
  if (hess.h)
    w.value(hess.h->value);
  else
    w.null();
  w.key("h_max_witness");
  if (hess.h)
    write_point(w, hess.h->witness);
  else
    w.null();
  w.key("h_max_raster");
  if (hess.h)
    w.value(hess.h->raster_value);
  else
    w.null();
  w.key("refinement_radius");
  if (hess.h)
    w.value(hess.h->refinement_radius);
  else
    w.null();
  w.end_object();

  w.key("critical_set");
  w.begin_object();
  w.key("points");
  w.begin_array();
  for (const CriticalPoint& cp : critical.points) {
    w.begin_object();
    w.key("x"); w.value(cp.location.x);
    w.key("y"); w.value(cp.location.y);
    w.key("value"); w.value(cp.value);
    w.key("grad_norm"); w.value(cp.grad_norm);
    w.key("morse_index");
    if (cp.degenerate)
      w.null();
    else
      w.value(cp.morse_index);
    w.key("degenerate"); w.value(cp.degenerate);
    w.key("in_hess_plus"); w.value(cp.in_hess_plus);
    w.end_object();
  }
  w.end_array();
  w.key("empty"); w.value(critical.empty);
  w.key("nu_max");
  if (critical.empty)
    w.null();
  else
    w.value(critical.nu_max);
  w.key("seeds_used"); w.value(critical.seeds_used);
  w.key("seeds_discarded"); w.value(critical.seeds_discarded);
  w.key("all_points_interior"); w.value(critical_all_interior);
  w.end_object();

  w.key("thresholds");
  w.begin_object();
  w.key("available"); w.value(thresholds_available);
  w.key("bracket");
  if (thresholds_available) {
    w.begin_array();
    w.value(bracket_used.first);
    w.value(bracket_used.second);
    w.end_array();
  } else {
    w.null();
  }
  auto write_bisect = [&](const char* name, const BisectResult& b) {
    w.key(name);
    if (!thresholds_available) {
      w.null();
      return;
    }
    w.begin_object();
    w.key("lo"); w.value(b.lo);
    w.key("hi"); w.value(b.hi);
    w.key("width"); w.value(b.width());
    w.key("at_or_below_lo"); w.value(b.at_or_below_lo);
    w.key("iterations"); w.value(b.iterations);
    w.key("probe_calls"); w.value(b.probe_calls);
    w.key("samples_used"); w.value(b.samples_used);
    w.end_object();
  };
  write_bisect("sql", sql);
  write_bisect("scl", scl);
  w.key("monotone_on_overlevel");
  if (monotone)
    w.value(monotone->ok);
  else
    w.null();
  w.end_object();

  w.key("verdicts");
  w.begin_object();
  w.key("h_ge_nu");
  write_verdict(w, v_h_ge_nu);
  w.key("sql_le_scl");
  write_verdict(w, v_sql_le_scl);
  w.key("scl_sandwich");
  write_verdict(w, v_sandwich);
  w.key("all_pass");
  w.value(all_inequalities_ok);
  w.end_object();

  w.key("levels");
  w.begin_array();
  for (const LevelClassification& lc : levels) {
    w.begin_object();
    w.key("c"); w.value(lc.c);
    w.key("nonempty"); w.value(lc.nonempty);
    w.key("regular"); w.value(lc.regular);
    w.key("components"); w.value(lc.components);
    w.key("curvature_sign_constant"); w.value(lc.curvature_sign_constant);
    w.key("min_grad_norm"); w.value(lc.min_grad_norm);
    w.end_object();
  }
  w.end_array();

  w.key("injectivity");
  if (injectivity) {
    w.begin_object();
    w.key("region_tag"); w.value(injectivity->region_tag);
    w.key("level"); w.value(scan_level);
    w.key("samples"); w.value(injectivity->samples);
    w.key("verdict");
    w.value(injectivity->verdict == InjectivityReport::Verdict::no_collision_found
                ? "no_collision_found"
                : "collisions_found");
    w.key("valence_lower_bound"); w.value(injectivity->valence_lower_bound);
    w.key("capture_radius_used"); w.value(injectivity->capture_radius_used);
    w.key("collisions");
    w.begin_array();
    for (const CollisionPair& c : injectivity->collisions) {
      w.begin_object();
      w.key("p1"); write_point(w, c.p1);
      w.key("p2"); write_point(w, c.p2);
      w.key("image");
      w.begin_array();
      w.value(c.image.x);
      w.value(c.image.y);
      w.end_array();
      w.key("separation"); w.value(c.separation);
      w.key("image_residual"); w.value(c.image_residual);
      w.key("value_gap"); w.value(c.value_gap);
      w.end_object();
    }
    w.end_array();
    w.end_object();
  } else {
    w.null();
  }

  w.key("valence");
  if (valence) {
    w.begin_object();
    w.key("lo"); w.value(valence->lo);
    w.key("hi_conjectural"); w.value(valence->hi_conjectural);
    w.key("hi_is_conjectural"); w.value(valence->hi_is_conjectural);
    w.key("components_hess_minus_overlevel"); w.value(valence->components_hess_minus_overlevel);
    w.key("index0_in_mask"); w.value(valence->index0_in_mask);
    w.key("scan_multiplicity"); w.value(valence->scan_multiplicity);
    w.end_object();
  } else {
    w.null();
  }

  if (config.emit_timings) {
    w.key("timings_ms");
    w.begin_object();
    for (const auto& [k, v] : timings_ms) {
      w.key(k);
      w.value(v);
    }
    w.end_object();
  }
  w.end_object();
  return w.str();
}

int analysis_exit_code(const AnalysisReport& report) {
  return report.all_inequalities_ok ? 0 : 2;
}

}  // namespace trunclev
