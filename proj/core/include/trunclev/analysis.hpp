// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trunclev/builtins.hpp"
#include "trunclev/critical.hpp"
#include "trunclev/gradient_map.hpp"
#include "trunclev/hess_region.hpp"
#include "trunclev/level_curve.hpp"
#include "trunclev/truncation.hpp"

namespace trunclev {

struct Tolerances {
  double newton_tol = 1e-10;
  double bisect_tol = 1e-2;
  double violation_tol_rel = 1e-7;
  double image_tol = 1e-4;
  double regularity_tol = 1e-3;
  double curve_tol_rel = 1e-12;
  double mono_tol = 1e-9;
  double tol_compare = 1e-9;   ///< h_max >= nu_max - tol_compare
  double sandwich_tol = 1e-6;  ///< scl_hi <= max(sql_hi, h_max) + sandwich_tol
  double psd_slack = 1e-7;
  double degen_tol = 1e-10;

  void validate() const;
};

struct Budgets {
  long pair_samples = 2000;
  int seg_samples = 5;
  long scan_samples = 200000;
  int refine_iters = 64;
  int probe_levels = 8;
  int newton_max_iters = 64;
  int margin_cells = 5;
  long monotonicity_pairs = 4000;

  void validate() const;
};

struct RunConfig {
  std::string field_name = "cassini";
  std::map<std::string, double> field_params;  ///< e.g. {"a": 1.0}
  std::vector<Monomial> poly;                  ///< used when field_name == "poly"

  GridSpec window{-3.0, 3.0, -3.0, 3.0, 600, 600};
  Tolerances tol;
  Budgets budget;
  std::uint64_t seed = 20260810;

  double hess_eps = 0.0;            ///< PD margin for the Hess+ mask
  double min_separation = 0.0;      ///< 0 = auto (4 * cell diagonal)
  double scan_level_margin = 0.05;  ///< overlevel scan at scl_hi + margin * (1 + |scl_hi|)
  std::vector<double> level_values; ///< empty = auto ladder
  std::optional<std::pair<double, double>> bracket;  ///< empty = auto from the raster

  bool emit_timings = false;  ///< timings are kept out of the canonical JSON by default
  int workers = 0;            ///< 0 = auto; execution detail, never echoed in the report

  std::string json_path;
  std::string pgm_prefix;
  std::string svg_prefix;

  void validate() const;
};

/// Parse a config JSON document (the same shape the report echoes back).
/// Unknown keys are rejected. Throws std::invalid_argument on errors.
RunConfig config_from_json_text(const std::string& text);

FieldPtr make_field(const RunConfig& cfg);

struct VerdictEntry {
  bool applicable = false;
  bool pass = true;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct HessRegionSummary {
  double eps = 0.0;
  std::size_t true_cells = 0;
  std::size_t false_cells = 0;
  bool complement_empty = false;
  std::optional<bool> complement_bounded;  ///< nullopt when inconclusive
  std::optional<HMaxEstimate> h;
};

struct AnalysisReport {
  RunConfig config;

  HessRegionSummary hess;
  CriticalSetReport critical;
  bool critical_all_interior = false;  ///< window-relative boundedness evidence for C(f)

  bool thresholds_available = false;
  std::pair<double, double> bracket_used{0.0, 0.0};
  BisectResult sql;
  BisectResult scl;
  std::optional<MonotonicityResult> monotone;  ///< on the closed overlevel {f >= scl_hi}

  VerdictEntry v_h_ge_nu;      ///< h_max >= nu_max - tol_compare
  VerdictEntry v_sql_le_scl;   ///< sql_hi <= scl_hi + bisect_tol
  VerdictEntry v_sandwich;     ///< scl_hi <= max(sql_hi, h_max) + sandwich_tol
  bool all_inequalities_ok = true;

  std::vector<LevelClassification> levels;

  double scan_level = 0.0;
  std::optional<InjectivityReport> injectivity;
  std::optional<ValenceBounds> valence;

  std::map<std::string, double> timings_ms;  ///< serialized only with emit_timings

  /// Canonical JSON bytes: identical config (including seed) gives identical
  /// output regardless of worker count.
  std::string to_json() const;

  /// Condensed threshold report view.
  LevelThresholdReport threshold_report() const;
};

/// Full pipeline: Hess+ region -> critical set -> thresholds -> levels ->
/// gradient injectivity and valence. Writes the configured output files.
AnalysisReport run_analysis(const RunConfig& cfg);

/// Exit-code contract: 0 on completion, 2 when any applicable
/// paper-inequality verdict failed (numerical-fault signal). Input errors
/// are signalled by exceptions and map to exit code 1 in the CLI.
int analysis_exit_code(const AnalysisReport& report);

}  // namespace trunclev
