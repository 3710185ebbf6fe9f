#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace aos::perception {

/// One radian in arcminutes, as used by the just-detectable depth interval.
inline constexpr double kArcminPerRadian = 3437.75;

/// Raised when a disparity reaches the eye separation: the fixation point
/// would lie at or beyond infinity.
class BeyondInfinity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// z = e v / (e - d). Throws BeyondInfinity when d >= e.
double perceived_distance(double eye_separation, double screen_distance, double disparity);

/// d = e (z - v) / z, the inverse of perceived_distance. Throws
/// ValidationError when z <= 0.
double disparity(double eye_separation, double screen_distance, double distance);

struct CaptureGeometry {
  double focal_distance = 26.0;  ///< v_f (= h)
  double baseline = 1.0;         ///< e_f
  double fov_deg = 61.0;         ///< FOV_f

  void validate() const;
};

struct DisplayModel {
  double eye_separation = 0.065;  ///< e_d
  double image_distance = 2.4852; ///< v_d
  double fov_deg = 68.0;          ///< FOV_d, treated as per-eye horizontal

  void validate() const;

  /// Horizontal field of view of a panel with the given diagonal field of
  /// view and width:height aspect ratio.
  static DisplayModel from_diagonal_fov(double diagonal_deg, double aspect = 1.0,
                                        double eye_separation = 0.065,
                                        double image_distance = 2.4852);

  /// On-display disparity (meters) to visual angle (arcmin),
  /// 2 atan(d / (2 v_d)), sign preserved.
  double arcmin(double display_disparity_m) const;
};

struct ObserverModel {
  double acuity_arcmin = 6.0;      ///< d_gamma
  double gradient_limit = 1.0;
  double separation_arcmin = 60.0; ///< angular distance used for gradients

  void validate() const;
};

/// Scale applied to a capture-side disparity to express it on the display:
/// (v_d tan(FOV_d / 2)) / (v_f tan(FOV_f / 2)).
double display_scale(const CaptureGeometry& cap, const DisplayModel& disp);

struct PerceptionResult {
  double target_height = 0.0;
  double baseline = 0.0;
  double capture_disparity_m = 0.0;  ///< at the focal plane, relative to ground
  double display_disparity_m = 0.0;
  double display_disparity_arcmin = 0.0;
  double gradient = 0.0;             ///< against ground at the configured separation
  double jddi_m = 0.0;
  /// Absent when the scaled disparity reaches e_d (beyond infinity).
  std::optional<double> perceived_distance_m;
  std::optional<double> pth_m;
  bool beyond_infinity = false;
  bool depth_detectable = false;  ///< PTH >= JDDI
  bool fusible = false;           ///< gradient <= limit and not beyond infinity

  bool perceivable() const noexcept { return depth_detectable && fusible; }
};

/// Capture disparity at z_f = v_f - h_t, display scaling, perceived distance
/// z_d and PTH = v_d - z_d. Observer-dependent fields (gradient, JDDI, flags)
/// are left at defaults; see evaluate().
PerceptionResult perceived_target_height(const CaptureGeometry& cap, const DisplayModel& disp,
                                         double target_height);

/// JDDI = d_gamma v_d^2 / (c e_d + v_d), c = 3437.75.
double jddi(const ObserverModel& observer, const DisplayModel& disp);

/// |d1 - d2| / separation; throws ValidationError for separation <= 0.
double disparity_gradient(double d1_arcmin, double d2_arcmin, double separation_arcmin);

/// perceived_target_height plus gradient, JDDI and flags.
PerceptionResult evaluate(const CaptureGeometry& cap, const DisplayModel& disp,
                          const ObserverModel& observer, double target_height);

/// Recomputes both flags from the numeric fields alone.
void derive_flags(PerceptionResult& r, const ObserverModel& observer);

struct FeasibilityTable {
  std::vector<double> target_heights;
  std::vector<double> baselines;
  std::vector<PerceptionResult> rows;  ///< target-major: rows[t * baselines.size() + b]

  const PerceptionResult& at(std::size_t target, std::size_t baseline) const {
    return rows.at(target * baselines.size() + baseline);
  }
};

/// Evaluates every (target height, baseline) combination. Non-fusible entries
/// carry markers; the sweep never aborts on them.
FeasibilityTable feasibility_region(const CaptureGeometry& cap_template, const DisplayModel& disp,
                                    const ObserverModel& observer,
                                    const std::vector<double>& target_heights,
                                    const std::vector<double>& baselines);

/// Smallest baseline at which PTH reaches the JDDI (closed form), or nullopt
/// when it never does (h_t = 0 or JDDI >= v_d).
std::optional<double> detectable_baseline(const CaptureGeometry& cap_template, const DisplayModel& disp,
                                          const ObserverModel& observer, double target_height);

/// Largest baseline at which the gradient against ground stays within the
/// limit, or nullopt for h_t = 0 (unbounded).
std::optional<double> max_fusible_baseline(const CaptureGeometry& cap_template, const DisplayModel& disp,
                                           const ObserverModel& observer, double target_height);

/// CSV columns: target_h,e_f,d_display_m,d_display_arcmin,gradient,PTH_m,JDDI_m,detectable,fusible.
/// Numbers use 6 significant digits; non-fusible PTH is written as "nonfusible".
void write_feasibility_csv(std::ostream& os, const FeasibilityTable& table);

/// Parsed CSV row (inverse of write_feasibility_csv for one line).
struct FeasibilityCsvRow {
  double target_h = 0.0;
  double e_f = 0.0;
  double d_display_m = 0.0;
  double d_display_arcmin = 0.0;
  double gradient = 0.0;
  std::optional<double> pth_m;
  double jddi_m = 0.0;
  bool detectable = false;
  bool fusible = false;
};
std::vector<FeasibilityCsvRow> read_feasibility_csv(std::istream& is);

}  // namespace aos::perception
