#include "aos/perception.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "aos/error.hpp"

namespace aos::perception {

namespace {

constexpr double kArcminPerRadianExact = 60.0 * 180.0 / std::numbers::pi;

double half_tan(double fov_deg) { return std::tan(fov_deg * std::numbers::pi / 360.0); }

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v + 0.0);  // + 0.0 folds -0 into 0
  return buf;
}

}  // namespace

double perceived_distance(double eye_separation, double screen_distance, double disparity) {
  if (disparity >= eye_separation) {
    throw BeyondInfinity("disparity " + g6(disparity) + " m reaches the eye separation " +
                         g6(eye_separation) + " m (perceived beyond infinity)");
  }
  return eye_separation * screen_distance / (eye_separation - disparity);
}

double disparity(double eye_separation, double screen_distance, double distance) {
  require(distance > 0.0, "object distance must be positive, got " + g6(distance));
  return eye_separation * (distance - screen_distance) / distance;
}

void CaptureGeometry::validate() const {
  require(focal_distance > 0.0, "focal distance v_f must be positive");
  require(baseline >= 0.0, "camera baseline e_f must be >= 0");
  require(fov_deg > 0.0 && fov_deg < 180.0, "camera FOV must lie in (0, 180) degrees");
}

void DisplayModel::validate() const {
  require(eye_separation > 0.0, "inter-ocular distance e_d must be positive");
  require(image_distance > 0.0, "display image distance v_d must be positive");
  require(fov_deg > 0.0 && fov_deg < 180.0, "display FOV must lie in (0, 180) degrees");
}

DisplayModel DisplayModel::from_diagonal_fov(double diagonal_deg, double aspect, double eye_separation,
                                             double image_distance) {
  require(aspect > 0.0, "display aspect ratio must be positive");
  const double half_diag = half_tan(diagonal_deg);
  const double half_h = half_diag * aspect / std::sqrt(1.0 + aspect * aspect);
  DisplayModel m;
  m.eye_separation = eye_separation;
  m.image_distance = image_distance;
  m.fov_deg = 2.0 * std::atan(half_h) * 180.0 / std::numbers::pi;
  return m;
}

double DisplayModel::arcmin(double display_disparity_m) const {
  return 2.0 * std::atan(display_disparity_m / (2.0 * image_distance)) * kArcminPerRadianExact;
}

void ObserverModel::validate() const {
  require(acuity_arcmin >= 0.0, "stereo acuity must be >= 0 arcmin");
  require(gradient_limit > 0.0, "disparity gradient limit must be positive");
  require(separation_arcmin > 0.0, "object separation must be positive");
}

double display_scale(const CaptureGeometry& cap, const DisplayModel& disp) {
  return disp.image_distance * half_tan(disp.fov_deg) / (cap.focal_distance * half_tan(cap.fov_deg));
}

PerceptionResult perceived_target_height(const CaptureGeometry& cap, const DisplayModel& disp,
                                         double target_height) {
  cap.validate();
  disp.validate();
  require(target_height >= 0.0 && target_height < cap.focal_distance,
          "target height must satisfy 0 <= h_t < v_f");

  PerceptionResult r;
  r.target_height = target_height;
  r.baseline = cap.baseline;
  const double target_distance = cap.focal_distance - target_height;
  r.capture_disparity_m = disparity(cap.baseline, cap.focal_distance, target_distance);
  r.display_disparity_m = display_scale(cap, disp) * r.capture_disparity_m;
  r.display_disparity_arcmin = disp.arcmin(r.display_disparity_m);
  try {
    const double z = perceived_distance(disp.eye_separation, disp.image_distance, r.display_disparity_m);
    r.perceived_distance_m = z;
    r.pth_m = disp.image_distance - z;
  } catch (const BeyondInfinity&) {
    r.beyond_infinity = true;
  }
  return r;
}

double jddi(const ObserverModel& observer, const DisplayModel& disp) {
  observer.validate();
  disp.validate();
  const double v = disp.image_distance;
  return observer.acuity_arcmin * v * v / (kArcminPerRadian * disp.eye_separation + v);
}

double disparity_gradient(double d1_arcmin, double d2_arcmin, double separation_arcmin) {
  require(separation_arcmin > 0.0, "disparity gradient needs a positive object separation");
  return std::abs(d1_arcmin - d2_arcmin) / separation_arcmin;
}

void derive_flags(PerceptionResult& r, const ObserverModel& observer) {
  r.depth_detectable = r.pth_m.has_value() && *r.pth_m >= r.jddi_m;
  r.fusible = !r.beyond_infinity && r.gradient <= observer.gradient_limit;
}

PerceptionResult evaluate(const CaptureGeometry& cap, const DisplayModel& disp,
                          const ObserverModel& observer, double target_height) {
  observer.validate();
  PerceptionResult r = perceived_target_height(cap, disp, target_height);
  // ground sits on the focal plane, so its display disparity is zero
  r.gradient = disparity_gradient(r.display_disparity_arcmin, 0.0, observer.separation_arcmin);
  r.jddi_m = jddi(observer, disp);
  derive_flags(r, observer);
  return r;
}

FeasibilityTable feasibility_region(const CaptureGeometry& cap_template, const DisplayModel& disp,
                                    const ObserverModel& observer,
                                    const std::vector<double>& target_heights,
                                    const std::vector<double>& baselines) {
  require(!target_heights.empty() && !baselines.empty(), "feasibility sweep needs non-empty grids");
  FeasibilityTable table;
  table.target_heights = target_heights;
  table.baselines = baselines;
  table.rows.reserve(target_heights.size() * baselines.size());
  for (double ht : target_heights) {
    for (double ef : baselines) {
      CaptureGeometry cap = cap_template;
      cap.baseline = ef;
      table.rows.push_back(evaluate(cap, disp, observer, ht));
    }
  }
  return table;
}

namespace {
// |display disparity| per meter of baseline
double disparity_per_baseline(const CaptureGeometry& cap, const DisplayModel& disp, double ht) {
  return display_scale(cap, disp) * ht / (cap.focal_distance - ht);
}
}  // namespace

std::optional<double> detectable_baseline(const CaptureGeometry& cap_template, const DisplayModel& disp,
                                          const ObserverModel& observer, double target_height) {
  cap_template.validate();
  const double threshold = jddi(observer, disp);
  if (threshold <= 0.0) return 0.0;
  const double k = disparity_per_baseline(cap_template, disp, target_height);
  if (k <= 0.0 || threshold >= disp.image_distance) return std::nullopt;
  return threshold * disp.eye_separation / (k * (disp.image_distance - threshold));
}

std::optional<double> max_fusible_baseline(const CaptureGeometry& cap_template, const DisplayModel& disp,
                                           const ObserverModel& observer, double target_height) {
  cap_template.validate();
  disp.validate();
  observer.validate();
  const double k = disparity_per_baseline(cap_template, disp, target_height);
  const double max_angle = observer.gradient_limit * observer.separation_arcmin / kArcminPerRadianExact;
  if (k <= 0.0 || max_angle >= std::numbers::pi) return std::nullopt;
  return 2.0 * disp.image_distance * std::tan(0.5 * max_angle) / k;
}

void write_feasibility_csv(std::ostream& os, const FeasibilityTable& table) {
  os << "target_h,e_f,d_display_m,d_display_arcmin,gradient,PTH_m,JDDI_m,detectable,fusible\n";
  for (const PerceptionResult& r : table.rows) {
    os << g6(r.target_height) << ',' << g6(r.baseline) << ',' << g6(r.display_disparity_m) << ','
       << g6(r.display_disparity_arcmin) << ',' << g6(r.gradient) << ','
       << (r.pth_m ? g6(*r.pth_m) : std::string("nonfusible")) << ',' << g6(r.jddi_m) << ','
       << (r.depth_detectable ? 1 : 0) << ',' << (r.fusible ? 1 : 0) << '\n';
  }
}

std::vector<FeasibilityCsvRow> read_feasibility_csv(std::istream& is) {
  std::vector<FeasibilityCsvRow> rows;
  std::string line;
  if (!std::getline(is, line)) return rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw ValidationError("feasibility CSV row needs 9 fields: " + line);
    FeasibilityCsvRow r;
    r.target_h = std::stod(fields[0]);
    r.e_f = std::stod(fields[1]);
    r.d_display_m = std::stod(fields[2]);
    r.d_display_arcmin = std::stod(fields[3]);
    r.gradient = std::stod(fields[4]);
    if (fields[5] != "nonfusible") r.pth_m = std::stod(fields[5]);
    r.jddi_m = std::stod(fields[6]);
    r.detectable = fields[7] == "1";
    r.fusible = fields[8] == "1";
    rows.push_back(r);
  }
  return rows;
}

}  // namespace aos::perception
