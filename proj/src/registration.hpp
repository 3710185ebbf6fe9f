#pragma once

// Translation-only bilinear resampling shared by integration and plane sweep.

#include <cmath>

#include "aos/image.hpp"
#include "aos/scan_stack.hpp"

namespace aos::detail {

/// Source offset split into integer and fractional parts. Fractions within
/// 1e-9 of an integer snap to it so that integral shifts copy exactly.
struct Shift {
  int ix = 0;
  int iy = 0;
  double tx = 0.0;
  double ty = 0.0;

  static Shift of(double sx, double sy) {
    Shift s;
    const auto split = [](double v, int& whole, double& frac) {
      double w = std::floor(v);
      double f = v - w;
      if (f < 1e-9) {
        f = 0.0;
      } else if (1.0 - f < 1e-9) {
        w += 1.0;
        f = 0.0;
      }
      whole = static_cast<int>(w);
      frac = f;
    };
    split(sx, s.ix, s.tx);
    split(sy, s.iy, s.ty);
    return s;
  }
};

/// Horizontal/vertical source offset for registering a frame captured at
/// (frame_x, frame_y) into the grid of a virtual camera at (grid_x, grid_y),
/// for the plane at `focal_distance`.
inline Shift plane_shift(double focal_px, double grid_x, double grid_y, double frame_x,
                         double frame_y, double focal_distance) {
  return Shift::of(focal_px * (grid_x - frame_x) / focal_distance,
                   focal_px * (grid_y - frame_y) / focal_distance);
}

/// Calls sink(x, y, value) for every destination pixel of row `y` covered by
/// `src` shifted by `shift`. Destination and source share dimensions.
template <typename Sink>
inline void register_row(const ImageF& src, const Shift& shift, const FrameCorrection& corr, int y,
                         Sink&& sink) {
  const int w = src.width();
  const int h = src.height();
  const int y0 = y + shift.iy;
  const bool two_rows = shift.ty != 0.0;
  if (y0 < 0 || y0 >= h || (two_rows && y0 + 1 >= h)) return;
  const bool two_cols = shift.tx != 0.0;
  const int x_lo = std::max(0, -shift.ix);
  const int x_hi = std::min(w, w - shift.ix - (two_cols ? 1 : 0));
  const auto r0 = src.row(y0);
  const bool identity = corr.identity();
  if (!two_rows) {
    for (int x = x_lo; x < x_hi; ++x) {
      const int xs = x + shift.ix;
      double v = r0[xs];
      if (two_cols) v = (1.0 - shift.tx) * v + shift.tx * r0[xs + 1];
      if (!identity) v = corr.gain * v + corr.offset;
      sink(x, y, v);
    }
    return;
  }
  const auto r1 = src.row(y0 + 1);
  for (int x = x_lo; x < x_hi; ++x) {
    const int xs = x + shift.ix;
    double top = r0[xs];
    double bottom = r1[xs];
    if (two_cols) {
      top = (1.0 - shift.tx) * top + shift.tx * r0[xs + 1];
      bottom = (1.0 - shift.tx) * bottom + shift.tx * r1[xs + 1];
    }
    double v = (1.0 - shift.ty) * top + shift.ty * bottom;
    if (!identity) v = corr.gain * v + corr.offset;
    sink(x, y, v);
  }
}

}  // namespace aos::detail
