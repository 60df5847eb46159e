#ifndef POLYSDE_SVG_HPP
#define POLYSDE_SVG_HPP

#include <string>
#include <vector>

namespace polysde {

// Minimal SVG 1.1 writer with a world-coordinate viewport; enough for the
// trajectory panels, weight heatmaps and quiver plots this project emits.
// Output is plain vector primitives, no rasters.
class SvgCanvas {
 public:
  SvgCanvas(int width_px, int height_px, double x_min, double x_max, double y_min, double y_max,
            std::string title = "");

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width_px = 1.0);
  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& stroke, double width_px = 1.0);
  void rect(double x, double y, double w, double h, const std::string& fill);
  void circle(double x, double y, double radius_px, const std::string& fill);
  void star(double x, double y, double radius_px, const std::string& fill);
  void arrow(double x, double y, double dx, double dy, const std::string& stroke);
  void text(double x, double y, const std::string& s, int font_px = 12);
  // Frame, tick marks and numeric labels around the data region.
  void axes(int n_ticks = 5);

  std::string finish() const;
  void write(const std::string& path) const;

 private:
  double sx(double x) const;
  double sy(double y) const;
  void raw(const std::string& s) { body_ += s; }

  int width_, height_;
  double x_min_, x_max_, y_min_, y_max_;
  int margin_ = 46;
  std::string title_;
  std::string body_;
};

// Linear two-stop color ramp (dark blue -> yellow) for scalar fields in
// [0, 1]; returns "#rrggbb".
std::string heat_color(double v);

}  // namespace polysde

#endif  // POLYSDE_SVG_HPP
