#include "polysde/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "polysde/errors.hpp"

namespace polysde {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(int width_px, int height_px, double x_min, double x_max, double y_min,
                     double y_max, std::string title)
    : width_(width_px),
      height_(height_px),
      x_min_(x_min),
      x_max_(x_max),
      y_min_(y_min),
      y_max_(y_max),
      title_(std::move(title)) {}

double SvgCanvas::sx(double x) const {
  return margin_ + (x - x_min_) / (x_max_ - x_min_) * (width_ - 2 * margin_);
}

double SvgCanvas::sy(double y) const {
  return height_ - margin_ - (y - y_min_) / (y_max_ - y_min_) * (height_ - 2 * margin_);
}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width_px) {
  raw("<line x1=\"" + fmt(sx(x1)) + "\" y1=\"" + fmt(sy(y1)) + "\" x2=\"" + fmt(sx(x2)) +
      "\" y2=\"" + fmt(sy(y2)) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
      fmt(width_px) + "\"/>\n");
}

void SvgCanvas::polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::string& stroke, double width_px) {
  if (xs.size() != ys.size() || xs.empty()) return;
  std::string pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts += fmt(sx(xs[i])) + "," + fmt(sy(ys[i])) + " ";
  }
  raw("<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width_px) +
      "\" points=\"" + pts + "\"/>\n");
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill) {
  const double px = sx(x);
  const double py = sy(y + h);
  const double pw = sx(x + w) - px;
  const double ph = sy(y) - py;
  raw("<rect x=\"" + fmt(px) + "\" y=\"" + fmt(py) + "\" width=\"" + fmt(pw) + "\" height=\"" +
      fmt(ph) + "\" fill=\"" + fill + "\"/>\n");
}

void SvgCanvas::circle(double x, double y, double radius_px, const std::string& fill) {
  raw("<circle cx=\"" + fmt(sx(x)) + "\" cy=\"" + fmt(sy(y)) + "\" r=\"" + fmt(radius_px) +
      "\" fill=\"" + fill + "\"/>\n");
}

void SvgCanvas::star(double x, double y, double radius_px, const std::string& fill) {
  const double cx = sx(x);
  const double cy = sy(y);
  std::string pts;
  for (int i = 0; i < 10; ++i) {
    const double ang = -M_PI / 2 + i * M_PI / 5;
    const double r = (i % 2 == 0) ? radius_px : 0.45 * radius_px;
    pts += fmt(cx + r * std::cos(ang)) + "," + fmt(cy + r * std::sin(ang)) + " ";
  }
  raw("<polygon points=\"" + pts + "\" fill=\"" + fill + "\"/>\n");
}

void SvgCanvas::arrow(double x, double y, double dx, double dy, const std::string& stroke) {
  const double x1 = sx(x), y1 = sy(y);
  const double x2 = sx(x + dx), y2 = sy(y + dy);
  raw("<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" +
      fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n");
  const double ux = x2 - x1, uy = y2 - y1;
  const double len = std::hypot(ux, uy);
  if (len < 1e-9) return;
  const double hx = ux / len, hy = uy / len;
  const double wing = std::min(4.0, 0.35 * len);
  raw("<polygon points=\"" + fmt(x2) + "," + fmt(y2) + " " +
      fmt(x2 - wing * hx + 0.5 * wing * hy) + "," + fmt(y2 - wing * hy - 0.5 * wing * hx) + " " +
      fmt(x2 - wing * hx - 0.5 * wing * hy) + "," + fmt(y2 - wing * hy + 0.5 * wing * hx) +
      "\" fill=\"" + stroke + "\"/>\n");
}

void SvgCanvas::text(double x, double y, const std::string& s, int font_px) {
  raw("<text x=\"" + fmt(sx(x)) + "\" y=\"" + fmt(sy(y)) + "\" font-size=\"" +
      std::to_string(font_px) + "\" font-family=\"sans-serif\">" + s + "</text>\n");
}

void SvgCanvas::axes(int n_ticks) {
  const double x0 = sx(x_min_), x1 = sx(x_max_);
  const double y0 = sy(y_min_), y1 = sy(y_max_);
  std::string s;
  s += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) +
       "\" height=\"" + fmt(y0 - y1) + "\" fill=\"none\" stroke=\"#222222\"/>\n";
  for (int i = 0; i <= n_ticks; ++i) {
    const double fx = x_min_ + (x_max_ - x_min_) * i / n_ticks;
    const double fy = y_min_ + (y_max_ - y_min_) * i / n_ticks;
    s += "<line x1=\"" + fmt(sx(fx)) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(sx(fx)) +
         "\" y2=\"" + fmt(y0 + 4) + "\" stroke=\"#222222\"/>\n";
    s += "<text x=\"" + fmt(sx(fx) - 8) + "\" y=\"" + fmt(y0 + 16) +
         "\" font-size=\"10\" font-family=\"sans-serif\">" + fmt_tick(fx) + "</text>\n";
    s += "<line x1=\"" + fmt(x0 - 4) + "\" y1=\"" + fmt(sy(fy)) + "\" x2=\"" + fmt(x0) +
         "\" y2=\"" + fmt(sy(fy)) + "\" stroke=\"#222222\"/>\n";
    s += "<text x=\"" + fmt(x0 - 40) + "\" y=\"" + fmt(sy(fy) + 3) +
         "\" font-size=\"10\" font-family=\"sans-serif\">" + fmt_tick(fy) + "</text>\n";
  }
  if (!title_.empty()) {
    s += "<text x=\"" + fmt(0.5 * (x0 + x1) - 4.0 * title_.size()) + "\" y=\"" +
         fmt(y1 - 8) + "\" font-size=\"13\" font-family=\"sans-serif\">" + title_ + "</text>\n";
  }
  raw(s);
}

std::string SvgCanvas::finish() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(width_) + "\" height=\"" + std::to_string(height_) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

void SvgCanvas::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << finish();
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

std::string heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  // dark blue (16, 24, 96) -> yellow (250, 230, 60)
  const int r = static_cast<int>(16 + v * (250 - 16));
  const int g = static_cast<int>(24 + v * (230 - 24));
  const int b = static_cast<int>(96 + v * (60 - 96));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace polysde
