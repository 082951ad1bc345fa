#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nscond {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& h : header) cell(std::string_view(h));
  end_row();
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_real(v))); }

CsvWriter& CsvWriter::cell(std::size_t v) { return cell(std::string_view(std::to_string(v))); }

CsvWriter& CsvWriter::cell(std::string_view v) {
  if (!first_) out_ << ',';
  out_ << v;
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw IoError("error while writing '" + path_.string() + "'");
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_points_csv(const std::filesystem::path& path, const PointPattern& pattern) {
  CsvWriter csv(path, {"x", "y", "role"});
  const std::string_view role = role_name(pattern.role);
  for (const Point& p : pattern.points) {
    csv.cell(p.x).cell(p.y).cell(role);
    csv.end_row();
  }
  csv.close();
}

namespace {

bool parse_real(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

std::vector<Point> read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::vector<Point> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    double x = 0.0;
    double y = 0.0;
    const bool ok = fields.size() >= 2 && parse_real(fields[0], x) && parse_real(fields[1], y);
    if (!ok) {
      if (lineno == 1 && pts.empty()) continue;  // header
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected 'x,y' with finite numbers");
    }
    pts.push_back(Point{x, y});
  }
  return pts;
}

void write_raster_csv(const std::filesystem::path& path, const Raster& raster,
                      const std::vector<double>* stderr_values) {
  std::vector<std::string> header{"x", "y", "value"};
  if (stderr_values) header.emplace_back("std_error");
  CsvWriter csv(path, header);
  const Lattice& lat = raster.lattice;
  for (std::size_t j = 0; j < lat.ny; ++j) {
    for (std::size_t i = 0; i < lat.nx; ++i) {
      const double v = raster.at(i, j);
      if (std::isnan(v)) continue;
      const Point c = lat.center(i, j);
      csv.cell(c.x).cell(c.y).cell(v);
      if (stderr_values) csv.cell((*stderr_values)[lat.index(i, j)]);
      csv.end_row();
    }
  }
  csv.close();
}

Svg::Svg(double width, double height, Rect data, double margin)
    : width_(width), height_(height), data_(data), margin_(margin) {
  if (!(data.width() > 0.0) || !(data.height() > 0.0)) {
    data_ = Rect{data.xmin, data.ymin, data.xmin + 1.0, data.ymin + 1.0};
  }
}

double Svg::px(double x) const {
  return margin_ + (x - data_.xmin) / data_.width() * (width_ - 2.0 * margin_);
}

double Svg::py(double y) const {
  return height_ - margin_ - (y - data_.ymin) / data_.height() * (height_ - 2.0 * margin_);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

void Svg::rect(const Rect& r, const std::string& stroke, const std::string& fill,
               double opacity) {
  body_ += "<rect x=\"" + fmt(px(r.xmin)) + "\" y=\"" + fmt(py(r.ymax)) + "\" width=\"" +
           fmt(px(r.xmax) - px(r.xmin)) + "\" height=\"" + fmt(py(r.ymin) - py(r.ymax)) +
           "\" stroke=\"" + stroke + "\" fill=\"" + fill + "\" fill-opacity=\"" + fmt(opacity) +
           "\"/>\n";
}

void Svg::circle(Point c, double radius_px, const std::string& fill, double opacity) {
  body_ += "<circle cx=\"" + fmt(px(c.x)) + "\" cy=\"" + fmt(py(c.y)) + "\" r=\"" +
           fmt(radius_px) + "\" fill=\"" + fill + "\" fill-opacity=\"" + fmt(opacity) + "\"/>\n";
}

void Svg::polyline(const std::vector<Point>& pts, const std::string& stroke, double width,
                   const std::string& dash) {
  std::string d;
  for (const Point& p : pts) d += fmt(px(p.x)) + "," + fmt(py(p.y)) + " ";
  body_ += "<polyline points=\"" + d + "\" fill=\"none\" stroke=\"" + stroke +
           "\" stroke-width=\"" + fmt(width) + "\"" +
           (dash.empty() ? "" : " stroke-dasharray=\"" + dash + "\"") + "/>\n";
}

void Svg::band(const std::vector<double>& x, const std::vector<double>& lo,
               const std::vector<double>& hi, const std::string& fill, double opacity) {
  std::string d;
  for (std::size_t k = 0; k < x.size(); ++k) d += fmt(px(x[k])) + "," + fmt(py(hi[k])) + " ";
  for (std::size_t k = x.size(); k-- > 0;) d += fmt(px(x[k])) + "," + fmt(py(lo[k])) + " ";
  body_ += "<polygon points=\"" + d + "\" fill=\"" + fill + "\" fill-opacity=\"" +
           fmt(opacity) + "\" stroke=\"" + fill + "\"/>\n";
}

void Svg::text(Point at, const std::string& s, double size, const std::string& anchor) {
  text_px(px(at.x), py(at.y), s, size, anchor);
}

void Svg::text_px(double x, double y, const std::string& s, double size,
                  const std::string& anchor) {
  body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" + fmt(size) +
           "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + escape(s) +
           "</text>\n";
}

void Svg::axes(const std::string& xlabel, const std::string& ylabel) {
  polyline({{data_.xmin, data_.ymin}, {data_.xmax, data_.ymin}}, "black");
  polyline({{data_.xmin, data_.ymin}, {data_.xmin, data_.ymax}}, "black");
  for (int k = 0; k <= 4; ++k) {
    const double fx = data_.xmin + data_.width() * k / 4.0;
    const double fy = data_.ymin + data_.height() * k / 4.0;
    char lx[32];
    char ly[32];
    std::snprintf(lx, sizeof lx, "%.3g", fx);
    std::snprintf(ly, sizeof ly, "%.3g", fy);
    text_px(px(fx), py(data_.ymin) + 16.0, lx, 10.0, "middle");
    text_px(px(data_.xmin) - 4.0, py(fy) + 4.0, ly, 10.0, "end");
  }
  text_px(width_ / 2.0, height_ - 6.0, xlabel, 12.0, "middle");
  text_px(12.0, margin_ - 10.0, ylabel, 12.0, "start");
}

std::string Svg::str() const {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width_) << "\" height=\""
    << fmt(height_) << "\" viewBox=\"0 0 " << fmt(width_) << " " << fmt(height_) << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << body_ << "</svg>\n";
  return s.str();
}

void Svg::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << str();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

}  // namespace nscond
