#pragma once

// CSV and SVG output. Numbers are written with 17 significant digits so that
// identical runs give identical bytes.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "geom2d.hpp"
#include "model.hpp"

namespace nscond {

std::string format_real(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(std::size_t v);
  CsvWriter& cell(std::string_view v);
  void end_row();
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool first_ = true;
};

void ensure_directory(const std::filesystem::path& dir);

// x,y,role
void write_points_csv(const std::filesystem::path& path, const PointPattern& pattern);
// Accepts "x,y" or "x,y,role" rows with an optional header line.
std::vector<Point> read_points_csv(const std::filesystem::path& path);

// x,y,value at cell centres; NaN cells are skipped. With `stderr_values`
// a fourth column std_error is written.
void write_raster_csv(const std::filesystem::path& path, const Raster& raster,
                      const std::vector<double>* stderr_values = nullptr);

// Minimal SVG canvas with a data-to-pixel mapping.
class Svg {
 public:
  Svg(double width, double height, Rect data, double margin = 40.0);

  void rect(const Rect& r, const std::string& stroke, const std::string& fill,
            double opacity = 1.0);
  void circle(Point c, double radius_px, const std::string& fill, double opacity = 1.0);
  void polyline(const std::vector<Point>& pts, const std::string& stroke, double width = 1.0,
                const std::string& dash = "");
  // Closed band between two curves sharing the same x values.
  void band(const std::vector<double>& x, const std::vector<double>& lo,
            const std::vector<double>& hi, const std::string& fill, double opacity);
  void text(Point at, const std::string& s, double size = 12.0, const std::string& anchor = "start");
  void text_px(double px, double py, const std::string& s, double size = 12.0,
               const std::string& anchor = "start");
  void axes(const std::string& xlabel, const std::string& ylabel);

  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  double px(double x) const;
  double py(double y) const;

  double width_;
  double height_;
  Rect data_;
  double margin_;
  std::string body_;
};

}  // namespace nscond
