#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ebgan {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::size_t class_index = 0;
};

/// Standalone line chart: one polyline per series, axes with ticks, legend,
/// optional dashed horizontal reference lines. Byte-deterministic for fixed
/// input.
std::string render_line_chart(const std::vector<Series>& series,
                              const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<double>& h_lines = {});

/// Standalone scatter plot: one circle per point, fill color by class.
std::string render_scatter(const std::vector<ScatterPoint>& points,
                           const std::vector<std::string>& class_labels,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ebgan
