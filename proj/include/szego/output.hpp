#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace szego {

// 17 significant digits so identical runs give byte-identical files.
std::string format_number(double v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);

private:
    std::ofstream out_;
    std::size_t columns_;
    std::string path_;
};

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal standalone SVG line plot. Nonpositive values are skipped on log axes.
void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series, bool log_y);

void ensure_directory(const std::string& path);

}  // namespace szego
