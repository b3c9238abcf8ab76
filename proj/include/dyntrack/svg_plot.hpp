#pragma once

#include <string>
#include <vector>

namespace dyntrack {

/// Numeric CSV table with a header row.
struct SeriesTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    static SeriesTable read_csv(const std::string& path);
    /// Index of a named column; throws with the available columns listed.
    std::size_t column_index(const std::string& name) const;
};

struct PlotSpec {
    std::string x_column;
    std::vector<std::string> y_columns;
    std::string band_low;   // optional column pair drawn as a shaded band
    std::string band_high;
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 840;
    int height = 520;
    bool clamp_unit_y = false; // fraction plots: pin the y-axis to [0, 1]
};

/// Self-contained SVG line/band chart of the table; no external assets.
/// An empty table still yields a valid chart with a "no data" label.
std::string render_svg(const SeriesTable& table, const PlotSpec& spec);

/// read_csv + render_svg + write to out_path.
void emit_plot(const std::string& csv_path, const PlotSpec& spec, const std::string& out_path);

} // namespace dyntrack
