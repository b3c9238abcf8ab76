#include "dyntrack/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dyntrack/experiment.hpp" // IoError

namespace dyntrack {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    fields.push_back(field);
    return fields;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape_xml(const std::string& text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

// tick spacing of 1/2/5 times a power of ten covering the range
double nice_step(double range, int target_ticks) {
    if (range <= 0.0) return 1.0;
    const double raw = range / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    if (norm <= 1.0) return mag;
    if (norm <= 2.0) return 2.0 * mag;
    if (norm <= 5.0) return 5.0 * mag;
    return 10.0 * mag;
}

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#17becf"};

} // namespace

SeriesTable SeriesTable::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open series CSV: " + path);
    SeriesTable table;
    std::string line;
    if (!std::getline(in, line))
        throw IoError("series CSV is empty (missing header row): " + path);
    table.columns = split_csv_line(line);
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != table.columns.size())
            throw IoError("series CSV " + path + " row " + std::to_string(row_number) + " has " +
                          std::to_string(fields.size()) + " fields, header has " +
                          std::to_string(table.columns.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(fields[c], &used));
                if (used != fields[c].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw IoError("series CSV " + path + " row " + std::to_string(row_number) +
                              ", column '" + table.columns[c] + "': not a number: '" +
                              fields[c] + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::size_t SeriesTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    std::string available;
    for (const auto& c : columns) available += (available.empty() ? "" : ", ") + c;
    throw IoError("series CSV has no column '" + name + "' (available: " + available + ")");
}

std::string render_svg(const SeriesTable& table, const PlotSpec& spec) {
    const double width = spec.width, height = spec.height;
    const double left = 64, right = 16, top = spec.title.empty() ? 16 : 40, bottom = 46;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
        << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"16\">" << escape_xml(spec.title)
            << "</text>\n";

    const std::size_t xi = table.rows.empty() ? 0 : table.column_index(spec.x_column);
    std::vector<std::size_t> yi;
    if (!table.rows.empty())
        for (const auto& name : spec.y_columns) yi.push_back(table.column_index(name));
    const bool has_band = !spec.band_low.empty() && !spec.band_high.empty();
    std::size_t bli = 0, bhi = 0;
    if (has_band && !table.rows.empty()) {
        bli = table.column_index(spec.band_low);
        bhi = table.column_index(spec.band_high);
    }

    if (table.rows.empty() || yi.empty()) {
        svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
            << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
        svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
            << "fill=\"#888\">no data</text>\n";
        svg << "</svg>\n";
        return svg.str();
    }

    double x_min = table.rows.front()[xi], x_max = x_min;
    double y_min = 0.0, y_max = 1.0;
    bool y_init = false;
    for (const auto& row : table.rows) {
        x_min = std::min(x_min, row[xi]);
        x_max = std::max(x_max, row[xi]);
        auto feed = [&](double v) {
            if (!y_init) {
                y_min = y_max = v;
                y_init = true;
            } else {
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        };
        for (std::size_t c : yi) feed(row[c]);
        if (has_band) {
            feed(row[bli]);
            feed(row[bhi]);
        }
    }
    if (spec.clamp_unit_y) {
        y_min = 0.0;
        y_max = 1.0;
    } else {
        if (y_max == y_min) {
            y_min -= 0.5;
            y_max += 0.5;
        }
        const double pad = 0.05 * (y_max - y_min);
        y_min -= pad;
        y_max += pad;
    }
    if (x_max == x_min) x_max = x_min + 1.0;

    auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double y) {
        double v = y;
        if (spec.clamp_unit_y) v = std::clamp(v, 0.0, 1.0);
        return top + (1.0 - (v - y_min) / (y_max - y_min)) * plot_h;
    };

    // gridlines and ticks
    const double x_step = nice_step(x_max - x_min, 8);
    const double y_step = nice_step(y_max - y_min, 6);
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9 * x_step;
         x += x_step) {
        svg << "<line x1=\"" << fmt(sx(x)) << "\" y1=\"" << top << "\" x2=\"" << fmt(sx(x))
            << "\" y2=\"" << top + plot_h << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt(sx(x)) << "\" y=\"" << top + plot_h + 16
            << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
    }
    for (double y = std::ceil(y_min / y_step) * y_step; y <= y_max + 1e-9 * y_step;
         y += y_step) {
        svg << "<line x1=\"" << left << "\" y1=\"" << fmt(sy(y)) << "\" x2=\"" << left + plot_w
            << "\" y2=\"" << fmt(sy(y)) << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << left - 6 << "\" y=\"" << fmt(sy(y) + 4)
            << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
    }
    svg << "</g>\n";

    if (has_band) {
        svg << "<path d=\"M";
        for (const auto& row : table.rows) svg << fmt(sx(row[xi])) << " " << fmt(sy(row[bli])) << " L";
        bool first = true;
        for (auto it = table.rows.rbegin(); it != table.rows.rend(); ++it) {
            svg << (first ? "" : "L") << fmt(sx((*it)[xi])) << " " << fmt(sy((*it)[bhi])) << " ";
            first = false;
        }
        svg << "Z\" fill=\"#1f77b4\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }

    for (std::size_t s = 0; s < yi.size(); ++s) {
        svg << "<polyline fill=\"none\" stroke=\"" << kSeriesColors[s % 7]
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& row : table.rows)
            svg << fmt(sx(row[xi])) << "," << fmt(sy(row[yi[s]])) << " ";
        svg << "\"/>\n";
    }

    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";

    if (!spec.x_label.empty())
        svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << escape_xml(spec.x_label) << "</text>\n";
    if (!spec.y_label.empty())
        svg << "<text x=\"14\" y=\"" << top + plot_h / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "transform=\"rotate(-90 14 " << top + plot_h / 2 << ")\">"
            << escape_xml(spec.y_label) << "</text>\n";

    // legend
    if (yi.size() > 1) {
        const double lx = left + 10, ly = top + 10;
        for (std::size_t s = 0; s < yi.size(); ++s) {
            svg << "<line x1=\"" << lx << "\" y1=\"" << ly + 16 * static_cast<double>(s)
                << "\" x2=\"" << lx + 18 << "\" y2=\"" << ly + 16 * static_cast<double>(s)
                << "\" stroke=\"" << kSeriesColors[s % 7] << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << lx + 24 << "\" y=\"" << ly + 16 * static_cast<double>(s) + 4
                << "\" font-family=\"sans-serif\" font-size=\"11\">"
                << escape_xml(spec.y_columns[s]) << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const std::string& csv_path, const PlotSpec& spec, const std::string& out_path) {
    const SeriesTable table = SeriesTable::read_csv(csv_path);
    if (!table.rows.empty()) {
        // validate the requested columns up front for precise diagnostics
        (void)table.column_index(spec.x_column);
        for (const auto& name : spec.y_columns) (void)table.column_index(name);
        if (!spec.band_low.empty()) (void)table.column_index(spec.band_low);
        if (!spec.band_high.empty()) (void)table.column_index(spec.band_high);
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + out_path);
    out << render_svg(table, spec);
    if (!out) throw IoError("write failed: " + out_path);
}

} // namespace dyntrack
