#include "nldisp/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "nldisp/errors.hpp"

namespace nldisp {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

Csv::Csv(std::string schema, std::vector<std::string> header) : columns_(header.size()) {
    buf_ = "# schema=" + schema + "\n";
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += header[i];
    }
    buf_ += '\n';
}

Csv& Csv::cell(double v) { return cell(format_double(v)); }

Csv& Csv::cell(long long v) { return cell(std::to_string(v)); }

Csv& Csv::cell(const std::string& v) {
    if (in_row_) buf_ += ',';
    buf_ += v;
    ++in_row_;
    return *this;
}

void Csv::end_row() {
    if (in_row_ != columns_)
        throw Error("CSV row has " + std::to_string(in_row_) + " cells, expected " +
                    std::to_string(columns_));
    buf_ += '\n';
    in_row_ = 0;
}

void Csv::write(const std::string& path) const { write_text_file(path, buf_); }

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::add_series(const std::vector<double>& x, const std::vector<double>& y,
                         const std::string& color, const std::string& label, bool markers) {
    series_.push_back(Series{x, y, color, label, markers});
}

void SvgPlot::add_fit_line(double slope, double intercept, const std::string& color,
                           const std::string& label) {
    lines_.push_back(Line{slope, intercept, color, label});
}

void SvgPlot::write(const std::string& path) const {
    const double W = 800, H = 600;
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Series& s : series_) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    for (const Line& l : lines_) {
        ymin = std::min({ymin, l.intercept + l.slope * xmin, l.intercept + l.slope * xmax});
        ymax = std::max({ymax, l.intercept + l.slope * xmin, l.intercept + l.slope * xmax});
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1;
    if (ymax - ymin < 1e-12) ymax = ymin + 1;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
    svg += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title_ +
           "</text>\n";
    // axes
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(H - mb) + "\" x2=\"" +
           format_double(W - mr) + "\" y2=\"" + format_double(H - mb) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(mt) + "\" x2=\"" +
           format_double(ml) + "\" y2=\"" + format_double(H - mb) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"400\" y=\"590\" text-anchor=\"middle\" font-size=\"12\">" + xlabel_ +
           "</text>\n";
    svg += "<text x=\"16\" y=\"300\" text-anchor=\"middle\" font-size=\"12\" "
           "transform=\"rotate(-90 16 300)\">" +
           ylabel_ + "</text>\n";
    for (int i = 0; i <= 5; ++i) {
        double xv = xmin + i * (xmax - xmin) / 5;
        double yv = ymin + i * (ymax - ymin) / 5;
        svg += "<text x=\"" + format_double(px(xv)) + "\" y=\"" + format_double(H - mb + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + format_double(xv) + "</text>\n";
        svg += "<text x=\"" + format_double(ml - 6) + "\" y=\"" + format_double(py(yv) + 3) +
               "\" text-anchor=\"end\" font-size=\"10\">" + format_double(yv) + "</text>\n";
    }
    for (const Series& s : series_) {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) svg += ' ';
            svg += format_double(px(s.x[i])) + "," + format_double(py(s.y[i]));
        }
        svg += "\"/>\n";
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg += "<circle cx=\"" + format_double(px(s.x[i])) + "\" cy=\"" +
                       format_double(py(s.y[i])) + "\" r=\"2\" fill=\"" + s.color + "\"/>\n";
        }
    }
    for (const Line& l : lines_) {
        svg += "<line x1=\"" + format_double(px(xmin)) + "\" y1=\"" +
               format_double(py(l.intercept + l.slope * xmin)) + "\" x2=\"" +
               format_double(px(xmax)) + "\" y2=\"" +
               format_double(py(l.intercept + l.slope * xmax)) + "\" stroke=\"" + l.color +
               "\" stroke-dasharray=\"6 3\"/>\n";
    }
    // legend
    double ly = mt + 8;
    auto legend_entry = [&](const std::string& color, const std::string& label, bool dashed) {
        svg += "<line x1=\"" + format_double(W - mr - 170) + "\" y1=\"" + format_double(ly) +
               "\" x2=\"" + format_double(W - mr - 140) + "\" y2=\"" + format_double(ly) +
               "\" stroke=\"" + color + "\"" + (dashed ? " stroke-dasharray=\"6 3\"" : "") +
               "/>\n";
        svg += "<text x=\"" + format_double(W - mr - 134) + "\" y=\"" + format_double(ly + 4) +
               "\" font-size=\"11\">" + label + "</text>\n";
        ly += 16;
    };
    for (const Series& s : series_) legend_entry(s.color, s.label, false);
    for (const Line& l : lines_) legend_entry(l.color, l.label, true);
    svg += "</svg>\n";
    write_text_file(path, svg);
}

void ensure_output_dir(const std::string& path, bool force) {
    namespace fs = std::filesystem;
    fs::path p(path);
    std::error_code ec;
    if (fs::exists(p, ec)) {
        if (!fs::is_directory(p, ec)) throw Error("output path '" + path + "' is not a directory");
        bool empty = fs::is_empty(p, ec);
        if (!empty && !force)
            throw Error("output directory '" + path +
                        "' is not empty; pass --force to overwrite");
        return;
    }
    if (!fs::create_directories(p, ec) && ec)
        throw Error("cannot create output directory '" + path + "': " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace nldisp
