#ifndef NLDISP_REPORT_HPP
#define NLDISP_REPORT_HPP

#include <string>
#include <vector>

namespace nldisp {

/// Shortest round-trip decimal representation; locale-free, so CSV bytes are
/// reproducible across runs and parallelism degrees.
std::string format_double(double v);

/// CSV with a schema-version comment line, a mandatory header row, '.'
/// decimals, and LF line endings.
class Csv {
public:
    Csv(std::string schema, std::vector<std::string> header);

    Csv& cell(double v);
    Csv& cell(long long v);
    Csv& cell(int v) { return cell(static_cast<long long>(v)); }
    Csv& cell(const std::string& v);
    void end_row();

    const std::string& bytes() const { return buf_; }
    void write(const std::string& path) const;

private:
    std::string buf_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

/// Fixed 800x600 polyline plot with axes, tick labels, and a legend; an
/// inspection aid, not a publication figure.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel);

    void add_series(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& color, const std::string& label, bool markers = false);
    /// Straight line y = intercept + slope * x clipped to the data range.
    void add_fit_line(double slope, double intercept, const std::string& color,
                      const std::string& label);

    void write(const std::string& path) const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string color, label;
        bool markers;
    };
    struct Line {
        double slope, intercept;
        std::string color, label;
    };
    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
    std::vector<Line> lines_;
};

/// Creates the directory (and parents). Refuses to reuse a non-empty
/// existing directory unless force is set.
void ensure_output_dir(const std::string& path, bool force);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace nldisp

#endif
