#include "lorafp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lorafp/csv.hpp"
#include "lorafp/errors.hpp"

namespace lorafp {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string meters(double v) { return fmt("%.3f", v); }

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("failed while writing " + path);
}

}  // namespace

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_table1_csv(const std::string& path, const std::map<int, std::size_t>& hist) {
    std::ofstream out = open_out(path);
    out << "gateways,messages\n";
    for (const auto& [g, count] : hist) out << g << ',' << count << '\n';
    finish(out, path);
}

void write_rssi_hist_csv(const std::string& path,
                         std::span<const std::pair<double, std::size_t>> bins) {
    std::ofstream out = open_out(path);
    out << "bin_low_dbm,count\n";
    for (const auto& [lo, count] : bins) out << fmt("%g", lo) << ',' << count << '\n';
    finish(out, path);
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
    std::ofstream out = open_out(path);
    out << sweep.axis << ",val_mean_m,val_median_m,is_best\n";
    for (const SweepPoint& p : sweep.points)
        out << fmt("%g", p.value) << ',' << meters(p.val_mean) << ',' << meters(p.val_median)
            << ',' << (p.value == sweep.best_value ? 1 : 0) << '\n';
    finish(out, path);
}

void write_sweep_summary_csv(const std::string& path, const SweepResult& sweep) {
    std::ofstream out = open_out(path);
    out << "axis,best_value,val_mean_m,val_median_m,test_mean_m,test_median_m,test_p75_m,"
           "test_p90_m,test_p95_m,test_count\n";
    out << sweep.axis << ',' << fmt("%g", sweep.best_value) << ',' << meters(sweep.val_at_best.mean)
        << ',' << meters(sweep.val_at_best.median) << ',' << meters(sweep.test_at_best.mean) << ','
        << meters(sweep.test_at_best.median) << ',' << meters(sweep.test_at_best.p75) << ','
        << meters(sweep.test_at_best.p90) << ',' << meters(sweep.test_at_best.p95) << ','
        << sweep.test_at_best.count << '\n';
    finish(out, path);
}

void write_table2_csv(const std::string& path, const Table2Result& table) {
    std::ofstream out = open_out(path);
    out << "metric,representation,best_k,val_mean_m,val_median_m\n";
    for (const Table2Cell& c : table.cells)
        out << to_string(c.metric) << ',' << to_string(c.representation) << ',' << c.best_k << ','
            << meters(c.val_mean) << ',' << meters(c.val_median) << '\n';
    finish(out, path);
}

void write_table3_csv(const std::string& path, std::span<const Table3Row> rows) {
    std::ofstream out = open_out(path);
    out << "method,split,count,mean_m,median_m,p75_m,p90_m,p95_m\n";
    for (const Table3Row& r : rows)
        out << r.method << ',' << r.split << ',' << r.stats.count << ',' << meters(r.stats.mean)
            << ',' << meters(r.stats.median) << ',' << meters(r.stats.p75) << ','
            << meters(r.stats.p90) << ',' << meters(r.stats.p95) << '\n';
    finish(out, path);
}

void write_loss_csv(const std::string& path, const TrainingHistory& history) {
    std::ofstream out = open_out(path);
    out << "epoch,train_loss,val_loss,is_best\n";
    for (std::size_t e = 0; e < history.train_loss.size(); ++e)
        out << e + 1 << ',' << fmt("%.9g", history.train_loss[e]) << ','
            << fmt("%.9g", history.val_loss[e]) << ',' << (e + 1 == history.best_epoch ? 1 : 0)
            << '\n';
    finish(out, path);
}

void write_predictions_csv(const std::string& path, std::span<const std::size_t> indices,
                           std::span<const LatLon> truths, std::span<const LatLon> predictions) {
    if (indices.size() != truths.size() || truths.size() != predictions.size())
        throw ConfigError("write_predictions_csv: length mismatch");
    std::ofstream out = open_out(path);
    out << "index,true_lat,true_lon,pred_lat,pred_lon,error_m\n";
    for (std::size_t i = 0; i < indices.size(); ++i)
        out << indices[i] << ',' << fmt("%.8f", truths[i].lat) << ',' << fmt("%.8f", truths[i].lon)
            << ',' << fmt("%.8f", predictions[i].lat) << ',' << fmt("%.8f", predictions[i].lon)
            << ',' << meters(haversine_m(truths[i], predictions[i])) << '\n';
    finish(out, path);
}

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
    CsvReader reader(path);
    CsvTable t;
    t.header = reader.header();
    std::vector<std::string> fields;
    while (reader.next(fields)) t.rows.push_back(fields);
    return t;
}

int column_of(const CsvTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> numeric_column(const CsvTable& t, const std::string& name) {
    const int c = column_of(t, name);
    if (c < 0) throw SchemaError("column '" + name + "' missing from report file");
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        double v = 0.0;
        if (!parse_double(row[static_cast<std::size_t>(c)], v))
            throw ParseError("non-numeric value in report column '" + name + "'");
        out.push_back(v);
    }
    return out;
}

void append_aligned(std::ostringstream& digest, const CsvTable& t) {
    std::vector<std::size_t> widths(t.header.size(), 0);
    auto widen = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    };
    widen(t.header);
    for (const auto& row : t.rows) widen(row);
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i) {
            digest << row[i];
            if (i + 1 < widths.size()) digest << std::string(widths[i] - row[i].size() + 2, ' ');
        }
        digest << '\n';
    };
    emit(t.header);
    for (const auto& row : t.rows) emit(row);
}

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

constexpr const char* kSeriesColors[] = {"#2f6db3", "#c23b3b"};

// Minimal self-contained SVG line/bar chart. Good enough to eyeball a sweep.
std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series, bool bars) {
    constexpr double kWidth = 720, kHeight = 440;
    constexpr double kLeft = 70, kRight = 700, kTop = 45, kBottom = 390;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const Series& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    if (bars) ymin = std::min(ymin, 0.0);
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double ypad = (ymax - ymin) * 0.05;
    ymax += ypad;
    if (!bars) ymin -= ypad;

    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * (kRight - kLeft); };
    auto py = [&](double y) { return kBottom - (y - ymin) / (ymax - ymin) * (kBottom - kTop); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";

    // grid and ticks
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        svg << "<line x1=\"" << px(fx) << "\" y1=\"" << kTop << "\" x2=\"" << px(fx) << "\" y2=\""
            << kBottom << "\" stroke=\"#dddddd\"/>\n"
            << "<line x1=\"" << kLeft << "\" y1=\"" << py(fy) << "\" x2=\"" << kRight << "\" y2=\""
            << py(fy) << "\" stroke=\"#dddddd\"/>\n"
            << "<text x=\"" << px(fx) << "\" y=\"" << kBottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt("%g", fx) << "</text>\n"
            << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt("%g", fy) << "</text>\n";
    }
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
        << "</text>\n"
        << "<text x=\"18\" y=\"" << (kTop + kBottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 "
        << (kTop + kBottom) / 2 << ")\">" << ylabel << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kSeriesColors[si % 2];
        if (bars) {
            double width = 8.0;
            if (s.x.size() > 1) width = std::max(1.0, (kRight - kLeft) / (s.x.size() * 1.25));
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << "<rect x=\"" << px(s.x[i]) - width / 2 << "\" y=\"" << py(s.y[i])
                    << "\" width=\"" << width << "\" height=\"" << kBottom - py(s.y[i])
                    << "\" fill=\"" << color << "\"/>\n";
        } else {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            svg << "\"/>\n";
        }
        // legend
        const double ly = kTop + 16 + 18 * static_cast<double>(si);
        svg << "<line x1=\"" << kRight - 150 << "\" y1=\"" << ly << "\" x2=\"" << kRight - 125
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n"
            << "<text x=\"" << kRight - 118 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out = open_out(path);
    out << content;
    finish(out, path);
}

}  // namespace

std::vector<std::string> render_report(const std::string& dir) {
    std::vector<std::string> written;
    std::ostringstream digest;
    auto have = [&](const char* name) { return fs::exists(fs::path(dir) / name); };
    auto path_of = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

    auto digest_table = [&](const char* name, const char* heading) {
        if (!have(name)) return;
        digest << "== " << heading << " (" << name << ") ==\n";
        append_aligned(digest, read_csv(path_of(name)));
        digest << '\n';
    };
    digest_table("table1.csv", "Messages per gateway count");
    digest_table("table2.csv", "Best k per metric and representation");
    digest_table("table3.csv", "Error statistics per split");
    digest_table("sweep_alpha_summary.csv", "Alpha sweep summary");
    digest_table("sweep_beta_summary.csv", "Beta sweep summary");

    struct LineSpec {
        const char* csv;
        const char* svg;
        const char* title;
        const char* xcol;
        const char* xlabel;
        const char* ycol1;
        const char* label1;
        const char* ycol2;
        const char* label2;
    };
    const LineSpec line_specs[] = {
        {"fig3_alpha.csv", "fig3_alpha.svg", "Validation error vs alpha", "alpha", "alpha",
         "val_mean_m", "mean (m)", "val_median_m", "median (m)"},
        {"fig4_beta.csv", "fig4_beta.svg", "Validation error vs beta", "beta", "beta",
         "val_mean_m", "mean (m)", "val_median_m", "median (m)"},
        {"fig5_loss.csv", "fig5_loss.svg", "Training and validation loss", "epoch", "epoch",
         "train_loss", "train", "val_loss", "validation"},
    };
    for (const LineSpec& spec : line_specs) {
        if (!have(spec.csv)) continue;
        const CsvTable t = read_csv(path_of(spec.csv));
        if (t.rows.empty()) continue;
        const std::vector<double> x = numeric_column(t, spec.xcol);
        std::vector<Series> series;
        series.push_back({spec.label1, x, numeric_column(t, spec.ycol1)});
        series.push_back({spec.label2, x, numeric_column(t, spec.ycol2)});
        write_text_file(path_of(spec.svg),
                        svg_chart(spec.title, spec.xlabel, "", series, /*bars=*/false));
        written.push_back(spec.svg);
    }

    if (have("fig2_hist.csv")) {
        const CsvTable t = read_csv(path_of("fig2_hist.csv"));
        if (!t.rows.empty()) {
            std::vector<Series> series;
            series.push_back(
                {"messages", numeric_column(t, "bin_low_dbm"), numeric_column(t, "count")});
            write_text_file(path_of("fig2_hist.svg"),
                            svg_chart("RSSI distribution", "RSSI (dBm)", "count", series, true));
            written.push_back("fig2_hist.svg");
        }
    }

    if (digest.str().empty() && written.empty()) return written;
    std::ostringstream full;
    full << "Report digest\n=============\n\n" << digest.str();
    if (!written.empty()) {
        full << "Rendered charts:\n";
        for (const std::string& name : written) full << "  " << name << '\n';
    }
    write_text_file(path_of("report.txt"), full.str());
    written.push_back("report.txt");
    return written;
}

}  // namespace lorafp
