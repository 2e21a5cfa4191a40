#include "onb/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "onb/io.hpp"

namespace onb {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json metric_summary_json(const MetricSummary& m) {
    return {{"mean", m.mean}, {"std", m.std}, {"min", m.min}, {"max", m.max}};
}

}  // namespace

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricRecord>& records,
                       const std::string& config_hash) {
    std::ostringstream out;
    out << "# config_hash=" << config_hash << "\n";
    out << "function_id,r2,r2_defined,mse,rmse,mae,rmse_mae_ratio\n";
    for (const auto& r : records) {
        out << r.function_id << ',' << (r.r2_defined ? fmt(r.r2) : "nan") << ','
            << (r.r2_defined ? 1 : 0) << ',' << fmt(r.mse) << ',' << fmt(r.rmse)
            << ',' << fmt(r.mae) << ',' << fmt(r.rmse_mae_ratio) << '\n';
    }
    atomic_write_file(path, out.str());
}

std::vector<MetricRecord> read_metrics_csv(const std::filesystem::path& path) {
    std::istringstream in(read_file_bytes(path));
    std::vector<MetricRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("function_id", 0) == 0)
            continue;
        MetricRecord r;
        std::istringstream ls(line);
        std::string tok;
        auto next = [&] {
            if (!std::getline(ls, tok, ','))
                throw IoError("metrics csv: short row: " + line);
            return tok;
        };
        r.function_id = std::stoll(next());
        const std::string r2s = next();
        r.r2_defined = std::stoi(next()) != 0;
        r.r2 = r.r2_defined ? std::stod(r2s)
                            : std::numeric_limits<double>::quiet_NaN();
        r.mse = std::stod(next());
        r.rmse = std::stod(next());
        r.mae = std::stod(next());
        r.rmse_mae_ratio = std::stod(next());
        records.push_back(r);
    }
    return records;
}

nlohmann::json summary_to_json(const SummaryStats& stats) {
    nlohmann::json j;
    j["n_records"] = stats.n_records;
    j["n_r2_defined"] = stats.n_r2_defined;
    j["argmax_r2_id"] = stats.argmax_r2_id;
    j["argmin_r2_id"] = stats.argmin_r2_id;
    j["metrics"] = {{"r2", metric_summary_json(stats.r2)},
                    {"mse", metric_summary_json(stats.mse)},
                    {"rmse", metric_summary_json(stats.rmse)},
                    {"mae", metric_summary_json(stats.mae)},
                    {"rmse_mae_ratio", metric_summary_json(stats.rmse_mae_ratio)}};
    return j;
}

void write_summary_json(const std::filesystem::path& path,
                        const SummaryStats& stats,
                        const std::string& config_hash) {
    nlohmann::json j = summary_to_json(stats);
    j["config_hash"] = config_hash;
    atomic_write_file(path, j.dump(2) + "\n");
}

Histogram make_histogram(const std::vector<double>& values, int bins) {
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    if (values.empty()) return h;
    h.lo = values[0];
    h.hi = values[0];
    for (double v : values) {
        h.lo = std::min(h.lo, v);
        h.hi = std::max(h.hi, v);
    }
    if (h.hi == h.lo) {
        h.counts[0] = static_cast<Index>(values.size());
        return h;
    }
    const double width = (h.hi - h.lo) / bins;
    for (double v : values) {
        int b = static_cast<int>((v - h.lo) / width);
        if (b >= bins) b = bins - 1;  // right edge goes to the last bin
        if (b < 0) b = 0;
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

void write_histogram_svg(const std::filesystem::path& path,
                         const Histogram& h, const std::string& title,
                         const std::string& config_hash) {
    const int width = 480, height = 320;
    const int ml = 50, mr = 15, mt = 35, mb = 40;
    const int plot_w = width - ml - mr, plot_h = height - mt - mb;
    Index max_count = 1;
    for (Index c : h.counts) max_count = std::max(max_count, c);

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<!-- config_hash=" << config_hash << " -->\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";

    const double bw = static_cast<double>(plot_w) / h.counts.size();
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double bh =
            static_cast<double>(h.counts[i]) / max_count * plot_h;
        s << "<rect x=\"" << ml + i * bw << "\" y=\"" << mt + plot_h - bh
          << "\" width=\"" << bw * 0.92 << "\" height=\"" << bh
          << "\" fill=\"#4878a8\"/>\n";
    }
    s << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\""
      << ml + plot_w << "\" y2=\"" << mt + plot_h
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << ml << "\" y=\"" << height - 12
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(h.lo)
      << "</text>\n"
      << "<text x=\"" << ml + plot_w << "\" y=\"" << height - 12
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt(h.hi) << "</text>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 10
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << max_count << "</text>\n"
      << "</svg>\n";
    atomic_write_file(path, s.str());
}

void write_comparison_csv(const std::filesystem::path& path,
                          const std::vector<ComparisonRow>& rows,
                          const std::string& config_hash) {
    std::ostringstream out;
    out << "# config_hash=" << config_hash << "\n";
    out << "function_id,role,model,r2,mse,rmse,mae,rmse_mae_ratio\n";
    for (const auto& row : rows) {
        const auto& m = row.metrics;
        out << row.function_id << ',' << row.role << ',' << row.model << ','
            << (m.r2_defined ? fmt(m.r2) : "nan") << ',' << fmt(m.mse) << ','
            << fmt(m.rmse) << ',' << fmt(m.mae) << ',' << fmt(m.rmse_mae_ratio)
            << '\n';
    }
    atomic_write_file(path, out.str());
}

void emit_report(const std::filesystem::path& dir,
                 const std::vector<MetricRecord>& records,
                 const SummaryStats& stats,
                 const std::vector<ComparisonRow>& comparisons,
                 const std::string& config_hash) {
    std::filesystem::create_directories(dir);
    write_metrics_csv(dir / "metrics.csv", records, config_hash);
    write_summary_json(dir / "summary.json", stats, config_hash);

    const int bins = 30;
    auto collect = [&](auto&& get, bool defined_only) {
        std::vector<double> v;
        v.reserve(records.size());
        for (const auto& r : records)
            if (!defined_only || r.r2_defined) v.push_back(get(r));
        return v;
    };
    write_histogram_svg(dir / "hist_r2.svg",
                        make_histogram(collect([](const MetricRecord& r) { return r.r2; }, true), bins),
                        "R2 distribution", config_hash);
    write_histogram_svg(dir / "hist_mse.svg",
                        make_histogram(collect([](const MetricRecord& r) { return r.mse; }, false), bins),
                        "MSE distribution", config_hash);
    write_histogram_svg(dir / "hist_rmse.svg",
                        make_histogram(collect([](const MetricRecord& r) { return r.rmse; }, false), bins),
                        "RMSE distribution", config_hash);
    write_histogram_svg(dir / "hist_mae.svg",
                        make_histogram(collect([](const MetricRecord& r) { return r.mae; }, false), bins),
                        "MAE distribution", config_hash);
    write_histogram_svg(
        dir / "hist_rmse_mae_ratio.svg",
        make_histogram(collect([](const MetricRecord& r) { return r.rmse_mae_ratio; }, false), bins),
        "RMSE/MAE distribution", config_hash);

    if (!comparisons.empty())
        write_comparison_csv(dir / "comparison.csv", comparisons, config_hash);
}

}  // namespace onb
