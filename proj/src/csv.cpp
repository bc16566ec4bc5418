#include "varma/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace varma {

std::string format_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string time_series_to_csv(const TimeSeries& series) {
    std::ostringstream out;
    out << 't';
    for (int j = 1; j <= series.dim(); ++j) out << ",y" << j;
    out << '\n';
    for (int t = 0; t < series.length(); ++t) {
        out << (t + 1);
        for (int j = 0; j < series.dim(); ++j) out << ',' << format_full(series.values(t, j));
        out << '\n';
    }
    return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, int line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw config_error("CSV: bad numeric field '" + s + "' on line " +
                           std::to_string(line_no));
    return v;
}

}  // namespace

TimeSeries time_series_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw config_error("CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "t")
        throw config_error("CSV: header must be t,y1,...,yd");
    const int d = static_cast<int>(header.size()) - 1;
    for (int j = 0; j < d; ++j)
        if (header[j + 1] != "y" + std::to_string(j + 1))
            throw config_error("CSV: header must be t,y1,...,yd (got '" + header[j + 1] + "')");

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != d + 1)
            throw config_error("CSV: wrong field count on line " + std::to_string(line_no));
        std::vector<double> row(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) row[j] = parse_double(fields[j + 1], line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw config_error("CSV: no data rows");

    TimeSeries series;
    series.origin = SeriesOrigin::Empirical;
    series.values.resize(static_cast<int>(rows.size()), d);
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (int j = 0; j < d; ++j) series.values(static_cast<int>(t), j) = rows[t][j];
    series.validate();
    return series;
}

TimeSeries read_time_series(const std::string& path) {
    return time_series_from_csv(read_file(path));
}

std::string contamination_to_csv(const ContaminationSpec& spec) {
    std::ostringstream out;
    const int d = static_cast<int>(spec.zeta.cols());
    out << "t,delta";
    for (int j = 1; j <= d; ++j) out << ",zeta" << j;
    out << '\n';
    for (int t = 0; t < spec.length(); ++t) {
        out << (t + 1) << ',' << static_cast<int>(spec.delta[t]);
        for (int j = 0; j < d; ++j) out << ',' << format_full(spec.zeta(t, j));
        out << '\n';
    }
    return out.str();
}

std::string index_set_to_csv(const IndexSet& H) {
    std::ostringstream out;
    out << "t\n";
    for (int t : H.members) out << t << '\n';
    return out.str();
}

std::string power_series_to_csv(const PowerSeries& series) {
    std::ostringstream out;
    out << "lag,row,col,value\n";
    for (int k = 0; k <= series.truncation(); ++k)
        for (int r = 0; r < series.dim(); ++r)
            for (int c = 0; c < series.dim(); ++c)
                out << k << ',' << r << ',' << c << ',' << format_full(series.at(k)(r, c)) << '\n';
    return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw config_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw config_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace varma
