#include "loadcast/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace loadcast {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_field(const std::string& text, std::size_t line_no, const std::string& column) {
    if (text.empty()) return std::nan("");
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &consumed);
    } catch (const std::exception&) {
        consumed = 0;
    }
    if (consumed != text.size())
        throw std::runtime_error("line " + std::to_string(line_no) + ": malformed value '" +
                                 text + "' in column '" + column + "'");
    return v;
}

std::string double_field(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

MultiSeries ingest_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file '" + path + "'");
    const auto header = split_csv_line(line);
    const std::vector<std::string> expected = {schema.timestamp, schema.consumption,
                                               schema.temperature, schema.radiation_direct,
                                               schema.radiation_diffuse};
    if (header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        throw std::runtime_error("CSV header mismatch in '" + path + "': expected '" + want +
                                 "', got '" + line + "'");
    }

    MultiSeries series;
    series.origin = path;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != expected.size())
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(expected.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        HourlyRecord rec;
        try {
            rec.timestamp = parse_iso_hour(fields[0]);
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        rec.consumption = parse_field(fields[1], line_no, schema.consumption);
        rec.temperature = parse_field(fields[2], line_no, schema.temperature);
        rec.radiation_direct = parse_field(fields[3], line_no, schema.radiation_direct);
        rec.radiation_diffuse = parse_field(fields[4], line_no, schema.radiation_diffuse);
        series.records.push_back(rec);
    }

    std::stable_sort(series.records.begin(), series.records.end(),
                     [](const HourlyRecord& a, const HourlyRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    for (std::size_t i = 1; i < series.records.size(); ++i) {
        if (series.records[i].timestamp == series.records[i - 1].timestamp)
            throw std::runtime_error("duplicate timestamp " +
                                     format_iso_hour(series.records[i].timestamp));
    }
    return series;
}

void write_series_csv(const std::string& path, const MultiSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV file '" + path + "'");
    out << "timestamp,consumption,temperature,radiation_direct,radiation_diffuse\n";
    for (const auto& rec : series.records) {
        out << format_iso_hour(rec.timestamp) << ',' << double_field(rec.consumption) << ','
            << double_field(rec.temperature) << ',' << double_field(rec.radiation_direct)
            << ',' << double_field(rec.radiation_diffuse) << '\n';
    }
}

HolidaySet read_holiday_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open holiday file '" + path + "'");
    HolidaySet holidays;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        try {
            holidays.insert(parse_iso_date(line.substr(start)));
        } catch (const std::exception& e) {
            throw std::runtime_error("holiday file line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return holidays;
}

void write_holiday_file(const std::string& path, const HolidaySet& holidays) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write holiday file '" + path + "'");
    out << "# holiday dates, one ISO-8601 date per line\n";
    for (HourStamp h : holidays) out << format_iso_date(h) << '\n';
}

namespace {
const char* kDatasetHeader =
    "timestamp,consumption,temperature,radiation_direct,radiation_diffuse,"
    "season_id,is_weekend_or_holiday,is_holiday,anomaly_flag";
}

void write_dataset_csv(const std::string& path, const SeasonalDataset& dataset) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset CSV '" + path + "'");
    out << kDatasetHeader << '\n';
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const auto& rec = dataset.records[i];
        const int flag = (i < dataset.anomaly_flags.size() && dataset.anomaly_flags[i]) ||
                                 (i < dataset.substituted.size() && dataset.substituted[i])
                             ? 1
                             : 0;
        out << format_iso_hour(rec.timestamp) << ',' << double_field(rec.consumption) << ','
            << double_field(rec.temperature) << ',' << double_field(rec.radiation_direct)
            << ',' << double_field(rec.radiation_diffuse) << ',' << to_string(dataset.season_id)
            << ',' << int(rec.is_weekend_or_holiday) << ',' << int(rec.is_holiday) << ','
            << flag << '\n';
    }
}

SeasonalDataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset CSV '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kDatasetHeader))
        throw std::runtime_error("'" + path + "' is not a processed-dataset CSV");

    SeasonalDataset dataset;
    bool season_set = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 9)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 9 fields, got " +
                                     std::to_string(fields.size()));
        HourlyRecord rec;
        rec.timestamp = parse_iso_hour(fields[0]);
        rec.consumption = parse_field(fields[1], line_no, "consumption");
        rec.temperature = parse_field(fields[2], line_no, "temperature");
        rec.radiation_direct = parse_field(fields[3], line_no, "radiation_direct");
        rec.radiation_diffuse = parse_field(fields[4], line_no, "radiation_diffuse");
        const SeasonId season = season_from_string(fields[5]);
        if (!season_set) {
            dataset.season_id = season;
            season_set = true;
        } else if (season != dataset.season_id) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": mixed season ids in one dataset file");
        }
        rec.is_weekend_or_holiday = fields[6] == "1" ? 1 : 0;
        rec.is_holiday = fields[7] == "1" ? 1 : 0;
        dataset.records.push_back(rec);
        dataset.anomaly_flags.push_back(fields[8] == "1" ? 1 : 0);
        dataset.substituted.push_back(0);
    }
    recompute_segments(dataset);
    return dataset;
}

}  // namespace loadcast
