#pragma once

#include "softring/transplant.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace softring {

/// One inequality or equality test with the provenance of both sides.
struct CheckRecord {
    std::string name;
    std::string relation;        // "<=", ">=", "==" (|left - right| <= tolerance) or "true"
    double left = 0.0;
    double right = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string left_source, right_source;
    std::string note;
    double seconds = 0.0;        // wall time, written to timing.json only
};

/// Evaluates the relation and fills `passed`.
CheckRecord make_check(std::string name, double left, std::string relation, double right, double tolerance,
                       std::string left_source, std::string right_source, std::string note = {});

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

struct Plot {
    std::string file;            // e.g. "lambda_t.svg"
    std::string title, x_label, y_label;
    bool log_x = false;
    std::vector<PlotSeries> series;
};

struct VerificationReport {
    std::string name;
    std::vector<CheckRecord> checks;
    nlohmann::json details = nlohmann::json::object();
    std::vector<Plot> plots;
    std::vector<std::string> notes;
    bool rerun = false;          // failed once and was repeated at doubled resolution

    bool passed() const;
    void add(CheckRecord check) { checks.push_back(std::move(check)); }
};

nlohmann::json to_json(const CheckRecord& check);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const TransplantReport& report);

/// report.json (without wall times), results.csv (one row per check),
/// timing.json and the report's plots.
void write_report(const VerificationReport& report, const std::filesystem::path& dir);

void write_json(const nlohmann::json& value, const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Standalone SVG line chart.
void write_svg(const Plot& plot, const std::filesystem::path& path);

}  // namespace softring
