// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/harness/output.hpp"

#include <json.hpp>
#include <spdlog/fmt/fmt.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#ifndef WETBEAM_VERSION
#define WETBEAM_VERSION "unknown"
#endif

namespace wetbeam::harness {

namespace {

std::string num(double v)
{
    // shortest representation that reads back to the same double
    return fmt::format("{}", v);
}

std::string join(const std::vector<std::string>& cells)
{
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            line += ',';
        line += cells[i];
    }
    return line;
}

/// Quotes a free-text cell when it contains separators.
std::string text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + "\"";
}

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::vector<std::string>& header)
        : path_(path), out_(path)
    {
        if (!out_)
            throw OutputError("cannot write '" + path.string() + "'");
        row(header);
    }
    void row(const std::vector<std::string>& cells) { out_ << join(cells) << '\n'; }
    void close()
    {
        out_.close();
        if (!out_)
            throw OutputError("error while writing '" + path_.string() + "'");
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::vector<std::string> key_cells(const std::string& experiment, Architecture arch, double sweep_value,
                                   int realization)
{
    return {experiment, std::string(to_string(arch)), num(sweep_value), std::to_string(realization)};
}

} // namespace

std::string code_version()
{
    return WETBEAM_VERSION;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> write_results(const ResultSet& results, const std::filesystem::path& dir,
                                       const RunInfo& info)
{
    if (results.records.empty() && results.failures.empty())
        throw OutputError("nothing to write: the result set is empty");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw OutputError("cannot create output directory '" + dir.string() + "'");

    std::vector<std::string> written;

    CsvFile res(dir / "results.csv", kResultColumns);
    for (const auto& r : results.records) {
        auto cells = key_cells(r.experiment, r.architecture, r.sweep_value, r.realization);
        cells.insert(cells.end(), {std::to_string(r.seed), num(r.total_power_W), num(r.total_power_dBW),
                                   num(r.min_received_power_W), std::to_string(r.iterations),
                                   fmt::format("{:.3f}", r.wall_ms)});
        res.row(cells);
    }
    res.close();
    written.push_back("results.csv");

    CsvFile agg(dir / "aggregates.csv", {"experiment", "architecture", "sweep_value", "count", "failures",
                                         "mean_total_power_W", "std_total_power_W", "mean_total_power_dBW",
                                         "mean_iterations"});
    for (const auto& a : results.aggregates)
        agg.row({a.experiment, std::string(to_string(a.architecture)), num(a.sweep_value), std::to_string(a.count),
                 std::to_string(a.failures), num(a.mean_W), num(a.std_W), num(a.mean_dBW),
                 num(a.mean_iterations)});
    agg.close();
    written.push_back("aggregates.csv");

    CsvFile tr(dir / "traces.csv",
               {"experiment", "architecture", "sweep_value", "realization", "iteration", "hpa_power_W"});
    for (const auto& r : results.records)
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            auto cells = key_cells(r.experiment, r.architecture, r.sweep_value, r.realization);
            cells.push_back(std::to_string(i));
            cells.push_back(num(r.trace[i]));
            tr.row(cells);
        }
    tr.close();
    written.push_back("traces.csv");

    CsvFile rx(dir / "received.csv",
               {"experiment", "architecture", "sweep_value", "realization", "device", "received_power_W"});
    for (const auto& r : results.records)
        for (Eigen::Index k = 0; k < r.received_power.size(); ++k) {
            auto cells = key_cells(r.experiment, r.architecture, r.sweep_value, r.realization);
            cells.push_back(std::to_string(k));
            cells.push_back(num(r.received_power(k)));
            rx.row(cells);
        }
    rx.close();
    written.push_back("received.csv");

    CsvFile fail(dir / "failures.csv",
                 {"experiment", "architecture", "sweep_value", "realization", "seed", "message"});
    for (const auto& f : results.failures) {
        auto cells = key_cells(f.experiment, f.architecture, f.sweep_value, f.realization);
        cells.push_back(std::to_string(f.seed));
        cells.push_back(text(f.message));
        fail.row(cells);
    }
    fail.close();
    written.push_back("failures.csv");

    if (!results.starts.empty()) {
        CsvFile st(dir / "starts.csv", {"realization", "start", "assignment", "feasible", "init_score_W", "chosen"});
        for (const auto& s : results.starts) {
            std::string assignment;
            for (std::size_t i = 0; i < s.assignment.size(); ++i)
                assignment += (i ? " " : "") + std::to_string(s.assignment[i]);
            st.row({std::to_string(s.realization), std::to_string(s.index), assignment, s.feasible ? "1" : "0",
                    s.feasible ? num(s.init_score) : "", s.chosen ? "1" : "0"});
        }
        st.close();
        written.push_back("starts.csv");
    }

    if (!results.maps.empty()) {
        CsvFile index(dir / "maps.csv", {"file", "plane", "sweep_value", "realization"});
        std::map<std::string, int> counter;
        for (const auto& m : results.maps) {
            const std::string name = "map_" + m.plane + "_" + std::to_string(counter[m.plane]++) + ".csv";
            CsvFile f(dir / name, {"x", "y", "normalized_power"});
            for (std::size_t i = 0; i < m.power.size(); ++i)
                f.row({num(m.x[i]), num(m.y[i]), num(m.power[i])});
            f.close();
            index.row({name, m.plane, num(m.sweep_value), std::to_string(m.realization)});
            written.push_back(name);
        }
        index.close();
        written.push_back("maps.csv");
    }

    nlohmann::ordered_json manifest;
    manifest["code_version"] = code_version();
    manifest["command"] = info.command;
    manifest["started"] = info.started;
    manifest["finished"] = info.finished;
    manifest["scale"] = info.scale;
    manifest["records"] = results.records.size();
    manifest["failures"] = results.failures.size();
    manifest["failed_cells"] = results.failed_cells;
    manifest["config"] = nlohmann::ordered_json::parse(to_json(results.config));
    written.push_back("manifest.json");
    manifest["files"] = written;
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << '\n';
    mf.close();
    if (!mf)
        throw OutputError("cannot write manifest in '" + dir.string() + "'");
    return written;
}

} // namespace wetbeam::harness
