// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "purikit/error.hpp"
#include "purikit/harness.hpp"

namespace purikit {

using json = nlohmann::json;

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    std::string s(buf, ptr);
    if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos)
        s += ".0";
    return s;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

// The JSON value whose shortest representation is the 6-digit text.
double rounded(double v)
{
    const std::string s = format_number(v);
    double r = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), r);
    return r;
}

}  // namespace

std::string report_to_csv(const EvalReport& report)
{
    std::string out = "setting,method,metric,mean,std,n";
    if (report.has_time)
        out += ",time_s";
    out += '\n';
    for (const auto& r : report.rows) {
        out += csv_field(r.setting) + ',' + csv_field(r.method) + ',' + csv_field(r.metric) + ','
               + format_number(r.mean) + ',' + format_number(r.std) + ',' + std::to_string(r.n);
        if (report.has_time)
            out += ',' + (r.time_s ? format_number(*r.time_s) : std::string());
        out += '\n';
    }
    if (!report.failures.empty()) {
        out += "# failures: " + std::to_string(report.failures.size()) + '\n';
        for (const auto& f : report.failures) {
            std::string msg = f.message;
            for (char& c : msg)
                if (c == '\n' || c == '\r')
                    c = ' ';
            out += "# " + f.file + " [" + f.setting + "]: " + msg + '\n';
        }
    }
    return out;
}

std::string report_to_json(const EvalReport& report)
{
    json j;
    j["provenance"] = {{"tool", report.provenance.tool},
                       {"version", report.provenance.version},
                       {"config_sha256", report.provenance.config_sha256},
                       {"deterministic", report.provenance.deterministic}};
    json columns = {"setting", "method", "metric", "mean", "std", "n"};
    if (report.has_time)
        columns.push_back("time_s");
    j["columns"] = columns;
    j["rows"] = json::array();
    for (const auto& r : report.rows) {
        json row = {{"setting", r.setting}, {"method", r.method}, {"metric", r.metric},
                    {"mean", rounded(r.mean)}, {"std", rounded(r.std)}, {"n", r.n}};
        if (report.has_time)
            row["time_s"] = r.time_s ? json(rounded(*r.time_s)) : json(nullptr);
        j["rows"].push_back(row);
    }
    j["failures"] = json::array();
    for (const auto& f : report.failures)
        j["failures"].push_back({{"file", f.file}, {"setting", f.setting}, {"message", f.message}});
    return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text)
{
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        fail(ErrorCode::ConfigError, "report is not a JSON object");
    EvalReport r;
    try {
        const json& p = j.at("provenance");
        r.provenance.tool = p.at("tool").get<std::string>();
        r.provenance.version = p.at("version").get<std::string>();
        r.provenance.config_sha256 = p.at("config_sha256").get<std::string>();
        r.provenance.deterministic = p.at("deterministic").get<bool>();
        for (const auto& c : j.at("columns"))
            if (c == "time_s")
                r.has_time = true;
        for (const auto& row : j.at("rows")) {
            ReportRow rr{row.at("setting").get<std::string>(), row.at("method").get<std::string>(),
                         row.at("metric").get<std::string>(), row.at("mean").get<double>(),
                         row.at("std").get<double>(), row.at("n").get<int>(), std::nullopt};
            if (row.contains("time_s") && !row["time_s"].is_null())
                rr.time_s = row["time_s"].get<double>();
            r.rows.push_back(std::move(rr));
        }
        for (const auto& f : j.at("failures"))
            r.failures.push_back({f.at("file").get<std::string>(), f.at("setting").get<std::string>(),
                                  f.at("message").get<std::string>()});
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("malformed report: ") + e.what());
    }
    return r;
}

void emit_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format)
{
    const std::string text = format == ReportFormat::Json ? report_to_json(report) : report_to_csv(report);
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    out.close();
    if (!out)
        fail(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace purikit
