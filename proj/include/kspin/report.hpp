#pragma once

#include "exact.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace kspin {

using json = nlohmann::ordered_json;

inline constexpr const char* tool_name = "kspin";
inline constexpr const char* tool_version = "1.0.0";

// One verified statement. Exact checks carry no numeric residual: they either vanish or they do not.
struct CheckRecord {
    std::string id;
    std::string eq_tag;
    bool exact = true;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
    json payload = json::object();
};

inline json to_json(const CheckRecord& c)
{
    json j;
    j["id"] = c.id;
    j["eq_tag"] = c.eq_tag;
    j["mode"] = c.exact ? "exact" : "float";
    j["status"] = c.pass ? "pass" : "fail";
    if (c.exact)
        j["residual"] = c.pass ? "0" : "nonzero";
    else
        j["residual"] = c.residual;
    if (!c.exact) j["tolerance"] = c.tolerance;
    j["payload"] = c.payload;
    return j;
}

class Report {
public:
    CheckRecord& add_exact(std::string id, std::string tag, bool pass, json payload = json::object())
    {
        checks_.push_back(CheckRecord{std::move(id), std::move(tag), true, pass, 0.0, 0.0, std::move(payload)});
        return checks_.back();
    }

    CheckRecord& add_float(std::string id, std::string tag, double residual, double tol, json payload = json::object())
    {
        const bool pass = residual <= tol;
        checks_.push_back(CheckRecord{std::move(id), std::move(tag), false, pass, residual, tol, std::move(payload)});
        return checks_.back();
    }

    template <Scalar T>
    CheckRecord& add(std::string id, std::string tag, double residual, double tol, json payload = json::object())
    {
        if constexpr (scalar_traits<T>::exact)
            return add_exact(std::move(id), std::move(tag), residual == 0.0, std::move(payload));
        else
            return add_float(std::move(id), std::move(tag), residual, tol, std::move(payload));
    }

    void merge(const Report& other)
    {
        checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
    }

    void prefix(const std::string& p)
    {
        for (auto& c : checks_) c.id = p + c.id;
    }

    const std::vector<CheckRecord>& checks() const { return checks_; }
    std::size_t size() const { return checks_.size(); }

    bool all_pass() const
    {
        return std::all_of(checks_.begin(), checks_.end(), [](const CheckRecord& c) { return c.pass; });
    }

    std::vector<CheckRecord> failures() const
    {
        std::vector<CheckRecord> f;
        for (const auto& c : checks_)
            if (!c.pass) f.push_back(c);
        return f;
    }

    std::vector<CheckRecord> sorted() const
    {
        std::vector<CheckRecord> s = checks_;
        std::stable_sort(s.begin(), s.end(), [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
        return s;
    }

private:
    std::vector<CheckRecord> checks_;
};

struct ReportEnvelope {
    std::string subcommand;
    json config = json::object();
    Report report;
    json summary = json::object();

    bool pass() const { return report.all_pass(); }
};

inline json to_json(const ReportEnvelope& env)
{
    json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    j["subcommand"] = env.subcommand;
    j["config"] = env.config;
    j["verdict"] = env.pass() ? "pass" : "fail";
    j["check_count"] = env.report.size();
    j["summary"] = env.summary;
    json checks = json::array();
    for (const auto& c : env.report.sorted()) checks.push_back(to_json(c));
    j["checks"] = std::move(checks);
    return j;
}

inline std::string render_json(const ReportEnvelope& env) { return to_json(env).dump(2) + "\n"; }

inline std::string format_residual(const CheckRecord& c)
{
    if (c.exact) return c.pass ? "0 (exact)" : "nonzero (exact)";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", c.residual);
    return buf;
}

inline std::string render_table(const ReportEnvelope& env)
{
    const auto rows = env.report.sorted();
    std::size_t wid = 8, wtag = 6;
    for (const auto& c : rows) {
        wid = std::max(wid, c.id.size());
        wtag = std::max(wtag, c.eq_tag.size());
    }
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(w, s.size()), ' ');
        return s;
    };
    std::ostringstream out;
    out << tool_name << " " << tool_version << " " << env.subcommand << "\n";
    out << pad("check", wid) << "  " << pad("tag", wtag) << "  " << pad("mode", 5) << "  " << pad("status", 6) << "  residual\n";
    out << std::string(wid + wtag + 36, '-') << "\n";
    for (const auto& c : rows)
        out << pad(c.id, wid) << "  " << pad(c.eq_tag, wtag) << "  " << pad(c.exact ? "exact" : "float", 5) << "  "
            << pad(c.pass ? "pass" : "FAIL", 6) << "  " << format_residual(c) << "\n";
    for (const auto& [key, value] : env.summary.items()) out << key << ": " << value.dump() << "\n";
    out << "verdict: " << (env.pass() ? "pass" : "fail") << " (" << rows.size() << " checks)\n";
    return out.str();
}

}  // namespace kspin
