#include "biphoton/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton::io {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open for writing: " + path.string());
    return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open: " + path.string());
    return f;
}

double parse_field_double(const std::string& field, long line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE)
        throw ParseError("bad numeric field '" + field + "'", line);
    return v;
}

std::uint64_t parse_field_u64(const std::string& field, long line) {
    errno = 0;
    char* end = nullptr;
    if (!field.empty() && field[0] == '-')
        throw ParseError("counts must be nonnegative, got '" + field + "'", line);
    const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE)
        throw ParseError("bad integer field '" + field + "'", line);
    return v;
}

std::vector<std::string> split_csv_row(const std::string& row) {
    std::vector<std::string> fields;
    std::stringstream ss(row);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!row.empty() && row.back() == ',') fields.emplace_back();
    return fields;
}

// Strips a trailing '\r' so files written on Windows read back cleanly.
bool next_row(std::istream& in, std::string& row) {
    if (!std::getline(in, row)) return false;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    return true;
}

json fit_to_json(const synth::FitResult& fit) {
    json cov = json::array();
    for (double v : fit.covariance_diag) cov.push_back(v);
    return json{{"lambda_eff", fit.lambda_eff},
                {"a_eff", fit.a_eff},
                {"b_eff", fit.b_eff},
                {"amplitude", fit.amplitude},
                {"background", fit.background},
                {"residual_norm", fit.residual_norm},
                {"converged", fit.converged},
                {"covariance_diag", cov},
                {"free_names", fit.free_names}};
}

const char* severity_name(Severity s) {
    switch (s) {
    case Severity::Pass: return "pass";
    case Severity::Warn: return "warn";
    default: return "fail";
    }
}

json validation_to_json(const ValidationReport& report) {
    json findings = json::array();
    for (const auto& f : report.findings)
        findings.push_back(
            {{"id", f.id}, {"severity", severity_name(f.severity)}, {"detail", f.detail}});
    return json{{"passed", report.passed()}, {"findings", findings}};
}

// +inf is not representable in JSON; the ratio field uses the string "inf"
// for the degenerate D = 0 / delta_theta = 0 cases.
json ratio_to_json(double r) {
    if (std::isinf(r)) return json("inf");
    return json(r);
}

// Quantities in the config may be numbers (SI) or suffixed strings.
double quantity(const json& j, const std::string& key,
                double (*parse)(const std::string&)) {
    const json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse(v.get<std::string>());
        } catch (const InvalidParameter& e) {
            throw ParseError(std::string("config field '") + key + "': " + e.what());
        }
    }
    throw ParseError("config field '" + key + "' must be a number or a unit string");
}

int int_field(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw ParseError("config field '" + key + "' must be an integer");
    return v.get<int>();
}

void reject_unknown(const json& obj, const std::string& section,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw ParseError("unknown key '" + key + "' in " + section);
    }
}

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

} // namespace

void write_pattern_csv(const std::filesystem::path& path, const Pattern& p) {
    auto f = open_out(path);
    f << "theta_rad,value\n";
    for (std::size_t i = 0; i < p.theta.size(); ++i)
        f << units::format_double(p.theta[i]) << ',' << units::format_double(p.value[i]) << '\n';
}

Pattern read_pattern_csv(const std::filesystem::path& path) {
    auto f = open_in(path);
    std::string row;
    if (!next_row(f, row) || row != "theta_rad,value")
        throw ParseError("expected header 'theta_rad,value' in " + path.string(), 1);
    std::vector<double> theta, value;
    long line = 1;
    while (next_row(f, row)) {
        ++line;
        if (row.empty()) continue;
        const auto fields = split_csv_row(row);
        if (fields.size() != 2) throw ParseError("expected 2 fields", line);
        theta.push_back(parse_field_double(fields[0], line));
        value.push_back(parse_field_double(fields[1], line));
    }
    if (theta.empty()) throw ParseError("no data rows in " + path.string());
    double peak = 0.0;
    for (double v : value) peak = std::max(peak, v);
    const auto norm = std::fabs(peak - 1.0) <= 1e-12 ? Normalization::PeakOne
                                                     : Normalization::AbsoluteRate;
    return make_pattern(std::move(theta), std::move(value), norm,
                        {{"source", "csv:" + path.filename().string()}});
}

void write_pattern_sidecar(const std::filesystem::path& path, const Pattern& p,
                           const std::vector<double>* standard_error,
                           std::optional<int> quadrature_order,
                           std::optional<double> estimated_error) {
    json j{{"normalization",
            p.normalization == Normalization::PeakOne ? "peak_one" : "absolute_rate"},
           {"points", p.theta.size()},
           {"meta", p.meta}};
    if (standard_error) {
        json se = json::array();
        for (double v : *standard_error) se.push_back(v);
        j["standard_error"] = se;
    }
    if (quadrature_order) j["quadrature_order"] = *quadrature_order;
    if (estimated_error) j["estimated_error"] = *estimated_error;
    auto f = open_out(path);
    f << j.dump(2) << '\n';
}

void write_counts_csv(const std::filesystem::path& path,
                      const std::vector<synth::CountRecord>& data) {
    auto f = open_out(path);
    f << "theta_rad,counts,integration_time_s\n";
    for (const auto& r : data)
        f << units::format_double(r.theta) << ',' << r.counts << ','
          << units::format_double(r.integration_time) << '\n';
}

std::vector<synth::CountRecord> read_counts_csv(const std::filesystem::path& path) {
    auto f = open_in(path);
    std::string row;
    if (!next_row(f, row) || row != "theta_rad,counts,integration_time_s")
        throw ParseError("expected header 'theta_rad,counts,integration_time_s' in " +
                             path.string(),
                         1);
    std::vector<synth::CountRecord> out;
    long line = 1;
    while (next_row(f, row)) {
        ++line;
        if (row.empty()) continue;
        const auto fields = split_csv_row(row);
        if (fields.size() != 3) throw ParseError("expected 3 fields", line);
        synth::CountRecord r;
        r.theta = parse_field_double(fields[0], line);
        r.counts = parse_field_u64(fields[1], line);
        r.integration_time = parse_field_double(fields[2], line);
        if (!(r.integration_time > 0))
            throw ParseError("integration_time_s must be > 0", line);
        out.push_back(r);
    }
    if (out.empty()) throw ParseError("no data rows in " + path.string());
    return out;
}

OpticalSetup load_config(const std::filesystem::path& path) {
    auto f = open_in(path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError("config root must be an object");
    reject_unknown(j, "config", {"source", "mask", "detection"});

    OpticalSetup s;
    if (j.contains("source")) {
        const json& src = j["source"];
        reject_unknown(src, "source",
                       {"pump_wavelength", "signal_wavelength", "idler_wavelength",
                        "emission_spread", "pump_beam_width", "pair_amplitude", "pump_phase"});
        if (src.contains("pump_wavelength"))
            s.source.pump_wavelength = quantity(src, "pump_wavelength", units::parse_length);
        if (src.contains("signal_wavelength"))
            s.source.signal_wavelength = quantity(src, "signal_wavelength", units::parse_length);
        if (src.contains("idler_wavelength"))
            s.source.idler_wavelength = quantity(src, "idler_wavelength", units::parse_length);
        if (src.contains("emission_spread"))
            s.source.emission_spread = quantity(src, "emission_spread", units::parse_angle);
        if (src.contains("pump_beam_width"))
            s.source.pump_beam_width = quantity(src, "pump_beam_width", units::parse_length);
        if (src.contains("pair_amplitude")) {
            if (!src["pair_amplitude"].is_number())
                throw ParseError("config field 'pair_amplitude' must be a number");
            s.source.pair_amplitude = src["pair_amplitude"].get<double>();
        }
        if (src.contains("pump_phase")) {
            const json& pp = src["pump_phase"];
            reject_unknown(pp, "pump_phase", {"offset", "slope"});
            if (pp.contains("offset"))
                s.source.pump_phase_profile.offset = quantity(pp, "offset", units::parse_angle);
            if (pp.contains("slope")) {
                if (!pp["slope"].is_number())
                    throw ParseError("config field 'slope' must be a number (rad/m)");
                s.source.pump_phase_profile.slope = pp["slope"].get<double>();
            }
        }
    }
    if (j.contains("mask")) {
        const json& m = j["mask"];
        reject_unknown(m, "mask",
                       {"slit_width", "slit_separation", "n_slits", "distance_from_crystal"});
        if (m.contains("slit_width"))
            s.mask.slit_width = quantity(m, "slit_width", units::parse_length);
        if (m.contains("slit_separation"))
            s.mask.slit_separation = quantity(m, "slit_separation", units::parse_length);
        if (m.contains("n_slits")) s.mask.n_slits = int_field(m, "n_slits");
        if (m.contains("distance_from_crystal"))
            s.mask.distance_from_crystal =
                quantity(m, "distance_from_crystal", units::parse_length);
    }
    s.detection.theta_grid = default_theta_grid();
    if (j.contains("detection")) {
        const json& d = j["detection"];
        reject_unknown(d, "detection",
                       {"theta_grid", "photon_number", "propagation_distance"});
        if (d.contains("theta_grid")) {
            const json& g = d["theta_grid"];
            if (g.is_array()) {
                std::vector<double> grid;
                grid.reserve(g.size());
                for (const auto& v : g) {
                    if (v.is_number())
                        grid.push_back(v.get<double>());
                    else if (v.is_string())
                        grid.push_back(units::parse_angle(v.get<std::string>()));
                    else
                        throw ParseError("theta_grid entries must be numbers or unit strings");
                }
                s.detection.theta_grid = std::move(grid);
            } else if (g.is_object()) {
                reject_unknown(g, "theta_grid", {"min", "max", "points"});
                const double lo = quantity(g, "min", units::parse_angle);
                const double hi = quantity(g, "max", units::parse_angle);
                const int n = int_field(g, "points");
                if (n < 2) throw ParseError("theta_grid points must be >= 2");
                if (!(hi > lo)) throw ParseError("theta_grid needs max > min");
                s.detection.theta_grid = linspace_grid(lo, hi, static_cast<std::size_t>(n));
            } else {
                throw ParseError("theta_grid must be an array or a {min,max,points} object");
            }
        }
        if (d.contains("photon_number"))
            s.detection.photon_number = int_field(d, "photon_number");
        if (d.contains("propagation_distance"))
            s.detection.propagation_distance =
                quantity(d, "propagation_distance", units::parse_length);
    }
    return s;
}

std::string canonical_config_json(const OpticalSetup& s) {
    json grid = json::array();
    for (double t : s.detection.theta_grid) grid.push_back(t);
    const json j{
        {"source",
         {{"pump_wavelength", s.source.pump_wavelength},
          {"signal_wavelength", s.source.signal_wavelength},
          {"idler_wavelength", s.source.idler_wavelength},
          {"emission_spread", s.source.emission_spread},
          {"pump_beam_width", s.source.pump_beam_width},
          {"pair_amplitude", s.source.pair_amplitude},
          {"pump_phase",
           {{"offset", s.source.pump_phase_profile.offset},
            {"slope", s.source.pump_phase_profile.slope}}}}},
        {"mask",
         {{"slit_width", s.mask.slit_width},
          {"slit_separation", s.mask.slit_separation},
          {"n_slits", s.mask.n_slits},
          {"distance_from_crystal", s.mask.distance_from_crystal}}},
        {"detection",
         {{"theta_grid", grid},
          {"photon_number", s.detection.photon_number},
          {"propagation_distance", s.detection.propagation_distance}}}};
    return j.dump();
}

std::uint64_t config_digest(const OpticalSetup& s) {
    const std::string text = canonical_config_json(s);
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : text) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string validation_report_json(const ValidationReport& report) {
    return validation_to_json(report).dump(2);
}

std::string condition_reports_json(const std::vector<phasematch::ConditionReport>& reports,
                                   const ValidationReport& validation) {
    json conds = json::array();
    for (const auto& r : reports)
        conds.push_back({{"condition_id", phasematch::condition_name(r.condition_id)},
                         {"ratio", ratio_to_json(r.ratio)},
                         {"threshold_ratio", r.threshold_ratio},
                         {"passed", r.passed}});
    const json j{{"conditions", conds}, {"validation", validation_to_json(validation)}};
    return j.dump(2);
}

std::string fit_result_json(const synth::FitResult& fit) { return fit_to_json(fit).dump(2); }

std::string comparison_report_json(const synth::ComparisonReport& report) {
    const json j{{"period_ratio", report.period_ratio},
                 {"period_ratio_sigma", report.period_ratio_sigma},
                 {"envelope_zero_ratio", report.envelope_zero_ratio},
                 {"envelope_zero_ratio_sigma", report.envelope_zero_ratio_sigma},
                 {"lambda_ratio", report.lambda_ratio},
                 {"lambda_ratio_sigma", report.lambda_ratio_sigma},
                 {"quantum_fit", fit_to_json(report.quantum_fit)},
                 {"classical_fit", fit_to_json(report.classical_fit)}};
    return j.dump(2);
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    char digest[17];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(m.config_digest));
    json j{{"command", m.command},
           {"config_digest", std::string("fnv1a64:") + digest},
           {"artifacts", m.artifacts},
           {"tool_version", m.tool_version}};
    j["seed"] = m.seed ? json(std::to_string(*m.seed)) : json(nullptr);
    auto f = open_out(path);
    f << j.dump(2) << '\n';
}

} // namespace biphoton::io
