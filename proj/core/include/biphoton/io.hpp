#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/phase_matching.hpp"
#include "biphoton/synth.hpp"
#include "biphoton/types.hpp"

namespace biphoton::io {

// Pattern CSV: header `theta_rad,value`, one row per grid point, shortest
// round-trip decimals (byte-stable across runs).
void write_pattern_csv(const std::filesystem::path& path, const Pattern& p);
Pattern read_pattern_csv(const std::filesystem::path& path);

// Sidecar JSON next to a pattern CSV: normalization, provenance meta, and any
// extra numeric arrays (e.g. Monte Carlo standard errors).
void write_pattern_sidecar(const std::filesystem::path& path, const Pattern& p,
                           const std::vector<double>* standard_error = nullptr,
                           std::optional<int> quadrature_order = std::nullopt,
                           std::optional<double> estimated_error = std::nullopt);

// Counts CSV: header `theta_rad,counts,integration_time_s`.
void write_counts_csv(const std::filesystem::path& path,
                      const std::vector<synth::CountRecord>& data);
std::vector<synth::CountRecord> read_counts_csv(const std::filesystem::path& path);

// Config JSON mirrors OpticalSetup field for field; length/angle fields accept
// suffixed strings ("0.13mm", "916nm", "5mrad") or SI numbers. theta_grid is
// either {"min":..., "max":..., "points":...} or an explicit array.
OpticalSetup load_config(const std::filesystem::path& path);

// Canonical form: all quantities as SI floats, keys sorted. Digest is FNV-1a
// 64 over that text, so it is stable under input key reordering and unit
// spelling.
std::string canonical_config_json(const OpticalSetup& setup);
std::uint64_t config_digest(const OpticalSetup& setup);

std::string validation_report_json(const ValidationReport& report);
std::string condition_reports_json(const std::vector<phasematch::ConditionReport>& reports,
                                   const ValidationReport& validation);
std::string fit_result_json(const synth::FitResult& fit);
std::string comparison_report_json(const synth::ComparisonReport& report);

struct RunManifest {
    std::string command;
    std::uint64_t config_digest = 0;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> artifacts; // paths written by this run
    std::string tool_version;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

} // namespace biphoton::io
