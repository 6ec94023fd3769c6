#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "equilib/convergence.hpp"
#include "equilib/verifier.hpp"

namespace equilib {

/// CSV with header x0,...,x{dim-1},region; one row per point; floats with
/// 17 significant digits so re-ingestion is bit-exact.
std::string cloud_to_csv(const PointCloud& cloud);
PointCloud cloud_from_csv(const std::string& text);

/// CSV with header index,weight.
std::string measure_to_csv(const DiscreteMeasure& nu);
DiscreteMeasure measure_from_csv(const std::string& text);

nlohmann::json measure_to_json(const DiscreteMeasure& nu);
DiscreteMeasure measure_from_json(const nlohmann::json& j);

nlohmann::json field_to_json(const FieldSpec& field);
FieldSpec field_from_json(const nlohmann::json& j);

/// Solution plus provenance (solver options, problem hash).
nlohmann::json solution_to_json(const Solution& sol, const SolverOptions& opts,
                                const std::string& problem_hash);

nlohmann::json report_to_json(const VariationalReport& report);

/// Human-readable rendering: the w-interval and the worst margins.
std::string report_to_text(const VariationalReport& report);

nlohmann::json family_to_json(const FamilyRun& run);

/// CSV table: stage,G,gap,distance_to_final (plot-ready).
std::string family_to_csv(const FamilyRun& run);

/// FNV-1a over the problem data (matrix entries, g, f, sigma), hex-encoded.
std::string problem_hash(const Problem& p);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Fixed-width float formatting used by every CSV writer (17 significant
/// digits, '.' decimal separator).
std::string format_double(double v);

}  // namespace equilib
