#pragma once

#include "actsub/kriging.hpp"
#include "actsub/subspace.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace actsub {

/// Shortest text that parses back to the same double.
std::string format_double(double value);

/// Numeric CSV with a header row. Throws InvalidInput on ragged rows or non-numeric cells.
struct CsvTable {
  std::vector<std::string> header;
  Matrix rows;
};
CsvTable read_csv(const std::filesystem::path& file);
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const Matrix& rows);

/// Header x_1..x_m, f, g_1..g_m; one row per sample.
void write_samples_csv(const std::filesystem::path& file, const GradientSampleSet& samples);
GradientSampleSet read_samples_csv(const std::filesystem::path& file);

/// {m, n, eigenvalues, W} with W row-major.
nlohmann::json subspace_to_json(const ActiveSubspace& subspace);
ActiveSubspace subspace_from_json(const nlohmann::json& doc);

/// Header y_1..y_n; rows are design points.
void write_design_csv(const std::filesystem::path& file, const Matrix& design);
Matrix read_design_csv(const std::filesystem::path& file);

/// Header y_1..y_n, value.
void write_training_csv(const std::filesystem::path& file, const Matrix& design,
                        const Vector& values);
std::pair<Matrix, Vector> read_training_csv(const std::filesystem::path& file);

nlohmann::json model_to_json(const KrigingModel& model);
KrigingModel model_from_json(const nlohmann::json& doc);

nlohmann::json read_json(const std::filesystem::path& file);
void write_json(const std::filesystem::path& file, const nlohmann::json& doc);

}  // namespace actsub
