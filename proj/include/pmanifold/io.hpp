#pragma once

#include "pmanifold/manifold.hpp"
#include "pmanifold/point_cloud.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pmanifold {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

struct CsvTable {
    std::optional<nlohmann::json> header;  ///< parsed from a leading "# {...}" row
    std::vector<std::vector<double>> rows;
};

/// Comma-separated numbers, one row per line; an optional first line starting
/// with '#' is a header (JSON when it parses as such). Blank lines are skipped.
CsvTable parse_csv(const std::string& text, const std::string& source = "input");
CsvTable read_csv(const std::filesystem::path& path);

/// Point cloud from CSV; rows must agree in length.
PointCloud read_point_cloud(const std::filesystem::path& path);

std::string format_csv(const std::vector<std::vector<double>>& rows,
                       const std::optional<nlohmann::json>& header = std::nullopt);

nlohmann::json to_json(const SmoothingSpline& spline);
SmoothingSpline spline_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PrincipalManifold& manifold);
PrincipalManifold manifold_from_json(const nlohmann::json& j);

void save_manifold(const std::filesystem::path& path, const PrincipalManifold& manifold,
                   const nlohmann::json& run_config = nlohmann::json::object());
PrincipalManifold load_manifold(const std::filesystem::path& path);

}  // namespace pmanifold
