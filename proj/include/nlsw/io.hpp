#pragma once

#include "nlsw/dynamics.hpp"
#include "nlsw/gluing.hpp"
#include "nlsw/grid.hpp"
#include "nlsw/semiclassical.hpp"
#include "nlsw/spectra.hpp"
#include "nlsw/stationary.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nlsw {

inline constexpr const char* library_version = "1.0.0";

// Shortest decimal that reads back to the same double.
std::string format_double(double x);

// Two columns x,value with a header row.
void write_field_csv(const Field& u, const std::filesystem::path& path);
Field read_field_csv(const std::filesystem::path& path);
// L and M, then M values, all little-endian 64-bit.
void write_field_binary(const Field& u, const std::filesystem::path& path);
Field read_field_binary(const std::filesystem::path& path);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add(const std::vector<std::string>& row);
    void write(const std::filesystem::path& path) const;
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string cell(double x);
std::string cell(long x);
inline std::string cell(int x) { return cell(static_cast<long>(x)); }
inline std::string cell(bool b) { return b ? "true" : "false"; }

void write_trajectory_csv(const TrajectoryRecord& traj, const std::filesystem::path& path);

nlohmann::json to_json(const GridSpec& g);
nlohmann::json to_json(const ConstrainedCriticalPoint& pt, const SampledPotential& V, const Nonlinearity& f);
nlohmann::json to_json(const SpectralReport& rep);
nlohmann::json to_json(const ShadowingReport& rep);
nlohmann::json to_json(const InstabilityResult& res);

// 64-bit FNV-1a
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t x);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

} // namespace nlsw
