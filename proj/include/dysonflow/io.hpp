#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dysonflow/configspace.hpp"
#include "dysonflow/sde.hpp"

namespace dysonflow {

// {"offset": int, "positions": [...]}.
nlohmann::json to_json(const ParticleConfig& x);
ParticleConfig particles_from_json(const nlohmann::json& j);

// {"offset": int, "gaps": [number | "inf"], "infinite_outside": bool, "x0": number?}.
nlohmann::json to_json(const GapConfig& y);
nlohmann::json to_json(const AnchoredGapConfig& g);
GapConfig gaps_from_json(const nlohmann::json& j);
AnchoredGapConfig anchored_from_json(const nlohmann::json& j);

// Shortest round-trip formatting of doubles ("inf" / "-inf" / "nan" for non-finite).
std::string format_double(double v);

// Rows of comma-separated cells with a header line.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& cell(const std::string& v);
  CsvTable& cell(double v);
  CsvTable& cell(long v);
  CsvTable& cell(int v) { return cell(static_cast<long>(v)); }
  CsvTable& cell(std::size_t v) { return cell(static_cast<long>(v)); }
  void end_row();

  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string text_;
};

// time,index,value rows for every recorded state.
CsvTable trajectory_csv(const PathBundle& p);

// Writes to `path.tmp` then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace dysonflow
