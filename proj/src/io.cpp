#include "dysonflow/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dysonflow/error.hpp"

namespace dysonflow {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw DysonError(code, msg); }

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(ErrorCode::InvalidConfig, "expected a number or \"inf\", got " + j.dump());
}

std::vector<double> read_numbers(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    fail(ErrorCode::InvalidConfig, std::string("missing array field '") + field + "'");
  }
  std::vector<double> v;
  for (const auto& e : j.at(field)) v.push_back(read_number(e));
  return v;
}

long read_offset(const nlohmann::json& j) {
  if (!j.contains("offset") || !j.at("offset").is_number_integer()) {
    fail(ErrorCode::InvalidConfig, "missing integer field 'offset'");
  }
  return j.at("offset").get<long>();
}

}  // namespace

nlohmann::json to_json(const ParticleConfig& x) {
  return {{"offset", x.offset()}, {"positions", std::vector<double>(x.positions().begin(), x.positions().end())}};
}

ParticleConfig particles_from_json(const nlohmann::json& j) {
  return ParticleConfig(read_offset(j), read_numbers(j, "positions"));
}

nlohmann::json to_json(const GapConfig& y) {
  nlohmann::json gaps = nlohmann::json::array();
  for (double g : y.values()) gaps.push_back(number_or_inf(g));
  return {{"offset", y.offset()}, {"gaps", gaps}, {"infinite_outside", y.infinite_outside()}};
}

nlohmann::json to_json(const AnchoredGapConfig& g) {
  nlohmann::json j = to_json(g.gaps);
  j["x0"] = g.x0;
  return j;
}

GapConfig gaps_from_json(const nlohmann::json& j) {
  const bool inf_out = j.value("infinite_outside", false);
  return GapConfig(read_offset(j), read_numbers(j, "gaps"), inf_out);
}

AnchoredGapConfig anchored_from_json(const nlohmann::json& j) {
  if (!j.contains("x0")) fail(ErrorCode::InvalidConfig, "missing field 'x0'");
  return {read_number(j.at("x0")), gaps_from_json(j)};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) text_ += ',';
    text_ += header[k];
  }
  text_ += '\n';
}

CsvTable& CsvTable::cell(const std::string& v) {
  if (in_row_ == columns_) fail(ErrorCode::InvariantViolation, "CSV row has too many cells");
  if (in_row_++) text_ += ',';
  text_ += v;
  return *this;
}

CsvTable& CsvTable::cell(double v) { return cell(format_double(v)); }
CsvTable& CsvTable::cell(long v) { return cell(std::to_string(v)); }

void CsvTable::end_row() {
  if (in_row_ != columns_) fail(ErrorCode::InvariantViolation, "CSV row has too few cells");
  text_ += '\n';
  in_row_ = 0;
}

CsvTable trajectory_csv(const PathBundle& p) {
  CsvTable t({"time", "index", "value"});
  for (std::size_t s = 0; s < p.states.size(); ++s) {
    for (std::size_t k = 0; k < p.states[s].size(); ++k) {
      t.cell(p.times[s]).cell(p.offset + static_cast<long>(k)).cell(p.states[s][k]);
      t.end_row();
    }
  }
  return t;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Validation, "cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) fail(ErrorCode::Validation, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Validation, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace dysonflow
