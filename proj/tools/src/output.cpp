#include "qflqg/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "qflqg/linalg.hpp"

namespace qflqg::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const RunStamp& stamp, std::vector<std::string> header) {
  text_ = "# qflqg command=" + stamp.command + " seed=" + std::to_string(stamp.seed) +
          " config_hash=" + stamp.config_hash + "\n";
  for (const std::string& h : header) cell(h);
  end_row();
}

void CsvWriter::separator() {
  if (row_open_) text_ += ',';
  row_open_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  text_ += format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  separator();
  text_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  separator();
  text_ += v;
  return *this;
}

CsvWriter& CsvWriter::empty(std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) separator();
  return *this;
}

CsvWriter& CsvWriter::cells(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) cell(m(i, j));
  }
  return *this;
}

void CsvWriter::end_row() {
  text_ += '\n';
  row_open_ = false;
}

void CsvWriter::save(const std::filesystem::path& path) const { write_text(path, text_); }

nlohmann::ordered_json stamped_json(const RunStamp& stamp) {
  nlohmann::ordered_json doc;
  doc["command"] = stamp.command;
  doc["seed"] = stamp.seed;
  doc["config_hash"] = stamp.config_hash;
  return doc;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

std::vector<std::string> matrix_columns(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out.push_back(name + "_" + std::to_string(i) + "_" + std::to_string(j));
  }
  return out;
}

}  // namespace qflqg::cli
