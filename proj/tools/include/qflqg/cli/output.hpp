#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qflqg/linalg.hpp"

namespace qflqg::cli {

/// Shortest decimal form with 17 significant digits, e.g. 0.15915494309189535.
std::string format_double(double v);

/// Identity stamped on every output file.
struct RunStamp {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Line-oriented CSV writer.  The first line is a comment carrying the stamp.
class CsvWriter {
 public:
  CsvWriter(const RunStamp& stamp, std::vector<std::string> header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& v);
  CsvWriter& empty(std::size_t count = 1);
  CsvWriter& cells(const Matrix& m);  // row-major
  void end_row();

  const std::string& text() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  void separator();
  std::string text_;
  bool row_open_ = false;
};

/// JSON document with "seed" and "config_hash" fields first.
nlohmann::ordered_json stamped_json(const RunStamp& stamp);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Column names name_i_j for a rows x cols matrix, row-major.
std::vector<std::string> matrix_columns(const std::string& name, Eigen::Index rows, Eigen::Index cols);

}  // namespace qflqg::cli
