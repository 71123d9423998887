#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bridgelab/characteristics.hpp"
#include "bridgelab/graph.hpp"
#include "bridgelab/synthesis.hpp"

namespace bridgelab {

inline constexpr const char* kVersion = "0.1.0";

/// IEEE double with 17 significant digits ("%.17g").
std::string format_double(double v);

/// Reads the whole file; throws ParseError when it cannot be opened.
std::string read_text_file(const std::string& path);

/// Write to path.tmp, then rename over path.
void write_file_atomic(const std::string& path, const std::string& content);

/// Whitespace-separated fields of each non-empty line; '#' starts a comment.
std::vector<std::vector<std::string>> tokenize_lines(const std::string& text);

/// One arc per line: "src dst".
DirectedGraph parse_graph(const std::string& text);
/// One rate per line: "src dst rate".
JumpIntensity parse_rates(const DirectedGraph& g, const std::string& text);
std::string format_rates(const DirectedGraph& g, const JumpIntensity& j);

/// Lines "edge x y value", "face x value" (lower-left corner label) and
/// "cycle ID value".
CharacteristicPrescription parse_prescription(const DirectedGraph& g, const std::string& text,
                                              PrescriptionDomain domain);
std::string format_prescription(const CharacteristicPrescription& p);

/// Flat "key = value" lines.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

/// CSV with a header row and LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  std::string str() const;
  size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace bridgelab
