#include "bridgelab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bridgelab/error.hpp"

namespace bridgelab {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::ParseError, "write failed for '" + tmp + "'");
  }
  fs::rename(tmp, target);
}

std::vector<std::vector<std::string>> tokenize_lines(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> row;
    for (std::string f; fields >> f;) row.push_back(f);
    if (!row.empty()) out.push_back(std::move(row));
  }
  return out;
}

namespace {

double parse_number(const std::string& s, const std::string& context) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad number '" + s + "' in " + context);
  }
}

[[noreturn]] void bad_line(const std::vector<std::string>& row, const char* expect) {
  std::string text;
  for (const auto& f : row) text += (text.empty() ? "" : " ") + f;
  throw Error(ErrorCode::ParseError, "expected " + std::string(expect) + ", got '" + text + "'");
}

}  // namespace

DirectedGraph parse_graph(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> arcs;
  for (const auto& row : tokenize_lines(text)) {
    if (row.size() != 2) bad_line(row, "'src dst'");
    arcs.emplace_back(row[0], row[1]);
  }
  return DirectedGraph::from_arcs(arcs);
}

JumpIntensity parse_rates(const DirectedGraph& g, const std::string& text) {
  JumpIntensity j(g);
  for (const auto& row : tokenize_lines(text)) {
    if (row.size() != 3) bad_line(row, "'src dst rate'");
    int a = g.arc_id(g.vertex(row[0]), g.vertex(row[1]));
    if (a < 0) throw Error(ErrorCode::ParseError, "no arc " + row[0] + " -> " + row[1]);
    j.set(a, parse_number(row[2], "rates"));
  }
  for (int a = 0; a < g.num_arcs(); ++a)
    if (!j.has(a))
      throw Error(ErrorCode::MissingRate, "no rate for " + g.label(g.arc_source(a)) + " -> " +
                                              g.label(g.arc_target(a)));
  j.speed = detect_speed(g, j);
  return j;
}

std::string format_rates(const DirectedGraph& g, const JumpIntensity& j) {
  std::string out;
  for (int a = 0; a < g.num_arcs(); ++a)
    out += g.label(g.arc_source(a)) + " " + g.label(g.arc_target(a)) + " " +
           format_double(j.at(a)) + "\n";
  return out;
}

CharacteristicPrescription parse_prescription(const DirectedGraph& g, const std::string& text,
                                              PrescriptionDomain domain) {
  CharacteristicPrescription p;
  p.domain = domain;
  for (const auto& row : tokenize_lines(text)) {
    if (row[0] == "edge" && row.size() == 4) {
      p.values[two_cycle_id(g, g.vertex(row[1]), g.vertex(row[2]))] =
          parse_number(row[3], "prescription");
    } else if (row[0] == "face" && row.size() == 3) {
      g.vertex(row[1]);
      p.values["f:" + row[1]] = parse_number(row[2], "prescription");
    } else if (row[0] == "cycle" && row.size() == 3) {
      p.values[row[1]] = parse_number(row[2], "prescription");
    } else {
      bad_line(row, "'edge x y value', 'face x value' or 'cycle ID value'");
    }
  }
  return p;
}

std::string format_prescription(const CharacteristicPrescription& p) {
  std::string out;
  for (const auto& [id, v] : p.values) {
    if (id.rfind("e:", 0) == 0) {
      auto bar = id.find('|');
      out += "edge " + id.substr(2, bar - 2) + " " + id.substr(bar + 1);
    } else if (id.rfind("f:", 0) == 0) {
      out += "face " + id.substr(2);
    } else {
      out += "cycle " + id;
    }
    out += " " + format_double(v) + "\n";
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
  };
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "config line without '=': " + line);
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::ParseError, "config line without key: " + line);
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size())
    throw Error(ErrorCode::DomainError, "CSV row width differs from the header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  for (size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += "\n";
  }
  return out;
}

}  // namespace bridgelab
