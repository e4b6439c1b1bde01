#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wateralign/cli.hpp"
#include "wateralign/errors.hpp"

namespace wateralign::cli {

namespace {

using ensemble::AlignmentTrace;
using ensemble::IsomerSeries;
using rotor::SpinIsomer;

void put(std::string& line, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.12g", v);
  line.push_back(',');
  line.append(buf, static_cast<std::size_t>(n));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double to_double(const std::string& cell, std::size_t row) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || end != cell.data() + cell.size()) {
    throw ConfigError("CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

void write_csv(const AlignmentTrace& trace, std::ostream& out) {
  const IsomerSeries* para = trace.find(SpinIsomer::Para);
  const IsomerSeries* ortho = trace.find(SpinIsomer::Ortho);
  std::string header = "time_ps";
  if (para != nullptr) header += ",cos2_para";
  if (ortho != nullptr) header += ",cos2_ortho";
  if (para != nullptr) header += ",e_para_cm1";
  if (ortho != nullptr) header += ",e_ortho_cm1";
  out << header << '\n';
  std::string line;
  for (std::size_t i = 0; i < trace.time_ps.size(); ++i) {
    line.clear();
    char buf[32];
    line.append(buf, static_cast<std::size_t>(std::snprintf(buf, sizeof buf, "%.12g", trace.time_ps[i])));
    if (para != nullptr) put(line, para->cos2[i]);
    if (ortho != nullptr) put(line, ortho->cos2[i]);
    if (para != nullptr) put(line, para->energy[i]);
    if (ortho != nullptr) put(line, ortho->energy[i]);
    out << line << '\n';
  }
}

void write_csv(const AlignmentTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  write_csv(trace, out);
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

AlignmentTrace read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV: missing header");
  const auto header = split(line);
  if (header.empty() || header.front() != "time_ps") throw ConfigError("CSV: header must start with time_ps");

  AlignmentTrace trace;
  std::vector<std::vector<double>*> targets(header.size(), nullptr);
  auto series_for = [&](SpinIsomer isomer) -> IsomerSeries& {
    for (auto& s : trace.series)
      if (s.isomer == isomer) return s;
    trace.series.push_back(IsomerSeries{isomer, {}, {}, {}});
    return trace.series.back();
  };
  // All series exist before any column pointer is taken.
  for (const auto& name : header) {
    if (name == "cos2_para" || name == "e_para_cm1") series_for(SpinIsomer::Para);
    if (name == "cos2_ortho" || name == "e_ortho_cm1") series_for(SpinIsomer::Ortho);
  }
  targets[0] = &trace.time_ps;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& name = header[c];
    if (name == "cos2_para") targets[c] = &series_for(SpinIsomer::Para).cos2;
    else if (name == "cos2_ortho") targets[c] = &series_for(SpinIsomer::Ortho).cos2;
    else if (name == "e_para_cm1") targets[c] = &series_for(SpinIsomer::Para).energy;
    else if (name == "e_ortho_cm1") targets[c] = &series_for(SpinIsomer::Ortho).energy;
    else throw ConfigError("CSV: unknown column '" + name + "'");
  }

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw ConfigError("CSV row " + std::to_string(row) + ": wrong column count");
    for (std::size_t c = 0; c < cells.size(); ++c) targets[c]->push_back(to_double(cells[c], row));
  }
  return trace;
}

AlignmentTrace read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  return read_csv(in);
}

void write_scan_csv(const ScanResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "delay_ps,"
      << (result.objective == ScanObjective::OrthoEnergySuppression ? "ortho_energy_suppression_cm1"
                                                                   : "alignment_contrast")
      << '\n';
  char buf[64];
  for (std::size_t i = 0; i < result.delays.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", result.delays[i], result.values[i]);
    out << buf;
  }
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

std::filesystem::path summary_path_for(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".summary.json");
  return p;
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace wateralign::cli
