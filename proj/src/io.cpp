#include "roekit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace roekit {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, p);
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  for (const auto& [k, v] : table.meta) out << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::invalid_argument("to_csv: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  return out.str();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      auto key = line.substr(1, colon - 1);
      auto val = line.substr(colon + 1);
      key.erase(0, key.find_first_not_of(' '));
      val.erase(0, val.find_first_not_of(' '));
      t.meta.emplace_back(key, val);
    } else if (!have_header) {
      t.header = split(line);
      have_header = true;
    } else {
      std::vector<double> row;
      for (const auto& c : split(line)) row.push_back(std::stod(c));
      if (row.size() != t.header.size()) throw std::invalid_argument("parse_csv: ragged row");
      t.rows.push_back(std::move(row));
    }
  }
  if (!have_header) throw std::invalid_argument("parse_csv: no header row");
  return t;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

nlohmann::json to_json(const SpaceParams& s) {
  return {{"label", s.label()},
          {"normalization", s.normalization() == Normalization::Symmetric ? "sym" : "dr"},
          {"rho", s.rho()},
          {"Q", s.Q()},
          {"dim", s.dim()}};
}

nlohmann::json to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json to_json(const CFit& fit) {
  return {{"lambda", fit.lambda},
          {"c_plus", to_json(fit.c_plus)},
          {"c_minus", to_json(fit.c_minus)},
          {"fit_window", {fit.fit_window.first, fit.fit_window.second}},
          {"decay_window", {fit.decay_window.first, fit.decay_window.second}},
          {"residual_decay_rate", fit.residual_decay_rate},
          {"condition", fit.condition},
          {"correction_orders", fit.correction_orders}};
}

nlohmann::json to_json(const LorentzEstimate& est) {
  nlohmann::json seq = nlohmann::json::array();
  for (const auto& [R, v] : est.sequence) seq.push_back({R, v});
  return {{"p", est.p},
          {"q", std::isinf(est.q) ? nlohmann::json("inf") : nlohmann::json(est.q)},
          {"truncation_R", est.truncation_R},
          {"value", est.value},
          {"tail_slope", std::isinf(est.tail_slope) ? nlohmann::json("inf") : nlohmann::json(est.tail_slope)},
          {"sequence", seq}};
}

nlohmann::json to_json(const RoeReport& rep) {
  return {{"z", to_json(rep.z)},
          {"k_range", {rep.k_min, rep.k_max}},
          {"norm_kind", to_string(rep.norm_kind)},
          {"truncation_R", rep.truncation_R},
          {"per_k_values", rep.per_k_values},
          {"per_k_half_truncation", rep.per_k_half},
          {"bound_M", rep.bound_M},
          {"spread", std::isinf(rep.spread) ? nlohmann::json("inf") : nlohmann::json(rep.spread)},
          {"growth", std::isinf(rep.growth) ? nlohmann::json("inf") : nlohmann::json(rep.growth)},
          {"truncation_drift", rep.truncation_drift},
          {"bounded", rep.bounded},
          {"eigen_residual", rep.eigen_residual},
          {"verdict", to_string(rep.verdict)},
          {"theorem_tag", rep.theorem_tag},
          {"consistent", rep.consistent}};
}

}  // namespace roekit
