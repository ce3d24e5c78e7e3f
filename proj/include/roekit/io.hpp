#pragma once

// CSV tables with '#' metadata lines and JSON views of the result types.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "roekit/lorentz.hpp"
#include "roekit/roe.hpp"
#include "roekit/space.hpp"
#include "roekit/spherical.hpp"

namespace roekit {

/// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Shortest round-trip decimal form, so identical inputs give identical bytes.
std::string format_number(double v);

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

/// Writes text to path; throws IoError if the file cannot be opened.
void write_text(const std::string& path, const std::string& text);

nlohmann::json to_json(const SpaceParams& space);
nlohmann::json to_json(cplx z);
nlohmann::json to_json(const CFit& fit);
nlohmann::json to_json(const LorentzEstimate& est);
nlohmann::json to_json(const RoeReport& rep);

}  // namespace roekit
