#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "isoband/band.hpp"
#include "isoband/calibrate.hpp"
#include "isoband/design.hpp"
#include "isoband/simulate.hpp"
#include "isoband/sshape.hpp"

namespace isoband {

/// Malformed or unusable input data (maps to exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form; infinities as "inf" / "-inf".
std::string format_double(double v);

/// Parses a decimal real, "inf" or "-inf". Throws DataError on anything else.
double parse_double(const std::string& text);

/// Reads `x,y` CSV: a header line "x,y", then one pair per line. Lines whose
/// first non-blank character is '#' and blank lines are skipped.
std::vector<Observation> read_xy_csv(std::istream& in);
Dataset read_dataset(const std::string& path);

struct BandTable {
  std::vector<double> z;
  std::vector<double> lower;
  std::vector<double> upper;
};

BandTable to_table(const ConfidenceBand& band);
BandTable to_table(const Grid& grid, const SShapeRefinement& refinement);

/// CSV with header `z,lower,upper`.
void write_band_csv(std::ostream& out, const BandTable& table);
BandTable read_band_csv(std::istream& in);
BandTable read_band_file(const std::string& path);

/// Band over the table's grid with the usual step conventions.
ConfidenceBand to_band(const BandTable& table);

struct RunMetadata {
  double gamma = 0.5;
  double alpha = 0.05;
  double kappa = 1.0;
  std::string method;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::string family;
  std::string cap;
  std::size_t n = 0;
  std::size_t n_distinct = 0;
  std::size_t family_size = 0;
  bool crossing_flag = false;
  double runtime_ms = 0.0;
};

/// Pretty-printed JSON object with the metadata fields, plus any `extra`
/// members given as a serialized JSON object.
std::string metadata_json(const RunMetadata& meta, const std::string& extra = "{}");

/// "bonferroni", "mc:<reps>" or "fixed:<value>". Throws std::invalid_argument.
KappaMethod parse_kappa_spec(const std::string& spec, std::uint64_t seed);

/// "midpoints" (default grid), "uniform:<k>" (k equispaced points across the
/// grid range, plus both sentinels) or "list:<v1>,<v2>,..." (inf allowed).
InflectionGrid parse_mu_grid(const std::string& spec, const Grid& grid);

/// One entry of a scenario file. A non-empty `ns` requests a rate diagnostic
/// over those sample sizes instead of a coverage run.
struct ScenarioEntry {
  ScenarioSpec spec;
  std::vector<std::size_t> ns;
};

/// Scenario file: {"scenarios": [{...}, ...]}. Keys mirror ScenarioSpec
/// fields; "family", "cap" and "kappa" take the CLI spellings. Throws
/// DataError on malformed documents.
std::vector<ScenarioEntry> parse_scenarios(const std::string& json_text);

std::string report_json(const CoverageReport& report);
std::string report_json(const RateReport& report);
std::string reports_json(const std::vector<std::string>& report_documents);

}  // namespace isoband
