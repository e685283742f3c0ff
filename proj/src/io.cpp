#include "isoband/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace isoband {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Yields (line number, trimmed content) for non-blank, non-comment lines.
template <typename Fn>
void for_each_record(std::istream& in, Fn fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    fn(number, t);
  }
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

// The double parse accepts numbers only; the header check is case-sensitive.
std::vector<std::vector<double>> read_numeric_csv(std::istream& in,
                                                  const std::vector<std::string>& header) {
  std::vector<std::vector<double>> rows;
  bool seen_header = false;
  for_each_record(in, [&](std::size_t number, const std::string& line) {
    const auto fields = split_fields(line);
    if (!seen_header) {
      if (fields != header) {
        std::string expected;
        for (std::size_t i = 0; i < header.size(); ++i) expected += (i ? "," : "") + header[i];
        throw DataError(at_line(number) + "expected header '" + expected + "'");
      }
      seen_header = true;
      return;
    }
    if (fields.size() != header.size()) {
      throw DataError(at_line(number) + "expected " + std::to_string(header.size()) + " fields");
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      try {
        row.push_back(parse_double(f));
      } catch (const DataError& e) {
        throw DataError(at_line(number) + e.what());
      }
    }
    rows.push_back(std::move(row));
  });
  if (!seen_header) throw DataError("missing header line");
  return rows;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return format_double(v);
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

ordered_json spec_json(const ScenarioSpec& s) {
  ordered_json j;
  j["name"] = s.name;
  j["n"] = s.n;
  j["design"] = to_string(s.design);
  j["x_min"] = s.x_min;
  j["x_max"] = s.x_max;
  j["curve"] = to_string(s.curve);
  j["noise"] = to_string(s.noise);
  j["noise_scale"] = s.noise_scale;
  j["scale_family"] = s.scale_family;
  j["replicates"] = s.replicates;
  j["data_process"] = "invented synthetic catalog";
  return j;
}

ordered_json common_fields(const ScenarioSpec& s, double kappa, double runtime_ms) {
  ordered_json j;
  j["gamma"] = s.gamma;
  j["alpha"] = s.alpha;
  j["kappa"] = kappa;
  j["method"] = method_name(s.method);
  const auto* mc = std::get_if<MonteCarlo>(&s.method);
  j["reps"] = mc ? mc->reps : 0;
  j["seed"] = s.seed;
  j["family"] = to_string(s.rule.kind);
  j["cap"] = to_string(s.rule.cap);
  j["n"] = s.n;
  j["runtime_ms"] = runtime_ms;
  return j;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  double v = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (t.empty() || res.ec != std::errc() || res.ptr != end || std::isnan(v)) {
    throw DataError("not a number: '" + t + "'");
  }
  return v;
}

std::vector<Observation> read_xy_csv(std::istream& in) {
  std::vector<Observation> out;
  for (const auto& row : read_numeric_csv(in, {"x", "y"})) {
    if (!std::isfinite(row[0]) || !std::isfinite(row[1])) {
      throw DataError("data values must be finite");
    }
    out.push_back({row[0], row[1]});
  }
  if (out.empty()) throw DataError("no observations");
  return out;
}

Dataset read_dataset(const std::string& path) {
  auto in = open_input(path);
  try {
    return Dataset(read_xy_csv(in));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

BandTable to_table(const ConfidenceBand& band) { return {band.grid.z, band.lower, band.upper}; }

BandTable to_table(const Grid& grid, const SShapeRefinement& refinement) {
  return {grid.z, refinement.lower_refined, refinement.upper_refined};
}

void write_band_csv(std::ostream& out, const BandTable& table) {
  out << "z,lower,upper\n";
  for (std::size_t j = 0; j < table.z.size(); ++j) {
    out << format_double(table.z[j]) << ',' << format_double(table.lower[j]) << ','
        << format_double(table.upper[j]) << '\n';
  }
}

BandTable read_band_csv(std::istream& in) {
  BandTable table;
  for (const auto& row : read_numeric_csv(in, {"z", "lower", "upper"})) {
    if (!std::isfinite(row[0])) throw DataError("grid values must be finite");
    if (!table.z.empty() && !(row[0] > table.z.back())) {
      throw DataError("grid values must be strictly increasing");
    }
    table.z.push_back(row[0]);
    table.lower.push_back(row[1]);
    table.upper.push_back(row[2]);
  }
  if (table.z.empty()) throw DataError("band table is empty");
  return table;
}

BandTable read_band_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_band_csv(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

ConfidenceBand to_band(const BandTable& table) {
  ConfidenceBand band;
  band.grid.z = table.z;
  band.grid.prefix.resize(table.z.size() + 1);
  for (std::size_t j = 0; j <= table.z.size(); ++j) band.grid.prefix[j] = j;
  band.lower = table.lower;
  band.upper = table.upper;
  return band;
}

std::string metadata_json(const RunMetadata& m, const std::string& extra) {
  ordered_json j;
  j["gamma"] = m.gamma;
  j["alpha"] = m.alpha;
  j["kappa"] = m.kappa;
  j["method"] = m.method;
  j["reps"] = m.reps;
  j["seed"] = m.seed;
  j["family"] = m.family;
  j["cap"] = m.cap;
  j["n"] = m.n;
  j["n_distinct"] = m.n_distinct;
  j["family_size"] = m.family_size;
  j["crossing_flag"] = m.crossing_flag;
  j["runtime_ms"] = m.runtime_ms;
  const auto more = ordered_json::parse(extra);
  for (auto it = more.begin(); it != more.end(); ++it) j[it.key()] = it.value();
  return j.dump(2) + "\n";
}

KappaMethod parse_kappa_spec(const std::string& spec, std::uint64_t seed) {
  if (spec == "bonferroni") return Bonferroni{};
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "mc" && !tail.empty()) {
    std::uint64_t reps = 0;
    const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), reps);
    if (res.ec != std::errc() || res.ptr != tail.data() + tail.size() || reps < 1) {
      throw std::invalid_argument("bad replication count in '" + spec + "'");
    }
    return MonteCarlo{reps, seed};
  }
  if (head == "fixed" && !tail.empty()) {
    double v = 0.0;
    try {
      v = parse_double(tail);
    } catch (const DataError&) {
      throw std::invalid_argument("bad kappa value in '" + spec + "'");
    }
    if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("fixed kappa must lie in (0, 1]");
    return FixedKappa{v};
  }
  throw std::invalid_argument("kappa must be bonferroni, mc:<reps> or fixed:<value>, got '" + spec + "'");
}

InflectionGrid parse_mu_grid(const std::string& spec, const Grid& grid) {
  if (spec.empty() || spec == "midpoints") return InflectionGrid::midpoints(grid);
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
  InflectionGrid out;
  if (head == "uniform" && !tail.empty()) {
    std::size_t k = 0;
    const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), k);
    if (res.ec != std::errc() || res.ptr != tail.data() + tail.size() || k < 1) {
      throw std::invalid_argument("bad point count in '" + spec + "'");
    }
    out.points.push_back(-kInf);
    const double a = grid.z.front();
    const double b = grid.z.back();
    for (std::size_t i = 0; i < k; ++i) {
      out.points.push_back(k == 1 ? 0.5 * (a + b)
                                  : a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1));
    }
    out.points.push_back(kInf);
    return out;
  }
  if (head == "list" && !tail.empty()) {
    std::istringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.points.push_back(parse_double(item));
      } catch (const DataError&) {
        throw std::invalid_argument("bad inflection point '" + item + "'");
      }
    }
    std::sort(out.points.begin(), out.points.end());
    out.points.erase(std::unique(out.points.begin(), out.points.end()), out.points.end());
    if (out.points.empty()) throw std::invalid_argument("empty inflection list");
    return out;
  }
  throw std::invalid_argument("mu grid must be midpoints, uniform:<k> or list:<values>, got '" + spec + "'");
}

std::vector<ScenarioEntry> parse_scenarios(const std::string& json_text) {
  std::vector<ScenarioEntry> out;
  try {
    const json doc = json::parse(json_text);
    if (!doc.is_object() || !doc.contains("scenarios") || !doc.at("scenarios").is_array()) {
      throw DataError("scenario file needs a \"scenarios\" array");
    }
    for (const auto& item : doc.at("scenarios")) {
      ScenarioEntry e;
      ScenarioSpec& s = e.spec;
      s.name = get_or<std::string>(item, "name", s.name);
      s.n = get_or<std::size_t>(item, "n", s.n);
      s.design = parse_design(get_or<std::string>(item, "design", to_string(s.design)));
      s.x_min = get_or<double>(item, "x_min", s.x_min);
      s.x_max = get_or<double>(item, "x_max", s.x_max);
      s.curve = parse_curve(get_or<std::string>(item, "curve", to_string(s.curve)));
      s.noise = parse_noise(get_or<std::string>(item, "noise", to_string(s.noise)));
      s.noise_scale = get_or<double>(item, "noise_scale", s.noise_scale);
      s.scale_family = get_or<bool>(item, "scale_family", s.scale_family);
      s.gamma = get_or<double>(item, "gamma", s.gamma);
      s.alpha = get_or<double>(item, "alpha", s.alpha);
      s.rule.kind = parse_rule_kind(get_or<std::string>(item, "family", "triangular"));
      s.rule.cap = parse_cap(get_or<std::string>(item, "cap", "half"));
      s.replicates = get_or<std::uint64_t>(item, "replicates", s.replicates);
      s.seed = get_or<std::uint64_t>(item, "seed", s.seed);
      s.method = parse_kappa_spec(get_or<std::string>(item, "kappa", "bonferroni"), s.seed);
      e.ns = get_or<std::vector<std::size_t>>(item, "ns", {});
      s.validate();
      out.push_back(std::move(e));
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("scenario file: ") + e.what());
  }
  return out;
}

std::string report_json(const CoverageReport& r) {
  ordered_json j = common_fields(r.spec, r.kappa, r.runtime_ms);
  j["scenario"] = spec_json(r.spec);
  j["covered"] = r.covered;
  j["coverage"] = r.coverage;
  j["standard_error"] = r.standard_error;
  j["median_central_width"] = finite_or_string(r.median_central_width);
  j["mean_finite_width"] = finite_or_string(r.mean_finite_width);
  return j.dump(2);
}

std::string report_json(const RateReport& r) {
  ordered_json j = common_fields(r.spec, std::numeric_limits<double>::quiet_NaN(), r.runtime_ms);
  j["kappa"] = nullptr;
  j.erase("n");
  j["scenario"] = spec_json(r.spec);
  j["scenario"].erase("n");
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json o;
    o["n"] = row.n;
    o["median_central_width"] = finite_or_string(row.median_central_width);
    o["median_edge_width"] = finite_or_string(row.median_edge_width);
    o["median_crossing_window"] = finite_or_string(row.median_crossing_window);
    rows.push_back(o);
  }
  j["rows"] = rows;
  j["log_width_slope"] = finite_or_string(r.log_width_slope);
  j["reference_slope"] = 1.0 / 3.0;
  return j.dump(2);
}

std::string reports_json(const std::vector<std::string>& docs) {
  ordered_json j;
  j["reports"] = ordered_json::array();
  for (const auto& d : docs) j["reports"].push_back(ordered_json::parse(d));
  return j.dump(2) + "\n";
}

}  // namespace isoband
