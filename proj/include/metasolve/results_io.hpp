#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "metrics.hpp"

namespace metasolve {

inline constexpr int kResultsSchemaVersion = 1;

// FNV-1a over the canonical (sorted-key) dump of a JSON value.
inline std::string config_hash64(const nlohmann::json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

struct ResultsHeader {
  int schema_version = kResultsSchemaVersion;
  std::string config_hash;
  std::string timestamp;
  std::string family;

  nlohmann::json to_json() const {
    return {{"record", "header"},
            {"schema_version", schema_version},
            {"config_hash", config_hash},
            {"timestamp", timestamp},
            {"family", family}};
  }

  static ResultsHeader from_json(const nlohmann::json& j) {
    ResultsHeader h;
    h.schema_version = j.at("schema_version").get<int>();
    h.config_hash = j.at("config_hash").get<std::string>();
    h.timestamp = j.at("timestamp").get<std::string>();
    h.family = j.value("family", "");
    if (h.schema_version != kResultsSchemaVersion)
      throw ConfigError("results: schema version " + std::to_string(h.schema_version) +
                        " unsupported (reader expects " +
                        std::to_string(kResultsSchemaVersion) + ")");
    return h;
  }
};

inline nlohmann::json record_to_json(const PerformanceRecord& r) {
  return {{"record", "perf"},
          {"solver_id", r.solver_id},
          {"family", std::string(to_string(r.family))},
          {"converged", r.converged},
          {"time_s", r.time_s},
          {"rel_error", r.rel_error},
          {"iterations", r.iterations},
          {"conv_rate", r.conv_rate},
          {"memory_bytes", r.memory_bytes},
          {"macs", r.macs},
          {"training_time_s", r.training_time_s},
          {"config", r.config}};
}

inline PerformanceRecord record_from_json(const nlohmann::json& j) {
  PerformanceRecord r;
  r.solver_id = j.at("solver_id").get<std::string>();
  r.family = family_from_string(j.at("family").get<std::string>());
  r.converged = j.at("converged").get<bool>();
  r.time_s = j.at("time_s").get<double>();
  r.rel_error = j.at("rel_error").get<double>();
  r.iterations = j.at("iterations").get<std::uint64_t>();
  r.conv_rate = j.at("conv_rate").get<double>();
  r.memory_bytes = j.at("memory_bytes").get<double>();
  r.macs = j.at("macs").get<std::uint64_t>();
  r.training_time_s = j.at("training_time_s").get<double>();
  r.config = j.value("config", nlohmann::json::object());
  return r;
}

struct ResultsFile {
  ResultsHeader header;
  std::vector<PerformanceRecord> records;
};

// One JSON object per line, header first; append-safe for long sweeps.
class ResultsWriter {
 public:
  ResultsWriter(const std::string& path, const ResultsHeader& header) : out_(path) {
    if (!out_) throw ConfigError("results: cannot open '" + path + "' for writing");
    out_ << header.to_json().dump() << '\n';
  }

  void write(const PerformanceRecord& r) {
    out_ << record_to_json(r).dump() << '\n';
    if (!out_) throw Error("results: write failed");
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

inline void write_results(const std::string& path, const ResultsHeader& header,
                          const std::vector<PerformanceRecord>& records) {
  ResultsWriter w(path, header);
  for (const auto& r : records) w.write(r);
}

inline ResultsFile read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("results: cannot open '" + path + "'");
  ResultsFile rf;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("results: '" + path + "' line " + std::to_string(lineno) +
                        ": " + e.what());
    }
    const std::string kind = j.value("record", "");
    if (!have_header) {
      if (kind != "header")
        throw ConfigError("results: '" + path + "' does not start with a header record");
      rf.header = ResultsHeader::from_json(j);
      have_header = true;
    } else if (kind == "perf") {
      rf.records.push_back(record_from_json(j));
    } else {
      throw ConfigError("results: '" + path + "' line " + std::to_string(lineno) +
                        ": unknown record kind '" + kind + "'");
    }
  }
  if (!have_header) throw ConfigError("results: '" + path + "' is empty");
  return rf;
}

}  // namespace metasolve
