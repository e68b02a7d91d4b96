#pragma once

#include <fstream>
#include <mutex>
#include <string>

#include <json.hpp>

#include "homog/grid.hpp"

namespace homog {

inline constexpr int ledger_schema_version = 1;

/// Append-only JSON-lines ledger. Every line carries the schema version,
/// record type, config hash, cell seed, UTC timestamp and module version.
class RunLedger {
 public:
  RunLedger() = default;
  RunLedger(const std::string& path, std::string config_hash);

  bool is_open() const { return out_.is_open(); }
  const std::string& path() const { return path_; }

  void append(const std::string& type, Seed seed, nlohmann::json data);

  /// Records with the timestamp left out, for in-memory comparison.
  static nlohmann::json make_record(const std::string& type, const std::string& config_hash, Seed seed,
                                    nlohmann::json data, const std::string& timestamp);

 private:
  std::string path_;
  std::string hash_;
  std::ofstream out_;
  std::mutex mu_;
};

std::string utc_timestamp();
std::string module_version();

}  // namespace homog
