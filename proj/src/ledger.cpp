#include "homog/ledger.hpp"

#include <chrono>
#include <ctime>

namespace homog {

std::string module_version() { return HOMOG_VERSION; }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunLedger::RunLedger(const std::string& path, std::string config_hash)
    : path_(path), hash_(std::move(config_hash)), out_(path, std::ios::app) {
  if (!out_) throw std::runtime_error("cannot open ledger '" + path + "'");
}

nlohmann::json RunLedger::make_record(const std::string& type, const std::string& config_hash, Seed seed,
                                      nlohmann::json data, const std::string& timestamp) {
  nlohmann::json rec;
  rec["schema_version"] = ledger_schema_version;
  rec["type"] = type;
  rec["config_hash"] = config_hash;
  rec["seed"] = seed;
  rec["timestamp"] = timestamp;
  rec["version"] = module_version();
  rec["data"] = std::move(data);
  return rec;
}

void RunLedger::append(const std::string& type, Seed seed, nlohmann::json data) {
  const auto line = make_record(type, hash_, seed, std::move(data), utc_timestamp()).dump();
  std::lock_guard lock(mu_);
  out_ << line << '\n';
  out_.flush();
}

}  // namespace homog
