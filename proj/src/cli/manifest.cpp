#include <charconv>
#include <chrono>
#include <ctime>

#include "mimo/cli.hpp"

namespace mimo::cli {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename T>
T parse_unsigned(const std::string& s, const char* key) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw UsageError(std::string("manifest: bad value for ") + key + ": '" + s + "'");
  }
  return v;
}

}  // namespace

std::string RunManifest::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

RunManifest RunManifest::parse(std::string_view text) {
  RunManifest m;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidInput("manifest: line without '=': " + std::string(line));
    }
    m.entries[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  return m;
}

std::optional<std::string> RunManifest::get(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

RunManifest make_manifest(std::string_view command, const Options& opts) {
  RunManifest m;
  m.entries["tool_version"] = std::string(kToolVersion);
  m.entries["command"] = std::string(command);
  m.entries["scheme"] = opts.scheme;
  m.entries["set"] = opts.set;
  m.entries["snr"] = opts.snr;
  m.entries["seed"] = std::to_string(opts.seed);
  m.entries["workers"] = std::to_string(opts.workers);
  m.entries["budget"] = opts.budget;
  if (command == "compare") m.entries["selection"] = opts.selection;
  const StoppingRule stop = stopping_rule(parse_budget(opts.budget));
  m.entries["min_bit_errors"] = std::to_string(stop.min_bit_errors);
  m.entries["max_channel_uses"] = std::to_string(stop.max_channel_uses);
  m.entries["timestamp"] = utc_timestamp();
  return m;
}

Options options_from_manifest(const RunManifest& m, Options base) {
  if (auto v = m.get("scheme")) base.scheme = *v;
  if (auto v = m.get("set")) base.set = *v;
  if (auto v = m.get("snr")) base.snr = *v;
  if (auto v = m.get("seed")) base.seed = parse_unsigned<std::uint64_t>(*v, "seed");
  if (auto v = m.get("workers")) base.workers = parse_unsigned<unsigned>(*v, "workers");
  if (auto v = m.get("budget")) base.budget = *v;
  if (auto v = m.get("selection")) base.selection = *v;
  return base;
}

}  // namespace mimo::cli
