#include <charconv>
#include <fstream>
#include <sstream>

#include "mimo/cli.hpp"

namespace mimo::cli {

namespace {

constexpr std::string_view kCurveHeader = "scheme,set,snr_db,channel_uses,bits_sent,bit_errors,ber";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidInput(std::string("bad ") + what + " field '" + std::string(s) + "'");
  }
  return v;
}

void append_row(std::string& out, const BerCurve& c, const BerPoint& p) {
  out += to_string(c.scheme);
  out += ',';
  out += c.set_name;
  out += ',';
  out += format_number(p.snr_db);
  out += ',';
  out += std::to_string(p.channel_uses);
  out += ',';
  out += std::to_string(p.bits_sent);
  out += ',';
  out += std::to_string(p.bit_errors);
  out += ',';
  out += format_number(p.ber);
}

}  // namespace

std::vector<double> parse_snr_grid(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw UsageError("--snr expects start:stop:step, got '" + std::string(spec) + "'");
  try {
    return snr_range(parse_field<double>(parts[0], "SNR start"),
                     parse_field<double>(parts[1], "SNR stop"),
                     parse_field<double>(parts[2], "SNR step"));
  } catch (const InvalidInput& e) {
    throw UsageError(std::string("--snr: ") + e.what());
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, ptr);
}

std::string curve_filename(Scheme scheme, std::string_view set_name) {
  return std::string(to_string(scheme)) + "_" + std::string(set_name) + ".csv";
}

std::string curve_csv(const BerCurve& curve) {
  std::string out(kCurveHeader);
  out += '\n';
  for (const BerPoint& p : curve.points) {
    append_row(out, curve, p);
    out += '\n';
  }
  return out;
}

std::string envelope_csv(const BerCurve& env) {
  std::string out(kCurveHeader);
  out += ",selected_set\n";
  for (std::size_t i = 0; i < env.points.size(); ++i) {
    append_row(out, env, env.points[i]);
    out += ',';
    out += i < env.selected_sets.size() ? env.selected_sets[i] : env.set_name;
    out += '\n';
  }
  return out;
}

std::string selection_csv(const BerCurve& sel, std::span<const ModulationSet> candidates) {
  std::string out(kCurveHeader);
  out += ",selections\n";
  for (const BerPoint& p : sel.points) {
    append_row(out, sel, p);
    out += ',';
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (i) out += ';';
      out += candidates[i].name;
      out += '=';
      out += std::to_string(i < p.set_selections.size() ? p.set_selections[i] : 0);
    }
    out += '\n';
  }
  return out;
}

BerCurve parse_curve_csv(std::string_view text) {
  BerCurve curve;
  bool header = true;
  for (std::string_view line : split(text, '\n')) {
    if (line.empty()) continue;
    if (header) {
      if (line.substr(0, kCurveHeader.size()) != kCurveHeader) {
        throw InvalidInput("curve CSV: unexpected header");
      }
      header = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() < 7) throw InvalidInput("curve CSV: short row");
    curve.scheme = parse_scheme(f[0]);
    curve.set_name = std::string(f[1]);
    BerPoint p;
    p.snr_db = parse_field<double>(f[2], "snr_db");
    p.channel_uses = parse_field<std::uint64_t>(f[3], "channel_uses");
    p.bits_sent = parse_field<std::uint64_t>(f[4], "bits_sent");
    p.bit_errors = parse_field<std::uint64_t>(f[5], "bit_errors");
    p.ber = p.bits_sent ? static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_sent) : 0.0;
    curve.points.push_back(std::move(p));
    if (f.size() > 7) curve.selected_sets.emplace_back(f[7]);
  }
  return curve;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace mimo::cli
