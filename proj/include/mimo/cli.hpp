#pragma once

// Command implementations behind the mimo_sim executable: CSV and manifest
// serialization, sweep/compare orchestration and the self-test report.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimo/errors.hpp"
#include "mimo/simkit.hpp"

namespace mimo::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr double kTargetBer = 1e-3;

/// Bad flag values; the message is meant for the terminal.
class UsageError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scheme;  // svd | qrs (sweep only)
  std::string set = "ALL";
  std::string snr = "0:24:1";
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string budget = "fast";
  std::filesystem::path out = ".";
  std::string selection = "oracle";  // compare only: oracle | expected
};

/// "start:stop:step" in dB, stop inclusive.
std::vector<double> parse_snr_grid(std::string_view spec);

/// Six significant digits, '.' decimal point regardless of locale.
std::string format_number(double v);

std::string curve_filename(Scheme scheme, std::string_view set_name);
std::string curve_csv(const BerCurve& curve);
std::string envelope_csv(const BerCurve& envelope);
/// Curve columns plus how often each candidate was chosen, "NAME=count;...".
std::string selection_csv(const BerCurve& selection, std::span<const ModulationSet> candidates);
BerCurve parse_curve_csv(std::string_view text);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

/// Flat key=value record written next to every run's outputs.
struct RunManifest {
  std::map<std::string, std::string> entries;

  std::string serialize() const;
  static RunManifest parse(std::string_view text);
  std::optional<std::string> get(const std::string& key) const;
};

RunManifest make_manifest(std::string_view command, const Options& opts);
/// Options recorded in a manifest; keys that are absent keep their defaults.
Options options_from_manifest(const RunManifest& m, Options base = {});

/// Config for one scheme derived from the flags.
SimConfig make_config(const Options& opts, Scheme scheme);

struct GapSummary {
  std::optional<double> svd_best_fixed;
  std::optional<double> qrs_best_fixed;
  // Per-realization selection curves; the gaps below are taken on these.
  std::optional<double> svd_selection;
  std::optional<double> qrs_selection;
  // Best fixed set per SNR point, reported alongside.
  std::optional<double> svd_envelope;
  std::optional<double> qrs_envelope;
  std::optional<double> svd_fixed_qam16;
  std::optional<double> qrs_fixed_qam16;
  std::string svd_best_set;
  std::string qrs_best_set;

  /// SVD best fixed minus QRS best fixed; positive means QRS is better.
  std::optional<double> fixed_gap() const;
  /// QRS selection minus SVD selection; positive means SVD is better.
  std::optional<double> envelope_gap() const;
  /// Fixed QAM16-QAM16 minus selection, per scheme.
  std::optional<double> svd_selection_gain() const;
  std::optional<double> qrs_selection_gain() const;
};

struct CompareReport {
  std::vector<BerCurve> svd_curves;
  std::vector<BerCurve> qrs_curves;
  BerCurve svd_best;
  BerCurve qrs_best;
  BerCurve svd_envelope;
  BerCurve qrs_envelope;
  BerCurve svd_selection;
  BerCurve qrs_selection;
  GapSummary gaps;
};

/// Set with the lowest SNR at the target BER; when none brackets it, the set
/// with the lowest BER at the highest SNR.
const BerCurve& best_fixed_curve(const std::vector<BerCurve>& curves, double target_ber);

CompareReport build_compare_report(std::vector<BerCurve> svd_curves,
                                   std::vector<BerCurve> qrs_curves, BerCurve svd_selection,
                                   BerCurve qrs_selection, double target_ber = kTargetBer);
std::string summary_csv(const GapSummary& g);
std::string summary_text(const GapSummary& g);

/// Runs (or reloads) both schemes' sweeps and assembles the comparison.
CompareReport run_compare(const Options& opts, std::ostream& log);

int cmd_sweep(const Options& opts, std::ostream& out);
int cmd_compare(const Options& opts, std::ostream& out);
int cmd_selftest(const Options& opts, std::ostream& out);

}  // namespace mimo::cli
