#include <algorithm>
#include <ostream>

#include "mimo/cli.hpp"
#include "mimo/selftest.hpp"

namespace mimo::cli {

namespace {

namespace fs = std::filesystem;

Scheme scheme_flag(const std::string& s) {
  if (s.empty()) throw UsageError("--scheme is required (svd or qrs)");
  try {
    return parse_scheme(s);
  } catch (const InvalidInput&) {
    throw UsageError("invalid --scheme '" + s + "' (expected svd or qrs)");
  }
}

void check_set_flag(Scheme scheme, const std::string& set) {
  if (set == "ALL" || in_catalog(scheme, set)) return;
  throw UsageError("invalid --set '" + set + "' for scheme " + std::string(to_string(scheme)) +
                   "; valid sets: ALL, " + catalog_listing(scheme));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

std::string manifest_name(std::string_view command, Scheme s) {
  return "manifest_" + std::string(command) + "_" + std::string(to_string(s)) + ".txt";
}

// Writes one CSV per curve plus the sweep manifest; returns written paths.
std::vector<fs::path> write_sweep(const Options& opts, Scheme scheme,
                                  const std::vector<BerCurve>& curves) {
  std::vector<fs::path> paths;
  RunManifest m = make_manifest("sweep", opts);
  m.entries["scheme"] = std::string(to_string(scheme));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const fs::path p = opts.out / curve_filename(scheme, curves[i].set_name);
    write_text_file(p, curve_csv(curves[i]));
    m.entries["output." + std::to_string(i)] = p.filename().string();
    paths.push_back(p);
  }
  write_text_file(opts.out / manifest_name("sweep", scheme), m.serialize());
  return paths;
}

// Curves from an earlier `sweep --set ALL` with identical settings, if present.
std::optional<std::vector<BerCurve>> reuse_sweep(const Options& opts, Scheme scheme) {
  const fs::path mpath = opts.out / manifest_name("sweep", scheme);
  if (!fs::exists(mpath)) return std::nullopt;
  try {
    const RunManifest m = RunManifest::parse(read_text_file(mpath));
    const RunManifest want = make_manifest("sweep", opts);
    for (const char* key : {"tool_version", "snr", "seed", "workers", "budget"}) {
      if (m.get(key) != want.get(key)) return std::nullopt;
    }
    if (m.get("set") != std::optional<std::string>("ALL")) return std::nullopt;
    std::vector<BerCurve> curves;
    for (const ModulationSet& set : catalog(scheme)) {
      const fs::path p = opts.out / curve_filename(scheme, set.name);
      if (!fs::exists(p)) return std::nullopt;
      curves.push_back(parse_curve_csv(read_text_file(p)));
    }
    return curves;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string entry(std::optional<double> v) { return v ? format_number(*v) : "not bracketed"; }

std::optional<double> diff(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

const BerCurve* find_curve(const std::vector<BerCurve>& curves, std::string_view name) {
  for (const BerCurve& c : curves)
    if (c.set_name == name) return &c;
  return nullptr;
}

}  // namespace

SimConfig make_config(const Options& opts, Scheme scheme) {
  SimConfig cfg;
  cfg.scheme = scheme;
  cfg.set = opts.set;
  cfg.snr_grid = parse_snr_grid(opts.snr);
  cfg.seed = opts.seed;
  cfg.workers = opts.workers;
  try {
    cfg.stop = stopping_rule(parse_budget(opts.budget));
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  if (opts.workers < 1) throw UsageError("--workers must be >= 1");
  return cfg;
}

std::optional<double> GapSummary::fixed_gap() const { return diff(svd_best_fixed, qrs_best_fixed); }
std::optional<double> GapSummary::envelope_gap() const { return diff(qrs_selection, svd_selection); }
std::optional<double> GapSummary::svd_selection_gain() const {
  return diff(svd_fixed_qam16, svd_selection);
}
std::optional<double> GapSummary::qrs_selection_gain() const {
  return diff(qrs_fixed_qam16, qrs_selection);
}

const BerCurve& best_fixed_curve(const std::vector<BerCurve>& curves, double target_ber) {
  if (curves.empty()) throw InvalidInput("best_fixed_curve: no curves");
  const BerCurve* best = nullptr;
  double best_snr = 0.0;
  for (const BerCurve& c : curves) {
    if (auto s = try_snr_at_ber(c, target_ber); s && (!best || *s < best_snr)) {
      best = &c;
      best_snr = *s;
    }
  }
  if (best) return *best;
  best = &curves.front();
  for (const BerCurve& c : curves) {
    if (!c.points.empty() && c.points.back().ber < best->points.back().ber) best = &c;
  }
  return *best;
}

CompareReport build_compare_report(std::vector<BerCurve> svd_curves,
                                   std::vector<BerCurve> qrs_curves, BerCurve svd_selection,
                                   BerCurve qrs_selection, double target_ber) {
  CompareReport r;
  r.svd_best = best_fixed_curve(svd_curves, target_ber);
  r.qrs_best = best_fixed_curve(qrs_curves, target_ber);
  r.svd_envelope = select_envelope(svd_curves);
  r.qrs_envelope = select_envelope(qrs_curves);

  GapSummary& g = r.gaps;
  g.svd_best_set = r.svd_best.set_name;
  g.qrs_best_set = r.qrs_best.set_name;
  g.svd_best_fixed = try_snr_at_ber(r.svd_best, target_ber);
  g.qrs_best_fixed = try_snr_at_ber(r.qrs_best, target_ber);
  g.svd_envelope = try_snr_at_ber(r.svd_envelope, target_ber);
  g.qrs_envelope = try_snr_at_ber(r.qrs_envelope, target_ber);
  g.svd_selection = try_snr_at_ber(svd_selection, target_ber);
  g.qrs_selection = try_snr_at_ber(qrs_selection, target_ber);
  r.svd_selection = std::move(svd_selection);
  r.qrs_selection = std::move(qrs_selection);
  if (const BerCurve* c = find_curve(svd_curves, "QAM16-QAM16")) {
    g.svd_fixed_qam16 = try_snr_at_ber(*c, target_ber);
  }
  if (const BerCurve* c = find_curve(qrs_curves, "QAM16-QAM16")) {
    g.qrs_fixed_qam16 = try_snr_at_ber(*c, target_ber);
  }
  r.svd_curves = std::move(svd_curves);
  r.qrs_curves = std::move(qrs_curves);
  return r;
}

std::string summary_csv(const GapSummary& g) {
  std::string out = "quantity,set,value_db\n";
  auto row = [&](std::string_view q, std::string_view set, std::optional<double> v) {
    out += q;
    out += ',';
    out += set;
    out += ',';
    out += entry(v);
    out += '\n';
  };
  row("snr_at_ber_svd_best_fixed", g.svd_best_set, g.svd_best_fixed);
  row("snr_at_ber_qrs_best_fixed", g.qrs_best_set, g.qrs_best_fixed);
  row("snr_at_ber_svd_selection", "SELECTION", g.svd_selection);
  row("snr_at_ber_qrs_selection", "SELECTION", g.qrs_selection);
  row("snr_at_ber_svd_envelope", "ENVELOPE", g.svd_envelope);
  row("snr_at_ber_qrs_envelope", "ENVELOPE", g.qrs_envelope);
  row("snr_at_ber_svd_fixed", "QAM16-QAM16", g.svd_fixed_qam16);
  row("snr_at_ber_qrs_fixed", "QAM16-QAM16", g.qrs_fixed_qam16);
  row("gap_fixed_qrs_advantage", "", g.fixed_gap());
  row("gap_envelope_svd_advantage", "", g.envelope_gap());
  row("selection_gain_svd", "QAM16-QAM16", g.svd_selection_gain());
  row("selection_gain_qrs", "QAM16-QAM16", g.qrs_selection_gain());
  return out;
}

std::string summary_text(const GapSummary& g) {
  std::string out = "SNR (dB) at BER 1e-3\n";
  auto line = [&](std::string_view label, std::optional<double> v) {
    out += "  ";
    out += label;
    out.append(label.size() < 44 ? 44 - label.size() : 1, ' ');
    out += entry(v);
    out += '\n';
  };
  line("best fixed SVD (" + g.svd_best_set + ")", g.svd_best_fixed);
  line("best fixed QRS (" + g.qrs_best_set + ")", g.qrs_best_fixed);
  line("SVD per-realization selection", g.svd_selection);
  line("QRS per-realization selection", g.qrs_selection);
  line("SVD best fixed set per SNR point", g.svd_envelope);
  line("QRS best fixed set per SNR point", g.qrs_envelope);
  out += "Gaps (dB)\n";
  line("fixed sets, positive = QRS better", g.fixed_gap());
  line("selection, positive = SVD better", g.envelope_gap());
  line("SVD selection gain vs QAM16-QAM16", g.svd_selection_gain());
  line("QRS selection gain vs QAM16-QAM16", g.qrs_selection_gain());
  return out;
}

CompareReport run_compare(const Options& opts, std::ostream& log) {
  SelectionRule rule{};
  try {
    rule = parse_selection_rule(opts.selection);
  } catch (const InvalidInput& e) {
    throw UsageError(std::string("--selection: ") + e.what());
  }
  std::vector<BerCurve> per_scheme[2];
  BerCurve selection[2];
  for (Scheme s : {Scheme::Svd, Scheme::Qrs}) {
    Options o = opts;
    o.scheme = std::string(to_string(s));
    o.set = "ALL";
    auto& dst = per_scheme[static_cast<int>(s)];
    if (auto reused = reuse_sweep(o, s)) {
      log << "reusing " << to_string(s) << " sweep from " << o.out.string() << "\n";
      dst = std::move(*reused);
    } else {
      log << "running " << to_string(s) << " sweep\n";
      dst = sweep(make_config(o, s));
      write_sweep(o, s, dst);
    }
    log << "running " << to_string(s) << " per-realization selection (" << to_string(rule) << ")\n";
    selection[static_cast<int>(s)] = sweep_selection(make_config(o, s), rule);
  }
  return build_compare_report(std::move(per_scheme[0]), std::move(per_scheme[1]),
                              std::move(selection[0]), std::move(selection[1]));
}

int cmd_sweep(const Options& opts, std::ostream& out) {
  const Scheme scheme = scheme_flag(opts.scheme);
  check_set_flag(scheme, opts.set);
  const SimConfig cfg = make_config(opts, scheme);
  ensure_dir(opts.out);
  const auto curves = sweep(cfg);
  for (const fs::path& p : write_sweep(opts, scheme, curves)) out << "wrote " << p.string() << "\n";
  return 0;
}

int cmd_compare(const Options& opts, std::ostream& out) {
  make_config(opts, Scheme::Svd);  // flag validation before any work
  if (opts.selection != "oracle" && opts.selection != "expected") {
    throw UsageError("invalid --selection '" + opts.selection + "' (expected oracle or expected)");
  }
  ensure_dir(opts.out);
  const CompareReport r = run_compare(opts, out);

  const std::pair<std::string, std::string> files[] = {
      {"best_fixed_svd.csv", curve_csv(r.svd_best)},
      {"best_fixed_qrs.csv", curve_csv(r.qrs_best)},
      {"envelope_svd.csv", envelope_csv(r.svd_envelope)},
      {"envelope_qrs.csv", envelope_csv(r.qrs_envelope)},
      {"selection_svd.csv", selection_csv(r.svd_selection, catalog(Scheme::Svd))},
      {"selection_qrs.csv", selection_csv(r.qrs_selection, catalog(Scheme::Qrs))},
      {"summary.csv", summary_csv(r.gaps)},
  };
  RunManifest m = make_manifest("compare", opts);
  m.entries["scheme"] = "svd,qrs";
  m.entries["set"] = "ALL";
  int i = 0;
  for (const auto& [name, content] : files) {
    write_text_file(opts.out / name, content);
    m.entries["output." + std::to_string(i++)] = name;
  }
  write_text_file(opts.out / "manifest_compare.txt", m.serialize());
  out << summary_text(r.gaps);
  return 0;
}

int cmd_selftest(const Options& opts, std::ostream& out) {
  bool all = true;
  for (const SuiteResult& r : run_selftest(opts.seed)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.details << "\n";
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace mimo::cli
