#include "rscat/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include "rscat/config.hpp"
#include "rscat/oracles.hpp"
#include "rscat/recovery.hpp"
#include "rscat/rsgf.hpp"
#include "rscat/validation.hpp"

namespace rscat {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string data;
  std::string field;
  std::string summary;
  std::string log;
  double max_rel_l2 = -1.0;
  bool synthetic = false;
  double c0 = 1.0;
  double m = 0.0;
  std::size_t reps = 50;
};

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

void append_log(const fs::path& log, const std::string& command, const std::string& hash, std::uint64_t seed) {
  ensure_parent(log);
  std::ofstream out(log, std::ios::app);
  if (!out) throw IoError("cannot append to run log " + log.string());
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\t' << command << "\tconfig=" << hash << "\tseed=" << seed
      << "\tversion=" << kVersion << '\n';
}

const IngredientConfig& random_ingredient(const ExperimentConfig& cfg, const std::string& which) {
  const std::optional<IngredientConfig>* pick = nullptr;
  if (which == "source") pick = &cfg.source;
  else if (which == "potential") pick = &cfg.potential;
  else if (which.empty()) pick = (cfg.source && cfg.source->kind == IngredientKind::migr) ? &cfg.source : &cfg.potential;
  else throw ConfigError("--field must be source or potential");
  if (!*pick || (*pick)->kind != IngredientKind::migr) {
    throw ConfigError("synth: no migr ingredient" + (which.empty() ? std::string() : " in [" + which + "]"));
  }
  return **pick;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load_config(o.config);
  const IngredientConfig& ing = random_ingredient(cfg, o.field);
  const std::uint64_t seed = ing.section == "potential" ? potential_seed(cfg.seed) : cfg.seed;
  const Realization r = synthesize_migr(std::get<MigrSpec>(ing.build(cfg.grid)), seed);
  const fs::path path = or_default(o.out, cfg.output / (ing.section + ".rsgf"));
  ensure_parent(path);
  write_field(path, r.field);
  append_log(or_default(o.log, cfg.output / "run.log"), "synth", cfg.hash, cfg.seed);
  out << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load_config(o.config);
  const auto freqs = cfg.band.frequencies();
  const auto dirs = cfg.directions.resolve();
  const FarFieldSet raw = band_sweep(cfg.sweep_template(), freqs, dirs, cfg.mode, cfg.seed);
  FarFieldMeta meta = raw.meta();
  meta.config_hash = cfg.hash;
  const FarFieldSet set(meta, raw.entries());
  const fs::path stem = or_default(o.out, cfg.output / "farfield");
  ensure_parent(stem);
  write_farfield(stem, set);
  append_log(or_default(o.log, cfg.output / "run.log"), "sweep", cfg.hash, cfg.seed);
  out << "wrote " << stem.string() << ".manifest/.csv (" << set.entries().size() << " entries)\n";
  return 0;
}

void check_mesh(const ExperimentConfig& cfg, const FarFieldSet& ff) {
  const auto& meta = ff.meta();
  const double tol = 1e-9 * cfg.band.delta;
  if (std::abs(meta.delta - cfg.band.delta) > tol || std::abs(meta.band_lo - cfg.band.K) > tol) {
    throw ConfigError("mesh mismatch: data has delta=" + format_double(meta.delta) + ", band start " +
                      format_double(meta.band_lo) + " but the config expects delta=" + format_double(cfg.band.delta) +
                      ", K=" + format_double(cfg.band.K));
  }
}

int cmd_recover(const Options& o, std::ostream& out, bool potential) {
  const ExperimentConfig cfg = load_config(o.config);
  const FarFieldSet ff = read_farfield(or_default(o.data, cfg.output / "farfield"));
  check_mesh(cfg, ff);
  const auto& ing = potential ? cfg.potential : cfg.source;
  if (!ing) throw ConfigError(std::string("missing section [") + (potential ? "potential" : "source") + "]");

  RecoveryRequest req{ing->m, cfg.band.taus, cfg.directions.resolve(), cfg.band.K, std::nullopt, cfg.grid, std::nullopt};
  const bool both_random = cfg.source && cfg.potential && cfg.source->kind == IngredientKind::migr &&
                           cfg.potential->kind == IngredientKind::migr;
  if (both_random) req.normal = cfg.normal();
  if (ing->kind == IngredientKind::migr) req.ground_truth = ing->shape_field(cfg.grid);

  const RecoveryReport report = potential ? recover_potential_strength(ff, req) : recover_source_strength(ff, req);
  const fs::path stem = or_default(o.out, cfg.output / (potential ? "recover_potential" : "recover_source"));
  ensure_parent(stem);
  write_field(stem.string() + "_mu.rsgf", report.mu_rec);
  write_field(stem.string() + "_mu_unclipped.rsgf", report.mu_unclipped);
  write_samples_csv(stem.string() + "_samples.csv", report.samples);
  write_summary(stem.string() + "_summary.txt", report,
                {{"config_hash", cfg.hash},
                 {"seed", std::to_string(cfg.seed)},
                 {"m", format_double(ing->m)},
                 {"K", format_double(cfg.band.K)},
                 {"mode", req.normal ? "hemisphere" : "full-sphere"}});
  append_log(or_default(o.log, cfg.output / "run.log"), potential ? "recover-potential" : "recover-source", cfg.hash,
             cfg.seed);
  out << "wrote " << stem.string() << "_{mu.rsgf,mu_unclipped.rsgf,samples.csv,summary.txt}";
  if (report.rel_l2_error) out << "; rel_l2_error=" << format_double(*report.rel_l2_error);
  out << '\n';
  return 0;
}

int cmd_nearfield(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load_config(o.config);
  if (!cfg.nearfield) throw ConfigError("missing section [nearfield]");
  if (!cfg.source) throw ConfigError("missing section [source]");
  const NearfieldConfig& nf = *cfg.nearfield;
  const SweepTemplate tmpl = cfg.sweep_template();
  const RealizedIngredients fields = realize(tmpl, cfg.seed);
  const bool solve = fields.potential && std::any_of(fields.potential->values().begin(), fields.potential->values().end(),
                                                     [](double v) { return v != 0.0; });
  const double delta = (nf.K - 1.0) / static_cast<double>(nf.n_freq - 1);

  std::vector<std::vector<NearfieldSample>> samples(nf.points.size());
  for (std::size_t j = 0; j < nf.n_freq; ++j) {
    const double k = 1.0 + static_cast<double>(j) * delta;
    const ScatteringConfig sc = make_config(tmpl, fields, k, 0, Vec3{0, 0, 1});
    const ComplexField usc = solve ? lippmann_schwinger_solve(sc).scattered : ComplexField(cfg.grid);
    for (std::size_t p = 0; p < nf.points.size(); ++p) samples[p].push_back({k, near_field_point(sc, usc, nf.points[p])});
  }

  const fs::path stem = or_default(o.out, cfg.output / "nearfield");
  ensure_parent(stem);
  std::ofstream csv(stem.string() + ".csv");
  csv << "point,k,re,im\n";
  for (std::size_t p = 0; p < samples.size(); ++p) {
    for (const auto& s : samples[p]) {
      csv << p << ',' << format_double(s.k) << ',' << format_double(s.value.real()) << ','
          << format_double(s.value.imag()) << '\n';
    }
  }
  std::ofstream sum(stem.string() + "_summary.txt");
  sum << "config_hash=" << cfg.hash << "\nseed=" << cfg.seed << "\nm=" << format_double(cfg.source->m) << '\n';
  for (std::size_t p = 0; p < samples.size(); ++p) {
    const double est = nearfield_second_moment(samples[p], cfg.source->m);
    sum << "point" << p << ".estimate=" << format_double(est) << '\n';
    if (cfg.source->kind == IngredientKind::migr) {
      const double oracle = oracles::potential_kernel_integral(cfg.source->shape_field(cfg.grid), nf.points[p]);
      sum << "point" << p << ".kernel_integral=" << format_double(oracle) << '\n'
          << "point" << p << ".ratio=" << format_double(est / oracle) << '\n';
    }
  }
  if (!csv || !sum) throw IoError("write failed for " + stem.string());
  append_log(or_default(o.log, cfg.output / "run.log"), "nearfield", cfg.hash, cfg.seed);
  out << "wrote " << stem.string() << ".csv and " << stem.string() << "_summary.txt\n";
  return 0;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const auto results = run_validation_suite();
  bool ok = true;
  out << std::left << std::setw(16) << "module" << std::setw(40) << "check" << std::setw(8) << "result" << "detail\n";
  for (const auto& r : results) {
    ok = ok && r.passed;
    out << std::left << std::setw(16) << r.module << std::setw(40) << r.name << std::setw(8)
        << (r.passed ? "PASS" : "FAIL") << r.detail << '\n';
  }
  if (!o.summary.empty()) {
    std::ifstream in(o.summary);
    if (!in) throw IoError("cannot read summary " + o.summary);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    if (!kv.count("rel_l2_error")) throw FormatError("summary has no rel_l2_error");
    const double err = std::stod(kv["rel_l2_error"]);
    const bool pass = o.max_rel_l2 < 0.0 || err <= o.max_rel_l2;
    ok = ok && pass;
    out << std::left << std::setw(16) << "pipeline" << std::setw(40) << "recorded rel_l2_error" << std::setw(8)
        << (pass ? "PASS" : "FAIL") << format_double(err);
    if (o.max_rel_l2 >= 0.0) out << " <= " << format_double(o.max_rel_l2);
    out << '\n';
  }
  std::string hash = "none";
  std::uint64_t seed = 0;
  fs::path log = o.log.empty() ? fs::path("run.log") : fs::path(o.log);
  if (!o.config.empty()) {
    const ExperimentConfig cfg = load_config(o.config);
    hash = cfg.hash;
    seed = cfg.seed;
    if (o.log.empty()) log = cfg.output / "run.log";
  }
  append_log(log, "validate", hash, seed);
  return ok ? 0 : 1;
}

int cmd_diagnose(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load_config(o.config);
  if (!cfg.diagnostic) throw ConfigError("missing section [diagnostic]");
  const DiagnosticConfig& dg = *cfg.diagnostic;
  std::vector<BandSpread> rows;
  if (o.synthetic) {
    std::vector<BandMesh> bands;
    for (double K : dg.bands) bands.push_back({K, static_cast<std::size_t>(std::llround(K / cfg.band.delta))});
    rows = ergodic_diagnostic(SyntheticProcess{o.c0, o.m, cfg.seed}, bands, o.reps);
  } else {
    const FarFieldSet ff = read_farfield(or_default(o.data, cfg.output / "farfield"));
    check_mesh(cfg, ff);
    const auto dirs = cfg.directions.resolve();
    const double m = ff.meta().m;
    rows = ergodic_diagnostic(ff, m, dg.tau, dirs[dg.dir_index], dg.bands);
  }
  const fs::path path = or_default(o.out, cfg.output / "ergodic.csv");
  ensure_parent(path);
  std::ofstream csv(path);
  csv << "K,n_terms,mean,rms_deviation\n";
  for (const auto& r : rows) {
    csv << format_double(r.K) << ',' << r.n_terms << ',' << format_double(r.mean) << ','
        << format_double(r.rms_deviation) << '\n';
  }
  if (!csv) throw IoError("write failed for " + path.string());
  append_log(or_default(o.log, cfg.output / "run.log"), "diagnose-ergodic", cfg.hash, cfg.seed);
  out << "wrote " << path.string() << '\n';
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-source and random-potential scattering experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", o.config, "experiment config (INI)");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--log", o.log, "run log (default <output>/run.log)");
  };
  auto* synth = app.add_subcommand("synth", "write one realization of a migr ingredient (RSGF)");
  add_common(synth, true);
  synth->add_option("--out", o.out, "output RSGF path");
  synth->add_option("--field", o.field, "source or potential");
  auto* sweep = app.add_subcommand("sweep", "compute far fields over the band (manifest + CSV)");
  add_common(sweep, true);
  sweep->add_option("--out", o.out, "output stem");
  auto* rsrc = app.add_subcommand("recover-source", "recover the source strength from passive data");
  auto* rpot = app.add_subcommand("recover-potential", "recover the potential strength from backscatter data");
  for (auto* sub : {rsrc, rpot}) {
    add_common(sub, true);
    sub->add_option("--data", o.data, "far-field stem (default <output>/farfield)");
    sub->add_option("--out", o.out, "output stem");
  }
  auto* nf = app.add_subcommand("nearfield", "near-field second moments at the configured points");
  add_common(nf, true);
  nf->add_option("--out", o.out, "output stem");
  auto* val = app.add_subcommand("validate", "run the invariant suite and print a pass/fail table");
  add_common(val, false);
  val->add_option("--summary", o.summary, "recovery summary to check");
  val->add_option("--max-rel-l2", o.max_rel_l2, "bound on the summary's rel_l2_error");
  auto* diag = app.add_subcommand("diagnose-ergodic", "band-spread diagnostic (CSV)");
  add_common(diag, true);
  diag->add_option("--data", o.data, "far-field stem (default <output>/farfield)");
  diag->add_option("--out", o.out, "output CSV");
  diag->add_flag("--synthetic", o.synthetic, "use the independent-mesh synthetic process");
  diag->add_option("--c0", o.c0, "synthetic process scale");
  diag->add_option("--m", o.m, "synthetic process order");
  diag->add_option("--reps", o.reps, "synthetic repetitions");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (rsrc->parsed()) return cmd_recover(o, out, false);
    if (rpot->parsed()) return cmd_recover(o, out, true);
    if (nf->parsed()) return cmd_nearfield(o, out);
    if (val->parsed()) return cmd_validate(o, out);
    if (diag->parsed()) return cmd_diagnose(o, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rscat
