#include "crude/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string_view>

#include "CLI11.hpp"

#include "crude/data.hpp"
#include "crude/model_io.hpp"
#include "crude/recalibrator.hpp"

namespace crude::cli {

namespace {

namespace fs = std::filesystem;

// Flag misuse that CLI11 cannot see (bad method token, missing companion
// flag). Reported like a parse error, exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string canonical_method(const std::string& name) {
  if (name == "mle") return "gaussian_mle";
  if (name == "none" || name == "crude" || name == "gaussian_mle" || name == "kuleshov" ||
      name == "conformal") {
    return name;
  }
  throw UsageError("unknown method '" + name + "'");
}

std::vector<std::string> parse_methods(const std::string& codes) {
  if (codes == "all") return {"none", "gaussian_mle", "kuleshov", "crude", "conformal"};
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= codes.size()) {
    const auto end = codes.find(',', start);
    const auto len = (end == std::string::npos ? codes.size() : end) - start;
    out.push_back(canonical_method(codes.substr(start, len)));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (out.empty()) throw UsageError("--methods list is empty");
  return out;
}

Recalibrator fit_method_on(const std::string& method, const PredictionSet& cal) {
  if (method == "none") return Recalibrator::identity();
  if (method == "crude") return Recalibrator::from_crude(fit_crude(cal));
  if (method == "gaussian_mle") return Recalibrator::from_gaussian_mle(fit_gaussian_mle(cal));
  if (method == "kuleshov") return Recalibrator::from_kuleshov(fit_kuleshov(cal));
  if (method == "conformal") return Recalibrator::from_conformal(fit_conformal(cal));
  throw UsageError("unknown method '" + method + "'");
}

std::string iso_timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  return out;
}

void log_wrote(const fs::path& path) { std::cerr << "wrote " << path.string() << '\n'; }

struct FitOpts {
  std::string input;
  std::string method = "crude";
  std::string output;
};

int do_fit(const FitOpts& o) {
  const std::string method = canonical_method(o.method);
  nlohmann::json doc;
  if (method == "none") {
    doc = identity_to_json();
  } else {
    const auto cal = load_dataset_csv(o.input).predictions;
    if (method == "crude") {
      doc = crude_model_to_json(fit_crude(cal));
    } else if (method == "gaussian_mle") {
      doc = gaussian_mle_to_json(fit_gaussian_mle(cal));
    } else if (method == "kuleshov") {
      doc = kuleshov_to_json(fit_kuleshov(cal));
    } else {
      doc = conformal_to_json(fit_conformal(cal));
    }
  }
  save_json(doc, o.output);
  log_wrote(o.output);
  return kExitOk;
}

struct QuantileOpts {
  std::string model;
  std::string input;
  double p = 0.5;
  std::string output;
};

int do_quantile(const QuantileOpts& o) {
  const auto recal = recalibrator_from_json(load_json(o.model));
  const auto preds = load_dataset_csv(o.input).predictions;
  auto out = open_output(o.output);
  const bool any_y = std::any_of(preds.records.begin(), preds.records.end(),
                                 [](const auto& r) { return r.y.has_value(); });
  out << (any_y ? "mu,sigma,y,quantile\n" : "mu,sigma,quantile\n");
  for (const auto& r : preds.records) {
    const double q = recal.quantile(r.prediction(), o.p);
    out << detail::format_double(r.mu) << ',' << detail::format_double(r.sigma);
    if (any_y) {
      out << ',';
      if (r.y) out << detail::format_double(*r.y);
    }
    out << ',' << detail::format_double(q) << '\n';
  }
  log_wrote(o.output);
  return kExitOk;
}

struct IntervalOpts {
  std::string model;
  std::string input;
  double p_lo = 0.05;
  double p_hi = 0.95;
  std::string output;
};

int do_interval(const IntervalOpts& o) {
  if (!(o.p_lo < o.p_hi)) throw UsageError("--p-lo must be below --p-hi");
  const auto doc = load_json(o.model);
  const bool conformal = stored_model_method(doc) == "conformal";
  const ConformalCalibration calib =
      conformal ? conformal_from_json(doc) : ConformalCalibration{};
  const Recalibrator recal =
      conformal ? Recalibrator::identity() : recalibrator_from_json(doc);

  const auto preds = load_dataset_csv(o.input).predictions;
  auto out = open_output(o.output);
  const bool any_y = std::any_of(preds.records.begin(), preds.records.end(),
                                 [](const auto& r) { return r.y.has_value(); });
  out << (any_y ? "mu,sigma,y,lower,upper\n" : "mu,sigma,lower,upper\n");
  for (const auto& r : preds.records) {
    double lo = 0.0;
    double hi = 0.0;
    if (conformal) {
      std::tie(lo, hi) = conformal_interval(calib, r.prediction(), o.p_lo, o.p_hi);
    } else {
      lo = recal.quantile(r.prediction(), o.p_lo);
      hi = recal.quantile(r.prediction(), o.p_hi);
    }
    out << detail::format_double(r.mu) << ',' << detail::format_double(r.sigma);
    if (any_y) {
      out << ',';
      if (r.y) out << detail::format_double(*r.y);
    }
    out << ',' << detail::format_double(lo) << ',' << detail::format_double(hi) << '\n';
  }
  log_wrote(o.output);
  return kExitOk;
}

Recalibrator recalibrator_from_flags(const std::string& model_path, const std::string& method,
                                     const std::string& cal_path) {
  if (!model_path.empty()) return recalibrator_from_json(load_json(model_path));
  const std::string m = canonical_method(method);
  if (m == "none") return Recalibrator::identity();
  if (cal_path.empty()) throw UsageError("--cal is required for method '" + m + "'");
  return fit_method_on(m, load_dataset_csv(cal_path).predictions);
}

struct CurveOpts {
  std::string model;
  std::string method = "crude";
  std::string cal;
  std::string test;
  int steps = 100;
  std::string output;
};

int do_curve(const CurveOpts& o) {
  const auto recal = recalibrator_from_flags(o.model, o.method, o.cal);
  const auto test = load_dataset_csv(o.test).predictions;
  const auto curve = recalibrator_curve(recal, test, o.steps);
  auto out = open_output(o.output);
  write_curve_csv(curve, out);
  log_wrote(o.output);
  return kExitOk;
}

struct EvaluateOpts {
  std::string methods = "all";
  std::string cal;
  std::string test;
  int steps = 100;
  std::uint64_t seed = 0;
  bool stamp = false;
  std::string output;
};

int do_evaluate(const EvaluateOpts& o) {
  const auto methods = parse_methods(o.methods);
  const auto test = load_dataset_csv(o.test).predictions;

  bool cal_loaded = false;
  PredictionSet cal;
  auto cal_set = [&]() -> const PredictionSet& {
    if (!cal_loaded) {
      if (o.cal.empty()) throw UsageError("--cal is required unless every method is 'none'");
      cal = load_dataset_csv(o.cal).predictions;
      cal_loaded = true;
    }
    return cal;
  };

  nlohmann::json reports = nlohmann::json::array();
  for (const auto& method : methods) {
    const auto recal =
        (method == "none") ? Recalibrator::identity() : fit_method_on(method, cal_set());
    reports.push_back(report_to_json(evaluate_recalibrator(recal, test, o.steps, o.seed)));
  }
  nlohmann::json doc{{"reports", std::move(reports)}};
  if (o.stamp) doc["generated_at"] = iso_timestamp_utc();
  save_json(doc, o.output);
  log_wrote(o.output);
  return kExitOk;
}

struct SynthOpts {
  std::string family = "gaussian";
  std::size_t n = 0;
  double param = 0.0;
  bool hetero = false;
  double miscal_scale = 1.0;
  std::uint64_t seed = 0;
  std::string output;
};

int do_synth(const SynthOpts& o) {
  SyntheticConfig config;
  config.n = o.n;
  config.family = parse_family(o.family);
  config.family_param = o.param;
  config.hetero = o.hetero;
  config.miscal_scale = o.miscal_scale;
  config.seed = o.seed;
  const auto data = synth_generate(config);
  auto out = open_output(o.output);
  write_synthetic_csv(data, out);
  log_wrote(o.output);
  return kExitOk;
}

struct BenchOpts {
  std::string input;
  std::string methods = "all";
  std::uint32_t trials = 20;
  std::uint64_t seed = 0;
  double train_frac = 0.5;
  double cal_frac = 0.4;
  double test_frac = 0.1;
  int steps = 100;
  double p_lo = 0.05;
  double p_hi = 0.95;
  std::string predictor = "given";
  std::size_t k = 10;
  bool stamp = false;
  std::string output_dir;
};

struct TrialRow {
  std::uint32_t trial;
  std::string method;
  double calibration_rmse;
  double sharpness;
  double coverage;
  double width;
};

int do_bench(const BenchOpts& o) {
  if (!(o.p_lo > 0.0 && o.p_lo < o.p_hi && o.p_hi < 1.0)) {
    throw UsageError("need 0 < --p-lo < --p-hi < 1");
  }
  const auto methods = parse_methods(o.methods);
  const auto ds = load_dataset_csv(o.input);
  if (!ds.predictions.labeled) throw UnlabeledSet("bench input");
  if (o.predictor == "knn" && ds.x.size() != ds.predictions.size()) {
    throw ValidationError("knn predictor needs the synthetic dump format with an x column");
  }

  SplitSpec spec;
  spec.train_frac = o.train_frac;
  spec.cal_frac = o.cal_frac;
  spec.test_frac = o.test_frac;
  spec.seed = o.seed;
  spec.trials = o.trials;
  validate_split_spec(spec);

  const fs::path dir(o.output_dir);
  fs::create_directories(dir);

  std::vector<TrialRow> rows;
  for (std::uint32_t trial = 0; trial < o.trials; ++trial) {
    const auto idx = split_indices(ds.predictions.size(), spec, trial);

    PredictionSet calset;
    PredictionSet testset;
    if (o.predictor == "given") {
      calset = subset(ds.predictions, idx.cal);
      testset = subset(ds.predictions, idx.test);
    } else {
      std::vector<std::vector<double>> train_x;
      std::vector<double> train_y;
      train_x.reserve(idx.train.size());
      train_y.reserve(idx.train.size());
      for (std::size_t i : idx.train) {
        train_x.push_back({ds.x[i]});
        train_y.push_back(*ds.predictions.records[i].y);
      }
      const auto knn = fit_knn(std::move(train_x), std::move(train_y), o.k);
      auto predict_rows = [&](const std::vector<std::size_t>& which) {
        std::vector<PredictionRecord> out_rows;
        out_rows.reserve(which.size());
        for (std::size_t i : which) {
          const auto pred = knn_predict(knn, {ds.x[i]});
          out_rows.push_back({pred.mu, pred.sigma, ds.predictions.records[i].y});
        }
        return validate_predictions(std::move(out_rows));
      };
      calset = predict_rows(idx.cal);
      testset = predict_rows(idx.test);
    }

    for (const auto& method : methods) {
      const auto recal = fit_method_on(method, calset);
      const auto report =
          evaluate_recalibrator(recal, testset, o.steps, mix_seed(o.seed, trial));
      std::size_t covered = 0;
      double width_sum = 0.0;
      for (const auto& r : testset.records) {
        const double lo = recal.quantile(r.prediction(), o.p_lo);
        const double hi = recal.quantile(r.prediction(), o.p_hi);
        if (lo <= *r.y && *r.y <= hi) ++covered;
        width_sum += hi - lo;
      }
      const double n_test = static_cast<double>(testset.size());
      rows.push_back({trial, method, report.calibration_rmse, report.sharpness,
                      static_cast<double>(covered) / n_test, width_sum / n_test});
    }
  }

  const fs::path trials_path = dir / "trials.csv";
  {
    auto out = open_output(trials_path);
    out << "trial,method,calibration_rmse,sharpness,coverage,width\n";
    for (const auto& r : rows) {
      out << r.trial << ',' << r.method << ',' << detail::format_double(r.calibration_rmse)
          << ',' << detail::format_double(r.sharpness) << ','
          << detail::format_double(r.coverage) << ',' << detail::format_double(r.width) << '\n';
    }
  }
  log_wrote(trials_path);

  const fs::path summary_path = dir / "summary.csv";
  {
    auto out = open_output(summary_path);
    out << "method,mean_calibration_rmse,mean_sharpness,mean_coverage,mean_width\n";
    for (const auto& method : methods) {
      double rmse = 0.0;
      double sharp = 0.0;
      double cover = 0.0;
      double width = 0.0;
      std::size_t count = 0;
      for (const auto& r : rows) {
        if (r.method != method) continue;
        rmse += r.calibration_rmse;
        sharp += r.sharpness;
        cover += r.coverage;
        width += r.width;
        ++count;
      }
      const double n = static_cast<double>(count);
      out << method << ',' << detail::format_double(rmse / n) << ','
          << detail::format_double(sharp / n) << ',' << detail::format_double(cover / n) << ','
          << detail::format_double(width / n) << '\n';
    }
  }
  log_wrote(summary_path);

  if (o.stamp) {
    nlohmann::json meta{{"generated_at", iso_timestamp_utc()}};
    save_json(meta, dir / "run_info.json");
    log_wrote(dir / "run_info.json");
  }
  return kExitOk;
}

int run_impl(int argc, const char* const* argv) {
  CLI::App app{"Post-hoc recalibration of regression uncertainty"};
  app.require_subcommand(1);

  FitOpts fit_opts;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a recalibration model from a labeled CSV");
  fit_cmd->add_option("--input,-i", fit_opts.input, "Calibration CSV (mu,sigma,y)")
      ->required();
  fit_cmd->add_option("--method,-m", fit_opts.method,
                      "none | crude | mle | kuleshov | conformal");
  fit_cmd->add_option("--output,-o", fit_opts.output, "Model JSON path")->required();

  QuantileOpts q_opts;
  auto* q_cmd = app.add_subcommand("quantile", "Append a quantile column to a prediction CSV");
  q_cmd->add_option("--model", q_opts.model, "Model JSON path")->required();
  q_cmd->add_option("--input,-i", q_opts.input, "Prediction CSV (mu,sigma[,y])")->required();
  q_cmd->add_option("--p", q_opts.p, "Probability level")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  q_cmd->add_option("--output,-o", q_opts.output, "Output CSV path")->required();

  IntervalOpts iv_opts;
  auto* iv_cmd =
      app.add_subcommand("interval", "Append lower/upper interval columns to a prediction CSV");
  iv_cmd->add_option("--model", iv_opts.model, "Model JSON path")->required();
  iv_cmd->add_option("--input,-i", iv_opts.input, "Prediction CSV (mu,sigma[,y])")->required();
  iv_cmd->add_option("--p-lo", iv_opts.p_lo, "Lower level")->check(CLI::Range(0.0, 1.0));
  iv_cmd->add_option("--p-hi", iv_opts.p_hi, "Upper level")->check(CLI::Range(0.0, 1.0));
  iv_cmd->add_option("--output,-o", iv_opts.output, "Output CSV path")->required();

  CurveOpts curve_opts;
  auto* curve_cmd = app.add_subcommand("curve", "Write the calibration curve as CSV");
  curve_cmd->add_option("--model", curve_opts.model, "Model JSON path (overrides --method/--cal)");
  curve_cmd->add_option("--method,-m", curve_opts.method,
                        "none | crude | mle | kuleshov | conformal");
  curve_cmd->add_option("--cal", curve_opts.cal, "Calibration CSV");
  curve_cmd->add_option("--test", curve_opts.test, "Labeled test CSV")->required();
  curve_cmd->add_option("--steps", curve_opts.steps, "Curve resolution S")
      ->check(CLI::PositiveNumber);
  curve_cmd->add_option("--output,-o", curve_opts.output, "Output CSV path")->required();

  EvaluateOpts ev_opts;
  auto* ev_cmd = app.add_subcommand("evaluate", "Score methods on a labeled test CSV");
  ev_cmd->add_option("--methods", ev_opts.methods, "Comma list or 'all'");
  ev_cmd->add_option("--cal", ev_opts.cal, "Calibration CSV");
  ev_cmd->add_option("--test", ev_opts.test, "Labeled test CSV")->required();
  ev_cmd->add_option("--steps", ev_opts.steps, "Curve resolution S")
      ->check(CLI::PositiveNumber);
  ev_cmd->add_option("--seed", ev_opts.seed, "Seed recorded in the reports");
  ev_cmd->add_flag("--stamp", ev_opts.stamp, "Include a generation timestamp");
  ev_cmd->add_option("--output,-o", ev_opts.output, "Report JSON path")->required();

  SynthOpts sy_opts;
  auto* sy_cmd = app.add_subcommand("synth", "Generate a synthetic dataset dump");
  sy_cmd->add_option("--family", sy_opts.family,
                     "gaussian | lognormal_shifted | student_t")
      ->check(CLI::IsMember({"gaussian", "lognormal_shifted", "student_t"}));
  sy_cmd->add_option("--n", sy_opts.n, "Number of rows")->required()->check(CLI::PositiveNumber);
  sy_cmd->add_option("--param", sy_opts.param,
                     "Family parameter (lognormal log-scale or student-t dof)");
  sy_cmd->add_flag("--hetero", sy_opts.hetero, "Heteroscedastic mu(x), sigma(x)");
  sy_cmd->add_option("--miscal-scale", sy_opts.miscal_scale,
                     "Reported sigma = true sigma * this");
  sy_cmd->add_option("--seed", sy_opts.seed, "Generator seed");
  sy_cmd->add_option("--output,-o", sy_opts.output, "Output CSV path")->required();

  BenchOpts bench_opts;
  auto* bench_cmd =
      app.add_subcommand("bench", "Split/fit/score trials over a labeled dataset");
  bench_cmd->add_option("--input,-i", bench_opts.input, "Labeled CSV or synthetic dump")
      ->required();
  bench_cmd->add_option("--methods", bench_opts.methods, "Comma list or 'all'");
  bench_cmd->add_option("--trials", bench_opts.trials, "Number of trials")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_opts.seed, "Base seed for the trial splits");
  bench_cmd->add_option("--train-frac", bench_opts.train_frac, "Train fraction");
  bench_cmd->add_option("--cal-frac", bench_opts.cal_frac, "Calibration fraction");
  bench_cmd->add_option("--test-frac", bench_opts.test_frac, "Test fraction");
  bench_cmd->add_option("--steps", bench_opts.steps, "Curve resolution S")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--p-lo", bench_opts.p_lo, "Interval lower level");
  bench_cmd->add_option("--p-hi", bench_opts.p_hi, "Interval upper level");
  bench_cmd->add_option("--predictor", bench_opts.predictor, "given | knn")
      ->check(CLI::IsMember({"given", "knn"}));
  bench_cmd->add_option("--k", bench_opts.k, "Neighbors for the knn predictor")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--stamp", bench_opts.stamp, "Write run_info.json with a timestamp");
  bench_cmd->add_option("--output-dir", bench_opts.output_dir, "Directory for the result CSVs")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return do_fit(fit_opts);
    if (q_cmd->parsed()) return do_quantile(q_opts);
    if (iv_cmd->parsed()) return do_interval(iv_opts);
    if (curve_cmd->parsed()) return do_curve(curve_opts);
    if (ev_cmd->parsed()) return do_evaluate(ev_opts);
    if (sy_cmd->parsed()) return do_synth(sy_opts);
    if (bench_cmd->parsed()) return do_bench(bench_opts);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace

int run(int argc, const char* const* argv) { return run_impl(argc, argv); }

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("crude");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(storage.size());
  for (const auto& s : storage) argv.push_back(s.c_str());
  return run_impl(static_cast<int>(argv.size()), argv.data());
}

}  // namespace crude::cli
