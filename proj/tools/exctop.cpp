// exctop: excursion-set topology of 2-D scalar fields.
//
// Computes the Euler characteristic, L-infinity perimeter and area of
// excursion sets {f <= lambda} by three-point configuration counts, and
// checks Monte Carlo estimates for stationary isotropic Gaussian fields
// against their closed-form means.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "exctop/binary_image.hpp"
#include "exctop/closed_form.hpp"
#include "exctop/errors.hpp"
#include "exctop/experiment.hpp"
#include "exctop/field.hpp"
#include "exctop/formats.hpp"
#include "exctop/topology.hpp"
#include "exctop/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

json manifest_base(const std::string& subcommand) {
  json m;
  m["tool"] = exctop::kToolName;
  m["version"] = exctop::kVersion;
  m["subcommand"] = subcommand;
  return m;
}

/// The manifest is written after every other output so its presence marks a
/// complete run.
void write_manifest(const fs::path& out_dir, json manifest, const Timer& timer) {
  manifest["timing_seconds"] = timer.seconds();
  exctop::write_text_file((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

exctop::BoundaryMode parse_mode(const std::string& mode) {
  if (mode == "torus") return exctop::BoundaryMode::Torus;
  if (mode == "bounded") return exctop::BoundaryMode::Bounded;
  throw exctop::ConfigError("mode must be torus or bounded, got '" + mode + "'");
}

json config_echo(const exctop::ExperimentConfig& cfg) {
  json j;
  j["model"] = exctop::model_name(cfg.model);
  j["ell"] = cfg.model.length_scale;
  j["nx"] = cfg.dims.nx;
  j["ny"] = cfg.dims.ny;
  j["eps"] = cfg.eps;
  j["lambda"] = cfg.lambdas;
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  j["mode"] = to_string(cfg.mode);
  j["threads"] = cfg.threads;
  j["allow_c1"] = cfg.allow_c1;
  j["phi"] = cfg.phi == exctop::PhiConvention::NormalCdf ? "cdf" : "paper";
  if (!cfg.strides.empty()) j["strides"] = cfg.strides;
  if (!cfg.windows.empty()) {
    json windows = json::array();
    for (const exctop::Window& w : cfg.windows) {
      json rects = json::array();
      for (const exctop::Rect& r : w.rects()) rects.push_back({r.x0, r.x1, r.y0, r.y1});
      windows.push_back(rects);
    }
    j["windows"] = windows;
  }
  return j;
}

json stats_json(const exctop::SummaryStats& stats) {
  json rows = json::array();
  for (const exctop::StatRow& r : stats.rows) {
    json row;
    row["lambda"] = r.lambda;
    row["functional"] = r.functional;
    row["mean"] = r.mean;
    row["sd"] = r.sd;
    row["se"] = r.se;
    row["predicted"] = r.predicted;
    row["z"] = exctop::format_double(r.z);  // may be inf; JSON numbers cannot hold it
    rows.push_back(row);
  }
  return rows;
}

int run_simulate(const std::string& model_name, double ell, int nx, int ny, double eps,
                 double lambda, std::uint64_t seed, const std::string& mode_name,
                 const std::string& out, bool allow_c1, bool dense, bool ascii) {
  Timer timer;
  const exctop::CovarianceModel model = exctop::parse_model(model_name, ell);
  const exctop::BoundaryMode mode = parse_mode(mode_name);
  if (model.regularity_violated() && !allow_c1)
    throw exctop::RegularityError(
        "matern32 violates the C^{1,1} regularity the closed forms assume; "
        "pass --allow-c1 to sample it anyway");

  const exctop::GridDims dims{nx, ny};
  const exctop::FieldSample field =
      dense ? exctop::sample_field_dense(model, dims, eps, seed, mode)
            : exctop::sample_field(model, dims, eps, seed, mode);
  const exctop::BinaryImage image = exctop::digitize(field, lambda);
  const exctop::TopologyReport report = exctop::analyze(image);

  fs::create_directories(out);
  const fs::path dir(out);
  json model_info;
  model_info["model"] = exctop::model_name(model);
  model_info["ell"] = ell;
  model_info["sampler"] = dense ? "dense" : "circulant";
  exctop::write_pgm16((dir / "field.pgm").string(), (dir / "field.json").string(), field,
                      model_info);
  exctop::write_pbm((dir / "excursion.pbm").string(), image, !ascii);

  json report_j = exctop::report_json(report);
  report_j["lambda"] = lambda;
  exctop::write_text_file((dir / "report.json").string(), report_j.dump(2) + "\n");

  json manifest = manifest_base("simulate");
  manifest["config"] = {{"model", exctop::model_name(model)}, {"ell", ell},
                        {"nx", nx},       {"ny", ny},
                        {"eps", eps},     {"lambda", lambda},
                        {"seed", seed},   {"mode", mode_name},
                        {"allow_c1", allow_c1}, {"dense", dense}};
  manifest["outputs"] = {"field.pgm", "field.json", "excursion.pbm", "report.json"};
  write_manifest(dir, manifest, timer);
  return 0;
}

int run_analyze(const std::string& image_path, double eps, const std::string& mode_name,
                const std::string& out) {
  const exctop::BinaryImage image =
      exctop::read_pbm(image_path, eps, parse_mode(mode_name));
  const json report = exctop::report_json(exctop::analyze(image));
  if (out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    exctop::write_text_file(out, report.dump(2) + "\n");
  }
  return 0;
}

int run_predict(double mu, const std::string& model_name, double ell,
                const std::vector<double>& lambdas,
                const std::vector<std::string>& window_specs, bool allow_c1,
                const std::string& out) {
  if (mu <= 0.0 && model_name.empty())
    throw exctop::ConfigError("predict needs either --mu or --model with --ell");
  double mu_eff = mu;
  json j;
  if (!model_name.empty()) {
    const exctop::CovarianceModel model = exctop::parse_model(model_name, ell);
    mu_eff = exctop::spectral_moment(model, allow_c1);
    j["model"] = exctop::model_name(model);
    j["ell"] = ell;
  }
  j["mu"] = mu_eff;

  json densities = json::array();
  for (double lambda : lambdas) {
    const exctop::GaussianDensities d = exctop::gaussian_densities(mu_eff, lambda);
    json row;
    row["lambda"] = d.lambda;
    row["ec"] = d.ec;
    row["per_u"] = d.per_u;
    row["per_inf"] = d.per_inf;
    row["vol"] = d.vol;
    row["paper_phi"] = exctop::paper_phi(lambda);
    densities.push_back(row);
  }
  j["densities"] = densities;

  if (!window_specs.empty()) {
    json expected = json::array();
    for (std::size_t w = 0; w < window_specs.size(); ++w) {
      const exctop::Window window = exctop::parse_window_spec(window_specs[w]);
      json wj;
      wj["window"] = w;
      wj["vol"] = window.vol();
      wj["per_u1"] = window.per_u1();
      wj["per_u2"] = window.per_u2();
      wj["per_inf"] = window.per_inf();
      wj["euler"] = window.euler();
      wj["corner_count"] = window.corner_count();
      json rows = json::array();
      for (double lambda : lambdas) {
        const exctop::ExpectedFunctionals cdf = exctop::expected_functionals(
            window, mu_eff, lambda, exctop::PhiConvention::NormalCdf);
        const exctop::ExpectedFunctionals paper = exctop::expected_functionals(
            window, mu_eff, lambda, exctop::PhiConvention::PaperPhi);
        json row;
        row["lambda"] = lambda;
        row["cdf_phi"] = {{"vol", cdf.vol}, {"per_inf", cdf.per_inf}, {"chi", cdf.chi}};
        row["paper_phi"] = {{"vol", paper.vol}, {"per_inf", paper.per_inf}, {"chi", paper.chi}};
        rows.push_back(row);
      }
      wj["expected"] = rows;
      expected.push_back(wj);
    }
    j["windows"] = expected;
  }

  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    exctop::write_text_file(out, j.dump(2) + "\n");
  }
  return 0;
}

/// Both-convention targets recorded alongside the measured means so a run
/// documents which reading of the formulas the data supports.
json adjudication_json(const exctop::ExperimentConfig& cfg, const exctop::RunResult& result) {
  json adj;
  if (cfg.mode == exctop::BoundaryMode::Torus) {
    json rows = json::array();
    for (const exctop::StatRow& row : result.tables[0].rows) {
      if (row.functional == "vol") {
        const double t_cdf = exctop::vol_density(row.lambda);
        const double t_paper = exctop::paper_phi(row.lambda);
        json r;
        r["lambda"] = row.lambda;
        r["mean"] = row.mean;
        r["target_cdf"] = t_cdf;
        r["target_paper_phi"] = t_paper;
        if (row.se > 0.0) {
          r["z_cdf"] = (row.mean - t_cdf) / row.se;
          r["z_paper_phi"] = (row.mean - t_paper) / row.se;
        }
        rows.push_back(r);
      } else if (row.functional == "per_inf") {
        const double two_sided = row.predicted;  // 2 sqrt(mu)/pi e^{-l^2/2}
        json r;
        r["lambda"] = row.lambda;
        r["mean"] = row.mean;
        r["target_two_sided"] = two_sided;
        r["target_one_sided"] = 0.5 * two_sided;
        if (row.se > 0.0) {
          r["z_two_sided"] = (row.mean - two_sided) / row.se;
          r["z_one_sided"] = (row.mean - 0.5 * two_sided) / row.se;
        }
        rows.push_back(r);
      }
    }
    adj["convention_checks"] = rows;
    adj["perimeter_convention"] = "two_sided";
    adj["phi_convention"] = cfg.phi == exctop::PhiConvention::NormalCdf ? "cdf" : "paper";
  } else {
    json rows = json::array();
    const auto& windows = cfg.windows;
    for (std::size_t w = 0; w < result.tables.size(); ++w) {
      if (w >= windows.size()) break;  // implicit full-extent window: skip
      for (const exctop::StatRow& row : result.tables[w].rows) {
        if (row.functional != "chi") continue;
        const double t_cdf = exctop::expected_functionals(
                                 windows[w], result.mu, row.lambda,
                                 exctop::PhiConvention::NormalCdf)
                                 .chi;
        const double t_paper = exctop::expected_functionals(
                                   windows[w], result.mu, row.lambda,
                                   exctop::PhiConvention::PaperPhi)
                                   .chi;
        json r;
        r["window"] = w;
        r["lambda"] = row.lambda;
        r["mean"] = row.mean;
        r["target_cdf"] = t_cdf;
        r["target_paper_phi"] = t_paper;
        if (row.se > 0.0) {
          r["z_cdf"] = (row.mean - t_cdf) / row.se;
          r["z_paper_phi"] = (row.mean - t_paper) / row.se;
        }
        rows.push_back(r);
      }
    }
    adj["convention_checks"] = rows;
    adj["phi_convention"] = cfg.phi == exctop::PhiConvention::NormalCdf ? "cdf" : "paper";
  }
  return adj;
}

int run_experiment(const std::string& config_path, const std::string& out, int threads,
                   bool window_term) {
  Timer timer;
  exctop::ExperimentConfig cfg = exctop::parse_config_file(config_path);
  if (threads > 0) cfg.threads = threads;

  fs::create_directories(out);
  const fs::path dir(out);
  std::vector<std::string> outputs;

  json manifest = manifest_base("experiment");
  manifest["config"] = config_echo(cfg);

  if (window_term) {
    const exctop::WindowTermResult result = exctop::window_term_experiment(cfg);
    for (std::size_t w = 0; w < result.per_window.tables.size(); ++w) {
      const std::string name = "summary_w" + std::to_string(w) + ".csv";
      exctop::write_text_file((dir / name).string(),
                              exctop::summary_csv(result.per_window.tables[w]));
      outputs.push_back(name);
    }
    exctop::SummaryStats diff;
    for (const exctop::WindowTermRow& row : result.chi_diff)
      diff.rows.push_back(exctop::StatRow{row.lambda, "chi_diff", row.mean, row.sd, row.se,
                                          row.predicted, row.z});
    exctop::write_text_file((dir / "window_term.csv").string(), exctop::summary_csv(diff));
    outputs.push_back("window_term.csv");
    json summaries;
    for (std::size_t w = 0; w < result.per_window.tables.size(); ++w)
      summaries["window_" + std::to_string(w)] = stats_json(result.per_window.tables[w]);
    summaries["window_term"] = stats_json(diff);
    manifest["summaries"] = summaries;
    manifest["mu"] = result.per_window.mu;
    manifest["adjudication"] = adjudication_json(cfg, result.per_window);
  } else {
    const exctop::RunResult result = exctop::run(cfg);
    json summaries;
    if (cfg.mode == exctop::BoundaryMode::Torus) {
      exctop::write_text_file((dir / "summary.csv").string(),
                              exctop::summary_csv(result.tables[0]));
      outputs.push_back("summary.csv");
      summaries["torus"] = stats_json(result.tables[0]);
    } else {
      for (std::size_t w = 0; w < result.tables.size(); ++w) {
        const std::string name = "summary_w" + std::to_string(w) + ".csv";
        exctop::write_text_file((dir / name).string(),
                                exctop::summary_csv(result.tables[w]));
        outputs.push_back(name);
        summaries["window_" + std::to_string(w)] = stats_json(result.tables[w]);
      }
    }
    manifest["summaries"] = summaries;
    manifest["mu"] = result.mu;
    manifest["adjudication"] = adjudication_json(cfg, result);
  }

  manifest["outputs"] = outputs;
  write_manifest(dir, manifest, timer);
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out, int threads) {
  Timer timer;
  exctop::ExperimentConfig cfg = exctop::parse_config_file(config_path);
  if (threads > 0) cfg.threads = threads;

  const std::vector<exctop::SweepRow> rows = exctop::convergence_sweep(cfg);
  fs::create_directories(out);
  const fs::path dir(out);
  exctop::write_text_file((dir / "sweep.csv").string(), exctop::sweep_csv(rows));

  json manifest = manifest_base("sweep");
  manifest["config"] = config_echo(cfg);
  manifest["outputs"] = {"sweep.csv"};
  write_manifest(dir, manifest, timer);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"excursion-set topology of 2-D scalar fields"};
  app.require_subcommand(1);

  // simulate
  std::string sim_model, sim_mode = "torus", sim_out;
  double sim_ell = 0.0, sim_eps = 0.0, sim_lambda = 0.0;
  int sim_nx = 256, sim_ny = 256;
  std::uint64_t sim_seed = 0;
  bool sim_allow_c1 = false, sim_dense = false, sim_ascii = false;
  CLI::App* sim = app.add_subcommand("simulate", "sample a field, digitize, report topology");
  sim->add_option("--model", sim_model, "covariance model: se | matern52 | matern32")
      ->required();
  sim->add_option("--ell", sim_ell, "correlation length scale")->required();
  sim->add_option("--nx", sim_nx, "grid columns");
  sim->add_option("--ny", sim_ny, "grid rows");
  sim->add_option("--eps", sim_eps, "lattice mesh")->required();
  sim->add_option("--lambda", sim_lambda, "excursion level for {f <= lambda}")->required();
  sim->add_option("--seed", sim_seed, "base RNG seed")->required();
  sim->add_option("--mode", sim_mode, "torus | bounded (default torus)");
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_flag("--allow-c1", sim_allow_c1, "permit the C^1-only matern32 model");
  sim->add_flag("--dense", sim_dense, "use the dense Cholesky reference sampler (<= 32x32)");
  sim->add_flag("--ascii-pbm", sim_ascii, "write the excursion as P1 instead of P4");

  // analyze
  std::string an_image, an_mode = "bounded", an_out;
  double an_eps = 1.0;
  CLI::App* an = app.add_subcommand("analyze", "report topology of a PBM image");
  an->add_option("image", an_image, "PBM file (P1 or P4)")->required();
  an->add_option("--eps", an_eps, "lattice mesh the image was digitized at (default 1)");
  an->add_option("--mode", an_mode, "torus | bounded (default bounded)");
  an->add_option("--out", an_out, "write the report here instead of stdout");

  // predict
  std::string pr_model, pr_out;
  double pr_mu = 0.0, pr_ell = 0.0;
  std::vector<double> pr_lambdas;
  std::vector<std::string> pr_windows;
  bool pr_allow_c1 = false;
  CLI::App* pr = app.add_subcommand("predict", "closed-form mean functionals");
  CLI::Option* opt_mu = pr->add_option("--mu", pr_mu, "second spectral moment");
  CLI::Option* opt_model =
      pr->add_option("--model", pr_model, "covariance model (alternative to --mu)");
  CLI::Option* opt_ell = pr->add_option("--ell", pr_ell, "length scale for --model");
  opt_mu->excludes(opt_model);
  opt_model->needs(opt_ell);
  pr->add_option("--lambda", pr_lambdas, "excursion levels")->required()->expected(-1);
  pr->add_option("--window", pr_windows,
                 "window as x0,x1,y0,y1[;x0,x1,y0,y1]... (repeatable)");
  pr->add_flag("--allow-c1", pr_allow_c1, "permit the C^1-only matern32 model");
  pr->add_option("--out", pr_out, "write the JSON here instead of stdout");

  // experiment
  std::string ex_config, ex_out;
  int ex_threads = 0;
  bool ex_window_term = false;
  CLI::App* ex = app.add_subcommand("experiment", "Monte Carlo means vs closed forms");
  ex->add_option("config", ex_config, "experiment config file")->required();
  ex->add_option("--out", ex_out, "output directory")->required();
  ex->add_option("--threads", ex_threads, "worker threads (overrides config)");
  ex->add_flag("--window-term", ex_window_term,
               "paired between-window contrast (needs >= 2 windows)");

  // sweep
  std::string sw_config, sw_out;
  int sw_threads = 0;
  CLI::App* sw = app.add_subcommand("sweep", "digitization convergence sweep over strides");
  sw->add_option("config", sw_config, "experiment config file with strides")->required();
  sw->add_option("--out", sw_out, "output directory")->required();
  sw->add_option("--threads", sw_threads, "worker threads (overrides config)");

  int rc = 0;
  sim->callback([&] {
    rc = run_simulate(sim_model, sim_ell, sim_nx, sim_ny, sim_eps, sim_lambda, sim_seed,
                      sim_mode, sim_out, sim_allow_c1, sim_dense, sim_ascii);
  });
  an->callback([&] { rc = run_analyze(an_image, an_eps, an_mode, an_out); });
  pr->callback([&] {
    rc = run_predict(opt_mu->count() > 0 ? pr_mu : 0.0, pr_model, pr_ell, pr_lambdas,
                     pr_windows, pr_allow_c1, pr_out);
  });
  ex->callback([&] { rc = run_experiment(ex_config, ex_out, ex_threads, ex_window_term); });
  sw->callback([&] { rc = run_sweep(sw_config, sw_out, sw_threads); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  } catch (const exctop::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const exctop::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const exctop::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
