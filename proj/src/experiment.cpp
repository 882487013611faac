#include "exctop/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "exctop/binary_image.hpp"
#include "exctop/errors.hpp"
#include "exctop/rng.hpp"
#include "exctop/topology.hpp"

namespace exctop {
namespace {

/// Work-stealing-free index loop: replicate i goes to whichever worker pulls
/// it, but results land in per-index slots so the outcome is independent of
/// the thread count. First exception wins and aborts the run.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, sep)) parts.push_back(token);
  return parts;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string token;
  while (in >> token) parts.push_back(token);
  return parts;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

bool parse_int(const std::string& s, int& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

/// Full pixel extent of a bounded image with the given geometry.
Rect pixel_extent(GridDims dims, double eps, Vec2 origin) {
  const double half = 0.5 * eps;
  return Rect{origin.x - half, origin.x + (dims.nx - 1) * eps + half, origin.y - half,
              origin.y + (dims.ny - 1) * eps + half};
}

double vbar(const ExperimentConfig& cfg, double lambda) {
  return cfg.phi == PhiConvention::NormalCdf ? vol_density(lambda) : paper_phi(lambda);
}

/// Per-window, per-functional, per-(replicate, lambda) raw totals from a
/// bounded-mode run. Shared by run() and window_term_experiment() so the
/// paired contrast sees exactly the data the summary tables see.
struct BoundedRaw {
  std::vector<Window> windows;
  // values[w][f][r * n_lambda + j], f in {0: chi, 1: per_inf, 2: vol}
  std::vector<std::array<std::vector<double>, 3>> values;
};

BoundedRaw bounded_raw(const ExperimentConfig& cfg) {
  BoundedRaw raw;
  if (cfg.windows.empty()) {
    const Rect full = pixel_extent(cfg.dims, cfg.eps, Vec2{0.0, 0.0});
    raw.windows.emplace_back(std::vector<Rect>{full});
  } else {
    raw.windows = cfg.windows;
  }

  const int n_rep = cfg.replicates;
  const int n_lambda = static_cast<int>(cfg.lambdas.size());
  const std::size_t n_cells = static_cast<std::size_t>(n_rep) * n_lambda;
  raw.values.resize(raw.windows.size());
  for (auto& per_window : raw.values)
    for (auto& series : per_window) series.resize(n_cells);

  CirculantSampler sampler(cfg.model, padded_torus_dims(cfg.model, cfg.dims, cfg.eps),
                           cfg.eps);
  parallel_for(n_rep, resolve_threads(cfg.threads), [&](int r) {
    const FieldSample field = crop(sampler.sample(rng::mix(cfg.seed, r)), cfg.dims);
    for (int j = 0; j < n_lambda; ++j) {
      const BinaryImage img = digitize(field, cfg.lambdas[j]);
      for (std::size_t w = 0; w < raw.windows.size(); ++w) {
        const BinaryImage clipped = clip_to_window(img, raw.windows[w]);
        const std::size_t cell = static_cast<std::size_t>(r) * n_lambda + j;
        raw.values[w][0][cell] = static_cast<double>(chi_bicov(clipped));
        raw.values[w][1][cell] = perimeter_inf(clipped).per_inf;
        raw.values[w][2][cell] = area(clipped);
      }
    }
  });
  return raw;
}

std::vector<double> extract_lambda(const std::vector<double>& series, int n_lambda, int j,
                                   int n_rep) {
  std::vector<double> out(n_rep);
  for (int r = 0; r < n_rep; ++r) out[r] = series[static_cast<std::size_t>(r) * n_lambda + j];
  return out;
}

void check_common(const ExperimentConfig& cfg) {
  if (cfg.replicates < 2)
    throw std::invalid_argument("experiment needs replicates >= 2");
  if (cfg.lambdas.empty())
    throw std::invalid_argument("experiment needs at least one lambda");
  if (cfg.mode == BoundaryMode::Torus && !cfg.windows.empty())
    throw std::invalid_argument("windows require bounded mode");
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("EXCTOP_THREADS")) {
    int parsed = 0;
    if (parse_int(env, parsed) && parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

StatRow aggregate(double lambda, const std::string& functional,
                  const std::vector<double>& samples, double predicted) {
  StatRow row;
  row.lambda = lambda;
  row.functional = functional;
  row.predicted = predicted;
  const std::size_t n = samples.size();
  if (n == 0) return row;

  double sum = 0.0;
  for (double v : samples) sum += v;
  row.mean = sum / static_cast<double>(n);

  if (n >= 2) {
    double ss = 0.0;
    for (double v : samples) {
      const double d = v - row.mean;
      ss += d * d;
    }
    row.sd = std::sqrt(ss / static_cast<double>(n - 1));
    row.se = row.sd / std::sqrt(static_cast<double>(n));
  }
  if (row.se > 0.0) {
    row.z = (row.mean - row.predicted) / row.se;
  } else {
    row.z = row.mean == row.predicted ? 0.0 : std::numeric_limits<double>::infinity() *
                                                  (row.mean > row.predicted ? 1.0 : -1.0);
  }
  return row;
}

RunResult run(const ExperimentConfig& cfg) {
  check_common(cfg);
  RunResult result;
  result.mu = spectral_moment(cfg.model, cfg.allow_c1);
  const int n_rep = cfg.replicates;
  const int n_lambda = static_cast<int>(cfg.lambdas.size());

  if (cfg.mode == BoundaryMode::Torus) {
    CirculantSampler sampler(cfg.model, cfg.dims, cfg.eps);
    const double inv_area = 1.0 / (cfg.dims.cells() * cfg.eps * cfg.eps);
    std::array<std::vector<double>, 3> series;
    for (auto& s : series) s.resize(static_cast<std::size_t>(n_rep) * n_lambda);

    parallel_for(n_rep, resolve_threads(cfg.threads), [&](int r) {
      const FieldSample field = sampler.sample(rng::mix(cfg.seed, r));
      for (int j = 0; j < n_lambda; ++j) {
        const BinaryImage img = digitize(field, cfg.lambdas[j]);
        const std::size_t cell = static_cast<std::size_t>(r) * n_lambda + j;
        series[0][cell] = static_cast<double>(chi_bicov(img)) * inv_area;
        series[1][cell] = perimeter_inf(img).per_inf * inv_area;
        series[2][cell] = area(img) * inv_area;
      }
    });

    SummaryStats table;
    for (int j = 0; j < n_lambda; ++j) {
      const double lambda = cfg.lambdas[j];
      table.rows.push_back(aggregate(lambda, "chi",
                                     extract_lambda(series[0], n_lambda, j, n_rep),
                                     ec_density(result.mu, lambda)));
      table.rows.push_back(aggregate(lambda, "per_inf",
                                     extract_lambda(series[1], n_lambda, j, n_rep),
                                     per_inf_density(result.mu, lambda)));
      table.rows.push_back(aggregate(lambda, "vol",
                                     extract_lambda(series[2], n_lambda, j, n_rep),
                                     vbar(cfg, lambda)));
    }
    result.tables.push_back(std::move(table));
    return result;
  }

  const BoundedRaw raw = bounded_raw(cfg);
  for (std::size_t w = 0; w < raw.windows.size(); ++w) {
    SummaryStats table;
    for (int j = 0; j < n_lambda; ++j) {
      const double lambda = cfg.lambdas[j];
      const ExpectedFunctionals ef =
          expected_functionals(raw.windows[w], result.mu, lambda, cfg.phi);
      table.rows.push_back(aggregate(
          lambda, "chi", extract_lambda(raw.values[w][0], n_lambda, j, n_rep), ef.chi));
      table.rows.push_back(aggregate(
          lambda, "per_inf", extract_lambda(raw.values[w][1], n_lambda, j, n_rep),
          ef.per_inf));
      table.rows.push_back(aggregate(
          lambda, "vol", extract_lambda(raw.values[w][2], n_lambda, j, n_rep), ef.vol));
    }
    result.tables.push_back(std::move(table));
  }
  return result;
}

WindowTermResult window_term_experiment(const ExperimentConfig& cfg) {
  check_common(cfg);
  if (cfg.mode != BoundaryMode::Bounded)
    throw std::invalid_argument("window_term_experiment requires bounded mode");
  if (cfg.windows.size() < 2)
    throw std::invalid_argument("window_term_experiment needs at least two windows");

  // Keep every window a correlation length away from the crop edges so the
  // boundary terms we are after cannot be polluted by the field's edge.
  const Rect extent = pixel_extent(cfg.dims, cfg.eps, Vec2{0.0, 0.0});
  const double margin = 3.0 * cfg.model.length_scale;
  for (std::size_t w = 0; w < cfg.windows.size(); ++w) {
    const Rect bb = cfg.windows[w].bounding_box();
    if (bb.x0 < extent.x0 + margin || bb.x1 > extent.x1 - margin ||
        bb.y0 < extent.y0 + margin || bb.y1 > extent.y1 - margin)
      throw std::invalid_argument("window " + std::to_string(w) +
                                  " closer than 3*ell to the field edge");
  }

  const double mu = spectral_moment(cfg.model, cfg.allow_c1);
  const BoundedRaw raw = bounded_raw(cfg);
  const int n_rep = cfg.replicates;
  const int n_lambda = static_cast<int>(cfg.lambdas.size());

  WindowTermResult result;
  result.per_window.mu = mu;
  for (std::size_t w = 0; w < raw.windows.size(); ++w) {
    SummaryStats table;
    for (int j = 0; j < n_lambda; ++j) {
      const double lambda = cfg.lambdas[j];
      const ExpectedFunctionals ef = expected_functionals(raw.windows[w], mu, lambda, cfg.phi);
      table.rows.push_back(aggregate(
          lambda, "chi", extract_lambda(raw.values[w][0], n_lambda, j, n_rep), ef.chi));
      table.rows.push_back(aggregate(
          lambda, "per_inf", extract_lambda(raw.values[w][1], n_lambda, j, n_rep),
          ef.per_inf));
      table.rows.push_back(aggregate(
          lambda, "vol", extract_lambda(raw.values[w][2], n_lambda, j, n_rep), ef.vol));
    }
    result.per_window.tables.push_back(std::move(table));
  }

  // Paired contrast between the first two windows: same replicate, same
  // field, so the shared bulk term cancels and the boundary term stands out.
  for (int j = 0; j < n_lambda; ++j) {
    const double lambda = cfg.lambdas[j];
    std::vector<double> diffs(n_rep);
    for (int r = 0; r < n_rep; ++r) {
      const std::size_t cell = static_cast<std::size_t>(r) * n_lambda + j;
      diffs[r] = raw.values[0][0][cell] - raw.values[1][0][cell];
    }
    const double predicted = expected_functionals(raw.windows[0], mu, lambda, cfg.phi).chi -
                             expected_functionals(raw.windows[1], mu, lambda, cfg.phi).chi;
    const StatRow s = aggregate(lambda, "chi_diff", diffs, predicted);
    result.chi_diff.push_back(
        WindowTermRow{lambda, s.mean, s.sd, s.se, s.predicted, s.z});
  }
  return result;
}

std::vector<SweepRow> sweep_fields(const std::function<FieldSample(int)>& make_field,
                                   int replicates, const std::vector<int>& strides,
                                   const std::vector<double>& lambdas, int threads) {
  if (replicates < 1) throw std::invalid_argument("sweep needs replicates >= 1");
  if (strides.empty()) throw std::invalid_argument("sweep needs at least one stride");
  if (lambdas.empty()) throw std::invalid_argument("sweep needs at least one lambda");

  const int n_strides = static_cast<int>(strides.size());
  const int n_lambda = static_cast<int>(lambdas.size());
  struct Cell {
    long long chi = 0, comps = 0, holes_count = 0, anti = 0, main = 0;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(replicates) * n_strides * n_lambda);
  std::vector<GridDims> sub_dims(n_strides);
  std::vector<double> sub_eps(n_strides);
  std::once_flag dims_once;

  parallel_for(replicates, resolve_threads(threads), [&](int r) {
    const FieldSample fine = make_field(r);
    for (int s = 0; s < n_strides; ++s) {
      const FieldSample coarse = subsample(fine, strides[s]);
      std::call_once(dims_once, [&] {
        for (int q = 0; q < n_strides; ++q) {
          const FieldSample probe = subsample(fine, strides[q]);
          sub_dims[q] = probe.dims;
          sub_eps[q] = probe.eps;
        }
      });
      for (int j = 0; j < n_lambda; ++j) {
        const BinaryImage img = digitize(coarse, lambdas[j]);
        Cell& cell = cells[(static_cast<std::size_t>(r) * n_strides + s) * n_lambda + j];
        cell.chi = chi_bicov(img);
        cell.comps = components(img, 4);
        cell.holes_count = holes(img);
        const CheckerboardCells cc = checkerboard_cells(img);
        cell.anti = cc.anti;
        cell.main = cc.main;
      }
    }
  });

  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(n_strides) * n_lambda);
  for (int s = 0; s < n_strides; ++s) {
    for (int j = 0; j < n_lambda; ++j) {
      SweepRow row;
      row.stride = strides[s];
      row.eps = sub_eps[s];
      row.lambda = lambdas[j];
      double chi_sum = 0, comps_sum = 0, holes_sum = 0, anti_sum = 0, main_sum = 0;
      for (int r = 0; r < replicates; ++r) {
        const Cell& cell = cells[(static_cast<std::size_t>(r) * n_strides + s) * n_lambda + j];
        chi_sum += static_cast<double>(cell.chi);
        comps_sum += static_cast<double>(cell.comps);
        holes_sum += static_cast<double>(cell.holes_count);
        anti_sum += static_cast<double>(cell.anti);
        main_sum += static_cast<double>(cell.main);
      }
      const double inv_rep = 1.0 / static_cast<double>(replicates);
      row.chi_mean = chi_sum * inv_rep;
      row.components4_mean = comps_sum * inv_rep;
      row.holes8_mean = holes_sum * inv_rep;
      row.anti_mean = anti_sum * inv_rep;
      row.main_mean = main_sum * inv_rep;
      row.cells_per_pixel =
          (row.anti_mean + row.main_mean) / static_cast<double>(sub_dims[s].cells());
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<SweepRow> convergence_sweep(const ExperimentConfig& cfg) {
  if (cfg.strides.empty())
    throw std::invalid_argument("convergence_sweep needs strides in the config");
  if (cfg.lambdas.empty()) throw std::invalid_argument("sweep needs at least one lambda");
  if (cfg.replicates < 1) throw std::invalid_argument("sweep needs replicates >= 1");

  if (cfg.mode == BoundaryMode::Torus) {
    CirculantSampler sampler(cfg.model, cfg.dims, cfg.eps);
    return sweep_fields([&](int r) { return sampler.sample(rng::mix(cfg.seed, r)); },
                        cfg.replicates, cfg.strides, cfg.lambdas, cfg.threads);
  }
  CirculantSampler sampler(cfg.model, padded_torus_dims(cfg.model, cfg.dims, cfg.eps),
                           cfg.eps);
  return sweep_fields(
      [&](int r) { return crop(sampler.sample(rng::mix(cfg.seed, r)), cfg.dims); },
      cfg.replicates, cfg.strides, cfg.lambdas, cfg.threads);
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::vector<std::string> errors;
  std::map<std::string, std::string> single;
  std::vector<std::string> window_values;
  std::set<std::string> seen;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": empty key or value");
      continue;
    }
    if (key == "window") {
      window_values.push_back(value);
      continue;
    }
    if (!seen.insert(key).second) {
      errors.push_back("duplicate key '" + key + "'");
      continue;
    }
    single[key] = value;
  }

  const std::set<std::string> known = {"model", "ell",     "nx",      "ny",      "eps",
                                       "lambda", "replicates", "seed", "mode",    "strides",
                                       "threads", "allow_c1", "phi"};
  for (const auto& [key, value] : single)
    if (!known.count(key)) errors.push_back("unknown key '" + key + "'");

  ExperimentConfig cfg;
  auto require = [&](const char* key) -> const std::string* {
    auto it = single.find(key);
    if (it == single.end()) {
      errors.push_back(std::string("missing required key '") + key + "'");
      return nullptr;
    }
    return &it->second;
  };

  double ell = 0.0;
  if (const std::string* v = require("ell")) {
    if (!parse_double(*v, ell) || ell <= 0.0) errors.push_back("ell: need a positive number");
  }
  if (const std::string* v = require("model")) {
    // Validate with a placeholder scale if ell was bad, so both problems are
    // reported at once.
    try {
      cfg.model = parse_model(*v, ell > 0.0 ? ell : 1.0);
    } catch (const ConfigError& e) {
      errors.push_back(e.what());
    }
  }

  if (const std::string* v = require("nx")) {
    if (!parse_int(*v, cfg.dims.nx) || cfg.dims.nx < 1)
      errors.push_back("nx: need a positive integer");
  }
  if (const std::string* v = require("ny")) {
    if (!parse_int(*v, cfg.dims.ny) || cfg.dims.ny < 1)
      errors.push_back("ny: need a positive integer");
  }
  if (const std::string* v = require("eps")) {
    if (!parse_double(*v, cfg.eps) || cfg.eps <= 0.0)
      errors.push_back("eps: need a positive number");
  }
  if (const std::string* v = require("lambda")) {
    for (const std::string& token : split_ws(*v)) {
      double lambda = 0.0;
      if (!parse_double(token, lambda)) {
        errors.push_back("lambda: '" + token + "' is not a finite number");
        break;
      }
      cfg.lambdas.push_back(lambda);
    }
    if (cfg.lambdas.empty()) errors.push_back("lambda: need at least one level");
  }
  if (const std::string* v = require("replicates")) {
    if (!parse_int(*v, cfg.replicates) || cfg.replicates < 2)
      errors.push_back("replicates: need an integer >= 2");
  }
  if (const std::string* v = require("seed")) {
    if (!parse_u64(*v, cfg.seed)) errors.push_back("seed: need an unsigned 64-bit integer");
  }

  if (auto it = single.find("mode"); it != single.end()) {
    if (it->second == "torus") {
      cfg.mode = BoundaryMode::Torus;
    } else if (it->second == "bounded") {
      cfg.mode = BoundaryMode::Bounded;
    } else {
      errors.push_back("mode: expected torus or bounded, got '" + it->second + "'");
    }
  }
  if (auto it = single.find("strides"); it != single.end()) {
    for (const std::string& token : split_ws(it->second)) {
      int stride = 0;
      if (!parse_int(token, stride) || stride < 1) {
        errors.push_back("strides: '" + token + "' is not a positive integer");
        break;
      }
      cfg.strides.push_back(stride);
    }
  }
  if (auto it = single.find("threads"); it != single.end()) {
    if (!parse_int(it->second, cfg.threads) || cfg.threads < 0)
      errors.push_back("threads: need a non-negative integer");
  }
  if (auto it = single.find("allow_c1"); it != single.end()) {
    if (it->second == "true" || it->second == "1") {
      cfg.allow_c1 = true;
    } else if (it->second == "false" || it->second == "0") {
      cfg.allow_c1 = false;
    } else {
      errors.push_back("allow_c1: expected true or false");
    }
  }
  if (auto it = single.find("phi"); it != single.end()) {
    if (it->second == "cdf") {
      cfg.phi = PhiConvention::NormalCdf;
    } else if (it->second == "paper") {
      cfg.phi = PhiConvention::PaperPhi;
    } else {
      errors.push_back("phi: expected cdf or paper");
    }
  }

  if (!window_values.empty() && cfg.mode == BoundaryMode::Torus)
    errors.push_back("window: windows require mode = bounded");
  for (const std::string& value : window_values) {
    try {
      cfg.windows.push_back(parse_window_spec(value));
    } catch (const std::exception& e) {
      errors.push_back(std::string("window: ") + e.what());
    }
  }

  if (!errors.empty()) {
    std::string message = "config invalid:";
    for (const std::string& e : errors) message += "\n  - " + e;
    throw ConfigError(message);
  }
  return cfg;
}

Window parse_window_spec(const std::string& spec) {
  std::vector<std::array<double, 4>> quads;
  for (const std::string& quad_text : split(spec, ';')) {
    const std::vector<std::string> nums = split(quad_text, ',');
    std::array<double, 4> quad{};
    bool ok = nums.size() == 4;
    for (int i = 0; i < 4 && ok; ++i) ok = parse_double(trim(nums[i]), quad[i]);
    if (!ok)
      throw ConfigError("'" + trim(quad_text) + "' is not an x0,x1,y0,y1 quadruple");
    quads.push_back(quad);
  }
  return Window::from_quads(quads);  // InvalidWindowError propagates
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace exctop
