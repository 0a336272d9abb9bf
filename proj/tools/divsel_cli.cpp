// Command-line front end: dataset generation, divergence-family selection,
// and NMF/PNMF fitting on CSV/TSV matrices.  Uses only the C API.
#include <unistd.h>

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "divsel.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& message) {
  throw CliError{code, message};
}

int status_code(divsel_status st) {
  return st == DIVSEL_INVALID_ARGUMENT ? 1 : 2;
}

void check(divsel_status st, const std::string& context) {
  if (st != DIVSEL_OK)
    die(status_code(st), context + ": " + divsel_last_error());
}

struct MatrixBuf {
  double* data = nullptr;
  int rows = 0;
  int cols = 0;
  ~MatrixBuf() { divsel_free(data); }
  MatrixBuf() = default;
  MatrixBuf(const MatrixBuf&) = delete;
  MatrixBuf& operator=(const MatrixBuf&) = delete;
  long long size() const {
    return static_cast<long long>(rows) * cols;
  }
};

void read_data(const std::string& path, MatrixBuf* out) {
  check(divsel_read_matrix(path.c_str(), -1, &out->rows, &out->cols,
                           &out->data),
        "reading " + path);
}

std::uint64_t fnv1a64(const double* data, long long count) {
  std::uint64_t h = 1469598103934665603ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (long long i = 0; i < count * 8; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp =
      path + ".tmp." + std::to_string(static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) die(1, "cannot create " + tmp);
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      die(1, "write failed: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    die(1, "cannot rename into place: " + path);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_linear_grid(const std::string& text) {
  double lo, step, hi;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &step, &hi) != 3 ||
      step <= 0.0 || hi < lo)
    die(1, "bad --grid '" + text + "', expected lo:step:hi with step > 0");
  std::vector<double> v;
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long i = 0; i <= n; ++i) v.push_back(lo + i * step);
  return v;
}

std::vector<double> parse_phi_grid(const std::string& text) {
  double lo, hi;
  int count;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
      lo <= 0.0 || hi <= lo || count < 2)
    die(1, "bad --phi-grid '" + text +
               "', expected lo:hi:count with 0 < lo < hi, count >= 2");
  std::vector<double> v(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    v[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  return v;
}

divsel_family parse_family(const std::string& name) {
  if (name == "beta") return DIVSEL_FAMILY_BETA;
  if (name == "alpha") return DIVSEL_FAMILY_ALPHA;
  if (name == "gamma") return DIVSEL_FAMILY_GAMMA;
  if (name == "renyi") return DIVSEL_FAMILY_RENYI;
  die(1, "unknown family '" + name + "'");
}

// ---------------------------------------------------------------- gen ----

struct GenArgs {
  std::string kind = "tweedie";
  std::uint64_t seed = 0;
  std::string out;
  double power = 1.0, mu = 10.0, phi = 1.0;
  int n = 10000;
  int dim = 1000;
  long long trials = 10000000;
};

int run_gen(const GenArgs& a) {
  std::vector<double> data;
  int rows = 0, cols = 1;
  if (a.kind == "tweedie") {
    data.resize(a.n);
    check(divsel_gen_tweedie(a.power, a.mu, a.phi, a.n, a.seed, data.data()),
          "generating tweedie data");
    rows = a.n;
  } else if (a.kind == "multinomial") {
    data.resize(a.dim);
    check(divsel_gen_multinomial(a.dim, a.trials, a.seed, data.data()),
          "generating multinomial data");
    rows = a.dim;
  } else if (a.kind == "block") {
    data.resize(50 * 30);
    check(divsel_gen_block_matrix(a.seed, data.data()),
          "generating block matrix");
    rows = 50;
    cols = 30;
  } else {
    die(1, "unknown --kind '" + a.kind + "' (tweedie|multinomial|block)");
  }
  check(divsel_write_matrix(a.out.c_str(), -1, data.data(), rows, cols),
        "writing " + a.out);
  return 0;
}

// ------------------------------------------------------------- select ----

struct SelectArgs {
  std::string family = "beta";
  std::string data_path;
  std::string model = "scalar";
  std::string mu_path;
  int rank = 2;
  int fit_iters = 100;
  std::uint64_t fit_seed = 0;
  std::string grid;      // lo:step:hi; empty -> default
  std::string phi_grid;  // lo:hi:count; empty -> default
  int quad_order = 5000;
  std::string estimator = "medal";
  std::string out_report;
  std::string out_curve;
};

int run_select(const SelectArgs& a) {
  const divsel_family family = parse_family(a.family);
  divsel_estimator estimator;
  if (a.estimator == "medal")
    estimator = DIVSEL_ESTIMATOR_MEDAL;
  else if (a.estimator == "sm")
    estimator = DIVSEL_ESTIMATOR_SM;
  else
    die(1, "unknown --estimator '" + a.estimator + "' (medal|sm)");

  divsel_model model;
  if (a.model == "scalar")
    model = DIVSEL_MODEL_SCALAR;
  else if (a.model == "nmf")
    model = DIVSEL_MODEL_NMF;
  else if (a.model == "pnmf")
    model = DIVSEL_MODEL_PNMF;
  else if (a.model == "precomputed")
    model = DIVSEL_MODEL_PRECOMPUTED;
  else
    die(1, "unknown --model '" + a.model +
               "' (scalar|nmf|pnmf|precomputed)");

  MatrixBuf data;
  read_data(a.data_path, &data);

  MatrixBuf mu;
  if (model == DIVSEL_MODEL_PRECOMPUTED) {
    if (a.mu_path.empty()) die(1, "--model precomputed requires --mu");
    read_data(a.mu_path, &mu);
    if (mu.size() != data.size())
      die(1, "--mu size does not match the data");
  }

  std::vector<double> params;
  if (!a.grid.empty()) {
    params = parse_linear_grid(a.grid);
  } else {
    params = parse_linear_grid("-2:0.05:2");
    // Default grids for the transform-based families skip invalid points
    // (alpha = 0 has no transform; Renyi orders must be positive).
    std::vector<double> kept;
    for (double p : params) {
      if (family == DIVSEL_FAMILY_ALPHA && p == 0.0) continue;
      if (family == DIVSEL_FAMILY_RENYI && p <= 0.0) continue;
      kept.push_back(p);
    }
    params = std::move(kept);
  }
  const std::vector<double> phis =
      parse_phi_grid(a.phi_grid.empty() ? "1e-4:1e2:40" : a.phi_grid);

  const auto t0 = std::chrono::steady_clock::now();
  divsel_selection* sel = nullptr;
  check(divsel_select(data.data, data.rows, data.cols, family, estimator,
                      model, mu.data, a.rank, a.fit_iters, a.fit_seed,
                      params.data(), static_cast<int>(params.size()),
                      phis.data(), static_cast<int>(phis.size()),
                      a.quad_order, &sel),
        "selection");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const int n = divsel_selection_size(sel);
  std::vector<double> profile(n), point_phi(n);
  double best_param = 0.0, best_phi = 0.0;
  divsel_selection_best(sel, &best_param, &best_phi);
  divsel_selection_curve(sel, profile.data(), point_phi.data());
  const int failures = divsel_selection_fitter_failures(sel);
  divsel_selection_destroy(sel);

  if (!a.out_curve.empty()) {
    std::string csv = "param,profile_loglik,best_phi\n";
    for (int i = 0; i < n; ++i) {
      csv += format_double(params[i]) + "," + format_double(profile[i]) +
             "," + format_double(point_phi[i]) + "\n";
    }
    atomic_write(a.out_curve, csv);
  }

  if (!a.out_report.empty()) {
    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016" PRIx64,
                  fnv1a64(data.data, data.size()));
    json report;
    report["dataset"] = {{"path", a.data_path},
                         {"rows", data.rows},
                         {"cols", data.cols},
                         {"checksum", checksum}};
    report["config"] = {{"family", a.family},
                        {"estimator", a.estimator},
                        {"model", a.model},
                        {"rank", a.rank},
                        {"fit_iters", a.fit_iters},
                        {"fit_seed", a.fit_seed},
                        {"param_grid", params},
                        {"phi_grid", phis},
                        {"quad_order", a.quad_order}};
    report["selection"] = {{"best_param", best_param},
                           {"best_phi", best_phi},
                           {"param_values", params},
                           {"profile_loglik", profile},
                           {"per_point_phi", point_phi},
                           {"fitter_failures", failures}};
    report["timing_seconds"] = seconds;
    atomic_write(a.out_report, report.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------- nmf/pnmf ----

struct NmfArgs {
  std::string data_path;
  std::string family = "beta";
  double param = 0.0;
  int rank = 2;
  int iters = 100;
  std::uint64_t seed = 0;
  std::string mask_path;
  std::string out_w, out_h;
};

int run_nmf(const NmfArgs& a) {
  const divsel_family family = parse_family(a.family);
  if (family != DIVSEL_FAMILY_BETA && family != DIVSEL_FAMILY_ALPHA)
    die(1, "nmf supports --family beta or alpha");
  MatrixBuf data;
  read_data(a.data_path, &data);
  MatrixBuf mask;
  if (!a.mask_path.empty()) {
    read_data(a.mask_path, &mask);
    if (mask.rows != data.rows || mask.cols != data.cols)
      die(1, "--mask shape does not match the data");
  }
  divsel_fit* fit = nullptr;
  check(divsel_nmf(data.data, data.rows, data.cols, a.rank, family, a.param,
                   a.iters, a.seed, mask.data, &fit),
        "nmf fit");
  std::vector<double> w(static_cast<std::size_t>(data.rows) * a.rank);
  std::vector<double> h(static_cast<std::size_t>(a.rank) * data.cols);
  divsel_fit_w(fit, w.data());
  divsel_fit_h(fit, h.data());
  divsel_fit_destroy(fit);
  if (!a.out_w.empty())
    check(divsel_write_matrix(a.out_w.c_str(), -1, w.data(), data.rows,
                              a.rank),
          "writing " + a.out_w);
  if (!a.out_h.empty())
    check(divsel_write_matrix(a.out_h.c_str(), -1, h.data(), a.rank,
                              data.cols),
          "writing " + a.out_h);
  return 0;
}

struct PnmfArgs {
  std::string data_path;
  double param = 0.0;
  int rank = 2;
  int iters = 100;
  std::uint64_t seed = 0;
  std::string out_w;
};

int run_pnmf(const PnmfArgs& a) {
  MatrixBuf data;
  read_data(a.data_path, &data);
  divsel_fit* fit = nullptr;
  check(divsel_pnmf(data.data, data.rows, data.cols, a.rank, a.param,
                    a.iters, a.seed, &fit),
        "pnmf fit");
  std::vector<double> w(static_cast<std::size_t>(data.rows) * a.rank);
  divsel_fit_w(fit, w.data());
  divsel_fit_destroy(fit);
  if (!a.out_w.empty())
    check(divsel_write_matrix(a.out_w.c_str(), -1, w.data(), data.rows,
                              a.rank),
          "writing " + a.out_w);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "divsel: information-divergence family selection by maximum "
      "likelihood or score matching"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cmd_gen = app.add_subcommand("gen", "generate a synthetic dataset");
  cmd_gen->add_option("--kind", gen.kind, "tweedie|multinomial|block");
  cmd_gen->add_option("--seed", gen.seed, "random seed");
  cmd_gen->add_option("--out", gen.out, "output CSV/TSV path")->required();
  cmd_gen->add_option("--power", gen.power, "tweedie variance power");
  cmd_gen->add_option("--mu", gen.mu, "tweedie mean");
  cmd_gen->add_option("--phi", gen.phi, "tweedie dispersion");
  cmd_gen->add_option("--n", gen.n, "tweedie sample count");
  cmd_gen->add_option("--dim", gen.dim, "multinomial dimension");
  cmd_gen->add_option("--trials", gen.trials, "multinomial trial count");

  SelectArgs sel;
  auto* cmd_sel =
      app.add_subcommand("select", "select the divergence family parameter");
  cmd_sel->add_option("--family", sel.family, "beta|alpha|gamma|renyi");
  cmd_sel->add_option("--data", sel.data_path, "input matrix")->required();
  cmd_sel->add_option("--model", sel.model,
                      "scalar|nmf|pnmf|precomputed (default scalar)");
  cmd_sel->add_option("--mu", sel.mu_path, "precomputed approximation");
  cmd_sel->add_option("--rank", sel.rank, "factorization rank");
  cmd_sel->add_option("--fit-iters", sel.fit_iters,
                      "factorization iterations per grid point");
  cmd_sel->add_option("--fit-seed", sel.fit_seed, "factorization init seed");
  cmd_sel->add_option("--grid", sel.grid,
                      "parameter grid lo:step:hi (default -2:0.05:2)");
  cmd_sel->add_option("--phi-grid", sel.phi_grid,
                      "dispersion grid lo:hi:count (default 1e-4:1e2:40)");
  cmd_sel->add_option("--quad-order", sel.quad_order,
                      "Gauss-Laguerre order (default 5000)");
  cmd_sel->add_option("--estimator", sel.estimator, "medal|sm");
  cmd_sel->add_option("--out", sel.out_report, "selection report JSON");
  cmd_sel->add_option("--curve", sel.out_curve, "profile curve CSV");

  NmfArgs nmf;
  auto* cmd_nmf = app.add_subcommand("nmf", "fit a multiplicative-update NMF");
  cmd_nmf->add_option("--data", nmf.data_path, "input matrix")->required();
  cmd_nmf->add_option("--family", nmf.family, "beta|alpha");
  cmd_nmf->add_option("--param", nmf.param, "divergence parameter");
  cmd_nmf->add_option("--rank", nmf.rank, "rank K");
  cmd_nmf->add_option("--iters", nmf.iters, "iterations");
  cmd_nmf->add_option("--seed", nmf.seed, "init seed");
  cmd_nmf->add_option("--mask", nmf.mask_path, "binary observation mask");
  cmd_nmf->add_option("--out-w", nmf.out_w, "output W path");
  cmd_nmf->add_option("--out-h", nmf.out_h, "output H path");

  PnmfArgs pnmf;
  auto* cmd_pnmf = app.add_subcommand("pnmf", "fit a projective NMF");
  cmd_pnmf->add_option("--data", pnmf.data_path, "input matrix")->required();
  cmd_pnmf->add_option("--param", pnmf.param, "gamma divergence parameter");
  cmd_pnmf->add_option("--rank", pnmf.rank, "rank K");
  cmd_pnmf->add_option("--iters", pnmf.iters, "iterations");
  cmd_pnmf->add_option("--seed", pnmf.seed, "init seed");
  cmd_pnmf->add_option("--out-w", pnmf.out_w, "output W path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::fputs(app.help().c_str(), stdout);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
    return 1;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_sel->parsed()) return run_select(sel);
    if (cmd_nmf->parsed()) return run_nmf(nmf);
    if (cmd_pnmf->parsed()) return run_pnmf(pnmf);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  }
  return 1;
}
