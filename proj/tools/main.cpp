// stabcert: certify near-optimality and stability of clusterings via convex
// sublevel-set relaxations.
#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "stabcert/certify.hpp"
#include "stabcert/clusterers.hpp"
#include "stabcert/io.hpp"
#include "stabcert/losses.hpp"
#include "stabcert/metrics.hpp"
#include "stabcert/population.hpp"
#include "stabcert/synth.hpp"

using namespace stabcert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;  // computed, but no guarantee obtained

int thread_count() {
  if (const char* env = std::getenv("STABCERT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::uint64_t row_seed(std::uint64_t base, int row) {
  return base + 7919ull * static_cast<std::uint64_t>(row);
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::string token;
  std::istringstream ss(csv);
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(std::stod(token));
  }
  if (out.empty()) throw std::invalid_argument("empty list: " + csv);
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_list(csv)) out.push_back(static_cast<int>(v));
  return out;
}

void emit_json(const nlohmann::json& j, const std::string& out_path) {
  const std::string body = j.dump(2);
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error(out_path + ": cannot open for writing");
    f << body << "\n";
  }
  std::cout << body << "\n";
}

SolveOptions solve_options(double tol, double gap_tol, int max_iter, bool trace) {
  SolveOptions o;
  o.eps_primal = tol;
  o.eps_dual = tol;
  o.eps_gap = gap_tol;
  o.max_iter = max_iter;
  if (trace) {
    o.trace = [](const TraceRecord& r) {
      std::fprintf(stderr,
                   "{\"iter\":%d,\"primal\":%.3e,\"dual\":%.3e,\"gap\":%.3e,"
                   "\"obj\":%.10g}\n",
                   r.iteration, r.primal_res, r.dual_res, r.gap, r.objective);
    };
  }
  return o;
}

Clustering load_clustering(const std::string& labels_path) {
  return Clustering::from_labels(read_labels(labels_path));
}

struct CsvWriter {
  explicit CsvWriter(const std::string& path) : out(path) {
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.precision(17);
  }
  std::ofstream out;
};

// Runs `work(row)` for rows [0, count) on a small pool; results land in a
// caller-owned vector so output order stays deterministic.
void parallel_rows(int count, const std::function<void(int)>& work) {
  const int threads = std::min(thread_count(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

// ---- gen ----------------------------------------------------------------

struct GenArgs {
  int n = 200, k = 4, d = 2;
  double sigma = 0.6, sep = 4.0 * std::sqrt(2.0), spacing = 3.0;
  double within = 1.0, between = 0.1, noise = 0.0;
  std::string props, sizes, geometry = "simplex", out = "data";
  std::uint64_t seed = 1;
};

int run_gen(const std::string& kind, const GenArgs& a) {
  std::vector<double> props;
  if (!a.props.empty()) {
    props = parse_list(a.props);
  } else {
    props.assign(a.k, 1.0 / a.k);
    for (int i = 0; i < a.k; ++i) props[i] = 1.0 / a.k;
  }
  if (kind == "gauss" || kind == "nonnormal") {
    LabeledDataset gen =
        kind == "gauss"
            ? gaussian_mixture(a.n, a.k, a.d, a.sigma, props,
                               a.geometry == "line" ? CenterGeometry::Line
                                                    : CenterGeometry::Simplex,
                               a.sep, a.seed)
            : non_normal_mixture(a.n, a.k, a.d, a.sigma, props, a.seed);
    write_points_csv(a.out + ".csv", gen.data.points());
    write_labels(a.out + ".labels", gen.labels);
  } else if (kind == "balls") {
    const LabeledDataset gen = stochastic_ball(a.n, a.k, a.d, a.spacing, a.seed);
    write_points_csv(a.out + ".csv", gen.data.points());
    write_labels(a.out + ".labels", gen.labels);
  } else {  // blocksim
    std::vector<int> sizes;
    if (!a.sizes.empty()) sizes = parse_int_list(a.sizes);
    SimilarityGraph g = block_similarity(a.n, a.k, sizes, a.within, a.between, a.seed);
    if (a.noise > 0.0) g = perturb_similarity(g, a.noise, a.seed + 1);
    write_similarity_csv(a.out + ".csv", g.weights());
    write_labels(a.out + ".labels", block_labels(a.n, a.k, sizes));
  }
  std::cerr << "wrote " << a.out << ".csv and " << a.out << ".labels\n";
  return kExitOk;
}

// ---- experiments ---------------------------------------------------------

struct ExperimentRow {
  std::string prefix;
  Certificate cert;
  double em_truth = 0.0;
};

int run_experiment(const std::string& kind, int reps, int n,
                   const std::string& grid_csv, std::uint64_t seed,
                   const std::string& out_path, const SolveOptions& base_opts) {
  std::vector<double> grid;
  if (!grid_csv.empty()) {
    grid = parse_list(grid_csv);
  } else if (kind == "table1") {
    grid = {0.6, 0.8};
  } else if (kind == "balls") {
    grid = {1.4, 1.8, 2.2, 2.6, 3.0};
  } else {
    grid = {0.5, 1.0, 2.0};
  }
  const int rows = static_cast<int>(grid.size()) * reps;
  std::vector<ExperimentRow> results(rows);

  parallel_rows(rows, [&](int row) {
    const int gi = row / reps;
    const int rep = row % reps;
    const double param = grid[gi];
    const std::uint64_t s = row_seed(seed, row);
    SolveOptions opts = base_opts;
    ExperimentRow r;
    char prefix[160];

    if (kind == "table1") {
      const auto gen =
          gaussian_mixture(n, 4, 15, param, {0.1, 0.2, 0.3, 0.4},
                           CenterGeometry::Simplex, 4.0 * std::sqrt(2.0), s);
      KMeansOptions ko;
      ko.seed = s + 1;
      const Clustering c = lloyd_kmeans(gen.data, 4, ko);
      const Matrix d = squared_distance_matrix(gen.data);
      r.cert = certify_kmeans_sdp(d, c, 0.0, opts);
      r.em_truth = em_distance(c, Clustering(gen.labels, 4));
    } else if (kind == "balls") {
      const auto gen = stochastic_ball(n, 4, 2, param, s);
      KMeansOptions ko;
      ko.init = KMeansInit::Labels;
      ko.init_labels = gen.labels;
      const Clustering c = lloyd_kmeans(gen.data, 4, ko);
      const Matrix d = squared_distance_matrix(gen.data);
      r.cert = certify_kmeans_sdp(d, c, 0.0, opts);
      r.em_truth = em_distance(c, Clustering(gen.labels, 4));
    } else {  // ncut-noise
      SimilarityGraph g = block_similarity(n, 5, {}, 1.0, 0.1, s);
      if (param > 0.0) g = perturb_similarity(g, param, s + 1);
      const Clustering c = spectral_ncut(g, 5, s + 2);
      r.cert = certify_ncut_sdp(g, c, 0.0, opts);
      r.em_truth = weighted_em_distance(c, Clustering(block_labels(n, 5, {}), 5),
                                        g.degrees());
    }
    std::snprintf(prefix, sizeof(prefix), "%.17g,%d,%d,%llu", param, n, rep,
                  static_cast<unsigned long long>(s));
    r.prefix = prefix;
    results[row] = std::move(r);
  });

  CsvWriter csv(out_path);
  const char* param_name = kind == "balls" ? "spacing" : "sigma";
  csv.out << param_name
          << ",n,rep,seed,epsilon,kappa_lb,valid,em_to_truth,wall_time_s\n";
  for (const auto& r : results) {
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%d,%.17g,%.6f",
                  r.prefix.c_str(), r.cert.epsilon, r.cert.kappa_lb,
                  r.cert.valid ? 1 : 0, r.em_truth, r.cert.wall_time_s);
    csv.out << line << "\n";
  }
  std::cerr << "wrote " << rows << " rows to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  // Keep LAPACK reductions single-threaded so reruns are bit-identical;
  // parallelism lives at the instance level (experiment worker pool).
  setenv("OPENBLAS_NUM_THREADS", "1", /*overwrite=*/0);

  CLI::App app{
      "stabcert: optimality and stability certificates for clusterings via "
      "convex sublevel-set relaxations"};
  app.require_subcommand(1);

  // Shared solver flags.
  double tol = 1e-6, gap_tol = 1e-5;
  int max_iter = 100000;
  bool trace = false;

  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--tol", tol, "primal/dual feasibility tolerance");
    cmd->add_option("--gap-tol", gap_tol, "duality gap tolerance");
    cmd->add_option("--max-iter", max_iter, "solver iteration cap");
    cmd->add_flag("--trace", trace,
                  "stream solver progress to stderr as JSON lines");
  };

  // gen -------------------------------------------------------------------
  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "generate synthetic data");
  gen->require_subcommand(1);
  std::string gen_kind;
  for (const char* kind : {"gauss", "nonnormal", "balls", "blocksim"}) {
    auto* sub = gen->add_subcommand(kind);
    sub->add_option("--n", ga.n, "number of points/nodes");
    sub->add_option("--k", ga.k, "number of clusters");
    sub->add_option("--seed", ga.seed, "random seed");
    sub->add_option("--out", ga.out, "output file prefix");
    if (std::string(kind) == "gauss" || std::string(kind) == "nonnormal") {
      sub->add_option("--d", ga.d, "dimension");
      sub->add_option("--sigma", ga.sigma, "noise standard deviation");
      sub->add_option("--props", ga.props, "cluster proportions, e.g. .1,.2,.3,.4");
    }
    if (std::string(kind) == "gauss") {
      sub->add_option("--geometry", ga.geometry, "simplex | line");
      sub->add_option("--sep", ga.sep, "pairwise center separation");
    }
    if (std::string(kind) == "balls") {
      sub->add_option("--d", ga.d, "dimension");
      sub->add_option("--spacing", ga.spacing, "center spacing on the line");
    }
    if (std::string(kind) == "blocksim") {
      sub->add_option("--sizes", ga.sizes, "block sizes, e.g. 20,20,20,20,20");
      sub->add_option("--within", ga.within, "within-block similarity");
      sub->add_option("--between", ga.between, "between-block similarity");
      sub->add_option("--noise", ga.noise,
                      "multiplicative noise amplitude (entries scale by "
                      "1+noise*u, u~U[0,1))");
    }
    sub->callback([&, kind] { gen_kind = kind; });
  }

  // cluster -----------------------------------------------------------------
  std::string cl_data, cl_sim, cl_init = "kmeanspp", cl_init_labels, cl_out;
  int cl_k = 2, cl_max_iter = 100;
  std::uint64_t cl_seed = 0;
  auto* cluster = app.add_subcommand("cluster", "produce a clustering");
  cluster->require_subcommand(1);
  std::string cluster_kind;
  {
    auto* km = cluster->add_subcommand("kmeans", "Lloyd's algorithm");
    km->add_option("--data", cl_data, "points CSV")->required();
    km->add_option("--k", cl_k, "clusters")->required();
    km->add_option("--seed", cl_seed, "random seed");
    km->add_option("--init", cl_init, "kmeanspp | random | labels");
    km->add_option("--init-labels", cl_init_labels, "label file for --init labels");
    km->add_option("--max-iter", cl_max_iter, "Lloyd iteration cap");
    km->add_option("--out", cl_out, "output label file")->required();
    km->callback([&] { cluster_kind = "kmeans"; });

    auto* sp = cluster->add_subcommand("spectral", "spectral NCut clustering");
    sp->add_option("--sim", cl_sim, "similarity CSV (dense or i,j,w)")->required();
    sp->add_option("--k", cl_k, "clusters")->required();
    sp->add_option("--seed", cl_seed, "random seed");
    sp->add_option("--out", cl_out, "output label file")->required();
    sp->callback([&] { cluster_kind = "spectral"; });
  }

  // certify -----------------------------------------------------------------
  std::string ce_data, ce_sim, ce_labels, ce_out, ce_cone = "kmeans-sdp";
  double ce_delta = 0.0, ce_alpha = 0.1, ce_lambda = 1.0;
  auto* certify = app.add_subcommand("certify", "compute a stability certificate");
  certify->require_subcommand(1);
  std::string certify_kind;
  for (const char* kind : {"kmeans-sdp", "kmeans-lp", "ncut-sdp", "ss2",
                           "pairwise", "resilience"}) {
    auto* sub = certify->add_subcommand(kind);
    const bool is_ncut = std::string(kind) == "ncut-sdp";
    if (is_ncut) {
      sub->add_option("--sim", ce_sim, "similarity CSV")->required();
    } else if (std::string(kind) == "ss2" || std::string(kind) == "pairwise") {
      sub->add_option("--data", ce_data, "points CSV");
      sub->add_option("--sim", ce_sim, "similarity CSV");
      sub->add_option("--cone", ce_cone,
                      "kmeans-sdp | kmeans-lp | ncut-sdp (default from input)");
    } else {
      sub->add_option("--data", ce_data, "points CSV")->required();
    }
    sub->add_option("--labels", ce_labels, "clustering label file")->required();
    if (std::string(kind) != "resilience" && std::string(kind) != "pairwise") {
      sub->add_option("--delta", ce_delta,
                      "excess-loss slack in loss units (K-means loss for "
                      "kmeans cones, NCut loss for ncut-sdp)");
    }
    if (std::string(kind) == "pairwise") {
      sub->add_option("--alpha", ce_alpha,
                      "level slack above the relaxed optimum, in loss units");
    }
    if (std::string(kind) == "resilience") {
      sub->add_option("--alpha", ce_alpha, "distance dilation factor");
      sub->add_option("--lambda", ce_lambda,
                      "Lipschitz constant of the loss in D");
    }
    sub->add_option("--out", ce_out, "also write the certificate JSON here");
    add_solver_flags(sub);
    sub->callback([&, kind] { certify_kind = kind; });
  }

  // test-stability ------------------------------------------------------------
  std::string ts_data, ts_labels, ts_out;
  double ts_delta = 0.0, ts_confidence = 0.05, ts_psi_const = 0.0;
  auto* ts = app.add_subcommand(
      "test-stability", "population (Delta, epsilon)-instability test");
  ts->add_option("--data", ts_data, "points CSV")->required();
  ts->add_option("--labels", ts_labels, "clustering label file")->required();
  ts->add_option("--delta", ts_delta, "excess-loss tolerance Delta (loss units)");
  ts->add_option("--confidence", ts_confidence, "type-I error bound delta");
  ts->add_option("--psi-const", ts_psi_const,
                 "c for the demo deviation bound psi = c/sqrt(n)");
  ts->add_option("--out", ts_out, "also write the outcome JSON here");
  add_solver_flags(ts);

  // dist ----------------------------------------------------------------------
  std::string d_a, d_b, d_weights, d_sim;
  auto* dist = app.add_subcommand("dist", "distance between two clusterings");
  dist->require_subcommand(1);
  std::string dist_kind;
  {
    auto* em = dist->add_subcommand("em", "earth mover's distance");
    em->add_option("a", d_a, "first label file")->required();
    em->add_option("b", d_b, "second label file")->required();
    em->callback([&] { dist_kind = "em"; });
    auto* wem = dist->add_subcommand("wem", "weighted earth mover's distance");
    wem->add_option("a", d_a, "first label file")->required();
    wem->add_option("b", d_b, "second label file")->required();
    wem->add_option("--weights", d_weights, "one weight per line");
    wem->add_option("--sim", d_sim, "similarity CSV, weights = node degrees");
    wem->callback([&] { dist_kind = "wem"; });
  }

  // experiment ------------------------------------------------------------------
  int ex_reps = 5, ex_n = 0;
  std::string ex_grid, ex_out = "experiment.csv";
  std::uint64_t ex_seed = 1;
  auto* ex = app.add_subcommand("experiment", "batch certification runs (CSV)");
  ex->require_subcommand(1);
  std::string ex_kind;
  for (const char* kind : {"table1", "balls", "ncut-noise"}) {
    auto* sub = ex->add_subcommand(kind);
    sub->add_option("--reps", ex_reps, "replications per grid point");
    sub->add_option("--n", ex_n, "sample size (default per experiment)");
    sub->add_option("--grid", ex_grid,
                    "comma-separated sigma (or spacing) grid override");
    sub->add_option("--seed", ex_seed, "base seed");
    sub->add_option("--out", ex_out, "output CSV path")->required();
    add_solver_flags(sub);
    sub->callback([&, kind] { ex_kind = kind; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (!gen_kind.empty()) return run_gen(gen_kind, ga);

    if (!cluster_kind.empty()) {
      if (cluster_kind == "kmeans") {
        const Dataset ds = read_points_csv(cl_data);
        KMeansOptions o;
        o.seed = cl_seed;
        o.max_iter = cl_max_iter;
        if (cl_init == "kmeanspp") {
          o.init = KMeansInit::KMeansPP;
        } else if (cl_init == "random") {
          o.init = KMeansInit::Random;
        } else if (cl_init == "labels") {
          o.init = KMeansInit::Labels;
          o.init_labels = read_labels(cl_init_labels);
        } else {
          throw std::invalid_argument("unknown --init " + cl_init);
        }
        const Clustering c = lloyd_kmeans(ds, cl_k, o);
        write_labels(cl_out, c.labels());
      } else {
        const SimilarityGraph g = read_similarity(cl_sim);
        const Clustering c = spectral_ncut(g, cl_k, cl_seed);
        write_labels(cl_out, c.labels());
      }
      return kExitOk;
    }

    if (!certify_kind.empty()) {
      const SolveOptions opts = solve_options(tol, gap_tol, max_iter, trace);
      const Clustering c = load_clustering(ce_labels);
      Certificate cert;
      if (certify_kind == "kmeans-sdp" || certify_kind == "kmeans-lp") {
        const Dataset ds = read_points_csv(ce_data);
        const Matrix d = squared_distance_matrix(ds);
        const double delta = 2.0 * ds.n() * ce_delta;  // loss -> <D, X> units
        cert = certify_kind == "kmeans-sdp"
                   ? certify_kmeans_sdp(d, c, delta, opts)
                   : certify_kmeans_lp(d, c, delta, opts);
      } else if (certify_kind == "ncut-sdp") {
        const SimilarityGraph g = read_similarity(ce_sim);
        cert = certify_ncut_sdp(g, c, ce_delta, opts);
      } else if (certify_kind == "ss2" || certify_kind == "pairwise") {
        const bool graph_input = !ce_sim.empty();
        Matrix loss;
        std::optional<Vector> degrees;
        ConeVariant cone = ConeVariant::KMeansSdp;
        double scale = 1.0;
        if (graph_input) {
          const SimilarityGraph g = read_similarity(ce_sim);
          loss = normalized_laplacian(g);
          degrees = g.degrees();
          cone = ConeVariant::NCutSdp;
        } else {
          if (ce_data.empty()) {
            throw std::invalid_argument("need --data or --sim");
          }
          const Dataset ds = read_points_csv(ce_data);
          loss = squared_distance_matrix(ds);
          scale = 2.0 * ds.n();
          cone = ce_cone == "kmeans-lp" ? ConeVariant::KMeansLp
                                        : ConeVariant::KMeansSdp;
        }
        const Vector* deg = degrees ? &*degrees : nullptr;
        if (certify_kind == "ss2") {
          cert = certify_ss2(loss, c, cone, opts, scale * ce_delta, deg).certificate;
        } else {
          cert = pairwise_stability(loss, cone, c, scale * ce_alpha, opts, deg);
        }
      } else {  // resilience
        const Dataset ds = read_points_csv(ce_data);
        const Matrix d = squared_distance_matrix(ds);
        cert = resilience_certificate(d, c, ce_lambda, ce_alpha, opts).certificate;
      }
      emit_json(to_json(cert), ce_out);
      return cert.valid ? kExitOk : kExitInvalid;
    }

    if (ts->parsed()) {
      const SolveOptions opts = solve_options(tol, gap_tol, max_iter, trace);
      const Dataset ds = read_points_csv(ts_data);
      const Clustering c = load_clustering(ts_labels);
      const Matrix d = squared_distance_matrix(ds);
      const TestOutcome out = stability_test(
          d, c, ts_delta, ts_confidence, constant_over_sqrt_n(ts_psi_const), opts);
      emit_json(to_json(out), ts_out);
      return out.reject ? kExitOk : kExitInvalid;
    }

    if (!dist_kind.empty()) {
      const Clustering a = load_clustering(d_a);
      const Clustering b = load_clustering(d_b);
      double value = 0.0;
      if (dist_kind == "em") {
        value = em_distance(a, b);
      } else if (!d_sim.empty()) {
        value = weighted_em_distance(a, b, read_similarity(d_sim).degrees());
      } else if (!d_weights.empty()) {
        value = weighted_em_distance(a, b, read_weights(d_weights));
      } else {
        throw std::invalid_argument("wem needs --weights or --sim");
      }
      std::printf("%.17g\n", value);
      return kExitOk;
    }

    if (!ex_kind.empty()) {
      const SolveOptions opts = solve_options(tol, gap_tol, max_iter, trace);
      if (ex_n == 0) ex_n = ex_kind == "ncut-noise" ? 100 : 200;
      return run_experiment(ex_kind, ex_reps, ex_n, ex_grid, ex_seed, ex_out, opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
