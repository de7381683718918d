#include "netcoh/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "netcoh/errors.hpp"
#include "netcoh/parallel.hpp"
#include "netcoh/rnc_glm.hpp"
#include "netcoh/rnc_linear.hpp"
#include "netcoh/sparsify.hpp"
#include "netcoh/theory.hpp"

namespace netcoh {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

Eigen::MatrixXd standard_normal_matrix(int n, int p, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = z(rng);
  return X;
}

Eigen::MatrixXd block_indicators(const std::vector<int>& labels, int K) {
  const int n = static_cast<int>(labels.size());
  std::vector<int> used;
  for (int k = 0; k < K; ++k)
    if (std::find(labels.begin(), labels.end(), k) != labels.end()) used.push_back(k);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(used.size()));
  for (int i = 0; i < n; ++i) {
    const auto it = std::find(used.begin(), used.end(), labels[i]);
    Z(i, it - used.begin()) = 1.0;
  }
  return Z;
}

// Scale c of uniform censoring times c*V such that round(target*n) of the
// event times exceed their censoring time.
double censoring_scale(const Eigen::VectorXd& T, const Eigen::VectorXd& V, double target) {
  const Eigen::Index n = T.size();
  const long want = std::lround(target * double(n));
  auto censored = [&](double c) {
    long k = 0;
    for (Eigen::Index i = 0; i < n; ++i) k += (c * V[i] < T[i]);
    return k;
  };
  double lo = std::log(T.minCoeff()) - 40.0, hi = std::log(T.maxCoeff() / V.minCoeff()) + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (censored(std::exp(mid)) > want)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(hi);
}

struct MethodResult {
  Eigen::VectorXd alpha, beta, mean;
  double lambda = 0.0;
};

std::vector<double> linspace_means(int K) {
  std::vector<double> eta(K, 0.0);
  for (int k = 0; k < K && K > 1; ++k) eta[k] = -1.0 + 2.0 * k / (K - 1);
  return eta;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void SimConfig::validate() const {
  if (n <= 0) throw InvalidInput("SimConfig: n must be positive");
  if (p <= 0) throw InvalidInput("SimConfig: p must be positive");
  if (eta.empty()) throw InvalidInput("SimConfig: eta must name at least one block mean");
  if (!(s >= 0.0) || !(sigma >= 0.0)) throw InvalidInput("SimConfig: s and sigma must be >= 0");
  if (!(censoring >= 0.0 && censoring < 1.0)) throw InvalidInput("SimConfig: censoring must lie in [0, 1)");
  if (replications <= 0) throw InvalidInput("SimConfig: replications must be positive");
  if (graph == GraphModel::sbm) {
    if (pi.size() != eta.size()) throw InvalidInput("SimConfig: pi and eta must have one entry per block");
    double total = 0.0;
    for (double x : pi) {
      if (!in_unit(x)) throw InvalidInput("SimConfig: block probabilities must lie in [0, 1]");
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("SimConfig: block probabilities must sum to 1");
    if (!in_unit(p_w) || !in_unit(p_b)) throw InvalidInput("SimConfig: edge probabilities must lie in [0, 1]");
  } else {
    if (component_sizes.size() != eta.size())
      throw InvalidInput("SimConfig: component_sizes and eta must have one entry per component");
    if (std::accumulate(component_sizes.begin(), component_sizes.end(), 0) != n)
      throw InvalidInput("SimConfig: component sizes must sum to n");
    if (!in_unit(p_edge)) throw InvalidInput("SimConfig: p_edge must lie in [0, 1]");
  }
}

SimConfig example1_config() {
  SimConfig cfg;
  cfg.graph = GraphModel::er_components;
  cfg.n = 300;
  cfg.component_sizes = {100, 100, 100};
  cfg.p_edge = 0.05;
  cfg.eta = {-1.0, 0.0, 1.0};
  cfg.s = 0.1;
  cfg.sigma = 0.5;
  cfg.p = 2;
  cfg.lambda = 0.1;
  return cfg;
}

Graph example1_expected_graph() {
  std::vector<Edge> edges;
  for (int c = 0; c < 3; ++c)
    for (int u = 0; u < 100; ++u)
      for (int v = u + 1; v < 100; ++v) edges.push_back({100 * c + u, 100 * c + v, 0.05});
  return from_edge_list(edges, 300);
}

GraphDraw sbm_generate(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  GraphDraw out;
  out.labels.resize(cfg.n);
  std::discrete_distribution<int> block(cfg.pi.begin(), cfg.pi.end());
  for (int& c : out.labels) c = block(rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (int i = 0; i < cfg.n; ++i)
    for (int j = i + 1; j < cfg.n; ++j)
      if (u(rng) < (out.labels[i] == out.labels[j] ? cfg.p_w : cfg.p_b)) edges.push_back({i, j, 1.0});
  out.graph = from_edge_list(edges, cfg.n);
  return out;
}

GraphDraw er_components_generate(const std::vector<int>& sizes, double p_edge, std::uint64_t seed) {
  if (!in_unit(p_edge)) throw InvalidInput("er_components_generate: p_edge must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GraphDraw out;
  std::vector<Edge> edges;
  int offset = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] < 0) throw InvalidInput("er_components_generate: negative component size");
    for (int i = 0; i < sizes[c]; ++i) {
      out.labels.push_back(static_cast<int>(c));
      for (int j = i + 1; j < sizes[c]; ++j)
        if (u(rng) < p_edge) edges.push_back({offset + i, offset + j, 1.0});
    }
    offset += sizes[c];
  }
  out.graph = from_edge_list(edges, offset);
  return out;
}

GraphDraw generate_graph(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.graph == GraphModel::sbm) return sbm_generate(cfg, seed);
  return er_components_generate(cfg.component_sizes, cfg.p_edge, seed);
}

SimData gen_data(const SimConfig& cfg, const std::vector<int>& labels, std::uint64_t seed) {
  cfg.validate();
  if (static_cast<int>(labels.size()) != cfg.n) throw InvalidInput("gen_data: one label per node required");
  for (int c : labels)
    if (c < 0 || c >= cfg.blocks()) throw InvalidInput("gen_data: label outside the block range");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  SimData d;
  d.alpha.resize(cfg.n);
  for (int i = 0; i < cfg.n; ++i) d.alpha[i] = cfg.eta[labels[i]] + cfg.s * z(rng);
  d.beta.resize(cfg.p);
  for (int j = 0; j < cfg.p; ++j) d.beta[j] = 1.0 + z(rng);
  const Eigen::MatrixXd raw = standard_normal_matrix(cfg.n, cfg.p, rng);
  d.X = Standardization::fit(raw).apply(raw);
  const Eigen::VectorXd eta = d.alpha + d.X * d.beta;

  switch (cfg.family) {
    case Family::linear: {
      Eigen::VectorXd Y = eta;
      for (int i = 0; i < cfg.n; ++i) Y[i] += cfg.sigma * z(rng);
      d.mean = eta;
      d.y = std::move(Y);
      break;
    }
    case Family::logistic: {
      d.mean = logistic(eta);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Eigen::VectorXd Y(cfg.n);
      for (int i = 0; i < cfg.n; ++i) Y[i] = u(rng) < d.mean[i] ? 1.0 : 0.0;
      d.y = std::move(Y);
      break;
    }
    case Family::cox: {
      d.mean = eta;
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Eigen::VectorXd T(cfg.n), V(cfg.n);
      for (int i = 0; i < cfg.n; ++i) T[i] = -std::log1p(-u(rng)) / std::exp(eta[i]);
      for (int i = 0; i < cfg.n; ++i) V[i] = 1.0 - u(rng);
      SurvivalData surv;
      surv.time = T;
      surv.event = Eigen::VectorXi::Ones(cfg.n);
      if (cfg.censoring > 0.0) {
        const double c = censoring_scale(T, V, cfg.censoring);
        for (int i = 0; i < cfg.n; ++i)
          if (c * V[i] < T[i]) {
            surv.time[i] = c * V[i];
            surv.event[i] = 0;
          }
      }
      d.y = std::move(surv);
      break;
    }
  }
  return d;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::baseline: return "baseline";
    case Method::rnc: return "rnc";
    case Method::null_model: return "null";
    case Method::oracle: return "oracle";
  }
  return "unknown";
}

namespace {

double tuned_lambda(const SimConfig& cfg, const SimData& d, const Graph& g, double gamma,
                    const ExperimentOptions& opts, std::uint64_t seed) {
  if (cfg.lambda > 0.0) return cfg.lambda;
  CvOptions cv;
  cv.k = opts.cv_folds;
  cv.seed = seed;
  cv.gamma = gamma;
  cv.threads = 1;
  std::vector<double> grid = opts.lambda_grid.empty() ? default_lambda_grid() : opts.lambda_grid;
  return kfold_cv(d.X, d.y, g, std::move(grid), cfg.family, cv).selected_lambda;
}

MethodResult fit_method(Method m, const SimConfig& cfg, const SimData& d, const GraphDraw& draw,
                        const ExperimentOptions& opts, std::uint64_t cv_seed) {
  const int n = cfg.n;
  const bool linear = cfg.family == Family::linear;
  MethodResult r;
  auto finish = [&](const FitCore& fit) {
    r.alpha = fit.alpha_hat;
    r.beta = fit.beta_hat;
    r.mean = linear ? fitted_values(fit, d.X) : logistic_predict_prob(fit, d.X, fit.alpha_hat);
  };
  switch (m) {
    case Method::baseline:
      if (linear)
        finish(ols_fit(d.X, std::get<Eigen::VectorXd>(d.y)));
      else
        finish(fit_plain_logistic(d.X, std::get<Eigen::VectorXd>(d.y)));
      break;
    case Method::rnc: {
      const double gamma = cfg.gamma >= 0.0 ? cfg.gamma : default_gamma(cfg.family);
      r.lambda = tuned_lambda(cfg, d, draw.graph, gamma, opts, cv_seed);
      const auto& y = std::get<Eigen::VectorXd>(d.y);
      if (linear)
        finish(fit_linear(d.X, y, draw.graph, r.lambda, gamma));
      else
        finish(fit_logistic(d.X, y, draw.graph, r.lambda, gamma));
      break;
    }
    case Method::null_model: {
      const Graph empty(n);
      r.lambda = tuned_lambda(cfg, d, empty, 1.0, opts, cv_seed);
      const auto& y = std::get<Eigen::VectorXd>(d.y);
      if (linear)
        finish(null_model_fit(d.X, y, r.lambda, 1.0));
      else
        finish(fit_logistic(d.X, y, empty, r.lambda, 1.0));
      break;
    }
    case Method::oracle: {
      const Eigen::MatrixXd Z = block_indicators(draw.labels, cfg.blocks());
      Eigen::MatrixXd design(n, Z.cols() + cfg.p);
      design << Z, d.X;
      const auto& y = std::get<Eigen::VectorXd>(d.y);
      const Eigen::VectorXd coef =
          linear ? Eigen::VectorXd(design.colPivHouseholderQr().solve(y)) : logistic_regression(design, y);
      r.alpha = Z * coef.head(Z.cols());
      r.beta = coef.tail(cfg.p);
      const Eigen::VectorXd eta = r.alpha + d.X * r.beta;
      r.mean = linear ? eta : logistic(eta);
      break;
    }
  }
  return r;
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const SimConfig& cfg, const std::vector<double>& s_grid,
                                          const ExperimentOptions& opts) {
  cfg.validate();
  if (cfg.family == Family::cox) throw InvalidInput("run_experiment: supports the linear and logistic families");
  if (s_grid.empty()) throw InvalidInput("run_experiment: empty s grid");
  for (double s : s_grid)
    if (!(s >= 0.0)) throw InvalidInput("run_experiment: s values must be >= 0");
  if (opts.methods.empty()) throw InvalidInput("run_experiment: no methods requested");

  // The baseline is always fitted; it anchors the improvements.
  std::vector<Method> methods = {Method::baseline};
  for (Method m : opts.methods)
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);

  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t cells = s_grid.size() * reps;
  std::vector<std::vector<ExperimentRow>> out(cells);

  // Graph and data seeds depend on the replication only, so every s value
  // sees the same networks and noise (alpha differs only through s).
  parallel_for(cells, [&](std::size_t cell) {
    const std::size_t si = cell / reps, rep = cell % reps;
    SimConfig c = cfg;
    c.s = s_grid[si];
    const std::uint64_t base = derive_seed(cfg.seed, rep);
    const GraphDraw draw = generate_graph(c, derive_seed(base, 0));
    const SimData d = gen_data(c, draw.labels, derive_seed(base, 1));

    std::vector<ExperimentRow>& rows = out[cell];
    for (Method m : methods) {
      ExperimentRow row;
      row.s = c.s;
      row.replication = static_cast<int>(rep);
      row.method = m;
      try {
        const MethodResult r = fit_method(m, c, d, draw, opts, derive_seed(base, 2));
        row.lambda = r.lambda;
        row.mse_alpha = (r.alpha - d.alpha).squaredNorm() / c.n;
        row.mse_beta = (r.beta - d.beta).squaredNorm() / c.p;
        row.mse_pred = (r.mean - d.mean).squaredNorm() / c.n;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
        row.mse_alpha = row.mse_beta = row.mse_pred = kNaN;
      }
      rows.push_back(std::move(row));
    }
    const ExperimentRow& base_row = rows.front();
    for (ExperimentRow& row : rows) {
      if (!row.ok || !base_row.ok) {
        row.improvement_alpha = row.improvement_beta = row.improvement_pred = kNaN;
        continue;
      }
      auto improve = [](double m, double b) { return b > 0.0 ? 1.0 - m / b : kNaN; };
      row.improvement_alpha = improve(row.mse_alpha, base_row.mse_alpha);
      row.improvement_beta = improve(row.mse_beta, base_row.mse_beta);
      row.improvement_pred = improve(row.mse_pred, base_row.mse_pred);
    }
  }, opts.threads);

  std::vector<ExperimentRow> rows;
  for (auto& cell : out)
    for (auto& row : cell) rows.push_back(std::move(row));
  return rows;
}

std::vector<ExperimentSummary> summarize(const std::vector<ExperimentRow>& rows) {
  // Baseline errors per (s, replication).
  std::map<std::pair<double, int>, const ExperimentRow*> baseline;
  for (const ExperimentRow& r : rows)
    if (r.method == Method::baseline && r.ok) baseline[{r.s, r.replication}] = &r;

  std::vector<ExperimentSummary> out;
  struct Acc {
    double a = 0, b = 0, p = 0;
    double pa = 0, pb = 0, pp = 0, ba = 0, bb = 0, bp = 0;
    int count = 0, paired = 0;
  };
  std::vector<Acc> acc;
  auto slot = [&](double s, Method m) -> std::size_t {
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i].s == s && out[i].method == m) return i;
    out.push_back({});
    out.back().s = s;
    out.back().method = m;
    acc.push_back({});
    return out.size() - 1;
  };
  for (const ExperimentRow& r : rows) {
    const std::size_t i = slot(r.s, r.method);
    if (!r.ok) continue;
    Acc& a = acc[i];
    a.a += r.mse_alpha;
    a.b += r.mse_beta;
    a.p += r.mse_pred;
    ++a.count;
    const auto it = baseline.find({r.s, r.replication});
    if (it == baseline.end()) continue;
    a.pa += r.mse_alpha;
    a.pb += r.mse_beta;
    a.pp += r.mse_pred;
    a.ba += it->second->mse_alpha;
    a.bb += it->second->mse_beta;
    a.bp += it->second->mse_pred;
    ++a.paired;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Acc& a = acc[i];
    ExperimentSummary& s = out[i];
    s.replications = a.count;
    s.mse_alpha = a.count ? a.a / a.count : kNaN;
    s.mse_beta = a.count ? a.b / a.count : kNaN;
    s.mse_pred = a.count ? a.p / a.count : kNaN;
    auto improve = [&](double m, double b) { return a.paired && b > 0.0 ? 1.0 - m / b : kNaN; };
    s.improvement_alpha = improve(a.pa, a.ba);
    s.improvement_beta = improve(a.pb, a.bb);
    s.improvement_pred = improve(a.pp, a.bp);
  }
  return out;
}

Graph dense_block_graph(int block_size, int blocks, double w_within, double w_between) {
  if (block_size <= 0 || blocks <= 0) throw InvalidInput("dense_block_graph: sizes must be positive");
  if (!(w_within > 0.0) || !(w_between > 0.0))
    throw InvalidInput("dense_block_graph: weights must be positive");
  const int n = block_size * blocks;
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      edges.push_back({u, v, u / block_size == v / block_size ? w_within : w_between});
  return from_edge_list(edges, n);
}

std::vector<SparsifyExperimentRow> sparsification_experiment(const SparsifyExperimentConfig& cfg,
                                                             const std::vector<double>& epsilon_grid,
                                                             std::uint64_t seed) {
  if (epsilon_grid.empty()) throw InvalidInput("sparsification_experiment: empty epsilon grid");
  const Graph g = dense_block_graph(cfg.block_size, cfg.blocks, cfg.w_within, cfg.w_between);
  const int n = g.node_count();

  SimConfig sim;
  sim.n = n;
  sim.eta = linspace_means(cfg.blocks);
  sim.pi.assign(cfg.blocks, 1.0 / cfg.blocks);
  sim.s = cfg.s;
  sim.sigma = cfg.sigma;
  sim.p = cfg.p;
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i / cfg.block_size;
  const SimData d = gen_data(sim, labels, derive_seed(seed, 0));
  const Eigen::VectorXd& Y = std::get<Eigen::VectorXd>(d.y);

  double lambda = cfg.lambda;
  if (!(lambda > 0.0)) {
    CvOptions cv;
    cv.seed = derive_seed(seed, 1);
    lambda = kfold_cv(d.X, d.y, g, default_lambda_grid(), Family::linear, cv).selected_lambda;
  }
  const LaplacianMatrix L = laplacian(g);
  const LinearFit dense = fit_linear(d.X, Y, L, lambda);
  const Eigen::MatrixXd Xs = dense.standardization.apply(d.X);
  const double m_dense = linear_strong_convexity(Xs, L, lambda);
  const double mse_a = (dense.alpha_hat - d.alpha).squaredNorm();
  const double mse_b = (dense.beta_hat - d.beta).squaredNorm();

  std::vector<SparsifyExperimentRow> rows;
  for (std::size_t k = 0; k < epsilon_grid.size(); ++k) {
    SparsifyOptions so;
    so.oversampling = cfg.oversampling;
    so.verify = true;
    const SparsifyResult sp = spectral_sparsify(g, epsilon_grid[k], derive_seed(seed, 100 + k), so);
    const LaplacianMatrix Ls = laplacian(sp.graph_star);
    const LinearFit star = fit_linear(d.X, Y, Ls, lambda);

    SparsifyExperimentRow row;
    row.epsilon = epsilon_grid[k];
    row.lambda = lambda;
    row.samples = sp.samples;
    row.edges = g.edge_count();
    row.edges_kept = sp.edges_kept;
    row.zero_fraction = 1.0 - double(sp.edges_kept) / double(g.edge_count());
    row.measured_epsilon = sp.certificate.measured_epsilon;
    row.verified = sp.certificate.verified;
    Eigen::VectorXd diff(n + cfg.p);
    diff << star.alpha_hat - dense.alpha_hat, star.beta_hat - dense.beta_hat;
    row.observed_sq_diff = diff.squaredNorm();
    if (row.measured_epsilon < 0.5) {
      const double m = std::min(m_dense, linear_strong_convexity(Xs, Ls, lambda));
      const SparsificationBound b =
          sparsification_bound(dense.alpha_hat, dense.beta_hat, star.alpha_hat, star.beta_hat, L, Ls, lambda,
                               std::max(row.measured_epsilon, 1e-12), m);
      row.bound = b.bound;
      row.bound_essential = b.bound_essential;
    } else {
      row.bound = row.bound_essential = kNaN;
    }
    row.improvement_alpha = 1.0 - (star.alpha_hat - d.alpha).squaredNorm() / mse_a;
    row.improvement_beta = 1.0 - (star.beta_hat - d.beta).squaredNorm() / mse_b;
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << std::setprecision(17);
  os << "s,replication,method,lambda,mse_alpha,mse_beta,mse_pred,improvement_alpha,improvement_beta,"
        "improvement_pred,status\n";
  for (const ExperimentRow& r : rows) {
    os << r.s << ',' << r.replication << ',' << to_string(r.method) << ',' << r.lambda << ',' << r.mse_alpha
       << ',' << r.mse_beta << ',' << r.mse_pred << ',' << r.improvement_alpha << ',' << r.improvement_beta
       << ',' << r.improvement_pred << ',';
    if (r.ok) {
      os << "ok\n";
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      os << "\"failed: " << msg << "\"\n";
    }
  }
}

void write_csv(std::ostream& os, const std::vector<ExperimentSummary>& rows) {
  os << std::setprecision(17);
  os << "s,method,replications,mse_alpha,mse_beta,mse_pred,improvement_alpha,improvement_beta,"
        "improvement_pred\n";
  for (const ExperimentSummary& r : rows)
    os << r.s << ',' << to_string(r.method) << ',' << r.replications << ',' << r.mse_alpha << ','
       << r.mse_beta << ',' << r.mse_pred << ',' << r.improvement_alpha << ',' << r.improvement_beta << ','
       << r.improvement_pred << '\n';
}

void write_csv(std::ostream& os, const std::vector<SparsifyExperimentRow>& rows) {
  os << std::setprecision(17);
  os << "epsilon,lambda,samples,edges,edges_kept,zero_fraction,measured_epsilon,verified,observed_sq_diff,"
        "bound,bound_essential,improvement_alpha,improvement_beta\n";
  for (const SparsifyExperimentRow& r : rows)
    os << r.epsilon << ',' << r.lambda << ',' << r.samples << ',' << r.edges << ',' << r.edges_kept << ','
       << r.zero_fraction << ',' << r.measured_epsilon << ',' << (r.verified ? "true" : "false") << ','
       << r.observed_sq_diff << ',' << r.bound << ',' << r.bound_essential << ',' << r.improvement_alpha << ','
       << r.improvement_beta << '\n';
}

}  // namespace netcoh
