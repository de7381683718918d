#include "netcoh/rnc_glm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "netcoh/errors.hpp"
#include "netcoh/model_selection.hpp"

namespace netcoh {
namespace {

double softplus(double eta) { return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

void check_binary(const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0 && y[i] != 1.0)
      throw InvalidInput("logistic response must be 0 or 1 (entry " + std::to_string(i) + ")");
}

void check_penalty(double lambda, double gamma, const char* who) {
  if (!(lambda > 0.0)) throw InvalidInput(std::string(who) + ": lambda must be positive");
  if (!(gamma > 0.0)) throw InvalidInput(std::string(who) + ": gamma must be positive");
}

Eigen::VectorXd start_or_zero(const Eigen::VectorXd& init, Eigen::Index n) {
  return init.size() == n ? init : Eigen::VectorXd::Zero(n);
}

// Sums over Breslow risk sets in O(n) after one sort by time.
class RiskSets {
 public:
  explicit RiskSets(const SurvivalData& s) : n_(s.size()), order_(static_cast<std::size_t>(n_)) {
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return s.time[a] < s.time[b]; });
    begin_.resize(order_.size());
    end_.resize(order_.size());
    std::size_t k = 0;
    while (k < order_.size()) {
      std::size_t e = k + 1;
      while (e < order_.size() && s.time[order_[e]] == s.time[order_[k]]) ++e;
      for (std::size_t j = k; j < e; ++j) {
        begin_[j] = k;
        end_[j] = e;
      }
      k = e;
    }
    event_ = s.event.cast<double>();
  }

  // out_u = sum_{w: t_w >= t_u} a_w
  Eigen::VectorXd at_risk_sum(const Eigen::VectorXd& a) const {
    std::vector<double> suffix(order_.size() + 1, 0.0);
    for (std::size_t k = order_.size(); k-- > 0;) suffix[k] = suffix[k + 1] + a[order_[k]];
    Eigen::VectorXd out(n_);
    for (std::size_t k = 0; k < order_.size(); ++k) out[order_[k]] = suffix[begin_[k]];
    return out;
  }

  // out_u = sum_{v event: t_v <= t_u} c_v
  Eigen::VectorXd event_cumsum(const Eigen::VectorXd& c) const {
    std::vector<double> prefix(order_.size() + 1, 0.0);
    for (std::size_t k = 0; k < order_.size(); ++k)
      prefix[k + 1] = prefix[k] + event_[order_[k]] * c[order_[k]];
    Eigen::VectorXd out(n_);
    for (std::size_t k = 0; k < order_.size(); ++k) out[order_[k]] = prefix[end_[k]];
    return out;
  }

  const Eigen::VectorXd& event() const { return event_; }

 private:
  Eigen::Index n_;
  std::vector<int> order_;
  std::vector<std::size_t> begin_, end_;
  Eigen::VectorXd event_;
};

// Partial log-likelihood pieces at a linear predictor eta.
struct CoxState {
  double loglik = 0.0;
  Eigen::VectorXd expo;      // exp(eta - max eta)
  Eigen::VectorXd risk;      // at-risk sums of expo
  Eigen::VectorXd hazard;    // event_cumsum(event / risk)
  Eigen::VectorXd grad_eta;  // event - expo * hazard
};

CoxState cox_state(const RiskSets& rs, const Eigen::VectorXd& eta) {
  CoxState st;
  const double shift = eta.size() ? eta.maxCoeff() : 0.0;
  st.expo = (eta.array() - shift).exp();
  st.risk = rs.at_risk_sum(st.expo);
  const Eigen::VectorXd& ev = rs.event();
  for (Eigen::Index v = 0; v < eta.size(); ++v)
    if (ev[v] > 0.0) st.loglik += eta[v] - shift - std::log(st.risk[v]);
  st.hazard = rs.event_cumsum(st.risk.cwiseInverse());
  st.grad_eta = ev - st.expo.cwiseProduct(st.hazard);
  return st;
}

// y = W x with W the negative Hessian of the partial log-likelihood in eta.
Eigen::VectorXd cox_weight_apply(const RiskSets& rs, const CoxState& st, const Eigen::VectorXd& x) {
  const Eigen::VectorXd s = rs.at_risk_sum(st.expo.cwiseProduct(x)).cwiseQuotient(st.risk);
  const Eigen::VectorXd c = rs.event_cumsum(s.cwiseQuotient(st.risk));
  return st.expo.cwiseProduct(st.hazard).cwiseProduct(x) - st.expo.cwiseProduct(c);
}

Eigen::VectorXd cox_weight_diag(const RiskSets& rs, const CoxState& st) {
  const Eigen::VectorXd second = rs.event_cumsum(st.risk.cwiseProduct(st.risk).cwiseInverse());
  return st.expo.cwiseProduct(st.hazard) - st.expo.cwiseProduct(st.expo).cwiseProduct(second);
}

void check_cox_inputs(const Eigen::MatrixXd& X, const SurvivalData& surv) {
  surv.validate();
  if (X.rows() != surv.size()) throw InvalidInput("survival data length does not match the design");
}

}  // namespace

// --- survival data ------------------------------------------------------------

void SurvivalData::validate() const {
  if (time.size() != event.size()) throw InvalidInput("time and event vectors differ in length");
  for (Eigen::Index i = 0; i < time.size(); ++i) {
    if (!(time[i] > 0.0) || !std::isfinite(time[i]))
      throw InvalidInput("survival time " + std::to_string(i) + " is not positive");
    if (event[i] != 0 && event[i] != 1)
      throw InvalidInput("event indicator " + std::to_string(i) + " is not 0 or 1");
  }
  if (event.sum() == 0) throw ModelFailure("no events observed: every observation is censored");
}

SurvivalData SurvivalData::subset(std::span<const NodeId> ids) const {
  SurvivalData out;
  out.time.resize(static_cast<Eigen::Index>(ids.size()));
  out.event.resize(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.time[static_cast<Eigen::Index>(i)] = time[ids[i]];
    out.event[static_cast<Eigen::Index>(i)] = event[ids[i]];
  }
  return out;
}

// --- logistic -----------------------------------------------------------------

Eigen::VectorXd logistic(const Eigen::VectorXd& eta) {
  return eta.unaryExpr([](double e) {
    const double c = std::clamp(e, -kEtaClip, kEtaClip);
    return 1.0 / (1.0 + std::exp(-c));
  });
}

double logistic_penalized_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const LaplacianMatrix& L, double lambda,
                                    const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = alpha + X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
  return ll - lambda * cohesion_penalty(L, alpha);
}

Eigen::VectorXd logistic_penalized_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                            const LaplacianMatrix& L, double lambda,
                                            const Eigen::VectorXd& alpha,
                                            const Eigen::VectorXd& beta) {
  const Eigen::VectorXd resid = y - logistic(alpha + X * beta);
  Eigen::VectorXd g(alpha.size() + beta.size());
  g.head(alpha.size()) = resid - 2.0 * lambda * cohesion_gradient(L, alpha);
  g.tail(beta.size()) = X.transpose() * resid;
  return g;
}

GlmFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LaplacianMatrix& L,
                    double lambda, const GlmOptions& opts) {
  check_penalty(lambda, L.ridge(), "fit_logistic");
  check_binary(y);
  if (X.rows() != y.size() || y.size() != L.dim())
    throw InvalidInput("fit_logistic: design, response and graph sizes differ");

  GlmFit fit;
  fit.family = Family::logistic;
  fit.lambda = lambda;
  fit.gamma = L.ridge();
  fit.standardization = Standardization::fit(X);
  const Eigen::MatrixXd Xs = fit.standardization.apply(X);
  const Eigen::Index n = Xs.rows(), p = Xs.cols();

  Eigen::VectorXd alpha = start_or_zero(opts.init_alpha, n);
  Eigen::VectorXd beta = start_or_zero(opts.init_beta, p);
  auto objective = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return logistic_penalized_objective(Xs, y, L, lambda, a, b);
  };
  double f = objective(alpha, beta);

  for (;;) {
    const Eigen::VectorXd prob = logistic(alpha + Xs * beta);
    const Eigen::VectorXd resid = y - prob;
    const Eigen::VectorXd g_alpha = resid - 2.0 * lambda * (L.matrix() * alpha);
    const Eigen::VectorXd g_beta = Xs.transpose() * resid;
    fit.gradient_norm = std::sqrt(g_alpha.squaredNorm() + g_beta.squaredNorm());
    if (fit.gradient_norm <= opts.tol) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= opts.max_iter) break;

    const Eigen::VectorXd w =
        prob.cwiseProduct((1.0 - prob.array()).matrix()).cwiseMax(kWeightFloor);
    const BlockSolution dir = block_solve(L, Xs, w, 2.0 * lambda, g_alpha, g_beta, opts.pcg);

    double step = 1.0;
    Eigen::VectorXd a_new = alpha + dir.a1, b_new = beta + dir.a2;
    double f_new = objective(a_new, b_new);
    const double slack = 1e-12 * std::max(1.0, std::abs(f));
    int halvings = 0;
    while (!(f_new >= f - slack) && halvings < opts.max_halvings) {
      step *= 0.5;
      ++halvings;
      a_new = alpha + step * dir.a1;
      b_new = beta + step * dir.a2;
      f_new = objective(a_new, b_new);
    }
    if (!(f_new >= f - slack)) break;  // step-halving exhausted
    alpha = std::move(a_new);
    beta = std::move(b_new);
    f = f_new;
    ++fit.iterations;
    fit.objective_trace.push_back(f);
  }

  fit.alpha_hat = std::move(alpha);
  fit.beta_hat = std::move(beta);
  fit.objective = f;
  return fit;
}

GlmFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Graph& g,
                    double lambda, double gamma, const GlmOptions& opts) {
  check_penalty(lambda, gamma, "fit_logistic");
  return fit_logistic(X, y, laplacian(g, gamma), lambda, opts);
}

Eigen::VectorXd logistic_predict_prob(const FitCore& fit, const Eigen::MatrixXd& X_new,
                                      const Eigen::VectorXd& alpha_new) {
  return logistic(fit.linear_predictor(X_new, alpha_new));
}

Eigen::VectorXd logistic_regression(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                    int max_iter, double tol) {
  check_binary(y);
  const Eigen::Index k = design.cols();
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(k);
  auto loglik = [&](const Eigen::VectorXd& c) {
    const Eigen::VectorXd eta = design * c;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
    return ll;
  };
  double f = loglik(coef);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd prob = logistic(design * coef);
    const Eigen::VectorXd grad = design.transpose() * (y - prob);
    if (grad.norm() <= tol * std::max<double>(1.0, static_cast<double>(y.size()))) {
      if ((y - prob).cwiseAbs().maxCoeff() < 1e-6)
        throw ModelFailure("logistic_regression: the classes are perfectly separated");
      return coef;
    }
    const Eigen::VectorXd w = prob.cwiseProduct((1.0 - prob.array()).matrix()).cwiseMax(kWeightFloor);
    const Eigen::MatrixXd H = design.transpose() * w.asDiagonal() * design;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success) throw ModelFailure("logistic_regression: singular information");
    const Eigen::VectorXd dir = ldlt.solve(grad);
    double step = 1.0;
    Eigen::VectorXd next = coef + dir;
    double f_next = loglik(next);
    for (int h = 0; h < 20 && !(f_next >= f - 1e-12 * std::max(1.0, std::abs(f))); ++h) {
      step *= 0.5;
      next = coef + step * dir;
      f_next = loglik(next);
    }
    coef = std::move(next);
    f = f_next;
  }
  throw ModelFailure("logistic_regression did not converge (possible separation)");
}

GlmFit fit_plain_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw InvalidInput("fit_plain_logistic: size mismatch");
  GlmFit fit;
  fit.family = Family::logistic;
  fit.standardization = Standardization::fit(X);
  Eigen::MatrixXd design(X.rows(), X.cols() + 1);
  design << Eigen::VectorXd::Ones(X.rows()), fit.standardization.apply(X);
  const Eigen::VectorXd coef = logistic_regression(design, y);
  fit.alpha_hat = Eigen::VectorXd::Constant(y.size(), coef[0]);
  fit.beta_hat = coef.tail(X.cols());
  fit.converged = true;
  return fit;
}

// --- Cox ----------------------------------------------------------------------

double cox_partial_loglik(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                          const Eigen::MatrixXd& X, const SurvivalData& surv) {
  check_cox_inputs(X, surv);
  if (alpha.size() != X.rows() || beta.size() != X.cols())
    throw InvalidInput("cox_partial_loglik: parameter sizes do not match the design");
  const RiskSets rs(surv);
  return cox_state(rs, alpha + X * beta).loglik;
}

double cox_penalized_objective(const Eigen::MatrixXd& X, const SurvivalData& surv,
                               const LaplacianMatrix& L, double lambda,
                               const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
  return cox_partial_loglik(alpha, beta, X, surv) - lambda * cohesion_penalty(L, alpha);
}

Eigen::VectorXd cox_penalized_gradient(const Eigen::MatrixXd& X, const SurvivalData& surv,
                                       const LaplacianMatrix& L, double lambda,
                                       const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
  check_cox_inputs(X, surv);
  const RiskSets rs(surv);
  const CoxState st = cox_state(rs, alpha + X * beta);
  Eigen::VectorXd g(alpha.size() + beta.size());
  g.head(alpha.size()) = st.grad_eta - 2.0 * lambda * cohesion_gradient(L, alpha);
  g.tail(beta.size()) = X.transpose() * st.grad_eta;
  return g;
}

GlmFit fit_cox(const Eigen::MatrixXd& X, const SurvivalData& surv, const LaplacianMatrix& L,
               double lambda, const GlmOptions& opts) {
  check_penalty(lambda, L.ridge(), "fit_cox");
  check_cox_inputs(X, surv);
  if (surv.size() != L.dim()) throw InvalidInput("fit_cox: survival data and graph sizes differ");

  GlmFit fit;
  fit.family = Family::cox;
  fit.lambda = lambda;
  fit.gamma = L.ridge();
  fit.standardization = Standardization::fit(X);
  const Eigen::MatrixXd Xs = fit.standardization.apply(X);
  const Eigen::Index n = Xs.rows(), p = Xs.cols();
  const RiskSets rs(surv);
  const SparseMatrix& Lm = L.matrix();
  const Eigen::VectorXd Ldiag = Lm.diagonal();

  Eigen::VectorXd alpha = start_or_zero(opts.init_alpha, n);
  Eigen::VectorXd beta = start_or_zero(opts.init_beta, p);
  alpha.array() -= alpha.mean();
  auto objective = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return cox_state(rs, a + Xs * b).loglik - lambda * a.dot(Lm * a);
  };
  double f = objective(alpha, beta);

  for (;;) {
    const CoxState st = cox_state(rs, alpha + Xs * beta);
    Eigen::VectorXd grad(n + p);
    grad.head(n) = st.grad_eta - 2.0 * lambda * (Lm * alpha);
    grad.tail(p) = Xs.transpose() * st.grad_eta;
    fit.gradient_norm = grad.norm();
    if (fit.gradient_norm <= opts.tol) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= opts.max_iter) break;

    // Newton direction: (X~' W X~ + 2 lambda M) d = grad, solved matrix-free.
    const LinearOperator hess = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
      const Eigen::VectorXd u = cox_weight_apply(rs, st, v.head(n) + Xs * v.tail(p));
      out.resize(n + p);
      out.head(n) = u + 2.0 * lambda * (Lm * v.head(n));
      out.tail(p) = Xs.transpose() * u;
    };
    const Eigen::VectorXd wdiag = cox_weight_diag(rs, st).cwiseMax(0.0);
    Eigen::VectorXd diag(n + p);
    diag.head(n) = wdiag + 2.0 * lambda * Ldiag;
    diag.tail(p) = (Xs.array().square().colwise() * wdiag.array()).colwise().sum().transpose();
    const auto [dir, rep] = pcg_solve(hess, diag, grad, opts.pcg);

    double step = 1.0;
    Eigen::VectorXd a_new = alpha + dir.head(n), b_new = beta + dir.tail(p);
    double f_new = objective(a_new, b_new);
    const double slack = 1e-12 * std::max(1.0, std::abs(f));
    int halvings = 0;
    while (!(f_new >= f - slack) && halvings < opts.max_halvings) {
      step *= 0.5;
      ++halvings;
      a_new = alpha + step * dir.head(n);
      b_new = beta + step * dir.tail(p);
      f_new = objective(a_new, b_new);
    }
    if (!(f_new >= f - slack)) break;
    // The partial likelihood ignores a common shift of alpha and the ridge
    // strictly prefers the centred representative, so centring never lowers f.
    a_new.array() -= a_new.mean();
    alpha = std::move(a_new);
    beta = std::move(b_new);
    f = objective(alpha, beta);
    ++fit.iterations;
    fit.objective_trace.push_back(f);
  }

  fit.alpha_hat = std::move(alpha);
  fit.beta_hat = std::move(beta);
  fit.objective = f;
  return fit;
}

GlmFit fit_cox(const Eigen::MatrixXd& X, const SurvivalData& surv, const Graph& g, double lambda,
               double gamma, const GlmOptions& opts) {
  check_penalty(lambda, gamma, "fit_cox");
  return fit_cox(X, surv, laplacian(g, gamma), lambda, opts);
}

CoxRegression cox_regression(const Eigen::MatrixXd& design, const SurvivalData& surv,
                             int max_iter, double tol) {
  check_cox_inputs(design, surv);
  const RiskSets rs(surv);
  const Eigen::Index p = design.cols();
  CoxRegression out;
  out.beta = Eigen::VectorXd::Zero(p);
  auto info_at = [&](const CoxState& st) {
    Eigen::MatrixXd WX(design.rows(), p);
    for (Eigen::Index j = 0; j < p; ++j) WX.col(j) = cox_weight_apply(rs, st, design.col(j));
    Eigen::MatrixXd info = design.transpose() * WX;
    return (0.5 * (info + info.transpose())).eval();
  };
  CoxState st = cox_state(rs, design * out.beta);
  for (int it = 0; it <= max_iter; ++it) {
    const Eigen::VectorXd grad = design.transpose() * st.grad_eta;
    out.information = info_at(st);
    out.loglik = st.loglik;
    if (grad.norm() <= tol * std::max<double>(1.0, static_cast<double>(design.rows()))) return out;
    if (it == max_iter) break;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(out.information);
    if (ldlt.info() != Eigen::Success) throw ModelFailure("cox_regression: singular information");
    const Eigen::VectorXd dir = ldlt.solve(grad);
    double step = 1.0;
    CoxState next = cox_state(rs, design * (out.beta + dir));
    for (int h = 0; h < 20 && !(next.loglik >= st.loglik - 1e-12 * std::max(1.0, std::abs(st.loglik))); ++h) {
      step *= 0.5;
      next = cox_state(rs, design * (out.beta + step * dir));
    }
    out.beta += step * dir;
    st = std::move(next);
  }
  throw ModelFailure("cox_regression did not converge");
}

GlmFit fit_plain_cox(const Eigen::MatrixXd& X, const SurvivalData& surv) {
  GlmFit fit;
  fit.family = Family::cox;
  fit.standardization = Standardization::fit(X);
  const CoxRegression reg = cox_regression(fit.standardization.apply(X), surv);
  fit.alpha_hat = Eigen::VectorXd::Zero(X.rows());
  fit.beta_hat = reg.beta;
  fit.objective = reg.loglik;
  fit.converged = true;
  return fit;
}

double ppl_metric(const FitCore& fit_train, const Eigen::MatrixXd& X_all,
                  const SurvivalData& surv_all, std::span<const NodeId> train_ids,
                  std::span<const NodeId> test_ids, const Graph& g_all) {
  if (test_ids.empty()) return 0.0;
  if (fit_train.alpha_hat.size() != static_cast<Eigen::Index>(train_ids.size()))
    throw InvalidInput("ppl_metric: fit does not match the training ids");

  std::vector<NodeId> ids(train_ids.begin(), train_ids.end());
  ids.insert(ids.end(), test_ids.begin(), test_ids.end());
  const Graph sub = g_all.induced_subgraph(ids);
  std::vector<NodeId> local_test(test_ids.size());
  std::iota(local_test.begin(), local_test.end(), static_cast<NodeId>(train_ids.size()));
  const LaplacianBlocks blocks = split_for_prediction(sub, local_test);
  const Eigen::VectorXd alpha_test = predict_new_nodes(fit_train.alpha_hat, blocks, fit_train.gamma);

  Eigen::MatrixXd X_sub(static_cast<Eigen::Index>(ids.size()), X_all.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) X_sub.row(static_cast<Eigen::Index>(i)) = X_all.row(ids[i]);
  Eigen::VectorXd alpha_sub(static_cast<Eigen::Index>(ids.size()));
  alpha_sub << fit_train.alpha_hat, alpha_test;
  const Eigen::VectorXd eta = fit_train.linear_predictor(X_sub, alpha_sub);

  const SurvivalData surv_sub = surv_all.subset(ids);
  const SurvivalData surv_train = surv_all.subset(train_ids);
  const Eigen::Index n1 = static_cast<Eigen::Index>(train_ids.size());
  const Eigen::MatrixXd none(eta.size(), 0);
  const double l_all = cox_partial_loglik(eta, Eigen::VectorXd(0), none, surv_sub);
  const double l_train =
      cox_partial_loglik(eta.head(n1), Eigen::VectorXd(0), none.topRows(n1), surv_train);
  return l_all - l_train;
}

}  // namespace netcoh
