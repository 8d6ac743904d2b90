#include "spr/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "spr/dist.hpp"
#include "spr/errors.hpp"

namespace spr {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kVClamp = 1e-12;

double clamp_stick(double v) { return std::clamp(v, kVClamp, 1.0 - kVClamp); }

// appends one prior-drawn cluster slot (stick, intercept, covariate probs)
void append_prior_cluster(MCMCState& state, const Hyperparameters& hyper, Rng& rng) {
  state.V.push_back(clamp_stick(rng.beta(1.0, state.alpha)));
  state.theta.push_back(rng.student_t(hyper.t_df, hyper.mu_theta, hyper.sigma_theta));
  ClusterCovariateParams params;
  for (const auto& aj : hyper.a) params.phi.push_back(rng.dirichlet(aj));
  state.phi.push_back(std::move(params));
}

void extend_truncation(MCMCState& state, const Hyperparameters& hyper, Rng& rng) {
  double residual = state.residual_stick_mass();
  int guard = 0;
  while (residual >= kStickResidualTol) {
    if (++guard > 100000)
      throw NumericalError("stick truncation failed to converge (alpha too large?)");
    append_prior_cluster(state, hyper, rng);
    residual *= 1.0 - state.V.back();
  }
  recompute_weights(state);
}

}  // namespace

void recompute_weights(MCMCState& state) {
  const int C = state.C_total();
  state.psi.assign(C, 0.0);
  double remaining = 1.0;
  for (int c = 0; c < C; ++c) {
    state.psi[c] = state.V[c] * remaining;
    remaining *= 1.0 - state.V[c];
  }
}

int MCMCState::n_occupied() const {
  const auto counts = occupancy();
  int k = 0;
  for (int c : counts)
    if (c > 0) ++k;
  return k;
}

std::vector<int> MCMCState::occupancy() const {
  std::vector<int> counts(C_total(), 0);
  for (int zi : z) ++counts[zi];
  return counts;
}

double MCMCState::residual_stick_mass() const {
  double r = 1.0;
  for (double v : V) r *= 1.0 - v;
  return r;
}

double JointLogDensity::total() const {
  return response_lik + covariate_lik + z_given_psi + v_given_alpha + alpha_prior +
         phi_prior + theta_prior + beta_prior + tauY_prior + u_given_tau + tau_prior;
}

JointLogDensity joint_log_density(const MCMCState& state, const Dataset& data,
                                  const Hyperparameters& hyper, bool spatial_enabled) {
  JointLogDensity j;
  const int n = data.n();
  const int p = data.n_fixed_effects();
  for (int i = 0; i < n; ++i) {
    const int c = state.z[i];
    const std::vector<double> empty_w;
    const double lambda = linear_predictor(
        state.theta[c], state.globals.beta,
        p > 0 ? std::span<const double>(data.w[i]) : std::span<const double>(empty_w),
        state.spatial.u[i]);
    if (data.response_kind == ResponseKind::gaussian) {
      j.response_lik += gaussian_log_likelihood(data.y[i], lambda, state.globals.sigmaY2);
    } else {
      j.response_lik += poisson_log_likelihood(data.y[i], data.offsets[i], lambda);
    }
    j.covariate_lik += covariate_log_likelihood(data.x[i], state.phi[c]);
    j.z_given_psi += std::log(state.psi[c]);
  }
  for (int c = 0; c < state.C_total(); ++c) {
    j.v_given_alpha += beta_log_pdf(state.V[c], 1.0, state.alpha);
    j.theta_prior += t_log_pdf(state.theta[c], hyper.mu_theta, hyper.sigma_theta,
                               hyper.t_df);
    for (std::size_t jx = 0; jx < hyper.a.size(); ++jx)
      j.phi_prior += dirichlet_log_pdf(state.phi[c].phi[jx], hyper.a[jx]);
  }
  j.alpha_prior = gamma_log_pdf(state.alpha, hyper.s_alpha, hyper.r_alpha);
  for (double b : state.globals.beta)
    j.beta_prior += t_log_pdf(b, hyper.mu_beta, hyper.sigma_beta, hyper.t_df);
  if (data.response_kind == ResponseKind::gaussian)
    j.tauY_prior = gamma_log_pdf(state.globals.tauY, hyper.s_tauY, hyper.r_tauY);
  if (spatial_enabled) {
    const double rank = data.graph.icar_rank();
    j.u_given_tau = 0.5 * rank * std::log(state.spatial.tau) -
                    0.5 * state.spatial.tau * quadratic_form(state.spatial.u, data.graph);
    j.tau_prior = gamma_log_pdf(state.spatial.tau, hyper.a_tau, hyper.b_tau);
  }
  return j;
}

MCMCState init_state(const Dataset& data, const Hyperparameters& hyper,
                     int n_init_clusters, bool spatial_enabled, Rng& rng) {
  if (n_init_clusters < 2)
    throw InputError("init_state: n_init_clusters must be at least 2");
  MCMCState state;
  state.alpha = rng.gamma(hyper.s_alpha, hyper.r_alpha);
  for (int c = 0; c < n_init_clusters; ++c) append_prior_cluster(state, hyper, rng);
  extend_truncation(state, hyper, rng);
  const int p = data.n_fixed_effects();
  state.globals.beta.resize(p);
  for (int k = 0; k < p; ++k)
    state.globals.beta[k] = rng.student_t(hyper.t_df, hyper.mu_beta, hyper.sigma_beta);
  if (data.response_kind == ResponseKind::gaussian)
    state.globals.set_tauY(rng.gamma(hyper.s_tauY, hyper.r_tauY));
  state.spatial.u.assign(data.n(), 0.0);
  state.spatial.tau = spatial_enabled ? rng.gamma(hyper.a_tau, hyper.b_tau) : 1.0;
  state.z.resize(data.n());
  for (int i = 0; i < data.n(); ++i) state.z[i] = rng.uniform_int(n_init_clusters);
  return state;
}

AllocationSums sample_allocations(MCMCState& state, const Dataset& data, Rng& rng) {
  const int n = data.n();
  const int C = state.C_total();
  const int J = data.n_covariates();
  const int p = data.n_fixed_effects();
  const bool gaussian = data.response_kind == ResponseKind::gaussian;

  // per-cluster log phi tables and log psi
  std::vector<std::vector<std::vector<double>>> log_phi(C);
  std::vector<double> log_psi(C);
  for (int c = 0; c < C; ++c) {
    log_psi[c] = std::log(state.psi[c]);
    log_phi[c].resize(J);
    for (int jx = 0; jx < J; ++jx) {
      const auto& phi = state.phi[c].phi[jx];
      log_phi[c][jx].resize(phi.size());
      for (std::size_t k = 0; k < phi.size(); ++k)
        log_phi[c][jx][k] = phi[k] > 0.0 ? std::log(phi[k])
                                         : -std::numeric_limits<double>::infinity();
    }
  }

  AllocationSums sums;
  std::vector<double> logw(C);
  const double sigmaY2 = state.globals.sigmaY2;
  for (int i = 0; i < n; ++i) {
    double base = state.spatial.u[i];
    for (int k = 0; k < p; ++k) base += state.globals.beta[k] * data.w[i][k];
    const double lgamma_y = gaussian ? 0.0 : std::lgamma(data.y[i] + 1.0);
    for (int c = 0; c < C; ++c) {
      double cov_ll = 0.0;
      for (int jx = 0; jx < J; ++jx) cov_ll += log_phi[c][jx][data.x[i][jx]];
      double resp_ll;
      const double lambda = state.theta[c] + base;
      if (gaussian) {
        resp_ll = normal_log_pdf(data.y[i], lambda, sigmaY2);
      } else {
        resp_ll = data.y[i] * (std::log(data.offsets[i]) + lambda) -
                  data.offsets[i] * std::exp(lambda) - lgamma_y;
      }
      logw[c] = log_psi[c] + cov_ll + resp_ll;
    }
    int c;
    try {
      c = rng.categorical_logits(logw);
    } catch (const std::runtime_error&) {
      throw NumericalError("sample_allocations: zero weight everywhere for area " +
                           std::to_string(i));
    }
    state.z[i] = c;
    double cov_ll = 0.0;
    for (int jx = 0; jx < J; ++jx) cov_ll += log_phi[c][jx][data.x[i][jx]];
    sums.covariate_ll += cov_ll;
    sums.response_ll += logw[c] - log_psi[c] - cov_ll;
    sums.z_given_psi += log_psi[c];
  }
  return sums;
}

void sample_sticks(MCMCState& state, const Hyperparameters& hyper, Rng& rng) {
  const int C = state.C_total();
  const auto counts = state.occupancy();
  // suffix counts: number of areas allocated beyond cluster c
  std::vector<long> beyond(C, 0);
  long acc = 0;
  for (int c = C - 1; c >= 0; --c) {
    beyond[c] = acc;
    acc += counts[c];
  }
  for (int c = 0; c < C; ++c) {
    state.V[c] = clamp_stick(
        rng.beta(1.0 + counts[c], state.alpha + static_cast<double>(beyond[c])));
  }
  extend_truncation(state, hyper, rng);
}

double sample_alpha(const std::vector<double>& V, double s_alpha, double r_alpha,
                    Rng& rng) {
  if (V.empty()) return rng.gamma(s_alpha, r_alpha);
  double sum_log1mv = 0.0;
  for (double v : V) sum_log1mv += std::log1p(-v);
  return rng.gamma(s_alpha + static_cast<double>(V.size()), r_alpha - sum_log1mv);
}

void label_swap_move(MCMCState& state, std::vector<AdaptiveStep>* theta_steps,
                     Rng& rng) {
  const int C = state.C_total();
  if (C < 2) return;
  const int c1 = rng.uniform_int(C);
  int c2 = rng.uniform_int(C - 1);
  if (c2 >= c1) ++c2;
  long n1 = 0, n2 = 0;
  for (int zi : state.z) {
    if (zi == c1) ++n1;
    if (zi == c2) ++n2;
  }
  const double log_ratio = static_cast<double>(n2 - n1) *
                           (std::log(state.psi[c1]) - std::log(state.psi[c2]));
  if (rng.uniform() >= mh_accept_probability(log_ratio)) return;
  std::swap(state.theta[c1], state.theta[c2]);
  std::swap(state.phi[c1], state.phi[c2]);
  if (theta_steps) std::swap((*theta_steps)[c1], (*theta_steps)[c2]);
  for (int& zi : state.z) {
    if (zi == c1)
      zi = c2;
    else if (zi == c2)
      zi = c1;
  }
}

std::vector<int> occupancy_relabel(const MCMCState& state) {
  const auto counts = state.occupancy();
  const int C = state.C_total();
  std::vector<int> order(C);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return counts[a] > counts[b]; });
  std::vector<int> new_label(C);
  for (int r = 0; r < C; ++r) new_label[order[r]] = r;
  return new_label;
}

ProfileRegressionSampler::ProfileRegressionSampler(const Dataset& data,
                                                   const Hyperparameters& hyper,
                                                   bool spatial_enabled,
                                                   std::uint64_t seed,
                                                   int n_init_clusters)
    : data_(&data),
      hyper_(&hyper),
      spatial_enabled_(spatial_enabled),
      rng_(seed),
      state_(init_state(data, hyper, n_init_clusters, spatial_enabled, rng_)) {
  hyper.validate();
  if (static_cast<int>(hyper.a.size()) != data.n_covariates())
    throw InputError("hyperparameters: Dirichlet vectors do not match covariates");
  for (int jx = 0; jx < data.n_covariates(); ++jx)
    if (static_cast<int>(hyper.a[jx].size()) != data.n_categories[jx])
      throw InputError("hyperparameters: Dirichlet vector length mismatch");
  resize_step_slots();
  beta_steps_.resize(data.n_fixed_effects());
  if (data.response_kind == ResponseKind::poisson) {
    lgamma_y_.resize(data.n());
    for (int i = 0; i < data.n(); ++i) lgamma_y_[i] = std::lgamma(data.y[i] + 1.0);
  }
}

void ProfileRegressionSampler::resize_step_slots() {
  const bool frozen = !theta_steps_.empty() && theta_steps_.front().frozen;
  while (static_cast<int>(theta_steps_.size()) < state_.C_total()) {
    AdaptiveStep s;
    s.frozen = frozen;
    theta_steps_.push_back(s);
  }
}

void ProfileRegressionSampler::freeze_adaptation() {
  for (auto& s : theta_steps_) s.frozen = true;
  for (auto& s : beta_steps_) s.frozen = true;
}

void ProfileRegressionSampler::set_debug_checks(bool on) {
  debug_checks_ = on;
  if (on) components_ = joint_log_density(state_, *data_, *hyper_, spatial_enabled_);
}

double ProfileRegressionSampler::theta_acceptance_rate() const {
  long prop = 0, acc = 0;
  for (const auto& s : theta_steps_) {
    prop += s.n_proposed;
    acc += s.n_accepted;
  }
  return prop == 0 ? 0.0 : static_cast<double>(acc) / static_cast<double>(prop);
}

double ProfileRegressionSampler::beta_acceptance_rate() const {
  long prop = 0, acc = 0;
  for (const auto& s : beta_steps_) {
    prop += s.n_proposed;
    acc += s.n_accepted;
  }
  return prop == 0 ? 0.0 : static_cast<double>(acc) / static_cast<double>(prop);
}

void ProfileRegressionSampler::sweep() {
  const Dataset& data = *data_;
  const Hyperparameters& hyper = *hyper_;
  const int n = data.n();
  const int p = data.n_fixed_effects();
  const bool gaussian = data.response_kind == ResponseKind::gaussian;

  auto response_lik_full = [&]() {
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      double lambda = state_.theta[state_.z[i]] + state_.spatial.u[i];
      for (int k = 0; k < p; ++k) lambda += state_.globals.beta[k] * data.w[i][k];
      if (gaussian)
        ll += normal_log_pdf(data.y[i], lambda, state_.globals.sigmaY2);
      else
        ll += data.y[i] * (std::log(data.offsets[i]) + lambda) -
              data.offsets[i] * std::exp(lambda) - lgamma_y_[i];
    }
    return ll;
  };
  auto theta_prior_full = [&]() {
    double lp = 0.0;
    for (double t : state_.theta)
      lp += t_log_pdf(t, hyper.mu_theta, hyper.sigma_theta, hyper.t_df);
    return lp;
  };

  // 1. allocations
  const auto sums = sample_allocations(state_, data, rng_);
  if (debug_checks_) {
    components_.covariate_lik = sums.covariate_ll;
    components_.response_lik = sums.response_ll;
    components_.z_given_psi = sums.z_given_psi;
  }

  // 2. sticks (with truncation extension)
  sample_sticks(state_, hyper, rng_);
  resize_step_slots();
  if (debug_checks_) {
    double zp = 0.0;
    for (int zi : state_.z) zp += std::log(state_.psi[zi]);
    components_.z_given_psi = zp;
    double va = 0.0;
    for (double v : state_.V) va += beta_log_pdf(v, 1.0, state_.alpha);
    components_.v_given_alpha = va;
    components_.theta_prior = theta_prior_full();
    double pp = 0.0;
    for (const auto& cp : state_.phi)
      for (std::size_t jx = 0; jx < hyper.a.size(); ++jx)
        pp += dirichlet_log_pdf(cp.phi[jx], hyper.a[jx]);
    components_.phi_prior = pp;
  }

  // 3. concentration
  state_.alpha = sample_alpha(state_.V, hyper.s_alpha, hyper.r_alpha, rng_);
  if (debug_checks_) {
    components_.alpha_prior = gamma_log_pdf(state_.alpha, hyper.s_alpha, hyper.r_alpha);
    double va = 0.0;
    for (double v : state_.V) va += beta_log_pdf(v, 1.0, state_.alpha);
    components_.v_given_alpha = va;
  }

  // 4. covariate probabilities per cluster
  {
    const int C = state_.C_total();
    std::vector<std::vector<const std::vector<int>*>> members(C);
    for (int i = 0; i < n; ++i) members[state_.z[i]].push_back(&data.x[i]);
    for (int c = 0; c < C; ++c)
      state_.phi[c] = sample_phi(members[c], hyper.a, data.n_categories, rng_);
    if (debug_checks_) {
      double pp = 0.0, cl = 0.0;
      for (const auto& cp : state_.phi)
        for (std::size_t jx = 0; jx < hyper.a.size(); ++jx)
          pp += dirichlet_log_pdf(cp.phi[jx], hyper.a[jx]);
      for (int i = 0; i < n; ++i)
        cl += covariate_log_likelihood(data.x[i], state_.phi[state_.z[i]]);
      components_.phi_prior = pp;
      components_.covariate_lik = cl;
    }
  }

  // 5. cluster intercepts
  {
    const int C = state_.C_total();
    std::vector<ThetaSuffStats> stats(C);
    std::vector<int> counts(C, 0);
    for (int i = 0; i < n; ++i) {
      const int c = state_.z[i];
      ++counts[c];
      double base = state_.spatial.u[i];
      for (int k = 0; k < p; ++k) base += state_.globals.beta[k] * data.w[i][k];
      if (gaussian) {
        stats[c].count += 1.0;
        stats[c].sum_resid += data.y[i] - base;
      } else {
        stats[c].sum_y += data.y[i];
        stats[c].sum_scaled_offset += data.offsets[i] * std::exp(base);
      }
    }
    for (int c = 0; c < C; ++c) {
      state_.theta[c] =
          sample_theta(state_.theta[c], data.response_kind, stats[c], counts[c] == 0,
                       state_.globals.sigmaY2, hyper, theta_steps_[c], rng_);
    }
    if (debug_checks_) {
      components_.theta_prior = theta_prior_full();
      components_.response_lik = response_lik_full();
    }
  }

  // 6. fixed effects
  if (p > 0) {
    std::vector<double> resid, mu;
    if (gaussian) {
      resid.resize(n);
      for (int i = 0; i < n; ++i) {
        double lambda = state_.theta[state_.z[i]] + state_.spatial.u[i];
        for (int k = 0; k < p; ++k) lambda += state_.globals.beta[k] * data.w[i][k];
        resid[i] = data.y[i] - lambda;
      }
    } else {
      mu.resize(n);
      for (int i = 0; i < n; ++i) {
        double lambda = state_.theta[state_.z[i]] + state_.spatial.u[i];
        for (int k = 0; k < p; ++k) lambda += state_.globals.beta[k] * data.w[i][k];
        mu[i] = data.offsets[i] * std::exp(lambda);
      }
    }
    sample_beta(state_.globals.beta, data.response_kind, data, resid, mu,
                state_.globals.sigmaY2, hyper, beta_steps_, rng_);
    if (debug_checks_) {
      double bp = 0.0;
      for (double b : state_.globals.beta)
        bp += t_log_pdf(b, hyper.mu_beta, hyper.sigma_beta, hyper.t_df);
      components_.beta_prior = bp;
      components_.response_lik = response_lik_full();
    }
  }

  // 7. Gaussian noise precision
  if (gaussian) {
    std::vector<double> resid(n);
    for (int i = 0; i < n; ++i) {
      double lambda = state_.theta[state_.z[i]] + state_.spatial.u[i];
      for (int k = 0; k < p; ++k) lambda += state_.globals.beta[k] * data.w[i][k];
      resid[i] = data.y[i] - lambda;
    }
    state_.globals.set_tauY(sample_tauY(resid, hyper.s_tauY, hyper.r_tauY, rng_));
    if (debug_checks_) {
      components_.tauY_prior =
          gamma_log_pdf(state_.globals.tauY, hyper.s_tauY, hyper.r_tauY);
      components_.response_lik = response_lik_full();
    }
  }

  // 8-10. spatial field, recentering, precision
  if (spatial_enabled_) {
    auto& u = state_.spatial.u;
    for (int i = 0; i < n; ++i) {
      if (data.graph.degree(i) == 0) continue;  // pinned: no conditional exists
      double base = state_.theta[state_.z[i]];
      for (int k = 0; k < p; ++k) base += state_.globals.beta[k] * data.w[i][k];
      if (gaussian) {
        u[i] = sample_u_gaussian(i, data.y[i] - base, state_.globals.sigmaY2, u,
                                 state_.spatial.tau, data.graph, rng_);
      } else {
        u[i] = sample_u_poisson(i, data.y[i], data.offsets[i] * std::exp(base), u,
                                state_.spatial.tau, data.graph, rng_);
      }
    }
    recenter(u, state_.theta);
    if (debug_checks_) {
      const double rank = data.graph.icar_rank();
      components_.u_given_tau =
          0.5 * rank * std::log(state_.spatial.tau) -
          0.5 * state_.spatial.tau * quadratic_form(u, data.graph);
      components_.response_lik = response_lik_full();
      components_.theta_prior = theta_prior_full();
    }
    state_.spatial.tau =
        sample_tau(u, data.graph, hyper.a_tau, hyper.b_tau, rng_);
    if (debug_checks_) {
      components_.tau_prior =
          gamma_log_pdf(state_.spatial.tau, hyper.a_tau, hyper.b_tau);
      const double rank = data.graph.icar_rank();
      components_.u_given_tau =
          0.5 * rank * std::log(state_.spatial.tau) -
          0.5 * state_.spatial.tau * quadratic_form(u, data.graph);
    }
  }

  // 11. label move
  label_swap_move(state_, &theta_steps_, rng_);
  if (debug_checks_) {
    double zp = 0.0;
    for (int zi : state_.z) zp += std::log(state_.psi[zi]);
    components_.z_given_psi = zp;

    const auto full = joint_log_density(state_, data, hyper, spatial_enabled_);
    auto track = [&](double a, double b) {
      max_bookkeeping_error_ = std::max(max_bookkeeping_error_, std::fabs(a - b));
    };
    track(components_.response_lik, full.response_lik);
    track(components_.covariate_lik, full.covariate_lik);
    track(components_.z_given_psi, full.z_given_psi);
    track(components_.v_given_alpha, full.v_given_alpha);
    track(components_.alpha_prior, full.alpha_prior);
    track(components_.phi_prior, full.phi_prior);
    track(components_.theta_prior, full.theta_prior);
    track(components_.beta_prior, full.beta_prior);
    track(components_.tauY_prior, full.tauY_prior);
    track(components_.u_given_tau, full.u_given_tau);
    track(components_.tau_prior, full.tau_prior);
    check_state_invariants();
  }
  ++sweep_count_;
}

void ProfileRegressionSampler::check_state_invariants() const {
  const MCMCState& s = state_;
  double remaining = 1.0;
  for (int c = 0; c < s.C_total(); ++c) {
    if (!(s.V[c] > 0.0 && s.V[c] < 1.0))
      throw NumericalError("invariant: V out of (0,1)");
    const double psi = s.V[c] * remaining;
    if (std::fabs(psi - s.psi[c]) > 1e-10)
      throw NumericalError("invariant: psi inconsistent with sticks");
    remaining *= 1.0 - s.V[c];
  }
  if (remaining >= kStickResidualTol)
    throw NumericalError("invariant: residual stick mass too large");
  for (int zi : s.z)
    if (zi < 0 || zi >= s.C_total())
      throw NumericalError("invariant: allocation out of range");
  for (const auto& cp : s.phi) {
    for (const auto& simplex : cp.phi) {
      double sum = 0.0;
      for (double v : simplex) {
        if (v < 0.0) throw NumericalError("invariant: negative phi");
        sum += v;
      }
      if (std::fabs(sum - 1.0) > 1e-12)
        throw NumericalError("invariant: phi simplex not normalised");
    }
  }
  if (data_->response_kind == ResponseKind::gaussian) {
    if (!(s.globals.sigmaY2 > 0.0))
      throw NumericalError("invariant: nonpositive sigmaY2");
    if (std::fabs(s.globals.tauY * s.globals.sigmaY2 - 1.0) > 1e-12)
      throw NumericalError("invariant: tauY * sigmaY2 != 1");
  }
  if (spatial_enabled_) {
    if (!(s.spatial.tau > 0.0)) throw NumericalError("invariant: nonpositive tau");
    double sum_u = 0.0;
    for (double v : s.spatial.u) sum_u += v;
    if (std::fabs(sum_u) > 1e-8)
      throw NumericalError("invariant: u not centred after sweep");
  }
}

SampleTrace ProfileRegressionSampler::run(const Schedule& schedule) {
  if (schedule.burn_in >= schedule.n_iter)
    throw InputError("run: burn_in must be smaller than n_iter");
  if (schedule.thin < 1) throw InputError("run: thin must be >= 1");
  SampleTrace trace;
  trace.n_areas = data_->n();
  trace.response_kind = data_->response_kind;
  trace.spatial_enabled = spatial_enabled_;
  trace.u_mean.assign(data_->n(), 0.0);
  const long n_retained = (schedule.n_iter - schedule.burn_in) / schedule.thin;
  trace.records.reserve(n_retained);

  for (long it = 0; it < schedule.n_iter; ++it) {
    if (it == schedule.burn_in) freeze_adaptation();
    try {
      sweep();
    } catch (const NumericalError& err) {
      throw NumericalError("iteration " + std::to_string(it) + ": " + err.what());
    }
    if (it < schedule.burn_in) continue;
    if ((it - schedule.burn_in + 1) % schedule.thin != 0) continue;

    const auto new_label = occupancy_relabel(state_);
    const int C = state_.C_total();
    IterationRecord rec;
    rec.z.resize(data_->n());
    for (int i = 0; i < data_->n(); ++i) rec.z[i] = new_label[state_.z[i]];
    rec.alpha = state_.alpha;
    rec.tau = spatial_enabled_ ? state_.spatial.tau : kNaN;
    rec.tauY = data_->response_kind == ResponseKind::gaussian ? state_.globals.tauY : kNaN;
    rec.beta = state_.globals.beta;
    rec.n_occupied = state_.n_occupied();
    rec.psi.resize(C);
    rec.theta.resize(C);
    rec.phi.resize(C);
    for (int c = 0; c < C; ++c) {
      rec.psi[new_label[c]] = state_.psi[c];
      rec.theta[new_label[c]] = state_.theta[c];
      rec.phi[new_label[c]] = state_.phi[c];
    }
    for (int i = 0; i < data_->n(); ++i) trace.u_mean[i] += state_.spatial.u[i];
    if (static_cast<int>(trace.records.size()) % schedule.u_thin == 0)
      rec.u = state_.spatial.u;
    trace.records.push_back(std::move(rec));
  }
  if (!trace.records.empty()) {
    for (double& v : trace.u_mean) v /= static_cast<double>(trace.records.size());
  }
  return trace;
}

SampleTrace run_chain(const Dataset& data, const Hyperparameters& hyper,
                      const Schedule& schedule, bool spatial_enabled,
                      bool debug_checks) {
  ProfileRegressionSampler sampler(data, hyper, spatial_enabled, schedule.seed,
                                   schedule.n_init_clusters);
  sampler.set_debug_checks(debug_checks);
  SampleTrace trace = sampler.run(schedule);
  if (debug_checks && sampler.max_bookkeeping_error() > 1e-8)
    throw NumericalError("joint log-density bookkeeping drifted beyond 1e-8");
  return trace;
}

}  // namespace spr
