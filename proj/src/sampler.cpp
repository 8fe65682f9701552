// MCMC engine for the hierarchical ANOVA.
//
// Each sweep draws the location parameters (beta, alpha, delta) jointly from
// their Gaussian full conditional: delta is integrated out to sample
// (beta, alpha) through a Schur complement, then delta is drawn given them.
// Scales use slice sampling; the student-t variant adds per-cell latent
// precisions (normal scale mixture) so the location block stays Gaussian.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "benchstat/banova.hpp"
#include "benchstat/error.hpp"
#include "benchstat/rng.hpp"
#include "slice.hpp"

namespace benchstat
{

namespace
{

struct Cell
{
  std::size_t d;
  std::size_t a;
  double y;
};

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

class ChainSampler
{
public:
  ChainSampler(const ModelSpec& spec, const AggregatedMatrix& data, Rng rng)
      : spec_(spec),
        n_alg_(data.n_algorithms()),
        n_data_(data.n_datasets()),
        rng_(std::move(rng)),
        sigma0_slice_(spec.y_sd / 2.0, spec.sigma0_lo, spec.sigma0_hi),
        sigma_a_slice_(spec.y_sd / 2.0, 0.0, std::numeric_limits<double>::infinity()),
        sigma_d_slice_(spec.y_sd / 2.0, 0.0, std::numeric_limits<double>::infinity()),
        log_df_slice_(1.0, -std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity())
  {
    for (std::size_t d = 0; d < n_data_; ++d) {
      for (std::size_t a = 0; a < n_alg_; ++a) {
        if (data.present(d, a)) cells_.push_back({d, a, data.value(d, a)});
      }
    }
    initialize();
  }

  void set_adapting(bool on)
  {
    sigma0_slice_.set_adapting(on);
    sigma_a_slice_.set_adapting(on);
    sigma_d_slice_.set_adapting(on);
    log_df_slice_.set_adapting(on);
  }

  void sweep()
  {
    update_locations();
    if (robust()) update_latent_scales();
    update_sigma0();
    update_sigma_a();
    update_sigma_d();
    if (robust()) update_df();
    check_finite();
  }

  void write_row(double* row) const
  {
    std::size_t j = 0;
    row[j++] = s_.beta;
    for (double v : s_.alpha) row[j++] = v;
    for (double v : s_.delta) row[j++] = v;
    row[j++] = s_.sigma0;
    row[j++] = s_.sigma_a;
    row[j++] = s_.sigma_d;
    if (robust()) row[j++] = *s_.df;
  }

private:
  bool robust() const { return spec_.variant == ModelVariant::robust; }

  void initialize()
  {
    std::normal_distribution<double> jitter(0.0, 0.5);
    const double sd = spec_.y_sd;
    s_.beta = spec_.y_mean;
    s_.alpha.assign(n_alg_, 0.0);
    s_.delta.assign(n_data_, 0.0);
    // overdispersed scale starting points, one per chain
    s_.sigma0 = spec_.fixed_sigma0.value_or(
        std::clamp(sd * std::exp(jitter(rng_)), spec_.sigma0_lo * 1.01, spec_.sigma0_hi * 0.99));
    s_.sigma_a = spec_.fixed_sigma_a.value_or(0.5 * sd * std::exp(jitter(rng_)));
    s_.sigma_d = spec_.fixed_sigma_d.value_or(0.5 * sd * std::exp(jitter(rng_)));
    if (robust()) {
      s_.df = spec_.fixed_df.value_or(30.0 * std::exp(jitter(rng_)));
      s_.latent_scales.assign(n_data_ * n_alg_, 1.0);
    }
  }

  double weight(const Cell& c) const
  {
    return robust() ? s_.latent_scales[c.d * n_alg_ + c.a] : 1.0;
  }

  double residual(const Cell& c) const
  {
    return c.y - s_.beta - s_.alpha[c.a] - s_.delta[c.d];
  }

  void update_locations()
  {
    const double tau = 1.0 / (s_.sigma0 * s_.sigma0);
    const std::size_t nu = n_alg_ + 1;

    // Sufficient statistics of the weighted likelihood.
    Eigen::MatrixXd w_da = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_data_),
                                                 static_cast<Eigen::Index>(n_alg_));
    Eigen::VectorXd wy_d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_data_));
    Eigen::VectorXd wy_a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_alg_));
    for (const auto& c : cells_) {
      const double w = weight(c);
      w_da(static_cast<Eigen::Index>(c.d), static_cast<Eigen::Index>(c.a)) = w;
      wy_d(static_cast<Eigen::Index>(c.d)) += w * c.y;
      wy_a(static_cast<Eigen::Index>(c.a)) += w * c.y;
    }
    const Eigen::VectorXd w_d = w_da.rowwise().sum();
    const Eigen::VectorXd w_a = w_da.colwise().sum().transpose();

    // Precision of u = (beta, alpha) and its coupling to delta.
    Eigen::MatrixXd quu = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nu),
                                                static_cast<Eigen::Index>(nu));
    Eigen::VectorXd bu(static_cast<Eigen::Index>(nu));
    const double beta_prec = 1.0 / (spec_.beta_sd * spec_.beta_sd);
    const double alpha_prec = 1.0 / (s_.sigma_a * s_.sigma_a);
    const double delta_prec = 1.0 / (s_.sigma_d * s_.sigma_d);
    quu(0, 0) = beta_prec + tau * w_a.sum();
    bu(0) = beta_prec * spec_.beta_mean + tau * wy_a.sum();
    for (std::size_t a = 0; a < n_alg_; ++a) {
      const auto i = static_cast<Eigen::Index>(a + 1);
      quu(0, i) = quu(i, 0) = tau * w_a(i - 1);
      quu(i, i) = alpha_prec + tau * w_a(i - 1);
      bu(i) = tau * wy_a(i - 1);
    }
    // Quv column for dataset d is tau * (w_d, w_da.row(d)); Qvv is diagonal.
    const Eigen::VectorXd qvv = (delta_prec + tau * w_d.array()).matrix();
    const Eigen::VectorXd bv = tau * wy_d;
    Eigen::VectorXd col(static_cast<Eigen::Index>(nu));
    for (std::size_t d = 0; d < n_data_; ++d) {
      const auto di = static_cast<Eigen::Index>(d);
      col(0) = tau * w_d(di);
      col.tail(static_cast<Eigen::Index>(n_alg_)) = tau * w_da.row(di).transpose();
      quu.noalias() -= (col * col.transpose()) / qvv(di);
      bu -= col * (bv(di) / qvv(di));
    }

    const Eigen::LLT<Eigen::MatrixXd> llt(quu);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("location precision not positive definite\n" + dump_state());
    }
    const Eigen::VectorXd mean = llt.solve(bu);
    Eigen::VectorXd z(static_cast<Eigen::Index>(nu));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = unit_(rng_);
    // x = L^{-T} z has covariance (L L^T)^{-1}
    const Eigen::VectorXd u = mean + llt.matrixU().solve(z);

    s_.beta = u(0);
    for (std::size_t a = 0; a < n_alg_; ++a) s_.alpha[a] = u(static_cast<Eigen::Index>(a + 1));
    for (std::size_t d = 0; d < n_data_; ++d) {
      const auto di = static_cast<Eigen::Index>(d);
      double coupling = tau * w_d(di) * s_.beta;
      for (std::size_t a = 0; a < n_alg_; ++a) {
        coupling += tau * w_da(di, static_cast<Eigen::Index>(a)) * s_.alpha[a];
      }
      const double m = (bv(di) - coupling) / qvv(di);
      s_.delta[d] = m + unit_(rng_) / std::sqrt(qvv(di));
    }
  }

  void update_latent_scales()
  {
    const double df = *s_.df;
    const double tau = 1.0 / (s_.sigma0 * s_.sigma0);
    for (const auto& c : cells_) {
      const double r = residual(c);
      std::gamma_distribution<double> g(0.5 * (df + 1.0), 2.0 / (df + r * r * tau));
      s_.latent_scales[c.d * n_alg_ + c.a] = g(rng_);
    }
  }

  void update_sigma0()
  {
    if (spec_.fixed_sigma0) return;
    double ss = 0.0;
    for (const auto& c : cells_) {
      const double r = residual(c);
      ss += weight(c) * r * r;
    }
    const auto n = static_cast<double>(cells_.size());
    const auto log_f = [&](double s) {
      if (!(s > spec_.sigma0_lo && s < spec_.sigma0_hi)) return neg_inf;
      return -n * std::log(s) - ss / (2.0 * s * s);
    };
    s_.sigma0 = sigma0_slice_.sample(s_.sigma0, log_f, rng_);
  }

  static double scale_log_density(double s, const GammaShapeRate& prior, double n, double ss)
  {
    if (!(s > 0.0)) return neg_inf;
    return (prior.shape - 1.0) * std::log(s) - prior.rate * s - n * std::log(s) - ss / (2.0 * s * s);
  }

  void update_sigma_a()
  {
    if (spec_.fixed_sigma_a) return;
    double ss = 0.0;
    for (double v : s_.alpha) ss += v * v;
    const auto n = static_cast<double>(n_alg_);
    const auto log_f = [&](double s) { return scale_log_density(s, spec_.sigma_a_prior, n, ss); };
    s_.sigma_a = sigma_a_slice_.sample(s_.sigma_a, log_f, rng_);
  }

  void update_sigma_d()
  {
    if (spec_.fixed_sigma_d) return;
    double ss = 0.0;
    for (double v : s_.delta) ss += v * v;
    const auto n = static_cast<double>(n_data_);
    const auto log_f = [&](double s) { return scale_log_density(s, spec_.sigma_d_prior, n, ss); };
    s_.sigma_d = sigma_d_slice_.sample(s_.sigma_d, log_f, rng_);
  }

  void update_df()
  {
    if (spec_.fixed_df) return;
    double sum_w = 0.0;
    double sum_log_w = 0.0;
    for (const auto& c : cells_) {
      const double w = weight(c);
      sum_w += w;
      sum_log_w += std::log(w);
    }
    const auto n = static_cast<double>(cells_.size());
    // sampled on the log scale; the trailing + eta is the Jacobian
    const auto log_f = [&](double eta) {
      const double df = std::exp(eta);
      if (!(df > 0.0) || !std::isfinite(df)) return neg_inf;
      const double half = 0.5 * df;
      return n * (half * std::log(half) - std::lgamma(half)) + (half - 1.0) * sum_log_w -
             half * sum_w - spec_.df_rate * df + eta;
    };
    s_.df = std::exp(log_df_slice_.sample(std::log(*s_.df), log_f, rng_));
  }

  void check_finite() const
  {
    bool ok = std::isfinite(s_.beta) && std::isfinite(s_.sigma0) && std::isfinite(s_.sigma_a) &&
              std::isfinite(s_.sigma_d) && s_.sigma_a > 0.0 && s_.sigma_d > 0.0;
    if (s_.df) ok = ok && std::isfinite(*s_.df) && *s_.df > 0.0;
    if (!ok) throw NumericalError("non-finite parameter encountered\n" + dump_state());
  }

  std::string dump_state() const
  {
    std::ostringstream os;
    os.precision(17);
    os << "beta=" << s_.beta << " sigma0=" << s_.sigma0 << " sigma_a=" << s_.sigma_a
       << " sigma_d=" << s_.sigma_d;
    if (s_.df) os << " df=" << *s_.df;
    os << "\nalpha:";
    for (double v : s_.alpha) os << ' ' << v;
    return os.str();
  }

  const ModelSpec& spec_;
  std::size_t n_alg_;
  std::size_t n_data_;
  std::vector<Cell> cells_;
  Rng rng_;
  std::normal_distribution<double> unit_{0.0, 1.0};
  ParameterState s_;
  detail::SliceSampler sigma0_slice_;
  detail::SliceSampler sigma_a_slice_;
  detail::SliceSampler sigma_d_slice_;
  detail::SliceSampler log_df_slice_;
};

std::vector<double> run_one_chain(const ModelSpec& spec, const AggregatedMatrix& data,
                                  const McmcConfig& cfg, std::uint64_t seed, std::size_t chain,
                                  std::size_t n_columns)
{
  ChainSampler sampler(spec, data, make_stream(seed, 1000 + chain));
  sampler.set_adapting(true);
  for (std::size_t i = 0; i < cfg.adaptation; ++i) sampler.sweep();
  sampler.set_adapting(false);
  for (std::size_t i = 0; i < cfg.burn_in; ++i) sampler.sweep();

  std::vector<double> rows(cfg.draws * n_columns);
  for (std::size_t t = 0; t < cfg.draws; ++t) {
    for (std::size_t s = 0; s < cfg.thin; ++s) sampler.sweep();
    sampler.write_row(rows.data() + t * n_columns);
  }
  return rows;
}

void check_config(const McmcConfig& cfg)
{
  if (cfg.chains < 2) throw InputError("MCMC needs at least 2 chains for diagnostics");
  if (cfg.draws < 1) throw InputError("MCMC needs at least 1 kept draw per chain");
  if (cfg.thin < 1) throw InputError("thinning interval must be >= 1");
}

}  // namespace

PosteriorDraws run_chains(const ModelSpec& spec, const AggregatedMatrix& data,
                          const McmcConfig& cfg, std::uint64_t seed)
{
  check_config(cfg);
  if (data.n_algorithms() < 2 || data.n_datasets() < 2) {
    throw InputError("model needs at least 2 algorithms and 2 datasets");
  }
  if (data.n_present() < 2) throw InputError("model needs at least 2 present cells");
  if (spec.variant == ModelVariant::normal && spec.fixed_df) {
    throw InputError("fixed df only applies to the robust variant");
  }

  PosteriorDraws out(spec.variant, data.algorithms(), data.datasets(), cfg, seed);
  const auto n_columns = out.n_columns();
  std::vector<std::vector<double>> chains(cfg.chains);
  std::vector<std::exception_ptr> errors(cfg.chains);

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.chains));

  std::mutex next_mutex;
  std::size_t next = 0;
  const auto worker = [&]() {
    for (;;) {
      std::size_t c = 0;
      {
        const std::lock_guard lock(next_mutex);
        if (next >= cfg.chains) return;
        c = next++;
      }
      try {
        chains[c] = run_one_chain(spec, data, cfg, seed, c, n_columns);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& c : chains) out.add_chain(std::move(c));
  return out;
}

}  // namespace benchstat
