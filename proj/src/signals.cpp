#include "wsnmf/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "wsnmf/errors.hpp"

namespace wsnmf {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

// Stream tags keep the per-class and per-instance generators independent.
constexpr std::uint32_t kClassStream = 0x636c6173;
constexpr std::uint32_t kSharedStream = 0x73686172;
constexpr std::uint32_t kNoiseStream = 0x6e6f6973;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream,
                         std::uint32_t a = 0, std::uint32_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), stream, a, b};
  return std::mt19937_64(seq);
}

void unit_normalize(std::vector<double>& v) {
  const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
}

}  // namespace

void validate(const Signal& s) {
  if (s.samples.size() < 2) {
    throw DomainError("signal '" + s.id + "' has fewer than 2 samples");
  }
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) {
    throw DomainError("signal '" + s.id + "' has non-positive dt");
  }
  for (double v : s.samples) {
    if (!std::isfinite(v)) {
      throw DomainError("signal '" + s.id + "' contains a non-finite sample");
    }
  }
}

Ensemble::Ensemble(std::vector<Signal> signals) : signals_(std::move(signals)) {
  if (signals_.empty()) return;
  const auto& first = signals_.front();
  for (const auto& s : signals_) {
    validate(s);
    if (s.size() != first.size()) {
      throw DomainError("signal '" + s.id + "' has length " + std::to_string(s.size()) +
                        ", expected " + std::to_string(first.size()));
    }
    if (s.dt != first.dt) {
      throw DomainError("signal '" + s.id + "' has a different dt");
    }
  }
}

std::vector<std::string> Ensemble::labels() const {
  std::vector<std::string> out;
  out.reserve(signals_.size());
  for (const auto& s : signals_) out.push_back(s.label);
  return out;
}

Eigen::MatrixXd Ensemble::matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d()), static_cast<Eigen::Index>(n()));
  for (std::size_t i = 0; i < d(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(signals_[i].samples.data(),
                                             static_cast<Eigen::Index>(n()));
  }
  return m;
}

Ensemble Ensemble::with_samples(const Eigen::MatrixXd& values) const {
  if (values.rows() != static_cast<Eigen::Index>(d()) ||
      values.cols() != static_cast<Eigen::Index>(n())) {
    throw DomainError("sample matrix shape does not match ensemble");
  }
  std::vector<Signal> out = signals_;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto row = values.row(static_cast<Eigen::Index>(i));
    out[i].samples.assign(row.begin(), row.end());
  }
  return Ensemble(std::move(out));
}

// ---------------------------------------------------------------------------

void validate(const BenchmarkSpec& spec) {
  if (spec.n_classes < 2) throw DomainError("n_classes must be >= 2");
  if (spec.traces_per_class < 2) throw DomainError("traces_per_class must be >= 2");
  if (!(spec.similarity >= 0.0 && spec.similarity < 1.0)) {
    throw DomainError("similarity must lie in [0, 1)");
  }
  if (!(spec.noise_sigma >= 0.0)) throw DomainError("noise_sigma must be >= 0");
  if (!(spec.ground_bounce_amplitude >= 0.0)) {
    throw DomainError("ground_bounce_amplitude must be >= 0");
  }
  if (!(spec.ground_amplitude_jitter >= 0.0) || !(spec.ground_delay_jitter >= 0.0)) {
    throw DomainError("ground jitter must be >= 0");
  }
  if (spec.echoes_per_class < 1) throw DomainError("echoes_per_class must be >= 1");
  if (spec.n_samples < 2) throw DomainError("n_samples must be >= 2");
  if (!(spec.dt > 0.0)) throw DomainError("dt must be > 0");
  if (!(spec.center_frequency > 0.0)) throw DomainError("center_frequency must be > 0");
  if (!(spec.soil_permittivity >= 1.0)) throw DomainError("soil_permittivity must be >= 1");
}

double ricker_wavelet(double fc, double t) {
  const double a = std::numbers::pi * std::numbers::pi * fc * fc * t * t;
  return (1.0 - 2.0 * a) * std::exp(-a);
}

std::vector<double> render_echoes(std::span<const Echo> echoes, std::size_t n,
                                  double dt, double fc) {
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    double acc = 0.0;
    for (const Echo& e : echoes) acc += e.amplitude * ricker_wavelet(fc, t - e.delay);
    out[k] = acc;
  }
  return out;
}

std::string class_label(int class_index, int n_classes) {
  if (class_index < 0 || class_index >= n_classes) {
    throw DomainError("class index " + std::to_string(class_index) + " out of range");
  }
  constexpr int known = static_cast<int>(std::size(kTargetLabels));
  if (class_index < known) return kTargetLabels[class_index];
  return "class-" + std::to_string(class_index + 1);
}

std::vector<Echo> class_echoes(const BenchmarkSpec& spec, int class_index) {
  if (class_index < 0 || class_index >= spec.n_classes) {
    throw DomainError("class index " + std::to_string(class_index) + " out of range [0, " +
                      std::to_string(spec.n_classes) + ")");
  }
  auto rng = make_rng(spec.seed, kClassStream, static_cast<std::uint32_t>(class_index));
  std::uniform_real_distribution<double> depth(0.10, 1.00);  // m
  std::uniform_real_distribution<double> lag(0.4e-9, 2.5e-9);
  std::uniform_real_distribution<double> main_amp(0.6, 1.0);
  std::uniform_real_distribution<double> side_amp(-0.7, 0.7);
  std::bernoulli_distribution flip(0.5);
  if (class_label(class_index, spec.n_classes) == kVacantLabel) return {};

  // Two-way travel through soil at c / sqrt(eps_r).
  const double soil_speed = kSpeedOfLight / std::sqrt(spec.soil_permittivity);
  const double main_delay = spec.ground_delay + 2.0 * depth(rng) / soil_speed;
  double a = main_amp(rng);
  if (flip(rng)) a = -a;
  std::vector<Echo> echoes{{main_delay, a}};
  for (int i = 1; i < spec.echoes_per_class; ++i) {
    const double t = main_delay + lag(rng);
    echoes.push_back({t, side_amp(rng)});
  }
  return echoes;
}

std::vector<Echo> shared_echoes(const BenchmarkSpec& spec) {
  auto rng = make_rng(spec.seed, kSharedStream);
  // Deep layering, well after every target return.
  const double span = static_cast<double>(spec.n_samples - 1) * spec.dt;
  std::uniform_real_distribution<double> delay(0.5 * span, 0.9 * span);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::vector<Echo> echoes;
  for (int i = 0; i < 4; ++i) {
    const double t = delay(rng);
    echoes.push_back({t, amp(rng)});
  }
  return echoes;
}

std::vector<double> class_template(const BenchmarkSpec& spec, int class_index) {
  validate(spec);
  auto specific = render_echoes(class_echoes(spec, class_index), spec.n_samples, spec.dt,
                                spec.center_frequency);
  auto shared = render_echoes(shared_echoes(spec), spec.n_samples, spec.dt,
                              spec.center_frequency);
  unit_normalize(specific);
  unit_normalize(shared);

  // With unit-norm, mutually orthogonal parts, corr = w^2 / (w^2 + 1).
  const double w = std::sqrt(spec.similarity / (1.0 - spec.similarity));
  std::vector<double> out(spec.n_samples);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = w * shared[k] + specific[k];

  const double peak = std::transform_reduce(
      out.begin(), out.end(), 0.0, [](double a, double b) { return std::max(a, b); },
      [](double v) { return std::abs(v); });
  if (peak > 0.0) {
    for (double& v : out) v /= peak;
  }
  return out;
}

Signal synth_trace(const BenchmarkSpec& spec, int class_index, int instance_index) {
  validate(spec);
  if (class_index < 0 || class_index >= spec.n_classes) {
    throw DomainError("class index " + std::to_string(class_index) + " out of range [0, " +
                      std::to_string(spec.n_classes) + ")");
  }
  if (instance_index < 0) throw DomainError("instance index must be >= 0");

  Signal s;
  s.label = class_label(class_index, spec.n_classes);
  s.id = "s" + std::to_string(class_index + 1) + "_" + std::to_string(instance_index);
  s.dt = spec.dt;

  auto rng = make_rng(spec.seed, kNoiseStream, static_cast<std::uint32_t>(class_index),
                      static_cast<std::uint32_t>(instance_index));
  std::normal_distribution<double> gauss(0.0, 1.0);

  s.samples = class_template(spec, class_index);

  // Log-normal gain keeps the surface return positive.
  Echo ground{spec.ground_delay, spec.ground_bounce_amplitude};
  ground.amplitude *= std::exp(spec.ground_amplitude_jitter * gauss(rng));
  ground.delay += spec.ground_delay_jitter * gauss(rng);
  const auto bounce = render_echoes(std::span(&ground, 1), spec.n_samples, spec.dt,
                                    spec.center_frequency);
  for (std::size_t k = 0; k < s.samples.size(); ++k) {
    s.samples[k] += bounce[k];
    if (spec.noise_sigma > 0.0) s.samples[k] += spec.noise_sigma * gauss(rng);
  }
  return s;
}

Ensemble synth_ensemble(const BenchmarkSpec& spec, int first_instance, int last_instance) {
  std::vector<Signal> out;
  for (int inst = first_instance; inst < last_instance; ++inst) {
    for (int c = 0; c < spec.n_classes; ++c) out.push_back(synth_trace(spec, c, inst));
  }
  return Ensemble(std::move(out));
}

Signal time_gate(const Signal& s, double t_start, double t_end) {
  if (!(t_start >= 0.0) || !(t_start < t_end)) {
    throw DomainError("time gate requires 0 <= t_start < t_end");
  }
  Signal out = s;
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    const double t = static_cast<double>(k) * s.dt;
    if (t < t_start || t >= t_end) out.samples[k] = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw DomainError("pearson: inputs must have equal length >= 2");
  }
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] - ma;
    const double y = b[i] - mb;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  if (saa == 0.0 || sbb == 0.0) throw DomainError("pearson: constant input");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double mean_offdiagonal_correlation(const Eigen::MatrixXd& rows) {
  const Eigen::Index d = rows.rows();
  if (d < 2) throw DomainError("need at least two rows");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::RowVectorXd ri = rows.row(i);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const Eigen::RowVectorXd rj = rows.row(j);
      acc += pearson(std::span(ri.data(), ri.size()), std::span(rj.data(), rj.size()));
    }
  }
  return acc / (0.5 * static_cast<double>(d * (d - 1)));
}

}  // namespace wsnmf
