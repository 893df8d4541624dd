#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wsnmf {

/// One real-valued radar trace (a single transmitter/receiver A-scan).
struct Signal {
  std::string id;
  std::string label;
  std::vector<double> samples;
  double dt = 0.0;  // seconds per sample

  std::size_t size() const { return samples.size(); }

  friend bool operator==(const Signal&, const Signal&) = default;
};

/// Throws DomainError unless the signal has >= 2 finite samples and dt > 0.
void validate(const Signal& s);

/// Ordered collection of d signals sharing sample count and dt. Each time
/// sample is one observation of the d-dimensional variable that whitening
/// acts on.
class Ensemble {
 public:
  Ensemble() = default;
  explicit Ensemble(std::vector<Signal> signals);

  std::size_t d() const { return signals_.size(); }
  std::size_t n() const { return signals_.empty() ? 0 : signals_.front().size(); }
  double dt() const { return signals_.empty() ? 0.0 : signals_.front().dt; }
  bool empty() const { return signals_.empty(); }

  const Signal& operator[](std::size_t i) const { return signals_[i]; }
  const std::vector<Signal>& signals() const { return signals_; }
  std::vector<std::string> labels() const;

  /// d x n matrix, row i = samples of signal i.
  Eigen::MatrixXd matrix() const;

  /// Same ids/labels/dt as this ensemble, samples replaced by the rows of
  /// `values` (which must be d x n).
  Ensemble with_samples(const Eigen::MatrixXd& values) const;

  friend bool operator==(const Ensemble&, const Ensemble&) = default;

 private:
  std::vector<Signal> signals_;
};

// ---------------------------------------------------------------------------
// Synthetic benchmark

/// Seed of the committed default benchmark.
inline constexpr std::uint64_t kDefaultSeed = 20200611;

/// Class labels of the 12-signal benchmark, indexed by signal number - 1.
/// Index 11 is the no-target scene.
inline constexpr const char* kTargetLabels[] = {
    "Sphere",      "Mine F",        "Mine C", "Crushed Can",
    "Mine A",      "Mine E",        "Mine B", "Mine simulant",
    "Rock",        "Mine D",        "Cylinder", "vacant"};

inline constexpr const char* kVacantLabel = "vacant";

/// Class index of the repeated anti-personnel mine used as the held-out probe.
inline constexpr int kMineDClass = 9;

struct BenchmarkSpec {
  int n_classes = 12;
  int traces_per_class = 2;
  double similarity = 0.95;  // target template cross-correlation rho in [0, 1)
  double noise_sigma = 0.01;
  double ground_bounce_amplitude = 5.0;  // median surface-return amplitude
  // Per-trace variation of the surface return (antenna height, roughness).
  double ground_amplitude_jitter = 0.5;  // std of the log-gain
  double ground_delay_jitter = 0.0;      // std of the bounce delay, s
  std::uint64_t seed = kDefaultSeed;

  // 8 GHz sweep in 20 MHz steps -> 401 points, sampled at 1 / 8 GHz.
  std::size_t n_samples = 401;
  double dt = 0.125e-9;
  double center_frequency = 1.0e9;    // Ricker peak frequency, Hz
  double soil_permittivity = 4.0;
  double ground_delay = 2.0e-9;       // two-way air gap to the surface, s
  int echoes_per_class = 6;
};

/// Throws DomainError on an invalid spec.
void validate(const BenchmarkSpec& spec);

/// (1 - 2 pi^2 fc^2 t^2) exp(-pi^2 fc^2 t^2); unit peak at t = 0.
double ricker_wavelet(double fc, double t);

struct Echo {
  double delay;      // s
  double amplitude;
};

/// Sum of Ricker wavelets, one per echo, sampled at k * dt for k < n.
std::vector<double> render_echoes(std::span<const Echo> echoes, std::size_t n,
                                  double dt, double fc);

std::string class_label(int class_index, int n_classes);

/// Target echoes of one class: a main reflection at the target depth plus
/// echoes_per_class - 1 weaker secondary returns. Drawn once per class from
/// the seed.
std::vector<Echo> class_echoes(const BenchmarkSpec& spec, int class_index);

/// Deep-layer echoes shared by every class.
std::vector<Echo> shared_echoes(const BenchmarkSpec& spec);

/// Noise-free, ground-bounce-free class template, peak-normalized. The shared
/// component is mixed so that templates of different classes correlate at
/// roughly spec.similarity.
std::vector<double> class_template(const BenchmarkSpec& spec, int class_index);

/// template + ground bounce (per-trace gain and delay jitter) + Gaussian
/// noise. Pure function of (spec, class_index, instance_index).
Signal synth_trace(const BenchmarkSpec& spec, int class_index, int instance_index);

/// All classes for instances in [first_instance, last_instance), grouped by
/// instance then class.
Ensemble synth_ensemble(const BenchmarkSpec& spec, int first_instance,
                        int last_instance);

/// Rectangular gate: keeps samples with k*dt in [t_start, t_end), zeroes the rest.
Signal time_gate(const Signal& s, double t_start, double t_end);

// ---------------------------------------------------------------------------
// Statistics helpers shared by several modules

/// Pearson correlation; throws DomainError if either input is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// Mean of the off-diagonal entries of the Pearson correlation matrix of the rows.
double mean_offdiagonal_correlation(const Eigen::MatrixXd& rows);

// ---------------------------------------------------------------------------
// CSV I/O: header "id,label,dt,s0,s1,...", one signal per row.

Ensemble load_ensemble(const std::filesystem::path& path);
void save_ensemble(const Ensemble& e, const std::filesystem::path& path);

/// Lossless text form of a double (17 significant digits).
std::string format_double(double v);

}  // namespace wsnmf
