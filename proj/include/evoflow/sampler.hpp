#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "evoflow/align.hpp"
#include "evoflow/flowpath.hpp"
#include "evoflow/ratemodel.hpp"
#include "evoflow/rng.hpp"

namespace evoflow {

struct SamplerConfig {
  double clock_norm = 1.0;        // rate multiplier, >= 0
  bool length_normalize = false;  // divide rates by the current length
  double substep = 1e-3;          // quadrature step for the survival integral
  double t_max = 1.0 - 1e-4;      // integration horizon, in (0, 1]
  int max_events = 0;             // 0 means 10 * |x0| (at least 10)
  uint64_t seed = 0;

  void validate() const;
  int resolved_max_events(size_t length) const;
};

// Source of edit rates for the sampler: the current state plus the
// off-diagonal rate row at any time. Implementations are stateful; apply()
// advances the state by one edit.
class RateSource {
 public:
  virtual ~RateSource() = default;
  virtual void reset(const Sequence& x0) = 0;
  virtual const Sequence& current() const = 0;
  // Sum of all single-edit rates out of the current state (pre clock scaling).
  virtual double total_rate(double t) = 0;
  // All edits with nonzero rate out of the current state.
  virtual std::vector<TargetEdit> edit_rates(double t) = 0;
  virtual void apply(const EditOp& op) = 0;
};

// Rates from a trained model; the encoder cache is rebuilt only when the
// state changes, so time sweeps during integration stay cheap.
class NeuralRateSource : public RateSource {
 public:
  NeuralRateSource(const ModelConfig& config, const ModelParams& params);
  ~NeuralRateSource() override;
  void reset(const Sequence& x0) override;
  const Sequence& current() const override;
  double total_rate(double t) override;
  std::vector<TargetEdit> edit_rates(double t) override;
  void apply(const EditOp& op) override;

 private:
  const RateTable& table_at(double t);
  ModelConfig config_;
  ModelParams params_;
  std::optional<RateEvaluator> eval_;
  Sequence x_;
  double cached_t_ = -1.0;
  RateTable cached_table_;
};

// Ground-truth conditional rates for transporting z0 to z1 along an aligned
// pair; each still-differing augmented position carries rate
// kappa_dot / (1 - kappa).
class OracleRateSource : public RateSource {
 public:
  OracleRateSource(AlignedPair pair, Schedule schedule);
  void reset(const Sequence& x0) override;  // x0 must equal x(z0)
  const Sequence& current() const override;
  double total_rate(double t) override;
  std::vector<TargetEdit> edit_rates(double t) override;
  void apply(const EditOp& op) override;

  int pending_edits() const;

 private:
  AlignedPair pair_;
  Schedule schedule_;
  std::vector<int> z_;
  Sequence x_;
};

struct TrajectoryEvent {
  double time = 0.0;
  EditOp op;
  Sequence state;  // sequence after the edit
};

struct Trajectory {
  std::vector<TrajectoryEvent> events;
  Sequence final_sequence;
  bool truncated = false;  // max_events guard fired
};

// Clock-scaled exit rate: clock_norm * total / (length or 1).
double effective_total_rate(RateSource& source, double t, const SamplerConfig& config);

struct EventTime {
  bool found = false;
  double delta = 0.0;
};

// Inverse-CDF draw of the next event time after t_n: accumulates the
// survival integral in trapezoidal substeps and locates the crossing by
// linear interpolation inside the bracketing substep. Returns found=false
// when the integral up to t_max stays below the exponential draw.
EventTime sample_event_time(RateSource& source, double t_n, const SamplerConfig& config,
                            Rng& rng);

// One jump of the embedded chain: an edit drawn with probability
// rate / total. Throws std::runtime_error when the total rate is zero.
EditOp sample_jump(RateSource& source, double t, const SamplerConfig& config, Rng& rng);

// Event-driven simulation from t=0 until no event occurs before t_max or the
// event guard trips.
Trajectory generate(const Sequence& x0, RateSource& source, const SamplerConfig& config,
                    Rng& rng);

// Fixed-grid reference sampler: each step, every edit fires independently
// with probability min(1, h * rate); the highest-rate firing edit is applied.
Trajectory generate_euler(const Sequence& x0, RateSource& source, const SamplerConfig& config,
                          double grid_step, Rng& rng);

struct CalibrationResult {
  double clock_norm = 0.0;
  double achieved_mean_edits = 0.0;
  bool reached = false;
};

// Bisection over the clock multiplier so that the mean Levenshtein distance
// between inputs and samples matches target_mean_edits within 10%.
CalibrationResult calibrate_clock(RateSource& source, const std::vector<Sequence>& inference_set,
                                  double target_mean_edits, const SamplerConfig& config,
                                  uint64_t seed);

// Line-per-event text log of one trajectory.
void write_trajectory(std::ostream& out, const Trajectory& traj, const Alphabet& ab,
                      const std::string& id);

}  // namespace evoflow
