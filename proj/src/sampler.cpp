#include "evoflow/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace evoflow {

void SamplerConfig::validate() const {
  if (clock_norm < 0) throw std::invalid_argument("SamplerConfig: clock_norm must be >= 0");
  if (substep <= 0) throw std::invalid_argument("SamplerConfig: substep must be positive");
  if (t_max <= 0 || t_max > 1) throw std::invalid_argument("SamplerConfig: t_max outside (0,1]");
  if (max_events < 0) throw std::invalid_argument("SamplerConfig: max_events must be >= 0");
}

int SamplerConfig::resolved_max_events(size_t length) const {
  if (max_events > 0) return max_events;
  return std::max(10, int(10 * length));
}

// --------------------------- neural rate source ----------------------------

NeuralRateSource::NeuralRateSource(const ModelConfig& config, const ModelParams& params)
    : config_(config), params_(params) {
  ModelParams::check_compatible(config_, params_);
}

NeuralRateSource::~NeuralRateSource() = default;

void NeuralRateSource::reset(const Sequence& x0) {
  x_ = x0;
  eval_.emplace(config_, params_, x_);
  cached_t_ = -1.0;
}

const Sequence& NeuralRateSource::current() const { return x_; }

const RateTable& NeuralRateSource::table_at(double t) {
  if (!eval_) throw std::logic_error("NeuralRateSource: reset() not called");
  if (t != cached_t_) {
    cached_table_ = eval_->table(t);
    cached_t_ = t;
  }
  return cached_table_;
}

double NeuralRateSource::total_rate(double t) {
  return evoflow::total_rate(table_at(t), x_);
}

std::vector<TargetEdit> NeuralRateSource::edit_rates(double t) {
  const RateTable& table = table_at(t);
  const int A = table.alphabet_size;
  std::vector<TargetEdit> out;
  out.reserve(size_t(table.length) * size_t(A + 1) + size_t(A));
  for (int i = 0; i < table.length; ++i) {
    const int xi = x_[size_t(i)];
    for (int a = 0; a < A; ++a) {
      if (a == xi) continue;
      const double r = table.lam_sub[size_t(i)] * table.qsub(i, a);
      if (r > 0) out.push_back({EditOp::sub(i, a), r});
    }
    if (table.lam_del[size_t(i)] > 0) out.push_back({EditOp::del(i), table.lam_del[size_t(i)]});
  }
  for (int s = 0; s <= table.length; ++s)
    for (int a = 0; a < A; ++a) {
      const double r = table.lam_ins[size_t(s)] * table.qins(s, a);
      if (r > 0) out.push_back({EditOp::ins(s, a), r});
    }
  return out;
}

void NeuralRateSource::apply(const EditOp& op) {
  x_ = apply_edits(x_, {op});
  eval_.emplace(config_, params_, x_);
  cached_t_ = -1.0;
}

// --------------------------- oracle rate source ----------------------------

OracleRateSource::OracleRateSource(AlignedPair pair, Schedule schedule)
    : pair_(std::move(pair)), schedule_(schedule) {
  pair_.validate();
  z_ = pair_.z0;
  x_ = pair_.x0();
}

void OracleRateSource::reset(const Sequence& x0) {
  z_ = pair_.z0;
  x_ = pair_.x0();
  if (!(x0 == x_)) throw std::invalid_argument("OracleRateSource: x0 does not match the pair");
}

const Sequence& OracleRateSource::current() const { return x_; }

int OracleRateSource::pending_edits() const {
  int n = 0;
  for (size_t i = 0; i < z_.size(); ++i)
    if (z_[i] != pair_.z1[i]) ++n;
  return n;
}

double OracleRateSource::total_rate(double t) {
  return schedule_.rate_coeff(t) * pending_edits();
}

std::vector<TargetEdit> OracleRateSource::edit_rates(double t) {
  return conditional_rate(z_, pair_.z1, t, schedule_).edits;
}

void OracleRateSource::apply(const EditOp& op) {
  // Find the augmented position that produces this op and materialize z1
  // there. Among equivalent positions (stacked insertions) the first wins.
  const auto coord = augmented_to_ungapped(z_);
  for (size_t i = 0; i < z_.size(); ++i) {
    if (z_[i] == pair_.z1[i]) continue;
    EditOp cand;
    if (z_[i] == kGap) {
      cand = EditOp::ins(coord[i].value, pair_.z1[i]);
    } else if (pair_.z1[i] == kGap) {
      cand = EditOp::del(coord[i].value);
    } else {
      cand = EditOp::sub(coord[i].value, pair_.z1[i]);
    }
    if (cand == op) {
      z_[i] = pair_.z1[i];
      x_ = apply_edits(x_, {op});
      return;
    }
  }
  throw std::invalid_argument("OracleRateSource: edit is not a pending transport edit");
}

// ------------------------------- sampling ----------------------------------

double effective_total_rate(RateSource& source, double t, const SamplerConfig& config) {
  double rate = config.clock_norm * source.total_rate(t);
  if (config.length_normalize) rate /= double(std::max<size_t>(source.current().size(), 1));
  return rate;
}

EventTime sample_event_time(RateSource& source, double t_n, const SamplerConfig& config,
                            Rng& rng) {
  config.validate();
  if (t_n >= config.t_max) return {false, 0.0};
  const double u = 1.0 - rng.uniform();  // (0, 1]
  const double budget = std::max(-std::log(u), 1e-15);

  double acc = 0.0;
  double s_prev = t_n;
  double r_prev = effective_total_rate(source, t_n, config);
  for (int m = 1;; ++m) {
    const double s = std::min(t_n + m * config.substep, config.t_max);
    const double r = effective_total_rate(source, s, config);
    const double inc = 0.5 * (r_prev + r) * (s - s_prev);
    if (acc + inc >= budget) {
      const double frac = inc > 0 ? (budget - acc) / inc : 1.0;
      return {true, s_prev + frac * (s - s_prev) - t_n};
    }
    acc += inc;
    if (s >= config.t_max) return {false, 0.0};
    s_prev = s;
    r_prev = r;
  }
}

EditOp sample_jump(RateSource& source, double t, const SamplerConfig& config, Rng& rng) {
  (void)config;  // clock scaling cancels in the normalized jump law
  const auto edits = source.edit_rates(t);
  double total = 0.0;
  std::vector<double> weights;
  weights.reserve(edits.size());
  for (const auto& e : edits) {
    weights.push_back(e.rate);
    total += e.rate;
  }
  if (edits.empty() || total <= 0.0)
    throw std::runtime_error("sample_jump: zero total rate");
  return edits[size_t(rng.categorical(weights))].op;
}

Trajectory generate(const Sequence& x0, RateSource& source, const SamplerConfig& config,
                    Rng& rng) {
  config.validate();
  source.reset(x0);
  const int max_events = config.resolved_max_events(x0.size());

  Trajectory traj;
  double t = 0.0;
  while (true) {
    if (int(traj.events.size()) >= max_events) {
      traj.truncated = true;
      break;
    }
    const EventTime et = sample_event_time(source, t, config, rng);
    if (!et.found) break;
    t += et.delta;
    const EditOp op = sample_jump(source, t, config, rng);
    source.apply(op);
    traj.events.push_back({t, op, source.current()});
  }
  traj.final_sequence = source.current();
  return traj;
}

Trajectory generate_euler(const Sequence& x0, RateSource& source, const SamplerConfig& config,
                          double grid_step, Rng& rng) {
  config.validate();
  if (grid_step <= 0) throw std::invalid_argument("generate_euler: grid step must be positive");
  source.reset(x0);
  const int max_events = config.resolved_max_events(x0.size());

  Trajectory traj;
  for (double t = 0.0; t < config.t_max && !traj.truncated;) {
    const double h = std::min(grid_step, config.t_max - t);
    const double scale =
        config.clock_norm / (config.length_normalize
                                 ? double(std::max<size_t>(source.current().size(), 1))
                                 : 1.0);
    const auto edits = source.edit_rates(t);
    // Independent Bernoulli firing per edit; the strongest firing edit wins.
    int best = -1;
    for (size_t e = 0; e < edits.size(); ++e) {
      const double p = std::min(1.0, h * scale * edits[e].rate);
      if (rng.uniform() < p && (best < 0 || edits[e].rate > edits[size_t(best)].rate))
        best = int(e);
    }
    if (best >= 0) {
      source.apply(edits[size_t(best)].op);
      traj.events.push_back({t + h, edits[size_t(best)].op, source.current()});
      if (int(traj.events.size()) >= max_events) traj.truncated = true;
    }
    t += h;
  }
  traj.final_sequence = source.current();
  return traj;
}

CalibrationResult calibrate_clock(RateSource& source, const std::vector<Sequence>& inference_set,
                                  double target_mean_edits, const SamplerConfig& config,
                                  uint64_t seed) {
  if (inference_set.empty()) throw std::invalid_argument("calibrate_clock: empty inference set");
  if (target_mean_edits < 0)
    throw std::invalid_argument("calibrate_clock: negative target");
  if (target_mean_edits == 0.0) return {0.0, 0.0, true};

  // Mean edits at a given clock value, with common random numbers across
  // evaluations so the bisection sees a deterministic monotone-ish function.
  const auto mean_edits = [&](double nu) {
    SamplerConfig cfg = config;
    cfg.clock_norm = nu;
    double total = 0.0;
    for (size_t i = 0; i < inference_set.size(); ++i) {
      Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
      const Trajectory traj = generate(inference_set[i], source, cfg, rng);
      total += levenshtein(inference_set[i], traj.final_sequence);
    }
    return total / double(inference_set.size());
  };

  const double tol = 0.1 * target_mean_edits;
  double hi = std::max(config.clock_norm, 1.0);
  double hi_val = mean_edits(hi);
  int expansions = 0;
  while (hi_val < target_mean_edits - tol && expansions < 24) {
    hi *= 2.0;
    hi_val = mean_edits(hi);
    ++expansions;
  }
  if (hi_val < target_mean_edits - tol) return {hi, hi_val, false};
  if (std::abs(hi_val - target_mean_edits) <= tol) return {hi, hi_val, true};

  double lo = 0.0;
  for (int iter = 0; iter < 48; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double val = mean_edits(mid);
    if (std::abs(val - target_mean_edits) <= tol) return {mid, val, true};
    if (val < target_mean_edits) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double final_val = mean_edits(hi);
  return {hi, final_val, std::abs(final_val - target_mean_edits) <= tol};
}

void write_trajectory(std::ostream& out, const Trajectory& traj, const Alphabet& ab,
                      const std::string& id) {
  out << "# trajectory " << id << " events=" << traj.events.size()
      << (traj.truncated ? " truncated" : "") << '\n';
  for (const auto& ev : traj.events) {
    out << ev.time << '\t' << edit_kind_name(ev.op.kind) << '\t' << ev.op.pos << '\t';
    if (ev.op.kind == EditKind::Del) {
      out << '-';
    } else {
      out << ab.token(ev.op.token);
    }
    out << '\n';
  }
}

}  // namespace evoflow
