#include "qpa/qpa.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "json.hpp"
#include "qpa/dense_oracle.hpp"
#include "qpa/error.hpp"
#include "qpa/experiment.hpp"
#include "qpa/lab_demon.hpp"
#include "qpa/monte_carlo.hpp"
#include "qpa/noise_json.hpp"
#include "qpa/noise_model.hpp"
#include "qpa/recurrence.hpp"

struct qpa_noise {
  qpa::NoiseModel model;
};

struct qpa_state {
  qpa::SubensembleState state;
};

struct qpa_trajectory {
  qpa::Trajectory trajectory;
};

struct qpa_ensemble {
  qpa::mc::Ensemble ensemble;
};

struct qpa_experiment {
  qpa::ExperimentConfig config;
  qpa::RunOptions options;
  bool seed_override = false;
  std::uint64_t seed = 0;
  bool format_override = false;
  qpa::OutputFormat format = qpa::OutputFormat::Csv;
};

namespace {

thread_local std::string g_last_error;

qpa_status to_status(qpa::ErrorCode code) {
  switch (code) {
    case qpa::ErrorCode::InvalidArgument: return QPA_ERR_INVALID_ARGUMENT;
    case qpa::ErrorCode::Config: return QPA_ERR_CONFIG;
    case qpa::ErrorCode::Degenerate: return QPA_ERR_DEGENERATE;
    case qpa::ErrorCode::NoThreshold: return QPA_ERR_NO_THRESHOLD;
    case qpa::ErrorCode::InsufficientTail: return QPA_ERR_INSUFFICIENT_TAIL;
    case qpa::ErrorCode::Halt: return QPA_ERR_HALT;
    case qpa::ErrorCode::Verification: return QPA_ERR_VERIFICATION;
    case qpa::ErrorCode::Io: return QPA_ERR_IO;
  }
  return QPA_ERR_INTERNAL;
}

template <class F>
qpa_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return QPA_OK;
  } catch (const qpa::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return QPA_ERR_INTERNAL;
}

void require_ptr(const void* p, const char* what) {
  if (p == nullptr) qpa::fail(qpa::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qpa::NoisePlacement placement_of(qpa_placement p) {
  switch (p) {
    case QPA_PLACEMENT_BEFORE_ROTATION: return qpa::NoisePlacement::BeforeRotation;
    case QPA_PLACEMENT_BEFORE_BCNOT: return qpa::NoisePlacement::BeforeBcnot;
  }
  qpa::fail(qpa::ErrorCode::InvalidArgument, "unknown placement");
}

qpa::FlagMode flag_mode_of(qpa_flag_mode m) {
  switch (m) {
    case QPA_FLAGS_FIXED: return qpa::FlagMode::Fixed;
    case QPA_FLAGS_RANDOM: return qpa::FlagMode::Random;
  }
  qpa::fail(qpa::ErrorCode::InvalidArgument, "unknown flag mode");
}

qpa::NoiseFamily family_of(qpa_noise_family f) {
  switch (f) {
    case QPA_NOISE_PRODUCT: return qpa::NoiseFamily::Product;
    case QPA_NOISE_ONE_SIDED: return qpa::NoiseFamily::OneSided;
    case QPA_NOISE_UNIFORM: return qpa::NoiseFamily::Uniform;
    case QPA_NOISE_EXPLICIT: return qpa::NoiseFamily::Explicit;
  }
  qpa::fail(qpa::ErrorCode::InvalidArgument, "unknown noise family");
}

qpa_regime regime_of(qpa::Regime r) {
  switch (r) {
    case qpa::Regime::NoPurification: return QPA_REGIME_NO_PURIFICATION;
    case qpa::Regime::PurifyInsecure: return QPA_REGIME_PURIFY_INSECURE;
    case qpa::Regime::PurifySecure: return QPA_REGIME_PURIFY_SECURE;
  }
  return QPA_REGIME_NO_PURIFICATION;
}

void fill_mc_round(const qpa::mc::RoundStats& s, qpa_mc_round* out) {
  out->round = s.round;
  out->input_pairs = s.input_pairs;
  out->survivors = s.survivors;
  out->keep_fraction = s.keep_fraction;
  out->fidelity = s.fidelity;
  out->conditional_fidelity = s.conditional_fidelity;
  out->stddev_fidelity = s.stddev_fidelity;
  for (std::size_t i = 0; i < 16; ++i) out->histogram[i] = s.histogram[i];
}

}  // namespace

extern "C" {

const char* qpa_version(void) { return qpa::version(); }

const char* qpa_last_error(void) { return g_last_error.c_str(); }

const char* qpa_status_name(qpa_status status) {
  switch (status) {
    case QPA_OK: return "OK";
    case QPA_ERR_INVALID_ARGUMENT: return "INVALID_ARGUMENT";
    case QPA_ERR_CONFIG: return "CONFIG";
    case QPA_ERR_DEGENERATE: return "DEGENERATE";
    case QPA_ERR_NO_THRESHOLD: return "NO_THRESHOLD";
    case QPA_ERR_INSUFFICIENT_TAIL: return "INSUFFICIENT_TAIL";
    case QPA_ERR_HALT: return "HALT";
    case QPA_ERR_VERIFICATION: return "VERIFICATION";
    case QPA_ERR_IO: return "IO";
    case QPA_ERR_INTERNAL: return "INTERNAL";
  }
  return "UNKNOWN";
}

void qpa_string_free(char* s) { std::free(s); }

unsigned qpa_bell_rotate(unsigned bell) { return qpa::rotate(qpa::BellLabel::from_index(bell & 3u)).index(); }

void qpa_bell_bcnot(unsigned source, unsigned target, unsigned* source_out, unsigned* target_out) {
  const auto r = qpa::bcnot(qpa::BellLabel::from_index(source & 3u), qpa::BellLabel::from_index(target & 3u));
  if (source_out) *source_out = r.source.index();
  if (target_out) *target_out = r.target.index();
}

int qpa_bell_coincides(unsigned target) { return qpa::coincides(qpa::BellLabel::from_index(target & 3u)) ? 1 : 0; }

unsigned qpa_flag_update(unsigned kept_flag, unsigned measured_flag) {
  return qpa::flag_update(qpa::ErrorFlag::from_index(kept_flag & 3u), qpa::ErrorFlag::from_index(measured_flag & 3u))
      .index();
}

// ---- noise

qpa_status qpa_noise_create(qpa_noise_family family, double parameter, qpa_noise** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new qpa_noise{qpa::NoiseModel::from_family(family_of(family), parameter)};
  });
}

qpa_status qpa_noise_create_explicit(const double f[16], qpa_noise** out) {
  return guarded([&] {
    require_ptr(f, "f");
    require_ptr(out, "out");
    std::array<double, 16> p{};
    std::copy(f, f + 16, p.begin());
    *out = new qpa_noise{qpa::NoiseModel::from_probabilities(p)};
  });
}

qpa_status qpa_noise_from_json(const char* text, qpa_noise** out) {
  return guarded([&] {
    require_ptr(text, "json");
    require_ptr(out, "out");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      qpa::fail(qpa::ErrorCode::Config, e.what());
    }
    *out = new qpa_noise{qpa::noise_from_json(doc)};
  });
}

qpa_status qpa_noise_to_json(const qpa_noise* noise, char** out) {
  return guarded([&] {
    require_ptr(noise, "noise");
    require_ptr(out, "out");
    *out = dup_string(qpa::noise_to_json(noise->model).dump());
  });
}

qpa_status qpa_noise_probabilities(const qpa_noise* noise, double out[16]) {
  return guarded([&] {
    require_ptr(noise, "noise");
    require_ptr(out, "out");
    const auto& f = noise->model.probabilities();
    std::copy(f.begin(), f.end(), out);
  });
}

qpa_status qpa_noise_label_shifts(const qpa_noise* noise, double out[4]) {
  return guarded([&] {
    require_ptr(noise, "noise");
    require_ptr(out, "out");
    const auto d = noise->model.label_shift_distribution();
    std::copy(d.begin(), d.end(), out);
  });
}

void qpa_noise_free(qpa_noise* noise) { delete noise; }

// ---- states and rounds

qpa_status qpa_state_create(const double p[16], qpa_state** out) {
  return guarded([&] {
    require_ptr(p, "p");
    require_ptr(out, "out");
    std::array<double, 16> c{};
    std::copy(p, p + 16, c.begin());
    *out = new qpa_state{qpa::SubensembleState::from_coefficients(c)};
  });
}

qpa_status qpa_state_from_bell(const double bell[4], qpa_flag_mode mode, qpa_state** out) {
  return guarded([&] {
    require_ptr(bell, "bell");
    require_ptr(out, "out");
    std::array<double, 4> b{};
    std::copy(bell, bell + 4, b.begin());
    *out = new qpa_state{qpa::SubensembleState::from_bell(b, flag_mode_of(mode))};
  });
}

qpa_status qpa_state_werner(double fidelity, qpa_flag_mode mode, qpa_state** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new qpa_state{qpa::SubensembleState::werner(fidelity, flag_mode_of(mode))};
  });
}

qpa_status qpa_state_coefficients(const qpa_state* state, double out[16]) {
  return guarded([&] {
    require_ptr(state, "state");
    require_ptr(out, "out");
    const auto& c = state->state.coefficients();
    std::copy(c.begin(), c.end(), out);
  });
}

double qpa_state_fidelity(const qpa_state* state) { return state ? state->state.fidelity() : std::nan(""); }

double qpa_state_conditional_fidelity(const qpa_state* state) {
  return state ? state->state.conditional_fidelity() : std::nan("");
}

void qpa_state_free(qpa_state* state) { delete state; }

qpa_status qpa_one_round(const qpa_state* in, const qpa_noise* noise, qpa_placement placement, qpa_state** out,
                         double* keep_probability) {
  return guarded([&] {
    require_ptr(in, "state");
    require_ptr(noise, "noise");
    require_ptr(out, "out");
    const auto r = qpa::one_round(in->state, noise->model, placement_of(placement));
    *out = new qpa_state{r.state};
    if (keep_probability) *keep_probability = r.keep_probability;
  });
}

qpa_status qpa_oracle_one_round(const qpa_state* in, const qpa_noise* noise, qpa_placement placement,
                                qpa_state** out, double* keep_probability) {
  return guarded([&] {
    require_ptr(in, "state");
    require_ptr(noise, "noise");
    require_ptr(out, "out");
    const auto r = qpa::oracle::oracle_one_round(in->state, noise->model, placement_of(placement));
    *out = new qpa_state{r.state};
    if (keep_probability) *keep_probability = r.keep_probability;
  });
}

qpa_status qpa_iterate(const qpa_state* initial, const qpa_noise* noise, qpa_placement placement,
                       size_t max_rounds, double fixpoint_tol, qpa_trajectory** out) {
  return guarded([&] {
    require_ptr(initial, "state");
    require_ptr(noise, "noise");
    require_ptr(out, "out");
    qpa::StopCriteria stop;
    stop.max_rounds = max_rounds;
    stop.fixpoint_tol = fixpoint_tol;
    *out = new qpa_trajectory{qpa::iterate(initial->state, noise->model, placement_of(placement), stop)};
  });
}

size_t qpa_trajectory_length(const qpa_trajectory* t) { return t ? t->trajectory.records.size() : 0; }

int qpa_trajectory_converged(const qpa_trajectory* t) { return t && t->trajectory.converged ? 1 : 0; }

qpa_status qpa_trajectory_record(const qpa_trajectory* t, size_t index, qpa_round_record* out) {
  return guarded([&] {
    require_ptr(t, "trajectory");
    require_ptr(out, "out");
    if (index >= t->trajectory.records.size()) qpa::fail(qpa::ErrorCode::InvalidArgument, "record index out of range");
    const auto& r = t->trajectory.records[index];
    out->round = r.round;
    out->fidelity = r.fidelity;
    out->conditional_fidelity = r.conditional_fidelity;
    out->keep_probability = r.keep_probability;
    const auto& c = r.state.coefficients();
    std::copy(c.begin(), c.end(), out->coefficients);
  });
}

qpa_status qpa_convergence_exponents(const qpa_trajectory* t, double* rate_fidelity, double* rate_conditional) {
  return guarded([&] {
    require_ptr(t, "trajectory");
    const auto e = qpa::convergence_exponents(t->trajectory);
    if (rate_fidelity) *rate_fidelity = e.fidelity.rate;
    if (rate_conditional) *rate_conditional = e.conditional.rate;
  });
}

void qpa_trajectory_free(qpa_trajectory* t) { delete t; }

qpa_status qpa_classify_regime(const qpa_noise* noise, const qpa_state* initial, qpa_placement placement,
                               qpa_regime_report* out) {
  return guarded([&] {
    require_ptr(noise, "noise");
    require_ptr(initial, "state");
    require_ptr(out, "out");
    const auto r = qpa::classify_regime(noise->model, initial->state, placement_of(placement));
    out->regime = regime_of(r.regime);
    out->max_fidelity = r.max_fidelity;
    out->conditional_limit = r.conditional_limit;
    out->rounds = r.rounds;
    out->converged = r.converged ? 1 : 0;
  });
}

qpa_status qpa_find_thresholds(qpa_noise_family family, const qpa_state* initial, double lo, double hi,
                               double bisect_tol, qpa_thresholds* out) {
  return guarded([&] {
    require_ptr(initial, "state");
    require_ptr(out, "out");
    qpa::ThresholdOptions opt;
    opt.lo = lo;
    opt.hi = hi;
    opt.bisect_tol = bisect_tol;
    const auto r = qpa::find_thresholds(family_of(family), initial->state, opt);
    *out = qpa_thresholds{};
    if (r.purify) {
      out->has_purify = 1;
      out->purify_lo = r.purify->lo;
      out->purify_hi = r.purify->hi;
    }
    if (r.secure) {
      out->has_secure = 1;
      out->secure_lo = r.secure->lo;
      out->secure_hi = r.secure->hi;
    }
  });
}

// ---- Monte Carlo

qpa_status qpa_ensemble_create(const double bell[4], size_t pairs, qpa_flag_mode mode, uint64_t seed, size_t chunks,
                               qpa_ensemble** out) {
  return guarded([&] {
    require_ptr(bell, "bell");
    require_ptr(out, "out");
    std::array<double, 4> b{};
    std::copy(bell, bell + 4, b.begin());
    *out = new qpa_ensemble{qpa::mc::Ensemble::create(b, pairs, flag_mode_of(mode), seed, chunks)};
  });
}

size_t qpa_ensemble_size(const qpa_ensemble* e) { return e ? e->ensemble.size() : 0; }

qpa_status qpa_ensemble_histogram(const qpa_ensemble* e, size_t out[16]) {
  return guarded([&] {
    require_ptr(e, "ensemble");
    require_ptr(out, "out");
    const auto h = e->ensemble.histogram();
    std::copy(h.begin(), h.end(), out);
  });
}

qpa_status qpa_ensemble_run_round(qpa_ensemble* e, const qpa_noise* noise, qpa_placement placement, unsigned threads,
                                  qpa_mc_round* out) {
  return guarded([&] {
    require_ptr(e, "ensemble");
    require_ptr(noise, "noise");
    const auto s = e->ensemble.run_round(noise->model, placement_of(placement), threads);
    if (out) fill_mc_round(s, out);
  });
}

qpa_status qpa_ensemble_check_minimum_fidelity(qpa_ensemble* e, double sacrifice_fraction, double f_min,
                                               int* passed, double* estimate, double* lower, double* upper) {
  return guarded([&] {
    require_ptr(e, "ensemble");
    const auto c = e->ensemble.check_minimum_fidelity(sacrifice_fraction, f_min);
    if (passed) *passed = c.passed ? 1 : 0;
    if (estimate) *estimate = c.estimate;
    if (lower) *lower = c.lower;
    if (upper) *upper = c.upper;
  });
}

void qpa_ensemble_free(qpa_ensemble* e) { delete e; }

// ---- experiments

qpa_status qpa_experiment_create(qpa_experiment** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new qpa_experiment{};
  });
}

qpa_status qpa_experiment_load_preset(qpa_experiment* x, const char* name) {
  return guarded([&] {
    require_ptr(x, "experiment");
    require_ptr(name, "name");
    x->config = qpa::preset_config(name);
  });
}

qpa_status qpa_experiment_load_config(qpa_experiment* x, const char* text, const char* source_name) {
  return guarded([&] {
    require_ptr(x, "experiment");
    require_ptr(text, "text");
    x->config = qpa::parse_config(text, source_name ? source_name : "<config>", x->config);
  });
}

qpa_status qpa_experiment_set_seed(qpa_experiment* x, uint64_t seed) {
  return guarded([&] {
    require_ptr(x, "experiment");
    x->seed_override = true;
    x->seed = seed;
  });
}

qpa_status qpa_experiment_set_format(qpa_experiment* x, const char* format) {
  return guarded([&] {
    require_ptr(x, "experiment");
    require_ptr(format, "format");
    const std::string f = format;
    if (f == "csv") {
      x->format = qpa::OutputFormat::Csv;
    } else if (f == "json") {
      x->format = qpa::OutputFormat::Json;
    } else {
      qpa::fail(qpa::ErrorCode::Config, "unknown format '" + f + "' (expected csv or json)");
    }
    x->format_override = true;
  });
}

qpa_status qpa_experiment_set_output_dir(qpa_experiment* x, const char* dir) {
  return guarded([&] {
    require_ptr(x, "experiment");
    require_ptr(dir, "dir");
    x->options.out_dir = dir;
  });
}

qpa_status qpa_experiment_set_deterministic(qpa_experiment* x, int deterministic) {
  return guarded([&] {
    require_ptr(x, "experiment");
    x->options.deterministic = deterministic != 0;
  });
}

namespace {
qpa::ExperimentConfig effective(const qpa_experiment& x) {
  qpa::ExperimentConfig c = x.config;
  if (x.seed_override) c.seed = x.seed;
  if (x.format_override) c.format = x.format;
  return c;
}
}  // namespace

qpa_status qpa_experiment_config_json(const qpa_experiment* x, char** out) {
  return guarded([&] {
    require_ptr(x, "experiment");
    require_ptr(out, "out");
    *out = dup_string(effective(*x).to_json().dump(2));
  });
}

qpa_status qpa_experiment_run(qpa_experiment* x, const char* command, char** summary) {
  return guarded([&] {
    require_ptr(x, "experiment");
    require_ptr(command, "command");
    const std::string cmd = command;
    const auto config = effective(*x);
    nlohmann::json s;
    if (cmd == "iterate") {
      s = qpa::run_iterate(config, x->options);
    } else if (cmd == "mc") {
      s = qpa::run_mc(config, x->options);
    } else if (cmd == "scan") {
      s = qpa::run_scan(config, x->options);
    } else {
      qpa::fail(qpa::ErrorCode::InvalidArgument, "unknown command '" + cmd + "'");
    }
    if (summary) *summary = dup_string(s.dump(2));
  });
}

void qpa_experiment_free(qpa_experiment* x) { delete x; }

qpa_status qpa_verify(const char* tables_json, const char* out_dir, char** summary) {
  return guarded([&] {
    qpa::RunOptions options;
    if (out_dir) options.out_dir = out_dir;
    std::optional<std::string> tables;
    if (tables_json) tables = tables_json;
    const auto s = qpa::run_verify(tables, options);
    if (summary) *summary = dup_string(s.dump(2));
  });
}

}  // extern "C"
