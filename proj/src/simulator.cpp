#include "fraclap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

#include "fraclap/error.hpp"

namespace fraclap {

namespace {

bool keep_mode(const GridSpec& grid, std::size_t index) {
  const auto n = grid.points_per_dim();
  const auto limit = static_cast<std::int64_t>(n / 3);
  if (grid.dim() == 1) return std::abs(grid.mode_index(index)) <= limit;
  return std::abs(grid.mode_index(index / n)) <= limit && std::abs(grid.mode_index(index % n)) <= limit;
}

double multiplier(double k, double beta) {
  if (k == 0.0) return 0.0;
  if (beta == 1.0) return k;
  if (beta == 2.0) return k * k;
  return std::pow(k, beta);
}

Field diffused_power(const Field& u, double p, DiffusionForm form) {
  // |u| turns the operator into backward diffusion wherever u < 0, so rounding
  // below zero would grow; integer powers keep their sign structure.
  if (form == DiffusionForm::natural_power) {
    if (p == 1.0) return u;
    form = p == std::round(p) && std::fmod(p, 2.0) != 0.0 ? DiffusionForm::signed_power : DiffusionForm::absolute_power;
  }
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = p == 1.0 ? std::abs(u[i]) : std::pow(std::abs(u[i]), p);
    out[i] = form == DiffusionForm::signed_power && u[i] < 0.0 ? -a : a;
  }
  return Field(u.grid(), std::move(out));
}

Field source_power(const Field& u, double q) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(std::abs(u[i]), q);
  return Field(u.grid(), std::move(out));
}

HistoryEntry snapshot(const SimState& s) {
  HistoryEntry e;
  e.t = s.t;
  double sum2 = 0.0;
  e.min = std::numeric_limits<double>::infinity();
  for (double v : s.u.values()) {
    e.sup = std::max(e.sup, std::abs(v));
    e.min = std::min(e.min, v);
    sum2 += v * v;
  }
  e.l2 = std::sqrt(sum2 * s.u.grid().cell_volume());
  return e;
}

double sup_norm(const Field& u) {
  double s = 0.0;
  for (double v : u.values()) s = std::max(s, std::abs(v));
  return s;
}

// a * x + b * (y + dt * ry)
Field combine(double a, const Field& x, double b, const Field& y, double dt, const Field& ry) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * (y[i] + dt * ry[i]);
  return Field(x.grid(), std::move(out));
}

Regime predicted_regime(const SimParams& params, int dim) {
  if (!params.source_term) return Regime::outside_theorems;
  ExponentParams ep;
  ep.p = params.p;
  ep.q = params.q;
  ep.beta = params.beta;
  ep.N = dim;
  ep.gamma = params.gamma;
  return classify(ep);
}

}  // namespace

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::blowup: return "blowup";
    case Classification::decay: return "decay";
    case Classification::undecided: return "undecided";
  }
  return "undecided";
}

Field rhs(const Field& u, const SimParams& params, bool dealias) {
  require(u.is_finite(), ErrorCode::non_finite, "right-hand side of a non-finite field");
  const GridSpec& grid = u.grid();
  Spectrum diffusion = to_spectrum(diffused_power(u, params.p, params.diffusion));
  auto& d = diffusion.mutable_coefficients();
  std::optional<Spectrum> source;
  if (params.source_term) source = to_spectrum(source_power(u, params.q));

  for (std::size_t i = 0; i < d.size(); ++i) {
    if (dealias && !keep_mode(grid, i)) {
      d[i] = 0.0;
      continue;
    }
    d[i] *= -multiplier(grid.wavenumber_norm(i), params.beta);
    if (source) d[i] += source->coefficients()[i];
  }
  Field out = from_spectrum(diffusion);
  require(out.is_finite(), ErrorCode::non_finite, "right-hand side diverged");
  return out;
}

SimState initial_state(Field u0) {
  SimState s{std::move(u0), 0.0, 0.0, 0, {}};
  s.history.push_back(snapshot(s));
  return s;
}

double stable_dt(const Field& u, const SimParams& params, double cfl) {
  const double sup = sup_norm(u);
  double rate = params.p * std::pow(sup, params.p - 1.0) * std::pow(u.grid().k_max(), params.beta);
  if (params.source_term) rate += params.q * std::pow(sup, params.q - 1.0);
  return cfl / (rate + 1e-30);
}

StepStatus step(SimState& state, const SimControls& controls, const SimParams& params) {
  const double remaining = controls.t_max - state.t;
  const double dt_cfl = stable_dt(state.u, params, controls.cfl);
  if (!(dt_cfl >= controls.dt_min)) return StepStatus::dt_collapse;
  const bool last = dt_cfl >= remaining;
  const double dt = last ? remaining : dt_cfl;

  try {
    const Field& u = state.u;
    const Field u1 = combine(0.0, u, 1.0, u, dt, rhs(u, params, controls.dealias));
    const Field u2 = combine(0.75, u, 0.25, u1, dt, rhs(u1, params, controls.dealias));
    Field u3 = combine(1.0 / 3.0, u, 2.0 / 3.0, u2, dt, rhs(u2, params, controls.dealias));
    state.u = std::move(u3);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::non_finite) throw;
    state.u.mutable_values().assign(state.u.size(), std::numeric_limits<double>::quiet_NaN());
    return StepStatus::diverged;
  }
  state.t = last ? controls.t_max : state.t + dt;
  state.dt = dt;
  ++state.step_count;
  if (!state.u.is_finite()) return StepStatus::diverged;
  if (state.step_count % controls.record_stride == 0) state.history.push_back(snapshot(state));
  return StepStatus::ok;
}

Field linear_exact(const Field& u0, double t, double beta) {
  require(t >= 0.0, ErrorCode::invalid_parameter, "linear solution needs t >= 0");
  require(beta > 0.0 && beta <= 2.0, ErrorCode::invalid_parameter, "beta must lie in (0, 2]");
  if (t == 0.0) return u0;
  return apply_radial_multiplier(u0, [beta, t](double k) { return std::exp(-multiplier(k, beta) * t); });
}

void validate(const SimParams& params) {
  require(params.p > 0.0, ErrorCode::invalid_parameter, "p must be positive");
  require(params.q > 0.0, ErrorCode::invalid_parameter, "q must be positive");
  require(params.beta > 0.0 && params.beta <= 2.0, ErrorCode::invalid_parameter, "beta must lie in (0, 2]");
}

void validate(const SimControls& controls, double initial_sup) {
  require(controls.t_max > 0.0, ErrorCode::invalid_parameter, "t_max must be positive");
  require(controls.cfl > 0.0 && controls.cfl <= 1.0, ErrorCode::invalid_parameter, "cfl must lie in (0, 1]");
  require(controls.dt_min > 0.0 && controls.dt_min < controls.t_max, ErrorCode::invalid_parameter,
          "dt_min must satisfy 0 < dt_min < t_max");
  require(controls.blowup_threshold > initial_sup, ErrorCode::invalid_parameter,
          "blowup_threshold must exceed the initial sup norm");
  require(controls.record_stride >= 1, ErrorCode::invalid_parameter, "record_stride must be >= 1");
}

SimOutcome run(const Field& u0, const SimParams& params, const SimControls& controls, bool probe_mode) {
  validate(params);
  require(u0.is_finite(), ErrorCode::non_finite, "initial data must be finite");
  const double sup0 = sup_norm(u0);
  validate(controls, sup0);
  if (probe_mode) {
    const auto v = u0.values();
    require(*std::min_element(v.begin(), v.end()) >= 0.0, ErrorCode::invalid_parameter,
            "probe runs need nonnegative initial data");
  }

  SimOutcome out;
  out.predicted_regime = predicted_regime(params, u0.grid().dim());
  out.initial_sup = sup0;
  out.warning = u0.warning();

  SimState state = initial_state(u0);
  if (sup0 == 0.0) {
    // Zero is a fixed point.
    state.t = controls.t_max;
    state.history.push_back(snapshot(state));
    out.classification = Classification::decay;
    out.t_final = controls.t_max;
    out.history = std::move(state.history);
    out.final_field = std::move(state.u);
    return out;
  }

  std::deque<double> recent{sup0};  // sup after each of the last 10 steps, plus one
  bool blew_up = false;
  while (state.t < controls.t_max) {
    const StepStatus status = step(state, controls, params);
    if (status == StepStatus::diverged) {
      out.diverged = true;
      break;
    }
    if (status == StepStatus::dt_collapse) {
      out.dt_collapsed = true;
      blew_up = recent.size() == 11 && recent.back() >= 10.0 * recent.front();
      break;
    }
    recent.push_back(sup_norm(state.u));
    if (recent.size() > 11) recent.pop_front();
    if (recent.back() >= controls.blowup_threshold) {
      blew_up = true;
      break;
    }
  }
  if (state.history.back().t != state.t && !out.diverged) state.history.push_back(snapshot(state));

  out.t_final = state.t;
  out.steps = state.step_count;
  out.final_sup = out.diverged ? std::numeric_limits<double>::infinity() : sup_norm(state.u);
  if (blew_up) {
    out.classification = Classification::blowup;
    out.t_blowup = state.t;
  } else if (!out.diverged && state.t >= controls.t_max && out.final_sup <= 0.1 * sup0) {
    const double quarter = 0.75 * state.t;
    bool monotone = true;
    const HistoryEntry* prev = nullptr;
    for (const auto& h : state.history) {
      if (h.t < quarter) continue;
      if (prev && h.sup > prev->sup) monotone = false;
      prev = &h;
    }
    out.classification = monotone ? Classification::decay : Classification::undecided;
  }
  out.history = std::move(state.history);
  out.final_field = std::move(state.u);
  return out;
}

SimOutcome probe_theorem2(double gamma, double epsilon, const SimParams& params, const SimControls& controls,
                          const GridSpec& grid) {
  const int N = grid.dim();
  require(gamma > 0.0 && gamma < N, ErrorCode::invalid_parameter, "gamma must satisfy 0<gamma<N");
  require(epsilon >= 0.0, ErrorCode::invalid_parameter, "epsilon must be nonnegative");
  const double qss = q_star_star(params.p, params.beta, gamma);
  require(params.q > params.p && params.q < qss, ErrorCode::invalid_parameter,
          "slow-decay probe needs p < q < p + beta/gamma");

  SimParams with_gamma = params;
  with_gamma.gamma = gamma;
  const Field u0 = epsilon == 0.0 ? Field(grid) : sample(AlgebraicDecay{epsilon, gamma}, grid);
  SimOutcome out = run(u0, with_gamma, controls, true);
  if (out.warning.empty() && epsilon > 0.0)
    out.warning = "boundary value " + std::to_string(u0.boundary_max());
  out.q_star_star = qss;
  out.delta_star = delta_star(ExponentParams{params.p, params.q, params.beta, N, gamma, epsilon});
  return out;
}

nlohmann::json SimOutcome::to_json() const {
  nlohmann::json j;
  j["classification"] = to_string(classification);
  j["t_final"] = t_final;
  j["t_blowup"] = t_blowup ? nlohmann::json(*t_blowup) : nlohmann::json(nullptr);
  j["initial_sup"] = initial_sup;
  j["final_sup"] = std::isfinite(final_sup) ? nlohmann::json(final_sup) : nlohmann::json("inf");
  j["steps"] = steps;
  j["diverged"] = diverged;
  j["dt_collapsed"] = dt_collapsed;
  j["predicted_regime"] = to_string(predicted_regime);
  j["q_star_star"] = q_star_star ? nlohmann::json(*q_star_star) : nlohmann::json(nullptr);
  j["delta_star"] = delta_star ? nlohmann::json(*delta_star) : nlohmann::json(nullptr);
  j["warning"] = warning;
  return j;
}

void write_history_csv(const SimOutcome& outcome, std::ostream& out) {
  const auto precision = out.precision(17);
  out << "t,sup,l2\n";
  for (const auto& h : outcome.history) out << h.t << ',' << h.sup << ',' << h.l2 << '\n';
  out.precision(precision);
}

}  // namespace fraclap
