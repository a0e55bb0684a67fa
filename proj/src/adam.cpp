#include "sensboot/adam.hpp"

#include <cmath>

#include "sensboot/error.hpp"

namespace sensboot {

namespace {

template <typename T>
void check_shapes(const Params<T>& params, const Params<T>& grads,
                  AdamState<T>& state) {
  if (grads.values.size() != params.values.size()) {
    throw ConfigError("gradient shape does not match parameters");
  }
  if (state.first_moment.empty() && state.step == 0) {
    state = AdamState<T>(params.values.size());
  }
  if (state.first_moment.size() != params.values.size() ||
      state.second_moment.size() != params.values.size()) {
    throw ConfigError("optimizer state shape does not match parameters");
  }
}

struct StepConstants {
  double lr, b1, b2, eps, wd, bc1, bc2;
};

StepConstants constants(const AdamConfig& cfg, std::uint64_t step) {
  const double t = static_cast<double>(step);
  return {cfg.learning_rate,
          cfg.beta1,
          cfg.beta2,
          cfg.epsilon,
          cfg.weight_decay,
          1.0 - std::pow(cfg.beta1, t),
          1.0 - std::pow(cfg.beta2, t)};
}

template <typename T>
inline bool update_one(T& theta, T grad, T& m, T& v, const StepConstants& k) {
  const double g = static_cast<double>(grad) + k.wd * static_cast<double>(theta);
  const double m_new = k.b1 * static_cast<double>(m) + (1.0 - k.b1) * g;
  const double v_new = k.b2 * static_cast<double>(v) + (1.0 - k.b2) * g * g;
  m = static_cast<T>(m_new);
  v = static_cast<T>(v_new);
  const double m_hat = m_new / k.bc1;
  const double v_hat = v_new / k.bc2;
  theta = static_cast<T>(static_cast<double>(theta) -
                         k.lr * m_hat / (std::sqrt(v_hat) + k.eps));
  return std::isfinite(theta);
}

}  // namespace

template <typename T>
void adam_step_serial(Params<T>& params, const Params<T>& grads,
                      AdamState<T>& state, const AdamConfig& cfg) {
  check_shapes(params, grads, state);
  ++state.step;
  const auto k = constants(cfg, state.step);
  bool ok = true;
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    ok &= update_one(params.values[i], grads.values[i], state.first_moment[i],
                     state.second_moment[i], k);
  }
  if (!ok) throw NumericError("non-finite parameter after Adam step");
}

template <typename T>
void adam_step(Params<T>& params, const Params<T>& grads, AdamState<T>& state,
               const AdamConfig& cfg) {
  check_shapes(params, grads, state);
  ++state.step;
  const auto k = constants(cfg, state.step);
  const auto n = static_cast<std::ptrdiff_t>(params.values.size());
  T* theta = params.values.data();
  const T* g = grads.values.data();
  T* m = state.first_moment.data();
  T* v = state.second_moment.data();
  int bad = 0;
#pragma omp parallel for schedule(static) reduction(| : bad)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    bad |= update_one(theta[i], g[i], m[i], v[i], k) ? 0 : 1;
  }
  if (bad) throw NumericError("non-finite parameter after Adam step");
}

template void adam_step<float>(Params<float>&, const Params<float>&,
                               AdamState<float>&, const AdamConfig&);
template void adam_step<double>(Params<double>&, const Params<double>&,
                                AdamState<double>&, const AdamConfig&);
template void adam_step_serial<float>(Params<float>&, const Params<float>&,
                                      AdamState<float>&, const AdamConfig&);
template void adam_step_serial<double>(Params<double>&, const Params<double>&,
                                       AdamState<double>&, const AdamConfig&);

}  // namespace sensboot
