#pragma once

#include <cstdint>
#include <vector>

#include "sensboot/bilstm.hpp"

namespace sensboot {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Coupled L2: weight_decay * θ is added to the gradient before the moments.
  double weight_decay = 1e-8;
};

template <typename T>
struct AdamState {
  std::vector<T> first_moment;
  std::vector<T> second_moment;
  std::uint64_t step = 0;

  AdamState() = default;
  explicit AdamState(std::size_t size)
      : first_moment(size, T(0)), second_moment(size, T(0)) {}
};

/// One bias-corrected Adam update over every parameter. Elementwise, so the
/// OpenMP version matches adam_step_serial bit for bit. Throws NumericError
/// (leaving `params` partially updated) if any updated value is non-finite.
template <typename T>
void adam_step(Params<T>& params, const Params<T>& grads, AdamState<T>& state,
               const AdamConfig& cfg);

template <typename T>
void adam_step_serial(Params<T>& params, const Params<T>& grads,
                      AdamState<T>& state, const AdamConfig& cfg);

}  // namespace sensboot
