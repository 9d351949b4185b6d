#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "admm4dvar/core/vector_ops.hpp"

namespace admm4dvar {

/// One-step discrete dynamics H with its tangent-linear map and adjoint.
///
///   step(u)        = H(u)
///   tangent(u, v)  = dH(u) v
///   adjoint(u, w)  = dH(u)^T w   (Euclidean transpose)
///
/// Implementations must be reentrant: the solvers call them concurrently on
/// distinct time levels.
template <typename M>
concept DynamicalModel = requires(const M& model, ConstView u, ConstView v) {
  { model.dim() } -> std::convertible_to<std::size_t>;
  { model.step(u) } -> std::same_as<StateVector>;
  { model.tangent(u, v) } -> std::same_as<StateVector>;
  { model.adjoint(u, v) } -> std::same_as<StateVector>;
};

/// Type-erased model handle (the capability record the CLI hands to solvers).
class ModelCapability {
 public:
  ModelCapability() = default;

  template <DynamicalModel M>
  ModelCapability(M model, std::string name = {})  // NOLINT(google-explicit-constructor)
      : impl_(std::make_shared<Holder<M>>(std::move(model))), name_(std::move(name)) {}

  std::size_t dim() const { return impl_->dim(); }
  StateVector step(ConstView u) const { return impl_->step(u); }
  StateVector tangent(ConstView u, ConstView v) const { return impl_->tangent(u, v); }
  StateVector adjoint(ConstView u, ConstView w) const { return impl_->adjoint(u, w); }
  const std::string& name() const noexcept { return name_; }
  explicit operator bool() const noexcept { return static_cast<bool>(impl_); }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual std::size_t dim() const = 0;
    virtual StateVector step(ConstView u) const = 0;
    virtual StateVector tangent(ConstView u, ConstView v) const = 0;
    virtual StateVector adjoint(ConstView u, ConstView w) const = 0;
  };

  template <typename M>
  struct Holder final : Concept {
    explicit Holder(M m) : model(std::move(m)) {}
    std::size_t dim() const override { return model.dim(); }
    StateVector step(ConstView u) const override { return model.step(u); }
    StateVector tangent(ConstView u, ConstView v) const override { return model.tangent(u, v); }
    StateVector adjoint(ConstView u, ConstView w) const override { return model.adjoint(u, w); }
    M model;
  };

  std::shared_ptr<const Concept> impl_;
  std::string name_;
};

/// Applies `model.step` k times.
template <DynamicalModel M>
StateVector propagate(const M& model, ConstView u0, std::size_t steps) {
  StateVector u(u0.begin(), u0.end());
  for (std::size_t k = 0; k < steps; ++k) u = model.step(u);
  return u;
}

/// Full rollout u_0 .. u_N.
template <DynamicalModel M>
std::vector<StateVector> rollout(const M& model, ConstView u0, std::size_t steps) {
  std::vector<StateVector> traj;
  traj.reserve(steps + 1);
  traj.emplace_back(u0.begin(), u0.end());
  for (std::size_t k = 0; k < steps; ++k) traj.push_back(model.step(traj.back()));
  return traj;
}

}  // namespace admm4dvar
