#ifndef POLYSDE_FIELD_HPP
#define POLYSDE_FIELD_HPP

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "polysde/dual.hpp"

namespace polysde {

// Time-dependent vector field over (t, z). Both a plain and a dual-mode
// entry point exist so integrators can use the cheap path and derivative
// consumers (Milstein, Stratonovich correction, stationary drift) can seed
// tangents without a separate implementation.
class Field {
 public:
  virtual ~Field() = default;
  virtual int dim() const = 0;
  virtual void eval(double t, std::span<const double> z, std::span<double> out) const = 0;
  virtual void eval(double t, std::span<const Dual> z, std::span<Dual> out) const = 0;

  std::vector<double> operator()(double t, std::span<const double> z) const {
    std::vector<double> out(static_cast<std::size_t>(dim()));
    eval(t, z, out);
    return out;
  }
};

using FieldPtr = std::shared_ptr<const Field>;

// Autonomous scalar field (log-densities and friends).
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual int dim() const = 0;
  virtual double eval(std::span<const double> z) const = 0;
  virtual Dual eval(std::span<const Dual> z) const = 0;
};

using ScalarFieldPtr = std::shared_ptr<const ScalarField>;

namespace detail {

template <class F>
class LambdaField final : public Field {
 public:
  LambdaField(int dim, F f) : dim_(dim), f_(std::move(f)) {}
  int dim() const override { return dim_; }
  void eval(double t, std::span<const double> z, std::span<double> out) const override {
    f_(t, z, out);
  }
  void eval(double t, std::span<const Dual> z, std::span<Dual> out) const override {
    f_(t, z, out);
  }

 private:
  int dim_;
  F f_;
};

template <class F>
class LambdaScalarField final : public ScalarField {
 public:
  LambdaScalarField(int dim, F f) : dim_(dim), f_(std::move(f)) {}
  int dim() const override { return dim_; }
  double eval(std::span<const double> z) const override { return f_(z); }
  Dual eval(std::span<const Dual> z) const override { return f_(z); }

 private:
  int dim_;
  F f_;
};

}  // namespace detail

// Wraps a scalar-generic callable f(t, span<const S>, span<S>).
template <class F>
FieldPtr make_field(int dim, F f) {
  return std::make_shared<detail::LambdaField<F>>(dim, std::move(f));
}

// Wraps a scalar-generic callable S f(span<const S>).
template <class F>
ScalarFieldPtr make_scalar_field(int dim, F f) {
  return std::make_shared<detail::LambdaScalarField<F>>(dim, std::move(f));
}

// Diagonal of the Jacobian (df^d/dz^d)_d via one forward-mode pass per
// dimension.
std::vector<double> diag_jacobian(const Field& f, double t, std::span<const double> z);

// Gradient of an autonomous scalar field via forward-mode passes.
std::vector<double> gradient(const ScalarField& f, std::span<const double> z);

}  // namespace polysde

#endif  // POLYSDE_FIELD_HPP
