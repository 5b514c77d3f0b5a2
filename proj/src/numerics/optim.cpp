#include "mmgl/numerics/optim.hpp"

#include <cmath>

#include "mmgl/error.hpp"
#include "mmgl/numerics/ops.hpp"

namespace mmgl {

Parameter::Parameter(std::string name_, Tensor init)
    : name(std::move(name_)),
      value(std::move(init)),
      grad(value.rows(), value.cols()),
      m(value.rows(), value.cols()),
      v(value.rows(), value.cols()) {}

void Parameter::zero_grad() { grad.fill(0.0f); }

void Parameter::accumulate(const Tensor& g) {
  require_same_shape(grad, g, name.c_str());
  add_inplace(grad, g);
}

void OptimConfig::validate() const {
  if (!(lr > 0.0)) throw Error(Errc::InvalidArgument, "learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
    throw Error(Errc::InvalidArgument, "Adam betas must lie in (0,1)");
  if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "Adam eps must be positive");
}

void adam_step(std::span<Parameter* const> params, const OptimConfig& cfg) {
  cfg.validate();
  for (const Parameter* p : params) {
    if (!p->grad.all_finite()) throw Error(Errc::NonFiniteGradient, "gradient of " + p->name);
  }
  for (Parameter* p : params) {
    ++p->step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->step));
    auto value = p->value.values();
    auto grad = p->grad.values();
    auto m = p->m.values();
    auto v = p->v.values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      const double mi = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      const double vi = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double m_hat = mi / bc1;
      const double v_hat = vi / bc2;
      value[i] = static_cast<float>(value[i] - cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps));
      grad[i] = 0.0f;
    }
  }
}

}  // namespace mmgl
