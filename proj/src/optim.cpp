#include "igo/optim.hpp"

#include <cmath>

#include "igo/errors.hpp"

namespace igo {

Adam::Adam(std::vector<Param*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Param* p : params_) {
        m_.push_back(Tensor::zeros(p->value.shape));
        v_.push_back(Tensor::zeros(p->value.shape));
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Param& p = *params_[i];
        require_same_shape(p.value, p.grad, "adam: " + p.name);
        require_finite(p.grad, "adam gradient for " + p.name);
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        for (std::size_t k = 0; k < p.value.data.size(); ++k) {
            const double g = p.grad.data[k];
            m.data[k] = cfg_.beta1 * m.data[k] + (1.0 - cfg_.beta1) * g;
            v.data[k] = cfg_.beta2 * v.data[k] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m.data[k] / bc1;
            const double vhat = v.data[k] / bc2;
            p.value.data[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
        p.bump();
    }
}

void Adam::reset() {
    t_ = 0;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        m_[i].fill(0.0);
        v_[i].fill(0.0);
    }
}

}  // namespace igo
