#include "igo/generator.hpp"

#include <cmath>

#include "igo/errors.hpp"
#include "igo/nn.hpp"

namespace igo {

Generator Generator::linear_rig(Tensor B, double latent_radius) {
    if (B.rank() != 2) throw ShapeMismatch("linear_rig: B must be a matrix");
    Generator g;
    g.mode_ = GeneratorMode::linear_rig;
    g.latent_dim_ = B.cols();
    g.output_dim_ = B.rows();
    g.radius_ = latent_radius;
    g.b_ = std::move(B);
    return g;
}

Generator Generator::identity_rig(std::size_t n, double latent_radius) {
    Tensor eye = Tensor::zeros({n, n});
    for (std::size_t i = 0; i < n; ++i) eye.at(i, i) = 1.0;
    return linear_rig(std::move(eye), latent_radius);
}

Generator Generator::from_net_final(ScoreNet& net, double t_gen,
                                    double latent_radius) {
    Generator g;
    g.mode_ = GeneratorMode::final;
    g.latent_dim_ = net.spec().data_dim;
    g.output_dim_ = net.spec().data_dim;
    g.radius_ = latent_radius;
    g.t_gen_ = t_gen;
    g.net_ = &net;
    return g;
}

Generator Generator::from_net_intermediate(ScoreNet& net, double t_gen,
                                           double latent_radius) {
    Generator g;
    g.mode_ = GeneratorMode::intermediate;
    g.latent_dim_ = net.spec().hidden;
    g.output_dim_ = net.spec().data_dim;
    g.radius_ = latent_radius;
    g.t_gen_ = t_gen;
    g.net_ = &net;
    return g;
}

Generator Generator::from_net_inter_full(ScoreNet& net, double t_gen,
                                         double latent_radius) {
    Generator g;
    g.mode_ = GeneratorMode::inter_full;
    g.latent_dim_ = net.spec().data_dim;
    g.output_dim_ = net.spec().data_dim;
    g.radius_ = latent_radius;
    g.t_gen_ = t_gen;
    g.net_ = &net;
    return g;
}

Generator Generator::union_of(ScoreNet& net, double t_gen,
                              double latent_radius) {
    Generator g = from_net_final(net, t_gen, latent_radius);
    g.mode_ = GeneratorMode::union_both;
    return g;
}

Generator Generator::final_member() const {
    if (mode_ != GeneratorMode::union_both) {
        throw ConfigError("final_member: generator is not a union");
    }
    return from_net_final(*net_, t_gen_, radius_);
}

Generator Generator::intermediate_member() const {
    if (mode_ != GeneratorMode::union_both) {
        throw ConfigError("intermediate_member: generator is not a union");
    }
    return from_net_intermediate(*net_, t_gen_, radius_);
}

Tape::NodeId Generator::forward(Tape& tape, Tape::NodeId z) const {
    const Tensor& zv = tape.value(z);
    if (zv.rank() != 2 || zv.cols() != latent_dim_) {
        throw ShapeMismatch("generator: latent " + zv.shape_str() +
                            ", expected cols " + std::to_string(latent_dim_));
    }
    switch (mode_) {
        case GeneratorMode::linear_rig:
            return tape.linear(tape.constant(b_), z);
        case GeneratorMode::final: {
            auto embed = net_->embed_node(
                tape, std::vector<double>(zv.rows(), t_gen_));
            return net_->forward_full(tape, z, embed);
        }
        case GeneratorMode::intermediate: {
            auto embed = net_->embed_node(
                tape, std::vector<double>(zv.rows(), t_gen_));
            auto h = net_->core().forward_range(tape, z, embed,
                                                net_->tap_layer(),
                                                net_->spec().core_depth);
            return net_->inter_decoder().forward(tape, h, embed);
        }
        case GeneratorMode::inter_full: {
            auto embed = net_->embed_node(
                tape, std::vector<double>(zv.rows(), t_gen_));
            return net_->forward_intermediate(tape, z, embed);
        }
        case GeneratorMode::union_both:
            throw ConfigError(
                "generator: a union has no single forward map; project onto "
                "its members");
    }
    throw ConfigError("generator: unhandled mode");
}

std::vector<double> Generator::map(const std::vector<double>& z) const {
    Tape tape;
    auto zn = tape.constant(Tensor({1, z.size()}, z));
    return tape.value(forward(tape, zn)).row(0);
}

std::vector<double> Generator::warm_start(const std::vector<double>& w) const {
    if (w.size() != output_dim_) {
        throw ShapeMismatch("warm_start: target length " +
                            std::to_string(w.size()) + ", output dim " +
                            std::to_string(output_dim_));
    }
    switch (mode_) {
        case GeneratorMode::linear_rig: {
            std::vector<double> z(latent_dim_, 0.0);
            for (std::size_t j = 0; j < latent_dim_; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < output_dim_; ++i) {
                    acc += b_.at(i, j) * w[i];
                }
                z[j] = acc;
            }
            return z;
        }
        case GeneratorMode::final:
        case GeneratorMode::inter_full:
            return w;
        case GeneratorMode::intermediate: {
            Tape tape;
            auto embed = net_->embed_node(tape, {t_gen_});
            auto h = net_->inter_encoder().forward(
                tape, tape.constant(Tensor({1, w.size()}, w)), embed);
            return tape.value(h).row(0);
        }
        case GeneratorMode::union_both:
            throw ConfigError("warm_start: a union has no single latent space");
    }
    throw ConfigError("warm_start: unhandled mode");
}

std::vector<double> Generator::clamp_latent(const std::vector<double>& z) const {
    const double n = norm2(z);
    if (n <= radius_ || n == 0.0) return z;
    return scaled(z, radius_ / n);
}

}  // namespace igo
