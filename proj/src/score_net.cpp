#include "igo/score_net.hpp"

#include <algorithm>

#include "igo/errors.hpp"
#include "igo/rng.hpp"

namespace igo {

void ScoreNetSpec::validate() const {
    if (data_dim == 0 || hidden == 0) {
        throw ShapeMismatch("ScoreNetSpec: zero data_dim or hidden width");
    }
    if (encoder_depth == 0 || core_depth == 0) {
        throw ShapeMismatch("ScoreNetSpec: encoder and core need >= 1 layer");
    }
    if (resolved_tap() >= core_depth) {
        throw ShapeMismatch("ScoreNetSpec: tap_layer " +
                            std::to_string(resolved_tap()) +
                            " outside core depth " + std::to_string(core_depth));
    }
}

namespace {

MlpSpec stack_spec(std::vector<std::size_t> widths, const ScoreNetSpec& s,
                   bool final_activation) {
    MlpSpec m;
    m.widths = std::move(widths);
    m.act = s.act;
    m.time_embed_dim = s.time_embed_dim;
    m.final_activation = final_activation;
    return m;
}

// Copies half of `src` into the overlapping leading block of `dst`.
void half_copy(Tensor& dst, const Tensor& src) {
    const std::size_t r = std::min(dst.rows(), src.rows());
    const std::size_t c = std::min(dst.cols(), src.cols());
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            dst.at(i, j) = 0.5 * src.at(i, j);
        }
    }
}

void half_copy_vec(Tensor& dst, const Tensor& src) {
    const std::size_t n = std::min(dst.data.size(), src.data.size());
    for (std::size_t i = 0; i < n; ++i) dst.data[i] = 0.5 * src.data[i];
}

}  // namespace

ScoreNet::ScoreNet(ScoreNetSpec spec, std::uint64_t seed) : spec_(spec) {
    spec_.validate();
    tap_ = spec_.resolved_tap();

    StreamCursor init(RandomStream(seed, "score.init"));

    std::vector<std::size_t> enc_widths(spec_.encoder_depth + 1, spec_.hidden);
    enc_widths[0] = spec_.data_dim;
    encoder_ = Mlp(stack_spec(enc_widths, spec_, true), "enc", init);

    std::vector<std::size_t> core_widths(spec_.core_depth + 1, spec_.hidden);
    core_ = Mlp(stack_spec(core_widths, spec_, true), "core", init);

    decoder_ = Mlp(stack_spec({spec_.hidden, spec_.data_dim}, spec_, false),
                   "dec", init);

    inter_encoder_ = Mlp(stack_spec({spec_.data_dim, spec_.hidden}, spec_, true),
                         "ienc", init);
    inter_decoder_ = Mlp(stack_spec({spec_.hidden, spec_.data_dim}, spec_, false),
                         "idec", init);

    // The pathway starts from half the matching outer weights on the
    // overlapping leading block.
    half_copy(inter_encoder_.weight(0).value, encoder_.weight(0).value);
    half_copy_vec(inter_encoder_.bias(0).value, encoder_.bias(0).value);
    const std::size_t dec_last = decoder_.spec().layer_count() - 1;
    half_copy(inter_decoder_.weight(0).value, decoder_.weight(dec_last).value);
    half_copy_vec(inter_decoder_.bias(0).value, decoder_.bias(dec_last).value);
    inter_encoder_.weight(0).bump();
    inter_encoder_.bias(0).bump();
    inter_decoder_.weight(0).bump();
    inter_decoder_.bias(0).bump();
}

Tape::NodeId ScoreNet::embed_node(Tape& tape, const std::vector<double>& times) {
    if (spec_.time_embed_dim == 0) return -1;
    return tape.constant(sinusoidal_embed_rows(times, spec_.time_embed_dim));
}

Tape::NodeId ScoreNet::forward_full(Tape& tape, Tape::NodeId x,
                                    Tape::NodeId embed) {
    Tape::NodeId h = encoder_.forward(tape, x, embed);
    h = core_.forward(tape, h, embed);
    return decoder_.forward(tape, h, embed);
}

Tape::NodeId ScoreNet::forward_intermediate(Tape& tape, Tape::NodeId x,
                                            Tape::NodeId embed) {
    Tape::NodeId h = inter_encoder_.forward(tape, x, embed);
    h = core_.forward_range(tape, h, embed, tap_, spec_.core_depth);
    return inter_decoder_.forward(tape, h, embed);
}

Tensor ScoreNet::score(const Tensor& x, double t) {
    Tape tape;
    auto e = embed_node(tape, std::vector<double>(x.rows(), t));
    return tape.value(forward_full(tape, tape.constant(x), e));
}

Tensor ScoreNet::score_intermediate(const Tensor& x, double tau) {
    Tape tape;
    auto e = embed_node(tape, std::vector<double>(x.rows(), tau));
    return tape.value(forward_intermediate(tape, tape.constant(x), e));
}

std::vector<double> ScoreNet::score_at(const std::vector<double>& x, double t) {
    Tensor m({1, x.size()}, x);
    return score(m, t).row(0);
}

std::vector<Param*> ScoreNet::params() {
    std::vector<Param*> out = outer_params();
    for (Param* p : inter_params()) out.push_back(p);
    return out;
}

std::vector<Param*> ScoreNet::outer_params() {
    std::vector<Param*> out;
    for (Param* p : encoder_.params()) out.push_back(p);
    for (Param* p : core_.params()) out.push_back(p);
    for (Param* p : decoder_.params()) out.push_back(p);
    return out;
}

std::vector<Param*> ScoreNet::inter_params() {
    std::vector<Param*> out;
    for (Param* p : inter_encoder_.params()) out.push_back(p);
    for (Param* p : inter_decoder_.params()) out.push_back(p);
    return out;
}

std::vector<Param*> ScoreNet::restricted_params() {
    std::vector<Param*> out = inter_params();
    for (std::size_t l = tap_; l < spec_.core_depth; ++l) {
        out.push_back(&core_.weight(l));
        out.push_back(&core_.bias(l));
    }
    return out;
}

}  // namespace igo
