#include "igo/metrics.hpp"

#include <cmath>

#include "igo/errors.hpp"

namespace igo {

namespace {

double padded_get(const Tensor& t, std::size_t i) {
    return i < t.data.size() ? t.data[i] : 0.0;
}

}  // namespace

double cosine_padded(const Tensor& a, const Tensor& b) {
    const std::size_t n = std::max(a.data.size(), b.data.size());
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = padded_get(a, i);
        const double y = padded_get(b, i);
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if (aa == 0.0 || bb == 0.0) {
        throw ZeroVector("cosine_padded: zero-norm operand");
    }
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

double euclidean_padded(const Tensor& a, const Tensor& b) {
    const std::size_t n = std::max(a.data.size(), b.data.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = padded_get(a, i) - padded_get(b, i);
        acc += d * d;
    }
    return std::sqrt(acc);
}

WeightDivergence weight_divergence(const ScoreNet& net) {
    const Tensor& enc = net.encoder().weight(0).value;
    const Tensor& ienc = net.inter_encoder().weight(0).value;
    const std::size_t dec_last = net.decoder().spec().layer_count() - 1;
    const Tensor& dec = net.decoder().weight(dec_last).value;
    const Tensor& idec = net.inter_decoder().weight(0).value;

    WeightDivergence d;
    d.cos_E = cosine_padded(enc, ienc);
    d.cos_D = cosine_padded(dec, idec);
    d.eucl_E = euclidean_padded(enc, ienc);
    d.eucl_D = euclidean_padded(dec, idec);
    return d;
}

}  // namespace igo
