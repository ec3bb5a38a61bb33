#include <doctest.h>

#include <cmath>
#include <limits>

#include "igo/errors.hpp"
#include "igo/rng.hpp"
#include "igo/tape.hpp"
#include "igo/tensor.hpp"

using namespace igo;

TEST_CASE("tensor construction validates shape against data length") {
    CHECK_NOTHROW(Tensor({2, 3}, std::vector<double>(6, 0.0)));
    CHECK_THROWS_AS(Tensor({2, 3}, std::vector<double>(5, 0.0)), ShapeMismatch);
    Tensor t = Tensor::matrix(2, 2, {1, 2, 3, 4});
    CHECK(t.at(0, 1) == 2);
    CHECK(t.at(1, 0) == 3);
    CHECK(t.row(1) == std::vector<double>{3, 4});
}

TEST_CASE("finite guard rejects NaN and infinity") {
    Tensor t = Tensor::vector({1.0, std::numeric_limits<double>::quiet_NaN()});
    CHECK_THROWS_AS(require_finite(t, "guard"), NumericError);
    t.data[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(require_finite(t, "guard"), NumericError);
    t.data[1] = 0.0;
    CHECK_NOTHROW(require_finite(t, "guard"));
}

TEST_CASE("matvec matches a hand computation") {
    Tensor a = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
    const std::vector<double> y = matvec(a, {1, 0, -1});
    CHECK(y == std::vector<double>{-2, -2});
}

TEST_CASE("affine forward matches manual matrix arithmetic") {
    Tape tape;
    Param w("w", Tensor::matrix(2, 3, {1, 0, -1, 2, 1, 0}));
    Param b("b", Tensor::vector({0.5, -0.5}));
    Tensor x = Tensor::matrix(2, 3, {1, 2, 3, 0, 1, 0});
    auto y = tape.affine(tape.leaf(w), tape.leaf(b), tape.constant(x));
    const Tensor& yv = tape.value(y);
    CHECK(yv.at(0, 0) == doctest::Approx(1 - 3 + 0.5));
    CHECK(yv.at(0, 1) == doctest::Approx(2 + 2 - 0.5));
    CHECK(yv.at(1, 0) == doctest::Approx(0.5));
    CHECK(yv.at(1, 1) == doctest::Approx(0.5));
}

namespace {

// Scalar loss used by the finite-difference checks:
// L = sum of squares of silu(x W^T + b) summed with a tanh branch.
double fd_loss(const Tensor& wv, const Tensor& bv, const Tensor& xv) {
    Tape tape;
    Param w("w", wv);
    Param b("b", bv);
    auto x = tape.input(xv);
    auto h = tape.affine(tape.leaf(w), tape.leaf(b), x);
    auto s = tape.activation(h, Activation::silu);
    auto u = tape.activation(h, Activation::tanh);
    auto total = tape.add(s, tape.scale(u, 0.7));
    return tape.value(tape.sq_norm(total)).data[0];
}

}  // namespace

TEST_CASE("backward matches central finite differences") {
    StreamCursor cur(RandomStream(11, "fd", 0));
    Tensor wv = Tensor::zeros({3, 2});
    for (double& v : wv.data) v = 0.4 * cur.normal();
    Tensor bv = Tensor::zeros({3});
    for (double& v : bv.data) v = 0.2 * cur.normal();
    Tensor xv = Tensor::zeros({4, 2});
    for (double& v : xv.data) v = cur.normal();

    Param w("w", wv);
    Param b("b", bv);
    Tape tape;
    auto x = tape.input(xv);
    auto h = tape.affine(tape.leaf(w), tape.leaf(b), x);
    auto s = tape.activation(h, Activation::silu);
    auto u = tape.activation(h, Activation::tanh);
    auto total = tape.add(s, tape.scale(u, 0.7));
    auto loss = tape.sq_norm(total);
    tape.backward_scalar(loss);

    const double h_step = 1e-5;
    auto check_grad = [&](Tensor& store, const Tensor& grad, const char* tag) {
        for (std::size_t k = 0; k < store.data.size(); ++k) {
            const double keep = store.data[k];
            store.data[k] = keep + h_step;
            const double up = fd_loss(wv, bv, xv);
            store.data[k] = keep - h_step;
            const double dn = fd_loss(wv, bv, xv);
            store.data[k] = keep;
            const double fd = (up - dn) / (2 * h_step);
            INFO(tag << "[" << k << "]");
            CHECK(grad.data[k] == doctest::Approx(fd).epsilon(1e-4));
        }
    };
    check_grad(wv, w.grad, "w");
    check_grad(bv, b.grad, "b");
    check_grad(xv, tape.grad(x), "x");
}

TEST_CASE("backward seed scales gradients linearly") {
    Param w("w", Tensor::matrix(1, 2, {0.3, -0.2}));
    Param b("b", Tensor::vector({0.1}));
    Tensor xv = Tensor::matrix(1, 2, {1.0, 2.0});

    auto run = [&](double seed) {
        w.zero_grad();
        b.zero_grad();
        Tape tape;
        auto h = tape.affine(tape.leaf(w), tape.leaf(b), tape.constant(xv));
        auto loss = tape.sq_norm(tape.activation(h, Activation::tanh));
        tape.backward_scalar(loss, seed);
        return w.grad;
    };
    const Tensor g1 = run(1.0);
    const Tensor g3 = run(3.0);
    for (std::size_t k = 0; k < g1.data.size(); ++k) {
        CHECK(g3.data[k] == doctest::Approx(3.0 * g1.data[k]).epsilon(1e-12));
    }
}

TEST_CASE("repeated backward accumulates into parameter gradients") {
    Param w("w", Tensor::matrix(1, 1, {2.0}));
    Param b("b", Tensor::vector({0.0}));
    Tape tape;
    auto h = tape.affine(tape.leaf(w), tape.leaf(b), tape.constant(Tensor::matrix(1, 1, {1.0})));
    auto loss = tape.sq_norm(h);
    tape.backward_scalar(loss);
    const double once = w.grad.data[0];
    CHECK(once == doctest::Approx(4.0));
    tape.backward_scalar(loss);
    CHECK(w.grad.data[0] == doctest::Approx(2.0 * once));
}

TEST_CASE("a parameter shared by two branches receives both contributions") {
    Param w("w", Tensor::matrix(1, 1, {1.5}));
    Param b("b", Tensor::vector({0.0}));
    Tape tape;
    auto x = tape.constant(Tensor::matrix(1, 1, {1.0}));
    auto h1 = tape.affine(tape.leaf(w), tape.leaf(b), x);
    auto h2 = tape.affine(tape.leaf(w), tape.leaf(b), x);
    auto loss = tape.sq_norm(tape.add(h1, h2));
    tape.backward_scalar(loss);
    // d/dw (2w)^2 = 8w = 12.
    CHECK(w.grad.data[0] == doctest::Approx(12.0));
}

TEST_CASE("mutating a recorded parameter invalidates the tape") {
    Param w("w", Tensor::matrix(1, 1, {1.0}));
    Param b("b", Tensor::vector({0.0}));
    Tape tape;
    auto h = tape.affine(tape.leaf(w), tape.leaf(b), tape.constant(Tensor::matrix(1, 1, {1.0})));
    auto loss = tape.sq_norm(h);
    w.value.data[0] = 2.0;
    w.bump();
    CHECK_THROWS_AS(tape.backward_scalar(loss), StaleTape);
}

TEST_CASE("weighted squared error value and gradient") {
    Tape tape;
    Tensor pred = Tensor::matrix(2, 2, {1, 2, 3, 4});
    Tensor target = Tensor::matrix(2, 2, {0, 2, 3, 2});
    auto p = tape.input(pred);
    auto loss = tape.weighted_sq_error(p, target, {1.0, 0.5});
    // (1*(1+0) + 0.5*(0+4)) / 2 = 1.5.
    CHECK(tape.value(loss).data[0] == doctest::Approx(1.5));
    tape.backward_scalar(loss);
    const Tensor& g = tape.grad(p);
    CHECK(g.at(0, 0) == doctest::Approx(1.0));   // 2*1*(1-0)/2
    CHECK(g.at(0, 1) == doctest::Approx(0.0));
    CHECK(g.at(1, 0) == doctest::Approx(0.0));
    CHECK(g.at(1, 1) == doctest::Approx(1.0));   // 2*0.5*(4-2)/2
}

TEST_CASE("shape violations throw before any computation") {
    Tape tape;
    auto w = tape.constant(Tensor::matrix(2, 3, std::vector<double>(6, 1.0)));
    auto b = tape.constant(Tensor::vector({1.0, 1.0}));
    auto x = tape.constant(Tensor::matrix(1, 2, {1.0, 2.0}));
    CHECK_THROWS_AS(tape.affine(w, b, x), ShapeMismatch);
    auto y = tape.constant(Tensor::matrix(2, 2, {1, 2, 3, 4}));
    CHECK_THROWS_AS(tape.add(x, y), ShapeMismatch);
    CHECK_THROWS_AS(tape.concat_cols(x, tape.constant(Tensor::matrix(3, 1, {1, 2, 3}))),
                    ShapeMismatch);
}

TEST_CASE("concat_cols splits gradient to both inputs") {
    Tape tape;
    auto a = tape.input(Tensor::matrix(1, 2, {1, 2}));
    auto b = tape.input(Tensor::matrix(1, 1, {3}));
    auto c = tape.concat_cols(a, b);
    CHECK(tape.value(c).row(0) == std::vector<double>{1, 2, 3});
    Tensor seed = Tensor::matrix(1, 3, {10, 20, 30});
    tape.backward(c, seed);
    CHECK(tape.grad(a).row(0) == std::vector<double>{10, 20});
    CHECK(tape.grad(b).row(0) == std::vector<double>{30});
}
