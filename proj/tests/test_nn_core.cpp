#include "doctest.h"

#include "hnn/model/trainer.hpp"
#include "hnn/net/adam.hpp"
#include "hnn/net/graph.hpp"
#include "hnn/net/loss.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

using namespace hnn;
using namespace hnn::net;

namespace {

// central finite differences of a scalar function of the network parameters
Vector numeric_grad(const std::vector<ParamRef>& params, const std::function<double()>& f,
                    double h = 1e-5) {
    Vector g(total_size(params));
    Eigen::Index off = 0;
    for (const auto& p : params) {
        for (Eigen::Index i = 0; i < p.size; ++i) {
            const double saved = p.data[i];
            p.data[i] = saved + h;
            const double up = f();
            p.data[i] = saved - h;
            const double dn = f();
            p.data[i] = saved;
            g[off + i] = (up - dn) / (2.0 * h);
        }
        off += p.size;
    }
    return g;
}

Vector flatten(const std::vector<ParamRef>& refs) {
    Vector flat(total_size(refs));
    Eigen::Index off = 0;
    for (const auto& r : refs) {
        for (Eigen::Index i = 0; i < r.size; ++i) flat[off + i] = r.data[i];
        off += r.size;
    }
    return flat;
}

}  // namespace

TEST_CASE("identity linear layer passes input through") {
    DenseLayer layer(2, 2, Activation::Linear);
    layer.weights = Matrix::Identity(2, 2);
    LayerStack stack({layer});
    Matrix x(2, 1);
    x << 1.0, 2.0;
    const Matrix out = stack.forward(x, Mode::Eval, 0.0, 0, nullptr, nullptr);
    CHECK(out(0, 0) == doctest::Approx(1.0));
    CHECK(out(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("softplus at zero is ln 2 and stays positive everywhere") {
    CHECK(softplus(0.0) == doctest::Approx(0.6931471805599453));
    for (double x : {-800.0, -50.0, -1.0, 0.0, 3.0, 800.0}) CHECK(softplus(x) > 0.0);
}

TEST_CASE("two-layer relu net matches a hand-computed composition") {
    // z1 = W1 x + b1 = (2, 3); relu -> (2, 3); out = 0.5*2 - 1*3 + 0.25 = -1.75
    DenseLayer l1(2, 2, Activation::ReLU);
    l1.weights << 1.0, -1.0, 2.0, 0.0;
    l1.bias << 0.0, 1.0;
    DenseLayer l2(1, 2, Activation::Linear);
    l2.weights << 0.5, -1.0;
    l2.bias << 0.25;
    LayerStack stack({l1, l2});
    Matrix x(2, 1);
    x << 1.0, -1.0;
    CHECK(stack.forward(x, Mode::Eval, 0.0, 0, nullptr, nullptr)(0, 0) ==
          doctest::Approx(-1.75));

    l2.activation = Activation::ReLU;
    LayerStack clipped({l1, l2});
    CHECK(clipped.forward(x, Mode::Eval, 0.0, 0, nullptr, nullptr)(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("forward rejects dimension mismatches") {
    HnnNetwork netw(HnnTopology{.input_dim = 3, .common_layers = 1, .head_layers = 1,
                                .neurons = 4, .dropout = 0.0});
    netw.init_weights(1);
    Matrix x(2, 5);
    x.setZero();
    CHECK_THROWS_AS(netw.forward(x, Mode::Eval), ShapeError);
}

TEST_CASE("gaussian nll: perfect fit with unit variance gives zero loss and mean-gradient") {
    const Vector y = Vector::LinSpaced(4, -1.0, 2.0);
    const Vector var = Vector::Ones(4);
    const auto r = gaussian_nll_loss(y, y, var);
    CHECK(r.loss == doctest::Approx(0.0));
    CHECK(r.d_mean.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("gaussian nll: single observation closed form") {
    Vector y(1), mu(1), var(1);
    y << 1.0;
    mu << 1.0;
    var << 2.0;
    const auto r = gaussian_nll_loss(y, mu, var);
    CHECK(r.loss == doctest::Approx(std::log(2.0)));
    CHECK(r.d_variance[0] == doctest::Approx(0.5));
}

TEST_CASE("gaussian nll rejects nonpositive variance") {
    Vector y(1), mu(1), var(1);
    y << 0.0;
    mu << 0.0;
    var << 0.0;
    CHECK_THROWS_AS(gaussian_nll_loss(y, mu, var), DomainError);
}

TEST_CASE("gaussian nll gradients match finite differences") {
    Rng rng(77);
    Vector y(5), mu(5), var(5);
    for (int i = 0; i < 5; ++i) {
        y[i] = rng.normal();
        mu[i] = rng.normal();
        var[i] = 0.5 + rng.uniform();
    }
    const auto r = gaussian_nll_loss(y, mu, var);
    const double h = 1e-5;
    for (int i = 0; i < 5; ++i) {
        Vector mu_up = mu, mu_dn = mu;
        mu_up[i] += h;
        mu_dn[i] -= h;
        const double fd_mean = (gaussian_nll_loss(y, mu_up, var).loss -
                                gaussian_nll_loss(y, mu_dn, var).loss) /
                               (2 * h);
        CHECK(std::abs(r.d_mean[i] - fd_mean) < 1e-6);
        Vector v_up = var, v_dn = var;
        v_up[i] += h;
        v_dn[i] -= h;
        const double fd_var = (gaussian_nll_loss(y, mu, v_up).loss -
                               gaussian_nll_loss(y, mu, v_dn).loss) /
                              (2 * h);
        CHECK(std::abs(r.d_variance[i] - fd_var) < 1e-6);
    }
}

TEST_CASE("loss is invariant under permutation of observations") {
    Rng rng(5);
    Vector y(8), mu(8), var(8);
    for (int i = 0; i < 8; ++i) {
        y[i] = rng.normal();
        mu[i] = rng.normal();
        var[i] = 0.3 + rng.uniform();
    }
    const double base = gaussian_nll_loss(y, mu, var).loss;
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(8);
    perm.setIdentity();
    std::mt19937 g(3);
    std::shuffle(perm.indices().data(), perm.indices().data() + 8, g);
    const double permuted =
        gaussian_nll_loss(perm * y, perm * mu, perm * var).loss;
    CHECK(base == doctest::Approx(permuted).epsilon(1e-12));
}

TEST_CASE("backward: zero variance-gradient leaves var head untouched") {
    HnnNetwork netw(HnnTopology{.input_dim = 3, .common_layers = 1, .head_layers = 1,
                                .neurons = 4, .dropout = 0.0});
    netw.init_weights(9);
    Matrix X = Matrix::Random(3, 6);
    const auto out = netw.forward(X, Mode::Train, 1);
    auto grads = netw.make_grads();
    netw.backward(out, Vector::Ones(6), Vector::Zero(6), grads);
    for (const auto& g : grads.var_head) {
        CHECK(g.d_weights.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
        CHECK(g.d_bias.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
}

TEST_CASE("backward: doubling loss gradients doubles every parameter gradient") {
    HnnNetwork netw(HnnTopology{.input_dim = 2, .common_layers = 1, .head_layers = 1,
                                .neurons = 3, .dropout = 0.0});
    netw.init_weights(11);
    Matrix X = Matrix::Random(2, 5);
    const auto out = netw.forward(X, Mode::Train, 1);
    Vector dm = Vector::Random(5), dv = Vector::Random(5);
    auto g1 = netw.make_grads();
    auto g2 = netw.make_grads();
    netw.backward(out, dm, dv, g1);
    netw.backward(out, 2.0 * dm, 2.0 * dv, g2);
    const Vector f1 = flatten(HnnNetwork::grad_views(g1));
    const Vector f2 = flatten(HnnNetwork::grad_views(g2));
    CHECK((f2 - 2.0 * f1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("backward on a stale cache is a state error") {
    HnnNetwork netw(HnnTopology{.input_dim = 2, .common_layers = 1, .head_layers = 1,
                                .neurons = 3, .dropout = 0.0});
    netw.init_weights(2);
    Matrix X = Matrix::Random(2, 4);
    const auto out = netw.forward(X, Mode::Eval);
    auto grads = netw.make_grads();
    CHECK_THROWS_AS(netw.backward(out, Vector::Ones(4), Vector::Ones(4), grads), StateError);
}

TEST_CASE("analytic gradients of the constrained likelihood match finite differences") {
    // the full two-hemisphere + common-core graph, constraint included
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        HnnNetwork netw(HnnTopology{.input_dim = 3, .common_layers = 2, .head_layers = 1,
                                    .neurons = 3, .dropout = 0.0});
        netw.init_weights(seed);
        Rng rng(seed + 100);
        // jitter every parameter (biases included) so no ReLU preactivation
        // sits exactly at the kink, where finite differences are invalid
        for (auto& p : netw.param_views())
            for (Eigen::Index i = 0; i < p.size; ++i) p.data[i] += 0.05 * rng.normal();
        const Eigen::Index n = 12;
        Matrix X(3, n);
        Vector y(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (int i = 0; i < 3; ++i) X(i, j) = rng.normal();
            y[j] = rng.normal();
        }
        const double nu = 0.6;

        const auto out = netw.forward(X, Mode::Train, 0);
        const Vector constrained = model::constrain_variance(out.raw_var, nu);
        const auto nll = gaussian_nll_loss(y, out.mean, constrained);
        auto grads = netw.make_grads();
        netw.backward(out, nll.d_mean, model::constraint_backward(nll.d_variance, out.raw_var, nu),
                      grads);
        const Vector analytic = flatten(HnnNetwork::grad_views(grads));

        auto params = netw.param_views();
        const Vector numeric = numeric_grad(params, [&]() {
            const auto o = netw.forward(X, Mode::Eval);
            return gaussian_nll_loss(y, o.mean, model::constrain_variance(o.raw_var, nu)).loss;
        });
        double worst = 0.0;
        for (Eigen::Index i = 0; i < analytic.size(); ++i) {
            const double denom = std::max({1.0, std::abs(analytic[i]), std::abs(numeric[i])});
            worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("adam: zero gradient leaves parameters unchanged and moments decay") {
    Vector p(3);
    p << 1.0, -2.0, 0.5;
    Vector g = Vector::Zero(3);
    std::vector<ParamRef> pr{{p.data(), 3}};
    std::vector<ParamRef> gr{{g.data(), 3}};
    auto state = make_adam_state(3);
    state.first_moment.setConstant(0.2);
    state.second_moment.setConstant(0.2);
    const Vector before = p;
    for (int k = 0; k < 5; ++k) adam_step(pr, gr, state);
    CHECK((p - before).cwiseAbs().maxCoeff() < 2e-3);  // drift shrinks with the moments
    CHECK(state.first_moment[0] == doctest::Approx(0.2 * std::pow(0.9, 5)));
    g.setZero();
    p = before;
    state = make_adam_state(3);
    adam_step(pr, gr, state);
    CHECK((p - before).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("adam: hand-computed first step on a scalar") {
    Vector p(1), g(1);
    p << 2.0;
    g << 1.0;
    std::vector<ParamRef> pr{{p.data(), 1}};
    std::vector<ParamRef> gr{{g.data(), 1}};
    auto state = make_adam_state(1, 0.001, 0.9, 0.999, 1e-8);
    adam_step(pr, gr, state);
    // mhat = vhat = 1 after bias correction, so the step is -lr/(1+eps)
    CHECK(p[0] == doctest::Approx(2.0 - 0.001).epsilon(1e-7));
    CHECK(state.step_count == 1);
}

TEST_CASE("adam: identical coordinates stay identical") {
    Vector p(2), g(2);
    p << 0.7, 0.7;
    std::vector<ParamRef> pr{{p.data(), 2}};
    std::vector<ParamRef> gr{{g.data(), 2}};
    auto state = make_adam_state(2);
    Rng rng(4);
    for (int k = 0; k < 50; ++k) {
        const double gv = rng.normal();
        g << gv, gv;
        adam_step(pr, gr, state);
        CHECK(p[0] == doctest::Approx(p[1]).epsilon(1e-15));
    }
}

TEST_CASE("init: deterministic per seed, zero biases, variance near 3/100") {
    HnnTopology topo{.input_dim = 80, .common_layers = 2, .head_layers = 2, .neurons = 120,
                     .dropout = 0.0};
    HnnNetwork a(topo), b(topo);
    a.init_weights(42);
    b.init_weights(42);
    CHECK(flatten(a.param_views()) == flatten(b.param_views()));
    for (const auto& layer : a.common().layers())
        CHECK(layer.bias.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    double sum = 0.0, sum2 = 0.0;
    long n = 0;
    auto accumulate = [&](const LayerStack& s) {
        for (const auto& layer : s.layers())
            for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
                sum += layer.weights.data()[i];
                sum2 += layer.weights.data()[i] * layer.weights.data()[i];
                ++n;
            }
    };
    accumulate(a.common());
    accumulate(a.mean_head());
    accumulate(a.var_head());
    REQUIRE(n > 50000);
    const double var = sum2 / n - (sum / n) * (sum / n);
    CHECK(var == doctest::Approx(0.03).epsilon(0.05));
}

TEST_CASE("eval forward is seed-independent; train forward is seed-reproducible") {
    HnnNetwork netw(HnnTopology{.input_dim = 4, .common_layers = 2, .head_layers = 2,
                                .neurons = 6, .dropout = 0.3});
    netw.init_weights(8);
    Matrix X = Matrix::Random(4, 9);
    const auto e1 = netw.forward(X, Mode::Eval, 1);
    const auto e2 = netw.forward(X, Mode::Eval, 999);
    CHECK(e1.mean == e2.mean);
    CHECK(e1.raw_var == e2.raw_var);
    CHECK(e1.raw_var.minCoeff() > 0.0);
    const auto t1 = netw.forward(X, Mode::Train, 31);
    const auto t2 = netw.forward(X, Mode::Train, 31);
    const auto t3 = netw.forward(X, Mode::Train, 32);
    CHECK(t1.mean == t2.mean);
    CHECK(t1.mean != t3.mean);
}

TEST_CASE("dropout rate zero equals eval-mode forward exactly") {
    HnnNetwork netw(HnnTopology{.input_dim = 4, .common_layers = 2, .head_layers = 1,
                                .neurons = 5, .dropout = 0.0});
    netw.init_weights(3);
    Matrix X = Matrix::Random(4, 7);
    const auto tr = netw.forward(X, Mode::Train, 123);
    const auto ev = netw.forward(X, Mode::Eval);
    CHECK(tr.mean == ev.mean);
    CHECK(tr.raw_var == ev.raw_var);
}
