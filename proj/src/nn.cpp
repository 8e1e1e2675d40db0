#include "msk/nn.hpp"

#include <cmath>

#include "msk/errors.hpp"

namespace msk {

void Mlp::layer_dims(int layer, int& rows, int& cols) const {
    const int h = shape_.hidden;
    if (layer == 0) { rows = h; cols = shape_.in; }
    else if (layer < kHiddenLayers) { rows = h; cols = h; }
    else { rows = shape_.out; cols = h; }
}

Mlp::Mlp(const MlpShape& shape, uint64_t seed) : shape_(shape) {
    int total = 0;
    for (int l = 0; l <= kHiddenLayers; ++l) {
        int r, c;
        layer_dims(l, r, c);
        off_[2 * l] = total;
        total += r * c;
        off_[2 * l + 1] = total;
        total += r;
    }
    theta_.setZero(total);

    Rng rng(seed);
    for (int l = 0; l <= kHiddenLayers; ++l) {
        int r, c;
        layer_dims(l, r, c);
        const double scale =
            (1.0 / std::sqrt(static_cast<double>(c))) *
            (l == kHiddenLayers ? shape_.final_init_scale : 1.0);
        Eigen::Map<Eigen::MatrixXd> Wl(theta_.data() + off_[2 * l], r, c);
        for (int j = 0; j < c; ++j)
            for (int i = 0; i < r; ++i) Wl(i, j) = rng.uniform(-scale, scale);
        // biases stay zero
    }
}

Mlp::MapM Mlp::W(int layer) const {
    int r, c;
    layer_dims(layer, r, c);
    return MapM(theta_.data() + off_[2 * layer], r, c);
}

Mlp::MapV Mlp::b(int layer) const {
    int r, c;
    layer_dims(layer, r, c);
    return MapV(theta_.data() + off_[2 * layer + 1], r);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X, Cache& cache) const {
    if (X.cols() != shape_.in)
        throw ContractError("mlp forward: input has " + std::to_string(X.cols()) +
                            " features, expected " + std::to_string(shape_.in));
    cache.x = X;
    cache.h1 = ((X * W(0).transpose()).rowwise() + b(0).transpose()).array().tanh();
    cache.h2 = ((cache.h1 * W(1).transpose()).rowwise() + b(1).transpose()).array().tanh();
    cache.h3 = ((cache.h2 * W(2).transpose()).rowwise() + b(2).transpose()).array().tanh();
    Eigen::MatrixXd z = (cache.h3 * W(3).transpose()).rowwise() + b(3).transpose();
    switch (shape_.head) {
        case Head::Linear: cache.y = z; break;
        case Head::Sigmoid:
            cache.y = (1.0 / (1.0 + (-z.array()).exp())).matrix();
            break;
        case Head::Affine:
            cache.y = (shape_.affine_scale * z.array() + shape_.affine_offset).matrix();
            break;
    }
    return cache.y;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X) const {
    Cache c;
    return forward(X, c);
}

Eigen::VectorXd Mlp::forward_one(const Eigen::VectorXd& x) const {
    return forward(x.transpose()).row(0);
}

void Mlp::backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                   Eigen::VectorXd& grad, Eigen::MatrixXd* input_grad) const {
    if (upstream.rows() != cache.y.rows() || upstream.cols() != cache.y.cols())
        throw ContractError("mlp backward: upstream shape mismatch");
    if (grad.size() != theta_.size()) throw ContractError("mlp backward: grad size mismatch");

    Eigen::MatrixXd dz4;
    switch (shape_.head) {
        case Head::Linear: dz4 = upstream; break;
        case Head::Sigmoid:
            dz4 = (upstream.array() * cache.y.array() * (1.0 - cache.y.array())).matrix();
            break;
        case Head::Affine: dz4 = upstream * shape_.affine_scale; break;
    }

    auto gW = [&](int l) {
        int r, c;
        layer_dims(l, r, c);
        return Eigen::Map<Eigen::MatrixXd>(grad.data() + off_[2 * l], r, c);
    };
    auto gb = [&](int l) {
        int r, c;
        layer_dims(l, r, c);
        return Eigen::Map<Eigen::VectorXd>(grad.data() + off_[2 * l + 1], r);
    };

    gW(3).noalias() += dz4.transpose() * cache.h3;
    gb(3) += dz4.colwise().sum().transpose();
    Eigen::MatrixXd dh3 = dz4 * W(3);

    Eigen::MatrixXd dz3 = (dh3.array() * (1.0 - cache.h3.array().square())).matrix();
    gW(2).noalias() += dz3.transpose() * cache.h2;
    gb(2) += dz3.colwise().sum().transpose();
    Eigen::MatrixXd dh2 = dz3 * W(2);

    Eigen::MatrixXd dz2 = (dh2.array() * (1.0 - cache.h2.array().square())).matrix();
    gW(1).noalias() += dz2.transpose() * cache.h1;
    gb(1) += dz2.colwise().sum().transpose();
    Eigen::MatrixXd dh1 = dz2 * W(1);

    Eigen::MatrixXd dz1 = (dh1.array() * (1.0 - cache.h1.array().square())).matrix();
    gW(0).noalias() += dz1.transpose() * cache.x;
    gb(0) += dz1.colwise().sum().transpose();

    if (input_grad) *input_grad = dz1 * W(0);
}

Eigen::VectorXd Mlp::gradient_penalty_backward(const Cache& cache,
                                               Eigen::VectorXd& grad) const {
    if (shape_.out != 1)
        throw ContractError("gradient_penalty_backward requires a scalar output");
    const Eigen::Index B = cache.x.rows();

    // head'(z) per sample, as the upstream of the input-gradient pass.
    Eigen::ArrayXd d4(B), dd4(B);  // head' and head'' at z4
    switch (shape_.head) {
        case Head::Linear:
            d4.setOnes();
            dd4.setZero();
            break;
        case Head::Sigmoid: {
            const Eigen::ArrayXd y = cache.y.col(0).array();
            d4 = y * (1.0 - y);
            dd4 = d4 * (1.0 - 2.0 * y);
            break;
        }
        case Head::Affine:
            d4.setConstant(shape_.affine_scale);
            dd4.setZero();
            break;
    }

    const Eigen::ArrayXXd g1 = 1.0 - cache.h1.array().square();
    const Eigen::ArrayXXd g2 = 1.0 - cache.h2.array().square();
    const Eigen::ArrayXXd g3 = 1.0 - cache.h3.array().square();

    // Input gradient g = dy/dx for each sample.
    Eigen::MatrixXd d3 = ((d4.matrix() * W(3)).array() * g3).matrix();   // B x h
    Eigen::MatrixXd d2 = ((d3 * W(2)).array() * g2).matrix();
    Eigen::MatrixXd d1 = ((d2 * W(1)).array() * g1).matrix();
    Eigen::MatrixXd g = d1 * W(0);                                       // B x in

    // Forward tangent along v = g.
    Eigen::MatrixXd zeta1 = g * W(0).transpose();
    Eigen::MatrixXd u1 = (g1 * zeta1.array()).matrix();
    Eigen::MatrixXd zeta2 = u1 * W(1).transpose();
    Eigen::MatrixXd u2 = (g2 * zeta2.array()).matrix();
    Eigen::MatrixXd zeta3 = u2 * W(2).transpose();
    Eigen::MatrixXd u3 = (g3 * zeta3.array()).matrix();
    Eigen::VectorXd zeta4 = u3 * W(3).transpose();                       // B x 1
    Eigen::VectorXd penalty = (d4 * zeta4.array()).matrix();             // ||g||^2

    auto gW = [&](int l) {
        int r, c;
        layer_dims(l, r, c);
        return Eigen::Map<Eigen::MatrixXd>(grad.data() + off_[2 * l], r, c);
    };
    auto gb = [&](int l) {
        int r, c;
        layer_dims(l, r, c);
        return Eigen::Map<Eigen::VectorXd>(grad.data() + off_[2 * l + 1], r);
    };

    // Reverse pass through primal + tangent, loss = sum_i penalty_i, times 2.
    Eigen::VectorXd b_zeta4 = 2.0 * d4.matrix();
    Eigen::VectorXd b_z4 = 2.0 * (dd4 * zeta4.array()).matrix();

    gW(3).noalias() += b_zeta4.transpose() * u3 + b_z4.transpose() * cache.h3;
    gb(3) += b_z4.colwise().sum().transpose();
    Eigen::MatrixXd b_u3 = b_zeta4 * W(3);
    Eigen::MatrixXd b_h3 = b_z4 * W(3);

    Eigen::MatrixXd b_zeta3 = (g3 * b_u3.array()).matrix();
    b_h3.array() += -2.0 * cache.h3.array() * zeta3.array() * b_u3.array();
    Eigen::MatrixXd b_z3 = (g3 * b_h3.array()).matrix();

    gW(2).noalias() += b_zeta3.transpose() * u2 + b_z3.transpose() * cache.h2;
    gb(2) += b_z3.colwise().sum().transpose();
    Eigen::MatrixXd b_u2 = b_zeta3 * W(2);
    Eigen::MatrixXd b_h2 = b_z3 * W(2);

    Eigen::MatrixXd b_zeta2 = (g2 * b_u2.array()).matrix();
    b_h2.array() += -2.0 * cache.h2.array() * zeta2.array() * b_u2.array();
    Eigen::MatrixXd b_z2 = (g2 * b_h2.array()).matrix();

    gW(1).noalias() += b_zeta2.transpose() * u1 + b_z2.transpose() * cache.h1;
    gb(1) += b_z2.colwise().sum().transpose();
    Eigen::MatrixXd b_u1 = b_zeta2 * W(1);
    Eigen::MatrixXd b_h1 = b_z2 * W(1);

    Eigen::MatrixXd b_zeta1 = (g1 * b_u1.array()).matrix();
    b_h1.array() += -2.0 * cache.h1.array() * zeta1.array() * b_u1.array();
    Eigen::MatrixXd b_z1 = (g1 * b_h1.array()).matrix();

    gW(0).noalias() += b_zeta1.transpose() * g + b_z1.transpose() * cache.x;
    gb(0) += b_z1.colwise().sum().transpose();

    return penalty;
}

Adam::Adam(int n, double lr_) : lr(lr_) {
    m = Eigen::VectorXd::Zero(n);
    v = Eigen::VectorXd::Zero(n);
}

bool Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    if (params.size() != m.size() || grad.size() != m.size())
        throw ContractError("adam: size mismatch");
    if (!grad.allFinite()) {
        ++skipped;
        return false;
    }
    ++step_count;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    params.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
    return true;
}

void RunningNorm::update(const Eigen::MatrixXd& X) {
    const double n = static_cast<double>(X.rows());
    if (n == 0) return;
    if (mean.size() == 0) {
        mean = Eigen::VectorXd::Zero(X.cols());
        var = Eigen::VectorXd::Ones(X.cols());
    }
    const Eigen::VectorXd batch_mean = X.colwise().mean();
    const Eigen::VectorXd batch_var =
        ((X.rowwise() - batch_mean.transpose()).array().square().colwise().sum() / n)
            .transpose();
    if (count == 0.0) {
        mean = batch_mean;
        var = batch_var;
        count = n;
        return;
    }
    const double tot = count + n;
    const Eigen::VectorXd delta = batch_mean - mean;
    const Eigen::VectorXd m_a = var * count;
    const Eigen::VectorXd m_b = batch_var * n;
    var = (m_a + m_b + delta.cwiseProduct(delta) * (count * n / tot)) / tot;
    mean += delta * (n / tot);
    count = tot;
}

Eigen::MatrixXd RunningNorm::apply(const Eigen::MatrixXd& X) const {
    if (count == 0.0) return X;
    const Eigen::ArrayXd sd = (var.array() + 1e-8).sqrt().max(1e-6);
    return ((X.rowwise() - mean.transpose()).array().rowwise() /
            sd.transpose())
        .matrix();
}

Eigen::VectorXd RunningNorm::apply_one(const Eigen::VectorXd& x) const {
    if (count == 0.0) return x;
    const Eigen::ArrayXd sd = (var.array() + 1e-8).sqrt().max(1e-6);
    return ((x - mean).array() / sd).matrix();
}

}  // namespace msk
