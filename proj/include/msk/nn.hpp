#pragma once

#include <Eigen/Dense>
#include <string>

#include "msk/rng.hpp"

namespace msk {

enum class Head { Linear, Sigmoid, Affine };

struct MlpShape {
    int in = 1;
    int hidden = 64;
    int out = 1;
    Head head = Head::Linear;
    double affine_scale = 1.0;   // Head::Affine: y = scale * z + offset
    double affine_offset = 0.0;
    double final_init_scale = 1.0;
};

/// Fully connected net with 3 tanh hidden layers and a configurable output
/// head. Parameters live in one flat 64-bit vector; reverse mode produces
/// both parameter and input gradients.
class Mlp {
public:
    static constexpr int kHiddenLayers = 3;

    Mlp() = default;
    Mlp(const MlpShape& shape, uint64_t seed);

    struct Cache {
        Eigen::MatrixXd x, h1, h2, h3, y;
    };

    Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const;
    Eigen::MatrixXd forward(const Eigen::MatrixXd& X, Cache& cache) const;
    Eigen::VectorXd forward_one(const Eigen::VectorXd& x) const;

    /// Accumulates d(sum L)/d(theta) into `grad` given upstream = dL/dy,
    /// shape (batch x out). Writes dL/dX into input_grad when non-null.
    void backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                  Eigen::VectorXd& grad, Eigen::MatrixXd* input_grad = nullptr) const;

    /// For scalar-output nets: accumulates d/d(theta) of
    /// sum_i ||grad_x y_i||^2 into `grad` (exact double backprop) and returns
    /// the per-sample squared input-gradient norms.
    Eigen::VectorXd gradient_penalty_backward(const Cache& cache,
                                              Eigen::VectorXd& grad) const;

    int param_count() const { return static_cast<int>(theta_.size()); }
    Eigen::VectorXd& params() { return theta_; }
    const Eigen::VectorXd& params() const { return theta_; }
    const MlpShape& shape() const { return shape_; }

private:
    MlpShape shape_;
    Eigen::VectorXd theta_;
    int off_[8] = {0};  // W1 b1 W2 b2 W3 b3 W4 b4 offsets

    using MapM = Eigen::Map<const Eigen::MatrixXd>;
    using MapV = Eigen::Map<const Eigen::VectorXd>;
    MapM W(int layer) const;
    MapV b(int layer) const;
    void layer_dims(int layer, int& rows, int& cols) const;
};

/// Bias-corrected adaptive-moment optimizer.
class Adam {
public:
    Adam() = default;
    Adam(int n, double lr);

    /// Returns false (and leaves params untouched) on non-finite gradients.
    bool step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

    double lr = 1e-3;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    Eigen::VectorXd m, v;
    long step_count = 0;
    long skipped = 0;
};

/// Running feature standardizer (Welford over batches).
struct RunningNorm {
    Eigen::VectorXd mean, var;
    double count = 0.0;

    explicit RunningNorm(int dim = 0) {
        mean = Eigen::VectorXd::Zero(dim);
        var = Eigen::VectorXd::Ones(dim);
    }
    void update(const Eigen::MatrixXd& X);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
    Eigen::VectorXd apply_one(const Eigen::VectorXd& x) const;
};

}  // namespace msk
