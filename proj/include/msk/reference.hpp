#pragma once

#include <Eigen/Dense>
#include <string>

#include "msk/model.hpp"

namespace msk {

/// Retargeted target motion sampled at the control rate (50 Hz).
/// CSV layout (in column order): time, q_0.., dq_0.., key{i}_x key{i}_z ..,
/// key{i}_angle .., optional emg_0.., optional grf{j}_x grf{j}_z ..
struct ReferenceTrajectory {
    double rate = 50.0;  // frames per second
    Eigen::MatrixXd q;          // T x nq
    Eigen::MatrixXd dq;         // T x nq
    Eigen::MatrixXd key_pos;    // T x 2K
    Eigen::MatrixXd key_angle;  // T x K
    Eigen::MatrixXd emg;        // T x n_channels (0 cols if absent)
    Eigen::MatrixXd grf;        // T x 2F (0 cols if absent)
    bool cyclic = false;

    int frames() const { return static_cast<int>(q.rows()); }
    int n_key() const { return static_cast<int>(key_angle.cols()); }

    /// Shape and finiteness checks against a model; empty when valid.
    std::vector<std::string> validate(const ModelSpec& spec) const;
};

ReferenceTrajectory load_reference(const std::string& path, int nq, int n_key);
ReferenceTrajectory load_reference(const std::string& path, const ModelSpec& spec);
void save_reference(const std::string& path, const ReferenceTrajectory& ref);

}  // namespace msk
