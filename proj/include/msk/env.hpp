#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "msk/model.hpp"
#include "msk/reference.hpp"
#include "msk/rng.hpp"
#include "msk/skeleton.hpp"

namespace msk {

/// Concatenated pose error fed to the discriminator:
/// [root translation (2), root rotation (1), joint angles, key-body positions].
/// Fixed-base models carry zero root blocks so the layout is uniform.
struct TrackingError {
    Eigen::Vector2d root_translation = Eigen::Vector2d::Zero();
    double root_rotation = 0.0;
    Eigen::VectorXd joint_angles;
    Eigen::VectorXd body_positions;  // 2 per key body

    Eigen::VectorXd flatten() const;
    static int dim(const ModelSpec& spec) {
        return 3 + spec.n_joints() + 2 * spec.n_key_bodies();
    }
};

enum class RewardMode { ImitationOnly, ImitationEmg, ImitationPower };

struct RewardConfig {
    RewardMode mode = RewardMode::ImitationOnly;
    double w_emg = 100.0;
    double w_power = 0.05;
    std::vector<int> emg_channel_map;  // muscle index per measured channel
};

struct EnvConfig {
    int episode_horizon = 250;
    bool rsi = true;
    int adaptive_bins = 10;
    double adaptive_mix = 0.2;
    double adaptive_decay = 0.99;
    double termination_body_err = 0.5;  // [m]
    double init_activation = 0.01;
};

/// Failure-rate-proportional phase sampler with a uniform mixture floor.
struct AdaptiveSampler {
    int bins = 1;
    double mix = 0.2;
    double decay = 0.99;
    Eigen::VectorXd failure_ema;

    void init(int n_bins, double mix_weight, double decay_rate);
    void record(int bin, bool failed);
    Eigen::VectorXd probabilities() const;
    int sample(Rng& rng) const;
};

double wrap_angle(double a);  // to (-pi, pi]

/// r_EMG = -(1/n) sum (measured - simulated)^2; 0 iff exact match.
double emg_reward(const Eigen::VectorXd& act_sim, const Eigen::VectorXd& act_measured);

/// r_power = -(1/n) sum |F * v|, watts averaged over muscles, negated.
double power_reward(const Eigen::VectorXd& force_n, const Eigen::VectorXd& fiber_speed_mps);

struct StepResult {
    Eigen::VectorXd observation;
    TrackingError delta;
    double reward = 0.0;         // filled when a tracking-reward fn is supplied
    double reward_aux = 0.0;     // weighted emg/power term per RewardConfig
    bool done = false;
    bool failed = false;         // early termination by body error
    bool diverged = false;
    Eigen::VectorXd muscle_power;        // |F*v| per muscle [W]
    Eigen::Matrix2Xd contact_force;      // per link
};

using TrackingRewardFn = std::function<double(const Eigen::VectorXd& delta)>;

/// Single imitation-environment instance. Owns its state; many instances
/// step concurrently without shared mutable data.
class Env {
public:
    Env(const ModelSpec& spec, const ReferenceTrajectory& ref, EnvConfig cfg,
        RewardConfig reward_cfg, uint64_t seed);

    Eigen::VectorXd reset();
    /// Resets to a specific reference frame (RSI hook, also used by tests).
    Eigen::VectorXd reset_to_frame(int frame);

    StepResult step(const Eigen::VectorXd& action);
    StepResult step(const Eigen::VectorXd& action, const TrackingRewardFn& tracking_reward);

    Eigen::VectorXd observe() const;
    TrackingError tracking_error() const;

    /// Teleports the simulated state onto the current reference frame.
    void force_state_to_reference();

    int observation_dim() const;
    int action_dim() const { return spec_.n_muscles(); }
    int t_index() const { return t_index_; }
    int start_index() const { return start_index_; }
    bool done() const { return done_; }
    const SimState& state() const { return state_; }
    SimState& mutable_state() { return state_; }
    const ModelSpec& spec() const { return spec_; }
    const ReferenceTrajectory& reference() const { return ref_; }
    const EnvConfig& config() const { return cfg_; }

    void set_eval_mode(bool eval) { eval_mode_ = eval; }
    bool eval_mode() const { return eval_mode_; }

    AdaptiveSampler& sampler() { return sampler_; }
    const AdaptiveSampler& sampler() const { return sampler_; }
    Rng& rng() { return rng_; }

    /// Pending (bin, failed) episode outcomes for order-fixed merging.
    std::vector<std::pair<int, bool>> drain_episode_outcomes();

private:
    int phase_bin(int frame) const;
    void finish_episode(bool failed);

    ModelSpec spec_;
    ReferenceTrajectory ref_;
    EnvConfig cfg_;
    RewardConfig reward_cfg_;
    SimState state_;
    Rng rng_;
    AdaptiveSampler sampler_;
    std::vector<std::pair<int, bool>> episode_outcomes_;
    int t_index_ = 0;
    int start_index_ = 0;
    int steps_ = 0;
    bool done_ = true;
    bool eval_mode_ = false;

    friend class Learner;
    friend struct EnvSerde;
};

}  // namespace msk
