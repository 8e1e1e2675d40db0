#include "msk/env.hpp"

#include <cmath>
#include <numbers>

#include "msk/errors.hpp"

namespace msk {

double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    a = std::fmod(a + pi, 2.0 * pi);
    if (a <= 0.0) a += 2.0 * pi;
    return a - pi;
}

Eigen::VectorXd TrackingError::flatten() const {
    Eigen::VectorXd out(3 + joint_angles.size() + body_positions.size());
    out[0] = root_translation.x();
    out[1] = root_translation.y();
    out[2] = root_rotation;
    out.segment(3, joint_angles.size()) = joint_angles;
    out.tail(body_positions.size()) = body_positions;
    return out;
}

void AdaptiveSampler::init(int n_bins, double mix_weight, double decay_rate) {
    bins = std::max(1, n_bins);
    mix = mix_weight;
    decay = decay_rate;
    failure_ema = Eigen::VectorXd::Zero(bins);
}

void AdaptiveSampler::record(int bin, bool failed) {
    if (bin < 0 || bin >= bins) return;
    failure_ema[bin] = decay * failure_ema[bin] + (1.0 - decay) * (failed ? 1.0 : 0.0);
}

Eigen::VectorXd AdaptiveSampler::probabilities() const {
    Eigen::VectorXd p = Eigen::VectorXd::Constant(bins, mix / bins);
    const double total = failure_ema.sum();
    if (total > 1e-12)
        p += (1.0 - mix) * failure_ema / total;
    else
        p.array() += (1.0 - mix) / bins;
    return p;
}

int AdaptiveSampler::sample(Rng& rng) const {
    const Eigen::VectorXd p = probabilities();
    double u = rng.uniform();
    for (int b = 0; b < bins; ++b) {
        u -= p[b];
        if (u <= 0.0) return b;
    }
    return bins - 1;
}

double emg_reward(const Eigen::VectorXd& act_sim, const Eigen::VectorXd& act_measured) {
    if (act_sim.size() != act_measured.size())
        throw ContractError("emg_reward: channel count mismatch");
    if (act_sim.size() == 0) return 0.0;
    return -(act_measured - act_sim).squaredNorm() / static_cast<double>(act_sim.size());
}

double power_reward(const Eigen::VectorXd& force_n, const Eigen::VectorXd& fiber_speed_mps) {
    if (force_n.size() != fiber_speed_mps.size())
        throw ContractError("power_reward: length mismatch");
    if (force_n.size() == 0) return 0.0;
    return -force_n.cwiseProduct(fiber_speed_mps).cwiseAbs().sum() /
           static_cast<double>(force_n.size());
}

Env::Env(const ModelSpec& spec, const ReferenceTrajectory& ref, EnvConfig cfg,
         RewardConfig reward_cfg, uint64_t seed)
    : spec_(spec), ref_(ref), cfg_(cfg), reward_cfg_(reward_cfg), rng_(seed) {
    auto errs = ref_.validate(spec_);
    if (!errs.empty()) throw ContractError("env: invalid reference: " + errs.front());
    for (int ch : reward_cfg_.emg_channel_map)
        if (ch < 0 || ch >= spec_.n_muscles())
            throw ContractError("env: emg channel map references missing muscle");
    if (reward_cfg_.mode == RewardMode::ImitationEmg &&
        static_cast<int>(reward_cfg_.emg_channel_map.size()) != ref_.emg.cols())
        throw ContractError("env: emg channel map size must match reference emg columns");
    sampler_.init(cfg_.adaptive_bins, cfg_.adaptive_mix, cfg_.adaptive_decay);
    state_ = make_initial_state(spec_, ref_.q.row(0), ref_.dq.row(0), cfg_.init_activation);
}

int Env::phase_bin(int frame) const {
    const int usable = std::max(1, ref_.frames() - 1);
    int b = static_cast<int>(static_cast<long>(frame) * sampler_.bins / usable);
    return std::min(b, sampler_.bins - 1);
}

Eigen::VectorXd Env::reset_to_frame(int frame) {
    if (frame < 0 || frame >= ref_.frames() - 1)
        throw ContractError("reset_to_frame: frame out of range");
    t_index_ = frame;
    start_index_ = frame;
    steps_ = 0;
    done_ = false;
    state_ = make_initial_state(spec_, ref_.q.row(frame), ref_.dq.row(frame),
                                cfg_.init_activation);
    state_.t = frame * kCtrlDt;
    return observe();
}

Eigen::VectorXd Env::reset() {
    int frame = 0;
    if (cfg_.rsi) {
        const int usable = ref_.frames() - 1;
        const int bin = sampler_.sample(rng_);
        const long lo = static_cast<long>(bin) * usable / sampler_.bins;
        long hi = static_cast<long>(bin + 1) * usable / sampler_.bins;
        if (hi <= lo) hi = lo + 1;
        frame = static_cast<int>(lo + static_cast<long>(rng_.uniform_index(
                                          static_cast<uint64_t>(hi - lo))));
        frame = std::min(frame, usable - 1);
    }
    return reset_to_frame(frame);
}

void Env::force_state_to_reference() {
    state_ = make_initial_state(spec_, ref_.q.row(t_index_), ref_.dq.row(t_index_),
                                cfg_.init_activation);
    state_.t = t_index_ * kCtrlDt;
}

Eigen::VectorXd Env::observe() const {
    if (t_index_ >= ref_.frames())
        throw ContractError("observe: reference index out of range");
    const int nq = spec_.nq();
    const int nm = spec_.n_muscles();
    const int nk = spec_.n_key_bodies();

    const Kinematics kin = forward_kinematics(spec_, state_.q);
    Eigen::Matrix2Xd key_pos;
    Eigen::VectorXd key_angle;
    key_body_state(spec_, kin, key_pos, key_angle);

    Eigen::VectorXd obs(observation_dim());
    int c = 0;
    obs.segment(c, nq) = state_.q;
    c += nq;
    obs.segment(c, nq) = state_.dq;
    c += nq;
    for (int k = 0; k < nk; ++k) {
        obs[c++] = key_pos(0, k);
        obs[c++] = key_pos(1, k);
    }
    for (int k = 0; k < nk; ++k) obs[c++] = key_angle[k];
    for (int m = 0; m < nm; ++m) obs[c++] = state_.muscles[m].act;
    for (int m = 0; m < nm; ++m) obs[c++] = state_.muscles[m].f_m;
    for (int m = 0; m < nm; ++m) obs[c++] = state_.muscles[m].l_m;
    for (int m = 0; m < nm; ++m) obs[c++] = state_.muscles[m].v_m;
    obs.segment(c, nq) = ref_.q.row(t_index_);
    c += nq;
    obs.segment(c, 2 * nk) = ref_.key_pos.row(t_index_);
    c += 2 * nk;
    obs.segment(c, nk) = ref_.key_angle.row(t_index_);
    c += nk;
    return obs;
}

int Env::observation_dim() const {
    const int nq = spec_.nq(), nm = spec_.n_muscles(), nk = spec_.n_key_bodies();
    return 3 * nq + 6 * nk + 4 * nm;
}

TrackingError Env::tracking_error() const {
    TrackingError e;
    const int nj = spec_.n_joints();
    const int nrd = spec_.n_root_dof();
    if (spec_.root == RootType::FloatingPlanar) {
        e.root_translation = {state_.q[0] - ref_.q(t_index_, 0),
                              state_.q[1] - ref_.q(t_index_, 1)};
        e.root_rotation = wrap_angle(state_.q[2] - ref_.q(t_index_, 2));
    }
    e.joint_angles.resize(nj);
    for (int j = 0; j < nj; ++j)
        e.joint_angles[j] = state_.q[nrd + j] - ref_.q(t_index_, nrd + j);

    const Kinematics kin = forward_kinematics(spec_, state_.q);
    Eigen::Matrix2Xd key_pos;
    Eigen::VectorXd key_angle;
    key_body_state(spec_, kin, key_pos, key_angle);
    e.body_positions.resize(2 * spec_.n_key_bodies());
    for (int k = 0; k < spec_.n_key_bodies(); ++k) {
        e.body_positions[2 * k] = key_pos(0, k) - ref_.key_pos(t_index_, 2 * k);
        e.body_positions[2 * k + 1] = key_pos(1, k) - ref_.key_pos(t_index_, 2 * k + 1);
    }
    return e;
}

void Env::finish_episode(bool failed) {
    done_ = true;
    episode_outcomes_.emplace_back(phase_bin(start_index_), failed);
}

std::vector<std::pair<int, bool>> Env::drain_episode_outcomes() {
    auto out = std::move(episode_outcomes_);
    episode_outcomes_.clear();
    return out;
}

StepResult Env::step(const Eigen::VectorXd& action) {
    if (done_) throw ContractError("env step: episode already terminated");
    if (action.size() != spec_.n_muscles())
        throw ContractError("env step: action dimension mismatch");
    if (!action.allFinite()) throw ContractError("env step: non-finite action");

    StepResult res;
    const Eigen::VectorXd u = action.cwiseMax(0.0).cwiseMin(1.0);
    try {
        const StepInfo info = msk::step(state_, u, spec_);
        res.muscle_power = info.muscle_power;
        res.contact_force = info.grf_per_link;
    } catch (const SimulationDiverged&) {
        res.diverged = true;
        res.done = true;
        res.failed = true;
        res.observation = Eigen::VectorXd::Zero(observation_dim());
        res.delta.joint_angles = Eigen::VectorXd::Zero(spec_.n_joints());
        res.delta.body_positions = Eigen::VectorXd::Zero(2 * spec_.n_key_bodies());
        res.muscle_power = Eigen::VectorXd::Zero(spec_.n_muscles());
        res.contact_force.setZero(2, spec_.n_links());
        finish_episode(true);
        return res;
    }

    ++t_index_;
    ++steps_;
    res.delta = tracking_error();
    res.observation = observe();

    // Auxiliary reward per RewardConfig.
    if (reward_cfg_.mode == RewardMode::ImitationEmg && ref_.emg.cols() > 0) {
        Eigen::VectorXd sim(reward_cfg_.emg_channel_map.size());
        for (size_t ch = 0; ch < reward_cfg_.emg_channel_map.size(); ++ch)
            sim[ch] = state_.muscles[reward_cfg_.emg_channel_map[ch]].act;
        res.reward_aux =
            reward_cfg_.w_emg * emg_reward(sim, ref_.emg.row(t_index_).transpose());
    } else if (reward_cfg_.mode == RewardMode::ImitationPower) {
        res.reward_aux = reward_cfg_.w_power * (-res.muscle_power.sum() /
                                                std::max(1, spec_.n_muscles()));
    }

    bool failed = false;
    if (!eval_mode_) {
        for (int k = 0; k < spec_.n_key_bodies(); ++k)
            if (res.delta.body_positions.segment<2>(2 * k).norm() >
                cfg_.termination_body_err)
                failed = true;
    }
    const bool horizon_reached =
        steps_ >= cfg_.episode_horizon || t_index_ >= ref_.frames() - 1;
    if (failed || horizon_reached) {
        res.done = true;
        res.failed = failed;
        finish_episode(failed);
    }
    return res;
}

StepResult Env::step(const Eigen::VectorXd& action, const TrackingRewardFn& tracking_reward) {
    StepResult res = step(action);
    if (!res.diverged && tracking_reward)
        res.reward = tracking_reward(res.delta.flatten()) + res.reward_aux;
    return res;
}

}  // namespace msk
