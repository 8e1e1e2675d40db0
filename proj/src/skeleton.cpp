#include "msk/skeleton.hpp"

#include <algorithm>
#include <cmath>

#include "msk/errors.hpp"

namespace msk {

namespace {

inline Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

inline Eigen::Matrix2d rot(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix2d R;
    R << c, -s, s, c;
    return R;
}

// Joint indices (== DOF index minus root offset) on the path from the root
// to `link`, ordered root-first.
std::vector<int> joint_path(const ModelSpec& spec, int link) {
    std::vector<int> path;
    const int first_child = spec.root == RootType::FloatingPlanar ? 1 : 0;
    int cur = link;
    while (cur >= first_child) {
        const int j = cur - first_child;
        path.push_back(j);
        cur = spec.joints[j].parent;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// Per-link velocity data for the bias-force computation.
struct VelKin {
    std::vector<double> omega;                  // angular velocity per link
    std::vector<Eigen::Vector2d> v_origin;      // frame-origin velocity per link
    std::vector<Eigen::Vector2d> anchor_vel;    // per joint
};

VelKin velocity_kinematics(const ModelSpec& spec, const Kinematics& kin,
                           const Eigen::VectorXd& dq) {
    const int nl = spec.n_links();
    VelKin vk;
    vk.omega.resize(nl);
    vk.v_origin.resize(nl);
    vk.anchor_vel.resize(spec.n_joints());

    const bool floating = spec.root == RootType::FloatingPlanar;
    const int first_child = floating ? 1 : 0;
    if (floating) {
        vk.v_origin[0] = {dq[0], dq[1]};
        vk.omega[0] = dq[2];
    }
    for (int j = 0; j < spec.n_joints(); ++j) {
        const auto& jt = spec.joints[j];
        const int child = first_child + j;
        double parent_omega = 0.0;
        Eigen::Vector2d anchor_v = Eigen::Vector2d::Zero();
        if (jt.parent >= 0) {
            parent_omega = vk.omega[jt.parent];
            const Eigen::Vector2d r = kin.joint_anchors[j] - kin.frames[jt.parent].origin;
            anchor_v = vk.v_origin[jt.parent] + parent_omega * perp(r);
        }
        vk.anchor_vel[j] = anchor_v;
        vk.omega[child] = parent_omega + dq[spec.n_root_dof() + j];
        vk.v_origin[child] = anchor_v;
    }
    return vk;
}

inline Eigen::Vector2d material_point_velocity(const VelKin& vk, const Kinematics& kin,
                                               int link, const Eigen::Vector2d& world_pt) {
    if (link < 0) return Eigen::Vector2d::Zero();
    return vk.v_origin[link] + vk.omega[link] * perp(world_pt - kin.frames[link].origin);
}

}  // namespace

Kinematics forward_kinematics(const ModelSpec& spec, const Eigen::VectorXd& q) {
    if (q.size() != spec.nq())
        throw ContractError("forward_kinematics: q has dimension " + std::to_string(q.size()) +
                            ", model expects " + std::to_string(spec.nq()));
    Kinematics kin;
    kin.frames.resize(spec.n_links());
    kin.joint_anchors.resize(spec.n_joints());

    const bool floating = spec.root == RootType::FloatingPlanar;
    const int first_child = floating ? 1 : 0;
    if (floating) {
        kin.frames[0].origin = {q[0], q[1]};
        kin.frames[0].angle = q[2];
    }
    for (int j = 0; j < spec.n_joints(); ++j) {
        const auto& jt = spec.joints[j];
        const int child = first_child + j;
        Frame parent;  // identity for world parent
        if (jt.parent >= 0) parent = kin.frames[jt.parent];
        const Eigen::Vector2d anchor_w = parent.origin + rot(parent.angle) * jt.anchor;
        kin.joint_anchors[j] = anchor_w;
        kin.frames[child].origin = anchor_w;
        kin.frames[child].angle = parent.angle + jt.mount_angle + q[spec.n_root_dof() + j];
    }
    return kin;
}

Eigen::Vector2d world_point(const Kinematics& kin, int link, const Eigen::Vector2d& local) {
    if (link < 0) return local;
    const Frame& f = kin.frames[link];
    return f.origin + rot(f.angle) * local;
}

Eigen::MatrixXd point_jacobian(const ModelSpec& spec, const Kinematics& kin, int link,
                               const Eigen::Vector2d& world_pt) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, spec.nq());
    if (link < 0) return J;
    if (spec.root == RootType::FloatingPlanar) {
        J(0, 0) = 1.0;
        J(1, 1) = 1.0;
        J.col(2) = perp(world_pt - kin.frames[0].origin);
    }
    for (int j : joint_path(spec, link))
        J.col(spec.n_root_dof() + j) = perp(world_pt - kin.joint_anchors[j]);
    return J;
}

double mtu_length(const ModelSpec& spec, const Kinematics& kin, int muscle_index) {
    if (muscle_index < 0 || muscle_index >= spec.n_muscles())
        throw ContractError("mtu_length: muscle index out of range");
    const auto& vps = spec.muscles[muscle_index].via_points;
    double len = 0.0;
    Eigen::Vector2d prev = world_point(kin, vps[0].link, vps[0].offset);
    for (size_t k = 1; k < vps.size(); ++k) {
        const Eigen::Vector2d cur = world_point(kin, vps[k].link, vps[k].offset);
        len += (cur - prev).norm();
        prev = cur;
    }
    return len;
}

double mtu_length(const ModelSpec& spec, const Eigen::VectorXd& q, int muscle_index) {
    return mtu_length(spec, forward_kinematics(spec, q), muscle_index);
}

Eigen::MatrixXd moment_arms(const ModelSpec& spec, const Eigen::VectorXd& q) {
    const Kinematics kin = forward_kinematics(spec, q);
    Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(spec.n_muscles(), spec.nq());
    for (int m = 0; m < spec.n_muscles(); ++m) {
        const auto& vps = spec.muscles[m].via_points;
        Eigen::Vector2d p_prev = world_point(kin, vps[0].link, vps[0].offset);
        Eigen::MatrixXd J_prev = point_jacobian(spec, kin, vps[0].link, p_prev);
        Eigen::RowVectorXd dL = Eigen::RowVectorXd::Zero(spec.nq());
        for (size_t k = 1; k < vps.size(); ++k) {
            const Eigen::Vector2d p = world_point(kin, vps[k].link, vps[k].offset);
            Eigen::MatrixXd J = point_jacobian(spec, kin, vps[k].link, p);
            const Eigen::Vector2d seg = p - p_prev;
            const double len = seg.norm();
            if (len > 1e-12) {
                const Eigen::Vector2d u = seg / len;
                dL += u.transpose() * (J - J_prev);
            }
            p_prev = p;
            J_prev.swap(J);
        }
        Jm.row(m) = -dL;
    }
    return Jm;
}

Eigen::MatrixXd mass_matrix(const ModelSpec& spec, const Eigen::VectorXd& q) {
    const Kinematics kin = forward_kinematics(spec, q);
    const int n = spec.nq();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int l = 0; l < spec.n_links(); ++l) {
        const auto& link = spec.links[l];
        const Eigen::Vector2d com_w =
            world_point(kin, l, Eigen::Vector2d(link.com_offset, 0.0));
        const Eigen::MatrixXd Jv = point_jacobian(spec, kin, l, com_w);
        Eigen::VectorXd Jw = Eigen::VectorXd::Zero(n);
        if (spec.root == RootType::FloatingPlanar) Jw[2] = 1.0;
        for (int j : joint_path(spec, l)) Jw[spec.n_root_dof() + j] = 1.0;
        M.selfadjointView<Eigen::Lower>().rankUpdate(Jv.transpose(), link.mass);
        M.selfadjointView<Eigen::Lower>().rankUpdate(Jw, link.inertia);
    }
    M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
    return M;
}

Eigen::VectorXd bias_forces(const ModelSpec& spec, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& dq) {
    if (q.size() != spec.nq() || dq.size() != spec.nq())
        throw ContractError("bias_forces: dimension mismatch");
    const Kinematics kin = forward_kinematics(spec, q);
    const VelKin vk = velocity_kinematics(spec, kin, dq);
    const int n = spec.nq();
    const Eigen::Vector2d g_vec(0.0, spec.gravity);

    Eigen::VectorXd C = Eigen::VectorXd::Zero(n);
    for (int l = 0; l < spec.n_links(); ++l) {
        const auto& link = spec.links[l];
        const Eigen::Vector2d com_w =
            world_point(kin, l, Eigen::Vector2d(link.com_offset, 0.0));
        const Eigen::MatrixXd Jv = point_jacobian(spec, kin, l, com_w);
        const Eigen::Vector2d v_com = material_point_velocity(vk, kin, l, com_w);

        // dJ/dt * dq for the COM: columns of J are perp(p - o_d), so their
        // time derivative is perp(v_p - v_od).
        Eigen::Vector2d a_bias = Eigen::Vector2d::Zero();
        if (spec.root == RootType::FloatingPlanar) {
            const Eigen::Vector2d root_v(dq[0], dq[1]);
            a_bias += dq[2] * perp(v_com - root_v);
        }
        for (int j : joint_path(spec, l)) {
            const Eigen::Vector2d anchor_v = vk.anchor_vel[j];
            a_bias += dq[spec.n_root_dof() + j] * perp(v_com - anchor_v);
        }
        C += link.mass * (Jv.transpose() * a_bias);
        C -= link.mass * (Jv.transpose() * g_vec);
    }

    for (int j = 0; j < spec.n_joints(); ++j) {
        const auto& jt = spec.joints[j];
        const int d = spec.n_root_dof() + j;
        C[d] += jt.damping * dq[d];
        if (q[d] > jt.limit_hi)
            C[d] += spec.joint_limit_stiffness * (q[d] - jt.limit_hi);
        else if (q[d] < jt.limit_lo)
            C[d] += spec.joint_limit_stiffness * (q[d] - jt.limit_lo);
    }
    return C;
}

ContactResult contact_forces(const ModelSpec& spec, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& dq, const ContactParams& params) {
    const Kinematics kin = forward_kinematics(spec, q);
    const VelKin vk = velocity_kinematics(spec, kin, dq);
    ContactResult res;
    res.tau = Eigen::VectorXd::Zero(spec.nq());
    res.sphere_force.setZero(2, spec.contact_spheres.size());

    for (size_t s = 0; s < spec.contact_spheres.size(); ++s) {
        const auto& sp = spec.contact_spheres[s];
        const Eigen::Vector2d center = world_point(kin, sp.link, sp.offset);
        const double penetration = sp.radius - center.y();
        if (penetration <= 0.0) continue;
        const Eigen::Vector2d v_center = material_point_velocity(vk, kin, sp.link, center);
        const double fn =
            std::max(0.0, params.stiffness * penetration - params.damping * v_center.y());
        if (fn <= 0.0) continue;
        const Eigen::Vector2d contact_pt = center - Eigen::Vector2d(0.0, sp.radius);
        const Eigen::Vector2d v_contact =
            material_point_velocity(vk, kin, sp.link, contact_pt);
        const double ft =
            -params.friction * fn * std::tanh(v_contact.x() / params.smoothing_vel);
        const Eigen::Vector2d force(ft, fn);
        res.sphere_force.col(s) = force;
        res.tau += point_jacobian(spec, kin, sp.link, contact_pt).transpose() * force;
    }
    return res;
}

SimState make_initial_state(const ModelSpec& spec, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& dq, double init_act) {
    if (q.size() != spec.nq() || dq.size() != spec.nq())
        throw ContractError("make_initial_state: dimension mismatch");
    SimState st;
    st.q = q;
    st.dq = dq;
    st.t = 0.0;
    st.muscles.resize(spec.n_muscles());
    const Kinematics kin = forward_kinematics(spec, q);
    for (int m = 0; m < spec.n_muscles(); ++m) {
        const auto& p = spec.muscles[m];
        const double L = mtu_length(spec, kin, m);
        MuscleState& ms = st.muscles[m];
        ms.act = init_act;
        ms.l_m = std::max((L - p.tendon_slack) / p.l_opt, kMinFiberLength);
        ms.v_m = 0.0;
        ms.f_m = mtu_force(ms.act, ms.l_m, 0.0, p);
    }
    return st;
}

StepInfo step(SimState& state, const Eigen::VectorXd& u, const ModelSpec& spec) {
    const int nm = spec.n_muscles();
    if (u.size() != nm) throw ContractError("step: excitation dimension mismatch");

    StepInfo info;
    info.grf_per_link.setZero(2, spec.n_links());
    info.muscle_power = Eigen::VectorXd::Zero(nm);

    Eigen::VectorXd forces(nm);
    for (int s = 0; s < kSubsteps; ++s) {
        const Kinematics kin = forward_kinematics(spec, state.q);

        for (int m = 0; m < nm; ++m) {
            const auto& p = spec.muscles[m];
            MuscleState& ms = state.muscles[m];
            ms.act = activation_step(ms.act, std::clamp(u[m], 0.0, 1.0), kSimDt, p);
            const double prev_len = p.tendon_slack + ms.l_m * p.l_opt;
            const double len = mtu_length(spec, kin, m);
            ms.v_m = (len - prev_len) / kSimDt / (p.l_opt * p.v_max);
            ms.l_m = std::max((len - p.tendon_slack) / p.l_opt, kMinFiberLength);
            ms.f_m = mtu_force(ms.act, ms.l_m, ms.v_m, p);
            forces[m] = ms.f_m;
            info.muscle_power[m] +=
                std::abs(ms.f_m * ms.v_m * p.l_opt * p.v_max) / kSubsteps;
        }

        const Eigen::MatrixXd Jm = moment_arms(spec, state.q);
        const ContactResult contact = contact_forces(spec, state.q, state.dq, spec.contact);
        const Eigen::VectorXd C = bias_forces(spec, state.q, state.dq);
        const Eigen::VectorXd tau = Jm.transpose() * forces + contact.tau - C;
        const Eigen::MatrixXd M = mass_matrix(spec, state.q);
        const Eigen::VectorXd qdd = M.ldlt().solve(tau);

        state.dq += qdd * kSimDt;
        state.q += state.dq * kSimDt;
        state.t += kSimDt;

        for (size_t c = 0; c < spec.contact_spheres.size(); ++c)
            info.grf_per_link.col(spec.contact_spheres[c].link) +=
                contact.sphere_force.col(c) / kSubsteps;

        if (!state.q.allFinite() || !state.dq.allFinite())
            throw SimulationDiverged("simulation diverged (non-finite state)", s);
    }
    return info;
}

double mechanical_energy(const ModelSpec& spec, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& dq) {
    const Eigen::MatrixXd M = mass_matrix(spec, q);
    const Kinematics kin = forward_kinematics(spec, q);
    double pe = 0.0;
    for (int l = 0; l < spec.n_links(); ++l) {
        const Eigen::Vector2d com_w =
            world_point(kin, l, Eigen::Vector2d(spec.links[l].com_offset, 0.0));
        pe += spec.links[l].mass * (-spec.gravity) * com_w.y();
    }
    return 0.5 * dq.dot(M * dq) + pe;
}

void key_body_state(const ModelSpec& spec, const Kinematics& kin,
                    Eigen::Matrix2Xd& positions, Eigen::VectorXd& angles) {
    const int k = spec.n_key_bodies();
    positions.resize(2, k);
    angles.resize(k);
    for (int i = 0; i < k; ++i) {
        const int link = spec.key_bodies[i];
        positions.col(i) =
            world_point(kin, link, Eigen::Vector2d(spec.links[link].com_offset, 0.0));
        angles[i] = kin.frames[link].angle;
    }
}

}  // namespace msk
