#include "msk/model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace msk {

double ModelSpec::total_mass() const {
    double m = 0.0;
    for (const auto& l : links) m += l.mass;
    return m;
}

std::vector<std::string> ModelSpec::validate() const {
    std::vector<std::string> errs;
    auto err = [&](const std::string& m) { errs.push_back(m); };

    if (links.empty()) err("model has no links");
    for (int i = 0; i < n_links(); ++i) {
        const auto& l = links[i];
        if (!(l.mass > 0.0)) err("link '" + l.name + "': mass must be > 0");
        if (!(l.inertia > 0.0)) err("link '" + l.name + "': inertia must be > 0");
        if (!(l.length > 0.0)) err("link '" + l.name + "': length must be > 0");
    }

    const int expected_joints =
        root == RootType::FloatingPlanar ? n_links() - 1 : n_links();
    if (n_joints() != expected_joints)
        err("expected " + std::to_string(expected_joints) + " joints for " +
            std::to_string(n_links()) + " links, got " + std::to_string(n_joints()));

    const int first_child = root == RootType::FloatingPlanar ? 1 : 0;
    for (int j = 0; j < n_joints(); ++j) {
        const auto& jt = joints[j];
        if (jt.child != first_child + j)
            err("joint '" + jt.name + "': joints must be listed in child-link order");
        if (jt.parent >= jt.child)
            err("joint '" + jt.name + "': parent must precede child (tree, acyclic)");
        if (jt.parent < -1 || jt.parent >= n_links())
            err("joint '" + jt.name + "': parent link out of range");
        if (jt.parent == -1 && (root == RootType::FloatingPlanar || j != 0))
            err("joint '" + jt.name + "': world parent only valid for the first fixed-base joint");
        if (!(jt.limit_lo < jt.limit_hi))
            err("joint '" + jt.name + "': limit_lo must be < limit_hi");
        if (jt.damping < 0.0) err("joint '" + jt.name + "': damping must be >= 0");
    }

    for (const auto& m : muscles) {
        if (!(m.f_max > 0.0)) err("muscle '" + m.name + "': f_max must be > 0");
        if (!(m.l_opt > 0.0)) err("muscle '" + m.name + "': l_opt must be > 0");
        if (!(m.v_max > 0.0)) err("muscle '" + m.name + "': v_max must be > 0");
        if (!(m.tau_act > 0.0 && m.tau_act <= m.tau_deact))
            err("muscle '" + m.name + "': need 0 < tau_act <= tau_deact");
        if (m.tendon_slack < 0.0) err("muscle '" + m.name + "': tendon_slack must be >= 0");
        if (m.via_points.size() < 2)
            err("muscle '" + m.name + "': needs at least 2 via points");
        std::set<int> links_spanned;
        for (const auto& vp : m.via_points) {
            if (vp.link < -1 || vp.link >= n_links())
                err("muscle '" + m.name + "': via point references missing link " +
                    std::to_string(vp.link));
            links_spanned.insert(vp.link);
        }
        if (links_spanned.size() < 2)
            err("muscle '" + m.name + "': via points must span at least 2 distinct links");
        if (root == RootType::FloatingPlanar && links_spanned.count(-1))
            err("muscle '" + m.name + "': floating-root models cannot anchor muscles to the world");
    }

    for (const auto& c : contact_spheres) {
        if (c.link < 0 || c.link >= n_links()) err("contact sphere references missing link");
        if (!(c.radius > 0.0)) err("contact sphere radius must be > 0");
    }
    for (int kb : key_bodies)
        if (kb < 0 || kb >= n_links()) err("key body index out of range");

    if (contact.stiffness < 0 || contact.damping < 0 || contact.friction < 0 ||
        contact.smoothing_vel < 0)
        err("contact parameters must be >= 0");

    return errs;
}

static Eigen::Vector2d parse_vec2(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(where + ": expected [x, z]");
    return {j[0].get<double>(), j[1].get<double>()};
}

ModelSpec parse_model_json(const std::string& text, const std::string& origin) {
    Json root = parse_json_text(text, origin);
    check_keys(root,
               {"name", "root", "gravity", "joint_limit_stiffness", "links", "joints",
                "muscles", "contacts", "contact_spheres", "key_bodies"},
               origin);
    ModelSpec spec;
    spec.name = get_str(root, "name", origin);

    const std::string root_type = get_str(root, "root", origin);
    if (root_type == "fixed")
        spec.root = RootType::FixedBase;
    else if (root_type == "floating")
        spec.root = RootType::FloatingPlanar;
    else
        throw ConfigError(origin + ": root must be 'fixed' or 'floating'");

    spec.gravity = get_num_or(root, "gravity", -9.81);
    spec.joint_limit_stiffness = get_num_or(root, "joint_limit_stiffness", 200.0);

    for (const auto& jl : root["links"]) {
        check_keys(jl, {"name", "length", "mass", "inertia", "com"}, origin + ".links");
        LinkSpec l;
        l.name = get_str(jl, "name", origin + ".links");
        l.length = get_num(jl, "length", l.name);
        l.mass = get_num(jl, "mass", l.name);
        l.inertia = get_num(jl, "inertia", l.name);
        l.com_offset = get_num(jl, "com", l.name);
        spec.links.push_back(l);
    }

    if (root.contains("joints")) {
        for (const auto& jj : root["joints"]) {
            check_keys(jj, {"name", "child", "parent", "anchor", "mount_angle", "limits",
                            "damping"},
                       origin + ".joints");
            JointSpec jt;
            jt.name = get_str(jj, "name", origin + ".joints");
            jt.child = static_cast<int>(get_num(jj, "child", jt.name));
            jt.parent = static_cast<int>(get_num(jj, "parent", jt.name));
            jt.anchor = parse_vec2(jj["anchor"], jt.name + ".anchor");
            jt.mount_angle = get_num_or(jj, "mount_angle", 0.0);
            if (jj.contains("limits")) {
                jt.limit_lo = jj["limits"][0].get<double>();
                jt.limit_hi = jj["limits"][1].get<double>();
            }
            jt.damping = get_num_or(jj, "damping", 0.0);
            spec.joints.push_back(jt);
        }
    }

    if (root.contains("muscles")) {
        for (const auto& jm : root["muscles"]) {
            check_keys(jm, {"name", "f_max", "l_opt", "v_max", "tau_act", "tau_deact",
                            "tendon_slack", "via_points"},
                       origin + ".muscles");
            MuscleParams m;
            m.name = get_str(jm, "name", origin + ".muscles");
            m.f_max = get_num(jm, "f_max", m.name);
            m.l_opt = get_num(jm, "l_opt", m.name);
            m.v_max = get_num_or(jm, "v_max", 10.0);
            m.tau_act = get_num_or(jm, "tau_act", 0.010);
            m.tau_deact = get_num_or(jm, "tau_deact", 0.040);
            m.tendon_slack = get_num(jm, "tendon_slack", m.name);
            if (!jm.contains("via_points"))
                throw ConfigError(m.name + ": missing via_points");
            for (const auto& vp : jm["via_points"]) {
                if (!vp.is_array() || vp.size() != 2)
                    throw ConfigError(m.name + ": via point must be [link, [x, z]]");
                ViaPoint v;
                v.link = vp[0].get<int>();
                v.offset = parse_vec2(vp[1], m.name + ".via_point");
                m.via_points.push_back(v);
            }
            spec.muscles.push_back(m);
        }
    }

    if (root.contains("contacts")) {
        const auto& jc = root["contacts"];
        check_keys(jc, {"stiffness", "damping", "friction", "smoothing_vel", "spheres"},
                   origin + ".contacts");
        spec.contact.stiffness = get_num_or(jc, "stiffness", spec.contact.stiffness);
        spec.contact.damping = get_num_or(jc, "damping", spec.contact.damping);
        spec.contact.friction = get_num_or(jc, "friction", spec.contact.friction);
        spec.contact.smoothing_vel = get_num_or(jc, "smoothing_vel", spec.contact.smoothing_vel);
        if (jc.contains("spheres")) {
            for (const auto& js : jc["spheres"]) {
                check_keys(js, {"link", "offset", "radius"}, origin + ".contacts.spheres");
                ContactSphere s;
                s.link = static_cast<int>(get_num(js, "link", "sphere"));
                s.offset = parse_vec2(js["offset"], "sphere.offset");
                s.radius = get_num(js, "radius", "sphere");
                spec.contact_spheres.push_back(s);
            }
        }
    }

    if (root.contains("key_bodies"))
        for (const auto& kb : root["key_bodies"]) spec.key_bodies.push_back(kb.get<int>());

    return spec;
}

ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("model: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model_json(ss.str(), path);
}

}  // namespace msk
