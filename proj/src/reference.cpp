#include "msk/reference.hpp"

#include <cmath>

#include "msk/csv.hpp"
#include "msk/errors.hpp"
#include "msk/skeleton.hpp"

namespace msk {

std::vector<std::string> ReferenceTrajectory::validate(const ModelSpec& spec) const {
    std::vector<std::string> errs;
    const int T = frames();
    if (T < 2) errs.push_back("reference needs at least 2 frames");
    if (q.cols() != spec.nq())
        errs.push_back("reference q has " + std::to_string(q.cols()) +
                       " columns, model expects " + std::to_string(spec.nq()));
    if (dq.rows() != T || dq.cols() != q.cols())
        errs.push_back("reference dq shape mismatch");
    if (key_pos.rows() != T || key_pos.cols() != 2 * spec.n_key_bodies())
        errs.push_back("reference key positions shape mismatch (expected " +
                       std::to_string(2 * spec.n_key_bodies()) + " columns)");
    if (key_angle.rows() != T || key_angle.cols() != spec.n_key_bodies())
        errs.push_back("reference key angles shape mismatch");
    if (emg.cols() > 0 && emg.rows() != T) errs.push_back("emg rows mismatch");
    if (grf.cols() > 0 && grf.rows() != T) errs.push_back("grf rows mismatch");
    if (std::abs(rate * kCtrlDt - 1.0) > 1e-9)
        errs.push_back("reference rate must be 50 Hz (control rate)");
    auto finite = [](const Eigen::MatrixXd& m) { return m.allFinite(); };
    if (!finite(q) || !finite(dq) || !finite(key_pos) || !finite(key_angle))
        errs.push_back("reference contains non-finite values");
    return errs;
}

ReferenceTrajectory load_reference(const std::string& path, int nq, int n_key) {
    CsvTable t = read_csv(path);
    ReferenceTrajectory ref;
    const int T = static_cast<int>(t.data.rows());
    if (T < 1) throw ConfigError("reference '" + path + "' has no frames");

    int c = 0;
    auto expect = [&](const std::string& name) {
        if (c >= static_cast<int>(t.columns.size()) || t.columns[c] != name)
            throw ConfigError("reference '" + path + "': expected column '" + name +
                              "' at position " + std::to_string(c));
        return c++;
    };
    const int time_col = expect("time");
    if (T >= 2) {
        const double dt = t.data(1, time_col) - t.data(0, time_col);
        if (dt > 0) ref.rate = 1.0 / dt;
    }
    ref.q.resize(T, nq);
    for (int j = 0; j < nq; ++j) ref.q.col(j) = t.data.col(expect("q_" + std::to_string(j)));
    ref.dq.resize(T, nq);
    for (int j = 0; j < nq; ++j) ref.dq.col(j) = t.data.col(expect("dq_" + std::to_string(j)));
    ref.key_pos.resize(T, 2 * n_key);
    for (int k = 0; k < n_key; ++k) {
        ref.key_pos.col(2 * k) = t.data.col(expect("key" + std::to_string(k) + "_x"));
        ref.key_pos.col(2 * k + 1) = t.data.col(expect("key" + std::to_string(k) + "_z"));
    }
    ref.key_angle.resize(T, n_key);
    for (int k = 0; k < n_key; ++k)
        ref.key_angle.col(k) = t.data.col(expect("key" + std::to_string(k) + "_angle"));

    // Optional trailing blocks.
    int n_emg = 0;
    while (c + n_emg < static_cast<int>(t.columns.size()) &&
           t.columns[c + n_emg] == "emg_" + std::to_string(n_emg))
        ++n_emg;
    ref.emg.resize(T, n_emg);
    for (int e = 0; e < n_emg; ++e) ref.emg.col(e) = t.data.col(c + e);
    c += n_emg;

    int n_grf = 0;
    while (c + 2 * n_grf + 1 < static_cast<int>(t.columns.size()) &&
           t.columns[c + 2 * n_grf] == "grf" + std::to_string(n_grf) + "_x")
        ++n_grf;
    ref.grf.resize(T, 2 * n_grf);
    for (int g = 0; g < 2 * n_grf; ++g) ref.grf.col(g) = t.data.col(c + g);
    c += 2 * n_grf;

    if (c != static_cast<int>(t.columns.size()))
        throw ConfigError("reference '" + path + "': unexpected column '" + t.columns[c] + "'");
    return ref;
}

ReferenceTrajectory load_reference(const std::string& path, const ModelSpec& spec) {
    ReferenceTrajectory ref = load_reference(path, spec.nq(), spec.n_key_bodies());
    auto errs = ref.validate(spec);
    if (!errs.empty()) throw ConfigError("reference '" + path + "': " + errs.front());
    return ref;
}

void save_reference(const std::string& path, const ReferenceTrajectory& ref) {
    const int T = ref.frames();
    const int nq = static_cast<int>(ref.q.cols());
    const int n_key = ref.n_key();
    const int n_emg = static_cast<int>(ref.emg.cols());
    const int n_grf = static_cast<int>(ref.grf.cols()) / 2;

    CsvTable t;
    t.columns.push_back("time");
    for (int j = 0; j < nq; ++j) t.columns.push_back("q_" + std::to_string(j));
    for (int j = 0; j < nq; ++j) t.columns.push_back("dq_" + std::to_string(j));
    for (int k = 0; k < n_key; ++k) {
        t.columns.push_back("key" + std::to_string(k) + "_x");
        t.columns.push_back("key" + std::to_string(k) + "_z");
    }
    for (int k = 0; k < n_key; ++k)
        t.columns.push_back("key" + std::to_string(k) + "_angle");
    for (int e = 0; e < n_emg; ++e) t.columns.push_back("emg_" + std::to_string(e));
    for (int g = 0; g < n_grf; ++g) {
        t.columns.push_back("grf" + std::to_string(g) + "_x");
        t.columns.push_back("grf" + std::to_string(g) + "_z");
    }

    t.data.resize(T, t.columns.size());
    for (int r = 0; r < T; ++r) {
        int c = 0;
        t.data(r, c++) = r / ref.rate;
        for (int j = 0; j < nq; ++j) t.data(r, c++) = ref.q(r, j);
        for (int j = 0; j < nq; ++j) t.data(r, c++) = ref.dq(r, j);
        for (int k = 0; k < 2 * n_key; ++k) t.data(r, c++) = ref.key_pos(r, k);
        for (int k = 0; k < n_key; ++k) t.data(r, c++) = ref.key_angle(r, k);
        for (int e = 0; e < n_emg; ++e) t.data(r, c++) = ref.emg(r, e);
        for (int g = 0; g < 2 * n_grf; ++g) t.data(r, c++) = ref.grf(r, g);
    }
    write_csv(path, t);
}

}  // namespace msk
