#include "msk/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "msk/errors.hpp"

namespace msk {

namespace {
// Payload is little-endian column-major float64.
constexpr const char* kMagic = "msk-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void CheckpointWriter::add(const std::string& name, const Eigen::MatrixXd& tensor) {
    entries_.push_back({name, tensor});
}

void CheckpointWriter::add(const std::string& name, const Eigen::VectorXd& tensor) {
    entries_.push_back({name, tensor});
}

void CheckpointWriter::add_scalar(const std::string& name, double v) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = v;
    entries_.push_back({name, m});
}

void CheckpointWriter::write(const std::string& prefix) const {
    std::ofstream manifest(prefix + ".manifest", std::ios::trunc);
    std::ofstream bin(prefix + ".bin", std::ios::trunc | std::ios::binary);
    if (!manifest || !bin)
        throw ConfigError("checkpoint: cannot write '" + prefix + "'");

    manifest << kMagic << " " << kVersion << "\n";
    std::uint64_t offset = 0;
    for (const auto& e : entries_) {
        manifest << "tensor " << e.name << " " << e.data.rows() << " " << e.data.cols()
                 << " f64 " << offset << "\n";
        bin.write(reinterpret_cast<const char*>(e.data.data()),
                  static_cast<std::streamsize>(sizeof(double) * e.data.size()));
        offset += sizeof(double) * static_cast<std::uint64_t>(e.data.size());
    }
    manifest << "end\n";
}

CheckpointReader::CheckpointReader(const std::string& prefix)
    : bin_path_(prefix + ".bin") {
    std::ifstream manifest(prefix + ".manifest");
    if (!manifest)
        throw ConfigError("checkpoint: cannot open '" + prefix + ".manifest'");
    std::string magic;
    int version = 0;
    manifest >> magic >> version;
    if (magic != kMagic || version != kVersion)
        throw ConfigError("checkpoint: bad manifest header in '" + prefix + "'");
    std::string tok;
    while (manifest >> tok) {
        if (tok == "end") break;
        if (tok != "tensor")
            throw ConfigError("checkpoint: unexpected token '" + tok + "'");
        std::string name, dtype;
        Entry e;
        manifest >> name >> e.rows >> e.cols >> dtype >> e.offset;
        if (dtype != "f64")
            throw ConfigError("checkpoint: unsupported dtype '" + dtype + "'");
        entries_[name] = e;
    }
}

bool CheckpointReader::has(const std::string& name) const {
    return entries_.count(name) > 0;
}

Eigen::MatrixXd CheckpointReader::get(const std::string& name, Eigen::Index rows,
                                      Eigen::Index cols) const {
    auto it = entries_.find(name);
    if (it == entries_.end())
        throw ConfigError("checkpoint: missing tensor '" + name + "'");
    const Entry& e = it->second;
    if ((rows >= 0 && e.rows != rows) || (cols >= 0 && e.cols != cols))
        throw ConfigError("checkpoint: tensor '" + name + "' has shape (" +
                          std::to_string(e.rows) + "," + std::to_string(e.cols) +
                          "), expected (" + std::to_string(rows) + "," +
                          std::to_string(cols) + ")");
    std::ifstream bin(bin_path_, std::ios::binary);
    if (!bin) throw ConfigError("checkpoint: cannot open '" + bin_path_ + "'");
    bin.seekg(static_cast<std::streamoff>(e.offset));
    Eigen::MatrixXd out(e.rows, e.cols);
    bin.read(reinterpret_cast<char*>(out.data()),
             static_cast<std::streamsize>(sizeof(double) * out.size()));
    if (!bin) throw ConfigError("checkpoint: truncated payload for '" + name + "'");
    return out;
}

Eigen::VectorXd CheckpointReader::get_vector(const std::string& name,
                                             Eigen::Index size) const {
    Eigen::MatrixXd m = get(name, size, 1);
    return m.col(0);
}

double CheckpointReader::get_scalar(const std::string& name) const {
    return get(name, 1, 1)(0, 0);
}

std::vector<std::string> CheckpointReader::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

}  // namespace msk
