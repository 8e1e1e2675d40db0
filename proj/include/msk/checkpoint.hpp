#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace msk {

/// Named-tensor checkpoint: a text manifest (name, shape, dtype, byte
/// offset, format version) plus one little-endian float64 payload file.
class CheckpointWriter {
public:
    void add(const std::string& name, const Eigen::MatrixXd& tensor);
    void add(const std::string& name, const Eigen::VectorXd& tensor);
    void add_scalar(const std::string& name, double v);

    /// Writes <prefix>.manifest and <prefix>.bin.
    void write(const std::string& prefix) const;

private:
    struct Entry {
        std::string name;
        Eigen::MatrixXd data;
    };
    std::vector<Entry> entries_;
};

class CheckpointReader {
public:
    explicit CheckpointReader(const std::string& prefix);

    bool has(const std::string& name) const;
    /// Validates the stored shape against (rows, cols); throws ConfigError
    /// on mismatch. Pass -1 to skip a dimension check.
    Eigen::MatrixXd get(const std::string& name, Eigen::Index rows = -1,
                        Eigen::Index cols = -1) const;
    Eigen::VectorXd get_vector(const std::string& name, Eigen::Index size = -1) const;
    double get_scalar(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    struct Entry {
        Eigen::Index rows, cols;
        std::uint64_t offset;
    };
    std::map<std::string, Entry> entries_;
    std::string bin_path_;
};

}  // namespace msk
