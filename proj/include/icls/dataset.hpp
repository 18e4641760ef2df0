#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "icls/linalg.hpp"

namespace icls {

// Raised for problems with input data: unreadable files, malformed rows,
// unsuitable labels.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Dataset {
    std::string name;
    Matrix x;
    Vector y;  // 0 / 1
    std::vector<std::string> feature_names;

    Eigen::Index size() const { return x.rows(); }
    Eigen::Index dim() const { return x.cols(); }
    // Fraction of objects in the larger class.
    double majority_fraction() const;

    // Throws DataError unless n >= 2, both classes occur, and values are finite.
    void validate() const;
};

// Reads a headed CSV. `label_column` is a header name, or a 0-based column
// index when no header matches. Labels must take exactly two distinct values;
// `positive_label` maps to 1 (default: the lexicographically larger token).
// Every other column must be numeric; errors name the file row.
Dataset load_dataset_csv(const std::filesystem::path& path, const std::string& label_column,
                         const std::optional<std::string>& positive_label = std::nullopt);

// Drops features whose value never changes.
Dataset drop_constant_features(Dataset data);

// Two balanced, isotropic unit-variance Gaussian classes whose means
// sit at -separation/2 and +separation/2 along the first feature.
Dataset two_gaussians(std::size_t n, std::size_t dim, double separation, std::uint64_t seed);

}  // namespace icls
