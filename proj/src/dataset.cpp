#include "icls/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "icls/random.hpp"

namespace icls {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                current += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += ch;
        }
    }
    fields.push_back(trim(current));
    return fields;
}

std::optional<double> parse_number(const std::string& token)
{
    if (token.empty()) {
        return std::nullopt;
    }
    const char* begin = token.data();
    const char* end = token.data() + token.size();
    if (*begin == '+') {
        ++begin;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

bool blank(const std::string& line)
{
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

double Dataset::majority_fraction() const
{
    const double positives = y.sum();
    const auto n = static_cast<double>(y.size());
    return std::max(positives, n - positives) / n;
}

void Dataset::validate() const
{
    if (x.rows() < 2) {
        throw DataError(name + ": need at least 2 objects, found " + std::to_string(x.rows()));
    }
    if (x.rows() != y.size()) {
        throw DataError(name + ": feature and label counts differ");
    }
    if (!x.allFinite()) {
        throw DataError(name + ": non-finite feature values");
    }
    const double positives = y.sum();
    if (positives < 1.0 || positives > static_cast<double>(y.size()) - 1.0) {
        throw DataError(name + ": both classes must be present");
    }
}

Dataset load_dataset_csv(const std::filesystem::path& path, const std::string& label_column,
                         const std::optional<std::string>& positive_label)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset file " + path.string());
    }
    const std::string where = path.string();

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!blank(line)) {
            header = split_record(line);
            break;
        }
    }
    if (header.empty()) {
        throw DataError(where + ": missing header row");
    }

    std::size_t label_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == label_column) {
            label_idx = j;
            break;
        }
    }
    if (label_idx == header.size()) {
        std::size_t idx = 0;
        const auto [ptr, ec] =
            std::from_chars(label_column.data(), label_column.data() + label_column.size(), idx);
        if (ec != std::errc{} || ptr != label_column.data() + label_column.size() || idx >= header.size()) {
            throw DataError(where + ": unknown label column '" + label_column + "'");
        }
        label_idx = idx;
    }

    Dataset data;
    data.name = path.stem().string();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != label_idx) {
            data.feature_names.push_back(header[j]);
        }
    }
    const std::size_t d = data.feature_names.size();

    std::vector<double> values;
    std::vector<std::string> labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        const std::vector<std::string> fields = split_record(line);
        if (fields.size() != header.size()) {
            throw DataError(where + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (j == label_idx) {
                labels.push_back(fields[j]);
                continue;
            }
            const auto v = parse_number(fields[j]);
            if (!v) {
                throw DataError(where + ":" + std::to_string(line_no) + ": non-numeric value '" +
                                fields[j] + "' in column '" + header[j] + "'");
            }
            values.push_back(*v);
        }
    }

    std::vector<std::string> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() > 2) {
        std::ostringstream msg;
        msg << where << ": non-binary labels in column '" << header[label_idx] << "' (";
        for (std::size_t k = 0; k < classes.size(); ++k) {
            msg << (k ? ", " : "") << classes[k];
            if (k == 4 && classes.size() > 5) {
                msg << ", ...";
                break;
            }
        }
        msg << ")";
        throw DataError(msg.str());
    }
    if (classes.size() < 2) {
        throw DataError(where + ": label column '" + header[label_idx] + "' has fewer than two classes");
    }
    const std::string positive = positive_label.value_or(classes.back());
    if (positive != classes[0] && positive != classes[1]) {
        throw DataError(where + ": positive label '" + positive + "' does not occur in column '" +
                        header[label_idx] + "'");
    }

    const auto n = static_cast<Eigen::Index>(labels.size());
    data.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), n, static_cast<Eigen::Index>(d));
    data.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        data.y(i) = labels[static_cast<std::size_t>(i)] == positive ? 1.0 : 0.0;
    }
    data.validate();
    return data;
}

Dataset drop_constant_features(Dataset data)
{
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
        const auto col = data.x.col(j);
        if (col.maxCoeff() != col.minCoeff()) {
            keep.push_back(j);
        }
    }
    if (static_cast<Eigen::Index>(keep.size()) == data.x.cols()) {
        return data;
    }
    Matrix x(data.x.rows(), static_cast<Eigen::Index>(keep.size()));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        x.col(static_cast<Eigen::Index>(k)) = data.x.col(keep[k]);
        if (!data.feature_names.empty()) {
            names.push_back(data.feature_names[static_cast<std::size_t>(keep[k])]);
        }
    }
    data.x = std::move(x);
    data.feature_names = std::move(names);
    return data;
}

Dataset two_gaussians(std::size_t n, std::size_t dim, double separation, std::uint64_t seed)
{
    require(n >= 2 && dim >= 1, "two_gaussians: need n >= 2 and dim >= 1");
    Rng rng(seed);
    Dataset data;
    data.name = "two-gaussians";
    data.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    data.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < dim; ++j) {
        data.feature_names.push_back("x" + std::to_string(j + 1));
    }
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        // Alternate classes so both are always present.
        const bool positive = (i % 2) == 1;
        data.y(i) = positive ? 1.0 : 0.0;
        for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
            data.x(i, j) = rng.normal();
        }
        data.x(i, 0) += (positive ? 0.5 : -0.5) * separation;
    }
    data.validate();
    return data;
}

}  // namespace icls
