#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dalc {

/// Feature vector stored as strictly ascending 0-based indices and their
/// values. Dense inputs are converted with from_dense (zeros dropped).
struct SparseVector {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;

    static SparseVector from_dense(std::span<const double> dense);

    std::size_t nnz() const { return indices.size(); }
    double squared_norm() const;
    /// One past the largest stored index (0 when empty).
    std::size_t extent() const { return indices.empty() ? 0 : indices.back() + 1; }
    std::vector<double> to_dense(std::size_t dim) const;
};

double dot(const SparseVector& a, const SparseVector& b);
/// Entries of x beyond w.size() are treated as multiplying zero weights.
double dot(std::span<const double> w, const SparseVector& x);
/// y += scale * x, x's indices must lie inside y.
void axpy(double scale, const SparseVector& x, std::span<double> y);

enum class Role { Source, Target };

/// Error raised by the text loaders. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const { return line_; }

    /// Same error with a context prefix (usually the file name) on the message.
    ParseError prefixed(const std::string& prefix) const {
        ParseError e(*this);
        static_cast<std::runtime_error&>(e) = std::runtime_error(prefix + ": " + what());
        return e;
    }

  private:
    std::size_t line_;
};

/// A sample of feature vectors, optionally labeled with +1/-1.
///
/// Invariants, checked on construction:
///   - every point fits in dim()
///   - no point has zero norm (the normalized margin divides by |x|)
///   - labels, when present, are exactly +1 or -1, one per point
class Dataset {
  public:
    Dataset() = default;
    Dataset(std::vector<SparseVector> points, std::size_t dim,
            std::optional<std::vector<int>> labels, Role role);

    static Dataset from_dense(const std::vector<std::vector<double>>& rows,
                              std::optional<std::vector<int>> labels, Role role);

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    std::size_t dim() const { return dim_; }
    Role role() const { return role_; }
    bool labeled() const { return labels_.has_value(); }

    const SparseVector& point(std::size_t i) const { return points_[i]; }
    const std::vector<SparseVector>& points() const { return points_; }
    double norm(std::size_t i) const { return norms_[i]; }
    double squared_norm(std::size_t i) const { return norms_[i] * norms_[i]; }
    int label(std::size_t i) const;
    const std::vector<int>& labels() const;

    Dataset with_labels(std::vector<int> labels) const;
    Dataset without_labels() const;
    Dataset with_role(Role role) const;
    Dataset with_dim(std::size_t dim) const;
    Dataset subset(std::span<const std::size_t> rows) const;
    std::vector<double> dense_row(std::size_t i) const { return points_[i].to_dense(dim_); }

  private:
    std::vector<SparseVector> points_;
    std::vector<double> norms_;
    std::size_t dim_ = 0;
    std::optional<std::vector<int>> labels_;
    Role role_ = Role::Source;
};

/// Concatenates a and b (a first), keeping the larger dimension. The result
/// is unlabeled and carries a's role.
Dataset concat_features(const Dataset& a, const Dataset& b);

// Sparse text format, one example per line:
//
//   <label> <index>:<value> <index>:<value> ...   [# comment]
//
// label is +1, 1, -1 or 0 (0 = unlabeled); indices are 1-based and strictly
// ascending. Either every line is labeled or none is. Blank lines and lines
// starting with '#' are skipped. The dimension is the largest index seen,
// unless an explicit dimension is given.
Dataset parse_sparse(std::istream& in, std::optional<std::size_t> dim = std::nullopt,
                     Role role = Role::Source);
Dataset load_sparse(const std::filesystem::path& path,
                    std::optional<std::size_t> dim = std::nullopt, Role role = Role::Source);
/// Values written with 17 significant digits; unlabeled rows get label 0.
void write_sparse(std::ostream& out, const Dataset& data);
void save_sparse(const std::filesystem::path& path, const Dataset& data);

/// Rectangular numeric CSV with a header row. When label_column names a
/// header field, that column holds the +1/-1 labels and the rest are features.
Dataset parse_csv(std::istream& in, const std::optional<std::string>& label_column,
                  Role role = Role::Source);
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column, Role role = Role::Source);

/// Reads one integer label per line (blank lines skipped).
std::vector<int> load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, std::span<const int> labels);

}  // namespace dalc
