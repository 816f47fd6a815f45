#include "dalc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace dalc {

SparseVector SparseVector::from_dense(std::span<const double> dense) {
    SparseVector v;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0.0) {
            v.indices.push_back(static_cast<std::uint32_t>(i));
            v.values.push_back(dense[i]);
        }
    }
    return v;
}

double SparseVector::squared_norm() const {
    double s = 0.0;
    for (double x : values)
        s += x * x;
    return s;
}

std::vector<double> SparseVector::to_dense(std::size_t dim) const {
    std::vector<double> out(std::max(dim, extent()), 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k)
        out[indices[k]] = values[k];
    return out;
}

double dot(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.indices.size() && j < b.indices.size()) {
        if (a.indices[i] < b.indices[j]) {
            ++i;
        } else if (a.indices[i] > b.indices[j]) {
            ++j;
        } else {
            s += a.values[i] * b.values[j];
            ++i;
            ++j;
        }
    }
    return s;
}

double dot(std::span<const double> w, const SparseVector& x) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.indices.size(); ++k) {
        if (x.indices[k] < w.size())
            s += w[x.indices[k]] * x.values[k];
    }
    return s;
}

void axpy(double scale, const SparseVector& x, std::span<double> y) {
    for (std::size_t k = 0; k < x.indices.size(); ++k)
        y[x.indices[k]] += scale * x.values[k];
}

Dataset::Dataset(std::vector<SparseVector> points, std::size_t dim,
                 std::optional<std::vector<int>> labels, Role role)
    : points_(std::move(points)), dim_(dim), labels_(std::move(labels)), role_(role) {
    norms_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const SparseVector& p = points_[i];
        if (p.indices.size() != p.values.size())
            throw std::invalid_argument("Dataset: point " + std::to_string(i) +
                                        " has mismatched index/value arrays");
        for (std::size_t k = 0; k < p.indices.size(); ++k) {
            if (k > 0 && p.indices[k] <= p.indices[k - 1])
                throw std::invalid_argument("Dataset: point " + std::to_string(i) +
                                            " has non-ascending indices");
            if (!std::isfinite(p.values[k]))
                throw std::invalid_argument("Dataset: point " + std::to_string(i) +
                                            " has a non-finite feature");
        }
        if (p.extent() > dim_)
            throw std::invalid_argument("Dataset: point " + std::to_string(i) +
                                        " exceeds dimension " + std::to_string(dim_));
        const double n = std::sqrt(p.squared_norm());
        if (!(n > 0.0))
            throw std::invalid_argument("Dataset: point " + std::to_string(i) +
                                        " has zero norm (margins are normalized by |x|)");
        norms_.push_back(n);
    }
    if (labels_) {
        if (labels_->size() != points_.size())
            throw std::invalid_argument("Dataset: " + std::to_string(labels_->size()) +
                                        " labels for " + std::to_string(points_.size()) +
                                        " points");
        for (std::size_t i = 0; i < labels_->size(); ++i) {
            const int y = (*labels_)[i];
            if (y != 1 && y != -1)
                throw std::invalid_argument("Dataset: label of point " + std::to_string(i) +
                                            " must be +1 or -1, got " + std::to_string(y));
        }
    }
}

Dataset Dataset::from_dense(const std::vector<std::vector<double>>& rows,
                            std::optional<std::vector<int>> labels, Role role) {
    const std::size_t dim = rows.empty() ? 0 : rows.front().size();
    std::vector<SparseVector> points;
    points.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim)
            throw std::invalid_argument("Dataset::from_dense: row " + std::to_string(i) +
                                        " has " + std::to_string(rows[i].size()) +
                                        " columns, expected " + std::to_string(dim));
        points.push_back(SparseVector::from_dense(rows[i]));
    }
    return Dataset(std::move(points), dim, std::move(labels), role);
}

int Dataset::label(std::size_t i) const { return labels().at(i); }

const std::vector<int>& Dataset::labels() const {
    if (!labels_)
        throw std::logic_error("Dataset: sample is unlabeled");
    return *labels_;
}

Dataset Dataset::with_labels(std::vector<int> labels) const {
    return Dataset(points_, dim_, std::move(labels), role_);
}

Dataset Dataset::without_labels() const { return Dataset(points_, dim_, std::nullopt, role_); }

Dataset Dataset::with_role(Role role) const {
    Dataset d = *this;
    d.role_ = role;
    return d;
}

Dataset Dataset::with_dim(std::size_t dim) const {
    return Dataset(points_, std::max(dim, dim_), labels_, role_);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    std::vector<SparseVector> pts;
    pts.reserve(rows.size());
    std::optional<std::vector<int>> lbl;
    if (labels_)
        lbl.emplace();
    for (std::size_t r : rows) {
        pts.push_back(points_.at(r));
        if (labels_)
            lbl->push_back((*labels_)[r]);
    }
    return Dataset(std::move(pts), dim_, std::move(lbl), role_);
}

Dataset concat_features(const Dataset& a, const Dataset& b) {
    std::vector<SparseVector> pts = a.points();
    pts.insert(pts.end(), b.points().begin(), b.points().end());
    return Dataset(std::move(pts), std::max(a.dim(), b.dim()), std::nullopt, a.role());
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

bool parse_int(std::string_view tok, long long& out) {
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return in;
}

}  // namespace

Dataset parse_sparse(std::istream& in, std::optional<std::size_t> dim, Role role) {
    std::vector<SparseVector> points;
    std::vector<int> labels;
    std::optional<bool> labeled;
    std::size_t max_extent = 0;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto tokens = split_ws(line);
        long long label = 0;
        if (!parse_int(tokens[0], label) || (label != 1 && label != -1 && label != 0))
            throw ParseError("label must be +1, -1 or 0, got '" + std::string(tokens[0]) + "'",
                             line_no);
        const bool this_labeled = label != 0;
        if (labeled && *labeled != this_labeled)
            throw ParseError("mixes labeled and unlabeled (label 0) rows", line_no);
        labeled = this_labeled;

        SparseVector v;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const auto tok = tokens[t];
            const auto colon = tok.find(':');
            if (colon == std::string_view::npos)
                throw ParseError("expected index:value, got '" + std::string(tok) + "'", line_no);
            long long idx = 0;
            double val = 0.0;
            if (!parse_int(tok.substr(0, colon), idx) || idx < 1 || idx > 0xFFFFFFFFLL)
                throw ParseError("invalid feature index in '" + std::string(tok) + "'", line_no);
            if (!parse_double(tok.substr(colon + 1), val))
                throw ParseError("invalid feature value in '" + std::string(tok) + "'", line_no);
            const auto zero_based = static_cast<std::uint32_t>(idx - 1);
            if (!v.indices.empty() && zero_based <= v.indices.back())
                throw ParseError(zero_based == v.indices.back()
                                     ? "duplicate feature index " + std::to_string(idx)
                                     : "feature indices must be ascending at index " +
                                           std::to_string(idx),
                                 line_no);
            if (val == 0.0)
                continue;
            v.indices.push_back(zero_based);
            v.values.push_back(val);
        }
        if (v.squared_norm() == 0.0)
            throw ParseError("example has zero norm; margins are normalized by |x|", line_no);
        max_extent = std::max(max_extent, v.extent());
        points.push_back(std::move(v));
        labels.push_back(static_cast<int>(label));
    }
    if (dim && *dim < max_extent)
        throw ParseError("feature index " + std::to_string(max_extent) +
                             " exceeds the declared dimension " + std::to_string(*dim),
                         0);
    const std::size_t d = dim ? *dim : max_extent;
    std::optional<std::vector<int>> lbl;
    if (labeled.value_or(false))
        lbl = std::move(labels);
    return Dataset(std::move(points), d, std::move(lbl), role);
}

Dataset load_sparse(const std::filesystem::path& path, std::optional<std::size_t> dim,
                    Role role) {
    auto in = open_input(path);
    try {
        return parse_sparse(in, dim, role);
    } catch (const ParseError& e) {
        throw e.prefixed(path.string());
    }
}

void write_sparse(std::ostream& out, const Dataset& data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << (data.labeled() ? (data.label(i) > 0 ? "+1" : "-1") : "0");
        const SparseVector& p = data.point(i);
        for (std::size_t k = 0; k < p.nnz(); ++k)
            out << ' ' << (p.indices[k] + 1) << ':' << format_double(p.values[k]);
        out << '\n';
    }
}

void save_sparse(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    write_sparse(out, data);
}

Dataset parse_csv(std::istream& in, const std::optional<std::string>& label_column, Role role) {
    auto split_commas = [](std::string_view s) {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        for (;;) {
            const auto comma = s.find(',', start);
            out.push_back(trim(s.substr(start, comma - start)));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        return out;
    };

    std::string raw;
    std::size_t line_no = 0;
    std::vector<std::string_view> header;
    std::string header_line;
    while (header.empty() && std::getline(in, header_line)) {
        ++line_no;
        if (!trim(header_line).empty())
            header = split_commas(header_line);
    }
    if (header.empty())
        throw ParseError("CSV input has no header row", 0);

    std::optional<std::size_t> label_idx;
    if (label_column) {
        const auto it = std::find(header.begin(), header.end(), *label_column);
        if (it == header.end())
            throw ParseError("label column '" + *label_column + "' not in header", 1);
        label_idx = static_cast<std::size_t>(it - header.begin());
    }
    const std::size_t dim = header.size() - (label_idx ? 1 : 0);

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (std::getline(in, raw)) {
        ++line_no;
        if (trim(raw).empty())
            continue;
        const auto cells = split_commas(raw);
        if (cells.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(cells.size()),
                             line_no);
        std::vector<double> row;
        row.reserve(dim);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v = 0.0;
            if (!parse_double(cells[c], v))
                throw ParseError("non-numeric cell '" + std::string(cells[c]) + "' in column " +
                                     std::to_string(c + 1),
                                 line_no);
            if (label_idx && c == *label_idx) {
                if (v != 1.0 && v != -1.0)
                    throw ParseError("label must be +1 or -1", line_no);
                labels.push_back(static_cast<int>(v));
            } else {
                row.push_back(v);
            }
        }
        if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; }))
            throw ParseError("example has zero norm; margins are normalized by |x|", line_no);
        rows.push_back(std::move(row));
    }
    std::vector<SparseVector> points;
    points.reserve(rows.size());
    for (const auto& r : rows)
        points.push_back(SparseVector::from_dense(r));
    std::optional<std::vector<int>> lbl;
    if (label_idx)
        lbl = std::move(labels);
    return Dataset(std::move(points), dim, std::move(lbl), role);
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column,
                 Role role) {
    auto in = open_input(path);
    try {
        return parse_csv(in, label_column, role);
    } catch (const ParseError& e) {
        throw e.prefixed(path.string());
    }
}

std::vector<int> load_labels(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<int> out;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto s = trim(raw);
        if (s.empty())
            continue;
        long long v = 0;
        if (!parse_int(s, v) || (v != 1 && v != -1))
            throw ParseError(path.string() + ": label must be +1 or -1", line_no);
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void save_labels(const std::filesystem::path& path, std::span<const int> labels) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    for (int y : labels)
        out << (y > 0 ? "+1" : "-1") << '\n';
}

}  // namespace dalc
