#ifndef MCW_EMBEDDING_HPP
#define MCW_EMBEDDING_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "mcw/errors.hpp"
#include "mcw/io.hpp"

namespace mcw {

using Vector = std::vector<double>;

/// Training settings an embedding file is expected to come from (skip-gram). Carried as
/// provenance; this library never trains vectors.
struct EmbeddingProvenance {
  std::string model = "word2vec skip-gram";
  double learning_rate = 0.0001;
  int window = 5;
  int dimension = 200;
  int min_count = 1;
  std::string corpus = "Chinese Wikipedia dump";
};

/// Token -> dense vector, all of one dimension.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw Error("embedding dimension must be positive");
  }

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// Inserts or overwrites; returns true when an existing token was replaced.
  bool insert(const std::string& token, std::span<const double> values) {
    if (values.size() != dimension_) throw Error("vector for '" + token + "' has wrong dimension");
    auto [it, fresh] = rows_.emplace(token, tokens_.size());
    if (fresh) {
      tokens_.push_back(token);
      data_.insert(data_.end(), values.begin(), values.end());
    } else {
      std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dimension_));
    }
    return !fresh;
  }

  bool contains(std::string_view token) const { return rows_.count(std::string(token)) != 0; }

  std::optional<std::span<const double>> find(std::string_view token) const {
    auto it = rows_.find(std::string(token));
    if (it == rows_.end()) return std::nullopt;
    return std::span<const double>(data_.data() + it->second * dimension_, dimension_);
  }

  EmbeddingProvenance provenance;
  std::vector<std::string> warnings;

 private:
  std::size_t dimension_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> rows_;
  std::vector<double> data_;
};

/// word2vec text format: "count dim" header, then "token v1 ... vdim" per line.
/// Duplicate tokens: last wins, with a warning. The binary format is not supported.
inline EmbeddingTable parse_embeddings(std::string_view content, std::string_view name = "embeddings") {
  if (utf8::first_invalid(content)) throw ConfigError(std::string(name) + ": not UTF-8 text (binary word2vec files are unsupported)");
  std::optional<EmbeddingTable> table;
  std::size_t expected = 0, rows = 0;
  Vector values;
  io::for_each_line(content, [&](const io::Line& line) {
    auto text = io::trim(line.text);
    auto fail = [&](const std::string& msg) { throw ParseError(std::string(name) + ": " + msg, line.number, line.offset); };
    std::vector<std::string_view> fields;
    for (auto f : io::split(text, ' '))
      if (!f.empty()) fields.push_back(f);
    if (!table) {
      std::size_t dim = 0;
      if (fields.size() != 2) fail("header must be 'count dim'");
      auto parse_size = [&](std::string_view f, std::size_t& v) {
        auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc{} || p != f.data() + f.size()) fail("bad header number '" + std::string(f) + "'");
      };
      parse_size(fields[0], expected);
      parse_size(fields[1], dim);
      if (dim == 0) fail("dimension must be positive");
      table.emplace(dim);
      return;
    }
    if (fields.empty()) return;
    if (fields.size() != table->dimension() + 1)
      fail("expected " + std::to_string(table->dimension()) + " components, got " + std::to_string(fields.size() - 1));
    values.assign(table->dimension(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto f = fields[i + 1];
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), values[i]);
      if (ec != std::errc{} || p != f.data() + f.size() || !std::isfinite(values[i])) fail("non-numeric component '" + std::string(f) + "'");
    }
    std::string token(fields[0]);
    if (table->insert(token, values)) table->warnings.push_back("duplicate token '" + token + "' (line " + std::to_string(line.number) + "), last wins");
    ++rows;
  });
  if (!table) throw ParseError(std::string(name) + ": missing header", 1, 0);
  if (rows != expected)
    throw ParseError(std::string(name) + ": header declares " + std::to_string(expected) + " rows, found " + std::to_string(rows), 1, 0);
  return std::move(*table);
}

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(io::read_file(path), path.string());
}

struct CosineResult {
  double value = 0.0;
  bool zero_norm = false;  // value is 0 by definition
};

inline CosineResult cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  return {std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0), false};
}

enum class ComposeMode { sum, mean };

inline Vector compose(const std::vector<std::span<const double>>& vectors, ComposeMode mode) {
  if (vectors.empty()) throw Error("compose: empty vector list");
  Vector out(vectors.front().size(), 0.0);
  for (const auto& v : vectors) {
    if (v.size() != out.size()) throw Error("compose: dimension mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  if (mode == ComposeMode::mean)
    for (auto& x : out) x /= static_cast<double>(vectors.size());
  return out;
}

inline Vector compose(const std::vector<Vector>& vectors, ComposeMode mode) {
  std::vector<std::span<const double>> spans(vectors.begin(), vectors.end());
  return compose(spans, mode);
}

using Point2 = std::array<double, 2>;

/// Tokens projected onto the top two principal axes of a fitted token set.
struct Projection2D {
  std::map<std::string, Point2> points;
  std::array<Vector, 2> axes;       // orthonormal, descending eigenvalue
  std::array<double, 2> eigenvalues{};
  Vector mean;
  bool zero_variance = false;
  std::vector<std::string> warnings;

  std::optional<Point2> find(std::string_view token) const {
    auto it = points.find(std::string(token));
    if (it == points.end()) return std::nullopt;
    return it->second;
  }

  /// A projection given directly as 2D points (no fitted basis).
  static Projection2D from_points(std::map<std::string, Point2> pts) {
    Projection2D p;
    p.points = std::move(pts);
    return p;
  }

  Point2 project(std::span<const double> v) const {
    if (mean.empty()) throw Error("projection has no fitted basis");
    if (v.size() != mean.size()) throw Error("project: dimension mismatch");
    Point2 out{0, 0};
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t i = 0; i < v.size(); ++i) out[k] += (v[i] - mean[i]) * axes[k][i];
    return out;
  }
};

/// Fits PCA over the distinct in-vocabulary `tokens` (sample covariance, sorted token order)
/// and projects them to 2D. Each axis is signed so its largest-magnitude component is positive.
inline Projection2D pca_fit_project(const EmbeddingTable& table, const std::vector<std::string>& tokens) {
  std::vector<std::string> present;
  for (const auto& t : tokens)
    if (table.contains(t)) present.push_back(t);
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  if (present.size() < 3) throw DegenerateInputError("PCA needs at least 3 in-vocabulary tokens, got " + std::to_string(present.size()));
  const std::size_t d = table.dimension();
  if (d < 2) throw DegenerateInputError("PCA to 2D needs dimension >= 2");
  const auto n = static_cast<Eigen::Index>(present.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < n; ++r) {
    auto v = *table.find(present[static_cast<std::size_t>(r)]);
    for (std::size_t c = 0; c < d; ++c) x(r, static_cast<Eigen::Index>(c)) = v[c];
  }

  Projection2D p;
  Eigen::VectorXd mean = x.colwise().mean();
  p.mean.assign(mean.data(), mean.data() + d);

  bool all_equal = true;
  for (Eigen::Index r = 1; r < n && all_equal; ++r) all_equal = (x.row(r) == x.row(0));
  if (all_equal) {
    p.zero_variance = true;
    p.warnings.push_back("all tokens share one vector; every projection is [0,0]");
    for (std::size_t k = 0; k < 2; ++k) {
      p.axes[k].assign(d, 0.0);
      p.axes[k][k] = 1.0;
    }
    for (const auto& t : present) p.points[t] = {0.0, 0.0};
    return p;
  }

  Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("PCA eigensolver failed");
  const auto dd = static_cast<Eigen::Index>(d);
  for (std::size_t k = 0; k < 2; ++k) {
    Eigen::VectorXd axis = solver.eigenvectors().col(dd - 1 - static_cast<Eigen::Index>(k));
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    p.axes[k].assign(axis.data(), axis.data() + d);
    p.eigenvalues[k] = solver.eigenvalues()(dd - 1 - static_cast<Eigen::Index>(k));
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    Point2 pt{0, 0};
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t c = 0; c < d; ++c) pt[k] += centered(r, static_cast<Eigen::Index>(c)) * p.axes[k][c];
    p.points[present[static_cast<std::size_t>(r)]] = pt;
  }
  return p;
}

}  // namespace mcw

#endif  // MCW_EMBEDDING_HPP
