#include "heterotomo/gram.hpp"

#include <json.hpp>

#include "heterotomo/errors.hpp"
#include "heterotomo/io.hpp"

namespace heterotomo {

BlockLayout layout_of(const Dataset& data) { return {data.block_offsets()}; }

BlockedGramMatrix::BlockedGramMatrix(BlockLayout layout, Eigen::MatrixXd entries)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
  if (entries_.rows() != layout_.side() || entries_.cols() != layout_.side()) {
    throw ParameterError("BlockedGramMatrix: matrix does not match the block layout");
  }
}

BlockDiagonal::BlockDiagonal(const BlockLayout& layout) : layout_(layout) {
  blocks_.reserve(static_cast<std::size_t>(layout.blocks()));
  for (int i = 0; i < layout.blocks(); ++i) blocks_.push_back(Eigen::MatrixXd::Zero(layout.size(i), layout.size(i)));
}

double BlockDiagonal::dot(const BlockDiagonal& other) const {
  double s = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) s += blocks_[i].cwiseProduct(other.blocks_[i]).sum();
  return s;
}

double BlockDiagonal::trace() const {
  double s = 0.0;
  for (const auto& b : blocks_) s += b.trace();
  return s;
}

double BlockDiagonal::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks_)
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

void BlockDiagonal::axpy(double scale, const BlockDiagonal& other) {
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += scale * other.blocks_[i];
}

void BlockDiagonal::scale(double factor) {
  for (auto& b : blocks_) b *= factor;
}

Eigen::MatrixXd BlockDiagonal::dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(layout_.side(), layout_.side());
  for (int i = 0; i < blocks(); ++i) out.block(layout_.offset(i), layout_.offset(i), layout_.size(i), layout_.size(i)) = block(i);
  return out;
}

namespace {

template <class Entry>
Eigen::MatrixXd symmetric_fill(int side, Entry&& entry) {
  Eigen::MatrixXd m(side, side);
#pragma omp parallel for schedule(dynamic, 8)
  for (int a = 0; a < side; ++a) {
    for (int b = a; b < side; ++b) m(a, b) = entry(a, b);
  }
  for (int a = 0; a < side; ++a)
    for (int b = a + 1; b < side; ++b) m(b, a) = m(a, b);
  return m;
}

}  // namespace

BlockedGramMatrix assemble_gram(const Dataset& data, const GaussianKernel& kernel) {
  const int side = data.side();
  std::vector<ProjectionIndex> idx;
  idx.reserve(static_cast<std::size_t>(side));
  for (int a = 0; a < side; ++a) idx.push_back(data.index(a));
  Eigen::MatrixXd m = symmetric_fill(side, [&](int a, int b) {
    return induced_kernel(kernel, idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  });
  return {layout_of(data), std::move(m)};
}

Eigen::VectorXd scaling_vector(const Dataset& data) {
  Eigen::VectorXd d(data.side());
  for (int a = 0; a < data.side(); ++a) {
    const int tilt = data.tilt_of(a);
    const int i = data.unflatten(a).i;
    d[a] = 1.0 / std::sqrt(static_cast<double>(data.tilt_count(i)) * data.location_count(tilt));
  }
  return d;
}

Eigen::VectorXd observation_vector(const Dataset& data) {
  return Eigen::Map<const Eigen::VectorXd>(data.values().data(), data.side());
}

BlockDiagonal block_outer_observations(const Eigen::VectorXd& w, const Dataset& data) {
  if (w.size() != data.side()) throw ParameterError("block_outer_observations: w has the wrong length");
  BlockDiagonal out(layout_of(data));
  for (int i = 0; i < data.n(); ++i) {
    const auto wi = w.segment(data.block_offset(i), data.block_size(i));
    out.block(i) = wi * wi.transpose();
  }
  return out;
}

Eigen::MatrixXd frame_matrix(const GaussianKernel& kernel, const Dataset& data,
                             const std::vector<Point2>& grid) {
  const int side = data.side();
  const int rows = static_cast<int>(grid.size());
  Eigen::MatrixXd f(rows, side);
#pragma omp parallel for schedule(static)
  for (int a = 0; a < side; ++a) {
    const ProjectionIndex p = data.index(a);
    for (int t = 0; t < rows; ++t) f(t, a) = feature_eval(kernel, p, grid[static_cast<std::size_t>(t)]);
  }
  return f;
}

BlockedGramMatrix assemble_invariant_gram(const Dataset& data, const GaussianKernel& kernel,
                                          int angular_nodes) {
  if (angular_nodes < 4) throw ParameterError("assemble_invariant_gram: need at least 4 angular nodes");
  Eigen::MatrixXd m = symmetric_fill(data.side(), [&](int a, int b) {
    return averaged_pair_inner(kernel, data.location(a), data.location(b), angular_nodes);
  });
  return {layout_of(data), std::move(m)};
}

void write_gram(const std::filesystem::path& dir, const BlockedGramMatrix& gram, double gamma,
                const std::string& dataset_digest) {
  std::filesystem::create_directories(dir);
  // Eigen is column-major; the matrix is symmetric, so the byte stream is
  // also its row-major form.
  write_doubles(dir / "gram.bin", gram.matrix().data(), static_cast<std::size_t>(gram.matrix().size()));
  nlohmann::ordered_json meta;
  meta["side"] = gram.side();
  std::vector<int> sizes;
  for (int i = 0; i < gram.layout().blocks(); ++i) sizes.push_back(gram.layout().size(i));
  meta["block_sizes"] = sizes;
  meta["kernel_gamma"] = gamma;
  meta["dataset_digest"] = dataset_digest;
  write_text(dir / "gram.json", meta.dump(2) + "\n");
}

bool read_gram(const std::filesystem::path& dir, double gamma, const std::string& dataset_digest,
               BlockedGramMatrix& out) {
  if (!std::filesystem::exists(dir / "gram.json") || !std::filesystem::exists(dir / "gram.bin")) return false;
  const auto meta = nlohmann::json::parse(read_text(dir / "gram.json"));
  if (meta.value("kernel_gamma", -1.0) != gamma) return false;
  if (meta.value("dataset_digest", std::string()) != dataset_digest) return false;
  const int side = meta.at("side").get<int>();
  BlockLayout layout{{0}};
  for (int s : meta.at("block_sizes").get<std::vector<int>>()) layout.offsets.push_back(layout.offsets.back() + s);
  if (layout.side() != side) return false;
  std::vector<double> raw = read_doubles(dir / "gram.bin");
  if (raw.size() != static_cast<std::size_t>(side) * static_cast<std::size_t>(side)) return false;
  out = BlockedGramMatrix(std::move(layout), Eigen::Map<Eigen::MatrixXd>(raw.data(), side, side));
  return true;
}

}  // namespace heterotomo
