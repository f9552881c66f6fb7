#include "projmod/algebra.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace projmod {

int fft_friendly_size(int m) {
  for (int g = std::max(m, 2);; ++g) {
    int r = g;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return g;
  }
}

namespace {

constexpr std::uint64_t kBias = 1u << 15;
constexpr int kFieldBits = 16;
constexpr std::uint64_t kFieldMask = (1u << kFieldBits) - 1;
constexpr double kPruneRel = 1e-15;

std::uint64_t zero_key(int dim) {
  std::uint64_t key = 0;
  for (int j = 0; j < dim; ++j) key |= kBias << (kFieldBits * j);
  return key;
}

int key_component(std::uint64_t key, int j) {
  return static_cast<int>((key >> (kFieldBits * j)) & kFieldMask) -
         static_cast<int>(kBias);
}

int key_degree(std::uint64_t key, int dim) {
  int deg = 0;
  for (int j = 0; j < dim; ++j)
    deg = std::max(deg, std::abs(key_component(key, j)));
  return deg;
}

// one transformer per thread: kissfft keeps its plans per size inside
Eigen::FFT<double>& fft_instance() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

void fft_all_axes(std::vector<Complex>& data, int grid, int dim,
                  bool forward) {
  Eigen::FFT<double>& fft = fft_instance();
  std::vector<Complex> in(grid), out(grid);
  std::int64_t total = 1;
  for (int j = 0; j < dim; ++j) total *= grid;
  for (int axis = 0; axis < dim; ++axis) {
    std::int64_t stride = 1;
    for (int j = axis + 1; j < dim; ++j) stride *= grid;
    const std::int64_t block = stride * grid;
    for (std::int64_t base = 0; base < total; base += block) {
      for (std::int64_t off = 0; off < stride; ++off) {
        for (int i = 0; i < grid; ++i) in[i] = data[base + off + i * stride];
        if (forward)
          fft.fwd(out, in);
        else
          fft.inv(out, in);
        for (int i = 0; i < grid; ++i) data[base + off + i * stride] = out[i];
      }
    }
  }
}

}  // namespace

AlgebraElement raw_from_parts(
    BackendPtr backend, std::vector<std::pair<std::uint64_t, Complex>> coeffs) {
  AlgebraElement a;
  a.backend_ = std::move(backend);
  a.coeffs_ = std::move(coeffs);
  a.canonicalize();
  return a;
}

void AlgebraElement::canonicalize() {
  std::sort(coeffs_.begin(), coeffs_.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  // merge duplicate keys
  std::size_t w = 0;
  for (std::size_t r = 0; r < coeffs_.size(); ++r) {
    if (w > 0 && coeffs_[w - 1].first == coeffs_[r].first)
      coeffs_[w - 1].second += coeffs_[r].second;
    else
      coeffs_[w++] = coeffs_[r];
  }
  coeffs_.resize(w);

  double maxmod = 0.0;
  for (const auto& [k, c] : coeffs_) maxmod = std::max(maxmod, std::abs(c));
  const double cut = kPruneRel * maxmod;
  std::erase_if(coeffs_, [cut](const auto& kc) {
    return std::abs(kc.second) <= cut || kc.second == Complex(0.0, 0.0);
  });

  degree_ = 0;
  const int dim = backend_->dim;
  for (const auto& [k, c] : coeffs_)
    degree_ = std::max(degree_, key_degree(k, dim));
}

std::uint64_t AlgebraElement::pack_index(std::span<const int> k) {
  std::uint64_t key = 0;
  for (std::size_t j = 0; j < k.size(); ++j)
    key |= (static_cast<std::uint64_t>(k[j] + static_cast<int>(kBias)) &
            kFieldMask)
           << (kFieldBits * j);
  return key;
}

void AlgebraElement::unpack_index(std::uint64_t key, int dim, int* out) {
  for (int j = 0; j < dim; ++j) out[j] = key_component(key, j);
}

bool AlgebraElement::is_torus_kind() const {
  return backend_ && backend_->kind != BackendKind::Matrix;
}

AlgebraElement AlgebraElement::zero(BackendPtr backend) {
  AlgebraElement a;
  if (backend->kind == BackendKind::Matrix)
    a.mat_ = Eigen::MatrixXcd::Zero(backend->dim, backend->dim);
  a.backend_ = std::move(backend);
  return a;
}

AlgebraElement AlgebraElement::unit(BackendPtr backend) {
  AlgebraElement a;
  if (backend->kind == BackendKind::Matrix) {
    a.mat_ = Eigen::MatrixXcd::Identity(backend->dim, backend->dim);
  } else {
    a.coeffs_.emplace_back(zero_key(backend->dim), Complex(1.0, 0.0));
  }
  a.backend_ = std::move(backend);
  return a;
}

AlgebraElement AlgebraElement::scalar(BackendPtr backend, Complex c) {
  return c * unit(std::move(backend));
}

AlgebraElement AlgebraElement::monomial(BackendPtr backend,
                                        std::span<const int> k, Complex c) {
  if (backend->kind == BackendKind::Matrix)
    throw Error("monomial: not a torus backend");
  if (static_cast<int>(k.size()) != backend->dim)
    throw BadDimension("monomial: index size != backend dim");
  for (int kj : k)
    if (std::abs(kj) > backend->max_degree)
      throw DegreeOverflow("monomial beyond max_degree");
  AlgebraElement a;
  a.backend_ = std::move(backend);
  a.coeffs_.emplace_back(pack_index(k), c);
  a.canonicalize();
  return a;
}

AlgebraElement AlgebraElement::from_coeffs(
    BackendPtr backend,
    const std::vector<std::pair<std::vector<int>, Complex>>& coeffs) {
  if (backend->kind == BackendKind::Matrix)
    throw Error("from_coeffs: not a torus backend");
  AlgebraElement a;
  for (const auto& [k, c] : coeffs) {
    if (static_cast<int>(k.size()) != backend->dim)
      throw BadDimension("from_coeffs: index size != backend dim");
    for (int kj : k)
      if (std::abs(kj) > backend->max_degree)
        throw DegreeOverflow("from_coeffs: index beyond max_degree");
    a.coeffs_.emplace_back(pack_index(k), c);
  }
  a.backend_ = std::move(backend);
  a.canonicalize();
  return a;
}

AlgebraElement AlgebraElement::from_matrix(BackendPtr backend,
                                           Eigen::MatrixXcd m) {
  if (backend->kind != BackendKind::Matrix)
    throw Error("from_matrix: not a matrix backend");
  if (m.rows() != backend->dim || m.cols() != backend->dim)
    throw BadDimension("from_matrix: wrong shape");
  AlgebraElement a;
  a.backend_ = std::move(backend);
  a.mat_ = std::move(m);
  return a;
}

Complex AlgebraElement::coeff(std::span<const int> k) const {
  const std::uint64_t key = pack_index(k);
  auto it = std::lower_bound(
      coeffs_.begin(), coeffs_.end(), key,
      [](const auto& kc, std::uint64_t key_) { return kc.first < key_; });
  if (it != coeffs_.end() && it->first == key) return it->second;
  return Complex(0.0, 0.0);
}

std::vector<std::pair<std::vector<int>, Complex>> AlgebraElement::coeff_items()
    const {
  std::vector<std::pair<std::vector<int>, Complex>> items;
  items.reserve(coeffs_.size());
  const int dim = backend_->dim;
  std::array<int, 4> buf{};
  for (const auto& [k, c] : coeffs_) {
    unpack_index(k, dim, buf.data());
    items.emplace_back(std::vector<int>(buf.begin(), buf.begin() + dim), c);
  }
  return items;
}

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_backend(a.backend_, b.backend_);
  if (a.backend_->kind == BackendKind::Matrix)
    return AlgebraElement::from_matrix(a.backend_, a.mat_ + b.mat_);
  auto coeffs = a.coeffs_;
  coeffs.insert(coeffs.end(), b.coeffs_.begin(), b.coeffs_.end());
  return raw_from_parts(a.backend_, std::move(coeffs));
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  return a + (-b);
}

AlgebraElement operator-(const AlgebraElement& a) {
  return Complex(-1.0, 0.0) * a;
}

AlgebraElement operator*(Complex c, const AlgebraElement& a) {
  if (a.backend_->kind == BackendKind::Matrix)
    return AlgebraElement::from_matrix(a.backend_, c * a.mat_);
  auto coeffs = a.coeffs_;
  for (auto& kc : coeffs) kc.second *= c;
  return raw_from_parts(a.backend_, std::move(coeffs));
}

AlgebraElement operator*(const AlgebraElement& a, Complex c) { return c * a; }

namespace detail {

AlgebraElement mul_unchecked(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_backend(a.backend(), b.backend());
  const auto& cfg = *a.backend();
  if (cfg.kind == BackendKind::Matrix)
    return AlgebraElement::from_matrix(a.backend(), a.matrix() * b.matrix());

  const std::int64_t pairs =
      static_cast<std::int64_t>(a.packed_coeffs().size()) *
      b.packed_coeffs().size();
  const int dim = cfg.dim;
  const int band = a.degree() + b.degree();
  const std::int64_t width = 2 * static_cast<std::int64_t>(band) + 1;
  std::int64_t box = 1;
  for (int j = 0; j < dim; ++j) box *= width;

  const bool fft_scale =
      cfg.kind == BackendKind::Torus && pairs > 1500000;
  if (!fft_scale && pairs > 4000 && box <= (std::int64_t(1) << 22)) {
    // dense-box accumulation: every output coefficient is a plain sum of
    // its contributing products, so the error per coefficient stays at
    // machine scale regardless of the total mode count
    std::vector<Complex> acc(box, Complex(0.0, 0.0));
    const auto offset_of = [&](std::uint64_t key) {
      std::int64_t off = 0;
      for (int j = 0; j < dim; ++j)
        off = off * width + (key_component(key, j) + band);
      return off;
    };
    const std::int64_t off0 = [&] {
      std::int64_t off = 0;
      for (int j = 0; j < dim; ++j) off = off * width + band;
      return off;
    }();
    std::vector<std::int64_t> boff;
    boff.reserve(b.packed_coeffs().size());
    for (const auto& [kb, cb] : b.packed_coeffs())
      boff.push_back(offset_of(kb) - off0);
    if (cfg.kind == BackendKind::NCTorus) {
      const double twist = 2.0 * std::numbers::pi * cfg.theta;
      for (const auto& [ka, ca] : a.packed_coeffs()) {
        const std::int64_t aoff = offset_of(ka);
        const double k2 = key_component(ka, 1);
        std::size_t i = 0;
        for (const auto& [kb, cb] : b.packed_coeffs()) {
          const Complex phase =
              std::polar(1.0, twist * k2 * key_component(kb, 0));
          acc[aoff + boff[i++]] += ca * cb * phase;
        }
      }
    } else {
      for (const auto& [ka, ca] : a.packed_coeffs()) {
        const std::int64_t aoff = offset_of(ka);
        std::size_t i = 0;
        for (const auto& [kb, cb] : b.packed_coeffs())
          acc[aoff + boff[i++]] += ca * cb;
      }
    }
    double maxmod = 0.0;
    for (const Complex& c : acc) maxmod = std::max(maxmod, std::abs(c));
    const double cut = 1e-15 * maxmod;
    std::vector<std::pair<std::uint64_t, Complex>> coeffs;
    std::array<int, 4> k{};
    for (std::int64_t idx = 0; idx < box; ++idx) {
      if (std::abs(acc[idx]) <= cut || acc[idx] == Complex(0.0, 0.0))
        continue;
      std::int64_t rem = idx;
      for (int j = dim - 1; j >= 0; --j) {
        k[j] = static_cast<int>(rem % width) - band;
        rem /= width;
      }
      coeffs.emplace_back(
          AlgebraElement::pack_index(std::span<const int>(k.data(), dim)),
          acc[idx]);
    }
    return raw_from_parts(a.backend(), std::move(coeffs));
  }

  if (fft_scale || (cfg.kind == BackendKind::Torus && pairs > 100000)) {
    // large products: band-limited multiplication via a sampling grid
    const int grid = fft_friendly_size(2 * band + 1);
    Eigen::VectorXcd va = grid_values(a, grid);
    Eigen::VectorXcd vb = grid_values(b, grid);
    va.array() *= vb.array();
    return from_grid_values(a.backend(), va, grid, band);
  }
  std::unordered_map<std::uint64_t, Complex> acc;
  acc.reserve(a.packed_coeffs().size() + b.packed_coeffs().size());
  const std::uint64_t zk = zero_key(cfg.dim);
  if (cfg.kind == BackendKind::NCTorus) {
    // twisted convolution: e_k e_l = exp(2 pi i theta k2 l1) e_{k+l}
    const double twist = 2.0 * std::numbers::pi * cfg.theta;
    for (const auto& [ka, ca] : a.packed_coeffs()) {
      const double k2 = key_component(ka, 1);
      for (const auto& [kb, cb] : b.packed_coeffs()) {
        const double l1 = key_component(kb, 0);
        const Complex phase = std::polar(1.0, twist * k2 * l1);
        acc[ka + kb - zk] += ca * cb * phase;
      }
    }
  } else {
    for (const auto& [ka, ca] : a.packed_coeffs())
      for (const auto& [kb, cb] : b.packed_coeffs())
        acc[ka + kb - zk] += ca * cb;
  }
  std::vector<std::pair<std::uint64_t, Complex>> coeffs(acc.begin(),
                                                        acc.end());
  return raw_from_parts(a.backend(), std::move(coeffs));
}

}  // namespace detail

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  AlgebraElement result = detail::mul_unchecked(a, b);
  const auto& cfg = *a.backend();
  if (cfg.kind != BackendKind::Matrix && result.degree() > cfg.max_degree) {
    // Coefficients past the cap that sit at the arithmetic noise floor are
    // rounding debris, not product mass; strip them before deciding.
    // Anything above the floor out there is a genuine overflow. The floor
    // is relative to the product scale, with an absolute bound for
    // residual-scale operands whose coefficients are cancellation noise of
    // unit-scale history.
    const double floor = std::max(1e-14 * norm(a) * norm(b), 1e-20);
    std::vector<std::pair<std::uint64_t, Complex>> kept;
    kept.reserve(result.coeffs_.size());
    double worst = 0.0;
    const int dim = cfg.dim;
    for (const auto& kc : result.coeffs_) {
      if (key_degree(kc.first, dim) <= cfg.max_degree)
        kept.push_back(kc);
      else
        worst = std::max(worst, std::abs(kc.second));
    }
    if (worst > floor) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "product degree %d exceeds cap %d (overflow coefficient "
                    "%.3e, noise floor %.3e)",
                    result.degree(), cfg.max_degree, worst, floor);
      throw DegreeOverflow(buf);
    }
    result = raw_from_parts(a.backend(), std::move(kept));
  }
  return result;
}

double norm(const AlgebraElement& a) {
  if (a.backend()->kind == BackendKind::Matrix) {
    if (a.matrix().size() == 0) return 0.0;
    return a.matrix().operatorNorm();
  }
  double s = 0.0;
  for (const auto& [k, c] : a.packed_coeffs()) s += std::abs(c);
  return s;
}

AlgebraElement adjoint(const AlgebraElement& a) {
  const auto& cfg = *a.backend();
  if (cfg.kind == BackendKind::Matrix)
    return AlgebraElement::from_matrix(a.backend(), a.matrix().adjoint());
  std::vector<std::pair<std::uint64_t, Complex>> coeffs;
  coeffs.reserve(a.packed_coeffs().size());
  std::array<int, 4> k{};
  for (const auto& [key, c] : a.packed_coeffs()) {
    AlgebraElement::unpack_index(key, cfg.dim, k.data());
    Complex v = std::conj(c);
    if (cfg.kind == BackendKind::NCTorus) {
      // e_k^* = exp(2 pi i theta k1 k2) e_{-k}
      v *= std::polar(1.0, 2.0 * std::numbers::pi * cfg.theta *
                               static_cast<double>(k[0]) * k[1]);
    }
    std::array<int, 4> nk{};
    for (int j = 0; j < cfg.dim; ++j) nk[j] = -k[j];
    coeffs.emplace_back(
        AlgebraElement::pack_index(std::span<const int>(nk.data(), cfg.dim)),
        v);
  }
  return raw_from_parts(a.backend(), std::move(coeffs));
}

Eigen::VectorXcd grid_values(const AlgebraElement& a, int grid) {
  const auto& cfg = *a.backend();
  if (cfg.kind == BackendKind::Matrix)
    throw Error("grid_values: not a torus backend");
  if (grid < 2 * a.degree() + 1)
    throw BadDimension("grid_values: grid too small for element degree");
  const int dim = cfg.dim;
  std::int64_t total = 1;
  for (int j = 0; j < dim; ++j) total *= grid;
  std::vector<Complex> bins(total, Complex(0.0, 0.0));
  std::array<int, 4> k{};
  for (const auto& [key, c] : a.packed_coeffs()) {
    AlgebraElement::unpack_index(key, dim, k.data());
    std::int64_t idx = 0;
    for (int j = 0; j < dim; ++j) {
      const int kj = ((k[j] % grid) + grid) % grid;
      idx = idx * grid + kj;
    }
    bins[idx] += c;
  }
  fft_all_axes(bins, grid, dim, /*forward=*/false);
  Eigen::VectorXcd out(total);
  for (std::int64_t i = 0; i < total; ++i) out[i] = bins[i] * double(total);
  return out;
}

AlgebraElement from_grid_values(const BackendPtr& backend,
                                const Eigen::VectorXcd& values, int grid,
                                int band) {
  const auto& cfg = *backend;
  if (cfg.kind == BackendKind::Matrix)
    throw Error("from_grid_values: not a torus backend");
  if (grid < 2 * band + 1)
    throw BadDimension("from_grid_values: grid too small for band");
  const int dim = cfg.dim;
  std::int64_t total = 1;
  for (int j = 0; j < dim; ++j) total *= grid;
  if (values.size() != total)
    throw BadDimension("from_grid_values: wrong number of samples");
  std::vector<Complex> data(values.data(), values.data() + total);
  fft_all_axes(data, grid, dim, /*forward=*/true);

  // canonical pruning happens during extraction: find the spectral peak
  // first, then keep only modes above the relative threshold
  double maxmod = 0.0;
  for (const Complex& v : data) maxmod = std::max(maxmod, std::abs(v));
  const double cut = 1e-15 * maxmod;

  std::vector<std::pair<std::uint64_t, Complex>> coeffs;
  const int width = 2 * band + 1;
  std::int64_t modes = 1;
  for (int j = 0; j < dim; ++j) modes *= width;
  std::array<int, 4> k{};
  for (std::int64_t m = 0; m < modes; ++m) {
    std::int64_t rem = m;
    for (int j = dim - 1; j >= 0; --j) {
      k[j] = static_cast<int>(rem % width) - band;
      rem /= width;
    }
    std::int64_t idx = 0;
    for (int j = 0; j < dim; ++j) {
      const int kj = ((k[j] % grid) + grid) % grid;
      idx = idx * grid + kj;
    }
    if (std::abs(data[idx]) <= cut) continue;
    coeffs.emplace_back(
        AlgebraElement::pack_index(std::span<const int>(k.data(), dim)),
        data[idx] / double(total));
  }
  return raw_from_parts(backend, std::move(coeffs));
}

Complex evaluate(const AlgebraElement& a, std::span<const double> x) {
  const auto& cfg = *a.backend();
  if (cfg.kind == BackendKind::Matrix)
    throw Error("evaluate: not a torus backend");
  if (static_cast<int>(x.size()) != cfg.dim)
    throw BadDimension("evaluate: wrong point dimension");
  Complex s(0.0, 0.0);
  std::array<int, 4> k{};
  for (const auto& [key, c] : a.packed_coeffs()) {
    AlgebraElement::unpack_index(key, cfg.dim, k.data());
    double phase = 0.0;
    for (int j = 0; j < cfg.dim; ++j) phase += k[j] * x[j];
    s += c * std::polar(1.0, 2.0 * std::numbers::pi * phase);
  }
  return s;
}

namespace {

double residual_norm(const AlgebraElement& a, const AlgebraElement& b) {
  return norm(detail::mul_unchecked(a, b) -
              AlgebraElement::unit(a.backend()));
}

AlgebraElement invert_torus(const AlgebraElement& a) {
  // Pointwise inversion on a sampling grid, transformed back to a band
  // that is escalated until the residual is comfortable (the retained
  // band of the true inverse depends on its tail decay).
  const auto& cfg = *a.backend();
  AlgebraElement best;
  double best_r = std::numeric_limits<double>::infinity();
  int band_in = std::max(cfg.degree, a.degree());
  for (int attempt = 0; attempt < 3; ++attempt) {
    const int band_out = std::min(2 * band_in, cfg.max_degree);
    const int grid = fft_friendly_size(std::max(
        4 * cfg.degree + 1, 2 * std::max(a.degree(), band_out) + 1));
    Eigen::VectorXcd vals = grid_values(a, grid);
    double minmod = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < vals.size(); ++i)
      minmod = std::min(minmod, std::abs(vals[i]));
    if (minmod < cfg.tol)
      throw NotInvertible("grid minimum modulus " + std::to_string(minmod) +
                          " below tolerance");
    for (Eigen::Index i = 0; i < vals.size(); ++i) vals[i] = 1.0 / vals[i];
    AlgebraElement b = from_grid_values(a.backend(), vals, grid, band_out);
    const double r = std::max(residual_norm(a, b), residual_norm(b, a));
    if (r < best_r) {
      best = std::move(b);
      best_r = r;
    }
    if (best_r <= 0.05 * cfg.tol || band_out == cfg.max_degree) break;
    band_in *= 2;
  }
  if (best_r > cfg.tol)
    throw NotInvertible("inverse residual " + std::to_string(best_r) +
                        " above tolerance");
  return best;
}

AlgebraElement invert_newton_schulz(const AlgebraElement& a) {
  const auto& cfg = *a.backend();
  const AlgebraElement one = AlgebraElement::unit(a.backend());
  const AlgebraElement astar = adjoint(a);
  const double c = norm(a) * norm(astar);
  if (c == 0.0) throw NotInvertible("zero element");
  AlgebraElement x = astar * Complex(1.0 / c, 0.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const AlgebraElement r = one - a * x;
    const double rn = norm(r);
    if (rn <= 1e-13) break;
    if (rn >= prev && it > 4) {
      if (rn <= cfg.tol) break;  // converged to the rounding floor
      throw NotInvertible("Newton-Schulz residual stalled at " +
                          std::to_string(rn));
    }
    prev = rn;
    x = x + x * r;
  }
  const double r = std::max(residual_norm(a, x), residual_norm(x, a));
  if (r > cfg.tol)
    throw NotInvertible("inverse residual " + std::to_string(r) +
                        " above tolerance");
  return x;
}

AlgebraElement invert_dense(const AlgebraElement& a) {
  const auto& cfg = *a.backend();
  const Eigen::MatrixXcd& m = a.matrix();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  Eigen::MatrixXcd inv = lu.inverse();
  if (!inv.allFinite()) throw NotInvertible("singular matrix");
  AlgebraElement b = AlgebraElement::from_matrix(a.backend(), std::move(inv));
  const double r = std::max(residual_norm(a, b), residual_norm(b, a));
  if (r > cfg.tol)
    throw NotInvertible("inverse residual " + std::to_string(r) +
                        " above tolerance");
  return b;
}

}  // namespace

AlgebraElement inverse(const AlgebraElement& a) {
  switch (a.backend()->kind) {
    case BackendKind::Torus: return invert_torus(a);
    case BackendKind::NCTorus: return invert_newton_schulz(a);
    case BackendKind::Matrix: return invert_dense(a);
  }
  throw Error("unreachable");
}

}  // namespace projmod
