#include "saol/imaging.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace saol {

namespace {

int read_pgm_token(std::istream& in) {
  // skips whitespace and '#' comment lines
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  return value;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image file: " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5')
    throw std::runtime_error("not a binary PGM (P5) file: " + path);
  int width = read_pgm_token(in);
  int height = read_pgm_token(in);
  int maxval = read_pgm_token(in);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error("unsupported PGM header in " + path);
  in.get();  // single whitespace byte before raster
  std::vector<unsigned char> raw(static_cast<size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw std::runtime_error("truncated PGM raster in " + path);
  GrayImage img;
  img.pixels.resize(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      img.pixels(r, c) = static_cast<double>(raw[static_cast<size_t>(r) * width + c]);
  return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image file: " + path);
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<unsigned char> raw(static_cast<size_t>(img.width()) * img.height());
    for (Eigen::Index r = 0; r < img.height(); ++r)
      for (Eigen::Index c = 0; c < img.width(); ++c) {
        double v = std::round(img.pixels(r, c));
        v = std::min(255.0, std::max(0.0, v));
        raw[static_cast<size_t>(r) * img.width() + c] = static_cast<unsigned char>(v);
      }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error("short write to " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move temporary file into place: " + path);
}

SignalSet extract_patches(const GrayImage& img, Eigen::Index q, Eigen::Index count, Rng& rng) {
  if (q < 1 || q > img.width() || q > img.height())
    throw std::invalid_argument("extract_patches: image smaller than patch");
  if (count < 1) throw std::invalid_argument("extract_patches: count must be >= 1");
  std::uniform_int_distribution<Eigen::Index> row_dist(0, img.height() - q);
  std::uniform_int_distribution<Eigen::Index> col_dist(0, img.width() - q);

  SignalSet out;
  out.mode_sizes = {q, q};
  out.samples.resize(q * q, count);
  int consecutive_failures = 0;
  for (Eigen::Index j = 0; j < count;) {
    Eigen::Index r0 = row_dist(rng), c0 = col_dist(rng);
    Vector s(q * q);
    for (Eigen::Index r = 0; r < q; ++r)
      for (Eigen::Index c = 0; c < q; ++c) s[r * q + c] = img.pixels(r0 + r, c0 + c);
    s.array() -= s.mean();
    double n = s.norm();
    if (n < 1e-8) {
      if (++consecutive_failures >= 100)
        throw std::runtime_error("extract_patches: no patches with nonzero AC content");
      continue;
    }
    consecutive_failures = 0;
    out.samples.col(j++) = s / n;
  }
  return out;
}

namespace {

Matrix filter_kernel(const Matrix& composed, Eigen::Index row, Eigen::Index q) {
  Matrix ker(q, q);
  for (Eigen::Index r = 0; r < q; ++r)
    for (Eigen::Index c = 0; c < q; ++c) ker(r, c) = composed(row, r * q + c);
  return ker;
}

Eigen::Index patch_side(const AnalysisOperator& op) {
  auto qd = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(op.cols()))));
  if (qd * qd != op.cols())
    throw std::invalid_argument("operator signal length is not a square patch");
  return qd;
}

}  // namespace

std::vector<Matrix> apply_operator_image(const AnalysisOperator& op, const GrayImage& img) {
  const Eigen::Index q = patch_side(op);
  if (q > img.width() || q > img.height())
    throw std::invalid_argument("apply_operator_image: image smaller than filter");
  const Matrix composed = op.compose();
  const Eigen::Index mh = img.height() - q + 1, mw = img.width() - q + 1;
  std::vector<Matrix> maps;
  maps.reserve(composed.rows());
  for (Eigen::Index f = 0; f < composed.rows(); ++f) {
    Matrix ker = filter_kernel(composed, f, q);
    Matrix map(mh, mw);
    for (Eigen::Index r = 0; r < mh; ++r)
      for (Eigen::Index c = 0; c < mw; ++c)
        map(r, c) = (img.pixels.block(r, c, q, q).array() * ker.array()).sum();
    maps.push_back(std::move(map));
  }
  return maps;
}

Matrix apply_operator_image_adjoint(const AnalysisOperator& op, const std::vector<Matrix>& maps,
                                    Eigen::Index height, Eigen::Index width) {
  const Eigen::Index q = patch_side(op);
  const Matrix composed = op.compose();
  if (static_cast<Eigen::Index>(maps.size()) != composed.rows())
    throw std::invalid_argument("adjoint: map count does not match filter count");
  Matrix out = Matrix::Zero(height, width);
  for (Eigen::Index f = 0; f < composed.rows(); ++f) {
    Matrix ker = filter_kernel(composed, f, q);
    const Matrix& map = maps[static_cast<size_t>(f)];
    for (Eigen::Index r = 0; r < map.rows(); ++r)
      for (Eigen::Index c = 0; c < map.cols(); ++c)
        out.block(r, c, q, q) += map(r, c) * ker;
  }
  return out;
}

namespace {

double huber(double t, double mu) {
  double a = std::abs(t);
  return a <= mu ? t * t / (2.0 * mu) : a - mu / 2.0;
}

double huber_slope(double t, double mu) {
  if (t > mu) return 1.0;
  if (t < -mu) return -1.0;
  return t / mu;
}

double largest_gram_eigenvalue(const AnalysisOperator& op, Eigen::Index height,
                               Eigen::Index width) {
  // power iteration on A^T A with a fixed deterministic start
  Rng rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  GrayImage x;
  x.pixels.resize(height, width);
  for (Eigen::Index r = 0; r < height; ++r)
    for (Eigen::Index c = 0; c < width; ++c) x.pixels(r, c) = gauss(rng);
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    auto maps = apply_operator_image(op, x);
    Matrix next = apply_operator_image_adjoint(op, maps, height, width);
    double n = next.norm();
    if (!(n > 0.0) || !std::isfinite(n)) return -1.0;
    lambda = n / std::max(x.pixels.norm(), 1e-300);
    x.pixels = next / n;
  }
  return lambda;
}

}  // namespace

DenoiseResult denoise(const GrayImage& y, const AnalysisOperator& op, const DenoiseConfig& cfg) {
  if (cfg.tau <= 0) throw std::invalid_argument("denoise: tau must be positive");
  if (cfg.mu_s <= 0) throw std::invalid_argument("denoise: mu_s must be positive");
  const Eigen::Index h = y.height(), w = y.width();
  const Eigen::Index q = patch_side(op);

  double sigma_max_sq = largest_gram_eigenvalue(op, h, w);
  if (sigma_max_sq <= 0.0)
    sigma_max_sq = static_cast<double>(op.rows()) * static_cast<double>(q * q);
  const double lipschitz = 1.0 + cfg.tau * sigma_max_sq / cfg.mu_s;
  const double step = 1.0 / lipschitz;

  auto objective = [&](const Matrix& x) {
    GrayImage xi{x};
    auto maps = apply_operator_image(op, xi);
    double smooth = 0.0;
    for (const auto& map : maps)
      for (Eigen::Index r = 0; r < map.rows(); ++r)
        for (Eigen::Index c = 0; c < map.cols(); ++c) smooth += huber(map(r, c), cfg.mu_s);
    return cfg.tau * smooth + 0.5 * (y.pixels - x).squaredNorm();
  };
  auto gradient = [&](const Matrix& x) {
    GrayImage xi{x};
    auto maps = apply_operator_image(op, xi);
    for (auto& map : maps)
      map = map.unaryExpr([&](double t) { return huber_slope(t, cfg.mu_s); });
    return Matrix(cfg.tau * apply_operator_image_adjoint(op, maps, h, w) + (x - y.pixels));
  };

  Matrix x = y.pixels, x_prev = y.pixels;
  double t_momentum = 1.0;
  double f_cur = objective(x);

  DenoiseResult result;
  for (Eigen::Index it = 0; it < cfg.max_iters; ++it) {
    double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum)) / 2.0;
    Matrix z = x + ((t_momentum - 1.0) / t_next) * (x - x_prev);
    Matrix cand = z - step * gradient(z);
    double f_cand = objective(cand);
    if (f_cand > f_cur) {
      // momentum overshoot: fall back to a plain descent step and restart
      cand = x - step * gradient(x);
      f_cand = objective(cand);
      t_next = 1.0;
    }
    x_prev = x;
    x = std::move(cand);
    t_momentum = t_next;
    result.objective.push_back(f_cand);
    result.iterations = it + 1;
    double rel_change = std::abs(f_cur - f_cand) / std::max(std::abs(f_cur), 1e-300);
    f_cur = f_cand;
    if (rel_change < cfg.tolerance) break;
  }
  result.image.pixels = std::move(x);
  return result;
}

double psnr(const GrayImage& a, const GrayImage& b) {
  if (a.height() != b.height() || a.width() != b.width())
    throw std::invalid_argument("psnr: image dimensions differ");
  double mse = (a.pixels - b.pixels).squaredNorm() /
               static_cast<double>(a.height() * a.width());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace saol
