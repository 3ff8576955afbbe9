#ifndef SAOL_IMAGING_HPP
#define SAOL_IMAGING_HPP

#include <string>

#include "saol/objective.hpp"

namespace saol {

// Grayscale image with real-valued pixels in [0, 255]. pixels(r, c) indexes
// row r, column c.
struct GrayImage {
  Matrix pixels;

  Eigen::Index height() const { return pixels.rows(); }
  Eigen::Index width() const { return pixels.cols(); }
};

// Binary PGM (P5, 8-bit). Values are promoted to doubles on load; writing
// clamps to [0, 255] and rounds to the nearest integer.
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& img, const std::string& path);

// Random q x q patches, mean-subtracted and scaled to unit l2 norm. Patches
// whose post-DC norm falls below 1e-8 are discarded and redrawn.
SignalSet extract_patches(const GrayImage& img, Eigen::Index patch_size, Eigen::Index count,
                          Rng& rng);

// Applies every filter row of the composed operator to the image by valid
// (no padding) correlation. Returns m response maps of size
// (height - q + 1) x (width - q + 1).
std::vector<Matrix> apply_operator_image(const AnalysisOperator& op, const GrayImage& img);

// Adjoint of apply_operator_image: scatter-adds each kernel weighted by the
// response values back onto an image-sized accumulator.
Matrix apply_operator_image_adjoint(const AnalysisOperator& op, const std::vector<Matrix>& maps,
                                    Eigen::Index height, Eigen::Index width);

struct DenoiseConfig {
  double tau = 0.40;      // analysis-prior weight
  double mu_s = 0.01;     // Huber smoothing parameter
  Eigen::Index max_iters = 300;
  double tolerance = 1e-5;  // relative objective change
};

struct DenoiseResult {
  GrayImage image;
  std::vector<double> objective;  // one value per iteration, nonincreasing
  Eigen::Index iterations = 0;
};

// Minimizes tau * sum_c huber((Omega* x)_c) + 1/2 ||y - x||^2 by monotone
// accelerated gradient descent with step 1/L.
DenoiseResult denoise(const GrayImage& y, const AnalysisOperator& op, const DenoiseConfig& cfg);

// 10 log10(255^2 / MSE); +infinity for identical images.
double psnr(const GrayImage& a, const GrayImage& b);

}  // namespace saol

#endif
