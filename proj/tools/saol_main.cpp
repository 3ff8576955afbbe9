#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "saol/evaluation.hpp"
#include "saol/imaging.hpp"
#include "saol/io.hpp"
#include "saol/synthetic.hpp"
#include "saol/trainer.hpp"

namespace {

using namespace saol;

std::vector<std::pair<Eigen::Index, Eigen::Index>> parse_dims(const std::string& text) {
  // "8x7,8x7" -> [(8,7),(8,7)]
  std::vector<std::pair<Eigen::Index, Eigen::Index>> dims;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    size_t x = part.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("expected MxP factor sizes, got " + part);
    long m = std::stol(part.substr(0, x));
    long p = std::stol(part.substr(x + 1));
    if (m < 1 || p < 1) throw CLI::ValidationError("factor sizes must be positive: " + part);
    dims.emplace_back(m, p);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (dims.empty()) throw CLI::ValidationError("no factor sizes given");
  return dims;
}

std::string timestamp_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

int run(int argc, char** argv) {
  CLI::App app{"Co-sparse analysis operator learning on oblique manifolds"};
  app.require_subcommand(1);

  // ---- generate ----------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Generate synthetic cosparse signals");
  std::string gen_gt, gen_out;
  CosparseSpec spec;
  gen->add_option("--gt", gen_gt, "Ground-truth operator JSON")->required();
  gen->add_option("--count", spec.count, "Number of samples")->required();
  gen->add_option("--cosparsity", spec.cosparsity, "Zero filter responses per sample")
      ->default_val(15);
  gen->add_option("--sigma", spec.noise_sigma, "Gaussian noise std")->default_val(0.05);
  gen->add_option("--seed", spec.seed, "RNG seed")->default_val(0);
  gen->add_option("--out", gen_out, "Output dataset path")->required();
  gen->callback([&] {
    auto gt = load_operator(gen_gt);
    save_dataset(generate_cosparse(gt.op, spec), gen_out);
  });

  // ---- extract-patches ---------------------------------------------------
  auto* ext = app.add_subcommand("extract-patches", "Extract normalized patches from PGM images");
  std::vector<std::string> ext_images;
  Eigen::Index ext_patch = 7, ext_count = 0;
  std::uint64_t ext_seed = 0;
  std::string ext_out;
  ext->add_option("--image", ext_images, "Input PGM image (repeatable)")->required();
  ext->add_option("--patch", ext_patch, "Patch side length")->default_val(7);
  ext->add_option("--count", ext_count, "Total patch count")->required();
  ext->add_option("--seed", ext_seed, "RNG seed")->default_val(0);
  ext->add_option("--out", ext_out, "Output dataset path")->required();
  ext->callback([&] {
    Rng rng(ext_seed);
    SignalSet all;
    all.mode_sizes = {ext_patch, ext_patch};
    all.samples.resize(ext_patch * ext_patch, ext_count);
    Eigen::Index per = ext_count / static_cast<Eigen::Index>(ext_images.size());
    Eigen::Index done = 0;
    for (size_t i = 0; i < ext_images.size(); ++i) {
      Eigen::Index want = (i + 1 == ext_images.size()) ? ext_count - done : per;
      if (want == 0) continue;
      auto img = read_pgm(ext_images[i]);
      auto part = extract_patches(img, ext_patch, want, rng);
      all.samples.middleCols(done, want) = part.samples;
      done += want;
    }
    save_dataset(all, ext_out);
  });

  // ---- train -------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "Learn an analysis operator with geometric SGD");
  std::string tr_data, tr_factors, tr_dense, tr_out, tr_log;
  TrainerConfig cfg;
  tr->add_option("--data", tr_data, "Training dataset")->required();
  auto* fopt = tr->add_option("--factors", tr_factors, "Separable factor sizes, e.g. 8x7,8x7");
  auto* dopt = tr->add_option("--dense", tr_dense, "Non-separable operator size, e.g. 64x49");
  fopt->excludes(dopt);
  tr->add_option("--nu", cfg.objective.nu, "Sparsity slope")->default_val(500.0);
  tr->add_option("--kappa", cfg.objective.kappa, "Rank penalty weight")->default_val(6500.0);
  tr->add_option("--mu", cfg.objective.mu, "Incoherence penalty weight")->default_val(1e-4);
  tr->add_option("--batch", cfg.batch_size, "Batch size")->default_val(500);
  tr->add_option("--a0", cfg.armijo.a0, "Initial step length")->default_val(0.1);
  tr->add_option("--armijo-b", cfg.armijo.b, "Backtracking shrink factor")->default_val(0.9);
  tr->add_option("--armijo-c", cfg.armijo.c, "Sufficient-decrease slope")->default_val(1e-4);
  tr->add_option("--kmax", cfg.armijo.k_max, "Line-search trial cap")->default_val(40);
  tr->add_option("--window", cfg.avg_window, "Cost averaging window w")->default_val(2000);
  tr->add_option("--stop-window", cfg.stop_window, "Stopping window l")->default_val(200);
  tr->add_option("--stop-tol", cfg.stop_tol, "Stopping threshold")->default_val(5e-5);
  tr->add_option("--max-iters", cfg.max_iters, "Iteration cap")->default_val(100000);
  tr->add_option("--seed", cfg.seed, "RNG seed")->default_val(0);
  tr->add_option("--out", tr_out, "Output operator JSON")->required();
  tr->add_option("--log", tr_log, "Per-iteration JSONL log file");
  tr->callback([&] {
    if (tr_factors.empty() && tr_dense.empty())
      throw CLI::RequiredError("--factors or --dense");
    auto dims = parse_dims(tr_factors.empty() ? tr_dense : tr_factors);
    SignalSet data = load_dataset(tr_data);
    Rng rng(cfg.seed);
    AnalysisOperator init = AnalysisOperator::random(dims, rng);
    if (init.cols() != data.sample_length())
      throw FormatError("operator signal length does not match dataset");

    std::ofstream log_stream;
    TrainHooks hooks;
    if (!tr_log.empty()) {
      log_stream.open(tr_log);
      if (!log_stream) throw std::runtime_error("cannot open log file: " + tr_log);
      hooks.jsonl_log = &log_stream;
    }
    TrainReport report = train(data, init, cfg, hooks);
    OperatorMetadata meta;
    meta.nu = cfg.objective.nu;
    meta.kappa = cfg.objective.kappa;
    meta.mu = cfg.objective.mu;
    meta.seed = cfg.seed;
    meta.iterations = report.iterations;
    meta.created = timestamp_now();
    save_operator(report.op, meta, tr_out);
    std::cout << "iterations: " << report.iterations << "\n"
              << "termination: "
              << (report.reason == StopReason::converged ? "converged" : "max_iters") << "\n"
              << "accepted steps: " << report.accepted_steps << "\n"
              << "failed searches: " << report.failed_searches << "\n";
  });

  // ---- recover-eval ------------------------------------------------------
  auto* rec = app.add_subcommand("recover-eval", "Score a learned operator against ground truth");
  std::string rec_learned, rec_gt;
  rec->add_option("--learned", rec_learned, "Learned operator JSON")->required();
  rec->add_option("--gt", rec_gt, "Ground-truth operator JSON")->required();
  rec->callback([&] {
    auto learned = load_operator(rec_learned);
    auto gt = load_operator(rec_gt);
    auto assignment = hungarian_min_assignment(confusion_matrix(learned.op, gt.op));
    std::cout << "H(C): " << assignment.cost << "\npermutation:";
    for (size_t i = 0; i < assignment.permutation.size(); ++i)
      std::cout << " " << i << "->" << assignment.permutation[i];
    std::cout << "\n";
  });

  // ---- bound -------------------------------------------------------------
  auto* bd = app.add_subcommand("bound", "Evaluate the sample-complexity bound");
  std::string bd_factors, bd_dense;
  double bd_lambda = 1.0, bd_samples = 0, bd_delta = 0.05;
  bd->add_option("--factors", bd_factors, "Separable factor sizes");
  bd->add_option("--dense", bd_dense, "Non-separable operator size");
  bd->add_option("--lambda", bd_lambda, "Lipschitz constant of the sparsity measure")->required();
  bd->add_option("--samples", bd_samples, "Sample count N")->required();
  bd->add_option("--delta", bd_delta, "Failure probability")->default_val(0.05);
  bd->callback([&] {
    if (bd_factors.empty() && bd_dense.empty())
      throw CLI::RequiredError("--factors or --dense");
    std::cout << "configuration           C          eta\n";
    auto print = [&](const std::string& label, const std::string& dims_text, bool separable) {
      BoundInputs in;
      in.factor_dims = parse_dims(dims_text);
      in.lipschitz = bd_lambda;
      in.samples = bd_samples;
      in.delta = bd_delta;
      in.separable = separable;
      auto res = complexity_bound(in);
      std::printf("%-18s %10.3f %12.6g\n", label.c_str(), res.c_constant, res.eta);
    };
    if (!bd_factors.empty()) print("separable " + bd_factors, bd_factors, true);
    if (!bd_dense.empty()) print("dense " + bd_dense, bd_dense, false);
  });

  // ---- denoise -----------------------------------------------------------
  auto* dn = app.add_subcommand("denoise", "Analysis-prior image denoising");
  std::string dn_image, dn_op, dn_out, dn_ref;
  DenoiseConfig dn_cfg;
  dn->add_option("--image", dn_image, "Noisy PGM image")->required();
  dn->add_option("--op", dn_op, "Operator JSON")->required();
  dn->add_option("--tau", dn_cfg.tau, "Analysis weighting factor")->default_val(0.40);
  dn->add_option("--mu-s", dn_cfg.mu_s, "Huber smoothing parameter")->default_val(0.01);
  dn->add_option("--max-iters", dn_cfg.max_iters, "Iteration cap")->default_val(300);
  dn->add_option("--tol", dn_cfg.tolerance, "Relative objective tolerance")->default_val(1e-5);
  dn->add_option("--out", dn_out, "Output PGM image")->required();
  dn->add_option("--ref", dn_ref, "Clean reference for PSNR reporting");
  dn->callback([&] {
    auto noisy = read_pgm(dn_image);
    auto op = load_operator(dn_op);
    auto result = denoise(noisy, op.op, dn_cfg);
    write_pgm(result.image, dn_out);
    std::cout << "iterations: " << result.iterations << "\n";
    if (!dn_ref.empty()) {
      auto ref = read_pgm(dn_ref);
      std::cout << "input PSNR: " << psnr(ref, noisy) << " dB\n"
                << "output PSNR: " << psnr(ref, result.image) << " dB\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const saol::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const saol::RankDeficiencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const saol::TrainError& e) {
    std::cerr << "error: " << e.what() << " (iteration " << e.iteration << ")\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
