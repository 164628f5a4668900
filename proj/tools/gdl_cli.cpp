// Batch experiment front-end: synthetic-signal benchmarks, dictionary
// learning on CSV signals, patch-based image denoising, standalone noise
// application, and the fixed DCT dictionary.
//
// Exit codes: 0 success, 1 runtime failure, 2 flag errors. Progress goes to
// standard error; machine-readable output goes to files only.
//
// All randomness derives from the single --seed:
//   synth-bench  data seed = derive_seed(seed, 2*i), init seed =
//                derive_seed(seed, 2*i+1) for the i-th sigma, so methods
//                run against identical data and initializations
//   denoise      noise seed = derive_seed(seed, 0), init = derive_seed(seed, 1)
//   learn/noise  the seed is used directly

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gdl/gdl.hpp"

namespace {

// Flag problems discovered after parsing (missing method-specific budget,
// malformed list values); reported like parse errors, exit 2.
struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gdl::IoError("cannot open " + path + " for writing");
  return out;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data() + pos, text.data() + comma, v);
    if (ec != std::errc{} || ptr != text.data() + comma)
      throw FlagError(flag + ": '" + text.substr(pos, comma - pos) +
                      "' is not a number");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text,
                                         const std::string& flag) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(text, flag)) {
    if (v < 1.0 || v != std::floor(v))
      throw FlagError(flag + ": entries must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void write_history_csv(const gdl::RunHistory& history, const std::string& path,
                       bool with_ground_truth) {
  auto out = open_out(path);
  out << (with_ground_truth ? "iteration,objective,re,dr\n"
                            : "iteration,objective,nnz\n");
  for (const auto& rec : history.records) {
    if (with_ground_truth) {
      out << rec.iteration << ',' << gdl::detail::format_double(rec.objective)
          << ',' << gdl::detail::format_double(rec.re.value_or(0.0)) << ','
          << gdl::detail::format_double(rec.dr.value_or(0.0)) << '\n';
    } else {
      out << rec.iteration << ',' << gdl::detail::format_double(rec.objective)
          << ',' << rec.nnz << '\n';
    }
  }
  if (!out) throw gdl::IoError("failed writing " + path);
}

void write_coefficients_csv(const gdl::SparseCoeffMatrix& a,
                            const std::string& path) {
  auto out = open_out(path);
  out << "row,col,value\n";
  for (std::size_t c = 0; c < a.cols(); ++c)
    for (const auto& [r, v] : a.column(c))
      out << r << ',' << c << ',' << gdl::detail::format_double(v) << '\n';
  if (!out) throw gdl::IoError("failed writing " + path);
}

gdl::IterationCallback progress_printer(const std::string& label,
                                        std::size_t total_iters) {
  return [label, total_iters](const gdl::IterationRecord& rec) {
    std::cerr << label << ": iteration " << rec.iteration << "/" << total_iters
              << " objective=" << rec.objective << " nnz=" << rec.nnz << " ("
              << rec.seconds << "s)\n";
  };
}

// ---------------------------------------------------------------- synth-bench

struct SynthBenchOpts {
  int series = 1;
  std::string sigma_list = "0";
  std::string method;
  std::size_t K = 4500;
  std::size_t k = 3;
  std::string k_sweep;
  std::size_t iters = 100;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_synth_bench(const SynthBenchOpts& opt) {
  const std::vector<double> sigmas =
      parse_double_list(opt.sigma_list, "--sigma-list");
  for (double s : sigmas)
    if (s < 0.0) throw FlagError("--sigma-list: negative sigma");
  std::vector<std::size_t> k_candidates{opt.k};
  if (!opt.k_sweep.empty()) {
    if (opt.method == "gdl")
      throw FlagError("--k-sweep applies to ksvd and mod only");
    k_candidates = parse_size_list(opt.k_sweep, "--k-sweep");
  }

  std::filesystem::create_directories(opt.out_dir);
  auto summary = open_out(opt.out_dir + "/summary.csv");
  summary << "method,series,sigma,seed,K,k,iters,final_objective,final_re,"
             "final_dr,nnz\n";

  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double sigma = sigmas[i];
    gdl::SyntheticSpec spec;
    if (opt.series == 1) {
      spec.mode = gdl::SyntheticSpec::Sparsity::PerColumn;
      spec.sparsity = 3;
    } else {
      spec.mode = gdl::SyntheticSpec::Sparsity::TotalNnz;
      spec.sparsity = 4500;
    }
    spec.sigma = sigma;

    const std::uint64_t data_seed = gdl::Rng::derive_seed(opt.seed, 2 * i);
    const std::uint64_t init_seed = gdl::Rng::derive_seed(opt.seed, 2 * i + 1);
    std::cerr << "synth-bench: series " << opt.series << " sigma " << sigma
              << " generating data\n";
    const gdl::SyntheticData data = gdl::gen_synthetic(spec, data_seed);
    const gdl::GroundTruth gt{data.dictionary, data.clean};

    gdl::LearnResult result;
    std::size_t chosen_k = 0;
    if (opt.method == "gdl") {
      gdl::GdlConfig cfg;
      cfg.m = spec.atoms;
      cfg.K = opt.K;
      cfg.max_iters = opt.iters;
      cfg.seed = init_seed;
      result = gdl::gdl_learn(data.noisy, cfg, &gt,
                              progress_printer("gdl", opt.iters));
    } else {
      bool first = true;
      for (std::size_t k_cand : k_candidates) {
        gdl::BaselineConfig cfg;
        cfg.m = spec.atoms;
        cfg.k_per_column = k_cand;
        cfg.max_iters = opt.iters;
        cfg.seed = init_seed;
        const auto label = opt.method + " k=" + std::to_string(k_cand);
        gdl::LearnResult cand =
            opt.method == "ksvd"
                ? gdl::ksvd_pk_learn(data.noisy, cfg, &gt,
                                     progress_printer(label, opt.iters))
                : gdl::mod_learn(data.noisy, cfg, &gt,
                                 progress_printer(label, opt.iters));
        const double obj = cand.history.records.back().objective;
        if (first || obj < result.history.records.back().objective) {
          result = std::move(cand);
          chosen_k = k_cand;
          first = false;
        }
      }
      if (k_candidates.size() > 1)
        std::cerr << "synth-bench: sigma " << sigma << " selected k="
                  << chosen_k << " by final objective\n";
    }

    const std::string history_path = opt.out_dir + "/history_" + opt.method +
                                     "_sigma" + fmt_g(sigma) + ".csv";
    write_history_csv(result.history, history_path, true);

    const auto& last = result.history.records.back();
    summary << opt.method << ',' << opt.series << ','
            << gdl::detail::format_double(sigma) << ',' << opt.seed << ','
            << (opt.method == "gdl" ? opt.K : 0) << ',' << chosen_k << ','
            << opt.iters << ',' << gdl::detail::format_double(last.objective)
            << ',' << gdl::detail::format_double(last.re.value_or(0.0)) << ','
            << gdl::detail::format_double(last.dr.value_or(0.0)) << ','
            << last.nnz << '\n';
    std::cerr << "synth-bench: sigma " << sigma << " done, re="
              << last.re.value_or(0.0) << " dr=" << last.dr.value_or(0.0)
              << "\n";
  }
  if (!summary) throw gdl::IoError("failed writing summary.csv");
  return 0;
}

// ---------------------------------------------------------------------- learn

struct LearnOpts {
  std::string signals;
  std::string method;
  std::size_t K = 0;
  std::size_t k = 0;
  std::size_t atoms = 50;
  std::size_t iters = 100;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_learn(const LearnOpts& opt) {
  const gdl::DenseMatrix x = gdl::load_matrix_csv(opt.signals);
  std::cerr << "learn: " << x.rows() << "x" << x.cols() << " signals, method "
            << opt.method << "\n";

  gdl::LearnResult result;
  if (opt.method == "gdl") {
    if (opt.K == 0) throw FlagError("--K is required with --method gdl");
    gdl::GdlConfig cfg;
    cfg.m = opt.atoms;
    cfg.K = opt.K;
    cfg.max_iters = opt.iters;
    cfg.seed = opt.seed;
    result = gdl::gdl_learn(x, cfg, nullptr,
                            progress_printer("gdl", opt.iters));
  } else {
    if (opt.k == 0)
      throw FlagError("--k is required with --method " + opt.method);
    gdl::BaselineConfig cfg;
    cfg.m = opt.atoms;
    cfg.k_per_column = opt.k;
    cfg.max_iters = opt.iters;
    cfg.seed = opt.seed;
    result = opt.method == "ksvd"
                 ? gdl::ksvd_pk_learn(x, cfg, nullptr,
                                      progress_printer("ksvd", opt.iters))
                 : gdl::mod_learn(x, cfg, nullptr,
                                  progress_printer("mod", opt.iters));
  }

  std::filesystem::create_directories(opt.out_dir);
  gdl::store_matrix_csv(result.dictionary, opt.out_dir + "/dictionary.csv");
  write_coefficients_csv(result.coefficients,
                         opt.out_dir + "/coefficients.csv");
  write_history_csv(result.history, opt.out_dir + "/history.csv", false);
  std::cerr << "learn: wrote dictionary.csv, coefficients.csv, history.csv\n";
  return 0;
}

// -------------------------------------------------------------------- denoise

struct DenoiseOpts {
  std::string image;
  double delta = 0.0;
  double sigma = 0.0;
  double p = 0.0;
  std::string method;
  std::size_t K = 15000;
  std::size_t k = 5;
  std::size_t atoms = 256;
  std::size_t iters = 10;
  std::size_t patch_side = 8;
  std::size_t stride = 0;  // 0 = auto: 2 when both sides >= 512, else 1
  std::uint64_t seed = 0;
  std::string out_dir;
};

void write_dictionary_mosaic(const gdl::DenseMatrix& dict,
                             std::size_t patch_side, const std::string& path) {
  const std::size_t m = dict.cols();
  std::size_t tiles = 1;
  while (tiles * tiles < m) ++tiles;
  gdl::GrayImage img(tiles * patch_side, tiles * patch_side);
  for (std::size_t i = 0; i < m; ++i) {
    double lo = dict(0, i), hi = dict(0, i);
    for (std::size_t r = 1; r < dict.rows(); ++r) {
      lo = std::min(lo, dict(r, i));
      hi = std::max(hi, dict(r, i));
    }
    const double span = hi - lo;
    const std::size_t tr = (i / tiles) * patch_side;
    const std::size_t tc = (i % tiles) * patch_side;
    for (std::size_t pr = 0; pr < patch_side; ++pr)
      for (std::size_t pc = 0; pc < patch_side; ++pc) {
        const double v = dict(pr * patch_side + pc, i);
        img.at(tr + pr, tc + pc) =
            span < 1e-12 ? 0.0 : (v - lo) / span * 255.0;
      }
  }
  gdl::store_pgm(img, path, true);
}

int run_denoise(const DenoiseOpts& opt) {
  const auto t_start = std::chrono::steady_clock::now();
  const gdl::GrayImage clean = gdl::load_pgm(opt.image);
  gdl::NoiseSpec spec;
  spec.delta = opt.delta;
  spec.sigma = opt.sigma;
  spec.p_percent = opt.p;
  const gdl::GrayImage noisy =
      gdl::apply_noise(clean, spec, gdl::Rng::derive_seed(opt.seed, 0));

  std::filesystem::create_directories(opt.out_dir);
  gdl::store_pgm(noisy, opt.out_dir + "/noisy.pgm", true);

  const std::size_t stride =
      opt.stride != 0 ? opt.stride
                      : (clean.height >= 512 && clean.width >= 512 ? 2 : 1);
  auto [patches, grid] = gdl::extract_patches(noisy, opt.patch_side, stride);
  const std::size_t n = patches.cols();
  const std::size_t d = patches.rows();
  std::cerr << "denoise: " << n << " patches of side " << opt.patch_side
            << ", stride " << stride << "\n";

  // Patches are coded around their own means; the means return at
  // reconstruction, so uncoded patches fall back to flat blocks.
  std::vector<double> means(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < d; ++r) s += patches(r, j);
    means[j] = s / static_cast<double>(d);
    for (std::size_t r = 0; r < d; ++r) patches(r, j) -= means[j];
  }

  gdl::DenseMatrix dict;
  gdl::SparseCoeffMatrix a(0, 0, 0);
  const std::uint64_t init_seed = gdl::Rng::derive_seed(opt.seed, 1);
  if (opt.method == "gdl") {
    gdl::GdlConfig cfg;
    cfg.m = opt.atoms;
    cfg.K = opt.K;
    cfg.max_iters = opt.iters;
    cfg.seed = init_seed;
    auto result =
        gdl::gdl_learn(patches, cfg, nullptr, progress_printer("gdl", opt.iters));
    dict = std::move(result.dictionary);
    a = std::move(result.coefficients);
  } else if (opt.method == "ksvd") {
    gdl::BaselineConfig cfg;
    cfg.m = opt.atoms;
    cfg.k_per_column = opt.k;
    cfg.max_iters = opt.iters;
    cfg.seed = init_seed;
    auto result = gdl::ksvd_pk_learn(patches, cfg, nullptr,
                                     progress_printer("ksvd", opt.iters));
    dict = std::move(result.dictionary);
    a = std::move(result.coefficients);
  } else {  // dct: fixed dictionary, one coding pass with per-patch budget k
    std::size_t q = 1;
    while (q * q < opt.atoms) ++q;
    if (q * q != opt.atoms)
      throw FlagError("--method dct needs --atoms to be a perfect square");
    dict = gdl::overcomplete_dct_dictionary(opt.patch_side, q);
    std::cerr << "denoise: coding patches against the fixed DCT dictionary\n";
    a = gdl::column_stage_code(dict, patches,
                               std::vector<std::size_t>(n, opt.k));
  }

  gdl::DenseMatrix recon_patches(d, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> col(d, means[j]);
    for (const auto& [row, val] : a.column(j))
      for (std::size_t r = 0; r < d; ++r) col[r] += val * dict(r, row);
    recon_patches.set_column(j, col);
  }
  const gdl::GrayImage recon = gdl::reconstruct_from_patches(
      recon_patches, grid, noisy.height, noisy.width, &noisy);

  gdl::store_pgm(recon, opt.out_dir + "/reconstructed.pgm", true);
  gdl::store_matrix_csv(dict, opt.out_dir + "/dictionary.csv");
  write_dictionary_mosaic(dict, opt.patch_side,
                          opt.out_dir + "/dictionary-mosaic.pgm");
  gdl::store_pgm(gdl::atom_usage_map(a, grid, noisy.height, noisy.width),
                 opt.out_dir + "/usage-map.pgm", true);

  const double psnr_noisy = gdl::psnr(clean, noisy);
  const double psnr_recon = gdl::psnr(clean, recon);
  const auto t_end = std::chrono::steady_clock::now();
  const double wall = std::chrono::duration<double>(t_end - t_start).count();

  auto metrics = open_out(opt.out_dir + "/metrics.csv");
  metrics << "method,seed,K,iters,psnr_noisy_db,psnr_recon_db,wall_seconds\n"
          << opt.method << ',' << opt.seed << ','
          << (opt.method == "gdl" ? opt.K : 0) << ',' << opt.iters << ','
          << gdl::detail::format_double(psnr_noisy) << ','
          << gdl::detail::format_double(psnr_recon) << ','
          << gdl::detail::format_double(wall) << '\n';
  if (!metrics) throw gdl::IoError("failed writing metrics.csv");
  std::cerr << "denoise: psnr noisy " << psnr_noisy << " dB, reconstructed "
            << psnr_recon << " dB\n";
  return 0;
}

// ---------------------------------------------------------------------- noise

struct NoiseOpts {
  std::string image;
  double delta = 0.0;
  double sigma = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_noise(const NoiseOpts& opt) {
  const gdl::GrayImage img = gdl::load_pgm(opt.image);
  gdl::NoiseSpec spec;
  spec.delta = opt.delta;
  spec.sigma = opt.sigma;
  spec.p_percent = opt.p;
  const gdl::GrayImage noisy = gdl::apply_noise(img, spec, opt.seed);
  gdl::store_pgm(noisy, opt.out, true);
  std::cerr << "noise: wrote " << opt.out << "\n";
  return 0;
}

// ------------------------------------------------------------------- dct-dict

struct DctDictOpts {
  std::size_t patch_side = 8;
  std::size_t atoms_per_dim = 16;
  std::string out;
};

int run_dct_dict(const DctDictOpts& opt) {
  const gdl::DenseMatrix dict =
      gdl::overcomplete_dct_dictionary(opt.patch_side, opt.atoms_per_dim);
  gdl::store_matrix_csv(dict, opt.out);
  std::cerr << "dct-dict: wrote " << dict.rows() << "x" << dict.cols() << " to "
            << opt.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dictionary learning under a global sparsity budget"};
  app.require_subcommand(1);

  SynthBenchOpts sb;
  auto* sb_cmd = app.add_subcommand(
      "synth-bench", "Synthetic-signal benchmark (d=20, m=50, n=1500)");
  sb_cmd->add_option("--series", sb.series, "1: three nonzeros per column; 2: 4500 total nonzeros")
      ->check(CLI::IsMember({1, 2}));
  sb_cmd->add_option("--sigma-list", sb.sigma_list,
                     "Comma-separated noise deviations (default 0)");
  sb_cmd->add_option("--method", sb.method, "gdl, ksvd or mod")
      ->required()
      ->check(CLI::IsMember({"gdl", "ksvd", "mod"}));
  sb_cmd->add_option("--K", sb.K, "Global nonzero budget (gdl, default 4500)");
  sb_cmd->add_option("--k", sb.k, "Per-column sparsity (ksvd/mod, default 3)");
  sb_cmd->add_option("--k-sweep", sb.k_sweep,
                     "Comma-separated k candidates (ksvd/mod); keeps the "
                     "lowest final objective");
  sb_cmd->add_option("--iters", sb.iters, "Iterations (default 100)");
  sb_cmd->add_option("--seed", sb.seed, "Base seed")->required();
  sb_cmd->add_option("--out-dir", sb.out_dir, "Output directory")->required();

  LearnOpts ln;
  auto* ln_cmd =
      app.add_subcommand("learn", "Learn a dictionary from a CSV of signals");
  ln_cmd->add_option("--signals", ln.signals, "d x n matrix CSV, one signal per column")
      ->required()
      ->check(CLI::ExistingFile);
  ln_cmd->add_option("--method", ln.method, "gdl, ksvd or mod")
      ->required()
      ->check(CLI::IsMember({"gdl", "ksvd", "mod"}));
  ln_cmd->add_option("--K", ln.K, "Global nonzero budget (gdl)");
  ln_cmd->add_option("--k", ln.k, "Per-column sparsity (ksvd/mod)");
  ln_cmd->add_option("--atoms", ln.atoms, "Dictionary size (default 50)");
  ln_cmd->add_option("--iters", ln.iters, "Iterations (default 100)");
  ln_cmd->add_option("--seed", ln.seed, "Seed")->required();
  ln_cmd->add_option("--out-dir", ln.out_dir, "Output directory")->required();

  DenoiseOpts dn;
  auto* dn_cmd = app.add_subcommand(
      "denoise", "Corrupt a PGM image, learn on its patches, reconstruct");
  dn_cmd->add_option("--image", dn.image, "Input PGM (P5 or P2, maxval 255)")
      ->required()
      ->check(CLI::ExistingFile);
  dn_cmd->add_option("--delta", dn.delta,
                     "Ramp Gaussian peak deviation (upper-left corner)");
  dn_cmd->add_option("--sigma", dn.sigma, "Homogeneous Gaussian deviation");
  dn_cmd->add_option("--p", dn.p, "Salt-and-pepper percentage [0, 100]");
  dn_cmd->add_option("--method", dn.method, "gdl, ksvd or dct")
      ->required()
      ->check(CLI::IsMember({"gdl", "ksvd", "dct"}));
  dn_cmd->add_option("--K", dn.K, "Global nonzero budget (gdl, default 15000)");
  dn_cmd->add_option("--k", dn.k, "Per-patch sparsity (ksvd/dct, default 5)");
  dn_cmd->add_option("--atoms", dn.atoms, "Dictionary size (default 256)");
  dn_cmd->add_option("--iters", dn.iters, "Training iterations (default 10)");
  dn_cmd->add_option("--patch-side", dn.patch_side, "Patch side (default 8)");
  dn_cmd->add_option("--stride", dn.stride,
                     "Patch stride; 0 = auto (2 for images 512 and larger, "
                     "else 1)");
  dn_cmd->add_option("--seed", dn.seed, "Base seed")->required();
  dn_cmd->add_option("--out-dir", dn.out_dir, "Output directory")->required();

  NoiseOpts nz;
  auto* nz_cmd = app.add_subcommand("noise", "Apply a noise model to a PGM");
  nz_cmd->add_option("--image", nz.image, "Input PGM")
      ->required()
      ->check(CLI::ExistingFile);
  nz_cmd->add_option("--delta", nz.delta, "Ramp Gaussian peak deviation");
  nz_cmd->add_option("--sigma", nz.sigma, "Homogeneous Gaussian deviation");
  nz_cmd->add_option("--p", nz.p, "Salt-and-pepper percentage [0, 100]");
  nz_cmd->add_option("--seed", nz.seed, "Seed")->required();
  nz_cmd->add_option("--out", nz.out, "Output PGM path")->required();

  DctDictOpts dd;
  auto* dd_cmd =
      app.add_subcommand("dct-dict", "Write the overcomplete DCT dictionary");
  dd_cmd->add_option("--patch-side", dd.patch_side, "Patch side p (default 8)");
  dd_cmd->add_option("--atoms-per-dim", dd.atoms_per_dim,
                     "Atoms per axis q (default 16; dictionary is p^2 x q^2)");
  dd_cmd->add_option("--out", dd.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
    if (sb_cmd->parsed()) return run_synth_bench(sb);
    if (ln_cmd->parsed()) return run_learn(ln);
    if (dn_cmd->parsed()) return run_denoise(dn);
    if (nz_cmd->parsed()) return run_noise(nz);
    if (dd_cmd->parsed()) return run_dct_dict(dd);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.get_name() << ": " << e.what() << "\n";
    return 2;
  } catch (const FlagError& e) {
    std::cerr << app.get_name() << ": " << e.what() << "\n";
    return 2;
  } catch (const gdl::Error& e) {
    std::cerr << app.get_name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << app.get_name() << ": " << e.what() << "\n";
    return 1;
  }
}
