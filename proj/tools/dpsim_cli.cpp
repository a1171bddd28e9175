// dpsim command line: sample, scaling, dos, analytic, validate.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "dpsim/analytic.hpp"
#include "dpsim/errors.hpp"
#include "dpsim/harness.hpp"
#include "dpsim/measures.hpp"
#include "dpsim/validate.hpp"

using namespace dpsim;

namespace {

struct Flags {
  std::string config;
  std::map<std::string, std::string> given;

  // Registers --name as a string flag that lands in `given` under `key`.
  void add(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        "--" + name, [this, key](const std::string& v) { given[key] = v; }, help);
  }

  void add_common(CLI::App* app) {
    app->add_option("--config", config, "key=value file; flags override it");
    add(app, "N", "N", "comma-separated qubit counts");
    add(app, "l", "l", "particle number");
    add(app, "m", "m", "block size in qubits");
    add(app, "partition", "partition", "block cut as a+b (b qubits transposed)");
    add(app, "samples", "samples", "samples per grid point");
    add(app, "samples-by-N", "samples_by_N", "per-point overrides N:count,...");
    add(app, "seed", "seed", "master seed");
    add(app, "measure", "measure", "concurrence | log-negativity | dos");
    add(app, "sampler", "sampler", "full | wishart");
    add(app, "bin-width", "bin_width", "histogram bin width");
    add(app, "out", "out", "output path (dos: file stem)");
    add(app, "workers", "workers", "worker threads");
  }

  std::map<std::string, std::string> merged() const {
    auto kv = config.empty() ? std::map<std::string, std::string>{} : read_config_file(config);
    for (const auto& [k, v] : given) kv[k] = v;
    return kv;
  }
};

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw IoError("cannot open " + path);
  return file;
}

int cmd_sample(const Flags& flags, std::uint64_t index) {
  auto kv = flags.merged();
  if (!kv.count("samples")) kv["samples"] = "1";
  const auto config = build_config(kv);
  const SystemShape& shape = config.grid.front();
  const SeedSpec seed = point_seed(config.master_seed, shape, index);
  std::ofstream file;
  std::ostream& os = open_out(config.output_path, file);

  BlockRDM blocks;
  if (config.sampler == SamplerKind::full_state) {
    const auto state = sample_state(shape, seed);
    write_state(os, state);
    blocks = build_blocks(state);
  } else {
    blocks = sample_block_rdm(shape, seed);
  }
  const Mask subset = shape.partition.second > 0 ? shape.transposed_mask() : 0;
  os << "# rho_A\n";
  write_spectrum(os, block_spectrum(blocks), shape, 0, seed);
  if (subset != 0) {
    const auto pt = partial_transpose(assemble_dense(blocks), subset);
    os << "# rho_A partial transpose\n";
    write_spectrum(os, spectrum(pt), shape, subset, seed);
  }
  return 0;
}

int cmd_scaling(const Flags& flags) {
  const auto config = build_config(flags.merged());
  const auto series = run_scaling_experiment(config);
  if (!config.output_path.empty()) write_results(series, config, config.output_path);
  std::cout << std::setprecision(6);
  std::cout << "N,mean,stderr,positive_fraction\n";
  for (const auto& p : series.points)
    std::cout << p.N << ',' << p.mean << ',' << p.std_error << ',' << p.positive_fraction << '\n';
  try {
    const auto fit = classify_decay(series);
    std::cout << "# slope=" << fit.slope << " intercept=" << fit.intercept << " decay=" << to_string(fit.decay)
              << '\n';
  } catch (const InsufficientData& e) {
    std::cout << "# fit: " << e.what() << '\n';
  }
  return 0;
}

int cmd_dos(const Flags& flags) {
  auto kv = flags.merged();
  kv["measure"] = "dos";
  const auto config = build_config(kv);
  const auto dos = dos_experiment(config);
  const std::string stem = config.output_path.empty() ? "dos" : config.output_path;
  write_results(dos, config, stem);
  const auto nf = negative_fraction(dos);
  std::cout << std::setprecision(6) << "shape " << dos.shape.to_string() << ", samples " << dos.samples << '\n'
            << "negative PT eigenvalue fraction " << nf.mean_fraction << " +- " << nf.mean_fraction_stderr << '\n'
            << "NPT sample fraction " << nf.npt_fraction << " +- " << nf.npt_fraction_stderr << '\n'
            << "wrote " << stem << "_rho.csv, " << stem << "_pt.csv, " << stem << "_samples.csv\n";
  return 0;
}

int cmd_analytic(const Flags& flags, const std::string& curve, double x_min, double x_max, int points) {
  const auto kv = flags.merged();
  auto get_int = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw InvalidArgument(std::string("analytic ") + curve + " needs --" + key);
    return std::stoi(it->second);
  };
  std::vector<int> Ns;
  if (auto it = kv.find("N"); it != kv.end()) {
    std::stringstream ss(it->second);
    for (std::string tok; std::getline(ss, tok, ',');) Ns.push_back(std::stoi(tok));
  }
  std::ofstream file;
  std::ostream& os = open_out(kv.count("out") ? kv.at("out") : "", file);
  os << std::setprecision(12) << "# curve=" << curve << '\n';

  auto over_N = [&](auto&& f) {
    if (Ns.empty()) throw InvalidArgument("analytic " + curve + " needs --N");
    for (int N : Ns) os << N << ' ' << f(N) << '\n';
  };
  auto over_x = [&](auto&& f) {
    if (points < 2 || !(x_max > x_min)) throw InvalidArgument("need --points >= 2 and --x-max > --x-min");
    for (int i = 0; i < points; ++i) {
      const double x = x_min + (x_max - x_min) * i / (points - 1);
      os << x << ' ' << f(x) << '\n';
    }
  };

  if (curve == "prob") {
    const int l = get_int("l");
    over_N([&](int N) { return prob_c_positive(N, l); });
  } else if (curve == "prob-averaged") {
    const int l = get_int("l");
    over_N([&](int N) { return prob_c_positive_a00_averaged(N, l); });
  } else if (curve == "bound1" || curve == "bound2") {
    const int l = get_int("l");
    over_N([&](int N) {
      const auto b = prob_c_bounds(N, l);
      return curve == "bound1" ? b.bound1 : b.bound2;
    });
  } else if (curve == "small-l") {
    const int l = get_int("l");
    over_N([&](int N) { return small_l_bound(N, l); });
  } else if (curve == "mean-c") {
    const int l = get_int("l");
    over_N([&](int N) { return mean_c_estimate(N, l).estimate_value(); });
  } else if (curve == "ln-asymptote") {
    const int l = get_int("l"), m = get_int("m");
    over_N([&](int N) { return ln_asymptote(m, l, N); });
  } else if (curve == "p12" || curve == "p33") {
    if (Ns.size() != 1) throw InvalidArgument("densities take a single --N");
    const auto p = make_two_qubit_params(Ns.front(), get_int("l"));
    over_x([&](double x) { return curve == "p12" ? p12_density(x, p) : p33_density(x, p); });
  } else if (curve == "mp" || curve == "lone-first" || curve == "lone-last") {
    if (Ns.size() != 1) throw InvalidArgument("densities take a single --N");
    const auto shape = make_shape(Ns.front(), get_int("l"), get_int("m"));
    if (curve == "mp") {
      // Largest block of rho_A against the columns feeding it.
      BlockIndex best = qk_dims(shape, 0);
      for (int k = 1; k < block_count(shape); ++k) {
        const auto d = qk_dims(shape, k);
        if (d.rows > best.rows) best = d;
      }
      const auto mp = make_mp_params(static_cast<double>(std::min(best.rows, best.cols)),
                                     static_cast<double>(std::max(best.rows, best.cols)));
      over_x([&](double x) { return dos_model_density(x, mp, DosKind::marcenko_pastur); });
    } else {
      const auto lone = make_lone_params(shape, curve == "lone-first" ? LoneBlock::first : LoneBlock::last);
      over_x([&](double x) { return dos_model_density(x, lone, DosKind::lone); });
    }
  } else if (curve == "entropy") {
    over_x([](double x) { return binary_entropy(x); });
  } else {
    throw InvalidArgument("unknown curve '" + curve + "'");
  }
  return 0;
}

int cmd_validate(const Flags& flags, const std::string& scratch) {
  const auto kv = flags.merged();
  ValidationOptions o;
  if (auto it = kv.find("seed"); it != kv.end()) o.seed = std::stoull(it->second);
  if (auto it = kv.find("samples"); it != kv.end()) {
    o.concurrence_samples = std::stoull(it->second);
    o.transpose_cases = o.concurrence_samples;
  }
  o.scratch_dir = scratch;
  int failed = 0;
  for (const auto& r : run_validation(o)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    failed += !r.passed;
  }
  std::cout << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("dpsim ") + kVersion + ": random definite-particle states"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Flags sample_f, scaling_f, dos_f, analytic_f, validate_f;
  std::uint64_t index = 0;
  auto* sample = app.add_subcommand("sample", "dump one state and its spectra");
  sample_f.add_common(sample);
  sample->add_option("--index", index, "sample index under the master seed");

  auto* scaling = app.add_subcommand("scaling", "mean measure vs N");
  scaling_f.add_common(scaling);

  auto* dos = app.add_subcommand("dos", "eigenvalue histograms of rho_A and its partial transpose");
  dos_f.add_common(dos);

  std::string curve = "prob";
  double x_min = 0.0, x_max = 1.0;
  int points = 101;
  auto* analytic = app.add_subcommand("analytic", "closed-form curves as two-column data");
  analytic_f.add_common(analytic);
  analytic->add_option("--curve", curve,
                       "prob | prob-averaged | bound1 | bound2 | small-l | mean-c | ln-asymptote | "
                       "p12 | p33 | mp | lone-first | lone-last | entropy");
  analytic->add_option("--x-min", x_min);
  analytic->add_option("--x-max", x_max);
  analytic->add_option("--points", points);

  std::string scratch = ".";
  auto* validate = app.add_subcommand("validate", "property suite");
  validate_f.add_common(validate);
  validate->add_option("--scratch", scratch, "directory for rerun files");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sample) return cmd_sample(sample_f, index);
    if (*scaling) return cmd_scaling(scaling_f);
    if (*dos) return cmd_dos(dos_f);
    if (*analytic) return cmd_analytic(analytic_f, curve, x_min, x_max, points);
    if (*validate) return cmd_validate(validate_f, scratch);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
