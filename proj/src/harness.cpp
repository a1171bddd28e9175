#include "dpsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "dpsim/errors.hpp"
#include "dpsim/measures.hpp"

namespace dpsim {

namespace {

constexpr std::uint64_t kChunk = 1 << 14;


std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

/// Runs body(begin, end) over [0, n) split across `workers` threads.
template <class Body>
void parallel_range(std::uint64_t n, int workers, Body body) {
  if (workers <= 1 || n < 2) {
    body(std::uint64_t{0}, n);
    return;
  }
  const auto w = static_cast<std::uint64_t>(std::min<std::uint64_t>(workers, n));
  std::vector<std::exception_ptr> errors(w);
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t t = 0; t < w; ++t)
      pool.emplace_back([&, t] {
        try {
          body(n * t / w, n * (t + 1) / w);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

void write_metadata(std::ostream& os, const ExperimentConfig& config) {
  for (const auto& [k, v] : config_metadata(config)) os << "# " << k << '=' << v << "\n";
}

std::string partition_text(const Partition& p) {
  return std::to_string(p.first) + "+" + std::to_string(p.second);
}

struct LineFit {
  double slope = 0, intercept = 0, residual = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = x[i];
    design(i, 1) = 1.0;
    rhs(i) = y[i];
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef(0), coef(1), (design * coef - rhs).squaredNorm()};
}

struct Usable {
  std::vector<double> N, log_mean;
  std::vector<int> used, excluded;
};

Usable usable_points(const ScalingSeries& series) {
  Usable u;
  for (const auto& p : series.points) {
    if (p.mean > 0.0 && p.std_error <= 0.5 * p.mean) {
      u.N.push_back(p.N);
      u.log_mean.push_back(std::log(p.mean));
      u.used.push_back(p.N);
    } else {
      u.excluded.push_back(p.N);
    }
  }
  if (u.used.size() < 4)
    throw InsufficientData("need at least 4 usable points, have " + std::to_string(u.used.size()));
  return u;
}

}  // namespace

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::concurrence: return "concurrence";
    case MeasureKind::log_negativity: return "log-negativity";
    case MeasureKind::dos: return "dos";
  }
  return "?";
}

std::string to_string(SamplerKind kind) {
  return kind == SamplerKind::full_state ? "full" : "wishart";
}

std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::algebraic: return "algebraic";
    case DecayClass::exponential: return "exponential";
    case DecayClass::undetermined: return "undetermined";
  }
  return "?";
}

MeasureKind parse_measure(const std::string& text) {
  if (text == "concurrence") return MeasureKind::concurrence;
  if (text == "log-negativity" || text == "logneg" || text == "ln") return MeasureKind::log_negativity;
  if (text == "dos") return MeasureKind::dos;
  throw InvalidArgument("unknown measure '" + text + "'");
}

SamplerKind parse_sampler(const std::string& text) {
  if (text == "full") return SamplerKind::full_state;
  if (text == "wishart") return SamplerKind::wishart;
  throw InvalidArgument("unknown sampler '" + text + "'");
}

std::uint64_t ExperimentConfig::samples_for(int N) const {
  const auto it = samples_by_N.find(N);
  return it == samples_by_N.end() ? samples : it->second;
}

void ExperimentConfig::validate() const {
  if (grid.empty()) throw InvalidArgument("experiment grid is empty");
  if (samples < 1) throw InvalidArgument("samples must be at least 1");
  for (const auto& [n, s] : samples_by_N)
    if (s < 1) throw InvalidArgument("samples override for N=" + std::to_string(n) + " is zero");
  if (workers < 1) throw InvalidArgument("workers must be at least 1");
  for (const auto& s : grid)
    if (!(make_shape(s.N, s.l, s.m, s.m > 1 ? s.partition.second : -1) == s))
      throw InvalidArgument("grid shape " + s.to_string() + " is not canonical");
  if (measure == MeasureKind::concurrence)
    for (const auto& s : grid)
      if (s.m != 2) throw InvalidArgument("concurrence needs a block of m = 2 qubits");
  if (measure == MeasureKind::log_negativity)
    for (const auto& s : grid) s.transposed_mask();
  if (!(bin_width > 0.0)) throw InvalidArgument("bin_width must be positive");
}

SeedSpec point_seed(std::uint64_t master_seed, const SystemShape& shape, std::uint64_t sample_index) {
  const std::uint64_t tag = (std::uint64_t(shape.N) << 48) | (std::uint64_t(shape.l) << 32) |
                            (std::uint64_t(shape.m) << 16) | std::uint64_t(shape.partition.second);
  return {splitmix64(master_seed ^ splitmix64(tag)), sample_index};
}

BlockRDM draw_sample(const SystemShape& shape, SeedSpec seed, SamplerKind sampler) {
  if (sampler == SamplerKind::wishart) return sample_block_rdm(shape, seed);
  return build_blocks(sample_state(shape, seed));
}

double evaluate_measure(const BlockRDM& blocks, MeasureKind kind) {
  switch (kind) {
    case MeasureKind::concurrence: {
      if (blocks.shape.m != 2) throw InvalidArgument("concurrence needs m = 2");
      return concurrence_structured(assemble_dense(blocks)).value;
    }
    case MeasureKind::log_negativity:
      return log_negativity(assemble_dense(blocks), blocks.shape.transposed_mask()).log_negativity;
    case MeasureKind::dos: break;
  }
  throw InvalidArgument("measure has no scalar value per sample");
}

std::vector<double> sample_values(const SystemShape& shape, std::uint64_t samples,
                                  std::uint64_t master_seed, MeasureKind kind, SamplerKind sampler,
                                  int workers) {
  std::vector<double> values(samples);
  parallel_range(samples, workers, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i)
      values[i] = evaluate_measure(draw_sample(shape, point_seed(master_seed, shape, i), sampler), kind);
  });
  return values;
}

ScalingSeries run_scaling_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.measure == MeasureKind::dos) throw InvalidArgument("use dos_experiment for the dos measure");
  ScalingSeries series;
  series.measure = to_string(config.measure);
  series.l = config.grid.front().l;
  series.m = config.grid.front().m;
  series.partition = config.grid.front().partition;

  for (const auto& shape : config.grid) {
    const std::uint64_t n = config.samples_for(shape.N);
    // Welford accumulation in sample-index order.
    double mean = 0.0, m2 = 0.0;
    std::uint64_t positive = 0, seen = 0;
    std::vector<double> chunk;
    for (std::uint64_t start = 0; start < n; start += kChunk) {
      const std::uint64_t len = std::min(kChunk, n - start);
      chunk.assign(len, 0.0);
      try {
        parallel_range(len, config.workers, [&](std::uint64_t b, std::uint64_t e) {
          for (std::uint64_t i = b; i < e; ++i)
            chunk[i] = evaluate_measure(
                draw_sample(shape, point_seed(config.master_seed, shape, start + i), config.sampler),
                config.measure);
        });
      } catch (const CapacityError& e) {
        throw CapacityError("shape " + shape.to_string() + ": " + e.what());
      }
      for (double v : chunk) {
        ++seen;
        const double delta = v - mean;
        mean += delta / static_cast<double>(seen);
        m2 += delta * (v - mean);
        if (v > 0.0) ++positive;
      }
    }
    ScalingPoint p;
    p.N = shape.N;
    p.samples = n;
    p.mean = mean;
    p.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
    p.positive_fraction = static_cast<double>(positive) / static_cast<double>(n);
    series.points.push_back(p);
  }
  return series;
}

FitResult fit_power_law(const ScalingSeries& series) {
  const auto u = usable_points(series);
  std::vector<double> logN;
  for (double n : u.N) logN.push_back(std::log(n));
  const auto fit = least_squares(logN, u.log_mean);
  FitResult r;
  r.slope = fit.slope;
  r.intercept = fit.intercept;
  r.residual = fit.residual;
  r.algebraic_residual = fit.residual;
  r.used_N = u.used;
  r.excluded_N = u.excluded;
  return r;
}

FitResult classify_decay(const ScalingSeries& series) {
  const auto u = usable_points(series);
  std::vector<double> logN;
  for (double n : u.N) logN.push_back(std::log(n));
  const auto alg = least_squares(logN, u.log_mean);
  const auto ex = least_squares(u.N, u.log_mean);

  FitResult r;
  r.used_N = u.used;
  r.excluded_N = u.excluded;
  r.algebraic_residual = alg.residual;
  r.exponential_residual = ex.residual;
  const double worst = std::max(alg.residual, ex.residual);
  const double margin = worst > 0.0 ? std::abs(alg.residual - ex.residual) / worst : 0.0;
  if (margin < 0.05)
    r.decay = DecayClass::undetermined;
  else
    r.decay = ex.residual < alg.residual ? DecayClass::exponential : DecayClass::algebraic;
  const auto& win = r.decay == DecayClass::exponential ? ex : alg;
  r.slope = win.slope;
  r.intercept = win.intercept;
  r.residual = win.residual;
  return r;
}

double Histogram::bin_center(std::size_t i) const {
  return (static_cast<double>(first_bin + static_cast<std::int64_t>(i)) + 0.5) * width;
}

std::uint64_t Histogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::uint64_t Histogram::count_below(double edge) const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (static_cast<double>(first_bin + static_cast<std::int64_t>(i) + 1) * width <= edge) t += counts[i];
  return t;
}

namespace {

Histogram make_histogram(const std::vector<double>& values, double width) {
  Histogram h;
  h.width = width;
  if (values.empty()) return h;
  std::vector<std::int64_t> bins(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    bins[i] = static_cast<std::int64_t>(std::floor(values[i] / width));
  const auto [lo, hi] = std::minmax_element(bins.begin(), bins.end());
  h.first_bin = *lo;
  h.counts.assign(static_cast<std::size_t>(*hi - *lo + 1), 0);
  for (auto b : bins) ++h.counts[static_cast<std::size_t>(b - h.first_bin)];
  return h;
}

}  // namespace

DosResult dos_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.grid.size() != 1) throw InvalidArgument("dos_experiment takes exactly one shape");
  const auto& shape = config.grid.front();
  const std::uint64_t n = config.samples_for(shape.N);
  const Mask subset = shape.transposed_mask();
  const auto dim = static_cast<std::size_t>(1) << shape.m;

  std::vector<double> rho_values(n * dim), pt_values(n * dim);
  DosResult out{shape, n, {}, {}, std::vector<DosSample>(n)};
  parallel_range(n, config.workers, [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t i = b; i < e; ++i) {
      const auto blocks = draw_sample(shape, point_seed(config.master_seed, shape, i), config.sampler);
      const auto rho_spec = block_spectrum(blocks);
      const auto pt_spec = spectrum(partial_transpose(assemble_dense(blocks), subset));
      std::copy(rho_spec.eigenvalues.begin(), rho_spec.eigenvalues.end(), rho_values.begin() + i * dim);
      std::copy(pt_spec.eigenvalues.begin(), pt_spec.eigenvalues.end(), pt_values.begin() + i * dim);
      out.per_sample[i] = {pt_spec.min(), static_cast<int>(rho_spec.count_zero(kZeroEigenvalueTol)),
                           static_cast<int>(pt_spec.count_negative(kZeroEigenvalueTol))};
    }
  });
  out.rho = make_histogram(rho_values, config.bin_width);
  out.pt = make_histogram(pt_values, config.bin_width);
  return out;
}

NegativeFraction negative_fraction(const DosResult& dos) {
  NegativeFraction r;
  const auto n = dos.per_sample.size();
  if (n == 0) return r;
  const double dim = std::ldexp(1.0, dos.shape.m);
  double mean = 0.0, m2 = 0.0, npt = 0.0;
  std::size_t seen = 0;
  for (const auto& s : dos.per_sample) {
    const double f = s.pt_negative_count / dim;
    ++seen;
    const double delta = f - mean;
    mean += delta / static_cast<double>(seen);
    m2 += delta * (f - mean);
    if (s.pt_negative_count > 0) npt += 1.0;
  }
  const double dn = static_cast<double>(n);
  r.mean_fraction = mean;
  r.mean_fraction_stderr = n > 1 ? std::sqrt(m2 / (dn - 1.0) / dn) : 0.0;
  r.npt_fraction = npt / dn;
  r.npt_fraction_stderr = std::sqrt(r.npt_fraction * (1.0 - r.npt_fraction) / dn);
  return r;
}

std::vector<std::pair<std::string, std::string>> config_metadata(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> md;
  md.emplace_back("dpsim_version", kVersion);
  md.emplace_back("stream_version", std::to_string(NormalStream::kVersion));
  md.emplace_back("measure", to_string(config.measure));
  md.emplace_back("sampler", to_string(config.sampler));
  md.emplace_back("seed", std::to_string(config.master_seed));
  md.emplace_back("samples", std::to_string(config.samples));
  std::string overrides, ns;
  for (const auto& [n, s] : config.samples_by_N)
    overrides += (overrides.empty() ? "" : ",") + std::to_string(n) + ":" + std::to_string(s);
  if (!overrides.empty()) md.emplace_back("samples_by_N", overrides);
  for (const auto& s : config.grid) ns += (ns.empty() ? "" : ",") + std::to_string(s.N);
  md.emplace_back("N", ns);
  if (!config.grid.empty()) {
    md.emplace_back("l", std::to_string(config.grid.front().l));
    md.emplace_back("m", std::to_string(config.grid.front().m));
    md.emplace_back("partition", partition_text(config.grid.front().partition));
  }
  if (config.measure == MeasureKind::dos) {
    std::ostringstream w;
    w << std::setprecision(17) << config.bin_width;
    md.emplace_back("bin_width", w.str());
  }
  return md;
}

void write_results(const ScalingSeries& series, const ExperimentConfig& config, const std::string& path) {
  auto os = open_out(path);
  write_metadata(os, config);
  os << "N,mean,stderr,positive_fraction\n" << std::setprecision(17);
  for (const auto& p : series.points)
    os << p.N << ',' << p.mean << ',' << p.std_error << ',' << p.positive_fraction << "\n";
  if (!os) throw IoError("failed writing '" + path + "'");
}

void write_results(const DosResult& dos, const ExperimentConfig& config, const std::string& stem) {
  auto write_hist = [&](const Histogram& h, const std::string& path, const char* which) {
    auto os = open_out(path);
    write_metadata(os, config);
    os << "# spectrum=" << which << "\n" << std::setprecision(17);
    os << "# bin_width=" << h.width << "\n# total=" << h.total() << "\n";
    os << "bin_center,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) os << h.bin_center(i) << ',' << h.counts[i] << "\n";
    if (!os) throw IoError("failed writing '" + path + "'");
  };
  write_hist(dos.rho, stem + "_rho.csv", "rho_A");
  write_hist(dos.pt, stem + "_pt.csv", "partial_transpose");

  const std::string path = stem + "_samples.csv";
  auto os = open_out(path);
  write_metadata(os, config);
  os << "sample,min_pt_eigenvalue,rho_zero_count,pt_negative_count\n" << std::setprecision(17);
  for (std::size_t i = 0; i < dos.per_sample.size(); ++i) {
    const auto& s = dos.per_sample[i];
    os << i << ',' << s.min_pt_eigenvalue << ',' << s.rho_zero_count << ',' << s.pt_negative_count << "\n";
  }
  if (!os) throw IoError("failed writing '" + path + "'");
}

ScalingSeries read_series(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  ScalingSeries s;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto kv = parse_config_text(line.substr(1));
      if (auto it = kv.find("measure"); it != kv.end()) s.measure = it->second;
      if (auto it = kv.find("l"); it != kv.end()) s.l = std::stoi(it->second);
      if (auto it = kv.find("m"); it != kv.end()) s.m = std::stoi(it->second);
      if (auto it = kv.find("partition"); it != kv.end()) {
        const auto parts = split(it->second, '+');
        if (parts.size() == 2) s.partition = {std::stoi(parts[0]), std::stoi(parts[1])};
      }
      continue;
    }
    if (!header) {
      if (line != "N,mean,stderr,positive_fraction") throw IoError("'" + path + "' is not a series file");
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 4) throw IoError("malformed row in '" + path + "': " + line);
    ScalingPoint p;
    p.N = std::stoi(cells[0]);
    p.mean = std::stod(cells[1]);
    p.std_error = std::stod(cells[2]);
    p.positive_fraction = std::stod(cells[3]);
    s.points.push_back(p);
  }
  return s;
}

Histogram read_histogram(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  Histogram h;
  std::string line;
  std::vector<std::pair<double, std::uint64_t>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto kv = parse_config_text(line.substr(1));
      if (auto it = kv.find("bin_width"); it != kv.end()) h.width = std::stod(it->second);
      continue;
    }
    if (line == "bin_center,count") continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw IoError("malformed row in '" + path + "': " + line);
    rows.emplace_back(std::stod(cells[0]), std::stoull(cells[1]));
  }
  if (!(h.width > 0.0)) throw IoError("'" + path + "' has no bin_width");
  if (!rows.empty()) h.first_bin = static_cast<std::int64_t>(std::llround(rows.front().first / h.width - 0.5));
  for (const auto& r : rows) h.counts.push_back(r.second);
  return h;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line without '=': " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

ExperimentConfig build_config(const std::map<std::string, std::string>& kv) {
  auto get = [&](const std::string& k) -> const std::string* {
    const auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  ExperimentConfig c;
  if (auto v = get("measure")) c.measure = parse_measure(*v);
  if (auto v = get("sampler")) c.sampler = parse_sampler(*v);
  if (auto v = get("samples")) c.samples = std::stoull(*v);
  if (auto v = get("seed")) c.master_seed = std::stoull(*v);
  if (auto v = get("workers")) c.workers = std::stoi(*v);
  if (auto v = get("bin_width")) c.bin_width = std::stod(*v);
  if (auto v = get("out")) c.output_path = *v;
  if (auto v = get("samples_by_N"))
    for (const auto& item : split(*v, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw InvalidArgument("samples_by_N entries look like N:count");
      c.samples_by_N[std::stoi(parts[0])] = std::stoull(parts[1]);
    }

  const auto* ns = get("N");
  const auto* l = get("l");
  const auto* m = get("m");
  if (!ns || !l || !m) throw InvalidArgument("config needs N, l and m");
  int transposed = -1;
  if (auto v = get("partition")) {
    const auto parts = split(*v, '+');
    if (parts.size() != 2) throw InvalidArgument("partition looks like a+b");
    transposed = std::stoi(parts[1]);
    if (std::stoi(parts[0]) + transposed != std::stoi(*m))
      throw InvalidArgument("partition sizes must sum to m");
  }
  for (const auto& n : split(*ns, ','))
    c.grid.push_back(make_shape(std::stoi(n), std::stoi(*l), std::stoi(*m), transposed));
  c.validate();
  return c;
}

}  // namespace dpsim
