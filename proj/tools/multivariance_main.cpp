#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "multivariance/csv.hpp"
#include "multivariance/errors.hpp"
#include "multivariance/experiments.hpp"
#include "multivariance/inference.hpp"
#include "multivariance/oracle.hpp"
#include "multivariance/serialize.hpp"
#include "multivariance/statistics.hpp"

namespace mv = multivariance;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

// Above this sample size the dense N x N matrices are skipped in favour of
// the streaming kernels.
constexpr int kStreamingThreshold = 1500;

struct Options {
  std::string command;
  std::string input;
  std::string blocks;
  std::vector<std::string> psi{"euclid"};
  std::string method = "conservative";
  std::string statistic = "normalized-total";
  double alpha = 0.05;
  int resamples = mv::kDefaultResamples;
  std::uint64_t seed = 1;
  std::string output;
  std::string format;  // json unless given; power defaults to csv
  // generated-data commands
  std::string generator = "bernstein";
  std::vector<int> l_values{1};
  int sample_size = 100;
  int replications = 1000;
  std::string test = "2";
  int instances = 100;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.output.empty() || opt.output == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(opt.output);
  if (!out) throw mv::InputError("cannot open output file '" + opt.output + "'");
  out << text << "\n";
}

std::string effective_format(const Options& opt) {
  if (!opt.format.empty()) return opt.format;
  return opt.command == "power" ? "csv" : "json";
}

std::vector<mv::CndfSpec> make_specs(const std::vector<std::string>& psi,
                                     const std::vector<int>& widths) {
  const int n = static_cast<int>(widths.size());
  if (psi.size() != 1 && static_cast<int>(psi.size()) != n) {
    throw mv::InputError("--psi takes one spec (broadcast) or one per block; got " +
                         std::to_string(psi.size()) + " for " + std::to_string(n) +
                         " blocks");
  }
  std::vector<mv::CndfSpec> specs;
  specs.reserve(n);
  for (int i = 0; i < n; ++i) {
    const std::string& text = psi.size() == 1 ? psi.front() : psi[i];
    specs.push_back(mv::parse_cndf(text, widths[i]));
  }
  return specs;
}

mv::StatisticKind parse_statistic(const std::string& name) {
  if (name == "m") return mv::StatisticKind::M;
  if (name == "total") return mv::StatisticKind::TotalM;
  if (name == "normalized") return mv::StatisticKind::NormalizedM;
  if (name == "normalized-total") return mv::StatisticKind::NormalizedTotalM;
  throw mv::InputError("unknown --statistic '" + name + "'");
}

mv::MultivarianceEstimates estimates_for(const mv::BlockSample& sample,
                                         const std::vector<mv::CndfSpec>& specs) {
  if (sample.sample_size() > kStreamingThreshold) {
    return mv::compute_estimates_streaming(sample, specs);
  }
  return mv::compute_estimates(mv::centered_matrices(sample, specs));
}

int run_compute(const Options& opt) {
  if (opt.input.empty() || opt.blocks.empty()) {
    throw mv::InputError("compute needs --input and --blocks");
  }
  const mv::BlockSample sample = mv::ingest_csv(opt.input, opt.blocks);
  const auto specs = make_specs(opt.psi, sample.block_widths());
  mv::MultivarianceEstimates e = estimates_for(sample, specs);
  if (sample.block_count() == 1) {
    std::cerr << "warning: a single block has multivariance 0 by definition\n";
    e.m2 = 0.0;
    e.normalized_m2 = 0.0;
  }
  emit(opt, effective_format(opt) == "csv" ? mv::to_csv(e) : mv::to_json(e));
  return kExitOk;
}

int run_test(const Options& opt) {
  if (opt.input.empty() || opt.blocks.empty()) {
    throw mv::InputError("test needs --input and --blocks");
  }
  const mv::BlockSample sample = mv::ingest_csv(opt.input, opt.blocks);
  const auto specs = make_specs(opt.psi, sample.block_widths());
  mv::TestReport report;
  if (opt.method == "conservative") {
    if (opt.statistic == "normalized") {
      report = mv::test_multivariance_conservative(sample, specs, opt.alpha);
    } else if (opt.statistic == "normalized-total") {
      report = mv::test_total_conservative(sample, specs, opt.alpha);
    } else {
      throw mv::InputError("--method conservative requires --statistic normalized "
                           "or normalized-total");
    }
  } else if (opt.method == "permutation") {
    report = mv::permutation_test(sample, specs, parse_statistic(opt.statistic),
                                  opt.resamples, opt.seed, opt.alpha);
  } else if (opt.method == "montecarlo") {
    // Marginals estimated by the sample itself: each block resampled
    // independently with replacement.
    std::vector<mv::MarginalSampler> marginals;
    const int N = sample.sample_size();
    for (int i = 0; i < sample.block_count(); ++i) {
      marginals.push_back([&sample, i, N](mv::CounterRng& rng) {
        return Eigen::RowVectorXd(
            sample.observation(i, static_cast<int>(rng.next_below(N))));
      });
    }
    report = mv::montecarlo_test(sample, specs, marginals,
                                 parse_statistic(opt.statistic), opt.resamples,
                                 opt.seed, opt.alpha);
  } else {
    throw mv::InputError("unknown --method '" + opt.method + "'");
  }
  if (!report.warning.empty()) std::cerr << "warning: " << report.warning << "\n";
  emit(opt, effective_format(opt) == "csv" ? mv::to_csv(report) : mv::to_json(report));
  return kExitOk;
}

int run_power(const Options& opt) {
  mv::PowerStudyConfig config;
  if (opt.generator == "bernstein") {
    config.generator = mv::GeneratorKind::Bernstein;
  } else if (opt.generator == "sinusoidal") {
    config.generator = mv::GeneratorKind::Sinusoidal;
  } else if (opt.generator == "uniform") {
    config.generator = mv::GeneratorKind::IndependentUniform;
  } else {
    throw mv::InputError("unknown --generator '" + opt.generator + "'");
  }
  if (opt.test == "1") {
    config.test = mv::TestKind::Test1;
  } else if (opt.test == "2") {
    config.test = mv::TestKind::Test2;
  } else if (opt.test == "permutation") {
    config.test = mv::TestKind::Permutation;
  } else {
    throw mv::InputError("unknown --test '" + opt.test + "' (1, 2 or permutation)");
  }
  config.sample_size = opt.sample_size;
  config.replications = opt.replications;
  config.alpha = opt.alpha;
  config.resamples = opt.resamples;
  config.seed = opt.seed;
  const std::vector<int> widths(mv::block_count_of(config.generator), 1);
  config.specs = make_specs(opt.psi, widths);

  std::vector<mv::PowerRow> rows;
  if (config.generator == mv::GeneratorKind::Sinusoidal) {
    for (int l : opt.l_values) {
      config.sinusoidal_l = l;
      rows.push_back(mv::power_study(config));
    }
  } else {
    rows.push_back(mv::power_study(config));
  }
  emit(opt, effective_format(opt) == "json" ? mv::to_json(rows) : mv::to_csv(rows));
  return kExitOk;
}

int run_bernstein(const Options& opt) {
  const int N = opt.sample_size;
  const mv::BlockSample sample = mv::bernstein_sample(N, opt.seed);
  const auto specs = make_specs({"euclid"}, sample.block_widths());
  const mv::MultivarianceEstimates e = estimates_for(sample, specs);

  double pairwise_m2[3];
  const std::pair<int, int> pairs[3] = {{0, 1}, {0, 2}, {1, 2}};
  for (int k = 0; k < 3; ++k) {
    Eigen::MatrixXd cols(N, 2);
    cols.col(0) = sample.data().col(pairs[k].first);
    cols.col(1) = sample.data().col(pairs[k].second);
    const mv::BlockSample pair_sample(std::move(cols), {1, 1});
    const auto pair_specs = make_specs({"euclid"}, pair_sample.block_widths());
    pairwise_m2[k] = estimates_for(pair_sample, pair_specs).m2;
  }

  const mv::BernsteinPopulation pop = mv::bernstein_population();
  std::ostringstream out;
  out << "{\"N\":" << N << ",\"seed\":" << opt.seed
      << ",\"analytic\":{\"m\":" << mv::format_double(std::sqrt(pop.m2))
      << ",\"m2\":" << mv::format_double(pop.m2)
      << ",\"total_m2\":" << mv::format_double(pop.total_m2)
      << ",\"normalized_m\":" << mv::format_double(pop.normalized_m)
      << ",\"normalized_total_m\":" << mv::format_double(pop.normalized_total_m)
      << ",\"multicorrelation\":" << mv::format_double(pop.multicorrelation)
      << ",\"a\":" << mv::format_double(pop.a) << ",\"b\":" << mv::format_double(pop.b)
      << ",\"pairwise_m2\":" << mv::format_double(pop.pairwise_m2) << '}'
      << ",\"sample\":{\"m\":" << mv::format_double(e.m())
      << ",\"m2\":" << mv::format_double(e.m2)
      << ",\"total_m2\":" << mv::format_double(e.total_m2)
      << ",\"normalized_m\":" << mv::format_double(e.normalized_m())
      << ",\"normalized_total_m\":" << mv::format_double(e.normalized_total_m())
      << ",\"multicorrelation\":" << mv::format_double(e.multicorrelation())
      << ",\"a_hat\":[" << mv::format_double(e.a_hat(0)) << ','
      << mv::format_double(e.a_hat(1)) << ',' << mv::format_double(e.a_hat(2)) << ']'
      << ",\"b_hat\":[" << mv::format_double(e.b_hat(0)) << ','
      << mv::format_double(e.b_hat(1)) << ',' << mv::format_double(e.b_hat(2)) << ']'
      << ",\"pairwise_m2\":[" << mv::format_double(pairwise_m2[0]) << ','
      << mv::format_double(pairwise_m2[1]) << ',' << mv::format_double(pairwise_m2[2])
      << "]}}";
  emit(opt, out.str());
  return kExitOk;
}

int run_oracle_check(const Options& opt) {
  mv::CounterRng root(opt.seed);
  double max_rel_bruteforce = 0.0;
  double max_rel_population = 0.0;
  double max_rel_subsets = 0.0;
  const double tol = 1e-10;

  for (int inst = 0; inst < opt.instances; ++inst) {
    mv::CounterRng rng = root.substream(inst);
    const int n = 2 + static_cast<int>(rng.next_below(3));
    const int N = 3 + static_cast<int>(rng.next_below(8));
    std::vector<int> widths(n);
    int d = 0;
    for (int i = 0; i < n; ++i) {
      widths[i] = 1 + static_cast<int>(rng.next_below(3));
      d += widths[i];
    }
    Eigen::MatrixXd data(N, d);
    for (int r = 0; r < N; ++r) {
      for (int c = 0; c < d; ++c) data(r, c) = rng.next_normal();
    }
    const mv::BlockSample sample(std::move(data), widths);
    std::vector<mv::CndfSpec> specs;
    for (int i = 0; i < n; ++i) {
      switch (rng.next_below(3)) {
        case 0:
          specs.push_back(mv::CndfSpec::stable(0.3 + 1.5 * rng.next_double(), widths[i]));
          break;
        case 1:
          specs.push_back(mv::CndfSpec::minkowski(1.05 + 0.95 * rng.next_double(), widths[i]));
          break;
        default:
          specs.push_back(mv::CndfSpec::bounded_exp(0.2 + 2.0 * rng.next_double(), widths[i]));
          break;
      }
    }
    const auto mats = mv::centered_matrices(sample, specs);
    const double fast = mv::sample_multivariance(mats);
    const double brute = mv::sample_multivariance_bruteforce(sample, specs);
    const double pop = mv::population_multivariance_exact(
        mv::FiniteDistribution::empirical(sample), specs);
    const double total = mv::sample_total_multivariance(mats);
    const double subsets = mv::total_via_subset_enumeration(mats);
    const double scale = std::max({1e-30, std::abs(fast), std::abs(brute), std::abs(pop)});
    max_rel_bruteforce = std::max(max_rel_bruteforce, std::abs(fast - brute) / scale);
    max_rel_population = std::max(max_rel_population, std::abs(fast - pop) / scale);
    const double tscale = std::max({1e-30, std::abs(total), std::abs(subsets)});
    max_rel_subsets = std::max(max_rel_subsets, std::abs(total - subsets) / tscale);
  }

  const bool pass = max_rel_bruteforce <= tol && max_rel_population <= tol &&
                    max_rel_subsets <= tol;
  std::ostringstream out;
  out << "{\"instances\":" << opt.instances
      << ",\"max_rel_err_bruteforce\":" << mv::format_double(max_rel_bruteforce)
      << ",\"max_rel_err_population\":" << mv::format_double(max_rel_population)
      << ",\"max_rel_err_subset_sum\":" << mv::format_double(max_rel_subsets)
      << ",\"tolerance\":" << mv::format_double(tol)
      << ",\"pass\":" << (pass ? "true" : "false") << '}';
  emit(opt, out.str());
  std::cerr << (pass ? "oracle-check: all agreements within tolerance\n"
                     : "oracle-check: agreement FAILURE\n");
  return pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"distance multivariance: dependence measures and independence tests"};
  app.add_option("--command", opt.command, "compute | test | power | bernstein | oracle-check")
      ->required()
      ->check(CLI::IsMember({"compute", "test", "power", "bernstein", "oracle-check"}));
  app.add_option("--input", opt.input, "input CSV (numeric, optional header)");
  app.add_option("--blocks", opt.blocks, "column blocks, e.g. \"0-2;3;4-5\" (0-based, inclusive)");
  app.add_option("--psi", opt.psi,
                 "cndf spec(s): euclid, stable:alpha=, minkowski:p=, boundedexp:gamma=; "
                 "one value broadcasts to all blocks");
  app.add_option("--method", opt.method, "conservative | permutation | montecarlo")
      ->check(CLI::IsMember({"conservative", "permutation", "montecarlo"}));
  app.add_option("--statistic", opt.statistic, "m | total | normalized | normalized-total")
      ->check(CLI::IsMember({"m", "total", "normalized", "normalized-total"}));
  app.add_option("--alpha", opt.alpha, "significance level");
  app.add_option("--resamples", opt.resamples, "resamples for permutation/montecarlo");
  app.add_option("--seed", opt.seed, "RNG seed (64-bit)");
  app.add_option("--output", opt.output, "output path (default stdout)");
  app.add_option("--format", opt.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--generator", opt.generator, "power: bernstein | sinusoidal | uniform")
      ->check(CLI::IsMember({"bernstein", "sinusoidal", "uniform"}));
  app.add_option("--l", opt.l_values, "power: sinusoidal frequency sweep");
  auto* sample_size_option =
      app.add_option("--N", opt.sample_size, "power/bernstein: generated sample size");
  app.add_option("--replications", opt.replications, "power: Monte-Carlo replications");
  app.add_option("--test", opt.test, "power: 1 | 2 | permutation");
  app.add_option("--instances", opt.instances, "oracle-check: random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (opt.command == "compute") return run_compute(opt);
    if (opt.command == "test") return run_test(opt);
    if (opt.command == "power") return run_power(opt);
    if (opt.command == "bernstein") {
      if (sample_size_option->count() == 0) opt.sample_size = 10000;
      return run_bernstein(opt);
    }
    if (opt.command == "oracle-check") return run_oracle_check(opt);
    throw mv::InputError("unknown command '" + opt.command + "'");
  } catch (const mv::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    emit(opt, mv::error_json("input_error", e.what()));
    return kExitInput;
  } catch (const mv::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    emit(opt, mv::error_json("numerical_error", e.what()));
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    emit(opt, mv::error_json("numerical_error", e.what()));
    return kExitNumerical;
  }
}
