#include "multivariance/experiments.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "multivariance/errors.hpp"
#include "multivariance/inference.hpp"
#include "multivariance/parallel.hpp"

namespace multivariance {

namespace {

BlockSample bernstein_core(int N, CounterRng& rng) {
  Eigen::MatrixXd data(N, 3);
  for (int j = 0; j < N; ++j) {
    const int coin1 = static_cast<int>(rng.next_below(2));  // 1 = heads
    const int coin2 = static_cast<int>(rng.next_below(2));
    data(j, 0) = coin1;                      // A: coin I shows heads
    data(j, 1) = 1 - coin2;                  // B: coin II shows tails
    data(j, 2) = coin1 == coin2 ? 1.0 : 0.0; // C: both show the same side
  }
  return BlockSample(std::move(data), {1, 1, 1});
}

BlockSample sinusoidal_core(int N, int l, CounterRng& rng) {
  constexpr double pi = std::numbers::pi;
  Eigen::MatrixXd data(N, 2);
  for (int j = 0; j < N; ++j) {
    for (;;) {
      const double x = rng.next_uniform(-pi, pi);
      const double y = rng.next_uniform(-pi, pi);
      const double accept = 0.5 * (1.0 + std::sin(l * x) * std::sin(l * y));
      if (rng.next_double() < accept) {
        data(j, 0) = x;
        data(j, 1) = y;
        break;
      }
    }
  }
  return BlockSample(std::move(data), {1, 1});
}

BlockSample uniform_core(int N, int blocks, CounterRng& rng) {
  Eigen::MatrixXd data(N, blocks);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < blocks; ++i) data(j, i) = rng.next_double();
  }
  return BlockSample(std::move(data), std::vector<int>(blocks, 1));
}

std::string generator_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Bernstein: return "bernstein";
    case GeneratorKind::Sinusoidal: return "sinusoidal";
    case GeneratorKind::IndependentUniform: return "uniform";
  }
  return "?";
}

std::string test_name(TestKind test) {
  switch (test) {
    case TestKind::Test1: return "test1";
    case TestKind::Test2: return "test2";
    case TestKind::Permutation: return "permutation";
  }
  return "?";
}

}  // namespace

BlockSample bernstein_sample(int N, std::uint64_t seed) {
  if (N < 1) throw InputError("bernstein_sample: N must be >= 1");
  CounterRng rng(seed);
  return bernstein_core(N, rng);
}

BernsteinPopulation bernstein_population() { return BernsteinPopulation{}; }

BlockSample sinusoidal_sample(int N, int l, std::uint64_t seed) {
  if (N < 1) throw InputError("sinusoidal_sample: N must be >= 1");
  if (l < 1) throw InputError("sinusoidal_sample: l must be >= 1");
  CounterRng rng(seed);
  return sinusoidal_core(N, l, rng);
}

BlockSample independent_uniform_sample(int N, int blocks, std::uint64_t seed) {
  if (N < 1) throw InputError("independent_uniform_sample: N must be >= 1");
  if (blocks < 1) throw InputError("independent_uniform_sample: need >= 1 block");
  CounterRng rng(seed);
  return uniform_core(N, blocks, rng);
}

int block_count_of(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Bernstein: return 3;
    case GeneratorKind::Sinusoidal: return 2;
    case GeneratorKind::IndependentUniform: return 3;
  }
  return 0;
}

BlockSample draw_sample(GeneratorKind kind, int N, int l, CounterRng& rng) {
  switch (kind) {
    case GeneratorKind::Bernstein: return bernstein_core(N, rng);
    case GeneratorKind::Sinusoidal: return sinusoidal_core(N, l, rng);
    case GeneratorKind::IndependentUniform:
      return uniform_core(N, block_count_of(kind), rng);
  }
  throw InputError("draw_sample: unknown generator");
}

PowerRow power_study(const PowerStudyConfig& config) {
  if (config.replications < 1) {
    throw InputError("power_study: replications must be >= 1");
  }
  if (config.sample_size < 3) throw InputError("power_study: N must be >= 3");
  if (config.generator == GeneratorKind::Sinusoidal && config.sinusoidal_l < 1) {
    throw InputError("power_study: sinusoidal l must be >= 1");
  }
  if (config.test == TestKind::Permutation && config.resamples < 1) {
    throw InputError("power_study: permutation test needs resamples >= 1");
  }
  const int blocks = block_count_of(config.generator);
  std::vector<CndfSpec> specs = config.specs;
  if (specs.empty()) {
    throw InputError("power_study: no cndf specs given");
  }
  if (specs.size() == 1 && blocks > 1) {
    specs.resize(blocks, specs.front());
  }
  if (static_cast<int>(specs.size()) != blocks) {
    throw InputError("power_study: " + std::to_string(config.specs.size()) +
                     " cndf specs for a " + std::to_string(blocks) +
                     "-block generator");
  }
  for (const auto& spec : specs) {
    if (spec.dimension() != 1) {
      throw InputError("power_study: generator blocks are one-dimensional");
    }
  }

  const CounterRng root(config.seed);
  std::vector<char> rejected(config.replications, 0);
  parallel_for(config.replications, [&](int r) {
    CounterRng rng = root.substream(static_cast<std::uint64_t>(r));
    const BlockSample sample =
        draw_sample(config.generator, config.sample_size, config.sinusoidal_l, rng);
    bool reject = false;
    switch (config.test) {
      case TestKind::Test1:
        reject = test_multivariance_conservative(sample, specs, config.alpha).reject;
        break;
      case TestKind::Test2:
        reject = test_total_conservative(sample, specs, config.alpha).reject;
        break;
      case TestKind::Permutation:
        reject = permutation_test(sample, specs, StatisticKind::NormalizedTotalM,
                                  config.resamples, rng.next_u64(), config.alpha)
                     .reject;
        break;
    }
    rejected[r] = reject ? 1 : 0;
  });

  int hits = 0;
  for (char c : rejected) hits += c;
  const double rate = static_cast<double>(hits) / config.replications;

  PowerRow row;
  row.generator = generator_name(config.generator);
  row.parameter =
      config.generator == GeneratorKind::Sinusoidal ? config.sinusoidal_l : 0.0;
  row.sample_size = config.sample_size;
  row.test = test_name(config.test);
  row.psi = specs.front().to_string();
  row.rejection_rate = rate;
  row.std_error = std::sqrt(rate * (1.0 - rate) / config.replications);
  row.replications = config.replications;
  row.seed = config.seed;
  return row;
}

}  // namespace multivariance
