#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "multivariance/block_sample.hpp"
#include "multivariance/cndf.hpp"
#include "multivariance/rng.hpp"
#include "multivariance/statistics.hpp"

namespace multivariance {

// Bernstein's coins: three one-dimensional binary blocks
//   A = 1{coin I heads}, B = 1{coin II tails}, C = 1{both coins same side}.
// Pairwise independent, jointly dependent.
BlockSample bernstein_sample(int N, std::uint64_t seed);

// Analytic population values for Bernstein's coins with Euclidean psi.
struct BernsteinPopulation {
  double m2 = 0.125;                 // M^2
  double total_m2 = 0.125;           // total M^2 (pairwise terms vanish)
  double a = 0.5;                    // a_A = a_B = a_C
  double b = 0.5;                    // b_A = b_B = b_C
  double multicorrelation = 1.0;     // R
  double normalized_m = 1.0;         // script M
  double normalized_total_m = 0.5;   // script M-bar
  double pairwise_m2 = 0.0;          // M^2 of each pair
};
BernsteinPopulation bernstein_population();

// Two 1-d blocks with joint density (1/(4 pi^2))(1 + sin(lx) sin(ly)) on
// [-pi, pi]^2, drawn by rejection from the uniform proposal (acceptance
// probability (1 + sin(lx) sin(ly))/2, mean 1/2). Marginals are uniform.
BlockSample sinusoidal_sample(int N, int l, std::uint64_t seed);

// `blocks` independent U(0,1) columns; the null-hypothesis generator of the
// size studies.
BlockSample independent_uniform_sample(int N, int blocks, std::uint64_t seed);

enum class GeneratorKind { Bernstein, Sinusoidal, IndependentUniform };
enum class TestKind { Test1, Test2, Permutation };

struct PowerStudyConfig {
  GeneratorKind generator = GeneratorKind::Bernstein;
  int sinusoidal_l = 1;          // Sinusoidal only
  int sample_size = 100;         // N
  int replications = 1000;
  double alpha = 0.05;
  TestKind test = TestKind::Test2;
  std::vector<CndfSpec> specs;   // length 1 (broadcast) or block count
  int resamples = 999;           // Permutation only
  std::uint64_t seed = 0;
};

struct PowerRow {
  std::string generator;
  double parameter = 0.0;  // l for Sinusoidal, 0 otherwise
  int sample_size = 0;
  std::string test;
  std::string psi;
  double rejection_rate = 0.0;
  double std_error = 0.0;  // binomial SE of the rate
  int replications = 0;
  std::uint64_t seed = 0;
};

// Fraction of replications in which the configured test rejects, with
// binomial standard error; deterministic given the seed (per-replication
// RNG substreams, order-independent aggregation).
PowerRow power_study(const PowerStudyConfig& config);

int block_count_of(GeneratorKind kind);
BlockSample draw_sample(GeneratorKind kind, int N, int l, CounterRng& rng);

}  // namespace multivariance
