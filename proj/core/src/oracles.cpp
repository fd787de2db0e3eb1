#include "circrel/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "circrel/error.hpp"
#include "circrel/resampler.hpp"

namespace circrel {
namespace {

using Wide = long double;

constexpr std::uint64_t kSampleStreamId = ~std::uint64_t{0};

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kMaxEnumeratedOutcomes / a) {
    throw Error(ErrorKind::EnumerationTooLarge,
                "more than " + std::to_string(kMaxEnumeratedOutcomes) + " outcomes");
  }
  return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t v = 1;
  for (std::size_t e = 0; e < exp; ++e) v = checked_mul(v, base);
  return v;
}

struct TinyInstance {
  std::vector<std::vector<double>> delays;    // per leg
  std::vector<std::vector<double>> services;  // per leg
  std::vector<double> slack;
};

// Number of index vectors (one delay and one service index per leg) for which
// every leg fits, found by walking all of them.
std::uint64_t count_successful_draws(const TinyInstance& inst) {
  const std::size_t k = inst.slack.size();
  std::vector<std::size_t> jx(k, 0), jy(k, 0);
  std::uint64_t hits = 0;
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      ok = inst.delays[i][jx[i]] + inst.services[i][jy[i]] <= inst.slack[i];
    }
    if (ok) ++hits;
    // odometer over (jx_0, jy_0, jx_1, jy_1, ...)
    std::size_t i = 0;
    for (; i < k; ++i) {
      if (++jx[i] < inst.delays[i].size()) break;
      jx[i] = 0;
      if (++jy[i] < inst.services[i].size()) break;
      jy[i] = 0;
    }
    if (i == k) return hits;
  }
}

std::vector<bool> successful_draw_table(const TinyInstance& inst, std::uint64_t draws) {
  const std::size_t k = inst.slack.size();
  std::vector<bool> table(draws);
  for (std::uint64_t v = 0; v < draws; ++v) {
    std::uint64_t rest = v;
    bool ok = true;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t a = rest % inst.delays[i].size();
      rest /= inst.delays[i].size();
      const std::size_t b = rest % inst.services[i].size();
      rest /= inst.services[i].size();
      ok = ok && inst.delays[i][a] + inst.services[i][b] <= inst.slack[i];
    }
    table[v] = ok;
  }
  return table;
}

TinyInstance tiny_instance(const Scenario& scenario) {
  require_samples(scenario);
  TinyInstance inst;
  inst.slack = scenario.plan.intervals;
  for (const Leg& leg : scenario.legs) {
    inst.delays.push_back(leg.delay.samples);
    inst.services.push_back(leg.service.samples);
  }
  return inst;
}

ExactOracleResult enumerate_fixed(const TinyInstance& inst, std::size_t r) {
  std::uint64_t draws = 1;
  for (std::size_t i = 0; i < inst.slack.size(); ++i) {
    draws = checked_mul(draws, inst.delays[i].size() * inst.services[i].size());
  }
  const std::uint64_t outcomes = checked_pow(draws, r);
  const std::vector<bool> success = successful_draw_table(inst, draws);

  // Walk every r-tuple of draws; accumulate the success count S and S^2
  // exactly in integers.
  std::vector<std::uint64_t> tuple(r, 0);
  std::uint64_t sum_s = 0;
  std::uint64_t sum_s2 = 0;
  for (std::uint64_t o = 0; o < outcomes; ++o) {
    std::uint64_t s = 0;
    for (std::uint64_t v : tuple) s += success[v] ? 1 : 0;
    sum_s += s;
    sum_s2 += s * s;
    for (std::size_t l = 0; l < r; ++l) {
      if (++tuple[l] < draws) break;
      tuple[l] = 0;
    }
  }
  const Wide denom = static_cast<Wide>(outcomes);
  const Wide rr = static_cast<Wide>(r);
  const Wide mean = static_cast<Wide>(sum_s) / (denom * rr);
  const Wide second = static_cast<Wide>(sum_s2) / (denom * rr * rr);
  return {static_cast<double>(mean), static_cast<double>(std::max<Wide>(0, second - mean * mean)),
          outcomes};
}

ExactOracleResult enumerate_random(const TinyInstance& laws, std::size_t r) {
  // Every side of every leg draws a same-size sample from its listed values.
  std::vector<const std::vector<double>*> sides;
  for (std::size_t i = 0; i < laws.slack.size(); ++i) {
    sides.push_back(&laws.delays[i]);
    sides.push_back(&laws.services[i]);
  }
  std::uint64_t sample_outcomes = 1;
  std::uint64_t draws = 1;
  for (const auto* side : sides) {
    sample_outcomes = checked_mul(sample_outcomes, checked_pow(side->size(), side->size()));
    draws = checked_mul(draws, side->size());
  }
  const std::uint64_t patterns = std::uint64_t{1} << r;
  const std::uint64_t terms = checked_mul(sample_outcomes, checked_mul(draws, patterns));

  TinyInstance drawn = laws;
  // Per side, the index into its law of each sample element.
  std::vector<std::vector<std::size_t>> pick;
  for (const auto* side : sides) pick.emplace_back(side->size(), 0);

  Wide sum_mean = 0;
  Wide sum_second = 0;
  const Wide rr = static_cast<Wide>(r);
  for (std::uint64_t o = 0; o < sample_outcomes; ++o) {
    for (std::size_t s = 0; s < sides.size(); ++s) {
      auto& target = (s % 2 == 0) ? drawn.delays[s / 2] : drawn.services[s / 2];
      for (std::size_t e = 0; e < pick[s].size(); ++e) target[e] = (*sides[s])[pick[s][e]];
    }
    const Wide p = static_cast<Wide>(count_successful_draws(drawn)) / static_cast<Wide>(draws);

    // r independent realizations given the samples: walk all success patterns.
    for (std::uint64_t pattern = 0; pattern < patterns; ++pattern) {
      Wide weight = 1;
      std::size_t s = 0;
      for (std::size_t l = 0; l < r; ++l) {
        const bool hit = (pattern >> l) & 1u;
        weight *= hit ? p : 1 - p;
        s += hit ? 1 : 0;
      }
      const Wide theta = static_cast<Wide>(s) / rr;
      sum_mean += weight * theta;
      sum_second += weight * theta * theta;
    }

    for (std::size_t s = 0; s < pick.size(); ++s) {
      std::size_t e = 0;
      for (; e < pick[s].size(); ++e) {
        if (++pick[s][e] < sides[s]->size()) break;
        pick[s][e] = 0;
      }
      if (e < pick[s].size()) break;
    }
  }
  const Wide n = static_cast<Wide>(sample_outcomes);
  const Wide mean = sum_mean / n;
  const Wide second = sum_second / n;
  return {static_cast<double>(mean), static_cast<double>(std::max<Wide>(0, second - mean * mean)),
          terms};
}

std::vector<double> draw_side(const SideModel& side, std::size_t n, RandomStream& stream) {
  std::vector<double> out(n);
  for (double& v : out) {
    v = side.rate ? stream.exponential(*side.rate)
                  : side.samples[stream.uniform_index(side.samples.size())];
  }
  return out;
}

}  // namespace

ExactOracleResult enumerate_exact(const Scenario& scenario, std::size_t resamples,
                                  SampleTreatment treatment) {
  if (resamples == 0) throw Error(ErrorKind::InvalidArgument, "resamples must be >= 1");
  const TinyInstance inst = tiny_instance(scenario);
  return treatment == SampleTreatment::fixed ? enumerate_fixed(inst, resamples)
                                             : enumerate_random(inst, resamples);
}

MonteCarloResult simulate_pipeline_variance(const Scenario& scenario, std::size_t resamples,
                                            std::size_t replications, std::uint64_t seed,
                                            unsigned threads) {
  if (replications < kMinReplications) {
    throw Error(ErrorKind::InvalidArgument,
                "need at least " + std::to_string(kMinReplications) + " replications");
  }
  if (resamples == 0) throw Error(ErrorKind::InvalidArgument, "resamples must be >= 1");
  const std::size_t k = scenario.k();
  std::vector<std::size_t> nx(k), ny(k);
  for (std::size_t i = 0; i < k; ++i) {
    nx[i] = scenario.legs[i].delay.resample_size();
    ny[i] = scenario.legs[i].service.resample_size();
    if (nx[i] == 0 || ny[i] == 0) {
      throw Error(ErrorKind::MissingModel, "sample size unknown (give samples or sample_size)", i);
    }
  }

  std::vector<double> estimates(replications);
  parallel_chunks(replications, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      const std::uint64_t rep_seed = derive_stream_seed(seed, q);
      RandomStream stream(rep_seed, kSampleStreamId);
      Scenario drawn;
      drawn.plan = scenario.plan;
      drawn.legs.resize(k);
      for (std::size_t i = 0; i < k; ++i) {
        drawn.legs[i].delay.samples = draw_side(scenario.legs[i].delay, nx[i], stream);
        drawn.legs[i].service.samples = draw_side(scenario.legs[i].service, ny[i], stream);
      }
      estimates[q] = resample_estimate(drawn, {resamples, rep_seed, 1}).theta_star;
    }
  });

  // Two-pass moments in replication order.
  const double n = static_cast<double>(replications);
  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double e : estimates) {
    const double d = (e - mean) * (e - mean);
    m2 += d;
    m4 += d * d;
  }
  const double variance = m2 / (n - 1.0);
  const double central4 = m4 / n;
  const double central2 = m2 / n;
  const double var_of_var = std::max(0.0, (central4 - (n - 3.0) / (n - 1.0) * central2 * central2) / n);

  MonteCarloResult result;
  result.mean_theta_star = mean;
  result.empirical_variance = variance;
  result.replications = replications;
  result.standard_error_of_variance = std::sqrt(var_of_var);
  result.standard_error_of_mean = std::sqrt(variance / n);
  return result;
}

}  // namespace circrel
