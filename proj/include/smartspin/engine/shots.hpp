// Copyright 2026 The smartspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "smartspin/engine/evolve.hpp"
#include "smartspin/engine/noise.hpp"
#include "smartspin/errors.hpp"

namespace smartspin {

/// Worker count: `requested` if positive, else SMARTSPIN_THREADS if set and
/// positive, else the hardware concurrency.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SMARTSPIN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) {
      throw ConfigError(std::string("SMARTSPIN_THREADS must be a non-negative integer, got '") +
                        env + "'");
    }
    if (v > 0) return static_cast<int>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Calls f(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; the first exception is rethrown after joining.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t used = std::min(workers, n);
  for (std::size_t w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += used) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`, never on how they were produced.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (const double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

struct ShotStatistics {
  double mean = 0.0;
  double sem = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
};

inline ShotStatistics summarize_shots(std::span<const double> values) {
  ShotStatistics s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = pairwise_sum(values) / static_cast<double>(s.n);
  if (s.n > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - s.mean;
      sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(s.n - 1);
    s.sem = std::sqrt(var / static_cast<double>(s.n));
  }
  return s;
}

/// Optional projective-readout model: each shot's population is replaced by
/// the fraction of `repetitions` Bernoulli trials, observed with the given
/// contrast around 1/2. repetitions = 0 keeps the exact population.
struct ReadoutModel {
  int repetitions = 0;
  double contrast = 1.0;

  void validate() const {
    if (repetitions < 0) throw ConfigError("readout repetitions must be >= 0");
    if (!(contrast > 0.0 && contrast <= 1.0)) throw ConfigError("readout contrast must be in (0, 1]");
  }
};

inline double apply_readout(const ReadoutModel& r, double p0, std::uint64_t seed,
                            std::uint64_t stream, std::uint64_t shot) {
  if (r.repetitions == 0) return p0;
  const double p = 0.5 + r.contrast * (p0 - 0.5);
  CounterRng rng(derive_seed(seed, {0x52454144ULL, stream, shot}));
  return static_cast<double>(rng.binomial(r.repetitions, p)) / r.repetitions;
}

struct ShotOptions {
  EngineOptions engine;
  ReadoutModel readout;
  int threads = 0;           // 0: resolve_threads()
  std::uint64_t stream = 0;  // separates readout randomness of sweep points
};

using SequenceBuilder = std::function<PulseSequence(const NoiseDraw&)>;

/// Mean and standard error of p0 over n_shots noise draws. Shot i always
/// uses draw_noise(noise, seed, i), so the result is independent of thread
/// count and scheduling.
inline ShotStatistics run_shots(const SequenceBuilder& builder, const NoiseModel& noise,
                                std::size_t n_shots, std::uint64_t seed,
                                const Vector2c& init = ground_state(),
                                const ShotOptions& options = {}) {
  if (n_shots < 1) throw InputError("run_shots: n_shots must be >= 1");
  noise.validate();
  options.readout.validate();
  std::vector<double> p0(n_shots);
  parallel_for(n_shots, resolve_threads(options.threads), [&](std::size_t i) {
    const NoiseDraw d = draw_noise(noise, seed, i);
    const double p = evolve_two_level(builder(d), d, init, options.engine).p0;
    p0[i] = apply_readout(options.readout, p, seed, options.stream, i);
  });
  return summarize_shots(p0);
}

/// Shot loop for sweeps: trace(draw) returns p0 for every sweep point of one
/// shot, which lets a shot reuse propagators across points.
using TraceFunction = std::function<std::vector<double>(const NoiseDraw&)>;

inline std::vector<ShotStatistics> run_shot_traces(const TraceFunction& trace, std::size_t n_points,
                                                   const NoiseModel& noise, std::size_t n_shots,
                                                   std::uint64_t seed,
                                                   const ShotOptions& options = {}) {
  if (n_shots < 1) throw InputError("run_shot_traces: n_shots must be >= 1");
  noise.validate();
  options.readout.validate();
  std::vector<double> table(n_points * n_shots);  // [point][shot]
  parallel_for(n_shots, resolve_threads(options.threads), [&](std::size_t i) {
    const NoiseDraw d = draw_noise(noise, seed, i);
    const std::vector<double> p = trace(d);
    if (p.size() != n_points) throw InvariantError("trace returned the wrong number of points");
    for (std::size_t k = 0; k < n_points; ++k) {
      table[k * n_shots + i] =
          apply_readout(options.readout, p[k], seed, options.stream * 1000003ULL + k, i);
    }
  });
  std::vector<ShotStatistics> out(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    out[k] = summarize_shots(std::span<const double>(table).subspan(k * n_shots, n_shots));
  }
  return out;
}

}  // namespace smartspin
