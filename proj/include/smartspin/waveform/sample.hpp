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

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "smartspin/errors.hpp"
#include "smartspin/waveform/pulse.hpp"

namespace smartspin {

struct SampledWaveform {
  std::vector<double> t;        // s, midpoints
  std::vector<double> omega_i;  // Hz
  std::vector<double> omega_q;  // Hz
  std::vector<double> delta;    // Hz

  std::size_t size() const { return t.size(); }
};

/// Midpoint samples of a sequence. Each segment is cut into
/// ceil(duration/dt) equal steps so that no step straddles a boundary.
inline SampledWaveform sample_sequence(const PulseSequence& seq, double dt) {
  if (!(dt > 0.0)) throw InputError("sample_sequence: dt must be positive");
  SampledWaveform out;
  double t0 = 0.0;
  for (const auto& seg : seq.segments) {
    if (dt > seg.duration * (1.0 + 1e-12)) {
      throw InputError("sample_sequence: dt exceeds the shortest segment ('" + seg.label + "')");
    }
    const auto n = static_cast<long>(std::ceil(seg.duration / dt * (1.0 - 1e-12)));
    const double h = seg.duration / static_cast<double>(n);
    for (long k = 0; k < n; ++k) {
      const double local = (static_cast<double>(k) + 0.5) * h;
      out.t.push_back(t0 + local);
      out.omega_i.push_back(seg.omega_i_at(local));
      out.omega_q.push_back(seg.omega_q_at(local));
      out.delta.push_back(seg.delta_at(local));
    }
    t0 += seg.duration;
  }
  return out;
}

/// Shortest round-trip decimal form used by every CSV writer.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

inline void write_waveform_csv(std::ostream& os, const SampledWaveform& w) {
  os << "t_s,omega_I_Hz,omega_Q_Hz,delta_Hz\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    os << format_double(w.t[i]) << ',' << format_double(w.omega_i[i]) << ','
       << format_double(w.omega_q[i]) << ',' << format_double(w.delta[i]) << '\n';
  }
}

}  // namespace smartspin
