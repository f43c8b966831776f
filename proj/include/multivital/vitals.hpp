// SPDX-License-Identifier: Apache-2.0
//
// multivital: FMCW MIMO radar simulation and multi-point vital-sign extraction
// Copyright (C) 2026 The multivital authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MULTIVITAL_VITALS_HPP
#define MULTIVITAL_VITALS_HPP

#include "doa.hpp"
#include "fft.hpp"

namespace multivital
{
    struct WrappedPhase
    {
        std::vector<double> phase;        // (-pi, pi]
        std::vector<std::size_t> flagged; // zero-magnitude samples, which repeat the previous phase
    };

    inline WrappedPhase extract_phase(const std::vector<cdouble> &s)
    {
        if (s.empty())
            throw Error(ErrorCode::invalid_argument, "empty slow-time signal");
        WrappedPhase out;
        out.phase.resize(s.size());
        double prev = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            if (s[i] == cdouble{})
            {
                out.flagged.push_back(i);
                out.phase[i] = prev;
                continue;
            }
            double a = std::arg(s[i]);
            if (a <= -pi)
                a = pi;
            out.phase[i] = prev = a;
        }
        return out;
    }

    // Adds multiples of 2 pi so that successive differences fall in (-pi, pi].
    inline std::vector<double> unwrap(const std::vector<double> &phase)
    {
        std::vector<double> out(phase.size());
        double offset = 0.0;
        for (std::size_t i = 0; i < phase.size(); ++i)
        {
            if (i > 0)
            {
                const double d = phase[i] - phase[i - 1];
                offset -= two_pi * std::ceil((d - pi) / two_pi);
            }
            out[i] = phase[i] + offset;
        }
        return out;
    }

    // lambda (phase - phase[0]) / (4 pi), in millimetres.
    inline std::vector<double> phase_to_displacement(const std::vector<double> &phase, double wavelength)
    {
        std::vector<double> out(phase.size());
        if (phase.empty())
            return out;
        const double scale = 1000.0 * wavelength / (4.0 * pi);
        for (std::size_t i = 0; i < phase.size(); ++i)
            out[i] = scale * (phase[i] - phase[0]);
        return out;
    }

    struct DisplacementTrace
    {
        std::string region;
        double t0 = 0.0;         // [s]
        double frame_rate = 1.0; // [Hz]
        std::vector<double> displacement; // [mm]
        std::vector<double> phase;        // unwrapped [rad]; empty for accelerometer traces
    };

    inline DisplacementTrace make_trace(const RegionSignal &s, double wavelength, double frame_rate)
    {
        DisplacementTrace t;
        t.region = s.id;
        t.frame_rate = frame_rate;
        t.phase = unwrap(extract_phase(s.slowtime).phase);
        t.displacement = phase_to_displacement(t.phase, wavelength);
        return t;
    }

    struct Band
    {
        double lo = 0.5; // [Hz]
        double hi = 3.0; // [Hz]
    };

    // Peak of the mean-removed magnitude spectrum inside the band, refined by a parabola through
    // the neighbouring bins. Zero padding to at least 4n points.
    inline double dominant_frequency(const std::vector<double> &x, double rate, Band band = {})
    {
        if (x.size() < 2)
            throw Error(ErrorCode::invalid_argument, "dominant frequency needs at least two samples");
        if (!(rate > 0.0))
            throw Error(ErrorCode::invalid_argument, "sample rate must be positive");
        const double nyquist = rate / 2.0;
        const double hi = std::min(band.hi, nyquist);
        if (!(band.lo >= 0.0) || !(band.lo < hi))
            throw Error(ErrorCode::band_empty, "band lies outside 0..Nyquist");

        double mean = 0.0, energy0 = 0.0;
        for (double v : x)
        {
            mean += v;
            energy0 += v * v;
        }
        mean /= double(x.size());
        const std::size_t n_fft = next_power_of_two(4 * x.size());
        std::vector<cdouble> buf(n_fft, cdouble{});
        double energy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            buf[i] = x[i] - mean;
            energy += (x[i] - mean) * (x[i] - mean);
        }
        if (!(energy > 1e-24 * energy0) || energy == 0.0)
            throw Error(ErrorCode::no_peak, "trace has no variation");
        fft_inplace(buf);

        const double df = rate / double(n_fft);
        const auto k_lo = std::size_t(std::ceil(band.lo / df));
        const auto k_hi = std::min(n_fft / 2, std::size_t(std::floor(hi / df)));
        if (k_lo > k_hi)
            throw Error(ErrorCode::band_empty, "no spectral bin inside the band");
        std::size_t best = k_lo;
        for (std::size_t k = k_lo + 1; k <= k_hi; ++k)
            if (std::abs(buf[k]) > std::abs(buf[best]))
                best = k;
        if (!(std::abs(buf[best]) > 0.0))
            throw Error(ErrorCode::no_peak, "no spectral energy inside the band");

        double delta = 0.0;
        if (best > 0 && best + 1 <= n_fft / 2)
        {
            const double a = std::abs(buf[best - 1]), b = std::abs(buf[best]), c = std::abs(buf[best + 1]);
            const double den = a - 2.0 * b + c;
            if (den < 0.0)
                delta = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
        }
        return (double(best) + delta) * df;
    }

    inline double dominant_frequency(const DisplacementTrace &t, Band band = {})
    {
        return dominant_frequency(t.displacement, t.frame_rate, band);
    }
}

#endif
