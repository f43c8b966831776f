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

#ifndef MULTIVITAL_METRICS_HPP
#define MULTIVITAL_METRICS_HPP

#include "scg.hpp"

namespace multivital
{
    struct LayoutPoint
    {
        std::string id;
        double x = 0.0; // lateral offset in the chest plane [m]
        double y = 0.0; // vertical offset in the chest plane [m]
    };

    // Sensor positions on the chest plane and the boresight distance of reference point A.
    struct SensorLayout
    {
        std::vector<LayoutPoint> points;
        double z_a = 0.0;
    };

    // Point A sits on boresight; every other point maps to (atan(dx/|z_A|), atan(dy/|z_A|)).
    inline std::vector<RegionAngles> compute_alignment(const SensorLayout &layout)
    {
        if (!(layout.z_a > 0.0))
            throw Error(ErrorCode::invalid_config, "layout.z_a must be positive");
        auto a = std::find_if(layout.points.begin(), layout.points.end(), [](const LayoutPoint &p) { return p.id == "A"; });
        if (a == layout.points.end())
            throw Error(ErrorCode::invalid_config, "layout must contain point A");
        std::vector<RegionAngles> out;
        for (const auto &p : layout.points)
            out.push_back({p.id, std::atan((p.x - a->x) / std::abs(layout.z_a)), std::atan((p.y - a->y) / std::abs(layout.z_a))});
        return out;
    }

    struct XcorrPeak
    {
        double rho = 0.0; // max |C(m)|, in [0, 1]
        long lag = 0;     // m maximizing |C(m)|, C(m) = sum_n r(n + m) x(n)
    };

    // Maximum of the normalized full-lag cross-correlation of the mean-removed inputs.
    inline XcorrPeak normalized_xcorr_max(const std::vector<double> &r, const std::vector<double> &x)
    {
        const auto rc = remove_mean(r);
        const auto xc = remove_mean(x);
        double er = 0.0, ex = 0.0;
        for (double v : rc)
            er += v * v;
        for (double v : xc)
            ex += v * v;
        if (!(er > 0.0) || !(ex > 0.0))
            throw Error(ErrorCode::constant_input, "cross-correlation input is constant");
        const double scale = std::sqrt(er * ex);

        // Coarse search over all lags by FFT, exact evaluation around the winner.
        const std::size_t nr = rc.size(), nx = xc.size();
        const std::size_t n_fft = next_power_of_two(nr + nx - 1);
        std::vector<cdouble> fr(n_fft, cdouble{}), fx(n_fft, cdouble{});
        for (std::size_t i = 0; i < nr; ++i)
            fr[i] = rc[i];
        for (std::size_t i = 0; i < nx; ++i)
            fx[i] = xc[i];
        fft_inplace(fr);
        fft_inplace(fx);
        for (std::size_t k = 0; k < n_fft; ++k)
            fr[k] *= std::conj(fx[k]);
        ifft_inplace(fr);
        long best = 0;
        double best_v = -1.0;
        for (long m = -long(nx) + 1; m <= long(nr) - 1; ++m)
        {
            const double v = std::abs(fr[std::size_t((m + long(n_fft)) % long(n_fft))].real());
            if (v > best_v)
            {
                best_v = v;
                best = m;
            }
        }
        auto exact = [&](long m)
        {
            double acc = 0.0;
            for (long n = std::max<long>(0, -m); n < long(nx) && n + m < long(nr); ++n)
                acc += rc[std::size_t(n + m)] * xc[std::size_t(n)];
            return std::abs(acc) / scale;
        };
        XcorrPeak peak{exact(best), best};
        for (long m : {best - 1, best + 1})
            if (m > -long(nx) && m < long(nr))
                if (const double v = exact(m); v > peak.rho)
                    peak = {v, m};
        peak.rho = std::min(1.0, peak.rho);
        return peak;
    }

    inline double max_freq_difference(const std::vector<double> &r, double rate_r, const std::vector<double> &x, double rate_x, Band band = {})
    {
        return std::abs(dominant_frequency(r, rate_r, band) - dominant_frequency(x, rate_x, band));
    }

    // Both traces on the lower of the two rates over their common time span.
    inline std::pair<std::vector<double>, std::vector<double>> align_traces(const DisplacementTrace &a, const DisplacementTrace &b)
    {
        const double rate = std::min(a.frame_rate, b.frame_rate);
        const double start = std::max(a.t0, b.t0);
        const double end_a = a.t0 + double(a.displacement.size() - 1) / a.frame_rate;
        const double end_b = b.t0 + double(b.displacement.size() - 1) / b.frame_rate;
        const double stop = std::min(end_a, end_b);
        if (a.displacement.empty() || b.displacement.empty() || !(stop > start))
            throw Error(ErrorCode::invalid_argument, "traces " + a.region + " and " + b.region + " do not overlap in time");
        const std::size_t n = std::size_t(std::floor((stop - start) * rate + 1e-9)) + 1;
        auto on_grid = [&](const DisplacementTrace &t)
        {
            const double offset = (start - t.t0) * t.frame_rate;
            if (t.frame_rate == rate && std::abs(offset - std::round(offset)) < 1e-9)
            {
                const auto first = std::size_t(std::llround(offset));
                return std::vector<double>(t.displacement.begin() + std::ptrdiff_t(first), t.displacement.begin() + std::ptrdiff_t(first + n));
            }
            return resample_span(t.displacement, t.frame_rate, t.t0, start, rate, n);
        };
        return {on_grid(a), on_grid(b)};
    }

    struct ComparisonEntry
    {
        std::string radar_region;
        std::string ref_region;
        double rho = 0.0;
        double lag_s = 0.0;
        double f_radar = 0.0;
        double f_ref = 0.0;
        double delta_f_max = 0.0;
    };

    inline ComparisonEntry compare_traces(const DisplacementTrace &radar, const DisplacementTrace &ref, Band band = {})
    {
        const auto [r, x] = align_traces(radar, ref);
        const double rate = std::min(radar.frame_rate, ref.frame_rate);
        const auto peak = normalized_xcorr_max(r, x);
        ComparisonEntry e;
        e.radar_region = radar.region;
        e.ref_region = ref.region;
        e.rho = peak.rho;
        e.lag_s = double(peak.lag) / rate;
        e.f_radar = dominant_frequency(r, rate, band);
        e.f_ref = dominant_frequency(x, rate, band);
        e.delta_f_max = std::abs(e.f_radar - e.f_ref);
        return e;
    }
}

#endif
