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

#ifndef MULTIVITAL_SCG_HPP
#define MULTIVITAL_SCG_HPP

#include "vitals.hpp"

#include <array>

namespace multivital
{
    // x minus its least-squares straight line.
    inline std::vector<double> detrend(const std::vector<double> &x)
    {
        const std::size_t n = x.size();
        if (n < 2)
            throw Error(ErrorCode::invalid_argument, "detrend needs at least two samples");
        const double mid = 0.5 * double(n - 1);
        double mean = 0.0, sxy = 0.0, sxx = 0.0;
        for (double v : x)
            mean += v;
        mean /= double(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double t = double(i) - mid;
            sxy += t * (x[i] - mean);
            sxx += t * t;
        }
        const double slope = sxy / sxx;
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = x[i] - mean - slope * (double(i) - mid);
        return out;
    }

    inline std::vector<double> remove_mean(const std::vector<double> &x)
    {
        double mean = 0.0;
        for (double v : x)
            mean += v;
        if (!x.empty())
            mean /= double(x.size());
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = x[i] - mean;
        return out;
    }

    // Cumulative trapezoid integral starting at zero.
    inline std::vector<double> cumulative_trapezoid(const std::vector<double> &x, double fs)
    {
        std::vector<double> out(x.size(), 0.0);
        const double dt = 1.0 / fs;
        for (std::size_t i = 1; i < x.size(); ++i)
            out[i] = out[i - 1] + 0.5 * dt * (x[i] + x[i - 1]);
        return out;
    }

    // Second-order section b0 b1 b2 / 1 a1 a2.
    struct Biquad
    {
        double b0 = 1.0, b1 = 0.0, b2 = 0.0, a1 = 0.0, a2 = 0.0;
    };

    struct FilterSpec
    {
        double cutoff = 0.5;     // high-pass corner [Hz]
        int order = 4;           // Butterworth order
        double trim_s = 2.0;     // transient trimmed from each end [s]
        double decimate_to = 0.0; // resample to this rate before integrating; 0 keeps the input rate
    };

    // Butterworth high-pass via the bilinear transform with pre-warping.
    inline std::vector<Biquad> butterworth_highpass(int order, double cutoff, double fs)
    {
        if (order < 1)
            throw Error(ErrorCode::invalid_argument, "filter order must be positive");
        if (!(cutoff > 0.0) || !(cutoff < fs / 2.0))
            throw Error(ErrorCode::invalid_argument, "cutoff must lie inside (0, fs/2)");
        const double k = std::tan(pi * cutoff / fs);
        std::vector<Biquad> sos;
        for (int i = 0; i < order / 2; ++i)
        {
            // Pole pair at angle pi (n - 1 - 2i) / 2n from the negative real axis.
            const double q = 1.0 / (2.0 * std::cos(pi * (order - 1 - 2 * i) / (2.0 * order)));
            const double norm = 1.0 / (1.0 + k / q + k * k);
            sos.push_back({norm, -2.0 * norm, norm, 2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm});
        }
        if (order % 2 == 1)
        {
            const double norm = 1.0 / (1.0 + k);
            sos.push_back({norm, -norm, 0.0, (k - 1.0) * norm, 0.0});
        }
        return sos;
    }

    namespace detail
    {
        // Direct form II transposed; state is updated in place.
        inline void sos_filter(std::vector<double> &x, const std::vector<Biquad> &sos, std::vector<std::array<double, 2>> &state)
        {
            for (std::size_t s = 0; s < sos.size(); ++s)
            {
                const auto &f = sos[s];
                double z1 = state[s][0], z2 = state[s][1];
                for (double &v : x)
                {
                    const double y = f.b0 * v + z1;
                    z1 = f.b1 * v - f.a1 * y + z2;
                    z2 = f.b2 * v - f.a2 * y;
                    v = y;
                }
                state[s] = {z1, z2};
            }
        }

        // Per-section state at rest under a unit step, scaled by the DC gain of the sections before it.
        inline std::vector<std::array<double, 2>> sos_step_state(const std::vector<Biquad> &sos)
        {
            std::vector<std::array<double, 2>> zi(sos.size());
            double scale = 1.0;
            for (std::size_t s = 0; s < sos.size(); ++s)
            {
                const auto &f = sos[s];
                const double g = (f.b0 + f.b1 + f.b2) / (1.0 + f.a1 + f.a2);
                zi[s] = {scale * (g - f.b0), scale * (f.b2 - f.a2 * g)};
                scale *= g;
            }
            return zi;
        }
    }

    namespace detail
    {
        // Samples for the slowest pole of the cascade to decay by a factor tol.
        inline std::size_t settle_length(const std::vector<Biquad> &sos, double tol = 1e-8)
        {
            double r = 0.0;
            for (const auto &f : sos)
            {
                const double disc = f.a1 * f.a1 - 4.0 * f.a2;
                r = std::max(r, disc < 0.0 ? std::sqrt(f.a2) : 0.5 * (std::abs(f.a1) + std::sqrt(disc)));
            }
            if (!(r < 1.0))
                throw Error(ErrorCode::invalid_argument, "filter is not stable");
            return r == 0.0 ? 1 : std::size_t(std::ceil(std::log(tol) / std::log(r)));
        }
    }

    // Forward-backward filtering with odd extension at both ends and step-matched initial state.
    // The extension spans the settling time of the slowest pole, capped at n - 1 samples.
    inline std::vector<double> filtfilt(const std::vector<Biquad> &sos, const std::vector<double> &x)
    {
        const std::size_t n = x.size();
        if (n < 2)
            throw Error(ErrorCode::invalid_argument, "filtfilt needs at least two samples");
        const std::size_t padlen = std::min(n - 1, std::max(3 * (2 * sos.size() + 1), detail::settle_length(sos)));
        std::vector<double> ext;
        ext.reserve(n + 2 * padlen);
        for (std::size_t i = padlen; i >= 1; --i)
            ext.push_back(2.0 * x[0] - x[i]);
        ext.insert(ext.end(), x.begin(), x.end());
        for (std::size_t i = 1; i <= padlen; ++i)
            ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

        const auto zi = detail::sos_step_state(sos);
        auto state = zi;
        for (auto &z : state)
            z = {z[0] * ext.front(), z[1] * ext.front()};
        detail::sos_filter(ext, sos, state);
        std::reverse(ext.begin(), ext.end());
        state = zi;
        for (auto &z : state)
            z = {z[0] * ext.front(), z[1] * ext.front()};
        detail::sos_filter(ext, sos, state);
        std::reverse(ext.begin(), ext.end());
        return std::vector<double>(ext.begin() + std::ptrdiff_t(padlen), ext.begin() + std::ptrdiff_t(padlen + n));
    }

    // Band-limited interpolation of x (rate_in, first sample at t0_in) onto t_start + j / rate_out for
    // j < n_out, using a Blackman-windowed sinc with its corner at 90% of the lower Nyquist rate.
    // Taps outside the record read its point reflection about the nearest end sample.
    inline std::vector<double> resample_span(const std::vector<double> &x, double rate_in, double t0_in, double t_start, double rate_out, std::size_t n_out)
    {
        if (!(rate_in > 0.0) || !(rate_out > 0.0))
            throw Error(ErrorCode::invalid_argument, "sample rates must be positive");
        std::vector<double> out(n_out, 0.0);
        if (x.empty())
            return out;
        const double ratio = std::min(1.0, rate_out / rate_in);
        const double fc = 0.45 * ratio; // cycles per input sample
        const double half = std::ceil(32.0 / ratio);
        parallel_for(n_out, [&](std::size_t j)
                     {
            const double t = (t_start + double(j) / rate_out - t0_in) * rate_in;
            const long last = long(x.size()) - 1;
            const long lo = std::max<long>(-last, long(std::ceil(t - half)));
            const long hi = std::min<long>(2 * last, long(std::floor(t + half)));
            double acc = 0.0, wsum = 0.0;
            for (long k = lo; k <= hi; ++k)
            {
                const double d = t - double(k);
                const double arg = two_pi * fc * d;
                const double sinc = std::abs(d) < 1e-12 ? 1.0 : std::sin(arg) / arg;
                const double r = d / half;
                const double h = sinc * (0.42 + 0.5 * std::cos(pi * r) + 0.08 * std::cos(two_pi * r));
                const double v = k < 0 ? 2.0 * x.front() - x[std::size_t(-k)]
                                 : k > last ? 2.0 * x.back() - x[std::size_t(2 * last - k)]
                                            : x[std::size_t(k)];
                acc += h * v;
                wsum += h;
            }
            out[j] = wsum != 0.0 ? acc / wsum : 0.0; });
        return out;
    }

    // Resamples a record to rate_out over the same span, starting at its first sample.
    inline std::vector<double> resample(const std::vector<double> &x, double rate_in, double rate_out)
    {
        if (!(rate_in > 0.0) || !(rate_out > 0.0))
            throw Error(ErrorCode::invalid_argument, "sample rates must be positive");
        if (x.empty() || rate_in == rate_out)
            return x;
        const std::size_t n_out = std::size_t(std::floor(double(x.size() - 1) * rate_out / rate_in + 1e-9)) + 1;
        return resample_span(x, rate_in, 0.0, 0.0, rate_out, n_out);
    }

    // One triaxial accelerometer record [m/s^2].
    struct ScgChannel
    {
        std::string region;
        double fs = 0.0; // [Hz]
        std::vector<double> ax, ay, az;
    };

    struct ScgDisplacement
    {
        std::array<DisplacementTrace, 3> axes; // x, y, z; trimmed, t0 marks the first kept sample
    };

    // Acceleration to displacement for one axis at rate fs, untrimmed, in millimetres.
    inline std::vector<double> acceleration_to_displacement(const std::vector<double> &a, double fs, const std::vector<Biquad> &hpf)
    {
        auto v = filtfilt(hpf, remove_mean(detrend(a)));
        v = cumulative_trapezoid(v, fs);
        auto d = filtfilt(hpf, remove_mean(detrend(v)));
        d = filtfilt(hpf, cumulative_trapezoid(d, fs));
        for (double &e : d)
            e *= 1000.0;
        return d;
    }

    inline ScgDisplacement scg_to_displacement(const ScgChannel &ch, const FilterSpec &spec = {})
    {
        if (!(ch.fs > 0.0))
            throw Error(ErrorCode::invalid_argument, "sampling rate must be positive");
        if (ch.ax.size() != ch.ay.size() || ch.ax.size() != ch.az.size())
            throw Error(ErrorCode::invalid_argument, "axes must have equal length");
        const double duration = double(ch.ax.size()) / ch.fs;
        const double needed = std::max(10.0 / (two_pi * spec.cutoff), 2.0 * spec.trim_s);
        if (!(duration > needed))
            throw Error(ErrorCode::too_short_record, "record of " + std::to_string(duration) + " s needs more than " + std::to_string(needed) + " s");

        double rate = ch.fs;
        if (spec.decimate_to > 0.0 && spec.decimate_to < ch.fs)
            rate = spec.decimate_to;
        const auto hpf = butterworth_highpass(spec.order, spec.cutoff, rate);
        const std::array<const std::vector<double> *, 3> in{&ch.ax, &ch.ay, &ch.az};
        static constexpr std::array<const char *, 3> names{"_x", "_y", "_z"};

        ScgDisplacement out;
        for (std::size_t k = 0; k < 3; ++k)
        {
            const auto a = rate == ch.fs ? *in[k] : resample(*in[k], ch.fs, rate);
            const auto d = acceleration_to_displacement(a, rate, hpf);
            const auto skip = std::size_t(std::ceil(spec.trim_s * rate));
            if (2 * skip >= d.size())
                throw Error(ErrorCode::too_short_record, "nothing left after trimming");
            auto &t = out.axes[k];
            t.region = ch.region + names[k];
            t.frame_rate = rate;
            t.t0 = double(skip) / rate;
            t.displacement.assign(d.begin() + std::ptrdiff_t(skip), d.end() - std::ptrdiff_t(skip));
        }
        return out;
    }
}

#endif
