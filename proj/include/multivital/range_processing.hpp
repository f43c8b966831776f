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

#ifndef MULTIVITAL_RANGE_PROCESSING_HPP
#define MULTIVITAL_RANGE_PROCESSING_HPP

#include "fft.hpp"
#include "simulator.hpp"

namespace multivital
{
    enum class Window
    {
        none,
        hann
    };

    inline std::vector<double> window_coefficients(Window w, std::size_t n)
    {
        std::vector<double> c(n, 1.0);
        if (w == Window::hann && n > 1)
            for (std::size_t i = 0; i < n; ++i)
                c[i] = 0.5 - 0.5 * std::cos(two_pi * double(i) / double(n - 1));
        return c;
    }

    // Range spectra indexed (frame, tx, rx, bin), bin fastest.
    struct RangeCube
    {
        std::size_t n_frames = 0;
        std::size_t n_tx = 0;
        std::size_t n_rx = 0;
        std::size_t n_fft_range = 0;
        double bin_width_m = 0.0;
        std::vector<cdouble> bins;

        std::size_t n_channels() const { return n_tx * n_rx; }
        const cdouble *spectrum(std::size_t m, std::size_t ch) const
        {
            return bins.data() + (m * n_channels() + ch) * n_fft_range;
        }
    };

    struct SubjectLocation
    {
        std::size_t bin = 0;
        double range_m = 0.0;
    };

    inline double bin_width(const CubeMeta &meta, std::size_t n_fft_range)
    {
        const auto w = derive_waveform(chirp_from_meta(meta));
        return w.range_resolution * double(meta.n_samples) / double(n_fft_range);
    }

    inline void check_range_nfft(const CubeMeta &meta, std::size_t n_fft_range)
    {
        if (n_fft_range < meta.n_samples || !is_power_of_two(n_fft_range))
            throw Error(ErrorCode::invalid_nfft, "range FFT length must be a power of two >= n_adc");
    }

    // Zero-padded fast-time FFT of every (frame, tx, rx) record.
    inline RangeCube range_fft(const RawDataCube &cube, std::size_t n_fft_range, Window window = Window::none)
    {
        check_range_nfft(cube.meta, n_fft_range);
        RangeCube rc;
        rc.n_frames = cube.meta.n_frames;
        rc.n_tx = cube.meta.n_tx;
        rc.n_rx = cube.meta.n_rx;
        rc.n_fft_range = n_fft_range;
        rc.bin_width_m = bin_width(cube.meta, n_fft_range);
        rc.bins.resize(rc.n_frames * rc.n_channels() * n_fft_range);
        const auto win = window_coefficients(window, cube.meta.n_samples);
        const std::size_t nch = rc.n_channels();
        parallel_for(rc.n_frames, [&](std::size_t m)
                     {
            for (std::size_t ch = 0; ch < nch; ++ch)
            {
                const cfloat *src = cube.channel(m, ch);
                cdouble *dst = rc.bins.data() + (m * nch + ch) * n_fft_range;
                std::fill(dst, dst + n_fft_range, cdouble{});
                for (std::size_t s = 0; s < cube.meta.n_samples; ++s)
                    dst[s] = cdouble(src[s]) * win[s];
                fft_inplace(std::span<cdouble>(dst, n_fft_range));
            } });
        return rc;
    }

    // Index of the largest entry; the first one wins a tie.
    inline std::size_t argmax_first(const std::vector<double> &v)
    {
        std::size_t best = 0;
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] > v[best])
                best = i;
        return best;
    }

    inline std::vector<double> range_profile(const RangeCube &rc)
    {
        std::vector<double> profile(rc.n_fft_range, 0.0);
        for (std::size_t i = 0; i < rc.bins.size(); ++i)
            profile[i % rc.n_fft_range] += std::abs(rc.bins[i]);
        return profile;
    }

    // Bin maximizing the magnitude summed over all channels and frames.
    inline SubjectLocation locate_subject(const RangeCube &rc)
    {
        if (rc.bins.empty())
            throw Error(ErrorCode::out_of_range, "empty range cube");
        const std::size_t bin = argmax_first(range_profile(rc));
        return {bin, double(bin) * rc.bin_width_m};
    }

    // (channel, frame) matrix at one range bin, channels row-major in (tx, rx).
    inline Matrix<cdouble> extract_range_bin(const RangeCube &rc, std::size_t bin)
    {
        if (bin >= rc.n_fft_range)
            throw Error(ErrorCode::out_of_range, "range bin " + std::to_string(bin) + " beyond FFT length");
        Matrix<cdouble> out(rc.n_channels(), rc.n_frames);
        for (std::size_t m = 0; m < rc.n_frames; ++m)
            for (std::size_t ch = 0; ch < rc.n_channels(); ++ch)
                out(ch, m) = rc.spectrum(m, ch)[bin];
        return out;
    }

    // Same profile as range_profile(range_fft(cube)) without holding the range cube.
    inline std::vector<double> stream_range_profile(const RawDataCube &cube, std::size_t n_fft_range, Window window = Window::none)
    {
        check_range_nfft(cube.meta, n_fft_range);
        const auto win = window_coefficients(window, cube.meta.n_samples);
        const std::size_t nch = cube.n_channels();
        const std::size_t n_frames = cube.meta.n_frames;
        std::vector<std::vector<double>> per_frame(n_frames);
        parallel_for(n_frames, [&](std::size_t m)
                     {
            std::vector<double> acc(n_fft_range, 0.0);
            std::vector<cdouble> buf(n_fft_range);
            for (std::size_t ch = 0; ch < nch; ++ch)
            {
                const cfloat *src = cube.channel(m, ch);
                std::fill(buf.begin(), buf.end(), cdouble{});
                for (std::size_t s = 0; s < cube.meta.n_samples; ++s)
                    buf[s] = cdouble(src[s]) * win[s];
                fft_inplace(buf);
                for (std::size_t k = 0; k < n_fft_range; ++k)
                    acc[k] += std::abs(buf[k]);
            }
            per_frame[m] = std::move(acc); });
        std::vector<double> profile(n_fft_range, 0.0);
        for (const auto &f : per_frame) // fixed order keeps the sum deterministic
            for (std::size_t k = 0; k < n_fft_range; ++k)
                profile[k] += f[k];
        return profile;
    }

    // Single-bin DFT of every channel and frame.
    inline Matrix<cdouble> stream_range_bin(const RawDataCube &cube, std::size_t n_fft_range, std::size_t bin, Window window = Window::none)
    {
        check_range_nfft(cube.meta, n_fft_range);
        if (bin >= n_fft_range)
            throw Error(ErrorCode::out_of_range, "range bin " + std::to_string(bin) + " beyond FFT length");
        const std::size_t n = cube.meta.n_samples;
        const auto win = window_coefficients(window, n);
        std::vector<cdouble> kernel(n);
        for (std::size_t s = 0; s < n; ++s)
            kernel[s] = win[s] * std::polar(1.0, -two_pi * double((bin * s) % n_fft_range) / double(n_fft_range));
        const std::size_t nch = cube.n_channels();
        Matrix<cdouble> out(nch, cube.meta.n_frames);
        parallel_for(cube.meta.n_frames, [&](std::size_t m)
                     {
            for (std::size_t ch = 0; ch < nch; ++ch)
            {
                const cfloat *src = cube.channel(m, ch);
                cdouble acc{};
                for (std::size_t s = 0; s < n; ++s)
                    acc += cdouble(src[s]) * kernel[s];
                out(ch, m) = acc;
            } });
        return out;
    }
}

#endif
