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

#ifndef MULTIVITAL_PIPELINE_HPP
#define MULTIVITAL_PIPELINE_HPP

#include "io.hpp"

namespace multivital
{
    struct ProcessOptions
    {
        std::size_t n_fft_range = 0; // 0 selects n_adc
        std::size_t n_fft_azimuth = 256;
        bool near_field = true;
        Band band;
        Window window = Window::none;
        std::array<double, 3> elevation_grid_deg{-60.0, 60.0, 1.0};

        static ProcessOptions from(const PipelineConfig &p)
        {
            return {p.n_fft_range, p.n_fft_azimuth, p.near_field, p.band, p.window, p.elevation_grid_deg};
        }
    };

    struct ProcessResult
    {
        SubjectLocation location;
        std::size_t n_fft_range = 0;
        double wavelength = 0.0;       // carrier, used for the calibration table
        double phase_wavelength = 0.0; // mid-chirp, used for displacement
        std::optional<PhaseErrorTable> table;
        AngleMap angle_map;          // frame-averaged power at the subject bin
        int peak_grid_index = 0;     // azimuth grid index of the angle-map maximum
        double peak_azimuth = 0.0;   // [rad]
        double peak_elevation = 0.0; // [rad]
        std::vector<RegionAngles> regions;
        std::vector<RegionSignal> signals;
        std::vector<DisplacementTrace> traces;
        std::vector<std::optional<double>> frequencies; // empty when no in-band peak exists
    };

    inline std::vector<double> elevation_grid(const std::array<double, 3> &deg)
    {
        std::vector<double> g;
        const auto n = std::size_t(std::floor((deg[1] - deg[0]) / deg[2] + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i)
            g.push_back((deg[0] + double(i) * deg[2]) * pi / 180.0);
        return g;
    }

    // Region angles whose chest-plane direction has the given direction cosines.
    inline RegionAngles region_from_direction(const std::string &id, double u, double w)
    {
        const double c = std::sqrt(std::max(1e-12, 1.0 - u * u - w * w));
        return {id, std::atan(u / c), std::atan(w / c)};
    }

    // Range FFT, subject location, DOA and phase extraction. Without regions a single region "A" is
    // placed at the angle-map maximum inside the field of view.
    inline ProcessResult process_cube(const RawDataCube &cube, const ArrayGeometry &geom, const ProcessOptions &opt,
                                      const std::optional<std::vector<RegionAngles>> &regions = std::nullopt)
    {
        if (cube.meta.n_tx != geom.tx.size() || cube.meta.n_rx != geom.rx.size())
            throw Error(ErrorCode::invalid_config, "cube channel layout does not match the array geometry");
        const ChirpConfig cfg = chirp_from_meta(cube.meta);
        ProcessResult res;
        const auto wave = derive_waveform(cfg);
        res.wavelength = wave.wavelength;
        res.phase_wavelength = wave.phase_wavelength;
        res.n_fft_range = opt.n_fft_range ? opt.n_fft_range : next_power_of_two(cfg.n_adc);

        const auto profile = stream_range_profile(cube, res.n_fft_range, opt.window);
        const std::size_t bin = argmax_first(profile);
        res.location = {bin, double(bin) * bin_width(cube.meta, res.n_fft_range)};
        const Matrix<cdouble> data = stream_range_bin(cube, res.n_fft_range, bin, opt.window);

        const DoaArray arr = DoaArray::from(geom);
        const std::size_t n_fft = opt.n_fft_azimuth;
        if (opt.near_field)
        {
            const double z = std::max(res.location.range_m, bin_width(cube.meta, res.n_fft_range));
            res.table = build_phase_error_table(arr.sel, geom, res.wavelength, z, n_fft);
        }
        const PhaseErrorTable *table = res.table ? &*res.table : nullptr;

        const auto el_grid = elevation_grid(opt.elevation_grid_deg);
        res.angle_map = {n_fft, el_grid, Matrix<double>(n_fft, el_grid.size(), 0.0)};
        for (std::size_t m = 0; m < data.cols(); ++m)
        {
            const auto map = compute_angle_map(data.column(m), arr, table, n_fft, el_grid);
            for (std::size_t i = 0; i < map.power.data().size(); ++i)
                res.angle_map.power.data()[i] += map.power.data()[i] / double(data.cols());
        }
        double best = -1.0;
        for (std::size_t i = 0; i < n_fft; ++i)
        {
            const int l = int(i) - int(n_fft / 2);
            if (std::abs(grid_angle(l, n_fft)) > field_of_view)
                continue;
            for (std::size_t g = 0; g < el_grid.size(); ++g)
                if (std::abs(el_grid[g]) <= field_of_view && res.angle_map.power(i, g) > best)
                {
                    best = res.angle_map.power(i, g);
                    res.peak_grid_index = l;
                    res.peak_elevation = el_grid[g];
                }
        }
        res.peak_azimuth = grid_angle(res.peak_grid_index, n_fft);

        if (regions)
            res.regions = *regions;
        else
            res.regions = {region_from_direction("A", 2.0 * res.peak_grid_index / double(n_fft), std::sin(res.peak_elevation))};

        res.signals = select_region_signals(data, arr, res.regions, table, n_fft);
        for (const auto &s : res.signals)
        {
            res.traces.push_back(make_trace(s, res.phase_wavelength, 1.0 / cfg.t_frame));
            try
            {
                res.frequencies.push_back(dominant_frequency(res.traces.back(), opt.band));
            }
            catch (const Error &)
            {
                res.frequencies.push_back(std::nullopt);
            }
        }
        return res;
    }

    // Radial displacement [mm] of every labelled point, as a trace at the frame rate.
    inline std::vector<DisplacementTrace> ground_truth_traces(const Scene &scene, const ChirpConfig &cfg)
    {
        std::vector<DisplacementTrace> out;
        for (const auto &p : scene.points)
        {
            if (p.region.empty())
                continue;
            DisplacementTrace t;
            t.region = p.region;
            t.frame_rate = 1.0 / cfg.t_frame;
            t.displacement = radial_displacement(p, cfg.t_frame, cfg.n_frames);
            for (double &v : t.displacement)
                v *= 1000.0;
            out.push_back(std::move(t));
        }
        return out;
    }

    // Triaxial acceleration of every labelled point over `duration` seconds. Sensor axes: x lateral,
    // y vertical, z along boresight. The ECG column carries unit Gaussian pulses once per motion period
    // of the first labelled point as a timing reference.
    inline ScgRecording synthesize_scg(const Scene &scene, const ScgConfig &cfg, double duration)
    {
        ScgRecording rec;
        rec.fs = cfg.fs;
        const auto n = std::size_t(std::floor(duration * cfg.fs)) + 1;
        const double h = 1.0 / cfg.fs;
        std::seed_seq seq{std::uint32_t(scene.seed), std::uint32_t(scene.seed >> 32), 0x5C6u};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> noise(0.0, cfg.noise_rms > 0.0 ? cfg.noise_rms : 1.0);
        double period = 0.0;
        for (const auto &p : scene.points)
        {
            if (p.region.empty())
                continue;
            ScgChannel ch;
            ch.region = p.region;
            ch.fs = cfg.fs;
            const Vec3 &u = motion_direction(p.motion);
            const auto *sin_motion = std::get_if<SinusoidMotion>(&p.motion);
            if (period == 0.0 && sin_motion && sin_motion->frequency > 0.0)
                period = 1.0 / sin_motion->frequency;
            for (std::size_t i = 0; i < n; ++i)
            {
                const double t = double(i) * h;
                double a;
                if (sin_motion)
                {
                    const double w = two_pi * sin_motion->frequency;
                    a = -sin_motion->amplitude * w * w * std::sin(w * t + sin_motion->phase);
                }
                else
                    a = (displacement(p.motion, t + h) - 2.0 * displacement(p.motion, t) + displacement(p.motion, std::max(0.0, t - h))) / (h * h);
                const double e = cfg.noise_rms > 0.0 ? 1.0 : 0.0;
                ch.ax.push_back(a * u[0] + e * noise(rng));
                ch.ay.push_back(a * u[2] + e * noise(rng));
                ch.az.push_back(a * u[1] + e * noise(rng));
            }
            rec.channels.push_back(std::move(ch));
        }
        if (period > 0.0)
        {
            rec.ecg.assign(n, 0.0);
            const double width = 0.01;
            for (std::size_t i = 0; i < n; ++i)
            {
                const double t = double(i) * h;
                const double d = t - period * std::round(t / period);
                rec.ecg[i] = std::exp(-0.5 * d * d / (width * width));
            }
        }
        return rec;
    }

    // Pairs each radar trace with reference traces named <region>_<axis>.
    // Pairs each radar trace with the reference traces of the same region (or its _x/_y/_z axes).
    // Pairs with a constant trace carry no shape to compare; they are listed in skipped as "radar/ref".
    inline std::vector<ComparisonEntry> compare_sets(const std::vector<DisplacementTrace> &radar, const std::vector<DisplacementTrace> &ref, Band band = {},
                                                     std::vector<std::string> *skipped = nullptr)
    {
        std::vector<ComparisonEntry> out;
        for (const auto &r : radar)
            for (const auto &x : ref)
                if (x.region == r.region || (x.region.size() == r.region.size() + 2 && x.region.starts_with(r.region + "_")))
                {
                    try
                    {
                        out.push_back(compare_traces(r, x, band));
                    }
                    catch (const Error &e)
                    {
                        if (e.code() != ErrorCode::constant_input && e.code() != ErrorCode::no_peak)
                            throw;
                        if (skipped)
                            skipped->push_back(r.region + "/" + x.region);
                    }
                }
        return out;
    }
}

#endif
