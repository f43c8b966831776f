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

#ifndef MULTIVITAL_SIMULATOR_HPP
#define MULTIVITAL_SIMULATOR_HPP

#include "radar_config.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <variant>

namespace multivital
{
    // d(t) = amplitude * sin(2 pi f t + phase), applied along a unit direction.
    struct SinusoidMotion
    {
        Vec3 direction{0.0, 1.0, 0.0};
        double amplitude = 0.0; // [m]
        double frequency = 0.0; // [Hz]
        double phase = 0.0;     // [rad]
    };

    // Displacement samples [m] at a fixed rate starting at t = 0, linearly interpolated and held
    // constant outside the record.
    struct SampledMotion
    {
        Vec3 direction{0.0, 1.0, 0.0};
        double rate = 1.0; // [Hz]
        std::vector<double> values;
    };

    using Motion = std::variant<SinusoidMotion, SampledMotion>;

    struct ScatterPoint
    {
        Vec3 position0{0.0, 1.0, 0.0}; // rest position [m], relative to the array reference point
        Motion motion = SinusoidMotion{};
        double reflectivity = 1.0;
        std::string region; // optional chest-region label
    };

    enum class Fidelity
    {
        automatic,  // exact_path when any point is closer than 2 D^2 / lambda
        plane_wave, // common two-way delay and steering-vector channel factor
        exact_path  // per-channel Tx -> point -> Rx delay
    };

    struct Scene
    {
        std::vector<ScatterPoint> points;
        std::optional<double> snr_db;
        std::uint64_t seed = 0;
        Fidelity fidelity = Fidelity::automatic;
    };

    // Everything the file format stores besides samples.
    struct CubeMeta
    {
        std::uint32_t n_frames = 0;
        std::uint32_t n_tx = 0;
        std::uint32_t n_rx = 0;
        std::uint32_t n_samples = 0;
        double fc = 0.0;
        double fs = 0.0;
        double k_chirp = 0.0;
        double prt = 0.0;
        double t_frame = 0.0;
        std::uint64_t seed = 0;
        bool operator==(const CubeMeta &) const = default;
    };

    // IF samples indexed (frame, tx, rx, sample), sample fastest.
    struct RawDataCube
    {
        CubeMeta meta;
        std::vector<cfloat> samples;

        std::size_t n_channels() const { return std::size_t(meta.n_tx) * meta.n_rx; }
        std::size_t frame_size() const { return n_channels() * meta.n_samples; }
        std::size_t index(std::size_t m, std::size_t tx, std::size_t rx, std::size_t s) const
        {
            return ((m * meta.n_tx + tx) * meta.n_rx + rx) * meta.n_samples + s;
        }
        const cfloat *channel(std::size_t m, std::size_t ch) const
        {
            return samples.data() + (m * n_channels() + ch) * meta.n_samples;
        }
    };

    inline ChirpConfig chirp_from_meta(const CubeMeta &meta)
    {
        return {meta.fc, meta.prt, meta.t_frame, meta.n_samples, meta.fs, meta.k_chirp, 1, meta.n_frames};
    }

    inline const Vec3 &motion_direction(const Motion &m)
    {
        return std::visit([](const auto &v) -> const Vec3 & { return v.direction; }, m);
    }

    // Displacement along the motion direction at time t [m].
    inline double displacement(const Motion &motion, double t)
    {
        if (const auto *s = std::get_if<SinusoidMotion>(&motion))
            return s->amplitude * std::sin(two_pi * s->frequency * t + s->phase);
        const auto &d = std::get<SampledMotion>(motion);
        if (d.values.empty())
            return 0.0;
        const double x = t * d.rate;
        if (x <= 0.0)
            return d.values.front();
        const auto i = static_cast<std::size_t>(x);
        if (i + 1 >= d.values.size())
            return d.values.back();
        const double f = x - static_cast<double>(i);
        return d.values[i] * (1.0 - f) + d.values[i + 1] * f;
    }

    inline Vec3 position_at(const ScatterPoint &p, double t)
    {
        const double d = displacement(p.motion, t);
        const Vec3 &u = motion_direction(p.motion);
        return {p.position0[0] + d * u[0], p.position0[1] + d * u[1], p.position0[2] + d * u[2]};
    }

    // Round-trip delay to the reference point.
    inline double point_delay(const ScatterPoint &p, double frame_time)
    {
        if (frame_time < 0.0)
            throw Error(ErrorCode::out_of_range, "frame time must be non-negative");
        return 2.0 * norm(position_at(p, frame_time)) / speed_of_light;
    }

    // Range change from the rest position [m] at each frame time.
    inline std::vector<double> radial_displacement(const ScatterPoint &p, double t_frame, std::size_t n_frames)
    {
        std::vector<double> out(n_frames);
        const double r0 = norm(position_at(p, 0.0));
        for (std::size_t m = 0; m < n_frames; ++m)
            out[m] = norm(position_at(p, double(m) * t_frame)) - r0;
        return out;
    }

    inline void validate(const Scene &scene)
    {
        if (scene.points.empty())
            throw Error(ErrorCode::invalid_config, "scene needs at least one point");
        for (std::size_t i = 0; i < scene.points.size(); ++i)
        {
            const auto &p = scene.points[i];
            const std::string tag = "points[" + std::to_string(i) + "]";
            if (!(p.reflectivity > 0.0))
                throw Error(ErrorCode::invalid_config, tag + ".reflectivity must be positive");
            if (std::abs(norm(motion_direction(p.motion)) - 1.0) > 1e-9)
                throw Error(ErrorCode::invalid_config, tag + ".direction must be a unit vector");
            if (const auto *s = std::get_if<SinusoidMotion>(&p.motion); s && !(s->amplitude >= 0.0))
                throw Error(ErrorCode::invalid_config, tag + ".amplitude must be non-negative");
            if (const auto *d = std::get_if<SampledMotion>(&p.motion); d && !(d->rate > 0.0))
                throw Error(ErrorCode::invalid_config, tag + ".rate must be positive");
        }
        if (scene.snr_db && std::isnan(*scene.snr_db))
            throw Error(ErrorCode::invalid_config, "snr_db must be a number");
    }

    // Concrete fidelity for a scene.
    inline Fidelity resolve_fidelity(const Scene &scene, const ChirpConfig &cfg, const ArrayGeometry &geom)
    {
        if (scene.fidelity != Fidelity::automatic)
            return scene.fidelity;
        const double lambda = speed_of_light / cfg.fc;
        const double d = aperture_size(geom, lambda);
        const double far = 2.0 * d * d / lambda;
        for (const auto &p : scene.points)
            if (norm(p.position0) < far)
                return Fidelity::exact_path;
        return Fidelity::plane_wave;
    }

    namespace detail
    {
        // acc[s] += amp * exp(j 2 pi (fc tau + k tau s / fs)) for s in [0, n)
        inline void add_tone(cdouble *acc, std::size_t n, double tau, double amp, const ChirpConfig &cfg)
        {
            const double carrier = std::fmod(cfg.fc * tau, 1.0);
            const double beat = std::fmod(cfg.k_chirp * tau / cfg.fs, 1.0);
            const cdouble step = std::polar(1.0, two_pi * beat);
            cdouble ph = std::polar(amp, two_pi * carrier);
            for (std::size_t s = 0; s < n; ++s)
            {
                acc[s] += ph;
                ph *= step;
            }
        }
    }

    // One frame of complex IF samples, laid out (tx, rx, sample). Delays are frozen at t = m * t_frame.
    inline std::vector<cdouble> synthesize_frame(const Scene &scene, const ChirpConfig &cfg, const ArrayGeometry &geom, std::size_t m)
    {
        validate(cfg);
        if (m >= cfg.n_frames)
            throw Error(ErrorCode::out_of_range, "frame index beyond n_frames");
        const Fidelity mode = resolve_fidelity(scene, cfg, geom);
        const std::size_t n_tx = geom.tx.size(), n_rx = geom.rx.size(), n = cfg.n_adc;
        const double lambda = speed_of_light / cfg.fc;
        const double t = double(m) * cfg.t_frame;
        std::vector<cdouble> out(n_tx * n_rx * n, cdouble{});

        std::vector<Vec3> tx_loc, rx_loc;
        for (const auto &e : geom.tx)
            tx_loc.push_back(element_location(e, geom, lambda));
        for (const auto &e : geom.rx)
            rx_loc.push_back(element_location(e, geom, lambda));

        std::vector<cdouble> tone(n);
        for (const auto &p : scene.points)
        {
            const Vec3 pos = position_at(p, t);
            if (mode == Fidelity::plane_wave)
            {
                std::fill(tone.begin(), tone.end(), cdouble{});
                detail::add_tone(tone.data(), n, 2.0 * norm(pos) / speed_of_light, p.reflectivity, cfg);
                const auto [u_az, u_el] = direction_cosines(pos);
                for (std::size_t tx = 0; tx < n_tx; ++tx)
                    for (std::size_t rx = 0; rx < n_rx; ++rx)
                    {
                        const cdouble c = channel_factor(geom, tx, rx, u_az, u_el);
                        cdouble *dst = out.data() + (tx * n_rx + rx) * n;
                        for (std::size_t s = 0; s < n; ++s)
                            dst[s] += c * tone[s];
                    }
            }
            else
            {
                for (std::size_t tx = 0; tx < n_tx; ++tx)
                {
                    const double d_tx = distance(pos, tx_loc[tx]);
                    for (std::size_t rx = 0; rx < n_rx; ++rx)
                    {
                        const double tau = (d_tx + distance(pos, rx_loc[rx])) / speed_of_light;
                        detail::add_tone(out.data() + (tx * n_rx + rx) * n, n, tau, p.reflectivity, cfg);
                    }
                }
            }
        }
        return out;
    }

    inline CubeMeta make_meta(const ChirpConfig &cfg, const ArrayGeometry &geom, std::uint64_t seed)
    {
        CubeMeta meta;
        meta.n_frames = static_cast<std::uint32_t>(cfg.n_frames);
        meta.n_tx = static_cast<std::uint32_t>(geom.tx.size());
        meta.n_rx = static_cast<std::uint32_t>(geom.rx.size());
        meta.n_samples = static_cast<std::uint32_t>(cfg.n_adc);
        meta.fc = cfg.fc;
        meta.fs = cfg.fs;
        meta.k_chirp = cfg.k_chirp;
        meta.prt = cfg.prt;
        meta.t_frame = cfg.t_frame;
        meta.seed = seed;
        return meta;
    }

    // Adds circularly-symmetric complex Gaussian noise with power (mean cube power) / 10^(snr/10).
    // Each frame draws from its own stream seeded by (seed, frame). Infinite SNR returns the input.
    inline RawDataCube add_noise(const RawDataCube &cube, double snr_db, std::uint64_t seed)
    {
        if (std::isnan(snr_db))
            throw Error(ErrorCode::invalid_config, "snr_db must be a number");
        RawDataCube out = cube;
        if (std::isinf(snr_db) && snr_db > 0.0)
            return out;
        double power = 0.0;
        for (const auto &v : cube.samples)
            power += double(std::norm(v));
        power /= double(std::max<std::size_t>(1, cube.samples.size()));
        const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0) / 2.0);
        const std::size_t fsz = cube.frame_size();
        parallel_for(cube.meta.n_frames, [&](std::size_t m)
                     {
            std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(m), std::uint32_t(std::uint64_t(m) >> 32)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> g(0.0, sigma);
            cfloat *dst = out.samples.data() + m * fsz;
            for (std::size_t i = 0; i < fsz; ++i)
            {
                const double re = g(rng);
                const double im = g(rng);
                dst[i] += cfloat(float(re), float(im));
            } });
        return out;
    }

    inline RawDataCube simulate(const Scene &scene, const ChirpConfig &cfg, const ArrayGeometry &geom)
    {
        validate(cfg);
        validate(scene);
        if (geom.tx.empty() || geom.rx.empty())
            throw Error(ErrorCode::invalid_config, "array geometry needs at least one Tx and one Rx");
        RawDataCube cube;
        cube.meta = make_meta(cfg, geom, scene.seed);
        const std::size_t fsz = cube.frame_size();
        cube.samples.resize(fsz * cfg.n_frames);
        parallel_for(cfg.n_frames, [&](std::size_t m)
                     {
            const auto frame = synthesize_frame(scene, cfg, geom, m);
            cfloat *dst = cube.samples.data() + m * fsz;
            for (std::size_t i = 0; i < fsz; ++i)
                dst[i] = cfloat(frame[i]); });
        if (scene.snr_db)
            return add_noise(cube, *scene.snr_db, scene.seed);
        return cube;
    }
}

#endif
