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

#ifndef MULTIVITAL_RADAR_CONFIG_HPP
#define MULTIVITAL_RADAR_CONFIG_HPP

#include "common.hpp"

#include <array>
#include <cmath>
#include <map>
#include <tuple>
#include <utility>

namespace multivital
{
    // FMCW waveform and frame timing. One chirp per frame is synthesized; n_chirps_per_frame is carried
    // as metadata only.
    struct ChirpConfig
    {
        double fc = 0.0;                    // carrier frequency [Hz]
        double prt = 0.0;                   // pulse repetition time [s]
        double t_frame = 0.0;               // frame period [s]
        std::size_t n_adc = 0;              // ADC samples per chirp
        double fs = 0.0;                    // ADC sampling rate [Hz]
        double k_chirp = 0.0;               // chirp slope [Hz/s]
        std::size_t n_chirps_per_frame = 1; // chirps per frame
        std::size_t n_frames = 0;           // number of frames
    };

    struct DerivedWaveform
    {
        double bandwidth_b = 0.0;      // swept bandwidth over the ADC window [Hz]
        double range_resolution = 0.0; // c / 2B [m]
        double wavelength = 0.0;       // c / fc [m]
        double phase_wavelength = 0.0; // c / (fc + k (n_adc - 1) / 2 fs): delay-to-phase scale of a range bin [m]
        double pulse_window_t = 0.0;   // n_adc / fs [s]
    };

    // Throws invalid_config on the first violated field. With check_band the carrier must lie in 76..81 GHz.
    inline void validate(const ChirpConfig &cfg, bool check_band = false)
    {
        auto positive = [](double v, const char *name)
        {
            if (!(v > 0.0) || !std::isfinite(v))
                throw Error(ErrorCode::invalid_config, std::string(name) + " must be positive and finite");
        };
        positive(cfg.fc, "fc");
        positive(cfg.prt, "prt");
        positive(cfg.t_frame, "t_frame");
        positive(cfg.fs, "fs");
        positive(cfg.k_chirp, "k_chirp");
        if (cfg.n_adc == 0)
            throw Error(ErrorCode::invalid_config, "n_adc must be positive");
        if (cfg.n_chirps_per_frame == 0)
            throw Error(ErrorCode::invalid_config, "n_chirps_per_frame must be positive");
        if (cfg.n_frames == 0)
            throw Error(ErrorCode::invalid_config, "n_frames must be positive");
        if (static_cast<double>(cfg.n_adc) / cfg.fs > cfg.prt * (1.0 + 1e-12))
            throw Error(ErrorCode::invalid_config, "ADC window n_adc/fs exceeds prt");
        if (check_band && (cfg.fc < 76e9 || cfg.fc > 81e9))
            throw Error(ErrorCode::invalid_config, "fc outside 76..81 GHz");
    }

    inline DerivedWaveform derive_waveform(const ChirpConfig &cfg)
    {
        validate(cfg);
        DerivedWaveform w;
        w.pulse_window_t = static_cast<double>(cfg.n_adc) / cfg.fs;
        w.bandwidth_b = cfg.k_chirp * w.pulse_window_t;
        w.range_resolution = speed_of_light / (2.0 * w.bandwidth_b);
        w.wavelength = speed_of_light / cfg.fc;
        w.phase_wavelength = speed_of_light / (cfg.fc + cfg.k_chirp * double(cfg.n_adc - 1) / (2.0 * cfg.fs));
        return w;
    }

    // 77 GHz simulation setup: 512 samples at 7 MHz, 63.005 MHz/us, 50 frames of 135 ms.
    inline ChirpConfig simulation_chirp()
    {
        return {77e9, 85.3e-6, 0.135, 512, 7e6, 63.005e12, 128, 50};
    }

    // 77 GHz measurement setup: 256 samples at 5 MHz, 65.998 MHz/us, 3600 frames of 50 ms.
    inline ChirpConfig measurement_chirp()
    {
        return {77e9, 70e-6, 0.05, 256, 5e6, 65.998e12, 1, 3600};
    }

    // Element position in half-wavelength units.
    struct ElementPosition
    {
        int az = 0;
        int el = 0;
        bool operator==(const ElementPosition &) const = default;
    };

    // Physical Tx/Rx layout. The phase reference point (half-wavelength units) is where the array frame
    // origin sits; plane-wave channel factors are taken relative to it.
    struct ArrayGeometry
    {
        std::vector<ElementPosition> tx;
        std::vector<ElementPosition> rx;
        double ref_az = 0.0;
        double ref_el = 0.0;
    };

    // Centre of the virtual aperture expressed per element (half of the virtual midpoint).
    inline void center_reference(ArrayGeometry &geom)
    {
        if (geom.tx.empty() || geom.rx.empty())
            return;
        auto span = [](const std::vector<ElementPosition> &v, int ElementPosition::*f)
        {
            int lo = v.front().*f, hi = lo;
            for (const auto &e : v)
            {
                lo = std::min(lo, e.*f);
                hi = std::max(hi, e.*f);
            }
            return std::pair{lo, hi};
        };
        const auto [tx_az0, tx_az1] = span(geom.tx, &ElementPosition::az);
        const auto [rx_az0, rx_az1] = span(geom.rx, &ElementPosition::az);
        const auto [tx_el0, tx_el1] = span(geom.tx, &ElementPosition::el);
        const auto [rx_el0, rx_el1] = span(geom.rx, &ElementPosition::el);
        geom.ref_az = (tx_az0 + rx_az0 + tx_az1 + rx_az1) / 4.0;
        geom.ref_el = (tx_el0 + rx_el0 + tx_el1 + rx_el1) / 4.0;
    }

    // 12 Tx / 16 Rx cascaded board. Tx 0..2 are the elevated transmitters, Tx 3..11 the azimuth row
    // from 32 down to 0. Reference at the centre of the virtual aperture.
    inline ArrayGeometry paper_geometry()
    {
        ArrayGeometry g;
        g.tx = {{11, 6}, {10, 4}, {9, 1}, {32, 0}, {28, 0}, {24, 0}, {20, 0}, {16, 0}, {12, 0}, {8, 0}, {4, 0}, {0, 0}};
        for (int p : {11, 12, 13, 14, 50, 51, 52, 53, 46, 47, 48, 49, 0, 1, 2, 3})
            g.rx.push_back({p, 0});
        center_reference(g);
        return g;
    }

    // Largest distance between any two physical elements [m].
    inline double aperture_size(const ArrayGeometry &geom, double wavelength)
    {
        double best = 0.0;
        std::vector<ElementPosition> all = geom.tx;
        all.insert(all.end(), geom.rx.begin(), geom.rx.end());
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j)
                best = std::max(best, std::hypot(double(all[i].az - all[j].az), double(all[i].el - all[j].el)));
        return best * wavelength / 2.0;
    }

    // Scene coordinates: x lateral, y boresight, z vertical. The board is seen from the front, so
    // increasing azimuth index runs towards -x and increasing elevation index towards -z.
    using Vec3 = std::array<double, 3>;

    inline Vec3 element_location(const ElementPosition &e, const ArrayGeometry &geom, double wavelength)
    {
        const double h = wavelength / 2.0;
        return {-(e.az - geom.ref_az) * h, 0.0, -(e.el - geom.ref_el) * h};
    }

    inline double norm(const Vec3 &v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

    inline double distance(const Vec3 &a, const Vec3 &b)
    {
        return norm(Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
    }

    // Array-frame direction cosines (u_az, u_el) of a scene point seen from the reference point.
    inline std::pair<double, double> direction_cosines(const Vec3 &p)
    {
        const double r = norm(p);
        if (r == 0.0)
            return {0.0, 0.0};
        return {-p[0] / r, -p[2] / r};
    }

    struct VirtualElement
    {
        std::size_t tx = 0;
        std::size_t rx = 0;
        int az = 0;
        int el = 0;
    };

    // Elements are ordered row-major in (tx, rx), so element index equals the channel index.
    struct VirtualArray
    {
        std::vector<VirtualElement> elements;
        std::size_t n_tx = 0;
        std::size_t n_rx = 0;
    };

    inline VirtualArray build_virtual_array(const ArrayGeometry &geom)
    {
        if (geom.tx.empty() || geom.rx.empty())
            throw Error(ErrorCode::invalid_config, "array geometry needs at least one Tx and one Rx");
        VirtualArray va;
        va.n_tx = geom.tx.size();
        va.n_rx = geom.rx.size();
        va.elements.reserve(va.n_tx * va.n_rx);
        for (std::size_t t = 0; t < geom.tx.size(); ++t)
            for (std::size_t r = 0; r < geom.rx.size(); ++r)
                va.elements.push_back({t, r, geom.tx[t].az + geom.rx[r].az, geom.tx[t].el + geom.rx[r].el});
        return va;
    }

    struct UlaEntry
    {
        std::size_t tx = 0;
        std::size_t rx = 0;
        int position = 0;
    };

    // A run of ULA indices [first, last] fed by one transmitter over consecutive receivers.
    struct UlaBlock
    {
        std::size_t first = 0;
        std::size_t last = 0;
        std::size_t tx = 0;
        std::size_t size() const { return last - first + 1; }
    };

    struct AzimuthUlaSelection
    {
        std::vector<UlaEntry> chosen;   // ULA index -> (tx, rx)
        std::vector<UlaBlock> blocks;   // tiling of the ULA in index order
        std::vector<std::size_t> junctions; // first ULA index of every block after the first
        int origin = 0;                 // virtual position of ULA index 0
        std::size_t size() const { return chosen.size(); }
    };

    // Picks one virtual element per azimuth position of the elevation-0 row. At each position the
    // lowest Tx position wins, then the lowest Rx position. A block continues while the Tx stays the
    // same and the Rx position advances by one.
    inline AzimuthUlaSelection select_azimuth_ula(const VirtualArray &va, const ArrayGeometry &geom)
    {
        using Key = std::tuple<int, int, std::size_t, std::size_t>;
        std::map<int, Key> best;
        for (const auto &e : va.elements)
        {
            if (e.el != 0 || geom.tx[e.tx].el != 0)
                continue;
            const Key k{geom.tx[e.tx].az, geom.rx[e.rx].az, e.tx, e.rx};
            auto it = best.find(e.az);
            if (it == best.end() || k < it->second)
                best[e.az] = k;
        }
        if (best.empty())
            throw Error(ErrorCode::coverage_gap, "no azimuth-row virtual elements");

        AzimuthUlaSelection sel;
        sel.origin = best.begin()->first;
        int expected = sel.origin;
        for (const auto &[pos, key] : best)
        {
            if (pos != expected)
                throw Error(ErrorCode::coverage_gap, "azimuth positions skip " + std::to_string(expected));
            sel.chosen.push_back({std::get<2>(key), std::get<3>(key), pos});
            ++expected;
        }

        sel.blocks.push_back({0, 0, sel.chosen[0].tx});
        for (std::size_t i = 1; i < sel.chosen.size(); ++i)
        {
            const auto &prev = sel.chosen[i - 1];
            const auto &cur = sel.chosen[i];
            if (cur.tx == prev.tx && geom.rx[cur.rx].az == geom.rx[prev.rx].az + 1)
                sel.blocks.back().last = i;
            else
            {
                sel.blocks.push_back({i, i, cur.tx});
                sel.junctions.push_back(i);
            }
        }
        return sel;
    }

    // Tx steering vector a and Rx steering vector b for polar angle theta and azimuthal angle phi:
    // a = exp(+j pi (az sin(theta) cos(phi) + el sin(theta) sin(phi))), b with the opposite sign.
    inline std::pair<std::vector<cdouble>, std::vector<cdouble>> steering_vector_dc(const ArrayGeometry &geom, double u_az, double u_el)
    {
        std::vector<cdouble> a(geom.tx.size()), b(geom.rx.size());
        for (std::size_t t = 0; t < geom.tx.size(); ++t)
            a[t] = std::polar(1.0, pi * (geom.tx[t].az * u_az + geom.tx[t].el * u_el));
        for (std::size_t r = 0; r < geom.rx.size(); ++r)
            b[r] = std::polar(1.0, -pi * (geom.rx[r].az * u_az + geom.rx[r].el * u_el));
        return {a, b};
    }

    inline std::pair<std::vector<cdouble>, std::vector<cdouble>> steering_vector(const ArrayGeometry &geom, double theta, double phi)
    {
        if (std::abs(theta) >= pi / 2 || std::abs(phi) >= pi / 2)
            throw Error(ErrorCode::out_of_range, "steering angles must lie inside (-pi/2, pi/2)");
        return steering_vector_dc(geom, std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi));
    }

    // Plane-wave channel factor conj(a_t) b_r, re-referenced to the geometry's reference point.
    inline cdouble channel_factor(const ArrayGeometry &geom, std::size_t tx, std::size_t rx, double u_az, double u_el)
    {
        const double paz = geom.tx[tx].az + geom.rx[rx].az - 2.0 * geom.ref_az;
        const double pel = geom.tx[tx].el + geom.rx[rx].el - 2.0 * geom.ref_el;
        return std::polar(1.0, -pi * (paz * u_az + pel * u_el));
    }
}

#endif
