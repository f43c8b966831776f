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

#ifndef MULTIVITAL_DOA_HPP
#define MULTIVITAL_DOA_HPP

#include "fft.hpp"
#include "range_processing.hpp"

namespace multivital
{
    // fftshifted spectrum; entry i belongs to grid index l = i - N/2 and angle asin(2l/N).
    struct AzimuthSpectrum
    {
        std::size_t n_fft = 0;
        std::vector<cdouble> values;

        int grid_index(std::size_t i) const { return int(i) - int(n_fft / 2); }
        std::size_t position(int l) const { return std::size_t(l + int(n_fft / 2)); }
        double angle(std::size_t i) const { return std::asin(2.0 * grid_index(i) / double(n_fft)); }

        std::size_t peak() const
        {
            std::size_t best = 0;
            for (std::size_t i = 1; i < values.size(); ++i)
                if (std::abs(values[i]) > std::abs(values[best]))
                    best = i;
            return best;
        }
    };

    inline double grid_angle(int l, std::size_t n_fft) { return std::asin(2.0 * l / double(n_fft)); }

    // Nearest grid index to a direction cosine, clamped to the grid.
    inline int nearest_grid_index(double u, std::size_t n_fft)
    {
        const int half = int(n_fft / 2);
        const long l = std::lround(u * half);
        return int(std::clamp<long>(l, -half, half - 1));
    }

    // Junction phase errors [rad], one row per junction and one column per shifted grid position.
    struct PhaseErrorTable
    {
        std::size_t n_fft = 0;
        double range_z = 0.0;
        Matrix<double> dphi;
    };

    // Virtual elements grouped by elevation row. Row 0 is served by the azimuth ULA.
    struct ElevationRow
    {
        int position = 0;
        std::vector<std::size_t> channels;
    };

    // Everything DOA needs about one board, built once.
    struct DoaArray
    {
        ArrayGeometry geom;
        VirtualArray va;
        AzimuthUlaSelection sel;
        std::vector<ElevationRow> rows;

        static DoaArray from(const ArrayGeometry &g)
        {
            DoaArray a;
            a.geom = g;
            a.va = build_virtual_array(g);
            a.sel = select_azimuth_ula(a.va, g);
            std::map<int, std::vector<std::size_t>> by_el;
            for (std::size_t i = 0; i < a.va.elements.size(); ++i)
                by_el[a.va.elements[i].el].push_back(i);
            for (auto &[el, ch] : by_el)
                a.rows.push_back({el, std::move(ch)});
            return a;
        }

        std::vector<int> row_positions() const
        {
            std::vector<int> p;
            for (const auto &r : rows)
                p.push_back(r.position);
            return p;
        }
    };

    // ULA-ordered samples from one frame's channel vector (row-major tx, rx).
    inline std::vector<cdouble> ula_samples(const std::vector<cdouble> &channels, const AzimuthUlaSelection &sel, std::size_t n_rx)
    {
        std::vector<cdouble> x(sel.size());
        for (std::size_t i = 0; i < sel.size(); ++i)
            x[i] = channels[sel.chosen[i].tx * n_rx + sel.chosen[i].rx];
        return x;
    }

    namespace detail
    {
        inline void check_azimuth_input(std::size_t n, const AzimuthUlaSelection &sel, std::size_t n_fft)
        {
            if (n != sel.size())
                throw Error(ErrorCode::invalid_argument, "ULA sample count does not match the selection");
            if (n_fft < sel.size() || !is_power_of_two(n_fft))
                throw Error(ErrorCode::invalid_nfft, "azimuth FFT length must be a power of two >= ULA size");
        }

        // Block-wise DFTs re-assembled with offset twiddles and optional cumulative junction terms.
        inline AzimuthSpectrum block_combine(const std::vector<cdouble> &x, const AzimuthUlaSelection &sel, std::size_t n_fft, const PhaseErrorTable *table)
        {
            check_azimuth_input(x.size(), sel, n_fft);
            const std::size_t half = n_fft / 2;
            std::vector<cdouble> acc(n_fft, cdouble{});
            std::vector<double> cum(n_fft, 0.0);
            std::vector<cdouble> buf(n_fft);
            for (std::size_t b = 0; b < sel.blocks.size(); ++b)
            {
                const auto &blk = sel.blocks[b];
                std::fill(buf.begin(), buf.end(), cdouble{});
                for (std::size_t p = blk.first; p <= blk.last; ++p)
                    buf[p - blk.first] = x[p];
                fft_inplace(buf);
                if (table && b > 0)
                    for (std::size_t i = 0; i < n_fft; ++i)
                        cum[i] += table->dphi(b - 1, i);
                for (std::size_t i = 0; i < n_fft; ++i)
                {
                    const std::size_t k = (i + half) % n_fft; // shifted position i holds l = i - N/2
                    const double turns = double((k * blk.first) % n_fft) / double(n_fft);
                    cdouble v = buf[k] * std::polar(1.0, -two_pi * turns);
                    if (table)
                        v *= std::polar(1.0, -cum[i]);
                    acc[i] += v;
                }
            }
            return {n_fft, std::move(acc)};
        }

        inline void check_table(const PhaseErrorTable &table, const AzimuthUlaSelection &sel, std::size_t n_fft)
        {
            if (table.n_fft != n_fft || table.dphi.rows() != sel.junctions.size() || table.dphi.cols() != n_fft)
                throw Error(ErrorCode::table_mismatch, "phase error table does not match selection or FFT length");
        }

        // |P-B| - |P-A| without cancellation.
        inline double distance_difference(const Vec3 &p, const Vec3 &a, const Vec3 &b)
        {
            double dot = 0.0;
            for (int k = 0; k < 3; ++k)
                dot += (b[k] - a[k]) * (b[k] + a[k] - 2.0 * p[k]);
            return dot / (distance(p, a) + distance(p, b));
        }
    }

    // Zero-padded DFT of the ULA samples computed block by block.
    inline AzimuthSpectrum far_field_azimuth_fft(const std::vector<cdouble> &x, const AzimuthUlaSelection &sel, std::size_t n_fft)
    {
        return detail::block_combine(x, sel, n_fft, nullptr);
    }

    // Block-combined DFT with the cumulative junction corrections exp(-j sum dphi) applied per block.
    inline AzimuthSpectrum near_field_azimuth_fft(const std::vector<cdouble> &x, const AzimuthUlaSelection &sel, const PhaseErrorTable &table, std::size_t n_fft)
    {
        detail::check_table(table, sel, n_fft);
        return detail::block_combine(x, sel, n_fft, &table);
    }

    // Spectrum value at one grid index by direct summation; table may be null.
    inline cdouble azimuth_value_at(const std::vector<cdouble> &x, const AzimuthUlaSelection &sel, const PhaseErrorTable *table, std::size_t n_fft, int l)
    {
        detail::check_azimuth_input(x.size(), sel, n_fft);
        if (table)
            detail::check_table(*table, sel, n_fft);
        const std::size_t col = std::size_t(l + int(n_fft / 2));
        const std::size_t k = std::size_t(((l % int(n_fft)) + int(n_fft)) % int(n_fft));
        double cum = 0.0;
        cdouble acc{};
        for (std::size_t b = 0; b < sel.blocks.size(); ++b)
        {
            if (table && b > 0)
                cum += table->dphi(b - 1, col);
            cdouble blk{};
            for (std::size_t p = sel.blocks[b].first; p <= sel.blocks[b].last; ++p)
                blk += x[p] * std::polar(1.0, -two_pi * double((k * p) % n_fft) / double(n_fft));
            acc += table ? blk * std::polar(1.0, -cum) : blk;
        }
        return acc;
    }

    // Phase error between two virtual elements for a point at boresight distance z seen under angle theta:
    // exact two-way path difference (later - earlier) in radians minus the plane-wave increment.
    inline double pair_phase_error(const ArrayGeometry &geom, double wavelength, double z, double theta,
                                   std::size_t tx_a, std::size_t rx_a, std::size_t tx_b, std::size_t rx_b)
    {
        if (!(z > 0.0))
            throw Error(ErrorCode::out_of_range, "boresight range must be positive");
        const Vec3 p{z * std::tan(theta), z, 0.0};
        const double d_tx = detail::distance_difference(p, element_location(geom.tx[tx_a], geom, wavelength), element_location(geom.tx[tx_b], geom, wavelength));
        const double d_rx = detail::distance_difference(p, element_location(geom.rx[rx_a], geom, wavelength), element_location(geom.rx[rx_b], geom, wavelength));
        const int dp = (geom.tx[tx_b].az + geom.rx[rx_b].az) - (geom.tx[tx_a].az + geom.rx[rx_a].az);
        return two_pi / wavelength * (d_tx + d_rx) - pi * dp * std::sin(theta);
    }

    // Phase error across junction j (0-based) of the ULA.
    inline double junction_phase_error(const AzimuthUlaSelection &sel, const ArrayGeometry &geom, double wavelength, double z, double theta, std::size_t j)
    {
        if (j >= sel.junctions.size())
            throw Error(ErrorCode::out_of_range, "junction index beyond selection");
        const auto &a = sel.chosen[sel.junctions[j] - 1];
        const auto &b = sel.chosen[sel.junctions[j]];
        return pair_phase_error(geom, wavelength, z, theta, a.tx, a.rx, b.tx, b.rx);
    }

    // Junction errors over the whole grid; columns with |2l/N| >= 1 stay zero.
    inline PhaseErrorTable build_phase_error_table(const AzimuthUlaSelection &sel, const ArrayGeometry &geom, double wavelength, double z, std::size_t n_fft)
    {
        if (!(z > 0.0))
            throw Error(ErrorCode::out_of_range, "boresight range must be positive");
        if (!is_power_of_two(n_fft))
            throw Error(ErrorCode::invalid_nfft, "azimuth FFT length must be a power of two");
        PhaseErrorTable t{n_fft, z, Matrix<double>(sel.junctions.size(), n_fft, 0.0)};
        for (std::size_t i = 0; i < n_fft; ++i)
        {
            const double v = 2.0 * (int(i) - int(n_fft / 2)) / double(n_fft);
            if (std::abs(v) >= 1.0)
                continue;
            const double theta = std::asin(v);
            for (std::size_t j = 0; j < sel.junctions.size(); ++j)
                t.dphi(j, i) = junction_phase_error(sel, geom, wavelength, z, theta, j);
        }
        return t;
    }

    // Matched-filter power |sum y_i exp(-j pi p_i sin(theta))|^2 for each grid angle.
    inline std::vector<double> elevation_spectrum(const std::vector<cdouble> &y, const std::vector<int> &row_positions, const std::vector<double> &grid)
    {
        if (y.size() != row_positions.size())
            throw Error(ErrorCode::invalid_argument, "one value per elevation row required");
        std::vector<double> out(grid.size());
        for (std::size_t g = 0; g < grid.size(); ++g)
        {
            const double s = std::sin(grid[g]);
            cdouble acc{};
            for (std::size_t i = 0; i < y.size(); ++i)
                acc += y[i] * std::polar(1.0, -pi * row_positions[i] * s);
            out[g] = std::norm(acc);
        }
        return out;
    }

    // Per-row azimuth beam at grid index l, each normalized by its element count.
    inline std::vector<cdouble> row_beams(const std::vector<cdouble> &channels, const DoaArray &arr, const PhaseErrorTable *table, std::size_t n_fft, int l)
    {
        std::vector<cdouble> y(arr.rows.size());
        const std::size_t k = std::size_t(((l % int(n_fft)) + int(n_fft)) % int(n_fft));
        for (std::size_t r = 0; r < arr.rows.size(); ++r)
        {
            const auto &row = arr.rows[r];
            if (row.position == 0)
            {
                y[r] = azimuth_value_at(ula_samples(channels, arr.sel, arr.va.n_rx), arr.sel, table, n_fft, l) / double(arr.sel.size());
                continue;
            }
            cdouble acc{};
            for (std::size_t ch : row.channels)
            {
                const long p = arr.va.elements[ch].az - arr.sel.origin;
                const long turns = ((long(k) * p) % long(n_fft) + long(n_fft)) % long(n_fft);
                acc += channels[ch] * std::polar(1.0, -two_pi * double(turns) / double(n_fft));
            }
            y[r] = acc / double(row.channels.size());
        }
        return y;
    }

    // Power over (azimuth grid index, elevation angle) for one frame's channel vector.
    struct AngleMap
    {
        std::size_t n_fft = 0;
        std::vector<double> elevation; // [rad]
        Matrix<double> power;          // rows: shifted azimuth index, cols: elevation
    };

    inline AngleMap compute_angle_map(const std::vector<cdouble> &channels, const DoaArray &arr, const PhaseErrorTable *table, std::size_t n_fft, const std::vector<double> &elevation_grid)
    {
        AngleMap map{n_fft, elevation_grid, Matrix<double>(n_fft, elevation_grid.size(), 0.0)};
        const auto positions = arr.row_positions();
        parallel_for(n_fft, [&](std::size_t i)
                     {
            const auto y = row_beams(channels, arr, table, n_fft, int(i) - int(n_fft / 2));
            const auto e = elevation_spectrum(y, positions, elevation_grid);
            for (std::size_t g = 0; g < e.size(); ++g)
                map.power(i, g) = e[g]; });
        return map;
    }

    struct RegionAngles
    {
        std::string id;
        double phi = 0.0;   // azimuth [rad]
        double theta = 0.0; // elevation [rad]
    };

    struct RegionSignal
    {
        std::string id;
        int grid_index = 0;
        std::vector<cdouble> slowtime;
    };

    inline constexpr double field_of_view = 70.0 * pi / 180.0;

    // Direction cosines of the chest-plane point at (tan phi, tan theta, 1).
    inline std::pair<double, double> region_direction(const RegionAngles &r)
    {
        const double a = std::tan(r.phi), b = std::tan(r.theta);
        const double n = std::sqrt(1.0 + a * a + b * b);
        return {a / n, b / n};
    }

    // One complex sample per frame and region: azimuth beam at the nearest grid index, then each
    // elevation row weighted by exp(-j pi q w) and summed.
    inline std::vector<RegionSignal> select_region_signals(const Matrix<cdouble> &bin_data, const DoaArray &arr, const std::vector<RegionAngles> &regions,
                                                           const PhaseErrorTable *table, std::size_t n_fft)
    {
        if (regions.empty() || regions.size() > 5)
            throw Error(ErrorCode::invalid_argument, "between one and five regions required");
        if (bin_data.rows() != arr.va.elements.size())
            throw Error(ErrorCode::invalid_argument, "channel count does not match the array");
        std::vector<RegionSignal> out;
        std::vector<double> ws;
        for (const auto &r : regions)
        {
            if (!(std::abs(r.phi) <= field_of_view) || !(std::abs(r.theta) <= field_of_view))
                throw Error(ErrorCode::angle_out_of_fov, "region " + r.id + " lies outside +-70 degrees");
            const auto [u, w] = region_direction(r);
            out.push_back({r.id, nearest_grid_index(u, n_fft), std::vector<cdouble>(bin_data.cols())});
            ws.push_back(w);
        }
        parallel_for(bin_data.cols(), [&](std::size_t m)
                     {
            const auto channels = bin_data.column(m);
            for (std::size_t k = 0; k < out.size(); ++k)
            {
                const auto y = row_beams(channels, arr, table, n_fft, out[k].grid_index);
                cdouble acc{};
                for (std::size_t r = 0; r < y.size(); ++r)
                    acc += y[r] * std::polar(1.0, -pi * arr.rows[r].position * ws[k]);
                out[k].slowtime[m] = acc;
            } });
        return out;
    }

    inline std::vector<RegionSignal> select_region_signals(const RangeCube &rc, const SubjectLocation &loc, const DoaArray &arr,
                                                           const std::vector<RegionAngles> &regions, const PhaseErrorTable *table, std::size_t n_fft)
    {
        return select_region_signals(extract_range_bin(rc, loc.bin), arr, regions, table, n_fft);
    }
}

#endif
