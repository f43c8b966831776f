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

#ifndef MULTIVITAL_IO_HPP
#define MULTIVITAL_IO_HPP

#include "metrics.hpp"

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace multivital
{
    // ---------------------------------------------------------------- files

    namespace detail
    {
        // Writes through a sibling temporary that is renamed into place on success.
        template <typename Writer>
        void write_atomic(const std::string &path, Writer &&writer)
        {
            const std::filesystem::path target(path);
            std::filesystem::path tmp = target;
            tmp += ".tmp";
            {
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                if (!out)
                    throw Error(ErrorCode::io_error, "cannot open " + tmp.string() + " for writing");
                writer(out);
                out.flush();
                if (!out)
                    throw Error(ErrorCode::io_error, "write to " + tmp.string() + " failed");
            }
            std::error_code ec;
            std::filesystem::rename(tmp, target, ec);
            if (ec)
            {
                std::filesystem::remove(tmp, ec);
                throw Error(ErrorCode::io_error, "cannot move " + tmp.string() + " to " + path);
            }
        }

        inline std::string read_file(const std::string &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw Error(ErrorCode::io_error, "cannot open " + path);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }

        template <typename T>
        void put_le(std::string &buf, T v)
        {
            using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
            U u;
            std::memcpy(&u, &v, sizeof(T));
            for (std::size_t i = 0; i < sizeof(T); ++i)
                buf.push_back(char((u >> (8 * i)) & 0xFF));
        }

        template <typename T>
        T get_le(const char *p)
        {
            using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
            U u = 0;
            for (std::size_t i = 0; i < sizeof(T); ++i)
                u |= U(static_cast<unsigned char>(p[i])) << (8 * i);
            T v;
            std::memcpy(&v, &u, sizeof(T));
            return v;
        }
    }

    // ---------------------------------------------------------------- MVDC cube files

    inline constexpr std::uint32_t cube_format_version = 1;
    inline constexpr std::size_t cube_header_bytes = 72;

    // Header: "MVDC", u32 version, u32 n_frames, n_tx, n_rx, n_samples, f64 fc, fs, k_chirp, prt, t_frame,
    // u64 seed. Payload: little-endian float32 (I, Q) pairs in (frame, tx, rx, sample) order.
    inline void save_cube(const RawDataCube &cube, const std::string &path)
    {
        const auto &m = cube.meta;
        if (cube.samples.size() != std::size_t(m.n_frames) * cube.frame_size())
            throw Error(ErrorCode::invalid_argument, "cube sample count does not match its dimensions");
        std::string header = "MVDC";
        detail::put_le(header, cube_format_version);
        for (std::uint32_t v : {m.n_frames, m.n_tx, m.n_rx, m.n_samples})
            detail::put_le(header, v);
        for (double v : {m.fc, m.fs, m.k_chirp, m.prt, m.t_frame})
            detail::put_le(header, v);
        detail::put_le(header, m.seed);
        detail::write_atomic(path, [&](std::ofstream &out)
                             {
            out.write(header.data(), std::streamsize(header.size()));
            if constexpr (std::endian::native == std::endian::little)
                out.write(reinterpret_cast<const char *>(cube.samples.data()), std::streamsize(cube.samples.size() * sizeof(cfloat)));
            else
            {
                std::string chunk;
                for (const auto &v : cube.samples)
                {
                    detail::put_le(chunk, v.real());
                    detail::put_le(chunk, v.imag());
                }
                out.write(chunk.data(), std::streamsize(chunk.size()));
            } });
    }

    inline RawDataCube load_cube(const std::string &path)
    {
        const std::string raw = detail::read_file(path);
        if (raw.size() < 4 || raw.compare(0, 4, "MVDC") != 0)
            throw Error(ErrorCode::bad_magic, path + " is not an MVDC cube");
        if (raw.size() < cube_header_bytes)
            throw Error(ErrorCode::truncated_payload, "header needs " + std::to_string(cube_header_bytes) + " bytes, file has " + std::to_string(raw.size()));
        const char *p = raw.data() + 4;
        const auto version = detail::get_le<std::uint32_t>(p);
        if (version != cube_format_version)
            throw Error(ErrorCode::version_unsupported, "cube version " + std::to_string(version));
        RawDataCube cube;
        auto &m = cube.meta;
        m.n_frames = detail::get_le<std::uint32_t>(p + 4);
        m.n_tx = detail::get_le<std::uint32_t>(p + 8);
        m.n_rx = detail::get_le<std::uint32_t>(p + 12);
        m.n_samples = detail::get_le<std::uint32_t>(p + 16);
        m.fc = detail::get_le<double>(p + 20);
        m.fs = detail::get_le<double>(p + 28);
        m.k_chirp = detail::get_le<double>(p + 36);
        m.prt = detail::get_le<double>(p + 44);
        m.t_frame = detail::get_le<double>(p + 52);
        m.seed = detail::get_le<std::uint64_t>(p + 60);
        const std::size_t count = std::size_t(m.n_frames) * m.n_tx * m.n_rx * m.n_samples;
        const std::size_t expected = 8 * count;
        const std::size_t actual = raw.size() - cube_header_bytes;
        if (actual < expected)
            throw Error(ErrorCode::truncated_payload, "expected " + std::to_string(expected) + " payload bytes, found " + std::to_string(actual));
        if (actual > expected)
            throw Error(ErrorCode::parse_error, std::to_string(actual - expected) + " trailing bytes after payload");
        cube.samples.resize(count);
        const char *q = raw.data() + cube_header_bytes;
        if constexpr (std::endian::native == std::endian::little)
            std::memcpy(cube.samples.data(), q, expected);
        else
            for (std::size_t i = 0; i < count; ++i)
                cube.samples[i] = {detail::get_le<float>(q + 8 * i), detail::get_le<float>(q + 8 * i + 4)};
        return cube;
    }

    // ---------------------------------------------------------------- CSV

    namespace csv
    {
        // Shortest representation that parses back to the same double.
        inline std::string number(double v)
        {
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof(buf), v);
            return std::string(buf, res.ptr);
        }

        inline double parse_number(std::string_view s, std::size_t line)
        {
            double v = 0.0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
            return v;
        }

        inline std::string field(const std::string &s)
        {
            if (s.find_first_of(",\"\r\n") == std::string::npos)
                return s;
            std::string out = "\"";
            for (char c : s)
            {
                if (c == '"')
                    out += '"';
                out += c;
            }
            return out + "\"";
        }

        // Splits an RFC 4180 document into records. Quoted fields may hold separators and newlines.
        inline std::vector<std::vector<std::string>> parse(const std::string &text)
        {
            std::vector<std::vector<std::string>> rows;
            std::vector<std::string> row;
            std::string cur;
            bool quoted = false, any = false;
            for (std::size_t i = 0; i < text.size(); ++i)
            {
                const char c = text[i];
                if (quoted)
                {
                    if (c == '"' && i + 1 < text.size() && text[i + 1] == '"')
                    {
                        cur += '"';
                        ++i;
                    }
                    else if (c == '"')
                        quoted = false;
                    else
                        cur += c;
                    continue;
                }
                if (c == '"')
                {
                    quoted = true;
                    any = true;
                }
                else if (c == ',')
                {
                    row.push_back(std::move(cur));
                    cur.clear();
                    any = true;
                }
                else if (c == '\n' || c == '\r')
                {
                    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                        ++i;
                    if (any || !cur.empty())
                    {
                        row.push_back(std::move(cur));
                        rows.push_back(std::move(row));
                    }
                    row.clear();
                    cur.clear();
                    any = false;
                }
                else
                {
                    cur += c;
                    any = true;
                }
            }
            if (quoted)
                throw Error(ErrorCode::parse_error, "unterminated quoted field");
            if (any || !cur.empty())
            {
                row.push_back(std::move(cur));
                rows.push_back(std::move(row));
            }
            return rows;
        }
    }

    // Columns time_s, region, phase_rad, displacement_mm; rows grouped by trace in input order.
    // Traces without phase leave that field empty.
    inline void export_traces(const std::vector<DisplacementTrace> &traces, const std::string &path)
    {
        if (traces.empty())
            throw Error(ErrorCode::invalid_argument, "no traces to export");
        detail::write_atomic(path, [&](std::ofstream &out)
                             {
            std::string text = "time_s,region,phase_rad,displacement_mm\n";
            for (const auto &t : traces)
            {
                const std::string region = csv::field(t.region);
                for (std::size_t i = 0; i < t.displacement.size(); ++i)
                {
                    text += csv::number(t.t0 + double(i) / t.frame_rate);
                    text += ',';
                    text += region;
                    text += ',';
                    if (i < t.phase.size())
                        text += csv::number(t.phase[i]);
                    text += ',';
                    text += csv::number(t.displacement[i]);
                    text += '\n';
                }
                if (text.size() > (1u << 20))
                {
                    out << text;
                    text.clear();
                }
            }
            out << text; });
    }

    // Inverse of export_traces. The rate of each trace is recovered from its time column.
    inline std::vector<DisplacementTrace> import_traces(const std::string &path)
    {
        const auto rows = csv::parse(detail::read_file(path));
        if (rows.empty() || rows[0] != std::vector<std::string>{"time_s", "region", "phase_rad", "displacement_mm"})
            throw Error(ErrorCode::parse_error, path + ": expected header time_s,region,phase_rad,displacement_mm");
        std::vector<DisplacementTrace> traces;
        std::map<std::string, std::size_t> index;
        std::map<std::string, std::vector<double>> times;
        for (std::size_t r = 1; r < rows.size(); ++r)
        {
            const auto &row = rows[r];
            if (row.size() != 4)
                throw Error(ErrorCode::parse_error, path + " line " + std::to_string(r + 1) + ": expected 4 fields");
            auto [it, fresh] = index.try_emplace(row[1], traces.size());
            if (fresh)
            {
                traces.push_back({});
                traces.back().region = row[1];
            }
            auto &t = traces[it->second];
            times[row[1]].push_back(csv::parse_number(row[0], r + 1));
            if (!row[2].empty())
                t.phase.push_back(csv::parse_number(row[2], r + 1));
            t.displacement.push_back(csv::parse_number(row[3], r + 1));
        }
        for (auto &t : traces)
        {
            const auto &ts = times[t.region];
            t.t0 = ts.front();
            if (ts.size() > 1)
                t.frame_rate = double(ts.size() - 1) / (ts.back() - ts.front());
            if (!t.phase.empty() && t.phase.size() != t.displacement.size())
                throw Error(ErrorCode::parse_error, path + ": region " + t.region + " has partial phase column");
        }
        return traces;
    }

    // Multi-channel accelerometer recording: one triaxial channel per region plus an optional ECG column.
    struct ScgRecording
    {
        double fs = 0.0;
        double t0 = 0.0;
        std::vector<ScgChannel> channels;
        std::vector<double> ecg;
    };

    // Header time_s, <region>_x, <region>_y, <region>_z for each channel, then ECG when present.
    inline void write_scg_csv(const ScgRecording &rec, const std::string &path)
    {
        if (rec.channels.empty())
            throw Error(ErrorCode::invalid_argument, "recording has no channels");
        const std::size_t n = rec.channels.front().ax.size();
        detail::write_atomic(path, [&](std::ofstream &out)
                             {
            std::string text = "time_s";
            for (const auto &c : rec.channels)
                for (const char *axis : {"_x", "_y", "_z"})
                    text += "," + csv::field(c.region + axis);
            if (!rec.ecg.empty())
                text += ",ECG";
            text += '\n';
            for (std::size_t i = 0; i < n; ++i)
            {
                text += csv::number(rec.t0 + double(i) / rec.fs);
                for (const auto &c : rec.channels)
                    for (const auto *v : {&c.ax, &c.ay, &c.az})
                    {
                        text += ',';
                        text += csv::number((*v)[i]);
                    }
                if (!rec.ecg.empty())
                {
                    text += ',';
                    text += csv::number(rec.ecg[i]);
                }
                text += '\n';
                if (text.size() > (1u << 20))
                {
                    out << text;
                    text.clear();
                }
            }
            out << text; });
    }

    inline ScgRecording read_scg_csv(const std::string &path)
    {
        const auto rows = csv::parse(detail::read_file(path));
        if (rows.size() < 3 || rows[0].empty() || rows[0][0] != "time_s")
            throw Error(ErrorCode::parse_error, path + ": expected a time_s column and at least two samples");
        const auto &header = rows[0];
        ScgRecording rec;
        std::ptrdiff_t ecg_col = -1;
        std::vector<std::pair<std::size_t, std::size_t>> slots(header.size(), {SIZE_MAX, 0}); // (channel, axis)
        for (std::size_t c = 1; c < header.size(); ++c)
        {
            const auto &name = header[c];
            if (name == "ECG")
            {
                ecg_col = std::ptrdiff_t(c);
                continue;
            }
            const auto cut = name.rfind('_');
            const std::string axis = cut == std::string::npos ? "" : name.substr(cut + 1);
            if (axis != "x" && axis != "y" && axis != "z")
                throw Error(ErrorCode::parse_error, path + ": column '" + name + "' is not <region>_<x|y|z> or ECG");
            const std::string region = name.substr(0, cut);
            auto it = std::find_if(rec.channels.begin(), rec.channels.end(), [&](const ScgChannel &ch) { return ch.region == region; });
            if (it == rec.channels.end())
            {
                rec.channels.push_back({});
                rec.channels.back().region = region;
                it = rec.channels.end() - 1;
            }
            slots[c] = {std::size_t(it - rec.channels.begin()), std::size_t(axis[0] - 'x')};
        }
        std::vector<std::array<int, 3>> seen(rec.channels.size(), {0, 0, 0});
        for (std::size_t c = 1; c < header.size(); ++c)
            if (slots[c].first != SIZE_MAX)
                ++seen[slots[c].first][slots[c].second];
        for (std::size_t k = 0; k < rec.channels.size(); ++k)
            if (seen[k] != std::array<int, 3>{1, 1, 1})
                throw Error(ErrorCode::parse_error, path + ": region " + rec.channels[k].region + " needs exactly one x, y and z column");

        std::vector<double> time;
        for (std::size_t r = 1; r < rows.size(); ++r)
        {
            const auto &row = rows[r];
            if (row.size() != header.size())
                throw Error(ErrorCode::parse_error, path + " line " + std::to_string(r + 1) + ": expected " + std::to_string(header.size()) + " fields");
            time.push_back(csv::parse_number(row[0], r + 1));
            for (std::size_t c = 1; c < row.size(); ++c)
            {
                const double v = csv::parse_number(row[c], r + 1);
                if (std::ptrdiff_t(c) == ecg_col)
                    rec.ecg.push_back(v);
                else
                {
                    auto &ch = rec.channels[slots[c].first];
                    (slots[c].second == 0 ? ch.ax : slots[c].second == 1 ? ch.ay : ch.az).push_back(v);
                }
            }
        }
        rec.t0 = time.front();
        rec.fs = double(time.size() - 1) / (time.back() - time.front());
        if (!(rec.fs > 0.0) || !std::isfinite(rec.fs))
            throw Error(ErrorCode::parse_error, path + ": time column must increase");
        for (auto &ch : rec.channels)
            ch.fs = rec.fs;
        return rec;
    }

    // Long-format angle map: azimuth_deg, elevation_deg, power.
    inline void export_angle_map(const AngleMap &map, const std::string &path)
    {
        detail::write_atomic(path, [&](std::ofstream &out)
                             {
            std::string text = "azimuth_deg,elevation_deg,power\n";
            for (std::size_t i = 0; i < map.n_fft; ++i)
            {
                const double az = grid_angle(int(i) - int(map.n_fft / 2), map.n_fft) * 180.0 / pi;
                for (std::size_t g = 0; g < map.elevation.size(); ++g)
                    text += csv::number(az) + ',' + csv::number(map.elevation[g] * 180.0 / pi) + ',' + csv::number(map.power(i, g)) + '\n';
            }
            out << text; });
    }

    // ---------------------------------------------------------------- JSON configuration

    struct PipelineConfig
    {
        std::size_t n_fft_range = 0; // 0 selects n_adc
        std::size_t n_fft_azimuth = 256;
        bool near_field = true;
        Band band;
        Window window = Window::none;
        std::array<double, 3> elevation_grid_deg{-60.0, 60.0, 1.0}; // first, last, step
    };

    struct ScgConfig
    {
        double fs = 1000.0;     // synthesized accelerometer rate [Hz]
        double noise_rms = 0.0; // additive white noise [m/s^2]
        FilterSpec filter;
    };

    struct RunConfig
    {
        ChirpConfig chirp;
        ArrayGeometry geometry;
        Scene scene;
        PipelineConfig pipeline;
        std::optional<SensorLayout> layout;
        ScgConfig scg;
    };

    namespace detail
    {
        using json = nlohmann::json;

        // Reads members of one object and rejects any member nobody asked for.
        class ObjectReader
        {
        public:
            ObjectReader(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j.is_object())
                    throw Error(ErrorCode::invalid_config, where() + ": expected an object");
            }

            std::string child(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }
            bool has(const std::string &key) const { return j_.contains(key); }
            void mark(const std::string &key) { used_.insert(key); }

            const json &at(const std::string &key)
            {
                used_.insert(key);
                if (!j_.contains(key))
                    throw Error(ErrorCode::invalid_config, child(key) + ": required");
                return j_.at(key);
            }

            double number(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_number())
                    throw Error(ErrorCode::invalid_config, child(key) + ": expected a number");
                return v.get<double>();
            }

            double number(const std::string &key, double fallback) { return has(key) ? number(key) : (used_.insert(key), fallback); }

            std::uint64_t count(const std::string &key)
            {
                const auto &v = at(key);
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                    throw Error(ErrorCode::invalid_config, child(key) + ": expected a non-negative integer");
                return v.get<std::uint64_t>();
            }

            std::uint64_t count(const std::string &key, std::uint64_t fallback) { return has(key) ? count(key) : (used_.insert(key), fallback); }

            bool boolean(const std::string &key, bool fallback)
            {
                used_.insert(key);
                if (!has(key))
                    return fallback;
                if (!j_.at(key).is_boolean())
                    throw Error(ErrorCode::invalid_config, child(key) + ": expected true or false");
                return j_.at(key).get<bool>();
            }

            std::string string(const std::string &key, const std::string &fallback)
            {
                used_.insert(key);
                if (!has(key))
                    return fallback;
                if (!j_.at(key).is_string())
                    throw Error(ErrorCode::invalid_config, child(key) + ": expected a string");
                return j_.at(key).get<std::string>();
            }

            std::vector<double> numbers(const std::string &key, std::size_t expected = 0)
            {
                const auto &v = at(key);
                if (!v.is_array() || (expected && v.size() != expected))
                    throw Error(ErrorCode::invalid_config, child(key) + ": expected an array" + (expected ? " of " + std::to_string(expected) + " numbers" : std::string()));
                std::vector<double> out;
                for (std::size_t i = 0; i < v.size(); ++i)
                {
                    if (!v[i].is_number())
                        throw Error(ErrorCode::invalid_config, child(key) + "[" + std::to_string(i) + "]: expected a number");
                    out.push_back(v[i].get<double>());
                }
                return out;
            }

            void finish() const
            {
                for (const auto &[key, value] : j_.items())
                    if (!used_.count(key))
                        throw Error(ErrorCode::invalid_config, child(key) + ": unknown field");
            }

            std::string where() const { return path_.empty() ? "<root>" : path_; }

        private:
            const json &j_;
            std::string path_;
            std::set<std::string> used_;
        };

        inline Vec3 vec3(ObjectReader &r, const std::string &key)
        {
            const auto v = r.numbers(key, 3);
            return {v[0], v[1], v[2]};
        }

        inline ChirpConfig parse_chirp(const json &j)
        {
            ObjectReader r(j, "chirp");
            const std::string preset = r.string("preset", "");
            ChirpConfig c;
            if (preset == "simulation")
                c = simulation_chirp();
            else if (preset == "measurement")
                c = measurement_chirp();
            else if (!preset.empty())
                throw Error(ErrorCode::invalid_config, "chirp.preset: expected 'simulation' or 'measurement'");
            const bool need = preset.empty();
            auto num = [&](const char *k, double &dst)
            { if (need || r.has(k)) dst = r.number(k); };
            auto cnt = [&](const char *k, std::size_t &dst)
            { if (need || r.has(k)) dst = std::size_t(r.count(k)); };
            num("fc", c.fc);
            num("prt", c.prt);
            num("t_frame", c.t_frame);
            cnt("n_adc", c.n_adc);
            num("fs", c.fs);
            num("k_chirp", c.k_chirp);
            c.n_chirps_per_frame = std::size_t(r.count("n_chirps_per_frame", c.n_chirps_per_frame));
            cnt("n_frames", c.n_frames);
            r.finish();
            validate(c);
            return c;
        }

        inline ArrayGeometry parse_geometry(const json &j)
        {
            if (j.is_string())
            {
                if (j.get<std::string>() != "paper-default")
                    throw Error(ErrorCode::invalid_config, "geometry: expected \"paper-default\" or an object");
                return paper_geometry();
            }
            ObjectReader r(j, "geometry");
            ArrayGeometry g;
            for (const char *side : {"tx", "rx"})
            {
                const auto &arr = r.at(side);
                if (!arr.is_array() || arr.empty())
                    throw Error(ErrorCode::invalid_config, r.child(side) + ": expected a non-empty array of [az, el]");
                for (std::size_t i = 0; i < arr.size(); ++i)
                {
                    const auto &e = arr[i];
                    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
                        throw Error(ErrorCode::invalid_config, r.child(side) + "[" + std::to_string(i) + "]: expected two integers");
                    (std::string(side) == "tx" ? g.tx : g.rx).push_back({e[0].get<int>(), e[1].get<int>()});
                }
            }
            center_reference(g);
            if (r.has("reference"))
            {
                const auto ref = r.numbers("reference", 2);
                g.ref_az = ref[0];
                g.ref_el = ref[1];
            }
            r.finish();
            return g;
        }

        inline Motion parse_motion(const json &j, const std::string &path)
        {
            ObjectReader r(j, path);
            const std::string type = r.string("type", "sinusoid");
            Motion out;
            if (type == "sinusoid")
            {
                SinusoidMotion s;
                if (r.has("direction"))
                    s.direction = vec3(r, "direction");
                s.amplitude = r.number("amplitude_mm", 0.0) / 1000.0;
                s.frequency = r.number("frequency_hz", 0.0);
                s.phase = r.number("phase_rad", 0.0);
                out = s;
            }
            else if (type == "sampled")
            {
                SampledMotion s;
                if (r.has("direction"))
                    s.direction = vec3(r, "direction");
                s.rate = r.number("rate_hz");
                for (double v : r.numbers("values_mm"))
                    s.values.push_back(v / 1000.0);
                out = s;
            }
            else
                throw Error(ErrorCode::invalid_config, r.child("type") + ": expected 'sinusoid' or 'sampled'");
            r.finish();
            return out;
        }

        inline Scene parse_scene(const json &j)
        {
            ObjectReader r(j, "scene");
            Scene s;
            const auto &pts = r.at("points");
            if (!pts.is_array())
                throw Error(ErrorCode::invalid_config, "scene.points: expected an array");
            for (std::size_t i = 0; i < pts.size(); ++i)
            {
                const std::string path = "scene.points[" + std::to_string(i) + "]";
                ObjectReader p(pts[i], path);
                ScatterPoint sp;
                sp.position0 = vec3(p, "position");
                sp.reflectivity = p.number("reflectivity", 1.0);
                sp.region = p.string("region", "");
                if (p.has("motion"))
                    sp.motion = parse_motion(p.at("motion"), path + ".motion");
                p.finish();
                s.points.push_back(std::move(sp));
            }
            r.mark("snr_db");
            if (r.has("snr_db") && !r.at("snr_db").is_null())
                s.snr_db = r.number("snr_db");
            s.seed = r.count("seed", 0);
            const std::string fid = r.string("fidelity", "auto");
            if (fid == "auto")
                s.fidelity = Fidelity::automatic;
            else if (fid == "plane_wave")
                s.fidelity = Fidelity::plane_wave;
            else if (fid == "exact_path")
                s.fidelity = Fidelity::exact_path;
            else
                throw Error(ErrorCode::invalid_config, "scene.fidelity: expected auto, plane_wave or exact_path");
            r.finish();
            validate(s);
            return s;
        }

        inline PipelineConfig parse_pipeline(const json &j)
        {
            ObjectReader r(j, "pipeline");
            PipelineConfig p;
            p.n_fft_range = std::size_t(r.count("n_fft_range", 0));
            p.n_fft_azimuth = std::size_t(r.count("n_fft_azimuth", p.n_fft_azimuth));
            if ((p.n_fft_range && !is_power_of_two(p.n_fft_range)) || !is_power_of_two(p.n_fft_azimuth))
                throw Error(ErrorCode::invalid_config, "pipeline: FFT sizes must be powers of two");
            p.near_field = r.boolean("near_field", p.near_field);
            if (r.has("band_hz"))
            {
                const auto b = r.numbers("band_hz", 2);
                p.band = {b[0], b[1]};
            }
            const std::string w = r.string("window", "none");
            if (w == "hann")
                p.window = Window::hann;
            else if (w != "none")
                throw Error(ErrorCode::invalid_config, "pipeline.window: expected none or hann");
            if (r.has("elevation_grid_deg"))
            {
                const auto g = r.numbers("elevation_grid_deg", 3);
                if (!(g[2] > 0.0) || g[1] < g[0] || std::abs(g[0]) >= 90.0 || std::abs(g[1]) >= 90.0)
                    throw Error(ErrorCode::invalid_config, "pipeline.elevation_grid_deg: expected [first, last, step] inside +-90");
                p.elevation_grid_deg = {g[0], g[1], g[2]};
            }
            r.finish();
            return p;
        }

        inline SensorLayout parse_layout(const json &j)
        {
            ObjectReader r(j, "layout");
            SensorLayout l;
            l.z_a = r.number("z_a");
            const auto &pts = r.at("points");
            if (!pts.is_array())
                throw Error(ErrorCode::invalid_config, "layout.points: expected an array");
            for (std::size_t i = 0; i < pts.size(); ++i)
            {
                ObjectReader p(pts[i], "layout.points[" + std::to_string(i) + "]");
                LayoutPoint lp;
                lp.id = p.string("id", "");
                lp.x = p.number("x");
                lp.y = p.number("y");
                p.finish();
                l.points.push_back(lp);
            }
            r.finish();
            compute_alignment(l); // validates A and z_a
            return l;
        }

        inline ScgConfig parse_scg(const json &j)
        {
            ObjectReader r(j, "scg");
            ScgConfig s;
            s.fs = r.number("fs", s.fs);
            s.noise_rms = r.number("noise_rms", s.noise_rms);
            s.filter.cutoff = r.number("cutoff_hz", s.filter.cutoff);
            s.filter.order = int(r.count("order", std::uint64_t(s.filter.order)));
            s.filter.trim_s = r.number("trim_s", s.filter.trim_s);
            s.filter.decimate_to = r.number("decimate_to_hz", s.filter.decimate_to);
            r.finish();
            if (!(s.fs > 0.0) || !(s.filter.cutoff > 0.0) || !(s.filter.cutoff < s.fs / 2.0))
                throw Error(ErrorCode::invalid_config, "scg: need fs > 0 and 0 < cutoff_hz < fs/2");
            return s;
        }
    }

    // Parses a run configuration; unknown members anywhere are rejected with their key path.
    inline RunConfig parse_run_config(const std::string &text)
    {
        detail::json j;
        try
        {
            j = detail::json::parse(text);
        }
        catch (const detail::json::parse_error &e)
        {
            throw Error(ErrorCode::invalid_config, std::string("JSON syntax: ") + e.what());
        }
        detail::ObjectReader r(j, "");
        RunConfig c;
        c.chirp = detail::parse_chirp(r.at("chirp"));
        c.geometry = r.has("geometry") ? detail::parse_geometry(r.at("geometry")) : paper_geometry();
        c.scene = detail::parse_scene(r.at("scene"));
        if (r.has("pipeline"))
            c.pipeline = detail::parse_pipeline(r.at("pipeline"));
        if (r.has("layout"))
            c.layout = detail::parse_layout(r.at("layout"));
        if (r.has("scg"))
            c.scg = detail::parse_scg(r.at("scg"));
        r.finish();
        if (c.pipeline.n_fft_range && c.pipeline.n_fft_range < c.chirp.n_adc)
            throw Error(ErrorCode::invalid_config, "pipeline.n_fft_range: must be at least chirp.n_adc");
        return c;
    }

    inline RunConfig load_run_config(const std::string &path)
    {
        return parse_run_config(detail::read_file(path));
    }
}

#endif
