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

#include <catch2/catch_amalgamated.hpp>
#include <multivital.hpp>

#include <filesystem>
#include <fstream>
#include <random>

using namespace multivital;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch_dir()
    {
        static const fs::path dir = []
        {
            auto d = fs::temp_directory_path() / ("multivital_io_" + std::to_string(std::random_device{}()));
            fs::create_directories(d);
            return d;
        }();
        return dir;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    void spit(const fs::path &p, const std::string &s)
    {
        std::ofstream out(p, std::ios::binary);
        out << s;
    }

    RawDataCube small_cube(std::uint64_t seed)
    {
        auto cfg = measurement_chirp();
        cfg.n_frames = 3;
        cfg.n_adc = 16;
        ArrayGeometry g;
        g.tx = {{0, 0}, {2, 0}};
        g.rx = {{0, 0}, {1, 0}, {2, 0}};
        Scene s;
        ScatterPoint p;
        p.position0 = {0.1, 0.8, 0.0};
        p.motion = SinusoidMotion{{0.0, 1.0, 0.0}, 1e-3, 1.0, 0.0};
        s.points = {p};
        s.snr_db = 5.0;
        s.seed = seed;
        return simulate(s, cfg, g);
    }

    ErrorCode code_of(auto &&fn)
    {
        try
        {
            fn();
        }
        catch (const Error &e)
        {
            return e.code();
        }
        return ErrorCode::invalid_argument; // sentinel: nothing thrown
    }

    std::string config_text()
    {
        return R"({
  "chirp": { "preset": "measurement", "n_frames": 4 },
  "scene": { "points": [ { "position": [0, 0.5, 0], "region": "A",
      "motion": { "type": "sinusoid", "direction": [0, -1, 0], "amplitude_mm": 0.3, "frequency_hz": 1.1 } } ],
    "seed": 3 },
  "pipeline": { "near_field": true }
})";
    }
}

TEST_CASE("cube file - bit-identical roundtrip and header layout")
{
    const auto c = small_cube(5);
    const auto path = (scratch_dir() / "a.mvdc").string();
    save_cube(c, path);
    const auto raw = slurp(path);
    CHECK(raw.size() == cube_header_bytes + 8 * c.samples.size());
    CHECK(raw.substr(0, 4) == "MVDC");
    CHECK(std::uint8_t(raw[4]) == 1);
    CHECK(std::uint8_t(raw[8]) == 3);  // n_frames
    CHECK(std::uint8_t(raw[12]) == 2); // n_tx
    CHECK(std::uint8_t(raw[16]) == 3); // n_rx
    CHECK(std::uint8_t(raw[20]) == 16);
    CHECK(std::uint8_t(raw[64]) == 5); // seed, little-endian
    CHECK(!fs::exists(path + ".tmp"));

    const auto back = load_cube(path);
    CHECK(back.meta == c.meta);
    REQUIRE(back.samples.size() == c.samples.size());
    CHECK(std::memcmp(back.samples.data(), c.samples.data(), c.samples.size() * sizeof(cfloat)) == 0);
}

TEST_CASE("cube file - damaged inputs")
{
    const auto path = scratch_dir() / "b.mvdc";
    save_cube(small_cube(1), path.string());
    const auto raw = slurp(path);

    spit(path, "XVDC" + raw.substr(4));
    CHECK(code_of([&] { load_cube(path.string()); }) == ErrorCode::bad_magic);

    spit(path, raw.substr(0, raw.size() - 9));
    try
    {
        load_cube(path.string());
        FAIL("expected truncated-payload");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::truncated_payload);
        const std::string msg = e.what();
        CHECK(msg.find(std::to_string(raw.size() - cube_header_bytes)) != std::string::npos);
        CHECK(msg.find(std::to_string(raw.size() - cube_header_bytes - 9)) != std::string::npos);
    }

    spit(path, raw.substr(0, 40));
    CHECK(code_of([&] { load_cube(path.string()); }) == ErrorCode::truncated_payload);

    auto v2 = raw;
    v2[4] = 2;
    spit(path, v2);
    CHECK(code_of([&] { load_cube(path.string()); }) == ErrorCode::version_unsupported);

    spit(path, raw + "xx");
    CHECK(code_of([&] { load_cube(path.string()); }) == ErrorCode::parse_error);

    CHECK(code_of([&] { load_cube((scratch_dir() / "missing.mvdc").string()); }) == ErrorCode::io_error);
}

TEST_CASE("cube file - same seed, same bytes")
{
    const auto a = (scratch_dir() / "s1.mvdc").string(), b = (scratch_dir() / "s2.mvdc").string(), c = (scratch_dir() / "s3.mvdc").string();
    save_cube(small_cube(42), a);
    save_cube(small_cube(42), b);
    save_cube(small_cube(43), c);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("csv - quoting and parsing")
{
    CHECK(csv::field("A") == "A");
    CHECK(csv::field("a,b") == "\"a,b\"");
    CHECK(csv::field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    const auto rows = csv::parse("x,y\n\"a,b\",\"c\"\"d\"\n1,\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] == std::vector<std::string>{"a,b", "c\"d"});
    CHECK(rows[2] == std::vector<std::string>{"1", ""});
    for (double v : {0.1, -1e-300, 6.02214076e23, 1.0 / 3.0, 0.0})
        CHECK(csv::parse_number(csv::number(v), 1) == v);
    CHECK(code_of([] { csv::parse_number("1.5x", 7); }) == ErrorCode::parse_error);
}

TEST_CASE("traces - export layout and exact reload")
{
    std::vector<DisplacementTrace> traces;
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    for (const char *id : {"A", "P", "E", "T", "M"})
    {
        DisplacementTrace t;
        t.region = id;
        t.frame_rate = 20.0;
        for (int m = 0; m < 7; ++m)
        {
            t.phase.push_back(g(rng));
            t.displacement.push_back(g(rng) / 3.0);
        }
        traces.push_back(t);
    }
    const auto path = scratch_dir() / "traces.csv";
    export_traces(traces, path.string());
    const auto text = slurp(path);
    CHECK(text.find('\r') == std::string::npos);
    const auto rows = csv::parse(text);
    REQUIRE(rows.size() == 1 + 5 * 7);
    CHECK(rows[0] == std::vector<std::string>{"time_s", "region", "phase_rad", "displacement_mm"});
    for (std::size_t r = 1; r < rows.size(); ++r)
        CHECK(rows[r][1] == traces[(r - 1) / 7].region);

    const auto back = import_traces(path.string());
    REQUIRE(back.size() == 5);
    for (std::size_t k = 0; k < 5; ++k)
    {
        CHECK(back[k].region == traces[k].region);
        CHECK(back[k].phase == traces[k].phase);
        CHECK(back[k].displacement == traces[k].displacement);
        CHECK(std::abs(back[k].frame_rate - 20.0) < 1e-9);
    }

    DisplacementTrace one;
    one.region = "A";
    one.frame_rate = 20.0;
    one.phase = {0.0, 0.1, 0.2};
    one.displacement = {0.0, 0.01, 0.02};
    export_traces({one}, path.string());
    CHECK(csv::parse(slurp(path)).size() == 4);
    CHECK(code_of([&] { export_traces({}, path.string()); }) == ErrorCode::invalid_argument);

    spit(path, "time,region\n");
    CHECK(code_of([&] { import_traces(path.string()); }) == ErrorCode::parse_error);
}

TEST_CASE("scg csv - roundtrip with ECG column")
{
    ScgRecording rec;
    rec.fs = 100.0;
    rec.t0 = 0.0;
    for (const char *id : {"A", "P"})
    {
        ScgChannel ch{id, 100.0, {}, {}, {}};
        for (int i = 0; i < 50; ++i)
        {
            ch.ax.push_back(0.01 * i);
            ch.ay.push_back(-0.02 * i);
            ch.az.push_back(std::sin(0.1 * i));
        }
        rec.channels.push_back(ch);
    }
    for (int i = 0; i < 50; ++i)
        rec.ecg.push_back(i % 10 == 0 ? 1.0 : 0.0);
    const auto path = scratch_dir() / "channels.csv";
    write_scg_csv(rec, path.string());
    CHECK(csv::parse(slurp(path))[0] == std::vector<std::string>{"time_s", "A_x", "A_y", "A_z", "P_x", "P_y", "P_z", "ECG"});
    const auto back = read_scg_csv(path.string());
    CHECK(std::abs(back.fs - 100.0) < 1e-9);
    REQUIRE(back.channels.size() == 2);
    CHECK(back.channels[1].region == "P");
    CHECK(back.channels[1].az == rec.channels[1].az);
    CHECK(back.ecg == rec.ecg);

    spit(path, "time_s,A_x,A_y\n0,1,2\n0.1,1,2\n0.2,1,2\n");
    CHECK(code_of([&] { read_scg_csv(path.string()); }) == ErrorCode::parse_error);
    spit(path, "time_s,A_q\n0,1\n0.1,1\n0.2,1\n");
    CHECK(code_of([&] { read_scg_csv(path.string()); }) == ErrorCode::parse_error);
}

TEST_CASE("angle map export")
{
    AngleMap map{4, {-0.1, 0.0, 0.1}, Matrix<double>(4, 3, 2.5)};
    const auto path = scratch_dir() / "map.csv";
    export_angle_map(map, path.string());
    const auto rows = csv::parse(slurp(path));
    REQUIRE(rows.size() == 1 + 12);
    CHECK(rows[0] == std::vector<std::string>{"azimuth_deg", "elevation_deg", "power"});
    CHECK(csv::parse_number(rows[1][0], 2) == -90.0);
    CHECK(csv::parse_number(rows[12][2], 13) == 2.5);
}

TEST_CASE("run config - defaults and bundled files")
{
    const auto c = parse_run_config(config_text());
    CHECK(c.chirp.n_frames == 4);
    CHECK(c.chirp.n_adc == 256);
    CHECK(c.geometry.tx.size() == 12);
    CHECK(c.scene.seed == 3);
    CHECK(!c.scene.snr_db);
    CHECK(c.pipeline.near_field);
    REQUIRE(c.scene.points.size() == 1);
    const auto &m = std::get<SinusoidMotion>(c.scene.points[0].motion);
    CHECK(m.amplitude == 0.3e-3);
    CHECK(m.direction == Vec3{0.0, -1.0, 0.0});

    for (const char *name : {"paper-sim.json", "paper-phantom.json"})
        CHECK_NOTHROW(load_run_config(std::string(MULTIVITAL_CONFIG_DIR) + "/" + name));
    const auto phantom = load_run_config(std::string(MULTIVITAL_CONFIG_DIR) + "/paper-phantom.json");
    REQUIRE(phantom.layout);
    CHECK(phantom.layout->points.size() == 5);
    CHECK(phantom.scene.points.size() == 5);
}

TEST_CASE("run config - fail closed with key paths")
{
    auto message = [](const std::string &text)
    {
        try
        {
            parse_run_config(text);
        }
        catch (const Error &e)
        {
            CHECK(e.code() == ErrorCode::invalid_config);
            return std::string(e.what());
        }
        return std::string("accepted");
    };
    auto with = [](const std::string &from, const std::string &to)
    {
        auto t = config_text();
        const auto at = t.find(from);
        REQUIRE(at != std::string::npos);
        return t.replace(at, from.size(), to);
    };
    CHECK(message(with("\"seed\": 3", "\"seed\": 3, \"colour\": 1")).find("scene.colour") != std::string::npos);
    CHECK(message(with("\"frequency_hz\": 1.1", "\"frequency_hz\": 1.1, \"fq\": 2")).find("scene.points[0].motion.fq") != std::string::npos);
    CHECK(message(with("\"near_field\": true", "\"near_field\": 1")).find("pipeline.near_field") != std::string::npos);
    CHECK(message(with("\"n_frames\": 4", "\"n_frames\": 4, \"typo\": 0")).find("chirp.typo") != std::string::npos);
    CHECK(message(with("\"pipeline\"", "\"pipelines\"")).find("pipelines") != std::string::npos);
    CHECK(message(with("\"near_field\": true", "\"near_field\": true, \"n_fft_azimuth\": 100")) != "accepted");
    CHECK(message("{ not json") != "accepted");
    CHECK(message(with("\"preset\": \"measurement\"", "\"preset\": \"lab\"")) != "accepted");
    CHECK(code_of([] { load_run_config("/nonexistent/run.json"); }) == ErrorCode::io_error);
}
