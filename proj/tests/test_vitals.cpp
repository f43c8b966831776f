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

#include <random>

using namespace multivital;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    std::vector<double> sinusoid(std::size_t n, double rate, double f, double amp = 1.0, double ph = 0.0)
    {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = amp * std::sin(two_pi * f * double(i) / rate + ph);
        return x;
    }

    double ptp(const std::vector<double> &x)
    {
        const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        return *hi - *lo;
    }

    // Single scatterer, one channel, through range FFT and phase extraction.
    struct Roundtrip
    {
        std::vector<double> recovered; // [mm]
        std::vector<double> truth;     // [mm], relative to frame 0
    };

    Roundtrip roundtrip(double amplitude_m, Fidelity fid)
    {
        auto cfg = measurement_chirp();
        cfg.n_frames = 120;
        const auto g = paper_geometry();
        ScatterPoint p;
        p.position0 = {0.05, 0.6, 0.02};
        p.motion = SinusoidMotion{{0.0, -1.0, 0.0}, amplitude_m, 1.2, 0.4};
        Scene s;
        s.points = {p};
        s.fidelity = fid;
        const auto cube = simulate(s, cfg, g);
        const auto bin = argmax_first(stream_range_profile(cube, 256));
        const auto data = stream_range_bin(cube, 256, bin);
        RegionSignal sig{"A", 0, data.row(37)};
        const auto trace = make_trace(sig, derive_waveform(cfg).phase_wavelength, 1.0 / cfg.t_frame);
        Roundtrip r;
        r.recovered = trace.displacement;
        for (double d : radial_displacement(p, cfg.t_frame, cfg.n_frames))
            r.truth.push_back(1000.0 * d);
        return r;
    }
}

TEST_CASE("extract_phase - definitions")
{
    const auto z = extract_phase(std::vector<cdouble>(5, cdouble(2.5, 0.0)));
    for (double v : z.phase)
        CHECK(v == 0.0);
    CHECK(z.flagged.empty());
    const auto one = extract_phase(std::vector<cdouble>(4, std::polar(3.0, 1.0)));
    for (double v : one.phase)
        CHECK_THAT(v, WithinAbs(1.0, 1e-15));
    const auto neg = extract_phase({cdouble(-1.0, 0.0), cdouble(-1.0, -0.0)});
    CHECK(neg.phase[0] == pi);
    CHECK(neg.phase[1] == pi);
    CHECK_THROWS_AS(extract_phase({}), Error);
}

TEST_CASE("extract_phase - zero samples are flagged and hold the previous phase")
{
    const auto w = extract_phase({std::polar(1.0, 0.3), cdouble{}, std::polar(1.0, -0.2), cdouble{}});
    CHECK(w.flagged == std::vector<std::size_t>({1, 3}));
    CHECK(w.phase[1] == w.phase[0]);
    CHECK(w.phase[3] == w.phase[2]);
    const auto first = extract_phase({cdouble{}, std::polar(1.0, 0.5)});
    CHECK(first.phase[0] == 0.0);
    CHECK(first.flagged == std::vector<std::size_t>({0}));
}

TEST_CASE("unwrap - identities")
{
    const std::vector<double> smooth{0.1, 0.5, 1.2, 2.9, 2.0, -0.5};
    CHECK(unwrap(smooth) == smooth);
    CHECK(unwrap(std::vector<double>(7, -2.0)) == std::vector<double>(7, -2.0));
    CHECK(unwrap({}).empty());
}

TEST_CASE("unwrap - recovers wrapped ramps and sinusoids")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> slope(-3.0, 3.0), start(-20.0, 20.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        const double a = slope(rng), b = start(rng);
        std::vector<double> ramp(200), wrapped(200);
        for (std::size_t i = 0; i < 200; ++i)
        {
            ramp[i] = b + a * double(i) + 1.5 * std::sin(0.05 * double(i));
            wrapped[i] = std::arg(std::polar(1.0, ramp[i]));
        }
        const auto u = unwrap(wrapped);
        CHECK(u[0] == wrapped[0]);
        const double k = std::round((ramp[0] - u[0]) / two_pi);
        for (std::size_t i = 0; i < 200; ++i)
            CHECK_THAT(u[i] + two_pi * k, WithinAbs(ramp[i], 1e-9));
        for (std::size_t i = 1; i < 200; ++i)
        {
            CHECK(u[i] - u[i - 1] <= pi);
            CHECK(u[i] - u[i - 1] > -pi);
        }
    }
}

TEST_CASE("phase_to_displacement - arithmetic")
{
    const double lam = speed_of_light / 77e9;
    const auto d = phase_to_displacement({0.0, 6.44}, lam);
    CHECK_THAT(d[1], WithinAbs(2.0, 0.01));
    CHECK(phase_to_displacement(std::vector<double>(4, 0.0), lam) == std::vector<double>(4, 0.0));
    const auto step = phase_to_displacement({1.0, 1.1}, 3.896e-3);
    CHECK_THAT(step[1], WithinAbs(0.031, 0.0005));
    CHECK_THAT(step[1], WithinRel(1000.0 * 3.896e-3 * 0.1 / (4.0 * pi), 1e-12));
    CHECK(phase_to_displacement({}, lam).empty());
}

TEST_CASE("dominant_frequency - pure tones")
{
    CHECK_THAT(dominant_frequency(sinusoid(3600, 20.0, 1.0), 20.0), WithinAbs(1.0, 1.0 / 180.0));
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> f(0.6, 2.9);
    for (int trial = 0; trial < 40; ++trial)
    {
        const double f0 = f(rng);
        CHECK_THAT(dominant_frequency(sinusoid(1200, 20.0, f0, 0.3, 0.7), 20.0), WithinAbs(f0, 1.0 / 60.0));
    }
    // Offset and a stronger out-of-band component are ignored.
    auto x = sinusoid(1200, 20.0, 1.4);
    const auto resp = sinusoid(1200, 20.0, 0.25, 5.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] += resp[i] + 40.0;
    CHECK_THAT(dominant_frequency(x, 20.0), WithinAbs(1.4, 1.0 / 60.0));
    CHECK_THAT(dominant_frequency(x, 20.0, {0.1, 0.5}), WithinAbs(0.25, 1.0 / 60.0));
}

TEST_CASE("dominant_frequency - degenerate inputs")
{
    auto code = [](auto &&fn)
    {
        try
        {
            fn();
        }
        catch (const Error &e)
        {
            return e.code();
        }
        return ErrorCode::io_error;
    };
    CHECK(code([] { dominant_frequency(std::vector<double>(100, 3.0), 20.0); }) == ErrorCode::no_peak);
    CHECK(code([] { dominant_frequency(sinusoid(100, 4.0, 1.0), 4.0, {2.5, 3.0}); }) == ErrorCode::band_empty);
    CHECK(code([] { dominant_frequency(sinusoid(8, 20.0, 1.0), 20.0, {0.5, 0.6}); }) == ErrorCode::band_empty);
    CHECK(code([] { dominant_frequency({1.0}, 20.0); }) == ErrorCode::invalid_argument);
    CHECK(code([] { dominant_frequency({1.0, 2.0}, 0.0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("roundtrip - small motion through the radar chain")
{
    const double lam = speed_of_light / 77e9;
    for (Fidelity fid : {Fidelity::plane_wave, Fidelity::exact_path})
    {
        const auto r = roundtrip(lam / 8.0, fid);
        const double scale = ptp(r.truth);
        double worst = 0.0;
        for (std::size_t m = 0; m < r.truth.size(); ++m)
            worst = std::max(worst, std::abs(r.recovered[m] - (r.truth[m] - r.truth[0])));
        CHECK(worst < 0.02 * scale);
    }
}

TEST_CASE("roundtrip - 1 mm motion needs unwrapping")
{
    const auto r = roundtrip(1e-3, Fidelity::plane_wave);
    const double scale = ptp(r.truth);
    double worst = 0.0;
    for (std::size_t m = 0; m < r.truth.size(); ++m)
        worst = std::max(worst, std::abs(r.recovered[m] - (r.truth[m] - r.truth[0])));
    CHECK(worst < 0.05 * scale);
    CHECK_THAT(ptp(r.recovered), WithinRel(scale, 0.05));
}

TEST_CASE("make_trace - invariant under complex scaling")
{
    std::vector<cdouble> s(80);
    for (std::size_t m = 0; m < s.size(); ++m)
        s[m] = std::polar(1.0 + 0.1 * std::cos(0.3 * double(m)), 4.0 * std::sin(0.2 * double(m)));
    const double lam = 3.9e-3;
    const auto base = make_trace({"A", 0, s}, lam, 20.0);
    CHECK(base.region == "A");
    CHECK(base.displacement.size() == base.phase.size());
    for (std::size_t m = 0; m < s.size(); ++m)
        CHECK_THAT(base.displacement[m], WithinAbs(1000.0 * lam * (base.phase[m] - base.phase[0]) / (4.0 * pi), 1e-12));
    for (cdouble k : {cdouble(-2.0, 0.5), cdouble(0.0, 1e-3), cdouble(7.0, 0.0)})
    {
        auto scaled = s;
        for (auto &v : scaled)
            v *= k;
        const auto t = make_trace({"A", 0, scaled}, lam, 20.0);
        for (std::size_t m = 0; m < s.size(); ++m)
            CHECK_THAT(t.displacement[m], WithinAbs(base.displacement[m], 1e-9));
    }
}

TEST_CASE("pipeline - vibrating target at 5 m")
{
    auto cfg = simulation_chirp();
    cfg.n_frames = 200;
    Scene s;
    ScatterPoint p;
    p.position0 = {3.0, 4.0, 0.0};
    p.motion = SinusoidMotion{{0.6, 0.8, 0.0}, 1e-3, 1.0, 0.0};
    s.points = {p};
    s.fidelity = Fidelity::plane_wave;
    ProcessOptions opt;
    opt.n_fft_range = 512;
    opt.near_field = false;
    const auto res = process_cube(simulate(s, cfg, paper_geometry()), paper_geometry(), opt);
    REQUIRE(res.traces.size() == 1);
    REQUIRE(res.frequencies[0]);
    CHECK_THAT(*res.frequencies[0], WithinAbs(1.0, 0.02));
    CHECK_THAT(ptp(res.traces[0].displacement), WithinRel(2.0, 0.02));
    CHECK_THAT(ptp(res.traces[0].phase), WithinRel(6.44, 0.05));
}
