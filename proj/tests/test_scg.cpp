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
    std::vector<double> tone(std::size_t n, double fs, double f, double amp, double ph = 0.0)
    {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = amp * std::sin(two_pi * f * double(i) / fs + ph);
        return x;
    }

    cdouble sos_response(const std::vector<Biquad> &sos, double f, double fs)
    {
        const cdouble z1 = std::polar(1.0, -two_pi * f / fs);
        cdouble h = 1.0;
        for (const auto &s : sos)
            h *= (s.b0 + s.b1 * z1 + s.b2 * z1 * z1) / (1.0 + s.a1 * z1 + s.a2 * z1 * z1);
        return h;
    }

    // Least-squares amplitude and phase of a sinusoid at frequency f, samples starting at time t0.
    std::pair<double, double> fit_tone(const std::vector<double> &x, double fs, double t0, double f)
    {
        double ss = 0.0, sc = 0.0, cc = 0.0, xs = 0.0, xc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            const double w = two_pi * f * (t0 + double(i) / fs);
            const double s = std::sin(w), c = std::cos(w);
            ss += s * s;
            sc += s * c;
            cc += c * c;
            xs += x[i] * s;
            xc += x[i] * c;
        }
        const double det = ss * cc - sc * sc;
        const double a = (xs * cc - xc * sc) / det; // sin coefficient
        const double b = (xc * ss - xs * sc) / det; // cos coefficient
        return {std::hypot(a, b), std::atan2(b, a)};
    }

    ScgChannel channel(std::vector<double> a, double fs)
    {
        return {"A", fs, a, std::vector<double>(a.size(), 0.0), a};
    }
}

TEST_CASE("detrend - lines, constants and sinusoids")
{
    std::vector<double> line(50), c(30, 4.2);
    for (std::size_t i = 0; i < line.size(); ++i)
        line[i] = 3.0 - 0.7 * double(i);
    for (double v : detrend(line))
        CHECK(std::abs(v) < 1e-12);
    for (double v : detrend(c))
        CHECK(std::abs(v) < 1e-12);
    const auto s = tone(1000, 100.0, 2.0, 1.0, 0.0);
    const auto d = detrend(s);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        worst = std::max(worst, std::abs(d[i] - s[i]));
    // Whole periods: the fitted line has slope -12 / (w T^2), so its ends sit 6 / (w T) off zero.
    CHECK_THAT(worst, WithinRel(6.0 / (two_pi * 2.0 * 10.0), 0.02));
    CHECK_THROWS_AS(detrend({1.0}), Error);
}

TEST_CASE("detrend and remove_mean - idempotent, no residual slope")
{
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    std::vector<double> x(333);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = g(rng) + 0.01 * double(i) + 5.0;
    const auto d = detrend(x);
    const auto dd = detrend(d);
    double sxy = 0.0, sxx = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        const double t = double(i) - 166.0;
        sxy += t * d[i];
        sxx += t * t;
        scale = std::max(scale, std::abs(d[i]));
        CHECK_THAT(dd[i], WithinAbs(d[i], 1e-12));
    }
    CHECK(std::abs(sxy / sxx) < 1e-12 * scale);
    const auto m = remove_mean(x);
    const auto mm = remove_mean(m);
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        sum += m[i];
        CHECK_THAT(mm[i], WithinAbs(m[i], 1e-12));
    }
    CHECK(std::abs(sum) < 1e-10);
}

TEST_CASE("cumulative_trapezoid - polynomials")
{
    std::vector<double> x(11);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = 2.0 + 3.0 * double(i) * 0.1;
    const auto y = cumulative_trapezoid(x, 10.0);
    CHECK(y[0] == 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double t = double(i) * 0.1;
        CHECK_THAT(y[i], WithinAbs(2.0 * t + 1.5 * t * t, 1e-12));
    }
}

TEST_CASE("butterworth_highpass - magnitude matches the analytic response")
{
    for (int order : {1, 2, 3, 4, 6})
        for (double fc : {0.5, 5.0})
        {
            const double fs = 1000.0;
            const auto sos = butterworth_highpass(order, fc, fs);
            CHECK(sos.size() == std::size_t((order + 1) / 2));
            const double wc = std::tan(pi * fc / fs);
            for (double f : {0.05, 0.3, 0.5, 1.0, 5.0, 20.0, 200.0, 450.0})
            {
                const double wf = std::tan(pi * f / fs);
                const double expected = 1.0 / (1.0 + std::pow(wc / wf, 2.0 * order));
                CHECK_THAT(std::norm(sos_response(sos, f, fs)), WithinRel(expected, 1e-8));
            }
            CHECK(std::abs(sos_response(sos, 0.0, fs)) < 1e-12);
            CHECK_THAT(std::norm(sos_response(sos, fc, fs)), WithinRel(0.5, 1e-9));
        }
    CHECK_THROWS_AS(butterworth_highpass(0, 1.0, 100.0), Error);
    CHECK_THROWS_AS(butterworth_highpass(2, 60.0, 100.0), Error);
    CHECK_THROWS_AS(butterworth_highpass(2, -1.0, 100.0), Error);
}

TEST_CASE("filtfilt - zero phase, squared magnitude")
{
    const double fs = 500.0;
    const auto sos = butterworth_highpass(4, 2.0, fs);
    for (double f : {2.5, 4.0, 30.0})
    {
        const auto x = tone(10000, fs, f, 1.0, 0.3);
        const auto y = filtfilt(sos, x);
        const std::vector<double> mid(y.begin() + 2500, y.end() - 2500);
        const auto [amp, ph] = fit_tone(mid, fs, 2500.0 / fs, f);
        CHECK_THAT(amp, WithinRel(std::norm(sos_response(sos, f, fs)), 1e-3));
        CHECK_THAT(ph, WithinAbs(0.3, 1e-3));
    }
    // A step is removed without a start-up transient.
    const auto flat = filtfilt(sos, std::vector<double>(400, 7.0));
    for (double v : flat)
        CHECK(std::abs(v) < 1e-9);
    CHECK_THROWS_AS(filtfilt(sos, {1.0}), Error);
}

TEST_CASE("scg_to_displacement - zero input")
{
    const auto out = scg_to_displacement(channel(std::vector<double>(8000, 0.0), 1000.0));
    for (const auto &ax : out.axes)
        for (double v : ax.displacement)
            CHECK(v == 0.0);
    CHECK(out.axes[0].region == "A_x");
    CHECK(out.axes[2].region == "A_z");
    CHECK(out.axes[1].displacement.size() == 8000 - 2 * 2000);
    CHECK(out.axes[1].t0 == 2.0);
}

TEST_CASE("scg_to_displacement - 5 Hz acceleration")
{
    const double fs = 1000.0;
    const auto out = scg_to_displacement(channel(tone(20000, fs, 5.0, 0.1), fs));
    const auto &d = out.axes[0];
    const auto [amp, ph] = fit_tone(d.displacement, fs, d.t0, 5.0);
    CHECK_THAT(amp, WithinRel(0.101, 0.02));
    CHECK_THAT(amp, WithinRel(1000.0 * 0.1 / std::pow(two_pi * 5.0, 2.0), 0.01));
}

TEST_CASE("scg_to_displacement - double integration gain and phase")
{
    const double fs = 1000.0;
    for (double f : {1.0, 1.7, 3.0, 8.0, 20.0})
    {
        const double w = two_pi * f;
        const auto out = scg_to_displacement(channel(tone(30000, fs, f, 0.2, 0.4), fs));
        const auto &d = out.axes[2];
        const auto [amp, ph] = fit_tone(d.displacement, fs, d.t0, f);
        CHECK_THAT(amp, WithinRel(1000.0 * 0.2 / (w * w), 0.02));
        // Twice integrated sine: -sin, a half-turn away from the input phase.
        CHECK(std::abs(std::remainder(ph - (0.4 + pi), two_pi)) < 2.0 * pi / 180.0);
    }
}

TEST_CASE("scg_to_displacement - bias rejection")
{
    const double fs = 1000.0;
    auto a = tone(20000, fs, 1.2, 0.05);
    const auto base = scg_to_displacement(channel(a, fs)).axes[0].displacement;
    for (double bias : {0.1, 0.5, -0.5})
    {
        auto b = a;
        for (double &v : b)
            v += bias;
        const auto out = scg_to_displacement(channel(b, fs)).axes[0].displacement;
        double worst = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            worst = std::max(worst, std::abs(out[i] - base[i]));
            peak = std::max(peak, std::abs(base[i]));
        }
        CHECK(worst < 0.01 * peak);
    }
}

TEST_CASE("scg_to_displacement - heartbeat-like record lands in the 0.1 to 0.3 mm range")
{
    // Displacement of 0.2 mm peak to peak built from a 1.2 Hz fundamental and two harmonics,
    // differentiated analytically into acceleration.
    const double fs = 1000.0, f0 = 1.2;
    const std::array<double, 3> amp{0.08e-3, 0.03e-3, 0.012e-3};
    std::vector<double> acc(40000), disp(40000);
    for (std::size_t i = 0; i < acc.size(); ++i)
    {
        const double t = double(i) / fs;
        for (std::size_t h = 0; h < 3; ++h)
        {
            const double w = two_pi * f0 * double(h + 1);
            disp[i] += amp[h] * std::sin(w * t + 0.5 * double(h));
            acc[i] -= amp[h] * w * w * std::sin(w * t + 0.5 * double(h));
        }
    }
    const auto d = scg_to_displacement(channel(acc, fs)).axes[0].displacement;
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    const auto [tlo, thi] = std::minmax_element(disp.begin(), disp.end());
    CHECK(*hi - *lo >= 0.1);
    CHECK(*hi - *lo <= 0.3);
    // The first seconds after the 2 s trim still carry the decaying high-pass transient; once it has
    // settled (6 s from either record end) the waveform tracks the truth.
    const double truth_ptp = 1000.0 * (*thi - *tlo);
    CHECK(*hi - *lo < 1.35 * truth_ptp);
    const auto settled = std::size_t(4.0 * fs);
    const auto [slo, shi] = std::minmax_element(d.begin() + std::ptrdiff_t(settled), d.end() - std::ptrdiff_t(settled));
    CHECK_THAT(*shi - *slo, WithinRel(truth_ptp, 0.03));
}

TEST_CASE("scg_to_displacement - decimation keeps the band")
{
    const double fs = 2000.0;
    auto a = tone(40000, fs, 3.0, 0.1);
    const auto b = tone(40000, fs, 1.1, 0.03, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] += b[i];
    FilterSpec dec;
    dec.decimate_to = 200.0;
    const auto full = scg_to_displacement(channel(a, fs)).axes[0];
    const auto low = scg_to_displacement(channel(a, fs), dec).axes[0];
    CHECK(low.frame_rate == 200.0);
    CHECK(low.t0 == full.t0);
    for (double f : {3.0, 1.1})
    {
        const auto [af, pf] = fit_tone(full.displacement, full.frame_rate, full.t0, f);
        const auto [al, pl] = fit_tone(low.displacement, low.frame_rate, low.t0, f);
        CHECK_THAT(al, WithinRel(af, 5e-3));
        CHECK_THAT(pl, WithinAbs(pf, 5e-3));
    }
}

TEST_CASE("scg_to_displacement - argument checks")
{
    auto code = [](const ScgChannel &ch)
    {
        try
        {
            scg_to_displacement(ch);
        }
        catch (const Error &e)
        {
            return e.code();
        }
        return ErrorCode::io_error;
    };
    CHECK(code(channel(std::vector<double>(3900, 0.0), 1000.0)) == ErrorCode::too_short_record);
    ScgChannel bad{"A", 1000.0, std::vector<double>(5000), std::vector<double>(4999), std::vector<double>(5000)};
    CHECK(code(bad) == ErrorCode::invalid_argument);
    CHECK(code({"A", 0.0, {}, {}, {}}) == ErrorCode::invalid_argument);
}

TEST_CASE("resample - band-limited tones survive rate changes")
{
    const double fs = 1000.0;
    const auto x = tone(20000, fs, 1.3, 1.0, 0.2);
    const auto y = resample(x, fs, 20.0);
    CHECK(y.size() == 400);
    for (std::size_t j = 20; j + 20 < y.size(); ++j)
        CHECK_THAT(y[j], WithinAbs(std::sin(two_pi * 1.3 * double(j) / 20.0 + 0.2), 1e-3));
    const auto up = resample_span(y, 20.0, 0.0, 5.0, 100.0, 500);
    for (std::size_t j = 0; j < up.size(); ++j)
        CHECK_THAT(up[j], WithinAbs(std::sin(two_pi * 1.3 * (5.0 + double(j) / 100.0) + 0.2), 1e-3));
    CHECK(resample(x, fs, fs) == x);
    CHECK_THROWS_AS(resample(x, 0.0, 1.0), Error);
}
