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

#ifndef MULTIVITAL_COMMON_HPP
#define MULTIVITAL_COMMON_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace multivital
{
    using cdouble = std::complex<double>;
    using cfloat = std::complex<float>;

    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr double pi = std::numbers::pi;
    inline constexpr double two_pi = 2.0 * std::numbers::pi;

    enum class ErrorCode
    {
        invalid_config,
        invalid_argument,
        coverage_gap,
        invalid_nfft,
        out_of_range,
        table_mismatch,
        angle_out_of_fov,
        band_empty,
        no_peak,
        too_short_record,
        constant_input,
        bad_magic,
        truncated_payload,
        version_unsupported,
        io_error,
        parse_error
    };

    inline constexpr std::string_view to_string(ErrorCode code)
    {
        switch (code)
        {
        case ErrorCode::invalid_config: return "invalid-config";
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::coverage_gap: return "coverage-gap";
        case ErrorCode::invalid_nfft: return "invalid-nfft";
        case ErrorCode::out_of_range: return "out-of-range";
        case ErrorCode::table_mismatch: return "table-mismatch";
        case ErrorCode::angle_out_of_fov: return "angle-out-of-fov";
        case ErrorCode::band_empty: return "band-empty";
        case ErrorCode::no_peak: return "no-peak";
        case ErrorCode::too_short_record: return "too-short-record";
        case ErrorCode::constant_input: return "constant-input";
        case ErrorCode::bad_magic: return "bad-magic";
        case ErrorCode::truncated_payload: return "truncated-payload";
        case ErrorCode::version_unsupported: return "version-unsupported";
        case ErrorCode::io_error: return "io-error";
        case ErrorCode::parse_error: return "parse-error";
        }
        return "unknown";
    }

    // All library failures are reported through this type; code() is the stable part.
    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &message)
            : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    // Dense row-major matrix. Only what the pipeline needs.
    template <typename T>
    class Matrix
    {
    public:
        Matrix() = default;
        Matrix(std::size_t rows, std::size_t cols, T fill = T{})
            : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

        std::size_t rows() const noexcept { return rows_; }
        std::size_t cols() const noexcept { return cols_; }
        bool empty() const noexcept { return data_.empty(); }

        T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const T &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        std::vector<T> column(std::size_t c) const
        {
            std::vector<T> out(rows_);
            for (std::size_t r = 0; r < rows_; ++r)
                out[r] = (*this)(r, c);
            return out;
        }

        std::vector<T> row(std::size_t r) const
        {
            return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                                  data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
        }

        const std::vector<T> &data() const noexcept { return data_; }
        std::vector<T> &data() noexcept { return data_; }

    private:
        std::size_t rows_ = 0;
        std::size_t cols_ = 0;
        std::vector<T> data_;
    };

    inline constexpr bool is_power_of_two(std::size_t n) noexcept
    {
        return n != 0 && (n & (n - 1)) == 0;
    }

    inline std::size_t next_power_of_two(std::size_t n) noexcept
    {
        std::size_t p = 1;
        while (p < n)
            p <<= 1;
        return p;
    }

    // Worker count from MULTIVITAL_THREADS (0 or unset = hardware concurrency).
    inline unsigned worker_count()
    {
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        if (const char *env = std::getenv("MULTIVITAL_THREADS"))
        {
            char *end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end != env && v > 0)
                return static_cast<unsigned>(v);
        }
        return hw;
    }

    // Runs fn(i) for i in [0, n) over contiguous chunks. fn must not touch shared mutable state
    // except through disjoint indices.
    template <typename Fn>
    void parallel_for(std::size_t n, Fn &&fn)
    {
        const std::size_t workers = std::min<std::size_t>(worker_count(), n);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w)
        {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end)
                break;
            pool.emplace_back([&fn, begin, end]
                              { for (std::size_t i = begin; i < end; ++i) fn(i); });
        }
    }
}

#endif
