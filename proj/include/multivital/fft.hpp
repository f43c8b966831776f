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

#ifndef MULTIVITAL_FFT_HPP
#define MULTIVITAL_FFT_HPP

#include "common.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <span>

namespace multivital
{
    namespace detail
    {
        // FFTW planning is not thread-safe, execution with new arrays is. Plans are created once per
        // length and direction under a lock and kept for the process lifetime.
        inline fftw_plan fftw_plan_for(std::size_t n, int sign)
        {
            static std::mutex lock;
            static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
            std::lock_guard guard(lock);
            auto it = plans.find({n, sign});
            if (it != plans.end())
                return it->second;
            std::vector<cdouble> scratch(n);
            auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
            fftw_plan p = fftw_plan_dft_1d(int(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
            if (!p)
                throw Error(ErrorCode::invalid_nfft, "cannot plan FFT of length " + std::to_string(n));
            plans.emplace(std::pair{n, sign}, p);
            return p;
        }

        inline void fftw_run(std::span<cdouble> x, int sign)
        {
            if (x.empty())
                throw Error(ErrorCode::invalid_nfft, "empty FFT buffer");
            auto *buf = reinterpret_cast<fftw_complex *>(x.data());
            fftw_execute_dft(fftw_plan_for(x.size(), sign), buf, buf);
        }
    }

    // Forward transform with kernel exp(-j 2 pi k n / N), in place.
    inline void fft_inplace(std::span<cdouble> x) { detail::fftw_run(x, FFTW_FORWARD); }

    // Unnormalized inverse transform, in place.
    inline void ifft_inplace(std::span<cdouble> x) { detail::fftw_run(x, FFTW_BACKWARD); }
}

#endif
