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

// Command-line front end: simulate, process, scg, compare and e2e.

#include <multivital.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace mv = multivital;
using nlohmann::json;

namespace
{
    json trace_summary(const mv::DisplacementTrace &t)
    {
        auto ptp = [](const std::vector<double> &v)
        {
            if (v.empty())
                return 0.0;
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            return *hi - *lo;
        };
        return {{"region", t.region}, {"frames", t.displacement.size()}, {"phase_ptp_rad", ptp(t.phase)}, {"displacement_ptp_mm", ptp(t.displacement)}};
    }

    json comparison_json(const mv::ComparisonEntry &e)
    {
        return {{"radar_region", e.radar_region}, {"ref_region", e.ref_region}, {"rho", e.rho}, {"lag_s", e.lag_s},
                {"f_radar_hz", e.f_radar}, {"f_ref_hz", e.f_ref}, {"delta_f_max_hz", e.delta_f_max}};
    }

    json process_summary(const mv::ProcessResult &r, bool near_field)
    {
        json j;
        j["range_bin"] = r.location.bin;
        j["range_m"] = r.location.range_m;
        j["near_field"] = near_field;
        j["peak_grid_index"] = r.peak_grid_index;
        j["peak_azimuth_deg"] = r.peak_azimuth * 180.0 / mv::pi;
        j["peak_elevation_deg"] = r.peak_elevation * 180.0 / mv::pi;
        j["regions"] = json::array();
        for (std::size_t k = 0; k < r.regions.size(); ++k)
        {
            json reg = trace_summary(r.traces[k]);
            reg["phi_deg"] = r.regions[k].phi * 180.0 / mv::pi;
            reg["theta_deg"] = r.regions[k].theta * 180.0 / mv::pi;
            reg["grid_index"] = r.signals[k].grid_index;
            reg["frequency_hz"] = r.frequencies[k] ? json(*r.frequencies[k]) : json(nullptr);
            j["regions"].push_back(reg);
        }
        return j;
    }

    void write_json(const json &j, const std::string &path)
    {
        mv::detail::write_atomic(path, [&](std::ofstream &out) { out << j.dump(2) << '\n'; });
    }

    mv::ProcessResult run_process(const mv::RawDataCube &cube, const mv::RunConfig &cfg)
    {
        std::optional<std::vector<mv::RegionAngles>> regions;
        if (cfg.layout)
            regions = mv::compute_alignment(*cfg.layout);
        return mv::process_cube(cube, cfg.geometry, mv::ProcessOptions::from(cfg.pipeline), regions);
    }

    std::vector<mv::DisplacementTrace> run_scg(const mv::ScgRecording &rec, const mv::FilterSpec &spec)
    {
        std::vector<mv::DisplacementTrace> out;
        for (const auto &ch : rec.channels)
        {
            const auto d = mv::scg_to_displacement(ch, spec);
            out.insert(out.end(), d.axes.begin(), d.axes.end());
        }
        if (!rec.ecg.empty())
        {
            mv::DisplacementTrace ecg;
            ecg.region = "ECG";
            ecg.t0 = rec.t0;
            ecg.frame_rate = rec.fs;
            ecg.displacement = rec.ecg;
            out.push_back(std::move(ecg));
        }
        return out;
    }

    std::vector<mv::DisplacementTrace> without_ecg(std::vector<mv::DisplacementTrace> v)
    {
        std::erase_if(v, [](const mv::DisplacementTrace &t) { return t.region == "ECG"; });
        return v;
    }

    int fail(const mv::Error &e)
    {
        std::cerr << json{{"error", std::string(mv::to_string(e.code()))}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"FMCW MIMO radar simulation and multi-point vital-sign extraction"};
    app.require_subcommand(1);

    std::string config, out, cube_path, in_path, radar_path, ref_path, near_field, angle_map;
    std::optional<std::uint64_t> seed;
    std::optional<double> cutoff;
    std::vector<double> band;

    auto *sim = app.add_subcommand("simulate", "Synthesize a raw data cube from a scene configuration");
    sim->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out, "Output cube (.mvdc)")->required();
    sim->add_option("--seed", seed, "Override the scene seed");

    auto *proc = app.add_subcommand("process", "Recover per-region displacement traces from a cube");
    proc->add_option("--cube", cube_path, "Input cube (.mvdc)")->required()->check(CLI::ExistingFile);
    proc->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    proc->add_option("--out", out, "Output traces (.csv)")->required();
    proc->add_option("--near-field", near_field, "Near-field calibration")->check(CLI::IsMember({"on", "off"}));
    proc->add_option("--angle-map", angle_map, "Write the frame-averaged angle map (.csv)");

    auto *scg = app.add_subcommand("scg", "Convert accelerometer channels to displacement");
    scg->add_option("--in", in_path, "Channel recording (.csv)")->required()->check(CLI::ExistingFile);
    scg->add_option("--out", out, "Output traces (.csv)")->required();
    scg->add_option("--cutoff", cutoff, "High-pass corner [Hz]")->check(CLI::PositiveNumber);

    auto *cmp = app.add_subcommand("compare", "Compare radar traces against reference traces");
    cmp->add_option("--radar", radar_path, "Radar traces (.csv)")->required()->check(CLI::ExistingFile);
    cmp->add_option("--ref", ref_path, "Reference traces (.csv)")->required()->check(CLI::ExistingFile);
    cmp->add_option("--out", out, "Report (.json)")->required();
    cmp->add_option("--band", band, "Search band LO HI [Hz]")->expected(2);

    auto *e2e = app.add_subcommand("e2e", "Simulate, process, calibrate and compare in one run");
    e2e->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    e2e->add_option("--out", out, "Output directory")->required();
    e2e->add_option("--seed", seed, "Override the scene seed");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << app.help() << '\n';
        std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    }

    try
    {
        if (*sim)
        {
            auto cfg = mv::load_run_config(config);
            if (seed)
                cfg.scene.seed = *seed;
            mv::save_cube(mv::simulate(cfg.scene, cfg.chirp, cfg.geometry), out);
        }
        else if (*proc)
        {
            auto cfg = mv::load_run_config(config);
            if (!near_field.empty())
                cfg.pipeline.near_field = near_field == "on";
            const auto cube = mv::load_cube(cube_path);
            const auto res = run_process(cube, cfg);
            mv::export_traces(res.traces, out);
            if (!angle_map.empty())
                mv::export_angle_map(res.angle_map, angle_map);
            std::cout << process_summary(res, cfg.pipeline.near_field).dump(2) << '\n';
        }
        else if (*scg)
        {
            const auto rec = mv::read_scg_csv(in_path);
            mv::FilterSpec spec;
            if (cutoff)
                spec.cutoff = *cutoff;
            mv::export_traces(run_scg(rec, spec), out);
        }
        else if (*cmp)
        {
            mv::Band b;
            if (band.size() == 2)
                b = {band[0], band[1]};
            std::vector<std::string> skipped;
            const auto entries = mv::compare_sets(mv::import_traces(radar_path), without_ecg(mv::import_traces(ref_path)), b, &skipped);
            json report{{"comparisons", json::array()}, {"skipped", skipped}};
            for (const auto &e : entries)
                report["comparisons"].push_back(comparison_json(e));
            write_json(report, out);
        }
        else if (*e2e)
        {
            auto cfg = mv::load_run_config(config);
            if (seed)
                cfg.scene.seed = *seed;
            const std::filesystem::path dir(out);
            std::filesystem::create_directories(dir);

            const auto cube = mv::simulate(cfg.scene, cfg.chirp, cfg.geometry);
            mv::save_cube(cube, (dir / "cube.mvdc").string());
            const auto res = run_process(cube, cfg);
            mv::export_traces(res.traces, (dir / "traces.csv").string());
            mv::export_angle_map(res.angle_map, (dir / "angle_map.csv").string());

            const auto truth = mv::ground_truth_traces(cfg.scene, cfg.chirp);
            json report = process_summary(res, cfg.pipeline.near_field);
            report["seed"] = cfg.scene.seed;
            report["truth_comparisons"] = json::array();
            if (!truth.empty())
            {
                mv::export_traces(truth, (dir / "truth.csv").string());
                std::vector<std::string> skipped;
                for (const auto &e : mv::compare_sets(res.traces, truth, cfg.pipeline.band, &skipped))
                    report["truth_comparisons"].push_back(comparison_json(e));
                report["truth_skipped"] = skipped;
            }
            // Reference channels need a record long enough for the high-pass chain.
            const double duration = double(cfg.chirp.n_frames - 1) * cfg.chirp.t_frame;
            report["scg_comparisons"] = json::array();
            if (!truth.empty() && duration > std::max(10.0 / (mv::two_pi * cfg.scg.filter.cutoff), 2.0 * cfg.scg.filter.trim_s))
            {
                auto rec = mv::synthesize_scg(cfg.scene, cfg.scg, duration);
                mv::write_scg_csv(rec, (dir / "channels.csv").string());
                const auto scg_traces = run_scg(rec, cfg.scg.filter);
                mv::export_traces(scg_traces, (dir / "scg_traces.csv").string());
                std::vector<std::string> skipped;
                for (const auto &e : mv::compare_sets(res.traces, without_ecg(scg_traces), cfg.pipeline.band, &skipped))
                    report["scg_comparisons"].push_back(comparison_json(e));
                report["scg_skipped"] = skipped;
            }
            write_json(report, (dir / "report.json").string());
            std::cout << report.dump(2) << '\n';
        }
    }
    catch (const mv::Error &e)
    {
        return fail(e);
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        return fail(mv::Error(mv::ErrorCode::io_error, e.what()));
    }
    return 0;
}
