// peri2d: 2-D bond-based peridynamics fracture simulator.
//
// Subcommands:
//   info                      print calibration, wave speeds, stability hints
//   run                       run one scenario, write CSV/VTK/JSON outputs
//   rates                     mesh-refinement convergence study
//   compare-discretizations   mesh-based vs meshfree neighbor volumes
//   localization              damage-zone containment across horizons

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "peri/peri.hpp"

namespace fs = std::filesystem;
using namespace peri;

namespace {

struct ScenarioArgs {
    std::string scenario_file;
    std::string preset_name;
    int m = 4;
    double tf_fraction = 1.0;
    double load_scale = 1.0;
    double dt_override = 0.0;
    std::string fixtures_dir = "fixtures";
    std::vector<std::string> overrides;
    std::string mode; // "", "nfea", "meshfree"
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& a) {
    auto* sf = cmd->add_option("--scenario", a.scenario_file,
                               "scenario JSON file");
    auto* pr = cmd->add_option("--preset", a.preset_name,
                               "preset name (convergence_square, mode1, "
                               "mode1_fixed_layers, hole_axial, vnotch_bend, "
                               "hole_precrack)");
    sf->excludes(pr);
    cmd->add_option("--m", a.m, "mesh ratio horizon/h for uniform presets");
    cmd->add_option("--tf-fraction", a.tf_fraction,
                    "fraction of the published final time");
    cmd->add_option("--load-scale", a.load_scale, "loading multiplier");
    cmd->add_option("--dt", a.dt_override, "time step override (s)");
    cmd->add_option("--fixtures-dir", a.fixtures_dir, "directory with .msh fixtures");
    cmd->add_option("--override", a.overrides,
                    "dotted.path=value override on the scenario JSON");
    cmd->add_option("--mode", a.mode, "discretization: nfea or meshfree");
}

Scenario resolve_scenario(const ScenarioArgs& a) {
    Scenario s;
    if (!a.scenario_file.empty()) {
        s = load_scenario(a.scenario_file);
    } else if (!a.preset_name.empty()) {
        PresetScale sc{a.m, a.tf_fraction, a.load_scale, a.dt_override};
        s = preset(a.preset_name, sc, a.fixtures_dir);
    } else {
        throw CLI::ValidationError("need --scenario or --preset");
    }
    if (!a.overrides.empty()) {
        json j = to_json(s);
        for (const auto& o : a.overrides) apply_override(j, o);
        s = scenario_from_json(j);
    }
    if (a.mode == "nfea") s.mode = Scenario::Mode::Nfea;
    else if (a.mode == "meshfree") s.mode = Scenario::Mode::Meshfree;
    else if (!a.mode.empty())
        throw CLI::ValidationError("--mode must be nfea or meshfree");
    return s;
}

std::string g10(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void print_info(const Scenario& s) {
    std::cout << "scenario: " << s.name << " (units " << s.units << ")\n";
    std::cout << "discretization: "
              << (s.mode == Scenario::Mode::Nfea ? "nfea" : "meshfree") << "\n";
    const auto& mc = s.material;
    std::cout << "horizon=" << g10(mc.horizon) << " rho=" << g10(mc.rho) << "\n";
    double h = 0.0;
    if (s.mesh.type == MeshSource::Type::Uniform) {
        h = s.mesh.h;
        std::cout << "mesh: uniform side=" << g10(s.mesh.side) << " h=" << g10(h)
                  << " ratio=" << g10(mc.horizon / h) << "\n";
    } else {
        std::cout << "mesh: msh file " << s.mesh.path << "\n";
        try {
            TriMesh mesh = load_msh(s.mesh.path);
            h = mesh.min_edge_length();
            std::cout << "  nodes=" << mesh.num_nodes()
                      << " elements=" << mesh.num_elements()
                      << " min_edge=" << g10(h) << "\n";
        } catch (const std::exception& e) {
            std::cout << "  (not loaded: " << e.what() << ")\n";
        }
    }
    if (mc.model == MaterialConfig::Model::Rnp) {
        const RnpModel m = std::get<RnpModel>(make_material(mc));
        std::cout << "material: rnp E=" << g10(m.E) << " nu=" << g10(m.nu)
                  << " Gc=" << g10(m.Gc)
                  << " force_prefactor=" << g10(m.force_prefactor) << "\n";
        std::cout << "  MJ=" << g10(m.MJ) << "\n";
        std::cout << "  c=" << g10(m.c) << " beta=" << g10(m.beta)
                  << " r_star=" << g10(m.r_star) << "\n";
        std::cout << "  Sc(horizon)=" << g10(m.critical_strain(m.horizon)) << "\n";
        const WaveSpeeds w = wave_speeds(m.E, m.nu, m.rho);
        std::cout << "wave speeds: c_L=" << g10(w.c_L) << " c_S=" << g10(w.c_S)
                  << " c_R=" << g10(w.c_R) << "\n";
        const double omega = std::sqrt(4.0 * m.c * m.beta / (m.rho * m.horizon * m.horizon));
        std::cout << "stability: dt_linearized=" << g10(2.0 / omega);
        if (h > 0.0) std::cout << " hint=" << g10(stability_hint(w.c_L, h));
        std::cout << " dt=" << g10(s.dt) << "\n";
    } else {
        std::cout << "material: pmb c_pmb=" << g10(mc.c_pmb) << " S_c=" << g10(mc.S_c)
                  << "\n";
    }
    std::cout << "time: dt=" << g10(s.dt) << " t_F=" << g10(s.t_F)
              << " dt_out=" << g10(s.dt_out) << "\n";
    for (const auto& bc : s.bcs) {
        std::cout << "bc " << bc.name << ": ["
                  << g10(bc.region.xmin) << "," << g10(bc.region.xmax) << "]x["
                  << g10(bc.region.ymin) << "," << g10(bc.region.ymax) << "] dofs "
                  << (bc.dof_x ? "x" : "") << (bc.dof_y ? "y" : "") << " value ("
                  << g10(bc.value.x) << "," << g10(bc.value.y) << ")\n";
    }
}

int cmd_info(const ScenarioArgs& args) {
    Scenario s = resolve_scenario(args);
    print_info(s);
    if (s.mesh.type == MeshSource::Type::Uniform) {
        TriMesh mesh = build_uniform_square_mesh(s.mesh.side, s.mesh.h);
        const auto rep = validate(s, mesh);
        for (const auto& i : rep.info) std::cout << "check: " << i << "\n";
        for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
        for (const auto& e : rep.errors) std::cout << "error: " << e << "\n";
        return rep.ok() ? 0 : 1;
    }
    return 0;
}

void write_run_outputs(const fs::path& out_dir, const BuiltScenario& b,
                       const RunResult& r, int vtk_every) {
    fs::create_directories(out_dir);
    {
        std::ofstream os(out_dir / "scenario.json");
        os << to_json(b.scenario).dump(2) << "\n";
    }

    std::optional<CrackTrace> trace;
    if (b.scenario.crack_axis && !r.snapshots.empty() &&
        !r.snapshots.front().Z.empty()) {
        std::vector<double> times;
        std::vector<std::vector<double>> zs;
        for (const auto& s : r.snapshots) {
            times.push_back(s.t);
            zs.push_back(s.Z);
        }
        double cR = 0.0;
        if (b.scenario.material.model == MaterialConfig::Model::Rnp) {
            const auto& mc = b.scenario.material;
            cR = wave_speeds(mc.E, mc.nu, mc.rho).c_R;
        }
        trace = track_crack(b.mesh, times, zs, *b.scenario.crack_axis, cR);
    }

    CsvTable csv;
    csv.header = {"step", "t", "max_Z", "mean_phi"};
    if (trace)
        for (const char* c : {"tip_x", "tip_y", "crack_length", "crack_speed",
                              "v_over_cR"})
            csv.header.push_back(c);
    for (size_t k = 0; k < r.snapshots.size(); ++k) {
        const auto& s = r.snapshots[k];
        double maxZ = 0.0, meanphi = 0.0;
        for (double z : s.Z) maxZ = std::max(maxZ, z);
        for (double p : s.phi) meanphi += p;
        if (!s.phi.empty()) meanphi /= static_cast<double>(s.phi.size());
        std::vector<double> row = {static_cast<double>(s.step), s.t, maxZ, meanphi};
        if (trace) {
            const auto& p = trace->points[k];
            row.insert(row.end(),
                       {p.tip.x, p.tip.y, p.length, p.speed, p.v_over_cR});
        }
        csv.rows.push_back(std::move(row));
    }
    write_csv((out_dir / "timeseries.csv").string(), csv);

    if (vtk_every > 0) {
        for (size_t k = 0; k < r.snapshots.size(); ++k) {
            if (k % static_cast<size_t>(vtk_every) != 0 &&
                k + 1 != r.snapshots.size())
                continue;
            const auto& s = r.snapshots[k];
            VtkFields f;
            if (!s.U.empty()) {
                f.point_vectors["displacement"] = &s.U;
                if (b.scenario.deform_scale > 0.0) {
                    f.deform_scale = b.scenario.deform_scale;
                    f.deform_U = &s.U;
                }
            }
            if (!s.Z.empty()) f.point_scalars["damage_Z"] = &s.Z;
            if (!s.phi.empty()) f.point_scalars["damage_phi"] = &s.phi;
            char name[32];
            std::snprintf(name, sizeof name, "snap_%04zu.vtk", k);
            write_vtk((out_dir / name).string(), b.mesh, f);
        }
    }

    json summary;
    summary["steps"] = r.summary.steps;
    summary["wall_seconds"] = r.summary.wall_seconds;
    summary["max_Z"] = r.summary.max_Z;
    summary["kinetic_energy"] = r.summary.kinetic_energy;
    summary["broken_bonds"] = r.summary.broken_bonds;
    if (trace) {
        summary["crack_t1"] = trace->t1;
        summary["crack_t2"] = trace->t2;
        double vmax = 0.0, length = 0.0;
        for (const auto& p : trace->points) {
            vmax = std::max(vmax, p.speed);
            length = std::max(length, p.length);
        }
        summary["crack_speed_max"] = vmax;
        summary["crack_length"] = length;
    }
    std::ofstream os(out_dir / "summary.json");
    os << summary.dump(2) << "\n";
}

int cmd_run(const ScenarioArgs& args, const std::string& out_dir, int vtk_every,
            bool quiet) {
    Scenario s = resolve_scenario(args);
    if (!quiet) print_info(s);
    BuiltScenario b = build_scenario(s);
    const auto rep = validate(s, b.mesh);
    if (!quiet) {
        for (const auto& i : rep.info) std::cout << "check: " << i << "\n";
        for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
        std::cout << "nodes=" << b.mesh.num_nodes()
                  << " elements=" << b.mesh.num_elements()
                  << " bonds=" << b.table.num_bonds() << "\n";
    }
    RunInput in = make_run_input(b);
    in.keep_displacements = vtk_every > 0;
    in.compute_damage = true;
    RunResult r = run_simulation(in, quiet ? nullptr : &std::cout);
    write_run_outputs(out_dir, b, r, vtk_every);
    std::cout << "steps=" << r.summary.steps << " wall=" << g10(r.summary.wall_seconds)
              << "s max_Z=" << g10(r.summary.max_Z)
              << " broken_bonds=" << r.summary.broken_bonds << "\n";
    std::cout << "outputs in " << out_dir << "\n";
    return 0;
}

int cmd_rates(const std::string& preset_name, std::vector<int> ms, int m_ref,
              const ScenarioArgs& args, const std::string& out_dir, bool quiet) {
    PresetScale base{args.m, args.tf_fraction, args.load_scale, args.dt_override};
    RatesResult res = rates_study(preset_name, ms, m_ref, base,
                                  quiet ? nullptr : &std::cout);
    std::cout << "t";
    for (int m : res.ms) std::cout << ",err_m" << m;
    for (size_t j = 0; j + 1 < res.ms.size(); ++j)
        std::cout << ",rate_m" << res.ms[j] << "_m" << res.ms[j + 1];
    std::cout << "\n";
    CsvTable csv;
    csv.header = {"t"};
    for (int m : res.ms) csv.header.push_back("err_m" + std::to_string(m));
    for (size_t j = 0; j + 1 < res.ms.size(); ++j)
        csv.header.push_back("rate_m" + std::to_string(res.ms[j]) + "_m" +
                             std::to_string(res.ms[j + 1]));
    for (const auto& row : res.rows) {
        std::cout << g10(row.t);
        std::vector<double> crow = {row.t};
        for (double e : row.errors) {
            std::cout << "," << g10(e);
            crow.push_back(e);
        }
        for (const auto& a : row.rates) {
            std::cout << "," << (a ? g10(*a) : "nan");
            crow.push_back(a ? *a : std::nan(""));
        }
        std::cout << "\n";
        csv.rows.push_back(std::move(crow));
    }
    for (size_t j = 0; j < res.median_rates.size(); ++j) {
        std::cout << "median_rate_m" << res.ms[j] << "_m" << res.ms[j + 1] << "="
                  << (res.median_rates[j] ? g10(*res.median_rates[j]) : "nan")
                  << "\n";
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_csv((fs::path(out_dir) / "rates.csv").string(), csv);
        std::cout << "outputs in " << out_dir << "\n";
    }
    return 0;
}

int cmd_compare(const ScenarioArgs& args, const std::string& out_dir, bool quiet) {
    Scenario s = resolve_scenario(args);
    CompareResult res = compare_discretizations(s, 1.0, quiet ? nullptr : &std::cout);
    CsvTable csv;
    csv.header = {"t", "jaccard"};
    for (size_t k = 0; k < res.times.size(); ++k) {
        std::cout << "t=" << g10(res.times[k]) << " jaccard=" << g10(res.jaccard[k])
                  << "\n";
        csv.rows.push_back({res.times[k], res.jaccard[k]});
    }
    std::cout << "final_jaccard=" << g10(res.final_jaccard)
              << " damaged_nfea=" << res.damaged_nfea
              << " damaged_meshfree=" << res.damaged_meshfree << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_csv((fs::path(out_dir) / "compare.csv").string(), csv);
        std::cout << "outputs in " << out_dir << "\n";
    }
    return 0;
}

int cmd_localization(std::vector<double> horizons, const ScenarioArgs& args,
                     const std::string& out_dir, bool quiet) {
    PresetScale sc{args.m, args.tf_fraction, args.load_scale, args.dt_override};
    LocalizationResult res =
        localization_study(horizons, sc, 1.0, quiet ? nullptr : &std::cout);
    CsvTable csv;
    csv.header = {"horizon", "h", "damaged_nodes", "band_width"};
    for (const auto& e : res.entries) {
        std::cout << "horizon=" << g10(e.horizon) << " h=" << g10(e.h)
                  << " damaged=" << e.damaged << " band_width=" << g10(e.band_width)
                  << "\n";
        csv.rows.push_back({e.horizon, e.h, static_cast<double>(e.damaged),
                            e.band_width});
    }
    for (const auto& p : res.pairs) {
        std::cout << "containment " << g10(p.horizon_small) << " in "
                  << g10(p.horizon_large) << " = " << g10(p.containment)
                  << (p.both_empty ? " (both empty)" : "") << "\n";
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_csv((fs::path(out_dir) / "localization.csv").string(), csv);
        std::cout << "outputs in " << out_dir << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"peri2d: 2-D bond-based peridynamics fracture simulator"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP thread count (0 = default)");

    ScenarioArgs info_args;
    auto* info = app.add_subcommand("info", "print calibration and wave speeds");
    add_scenario_options(info, info_args);

    ScenarioArgs run_args;
    std::string run_out = "out";
    int vtk_every = 1;
    bool run_quiet = false;
    auto* run = app.add_subcommand("run", "run one scenario");
    add_scenario_options(run, run_args);
    run->add_option("--out", run_out, "output directory");
    run->add_option("--vtk-every", vtk_every,
                    "write every Nth snapshot as VTK (0 = off)");
    run->add_flag("--quiet", run_quiet, "suppress progress output");

    ScenarioArgs rates_args;
    std::string rates_preset = "convergence_square";
    std::vector<int> rates_ms = {4, 8};
    int rates_ref = 12;
    std::string rates_out;
    bool rates_quiet = false;
    auto* rates = app.add_subcommand("rates", "mesh-refinement convergence study");
    rates->add_option("--preset", rates_preset, "uniform-mesh preset");
    rates->add_option("--ms", rates_ms, "ladder of mesh ratios (increasing)");
    rates->add_option("--ref", rates_ref, "reference mesh ratio");
    rates->add_option("--tf-fraction", rates_args.tf_fraction,
                      "fraction of the published final time");
    rates->add_option("--load-scale", rates_args.load_scale, "loading multiplier");
    rates->add_option("--dt", rates_args.dt_override, "time step override (s)");
    rates->add_option("--out", rates_out, "output directory for rates.csv");
    rates->add_flag("--quiet", rates_quiet, "suppress progress output");

    ScenarioArgs cmp_args;
    std::string cmp_out;
    bool cmp_quiet = false;
    auto* cmp = app.add_subcommand("compare-discretizations",
                                   "mesh-based vs meshfree neighbor volumes");
    add_scenario_options(cmp, cmp_args);
    cmp->add_option("--out", cmp_out, "output directory for compare.csv");
    cmp->add_flag("--quiet", cmp_quiet, "suppress progress output");

    ScenarioArgs loc_args;
    std::vector<double> loc_horizons = {3e-3, 2e-3};
    std::string loc_out;
    bool loc_quiet = false;
    auto* loc = app.add_subcommand("localization",
                                   "damage-zone containment across horizons");
    loc->add_option("--horizons", loc_horizons, "descending horizons (m)");
    loc->add_option("--m", loc_args.m, "mesh ratio horizon/h");
    loc->add_option("--tf-fraction", loc_args.tf_fraction,
                    "fraction of the published final time");
    loc->add_option("--load-scale", loc_args.load_scale, "loading multiplier");
    loc->add_option("--dt", loc_args.dt_override, "time step override (s)");
    loc->add_option("--out", loc_out, "output directory");
    loc->add_flag("--quiet", loc_quiet, "suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (info->parsed()) return cmd_info(info_args);
        if (run->parsed()) return cmd_run(run_args, run_out, vtk_every, run_quiet);
        if (rates->parsed())
            return cmd_rates(rates_preset, rates_ms, rates_ref, rates_args, rates_out,
                             rates_quiet);
        if (cmp->parsed()) return cmd_compare(cmp_args, cmp_out, cmp_quiet);
        if (loc->parsed())
            return cmd_localization(loc_horizons, loc_args, loc_out, loc_quiet);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
