#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "integrator.hpp"
#include "material.hpp"
#include "mesh.hpp"
#include "msh_io.hpp"
#include "neighborhood.hpp"
#include "simulate.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Scenario: a pure-data description of one experiment (geometry source,
// material inputs, horizon, time stepping, BCs, pre-cracks, tracking axis,
// discretization mode). Serializable to JSON; presets encode the published
// experiments with desk-scale knobs (mesh ratio m, t_F fraction, load
// scale, dt override).
//----------------------------------------------------------------------------

struct MeshSource {
    enum class Type { Uniform, MshFile } type = Type::Uniform;
    double side = 1.0; // uniform
    double h = 0.1;    // uniform
    std::string path;  // msh
};

struct MaterialConfig {
    enum class Model { Rnp, Pmb } model = Model::Rnp;
    double E = 0.0, nu = 0.25, rho = 0.0, Gc = 0.0;
    double horizon = 0.0;
    double force_prefactor = 4.0;
    double c_pmb = 0.0, S_c = 0.0; // pmb only
};

struct BodyForceConfig {
    enum class Type { None, TriangularStrip } type = Type::None;
    // Triangular line-load profile over a strip, linear ramp in time:
    // b(x,t) = (0, -fmax * hat(x) * t / thickness) for x in region.
    Box region{};
    double center = 0.0;     // hat apex (x)
    double half_width = 0.0; // hat support half-width
    double fmax = 0.0;       // line-load rate, N/(s*m) in SI
    double thickness = 0.0;  // strip depth used to spread the line load
};

struct Scenario {
    std::string name = "custom";
    std::string units = "SI";
    MeshSource mesh;
    MaterialConfig material;
    double dt = 0.0, t_F = 0.0, dt_out = 0.0;
    std::vector<BoundaryCondition> bcs;
    BodyForceConfig body_force;
    std::vector<Segment> precracks;
    std::optional<CrackAxis> crack_axis;
    enum class Mode { Nfea, Meshfree } mode = Mode::Nfea;
    double deform_scale = 0.0; // VTK deformed-configuration factor
};

//----------------------------------------------------------------------------
// JSON (de)serialization. The schema is documented in the README; the
// layout is stable so configs can be versioned alongside results.
//----------------------------------------------------------------------------

using json = nlohmann::json;

inline json to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["units"] = s.units;
    if (s.mesh.type == MeshSource::Type::Uniform)
        j["mesh"] = {{"type", "uniform"}, {"side", s.mesh.side}, {"h", s.mesh.h}};
    else
        j["mesh"] = {{"type", "msh"}, {"path", s.mesh.path}};
    json m;
    m["model"] = s.material.model == MaterialConfig::Model::Rnp ? "rnp" : "pmb";
    m["rho"] = s.material.rho;
    m["horizon"] = s.material.horizon;
    if (s.material.model == MaterialConfig::Model::Rnp) {
        m["E"] = s.material.E;
        m["nu"] = s.material.nu;
        m["Gc"] = s.material.Gc;
        m["force_prefactor"] = s.material.force_prefactor;
    } else {
        m["c_pmb"] = s.material.c_pmb;
        m["S_c"] = s.material.S_c;
    }
    j["material"] = m;
    j["time"] = {{"dt", s.dt}, {"t_F", s.t_F}, {"dt_out", s.dt_out}};
    j["bcs"] = json::array();
    for (const auto& bc : s.bcs) {
        json b;
        b["name"] = bc.name;
        b["region"] = {bc.region.xmin, bc.region.xmax, bc.region.ymin, bc.region.ymax};
        b["dofs"] = std::string(bc.dof_x ? "x" : "") + (bc.dof_y ? "y" : "");
        b["kind"] = bc.kind == BcKind::FixedDisplacement     ? "fixed"
                    : bc.kind == BcKind::PrescribedDisplacement ? "displacement"
                                                                : "velocity";
        b["value"] = {bc.value.x, bc.value.y};
        b["profile"] = bc.profile == TimeProfile::Constant    ? "constant"
                       : bc.profile == TimeProfile::LinearRamp ? "ramp"
                                                               : "sinusoid";
        b["frequency"] = bc.frequency;
        j["bcs"].push_back(b);
    }
    if (s.body_force.type == BodyForceConfig::Type::None) {
        j["body_force"] = {{"type", "none"}};
    } else {
        const auto& f = s.body_force;
        j["body_force"] = {{"type", "triangular_strip"},
                           {"region", {f.region.xmin, f.region.xmax, f.region.ymin,
                                       f.region.ymax}},
                           {"center", f.center},
                           {"half_width", f.half_width},
                           {"fmax", f.fmax},
                           {"thickness", f.thickness}};
    }
    j["precracks"] = json::array();
    for (const auto& seg : s.precracks)
        j["precracks"].push_back({seg.a.x, seg.a.y, seg.b.x, seg.b.y});
    if (s.crack_axis) {
        j["crack"] = {{"axis", {s.crack_axis->direction.x, s.crack_axis->direction.y}},
                      {"seed", {s.crack_axis->seed.x, s.crack_axis->seed.y}}};
    }
    j["discretization"] = s.mode == Scenario::Mode::Nfea ? "nfea" : "meshfree";
    j["deform_scale"] = s.deform_scale;
    return j;
}

inline Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.name = j.value("name", "custom");
    s.units = j.value("units", "SI");
    {
        const auto& jm = j.at("mesh");
        const std::string type = jm.at("type");
        if (type == "uniform") {
            s.mesh.type = MeshSource::Type::Uniform;
            s.mesh.side = jm.at("side");
            s.mesh.h = jm.at("h");
        } else if (type == "msh") {
            s.mesh.type = MeshSource::Type::MshFile;
            s.mesh.path = jm.at("path");
        } else {
            throw std::invalid_argument("scenario: unknown mesh type '" + type + "'");
        }
    }
    {
        const auto& jm = j.at("material");
        const std::string model = jm.at("model");
        s.material.rho = jm.at("rho");
        s.material.horizon = jm.at("horizon");
        if (model == "rnp") {
            s.material.model = MaterialConfig::Model::Rnp;
            s.material.E = jm.at("E");
            s.material.nu = jm.value("nu", 0.25);
            s.material.Gc = jm.at("Gc");
            s.material.force_prefactor = jm.value("force_prefactor", 4.0);
        } else if (model == "pmb") {
            s.material.model = MaterialConfig::Model::Pmb;
            s.material.c_pmb = jm.at("c_pmb");
            s.material.S_c = jm.at("S_c");
        } else {
            throw std::invalid_argument("scenario: unknown material model '" + model +
                                        "'");
        }
    }
    {
        const auto& jt = j.at("time");
        s.dt = jt.at("dt");
        s.t_F = jt.at("t_F");
        s.dt_out = jt.value("dt_out", 0.0);
    }
    for (const auto& b : j.value("bcs", json::array())) {
        BoundaryCondition bc;
        bc.name = b.value("name", "bc");
        const auto& r = b.at("region");
        bc.region = {r.at(0), r.at(1), r.at(2), r.at(3)};
        const std::string dofs = b.at("dofs");
        bc.dof_x = dofs.find('x') != std::string::npos;
        bc.dof_y = dofs.find('y') != std::string::npos;
        const std::string kind = b.at("kind");
        if (kind == "fixed") bc.kind = BcKind::FixedDisplacement;
        else if (kind == "displacement") bc.kind = BcKind::PrescribedDisplacement;
        else if (kind == "velocity") bc.kind = BcKind::PrescribedVelocity;
        else throw std::invalid_argument("scenario: unknown bc kind '" + kind + "'");
        const auto& v = b.value("value", json::array({0.0, 0.0}));
        bc.value = {v.at(0), v.at(1)};
        const std::string prof = b.value("profile", "constant");
        if (prof == "constant") bc.profile = TimeProfile::Constant;
        else if (prof == "ramp") bc.profile = TimeProfile::LinearRamp;
        else if (prof == "sinusoid") bc.profile = TimeProfile::Sinusoid;
        else throw std::invalid_argument("scenario: unknown profile '" + prof + "'");
        bc.frequency = b.value("frequency", 0.0);
        s.bcs.push_back(bc);
    }
    if (j.contains("body_force") && j["body_force"].value("type", "none") != "none") {
        const auto& f = j["body_force"];
        s.body_force.type = BodyForceConfig::Type::TriangularStrip;
        const auto& r = f.at("region");
        s.body_force.region = {r.at(0), r.at(1), r.at(2), r.at(3)};
        s.body_force.center = f.at("center");
        s.body_force.half_width = f.at("half_width");
        s.body_force.fmax = f.at("fmax");
        s.body_force.thickness = f.at("thickness");
    }
    for (const auto& p : j.value("precracks", json::array()))
        s.precracks.push_back({{p.at(0), p.at(1)}, {p.at(2), p.at(3)}});
    if (j.contains("crack")) {
        CrackAxis ax;
        ax.direction = {j["crack"]["axis"].at(0), j["crack"]["axis"].at(1)};
        ax.seed = {j["crack"]["seed"].at(0), j["crack"]["seed"].at(1)};
        s.crack_axis = ax;
    }
    const std::string mode = j.value("discretization", "nfea");
    if (mode == "nfea") s.mode = Scenario::Mode::Nfea;
    else if (mode == "meshfree") s.mode = Scenario::Mode::Meshfree;
    else throw std::invalid_argument("scenario: unknown discretization '" + mode + "'");
    s.deform_scale = j.value("deform_scale", 0.0);
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_scenario: cannot open " + path);
    json j;
    in >> j;
    return scenario_from_json(j);
}

// Apply one "dotted.path=value" override onto the scenario's JSON form.
inline void apply_override(json& j, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override '" + spec + "' is not key=value");
    std::string path = "/" + spec.substr(0, eq);
    for (auto& c : path)
        if (c == '.') c = '/';
    const std::string raw = spec.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw; // plain string
    }
    j[json::json_pointer(path)] = value;
}

//----------------------------------------------------------------------------
// Desk-scale knobs: mesh ratio m = horizon/h, fraction of the published
// final time, a loading multiplier, and an optional dt override.
//----------------------------------------------------------------------------
struct PresetScale {
    int m = 4;
    double t_F_fraction = 1.0;
    double load_scale = 1.0;
    double dt = 0.0; // 0 keeps the published step
};

namespace detail {
inline void scale_loads(Scenario& s, double k) {
    for (auto& bc : s.bcs)
        if (bc.kind != BcKind::FixedDisplacement) bc.value = bc.value * k;
    s.body_force.fmax *= k;
}
} // namespace detail

inline Scenario preset(const std::string& name, const PresetScale& scale = {},
                       const std::string& fixtures_dir = "fixtures") {
    Scenario s;
    s.name = name;
    if (name == "convergence_square") {
        // Unit square, clamped left layer, sinusoidal axial pull on the
        // right layer; soft unit-modulus material, horizon 0.05 m.
        const double eps = 0.05;
        s.mesh = {MeshSource::Type::Uniform, 1.0, eps / scale.m, ""};
        s.material = {MaterialConfig::Model::Rnp, 1.0, 0.25, 1.0, 1.0, eps, 4.0};
        s.dt = scale.dt > 0.0 ? scale.dt : 1.25e-4;
        s.t_F = 0.5 * scale.t_F_fraction;
        s.dt_out = 0.01;
        s.bcs = {{"left_clamp", {0.0, eps, 0.0, 1.0}, true, true,
                  BcKind::FixedDisplacement, {0.0, 0.0}, TimeProfile::Constant, 0.0},
                 {"right_pull", {1.0 - eps, 1.0, 0.0, 1.0}, true, false,
                  BcKind::PrescribedDisplacement, {0.01, 0.0}, TimeProfile::Sinusoid,
                  1.0}};
    } else if (name == "mode1" || name == "mode1_fixed_layers") {
        // 100 mm square, centered vertical pre-crack of length 20 mm,
        // +/- x-velocity on side layers. The fixed-layers variant pins the
        // BC layer thickness at 3 mm for horizon studies.
        const double side = 0.1, eps = 0.002, vbar = 1.0;
        const double layer = name == "mode1" ? eps : 0.003;
        const int n = static_cast<int>(std::round(side / (eps / scale.m)));
        s.mesh = {MeshSource::Type::Uniform, side, side / n, ""};
        s.material = {MaterialConfig::Model::Rnp, 37.5e9, 0.25, 1200.0, 500.0, eps,
                      4.0};
        s.dt = scale.dt > 0.0 ? scale.dt : 8e-10;
        s.t_F = 40e-6 * scale.t_F_fraction;
        s.dt_out = s.t_F / 50.0;
        s.bcs = {{"left_pull", {0.0, layer, 0.0, side}, true, false,
                  BcKind::PrescribedVelocity, {-vbar, 0.0}, TimeProfile::Constant, 0.0},
                 {"right_pull", {side - layer, side, 0.0, side}, true, false,
                  BcKind::PrescribedVelocity, {vbar, 0.0}, TimeProfile::Constant, 0.0}};
        s.precracks = {{{0.05, 0.04}, {0.05, 0.06}}};
        s.crack_axis = CrackAxis{{0.0, 1.0}, {0.05, 0.06}};
        s.deform_scale = 100.0;
    } else if (name == "hole_axial") {
        // Plate with a centered circular hole pulled apart along x.
        // Plate 40x40 mm, hole radius 4 mm (setup-figure reading; the
        // fixture generator exposes both).
        const double eps = 1e-3, side = 0.04, vbar = 1.0;
        s.mesh = {MeshSource::Type::MshFile, 0.0, 0.0,
                  fixtures_dir + "/hole_axial.msh"};
        s.material = {MaterialConfig::Model::Rnp, 37.5e9, 0.25, 1200.0, 500.0, eps,
                      4.0};
        s.dt = scale.dt > 0.0 ? scale.dt : 1.6e-9;
        s.t_F = 160e-6 * scale.t_F_fraction;
        s.dt_out = s.t_F / 50.0;
        s.bcs = {{"left_pull", {0.0, eps, 0.0, side}, true, false,
                  BcKind::PrescribedVelocity, {-vbar, 0.0}, TimeProfile::Constant, 0.0},
                 {"right_pull", {side - eps, side, 0.0, side}, true, false,
                  BcKind::PrescribedVelocity, {vbar, 0.0}, TimeProfile::Constant, 0.0}};
        s.crack_axis = CrackAxis{{0.0, 1.0}, {0.02, 0.024}};
        s.deform_scale = 50.0;
    } else if (name == "vnotch_bend") {
        // Beam with a bottom-center v-notch, clamped near both bottom
        // corners, triangular line load ramping on the top center strip.
        // Beam 60x24 mm, notch depth 6 mm (setup-figure reading).
        const double eps = 1e-3, L = 0.06, H = 0.024;
        const double fmax_si = 2.5e14; // 2.5e5 N/(us*mm)
        s.mesh = {MeshSource::Type::MshFile, 0.0, 0.0,
                  fixtures_dir + "/vnotch_bend.msh"};
        s.material = {MaterialConfig::Model::Rnp, 37.5e9, 0.25, 1200.0, 500.0, eps,
                      4.0};
        s.dt = scale.dt > 0.0 ? scale.dt : 1.667e-9;
        s.t_F = 250e-6 * scale.t_F_fraction;
        s.dt_out = s.t_F / 50.0;
        s.bcs = {{"support_left", {0.0, 0.003, 0.0, eps}, true, true,
                  BcKind::FixedDisplacement, {0.0, 0.0}, TimeProfile::Constant, 0.0},
                 {"support_right", {L - 0.003, L, 0.0, eps}, true, true,
                  BcKind::FixedDisplacement, {0.0, 0.0}, TimeProfile::Constant, 0.0}};
        s.body_force.type = BodyForceConfig::Type::TriangularStrip;
        s.body_force.region = {L / 2 - 0.005, L / 2 + 0.005, H - eps, H};
        s.body_force.center = L / 2;
        s.body_force.half_width = 0.005;
        s.body_force.fmax = fmax_si;
        s.body_force.thickness = eps;
        s.crack_axis = CrackAxis{{0.0, 1.0}, {L / 2, 0.006}};
        s.deform_scale = 50.0;
    } else if (name == "hole_precrack") {
        // 30x15 mm plate, horizontal edge pre-crack to x=10 mm, hole of
        // radius 2 mm at (13, 4.5) mm below the crack path; vertical
        // +/- 25 mm/s on top/bottom layers (setup-figure reading).
        const double eps = 0.4e-3, W = 0.03, H = 0.015, vbar = 0.025;
        s.mesh = {MeshSource::Type::MshFile, 0.0, 0.0,
                  fixtures_dir + "/hole_precrack.msh"};
        s.material = {MaterialConfig::Model::Rnp, 37.5e9, 0.25, 1200.0, 500.0, eps,
                      4.0};
        s.dt = scale.dt > 0.0 ? scale.dt : 4e-9;
        s.t_F = 800e-6 * scale.t_F_fraction;
        s.dt_out = s.t_F / 50.0;
        s.bcs = {{"bottom_pull", {0.0, W, 0.0, eps}, false, true,
                  BcKind::PrescribedVelocity, {0.0, -vbar}, TimeProfile::Constant, 0.0},
                 {"top_pull", {0.0, W, H - eps, H}, false, true,
                  BcKind::PrescribedVelocity, {0.0, vbar}, TimeProfile::Constant, 0.0}};
        s.precracks = {{{0.0, 0.0075}, {0.010, 0.0075}}};
        s.crack_axis = CrackAxis{{1.0, 0.0}, {0.010, 0.0075}};
        s.deform_scale = 50.0;
    } else {
        throw std::invalid_argument("preset: unknown name '" + name + "'");
    }
    detail::scale_loads(s, scale.load_scale);
    return s;
}

//----------------------------------------------------------------------------
// Validation report and system assembly.
//----------------------------------------------------------------------------

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    std::vector<std::string> info;
    bool ok() const { return errors.empty(); }
};

inline double scenario_cL(const Scenario& s) {
    if (s.material.model == MaterialConfig::Model::Rnp)
        return wave_speeds(s.material.E, s.material.nu, s.material.rho).c_L;
    return 0.0; // PMB carries no engineering constants to derive c_L from
}

inline ValidationReport validate(const Scenario& s, const TriMesh& mesh) {
    ValidationReport r;
    if (!(s.material.horizon > 0.0)) r.errors.push_back("horizon must be positive");
    if (!(s.dt > 0.0)) r.errors.push_back("dt must be positive");
    const double dt_out = s.dt_out > 0.0 ? s.dt_out : s.t_F;
    if (!(s.dt < dt_out || s.dt == dt_out))
        r.errors.push_back("need dt <= dt_out");
    if (!(dt_out <= s.t_F)) r.errors.push_back("need dt_out <= t_F");
    if (s.mode == Scenario::Mode::Meshfree && !mesh.structured())
        r.errors.push_back("meshfree discretization requires a structured mesh");

    const double tol = 1e-12 * mesh.bounding_box().diameter();
    for (const auto& bc : s.bcs) {
        int count = 0;
        for (int32_t i = 0; i < mesh.num_nodes(); ++i)
            if (bc.region.contains(mesh.node(i), tol)) ++count;
        if (count == 0)
            r.errors.push_back("boundary condition '" + bc.name +
                               "' selects no nodes (region off-domain?)");
        else
            r.info.push_back("bc '" + bc.name + "': " + std::to_string(count) +
                             " nodes");
    }

    const double h = mesh.structured() ? mesh.structured()->h : mesh.min_edge_length();
    const double ratio = s.material.horizon / h;
    {
        std::ostringstream os;
        os << "horizon/h = " << ratio;
        r.info.push_back(os.str());
    }
    if (ratio < 2.0) r.warnings.push_back("horizon/h < 2: under-resolved horizon");

    const double cL = scenario_cL(s);
    if (cL > 0.0) {
        const double hint = stability_hint(cL, h);
        std::ostringstream os;
        os << "stability hint " << hint << " s (dt = " << s.dt << " s)";
        r.info.push_back(os.str());
        if (s.dt > hint)
            r.warnings.push_back("dt " + std::to_string(s.dt) +
                                 " exceeds stability hint " + std::to_string(hint));
    }
    return r;
}

struct BuiltScenario {
    TriMesh mesh;
    BondTable table;
    MaterialModel model;
    Scenario scenario;
};

inline MaterialModel make_material(const MaterialConfig& mc) {
    if (mc.model == MaterialConfig::Model::Rnp)
        return calibrate_rnp(mc.E, mc.Gc, mc.horizon, mc.rho, influence_default,
                             mc.force_prefactor);
    PmbModel m;
    m.c_pmb = mc.c_pmb;
    m.S_c = mc.S_c;
    m.horizon = mc.horizon;
    m.rho = mc.rho;
    return m;
}

inline BodyForce make_body_force(const BodyForceConfig& f) {
    if (f.type == BodyForceConfig::Type::None) return {};
    const Box region = f.region;
    const double center = f.center, hw = f.half_width;
    const double rate = f.fmax / f.thickness;
    return {[region, center, hw, rate](const Vec2& x, double t) -> Vec2 {
        if (!region.contains(x)) return {0.0, 0.0};
        const double hat = std::max(0.0, 1.0 - std::abs(x.x - center) / hw);
        return {0.0, -rate * hat * t};
    }};
}

inline BuiltScenario build_scenario(const Scenario& s) {
    TriMesh mesh = s.mesh.type == MeshSource::Type::Uniform
                       ? build_uniform_square_mesh(s.mesh.side, s.mesh.h)
                       : load_msh(s.mesh.path);
    const auto report = validate(s, mesh);
    if (!report.ok()) {
        std::string msg = "scenario '" + s.name + "' invalid:";
        for (const auto& e : report.errors) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
    BondTable table = s.mode == Scenario::Mode::Nfea
                          ? build_neighbors(mesh, s.material.horizon)
                          : build_neighbors_meshfree(mesh, s.material.horizon);
    if (!s.precracks.empty())
        apply_precrack(table, mesh, CrackGeometry{s.precracks});
    return {std::move(mesh), std::move(table), make_material(s.material), s};
}

inline RunInput make_run_input(BuiltScenario& b) {
    RunInput in;
    in.mesh = &b.mesh;
    in.table = &b.table;
    in.model = b.model;
    in.bcs = b.scenario.bcs;
    in.body = make_body_force(b.scenario.body_force);
    in.dt = b.scenario.dt;
    in.t_F = b.scenario.t_F;
    in.dt_out = b.scenario.dt_out;
    return in;
}

} // namespace peri
