#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "osc/approach.hpp"
#include "osc/errors.hpp"
#include "osc/generate.hpp"
#include "osc/grid.hpp"
#include "osc/hull.hpp"
#include "osc/measure.hpp"
#include "osc/morphology.hpp"
#include "osc/parallel.hpp"
#include "osc/rng.hpp"
#include "osc/scenario.hpp"
#include "osc/seminorm.hpp"
#include "osc/setspec.hpp"

namespace {

using nlohmann::json;

// Accepts either inline JSON (first significant character '{' or '[') or a
// path to a JSON file.
json json_arg(const std::string& raw) {
    std::size_t i = 0;
    while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    try {
        if (i < raw.size() && (raw[i] == '{' || raw[i] == '[')) return json::parse(raw);
        std::ifstream in(raw, std::ios::binary);
        if (!in) throw osc::ConfigError("cannot open " + raw);
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw osc::ConfigError("JSON parse error in \"" + raw + "\": " + e.what());
    }
}

osc::GridFile load_input(const std::string& path) {
    const json j = json_arg(path);
    if (j.is_object() && j.contains("generator"))
        return osc::generate_input(j, std::filesystem::path(path).parent_path());
    // not a generator spec: treat the argument as a grid header path
    return osc::load_grid_function(path);
}

osc::TargetSet parse_target(const std::string& raw) {
    return osc::TargetSet::from_json(json_arg(raw));
}

osc::SetSpec parse_set(const std::string& raw) {
    auto s = osc::SetSpec::from_json(json_arg(raw));
    s.validate();
    return s;
}

osc::BallMode parse_mode(const std::string& mode) {
    if (mode == "open") return osc::BallMode::open;
    if (mode == "closed") return osc::BallMode::closed;
    throw osc::ConfigError("--mode must be open or closed");
}

struct SweepOpts {
    std::optional<double> dmin, dmax;
    double q = std::pow(2.0, 0.25);
    std::vector<double> deltas;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dmin", dmin, "geometric sweep start");
        cmd->add_option("--dmax", dmax, "geometric sweep end");
        cmd->add_option("--q", q, "geometric sweep ratio")->capture_default_str();
        cmd->add_option("--delta-list", deltas, "explicit sweep radii")->delimiter(',');
    }
    osc::SweepGrid build(const osc::GridFunction& g) const {
        if (!deltas.empty()) return osc::SweepGrid::from_list(deltas);
        if (dmin && dmax) return osc::SweepGrid::geometric(*dmin, *dmax, q);
        if (dmin || dmax) throw osc::ConfigError("--dmin and --dmax go together");
        return osc::SweepGrid::default_for(g);
    }
};

int emit(const json& rep) {
    std::cout << rep.dump(2) << "\n";
    if (rep.contains("verdict") && rep["verdict"].is_string())
        return rep["verdict"].get<std::string>() == "pass" ? 0 : 1;
    return 0;
}

void write_csv_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.flush();
    if (!out) throw osc::ConfigError("cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical checks for oscillation seminorms and approach-map volume bounds"};
    app.require_subcommand(1);
    std::optional<int> threads_flag;
    app.add_option("--threads", threads_flag,
                   "worker threads (flag beats OSC_THREADS beats hardware count)");

    // shared option storage; each subcommand binds the subset it uses
    std::string input, target_raw, set_raw, save_path, csv_path, out_dir, scenario_path;
    std::string mode = "open";
    double r = 0.0, alpha = 1.0, delta = 0.0, rel_tol = 1e-9;
    std::optional<double> c_opt, hull_volume, eps_stat, kappa, pin_r, lo, hi, box_pad;
    std::uint64_t n = 200000, seed = 1, pairs = 1000, angular = 4096;
    double t0 = 0.0, t1 = 0.0, dt = 0.0;
    bool refine = false;
    std::vector<double> xs, ys, steps = {1e-2, 1e-3, 1e-4};
    double ex_length = 1.0, ex_r = 0.015625, ex_h = 0.0009765625, ex_alpha = 1.0;
    std::int64_t ex_n = 4;
    double ex_dh = 0.015625;
    SweepOpts sweep_opts, thm1_sweep, oc_sweep;

    const auto add_input = [&](CLI::App* cmd) {
        cmd->add_option("--input", input, "grid header path or generator spec (path or inline)")
            ->required();
        cmd->add_option("--c", c_opt, "measure constant (default: input file's value, else 1)");
    };

    auto* osc_cmd = app.add_subcommand("osc", "oscillation of the input at one radius");
    add_input(osc_cmd);
    osc_cmd->add_option("--r", r, "window radius")->required();
    osc_cmd->add_option("--mode", mode, "open or closed")->capture_default_str();
    osc_cmd->add_option("--save", save_path, "write the oscillation grid header here");

    auto* sweep_cmd = app.add_subcommand("sweep", "integral of the delta-oscillation over a sweep");
    add_input(sweep_cmd);
    sweep_cmd->add_option("--r", r, "sweep the r-oscillation of the input instead of the input");
    sweep_cmd->add_option("--alpha", alpha, "seminorm exponent in (0,1]")->capture_default_str();
    sweep_cmd->add_option("--mode", mode, "open or closed")->capture_default_str();
    sweep_opts.attach(sweep_cmd);
    sweep_cmd->add_option("--csv", csv_path, "write delta,I,I_over_delta_alpha rows here");

    auto* semi_cmd = app.add_subcommand("seminorm", "sweep seminorm estimate only");
    add_input(semi_cmd);
    semi_cmd->add_option("--r", r, "estimate for the r-oscillation instead of the input");
    semi_cmd->add_option("--alpha", alpha, "seminorm exponent in (0,1]")->capture_default_str();
    semi_cmd->add_option("--mode", mode, "open or closed")->capture_default_str();
    sweep_opts.attach(semi_cmd);

    auto* verify = app.add_subcommand("verify", "run one verification check");
    verify->require_subcommand(1);

    auto* v_thm1 = verify->add_subcommand("thm1", "seminorm bound for the r-oscillation");
    add_input(v_thm1);
    v_thm1->add_option("--r", r, "oscillation radius")->required();
    v_thm1->add_option("--alpha", alpha, "exponent")->capture_default_str();
    v_thm1->add_option("--mode", mode, "open or closed")->capture_default_str();
    v_thm1->add_option("--rel-tol", rel_tol, "verdict tolerance")->capture_default_str();
    v_thm1->add_option("--hull-volume", hull_volume, "externally supplied hull volume");
    thm1_sweep.attach(v_thm1);

    auto* v_thm2 = verify->add_subcommand("thm2", "image volume bound of the approach map");
    v_thm2->add_option("--target", target_raw, "target sites JSON (inline or path)")->required();
    v_thm2->add_option("--set", set_raw, "region JSON (inline or path)")->required();
    v_thm2->add_option("--delta", delta, "approach distance")->required();
    v_thm2->add_option("--n", n, "Monte Carlo samples")->capture_default_str();
    v_thm2->add_option("--seed", seed, "sample seed")->capture_default_str();
    v_thm2->add_option("--pin-R", pin_r, "skip clearance measurement, use this R");

    auto* v_sand = verify->add_subcommand("sandwich", "dilation sandwich for the oscillation");
    add_input(v_sand);
    v_sand->add_option("--r", r, "dilation radius")->required();
    v_sand->add_option("--delta", delta, "oscillation radius, 0 < delta < r")->required();
    v_sand->add_option("--mode", mode, "open or closed")->capture_default_str();

    auto* v_dens = verify->add_subcommand("density", "pushforward density bound");
    add_input(v_dens);
    v_dens->add_option("--r", r, "dilation radius")->required();
    v_dens->add_option("--delta", delta, "radius perturbation, delta < r/(2d+1)")->required();
    v_dens->add_option("--eps-stat", eps_stat, "override the discretization allowance");
    v_dens->add_option("--lo", lo, "interval range start (default: masked value range)");
    v_dens->add_option("--hi", hi, "interval range end");
    v_dens->add_option("--seed", seed, "interval seed")->capture_default_str();

    auto* v_cont = verify->add_subcommand("continuity", "radius-continuity of the dilation integral");
    add_input(v_cont);
    v_cont->add_option("--r", r, "dilation radius")->required();
    v_cont->add_option("--delta", delta, "radius perturbation, delta < r/(2d+1)")->required();
    v_cont->add_option("--eps-stat", eps_stat, "override the discretization allowance");

    auto* v_contr = verify->add_subcommand("contraction", "distance contraction of the approach map");
    v_contr->add_option("--target", target_raw, "target sites JSON")->required();
    v_contr->add_option("--delta", delta, "approach distance")->required();
    v_contr->add_option("--pairs", pairs, "random pairs")->capture_default_str();
    v_contr->add_option("--seed", seed, "pair seed")->capture_default_str();
    v_contr->add_option("--box-pad", box_pad, "sampling box padding around the sites");

    auto* v_deriv = verify->add_subcommand("derivative", "one-sided derivative bound along approach");
    v_deriv->add_option("--target", target_raw, "target sites JSON")->required();
    v_deriv->add_option("--x", xs, "first point, comma separated")->required()->delimiter(',');
    v_deriv->add_option("--y", ys, "second point, comma separated")->required()->delimiter(',');
    v_deriv->add_option("--r", r, "clearance radius, both points at distance >= r")->required();
    v_deriv->add_option("--step", steps, "forward-difference steps")->delimiter(',')
        ->capture_default_str();
    v_deriv->add_option("--kappa", kappa, "curvature allowance (default 10 f0 / r^2)");

    auto* v_lem3 = verify->add_subcommand("lemma3", "collar-union-image volume factor");
    v_lem3->add_option("--target", target_raw, "target sites JSON")->required();
    v_lem3->add_option("--set", set_raw, "region JSON")->required();
    v_lem3->add_option("--r", r, "collar radius")->required();
    v_lem3->add_option("--delta", delta, "step half-width, delta < r/3")->required();
    v_lem3->add_option("--n", n, "Monte Carlo samples")->capture_default_str();
    v_lem3->add_option("--seed", seed, "sample seed")->capture_default_str();

    auto* v_coarea = verify->add_subcommand("coarea", "radial slice decomposition of the area");
    v_coarea->add_option("--target", target_raw, "single 2-D site JSON")->required();
    v_coarea->add_option("--set", set_raw, "region JSON")->required();
    v_coarea->add_option("--t0", t0, "first slice radius")->required();
    v_coarea->add_option("--t1", t1, "last slice radius")->required();
    v_coarea->add_option("--dt", dt, "slice spacing")->required();
    v_coarea->add_option("--angular", angular, "angular samples per slice")->capture_default_str();
    v_coarea->add_option("--n", n, "area samples")->capture_default_str();
    v_coarea->add_option("--seed", seed, "sample seed")->capture_default_str();
    v_coarea->add_option("--csv", csv_path, "write t,length,stderr rows here");

    auto* v_oc = verify->add_subcommand("open-closed", "open vs closed window agreement");
    add_input(v_oc);
    v_oc->add_option("--r", r, "window radius")->required();
    v_oc->add_option("--alpha", alpha, "exponent")->capture_default_str();
    v_oc->add_option("--rel-tol", rel_tol, "seminorm gap tolerance")->capture_default_str();
    v_oc->add_flag("--refine", refine, "also compare on a spacing-halved grid");
    oc_sweep.attach(v_oc);

    auto* example = app.add_subcommand("example", "built-in optimality examples");
    example->require_subcommand(1);
    auto* ex_lattice = example->add_subcommand("lattice", "indicator of the 4r lattice on [0, L]");
    ex_lattice->set_help_flag("--help", "print help");  // frees -h for the spacing flag
    ex_lattice->add_option("--L", ex_length, "domain length")->capture_default_str();
    ex_lattice->add_option("--r", ex_r, "oscillation radius")->capture_default_str();
    ex_lattice->add_option("--h", ex_h, "grid spacing")->capture_default_str();
    ex_lattice->add_option("--alpha", ex_alpha, "exponent")->capture_default_str();
    ex_lattice->add_option("--out", out_dir, "report directory (default out/example-lattice)");
    auto* ex_disc = example->add_subcommand("disconnected", "three-component domain, radius N");
    ex_disc->set_help_flag("--help", "print help");  // frees -h for the spacing flag
    ex_disc->add_option("--N", ex_n, "component offset")->capture_default_str();
    ex_disc->add_option("--h", ex_dh, "grid spacing")->capture_default_str();
    ex_disc->add_option("--alpha", ex_alpha, "exponent")->capture_default_str();
    ex_disc->add_option("--out", out_dir, "report directory (default out/example-disconnected)");

    auto* run_cmd = app.add_subcommand("run", "execute a scenario file");
    run_cmd->add_option("scenario", scenario_path, "scenario JSON path")->required();
    run_cmd->add_option("--out", out_dir, "override the scenario's output directory");

    // lets --threads appear after the subcommand as well as before it
    for (CLI::App* s : {osc_cmd, sweep_cmd, semi_cmd, verify, v_thm1, v_thm2, v_sand, v_dens,
                        v_cont, v_contr, v_deriv, v_lem3, v_coarea, v_oc, example, ex_lattice,
                        ex_disc, run_cmd})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are configuration errors
    }

    const int threads = osc::resolve_threads(threads_flag);
    try {
        if (osc_cmd->parsed()) {
            const auto in = load_input(input);
            const double c = c_opt.value_or(in.measure_scale);
            const auto w = osc::oscillation(in.grid, r, parse_mode(mode));
            json rep;
            rep["check"] = "osc";
            rep["inputs"] = {{"r", r}, {"mode", mode}, {"c", c}};
            rep["integral"] = osc::integrate(w, c);
            rep["masked_min"] = osc::masked_min(w);
            rep["masked_max"] = osc::masked_max(w);
            rep["cells"] = w.masked_count();
            rep["verdict"] = "pass";
            if (!save_path.empty()) {
                osc::save_grid_function(w, c, save_path);
                rep["saved"] = save_path;
            }
            return emit(rep);
        }
        if (sweep_cmd->parsed() || semi_cmd->parsed()) {
            const auto in = load_input(input);
            const double c = c_opt.value_or(in.measure_scale);
            const osc::GridFunction* src = &in.grid;
            osc::GridFunction w;
            const bool of_osc = sweep_cmd->parsed() ? sweep_cmd->count("--r") > 0
                                                    : semi_cmd->count("--r") > 0;
            if (of_osc) {
                w = osc::oscillation(in.grid, r, parse_mode(mode));
                src = &w;
            }
            const auto rep = osc::osc_integral_sweep(*src, parse_mode(mode),
                                                     sweep_opts.build(*src), alpha, c);
            if (semi_cmd->parsed()) {
                json j;
                j["check"] = "seminorm";
                j["inputs"] = {{"alpha", alpha}, {"c", c}, {"mode", mode}};
                if (of_osc) j["inputs"]["r"] = r;
                j["seminorm"] = osc::json_number(rep.seminorm);
                j["argmax_delta"] = rep.argmax_delta;
                j["seminorm_is_lower_bound"] = true;
                j["verdict"] = "pass";
                return emit(j);
            }
            json j = rep.to_json();
            if (of_osc) j["inputs"]["r"] = r;
            j["verdict"] = "pass";
            if (!csv_path.empty()) {
                std::ostringstream csv;
                rep.write_csv(csv);
                write_csv_file(csv_path, csv.str());
            }
            return emit(j);
        }
        if (v_thm1->parsed()) {
            const auto in = load_input(input);
            const auto rep = osc::thm1_check(in.grid, r, alpha, parse_mode(mode),
                                             thm1_sweep.build(in.grid),
                                             c_opt.value_or(in.measure_scale), rel_tol,
                                             hull_volume);
            return emit(rep.to_json());
        }
        if (v_thm2->parsed()) {
            const auto rep = osc::thm2_check(parse_target(target_raw), parse_set(set_raw), delta,
                                             n, seed, threads, pin_r);
            return emit(rep.to_json());
        }
        if (v_sand->parsed()) {
            const auto in = load_input(input);
            return emit(osc::sandwich_check(in.grid, r, delta, parse_mode(mode)).to_json());
        }
        if (v_dens->parsed()) {
            const auto in = load_input(input);
            const auto ge = osc::extend_to_hull(in.grid);
            double a = lo.value_or(osc::masked_min(ge));
            double b = hi.value_or(osc::masked_max(ge));
            if (!(b > a)) b = a + 1.0;
            const auto rep = osc::pushforward_density_check(
                ge, r, delta, osc::default_density_intervals(a, b, seed),
                c_opt.value_or(in.measure_scale), eps_stat);
            return emit(rep.to_json());
        }
        if (v_cont->parsed()) {
            const auto in = load_input(input);
            const auto rep = osc::continuity_modulus_check(osc::extend_to_hull(in.grid), r, delta,
                                                           c_opt.value_or(in.measure_scale),
                                                           eps_stat);
            return emit(rep.to_json());
        }
        if (v_contr->parsed()) {
            const auto H = parse_target(target_raw);
            const double pad = box_pad.value_or(H.tolerance_scale());
            const auto bb = H.bounding_box();
            osc::CounterRng rng(seed);
            std::vector<osc::PointPair> pp(pairs);
            const auto d = static_cast<std::size_t>(H.dim);
            for (std::uint64_t j = 0; j < pairs; ++j) {
                pp[j].x.resize(d);
                pp[j].y.resize(d);
                for (std::size_t axis = 0; axis < d; ++axis) {
                    const std::uint64_t base = (j * 2) * d + axis;
                    pp[j].x[axis] = rng.uniform(base, bb.lo[axis] - pad, bb.hi[axis] + pad);
                    pp[j].y[axis] = rng.uniform(base + d, bb.lo[axis] - pad, bb.hi[axis] + pad);
                }
            }
            auto rep = osc::contraction_check(H, delta, pp).to_json();
            rep["inputs"]["pairs"] = pairs;
            rep["inputs"]["seed"] = seed;
            return emit(rep);
        }
        if (v_deriv->parsed()) {
            const auto rep =
                osc::derivative_check(parse_target(target_raw), xs, ys, r, steps, kappa);
            return emit(rep.to_json());
        }
        if (v_lem3->parsed()) {
            const auto rep = osc::lemma3_ratio_check(parse_target(target_raw), parse_set(set_raw),
                                                     r, delta, n, seed, threads);
            return emit(rep.to_json());
        }
        if (v_coarea->parsed()) {
            std::vector<double> t_grid;
            for (std::int64_t k = 0;; ++k) {
                const double t = t0 + dt * static_cast<double>(k);
                if (!(dt > 0.0) || t > t1 * (1.0 + 1e-12)) break;
                t_grid.push_back(t);
            }
            const auto rep = osc::coarea_check_radial(parse_target(target_raw),
                                                      parse_set(set_raw), t_grid, angular, n,
                                                      seed, threads);
            if (!csv_path.empty()) {
                std::ostringstream csv;
                rep.write_csv(csv);
                write_csv_file(csv_path, csv.str());
            }
            return emit(rep.to_json());
        }
        if (v_oc->parsed()) {
            const auto in = load_input(input);
            std::optional<osc::GridFunction> refined;
            if (refine) refined = osc::refine_nearest(in.grid);
            const auto rep = osc::open_closed_agreement(in.grid, r, oc_sweep.build(in.grid),
                                                        alpha, c_opt.value_or(in.measure_scale),
                                                        rel_tol, refined ? &*refined : nullptr);
            return emit(rep.to_json());
        }
        if (ex_lattice->parsed() || ex_disc->parsed()) {
            osc::Scenario sc;
            if (ex_lattice->parsed()) {
                sc.name = "example-lattice";
                sc.input = {{"generator", "lattice-indicator"},
                            {"L", ex_length},
                            {"r", ex_r},
                            {"h", ex_h}};
                sc.parameters = {{"r", ex_r},
                                 {"alpha", ex_alpha},
                                 {"delta", 0.3 * ex_r},
                                 {"mode", "open"},
                                 {"sweep",
                                  {{"dmin", 0.66 * ex_r},
                                   {"dmax", 4.0 * ex_r},
                                   {"q", std::pow(2.0, 0.25)}}}};
            } else {
                sc.name = "example-disconnected";
                const auto nn = static_cast<double>(ex_n);
                sc.input = {{"generator", "disconnected-example"}, {"N", ex_n}, {"h", ex_dh}};
                sc.parameters = {{"r", nn},
                                 {"alpha", ex_alpha},
                                 {"delta", 0.3 * nn},
                                 {"mode", "open"},
                                 {"sweep",
                                  {{"dmin", 2.0 * ex_dh},
                                   {"dmax", 1.5},
                                   {"q", std::pow(2.0, 0.25)}}}};
            }
            sc.checks = {"sweep", "thm1", "sandwich"};
            const auto res = osc::run_scenario(sc, ".", out_dir, threads);
            std::cout << res.summary.dump(2) << "\n";
            return res.exit_code;
        }
        if (run_cmd->parsed()) {
            const auto sc = osc::Scenario::load(scenario_path);
            const auto res = osc::run_scenario(
                sc, std::filesystem::path(scenario_path).parent_path(), out_dir, threads);
            std::cout << res.summary.dump(2) << "\n";
            return res.exit_code;
        }
    } catch (const osc::HypothesisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const osc::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;  // unreachable: require_subcommand guarantees a branch ran
}
