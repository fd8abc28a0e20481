#include "nlkg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "nlkg/rng.hpp"

namespace nlkg {

using nlohmann::json;

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parameter_error(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    auto get = [&](const json& o, const char* key, auto& dst) {
        if (o.contains(key)) dst = o.at(key).get<std::decay_t<decltype(dst)>>();
    };
    get(j, "experiment", c.experiment);
    if (j.contains("params")) {
        const auto& o = j["params"];
        get(o, "d", c.d);
        get(o, "p", c.p);
        get(o, "gamma", c.gamma);
        get(o, "omega", c.omega);
    }
    if (j.contains("grid")) {
        const auto& o = j["grid"];
        get(o, "r_max", c.r_max);
        get(o, "n", c.n);
    }
    if (j.contains("evolution")) {
        const auto& o = j["evolution"];
        get(o, "cfl", c.cfl);
        get(o, "t_end", c.t_end);
        get(o, "blowup_h1_factor", c.blowup_h1_factor);
        get(o, "blowup_amp", c.blowup_amp);
        get(o, "sample_spacing", c.sample_spacing);
    }
    get(j, "lambdas", c.lambdas);
    get(j, "deltas", c.deltas);
    get(j, "seeds", c.seeds);
    get(j, "omegas", c.omegas);
    get(j, "radii", c.radii);
    get(j, "stability_eps", c.stability_eps);
    get(j, "method", c.method);
    get(j, "index", c.index);
    get(j, "out", c.out_dir);
    get(j, "rng_seed", c.rng_seed);
    get(j, "fuzz_fields", c.fuzz_fields);
    return c;
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["params"] = {{"d", d}, {"p", p}, {"gamma", gamma}, {"omega", omega}};
    j["grid"] = {{"r_max", r_max}, {"n", n}};
    j["evolution"] = {{"cfl", cfl},
                      {"t_end", t_end},
                      {"blowup_h1_factor", blowup_h1_factor},
                      {"blowup_amp", blowup_amp},
                      {"sample_spacing", sample_spacing}};
    j["lambdas"] = lambdas;
    j["deltas"] = deltas;
    j["seeds"] = seeds;
    j["omegas"] = omegas;
    j["radii"] = radii;
    j["stability_eps"] = stability_eps;
    j["method"] = method;
    j["index"] = index;
    j["out"] = out_dir;
    j["rng_seed"] = rng_seed;
    j["fuzz_fields"] = fuzz_fields;
    return j.dump(2);
}

void ExperimentReport::write_json(const std::string& path) const {
    json j;
    j["experiment"] = experiment;
    j["statement"] = statement;
    j["passed"] = passed();
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name},
                       {"status", c.status},
                       {"value", c.value},
                       {"tolerance", c.tolerance},
                       {"note", c.note}});
    j["checks"] = arr;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

void ExperimentReport::print(std::ostream& os) const {
    os << "== " << experiment << " : " << statement << "\n";
    for (const auto& c : checks) {
        os << "  [" << c.status << "] " << c.name << "  value=" << c.value
           << " tol=" << c.tolerance;
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << "\n";
    }
    os << (passed() ? "  => PASS" : "  => FAIL") << "\n";
}

namespace {

std::filesystem::path ensure_out(const ExperimentConfig& cfg) {
    std::filesystem::path dir = cfg.out_dir.empty() ? std::filesystem::path("out")
                                                    : std::filesystem::path(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

VirialIndex index_by_name(const std::string& name, const ModelParams& mp) {
    if (name == "d2") return VirialIndex::d2(mp.d);
    if (name == "2pm1") return VirialIndex::two_pm1(mp.p);
    if (name == "0m1") return VirialIndex::zero_m1();
    throw parameter_error("unknown virial index name: " + name);
}

/// deterministic fan-out over independent runs
template <typename Item, typename Fn>
auto parallel_map(const std::vector<Item>& items, Fn fn) {
    using R = decltype(fn(items[0]));
    std::vector<std::future<R>> futs;
    futs.reserve(items.size());
    for (const auto& it : items)
        futs.push_back(std::async(std::launch::async, [&fn, it] { return fn(it); }));
    std::vector<R> out;
    out.reserve(items.size());
    for (auto& f : futs) out.push_back(f.get());
    return out;
}

struct StabilityRun {
    double delta;
    std::uint64_t seed;
};

}  // namespace

ExperimentReport run_ground_state(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "ground-state";
    rep.statement = "stationary profile solve with stationarity-identity validation";
    const auto mp = make_params(cfg.d, cfg.p, cfg.gamma, cfg.omega);
    auto grid = make_grid(cfg.d, cfg.r_max, cfg.n);
    GroundState gs;
    if (cfg.method == "minimize") {
        const auto idx = index_by_name(cfg.index, mp);
        auto seed = smooth_bump_field(grid, cfg.rng_seed, 3, 1.0, 0.2 * cfg.r_max, 1.0, 4.0);
        gs = constrained_minimize_T(mp, grid, idx, seed);
    } else if (cfg.method == "shoot") {
        gs = find_ground_state(mp, grid);
    } else {
        throw parameter_error("method must be shoot or minimize");
    }
    const auto dir = ensure_out(cfg);
    save_ground_state(gs, (dir / "ground-state").string());
    const double scale = gs.record.mass + gs.record.kinetic;
    rep.checks.push_back({"residual_max_norm", gs.residual <= 1e-8 ? "pass" : "fail", gs.residual,
                          1e-8, cfg.method});
    rep.checks.push_back({"K_d2_relative", std::abs(gs.record.K_d2) / scale <= 1e-6 ? "pass" : "fail",
                          std::abs(gs.record.K_d2) / scale, 1e-6, ""});
    rep.checks.push_back({"K_0m1_relative",
                          std::abs(gs.record.K_0m1) / scale <= 1e-6 ? "pass" : "fail",
                          std::abs(gs.record.K_0m1) / scale, 1e-6, ""});
    if (mp.mass_subcritical())
        rep.checks.push_back({"K_2pm1_relative",
                              std::abs(gs.record.K_2pm1) / scale <= 1e-6 ? "pass" : "fail",
                              std::abs(gs.record.K_2pm1) / scale, 1e-6, ""});
    rep.checks.push_back({"action_level", "info", gs.r_level, 0.0, ""});
    if (cfg.method == "minimize") {
        // the descent path is a level cross-check; its pointwise stencil defect
        // is informational, while the projected constraint must vanish exactly
        for (auto& c : rep.checks)
            if (c.status != "info") c.status = "info";
        const auto idx = index_by_name(cfg.index, mp);
        const double Kp = virial_K_of(mp, idx, gs.record.mass, gs.record.kinetic,
                                      gs.record.potential);
        rep.checks.push_back({"projected_constraint", std::abs(Kp) <= 1e-10 * scale
                                                          ? "pass"
                                                          : "fail",
                              std::abs(Kp) / scale, 1e-10, "K at the minimized index"});
    }
    return rep;
}

ExperimentReport run_evolve(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "evolve";
    rep.statement = "time integration with conservation monitors";
    const auto mp = make_params(cfg.d, cfg.p, cfg.gamma, cfg.omega);
    auto grid = make_grid(cfg.d, cfg.r_max, cfg.n);
    auto gs = find_ground_state(mp, grid);
    const double lambda = cfg.lambdas.empty() ? 1.0 : cfg.lambdas.front();
    auto init = make_lambda_data(gs, lambda);
    EvolutionConfig ec{cfg.cfl, cfg.t_end, cfg.blowup_h1_factor, cfg.blowup_amp,
                       cfg.sample_spacing};
    MonitorSet mon{mp, &gs, {}};
    for (double R : cfg.radii) mon.weights.push_back(build_weights(grid, R));
    auto [traj, verdict] = evolve(init, mp, ec, mon);
    const auto dir = ensure_out(cfg);
    traj.write_csv((dir / "trajectory.csv").string());
    {
        std::ofstream v(dir / "verdict.json");
        v << verdict.to_json() << "\n";
    }
    double driftE = 0.0, driftC = 0.0;
    for (size_t i = 0; i < traj.t.size(); ++i) {
        driftE = std::max(driftE, std::abs(traj.rec[i].E - traj.rec[0].E));
        driftC = std::max(driftC, std::abs(traj.rec[i].C - traj.rec[0].C));
    }
    const double e0 = std::abs(traj.rec[0].E), c0 = std::abs(traj.rec[0].C);
    rep.checks.push_back({"verdict",
                          verdict.kind == Verdict::Kind::GlobalBounded ? "pass" : "info",
                          verdict.sup_h1, 0.0, verdict.to_json()});
    rep.checks.push_back({"energy_drift_relative", driftE / e0 <= 1e-5 ? "pass" : "fail",
                          driftE / e0, 1e-5, ""});
    if (c0 > 0)
        rep.checks.push_back({"charge_drift_relative", driftC / c0 <= 1e-5 ? "pass" : "fail",
                              driftC / c0, 1e-5, ""});
    return rep;
}

ExperimentReport run_stability(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "stability";
    rep.statement = "orbital stability in the subcritical window above the critical frequency";
    auto mp = make_params(cfg.d, cfg.p, cfg.gamma, cfg.omega);
    if (cfg.d >= 6 && cfg.p > 1.0 + 2.0 / (cfg.d - 2) && cfg.p < 1.0 + 4.0 / (cfg.d + 1))
        rep.checks.push_back({"conditional_regime", "info", static_cast<double>(cfg.d), 0.0,
                              "short-time solvability is an assumption in this exponent window"});
    if (!mp.mass_subcritical())
        throw parameter_error("stability experiment requires p < 1 + 4/d");
    if (!mp.omega_c || std::abs(mp.omega) <= *mp.omega_c)
        throw parameter_error("stability experiment requires omega_c < |omega| < 1");

    const auto dir = ensure_out(cfg);
    auto run_at = [&](int n_grid) {
        auto grid = make_grid(cfg.d, cfg.r_max, n_grid);
        auto gs = find_ground_state(mp, grid);
        save_ground_state(gs, (dir / "ground-state").string());
        EvolutionConfig ec{cfg.cfl, cfg.t_end, cfg.blowup_h1_factor, cfg.blowup_amp,
                           cfg.sample_spacing};
        MonitorSet mon{mp, &gs, {}};
        std::vector<StabilityRun> runs;
        runs.push_back({0.0, 0});  // control row
        for (double dl : cfg.deltas)
            for (auto sd : cfg.seeds) runs.push_back({dl, sd});
        auto results = parallel_map(runs, [&](const StabilityRun& rn) {
            auto init = make_perturbed_data(gs, rn.delta, rn.seed);
            auto [traj, verdict] = evolve(init, mp, ec, mon);
            double sup_dist = 0.0;
            for (double v : traj.orbit_dist) sup_dist = std::max(sup_dist, v);
            std::ostringstream fn;
            fn << "trajectory_delta" << rn.delta << "_seed" << rn.seed << ".csv";
            traj.write_csv((dir / fn.str()).string());
            return std::pair<Verdict, double>{verdict, sup_dist};
        });
        return std::pair(runs, results);
    };

    auto [runs, results] = run_at(cfg.n);
    bool any_blowup = false;
    for (auto& [v, s] : results) any_blowup |= v.kind == Verdict::Kind::BlowUp;
    std::string note;
    if (any_blowup) {
        // one automatic resolution-doubling retry separates discretization
        // artifacts from genuine failures
        note = "retried at doubled resolution";
        std::tie(runs, results) = run_at(2 * cfg.n);
    }
    for (size_t i = 0; i < runs.size(); ++i) {
        const auto& [verdict, sup_dist] = results[i];
        const bool control = runs[i].delta == 0.0;
        const double tol = control ? 1e-3 : cfg.stability_eps;
        std::ostringstream name;
        name << (control ? "control_delta0" : "perturbed") << "_seed" << runs[i].seed << "_delta"
             << runs[i].delta;
        const bool ok = verdict.kind == Verdict::Kind::GlobalBounded && sup_dist <= tol;
        rep.checks.push_back({name.str(), ok ? "pass" : "fail", sup_dist, tol, note});
    }
    return rep;
}

ExperimentReport run_instability(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "instability";
    rep.statement = "very strong instability: amplified standing-wave data blows up";
    auto mp = make_params(cfg.d, cfg.p, cfg.gamma, cfg.omega);
    if (cfg.d >= 6 && cfg.p > 1.0 + 2.0 / (cfg.d - 2) && cfg.p < 1.0 + 4.0 / (cfg.d + 1))
        rep.checks.push_back({"conditional_regime", "info", static_cast<double>(cfg.d), 0.0,
                              "short-time solvability is an assumption in this exponent window"});
    const bool mass_sub = mp.mass_subcritical();
    if (mass_sub && mp.omega_c && std::abs(cfg.omega) > *mp.omega_c + 1e-12)
        throw parameter_error("subcritical instability requires |omega| <= omega_c");
    auto grid = make_grid(cfg.d, cfg.r_max, cfg.n);
    auto gs = find_ground_state(mp, grid);
    EvolutionConfig ec{cfg.cfl, cfg.t_end, cfg.blowup_h1_factor, cfg.blowup_amp,
                       cfg.sample_spacing};
    MonitorSet mon{mp, &gs, {}};
    for (double R : cfg.radii) mon.weights.push_back(build_weights(grid, R));

    const auto dir = ensure_out(cfg);
    save_ground_state(gs, (dir / "ground-state").string());
    auto results = parallel_map(cfg.lambdas, [&](double lam) {
        auto init = make_lambda_data(gs, lam);
        return evolve(init, mp, ec, mon);
    });
    {
        // amplification-ordering scan: reported, never asserted fatal
        std::vector<double> tstars;
        for (size_t i = 0; i < cfg.lambdas.size(); ++i)
            if (cfg.lambdas[i] > 1.0 && results[i].second.kind == Verdict::Kind::BlowUp)
                tstars.push_back(results[i].second.t_star);
        bool ordered = true;
        for (size_t i = 0; i + 1 < tstars.size(); ++i)
            if (tstars[i + 1] > tstars[i] + 1e-9) ordered = false;
        rep.checks.push_back({"t_star_monotone_in_lambda", "info",
                              static_cast<double>(ordered), 0.0,
                              ordered ? "larger amplification blows up no later"
                                      : "ordering violated at this resolution"});
    }
    for (size_t i = 0; i < cfg.lambdas.size(); ++i) {
        const double lam = cfg.lambdas[i];
        auto& [traj, verdict] = results[i];
        {
            std::ostringstream fn;
            fn << "trajectory_lambda" << lam << ".csv";
            traj.write_csv((dir / fn.str()).string());
        }
        if (lam <= 1.0) {
            // control row: report how long the unperturbed orbit persists
            rep.checks.push_back({"control_lambda1", "info",
                                  verdict.kind == Verdict::Kind::BlowUp ? verdict.t_star
                                                                        : verdict.t_end,
                                  0.0, "roundoff-seeded horizon"});
            continue;
        }
        const double delta = margin_delta(
            gs, lam, mass_sub ? MarginRegime::MassSub : MarginRegime::MassSuper);
        std::ostringstream nm;
        nm << "lambda" << lam;
        const bool blew = verdict.kind == Verdict::Kind::BlowUp && verdict.t_star < cfg.t_end;
        const bool grew = verdict.sup_h1 >= 10.0 * traj.h1.front();
        rep.checks.push_back({nm.str() + "_blowup", blew ? "pass" : (grew ? "info" : "fail"),
                              blew ? verdict.t_star : verdict.sup_h1, cfg.t_end,
                              blew ? "t_star" : "sup_h1 (undecided growth)"});
        // measured virial derivative against the invariant-set margin
        const int nw = traj.n_weights;
        const int ns = static_cast<int>(traj.t.size());
        if (nw > 0 && ns > 4) {
            double worst = 1e300;
            // the subcritical argument runs on I2, the supercritical one on I1
            const auto& series = mass_sub ? traj.I2 : traj.I1;
            for (int k = 1; k + 1 < ns; ++k) {
                if (traj.h1[k] > 10.0 * traj.h1.front()) break;
                const double dI = (series[(k + 1) * nw] - series[(k - 1) * nw]) /
                                  (traj.t[k + 1] - traj.t[k - 1]);
                worst = std::min(worst, dI);
            }
            std::ostringstream nm2;
            nm2 << "lambda" << lam << "_dI_vs_margin";
            rep.checks.push_back({nm2.str(), worst >= 0.9 * delta ? "pass" : "fail", worst,
                                  0.9 * delta, "min dI/dt over pre-blow-up window"});
        }
    }
    return rep;
}

ExperimentReport run_scaling_law(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "scaling-law";
    rep.statement = "frequency scaling of the minimization level: constancy, decrease, convexity";
    const auto mp0 = make_params(cfg.d, cfg.p, cfg.gamma, 0.0);
    const double expo = (cfg.p + 1.0) / (cfg.p - 1.0) - cfg.d / 2.0;

    std::vector<double> omegas = cfg.omegas;
    auto solve_S = [&](double om) {
        const auto mp = make_params(cfg.d, cfg.p, cfg.gamma, om);
        auto grid = make_grid(cfg.d, cfg.r_max, cfg.n);
        return find_ground_state(mp, grid).r_level;
    };
    auto levels = parallel_map(omegas, solve_S);

    double base = levels[0] * std::pow(1.0 - omegas[0] * omegas[0], -expo);
    double worst = 0.0;
    for (size_t i = 0; i < omegas.size(); ++i) {
        const double v = levels[i] * std::pow(1.0 - omegas[i] * omegas[i], -expo);
        worst = std::max(worst, std::abs(v - base) / base);
    }
    rep.checks.push_back({"normalized_level_constancy", worst <= 1e-4 ? "pass" : "fail", worst,
                          1e-4, ""});

    // strict decrease over the sampled omegas
    bool decreasing = true;
    for (size_t i = 0; i + 1 < omegas.size(); ++i)
        if (!(levels[i + 1] < levels[i])) decreasing = false;
    rep.checks.push_back({"level_strictly_decreasing", decreasing ? "pass" : "fail",
                          static_cast<double>(decreasing), 1.0, ""});

    // positive second differences above the critical frequency
    if (mp0.mass_subcritical() && mp0.omega_c && *mp0.omega_c < 0.93) {
        const double oc = *mp0.omega_c;
        std::vector<double> oconv;
        for (int i = 0; i < 5; ++i) oconv.push_back(oc + (0.95 - oc) * (i + 1) / 6.0);
        auto lc = parallel_map(oconv, solve_S);
        bool convex = true;
        double worst2 = 1e300;
        for (size_t i = 1; i + 1 < oconv.size(); ++i) {
            const double d2 = lc[i + 1] - 2.0 * lc[i] + lc[i - 1];
            worst2 = std::min(worst2, d2);
            if (!(d2 > 0.0)) convex = false;
        }
        rep.checks.push_back({"second_differences_positive_above_critical",
                              convex ? "pass" : "fail", worst2, 0.0, ""});
    }
    return rep;
}

ExperimentReport run_identities(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "identities";
    rep.statement = "stationarity identities, cross-method level agreement, dual-route checks";
    const auto mp = make_params(cfg.d, cfg.p, cfg.gamma, cfg.omega);
    auto grid = make_grid(cfg.d, cfg.r_max, cfg.n);
    auto gs = find_ground_state(mp, grid);
    const double scale = gs.record.mass + gs.record.kinetic;

    rep.checks.push_back({"residual", gs.residual <= 1e-8 ? "pass" : "fail", gs.residual, 1e-8, ""});
    auto push_K = [&](const char* nm, double K, bool hard) {
        const double rel = std::abs(K) / scale;
        rep.checks.push_back({nm, !hard ? "info" : (rel <= 1e-6 ? "pass" : "fail"), rel, 1e-6, ""});
    };
    push_K("K_d2", gs.record.K_d2, true);
    push_K("K_0m1", gs.record.K_0m1, true);
    push_K("K_2pm1", gs.record.K_2pm1, mp.mass_subcritical());

    // cross-method agreement on the admissible indices
    std::vector<VirialIndex> idxs{VirialIndex::zero_m1()};
    if (mp.mass_subcritical())
        idxs.push_back(VirialIndex::two_pm1(mp.p));
    else
        idxs.push_back(VirialIndex::d2(mp.d));
    for (const auto& idx : idxs) {
        auto seed = smooth_bump_field(grid, cfg.rng_seed + 17, 3, 1.0, 0.2 * cfg.r_max, 1.0, 4.0);
        auto min_gs = constrained_minimize_T(mp, grid, idx, seed);
        // same-grid plain evaluations so the discretization bias cancels
        const double S_shoot = action_S(gs.profile, mp);
        const double rel = std::abs(min_gs.record.S - S_shoot) / std::abs(S_shoot);
        std::ostringstream nm;
        nm << "cross_method_S_idx_" << idx.alpha << "_" << idx.beta;
        rep.checks.push_back({nm.str(), rel <= 1e-5 ? "pass" : "fail", rel, 1e-5, ""});
    }

    // dual-route identity for L on random snapshots
    {
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            auto u = smooth_bump_field(grid, 1000 + k);
            auto v = smooth_bump_field(grid, 2000 + k);
            for (int i = 0; i < grid->n; ++i) v.u[i] *= cplx{0.3, 0.9};
            StateSnapshot s{u, v, 0.0};
            const double L1 = functional_L(s, mp);
            double vmi = 0.0;
            for (int i = 0; i < grid->n; ++i)
                vmi += grid->w[i] * std::norm(v.u[i] - cplx{0.0, mp.omega} * u.u[i]);
            const double L2 = action_S(u, mp) + 0.5 * vmi;
            worst = std::max(worst, std::abs(L1 - L2) / std::max(1.0, std::abs(L1)));
        }
        rep.checks.push_back({"L_dual_formula", worst <= 1e-12 ? "pass" : "fail", worst, 1e-12, ""});
    }

    // multiplier-degeneracy signs
    for (const auto& idx : idxs) {
        const double v = lagrange_degeneracy_check(gs, idx);
        std::ostringstream nm;
        nm << "degeneracy_idx_" << idx.alpha << "_" << idx.beta;
        rep.checks.push_back({nm.str(), v < 0.0 ? "pass" : "fail", v, 0.0, ""});
    }

    // frequency-rescaling consistency against a direct solve
    if (cfg.omega != 0.0) {
        const auto mp0 = make_params(cfg.d, cfg.p, cfg.gamma, 0.0);
        auto gs0 = find_ground_state(mp0, grid);
        auto resc = rescale_omega(gs0, cfg.omega, grid);
        const double rel = std::abs(resc.r_level - gs.r_level) / gs.r_level;
        rep.checks.push_back({"rescale_vs_direct", rel <= 1e-5 ? "pass" : "fail", rel, 1e-5, ""});
    }
    return rep;
}

ExperimentReport run_inequalities(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "inequalities";
    rep.statement = "inequality fuzz: Hardy, radial tail interpolation, sharp-quotient bound";
    const auto mp = make_params(cfg.d, cfg.p, cfg.gamma, cfg.omega);

    auto corpus = [&](GridPtr g) {
        std::vector<RadialField> fields;
        for (int k = 0; k < cfg.fuzz_fields; ++k)
            fields.push_back(smooth_bump_field(g, cfg.rng_seed * 1000 + k));
        return fields;
    };
    auto grid = make_grid(cfg.d, cfg.r_max, cfg.n);
    auto fields = corpus(grid);

    // Hardy: ((d-2)/2)^2 \int |f|^2/r^2 <= ||grad f||^2 with a relative slack
    {
        int violations = 0;
        const double hd2 = std::pow((cfg.d - 2) / 2.0, 2);
        for (const auto& f : fields) {
            const double grad = kinetic_gamma(f, 0.0);
            double inv = 0.0;
            for (int i = 0; i < grid->n; ++i)
                inv += grid->w[i] * std::norm(f.u[i]) / (grid->r[i] * grid->r[i]);
            if (hd2 * inv > grad * (1.0 + 1e-8)) ++violations;
        }
        rep.checks.push_back({"hardy_violations", violations == 0 ? "pass" : "fail",
                              static_cast<double>(violations), 0.0, ""});
    }

    // radial tail interpolation: fitted corpus constant stable under refinement
    {
        auto fit_C = [&](const std::vector<RadialField>& fs) {
            double C = 0.0;
            for (const auto& f : fs)
                for (double R : {1.0, 2.0, 4.0}) {
                    const double lhs = lp_pow_tail(f, mp.p + 1.0, R);
                    const double m2 = l2_sq_tail(f, R);
                    const double gr = grad_sq_tail(f, R);
                    const double rhs = std::pow(R, -(cfg.d - 1) * (mp.p - 1.0) / 2.0) *
                                       std::pow(m2, (mp.p + 3.0) / 4.0) *
                                       std::pow(gr, (mp.p - 1.0) / 4.0);
                    if (rhs > 1e-14) C = std::max(C, lhs / rhs);
                }
            return C;
        };
        const double C1 = fit_C(fields);
        auto gfine = make_grid(cfg.d, cfg.r_max, 2 * cfg.n);
        const double C2 = fit_C(corpus(gfine));
        const bool stable = C2 <= C1 * 1.05 + 1e-12 && C1 <= C2 * 1.05 + 1e-12;
        rep.checks.push_back({"radial_tail_constant_stable", stable ? "pass" : "fail", C2 / C1,
                              1.05, "corpus constant ratio under refinement"});
    }

    // sharp-quotient bound: every gamma > 0 field sits above the gamma = 0
    // ground-state quotient
    {
        const auto mp0 = make_params(cfg.d, cfg.p, cfg.gamma, 0.0);
        const auto mp00 = make_params(cfg.d, cfg.p, 0.0, 0.0);
        auto gs0 = find_ground_state(mp00, grid);
        const double Jmin = gn_quotient(gs0.profile, mp00);
        double worst = 1e300;
        for (const auto& f : fields) worst = std::min(worst, gn_quotient(f, mp0) / Jmin);
        rep.checks.push_back({"gn_quotient_lower_bound", worst >= 1.0 - 1e-3 ? "pass" : "fail",
                              worst, 1.0 - 1e-3, "min J_gamma(f)/J_0(Q_0)"});

        // mass-critical closed form for the minimization level
        if (std::abs(mp.p - (1.0 + 4.0 / mp.d)) < 1e-9) {
            auto gs1 = find_ground_state(mp, grid);
            const auto mc = mass_critical_nu(gs1, 1.0 / Jmin);
            rep.checks.push_back(
                {"mass_critical_closed_form", mc.rel_mismatch <= 0.01 ? "pass" : "fail",
                 mc.rel_mismatch, 0.01,
                 "radial constrained level vs translation-invariant sharp-constant prediction"});
            rep.checks.push_back({"nu_positive", mc.nu > 0.0 ? "pass" : "fail", mc.nu, 0.0, ""});
            // dual route with the radial family's own quotient: the closed-form
            // algebra must close on itself
            const auto mcr = mass_critical_nu(gs1, 1.0 / gn_quotient(gs1.profile, mp));
            rep.checks.push_back({"mass_critical_closed_form_radial_constant", "info",
                                  mcr.rel_mismatch, 0.01,
                                  "same check against the gamma-family quotient"});
        }
    }
    return rep;
}

ExperimentReport run_section4(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "section4";
    rep.statement = "mass-growth differential-inequality chain along trajectories";
    const auto mp = make_params(cfg.d, cfg.p, cfg.gamma, cfg.omega);
    auto grid = make_grid(cfg.d, cfg.r_max, cfg.n);
    auto gs = find_ground_state(mp, grid);
    EvolutionConfig ec{cfg.cfl, cfg.t_end, cfg.blowup_h1_factor, cfg.blowup_amp,
                       cfg.sample_spacing};
    MonitorSet mon{mp, &gs, {}};

    const auto dir = ensure_out(cfg);
    // bounded trajectory: perturbed standing wave
    {
        auto init = make_perturbed_data(gs, cfg.deltas.empty() ? 1e-2 : cfg.deltas.front(),
                                        cfg.rng_seed);
        auto [traj, verdict] = evolve(init, mp, ec, mon);
        auto audit = section4_audit(traj, mp, verdict.kind == Verdict::Kind::GlobalBounded);
        std::ofstream(dir / "section4_bounded.json") << audit.to_json() << "\n";
        for (const auto& c : audit.checks)
            rep.checks.push_back({"bounded_" + c.name, c.status, c.worst_value, c.tolerance, ""});
    }
    // synthetic negative-energy data must be flagged and blow up
    {
        auto bump = smooth_bump_field(grid, cfg.rng_seed + 99, 3, 2.0, 8.0, 1.0, 3.0);
        RadialField u(grid), v(grid);
        const double m = std::sqrt(l2_sq(bump));
        for (int i = 0; i < grid->n; ++i) u.u[i] = std::abs(bump.u[i]) / m;
        // the superquadratic term wins at large amplitude, driving E negative
        for (int tries = 0; tries < 60; ++tries) {
            StateSnapshot probe{u, v, 0.0};
            if (energy_charge(probe, mp).E < -1.0) break;
            for (auto& z : u.u) z *= 1.5;
        }
        StateSnapshot init{u, v, 0.0};
        const double E0 = energy_charge(init, mp).E;
        auto [traj, verdict] = evolve(init, mp, ec, mon);
        auto audit = section4_audit(traj, mp, false);
        bool flagged = false;
        for (const auto& c : audit.checks)
            if (c.name == "negative_energy_nonglobal_predicted") flagged = true;
        rep.checks.push_back({"negative_energy_flagged", flagged && E0 < 0.0 ? "pass" : "fail",
                              E0, 0.0, ""});
        rep.checks.push_back({"negative_energy_blows_up",
                              verdict.kind == Verdict::Kind::BlowUp ? "pass" : "fail",
                              verdict.kind == Verdict::Kind::BlowUp ? verdict.t_star : 0.0,
                              cfg.t_end, ""});
    }
    return rep;
}

ExperimentReport dispatch_experiment(const ExperimentConfig& cfg_in) {
    ExperimentConfig cfg = cfg_in;
    if (cfg.radii.empty()) cfg.radii = {0.23 * cfg.r_max, 0.46 * cfg.r_max};
    const auto& e = cfg.experiment;
    if (e == "ground-state") return run_ground_state(cfg);
    if (e == "evolve") return run_evolve(cfg);
    if (e == "stability") return run_stability(cfg);
    if (e == "instability") return run_instability(cfg);
    if (e == "scaling-law") return run_scaling_law(cfg);
    if (e == "identities") return run_identities(cfg);
    if (e == "inequalities") return run_inequalities(cfg);
    if (e == "section4") return run_section4(cfg);
    throw parameter_error("unknown experiment: " + e);
}

int run_experiment_cli(const ExperimentConfig& cfg) {
    try {
        auto rep = dispatch_experiment(cfg);
        rep.print(std::cout);
        const auto dir = ensure_out(cfg);
        rep.write_json((dir / "report.json").string());
        {
            std::ofstream c(dir / "config.json");
            c << cfg.to_json() << "\n";
        }
        return rep.passed() ? 0 : 1;
    } catch (const parameter_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace nlkg
