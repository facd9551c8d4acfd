#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>

#include "fracfund/config.hpp"
#include "fracfund/errors.hpp"
#include "fracfund/report.hpp"
#include "fracfund/verify.hpp"

namespace fracfund::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ExperimentConfig load(const Invocation& inv) {
    ExperimentConfig cfg = load_config(inv.config_path);
    if (inv.seed) cfg.seed = *inv.seed;
    if (inv.out_dir) {
        cfg.output_dir = *inv.out_dir;
    } else if (const char* env = std::getenv("FRACFUND_OUT_DIR"); env && *env) {
        cfg.output_dir = env;
    }
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

/// Maps library exceptions to exit codes; stderr gets the message verbatim.
int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return 1;
    } catch (const NumericFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 2;
    }
}

json grid_json(const Grid& g) {
    return {{"n", g.n()},
            {"R", num(g.radius())},
            {"N_side", g.n_side()},
            {"spacing", num(g.spacing())},
            {"active_nodes", g.active_count()}};
}

}  // namespace

int cmd_solve(const Invocation& inv) {
    return guarded([&] {
        const ExperimentConfig cfg = load(inv);
        cfg.validate();
        const Kernel k = cfg.make_kernel();
        const Potential V = cfg.make_potential();
        const GridPtr grid = build_grid(cfg.grid.n, cfg.grid.radius, cfg.grid.n_side);
        const DiscreteField f = make_rhs(cfg.rhs, grid);

        auto t0 = std::chrono::steady_clock::now();
        const AssembledOperator A = assemble(k, V, grid, {cfg.dense_limit, true});
        const double assemble_seconds = since(t0);

        json doc;
        doc["config"] = config_json(cfg);
        json g = grid_json(*grid);
        g["storage"] = to_string(A.storage());
        doc["grid"] = g;

        t0 = std::chrono::steady_clock::now();
        try {
            const SolveReport r = weak_solve(A, f, cfg.solver);
            const double solve_seconds = since(t0);
            NormOptions norms;
            norms.gagliardo = true;
            // The periodic supercube needs about (4 (N_side - 1))^n points.
            norms.hdot = std::pow(4.0 * (cfg.grid.n_side - 1), cfg.grid.n) <= double(1 << 24);
            const NormReport nr = compute_norms(A, r.solution, norms);

            json meta = metadata_block("solve_report");
            meta["timings"] = {{"assemble_seconds", assemble_seconds},
                               {"solve_seconds", solve_seconds}};
            doc["metadata"] = meta;
            doc["status"] = "converged";
            doc["iterations"] = r.iterations;
            doc["final_residual"] = num(r.final_residual);
            doc["energy"] = num(r.energy_value);
            doc["norms"] = to_json(nr);
            doc["laxmilgram_ratio"] = r.laxmilgram_ratio ? num(*r.laxmilgram_ratio) : json(nullptr);
            doc["residual_history"] = r.residual_history;
            write_atomic(out_path(cfg, "solution.csv"), field_csv(r.solution));
            write_atomic(out_path(cfg, "solve_report.json"), dump(doc));
            std::cout << "converged in " << r.iterations << " iterations, relative residual "
                      << format_double(r.final_residual) << "\n";
            return 0;
        } catch (const NonConvergence& e) {
            json meta = metadata_block("solve_report");
            meta["timings"] = {{"assemble_seconds", assemble_seconds},
                               {"solve_seconds", since(t0)}};
            doc["metadata"] = meta;
            doc["status"] = "failed";
            doc["error"] = e.what();
            doc["iterations"] = e.residual_history().empty() ? 0 : e.residual_history().size() - 1;
            doc["final_residual"] = num(e.achieved());
            doc["residual_history"] = e.residual_history();
            write_atomic(out_path(cfg, "residual_history.csv"),
                         residual_history_csv(e.residual_history()));
            write_atomic(out_path(cfg, "solve_report.json"), dump(doc));
            std::cerr << "numerical failure: " << e.what() << '\n';
            return 2;
        }
    });
}

int cmd_fundamental(const Invocation& inv) {
    return guarded([&] {
        ExperimentConfig cfg = load(inv);
        cfg.validate();
        cfg.schedule.n = cfg.grid.n;
        const Kernel k = cfg.make_kernel();
        const Potential V = cfg.make_potential();
        ExhaustionOptions options = cfg.exhaustion;
        options.assembly.dense_limit = cfg.dense_limit;

        json schedule = json::array();
        for (const Stage& st : cfg.schedule.stages()) {
            schedule.push_back({{"radius", num(st.radius)},
                                {"scale", num(st.scale)},
                                {"spacing", num(st.spacing)},
                                {"n_side", st.n_side}});
        }

        auto emit = [&](const FundamentalReport& rep, const json& status) {
            json doc = to_json(rep);
            json meta = metadata_block("fundamental_report");
            json timings = json::array();
            for (const StageReport& s : rep.stages) timings.push_back(s.seconds);
            meta["timings"] = {{"stage_seconds", timings}};
            doc["metadata"] = meta;
            doc["config"] = config_json(cfg);
            doc["schedule"] = schedule;
            for (const auto& [key, value] : status.items()) doc[key] = value;
            if (!rep.radial_profile.empty()) {
                write_atomic(out_path(cfg, "radial_profile.csv"),
                             radial_profile_csv(rep.radial_profile, cfg.order()));
            }
            if (rep.diagnostics) {
                write_atomic(out_path(cfg, "lemma58_diagnostics.csv"),
                             diagnostics_csv(*rep.diagnostics, cfg.grid.n));
            }
            write_atomic(out_path(cfg, "fundamental_report.json"), dump(doc));
        };

        try {
            const FundamentalReport rep = run_exhaustion(k, V, cfg.schedule, cfg.solver, options);
            emit(rep, {{"status", "converged"}, {"failed_stage", nullptr}});
            if (rep.decay_fit) {
                std::cout << "decay slope " << format_double(rep.decay_fit->slope) << " (r^2 "
                          << format_double(rep.decay_fit->r_squared) << ")\n";
            }
            return 0;
        } catch (const StageFailure& e) {
            const Stage st = cfg.schedule.stages()[e.stage()];
            emit(e.partial(), {{"status", "failed"},
                               {"error", e.what()},
                               {"failed_stage",
                                {{"index", e.stage() + 1},
                                 {"radius", num(st.radius)},
                                 {"scale", num(st.scale)}}}});
            std::cerr << "numerical failure: " << e.what() << '\n';
            return 2;
        }
    });
}

int cmd_verify(const std::string& suite, const Invocation& inv) {
    return guarded([&] {
        const ExperimentConfig cfg = load(inv);
        cfg.validate();
        const VerifySummary summary = run_verify(suite, cfg);

        json doc = to_json(summary);
        json meta = metadata_block("verify_summary");
        json timings = json::object();
        for (const CheckResult& c : summary.checks) timings[c.suite + "/" + c.name] = c.seconds;
        meta["timings"] = timings;
        doc["metadata"] = meta;
        doc["config"] = config_json(cfg);
        write_atomic(out_path(cfg, "verify_summary.json"), dump(doc));
        write_atomic(out_path(cfg, "verify_summary.xml"), junit_xml(summary));

        for (const CheckResult& c : summary.checks) {
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << '/' << c.name << ": measured "
                      << format_double(c.measured) << ", required " << c.comparator << ' '
                      << format_double(c.threshold) << '\n';
            if (!c.passed) {
                std::cerr << "check " << c.suite << '/' << c.name << " failed [" << c.anchor
                          << "]: measured " << format_double(c.measured) << ", required "
                          << c.comparator << ' ' << format_double(c.threshold) << '\n';
            }
        }
        std::cout << summary.checks.size() - summary.failures() << '/' << summary.checks.size()
                  << " checks passed\n";
        return summary.passed() ? 0 : 2;
    });
}

}  // namespace fracfund::cli
