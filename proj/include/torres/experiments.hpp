#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "torres/config.hpp"
#include "torres/fbi.hpp"
#include "torres/io.hpp"
#include "torres/mode_operators.hpp"
#include "torres/spectral.hpp"

namespace torres {

inline int thread_count() {
    if (const char* env = std::getenv("TORRES_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

/// Runs fn(0..count-1) on a small worker pool. Tasks must be independent;
/// callers aggregate by task index so the schedule never affects output.
template <class F>
inline void parallel_tasks(int count, F&& fn) {
    const int nt = std::min(thread_count(), count);
    if (nt <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nt));
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> errors;
    std::string summary;
};

namespace detail {

struct DeformedTask {
    double theta;
    int n;
    Spectrum windowed;  // filtered spectrum
    std::string error;
    bool failed = false;
};

inline std::vector<DeformedTask> run_deformed_grid(const ExperimentConfig& cfg,
                                                   const std::vector<double>& thetas) {
    const GridSpec grid = make_grid(cfg.grid_n);
    std::vector<DeformedTask> tasks;
    for (double th : thetas)
        for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) tasks.push_back({th, n, {}, {}, false});
    parallel_tasks(static_cast<int>(tasks.size()), [&](int i) {
        DeformedTask& t = tasks[static_cast<size_t>(i)];
        try {
            const DeformationSpec d = cfg.deformation(t.theta);
            const ModeMatrix mm = assemble_deformed(grid, d, cfg.symbol, t.n);
            Spectrum sp = eigendecompose(mm.matrix);
            sp.source = {t.n, t.theta, 0.0, cfg.grid_n};
            t.windowed = filter_window(sp, cfg.window);
            t.windowed.source = sp.source;
        } catch (const std::exception& e) {
            t.failed = true;
            t.error = "(n=" + std::to_string(t.n) + ", theta=" + format17(t.theta) + "): " + e.what();
        }
    });
    return tasks;
}

inline CsvProvenance provenance(const ExperimentConfig& cfg) {
    CsvProvenance p;
    p.grid_n = cfg.grid_n;
    p.symbol = cfg.symbol_text;
    p.g0 = cfg.g0_expression.empty() ? "-2*cos(x)" : cfg.g0_expression;
    p.full_mode_laplacian = cfg.full_mode_laplacian;
    p.seed = cfg.seed;
    return p;
}

}  // namespace detail

/// Deformed-operator spectra for every (theta, n) in the config; writes
/// output_dir/spectra.csv. Task errors are recorded and the run continues.
inline RunOutcome run_resonances(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    auto tasks = detail::run_deformed_grid(cfg, cfg.thetas);
    std::vector<CsvRow> rows;
    RunOutcome out;
    for (const auto& t : tasks) {
        if (t.failed) {
            out.errors.push_back(t.error);
            continue;
        }
        for (Eigen::Index i = 0; i < t.windowed.eigenvalues.size(); ++i) {
            CsvRow r;
            r.kind = "resonance";
            r.n = t.n;
            r.theta = t.theta;
            r.re = t.windowed.eigenvalues[i].real();
            r.im = t.windowed.eigenvalues[i].imag();
            r.residual = t.windowed.residuals[i];
            rows.push_back(r);
        }
    }
    write_rows_csv(cfg.output_dir / "spectra.csv", detail::provenance(cfg), std::move(rows));
    out.exit_code = out.errors.empty() ? 0 : 3;
    out.summary = "resonances: " + std::to_string(tasks.size()) + " tasks, " +
                  std::to_string(out.errors.size()) + " failed";
    return out;
}

/// Viscous sweep against the deformed reference: per mode, eigenvalues of
/// the viscous family across nu_sweep are window-filtered, tracked by
/// minimum-displacement matching, and compared with the deformed spectrum
/// at thetas.front(). Writes spectra.csv (reference), paths.csv and
/// figure.svg.
inline RunOutcome run_viscosity_sweep(const ExperimentConfig& cfg) {
    if (cfg.nu_sweep.empty()) throw ConfigError("viscosity-sweep: nu_sweep must be nonempty");
    std::filesystem::create_directories(cfg.output_dir);
    const GridSpec grid = make_grid(cfg.grid_n);
    const double theta_ref = cfg.thetas.front();
    RunOutcome out;

    auto ref_tasks = detail::run_deformed_grid(cfg, {theta_ref});
    const int modes = cfg.n_hi - cfg.n_lo + 1;
    const int nnu = static_cast<int>(cfg.nu_sweep.size());

    struct ViscousTask {
        int n;
        double nu;
        Spectrum windowed;
        std::string error;
        bool failed = false;
    };
    std::vector<ViscousTask> vtasks;
    for (int n = cfg.n_lo; n <= cfg.n_hi; ++n)
        for (double nu : cfg.nu_sweep) vtasks.push_back({n, nu, {}, {}, false});
    parallel_tasks(static_cast<int>(vtasks.size()), [&](int i) {
        ViscousTask& t = vtasks[static_cast<size_t>(i)];
        try {
            const ModeMatrix mm =
                assemble_viscous(grid, cfg.symbol, t.n, t.nu, cfg.full_mode_laplacian);
            Spectrum sp = eigendecompose(mm.matrix);
            sp.source = {t.n, 0.0, t.nu, cfg.grid_n};
            t.windowed = filter_window(sp, cfg.window);
            t.windowed.source = sp.source;
        } catch (const std::exception& e) {
            t.failed = true;
            t.error = "(n=" + std::to_string(t.n) + ", nu=" + format17(t.nu) + "): " + e.what();
        }
    });

    std::vector<CsvRow> ref_rows, path_rows;
    SvgFigure fig;
    fig.omega0 = cfg.window.omega0;
    fig.window_theta = cfg.window.theta;
    fig.title = "torres " + std::string(kVersion) + "  symbol=" + cfg.symbol_text +
                "  N=" + std::to_string(cfg.grid_n);
    double worst_distance = 0.0;
    bool any_distance = false;

    for (int mi = 0; mi < modes; ++mi) {
        const int n = cfg.n_lo + mi;
        const detail::DeformedTask& ref = ref_tasks[static_cast<size_t>(mi)];
        if (ref.failed) out.errors.push_back(ref.error);
        // reference rows (also mirrored into spectra.csv)
        if (!ref.failed) {
            for (Eigen::Index i = 0; i < ref.windowed.eigenvalues.size(); ++i) {
                CsvRow r;
                r.kind = "resonance";
                r.n = n;
                r.theta = theta_ref;
                r.re = ref.windowed.eigenvalues[i].real();
                r.im = ref.windowed.eigenvalues[i].imag();
                r.residual = ref.windowed.residuals[i];
                ref_rows.push_back(r);
                fig.resonances.push_back(ref.windowed.eigenvalues[i]);
            }
        }
        // collect this mode's sweep
        std::vector<std::pair<double, Spectrum>> sweep;
        bool mode_ok = true;
        for (int j = 0; j < nnu; ++j) {
            const ViscousTask& t = vtasks[static_cast<size_t>(mi * nnu + j)];
            if (t.failed) {
                out.errors.push_back(t.error);
                mode_ok = false;
                break;
            }
            sweep.emplace_back(t.nu, t.windowed);
        }
        if (!mode_ok) continue;

        std::vector<EigenPath> paths;
        if (nnu >= 2) {
            paths = match_paths(sweep);
        } else {
            const auto& only = sweep[0].second;
            for (Eigen::Index i = 0; i < only.eigenvalues.size(); ++i) {
                EigenPath p;
                p.path_id = static_cast<int>(i);
                p.nus.push_back(sweep[0].first);
                p.values.push_back(only.eigenvalues[i]);
                p.limit_candidate = only.eigenvalues[i];
                paths.push_back(std::move(p));
            }
        }
        if (!ref.failed) {
            match_to_resonances(paths, ref.windowed, cfg.window, static_cast<size_t>(nnu));
            std::vector<Complex> limits;
            for (const auto& p : paths)
                if (p.first_sweep_index + static_cast<int>(p.nus.size()) == nnu)
                    limits.push_back(p.limit_candidate);
            if (!limits.empty() && ref.windowed.eigenvalues.size() > 0) {
                worst_distance = std::max(
                    worst_distance, resonance_distance(limits, ref.windowed, cfg.window));
                any_distance = true;
            }
        }
        for (const auto& p : paths) {
            fig.paths.push_back(p.values);
            for (size_t j = 0; j < p.values.size(); ++j) {
                CsvRow r;
                r.kind = "viscous";
                r.n = n;
                r.nu = p.nus[j];
                r.re = p.values[j].real();
                r.im = p.values[j].imag();
                r.residual = 0.0;  // per-pair residuals live in the spectra; paths carry values
                r.path_id = p.path_id;
                path_rows.push_back(r);
            }
        }
    }

    write_rows_csv(cfg.output_dir / "spectra.csv", detail::provenance(cfg), std::move(ref_rows));
    std::vector<CsvRow> all_rows = path_rows;
    write_rows_csv(cfg.output_dir / "paths.csv", detail::provenance(cfg), std::move(all_rows));
    write_figure_svg(cfg.output_dir / "figure.svg", fig);
    out.exit_code = out.errors.empty() ? 0 : 3;
    out.summary = "viscosity-sweep: worst directed distance = " +
                  (any_distance ? format17(worst_distance) : std::string("n/a"));
    return out;
}

/// Escape-condition gate. Exit 0 when the sampled bracket is positive,
/// 1 when it is not, 2 when the sample set is empty.
inline RunOutcome run_escape_check(const ExperimentConfig& cfg) {
    const DeformationSpec d = cfg.deformation(cfg.thetas.front());
    const EscapeReport rep = verify_escape(cfg.symbol, d, cfg.escape.xi_max, cfg.escape.c_cut,
                                           cfg.escape.tol, cfg.escape.region);
    RunOutcome out;
    if (rep.empty_sample) {
        out.exit_code = 2;
        out.summary = "escape-check: empty sample (no near-characteristic points)";
        return out;
    }
    out.exit_code = rep.ok ? 0 : 1;
    out.summary = "escape-check: min H_pG = " + format17(rep.min_hpg) + " over " +
                  std::to_string(rep.samples) + " samples -> " + (rep.ok ? "ok" : "FAIL");
    return out;
}

/// Inversion and reproducing-identity checks at the configured h; writes
/// output_dir/fbi_check.csv and reports pass/fail.
inline RunOutcome run_fbi_check(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    const FbiConfig base = default_fbi_config(cfg.fbi.h, cfg.fbi.max_degree);
    FbiConfig fine = base;
    fine.n_y *= 2;
    fine.n_xi = 2 * fine.n_xi - 1;

    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed) + 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TrigPoly poly = TrigPoly::zero(cfg.fbi.max_degree);
    for (int m = -poly.deg; m <= poly.deg; ++m)
        poly.coeff[m + poly.deg] = Complex{gauss(rng), gauss(rng)};

    struct Line {
        std::string name;
        double value;
        double tol;
        bool pass;
    };
    std::vector<Line> lines;
    auto add = [&](const std::string& name, double value, double tol) {
        lines.push_back({name, value, tol, value <= tol});
    };

    const double e_const = check_inversion(TrigPoly::mode(0), base).rel_error;
    add("inversion_constant", e_const, cfg.fbi.inversion_tol);
    const double e_mode1 = check_inversion(TrigPoly::mode(1), base).rel_error;
    add("inversion_mode1", e_mode1, cfg.fbi.inversion_tol);
    const double e_poly = check_inversion(poly, base).rel_error;
    add("inversion_poly", e_poly, cfg.fbi.inversion_tol);
    const double e_fine = check_inversion(poly, fine).rel_error;
    add("inversion_poly_refined", e_fine, 0.5 * std::max(e_poly, 1e-14));

    for (double a : {0.25, 1.0}) {
        const double e = check_lebeau(TrigPoly::mode(0), kPi, 0.5, cfg.fbi.h, a).rel_error;
        add("lebeau_a=" + format17(a).substr(0, 4), e, cfg.fbi.lebeau_tol);
    }

    std::ofstream csv(cfg.output_dir / "fbi_check.csv", std::ios::binary);
    csv << "check,rel_error,tolerance,pass\n";
    bool all = true;
    for (const auto& l : lines) {
        csv << l.name << ',' << format17(l.value) << ',' << format17(l.tol) << ','
            << (l.pass ? 1 : 0) << "\n";
        all = all && l.pass;
    }
    RunOutcome out;
    out.exit_code = all ? 0 : 1;
    out.summary = std::string(all ? "fbi-check: PASS" : "fbi-check: FAIL") + " (" +
                  std::to_string(lines.size()) + " checks, h=" + format17(cfg.fbi.h) + ")";
    return out;
}

}  // namespace torres
