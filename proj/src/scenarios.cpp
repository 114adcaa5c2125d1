#include "tunnelsplit/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tunnelsplit/bohmian.hpp"
#include "tunnelsplit/check.hpp"
#include "tunnelsplit/decompose.hpp"
#include "tunnelsplit/io.hpp"
#include "tunnelsplit/oracle.hpp"
#include "tunnelsplit/parallel.hpp"
#include "tunnelsplit/timescales.hpp"

namespace tunnelsplit {

namespace {

nlohmann::json manifest_config(const RunConfig& cfg) {
  nlohmann::json j = to_json(cfg);
  j.erase("output");
  return j;
}

namespace fs = std::filesystem;
using io::CsvBuilder;
using io::format_double;
using nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string numbered(const char* stem, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03zu.csv", stem, i);
  return buf;
}

std::vector<double> snapshot_times(std::size_t n, double t_end) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = n == 1 ? 0.0 : t_end * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

}  // namespace

int run_decompose(const RunConfig& cfg, const fs::path& out) {
  const PotentialSpec pot = build_potential(cfg.potential);
  const std::vector<double> energies = energy_values(cfg.energies);
  struct Row {
    DecomposedState d;
    DecompositionResiduals r;
  };
  const auto rows = parallel_map(energies.size(), [&](std::size_t i) {
    DecomposedState d = decompose(pot, energies[i]);
    DecompositionResiduals r = measure_decomposition(pot, d);
    return Row{std::move(d), r};
  });

  CsvBuilder csv({"E", "T", "R", "re_a", "im_a", "re_b", "im_b", "re_c", "im_c", "re_alpha",
                  "im_alpha", "res_sum", "res_ref_midpoint", "res_ref_oddness", "res_alpha_beta",
                  "res_beta_b", "res_current", "res_tr_outgoing", "res_tr_midpoint",
                  "res_incident_T", "res_truncated_sum", "res_tilde_ref_right",
                  "res_tilde_tr_current"});
  DecompositionResiduals worst;
  for (const auto& [d, r] : rows) {
    csv.row({d.E, d.amps.T, d.amps.R, d.amps.a.real(), d.amps.a.imag(), d.amps.b.real(),
             d.amps.b.imag(), d.c.real(), d.c.imag(), d.alpha.real(), d.alpha.imag(), r.sum,
             r.midpoint, r.oddness, r.alpha_beta, r.beta_b, r.current, r.tr_outgoing,
             r.midpoint_equality, r.alpha_T, r.truncated_sum, r.tilde_ref_right,
             r.tilde_tr_current});
    worst.sum = std::max(worst.sum, r.sum);
    worst.midpoint = std::max(worst.midpoint, r.midpoint);
    worst.oddness = std::max(worst.oddness, r.oddness);
    worst.current = std::max(worst.current, r.current);
    worst.alpha_T = std::max(worst.alpha_T, r.alpha_T);
    worst.truncated_sum = std::max(worst.truncated_sum, r.truncated_sum);
    worst.tilde_ref_right = std::max(worst.tilde_ref_right, r.tilde_ref_right);
  }

  const Tolerances& tol = cfg.tolerances;
  const bool ok = worst.sum <= tol.decomposition && worst.midpoint <= tol.midpoint &&
                  worst.oddness <= tol.oddness && worst.current <= tol.current &&
                  worst.alpha_T <= tol.alpha_T && worst.truncated_sum <= tol.decomposition &&
                  worst.tilde_ref_right == 0.0;

  io::OutputDir dir(out, manifest_config(cfg), "decompose");
  dir.write("decompose.csv", csv.str());
  dir.write("decompose.gp",
            "set datafile separator ','\n"
            "set key autotitle columnhead\n"
            "set xlabel 'E'\n"
            "set multiplot layout 2,1\n"
            "plot 'decompose.csv' using 1:2 with lines title 'T', "
            "'' using 1:3 with lines title 'R'\n"
            "set logscale y\n"
            "plot for [c=12:23] 'decompose.csv' using 1:(abs(column(c)) + 1e-300) with lines\n"
            "unset multiplot\n");
  dir.set_results({{"energies", energies.size()},
                   {"max_residuals",
                    {{"sum", worst.sum},
                     {"ref_midpoint", worst.midpoint},
                     {"ref_oddness", worst.oddness},
                     {"current", worst.current},
                     {"incident_T", worst.alpha_T},
                     {"truncated_sum", worst.truncated_sum},
                     {"tilde_ref_right", worst.tilde_ref_right}}},
                   {"passed", ok}});
  dir.finish();
  return ok ? exit_ok : exit_invariant_failure;
}

int run_evolve(const RunConfig& cfg, Family family, const fs::path& out) {
  const PotentialSpec pot = build_potential(cfg.potential);
  const SpectralPacket p = build_packet(pot, family, cfg.packet);
  const double t_end = cfg.t_end.value_or(traversal_window(p));
  const UniformGrid grid = cfg.grid.value_or(default_evolve_grid(pot, cfg.packet, t_end));
  const std::vector<double> times = snapshot_times(cfg.snapshots, t_end);
  const auto fields = parallel_map(times.size(), [&](std::size_t i) { return field_at(p, grid, times[i]); });

  io::OutputDir dir(out, manifest_config(cfg), "evolve");
  json snaps = json::array();
  double n_min = INFINITY, n_max = -INFINITY, kink_max = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const GridField& f = fields[i];
    CsvBuilder csv({"x", "re_psi", "im_psi", "rho", "j"});
    for (std::size_t k = 0; k < f.x.size(); ++k) {
      const cplx psi = f.psi[k];
      csv.row({f.x[k], psi.real(), psi.imag(), std::norm(psi),
               2.0 * std::imag(std::conj(psi) * f.dpsi[k])});
    }
    const std::string name = numbered("snapshot", i);
    dir.write(name, csv.str());
    const double n = norm(f, 1e-8);
    n_min = std::min(n_min, n);
    n_max = std::max(n_max, n);
    json s{{"file", name}, {"t", f.t}, {"norm", n}, {"edge_density", edge_density(f)}};
    if (f.kink) {
      const auto [jl, jr] = kink_current_limits(f);
      s["kink_current"] = {{"left", jl}, {"right", jr}, {"jump", std::abs(jl - jr)}};
      kink_max = std::max(kink_max, std::abs(jl - jr));
    }
    snaps.push_back(std::move(s));
  }

  std::string gp =
      "set datafile separator ','\n"
      "set xlabel 'x'\n"
      "set ylabel 't'\n"
      "unset key\n"
      "scale = 20.0\n"
      "times = '";
  for (std::size_t i = 0; i < times.size(); ++i) gp += (i ? " " : "") + format_double(times[i]);
  gp += "'\n";
  gp += "plot for [i=0:" + std::to_string(times.size() - 1) +
        "] sprintf('snapshot_%03d.csv', i) skip 1 using 1:(real(word(times, i + 1)) + scale * $4) "
        "with lines lc rgb 'black'\n";
  dir.write("waterfall.gp", gp);

  json results{{"family", std::string(to_string(family))},
               {"mean_transmission", mean_transmission(p)},
               {"grid", {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"n", grid.n}}},
               {"t_end", t_end},
               {"snapshots", snaps},
               {"residuals", {{"norm_variation", n_max - n_min}}}};
  if (is_truncated(family)) results["residuals"]["kink_current_jump"] = kink_max;
  dir.set_results(std::move(results));
  dir.finish();
  return exit_ok;
}

int run_times(const RunConfig& cfg, const fs::path& out) {
  const PotentialSpec pot = build_potential(cfg.potential);
  const std::vector<double> energies = energy_values(cfg.energies);
  const auto rows = time_table(pot, energies, cfg.omega);

  CsvBuilder csv({"E", "T", "R", "tau_dwell_full", "tau_dwell_tr", "tau_dwell_ref", "tau_cross",
                  "tau_group", "tau_larmor_y", "tau_larmor_z", "omega", "flagged", "note"});
  std::size_t flagged = 0;
  for (const auto& r : rows) {
    std::vector<std::string> cells;
    for (double v : {r.E, r.T, r.R, r.tau_dwell_full, r.tau_dwell_tr, r.tau_dwell_ref, r.tau_cross,
                     r.tau_group, r.tau_larmor_y, r.tau_larmor_z, r.omega})
      cells.push_back(format_double(v));
    cells.push_back(r.flagged ? "1" : "0");
    cells.push_back(io::csv_text(r.note));
    csv.raw_row(cells);
    flagged += r.flagged;
  }

  // Widths at fixed energy below the top of a rectangular barrier of the
  // same height: kappa = 1 when the height exceeds 1.
  const double V0 = pot.max_value();
  const double E = V0 > 1.0 ? V0 - 1.0 : 0.5 * V0;
  const double kappa = std::sqrt(V0 - E);
  std::vector<double> widths;
  for (int i = 1; i <= 40; ++i) widths.push_back(0.25 * i / kappa);
  const auto hartman = parallel_map(widths.size(), [&](std::size_t i) {
    const PotentialSpec rect = make_rectangular(V0, widths[i]);
    return std::pair{group_delay(rect, E), dwell_time(rect, E, Family::full)};
  });
  CsvBuilder hcsv({"d", "kappa_d", "tau_group", "d_over_vg", "tau_dwell"});
  for (std::size_t i = 0; i < widths.size(); ++i)
    hcsv.row({widths[i], kappa * widths[i], hartman[i].first, widths[i] / (2.0 * std::sqrt(E)),
              hartman[i].second});

  io::OutputDir dir(out, manifest_config(cfg), "times");
  dir.write("times.csv", csv.str());
  dir.write("hartman.csv", hcsv.str());
  dir.write("times.gp",
            "set datafile separator ','\n"
            "set key autotitle columnhead\n"
            "set xlabel 'E'\n"
            "set ylabel 'time'\n"
            "plot for [c in '4 5 6 8 9'] 'times.csv' using 1:int(c) with lines\n");
  dir.write("hartman.gp",
            "set datafile separator ','\n"
            "set key autotitle columnhead left\n"
            "set xlabel 'kappa d'\n"
            "set ylabel 'time'\n"
            "plot 'hartman.csv' using 2:3 with linespoints, '' using 2:4 with lines, "
            "'' using 2:5 with lines\n");
  dir.set_results({{"rows", rows.size()},
                   {"flagged_rows", flagged},
                   {"hartman", {{"E", E}, {"V0", V0}, {"kappa", kappa}}}});
  dir.finish();
  return exit_ok;
}

int run_bohm(const RunConfig& cfg, const fs::path& out) {
  const PotentialSpec pot = build_potential(cfg.potential);
  const SpectralPacket p = build_packet(pot, cfg.bohm.family, cfg.packet);
  const IntegrationOptions opt{0.0, 0.0, cfg.bohm.dt, cfg.bohm.tolerance};
  auto starts = sample_starts(p, cfg.bohm.ensemble, cfg.seed);
  std::sort(starts.begin(), starts.end());
  const auto runs = integrate_ensemble(p, starts, opt);

  CsvBuilder csv({"id", "t", "x"});
  json list = json::array();
  std::size_t counts[3] = {0, 0, 0};
  std::size_t inversions = 0;
  bool seen_transmitted = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Trajectory& r = runs[i];
    for (const auto& s : r.samples) csv.row({static_cast<double>(i), s.t, s.x});
    ++counts[static_cast<int>(r.fate)];
    if (r.fate == Fate::transmitted) seen_transmitted = true;
    else if (r.fate == Fate::reflected && seen_transmitted) ++inversions;
    json e{{"id", i},
           {"x_start", r.x_start()},
           {"x_end", r.x_end()},
           {"t_end", r.samples.back().t},
           {"fate", std::string(to_string(r.fate))},
           {"max_speed", r.max_speed}};
    if (!r.diagnostic.empty()) e["diagnostic"] = r.diagnostic;
    list.push_back(std::move(e));
  }

  json summary{{"family", std::string(to_string(cfg.bohm.family))},
               {"ensemble", runs.size()},
               {"seed", cfg.seed},
               {"transmitted", counts[0]},
               {"reflected", counts[1]},
               {"undecided", counts[2]},
               {"mean_transmission", finite_or_null(mean_transmission(p))},
               {"fate_inversions", inversions},
               {"trajectories", list}};
  std::string marker;
  if (cfg.bohm.family == Family::full && counts[0] > 0 && counts[1] > 0) {
    const double xs = critical_point(p, starts.front(), starts.back(), opt);
    summary["critical_point"] = xs;
    marker = "set arrow from graph 0, first " + format_double(xs) +
             " to graph 1, first " + format_double(xs) + " nohead dt 2 lc rgb 'red'\n";
  }

  io::OutputDir dir(out, manifest_config(cfg), "bohm");
  dir.write("trajectories.csv", csv.str());
  dir.write("fates.json", summary.dump(2) + "\n");
  dir.write("trajectories.gp",
            "set datafile separator ','\n"
            "set xlabel 't'\n"
            "set ylabel 'x'\n"
            "unset key\n" +
                marker +
                "set arrow from graph 0, first " + format_double(pot.x_left()) + " to graph 1, first " +
                format_double(pot.x_left()) + " nohead lc rgb 'gray'\n" +
                "set arrow from graph 0, first " + format_double(pot.x_right()) + " to graph 1, first " +
                format_double(pot.x_right()) + " nohead lc rgb 'gray'\n" +
                "plot 'trajectories.csv' skip 1 using 2:3:1 with lines lc variable\n");
  summary.erase("trajectories");
  dir.set_results(std::move(summary));
  dir.finish();
  return exit_ok;
}

int run_oracle(const RunConfig& cfg, const fs::path& out) {
  const PotentialSpec pot = build_potential(cfg.potential);
  PacketParams pp = cfg.packet;
  pp.x0 = cfg.oracle.x0;
  const SpectralPacket p = build_packet(pot, Family::full, pp);
  const double t = cfg.oracle.t.value_or(std::abs(pp.x0 - pot.midpoint()) / (2.0 * pp.k0));
  const SpectralComparison cmp =
      compare_with_spectral(p, t, cfg.oracle.h, cfg.oracle.dt, 15.0 / pp.sigma_k);

  io::OutputDir dir(out, manifest_config(cfg), "oracle");
  auto snapshot = [&](const GridField& a, const GridField& b) {
    CsvBuilder csv({"x", "re_spectral", "im_spectral", "re_cn", "im_cn", "abs_diff"});
    for (std::size_t k = 0; k < a.x.size(); ++k)
      csv.row({a.x[k], a.psi[k].real(), a.psi[k].imag(), b.psi[k].real(), b.psi[k].imag(),
               std::abs(a.psi[k] - b.psi[k])});
    return csv.str();
  };
  dir.write("snapshot_initial.csv", snapshot(cmp.initial, cmp.initial));
  dir.write("snapshot_final.csv", snapshot(cmp.spectral, cmp.cn));
  const bool ok = cmp.distance.l2 <= cfg.tolerances.oracle_l2;
  const json report{{"t", cmp.cn.t},
                    {"steps", cmp.steps},
                    {"h", cfg.oracle.h},
                    {"dt", cfg.oracle.dt},
                    {"x0", pp.x0},
                    {"grid", {{"x_min", cmp.cn.x.front()}, {"x_max", cmp.cn.x.back()}, {"n", cmp.cn.x.size()}}},
                    {"l2", cmp.distance.l2},
                    {"max_pointwise", cmp.distance.max_pointwise},
                    {"norm_initial", norm(cmp.initial, 1.0)},
                    {"norm_cn", norm(cmp.cn, 1.0)},
                    {"tolerance", cfg.tolerances.oracle_l2},
                    {"passed", ok}};
  dir.write("report.json", report.dump(2) + "\n");
  dir.write("oracle.gp",
            "set datafile separator ','\n"
            "set key autotitle columnhead\n"
            "set xlabel 'x'\n"
            "set multiplot layout 2,1\n"
            "plot 'snapshot_final.csv' using 1:($2**2 + $3**2) with lines title 'spectral', "
            "'' using 1:($4**2 + $5**2) with lines dt 2 title 'Crank-Nicolson'\n"
            "set logscale y\n"
            "plot 'snapshot_final.csv' using 1:($6 + 1e-300) with lines title '|difference|'\n"
            "unset multiplot\n");
  dir.set_results(report);
  dir.finish();
  return ok ? exit_ok : exit_invariant_failure;
}

int run_check_scenario(const RunConfig& cfg, const fs::path& out) {
  const CheckReport report = run_check(cfg);
  io::OutputDir dir(out, manifest_config(cfg), "check");
  const json j = report.to_json();
  dir.write("report.json", j.dump(2) + "\n");
  CsvBuilder csv({"name", "group", "measured", "tolerance", "passed"});
  for (const auto& e : report.entries)
    csv.raw_row({io::csv_text(e.name), io::csv_text(e.group), format_double(e.measured),
                 format_double(e.tolerance), e.passed ? "1" : "0"});
  dir.write("report.csv", csv.str());
  dir.set_results({{"total", report.entries.size()}, {"failed", report.failures()}});
  dir.finish();
  return report.all_passed() ? exit_ok : exit_invariant_failure;
}

}  // namespace tunnelsplit
