// cfode — command-line solver for differential equations with the
// Caputo-Fabrizio fractional derivative of order 1 < beta <= 2.
//
// Subcommands: solve-linear, solve-nonlinear, solve-msd, verify.
// Series go to files; a single JSON report object goes to stdout; every
// run writes a <out>.manifest.json sidecar with the resolved parameters.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfode/cfode.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

void write_series_csv(const std::string& path, const std::string& name,
                      const cfode::GridFunction& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationFailure("--out: cannot open '" + path + "' for writing");
    out << "t," << name << "\n";
    for (std::size_t k = 0; k < f.size(); ++k)
        out << format_double(f.grid.node(k)) << "," << format_double(f[k]) << "\n";
}

void write_series_json(const std::string& path, const std::string& name,
                       const cfode::GridFunction& f) {
    ordered_json j;
    std::vector<double> t(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) t[k] = f.grid.node(k);
    j["t"] = t;
    j[name] = f.values;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationFailure("--out: cannot open '" + path + "' for writing");
    out << j.dump() << "\n";
}

void write_series(const std::string& path, const std::string& format,
                  const std::string& name, const cfode::GridFunction& f) {
    if (format == "json")
        write_series_json(path, name, f);
    else
        write_series_csv(path, name, f);
}

struct CsvSeries {
    std::vector<double> t;
    std::vector<double> v;
};

CsvSeries read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationFailure("cannot open CSV file '" + path + "'");
    CsvSeries s;
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,", 0) != 0)
        throw ValidationFailure("malformed CSV '" + path + "': missing 't,<name>' header");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationFailure("malformed CSV '" + path + "' at line " +
                                    std::to_string(lineno));
        try {
            s.t.push_back(std::stod(line.substr(0, comma)));
            s.v.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ValidationFailure("malformed CSV '" + path + "' at line " +
                                    std::to_string(lineno));
        }
    }
    if (s.t.size() < 2)
        throw ValidationFailure("CSV '" + path + "' holds fewer than 2 samples");
    return s;
}

// Linear interpolation of CSV samples onto the solver grid; constant
// extrapolation outside the sampled range.
cfode::GridFunction resample(const CsvSeries& s, const cfode::Grid& grid) {
    return cfode::GridFunction::sample(grid, [&](double t) {
        if (t <= s.t.front()) return s.v.front();
        if (t >= s.t.back()) return s.v.back();
        std::size_t hi = 1;
        while (hi + 1 < s.t.size() && s.t[hi] < t) ++hi;
        const double w = (t - s.t[hi - 1]) / (s.t[hi] - s.t[hi - 1]);
        return (1.0 - w) * s.v[hi - 1] + w * s.v[hi];
    });
}

cfode::Grid grid_from_samples(const CsvSeries& s, const std::string& what) {
    const std::size_t n = s.t.size();
    const double h = (s.t.back() - s.t.front()) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(s.t[k] - (s.t.front() + static_cast<double>(k) * h)) >
            1e-9 * std::max(1.0, std::abs(s.t.back())))
            throw ValidationFailure(what + ": time samples are not uniform");
    return cfode::Grid(s.t.front(), s.t.back(), n);
}

void write_manifest(const std::string& out_path, const ordered_json& manifest) {
    std::ofstream out(out_path + ".manifest.json", std::ios::binary);
    if (out) out << manifest.dump(2) << "\n";
}

struct ForcingInput {
    std::string expr;
    std::string csv;
};

// Sample a forcing and its derivative: symbolic derivative when given as
// an expression, quadrature.derivative on resampled data when given as CSV.
std::pair<cfode::GridFunction, cfode::GridFunction>
sample_forcing(const ForcingInput& in, const cfode::Grid& grid,
               const std::string& flag) {
    if (!in.expr.empty()) {
        const cfode::Expr f = cfode::parse(in.expr, /*allow_u=*/false);
        const cfode::Expr df = cfode::differentiate(f, 't');
        return {cfode::GridFunction::sample(grid, [&](double t) { return cfode::eval(f, t); }),
                cfode::GridFunction::sample(grid, [&](double t) { return cfode::eval(df, t); })};
    }
    if (!in.csv.empty()) {
        const cfode::GridFunction f = resample(read_csv(in.csv), grid);
        return {f, cfode::derivative(f)};
    }
    throw ValidationFailure(flag + ": a forcing expression or CSV is required");
}

int run_solve_linear(double alpha, double lambda, double a, double t1,
                     std::size_t n, const ForcingInput& forcing, double u0,
                     double du0, const std::string& out,
                     const std::string& format) {
    const auto start = std::chrono::steady_clock::now();
    const cfode::CFOrder order(alpha);
    if (alpha >= 1.0)
        throw ValidationFailure("--alpha: kernel solvers require alpha < 1");
    if (n < 4) throw ValidationFailure("--n: need at least 4 nodes");
    const cfode::Grid grid(a, t1, n);
    auto [f, df] = sample_forcing(forcing, grid, "--f");

    const cfode::LinearProblem problem(order, lambda, a, f, df, u0, du0);
    const cfode::Solution sol = cfode::solve(problem);
    write_series(out, format, "u", sol.u);

    ordered_json report;
    report["command"] = "solve-linear";
    report["case"] = cfode::to_string(sol.case_tag);
    report["discriminant"] = cfode::discriminant_case(order, lambda).first;
    report["residual_max_norm"] = sol.residual_norm;
    std::cout << report.dump() << "\n";

    ordered_json manifest;
    manifest["command"] = "solve-linear";
    manifest["alpha"] = alpha;
    manifest["lambda"] = lambda;
    manifest["a"] = a;
    manifest["t1"] = t1;
    manifest["n"] = n;
    manifest["f"] = forcing.expr.empty() ? "csv:" + forcing.csv : forcing.expr;
    manifest["u0"] = u0;
    manifest["du0"] = du0;
    manifest["format"] = format;
    manifest["case"] = cfode::to_string(sol.case_tag);
    manifest["residual_max_norm"] = sol.residual_norm;
    manifest["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    write_manifest(out, manifest);
    return 0;
}

int run_solve_nonlinear(double alpha, double T, const std::string& phi_src,
                        double L1, double L2, double U0, double U1, double tol,
                        int max_iter, std::size_t n, const std::string& out,
                        const std::string& format) {
    const auto start = std::chrono::steady_clock::now();
    const cfode::CFOrder order(alpha);
    if (alpha >= 1.0)
        throw ValidationFailure("--alpha: kernel solvers require alpha < 1");
    if (n < 4) throw ValidationFailure("--n: need at least 4 nodes");
    const cfode::Expr phi_expr = cfode::parse(phi_src, /*allow_u=*/true);
    auto phi = [&](double t, double u) { return cfode::eval(phi_expr, t, u); };

    const cfode::NonlinearProblem problem(order, T, phi, L1, L2, U0, U1);
    const double q = cfode::contraction_check(problem);
    const cfode::Grid grid(0.0, T, n);
    auto [u, state] = cfode::picard_solve(problem, grid, tol, max_iter);
    write_series(out, format, "u", u);

    ordered_json report;
    report["command"] = "solve-nonlinear";
    report["q"] = q;
    report["iterations"] = state.iteration_count;
    report["final_diff"] = state.successive_diffs.back();
    std::cout << report.dump() << "\n";

    ordered_json manifest;
    manifest["command"] = "solve-nonlinear";
    manifest["alpha"] = alpha;
    manifest["T"] = T;
    manifest["phi"] = phi_src;
    manifest["L1"] = L1;
    manifest["L2"] = L2;
    manifest["U0"] = U0;
    manifest["U1"] = U1;
    manifest["tol"] = tol;
    manifest["max_iter"] = max_iter;
    manifest["n"] = n;
    manifest["format"] = format;
    manifest["q"] = q;
    manifest["iterations"] = state.iteration_count;
    manifest["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    write_manifest(out, manifest);
    return 0;
}

int run_solve_msd(double gamma, double m, double delta, double k, double sigma,
                  const ForcingInput& forcing, double x0, double t1,
                  std::size_t n, const std::string& out,
                  const std::string& format) {
    const auto start = std::chrono::steady_clock::now();
    if (n < 4) throw ValidationFailure("--n: need at least 4 nodes");
    const cfode::MSDParams params(m, delta, k, sigma, gamma);
    const cfode::Grid grid(0.0, t1, n);

    cfode::GridFunction F(grid);
    if (!forcing.expr.empty()) {
        const cfode::Expr fe = cfode::parse(forcing.expr, /*allow_u=*/false);
        F = cfode::GridFunction::sample(grid, [&](double t) { return cfode::eval(fe, t); });
    } else if (!forcing.csv.empty()) {
        F = resample(read_csv(forcing.csv), grid);
    } else {
        throw ValidationFailure("--F: a forcing expression or CSV is required");
    }

    const cfode::VolterraProblem vp = cfode::msd_reduce(params, F, x0);
    const cfode::GridFunction x = cfode::solve_msd(params, F, x0);
    write_series(out, format, "x", x);

    // Residual of the governing equation through the CF operators.
    const cfode::GridFunction d2 = cfode::cf_d_2gamma(x, gamma);
    const cfode::GridFunction d1 = cfode::cf_d_gamma(x, gamma);
    double residual = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        residual = std::max(
            residual, std::abs(m / params.sigma2() * d2[j] +
                               delta / params.sigma1() * d1[j] + k * x[j] - F[j]));

    ordered_json report;
    report["command"] = "solve-msd";
    report["A"] = vp.A;
    report["B"] = vp.B;
    report["residual_max_norm"] = residual;
    std::cout << report.dump() << "\n";
    {
        std::ofstream side(out + ".report.json", std::ios::binary);
        if (side) side << report.dump(2) << "\n";
    }

    ordered_json manifest;
    manifest["command"] = "solve-msd";
    manifest["gamma"] = gamma;
    manifest["m"] = m;
    manifest["delta"] = delta;
    manifest["k"] = k;
    manifest["sigma"] = sigma;
    manifest["F"] = forcing.expr.empty() ? "csv:" + forcing.csv : forcing.expr;
    manifest["x0"] = x0;
    manifest["t1"] = t1;
    manifest["n"] = n;
    manifest["format"] = format;
    manifest["A"] = vp.A;
    manifest["B"] = vp.B;
    manifest["residual_max_norm"] = residual;
    manifest["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    write_manifest(out, manifest);
    return 0;
}

int run_verify(const std::string& solution_csv, double alpha, double lambda,
               const std::string& f_src, const std::string& out) {
    const cfode::CFOrder order(alpha);
    if (alpha >= 1.0)
        throw ValidationFailure("--alpha: kernel operators require alpha < 1");
    const CsvSeries s = read_csv(solution_csv);
    if (s.t.size() < 4)
        throw ValidationFailure("--solution-csv: need at least 4 samples");
    const cfode::Grid grid = grid_from_samples(s, "--solution-csv");
    const cfode::GridFunction u(grid, s.v);
    const cfode::Expr fe = cfode::parse(f_src, /*allow_u=*/false);
    const cfode::GridFunction f =
        cfode::GridFunction::sample(grid, [&](double t) { return cfode::eval(fe, t); });

    const cfode::GridFunction dbeta = cfode::cf_d_beta(u, order, grid.t0);
    cfode::GridFunction residual(grid);
    double norm = 0.0;
    for (std::size_t k = 0; k < grid.n; ++k) {
        residual[k] = dbeta[k] - lambda * u[k] - f[k];
        norm = std::max(norm, std::abs(residual[k]));
    }

    ordered_json report;
    report["command"] = "verify";
    report["residual_max_norm"] = norm;
    std::cout << report.dump() << "\n";
    if (!out.empty()) write_series_csv(out, "residual", residual);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfode: solvers for Caputo-Fabrizio fractional differential equations"};
    app.require_subcommand(1);

    // solve-linear
    auto* lin = app.add_subcommand("solve-linear",
                                   "Closed-form solution of D^beta u - lambda u = f");
    double alpha = 0, lambda = 0, a = 0.0, t1 = 0, u0 = 0, du0 = 0;
    std::size_t n = 0;
    ForcingInput f_in;
    std::string out, format = "csv";
    lin->add_option("--alpha", alpha, "fractional part, 0 < alpha < 1")->required();
    lin->add_option("--lambda", lambda, "coefficient lambda")->required();
    lin->add_option("--a", a, "interval start (default 0)");
    lin->add_option("--t1", t1, "interval end")->required();
    lin->add_option("--n", n, "number of grid nodes")->required();
    lin->add_option("--f", f_in.expr, "forcing expression in t");
    lin->add_option("--f-csv", f_in.csv, "forcing samples CSV (t,<name>)");
    lin->add_option("--u0", u0, "u(a)")->required();
    lin->add_option("--du0", du0, "u'(a)")->required();
    lin->add_option("--out", out, "series output path")->required();
    lin->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    // solve-nonlinear
    auto* nl = app.add_subcommand("solve-nonlinear",
                                  "Picard solver for D^beta u = phi(t, u)");
    double T = 0, L1 = 0, L2 = 0, U0 = 0, U1 = 0, tol = 1e-10;
    int max_iter = 100;
    std::size_t n_nl = 2001;
    std::string phi_src, out_nl, format_nl = "csv";
    double alpha_nl = 0;
    nl->add_option("--alpha", alpha_nl, "fractional part, 0 < alpha < 1")->required();
    nl->add_option("--T", T, "horizon")->required();
    nl->add_option("--phi", phi_src, "nonlinearity expression in t, u")->required();
    nl->add_option("--L1", L1, "Lipschitz constant of phi")->required();
    nl->add_option("--L2", L2, "Lipschitz constant of d phi/dt")->required();
    nl->add_option("--U0", U0, "u(0)")->required();
    nl->add_option("--U1", U1, "u'(0)")->required();
    nl->add_option("--tol", tol, "sup-norm convergence tolerance");
    nl->add_option("--max-iter", max_iter, "iteration cap");
    nl->add_option("--n", n_nl, "number of grid nodes");
    nl->add_option("--out", out_nl, "series output path")->required();
    nl->add_option("--format", format_nl, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    // solve-msd
    auto* msd = app.add_subcommand("solve-msd",
                                   "Fractional mass-spring-damper via Volterra reduction");
    double gamma = 0, mass = 0, delta = 0, spring_k = 0, sigma = 0, x0 = 0,
           t1_msd = 0;
    std::size_t n_msd = 0;
    ForcingInput F_in;
    std::string out_msd, format_msd = "csv";
    msd->add_option("--gamma", gamma, "fractional order, 0 < gamma < 1")->required();
    msd->add_option("--m", mass, "mass")->required();
    msd->add_option("--delta", delta, "damping coefficient")->required();
    msd->add_option("--k", spring_k, "spring constant")->required();
    msd->add_option("--sigma", sigma, "auxiliary time parameter")->required();
    msd->add_option("--F", F_in.expr, "forcing expression in t");
    msd->add_option("--F-csv", F_in.csv, "forcing samples CSV");
    msd->add_option("--x0", x0, "x(0)")->required();
    msd->add_option("--t1", t1_msd, "interval end")->required();
    msd->add_option("--n", n_msd, "number of grid nodes")->required();
    msd->add_option("--out", out_msd, "series output path")->required();
    msd->add_option("--format", format_msd, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    // verify
    auto* ver = app.add_subcommand("verify",
                                   "Substitute a solution file back into the equation");
    std::string solution_csv, f_ver, out_ver;
    double alpha_ver = 0, lambda_ver = 0;
    ver->add_option("--solution-csv", solution_csv, "solution series CSV")->required();
    ver->add_option("--alpha", alpha_ver, "fractional part")->required();
    ver->add_option("--lambda", lambda_ver, "coefficient lambda")->required();
    ver->add_option("--f", f_ver, "forcing expression in t")->required();
    ver->add_option("--out", out_ver, "per-node residual CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (lin->parsed())
            return run_solve_linear(alpha, lambda, a, t1, n, f_in, u0, du0, out, format);
        if (nl->parsed())
            return run_solve_nonlinear(alpha_nl, T, phi_src, L1, L2, U0, U1, tol,
                                       max_iter, n_nl, out_nl, format_nl);
        if (msd->parsed())
            return run_solve_msd(gamma, mass, delta, spring_k, sigma, F_in, x0,
                                 t1_msd, n_msd, out_msd, format_msd);
        if (ver->parsed())
            return run_verify(solution_csv, alpha_ver, lambda_ver, f_ver, out_ver);
    } catch (const cfode::NotContractive& e) {
        std::cerr << "not contractive: q=" << format_double(e.q) << "\n";
        return 4;
    } catch (const cfode::MaxIterationsExceeded& e) {
        std::cerr << e.what() << "\n";
        return 5;
    } catch (const ValidationFailure& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const cfode::SyntaxError& e) {
        std::cerr << "expression error at offset " << e.offset << ": " << e.what() << "\n";
        return 2;
    } catch (const cfode::UnknownIdentifier& e) {
        std::cerr << "expression error at offset " << e.offset << ": " << e.what() << "\n";
        return 2;
    } catch (const cfode::Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    return 2;
}
