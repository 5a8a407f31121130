// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfode/cfode.hpp"

using namespace cfode;

namespace {

int failures = 0;

void criterion(int id, const std::string& label, bool ok,
               const std::string& detail) {
    std::printf("criterion %d [%s]: %s (%s)\n", id, ok ? "PASS" : "FAIL",
                label.c_str(), detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// --- 1: kernel-operator oracles -----------------------------------------

void c1_operator_oracles() {
    Grid g(0.0, 2.0, 4001);
    const CFOrder order(0.5);

    const GridFunction tsq = GridFunction::sample(g, [](double t) { return t * t; });
    const GridFunction d_tsq = cf_d_beta(tsq, order, 0.0);
    // closed form at t=1: 4(1 - e^{-1})
    const double err1 = std::abs(d_tsq[2000] - 2.5284822353142307);

    const GridFunction et = GridFunction::sample(g, [](double t) { return std::exp(t); });
    const GridFunction d_et = cf_d_beta(et, order, 0.0);
    double err2 = 0.0;
    for (std::size_t k = 0; k < g.n; ++k) {
        const double t = g.node(k);
        err2 = std::max(err2, std::abs(d_et[k] - (std::exp(t) - std::exp(-t))));
    }
    criterion(1, "closed-form operator values", err1 <= 1e-5 && err2 <= 1e-5,
              "t^2 err " + fmt(err1) + ", e^t err " + fmt(err2));
}

// --- 2: case (i) verification identity ----------------------------------

void c2_case_i_identity() {
    Grid g(0.0, 2.0, 4001);
    const CFOrder order(0.5);
    const auto f = GridFunction::sample(g, [](double t) { return t * std::exp(-t); });
    const auto df =
        GridFunction::sample(g, [](double t) { return (1.0 - t) * std::exp(-t); });
    const Solution s = solve(LinearProblem(order, 0.0, 0.0, f, df, 1.0, -0.5));
    const GridFunction upp = second_derivative(s.u);
    double err = 0.0;
    for (std::size_t k = 0; k < g.n; ++k)
        err = std::max(err, std::abs(upp[k] - (0.5 * df[k] + 0.5 * f[k])));
    criterion(2, "u'' = (1-alpha) f' + alpha f for lambda=0", err <= 1e-4,
              "max err " + fmt(err));
}

// --- 3: residual suite across all branches -------------------------------

double residual_suite(std::size_t n) {
    Grid g(0.0, 2.0, n);
    const CFOrder order(0.5);
    const auto f = GridFunction::sample(g, [](double t) { return t * std::exp(-t); });
    const auto df =
        GridFunction::sample(g, [](double t) { return (1.0 - t) * std::exp(-t); });
    double worst = 0.0;
    for (double lambda : {0.0, -8.0, 1.0, -1.0}) {
        const Solution s = solve(LinearProblem(order, lambda, 0.0, f, df, 0.0, 1.0));
        worst = std::max(worst, s.residual_norm);
    }
    return worst;
}

void c3_residuals() {
    const double coarse = residual_suite(4001);
    const double fine = residual_suite(8001);
    const bool ok = coarse <= 1e-4 && fine <= 3e-5 && coarse / fine >= 3.5;
    criterion(3, "residuals over all four lambda branches", ok,
              "n=4001: " + fmt(coarse) + ", n=8001: " + fmt(fine) + ", ratio " +
                  fmt(coarse / fine));
}

// --- 4: contraction behaviour of the Picard operator ---------------------

void c4_picard() {
    const CFOrder order(0.5);
    const NonlinearProblem p(order, 0.4, [](double, double u) { return 0.5 * u; },
                             0.5, 0.5, 1.0, 0.0);
    const double q = contraction_check(p);
    Grid g(0.0, 0.4, 2001);
    auto [u, state] = picard_solve(p, g, 1e-10, 200);

    bool decays = true;
    for (std::size_t k = 2; k < state.successive_diffs.size(); ++k) {
        if (state.successive_diffs[k - 1] < 1e-12) break;
        if (state.successive_diffs[k] / state.successive_diffs[k - 1] > 0.45)
            decays = false;
    }

    GridFunction zero(g);
    const Solution lin = solve(LinearProblem(order, 0.5, 0.0, zero, zero, 1.0, 0.0));
    const double match = max_norm(u - lin.u);

    bool refused = false;
    try {
        const NonlinearProblem bad(order, 1.0, [](double, double u) { return u; },
                                   1.0, 1.0, 1.0, 0.0);
        Grid gb(0.0, 1.0, 101);
        picard_solve(bad, gb, 1e-8, 50);
    } catch (const NotContractive&) {
        refused = true;
    }

    criterion(4, "Picard contraction (q=0.4)", decays && match <= 1e-5 && refused,
              "q=" + fmt(q) + ", linear match " + fmt(match) +
                  (decays ? ", ratios ok" : ", ratio violated") +
                  (refused ? ", q>=1 refused" : ", q>=1 NOT refused"));
}

// --- 5: Volterra oracle ---------------------------------------------------

double volterra_err(std::size_t n) {
    Grid g(0.0, 1.0, n);
    const GridFunction one = GridFunction::sample(g, [](double) { return 1.0; });
    const GridFunction y = volterra_solve({1.0, 0.0, one}, g);
    double err = 0.0;
    for (std::size_t k = 0; k < g.n; ++k)
        err = std::max(err, std::abs(y[k] - std::exp(-g.node(k))));
    return err;
}

void c5_volterra() {
    Grid g(0.0, 1.0, 4001);
    const GridFunction one = GridFunction::sample(g, [](double) { return 1.0; });
    const GridFunction y = volterra_solve({1.0, 0.0, one}, g);
    const double err_end = std::abs(y[g.n - 1] - 0.36787944117144233);
    const double ec = volterra_err(501), ef = volterra_err(1001);
    const bool ok = err_end <= 1e-5 && ec / ef >= 3.5;
    criterion(5, "Volterra exponential oracle", ok,
              "y(1) err " + fmt(err_end) + ", refinement ratio " + fmt(ec / ef));
}

// --- 6: mass-spring-damper residual ---------------------------------------

void c6_msd_residual() {
    const MSDParams params(1.0, 0.5, 4.0, 1.0, 0.5);
    Grid g(0.0, 5.0, 8001);
    const GridFunction F = GridFunction::sample(g, [](double t) { return std::sin(t); });
    const GridFunction x = solve_msd(params, F, 0.0);
    const GridFunction d2 = cf_d_2gamma(x, params.gamma);
    const GridFunction d1 = cf_d_gamma(x, params.gamma);
    double err = 0.0;
    for (std::size_t k = 0; k < g.n; ++k)
        err = std::max(err, std::abs(params.m / params.sigma2() * d2[k] +
                                     params.delta / params.sigma1() * d1[k] +
                                     params.k * x[k] - F[k]));
    criterion(6, "governing-equation residual of the oscillator",
              err <= 1e-3 * max_norm(F), "max err " + fmt(err));
}

// --- 7: classical limit of the oscillator ---------------------------------

void c7_classical_limit() {
    const MSDParams params(1.0, 0.5, 4.0, 1.0, 0.99);
    Grid g(0.0, 5.0, 8001);
    const GridFunction F = GridFunction::sample(g, [](double t) { return std::sin(t); });
    const GridFunction x = solve_msd(params, F, 0.0);
    const double v0 = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * g.h);

    // RK4 reference for x'' + 0.5 x' + 4 x = sin t
    GridFunction ref(g);
    double xx = 0.0, vv = v0;
    auto acc = [](double t, double xi, double vi) {
        return std::sin(t) - 0.5 * vi - 4.0 * xi;
    };
    ref[0] = xx;
    const double h = g.h;
    for (std::size_t i = 1; i < g.n; ++i) {
        const double t = g.node(i - 1);
        const double k1x = vv, k1v = acc(t, xx, vv);
        const double k2x = vv + 0.5 * h * k1v,
                     k2v = acc(t + 0.5 * h, xx + 0.5 * h * k1x, vv + 0.5 * h * k1v);
        const double k3x = vv + 0.5 * h * k2v,
                     k3v = acc(t + 0.5 * h, xx + 0.5 * h * k2x, vv + 0.5 * h * k2v);
        const double k4x = vv + h * k3v, k4v = acc(t + h, xx + h * k3x, vv + h * k3v);
        xx += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        vv += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        ref[i] = xx;
    }
    const double err = max_norm(x - ref);
    const double scale = max_norm(ref);
    criterion(7, "classical limit at gamma=0.99", err <= 0.05 * scale,
              "rel err " + fmt(err / scale));
}

// --- 8: expression parser ---------------------------------------------------

void c8_parser() {
    const std::vector<std::pair<std::string, std::string>> corpus = {
        {"t", "t"}, {"u", "u"}, {"42", "42"}, {"3.5", "3.5"},
        {"1e-3", "0.001"}, {"2.5E2", "250"}, {".5", "0.5"},
        {"t^2", "(t^2)"}, {"t^2^3", "(t^(2^3))"}, {"-t^2", "(-(t^2))"},
        {"2^-3", "(2^(-3))"}, {"-t", "(-t)"}, {"--t", "(-(-t))"},
        {"1+2*3", "(1+(2*3))"}, {"(1+2)*3", "((1+2)*3)"},
        {"1-2-3", "((1-2)-3)"}, {"6/3/2", "((6/3)/2)"},
        {"1+2-3", "((1+2)-3)"}, {"2*t/3", "((2*t)/3)"},
        {"sin(2*t) + 1", "(sin((2*t))+1)"}, {"sin(t)", "sin(t)"},
        {"cos(t)^2", "(cos(t)^2)"}, {"exp(-t)*t", "(exp((-t))*t)"},
        {"log(t+1)", "log((t+1))"}, {"sqrt(t^2+1)", "sqrt(((t^2)+1))"},
        {"2*u - t", "((2*u)-t)"}, {"u*sin(t)", "(u*sin(t))"},
        {" t + 1 ", "(t+1)"}, {"t*(u+1)/(t+2)", "((t*(u+1))/(t+2))"},
        {"-(t+u)^2", "(-((t+u)^2))"},
    };
    int bad_parse = 0;
    for (const auto& [src, expected] : corpus)
        if (to_string(parse(src)) != expected) ++bad_parse;

    const std::vector<std::string> dexprs = {
        "t^2", "t*exp(-t)", "sin(2*t) + cos(t)", "exp(t)*sin(t)", "log(t+2)",
        "sqrt(t^2+1)", "1/(t+2)", "t^3 - 2*t + 7", "u^2*t", "sin(u)*exp(-t)",
        "(t+u)^2", "u/(t+3)",
    };
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> pt(0.1, 2.0);
    int bad_diff = 0;
    const double h = 1e-5;
    for (const auto& src : dexprs) {
        const Expr e = parse(src);
        const Expr dt = differentiate(e, 't');
        const Expr du = differentiate(e, 'u');
        for (int i = 0; i < 10; ++i) {
            const double t = pt(rng), u = pt(rng);
            const double fd_t = (eval(e, t + h, u) - eval(e, t - h, u)) / (2.0 * h);
            const double fd_u = (eval(e, t, u + h) - eval(e, t, u - h)) / (2.0 * h);
            if (std::abs(eval(dt, t, u) - fd_t) > 1e-6) ++bad_diff;
            if (std::abs(eval(du, t, u) - fd_u) > 1e-6) ++bad_diff;
        }
    }

    bool fuzz_ok = true;
    std::mt19937 frng(98765);
    const std::string alphabet = "tu0123456789.+-*/^() sincoexplgqrt_abz";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(1, 64);
    for (int i = 0; i < 10000 && fuzz_ok; ++i) {
        std::string s;
        const int L = len(frng);
        for (int j = 0; j < L; ++j) s += alphabet[pick(frng)];
        try {
            (void)parse(s);
        } catch (const SyntaxError&) {
        } catch (const UnknownIdentifier&) {
        } catch (...) {
            fuzz_ok = false;
        }
    }

    criterion(8, "parser corpus, derivatives, fuzz",
              bad_parse == 0 && bad_diff == 0 && fuzz_ok,
              std::to_string(bad_parse) + " corpus misses, " +
                  std::to_string(bad_diff) + " derivative misses, fuzz " +
                  (fuzz_ok ? "clean" : "crashed"));
}

// --- 9: CLI determinism ------------------------------------------------------

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void c9_determinism() {
    const std::string cli = CFODE_CLI_PATH;
    const std::string flags =
        " solve-linear --alpha 0.5 --lambda -1 --t1 2 --n 2001"
        " --f \"t*exp(-t)\" --u0 0 --du0 1";
    const int r1 = std::system(
        (cli + flags + " --out acc_det_a.csv > acc_det_a.stdout 2>/dev/null").c_str());
    const int r2 = std::system(
        (cli + flags + " --out acc_det_b.csv > acc_det_b.stdout 2>/dev/null").c_str());
    const bool ran = WEXITSTATUS(r1) == 0 && WEXITSTATUS(r2) == 0;
    const bool csv_same = slurp("acc_det_a.csv") == slurp("acc_det_b.csv") &&
                          !slurp("acc_det_a.csv").empty();
    const bool json_same = slurp("acc_det_a.stdout") == slurp("acc_det_b.stdout") &&
                           !slurp("acc_det_a.stdout").empty();
    criterion(9, "byte-identical repeated CLI runs", ran && csv_same && json_same,
              std::string(ran ? "runs ok" : "runs failed") +
                  (csv_same ? ", csv identical" : ", csv differs") +
                  (json_same ? ", stdout identical" : ", stdout differs"));
}

}  // namespace

int main() {
    try {
        c1_operator_oracles();
        c2_case_i_identity();
        c3_residuals();
        c4_picard();
        c5_volterra();
        c6_msd_residual();
        c7_classical_limit();
        c8_parser();
        c9_determinism();
    } catch (const std::exception& e) {
        std::printf("unexpected exception: %s\n", e.what());
        return 1;
    }
    std::printf("%s\n", failures == 0 ? "all criteria passed"
                                      : "ACCEPTANCE FAILED");
    return failures == 0 ? 0 : 1;
}
