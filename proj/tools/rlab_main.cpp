// realization-lab command line: analyze / realize / transform / boundary / monotone
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>

#include "rlab/json_io.hpp"

namespace {

using namespace rlab;

struct CommonArgs {
    int grid_n = 64;
    int ntheta = 256;
    double sos_tol = 1e-9;
    int sos_iters = 20000;
    int trials = 200;
    int nmax = 5;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    int verbosity = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--grid-n", a.grid_n, "quadrature / stability grid size");
    cmd->add_option("--ntheta", a.ntheta, "boundary scan angles per direction");
    cmd->add_option("--sos-tol", a.sos_tol, "SOS solver tolerance");
    cmd->add_option("--sos-iters", a.sos_iters, "SOS solver iteration cap");
    cmd->add_option("--trials", a.trials, "monotonicity trials");
    cmd->add_option("--nmax", a.nmax, "max matrix size in trials");
    cmd->add_option("--seed", a.seed, "RNG seed")->each([&a](const std::string&) {
        a.seed_set = true;
    });
    cmd->add_option("--out", a.out, "output path (JSON); CSV siblings derive from it");
    cmd->add_flag("-v", a.verbosity, "verbosity");
}

std::string sibling(const std::string& out, const std::string& suffix) {
    std::filesystem::path p(out);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

void emit(const CommonArgs& a, const json& j) {
    if (a.out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        save_json(a.out, j);
    }
}

Realization realize_pipeline(const BivariatePolynomial& p, const CommonArgs& a, json* diag) {
    RationalInnerFunction phi = inner_from_stable(p, {a.grid_n, 1e-9, true, 256});
    SolveSosOptions sopts;
    sopts.max_iter = a.sos_iters;
    sopts.tol = a.sos_tol;
    const SosDecomposition dec = solve_sos(phi, sopts);
    Realization R = build_realization(phi, dec);
    if (diag) {
        (*diag)["sos_residual"] = dec.residual;
        (*diag)["rank2"] = dec.rank2;
        (*diag)["rank1"] = dec.rank1;
        (*diag)["model_residual"] = model_residual(phi, dec, 500);
        (*diag)["gram_defect"] = R.basis->gram_defect;
        (*diag)["coisometry_defect"] = R.coisometry_defect;
        (*diag)["lsq_build_agreement"] = lsq_build_agreement(R);
        double dworst = 0.0;
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int i = 0; i < 100; ++i) {
            const cplx w1 = std::polar(0.9 * std::sqrt(unif(rng)), 2 * kPi * unif(rng));
            const cplx w2 = std::polar(0.9 * std::sqrt(unif(rng)), 2 * kPi * unif(rng));
            dworst = std::max(dworst, dshift_residual(R, w1, w2));
        }
        (*diag)["dshift_residual_max"] = dworst;
        (*diag)["quadrature"] = R.adaptive_quadrature ? json("adaptive") : json(R.quad_N);
    }
    return R;
}

int cmd_analyze(const std::string& input, const CommonArgs& a) {
    const BivariatePolynomial p = poly_from_json(load_json(input));
    json out;
    out["bidegree"] = {p.deg1(), p.deg2()};
    const StabilityVerdict v = is_stable(p, a.grid_n);
    switch (v.kind) {
        case StabilityVerdict::Kind::Stable:
            out["stable"] = "stable";
            break;
        case StabilityVerdict::Kind::UnstableWitness:
            out["stable"] = "unstable";
            out["witness"] = {complex_to_json(v.witness[0]), complex_to_json(v.witness[1])};
            out["detail"] = v.detail;
            break;
        case StabilityVerdict::Kind::Inconclusive:
            out["stable"] = "inconclusive";
            out["detail"] = v.detail;
            break;
    }
    out["reflection"] = poly_to_json(reflect(p));
    json sing = json::array();
    for (const auto& q : singular_set(p, a.ntheta)) {
        sing.push_back({{"theta1", q.theta1}, {"theta2", q.theta2}});
    }
    out["singular_set"] = sing;
    emit(a, out);
    return v.kind == StabilityVerdict::Kind::Stable ? 0 : 1;
}

int cmd_realize(const std::string& input, const CommonArgs& a) {
    const BivariatePolynomial p = poly_from_json(load_json(input));
    json diag;
    const Realization R = realize_pipeline(p, a, &diag);
    json out = realization_to_json(R);
    out["diagnostics"] = diag;
    emit(a, out);
    return 0;
}

int cmd_transform(const std::string& input, const std::string& target, const CommonArgs& a) {
    const Realization R = realization_from_json(load_json(input));
    if (target == "nevanlinna") {
        const NevanlinnaData N = herglotz_to_nevanlinna(R);
        json out = nevanlinna_to_json(N);
        if (N.phi11 && N.k1) {
            const ClosedBlocks cb = nevanlinna_closed_blocks(R, *N.k1);
            double agree = std::abs(cb.T11 - N.T11);
            if (N.dim() > 0) {
                agree = std::max(agree, (cb.T12 - N.T12).cwiseAbs().maxCoeff());
                agree = std::max(agree, (cb.T21 - N.T21).cwiseAbs().maxCoeff());
            }
            out["closed_block_agreement"] = agree;
        }
        emit(a, out);
        return 0;
    }
    if (target == "herglotz-sample") {
        std::ostringstream os;
        os.precision(17);
        os << "z1_re,z1_im,z2_re,z2_im,theta_re,theta_im\n";
        for (double r : {0.2, 0.5, 0.8, 0.95}) {
            for (int k = 0; k < 16; ++k) {
                const cplx z1 = std::polar(r, 2 * kPi * k / 16.0);
                const cplx z2 = std::polar(r, 2 * kPi * ((k + 5) % 16) / 16.0);
                const cplx th = schur_to_herglotz(R, z1, z2);
                os << z1.real() << ',' << z1.imag() << ',' << z2.real() << ',' << z2.imag()
                   << ',' << th.real() << ',' << th.imag() << '\n';
            }
        }
        if (a.out.empty()) {
            std::cout << os.str();
        } else {
            save_text(a.out, os.str());
        }
        return 0;
    }
    throw Error("unknown transform target: " + target + " (use herglotz-sample | nevanlinna)");
}

int cmd_boundary(const std::string& input, const CommonArgs& a) {
    const Realization R = realization_from_json(load_json(input));
    const BoundaryScan scan = invertibility_scan(R, a.ntheta);
    json summary = scan_summary_to_json(scan);

    // spot continuation values along the diagonal, skipping exclusion disks
    double worst_mod = 0.0;
    int checked = 0;
    for (int k = 0; k < 16; ++k) {
        const double t = 2 * kPi * (k + 0.5) / 16.0;
        bool excl = false;
        for (const auto& q : scan.singular) {
            if (std::hypot(std::remainder(t - q.theta1, 2 * kPi),
                           std::remainder(t - q.theta2, 2 * kPi)) < scan.exclusion_radius) {
                excl = true;
            }
        }
        if (excl) continue;
        const cplx v = boundary_continuation(R, std::polar(1.0, t), std::polar(1.0, t));
        worst_mod = std::max(worst_mod, std::abs(std::abs(v) - 1.0));
        ++checked;
    }
    summary["continuation_points_checked"] = checked;
    summary["continuation_max_modulus_defect"] = worst_mod;

    const std::string out = a.out.empty() ? "scan.json" : a.out;
    save_json(out, summary);
    save_text(sibling(out, ".csv"), scan_to_csv(scan));
    if (a.verbosity > 0) std::cout << summary.dump(2) << '\n';
    return scan.min_off_exclusion > 1e-3 ? 0 : 1;
}

int cmd_monotone(const std::string& input, const CommonArgs& a, double box_lo, double box_hi,
                 double gap) {
    if (!a.seed_set) throw Error("monotone: --seed is mandatory for stochastic commands");
    const json j = load_json(input);
    MonotonicityOptions mopts;
    mopts.trials = a.trials;
    mopts.n_max = a.nmax;
    mopts.box = {box_lo, box_hi};
    mopts.gap = gap;
    mopts.seed = a.seed;

    MonotonicityReport rep;
    if (j.contains("Ys")) {
        const PerspectiveRep P = perspective_from_json(j);
        ScalarFn f = [&P](const VectorXd& x) {
            std::vector<cplx> z(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) z[i] = x[i];
            return perspective_eval(P, z).real();
        };
        MatrixFn lift = [&P](const std::vector<MatrixXcd>& Z) {
            return perspective_eval_matrix(P, Z);
        };
        rep = monotonicity_test(f, P.d(), mopts, lift);
    } else {
        const Realization R = realization_from_json(j);
        const RectCheck rc = check_rectangle(R, mopts.box);
        if (!rc.admissible) {
            std::ostringstream os;
            os << "monotone: rectangle [" << box_lo << ", " << box_hi
               << "]^2 is not admissible (min |phi - 1| = " << rc.min_abs_phi_minus_one
               << ", min sigma = " << rc.min_sigma << ")";
            throw Error(os.str());
        }
        const PickEvaluator f = pick_from_inner(R);
        ScalarFn fs = [&f](const VectorXd& x) { return f.eval_real(x[0], x[1]); };
        MatrixFn lift = [&R](const std::vector<MatrixXcd>& Z) {
            return evaluate_pick_matrix_schur(R, Z[0], Z[1]);
        };
        rep = monotonicity_test(fs, 2, mopts, lift);
    }

    json out = monotonicity_report_to_json(rep);
    if (a.out.empty()) {
        std::cout << out.dump(2) << '\n';
    } else {
        save_json(a.out, out);
        save_text(sibling(a.out, ".csv"), monotonicity_report_to_csv(rep));
    }
    return rep.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"realization-lab: transfer-function realizations of rational inner functions"};
    app.require_subcommand(1);

    CommonArgs a;
    std::string input, target = "nevanlinna";
    double box_lo = 1.0, box_hi = 2.0, gap = 0.02;

    auto* analyze = app.add_subcommand("analyze", "stability, reflection and singular set");
    analyze->add_option("input", input, "polynomial JSON")->required();
    add_common(analyze, a);

    auto* realize = app.add_subcommand("realize", "canonical coisometric realization");
    realize->add_option("input", input, "polynomial JSON")->required();
    add_common(realize, a);

    auto* transform = app.add_subcommand("transform", "Schur-Herglotz-Nevanlinna conversions");
    transform->add_option("input", input, "realization JSON")->required();
    transform->add_option("--target", target, "herglotz-sample | nevanlinna");
    add_common(transform, a);

    auto* boundary = app.add_subcommand("boundary", "invertibility scan of 1 - E_tau D");
    boundary->add_option("input", input, "realization JSON")->required();
    add_common(boundary, a);

    auto* monotone = app.add_subcommand("monotone", "matrix monotonicity trials");
    monotone->add_option("input", input, "realization or perspective JSON")->required();
    monotone->add_option("--box-lo", box_lo, "rectangle lower edge");
    monotone->add_option("--box-hi", box_hi, "rectangle upper edge");
    monotone->add_option("--gap", gap, "spectral gap between A and B draws");
    add_common(monotone, a);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(input, a);
        if (realize->parsed()) return cmd_realize(input, a);
        if (transform->parsed()) return cmd_transform(input, target, a);
        if (boundary->parsed()) return cmd_boundary(input, a);
        if (monotone->parsed()) return cmd_monotone(input, a, box_lo, box_hi, gap);
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';  // includes the byte offset
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
