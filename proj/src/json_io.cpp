#include "rlab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace rlab {

json complex_to_json(cplx v) { return json::array({v.real(), v.imag()}); }

cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw Error("expected [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

namespace {

json matrix_to_json(const MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXcd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw Error("expected a nonempty matrix");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols) throw Error("ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
    }
    return m;
}

json vector_to_json(const VectorXcd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
    return out;
}

VectorXcd vector_from_json(const json& j) {
    VectorXcd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] =
        complex_from_json(j[i]);
    return v;
}

json window_to_json(const std::vector<Monomial>& w) {
    json out = json::array();
    for (const auto& [a, b] : w) out.push_back(json::array({a, b}));
    return out;
}

std::vector<Monomial> window_from_json(const json& j) {
    std::vector<Monomial> w;
    for (const auto& e : j) w.emplace_back(e[0].get<int>(), e[1].get<int>());
    return w;
}

}  // namespace

json poly_to_json(const BivariatePolynomial& p) {
    return json{{"bidegree", {p.deg1(), p.deg2()}}, {"coeffs", matrix_to_json(p.coeffs())}};
}

BivariatePolynomial poly_from_json(const json& j) {
    const MatrixXcd c = matrix_from_json(j.at("coeffs"));
    if (j.contains("bidegree")) {
        const int m1 = j["bidegree"][0].get<int>(), m2 = j["bidegree"][1].get<int>();
        if (m1 + 1 != c.rows() || m2 + 1 != c.cols()) {
            throw Error("poly_from_json: bidegree does not match the coefficient grid");
        }
    }
    return BivariatePolynomial(c);
}

json sos_to_json(const SosDecomposition& dec) {
    return json{{"window2", window_to_json(dec.window2)}, {"G2", matrix_to_json(dec.G2)},
                {"window1", window_to_json(dec.window1)}, {"G1", matrix_to_json(dec.G1)},
                {"residual", dec.residual},               {"rank2", dec.rank2},
                {"rank1", dec.rank1}};
}

SosDecomposition sos_from_json(const json& j) {
    SosDecomposition dec;
    dec.window2 = window_from_json(j.at("window2"));
    dec.window1 = window_from_json(j.at("window1"));
    dec.G2 = j["G2"].empty() ? MatrixXcd(0, 0) : matrix_from_json(j["G2"]);
    dec.G1 = j["G1"].empty() ? MatrixXcd(0, 0) : matrix_from_json(j["G1"]);
    dec.residual = j.at("residual").get<double>();
    dec.rank2 = j.value("rank2", 0);
    dec.rank1 = j.value("rank1", 0);
    return dec;
}

json realization_to_json(const Realization& R) {
    json j{{"A", complex_to_json(R.A)},
           {"B", vector_to_json(R.B.transpose())},
           {"C", vector_to_json(R.C)},
           {"D", matrix_to_json(R.D)},
           {"split", {R.split1, R.split2}}};
    j["p"] = poly_to_json(R.phi.p);
    j["p_tilde"] = poly_to_json(R.phi.p_tilde);
    j["coisometry_defect"] = R.coisometry_defect;
    return j;
}

Realization realization_from_json(const json& j) {
    Realization R;
    R.A = complex_from_json(j.at("A"));
    const VectorXcd b = vector_from_json(j.at("B"));
    R.B = b.transpose();
    R.C = vector_from_json(j.at("C"));
    R.D = j["D"].empty() ? MatrixXcd(0, 0) : matrix_from_json(j["D"]);
    R.split1 = j.at("split")[0].get<int>();
    R.split2 = j.at("split")[1].get<int>();
    if (R.split1 + R.split2 != R.D.rows()) {
        throw Error("realization_from_json: split does not match D");
    }
    if (j.contains("p")) {
        R.phi.p = poly_from_json(j["p"]);
        R.phi.p_tilde = j.contains("p_tilde") ? poly_from_json(j["p_tilde"]) : reflect(R.phi.p);
    }
    R.coisometry_defect = j.value("coisometry_defect", 0.0);
    return R;
}

json nevanlinna_to_json(const NevanlinnaData& N) {
    json j{{"T11", complex_to_json(N.T11)},
           {"T12", vector_to_json(N.T12.transpose())},
           {"T21", vector_to_json(N.T21)},
           {"T22", matrix_to_json(N.T22)},
           {"split", {N.split1, N.split2}},
           {"selfadjoint_defect", N.selfadjoint_defect},
           {"t22_min_eig", N.t22_min_eig}};
    if (N.phi11) j["phi11"] = complex_to_json(*N.phi11);
    if (N.k1) j["k1"] = vector_to_json(*N.k1);
    return j;
}

NevanlinnaData nevanlinna_from_json(const json& j) {
    NevanlinnaData N;
    N.T11 = complex_from_json(j.at("T11"));
    N.T12 = vector_from_json(j.at("T12")).transpose();
    N.T21 = vector_from_json(j.at("T21"));
    N.T22 = j["T22"].empty() ? MatrixXcd(0, 0) : matrix_from_json(j["T22"]);
    N.split1 = j.at("split")[0].get<int>();
    N.split2 = j.at("split")[1].get<int>();
    N.selfadjoint_defect = j.value("selfadjoint_defect", 0.0);
    N.t22_min_eig = j.value("t22_min_eig", 0.0);
    if (j.contains("phi11")) N.phi11 = complex_from_json(j["phi11"]);
    if (j.contains("k1")) N.k1 = vector_from_json(j["k1"]);
    return N;
}

json scan_summary_to_json(const BoundaryScan& scan) {
    json singular = json::array();
    for (const auto& q : scan.singular) {
        singular.push_back({{"theta1", q.theta1}, {"theta2", q.theta2}});
    }
    return json{{"n_theta", scan.n_theta},
                {"exclusion_radius", scan.exclusion_radius},
                {"min_sigma_off_exclusion", scan.min_off_exclusion},
                {"singular_set", singular}};
}

std::string scan_to_csv(const BoundaryScan& scan) {
    std::ostringstream os;
    os.precision(17);
    os << "theta1,theta2,sigma_min,excluded\n";
    for (int a = 0; a < scan.n_theta; ++a) {
        for (int b = 0; b < scan.n_theta; ++b) {
            os << scan.theta(a) << ',' << scan.theta(b) << ',' << scan.sigma_min(a, b) << ','
               << int(scan.excluded(a, b)) << '\n';
        }
    }
    return os.str();
}

json monotonicity_report_to_json(const MonotonicityReport& rep) {
    json records = json::array();
    for (const auto& r : rep.records) {
        records.push_back({{"n", r.n}, {"seed", r.seed}, {"min_eig", r.min_eig}});
    }
    return json{{"summary",
                 {{"trials", rep.trials},
                  {"failures", rep.failures},
                  {"global_min_eig", rep.global_min_eig},
                  {"crosschecks", rep.crosschecks},
                  {"crosscheck_max_diff", rep.crosscheck_max_diff}}},
                {"records", records}};
}

std::string monotonicity_report_to_csv(const MonotonicityReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "trial,n,seed,min_eig\n";
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        os << i << ',' << rep.records[i].n << ',' << rep.records[i].seed << ','
           << rep.records[i].min_eig << '\n';
    }
    return os.str();
}

json perspective_to_json(const PerspectiveRep& P) {
    json ys = json::array();
    for (const auto& Y : P.Ys) ys.push_back(matrix_to_json(Y));
    return json{{"Ys", ys}, {"nu", vector_to_json(P.nu)}};
}

PerspectiveRep perspective_from_json(const json& j) {
    PerspectiveRep P;
    for (const auto& y : j.at("Ys")) P.Ys.push_back(matrix_from_json(y));
    P.nu = vector_from_json(j.at("nu"));
    P.validate();
    return P;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return json::parse(in);  // parse_error carries the byte offset
}

void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace rlab
