#ifndef RLAB_JSON_IO_HPP
#define RLAB_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "rlab/boundary.hpp"
#include "rlab/monotonicity.hpp"
#include "rlab/transforms.hpp"

namespace rlab {

using json = nlohmann::json;

json complex_to_json(cplx v);
cplx complex_from_json(const json& j);

// {"bidegree":[m1,m2],"coeffs":[[[re,im],...],...]}, coeffs[i][j] on z1^i z2^j
json poly_to_json(const BivariatePolynomial& p);
BivariatePolynomial poly_from_json(const json& j);

json sos_to_json(const SosDecomposition& dec);
SosDecomposition sos_from_json(const json& j);

// {"A":[re,im],"B":[...],"C":[...],"D":[[...]],"split":[m1,m2]} plus the
// generating polynomials so downstream commands can re-derive phi
json realization_to_json(const Realization& R);
Realization realization_from_json(const json& j);

json nevanlinna_to_json(const NevanlinnaData& N);
NevanlinnaData nevanlinna_from_json(const json& j);

json scan_summary_to_json(const BoundaryScan& scan);
std::string scan_to_csv(const BoundaryScan& scan);

json monotonicity_report_to_json(const MonotonicityReport& rep);
std::string monotonicity_report_to_csv(const MonotonicityReport& rep);

json perspective_to_json(const PerspectiveRep& P);
PerspectiveRep perspective_from_json(const json& j);

// file helpers; writes are atomic-ish (write then rename not needed here)
json load_json(const std::string& path);
void save_json(const std::string& path, const json& j);
void save_text(const std::string& path, const std::string& text);

}  // namespace rlab

#endif
