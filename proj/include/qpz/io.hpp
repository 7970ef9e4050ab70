#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "qpz/common.hpp"
#include "qpz/divisor.hpp"
#include "qpz/factorizer.hpp"
#include "qpz/generators.hpp"
#include "qpz/period_engine.hpp"
#include "qpz/quasipoly.hpp"
#include "qpz/zero_finder.hpp"

namespace qpz {

using Json = nlohmann::ordered_json;

/// Reads and parses a JSON file. Missing files raise InvalidArgument naming
/// the path; syntax errors raise ParseError with the line number.
Json read_json_file(const std::string& path);
Json parse_json_text(std::string_view text, const std::string& origin);
void write_text_file(const std::string& path, const std::string& text);

/// "re_min,re_max,im_min,im_max".
StripWindow parse_window_spec(std::string_view spec);

// Readers report the JSON path of the offending field, e.g. terms[1].lambda.
StripWindow window_from_json(const Json& j, const std::string& path = "window");
Quasipolynomial qp_from_json(const Json& j, const std::string& path = "");
PeriodicProductForm form_from_json(const Json& j, const std::string& path = "");
ZeroList zeros_from_json(const Json& j, const std::string& path = "");
Divisor divisor_from_json(const Json& j, const std::string& path = "");
PeriodCertificate certificate_from_json(const Json& j, const std::string& path = "");
PeriodicFactor factor_from_json(const Json& j, const std::string& path = "");

Json to_json(const StripWindow& w);
Json to_json(const Quasipolynomial& qp);
Json to_json(const PeriodicProductForm& f);
Json to_json(const ZeroList& zl);
Json to_json(const Divisor& d);
Json to_json(const AlmostPeriodReport& r);
Json to_json(const PeriodCertificate& c);
Json to_json(const Decomposition& d);
Json to_json(const Commensurability& c);
Json to_json(const PeriodicFactor& f);
Json to_json(const QuotientCertificate& q);
Json to_json(const FitResult& f);
Json to_json(const KroneckerResult& k);

/// Finite doubles as numbers, infinities and NaN as null.
Json num(double x);

}  // namespace qpz
