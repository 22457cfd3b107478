#pragma once

#include <cstdint>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

namespace sigsynth {

/// Exact rational used for suspiciousness weights and scores.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

Rational make_rational(std::int64_t num, std::int64_t den);

double to_double(const Rational& r);

/// {"num": n, "den": d}. Components that do not fit in int64 are written as decimal strings.
nlohmann::ordered_json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

/// round(r * scale) with halves rounded up, clamped below at 1. Throws WeightOverflowError
/// when the result does not fit in int64.
std::int64_t quantize_scaled(const Rational& r, std::int64_t scale);

/// Exact value of a plain decimal literal such as "0.4927"; throws ParseError otherwise.
Rational parse_decimal(std::string_view text);

} // namespace sigsynth
