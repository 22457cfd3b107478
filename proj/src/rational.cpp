#include "sigsynth/rational.hpp"

#include <limits>
#include <string>

#include "sigsynth/error.hpp"

namespace sigsynth {

namespace {

nlohmann::ordered_json int_to_json(const BigInt& v)
{
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return v.convert_to<std::int64_t>();
    return v.str();
}

BigInt int_from_json(const nlohmann::json& j, const char* field)
{
    if (j.is_number_integer())
        return BigInt(j.get<std::int64_t>());
    if (j.is_number_unsigned())
        return BigInt(j.get<std::uint64_t>());
    if (j.is_string()) {
        try {
            return BigInt(j.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    throw ParseError(std::string("rational field '") + field + "' must be an integer");
}

} // namespace

Rational make_rational(std::int64_t num, std::int64_t den)
{
    if (den == 0)
        throw InvariantError("rational with zero denominator");
    return Rational(BigInt(num), BigInt(den));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

nlohmann::ordered_json rational_to_json(const Rational& r)
{
    nlohmann::ordered_json j;
    j["num"] = int_to_json(numerator(r));
    j["den"] = int_to_json(denominator(r));
    return j;
}

Rational rational_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw ParseError("rational must be an object with 'num' and 'den'");
    BigInt num = int_from_json(j.at("num"), "num");
    BigInt den = int_from_json(j.at("den"), "den");
    if (den == 0)
        throw ParseError("rational with zero denominator");
    return Rational(num, den);
}

std::int64_t quantize_scaled(const Rational& r, std::int64_t scale)
{
    // floor(r * scale + 1/2)
    const BigInt num = numerator(r) * scale * 2 + denominator(r);
    const BigInt den = denominator(r) * 2;
    BigInt q = num / den;
    if (num < 0 && q * den != num)
        q -= 1;
    if (q < 1)
        q = 1;
    if (q > std::numeric_limits<std::int64_t>::max())
        throw WeightOverflowError("quantized weight does not fit in 64 bits");
    return q.convert_to<std::int64_t>();
}

Rational parse_decimal(std::string_view text)
{
    const std::string s(text);
    std::size_t i = 0;
    bool negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-'))
        negative = s[i++] == '-';
    BigInt num = 0;
    BigInt den = 1;
    bool digits = false;
    bool point = false;
    for (; i < s.size(); ++i) {
        if (s[i] == '.' && !point) {
            point = true;
            continue;
        }
        if (s[i] < '0' || s[i] > '9')
            throw ParseError("not a decimal number: '" + s + "'");
        num = num * 10 + (s[i] - '0');
        if (point)
            den *= 10;
        digits = true;
    }
    if (!digits)
        throw ParseError("not a decimal number: '" + s + "'");
    return Rational(negative ? BigInt(-num) : num, den);
}

} // namespace sigsynth
