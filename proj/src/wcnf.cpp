#include "sigsynth/wcnf.hpp"

#include <cstdlib>
#include <limits>
#include <sstream>

#include "sigsynth/error.hpp"
#include "sigsynth/iccg.hpp"

namespace sigsynth {

namespace {

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    if (a > kMax - b)
        throw WeightOverflowError("flattened WCNF weights exceed 64 bits");
    return a + b;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    if (a != 0 && b > kMax / a)
        throw WeightOverflowError("flattened WCNF weights exceed 64 bits");
    return a * b;
}

void write_clause(std::ostringstream& out, std::int64_t weight, const Clause& c)
{
    out << weight;
    for (int lit : c)
        out << ' ' << lit;
    out << " 0\n";
}

} // namespace

std::size_t WcnfProblem::soft_count() const
{
    std::size_t n = 0;
    for (const auto& t : tiers)
        n += t.size();
    return n;
}

std::int64_t WcnfProblem::tier_total(std::size_t tier) const
{
    std::int64_t total = 0;
    for (const auto& s : tiers.at(tier))
        total = checked_add(total, s.weight);
    return total;
}

void validate(const WcnfProblem& p)
{
    auto check = [&](const Clause& c) {
        for (int lit : c)
            if (lit == 0 || std::abs(lit) > p.num_vars)
                throw InvariantError("literal " + std::to_string(lit) + " references an undeclared variable");
    };
    for (const auto& c : p.hard)
        check(c);
    for (const auto& tier : p.tiers)
        for (const auto& s : tier) {
            check(s.clause);
            if (s.weight <= 0)
                throw InvariantError("soft clause weight must be positive");
        }
}

std::vector<std::int64_t> tier_multipliers(const WcnfProblem& p)
{
    std::vector<std::int64_t> mult(p.tiers.size(), 1);
    std::int64_t lower = 0;  // flattened weight of all tiers below the current one
    for (std::size_t t = p.tiers.size(); t-- > 0;) {
        mult[t] = checked_add(lower, 1);
        lower = checked_add(lower, checked_mul(p.tier_total(t), mult[t]));
    }
    return mult;
}

WcnfProblem flatten(const WcnfProblem& p)
{
    const auto mult = tier_multipliers(p);
    WcnfProblem out;
    out.num_vars = p.num_vars;
    out.hard = p.hard;
    out.tiers.emplace_back();
    for (std::size_t t = 0; t < p.tiers.size(); ++t)
        for (const auto& s : p.tiers[t])
            out.tiers[0].push_back({s.clause, checked_mul(s.weight, mult[t])});
    return out;
}

std::int64_t top_weight(const WcnfProblem& p)
{
    const WcnfProblem flat = flatten(p);
    return checked_add(flat.tiers.empty() ? 0 : flat.tier_total(0), 1);
}

std::string to_wcnf(const WcnfProblem& p)
{
    validate(p);
    const WcnfProblem flat = flatten(p);
    const std::int64_t top = top_weight(p);
    std::ostringstream out;
    out << "p wcnf " << p.num_vars << ' ' << (p.hard.size() + p.soft_count()) << ' ' << top << '\n';
    for (const auto& c : flat.hard)
        write_clause(out, top, c);
    for (const auto& s : flat.tiers[0])
        write_clause(out, s.weight, s.clause);
    return out.str();
}

void export_wcnf(const WcnfProblem& p, const std::filesystem::path& path)
{
    write_text_file(path, to_wcnf(p));
}

WcnfProblem parse_wcnf(std::string_view text)
{
    WcnfProblem p;
    p.tiers.emplace_back();
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false;
    std::int64_t top = kMax;
    std::size_t declared = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first[0] == 'c')
            continue;
        if (first == "p") {
            std::string fmt;
            long long vars = 0;
            long long count = 0;
            if (!(ls >> fmt >> vars >> count) || fmt != "wcnf" || vars < 0 || count < 0)
                throw ParseError("line " + std::to_string(line_no) + ": malformed 'p wcnf' header");
            long long t = 0;
            if (ls >> t)
                top = t;
            p.num_vars = static_cast<int>(vars);
            declared = static_cast<std::size_t>(count);
            header = true;
            continue;
        }
        if (!header)
            throw ParseError("line " + std::to_string(line_no) + ": clause before 'p wcnf' header");
        std::int64_t weight = 0;
        try {
            weight = std::stoll(first);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_no) + ": bad clause weight '" + first + "'");
        }
        Clause c;
        long long lit = 0;
        bool terminated = false;
        while (ls >> lit) {
            if (lit == 0) {
                terminated = true;
                break;
            }
            if (std::llabs(lit) > p.num_vars)
                throw ParseError("line " + std::to_string(line_no) + ": literal " + std::to_string(lit) +
                                 " exceeds declared variable count");
            c.push_back(static_cast<int>(lit));
        }
        if (!terminated)
            throw ParseError("line " + std::to_string(line_no) + ": clause not terminated by 0");
        if (weight >= top)
            p.hard.push_back(std::move(c));
        else if (weight > 0)
            p.tiers[0].push_back({std::move(c), weight});
        else
            throw ParseError("line " + std::to_string(line_no) + ": non-positive soft weight");
    }
    if (!header)
        throw ParseError("missing 'p wcnf' header");
    if (p.hard.size() + p.tiers[0].size() != declared)
        throw ParseError("header declares " + std::to_string(declared) + " clauses, found " +
                         std::to_string(p.hard.size() + p.tiers[0].size()));
    return p;
}

WcnfProblem load_wcnf(const std::filesystem::path& path)
{
    try {
        return parse_wcnf(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace sigsynth
