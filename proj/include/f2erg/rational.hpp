#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace f2erg {

using Rational = mpq_class;

// Accepts "p/q" or "p" (optionally signed); throws DomainError otherwise.
Rational parse_rational(std::string_view text);

// Canonical "p/q" form; integers render without a denominator.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

// 3^k as an exact rational (k may be negative).
Rational pow3(long k);

}  // namespace f2erg
