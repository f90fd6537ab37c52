#ifndef STRATAFILL_INTEGER_HPP
#define STRATAFILL_INTEGER_HPP

#include <boost/multiprecision/cpp_int.hpp>

namespace stratafill {

// Chain coefficients and matrix entries are arbitrary-precision integers;
// exactness of the boundary identities and of Smith reduction depends on it.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer gcd(const Integer& a, const Integer& b) {
    return boost::multiprecision::gcd(a, b);
}

inline Integer abs(const Integer& a) { return boost::multiprecision::abs(a); }

}  // namespace stratafill

#endif
