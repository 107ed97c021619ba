#pragma once

#include <boost/rational.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace bdfcert {

/// Exact coefficient arithmetic. All BDF/EP tables up to k = 7 fit comfortably in 64 bits.
using Rational = boost::rational<std::int64_t>;
using RationalVector = std::vector<Rational>;

inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

/// "n" for integers, "n/d" otherwise.
inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline std::vector<double> to_double(const RationalVector& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& r : v) out.push_back(to_double(r));
    return out;
}

}  // namespace bdfcert

namespace Eigen {

// Lets Eigen containers hold exact rationals for the block algebra of U and F.
// Only ring operations are used; no decompositions run on this scalar.
template <>
struct NumTraits<bdfcert::Rational> : GenericNumTraits<bdfcert::Rational> {
    using Real = bdfcert::Rational;
    using NonInteger = bdfcert::Rational;
    using Nested = bdfcert::Rational;
    using Literal = bdfcert::Rational;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 2,
        AddCost = 8,
        MulCost = 16
    };
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline int digits10() { return 18; }
};

}  // namespace Eigen

namespace bdfcert {

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

inline Eigen::MatrixXd to_double(const RationalMatrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
    return out;
}

}  // namespace bdfcert
