#pragma once

#include "bdfcert/rational.hpp"

#include <string>

namespace bdfcert {

/// Coefficient families of the extrapolated BDFk scheme for one order k.
///
/// Standard form:   sum_{i=0}^{k} A_i u^{n+1-i},   extrapolation sum_{i=1}^{k} B_i u^{n+1-i}
/// Difference form: sum_{i=0}^{k-1} a_i du^{n+1-i}, extrapolation u^n + sum_{i=1}^{k-1} b_i du^{n+1-i}
/// with du^j = u^j - u^{j-1}. Vectors are stored zero-based: b[0] is b_1, B[0] is B_1, c[0] is c_1.
struct SchemeTable {
    int k = 0;
    RationalVector A;  // A_0..A_k
    RationalVector a;  // a_0..a_{k-1}
    RationalVector b;  // b_1..b_{k-1}
    RationalVector B;  // B_1..B_k
    RationalVector c;  // c_1..c_k, c_k = 0

    Rational A0() const { return A.front(); }
    Rational c1() const { return c.front(); }
};

inline constexpr int kMinOrder = 2;
inline constexpr int kMaxOrder = 7;

/// Exact tables for 2 <= k <= 7. Throws ErrorCode::order_out_of_range otherwise.
SchemeTable scheme_table(int k);

/// Same construction but admits k = 1 (backward Euler / constant extrapolation),
/// which the solver's order-escalation start-up needs.
SchemeTable startup_table(int k);

/// a_i = sum_{j<=i} A_j. Requires sum A_i = 0 (ErrorCode::inconsistent_input).
RationalVector delta_form(const RationalVector& A);

/// Inverse of delta_form: A_0 = a_0, A_i = a_i - a_{i-1}, A_k = -a_{k-1}.
RationalVector standard_form(const RationalVector& a);

/// b_m = -sum_{i>m} B_i, i.e. the coefficients with sum B_i u^{n+1-i} = u^n + sum b_m du^{n+1-m}.
RationalVector extrapolation_delta_form(const RationalVector& B);

/// Throws ErrorCode::inconsistent_input when any table invariant fails.
void validate(const SchemeTable& table);

enum class CoeffForm { all, standard, delta, extrapolation };

CoeffForm parse_coeff_form(const std::string& name);

/// CSV with header "k,family,index,value"; values are exact rational strings.
std::string coeffs_csv(const SchemeTable& table, CoeffForm form);

}  // namespace bdfcert
