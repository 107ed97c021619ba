#include "bdfcert/scheme_coeffs.hpp"

#include "bdfcert/error.hpp"


#include <sstream>

namespace bdfcert {

namespace {

std::int64_t binomial(int n, int r) {
    std::int64_t out = 1;
    for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
    return out;
}

Rational sum(const RationalVector& v) {
    Rational s(0);
    for (const auto& x : v) s += x;
    return s;
}

Rational abs(const Rational& r) {
    return r < Rational(0) ? -r : r;
}

SchemeTable build(int k) {
    SchemeTable t;
    t.k = k;

    // rho(E^{-1}) = sum_{j=1}^k (1/j) (1 - E^{-1})^j, expanded in powers of the backward shift.
    t.A.assign(k + 1, Rational(0));
    for (int j = 1; j <= k; ++j) {
        for (int i = 0; i <= j; ++i) {
            const std::int64_t sign = (i % 2 == 0) ? 1 : -1;
            t.A[i] += Rational(sign * binomial(j, i), j);
        }
    }
    t.a = delta_form(t.A);

    t.B.resize(k);
    for (int i = 1; i <= k; ++i) {
        const std::int64_t sign = (i % 2 == 1) ? 1 : -1;
        t.B[i - 1] = Rational(sign * binomial(k, i));
    }
    t.b = extrapolation_delta_form(t.B);

    t.c.assign(k, Rational(0));
    for (int i = k - 1; i >= 1; --i) t.c[i - 1] = t.c[i] + abs(t.b[i - 1]) / 2;

    validate(t);
    return t;
}

}  // namespace

SchemeTable scheme_table(int k) {
    if (k < kMinOrder || k > kMaxOrder)
        throw Error(ErrorCode::order_out_of_range,
                    "scheme order " + std::to_string(k) + " outside [2, 7]");
    return build(k);
}

SchemeTable startup_table(int k) {
    if (k < 1 || k > kMaxOrder)
        throw Error(ErrorCode::order_out_of_range,
                    "start-up order " + std::to_string(k) + " outside [1, 7]");
    return build(k);
}

RationalVector delta_form(const RationalVector& A) {
    if (A.size() < 2)
        throw Error(ErrorCode::dimension_mismatch, "standard form needs at least two coefficients");
    if (sum(A) != Rational(0))
        throw Error(ErrorCode::inconsistent_input,
                    "standard coefficients sum to " + to_string(sum(A)) + ", expected 0");
    RationalVector a(A.size() - 1);
    Rational running(0);
    for (std::size_t i = 0; i + 1 < A.size(); ++i) {
        running += A[i];
        a[i] = running;
    }
    if (sum(a) != Rational(1))
        throw Error(ErrorCode::inconsistent_input,
                    "difference coefficients sum to " + to_string(sum(a)) + ", expected 1");
    return a;
}

RationalVector standard_form(const RationalVector& a) {
    if (a.empty()) throw Error(ErrorCode::dimension_mismatch, "empty difference form");
    RationalVector A(a.size() + 1);
    A[0] = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) A[i] = a[i] - a[i - 1];
    A.back() = -a.back();
    return A;
}

RationalVector extrapolation_delta_form(const RationalVector& B) {
    if (B.empty()) throw Error(ErrorCode::dimension_mismatch, "empty extrapolation form");
    const std::size_t k = B.size();
    RationalVector b(k - 1, Rational(0));
    for (std::size_t m = 1; m < k; ++m) {
        Rational tail(0);
        for (std::size_t i = m + 1; i <= k; ++i) tail += B[i - 1];
        b[m - 1] = -tail;
    }
    return b;
}

void validate(const SchemeTable& t) {
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::inconsistent_input, "BDF" + std::to_string(t.k) + " table: " + what);
    };
    const auto k = static_cast<std::size_t>(t.k);
    if (t.A.size() != k + 1 || t.a.size() != k || t.B.size() != k || t.b.size() + 1 != k ||
        t.c.size() != k)
        fail("family lengths inconsistent with k");
    if (sum(t.A) != Rational(0)) fail("sum A_i != 0");
    if (sum(t.a) != Rational(1)) fail("sum a_i != 1");
    if (sum(t.B) != Rational(1)) fail("sum B_i != 1");
    if (!(t.a[0] == t.A[0] && t.A[0] > Rational(0))) fail("a_0 must equal A_0 > 0");
    if (t.c.back() != Rational(0)) fail("c_k must be 0");
    for (std::size_t i = 1; i < k; ++i)
        if (t.c[i] > t.c[i - 1]) fail("c is not non-increasing");
    if (standard_form(t.a) != t.A) fail("difference form does not invert");
}

CoeffForm parse_coeff_form(const std::string& name) {
    if (name == "all") return CoeffForm::all;
    if (name == "std") return CoeffForm::standard;
    if (name == "delta") return CoeffForm::delta;
    if (name == "ep") return CoeffForm::extrapolation;
    throw Error(ErrorCode::invalid_config, "unknown coefficient form '" + name + "'");
}

std::string coeffs_csv(const SchemeTable& t, CoeffForm form) {
    std::ostringstream out;
    out << "k,family,index,value\n";
    auto emit = [&](const char* family, const RationalVector& v, int first_index) {
        for (std::size_t i = 0; i < v.size(); ++i)
            out << t.k << ',' << family << ',' << (first_index + static_cast<int>(i)) << ','
                << to_string(v[i]) << '\n';
    };
    const bool all = form == CoeffForm::all;
    if (all || form == CoeffForm::standard) emit("A", t.A, 0);
    if (all || form == CoeffForm::delta) {
        emit("a", t.a, 0);
        emit("b", t.b, 1);
        emit("c", t.c, 1);
    }
    if (all || form == CoeffForm::standard || form == CoeffForm::extrapolation) emit("B", t.B, 1);
    if (form == CoeffForm::extrapolation) emit("b", t.b, 1);
    return out.str();
}

}  // namespace bdfcert
