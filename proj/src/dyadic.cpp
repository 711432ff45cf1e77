#include "coalflow/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace coalflow {

Dyadic::Dyadic(mpz_class numerator, std::uint64_t exponent)
    : num_(std::move(numerator)), exp_(exponent) {
    canonicalize();
}

Dyadic Dyadic::from_ratio(long numerator, std::uint64_t exponent) {
    return Dyadic(mpz_class(numerator), exponent);
}

void Dyadic::canonicalize() {
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    if (exp_ == 0) return;
    auto twos = static_cast<std::uint64_t>(mpz_scan1(num_.get_mpz_t(), 0));
    auto shift = std::min(twos, exp_);
    if (shift > 0) {
        mpz_fdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), shift);
        exp_ -= shift;
    }
}

Dyadic Dyadic::operator-() const {
    Dyadic r = *this;
    r.num_ = -r.num_;
    return r;
}

Dyadic& Dyadic::operator+=(Dyadic const& rhs) {
    if (exp_ >= rhs.exp_) {
        mpz_class scaled;
        mpz_mul_2exp(scaled.get_mpz_t(), rhs.num_.get_mpz_t(), exp_ - rhs.exp_);
        num_ += scaled;
    } else {
        mpz_mul_2exp(num_.get_mpz_t(), num_.get_mpz_t(), rhs.exp_ - exp_);
        num_ += rhs.num_;
        exp_ = rhs.exp_;
    }
    canonicalize();
    return *this;
}

Dyadic& Dyadic::operator-=(Dyadic const& rhs) { return *this += -rhs; }

Dyadic& Dyadic::operator*=(Dyadic const& rhs) {
    num_ *= rhs.num_;
    exp_ += rhs.exp_;
    canonicalize();
    return *this;
}

Dyadic Dyadic::halved(std::uint64_t k) const {
    Dyadic r = *this;
    if (r.num_ != 0) r.exp_ += k;
    r.canonicalize();
    return r;
}

std::strong_ordering operator<=>(Dyadic const& a, Dyadic const& b) {
    mpz_class lhs = a.num_;
    mpz_class rhs = b.num_;
    if (a.exp_ < b.exp_) {
        mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), b.exp_ - a.exp_);
    } else {
        mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), a.exp_ - b.exp_);
    }
    int c = cmp(lhs, rhs);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

mpq_class Dyadic::to_rational() const {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, exp_);
    mpq_class q(num_, den);
    q.canonicalize();
    return q;
}

double Dyadic::to_double() const {
    if (num_ == 0) return 0.0;
    mpz_class mag = abs(num_);
    auto bits = static_cast<long>(mpz_sizeinbase(mag.get_mpz_t(), 2));
    long shift = 0;
    if (bits > 53) {
        // round half to even on the dropped low bits
        shift = bits - 53;
        mpz_class kept;
        mpz_fdiv_q_2exp(kept.get_mpz_t(), mag.get_mpz_t(), shift);
        mpz_class dropped = mag - (kept << shift);
        mpz_class half = mpz_class(1) << (shift - 1);
        int c = cmp(dropped, half);
        if (c > 0 || (c == 0 && mpz_odd_p(kept.get_mpz_t()))) kept += 1;
        mag = kept;
    }
    double v = std::ldexp(mag.get_d(), static_cast<int>(shift - static_cast<long>(exp_)));
    return num_ < 0 ? -v : v;
}

std::string Dyadic::to_string() const {
    return num_.get_str() + "/2^" + std::to_string(exp_);
}

Dyadic Dyadic::parse(std::string const& text) {
    auto slash = text.find("/2^");
    try {
        if (slash == std::string::npos) return Dyadic(mpz_class(text), 0);
        mpz_class num(text.substr(0, slash));
        auto exp_text = text.substr(slash + 3);
        std::size_t used = 0;
        auto e = std::stoull(exp_text, &used);
        if (used != exp_text.size()) throw std::invalid_argument(text);
        return Dyadic(std::move(num), e);
    } catch (std::exception const&) {
        throw std::invalid_argument("malformed dyadic '" + text + "'");
    }
}

}  // namespace coalflow
