#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace coalflow {

/// Exact rational with a power-of-two denominator, value = numerator / 2^exponent.
///
/// Canonical form: the exponent is zero or the numerator is odd. Zero is
/// always stored as 0/2^0. Every arithmetic operation returns a canonical
/// value, so structural equality is value equality.
class Dyadic {
  public:
    Dyadic() = default;
    Dyadic(long value) : num_(value) {}  // NOLINT(google-explicit-constructor)
    explicit Dyadic(mpz_class numerator, std::uint64_t exponent = 0);

    /// numerator / 2^exponent for a machine-sized numerator.
    static Dyadic from_ratio(long numerator, std::uint64_t exponent);

    mpz_class const& numerator() const { return num_; }
    std::uint64_t exponent() const { return exp_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return sgn(num_); }

    Dyadic operator-() const;
    Dyadic& operator+=(Dyadic const& rhs);
    Dyadic& operator-=(Dyadic const& rhs);
    Dyadic& operator*=(Dyadic const& rhs);

    friend Dyadic operator+(Dyadic lhs, Dyadic const& rhs) { return lhs += rhs; }
    friend Dyadic operator-(Dyadic lhs, Dyadic const& rhs) { return lhs -= rhs; }
    friend Dyadic operator*(Dyadic lhs, Dyadic const& rhs) { return lhs *= rhs; }

    /// Exact division by 2^k.
    Dyadic halved(std::uint64_t k = 1) const;

    friend bool operator==(Dyadic const& a, Dyadic const& b) {
        return a.exp_ == b.exp_ && a.num_ == b.num_;
    }
    friend std::strong_ordering operator<=>(Dyadic const& a, Dyadic const& b);

    mpq_class to_rational() const;
    /// Round-to-nearest conversion, for reporting.
    double to_double() const;
    /// "num/2^e", e.g. "-1/2^1" or "3/2^3".
    std::string to_string() const;
    static Dyadic parse(std::string const& text);

  private:
    void canonicalize();

    mpz_class num_{0};
    std::uint64_t exp_{0};
};

}  // namespace coalflow
