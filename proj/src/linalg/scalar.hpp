#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace kvt::lin {

// Arithmetic mode of a computation session: p == 0 selects exact rationals,
// p >= 2 selects the prime field F_p. Primality of p is the caller's
// responsibility (the CLI validates it once at startup); every operation
// below only needs p to be a modulus that is fixed per session.
struct ScalarMode {
    std::uint64_t p = 0;

    bool rational() const { return p == 0; }
    bool operator==(const ScalarMode&) const = default;
};

std::string to_string(ScalarMode m);

// One exact scalar: a reduced arbitrary-precision rational, or a residue that
// remembers its modulus. Mixing moduli, or residues with rationals, throws.
// No floating point anywhere.
class ExactScalar {
  public:
    ExactScalar() : p_(0), q_(0) {}

    static ExactScalar zero(ScalarMode m);
    static ExactScalar one(ScalarMode m);
    static ExactScalar from_int(long v, ScalarMode m);
    static ExactScalar from_rational(const mpq_class& q);
    static ExactScalar from_residue(std::uint64_t r, std::uint64_t p);

    ScalarMode mode() const { return {p_}; }
    bool is_zero() const;
    bool is_one() const;

    ExactScalar operator+(const ExactScalar& o) const;
    ExactScalar operator-(const ExactScalar& o) const;
    ExactScalar operator*(const ExactScalar& o) const;
    ExactScalar operator-() const;
    ExactScalar inverse() const;

    ExactScalar& operator+=(const ExactScalar& o);
    ExactScalar& operator*=(const ExactScalar& o);

    bool operator==(const ExactScalar& o) const;
    bool operator!=(const ExactScalar& o) const { return !(*this == o); }

    // Mode-checked accessors.
    const mpq_class& rat() const;
    std::uint64_t residue() const;

    std::string str() const;

  private:
    ExactScalar(std::uint64_t p, mpq_class q, std::uint64_t r)
        : p_(p), q_(std::move(q)), r_(r) {}

    void require_same_mode(const ExactScalar& o) const;

    std::uint64_t p_;  // 0 = rational mode
    mpq_class q_;      // value when p_ == 0
    std::uint64_t r_ = 0;  // value when p_ > 0, always in [0, p_)
};

}  // namespace kvt::lin
