#include "linalg/scalar.hpp"

#include <stdexcept>

namespace kvt::lin {

std::string to_string(ScalarMode m) {
    return m.rational() ? "Q" : "F_" + std::to_string(m.p);
}

static void require_valid_modulus(std::uint64_t p) {
    // 2^62 keeps a+b, and Bezout coefficients in the inverse, inside 64 bits.
    if (p < 2 || p >= (std::uint64_t(1) << 62))
        throw std::invalid_argument("scalar modulus out of range: " + std::to_string(p));
}

ExactScalar ExactScalar::zero(ScalarMode m) { return from_int(0, m); }
ExactScalar ExactScalar::one(ScalarMode m) { return from_int(1, m); }

ExactScalar ExactScalar::from_int(long v, ScalarMode m) {
    if (m.rational()) return ExactScalar(0, mpq_class(v), 0);
    require_valid_modulus(m.p);
    long r = v % static_cast<long>(m.p);
    if (r < 0) r += static_cast<long>(m.p);
    return ExactScalar(m.p, mpq_class(0), static_cast<std::uint64_t>(r));
}

ExactScalar ExactScalar::from_rational(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    return ExactScalar(0, std::move(c), 0);
}

ExactScalar ExactScalar::from_residue(std::uint64_t r, std::uint64_t p) {
    require_valid_modulus(p);
    return ExactScalar(p, mpq_class(0), r % p);
}

bool ExactScalar::is_zero() const { return p_ == 0 ? q_ == 0 : r_ == 0; }
bool ExactScalar::is_one() const { return p_ == 0 ? q_ == 1 : r_ == 1; }

void ExactScalar::require_same_mode(const ExactScalar& o) const {
    if (p_ != o.p_)
        throw std::invalid_argument("mixed scalar modes: " + to_string(mode()) +
                                    " vs " + to_string(o.mode()));
}

ExactScalar ExactScalar::operator+(const ExactScalar& o) const {
    require_same_mode(o);
    if (p_ == 0) return ExactScalar(0, q_ + o.q_, 0);
    std::uint64_t s = r_ + o.r_;
    if (s >= p_) s -= p_;
    return ExactScalar(p_, mpq_class(0), s);
}

ExactScalar ExactScalar::operator-(const ExactScalar& o) const {
    require_same_mode(o);
    if (p_ == 0) return ExactScalar(0, q_ - o.q_, 0);
    std::uint64_t s = r_ >= o.r_ ? r_ - o.r_ : r_ + p_ - o.r_;
    return ExactScalar(p_, mpq_class(0), s);
}

ExactScalar ExactScalar::operator*(const ExactScalar& o) const {
    require_same_mode(o);
    if (p_ == 0) return ExactScalar(0, q_ * o.q_, 0);
    unsigned __int128 prod = static_cast<unsigned __int128>(r_) * o.r_;
    return ExactScalar(p_, mpq_class(0), static_cast<std::uint64_t>(prod % p_));
}

ExactScalar ExactScalar::operator-() const {
    if (p_ == 0) return ExactScalar(0, -q_, 0);
    return ExactScalar(p_, mpq_class(0), r_ == 0 ? 0 : p_ - r_);
}

ExactScalar ExactScalar::inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    if (p_ == 0) return ExactScalar(0, 1 / q_, 0);
    // extended Euclid on (r_, p_); p_ < 2^62 keeps the coefficients in int64
    std::int64_t t = 0, new_t = 1;
    std::uint64_t r = p_, new_r = r_;
    while (new_r != 0) {
        std::uint64_t q = r / new_r;
        std::int64_t tmp_t = t - static_cast<std::int64_t>(q) * new_t;
        t = new_t;
        new_t = tmp_t;
        std::uint64_t tmp_r = r - q * new_r;
        r = new_r;
        new_r = tmp_r;
    }
    if (r != 1)
        throw std::domain_error("residue " + std::to_string(r_) +
                                " not invertible mod " + std::to_string(p_));
    if (t < 0) t += static_cast<std::int64_t>(p_);
    return ExactScalar(p_, mpq_class(0), static_cast<std::uint64_t>(t));
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& o) { return *this = *this + o; }
ExactScalar& ExactScalar::operator*=(const ExactScalar& o) { return *this = *this * o; }

bool ExactScalar::operator==(const ExactScalar& o) const {
    if (p_ != o.p_) return false;
    return p_ == 0 ? q_ == o.q_ : r_ == o.r_;
}

const mpq_class& ExactScalar::rat() const {
    if (p_ != 0) throw std::logic_error("rat() on prime-field scalar");
    return q_;
}

std::uint64_t ExactScalar::residue() const {
    if (p_ == 0) throw std::logic_error("residue() on rational scalar");
    return r_;
}

std::string ExactScalar::str() const {
    return p_ == 0 ? q_.get_str() : std::to_string(r_);
}

}  // namespace kvt::lin
