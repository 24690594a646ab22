#include "svsp/bigint.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace svsp::crypto {

void BigInt::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  if (limbs_.empty()) negative_ = false;
}

int BigInt::cmp_mag(const Limbs& a, const Limbs& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

void BigInt::add_mag(Limbs& a, const Limbs& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  uint64_t carry = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    uint64_t sum = carry + a[i] + (i < b.size() ? b[i] : 0);
    a[i] = static_cast<uint32_t>(sum);
    carry = sum >> 32;
  }
  if (carry) a.push_back(static_cast<uint32_t>(carry));
}

void BigInt::sub_mag(Limbs& a, const Limbs& b) {
  int64_t borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t diff = static_cast<int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
    if (diff < 0) {
      diff += int64_t{1} << 32;
      borrow = 1;
    } else {
      borrow = 0;
    }
    a[i] = static_cast<uint32_t>(diff);
  }
  while (!a.empty() && a.back() == 0) a.pop_back();
}

BigInt::Limbs BigInt::mul_mag(const Limbs& a, const Limbs& b) {
  if (a.empty() || b.empty()) return {};
  Limbs out(a.size() + b.size(), 0);
  for (size_t i = 0; i < a.size(); ++i) {
    uint64_t carry = 0;
    uint64_t ai = a[i];
    for (size_t j = 0; j < b.size(); ++j) {
      uint64_t cur = out[i + j] + ai * b[j] + carry;
      out[i + j] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
    }
    size_t k = i + b.size();
    while (carry) {
      uint64_t cur = out[k] + carry;
      out[k] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
      ++k;
    }
  }
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

// Knuth TAOCP vol. 2, algorithm D, base 2^32.
void BigInt::divmod_mag(const Limbs& num, const Limbs& den, Limbs& quot, Limbs& rem) {
  quot.clear();
  rem.clear();
  if (cmp_mag(num, den) < 0) {
    rem = num;
    return;
  }
  if (den.size() == 1) {
    uint64_t d = den[0];
    quot.assign(num.size(), 0);
    uint64_t r = 0;
    for (size_t i = num.size(); i-- > 0;) {
      uint64_t cur = (r << 32) | num[i];
      quot[i] = static_cast<uint32_t>(cur / d);
      r = cur % d;
    }
    while (!quot.empty() && quot.back() == 0) quot.pop_back();
    if (r) rem.push_back(static_cast<uint32_t>(r));
    return;
  }

  // Normalize so the top divisor limb has its high bit set.
  const int shift = std::countl_zero(den.back());
  const size_t n = den.size();
  const size_t m = num.size() - n;

  Limbs v(n);
  for (size_t i = n; i-- > 0;) {
    v[i] = den[i] << shift;
    if (shift && i > 0) v[i] |= den[i - 1] >> (32 - shift);
  }
  Limbs u(num.size() + 1, 0);
  u[num.size()] = shift ? num.back() >> (32 - shift) : 0;
  for (size_t i = num.size(); i-- > 0;) {
    u[i] = num[i] << shift;
    if (shift && i > 0) u[i] |= num[i - 1] >> (32 - shift);
  }

  quot.assign(m + 1, 0);
  const uint64_t v_top = v[n - 1];
  const uint64_t v_next = v[n - 2];

  for (size_t j = m + 1; j-- > 0;) {
    uint64_t numerator = (static_cast<uint64_t>(u[j + n]) << 32) | u[j + n - 1];
    uint64_t qhat = numerator / v_top;
    uint64_t rhat = numerator % v_top;
    while (qhat >= (uint64_t{1} << 32) ||
           qhat * v_next > ((rhat << 32) | u[j + n - 2])) {
      --qhat;
      rhat += v_top;
      if (rhat >= (uint64_t{1} << 32)) break;
    }

    // u[j .. j+n] -= qhat * v
    int64_t borrow = 0;
    uint64_t carry = 0;
    for (size_t i = 0; i < n; ++i) {
      uint64_t product = qhat * v[i] + carry;
      carry = product >> 32;
      int64_t diff = static_cast<int64_t>(u[i + j]) - static_cast<int64_t>(product & 0xFFFFFFFFu) - borrow;
      if (diff < 0) {
        diff += int64_t{1} << 32;
        borrow = 1;
      } else {
        borrow = 0;
      }
      u[i + j] = static_cast<uint32_t>(diff);
    }
    int64_t top = static_cast<int64_t>(u[j + n]) - static_cast<int64_t>(carry) - borrow;
    if (top < 0) {
      // qhat was one too large: add the divisor back.
      top += int64_t{1} << 32;
      --qhat;
      uint64_t c = 0;
      for (size_t i = 0; i < n; ++i) {
        uint64_t sum = static_cast<uint64_t>(u[i + j]) + v[i] + c;
        u[i + j] = static_cast<uint32_t>(sum);
        c = sum >> 32;
      }
      top += static_cast<int64_t>(c);
      top &= (int64_t{1} << 32) - 1;
    }
    u[j + n] = static_cast<uint32_t>(top);
    quot[j] = static_cast<uint32_t>(qhat);
  }

  while (!quot.empty() && quot.back() == 0) quot.pop_back();
  rem.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    rem[i] = shift ? (u[i] >> shift) | (u[i + 1] << (32 - shift)) : u[i];
  }
  while (!rem.empty() && rem.back() == 0) rem.pop_back();
}

size_t BigInt::bit_length() const {
  if (limbs_.empty()) return 0;
  return 32 * (limbs_.size() - 1) + (32 - std::countl_zero(limbs_.back()));
}

bool BigInt::bit(size_t i) const {
  size_t limb = i / 32;
  if (limb >= limbs_.size()) return false;
  return (limbs_[limb] >> (i % 32)) & 1;
}

uint64_t BigInt::to_u64() const {
  if (negative_) throw std::overflow_error("to_u64 of negative value");
  if (limbs_.size() > 2) throw std::overflow_error("value exceeds 64 bits");
  uint64_t v = 0;
  if (limbs_.size() > 1) v = static_cast<uint64_t>(limbs_[1]) << 32;
  if (!limbs_.empty()) v |= limbs_[0];
  return v;
}

BigInt BigInt::operator-() const {
  BigInt out = *this;
  out.negate();
  return out;
}

BigInt& BigInt::negate() {
  if (!limbs_.empty()) negative_ = !negative_;
  return *this;
}

BigInt& BigInt::operator+=(const BigInt& rhs) {
  if (negative_ == rhs.negative_) {
    add_mag(limbs_, rhs.limbs_);
  } else {
    int c = cmp_mag(limbs_, rhs.limbs_);
    if (c == 0) {
      limbs_.clear();
      negative_ = false;
    } else if (c > 0) {
      sub_mag(limbs_, rhs.limbs_);
    } else {
      Limbs tmp = rhs.limbs_;
      sub_mag(tmp, limbs_);
      limbs_ = std::move(tmp);
      negative_ = rhs.negative_;
    }
  }
  trim();
  return *this;
}

BigInt& BigInt::operator-=(const BigInt& rhs) {
  BigInt neg = rhs;
  neg.negate();
  return *this += neg;
}

BigInt& BigInt::operator*=(const BigInt& rhs) {
  bool neg = negative_ != rhs.negative_;
  limbs_ = mul_mag(limbs_, rhs.limbs_);
  negative_ = !limbs_.empty() && neg;
  return *this;
}

void BigInt::divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem) {
  if (den.is_zero()) throw std::domain_error("division by zero");
  Limbs q, r;
  divmod_mag(num.limbs_, den.limbs_, q, r);
  quot.limbs_ = std::move(q);
  rem.limbs_ = std::move(r);
  quot.negative_ = !quot.limbs_.empty() && (num.negative_ != den.negative_);
  rem.negative_ = !rem.limbs_.empty() && num.negative_;
}

BigInt& BigInt::operator/=(const BigInt& rhs) {
  BigInt q, r;
  divmod(*this, rhs, q, r);
  return *this = std::move(q);
}

BigInt& BigInt::operator%=(const BigInt& rhs) {
  BigInt q, r;
  divmod(*this, rhs, q, r);
  return *this = std::move(r);
}

BigInt& BigInt::operator<<=(size_t bits) {
  if (limbs_.empty() || bits == 0) return *this;
  size_t limb_shift = bits / 32;
  size_t bit_shift = bits % 32;
  limbs_.insert(limbs_.begin(), limb_shift, 0);
  if (bit_shift) {
    uint32_t carry = 0;
    for (size_t i = limb_shift; i < limbs_.size(); ++i) {
      uint32_t next = limbs_[i] >> (32 - bit_shift);
      limbs_[i] = (limbs_[i] << bit_shift) | carry;
      carry = next;
    }
    if (carry) limbs_.push_back(carry);
  }
  return *this;
}

BigInt& BigInt::operator>>=(size_t bits) {
  if (limbs_.empty() || bits == 0) return *this;
  size_t limb_shift = bits / 32;
  size_t bit_shift = bits % 32;
  if (limb_shift >= limbs_.size()) {
    limbs_.clear();
    negative_ = false;
    return *this;
  }
  limbs_.erase(limbs_.begin(), limbs_.begin() + static_cast<ptrdiff_t>(limb_shift));
  if (bit_shift) {
    for (size_t i = 0; i < limbs_.size(); ++i) {
      limbs_[i] >>= bit_shift;
      if (i + 1 < limbs_.size()) limbs_[i] |= limbs_[i + 1] << (32 - bit_shift);
    }
  }
  trim();
  return *this;
}

std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
  if (a.negative_ != b.negative_) {
    return a.negative_ ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  int c = BigInt::cmp_mag(a.limbs_, b.limbs_);
  if (a.negative_) c = -c;
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

BigInt BigInt::from_decimal(std::string_view text) {
  size_t pos = 0;
  bool neg = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    neg = text[pos] == '-';
    ++pos;
  }
  if (pos == text.size()) throw std::invalid_argument("empty decimal string");
  BigInt out;
  const BigInt chunk_base{1000000000};
  while (pos < text.size()) {
    size_t take = std::min<size_t>(9, text.size() - pos);
    uint32_t chunk = 0;
    for (size_t i = 0; i < take; ++i) {
      char c = text[pos + i];
      if (c < '0' || c > '9') throw std::invalid_argument("invalid decimal digit");
      chunk = chunk * 10 + static_cast<uint32_t>(c - '0');
    }
    BigInt scale = 1;
    for (size_t i = 0; i < take; ++i) scale *= BigInt{10};
    out = out * scale + BigInt{chunk};
    pos += take;
  }
  if (neg && !out.is_zero()) out.negative_ = true;
  return out;
}

std::string BigInt::to_decimal() const {
  if (is_zero()) return "0";
  std::string out;
  BigInt value = *this;
  value.negative_ = false;
  const BigInt base{1000000000};
  std::vector<uint32_t> groups;
  while (!value.is_zero()) {
    BigInt q, r;
    divmod(value, base, q, r);
    groups.push_back(r.limbs_.empty() ? 0 : r.limbs_[0]);
    value = std::move(q);
  }
  out = std::to_string(groups.back());
  for (size_t i = groups.size() - 1; i-- > 0;) {
    std::string part = std::to_string(groups[i]);
    out += std::string(9 - part.size(), '0') + part;
  }
  if (negative_) out.insert(out.begin(), '-');
  return out;
}

Bytes BigInt::to_bytes_be(size_t width) const {
  if (negative_) throw std::length_error("cannot encode negative value");
  Bytes out;
  for (size_t i = limbs_.size(); i-- > 0;) {
    out.push_back(static_cast<uint8_t>(limbs_[i] >> 24));
    out.push_back(static_cast<uint8_t>(limbs_[i] >> 16));
    out.push_back(static_cast<uint8_t>(limbs_[i] >> 8));
    out.push_back(static_cast<uint8_t>(limbs_[i]));
  }
  size_t skip = 0;
  while (skip < out.size() && out[skip] == 0) ++skip;
  out.erase(out.begin(), out.begin() + static_cast<ptrdiff_t>(skip));
  if (width > 0) {
    if (out.size() > width) throw std::length_error("value wider than requested encoding");
    out.insert(out.begin(), width - out.size(), 0);
  }
  return out;
}

BigInt BigInt::from_bytes_be(BytesView data) {
  BigInt out;
  size_t skip = 0;
  while (skip < data.size() && data[skip] == 0) ++skip;
  size_t len = data.size() - skip;
  if (len == 0) return out;
  out.limbs_.assign((len + 3) / 4, 0);
  for (size_t i = 0; i < len; ++i) {
    size_t significance = len - 1 - i;  // bytes from the least-significant end
    out.limbs_[significance / 4] |= static_cast<uint32_t>(data[skip + i]) << (8 * (significance % 4));
  }
  out.trim();
  return out;
}

}  // namespace svsp::crypto
