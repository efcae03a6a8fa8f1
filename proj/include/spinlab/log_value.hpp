#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace spinlab {

/// Nonnegative real stored as its natural logarithm. Zero is log = -inf.
class LogValue {
public:
    constexpr LogValue() = default;

    static LogValue from_log(double log_magnitude) { return LogValue(log_magnitude); }
    static LogValue from_linear(double value)
    {
        return LogValue(value > 0.0 ? std::log(value) : -std::numeric_limits<double>::infinity());
    }
    static LogValue zero() { return LogValue(); }
    static LogValue one() { return LogValue(0.0); }

    double log() const { return log_; }
    bool is_zero() const { return log_ == -std::numeric_limits<double>::infinity(); }
    double linear() const { return std::exp(log_); }

    friend LogValue operator*(LogValue a, LogValue b)
    {
        if (a.is_zero() || b.is_zero())
            return zero();
        return LogValue(a.log_ + b.log_);
    }
    friend LogValue operator/(LogValue a, LogValue b) { return LogValue(a.log_ - b.log_); }
    friend LogValue operator+(LogValue a, LogValue b)
    {
        if (a.is_zero())
            return b;
        if (b.is_zero())
            return a;
        double hi = std::max(a.log_, b.log_);
        double lo = std::min(a.log_, b.log_);
        return LogValue(hi + std::log1p(std::exp(lo - hi)));
    }
    LogValue& operator+=(LogValue other) { return *this = *this + other; }
    LogValue& operator*=(LogValue other) { return *this = *this * other; }

    friend bool operator==(LogValue a, LogValue b) { return a.log_ == b.log_; }
    friend bool operator<(LogValue a, LogValue b) { return a.log_ < b.log_; }

private:
    explicit constexpr LogValue(double l)
        : log_(l)
    {
    }

    double log_ = -std::numeric_limits<double>::infinity();
};

/// |a - b| / max(a, b) computed in log space; 0 when both are zero.
inline double relative_gap(LogValue a, LogValue b)
{
    if (a.is_zero() && b.is_zero())
        return 0.0;
    if (a.is_zero() || b.is_zero())
        return 1.0;
    double d = std::abs(a.log() - b.log());
    return -std::expm1(-d);
}

/// Streaming log-sum-exp accumulator: represents exp(max) * sum.
struct LseAccumulator {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    void add(double log_term)
    {
        if (log_term == -std::numeric_limits<double>::infinity())
            return;
        if (log_term <= max) {
            sum += std::exp(log_term - max);
        } else {
            sum = sum * std::exp(max - log_term) + 1.0;
            max = log_term;
        }
    }

    void merge(const LseAccumulator& other)
    {
        if (other.sum == 0.0)
            return;
        if (sum == 0.0) {
            *this = other;
            return;
        }
        if (other.max <= max) {
            sum += other.sum * std::exp(other.max - max);
        } else {
            sum = sum * std::exp(max - other.max) + other.sum;
            max = other.max;
        }
    }

    LogValue value() const
    {
        if (sum == 0.0)
            return LogValue::zero();
        return LogValue::from_log(max + std::log(sum));
    }
};

/// Sum of log-values by pairwise reduction in index order.
inline LogValue log_sum(std::span<const LogValue> terms)
{
    if (terms.empty())
        return LogValue::zero();
    if (terms.size() == 1)
        return terms[0];
    auto mid = terms.size() / 2;
    return log_sum(terms.first(mid)) + log_sum(terms.subspan(mid));
}

} // namespace spinlab
